//! Real-order Bessel functions of the first and second kind.
//!
//! `J_nu` and `Y_nu` are computed together by Steed's continued-fraction
//! method, with Temme's series for `x < 2`. The downward recurrence for `J`
//! and the upward recurrence for `Y` are rescaled as they go, so each result
//! is available as a mantissa and a natural-log exponent; this keeps
//! products such as `J_nu(a) Y_nu(b)` finite at orders where the factors
//! individually under- or overflow.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::special::dd::DoubleDouble;
use crate::special::gamma::{gamma, temme_gammas};
use crate::special::BesselOrder;

const MAX_ITER: usize = 200_000;

/// `J_nu`, `J_nu'`, `Y_nu`, `Y_nu'` in scaled form:
/// `J_nu = j * exp(log_j)`, `Y_nu = y * exp(log_y)`.
#[derive(Clone, Copy, Debug)]
pub struct ScaledJy<T> {
    pub j: T,
    pub jp: T,
    pub log_j: T,
    pub y: T,
    pub yp: T,
    pub log_y: T,
}

impl<T: Real> ScaledJy<T> {
    pub fn j_value(&self) -> T {
        self.j * self.log_j.exp()
    }

    pub fn jp_value(&self) -> T {
        self.jp * self.log_j.exp()
    }

    pub fn y_value(&self) -> T {
        self.y * self.log_y.exp()
    }

    pub fn yp_value(&self) -> T {
        self.yp * self.log_y.exp()
    }
}

/// Steed/Temme evaluation of `J_nu(x)`, `Y_nu(x)` and their derivatives for
/// `nu >= 0`, `x > 0`.
pub fn bessel_jy_scaled<T: Real>(nu: T, x: T) -> Result<ScaledJy<T>> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(Error::domain("bessel_jy", format!("x = {} must be positive", x)));
    }
    if !(nu >= T::zero()) || !nu.is_finite() {
        return Err(Error::domain("bessel_jy", format!("order {} must be >= 0", nu)));
    }
    let eps = T::epsilon();
    let fpmin = T::lit(1e-30);
    let big = T::lit(1e200);
    let ln_big = big.ln();
    let pi = T::PI();
    let two = T::lit(2.0);
    let half = T::lit(0.5);

    let nl = if x < two {
        (nu + half).floor()
    } else {
        (nu - x + T::lit(1.5)).floor().max(T::zero())
    };
    let nl_count = nl.to_usize().unwrap_or(0);
    let xmu = nu - nl;
    let xmu2 = xmu * xmu;
    let xi = x.recip();
    let xi2 = two * xi;
    let w = xi2 / pi;

    // CF1: J'_nu / J_nu by modified Lentz.
    let mut isign = T::one();
    let mut h = (nu * xi).max(fpmin);
    let mut b = xi2 * nu;
    let mut d = T::zero();
    let mut c = h;
    let mut converged = false;
    for _ in 0..MAX_ITER {
        b += xi2;
        d = b - d;
        if d.abs() < fpmin {
            d = fpmin;
        }
        c = b - c.recip();
        if c.abs() < fpmin {
            c = fpmin;
        }
        d = d.recip();
        let del = c * d;
        h *= del;
        if d < T::zero() {
            isign = -isign;
        }
        if (del - T::one()).abs() < eps {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::AccuracyLoss {
            what: "bessel_jy continued fraction 1",
            estimate: 1.0,
        });
    }

    let mut rjl = isign * fpmin;
    let mut rjpl = h * rjl;
    let rjl1 = rjl;
    let rjp1 = rjpl;
    let mut fact = nu * xi;
    let mut log_scale = T::zero();
    for _ in 0..nl_count {
        let rjtemp = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * rjtemp - rjl;
        rjl = rjtemp;
        if rjl.abs() > big {
            rjl /= big;
            rjpl /= big;
            log_scale += ln_big;
        }
    }
    if rjl == T::zero() {
        rjl = eps;
    }
    let f = rjpl / rjl;

    let (rjmu, mut rymu, mut ry1);
    if x < two {
        // Temme's series for Y_mu, Y_{mu+1} with |mu| <= 1/2.
        let x2 = half * x;
        let pimu = pi * xmu;
        let fact = if pimu.abs() < eps { T::one() } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = xmu * d;
        let fact2 = if e.abs() < eps { T::one() } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(xmu);
        let mut ff = two / pi * fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let e = e.exp();
        let mut p = e / (gampl * pi);
        let mut q = (e * pi * gammi).recip();
        let pimu2 = half * pimu;
        let fact3 = if pimu2.abs() < eps { T::one() } else { pimu2.sin() / pimu2 };
        let r = pi * pimu2 * fact3 * fact3;
        let mut c = T::one();
        let d = -x2 * x2;
        let mut sum = ff + r * q;
        let mut sum1 = p;
        let mut converged = false;
        for i in 1..MAX_ITER {
            let fi = T::from_usize_lossy(i);
            ff = (fi * ff + p + q) / (fi * fi - xmu2);
            c *= d / fi;
            p /= fi - xmu;
            q /= fi + xmu;
            let del = c * (ff + r * q);
            sum += del;
            let del1 = c * p - fi * del;
            sum1 += del1;
            if del.abs() < (T::one() + sum.abs()) * eps {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::AccuracyLoss {
                what: "bessel_jy Temme series",
                estimate: 1.0,
            });
        }
        rymu = -sum;
        ry1 = -sum1 * xi2;
        let rymup = xmu * xi * rymu - ry1;
        rjmu = w / (rymup - f * rymu);
    } else {
        // CF2: p + iq = (J' + iY') / (J + iY) by Steed's algorithm.
        let mut a = T::lit(0.25) - xmu2;
        let mut p = -half * xi;
        let mut q = T::one();
        let br = two * x;
        let mut bi = two;
        let mut fact = a * xi / (p * p + q * q);
        let mut cr = br + q * fact;
        let mut ci = bi + p * fact;
        let mut den = br * br + bi * bi;
        let mut dr = br / den;
        let mut di = -bi / den;
        let mut dlr = cr * dr - ci * di;
        let mut dli = cr * di + ci * dr;
        let mut temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        let mut converged = false;
        for i in 2..MAX_ITER {
            a += two * T::from_usize_lossy(i - 1);
            bi += two;
            dr = a * dr + br;
            di = a * di + bi;
            if dr.abs() + di.abs() < fpmin {
                dr = fpmin;
            }
            fact = a / (cr * cr + ci * ci);
            cr = br + cr * fact;
            ci = bi - ci * fact;
            if cr.abs() + ci.abs() < fpmin {
                cr = fpmin;
            }
            den = dr * dr + di * di;
            dr /= den;
            di /= -den;
            dlr = cr * dr - ci * di;
            dli = cr * di + ci * dr;
            temp = p * dlr - q * dli;
            q = p * dli + q * dlr;
            p = temp;
            if (dlr - T::one()).abs() + dli.abs() < eps {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::AccuracyLoss {
                what: "bessel_jy continued fraction 2",
                estimate: 1.0,
            });
        }
        let gam = (p - f) / q;
        let mag = (w / ((p - f) * gam + q)).sqrt();
        rjmu = if rjl < T::zero() { -mag } else { mag };
        rymu = rjmu * gam;
        let rymup = rymu * (p + q / gam);
        ry1 = xmu * xi * rymu - rymup;
    }

    let fact = rjmu / rjl;
    let j = rjl1 * fact;
    let jp = rjp1 * fact;
    let mut log_y = T::zero();
    for i in 1..=nl_count {
        let rytemp = (xmu + T::from_usize_lossy(i)) * xi2 * ry1 - rymu;
        rymu = ry1;
        ry1 = rytemp;
        if ry1.abs() > big {
            ry1 /= big;
            rymu /= big;
            log_y += ln_big;
        }
    }
    let yp = nu * xi * rymu - ry1;
    Ok(ScaledJy {
        j,
        jp,
        log_j: -log_scale,
        y: rymu,
        yp,
        log_y,
    })
}

/// Bessel function of the first kind `J_nu(x)` for `x >= 0`.
pub fn bessel_j<T: Real>(order: BesselOrder<T>, x: T) -> Result<T> {
    let nu = order.value();
    if !(x >= T::zero()) {
        return Err(Error::domain("bessel_j", format!("x = {} must be >= 0", x)));
    }
    if x == T::zero() {
        return Ok(if nu == T::zero() { T::one() } else { T::zero() });
    }
    Ok(bessel_jy_scaled(nu, x)?.j_value())
}

/// Bessel function of the second kind `Y_nu(x)` for `x > 0`.
pub fn bessel_y<T: Real>(order: BesselOrder<T>, x: T) -> Result<T> {
    if !(x > T::zero()) {
        return Err(Error::domain("bessel_y", format!("x = {} must be > 0", x)));
    }
    Ok(bessel_jy_scaled(order.value(), x)?.y_value())
}

/// Ascending series `J_nu(x) = (x/2)^nu Σ (-x²/4)^k / (k! Γ(nu+k+1))`,
/// summed in double-double arithmetic. Valid for any real `nu` that is not
/// a negative integer; accurate while `exp(x)` stays well below `1e16`.
pub fn bessel_j_ascending<T: Real>(nu: T, x: T) -> T {
    if x == T::zero() {
        return if nu == T::zero() { T::one() } else { T::zero() };
    }
    let half_x = T::lit(0.5) * x;
    let lead = half_x.powf(nu) / gamma(nu + T::one());
    let w = DoubleDouble::new(-half_x) * DoubleDouble::new(half_x);
    let mut term = DoubleDouble::new(T::one());
    let mut sum = term;
    for k in 1..1000 {
        let fk = T::from_usize_lossy(k);
        let denom = DoubleDouble::new(fk) * (DoubleDouble::new(nu) + DoubleDouble::new(fk));
        term = term * w / denom;
        sum = sum + term;
        if fk * (nu + fk).abs() > half_x * half_x
            && term.hi.abs() < T::lit(1e-32) * sum.hi.abs()
        {
            break;
        }
    }
    lead * sum.to_real()
}

/// `Y_nu(x) = (J_nu(x) cos(nu π) - J_{-nu}(x)) / sin(nu π)` from the ascending
/// series. Refuses orders with `|sin(nu π)| < 1e-3`, where the difference
/// cancels catastrophically.
pub fn bessel_y_reflection<T: Real>(nu: T, x: T) -> Result<T> {
    let s = (T::PI() * nu).sin();
    if s.abs() < T::lit(1e-3) {
        return Err(Error::domain(
            "bessel_y_reflection",
            format!("order {} lies in the integer guard band", nu),
        ));
    }
    let c = (T::PI() * nu).cos();
    Ok((bessel_j_ascending(nu, x) * c - bessel_j_ascending(-nu, x)) / s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ord(nu: f64) -> BesselOrder<f64> {
        BesselOrder::new(nu).unwrap()
    }

    #[test]
    fn trivial_values() {
        assert_eq!(bessel_j(ord(0.0), 0.0).unwrap(), 1.0);
        assert!(bessel_j(ord(0.5), PI).unwrap().abs() < 1e-15);
        assert!(bessel_y(ord(0.5), PI / 2.0).unwrap().abs() < 1e-15);
        assert!(bessel_j(ord(0.0), -1.0).is_err());
        assert!(bessel_y(ord(0.0), 0.0).is_err());
        assert!(BesselOrder::new(-0.1).is_err());
    }

    // Reference values computed with mpmath at 30 digits.
    #[test]
    fn matches_extended_precision_references() {
        let cases: &[(f64, f64, f64, f64)] = &[
            // (nu, x, J, Y)
            (0.0, 1.0, 0.765_197_686_557_966_55, 0.088_256_964_215_676_958),
            (0.0, 1e-8, 1.0, -11.800_773_877_179_531),
            (2.7, 0.3, 1.421_018_648_372_153_2e-3, -83.569_626_864_374_428),
            (1.0, 40.0, 0.126_038_318_037_585, -5.793_505_821_549_633e-3),
            (10.4, 12.0, 0.297_579_406_617_338_71, -0.096_418_011_311_027_926),
            (60.0, 50.0, 1.048_519_599_531_418_1e-3, -9.194_397_418_995_578),
            (33.0, 1.5, 8.533_934_137_718_116_4e-42, -1.131_452_773_228_466_3e39),
        ];
        for &(nu, x, j, y) in cases {
            let got = bessel_jy_scaled(nu, x).unwrap();
            let (gj, gy) = (got.j_value(), got.y_value());
            assert!((gj - j).abs() <= 1e-12 * j.abs(), "J_{nu}({x}) = {gj} vs {j}");
            assert!((gy - y).abs() <= 1e-12 * y.abs(), "Y_{nu}({x}) = {gy} vs {y}");
        }
        // J_{1/2}(π) vanishes up to the rounding of π itself.
        let half = bessel_jy_scaled(0.5, PI).unwrap();
        assert!(half.j_value().abs() < 5e-16);
        assert!((half.y_value() - 0.450_158_158_078_553_03).abs() < 1e-15);
    }

    #[test]
    fn first_zero_of_j0() {
        assert!(bessel_j(ord(0.0), 2.404_825_557_695_773).unwrap().abs() < 1e-15);
        assert!(bessel_j_ascending(0.0, 2.404_825_557_695_773_f64).abs() < 1e-15);
    }

    #[test]
    fn steed_agrees_with_ascending_series_and_reflection() {
        for &nu in &[0.0_f64, 0.4, 1.0, 2.7, 7.25, 15.0] {
            for &x in &[0.05_f64, 0.7, 1.9, 2.1, 5.0, 9.5] {
                let s = bessel_jy_scaled(nu, x).unwrap();
                let series = bessel_j_ascending(nu, x);
                assert!(
                    (s.j_value() - series).abs() <= 1e-13 * series.abs().max(1e-3),
                    "nu={nu} x={x}"
                );
                if let Ok(y) = bessel_y_reflection(nu, x) {
                    assert!((s.y_value() - y).abs() <= 1e-10 * y.abs().max(1.0), "nu={nu} x={x}");
                }
            }
        }
        assert!(bessel_y_reflection(3.0002, 1.0).is_err());
    }

    #[test]
    fn large_order_small_argument_stays_finite_in_scaled_form() {
        let s = bessel_jy_scaled(300.0_f64, 0.5).unwrap();
        assert!(s.j.is_finite() && s.y.is_finite());
        // J_nu(x) Y_nu(x) -> -1/(nu pi) for nu >> x.
        let prod = s.j * s.y * (s.log_j + s.log_y).exp();
        assert!((prod + 1.0 / (300.0 * PI)).abs() < 1e-5 / 300.0);
    }
}
