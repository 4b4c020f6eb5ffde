//! Gamma-function helpers.

use crate::scalar::Real;

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma<T: Real>(x: T) -> T {
    debug_assert!(x > T::zero());
    if x < T::lit(30.0) {
        return gamma(x).abs().ln();
    }
    let inv = x.recip();
    let inv2 = inv * inv;
    // Stirling coefficients B_{2k} / (2k (2k-1)).
    let coeffs = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
    ];
    let mut series = T::zero();
    for c in coeffs.iter().rev() {
        series = series * inv2 + T::lit(*c);
    }
    series *= inv;
    (x - T::lit(0.5)) * x.ln() - x + T::lit(0.918_938_533_204_672_741_78) + series
}

/// `Γ(x)` for real `x` that is not a non-positive integer.
pub fn gamma<T: Real>(x: T) -> T {
    if x < T::lit(0.5) {
        // Reflection: Γ(x) Γ(1-x) = π / sin(πx).
        let s = (T::PI() * x).sin();
        return T::PI() / (s * gamma(T::one() - x));
    }
    if x <= T::lit(171.0) && x == x.floor() {
        let n = x.to_usize().unwrap_or(0);
        return (1..n).fold(T::one(), |acc, k| acc * T::from_usize_lossy(k));
    }
    if x >= T::lit(30.0) {
        return ln_gamma(x).exp();
    }
    // Γ(x) = (x-1)(x-2)…(y) Γ(y) with y ∈ [1/2, 3/2), and 1/Γ(y) from its Taylor series.
    let mut y = x;
    let mut prod = T::one();
    while y >= T::lit(1.5) {
        y -= T::one();
        prod *= y;
    }
    prod / temme_gammas(y - T::one()).2
}

/// Taylor coefficients of `1/Γ(z) = Σ c_k z^k`, `c_1 = 1`.
#[allow(clippy::excessive_precision)]
const RECIP_GAMMA: [f64; 26] = [
    1.0,
    0.577_215_664_901_532_860_61,
    -0.655_878_071_520_253_881_08,
    -0.042_002_635_034_095_235_529,
    0.166_538_611_382_291_489_5,
    -0.042_197_734_555_544_336_748,
    -0.009_621_971_527_876_973_562_1,
    0.007_218_943_246_663_099_542_4,
    -0.001_165_167_591_859_065_112_1,
    -0.000_215_241_674_114_950_972_82,
    0.000_128_050_282_388_116_186_15,
    -0.000_020_134_854_780_788_238_656,
    -1.250_493_482_142_670_657_3e-6,
    1.133_027_231_981_695_882_4e-6,
    -2.056_338_416_977_607_103_5e-7,
    6.116_095_104_481_415_817_9e-9,
    5.002_007_644_469_222_930_1e-9,
    -1.181_274_570_487_020_144_6e-9,
    1.043_426_711_691_100_510_5e-10,
    7.782_263_439_905_071_254e-12,
    -3.696_805_618_642_205_708_2e-12,
    5.100_370_287_454_475_979e-13,
    -2.058_326_053_566_506_783_2e-14,
    -5.348_122_539_423_017_982_4e-15,
    1.226_778_628_238_260_790_2e-15,
    -1.181_259_301_697_458_769_5e-16,
];

/// Quantities needed by Temme's series for `|mu| <= 1/2`:
/// `(gam1, gam2, 1/Γ(1+mu), 1/Γ(1-mu))` with
/// `gam1 = (1/Γ(1-mu) - 1/Γ(1+mu)) / (2 mu)` and
/// `gam2 = (1/Γ(1-mu) + 1/Γ(1+mu)) / 2`.
pub fn temme_gammas<T: Real>(mu: T) -> (T, T, T, T) {
    // 1/Γ(1+x) = Σ_{m>=0} c_{m+1} x^m
    let mu2 = mu * mu;
    let mut even = T::zero();
    let mut odd = T::zero();
    for m in (0..RECIP_GAMMA.len()).rev() {
        let c = T::lit(RECIP_GAMMA[m]);
        if m % 2 == 0 {
            even = even * mu2 + c;
        } else {
            odd = odd * mu2 + c;
        }
    }
    // even collects c_1 + c_3 mu^2 + ..., odd collects c_2 + c_4 mu^2 + ...
    let gampl = even + mu * odd;
    let gammi = even - mu * odd;
    (-odd, even, gampl, gammi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_factorials_and_half_integers() {
        assert!((gamma(5.0_f64) - 24.0).abs() < 1e-12);
        assert!((gamma(0.5_f64) - std::f64::consts::PI.sqrt()).abs() < 1e-14);
        assert!((gamma(-0.5_f64) + 2.0 * std::f64::consts::PI.sqrt()).abs() < 1e-13);
        // ln Γ(100.5) = 361.435540467778... (mpmath)
        assert!((ln_gamma(100.5_f64) - 361.435_540_467_777_6).abs() < 1e-11);
        assert!((ln_gamma(0.1_f64) - 2.252_712_651_734_206).abs() < 1e-13);
    }

    #[test]
    fn temme_gammas_consistent_with_gamma() {
        for &mu in &[-0.5_f64, -0.3, -1e-4, 0.0, 1e-4, 0.2, 0.5] {
            let (g1, g2, gp, gm) = temme_gammas(mu);
            assert!((gp - 1.0 / gamma(1.0 + mu)).abs() < 1e-15);
            assert!((gm - 1.0 / gamma(1.0 - mu)).abs() < 1e-15);
            assert!((g2 - 0.5 * (gm + gp)).abs() < 1e-15);
            if mu.abs() > 0.1 {
                assert!((g1 - (gm - gp) / (2.0 * mu)).abs() < 1e-13);
            }
        }
        let (g1, _, _, _) = temme_gammas(0.0_f64);
        assert!((g1 + 0.577_215_664_901_532_9).abs() < 1e-15);
    }
}
