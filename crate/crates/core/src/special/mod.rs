//! Special functions used by the kernels and the mode-sum oracle.

pub mod amplitudes;
pub mod bessel;
pub mod dd;
pub mod gamma;
pub mod hankel;
pub mod modified;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use amplitudes::{blend, circle_amplitudes};
pub use bessel::{bessel_j, bessel_jy_scaled, bessel_y, ScaledJy};
pub use hankel::{hankel1_0, j0, j0_y0};
pub use modified::{modified_i, modified_i_integral, modified_i_series, ModifiedI};

/// Non-negative real Bessel order.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct BesselOrder<T>(T);

impl<T: Real> BesselOrder<T> {
    pub fn new(nu: T) -> Result<Self> {
        if nu >= T::zero() && nu.is_finite() {
            Ok(Self(nu))
        } else {
            Err(Error::domain("BesselOrder", format!("order {} must be finite and >= 0", nu)))
        }
    }

    /// Order `|k| / σ` of angular mode `k` on a cone of radius `σ`.
    pub fn for_mode(k: i64, sigma: T) -> Self {
        Self(T::from_i64_lossy(k.abs()) / sigma)
    }

    pub fn value(self) -> T {
        self.0
    }
}
