//! Closed-form kernels on the cone, each split into the geometric sum over
//! branches and the diffractive `s`-integral against `A_σ`.

pub(crate) mod contour;
mod halfwave;
mod resolvent;
mod schrodinger;

pub use halfwave::{bump, half_wave_batch, half_wave_localized, HalfWaveConfig};
pub use resolvent::{resolvent_kernel, spectral_measure_density, Sign};
pub use schrodinger::schrodinger_kernel;

use crate::scalar::{Cplx, Real};

/// Kernel sample with its geometric/diffractive split and an absolute error
/// estimate for `total`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelValue<T> {
    pub geometric: Cplx<T>,
    pub diffractive: Cplx<T>,
    pub total: Cplx<T>,
    pub error: T,
}

impl<T: Real> KernelValue<T> {
    pub fn new(geometric: Cplx<T>, diffractive: Cplx<T>, error: T) -> Self {
        Self {
            geometric,
            diffractive,
            total: geometric + diffractive,
            error,
        }
    }

    pub fn conj(self) -> Self {
        Self::new(self.geometric.conj(), self.diffractive.conj(), self.error)
    }
}
