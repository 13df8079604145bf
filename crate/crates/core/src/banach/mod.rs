//! Finite-dimensional Banach spaces: norms and their duals, the Banach
//! volume measure on the unit sphere, zonoid symmetrization and the natural
//! measure on affine hyperplanes of the dual space.

mod norm;
mod quadrature;
mod sampler;
mod symmetrize;

pub use norm::{NormKind, NormSpec, Smoothness, SupportPolytope};
pub use quadrature::{jacobian, sphere_density, SphereQuadrature};
pub use sampler::{HyperplaneDraw, NaturalSampler};
pub use symmetrize::{BallSupport, SymmetrizedNorm};

use crate::error::Result;
use crate::scalar::Real;

/// `sup{<xi, v> : ‖v‖ <= 1}`.
pub fn dual_norm<T: Real>(space: &NormSpec<T>, xi: &[T]) -> Result<T> {
    space.dual_norm(xi)
}

pub fn symmetrize<T: Real>(space: &NormSpec<T>, resolution: usize) -> Result<SymmetrizedNorm<T>> {
    SymmetrizedNorm::new(space, resolution)
}

pub fn natural_sampler<T: Real>(space: &NormSpec<T>, t_range: (T, T)) -> Result<NaturalSampler<T>> {
    NaturalSampler::new(space, t_range)
}
