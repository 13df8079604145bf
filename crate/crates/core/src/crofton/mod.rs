//! The cosine transform on lines, recovery of Crofton densities from norms
//! and the zonoid positivity test.

mod density;
pub mod harmonics;
mod inversion;

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;

pub use density::GrassmannDensity;
pub use inversion::{
    invert_cosine_transform, invert_with, inversion_grid, residual_profile, Inversion, InversionOptions,
};

use crate::banach::NormSpec;
use crate::error::{invalid, Error, Result};
use crate::scalar::{ball_volume, norm2, sphere_area, Real};
use crate::sphere::SphereGrid;

/// `Σ_x |<x, ĝ>| f(x) ν(x)`, `ν` half the surface measure.
pub fn cosine_transform<T: Real>(f: &GrassmannDensity<T>, g: &[T]) -> T {
    f.cosine_transform(g)
}

/// Crofton density of the dual norm of `space`: the even `φ` on lines of
/// `V` with `T φ = ‖·‖*`. Uses [`InversionOptions::mollified`].
pub fn crofton_density_for<T: Real>(space: &NormSpec<T>) -> Result<GrassmannDensity<T>> {
    Ok(crofton_density_with(space, &InversionOptions::mollified(space.dim()))?.density)
}

pub fn crofton_density_with<T: Real>(space: &NormSpec<T>, opts: &InversionOptions) -> Result<Inversion<T>> {
    let d = space.dim();
    if space.is_scalar_euclidean() || d == 1 {
        // T 1 = κ_{d-1}, so the density of c |·| is c / κ_{d-1}.
        let grid: Arc<SphereGrid<T>> = Arc::new(SphereGrid::for_dim(d, if d == 3 { 3 } else { 16 })?);
        let mut e = vec![T::zero(); d];
        e[0] = T::one();
        let c = space.dual(&e) / ball_volume::<T>(d - 1);
        return Ok(Inversion { density: GrassmannDensity::constant(grid, c), residual: 0.0, degree: 0 });
    }
    if d == 4 {
        return Err(Error::Unsupported(
            "crofton densities in dimension 4 are only available for scalar Euclidean norms".into(),
        ));
    }
    let grid = inversion_grid::<T>(d, opts.max_degree)?;
    let target = GrassmannDensity::from_fn(grid, |x| space.dual(x))?;
    invert_with(&target, opts)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ZonoidReport {
    pub is_zonoid: bool,
    pub min_density: f64,
    pub mean_density: f64,
    /// Threshold `-1e-4 · mean` below which the density counts as negative.
    pub tolerance: f64,
    pub residual: f64,
    pub degree: usize,
}

/// Sign test of the Crofton density of the dual norm: the unit ball is a
/// zonoid exactly when the density is non-negative.
pub fn zonoid_check<T: Real>(space: &NormSpec<T>) -> Result<ZonoidReport> {
    if space.dim() > 3 {
        return Err(Error::Unsupported("zonoid check needs dim <= 3".into()));
    }
    let inv = crofton_density_with(space, &InversionOptions::mollified(space.dim()))?;
    let min = inv.density.min().as_f64();
    let mean = inv.density.mean().as_f64();
    let tol = -1e-4 * mean;
    Ok(ZonoidReport {
        is_zonoid: min >= tol,
        min_density: min,
        mean_density: mean,
        tolerance: tol,
        residual: inv.residual,
        degree: inv.degree,
    })
}

/// Samples affine hyperplanes `{η : <y, η> = t}` of the dual space from the
/// Crofton measure `φ(y) ν(dy) dt`: `y` uniform on the Euclidean sphere,
/// weight `(1/2) |S^{d-1}| φ(y) len(t_range)`.
#[derive(Debug, Clone)]
pub struct CroftonSampler<T> {
    density: GrassmannDensity<T>,
    t_lo: T,
    t_hi: T,
    half_area: T,
}

impl<T: Real> CroftonSampler<T> {
    /// Fails with `Unsupported` when the density is negative somewhere
    /// (signed sampling is not provided).
    pub fn new(density: GrassmannDensity<T>, t_range: (T, T)) -> Result<Self> {
        let (lo, hi) = t_range;
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(invalid("t_range must be a finite non-empty interval"));
        }
        let tol = -T::lit(1e-4) * density.mean().abs();
        if density.min() < tol {
            return Err(Error::Unsupported("Crofton density is signed; the space is not a zonoid".into()));
        }
        let half_area = sphere_area::<T>(density.dim()) * T::lit(0.5);
        Ok(Self { density, t_lo: lo, t_hi: hi, half_area })
    }

    pub fn for_space(space: &NormSpec<T>, t_range: (T, T)) -> Result<Self> {
        Self::new(crofton_density_for(space)?, t_range)
    }

    pub fn density(&self) -> &GrassmannDensity<T> {
        &self.density
    }

    pub fn t_range(&self) -> (T, T) {
        (self.t_lo, self.t_hi)
    }

    /// Fills `y` and returns `(t, weight)`.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, y: &mut [T]) -> (T, T) {
        loop {
            for v in y.iter_mut() {
                let z: f64 = rng.sample(StandardNormal);
                *v = T::lit(z);
            }
            let r = norm2(y);
            if r > T::lit(1e-12) {
                for v in y.iter_mut() {
                    *v = *v / r;
                }
                break;
            }
        }
        let phi = self.density.eval(y).max(T::zero());
        let len = self.t_hi - self.t_lo;
        let t = self.t_lo + len * T::lit(rng.random::<f64>());
        (t, self.half_area * phi * len)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn euclidean_constants() {
        let d2 = crofton_density_for(&NormSpec::<f64>::euclidean(2).unwrap()).unwrap();
        assert!((d2.min() - 0.5).abs() < 1e-12);
        let d3 = crofton_density_for(&NormSpec::<f64>::euclidean(3).unwrap()).unwrap();
        assert!((d3.max() - 1.0 / PI).abs() < 1e-12);
        let d4 = crofton_density_for(&NormSpec::<f64>::euclidean(4).unwrap()).unwrap();
        assert!((d4.max() - 3.0 / (4.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn ellipse_density_reproduces_dual_norm() {
        let e = NormSpec::<f64>::euclidean_matrix(2, vec![2.0, 0.4, 0.4, 1.0]).unwrap();
        let inv = crofton_density_with(&e, &InversionOptions::plain(2)).unwrap();
        for k in 0..20 {
            let t = 0.3 * k as f64;
            let g = [t.cos(), t.sin()];
            assert!((inv.density.cosine_transform(&g) - e.dual(&g)).abs() < 2e-3);
        }
        assert!(inv.density.min() > 0.0);
    }

    #[test]
    fn planar_bodies_are_zonoids() {
        let r = zonoid_check(&NormSpec::<f64>::lp(2, 1.5).unwrap()).unwrap();
        assert!(r.is_zonoid, "{r:?}");
    }
}
