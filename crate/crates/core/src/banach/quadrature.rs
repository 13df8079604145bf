use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::scalar::{norm2, pairwise_sum, Real};
use crate::sphere::SphereGrid;

use super::NormSpec;

/// Density of the Banach volume measure `d𝔩` on the unit sphere `S` of
/// `space` at `x ∈ S`, relative to Euclidean surface measure:
/// `1 / leb(B ∩ T_x S)`.
pub fn sphere_density<T: Real>(space: &NormSpec<T>, x: &[T]) -> Result<T> {
    if x.len() != space.dim() || x.iter().any(|v| !v.is_finite()) {
        return Err(invalid("sphere point must be finite with the space dimension"));
    }
    let g = space.gauge(x);
    let tol = T::lit(1e-6);
    if (g - T::one()).abs() > tol {
        return Err(Error::Precondition(format!("point has norm {g}, expected 1")));
    }
    Ok(density_at(space, x))
}

fn density_at<T: Real>(space: &NormSpec<T>, x: &[T]) -> T {
    let mut grad = vec![T::zero(); space.dim()];
    space.gauge_gradient(x, &mut grad);
    T::one() / space.section_volume(&grad)
}

/// Weight converting Euclidean surface measure at the unit vector `u` into
/// `d𝔩` at the radially rescaled point `x = u / ‖u‖`:
/// `J(u) = ρ(x) |∇g(u)| / g(u)^d`.
pub fn jacobian<T: Real>(space: &NormSpec<T>, u: &[T]) -> T {
    let d = space.dim();
    let mut grad = vec![T::zero(); d];
    space.gauge_gradient(u, &mut grad);
    let g = space.gauge(u);
    norm2(&grad) / (space.section_volume(&grad) * g.powi(d as i32))
}

/// Points of the Banach unit sphere with their `d𝔩` masses.
#[derive(Debug, Clone)]
pub struct SphereQuadrature<T> {
    grid: Arc<SphereGrid<T>>,
    points: Vec<T>,
    weights: Vec<T>,
    resolution: usize,
}

impl<T: Real> SphereQuadrature<T> {
    pub fn new(space: &NormSpec<T>, resolution: usize) -> Result<Self> {
        let grid = SphereGrid::for_dim(space.dim(), resolution)?;
        Self::on_grid(space, Arc::new(grid), resolution)
    }

    pub fn on_grid(space: &NormSpec<T>, grid: Arc<SphereGrid<T>>, resolution: usize) -> Result<Self> {
        if grid.dim() != space.dim() {
            return Err(invalid("grid dimension differs from the space dimension"));
        }
        let d = space.dim();
        let mut points = Vec::with_capacity(grid.len() * d);
        let mut weights = Vec::with_capacity(grid.len());
        for i in 0..grid.len() {
            let u = grid.point(i);
            let g = space.gauge(u);
            if !(g > T::zero()) || !g.is_finite() {
                return Err(invalid("norm vanishes or diverges on a ray"));
            }
            points.extend(u.iter().map(|&c| c / g));
            weights.push(grid.weight(i) * jacobian(space, u));
        }
        // Exact antipodal symmetry of the weights.
        let weights = (0..grid.len())
            .map(|i| (weights[i] + weights[grid.antipode(i)]) * T::lit(0.5))
            .collect();
        Ok(Self { grid, points, weights, resolution })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn grid(&self) -> &Arc<SphereGrid<T>> {
        &self.grid
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[T] {
        let d = self.dim();
        &self.points[i * d..(i + 1) * d]
    }

    #[inline]
    pub fn weight(&self, i: usize) -> T {
        self.weights[i]
    }

    /// Total mass of `d𝔩`.
    pub fn mass(&self) -> T {
        pairwise_sum(&self.weights)
    }
}
