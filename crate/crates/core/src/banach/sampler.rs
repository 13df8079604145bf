use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};
use crate::scalar::{norm2, sphere_area, Real};

use super::{jacobian, NormSpec, SphereQuadrature};

/// One affine hyperplane `{η : <x, η> = t}` in the dual space with its
/// importance weight.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperplaneDraw<T> {
    pub x: Vec<T>,
    pub t: T,
    pub weight: T,
}

/// Draws hyperplanes from the natural measure `Ξ`: `x` on the unit sphere
/// `S` of the space and a Lebesgue offset `t`.
///
/// `u` is drawn uniformly on the Euclidean sphere and pushed radially to
/// `x = u / ‖u‖`; the weight `(1/2) |S^{d-1}| J(u) len(t_range)` makes the
/// weighted mean of any integrand equal its `Ξ` integral.
#[derive(Debug, Clone)]
pub struct NaturalSampler<T> {
    space: NormSpec<T>,
    t_lo: T,
    t_hi: T,
    half_area: T,
}

impl<T: Real> NaturalSampler<T> {
    pub fn new(space: &NormSpec<T>, t_range: (T, T)) -> Result<Self> {
        let (lo, hi) = t_range;
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(invalid(format!("t_range must be a finite non-empty interval, got [{lo}, {hi}]")));
        }
        Ok(Self {
            space: space.clone(),
            t_lo: lo,
            t_hi: hi,
            half_area: sphere_area::<T>(space.dim()) * T::lit(0.5),
        })
    }

    pub fn space(&self) -> &NormSpec<T> {
        &self.space
    }

    pub fn t_range(&self) -> (T, T) {
        (self.t_lo, self.t_hi)
    }

    /// Fills `x` and returns `(t, weight)`.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, x: &mut [T]) -> (T, T) {
        let d = self.space.dim();
        let u = loop {
            for xi in x.iter_mut() {
                let z: f64 = rng.sample(StandardNormal);
                *xi = T::lit(z);
            }
            let r = norm2(&x[..d]);
            if r > T::lit(1e-12) {
                for xi in x.iter_mut() {
                    *xi = *xi / r;
                }
                break &x[..d];
            }
        };
        let j = jacobian(&self.space, u);
        let g = self.space.gauge(u);
        for xi in x.iter_mut() {
            *xi = *xi / g;
        }
        let len = self.t_hi - self.t_lo;
        let t = self.t_lo + len * T::lit(rng.random::<f64>());
        (t, self.half_area * j * len)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> HyperplaneDraw<T> {
        let mut x = vec![T::zero(); self.space.dim()];
        let (t, weight) = self.sample_into(rng, &mut x);
        HyperplaneDraw { x, t, weight }
    }

    /// Endless deterministic stream for a seed.
    pub fn stream(&self, seed: u64) -> impl Iterator<Item = HyperplaneDraw<T>> + '_ {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        std::iter::repeat_with(move || self.sample(&mut rng))
    }

    /// `mass(d𝔩)` by quadrature, for reporting.
    pub fn mass(&self, resolution: usize) -> Result<T> {
        Ok(SphereQuadrature::new(&self.space, resolution)?.mass())
    }
}
