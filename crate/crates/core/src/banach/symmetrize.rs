use crate::error::Result;
use crate::scalar::{dot, Real};

use super::{NormSpec, SphereQuadrature};

/// Support function of a centrally symmetric body, evaluated on covectors.
pub trait BallSupport<T>: Send + Sync {
    fn dim(&self) -> usize;
    fn support(&self, covector: &[T]) -> T;
}

impl<T: Real> BallSupport<T> for NormSpec<T> {
    fn dim(&self) -> usize {
        NormSpec::dim(self)
    }

    fn support(&self, covector: &[T]) -> T {
        self.dual(covector)
    }
}

/// Zonoid symmetrization `h_symm(y) = (1/2) ∫_S |<x, y>| d𝔩(x)` evaluated
/// by quadrature. Antipodal pairs are merged into generators `z_k` so that
/// `h_symm(y) = Σ_k |<z_k, y>|`, the support function of a zonotope.
#[derive(Debug, Clone)]
pub struct SymmetrizedNorm<T> {
    base: NormSpec<T>,
    resolution: usize,
    generators: Vec<T>,
    table: Option<ZonotopeTable<T>>,
}

impl<T: Real> SymmetrizedNorm<T> {
    pub fn new(space: &NormSpec<T>, resolution: usize) -> Result<Self> {
        let quad = SphereQuadrature::new(space, resolution)?;
        let d = space.dim();
        let mut generators = Vec::with_capacity(quad.len() / 2 * d);
        for i in quad.grid().half() {
            let w = quad.weight(i);
            generators.extend(quad.point(i).iter().map(|&x| x * w));
        }
        let table = (d == 2).then(|| ZonotopeTable::new(&generators));
        Ok(Self { base: space.clone(), resolution, generators, table })
    }

    pub fn base(&self) -> &NormSpec<T> {
        &self.base
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len() / self.base.dim()
    }

    /// `z_k`, one per antipodal pair of quadrature nodes.
    pub fn generator(&self, k: usize) -> &[T] {
        let d = self.base.dim();
        &self.generators[k * d..(k + 1) * d]
    }

    pub fn generators_flat(&self) -> &[T] {
        &self.generators
    }

    pub fn h_symm(&self, y: &[T]) -> T {
        if let Some(t) = &self.table {
            return t.eval(y);
        }
        let d = self.base.dim();
        self.generators.chunks_exact(d).fold(T::zero(), |s, z| s + dot(z, y).abs())
    }

    /// Gauge of the symmetrized space, i.e. the norm whose dual is `h_symm`,
    /// computed as `sup_y <v, y> / h_symm(y)` over the quadrature directions.
    /// Approximate; intended for diagnostics.
    pub fn norm_symm(&self, v: &[T]) -> T {
        let d = self.base.dim();
        self.generators
            .chunks_exact(d)
            .map(|z| {
                let h = self.h_symm(z);
                if h > T::zero() {
                    dot(v, z).abs() / h
                } else {
                    T::zero()
                }
            })
            .fold(T::zero(), T::max)
    }
}

impl<T: Real> BallSupport<T> for SymmetrizedNorm<T> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn support(&self, covector: &[T]) -> T {
        self.h_symm(covector)
    }
}

/// Planar zonotope support function tabulated over the angular arcs on which
/// the maximising vertex is constant.
#[derive(Debug, Clone)]
struct ZonotopeTable<T> {
    breaks: Vec<T>,
    vertices: Vec<[T; 2]>,
}

impl<T: Real> ZonotopeTable<T> {
    fn new(generators: &[T]) -> Self {
        let two_pi = T::PI() * T::lit(2.0);
        let half_pi = T::FRAC_PI_2();
        let gens: Vec<[T; 2]> = generators
            .chunks_exact(2)
            .map(|g| [g[0], g[1]])
            .filter(|g| g[0] != T::zero() || g[1] != T::zero())
            .collect();
        // Each generator changes sign across the two directions orthogonal to it.
        let mut events: Vec<(T, usize)> = Vec::with_capacity(2 * gens.len());
        for (k, g) in gens.iter().enumerate() {
            let b = g[1].atan2(g[0]);
            for a in [b + half_pi, b - half_pi] {
                let a = if a < T::zero() { a + two_pi } else if a >= two_pi { a - two_pi } else { a };
                events.push((a, k));
            }
        }
        events.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        let m = events.len();
        if m == 0 {
            return Self { breaks: vec![T::zero()], vertices: vec![[T::zero(); 2]] };
        }
        let breaks: Vec<T> = events.iter().map(|e| e.0).collect();
        let mut vertices = Vec::with_capacity(m);
        let vertex_at = |a: T| {
            let y = [a.cos(), a.sin()];
            gens.iter().fold([T::zero(); 2], |v, g| {
                let s = if g[0] * y[0] + g[1] * y[1] >= T::zero() { T::one() } else { -T::one() };
                [v[0] + s * g[0], v[1] + s * g[1]]
            })
        };
        // Arc j spans [breaks[j], breaks[j+1]); recompute from scratch
        // periodically to keep the incremental sign flips from drifting.
        let mut v = [T::zero(); 2];
        for j in 0..m {
            let lo = breaks[j];
            let hi = if j + 1 < m { breaks[j + 1] } else { breaks[0] + two_pi };
            if j == 0 || (j % 64 == 0 && hi - lo > T::lit(1e-9)) {
                v = vertex_at((lo + hi) * T::lit(0.5));
            } else {
                // The generator vanishes at `lo`; its sign just after `lo` is
                // the sign of the angular derivative there.
                let g = gens[events[j].1];
                let (sn, cs) = lo.sin_cos();
                let s = if g[1] * cs - g[0] * sn >= T::zero() { T::one() } else { -T::one() };
                v = [v[0] + T::lit(2.0) * s * g[0], v[1] + T::lit(2.0) * s * g[1]];
            }
            vertices.push(v);
        }
        Self { breaks, vertices }
    }

    fn eval(&self, y: &[T]) -> T {
        let mut a = y[1].atan2(y[0]);
        if a < T::zero() {
            a = a + T::PI() * T::lit(2.0);
        }
        let j = self.breaks.partition_point(|&b| b <= a);
        let j = if j == 0 { self.breaks.len() - 1 } else { j - 1 };
        let v = self.vertices[j];
        v[0] * y[0] + v[1] * y[1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct(s: &SymmetrizedNorm<f64>, y: &[f64]) -> f64 {
        (0..s.generator_count()).map(|k| dot(s.generator(k), y).abs()).sum()
    }

    #[test]
    fn table_matches_direct_sum() {
        let sq = NormSpec::<f64>::linf_sampled(2, 64).unwrap();
        let s = SymmetrizedNorm::new(&sq, 512).unwrap();
        for k in 0..97 {
            let t = 0.1 + k as f64 * 0.0649;
            let y = [1.3 * t.cos(), 1.3 * t.sin()];
            assert!((s.h_symm(&y) - direct(&s, &y)).abs() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn euclidean_is_fixed_point() {
        let e = NormSpec::<f64>::euclidean(2).unwrap();
        let s = SymmetrizedNorm::new(&e, 2048).unwrap();
        for k in 0..50 {
            let t = k as f64 * 0.1234;
            assert!((s.h_symm(&[t.cos(), t.sin()]) - 1.0).abs() < 1e-5);
        }
    }

    #[test]
    fn linf_values() {
        let sq = NormSpec::<f64>::linf_sampled(2, 64).unwrap();
        let s = SymmetrizedNorm::new(&sq, 2048).unwrap();
        assert!((s.h_symm(&[1.0, 0.0]) - 1.5).abs() < 1e-4);
        assert!((s.h_symm(&[1.0, 1.0]) - 2.0).abs() < 1e-4);
    }
}
