//! Volumes and mixed volumes of fiber bodies, the mixed symplectic volume
//! of B-body fields by chart quadrature, and the Monte-Carlo check of the
//! product Crofton density.

mod body;

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

pub use body::{body_volume, mixed_volume, zonotope_area, FiberBody, FiberBodySet};

use crate::banach::{NormKind, NormSpec};
use crate::crofton::CroftonSampler;
use crate::error::{invalid, Result};
use crate::fspace::{BBodyField, FiberNorm, ManifoldChart, Metric, Region};
use crate::linalg;
use crate::montecarlo::{mean_and_error, run_batches};
use crate::scalar::{norm2, pairwise_sum, Real};
use crate::sphere::gauss_legendre_on;

/// The fiber `𝓑(x) ⊂ T*_x X` in chart coordinates.
///
/// Symmetrized fields give zonotopes with generators
/// `q_k = (<z_k, ∂_i θ(x)>)_i`, Euclidean coefficient norms give ellipsoids
/// with Gram matrix `G_il = <∂_i θ, A^{-1} ∂_l θ>`.
pub fn fiber_body<T: Real>(field: &BBodyField<T>, x: &[T]) -> Result<FiberBody<T>> {
    let space = field.space();
    if !space.chart().contains(x) {
        return Err(invalid(format!("point {x:?} lies outside the chart")));
    }
    let (n, d) = (space.chart_dim(), space.dim());
    let mut a = vec![T::zero(); n * d];
    space.jacobian_into(x, &mut a);
    Ok(match field.fiber_norm() {
        FiberNorm::Symmetrized(s) => {
            let mut generators = Vec::with_capacity(s.generator_count() * n);
            for k in 0..s.generator_count() {
                let z = s.generator(k);
                for i in 0..n {
                    generators.push((0..d).fold(T::zero(), |acc, j| acc + a[i * d + j] * z[j]));
                }
            }
            FiberBody::Zonotope { dim: n, generators }
        }
        FiberNorm::Original => match space.norm().kind() {
            NormKind::Euclidean { inverse, .. } => {
                let c = space.norm().scale();
                let mut gram = vec![T::zero(); n * n];
                for i in 0..n {
                    for l in 0..n {
                        let mut s = T::zero();
                        for j in 0..d {
                            for k in 0..d {
                                s = s + a[i * d + j] * inverse[j * d + k] * a[l * d + k];
                            }
                        }
                        gram[i * n + l] = s / (c * c);
                    }
                }
                FiberBody::Ellipsoid { dim: n, gram }
            }
            _ => {
                let field = field.clone();
                FiberBody::from_fn(n, move |u: &[T]| {
                    let lambda: Vec<T> = (0..d).map(|j| (0..n).fold(T::zero(), |s, i| s + u[i] * a[i * d + j])).collect();
                    field.coefficient_support(&lambda)
                })
            }
        },
    })
}

/// Chart integral of the mixed volume at two grid sizes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FinslerVolume {
    pub value: f64,
    /// Same integral on half the grid.
    pub coarse: f64,
    pub grid: usize,
    /// `|value - coarse| + 1e-3 |value|`.
    pub tolerance: f64,
    /// `|value - coarse| <= 1e-3 |value|`.
    pub converged: bool,
}

/// `∫_U V(𝓑_1(x), ..., 𝓑_n(x)) dx`.
///
/// At each node the fibers are written in an `h*`-orthonormal coframe and
/// the result is weighted by `sqrt(det h)`. Periodic coordinates spanning a
/// full period use the uniform rule; other coordinates use composite
/// 4-point Gauss–Legendre panels. `grid` is the node count per axis.
pub fn finsler_mixed_volume<T: Real>(fields: &[BBodyField<T>], region: &Region<T>, grid: usize) -> Result<FinslerVolume> {
    let chart = fields.first().ok_or_else(|| invalid("no fields given"))?.space().chart().clone();
    let n = chart.dim();
    if fields.len() != n {
        return Err(invalid(format!("{} fields on a chart of dimension {n}", fields.len())));
    }
    if fields.iter().any(|f| f.space().chart().intervals() != chart.intervals()) {
        return Err(invalid("fields live on different charts"));
    }
    if region.dim() != n {
        return Err(invalid("region dimension differs from the chart"));
    }
    if grid < 8 {
        return Err(invalid("grid must have at least 8 nodes per axis"));
    }
    let fine = integrate(fields, &chart, region, grid)?;
    let coarse = integrate(fields, &chart, region, grid / 2)?;
    let diff = (fine - coarse).abs();
    Ok(FinslerVolume {
        value: fine,
        coarse,
        grid,
        tolerance: diff + 1e-3 * fine.abs(),
        converged: diff <= 1e-3 * fine.abs().max(f64::MIN_POSITIVE),
    })
}

fn axis_rule(region: &Region<f64>, wraps: bool, axis: usize, grid: usize) -> (Vec<f64>, Vec<f64>) {
    let (a, b) = region.intervals()[axis];
    if wraps {
        let h = (b - a) / grid as f64;
        return ((0..grid).map(|k| a + h * (k as f64 + 0.5)).collect(), vec![h; grid]);
    }
    let panels = (grid / 4).max(1);
    let h = (b - a) / panels as f64;
    let (mut x, mut w) = (Vec::new(), Vec::new());
    for p in 0..panels {
        let (px, pw) = gauss_legendre_on(4, a + h * p as f64, a + h * (p + 1) as f64);
        x.extend(px);
        w.extend(pw);
    }
    (x, w)
}

fn integrate<T: Real>(fields: &[BBodyField<T>], chart: &Arc<ManifoldChart<T>>, region: &Region<T>, grid: usize) -> Result<f64> {
    let n = chart.dim();
    let r64 = region_as_f64(region);
    let rules: Vec<(Vec<f64>, Vec<f64>)> = (0..n).map(|i| axis_rule(&r64, region.wraps(chart, i), i, grid)).collect();
    let mut nodes: Vec<(Vec<T>, f64)> = Vec::new();
    match n {
        1 => {
            for (&x, &w) in rules[0].0.iter().zip(&rules[0].1) {
                nodes.push((vec![T::lit(x)], w));
            }
        }
        _ => {
            for (&x, &wx) in rules[0].0.iter().zip(&rules[0].1) {
                for (&y, &wy) in rules[1].0.iter().zip(&rules[1].1) {
                    nodes.push((vec![T::lit(x), T::lit(y)], wx * wy));
                }
            }
        }
    }
    let identity = matches!(chart.metric(), Metric::Identity);
    let values: Vec<f64> = nodes
        .par_iter()
        .map(|(x, w)| -> Result<f64> {
            let mut bodies = fields.iter().map(|f| fiber_body(f, x)).collect::<Result<Vec<_>>>()?;
            let mut factor = T::one();
            if !identity {
                let mut g = vec![T::zero(); n * n];
                chart.metric_at(x, &mut g);
                let l = linalg::cholesky(&g, n).ok_or_else(|| invalid("metric is not positive definite"))?;
                let linv = linalg::inverse(&l, n).ok_or_else(|| invalid("singular metric factor"))?;
                let mut frame = vec![T::zero(); n * n];
                for i in 0..n {
                    for j in 0..n {
                        frame[i * n + j] = linv[j * n + i];
                    }
                }
                bodies = bodies.iter().map(|b| b.pulled(&frame)).collect();
                factor = (0..n).fold(T::one(), |p, i| p * l[i * n + i]);
            }
            let v = mixed_volume(&FiberBodySet::new(bodies)?)?;
            Ok((v * factor).as_f64() * w)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(pairwise_sum(&values))
}

fn region_as_f64<T: Real>(region: &Region<T>) -> Region<f64> {
    Region::from_intervals(region.intervals().iter().map(|&(a, b)| (a.as_f64(), b.as_f64())).collect())
}

/// Monte-Carlo mass of hyperplane tuples meeting a parallelotope, with the
/// mixed-volume prediction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductCroftonReport {
    pub estimate: f64,
    pub std_error: f64,
    pub predicted: f64,
    pub samples: usize,
}

/// `(μ_1 × ... × μ_n)(𝔓)` where `μ_i` is the Crofton measure of `‖·‖*_i`
/// on `V_i*` and `𝔓 = {Σ_j s_j ξ^j : s ∈ [0,1]^n}` with
/// `edges[j][i] = ξ^j_i ∈ V_i*`. A tuple `{<y_i, η_i> = t_i}` meets `𝔓`
/// iff `M s = t` with `M_ij = <y_i, ξ^j_i>` has a solution in the unit cube.
///
/// The prediction is `(n!/2^n) V(K_1, ..., K_n)` with
/// `h_{K_i}(w) = ‖Σ_j w_j ξ^j_i‖*_i`.
pub fn product_crofton_density(
    spaces: &[NormSpec<f64>],
    edges: &[Vec<Vec<f64>>],
    samples: usize,
    seed: u64,
) -> Result<ProductCroftonReport> {
    let n = spaces.len();
    if !(1..=2).contains(&n) {
        return Err(invalid(format!("product Crofton check supports n <= 2 factors, got {n}")));
    }
    if edges.len() != n || edges.iter().any(|e| e.len() != n) {
        return Err(invalid("need n edges, each with one component per factor"));
    }
    for e in edges {
        for (i, c) in e.iter().enumerate() {
            if c.len() != spaces[i].dim() || c.iter().any(|v| !v.is_finite()) {
                return Err(invalid(format!("edge component {i} must be a finite covector of dim {}", spaces[i].dim())));
            }
        }
    }
    if samples == 0 {
        return Err(invalid("samples must be positive"));
    }

    let mut bodies = Vec::with_capacity(n);
    for (i, space) in spaces.iter().enumerate() {
        let cols: Vec<Vec<f64>> = edges.iter().map(|e| e[i].clone()).collect();
        bodies.push(edge_body(space, cols));
    }
    let mv = mixed_volume(&FiberBodySet::new(bodies)?)?;
    let predicted = (1..=n).product::<usize>() as f64 / 2f64.powi(n as i32) * mv;

    let radii: Vec<f64> = (0..n).map(|i| edges.iter().map(|e| norm2(&e[i])).sum()).collect();
    if radii.contains(&0.0) {
        return Ok(ProductCroftonReport { estimate: 0.0, std_error: 0.0, predicted, samples });
    }
    let samplers = spaces
        .iter()
        .zip(&radii)
        .map(|(s, &r)| CroftonSampler::for_space(s, (-r, r)))
        .collect::<Result<Vec<_>>>()?;

    let values: Vec<f64> = run_batches(samples, seed, |rng, len| {
        let mut ys: Vec<Vec<f64>> = spaces.iter().map(|s| vec![0.0; s.dim()]).collect();
        let mut ts = [0.0; 2];
        (0..len)
            .map(|_| {
                let mut weight = 1.0;
                for i in 0..n {
                    let (t, w) = samplers[i].sample_into(rng, &mut ys[i]);
                    ts[i] = t;
                    weight *= w;
                }
                let m = |i: usize, j: usize| crate::scalar::dot(&ys[i], &edges[j][i]);
                let hit = match n {
                    1 => {
                        let s = ts[0] / m(0, 0);
                        s.is_finite() && (0.0..=1.0).contains(&s)
                    }
                    _ => match linalg::solve2(m(0, 0), m(0, 1), m(1, 0), m(1, 1), ts[0], ts[1]) {
                        Some((s0, s1)) => (0.0..=1.0).contains(&s0) && (0.0..=1.0).contains(&s1),
                        None => false,
                    },
                };
                if hit {
                    weight
                } else {
                    0.0
                }
            })
            .collect()
    })
    .concat();
    let (estimate, std_error) = mean_and_error(&values);
    Ok(ProductCroftonReport { estimate, std_error, predicted, samples })
}

/// Body in `R^n` with support `w ↦ ‖Σ_j w_j c_j‖*`.
fn edge_body(space: &NormSpec<f64>, cols: Vec<Vec<f64>>) -> FiberBody<f64> {
    let n = cols.len();
    if let NormKind::Euclidean { inverse, .. } = space.kind() {
        let d = space.dim();
        let c = space.scale();
        let mut gram = vec![0.0; n * n];
        for a in 0..n {
            for b in 0..n {
                let mut s = 0.0;
                for j in 0..d {
                    for k in 0..d {
                        s += cols[a][j] * inverse[j * d + k] * cols[b][k];
                    }
                }
                gram[a * n + b] = s / (c * c);
            }
        }
        return FiberBody::Ellipsoid { dim: n, gram };
    }
    let space = space.clone();
    FiberBody::from_fn(n, move |w: &[f64]| {
        let d = space.dim();
        let v: Vec<f64> = (0..d).map(|k| (0..n).fold(0.0, |s, j| s + w[j] * cols[j][k])).collect();
        space.dual(&v)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fspace::{bbody_field, BasisFunction, FunctionSpaceOnX};
    use std::f64::consts::PI;

    fn trig_field(chart: &Arc<ManifoldChart<f64>>, freq: Vec<i32>, sym: Option<usize>) -> BBodyField<f64> {
        let space = FunctionSpaceOnX::new(chart.clone(), BasisFunction::trig_family(&[freq]), NormSpec::euclidean(2).unwrap()).unwrap();
        bbody_field(Arc::new(space), sym).unwrap()
    }

    #[test]
    fn circle_volume() {
        let chart = Arc::new(ManifoldChart::circle());
        let f = trig_field(&chart, vec![1], None);
        let v = finsler_mixed_volume(&[f], &Region::full(&chart), 64).unwrap();
        assert!((v.value - 4.0 * PI).abs() < 1e-10 && v.converged);
        let fs = trig_field(&chart, vec![1], Some(2048));
        let v = finsler_mixed_volume(&[fs], &Region::full(&chart), 64).unwrap();
        assert!((v.value - 4.0 * PI).abs() < 1e-3 * 4.0 * PI);
    }

    #[test]
    fn torus_metric_independence() {
        let base = ManifoldChart::<f64>::torus();
        let mut values = Vec::new();
        for c in [1.0, 0.5, 2.0] {
            let chart = Arc::new(base.clone().with_metric(Metric::Constant(vec![c * c, 0.0, 0.0, c * c])).unwrap());
            let fields = [trig_field(&chart, vec![1, 0], Some(256)), trig_field(&chart, vec![0, 1], Some(256))];
            values.push(finsler_mixed_volume(&fields, &Region::full(&chart), 16).unwrap().value);
        }
        assert!((values[0] - 8.0 * PI * PI).abs() < 1e-3 * values[0]);
        assert!((values[1] - values[0]).abs() < 1e-9 * values[0]);
        assert!((values[2] - values[0]).abs() < 1e-9 * values[0]);
    }

    #[test]
    fn product_crofton_segment_and_square() {
        let e = NormSpec::euclidean(2).unwrap();
        let xi = vec![0.6, -0.8];
        let r = product_crofton_density(std::slice::from_ref(&e), &[vec![xi.clone()]], 200_000, 1).unwrap();
        assert!((r.predicted - 1.0).abs() < 1e-12);
        assert!((r.estimate - 1.0).abs() < 4.0 * r.std_error);
        let sq = product_crofton_density(
            &[e.clone(), e.clone()],
            &[vec![vec![1.0, 0.0], vec![0.0, 0.0]], vec![vec![0.0, 0.0], vec![0.0, 1.0]]],
            200_000,
            2,
        )
        .unwrap();
        assert!((sq.predicted - 1.0).abs() < 1e-3);
        assert!((sq.estimate - 1.0).abs() < 4.0 * sq.std_error);
        let zero = product_crofton_density(&[e], &[vec![vec![0.0, 0.0]]], 100, 3).unwrap();
        assert_eq!((zero.estimate, zero.predicted), (0.0, 0.0));
    }
}
