use std::path::Path;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::geometry::{clip_polygon, clip_polyhedron};
use crate::linalg;
use crate::scalar::{dot, norm2, Real};
use crate::sphere::SphereGrid;

/// Regularity of the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothness {
    Smooth,
    /// Polytope approximant built from sampled support values.
    Polyhedral,
}

#[derive(Debug, Clone)]
pub enum NormKind<T> {
    /// `‖v‖ = sqrt(vᵀ A v)`.
    Euclidean { matrix: Vec<T>, inverse: Vec<T>, det: T },
    Lp { p: T },
    /// Unit ball `{v : <u_k, v> <= h_k for all k}`.
    SupportSampled(Arc<SupportPolytope<T>>),
}

/// A norm on `R^dim`. The overall factor `scale` multiplies the gauge.
#[derive(Debug, Clone)]
pub struct NormSpec<T> {
    dim: usize,
    kind: NormKind<T>,
    scale: T,
}

impl<T: Real> NormSpec<T> {
    pub fn euclidean(dim: usize) -> Result<Self> {
        Self::euclidean_matrix(dim, linalg::identity(dim))
    }

    pub fn euclidean_matrix(dim: usize, matrix: Vec<T>) -> Result<Self> {
        check_dim(dim)?;
        if matrix.len() != dim * dim || matrix.iter().any(|v| !v.is_finite()) {
            return Err(invalid(format!("expected {} finite matrix entries", dim * dim)));
        }
        if !linalg::is_symmetric(&matrix, dim) {
            return Err(invalid("euclidean norm matrix must be symmetric"));
        }
        let l = linalg::cholesky(&matrix, dim)
            .ok_or_else(|| invalid("euclidean norm matrix must be positive definite"))?;
        let det = (0..dim).fold(T::one(), |d, i| d * l[i * dim + i]).powi(2);
        let inverse = linalg::inverse(&matrix, dim).ok_or_else(|| invalid("singular norm matrix"))?;
        Ok(Self { dim, kind: NormKind::Euclidean { matrix, inverse, det }, scale: T::one() })
    }

    /// `ℓ^p` norm, `1 < p < ∞`.
    pub fn lp(dim: usize, p: T) -> Result<Self> {
        check_dim(dim)?;
        if !(p > T::one()) || !p.is_finite() {
            return Err(invalid(format!("lp exponent must lie in (1, inf), got {p}")));
        }
        Ok(Self { dim, kind: NormKind::Lp { p }, scale: T::one() })
    }

    /// Norm whose unit ball is cut out by the support samples `(u_k, h_k)`.
    /// Directions need not be normalised; missing antipodes are added.
    pub fn support_sampled(dim: usize, directions: &[Vec<T>], values: &[T]) -> Result<Self> {
        check_dim(dim)?;
        let poly = SupportPolytope::new(dim, directions, values)?;
        Ok(Self { dim, kind: NormKind::SupportSampled(Arc::new(poly)), scale: T::one() })
    }

    /// Support samples of a body given by its support function `h`, taken on
    /// the default sphere grid of the dimension plus the coordinate axes.
    pub fn from_support_fn(dim: usize, resolution: usize, h: impl Fn(&[T]) -> T) -> Result<Self> {
        let grid = match dim {
            2 => circle_with_axes::<T>(resolution)?,
            3 => {
                let g = SphereGrid::<T>::icosahedral(resolution)?;
                let mut dirs: Vec<Vec<T>> = (0..g.len()).map(|i| g.point(i).to_vec()).collect();
                for axis in 0..3 {
                    for s in [T::one(), -T::one()] {
                        let mut e = vec![T::zero(); 3];
                        e[axis] = s;
                        dirs.push(e);
                    }
                }
                dirs
            }
            _ => return Err(Error::Unsupported(format!("support-sampled norms need dim 2 or 3, got {dim}"))),
        };
        let values: Vec<T> = grid.iter().map(|u| h(u)).collect();
        Self::support_sampled(dim, &grid, &values)
    }

    /// Polytope approximant of the cube ball (`ℓ∞`).
    pub fn linf_sampled(dim: usize, resolution: usize) -> Result<Self> {
        Self::from_support_fn(dim, resolution, |u| u.iter().fold(T::zero(), |s, x| s + x.abs()))
    }

    /// Cube ball plus a Euclidean ball of radius `eps`: `h = |u|_1 + eps |u|_2`.
    pub fn smoothed_linf(dim: usize, eps: T, resolution: usize) -> Result<Self> {
        if !(eps >= T::zero()) {
            return Err(invalid("smoothing radius must be non-negative"));
        }
        Self::from_support_fn(dim, resolution, |u| {
            u.iter().fold(T::zero(), |s, x| s + x.abs()) + eps * norm2(u)
        })
    }

    /// Polytope approximant of the cross-polytope ball (`ℓ1`).
    pub fn l1_sampled(dim: usize, resolution: usize) -> Result<Self> {
        Self::from_support_fn(dim, resolution, |u| u.iter().fold(T::zero(), |m, x| m.max(x.abs())))
    }

    /// Reads support samples from CSV rows `u_1, ..., u_dim, h`. A header
    /// row and `#` comments are allowed.
    pub fn from_support_csv(dim: usize, path: impl AsRef<Path>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_path(path.as_ref())?;
        let mut dirs = Vec::new();
        let mut vals = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
            let row = match parsed {
                Ok(r) => r,
                Err(_) if line == 0 => continue,
                Err(e) => return Err(Error::Config(format!("support grid row {}: {e}", line + 1))),
            };
            if row.len() != dim + 1 {
                return Err(Error::Config(format!(
                    "support grid row {} has {} columns, expected {}",
                    line + 1,
                    row.len(),
                    dim + 1
                )));
            }
            dirs.push(row[..dim].iter().map(|&v| T::lit(v)).collect());
            vals.push(T::lit(row[dim]));
        }
        Self::support_sampled(dim, &dirs, &vals)
    }

    /// The norm `c ‖·‖`; its unit ball is `B / c`.
    pub fn scaled(&self, c: T) -> Result<Self> {
        if !(c > T::zero()) || !c.is_finite() {
            return Err(invalid("norm scale must be positive and finite"));
        }
        Ok(Self { dim: self.dim, kind: self.kind.clone(), scale: self.scale * c })
    }

    /// Norm of the dual space for the closed-form kinds.
    pub fn dual_spec(&self) -> Result<Self> {
        let kind = match &self.kind {
            NormKind::Euclidean { matrix, inverse, det } => NormKind::Euclidean {
                matrix: inverse.clone(),
                inverse: matrix.clone(),
                det: T::one() / *det,
            },
            NormKind::Lp { p } => NormKind::Lp { p: *p / (*p - T::one()) },
            NormKind::SupportSampled(_) => {
                return Err(Error::Unsupported("dual of a support-sampled norm".into()))
            }
        };
        Ok(Self { dim: self.dim, kind, scale: T::one() / self.scale })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &NormKind<T> {
        &self.kind
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn smoothness(&self) -> Smoothness {
        match self.kind {
            NormKind::SupportSampled(_) => Smoothness::Polyhedral,
            _ => Smoothness::Smooth,
        }
    }

    /// `true` for `c · |·|_2`.
    pub fn is_scalar_euclidean(&self) -> bool {
        match &self.kind {
            NormKind::Euclidean { matrix, .. } => {
                let d = self.dim;
                let a = matrix[0];
                let tol = T::lit(1e-12) * a.abs();
                (0..d).all(|i| {
                    (0..d).all(|j| {
                        let e = if i == j { a } else { T::zero() };
                        (matrix[i * d + j] - e).abs() <= tol
                    })
                })
            }
            _ => false,
        }
    }

    /// `‖v‖`.
    pub fn gauge(&self, v: &[T]) -> T {
        debug_assert_eq!(v.len(), self.dim);
        let g = match &self.kind {
            NormKind::Euclidean { matrix, .. } => quad_form(matrix, v).max(T::zero()).sqrt(),
            NormKind::Lp { p } => lp_norm(v, *p),
            NormKind::SupportSampled(poly) => poly.gauge(v),
        };
        g * self.scale
    }

    /// Gradient of the gauge at `v ≠ 0` (a subgradient on polytope edges).
    pub fn gauge_gradient(&self, v: &[T], out: &mut [T]) {
        let d = self.dim;
        match &self.kind {
            NormKind::Euclidean { matrix, .. } => {
                let g = quad_form(matrix, v).sqrt();
                linalg::matvec(matrix, d, d, v, out);
                for o in out.iter_mut() {
                    *o = *o / g;
                }
            }
            NormKind::Lp { p } => {
                let g = lp_norm(v, *p);
                for i in 0..d {
                    let r = v[i].abs() / g;
                    out[i] = v[i].signum() * r.powf(*p - T::one());
                }
            }
            NormKind::SupportSampled(poly) => {
                let k = poly.active_facet(v);
                let h = poly.values[k];
                for i in 0..d {
                    out[i] = poly.normals[k * d + i] / h;
                }
            }
        }
        for o in out.iter_mut() {
            *o = *o * self.scale;
        }
    }

    /// `sup{<xi, v> : ‖v‖ <= 1}` with input validation.
    pub fn dual_norm(&self, xi: &[T]) -> Result<T> {
        if xi.len() != self.dim {
            return Err(invalid(format!("covector has {} entries, expected {}", xi.len(), self.dim)));
        }
        if xi.iter().any(|x| !x.is_finite()) {
            return Err(invalid("covector must be finite"));
        }
        Ok(self.dual(xi))
    }

    /// Unchecked dual norm.
    pub fn dual(&self, xi: &[T]) -> T {
        let v = match &self.kind {
            NormKind::Euclidean { inverse, .. } => quad_form(inverse, xi).max(T::zero()).sqrt(),
            NormKind::Lp { p } => lp_norm(xi, *p / (*p - T::one())),
            NormKind::SupportSampled(poly) => poly.support(xi),
        };
        v / self.scale
    }

    /// `(d-1)`-volume of the central section of the unit ball by the
    /// hyperplane orthogonal to `normal`.
    pub fn section_volume(&self, normal: &[T]) -> T {
        let d = self.dim;
        let nn = norm2(normal);
        let n: Vec<T> = normal.iter().map(|&x| x / nn).collect();
        let factor = self.scale.powi(d as i32 - 1);
        let raw = match (&self.kind, d) {
            (_, 1) => T::one(),
            (NormKind::Euclidean { inverse, det, .. }, _) => {
                crate::scalar::ball_volume::<T>(d - 1) / (det.sqrt() * quad_form(inverse, &n).sqrt())
            }
            (_, 2) => {
                let t = [-n[1], n[0]];
                T::lit(2.0) / self.unscaled_gauge(&t)
            }
            (NormKind::SupportSampled(poly), 3) => poly.section_area(&n),
            (_, 3) => {
                let (e, f) = orthonormal_complement3(&n);
                let m = 512;
                let mut s = T::zero();
                for k in 0..m {
                    let th = T::lit(2.0 * std::f64::consts::PI * k as f64 / m as f64);
                    let (sn, cs) = th.sin_cos();
                    let w = [cs * e[0] + sn * f[0], cs * e[1] + sn * f[1], cs * e[2] + sn * f[2]];
                    s = s + self.unscaled_gauge(&w).powi(-2);
                }
                s * T::PI() / T::from_count(m)
            }
            (_, _) => {
                let basis = orthonormal_complement(&n);
                let grid = section_grid();
                let mut s = T::zero();
                let mut w = vec![T::zero(); d];
                for i in 0..grid.len() {
                    let p = grid.point(i);
                    for (j, wj) in w.iter_mut().enumerate() {
                        *wj = (0..3).fold(T::zero(), |acc, k| acc + T::lit(p[k]) * basis[k][j]);
                    }
                    s = s + T::lit(grid.weight(i)) * self.unscaled_gauge(&w).powi(-3);
                }
                s / T::lit(3.0)
            }
        };
        raw / factor
    }

    fn unscaled_gauge(&self, v: &[T]) -> T {
        self.gauge(v) / self.scale
    }
}

fn section_grid() -> &'static SphereGrid<f64> {
    static GRID: std::sync::OnceLock<SphereGrid<f64>> = std::sync::OnceLock::new();
    GRID.get_or_init(|| SphereGrid::lat_long(24).expect("fixed grid parameters are valid"))
}

fn check_dim(dim: usize) -> Result<()> {
    if (1..=4).contains(&dim) {
        Ok(())
    } else {
        Err(invalid(format!("norm dimension must be in 1..=4, got {dim}")))
    }
}

#[inline]
fn quad_form<T: Real>(a: &[T], v: &[T]) -> T {
    let d = v.len();
    let mut s = T::zero();
    for i in 0..d {
        let mut r = T::zero();
        for j in 0..d {
            r = r + a[i * d + j] * v[j];
        }
        s = s + v[i] * r;
    }
    s
}

fn lp_norm<T: Real>(v: &[T], p: T) -> T {
    let m = v.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    if m == T::zero() {
        return T::zero();
    }
    let s = v.iter().fold(T::zero(), |s, x| s + (x.abs() / m).powf(p));
    m * s.powf(T::one() / p)
}

fn circle_with_axes<T: Real>(resolution: usize) -> Result<Vec<Vec<T>>> {
    let n = resolution.max(4).div_ceil(4) * 4;
    Ok((0..n)
        .map(|k| {
            let th = T::lit(2.0 * std::f64::consts::PI * k as f64 / n as f64);
            vec![th.cos(), th.sin()]
        })
        .collect())
}

fn orthonormal_complement3<T: Real>(n: &[T]) -> ([T; 3], [T; 3]) {
    let helper = if n[0].abs() < T::lit(0.9) { [T::one(), T::zero(), T::zero()] } else { [T::zero(), T::one(), T::zero()] };
    let c = dot(&helper, n);
    let mut e = [helper[0] - c * n[0], helper[1] - c * n[1], helper[2] - c * n[2]];
    let r = norm2(&e);
    e = [e[0] / r, e[1] / r, e[2] / r];
    let f = [n[1] * e[2] - n[2] * e[1], n[2] * e[0] - n[0] * e[2], n[0] * e[1] - n[1] * e[0]];
    (e, f)
}

/// Orthonormal basis of `n^⊥` by Gram-Schmidt on the coordinate axes.
fn orthonormal_complement<T: Real>(n: &[T]) -> Vec<Vec<T>> {
    let d = n.len();
    let mut basis: Vec<Vec<T>> = vec![n.to_vec()];
    for axis in 0..d {
        let mut v = vec![T::zero(); d];
        v[axis] = T::one();
        for b in &basis {
            let c = dot(&v, b);
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi = *vi - c * *bi;
            }
        }
        let r = norm2(&v);
        if r > T::lit(1e-6) {
            basis.push(v.into_iter().map(|x| x / r).collect());
        }
        if basis.len() == d {
            break;
        }
    }
    basis.remove(0);
    basis
}

/// Convex polytope `{v : <u_k, v> <= h_k}` with unit normals `u_k`,
/// together with its vertices.
#[derive(Debug, Clone)]
pub struct SupportPolytope<T> {
    dim: usize,
    normals: Vec<T>,
    values: Vec<T>,
    vertices: Vec<T>,
}

impl<T: Real> SupportPolytope<T> {
    fn new(dim: usize, directions: &[Vec<T>], values: &[T]) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::Unsupported(format!("support-sampled norms need dim 2 or 3, got {dim}")));
        }
        if directions.len() != values.len() || directions.is_empty() {
            return Err(invalid("support grid needs one value per direction"));
        }
        let mut normals: Vec<T> = Vec::new();
        let mut vals: Vec<T> = Vec::new();
        let tol = T::lit(1e-9);
        let find = |normals: &[T], u: &[T]| {
            (0..normals.len() / dim).find(|&k| (0..dim).all(|i| (normals[k * dim + i] - u[i]).abs() <= tol))
        };
        for (u, &h) in directions.iter().zip(values) {
            if u.len() != dim || u.iter().any(|x| !x.is_finite()) || !h.is_finite() {
                return Err(invalid("support grid entries must be finite with matching dimension"));
            }
            let r = norm2(u);
            if r <= T::zero() {
                return Err(invalid("support direction must be non-zero"));
            }
            let unit: Vec<T> = u.iter().map(|&x| x / r).collect();
            let h = h / r;
            if !(h > T::zero()) {
                return Err(invalid("support values must be positive (the origin must be interior)"));
            }
            match find(&normals, &unit) {
                Some(k) if (vals[k] - h).abs() > T::lit(1e-9) * h.max(T::one()) => {
                    return Err(invalid("conflicting support values for one direction"))
                }
                Some(_) => {}
                None => {
                    normals.extend_from_slice(&unit);
                    vals.push(h);
                }
            }
        }
        // Close under x -> -x.
        let m = vals.len();
        for k in 0..m {
            let neg: Vec<T> = normals[k * dim..(k + 1) * dim].iter().map(|&x| -x).collect();
            match find(&normals, &neg) {
                Some(j) if (vals[j] - vals[k]).abs() > T::lit(1e-6) * vals[k].max(T::one()) => {
                    return Err(invalid("support samples are not even (h(u) != h(-u))"))
                }
                Some(_) => {}
                None => {
                    normals.extend_from_slice(&neg);
                    vals.push(vals[k]);
                }
            }
        }
        let scale = vals.iter().fold(T::zero(), |a, &b| a.max(b));
        let bound = T::lit(1e3) * scale;
        let vertices: Vec<T> = if dim == 2 {
            let hp: Vec<([T; 2], T)> =
                (0..vals.len()).map(|k| ([normals[2 * k], normals[2 * k + 1]], vals[k])).collect();
            let poly = clip_polygon(&hp, bound / T::lit(4.0)).ok_or_else(|| invalid("empty support polytope"))?;
            poly.into_iter().flat_map(|p| p.into_iter()).collect()
        } else {
            let hs: Vec<([T; 3], T)> = (0..vals.len())
                .map(|k| ([normals[3 * k], normals[3 * k + 1], normals[3 * k + 2]], vals[k]))
                .collect();
            clip_polyhedron(&hs, bound).vertices().into_iter().flat_map(|p| p.into_iter()).collect()
        };
        let nv = vertices.len() / dim;
        if nv < dim + 1 {
            return Err(invalid("support polytope is degenerate"));
        }
        if vertices.iter().any(|v| v.abs() >= bound * T::lit(0.999)) {
            return Err(invalid("support samples do not bound a compact body"));
        }
        let out = Self { dim, normals, values: vals, vertices };
        // Every sampled supporting plane must touch the polytope.
        for k in 0..out.values.len() {
            let s = out.support(&out.normals[k * dim..(k + 1) * dim]);
            if s < out.values[k] * (T::one() - T::lit(1e-7)) {
                return Err(invalid(format!(
                    "support samples fail the convexity check at direction {k}: polytope support {s} < {}",
                    out.values[k]
                )));
            }
        }
        Ok(out)
    }

    pub fn facet_count(&self) -> usize {
        self.values.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len() / self.dim
    }

    pub fn vertex(&self, i: usize) -> &[T] {
        &self.vertices[i * self.dim..(i + 1) * self.dim]
    }

    fn gauge(&self, v: &[T]) -> T {
        let d = self.dim;
        (0..self.values.len()).fold(T::zero(), |m, k| m.max(dot(&self.normals[k * d..(k + 1) * d], v) / self.values[k]))
    }

    fn active_facet(&self, v: &[T]) -> usize {
        let d = self.dim;
        let mut best = 0;
        let mut bv = T::neg_infinity();
        for k in 0..self.values.len() {
            let r = dot(&self.normals[k * d..(k + 1) * d], v) / self.values[k];
            if r > bv {
                bv = r;
                best = k;
            }
        }
        best
    }

    fn support(&self, xi: &[T]) -> T {
        (0..self.vertex_count()).fold(T::neg_infinity(), |m, i| m.max(dot(self.vertex(i), xi)))
    }

    /// Area of the central section orthogonal to the unit vector `n` (dim 3).
    fn section_area(&self, n: &[T]) -> T {
        let (e, f) = orthonormal_complement3(n);
        let hp: Vec<([T; 2], T)> = (0..self.values.len())
            .map(|k| {
                let u = &self.normals[3 * k..3 * k + 3];
                ([dot(u, &e), dot(u, &f)], self.values[k])
            })
            .filter(|(a, _)| a[0].abs() + a[1].abs() > T::epsilon())
            .collect();
        let scale = self.values.iter().fold(T::zero(), |a, &b| a.max(b)) * T::lit(10.0);
        clip_polygon(&hp, scale).map(|p| crate::geometry::polygon_area(&p)).unwrap_or(T::zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_duals() {
        let e = NormSpec::<f64>::euclidean(2).unwrap();
        assert!((e.dual_norm(&[3.0, 4.0]).unwrap() - 5.0).abs() < 1e-12);
        let l = NormSpec::<f64>::lp(2, 1.01).unwrap();
        assert!((l.dual_norm(&[1.0, -2.0]).unwrap() - 2.0).abs() < 0.02);
        let sq = NormSpec::<f64>::linf_sampled(2, 64).unwrap();
        assert!((sq.dual_norm(&[1.0, 1.0]).unwrap() - 2.0).abs() < 1e-12);
        assert!((sq.gauge(&[0.5, -0.25]) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn dual_norm_rejects_non_finite() {
        let e = NormSpec::<f64>::euclidean(2).unwrap();
        assert!(matches!(e.dual_norm(&[f64::NAN, 1.0]), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn matrix_norm_validation() {
        assert!(NormSpec::<f64>::euclidean_matrix(2, vec![1.0, 2.0, 2.0, 1.0]).is_err());
        assert!(NormSpec::<f64>::euclidean_matrix(2, vec![1.0, 0.5, 0.0, 1.0]).is_err());
        assert!(NormSpec::<f64>::lp(3, 1.0).is_err());
    }

    #[test]
    fn support_polytope_rejects_non_convex_samples() {
        let dirs = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        // h(1,1)/sqrt2 is larger than the square corner allows: redundant
        // plane that never touches the body.
        let vals = [1.0, 1.0, 2.5];
        assert!(NormSpec::<f64>::support_sampled(2, &dirs, &vals).is_err());
    }

    #[test]
    fn section_volume_matches_generic_path() {
        // Compare the closed form for an ellipsoid with the lp=2 numeric path.
        let e = NormSpec::<f64>::euclidean(3).unwrap();
        let l = NormSpec::<f64>::lp(3, 2.0).unwrap();
        let n = [0.3, -0.4, 0.8];
        assert!((e.section_volume(&n) - l.section_volume(&n)).abs() < 1e-10);
        let e4 = NormSpec::<f64>::euclidean(4).unwrap().scaled(1.7).unwrap();
        let l4 = NormSpec::<f64>::lp(4, 2.0).unwrap().scaled(1.7).unwrap();
        let n4 = [0.1, 0.5, -0.5, 0.7];
        assert!((e4.section_volume(&n4) - l4.section_volume(&n4)).abs() < 1e-9);
        let m = NormSpec::<f64>::euclidean_matrix(2, vec![2.0, 0.3, 0.3, 1.0]).unwrap();
        let t = [-0.6f64, 0.8];
        let expected = 2.0 / (2.0 * t[0] * t[0] + 0.6 * t[0] * t[1] + t[1] * t[1]).sqrt();
        assert!((m.section_volume(&[0.8, 0.6]) - expected).abs() < 1e-12);
    }

    #[test]
    fn polytope_section_is_exact() {
        let cube = NormSpec::<f64>::linf_sampled(3, 1).unwrap();
        assert!((cube.section_volume(&[0.0, 0.0, 1.0]) - 4.0).abs() < 1e-9);
        let r = 0.5f64.sqrt();
        assert!((cube.section_volume(&[r, r, 0.0]) - 4.0 * 2f64.sqrt()).abs() < 1e-9);
    }
}
