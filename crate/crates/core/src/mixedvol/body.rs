use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::geometry::{circumscribed_polygon, clip_polyhedron, polygon_area};
use crate::scalar::{ball_volume, dot, Real};
use crate::sphere::fibonacci_directions;

type SupportFn<T> = dyn Fn(&[T]) -> T + Send + Sync;

/// Centrally symmetric convex body in `R^m`, `m <= 3`, known through its
/// support function. Zonotopes and ellipsoids carry exact data.
#[derive(Clone)]
pub enum FiberBody<T> {
    /// `Σ_k [-q_k, q_k]`, generators stored row by row.
    Zonotope { dim: usize, generators: Vec<T> },
    /// `h(u) = sqrt(uᵀ G u)` for a positive semi-definite Gram matrix `G`.
    Ellipsoid { dim: usize, gram: Vec<T> },
    Support { dim: usize, h: Arc<SupportFn<T>> },
}

impl<T> fmt::Debug for FiberBody<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiberBody::Zonotope { dim, generators } => {
                write!(f, "Zonotope {{ dim: {dim}, generators: {} }}", generators.len() / (*dim).max(1))
            }
            FiberBody::Ellipsoid { dim, .. } => write!(f, "Ellipsoid {{ dim: {dim} }}"),
            FiberBody::Support { dim, .. } => write!(f, "Support {{ dim: {dim} }}"),
        }
    }
}

impl<T: Real> FiberBody<T> {
    pub fn from_fn(dim: usize, h: impl Fn(&[T]) -> T + Send + Sync + 'static) -> Self {
        FiberBody::Support { dim, h: Arc::new(h) }
    }

    /// `[-v, v]`.
    pub fn segment(v: &[T]) -> Self {
        FiberBody::Zonotope { dim: v.len(), generators: v.to_vec() }
    }

    pub fn dim(&self) -> usize {
        match self {
            FiberBody::Zonotope { dim, .. } | FiberBody::Ellipsoid { dim, .. } | FiberBody::Support { dim, .. } => *dim,
        }
    }

    pub fn support(&self, u: &[T]) -> T {
        match self {
            FiberBody::Zonotope { dim, generators } => {
                generators.chunks_exact(*dim).fold(T::zero(), |s, q| s + dot(q, u).abs())
            }
            FiberBody::Ellipsoid { dim, gram } => quad(gram, *dim, u).max(T::zero()).sqrt(),
            FiberBody::Support { h, .. } => h(u),
        }
    }

    /// Body with support `u ↦ h(M u)`, i.e. the image under `Mᵀ`.
    pub fn pulled(&self, m: &[T]) -> Self {
        let d = self.dim();
        match self {
            FiberBody::Zonotope { generators, .. } => {
                let mut g = Vec::with_capacity(generators.len());
                for q in generators.chunks_exact(d) {
                    for j in 0..d {
                        g.push((0..d).fold(T::zero(), |s, i| s + m[i * d + j] * q[i]));
                    }
                }
                FiberBody::Zonotope { dim: d, generators: g }
            }
            FiberBody::Ellipsoid { gram, .. } => {
                let mut out = vec![T::zero(); d * d];
                for a in 0..d {
                    for b in 0..d {
                        let mut s = T::zero();
                        for i in 0..d {
                            for j in 0..d {
                                s = s + m[i * d + a] * gram[i * d + j] * m[j * d + b];
                            }
                        }
                        out[a * d + b] = s;
                    }
                }
                FiberBody::Ellipsoid { dim: d, gram: out }
            }
            FiberBody::Support { h, .. } => {
                let (h, m) = (h.clone(), m.to_vec());
                FiberBody::from_fn(d, move |u: &[T]| {
                    let mut v = [T::zero(); 3];
                    for i in 0..d {
                        v[i] = (0..d).fold(T::zero(), |s, j| s + m[i * d + j] * u[j]);
                    }
                    h(&v[..d])
                })
            }
        }
    }

    pub fn scaled(&self, c: T) -> Self {
        match self {
            FiberBody::Zonotope { dim, generators } => {
                FiberBody::Zonotope { dim: *dim, generators: generators.iter().map(|&v| v * c).collect() }
            }
            FiberBody::Ellipsoid { dim, gram } => {
                FiberBody::Ellipsoid { dim: *dim, gram: gram.iter().map(|&v| v * c * c).collect() }
            }
            FiberBody::Support { dim, h } => {
                let h = h.clone();
                FiberBody::from_fn(*dim, move |u: &[T]| h(u) * c)
            }
        }
    }

    /// Lebesgue volume.
    pub fn volume(&self) -> Result<T> {
        let d = self.dim();
        match self {
            _ if d == 1 => width_1d(|u| self.support(u)),
            FiberBody::Zonotope { generators, .. } if d == 2 => Ok(zonotope_area(generators)),
            FiberBody::Zonotope { generators, .. } if d == 3 && generators.len() <= 3 * 64 => {
                Ok(zonotope_volume3(generators))
            }
            FiberBody::Ellipsoid { gram, .. } => {
                Ok(ball_volume::<T>(d) * crate::linalg::determinant(gram, d).max(T::zero()).sqrt())
            }
            _ => body_volume(|u: &[T]| self.support(u), d),
        }
    }
}

fn quad<T: Real>(a: &[T], d: usize, u: &[T]) -> T {
    let mut s = T::zero();
    for i in 0..d {
        for j in 0..d {
            s = s + u[i] * a[i * d + j] * u[j];
        }
    }
    s
}

fn width_1d<T: Real>(h: impl Fn(&[T]) -> T) -> Result<T> {
    let w = h(&[T::one()]) + h(&[-T::one()]);
    if !w.is_finite() || w < T::zero() {
        return Err(Error::InvalidBody(format!("support function is not sublinear (width {w})")));
    }
    Ok(w)
}

/// Area of `Σ_k [-q_k, q_k]`: `4 Σ_{i<j} |det(q_i, q_j)|`, in `O(K log K)`
/// after sorting the generators by angle in `[0, π)`.
pub fn zonotope_area<T: Real>(generators: &[T]) -> T {
    let mut q: Vec<[T; 2]> = generators
        .chunks_exact(2)
        .filter(|g| g[0] != T::zero() || g[1] != T::zero())
        .map(|g| if g[1] < T::zero() || (g[1] == T::zero() && g[0] < T::zero()) { [-g[0], -g[1]] } else { [g[0], g[1]] })
        .collect();
    q.sort_by(|a, b| a[1].atan2(a[0]).partial_cmp(&b[1].atan2(b[0])).unwrap_or(std::cmp::Ordering::Equal));
    let (mut px, mut py) = (T::zero(), T::zero());
    let mut terms = Vec::with_capacity(q.len());
    for g in &q {
        terms.push(px * g[1] - py * g[0]);
        px = px + g[0];
        py = py + g[1];
    }
    crate::scalar::pairwise_sum(&terms) * T::lit(4.0)
}

fn zonotope_volume3<T: Real>(g: &[T]) -> T {
    let k = g.len() / 3;
    let mut terms = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            for c in b + 1..k {
                let (p, q, r) = (&g[3 * a..3 * a + 3], &g[3 * b..3 * b + 3], &g[3 * c..3 * c + 3]);
                let det = p[0] * (q[1] * r[2] - q[2] * r[1]) - p[1] * (q[0] * r[2] - q[2] * r[0])
                    + p[2] * (q[0] * r[1] - q[1] * r[0]);
                terms.push(det.abs());
            }
        }
    }
    crate::scalar::pairwise_sum(&terms) * T::lit(8.0)
}

/// Direction set for refinement level `n`.
fn directions<T: Real>(m: usize, n: usize) -> Vec<Vec<T>> {
    match m {
        2 => (0..n)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                vec![T::lit(t.cos()), T::lit(t.sin())]
            })
            .collect(),
        _ => {
            let mut d: Vec<Vec<T>> = fibonacci_directions(n).iter().map(|p| p.iter().map(|&v| T::lit(v)).collect()).collect();
            for i in 0..3 {
                for s in [1.0, -1.0] {
                    let mut e = vec![T::zero(); 3];
                    e[i] = T::lit(s);
                    d.push(e);
                }
            }
            d
        }
    }
}

/// Volume of the outer polytope cut out by the support values `h` at the
/// level-`n` directions.
fn polytope_volume<T: Real>(m: usize, n: usize, h: &[T]) -> T {
    match m {
        2 => circumscribed_polygon(h).map(|p| polygon_area(&p)).unwrap_or(T::zero()),
        _ => {
            let dirs = directions::<T>(3, n);
            let bound = h.iter().fold(T::zero(), |a, &v| a.max(v.abs())) * T::lit(2.0);
            if bound <= T::zero() {
                return T::zero();
            }
            let hs: Vec<([T; 3], T)> = dirs.iter().zip(h).map(|(u, &c)| ([u[0], u[1], u[2]], c)).collect();
            clip_polyhedron(&hs, bound).volume()
        }
    }
}

fn sampled<T: Real>(h: &dyn Fn(&[T]) -> T, dirs: &[Vec<T>]) -> Result<Vec<T>> {
    let v: Vec<T> = dirs.iter().map(|u| h(u)).collect();
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidBody("support function is not finite".into()));
    }
    Ok(v)
}

/// Largest `h(u) + h(-u)` over the sampled directions. Negative widths
/// mean the half-space intersection is empty.
fn max_width<T: Real>(m: usize, dirs: &[Vec<T>], h: &[T]) -> Result<T> {
    let mut w = T::zero();
    for (i, u) in dirs.iter().enumerate() {
        let j = if m == 2 {
            (i + dirs.len() / 2) % dirs.len()
        } else {
            match dirs.iter().position(|v| v.iter().zip(u).all(|(&a, &b)| a == -b)) {
                Some(j) => j,
                None => continue,
            }
        };
        let s = h[i] + h[j];
        let scale = h[i].abs() + h[j].abs();
        if s < -T::lit(1e-9) * scale {
            return Err(Error::InvalidBody(format!("negative width {s} along {u:?}")));
        }
        w = w.max(s);
    }
    Ok(w)
}

/// Lebesgue volume of the body with support function `h` in `R^m`,
/// `m ∈ {1, 2, 3}`, by half-space intersection over refined direction
/// grids (256 directions for `m = 2`, 1024 for `m = 3`, doubled until the
/// relative change drops below `1e-3`). The outer polygon converges at
/// `O(N^-2)` for smooth bodies but only `O(N^-1)` for polytopes whose
/// vertex normals miss the grid; in `R^3` polytopes converge only like
/// `O(N^-1/2)`.
pub fn body_volume<T: Real>(h: impl Fn(&[T]) -> T, m: usize) -> Result<T> {
    let bodies: [&dyn Fn(&[T]) -> T; 1] = [&h];
    polarized(&bodies, m, Some(1))
}

/// `(1/m!) Σ_{∅≠S} (-1)^{m-|S|} vol(Σ_{i∈S} A_i)` with all sum volumes
/// evaluated on a common direction grid and refined jointly. With
/// `single = Some(_)` the plain volume of the first body is returned.
pub(crate) fn polarized<T: Real>(bodies: &[&dyn Fn(&[T]) -> T], m: usize, single: Option<usize>) -> Result<T> {
    if !(1..=3).contains(&m) {
        return Err(invalid(format!("fiber dimension must be 1, 2 or 3, got {m}")));
    }
    let k = bodies.len();
    let subsets: Vec<usize> = if single.is_some() { vec![1] } else { (1..(1usize << k)).collect() };
    let combined = |vals: &[Vec<T>], s: usize| -> Vec<T> {
        let n = vals[0].len();
        (0..n).map(|i| (0..k).filter(|b| s >> b & 1 == 1).fold(T::zero(), |a, b| a + vals[b][i])).collect()
    };
    let factorial = T::from_count((1..=m).product());
    let evaluate = |n: usize| -> Result<(T, T)> {
        if m == 1 {
            let dirs = vec![vec![T::one()], vec![-T::one()]];
            let vals = bodies.iter().map(|h| sampled(*h, &dirs)).collect::<Result<Vec<_>>>()?;
            let mut w = T::zero();
            let mut total = T::zero();
            for &s in &subsets {
                let c = combined(&vals, s);
                let width = c[0] + c[1];
                if width < T::zero() {
                    return Err(Error::InvalidBody(format!("negative width {width}")));
                }
                w = w.max(width);
                total = total + sign::<T>(k, s, single) * width;
            }
            return Ok((total, w));
        }
        let dirs = directions::<T>(m, n);
        let vals = bodies.iter().map(|h| sampled(*h, &dirs)).collect::<Result<Vec<_>>>()?;
        let mut w = T::zero();
        let mut total = T::zero();
        for &s in &subsets {
            let c = combined(&vals, s);
            w = w.max(max_width(m, &dirs, &c)?);
            total = total + sign::<T>(k, s, single) * polytope_volume(m, n, &c);
        }
        Ok((total / if single.is_some() { T::one() } else { factorial }, w))
    };
    if m == 1 {
        return Ok(evaluate(0)?.0);
    }
    let (mut n, cap) = if m == 2 { (256, 1 << 16) } else { (1024, 1 << 13) };
    let (mut v, w) = evaluate(n)?;
    if w <= T::zero() {
        return Ok(T::zero());
    }
    let floor = T::lit(1e-2) * w.powi(m as i32);
    while n < cap {
        n *= 2;
        let (next, _) = evaluate(n)?;
        let done = (next - v).abs() <= T::lit(1e-3) * next.abs().max(floor);
        v = next;
        if done {
            break;
        }
    }
    Ok(v)
}

fn sign<T: Real>(k: usize, s: usize, single: Option<usize>) -> T {
    if single.is_some() {
        return T::one();
    }
    if (k - s.count_ones() as usize) % 2 == 0 {
        T::one()
    } else {
        -T::one()
    }
}

/// `n` bodies in one fiber of dimension `n`.
#[derive(Debug, Clone)]
pub struct FiberBodySet<T> {
    bodies: Vec<FiberBody<T>>,
}

impl<T: Real> FiberBodySet<T> {
    pub fn new(bodies: Vec<FiberBody<T>>) -> Result<Self> {
        let m = bodies.len();
        if !(1..=3).contains(&m) {
            return Err(invalid(format!("need 1 to 3 bodies, got {m}")));
        }
        if let Some(b) = bodies.iter().find(|b| b.dim() != m) {
            return Err(invalid(format!("body of dim {} in a set of {m}", b.dim())));
        }
        Ok(Self { bodies })
    }

    pub fn bodies(&self) -> &[FiberBody<T>] {
        &self.bodies
    }

    pub fn dim(&self) -> usize {
        self.bodies.len()
    }
}

/// Mixed volume `V(A_1, ..., A_m)` by polarization.
pub fn mixed_volume<T: Real>(set: &FiberBodySet<T>) -> Result<T> {
    let b = set.bodies();
    match b {
        [a] => a.volume(),
        [FiberBody::Zonotope { generators: p, .. }, FiberBody::Zonotope { generators: q, .. }] => {
            let mut both = p.clone();
            both.extend_from_slice(q);
            Ok((zonotope_area(&both) - zonotope_area(p) - zonotope_area(q)) * T::lit(0.5))
        }
        _ => {
            let fns: Vec<Box<dyn Fn(&[T]) -> T + '_>> =
                b.iter().map(|body| Box::new(move |u: &[T]| body.support(u)) as Box<dyn Fn(&[T]) -> T>).collect();
            let refs: Vec<&dyn Fn(&[T]) -> T> = fns.iter().map(|f| f.as_ref()).collect();
            polarized(&refs, set.dim(), None)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::norm2;
    use std::f64::consts::PI;

    #[test]
    fn basic_volumes() {
        let seg = body_volume(|u: &[f64]| u[0].abs(), 1).unwrap();
        assert_eq!(seg, 2.0);
        let disk = body_volume(|u: &[f64]| norm2(u), 2).unwrap();
        assert!((disk - PI).abs() < 1e-3 * PI);
        let square = body_volume(|u: &[f64]| u[0].abs() + u[1].abs(), 2).unwrap();
        assert!((square - 4.0).abs() < 1e-9);
        let ball = body_volume(|u: &[f64]| norm2(u), 3).unwrap();
        assert!((ball - 4.0 * PI / 3.0).abs() < 5e-3 * ball);
        let cube = body_volume(|u: &[f64]| u.iter().map(|v| v.abs()).sum(), 3).unwrap();
        assert!((cube - 8.0).abs() < 1e-6);
    }

    #[test]
    fn invalid_bodies() {
        assert!(matches!(body_volume(|u: &[f64]| -norm2(u), 2), Err(Error::InvalidBody(_))));
        assert!(matches!(body_volume(|_: &[f64]| f64::NAN, 2), Err(Error::InvalidBody(_))));
        assert!(matches!(body_volume(|u: &[f64]| -u[0].abs(), 1), Err(Error::InvalidBody(_))));
    }

    #[test]
    fn orthogonal_segments() {
        let a = FiberBody::<f64>::segment(&[1.0, 0.0]);
        let b = FiberBody::segment(&[0.0, 1.0]);
        let exact = mixed_volume(&FiberBodySet::new(vec![a, b]).unwrap()).unwrap();
        assert!((exact - 2.0).abs() < 1e-12);
        let ga = FiberBody::from_fn(2, |u: &[f64]| u[0].abs());
        let gb = FiberBody::from_fn(2, |u: &[f64]| u[1].abs());
        let generic = mixed_volume(&FiberBodySet::new(vec![ga, gb]).unwrap()).unwrap();
        assert!((generic - 2.0).abs() < 1e-3);
    }

    #[test]
    fn zonotope_fast_paths_agree() {
        let g = vec![1.0, 0.2, -0.3, 0.8, 0.5, 0.5];
        let z = FiberBody::Zonotope { dim: 2, generators: g.clone() };
        let generic = body_volume(|u: &[f64]| z.support(u), 2).unwrap();
        assert!((z.volume().unwrap() - generic).abs() < 2e-3 * generic);
        let g3 = vec![1.0, 0.0, 0.2, 0.1, 1.0, 0.0, 0.0, 0.3, 1.0, 0.4, 0.4, 0.4];
        let z3 = FiberBody::Zonotope { dim: 3, generators: g3 };
        let generic3 = body_volume(|u: &[f64]| z3.support(u), 3).unwrap();
        assert!((z3.volume().unwrap() - generic3).abs() < 3e-2 * generic3);
        let box3 = FiberBody::Zonotope { dim: 3, generators: vec![1.0, 0.0, 0.2, 0.1, 1.0, 0.0, 0.0, 0.3, 1.0] };
        let det: f64 = 1.0 * (1.0 - 0.0) - 0.0 + 0.2 * (0.1 * 0.3);
        assert!((box3.volume().unwrap() - 8.0 * det).abs() < 1e-12);
    }

    #[test]
    fn ellipsoid_exact() {
        let e = FiberBody::Ellipsoid { dim: 2, gram: vec![4.0, 0.0, 0.0, 1.0] };
        assert!((e.volume().unwrap() - 2.0 * PI).abs() < 1e-12);
        let generic = body_volume(|u: &[f64]| e.support(u), 2).unwrap();
        assert!((generic - 2.0 * PI).abs() < 2e-3 * 2.0 * PI);
    }
}
