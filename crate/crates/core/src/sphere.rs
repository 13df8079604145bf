//! Antipodally closed quadrature grids on the Euclidean unit sphere
//! `S^{d-1}`, `d ∈ {1, 2, 3, 4}`.
//!
//! Weights are masses of the Euclidean surface measure, so they sum to
//! `|S^{d-1}|` (up to the icosahedral discretisation error).

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    /// The two points `±1` of `S^0`.
    Points,
    /// Midpoint angular grid with `n` (even) nodes.
    Circle { n: usize },
    /// Subdivided icosahedron, `level` halvings of every edge.
    Icosahedral { level: usize },
    /// Gauss-Legendre nodes in `z` times `2n` uniform nodes in longitude.
    LatLong { n: usize },
    /// Product grid on `S^3` in hyperspherical angles.
    Hyperspherical { n: usize },
}

#[derive(Debug, Clone)]
pub struct SphereGrid<T> {
    dim: usize,
    kind: GridKind,
    points: Vec<T>,
    weights: Vec<T>,
    antipode: Vec<usize>,
    /// Latitude nodes (ascending `z`) for `LatLong` grids.
    z_nodes: Vec<f64>,
}

impl<T: Real> SphereGrid<T> {
    /// Default grid family for the dimension. `resolution` is the node count
    /// on the circle, the subdivision level on `S^2` and the angular count
    /// on `S^3`.
    pub fn for_dim(dim: usize, resolution: usize) -> Result<Self> {
        match dim {
            1 => Ok(Self::points()),
            2 => Self::circle(resolution),
            3 => Self::icosahedral(resolution),
            4 => Self::hyperspherical(resolution),
            _ => Err(invalid(format!("sphere grids exist for dimensions 1..=4, got {dim}"))),
        }
    }

    pub fn points() -> Self {
        Self::from_f64(1, GridKind::Points, vec![1.0, -1.0], vec![1.0, 1.0], vec![1, 0], vec![])
    }

    /// Nodes at `θ_k = 2π(k + 1/2)/n`; they never hit the axes or the
    /// diagonals when `n` is a multiple of 8.
    pub fn circle(n: usize) -> Result<Self> {
        if n < 4 || n % 2 != 0 {
            return Err(invalid(format!("circle grid needs an even node count >= 4, got {n}")));
        }
        let h = 2.0 * PI / n as f64;
        let mut pts = Vec::with_capacity(2 * n);
        for k in 0..n {
            let th = h * (k as f64 + 0.5);
            pts.push(th.cos());
            pts.push(th.sin());
        }
        let antipode = (0..n).map(|k| (k + n / 2) % n).collect();
        Ok(Self::from_f64(2, GridKind::Circle { n }, pts, vec![h; n], antipode, vec![]))
    }

    pub fn icosahedral(level: usize) -> Result<Self> {
        if level > 8 {
            return Err(invalid(format!("icosahedral level {level} is too large")));
        }
        let (verts, faces) = icosphere(level);
        let mut w = vec![0.0; verts.len()];
        for f in &faces {
            let area = spherical_triangle_area(&verts[f[0]], &verts[f[1]], &verts[f[2]]);
            for &i in f {
                w[i] += area / 3.0;
            }
        }
        let antipode = antipode_map(&verts)?;
        let pts = verts.iter().flat_map(|v| v.iter().copied()).collect();
        Ok(Self::from_f64(3, GridKind::Icosahedral { level }, pts, w, antipode, vec![]))
    }

    /// `n` Gauss-Legendre latitudes times `2n` longitudes. Integrates
    /// spherical polynomials of degree `< 2n` exactly.
    pub fn lat_long(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(invalid("lat-long grid needs n >= 2"));
        }
        let (z, wz) = gauss_legendre(n);
        let nphi = 2 * n;
        let dphi = PI / n as f64;
        let mut pts = Vec::with_capacity(3 * n * nphi);
        let mut w = Vec::with_capacity(n * nphi);
        let mut antipode = Vec::with_capacity(n * nphi);
        for j in 0..n {
            let r = (1.0 - z[j] * z[j]).max(0.0).sqrt();
            for k in 0..nphi {
                let phi = dphi * (k as f64 + 0.5);
                pts.extend_from_slice(&[r * phi.cos(), r * phi.sin(), z[j]]);
                w.push(wz[j] * dphi);
                antipode.push((n - 1 - j) * nphi + (k + n) % nphi);
            }
        }
        Ok(Self::from_f64(3, GridKind::LatLong { n }, pts, w, antipode, z))
    }

    /// `x = (cos ψ, sin ψ cos θ, sin ψ sin θ cos φ, sin ψ sin θ sin φ)` with
    /// midpoint `ψ`, Gauss-Legendre `cos θ` and uniform `φ`.
    pub fn hyperspherical(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(invalid("hyperspherical grid needs n >= 2"));
        }
        let (ct, wt) = gauss_legendre(n);
        let dpsi = PI / n as f64;
        let nphi = 2 * n;
        let dphi = PI / n as f64;
        let mut pts = Vec::with_capacity(4 * n * n * nphi);
        let mut w = Vec::with_capacity(n * n * nphi);
        let mut antipode = Vec::with_capacity(n * n * nphi);
        for i in 0..n {
            let psi = dpsi * (i as f64 + 0.5);
            let (sp, cp) = psi.sin_cos();
            for j in 0..n {
                let st = (1.0 - ct[j] * ct[j]).max(0.0).sqrt();
                for k in 0..nphi {
                    let phi = dphi * (k as f64 + 0.5);
                    pts.extend_from_slice(&[cp, sp * ct[j], sp * st * phi.cos(), sp * st * phi.sin()]);
                    w.push(dpsi * sp * sp * wt[j] * dphi);
                    antipode.push(((n - 1 - i) * n + (n - 1 - j)) * nphi + (k + n) % nphi);
                }
            }
        }
        Ok(Self::from_f64(4, GridKind::Hyperspherical { n }, pts, w, antipode, vec![]))
    }

    fn from_f64(
        dim: usize,
        kind: GridKind,
        pts: Vec<f64>,
        w: Vec<f64>,
        antipode: Vec<usize>,
        z_nodes: Vec<f64>,
    ) -> Self {
        let w: Vec<f64> = (0..w.len()).map(|i| 0.5 * (w[i] + w[antipode[i]])).collect();
        Self {
            dim,
            kind,
            points: pts.into_iter().map(T::lit).collect(),
            weights: w.into_iter().map(T::lit).collect(),
            antipode,
            z_nodes,
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[T] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points_flat(&self) -> &[T] {
        &self.points
    }

    #[inline]
    pub fn weight(&self, i: usize) -> T {
        self.weights[i]
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    #[inline]
    pub fn antipode(&self, i: usize) -> usize {
        self.antipode[i]
    }

    /// One representative index per antipodal pair.
    pub fn half(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| i < self.antipode[i]).collect()
    }

    pub fn total_weight(&self) -> T {
        crate::scalar::pairwise_sum(&self.weights)
    }

    /// Interpolates grid `values` at the direction of `dir` (need not be
    /// normalised). Linear on the circle, bilinear on lat-long grids and
    /// nearest-node otherwise.
    pub fn interpolate(&self, values: &[T], dir: &[T]) -> T {
        debug_assert_eq!(values.len(), self.len());
        match self.kind {
            GridKind::Points => {
                if dir[0] >= T::zero() {
                    values[0]
                } else {
                    values[1]
                }
            }
            GridKind::Circle { n } => {
                let a = angle(dir[0].as_f64(), dir[1].as_f64());
                let (i0, i1, f) = periodic_cell(a / (2.0 * PI) * n as f64 - 0.5, n);
                lerp(values[i0], values[i1], f)
            }
            GridKind::LatLong { n } => {
                let r = crate::scalar::norm2(dir).as_f64();
                let z = if r > 0.0 { dir[2].as_f64() / r } else { 0.0 };
                let nphi = 2 * n;
                let a = angle(dir[0].as_f64(), dir[1].as_f64());
                let (k0, k1, fk) = periodic_cell(a / (2.0 * PI) * nphi as f64 - 0.5, nphi);
                let zs = &self.z_nodes;
                let row = |j: usize| lerp(values[j * nphi + k0], values[j * nphi + k1], fk);
                if z <= zs[0] {
                    return row(0);
                }
                if z >= zs[n - 1] {
                    return row(n - 1);
                }
                let j = zs.partition_point(|&zj| zj <= z) - 1;
                let fz = (z - zs[j]) / (zs[j + 1] - zs[j]);
                lerp(row(j), row(j + 1), T::lit(fz))
            }
            _ => values[self.nearest(dir)],
        }
    }

    pub fn nearest(&self, dir: &[T]) -> usize {
        let mut best = 0;
        let mut best_dot = T::neg_infinity();
        for i in 0..self.len() {
            let d = crate::scalar::dot(self.point(i), dir);
            if d > best_dot {
                best_dot = d;
                best = i;
            }
        }
        best
    }
}

#[inline]
fn lerp<T: Real>(a: T, b: T, f: T) -> T {
    a + (b - a) * f
}

fn angle(x: f64, y: f64) -> f64 {
    let a = y.atan2(x);
    if a < 0.0 {
        a + 2.0 * PI
    } else {
        a
    }
}

fn periodic_cell<T: Real>(p: f64, n: usize) -> (usize, usize, T) {
    let fl = p.floor();
    let i0 = (fl as i64).rem_euclid(n as i64) as usize;
    (i0, (i0 + 1) % n, T::lit(p - fl))
}

/// Gauss-Legendre nodes (ascending) and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Gauss-Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let h = 0.5 * (b - a);
    let c = 0.5 * (a + b);
    (x.iter().map(|&t| c + h * t).collect(), w.iter().map(|&v| v * h).collect())
}

type Vec3 = [f64; 3];

fn normalize3(v: Vec3) -> Vec3 {
    let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / r, v[1] / r, v[2] / r]
}

fn icosphere(level: usize) -> (Vec<Vec3>, Vec<[usize; 3]>) {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<Vec3> = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ]
    .into_iter()
    .map(normalize3)
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut mid = |a: usize, b: usize, verts: &mut Vec<Vec3>| -> usize {
            let key = (a.min(b), a.max(b));
            *cache.entry(key).or_insert_with(|| {
                let (p, q) = (verts[a], verts[b]);
                verts.push(normalize3([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for &[a, b, c] in &faces {
            let ab = mid(a, b, &mut verts);
            let bc = mid(b, c, &mut verts);
            let ca = mid(c, a, &mut verts);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    (verts, faces)
}

/// Van Oosterom–Strackee solid angle of a spherical triangle.
fn spherical_triangle_area(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    let cross = [
        b[1] * c[2] - b[2] * c[1],
        b[2] * c[0] - b[0] * c[2],
        b[0] * c[1] - b[1] * c[0],
    ];
    let triple = (a[0] * cross[0] + a[1] * cross[1] + a[2] * cross[2]).abs();
    let d = |u: &Vec3, v: &Vec3| u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    2.0 * triple.atan2(1.0 + d(a, b) + d(b, c) + d(c, a))
}

fn antipode_map(verts: &[Vec3]) -> Result<Vec<usize>> {
    let key = |v: &Vec3| {
        let q = |x: f64| (x * 1e9).round() as i64;
        (q(v[0]), q(v[1]), q(v[2]))
    };
    let index: HashMap<_, usize> = verts.iter().enumerate().map(|(i, v)| (key(v), i)).collect();
    verts
        .iter()
        .map(|v| {
            index
                .get(&key(&[-v[0], -v[1], -v[2]]))
                .copied()
                .ok_or_else(|| invalid("grid is not antipodally closed"))
        })
        .collect()
}

/// `n` quasi-uniform directions on `S^2` (Fibonacci lattice).
pub fn fibonacci_directions(n: usize) -> Vec<[f64; 3]> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::sphere_area;

    fn check_antipodal(g: &SphereGrid<f64>) {
        for i in 0..g.len() {
            let j = g.antipode(i);
            assert_eq!(g.antipode(j), i);
            assert_eq!(g.weight(i), g.weight(j));
            for (a, b) in g.point(i).iter().zip(g.point(j)) {
                assert!((a + b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn grids_are_antipodal_with_correct_mass() {
        let grids = [
            SphereGrid::<f64>::circle(64).unwrap(),
            SphereGrid::icosahedral(3).unwrap(),
            SphereGrid::lat_long(12).unwrap(),
            SphereGrid::hyperspherical(10).unwrap(),
        ];
        for g in &grids {
            check_antipodal(g);
            let area = sphere_area::<f64>(g.dim());
            assert!((g.total_weight() - area).abs() < 1e-10 * area, "{:?}", g.kind());
            assert!(g.weights().iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(7);
        let int: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert!((int - 2.0 / 13.0).abs() < 1e-14);
    }

    #[test]
    fn lat_long_integrates_harmonics() {
        // ∫ z^2 = 4π/3, ∫ x^2 y^2 = 4π/15
        let g = SphereGrid::<f64>::lat_long(6).unwrap();
        let (mut a, mut b) = (0.0, 0.0);
        for i in 0..g.len() {
            let p = g.point(i);
            a += g.weight(i) * p[2] * p[2];
            b += g.weight(i) * p[0] * p[0] * p[1] * p[1];
        }
        assert!((a - 4.0 * PI / 3.0).abs() < 1e-12);
        assert!((b - 4.0 * PI / 15.0).abs() < 1e-12);
    }

    #[test]
    fn interpolation_reproduces_node_values() {
        let g = SphereGrid::<f64>::lat_long(8).unwrap();
        let vals: Vec<f64> = (0..g.len()).map(|i| g.point(i)[0] + 2.0 * g.point(i)[2]).collect();
        for i in (0..g.len()).step_by(7) {
            assert!((g.interpolate(&vals, g.point(i)) - vals[i]).abs() < 1e-12);
        }
        let c = SphereGrid::<f64>::circle(32).unwrap();
        let vals: Vec<f64> = (0..c.len()).map(|i| c.point(i)[1]).collect();
        let dir = [0.3f64.cos(), 0.3f64.sin()];
        assert!((c.interpolate(&vals, &dir) - 0.3f64.sin()).abs() < 5e-3);
    }
}
