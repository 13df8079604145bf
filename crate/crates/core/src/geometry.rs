//! Convex polygons and polyhedra cut out by finitely many half-spaces
//! `{x : <u, x> <= h}`.

use crate::scalar::Real;

/// Outer polygon for support values `h[k]` at the directions
/// `θ_k = 2πk/n`. Uses consecutive support-line intersections when they
/// form a valid convex polygon and falls back to clipping otherwise.
/// Returns `None` if the intersection is empty.
pub fn circumscribed_polygon<T: Real>(h: &[T]) -> Option<Vec<[T; 2]>> {
    let n = h.len();
    let dirs: Vec<[T; 2]> = (0..n).map(|k| unit_angle::<T>(k, n)).collect();
    let scale = h.iter().fold(T::zero(), |m, &v| m.max(v.abs()));
    let tol = T::lit(1e-10) * scale.max(T::min_positive_value());
    let mut verts = Vec::with_capacity(n);
    for k in 0..n {
        let (a, b) = (dirs[k], dirs[(k + 1) % n]);
        let det = a[0] * b[1] - a[1] * b[0];
        let (ha, hb) = (h[k], h[(k + 1) % n]);
        verts.push([(ha * b[1] - hb * a[1]) / det, (a[0] * hb - b[0] * ha) / det]);
    }
    let valid = (0..n).all(|k| {
        let (p, q) = (verts[(k + n - 1) % n], verts[k]);
        let t = [-dirs[k][1], dirs[k][0]];
        (q[0] - p[0]) * t[0] + (q[1] - p[1]) * t[1] >= -tol
    });
    if valid {
        return Some(verts);
    }
    let halfplanes: Vec<([T; 2], T)> = dirs.into_iter().zip(h.iter().copied()).collect();
    clip_polygon(&halfplanes, scale)
}

fn unit_angle<T: Real>(k: usize, n: usize) -> [T; 2] {
    let th = T::lit(2.0 * std::f64::consts::PI * k as f64 / n as f64);
    [th.cos(), th.sin()]
}

/// Sutherland–Hodgman clipping of a large box by every half-plane.
pub fn clip_polygon<T: Real>(halfplanes: &[([T; 2], T)], scale: T) -> Option<Vec<[T; 2]>> {
    let r = T::lit(4.0) * scale.max(T::one());
    let mut poly = vec![[-r, -r], [r, -r], [r, r], [-r, r]];
    for &(u, c) in halfplanes {
        poly = clip_once(&poly, u, c);
        if poly.is_empty() {
            return None;
        }
    }
    Some(poly)
}

fn clip_once<T: Real>(poly: &[[T; 2]], u: [T; 2], c: T) -> Vec<[T; 2]> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    let n = poly.len();
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let dp = u[0] * p[0] + u[1] * p[1] - c;
        let dq = u[0] * q[0] + u[1] * q[1] - c;
        if dp <= T::zero() {
            out.push(p);
        }
        if (dp < T::zero()) != (dq < T::zero()) && dp != dq {
            let t = dp / (dp - dq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

/// Shoelace area of a simple polygon (absolute value).
pub fn polygon_area<T: Real>(poly: &[[T; 2]]) -> T {
    let n = poly.len();
    if n < 3 {
        return T::zero();
    }
    let mut s = T::zero();
    for i in 0..n {
        let (p, q) = (poly[i], poly[(i + 1) % n]);
        s = s + p[0] * q[1] - p[1] * q[0];
    }
    (s * T::lit(0.5)).abs()
}

/// Convex polyhedron stored face by face together with each face's outward
/// unit normal.
#[derive(Debug, Clone)]
pub struct Polyhedron<T> {
    faces: Vec<Face<T>>,
}

#[derive(Debug, Clone)]
struct Face<T> {
    normal: [T; 3],
    verts: Vec<[T; 3]>,
}

impl<T: Real> Polyhedron<T> {
    /// Axis-aligned cube `[-r, r]^3`.
    pub fn cube(r: T) -> Self {
        let mut faces = Vec::with_capacity(6);
        for axis in 0..3 {
            for &s in &[T::one(), -T::one()] {
                let mut normal = [T::zero(); 3];
                normal[axis] = s;
                let (a, b) = ((axis + 1) % 3, (axis + 2) % 3);
                let corners = [(-r, -r), (r, -r), (r, r), (-r, r)];
                let verts = corners
                    .iter()
                    .map(|&(x, y)| {
                        let mut v = [T::zero(); 3];
                        v[axis] = s * r;
                        v[a] = x;
                        v[b] = y;
                        v
                    })
                    .collect();
                faces.push(Face { normal, verts });
            }
        }
        Self { faces }
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// Intersects with `{x : <u, x> <= c}`; `u` must be a unit vector.
    pub fn clip(&mut self, u: [T; 3], c: T) {
        let eps = T::lit(1e-12) * self.extent().max(T::one());
        let mut faces = Vec::with_capacity(self.faces.len() + 1);
        let mut cut: Vec<[T; 3]> = Vec::new();
        for face in &self.faces {
            let n = face.verts.len();
            let mut out = Vec::with_capacity(n + 1);
            for i in 0..n {
                let p = face.verts[i];
                let q = face.verts[(i + 1) % n];
                let dp = dot3(u, p) - c;
                let dq = dot3(u, q) - c;
                if dp <= eps {
                    out.push(p);
                    if dp.abs() <= eps {
                        cut.push(p);
                    }
                }
                if (dp > eps && dq < -eps) || (dp < -eps && dq > eps) {
                    let t = dp / (dp - dq);
                    let x = [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]), p[2] + t * (q[2] - p[2])];
                    out.push(x);
                    cut.push(x);
                }
            }
            if out.len() >= 3 {
                faces.push(Face { normal: face.normal, verts: out });
            }
        }
        dedup_points(&mut cut, eps * T::lit(10.0));
        if cut.len() >= 3 {
            faces.push(Face { normal: u, verts: order_around(cut, u) });
        }
        self.faces = faces;
    }

    fn extent(&self) -> T {
        self.faces
            .iter()
            .flat_map(|f| f.verts.iter())
            .fold(T::zero(), |m, v| m.max(v[0].abs()).max(v[1].abs()).max(v[2].abs()))
    }

    /// `V = (1/3) Σ_f <n_f, p_f> area_f`.
    pub fn volume(&self) -> T {
        let mut v = T::zero();
        for f in &self.faces {
            let p0 = f.verts[0];
            let mut area2 = [T::zero(); 3];
            for i in 1..f.verts.len() - 1 {
                let a = sub3(f.verts[i], p0);
                let b = sub3(f.verts[i + 1], p0);
                let c = cross3(a, b);
                area2 = [area2[0] + c[0], area2[1] + c[1], area2[2] + c[2]];
            }
            let area = dot3(area2, area2).sqrt() * T::lit(0.5);
            v = v + dot3(f.normal, p0) * area;
        }
        (v / T::lit(3.0)).max(T::zero())
    }

    pub fn vertices(&self) -> Vec<[T; 3]> {
        let mut pts: Vec<[T; 3]> = self.faces.iter().flat_map(|f| f.verts.iter().copied()).collect();
        let eps = T::lit(1e-10) * self.extent().max(T::one());
        dedup_points(&mut pts, eps);
        pts
    }
}

/// Intersection of `{<u_k, x> <= h_k}` with a bounding cube.
pub fn clip_polyhedron<T: Real>(halfspaces: &[([T; 3], T)], bound: T) -> Polyhedron<T> {
    let mut p = Polyhedron::cube(bound);
    for &(u, c) in halfspaces {
        p.clip(u, c);
        if p.is_empty() {
            break;
        }
    }
    p
}

fn dedup_points<T: Real>(pts: &mut Vec<[T; 3]>, eps: T) {
    let mut out: Vec<[T; 3]> = Vec::with_capacity(pts.len());
    for &p in pts.iter() {
        if !out.iter().any(|q| {
            (p[0] - q[0]).abs() <= eps && (p[1] - q[1]).abs() <= eps && (p[2] - q[2]).abs() <= eps
        }) {
            out.push(p);
        }
    }
    *pts = out;
}

fn order_around<T: Real>(pts: Vec<[T; 3]>, n: [T; 3]) -> Vec<[T; 3]> {
    let m = T::from_count(pts.len());
    let c = pts.iter().fold([T::zero(); 3], |s, p| [s[0] + p[0], s[1] + p[1], s[2] + p[2]]);
    let c = [c[0] / m, c[1] / m, c[2] / m];
    let helper = if n[0].abs() < T::lit(0.9) { [T::one(), T::zero(), T::zero()] } else { [T::zero(), T::one(), T::zero()] };
    let e1 = normalize3(cross3(n, helper));
    let e2 = cross3(n, e1);
    let mut keyed: Vec<(T, [T; 3])> = pts
        .into_iter()
        .map(|p| {
            let d = sub3(p, c);
            (dot3(d, e2).atan2(dot3(d, e1)), p)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    keyed.into_iter().map(|(_, p)| p).collect()
}

#[inline]
pub fn dot3<T: Real>(a: [T; 3], b: [T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
fn sub3<T: Real>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
fn cross3<T: Real>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn normalize3<T: Real>(a: [T; 3]) -> [T; 3] {
    let r = dot3(a, a).sqrt();
    [a[0] / r, a[1] / r, a[2] / r]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn circumscribed_square_and_disk() {
        let n = 64;
        let square: Vec<f64> = (0..n)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / n as f64;
                t.cos().abs() + t.sin().abs()
            })
            .collect();
        let p = circumscribed_polygon(&square).unwrap();
        assert!((polygon_area(&p) - 4.0).abs() < 1e-9);
        let disk = vec![1.0; n];
        let a = polygon_area(&circumscribed_polygon(&disk).unwrap());
        assert!((a - n as f64 * (PI / n as f64).tan()).abs() < 1e-12);
    }

    #[test]
    fn inconsistent_support_values_fall_back_to_clipping() {
        // A support "function" with one value far too large: that line is
        // redundant and the polygon is the unit-square clip.
        let n = 8;
        let mut h: Vec<f64> = (0..n)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / n as f64;
                t.cos().abs() + t.sin().abs()
            })
            .collect();
        h[1] = 5.0;
        let p = circumscribed_polygon(&h).unwrap();
        assert!((polygon_area(&p) - 4.0).abs() < 1e-9);
    }

    #[test]
    fn polyhedron_cube_and_octahedron() {
        let cube = Polyhedron::cube(1.0f64);
        assert!((cube.volume() - 8.0).abs() < 1e-12);
        let s = 1.0 / 3f64.sqrt();
        let mut planes = Vec::new();
        for &a in &[-1.0, 1.0] {
            for &b in &[-1.0, 1.0] {
                for &c in &[-1.0, 1.0] {
                    planes.push(([a * s, b * s, c * s], s));
                }
            }
        }
        let oct = clip_polyhedron(&planes, 2.0);
        assert!((oct.volume() - 4.0 / 3.0).abs() < 1e-10);
        assert_eq!(oct.vertices().len(), 6);
    }
}
