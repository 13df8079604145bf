use std::sync::Arc;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::fspace::{FunctionSpaceOnX, Region};
use crate::linalg::solve2;
use crate::scalar::{dot, norm2};

/// One random system `<x_i, θ_i(s)> = t_i`, `i = 1..n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemSample {
    pub coefficients: Vec<Vec<f64>>,
    pub offsets: Vec<f64>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootCount {
    pub count: usize,
    /// Some flagged cell resisted Newton after the extra subdivisions.
    pub uncertain: bool,
    pub roots: Vec<Vec<f64>>,
}

const CELLS_1D: usize = 4096;
const BASE_2D: usize = 8;
const LEAF_LEVEL: usize = 5;
const EXTRA_LEVELS: usize = 6;

/// Zero counter for systems on a region `U` of a 1- or 2-dimensional chart.
///
/// `n = 1`: sign changes of `f - t` on 4096 cells, read from a precomputed
/// table of `θ`; bisection locates the roots when asked.
/// `n = 2`: quadtree over an 8×8 base grid with Lipschitz exclusion, leaves
/// at 1/256 of the region, Newton polishing at leaves and deduplication
/// within `1e-6 · diam(U)`.
#[derive(Debug, Clone)]
pub struct RootCounter {
    spaces: Vec<Arc<FunctionSpaceOnX<f64>>>,
    region: Region<f64>,
    wraps: Vec<bool>,
    table: Vec<f64>,
    merge_radius: f64,
}

impl RootCounter {
    pub fn new(spaces: Vec<Arc<FunctionSpaceOnX<f64>>>, region: Region<f64>) -> Result<Self> {
        let chart = spaces.first().ok_or_else(|| invalid("no function spaces given"))?.chart().clone();
        let n = chart.dim();
        if spaces.len() != n {
            return Err(invalid(format!("{} equations on a chart of dimension {n}", spaces.len())));
        }
        if spaces.iter().any(|s| s.chart().intervals() != chart.intervals()) {
            return Err(invalid("function spaces live on different charts"));
        }
        if region.dim() != n {
            return Err(invalid("region dimension differs from the chart"));
        }
        let wraps: Vec<bool> = (0..n).map(|i| region.wraps(&chart, i)).collect();
        let mut table = Vec::new();
        if n == 1 {
            let (a, b) = region.intervals()[0];
            let d = spaces[0].dim();
            table = vec![0.0; (CELLS_1D + 1) * d];
            for k in 0..=CELLS_1D {
                let s = a + (b - a) * k as f64 / CELLS_1D as f64;
                spaces[0].theta_into(&[s], &mut table[k * d..(k + 1) * d]);
            }
            if wraps[0] {
                let first = table[..d].to_vec();
                table[CELLS_1D * d..].copy_from_slice(&first);
            }
        }
        let diam = region.intervals().iter().map(|&(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt();
        Ok(Self { spaces, region, wraps, table, merge_radius: 1e-6 * diam })
    }

    pub fn dim(&self) -> usize {
        self.spaces.len()
    }

    fn check(&self, s: &SystemSample) -> Result<()> {
        if s.coefficients.len() != self.dim() || s.offsets.len() != self.dim() {
            return Err(invalid("sample has the wrong number of factors"));
        }
        for (x, sp) in s.coefficients.iter().zip(&self.spaces) {
            if x.len() != sp.dim() {
                return Err(invalid("coefficient vector has the wrong dimension"));
            }
        }
        Ok(())
    }

    /// Number of isolated roots in `U` and the uncertainty flag.
    pub fn count(&self, s: &SystemSample) -> (usize, bool) {
        match self.dim() {
            1 => (self.sign_changes(&s.coefficients[0], s.offsets[0]).count(), false),
            _ => {
                let r = self.solve2(s);
                (r.count, r.uncertain)
            }
        }
    }

    /// Roots with their locations.
    pub fn solve(&self, s: &SystemSample) -> Result<RootCount> {
        self.check(s)?;
        Ok(match self.dim() {
            1 => {
                let x = &s.coefficients[0];
                let t = s.offsets[0];
                let (a, b) = self.region.intervals()[0];
                let h = (b - a) / CELLS_1D as f64;
                let roots: Vec<Vec<f64>> = self
                    .sign_changes(x, t)
                    .map(|k| vec![self.bisect(x, t, a + h * k as f64, a + h * (k + 1) as f64)])
                    .collect();
                RootCount { count: roots.len(), uncertain: false, roots }
            }
            _ => self.solve2(s),
        })
    }

    fn sign_changes<'a>(&'a self, x: &'a [f64], t: f64) -> impl Iterator<Item = usize> + 'a {
        let d = x.len();
        let value = move |k: usize| dot(x, &self.table[k * d..(k + 1) * d]) - t;
        let mut prev = value(0) >= 0.0;
        (0..CELLS_1D).filter(move |&k| {
            let next = value(k + 1) >= 0.0;
            let change = next != prev;
            prev = next;
            change
        })
    }

    fn eval(&self, i: usize, x: &[f64], t: f64, s: &[f64]) -> f64 {
        self.spaces[i].basis().iter().zip(x).fold(-t, |acc, (f, &c)| acc + c * f.value(s))
    }

    fn bisect(&self, x: &[f64], t: f64, mut lo: f64, mut hi: f64) -> f64 {
        let flo = self.eval(0, x, t, &[lo]) >= 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if (self.eval(0, x, t, &[mid]) >= 0.0) == flo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn residual(&self, s: &SystemSample, p: &[f64; 2]) -> [f64; 2] {
        [
            self.eval(0, &s.coefficients[0], s.offsets[0], p),
            self.eval(1, &s.coefficients[1], s.offsets[1], p),
        ]
    }

    fn jacobian(&self, s: &SystemSample, p: &[f64; 2]) -> [[f64; 2]; 2] {
        let mut out = [[0.0; 2]; 2];
        let mut g = [0.0; 2];
        for i in 0..2 {
            for (f, &c) in self.spaces[i].basis().iter().zip(&s.coefficients[i]) {
                f.gradient(p, &mut g);
                out[i][0] += c * g[0];
                out[i][1] += c * g[1];
            }
        }
        out
    }

    /// `|F_i(p) - F_i(c)| <= L[i][0] hx + L[i][1] hy` on the cell.
    fn lipschitz(&self, s: &SystemSample, c: &[f64; 2], half: &[f64; 2]) -> [[f64; 2]; 2] {
        let mut out = [[0.0; 2]; 2];
        let mut g = [0.0; 2];
        for i in 0..2 {
            for (f, &x) in self.spaces[i].basis().iter().zip(&s.coefficients[i]) {
                f.gradient_bound(c, half, &mut g);
                out[i][0] += x.abs() * g[0];
                out[i][1] += x.abs() * g[1];
            }
        }
        out
    }

    fn solve2(&self, s: &SystemSample) -> RootCount {
        let iv = self.region.intervals();
        let size = [(iv[0].1 - iv[0].0) / BASE_2D as f64, (iv[1].1 - iv[1].0) / BASE_2D as f64];
        let mut stack: Vec<([f64; 2], [f64; 2], usize)> = Vec::new();
        for i in 0..BASE_2D {
            for j in 0..BASE_2D {
                let c = [iv[0].0 + size[0] * (i as f64 + 0.5), iv[1].0 + size[1] * (j as f64 + 0.5)];
                stack.push((c, [0.5 * size[0], 0.5 * size[1]], 0));
            }
        }
        let mut roots: Vec<[f64; 2]> = Vec::new();
        let mut uncertain = false;
        while let Some((c, h, level)) = stack.pop() {
            let f = self.residual(s, &c);
            let l = self.lipschitz(s, &c, &h);
            if (0..2).any(|i| f[i].abs() > l[i][0] * h[0] + l[i][1] * h[1]) {
                continue;
            }
            let split = |stack: &mut Vec<_>| {
                let q = [0.5 * h[0], 0.5 * h[1]];
                for (dx, dy) in [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)] {
                    stack.push(([c[0] + dx * q[0], c[1] + dy * q[1]], q, level + 1));
                }
            };
            if level < LEAF_LEVEL {
                split(&mut stack);
                continue;
            }
            match self.newton(s, c) {
                Some(p) if (p[0] - c[0]).abs() <= 1.5 * h[0] && (p[1] - c[1]).abs() <= 1.5 * h[1] => {
                    if let Some(p) = self.normalize(p) {
                        if !roots.iter().any(|r| self.distance(r, &p) <= self.merge_radius) {
                            roots.push(p);
                        }
                    }
                }
                _ => {
                    if self.corner_sign_change(s, &c, &h) {
                        if level < LEAF_LEVEL + EXTRA_LEVELS {
                            split(&mut stack);
                        } else {
                            uncertain = true;
                        }
                    }
                }
            }
        }
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        RootCount { count: roots.len(), uncertain, roots: roots.into_iter().map(|r| r.to_vec()).collect() }
    }

    fn newton(&self, s: &SystemSample, mut p: [f64; 2]) -> Option<[f64; 2]> {
        let tol = 1e-6 * self.merge_radius;
        for _ in 0..30 {
            let f = self.residual(s, &p);
            let j = self.jacobian(s, &p);
            let (dx, dy) = solve2(j[0][0], j[0][1], j[1][0], j[1][1], f[0], f[1])?;
            p = [p[0] - dx, p[1] - dy];
            if !(p[0].is_finite() && p[1].is_finite()) {
                return None;
            }
            if norm2(&[dx, dy]) <= tol {
                let f = self.residual(s, &p);
                let scale = 1.0 + s.offsets[0].abs().max(s.offsets[1].abs());
                return (f[0].abs().max(f[1].abs()) <= 1e-9 * scale).then_some(p);
            }
        }
        None
    }

    fn corner_sign_change(&self, s: &SystemSample, c: &[f64; 2], h: &[f64; 2]) -> bool {
        let corners = [[-1.0, -1.0], [1.0, -1.0], [-1.0, 1.0], [1.0, 1.0]];
        let vals: Vec<[f64; 2]> =
            corners.iter().map(|d| self.residual(s, &[c[0] + d[0] * h[0], c[1] + d[1] * h[1]])).collect();
        (0..2).all(|i| vals.iter().any(|v| v[i] >= 0.0) && vals.iter().any(|v| v[i] < 0.0))
    }

    /// Wraps periodic coordinates into `U`; `None` outside `U`.
    fn normalize(&self, mut p: [f64; 2]) -> Option<[f64; 2]> {
        for (a, &(lo, hi)) in self.region.intervals().iter().enumerate() {
            if self.wraps[a] {
                p[a] = lo + (p[a] - lo).rem_euclid(hi - lo);
            } else if p[a] < lo || p[a] > hi {
                return None;
            }
        }
        Some(p)
    }

    fn distance(&self, p: &[f64; 2], q: &[f64; 2]) -> f64 {
        let mut d2 = 0.0;
        for (a, &(lo, hi)) in self.region.intervals().iter().enumerate() {
            let mut d = (p[a] - q[a]).abs();
            if self.wraps[a] {
                d = d.min(hi - lo - d);
            }
            d2 += d * d;
        }
        d2.sqrt()
    }
}

/// Counts the isolated roots of one sampled system in `U`.
pub fn count_solutions(
    sample: &SystemSample,
    spaces: &[Arc<FunctionSpaceOnX<f64>>],
    region: &Region<f64>,
) -> Result<RootCount> {
    RootCounter::new(spaces.to_vec(), region.clone())?.solve(sample)
}
