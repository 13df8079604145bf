//! Inversion of the cosine transform by expansion in even circular or
//! spherical harmonics.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;
use crate::sphere::{GridKind, SphereGrid};

use super::harmonics::{assoc_legendre_table, cosine_eigenvalue, lm_index};
use super::GrassmannDensity;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionOptions {
    /// First degree at which the residual is tested.
    pub min_degree: usize,
    pub max_degree: usize,
    /// Tikhonov weight `α` in the filter `λ / (λ² + α)`.
    pub regularization: f64,
    /// Heat-kernel time `s`; degree `l` is damped by `exp(-s l (l + d - 2))`.
    pub smoothing: f64,
    /// Residual tolerance relative to `max |target|`.
    pub tolerance: f64,
}

impl InversionOptions {
    /// Plain truncated inversion with the degree chosen adaptively.
    pub fn plain(dim: usize) -> Self {
        Self {
            min_degree: 0,
            max_degree: default_degree(dim),
            regularization: 0.0,
            smoothing: 0.0,
            tolerance: 1e-3,
        }
    }

    /// Fixed maximal degree with a heat-kernel mollifier strong enough to
    /// suppress Gibbs oscillations near non-smooth points of the target.
    /// The mollifier multiplies the recovered measure by a positive kernel,
    /// so positive densities stay positive.
    pub fn mollified(dim: usize) -> Self {
        let l = default_degree(dim);
        let l = l as f64;
        Self {
            min_degree: default_degree(dim),
            max_degree: default_degree(dim),
            regularization: 0.0,
            smoothing: 5.0 / (l * (l + dim as f64 - 2.0)),
            tolerance: 5e-2,
        }
    }
}

fn default_degree(dim: usize) -> usize {
    if dim == 2 {
        64
    } else {
        40
    }
}

/// Recovered density with the sup-norm residual `max |T φ − target|` on
/// the grid (computed spectrally) and the degree used.
#[derive(Debug, Clone)]
pub struct Inversion<T> {
    pub density: GrassmannDensity<T>,
    pub residual: f64,
    pub degree: usize,
}

/// Natural grid on which a target should be sampled for inversion up to
/// `max_degree`.
pub fn inversion_grid<T: Real>(dim: usize, max_degree: usize) -> Result<Arc<SphereGrid<T>>> {
    match dim {
        2 => Ok(Arc::new(SphereGrid::circle((8 * max_degree).max(256).div_ceil(8) * 8)?)),
        3 => Ok(Arc::new(SphereGrid::lat_long((2 * max_degree).max(16))?)),
        _ => Err(Error::Unsupported(format!("cosine-transform inversion in dimension {dim}"))),
    }
}

pub fn invert_cosine_transform<T: Real>(target: &GrassmannDensity<T>, regularization: f64) -> Result<Inversion<T>> {
    let opts = InversionOptions { regularization, ..InversionOptions::plain(target.dim()) };
    invert_with(target, &opts)
}

pub fn invert_with<T: Real>(target: &GrassmannDensity<T>, opts: &InversionOptions) -> Result<Inversion<T>> {
    let mut spec = Spectrum::project(target, opts.max_degree)?;
    let (degree, residual) = spec.sweep(opts, false);
    let limit = opts.tolerance * spec.scale;
    if residual > limit {
        return Err(Error::NonConvergence { residual, degree });
    }
    let values = spec.synthesize(opts, degree);
    let density = GrassmannDensity::new(target.grid().clone(), values.into_iter().map(T::lit).collect())?;
    Ok(Inversion { density, residual, degree })
}

/// Residual after each even degree `0, 2, ..., max_degree`.
pub fn residual_profile<T: Real>(target: &GrassmannDensity<T>, opts: &InversionOptions) -> Result<Vec<(usize, f64)>> {
    let mut spec = Spectrum::project(target, opts.max_degree)?;
    let opts = InversionOptions { min_degree: 0, tolerance: 0.0, ..*opts };
    spec.sweep(&opts, true);
    Ok(spec.profile)
}

struct Spectrum {
    dim: usize,
    lmax: usize,
    target: Vec<f64>,
    scale: f64,
    eig: Vec<f64>,
    layout: Layout,
    /// Cosine and sine coefficients; indexed by frequency (dim 2) or by
    /// `lm_index` (dim 3).
    cos: Vec<f64>,
    sin: Vec<f64>,
    profile: Vec<(usize, f64)>,
}

enum Layout {
    Circle { angles: Vec<f64> },
    LatLong { rows: usize, nphi: usize, plm: Vec<Vec<f64>>, phis: Vec<f64> },
}

impl Spectrum {
    fn project<T: Real>(target: &GrassmannDensity<T>, lmax: usize) -> Result<Self> {
        let grid = target.grid();
        let f: Vec<f64> = target.values().iter().map(|v| v.as_f64()).collect();
        let scale = f.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let dim = grid.dim();
        let eig: Vec<f64> = (0..=lmax).map(|l| cosine_eigenvalue(dim.max(2), l)).collect();
        match grid.kind() {
            GridKind::Circle { n } => {
                let angles: Vec<f64> = (0..n).map(|k| 2.0 * PI * (k as f64 + 0.5) / n as f64).collect();
                let h = 2.0 * PI / n as f64;
                let mut cos = vec![0.0; lmax + 1];
                let mut sin = vec![0.0; lmax + 1];
                for l in (0..=lmax).step_by(2) {
                    let norm = if l == 0 { 1.0 / (2.0 * PI) } else { 1.0 / PI };
                    for k in 0..n {
                        let a = l as f64 * angles[k];
                        cos[l] += f[k] * a.cos();
                        sin[l] += f[k] * a.sin();
                    }
                    cos[l] *= h * norm;
                    sin[l] *= h * norm;
                }
                Ok(Self { dim, lmax, target: f, scale, eig, layout: Layout::Circle { angles }, cos, sin, profile: vec![] })
            }
            GridKind::LatLong { n } => {
                let nphi = 2 * n;
                let dphi = PI / n as f64;
                let phis: Vec<f64> = (0..nphi).map(|k| dphi * (k as f64 + 0.5)).collect();
                let mut plm = Vec::with_capacity(n);
                let mut zw = Vec::with_capacity(n);
                for j in 0..n {
                    let z = grid.point(j * nphi)[2].as_f64();
                    plm.push(assoc_legendre_table(lmax, z));
                    // Row weight: grid weight already includes dφ.
                    zw.push(grid.weight(j * nphi).as_f64() / dphi);
                }
                let size = lm_index(lmax, lmax) + 1;
                let mut cos = vec![0.0; size];
                let mut sin = vec![0.0; size];
                for j in 0..n {
                    let row = &f[j * nphi..(j + 1) * nphi];
                    for m in 0..=lmax {
                        let (mut a, mut b) = (0.0, 0.0);
                        for k in 0..nphi {
                            let t = m as f64 * phis[k];
                            a += row[k] * t.cos();
                            b += row[k] * t.sin();
                        }
                        a *= dphi;
                        b *= dphi;
                        let fac = if m == 0 { 1.0 } else { 2f64.sqrt() };
                        for l in (m..=lmax).filter(|l| l % 2 == 0) {
                            let p = plm[j][lm_index(l, m)] * zw[j] * fac;
                            cos[lm_index(l, m)] += p * a;
                            sin[lm_index(l, m)] += p * b;
                        }
                    }
                }
                Ok(Self {
                    dim,
                    lmax,
                    target: f,
                    scale,
                    eig,
                    layout: Layout::LatLong { rows: n, nphi, plm, phis },
                    cos,
                    sin,
                    profile: vec![],
                })
            }
            _ => Err(invalid("inversion needs a circle grid (dim 2) or a lat-long grid (dim 3)")),
        }
    }

    fn filter(&self, opts: &InversionOptions, l: usize) -> f64 {
        let lam = self.eig[l];
        let heat = (-opts.smoothing * (l * (l + self.dim - 2)) as f64).exp();
        lam / (lam * lam + opts.regularization) * heat
    }

    /// Adds degree bands until the residual meets the tolerance; returns
    /// the degree reached and its residual.
    fn sweep(&mut self, opts: &InversionOptions, record: bool) -> (usize, f64) {
        let mut recon = vec![0.0; self.target.len()];
        let limit = opts.tolerance * self.scale;
        let mut last = (0, f64::INFINITY);
        for l in (0..=self.lmax).step_by(2) {
            let g = self.eig[l] * self.filter(opts, l);
            self.add_band(&mut recon, l, g);
            let res = recon.iter().zip(&self.target).fold(0.0f64, |m, (r, t)| m.max((r - t).abs()));
            if record {
                self.profile.push((l, res));
            }
            last = (l, res);
            if l >= opts.min_degree && res <= limit {
                break;
            }
        }
        last
    }

    fn synthesize(&self, opts: &InversionOptions, degree: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.target.len()];
        for l in (0..=degree).step_by(2) {
            self.add_band(&mut out, l, self.filter(opts, l));
        }
        out
    }

    fn add_band(&self, out: &mut [f64], l: usize, gain: f64) {
        match &self.layout {
            Layout::Circle { angles } => {
                let (a, b) = (self.cos[l] * gain, self.sin[l] * gain);
                for (k, o) in out.iter_mut().enumerate() {
                    let t = l as f64 * angles[k];
                    *o += a * t.cos() + b * t.sin();
                }
            }
            Layout::LatLong { rows, nphi, plm, phis } => {
                let s2 = 2f64.sqrt();
                for j in 0..*rows {
                    let coef: Vec<(f64, f64)> = (0..=l)
                        .map(|m| {
                            let p = plm[j][lm_index(l, m)] * gain * if m == 0 { 1.0 } else { s2 };
                            (p * self.cos[lm_index(l, m)], p * self.sin[lm_index(l, m)])
                        })
                        .collect();
                    for k in 0..*nphi {
                        let mut v = coef[0].0;
                        for (m, &(a, b)) in coef.iter().enumerate().skip(1) {
                            let t = m as f64 * phis[k];
                            v += a * t.cos() + b * t.sin();
                        }
                        out[j * nphi + k] += v;
                    }
                }
            }
        }
    }
}
