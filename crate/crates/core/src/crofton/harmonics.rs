//! Legendre functions, fully normalised associated Legendre functions and
//! the eigenvalues of the cosine transform.

use std::f64::consts::PI;

use crate::sphere::gauss_legendre_on;

/// `P_l(t)` by the three-term recurrence.
pub fn legendre(l: usize, t: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, t);
    if l == 0 {
        return 1.0;
    }
    for k in 2..=l {
        let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    p1
}

#[inline]
pub fn lm_index(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

/// `P̄_l^m(z)` for `0 <= m <= l <= lmax`, normalised so that
/// `2π ∫ P̄_l^m(z)^2 dz = 1`; the real harmonics are `P̄_l^0`,
/// `√2 P̄_l^m cos mφ` and `√2 P̄_l^m sin mφ`. Indexed by [`lm_index`].
pub fn assoc_legendre_table(lmax: usize, z: f64) -> Vec<f64> {
    let mut p = vec![0.0; lm_index(lmax, lmax) + 1];
    let s = (1.0 - z * z).max(0.0).sqrt();
    p[0] = 1.0 / (4.0 * PI).sqrt();
    for m in 1..=lmax {
        let mf = m as f64;
        p[lm_index(m, m)] = ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s * p[lm_index(m - 1, m - 1)];
    }
    for m in 0..lmax {
        p[lm_index(m + 1, m)] = (2.0 * m as f64 + 3.0).sqrt() * z * p[lm_index(m, m)];
    }
    for m in 0..=lmax {
        for l in m + 2..=lmax {
            let (lf, mf) = (l as f64, m as f64);
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
            p[lm_index(l, m)] = a * (z * p[lm_index(l - 1, m)] - b * p[lm_index(l - 2, m)]);
        }
    }
    p
}

/// Eigenvalue of the cosine transform (with `ν` half the surface measure)
/// on harmonics of degree `l`, by numerical Funk–Hecke integration.
/// Dimension 2: `(1/2) ∫_0^{2π} |cos θ| cos(lθ) dθ`.
/// Dimension 3: `π ∫_{-1}^{1} |t| P_l(t) dt`.
pub fn cosine_eigenvalue(dim: usize, l: usize) -> f64 {
    if l % 2 == 1 {
        return 0.0;
    }
    match dim {
        2 => {
            let panels = l + 1;
            let h = 0.5 * PI / panels as f64;
            let mut s = 0.0;
            for p in 0..panels {
                let (x, w) = gauss_legendre_on(8, p as f64 * h, (p + 1) as f64 * h);
                s += x.iter().zip(&w).map(|(&t, &w)| w * t.cos() * (l as f64 * t).cos()).sum::<f64>();
            }
            2.0 * s
        }
        3 => {
            let (x, w) = gauss_legendre_on(l / 2 + 8, 0.0, 1.0);
            2.0 * PI * x.iter().zip(&w).map(|(&t, &w)| w * t * legendre(l, t)).sum::<f64>()
        }
        _ => panic!("cosine eigenvalues are tabulated for dimensions 2 and 3"),
    }
}
