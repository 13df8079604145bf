//! Tiny dense linear algebra for the 1..=4 dimensional matrices that show up
//! in norms, metrics and Jacobians. Matrices are row-major slices.

use crate::scalar::Real;

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
pub fn cholesky<T: Real>(a: &[T], n: usize) -> Option<Vec<T>> {
    debug_assert_eq!(a.len(), n * n);
    let mut l = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s = s - l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(s > T::zero()) || !s.is_finite() {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(l)
}

pub fn is_symmetric<T: Real>(a: &[T], n: usize) -> bool {
    let scale = a.iter().fold(T::zero(), |m, &v| m.max(v.abs()));
    let tol = T::sqrt_eps() * scale.max(T::one());
    (0..n).all(|i| (0..i).all(|j| (a[i * n + j] - a[j * n + i]).abs() <= tol))
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn inverse<T: Real>(a: &[T], n: usize) -> Option<Vec<T>> {
    let mut m = a.to_vec();
    let mut inv = identity::<T>(n);
    for col in 0..n {
        let pivot = (col..n).max_by(|&r, &s| {
            m[r * n + col]
                .abs()
                .partial_cmp(&m[s * n + col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        let p = m[pivot * n + col];
        if p.abs() <= T::epsilon() * T::lit(16.0) {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                m.swap(pivot * n + k, col * n + k);
                inv.swap(pivot * n + k, col * n + k);
            }
        }
        for k in 0..n {
            m[col * n + k] = m[col * n + k] / p;
            inv[col * n + k] = inv[col * n + k] / p;
        }
        for r in 0..n {
            if r != col {
                let f = m[r * n + col];
                if f != T::zero() {
                    for k in 0..n {
                        m[r * n + k] = m[r * n + k] - f * m[col * n + k];
                        inv[r * n + k] = inv[r * n + k] - f * inv[col * n + k];
                    }
                }
            }
        }
    }
    Some(inv)
}

pub fn determinant<T: Real>(a: &[T], n: usize) -> T {
    let mut m = a.to_vec();
    let mut det = T::one();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| {
                m[r * n + col]
                    .abs()
                    .partial_cmp(&m[s * n + col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(col);
        let p = m[pivot * n + col];
        if p == T::zero() {
            return T::zero();
        }
        if pivot != col {
            for k in 0..n {
                m.swap(pivot * n + k, col * n + k);
            }
            det = -det;
        }
        det = det * p;
        for r in col + 1..n {
            let f = m[r * n + col] / p;
            for k in col..n {
                m[r * n + k] = m[r * n + k] - f * m[col * n + k];
            }
        }
    }
    det
}

/// Numerical rank of a symmetric positive semi-definite matrix, via
/// pivoted Cholesky with relative threshold `rel_tol`.
pub fn psd_rank<T: Real>(a: &[T], n: usize, rel_tol: T) -> usize {
    let mut m = a.to_vec();
    let scale = (0..n).fold(T::zero(), |s, i| s.max(m[i * n + i]));
    if scale <= T::zero() {
        return 0;
    }
    let mut used = vec![false; n];
    let mut rank = 0;
    for _ in 0..n {
        let (best, val) = (0..n)
            .filter(|&i| !used[i])
            .map(|i| (i, m[i * n + i]))
            .fold((usize::MAX, T::neg_infinity()), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best == usize::MAX || val <= rel_tol * scale {
            break;
        }
        used[best] = true;
        rank += 1;
        let pivot_row: Vec<T> = (0..n).map(|k| m[best * n + k]).collect();
        for i in 0..n {
            for k in 0..n {
                m[i * n + k] = m[i * n + k] - pivot_row[i] * pivot_row[k] / val;
            }
        }
    }
    rank
}

pub fn identity<T: Real>(n: usize) -> Vec<T> {
    let mut m = vec![T::zero(); n * n];
    for i in 0..n {
        m[i * n + i] = T::one();
    }
    m
}

/// `out = A x` for a row-major `rows × cols` matrix.
#[inline]
pub fn matvec<T: Real>(a: &[T], rows: usize, cols: usize, x: &[T], out: &mut [T]) {
    for r in 0..rows {
        let mut s = T::zero();
        for c in 0..cols {
            s = s + a[r * cols + c] * x[c];
        }
        out[r] = s;
    }
}

/// Solve the 2x2 system `[[a, b], [c, d]] x = r`.
#[inline]
pub fn solve2<T: Real>(a: T, b: T, c: T, d: T, r0: T, r1: T) -> Option<(T, T)> {
    let det = a * d - b * c;
    let scale = (a.abs() + b.abs()) * (c.abs() + d.abs());
    if det.abs() <= T::epsilon() * scale || !det.is_finite() || det == T::zero() {
        return None;
    }
    Some(((d * r0 - b * r1) / det, (a * r1 - c * r0) / det))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_determinant() {
        let a: [f64; 9] = [4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0];
        let inv = inverse(&a, 3).unwrap();
        let mut prod = [0.0f64; 9];
        for i in 0..3 {
            for j in 0..3 {
                prod[i * 3 + j] = (0..3).map(|k| a[i * 3 + k] * inv[k * 3 + j]).sum();
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((prod[i * 3 + j] - e).abs() < 1e-12);
            }
        }
        let l = cholesky(&a, 3).unwrap();
        let det_l: f64 = (0..3).map(|i| l[i * 3 + i]).product();
        assert!((determinant(&a, 3) - det_l * det_l).abs() < 1e-12);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        assert!(cholesky(&[1.0, 2.0, 2.0, 1.0], 2).is_none());
    }

    #[test]
    fn rank_of_gram_matrix() {
        // Gram matrix of (1,0,1), (0,1,1), (1,1,2): rank 2.
        let v = [[1.0, 0.0, 1.0], [0.0, 1.0, 1.0], [1.0, 1.0, 2.0]];
        let mut g = [0.0; 9];
        for i in 0..3 {
            for j in 0..3 {
                g[i * 3 + j] = (0..3).map(|k| v[i][k] * v[j][k]).sum();
            }
        }
        assert_eq!(psd_rank(&g, 3, 1e-10), 2);
    }
}
