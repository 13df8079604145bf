//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` constant into this scalar.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant must be representable")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count must be representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Square root of machine epsilon, the default relative tolerance for
    /// geometric predicates.
    #[inline]
    fn sqrt_eps() -> Self {
        Self::epsilon().sqrt()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Pairwise (cascade) summation. The result depends only on the order of
/// `values`, never on how the work that produced them was scheduled.
pub fn pairwise_sum<T: Real>(values: &[T]) -> T {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        return values.iter().fold(T::zero(), |acc, &v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

#[inline]
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
pub fn norm2<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// Surface area of the unit sphere `S^{d-1}` in `R^d`.
pub fn sphere_area<T: Real>(d: usize) -> T {
    T::from_count(d) * ball_volume::<T>(d)
}

/// Volume `κ_d` of the unit ball in `R^d`.
pub fn ball_volume<T: Real>(d: usize) -> T {
    match d {
        0 => T::one(),
        1 => T::lit(2.0),
        _ => ball_volume::<T>(d - 2) * T::lit(2.0) * T::PI() / T::from_count(d),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_volumes() {
        assert!((ball_volume::<f64>(2) - std::f64::consts::PI).abs() < 1e-15);
        assert!((ball_volume::<f64>(3) - 4.0 / 3.0 * std::f64::consts::PI).abs() < 1e-14);
        for d in 1..=4 {
            // |S^{d-1}| = d κ_d
            let lhs = sphere_area::<f64>(d);
            let rhs = d as f64 * ball_volume::<f64>(d);
            assert!((lhs - rhs).abs() < 1e-12, "d={d}");
        }
    }

    #[test]
    fn pairwise_matches_naive_on_small_input() {
        let v: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let naive: f64 = v.iter().sum();
        assert!((pairwise_sum(&v) - naive).abs() < 1e-10);
    }
}
