use std::io::Write;
use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::scalar::{dot, norm2, pairwise_sum, Real};
use crate::sphere::SphereGrid;

/// Even scalar field on an antipodally closed sphere grid, read as a
/// function on the Grassmannian of lines. May be signed.
#[derive(Debug, Clone)]
pub struct GrassmannDensity<T> {
    grid: Arc<SphereGrid<T>>,
    values: Vec<T>,
}

impl<T: Real> GrassmannDensity<T> {
    /// Antipodal values are averaged so the field is exactly even.
    pub fn new(grid: Arc<SphereGrid<T>>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(format!("expected {} values, got {}", grid.len(), values.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("density values must be finite"));
        }
        let values = (0..values.len())
            .map(|i| (values[i] + values[grid.antipode(i)]) * T::lit(0.5))
            .collect();
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Arc<SphereGrid<T>>, f: impl Fn(&[T]) -> T) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Self::new(grid, values)
    }

    pub fn constant(grid: Arc<SphereGrid<T>>, c: T) -> Self {
        let values = vec![c; grid.len()];
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<SphereGrid<T>> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Value at the line through `dir`.
    pub fn eval(&self, dir: &[T]) -> T {
        self.grid.interpolate(&self.values, dir)
    }

    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    /// Surface-measure average.
    pub fn mean(&self) -> T {
        let num: Vec<T> = (0..self.values.len()).map(|i| self.values[i] * self.grid.weight(i)).collect();
        pairwise_sum(&num) / self.grid.total_weight()
    }

    /// `Σ_x |<x, ĝ>| f(x) ν(x)` with `ν` half the surface measure.
    pub fn cosine_transform(&self, g: &[T]) -> T {
        let r = norm2(g);
        let terms: Vec<T> = (0..self.values.len())
            .map(|i| dot(self.grid.point(i), g).abs() / r * self.values[i] * self.grid.weight(i))
            .collect();
        pairwise_sum(&terms) * T::lit(0.5)
    }

    pub fn scaled(&self, c: T) -> Self {
        Self { grid: self.grid.clone(), values: self.values.iter().map(|&v| v * c).collect() }
    }

    /// `a f + b g` for densities on the same grid.
    pub fn combine(&self, a: T, other: &Self, b: T) -> Result<Self> {
        if !Arc::ptr_eq(&self.grid, &other.grid) && self.grid.len() != other.grid.len() {
            return Err(invalid("densities live on different grids"));
        }
        let values = self.values.iter().zip(&other.values).map(|(&x, &y)| a * x + b * y).collect();
        Ok(Self { grid: self.grid.clone(), values })
    }

    /// CSV rows `x_1, ..., x_d, value`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let d = self.dim();
        let mut header: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
        header.push("value".into());
        w.write_record(&header)?;
        for i in 0..self.values.len() {
            let mut row: Vec<String> = self.grid.point(i).iter().map(|v| format!("{:.17e}", v.as_f64())).collect();
            row.push(format!("{:.17e}", self.values[i].as_f64()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_transforms() {
        let c = GrassmannDensity::constant(Arc::new(SphereGrid::<f64>::circle(4096).unwrap()), 1.5);
        assert!((c.cosine_transform(&[0.3, 0.7]) - 3.0).abs() < 1e-5);
        let s = GrassmannDensity::constant(Arc::new(SphereGrid::<f64>::icosahedral(5).unwrap()), 2.0);
        assert!((s.cosine_transform(&[0.3, -0.7, 0.2]) - 2.0 * PI).abs() < 1e-3);
    }

    #[test]
    fn linearity() {
        let g = Arc::new(SphereGrid::<f64>::icosahedral(2).unwrap());
        let f1 = GrassmannDensity::from_fn(g.clone(), |x| x[0] * x[0]).unwrap();
        let f2 = GrassmannDensity::from_fn(g.clone(), |x| 1.0 + x[1] * x[2]).unwrap();
        let comb = f1.combine(2.0, &f2, -0.5).unwrap();
        let dir = [0.1, 0.2, 0.9];
        let lhs = comb.cosine_transform(&dir);
        let rhs = 2.0 * f1.cosine_transform(&dir) - 0.5 * f2.cosine_transform(&dir);
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn evenness_is_enforced() {
        let g = Arc::new(SphereGrid::<f64>::circle(16).unwrap());
        let f = GrassmannDensity::from_fn(g.clone(), |x| x[0]).unwrap();
        for i in 0..g.len() {
            assert_eq!(f.values()[i], f.values()[g.antipode(i)]);
        }
    }
}
