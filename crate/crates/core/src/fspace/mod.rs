//! Finite-dimensional spaces of smooth functions on a chart, the evaluation
//! map `θ_V` and the pulled-back B-body fields on the cotangent bundle.

mod basis;
mod chart;

use std::sync::Arc;

pub use basis::{BasisFunction, Phase};
pub use chart::{ManifoldChart, Metric, Region};

use crate::banach::{NormSpec, SymmetrizedNorm};
use crate::error::{invalid, Result};
use crate::linalg;
use crate::scalar::Real;

/// `V = span{f_1, ..., f_d}` on a chart together with a norm on the
/// coefficient space `R^d`.
#[derive(Debug, Clone)]
pub struct FunctionSpaceOnX<T> {
    chart: Arc<ManifoldChart<T>>,
    basis: Vec<BasisFunction>,
    norm: NormSpec<T>,
}

impl<T: Real> FunctionSpaceOnX<T> {
    /// Checks arities, the norm dimension and linear independence of the
    /// basis (full numerical rank of a sampled Gram matrix).
    pub fn new(chart: Arc<ManifoldChart<T>>, basis: Vec<BasisFunction>, norm: NormSpec<T>) -> Result<Self> {
        let n = chart.dim();
        let d = basis.len();
        if d == 0 {
            return Err(invalid("function space needs at least one basis function"));
        }
        if let Some(f) = basis.iter().find(|f| f.arity() != n) {
            return Err(invalid(format!("basis function {f:?} does not take {n} coordinates")));
        }
        if norm.dim() != d {
            return Err(invalid(format!("coefficient norm has dim {}, basis has {d} functions", norm.dim())));
        }
        let points = chart.grid_points(if n == 1 { 64 } else { 12 });
        let mut gram = vec![T::zero(); d * d];
        let mut v = vec![T::zero(); d];
        for x in &points {
            for (vj, f) in v.iter_mut().zip(&basis) {
                *vj = f.value(x);
            }
            for j in 0..d {
                for k in 0..d {
                    gram[j * d + k] = gram[j * d + k] + v[j] * v[k];
                }
            }
        }
        if linalg::psd_rank(&gram, d, T::lit(1e-10)) < d {
            return Err(invalid("basis functions are linearly dependent on the chart"));
        }
        Ok(Self { chart, basis, norm })
    }

    pub fn chart(&self) -> &Arc<ManifoldChart<T>> {
        &self.chart
    }

    pub fn basis(&self) -> &[BasisFunction] {
        &self.basis
    }

    pub fn norm(&self) -> &NormSpec<T> {
        &self.norm
    }

    /// Number of basis functions.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Dimension of the chart.
    pub fn chart_dim(&self) -> usize {
        self.chart.dim()
    }

    /// Same basis with another coefficient norm.
    pub fn with_norm(&self, norm: NormSpec<T>) -> Result<Self> {
        if norm.dim() != self.dim() {
            return Err(invalid("replacement norm has the wrong dimension"));
        }
        Ok(Self { chart: self.chart.clone(), basis: self.basis.clone(), norm })
    }

    /// `θ_V(x) = (f_1(x), ..., f_d(x))`.
    pub fn theta_map(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_point(x)?;
        let mut out = vec![T::zero(); self.dim()];
        self.theta_into(x, &mut out);
        Ok(out)
    }

    pub fn theta_into(&self, x: &[T], out: &mut [T]) {
        for (o, f) in out.iter_mut().zip(&self.basis) {
            *o = f.value(x);
        }
    }

    /// Rows `a_i = ∂_i θ_V(x)`, stored as `out[i * d + j] = ∂_i f_j(x)`.
    pub fn jacobian_into(&self, x: &[T], out: &mut [T]) {
        let (n, d) = (self.chart_dim(), self.dim());
        let mut g = [T::zero(); 2];
        for (j, f) in self.basis.iter().enumerate() {
            f.gradient(x, &mut g[..n]);
            for i in 0..n {
                out[i * d + j] = g[i];
            }
        }
    }

    /// `h_{𝓑(x)}(ξ) = ‖λ‖*` with `λ(f_j) = <∇f_j(x), ξ>`.
    pub fn pullback_body_support(&self, x: &[T], xi: &[T]) -> Result<T> {
        self.check_point(x)?;
        if xi.len() != self.chart_dim() || xi.iter().any(|v| !v.is_finite()) {
            return Err(invalid("tangent vector must be finite with one entry per chart coordinate"));
        }
        Ok(self.norm.dual(&self.covector(x, xi)))
    }

    fn covector(&self, x: &[T], xi: &[T]) -> Vec<T> {
        let (n, d) = (self.chart_dim(), self.dim());
        let mut a = vec![T::zero(); n * d];
        self.jacobian_into(x, &mut a);
        (0..d).map(|j| (0..n).fold(T::zero(), |s, i| s + xi[i] * a[i * d + j])).collect()
    }

    fn check_point(&self, x: &[T]) -> Result<()> {
        if !self.chart.contains(x) {
            return Err(invalid(format!("point {x:?} lies outside the chart")));
        }
        Ok(())
    }
}

/// Norm whose unit ball is pulled back to the cotangent fibers.
#[derive(Debug, Clone)]
pub enum FiberNorm<T> {
    Original,
    Symmetrized(Arc<SymmetrizedNorm<T>>),
}

/// The field `x ↦ 𝓑(x) ⊂ T*_x X`, given by support functions.
#[derive(Debug, Clone)]
pub struct BBodyField<T> {
    space: Arc<FunctionSpaceOnX<T>>,
    fiber: FiberNorm<T>,
}

impl<T: Real> BBodyField<T> {
    pub fn new(space: Arc<FunctionSpaceOnX<T>>, fiber: FiberNorm<T>) -> Result<Self> {
        if let FiberNorm::Symmetrized(s) = &fiber {
            if s.base().dim() != space.dim() {
                return Err(invalid("symmetrized norm does not match the coefficient space"));
            }
        }
        Ok(Self { space, fiber })
    }

    pub fn space(&self) -> &Arc<FunctionSpaceOnX<T>> {
        &self.space
    }

    pub fn fiber_norm(&self) -> &FiberNorm<T> {
        &self.fiber
    }

    pub fn is_symmetrized(&self) -> bool {
        matches!(self.fiber, FiberNorm::Symmetrized(_))
    }

    /// Support function of the coefficient ball, evaluated on `V*`.
    pub fn coefficient_support(&self, lambda: &[T]) -> T {
        match &self.fiber {
            FiberNorm::Original => self.space.norm.dual(lambda),
            FiberNorm::Symmetrized(s) => s.h_symm(lambda),
        }
    }

    /// `h_{𝓑(x)}(ξ)`.
    pub fn support(&self, x: &[T], xi: &[T]) -> Result<T> {
        self.space.check_point(x)?;
        if xi.len() != self.space.chart_dim() {
            return Err(invalid("tangent vector has the wrong length"));
        }
        Ok(self.coefficient_support(&self.space.covector(x, xi)))
    }

    /// `h(ξ) + h(-ξ)`: width of the fiber in direction `ξ`.
    pub fn fiber_width(&self, x: &[T], xi: &[T]) -> Result<T> {
        let neg: Vec<T> = xi.iter().map(|&v| -v).collect();
        Ok(self.support(x, xi)? + self.support(x, &neg)?)
    }
}

/// Pulls back the coefficient ball; with `symmetrize = Some(resolution)` the
/// norm is first replaced by its zonoid symmetrization.
pub fn bbody_field<T: Real>(space: Arc<FunctionSpaceOnX<T>>, symmetrize: Option<usize>) -> Result<BBodyField<T>> {
    let fiber = match symmetrize {
        None => FiberNorm::Original,
        Some(res) => FiberNorm::Symmetrized(Arc::new(SymmetrizedNorm::new(space.norm(), res)?)),
    };
    BBodyField::new(space, fiber)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle_space(k: i32) -> FunctionSpaceOnX<f64> {
        FunctionSpaceOnX::new(
            Arc::new(ManifoldChart::circle()),
            BasisFunction::trig_family(&[vec![k]]),
            NormSpec::euclidean(2).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn theta_examples() {
        let s = circle_space(1);
        let th = s.theta_map(&[0.7]).unwrap();
        assert!((th[0] - 0.7f64.cos()).abs() < 1e-15 && (th[1] - 0.7f64.sin()).abs() < 1e-15);
        assert!(s.theta_map(&[7.0]).is_err());

        let aff = FunctionSpaceOnX::new(
            Arc::new(ManifoldChart::unit_box(1).unwrap()),
            BasisFunction::monomial_family(&[vec![0], vec![1]]),
            NormSpec::euclidean(2).unwrap(),
        )
        .unwrap();
        assert_eq!(aff.theta_map(&[0.5]).unwrap(), vec![1.0, 0.5]);
    }

    #[test]
    fn dependent_basis_is_rejected() {
        let basis = vec![
            BasisFunction::Trig { freq: vec![1], phase: Phase::Cos },
            BasisFunction::Trig { freq: vec![-1], phase: Phase::Cos },
        ];
        let r = FunctionSpaceOnX::<f64>::new(Arc::new(ManifoldChart::circle()), basis, NormSpec::euclidean(2).unwrap());
        assert!(r.is_err());
    }

    #[test]
    fn fiber_supports() {
        for k in 1..=3 {
            let s = circle_space(k);
            for t in [0.0, 1.1, 4.0] {
                let h = s.pullback_body_support(&[t], &[1.0]).unwrap();
                assert!((h - k as f64).abs() < 1e-12);
            }
        }
        let single = FunctionSpaceOnX::new(
            Arc::new(ManifoldChart::circle()),
            vec![BasisFunction::Trig { freq: vec![1], phase: Phase::Cos }],
            NormSpec::euclidean(1).unwrap(),
        )
        .unwrap();
        assert_eq!(single.pullback_body_support(&[0.0], &[1.0]).unwrap(), 0.0);
    }

    #[test]
    fn field_scaling_and_symmetrization() {
        let s = Arc::new(circle_space(1));
        let f = bbody_field(s.clone(), None).unwrap();
        assert!((f.fiber_width(&[2.0], &[1.0]).unwrap() - 2.0).abs() < 1e-12);
        let doubled = Arc::new(s.with_norm(s.norm().scaled(2.0).unwrap()).unwrap());
        let g = bbody_field(doubled, None).unwrap();
        assert!((g.fiber_width(&[2.0], &[1.0]).unwrap() - 1.0).abs() < 1e-12);
        let sym = bbody_field(s, Some(2048)).unwrap();
        for t in [0.0, 0.3, 2.5] {
            let a = f.support(&[t], &[1.0]).unwrap();
            let b = sym.support(&[t], &[1.0]).unwrap();
            assert!((a - b).abs() < 1e-3);
        }
    }
}
