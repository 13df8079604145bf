use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::linalg;
use crate::scalar::Real;

type MetricFn<T> = dyn Fn(&[T], &mut [T]) + Send + Sync;

/// Riemannian metric on the chart, as an `n × n` row-major matrix per point.
#[derive(Clone)]
pub enum Metric<T> {
    Identity,
    Constant(Vec<T>),
    Field(Arc<MetricFn<T>>),
}

impl<T> fmt::Debug for Metric<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Identity => write!(f, "Identity"),
            Metric::Constant(_) => write!(f, "Constant(..)"),
            Metric::Field(_) => write!(f, "Field(..)"),
        }
    }
}

/// A box-shaped chart of dimension 1 or 2; periodic coordinates model the
/// circle and the torus.
#[derive(Debug, Clone)]
pub struct ManifoldChart<T> {
    intervals: Vec<(T, T)>,
    periodic: Vec<bool>,
    metric: Metric<T>,
}

impl<T: Real> ManifoldChart<T> {
    pub fn new(intervals: Vec<(T, T)>, periodic: Vec<bool>) -> Result<Self> {
        let n = intervals.len();
        if !(1..=2).contains(&n) {
            return Err(invalid(format!("charts have dimension 1 or 2, got {n}")));
        }
        if periodic.len() != n {
            return Err(invalid("one periodicity flag per coordinate"));
        }
        for &(a, b) in &intervals {
            if !(b > a) || !a.is_finite() || !b.is_finite() {
                return Err(invalid(format!("degenerate chart interval [{a}, {b}]")));
            }
        }
        Ok(Self { intervals, periodic, metric: Metric::Identity })
    }

    /// `[0, 2π)`.
    pub fn circle() -> Self {
        Self::new(vec![(T::zero(), T::PI() * T::lit(2.0))], vec![true]).expect("valid chart")
    }

    /// `[0, 2π)^2`.
    pub fn torus() -> Self {
        let tau = T::PI() * T::lit(2.0);
        Self::new(vec![(T::zero(), tau); 2], vec![true; 2]).expect("valid chart")
    }

    pub fn unit_box(n: usize) -> Result<Self> {
        Self::new(vec![(T::zero(), T::one()); n], vec![false; n])
    }

    /// Installs a metric, checking symmetry and positive definiteness at a
    /// grid of sample points.
    pub fn with_metric(mut self, metric: Metric<T>) -> Result<Self> {
        let n = self.dim();
        if let Metric::Constant(m) = &metric {
            if m.len() != n * n {
                return Err(invalid(format!("metric needs {} entries", n * n)));
            }
        }
        self.metric = metric;
        let mut g = vec![T::zero(); n * n];
        for x in self.sample_points(5) {
            self.metric_at(&x, &mut g);
            if !linalg::is_symmetric(&g, n) || linalg::cholesky(&g, n).is_none() {
                return Err(invalid("metric must be symmetric positive definite"));
            }
        }
        Ok(self)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[(T, T)] {
        &self.intervals
    }

    pub fn periodic(&self) -> &[bool] {
        &self.periodic
    }

    pub fn metric(&self) -> &Metric<T> {
        &self.metric
    }

    pub fn metric_at(&self, x: &[T], out: &mut [T]) {
        let n = self.dim();
        match &self.metric {
            Metric::Identity => out.copy_from_slice(&linalg::identity::<T>(n)),
            Metric::Constant(m) => out.copy_from_slice(m),
            Metric::Field(f) => f(x, out),
        }
    }

    pub fn contains(&self, x: &[T]) -> bool {
        x.len() == self.dim()
            && x.iter().zip(&self.intervals).all(|(&v, &(a, b))| {
                let slack = (b - a) * T::lit(1e-12);
                v.is_finite() && v >= a - slack && v <= b + slack
            })
    }

    /// Euclidean diameter of the coordinate box.
    pub fn diameter(&self) -> T {
        self.intervals.iter().fold(T::zero(), |s, &(a, b)| s + (b - a) * (b - a)).sqrt()
    }

    fn sample_points(&self, per_axis: usize) -> Vec<Vec<T>> {
        let axis = |&(a, b): &(T, T)| -> Vec<T> {
            (0..per_axis).map(|i| a + (b - a) * T::lit((i as f64 + 0.5) / per_axis as f64)).collect()
        };
        match self.dim() {
            1 => axis(&self.intervals[0]).into_iter().map(|v| vec![v]).collect(),
            _ => {
                let (xs, ys) = (axis(&self.intervals[0]), axis(&self.intervals[1]));
                xs.iter().flat_map(|&x| ys.iter().map(move |&y| vec![x, y])).collect()
            }
        }
    }

    pub(crate) fn grid_points(&self, per_axis: usize) -> Vec<Vec<T>> {
        self.sample_points(per_axis)
    }
}

/// Box sub-domain `U` of a chart.
#[derive(Debug, Clone, PartialEq)]
pub struct Region<T> {
    intervals: Vec<(T, T)>,
}

impl<T: Real> Region<T> {
    pub fn full(chart: &ManifoldChart<T>) -> Self {
        Self { intervals: chart.intervals.clone() }
    }

    pub fn new(chart: &ManifoldChart<T>, intervals: Vec<(T, T)>) -> Result<Self> {
        if intervals.len() != chart.dim() {
            return Err(invalid("region dimension differs from the chart"));
        }
        for (&(a, b), &(lo, hi)) in intervals.iter().zip(&chart.intervals) {
            let slack = (hi - lo) * T::lit(1e-12);
            if !(b > a) || a < lo - slack || b > hi + slack {
                return Err(invalid(format!("region interval [{a}, {b}] is empty or leaves the chart [{lo}, {hi}]")));
            }
        }
        Ok(Self { intervals })
    }

    pub(crate) fn from_intervals(intervals: Vec<(T, T)>) -> Self {
        Self { intervals }
    }

    pub fn intervals(&self) -> &[(T, T)] {
        &self.intervals
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn contains(&self, x: &[T]) -> bool {
        x.iter().zip(&self.intervals).all(|(&v, &(a, b))| v >= a && v <= b)
    }

    /// `true` if the region spans a whole period of coordinate `axis`.
    pub fn wraps(&self, chart: &ManifoldChart<T>, axis: usize) -> bool {
        let (a, b) = self.intervals[axis];
        let (lo, hi) = chart.intervals[axis];
        let slack = (hi - lo) * T::lit(1e-12);
        chart.periodic[axis] && (a - lo).abs() <= slack && (b - hi).abs() <= slack
    }

    pub fn volume(&self) -> T {
        self.intervals.iter().fold(T::one(), |v, &(a, b)| v * (b - a))
    }

    /// Intersection, if non-empty.
    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let intervals: Vec<(T, T)> = self
            .intervals
            .iter()
            .zip(&other.intervals)
            .map(|(&(a, b), &(c, d))| (a.max(c), b.min(d)))
            .collect();
        intervals.iter().all(|&(a, b)| b > a).then_some(Self { intervals })
    }
}
