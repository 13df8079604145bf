//! Counting solutions of random systems on a chart, Monte-Carlo estimation
//! of their average number and the comparison with mixed volumes.
//!
//! The solver is `f64`-only.

mod count;
mod scenario;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use count::{count_solutions, RootCount, RootCounter, SystemSample};
pub use scenario::{
    default_support_resolution, default_symmetrize_resolution, parse_norm, ChartConfig, FactorConfig, Family,
    NormConfig, ScenarioConfig,
};

use crate::banach::{NaturalSampler, NormKind};
use crate::crofton::{zonoid_check, CroftonSampler};
use crate::error::{invalid, Error, Result};
use crate::fspace::{bbody_field, BBodyField, FunctionSpaceOnX, ManifoldChart, Metric, Region};
use crate::mixedvol::finsler_mixed_volume;
use crate::montecarlo::{mean_and_error, run_batches};
use crate::scalar::norm2;

/// Which identity is checked: Crofton samplers against the original
/// bodies, or natural samplers against the symmetrized bodies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "theorem-1")]
    Theorem1,
    #[default]
    #[serde(rename = "theorem-2")]
    Theorem2,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Theorem1 => "theorem-1",
            Mode::Theorem2 => "theorem-2",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theorem-1" => Ok(Mode::Theorem1),
            "theorem-2" => Ok(Mode::Theorem2),
            _ => Err(Error::Config(format!("unknown mode `{s}`"))),
        }
    }
}

/// A system of `n = dim X` random equations on a region `U`.
#[derive(Debug, Clone)]
pub struct Problem {
    name: String,
    mode: Mode,
    region: Region<f64>,
    spaces: Vec<Arc<FunctionSpaceOnX<f64>>>,
    symmetrize_resolution: Option<usize>,
    expected: Option<f64>,
}

impl Problem {
    pub fn new(
        name: &str,
        mode: Mode,
        region: Region<f64>,
        spaces: Vec<Arc<FunctionSpaceOnX<f64>>>,
        symmetrize_resolution: Option<usize>,
        expected: Option<f64>,
    ) -> Result<Self> {
        // Validates the chart, the factor count and the region.
        RootCounter::new(spaces.clone(), region.clone())?;
        let chart = spaces[0].chart();
        if !chart.contains(&region.intervals().iter().map(|p| p.0).collect::<Vec<_>>())
            || !chart.contains(&region.intervals().iter().map(|p| p.1).collect::<Vec<_>>())
        {
            return Err(invalid("region leaves the chart"));
        }
        Ok(Self { name: name.to_string(), mode, region, spaces, symmetrize_resolution, expected })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn region(&self) -> &Region<f64> {
        &self.region
    }

    pub fn spaces(&self) -> &[Arc<FunctionSpaceOnX<f64>>] {
        &self.spaces
    }

    pub fn chart(&self) -> &Arc<ManifoldChart<f64>> {
        self.spaces[0].chart()
    }

    pub fn expected(&self) -> Option<f64> {
        self.expected
    }

    /// Symmetrization resolution of factor `i`.
    pub fn symmetrize_resolution(&self, i: usize) -> usize {
        self.symmetrize_resolution.unwrap_or_else(|| default_symmetrize_resolution(self.spaces[i].dim()))
    }

    pub fn with_region(&self, region: Region<f64>) -> Result<Self> {
        Self::new(&self.name, self.mode, region, self.spaces.clone(), self.symmetrize_resolution, None)
    }

    pub fn with_mode(&self, mode: Mode) -> Self {
        Self { mode, ..self.clone() }
    }

    /// The same system on the chart with another metric.
    pub fn with_metric(&self, metric: Metric<f64>) -> Result<Self> {
        let chart = Arc::new(self.chart().as_ref().clone().with_metric(metric)?);
        let spaces = self
            .spaces
            .iter()
            .map(|s| FunctionSpaceOnX::new(chart.clone(), s.basis().to_vec(), s.norm().clone()).map(Arc::new))
            .collect::<Result<Vec<_>>>()?;
        Self::new(&self.name, self.mode, self.region.clone(), spaces, self.symmetrize_resolution, self.expected)
    }

    /// Offset ranges `±1.01 · max_U |θ_i|`, with the dual norm of `V_i` in
    /// theorem-2 mode and the Euclidean norm in theorem-1 mode; these bound
    /// `<x_i, θ_i(s)>` for every unit `x_i` the sampler can produce.
    pub fn t_ranges(&self) -> Result<Vec<(f64, f64)>> {
        let iv = self.region.intervals();
        let nodes = |&(a, b): &(f64, f64), m: usize| -> Vec<f64> {
            (0..=m).map(|k| a + (b - a) * k as f64 / m as f64).collect()
        };
        let points: Vec<Vec<f64>> = match iv.len() {
            1 => nodes(&iv[0], 1024).into_iter().map(|s| vec![s]).collect(),
            _ => {
                let (xs, ys) = (nodes(&iv[0], 96), nodes(&iv[1], 96));
                xs.iter().flat_map(|&x| ys.iter().map(move |&y| vec![x, y])).collect()
            }
        };
        self.spaces
            .iter()
            .map(|sp| {
                let mut theta = vec![0.0; sp.dim()];
                let mut m = 0.0f64;
                for p in &points {
                    sp.theta_into(p, &mut theta);
                    let r = match self.mode {
                        Mode::Theorem2 => sp.norm().dual(&theta),
                        Mode::Theorem1 => norm2(&theta),
                    };
                    m = m.max(r);
                }
                if !(m > 0.0) || !m.is_finite() {
                    return Err(invalid("θ vanishes on the region"));
                }
                Ok((-1.01 * m, 1.01 * m))
            })
            .collect()
    }

    /// B-body fields entering the mixed-volume side: symmetrized in
    /// theorem-2 mode, original in theorem-1 mode.
    pub fn fields(&self) -> Result<Vec<BBodyField<f64>>> {
        self.spaces
            .iter()
            .enumerate()
            .map(|(i, sp)| {
                let res = match self.mode {
                    Mode::Theorem2 => Some(self.symmetrize_resolution(i)),
                    Mode::Theorem1 => None,
                };
                bbody_field(sp.clone(), res)
            })
            .collect()
    }
}

enum FactorSampler {
    Natural(NaturalSampler<f64>),
    Crofton(CroftonSampler<f64>),
}

impl FactorSampler {
    fn new(space: &FunctionSpaceOnX<f64>, mode: Mode, t_range: (f64, f64)) -> Result<Self> {
        let norm = space.norm();
        match mode {
            Mode::Theorem2 => Ok(Self::Natural(NaturalSampler::new(norm, t_range)?)),
            Mode::Theorem1 => {
                if matches!(norm.kind(), NormKind::SupportSampled { .. }) {
                    return Err(Error::Unsupported(
                        "theorem-1 mode needs a Euclidean or lp coefficient norm with an exact Crofton density".into(),
                    ));
                }
                if !matches!(norm.kind(), NormKind::Euclidean { .. }) && norm.dim() > 1 {
                    let z = zonoid_check(norm)?;
                    if !z.is_zonoid {
                        return Err(Error::Unsupported(format!(
                            "theorem-1 mode needs a zonoid; Crofton density has minimum {:.3e}",
                            z.min_density
                        )));
                    }
                }
                Ok(Self::Crofton(CroftonSampler::for_space(norm, t_range)?))
            }
        }
    }

    fn sample_into(&self, rng: &mut rand_chacha::ChaCha8Rng, x: &mut [f64]) -> (f64, f64) {
        match self {
            Self::Natural(s) => s.sample_into(rng, x),
            Self::Crofton(s) => s.sample_into(rng, x),
        }
    }
}

/// One Monte-Carlo record: combined weight and root count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleRecord {
    pub weight: f64,
    pub count: usize,
    pub uncertain: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
    pub t_ranges: Vec<(f64, f64)>,
    /// Samples whose root count carries the uncertainty flag.
    pub uncertain_samples: usize,
    /// Reference value: the mixed-volume side in a verification, otherwise
    /// the scenario's expected value when it has one.
    pub comparison: Option<f64>,
    pub z_score: Option<f64>,
    #[serde(skip)]
    pub records: Vec<SampleRecord>,
}

/// Monte-Carlo estimate of the average number of solutions in `U`.
pub fn estimate_average(problem: &Problem, samples: usize, seed: u64) -> Result<EstimateReport> {
    estimate_average_with(problem, samples, seed, false)
}

/// As [`estimate_average`], optionally keeping the per-sample records.
pub fn estimate_average_with(problem: &Problem, samples: usize, seed: u64, records: bool) -> Result<EstimateReport> {
    if samples == 0 {
        return Err(invalid("at least one sample is needed"));
    }
    let t_ranges = problem.t_ranges()?;
    let samplers = problem
        .spaces
        .iter()
        .zip(&t_ranges)
        .map(|(sp, &tr)| FactorSampler::new(sp, problem.mode, tr))
        .collect::<Result<Vec<_>>>()?;
    let counter = RootCounter::new(problem.spaces.clone(), problem.region.clone())?;
    let dims: Vec<usize> = problem.spaces.iter().map(|s| s.dim()).collect();
    let batches = run_batches(samples, seed, |rng, len| {
        let mut sample = SystemSample {
            coefficients: dims.iter().map(|&d| vec![0.0; d]).collect(),
            offsets: vec![0.0; dims.len()],
            weight: 1.0,
        };
        (0..len)
            .map(|_| {
                sample.weight = 1.0;
                for (i, s) in samplers.iter().enumerate() {
                    let (t, w) = s.sample_into(rng, &mut sample.coefficients[i]);
                    sample.offsets[i] = t;
                    sample.weight *= w;
                }
                let (count, uncertain) = counter.count(&sample);
                SampleRecord { weight: sample.weight, count, uncertain }
            })
            .collect()
    });
    let all: Vec<SampleRecord> = batches.concat();
    let values: Vec<f64> = all.iter().map(|r| r.weight * r.count as f64).collect();
    let (estimate, std_error) = mean_and_error(&values);
    let comparison = problem.expected;
    Ok(EstimateReport {
        estimate,
        std_error,
        samples,
        seed,
        t_ranges,
        uncertain_samples: all.iter().filter(|r| r.uncertain).count(),
        comparison,
        z_score: comparison.map(|c| z_score(estimate - c, std_error)),
        records: if records { all } else { Vec::new() },
    })
}

fn z_score(diff: f64, sigma: f64) -> f64 {
    if sigma > 0.0 {
        diff / sigma
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY.copysign(diff)
    }
}

/// `n! / 2^n`.
pub fn bkk_factor(n: usize) -> f64 {
    (1..=n).map(|k| k as f64 / 2.0).product()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationRecord {
    pub scenario: String,
    pub mode: Mode,
    pub lhs: EstimateReport,
    /// `(n!/2^n) · V(B_1, ..., B_n)` over `U`.
    pub rhs: f64,
    pub rhs_tolerance: f64,
    pub rhs_converged: bool,
    pub grid: usize,
    pub difference: f64,
    pub z_score: f64,
    pub expected: Option<f64>,
    /// `|LHS - RHS| <= 3 σ + RHS tolerance`.
    pub pass: bool,
}

/// Both sides of the averaging identity and the 3σ comparison.
pub fn verify_bkk(problem: &Problem, samples: usize, grid: usize, seed: u64) -> Result<VerificationRecord> {
    verify_bkk_with(problem, samples, grid, seed, false)
}

pub fn verify_bkk_with(
    problem: &Problem,
    samples: usize,
    grid: usize,
    seed: u64,
    records: bool,
) -> Result<VerificationRecord> {
    let mut lhs = estimate_average_with(problem, samples, seed, records)?;
    let fields = problem.fields()?;
    let fv = finsler_mixed_volume(&fields, &problem.region, grid)?;
    let c = bkk_factor(problem.spaces.len());
    let (rhs, rhs_tolerance) = (c * fv.value, c * fv.tolerance);
    let difference = lhs.estimate - rhs;
    let z = z_score(difference, lhs.std_error);
    lhs.comparison = Some(rhs);
    lhs.z_score = Some(z);
    Ok(VerificationRecord {
        scenario: problem.name.clone(),
        mode: problem.mode,
        rhs,
        rhs_tolerance,
        rhs_converged: fv.converged,
        grid,
        difference,
        z_score: z,
        expected: problem.expected,
        pass: difference.abs() <= 3.0 * lhs.std_error + rhs_tolerance,
        lhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn builtin(name: &str) -> Problem {
        ScenarioConfig::builtin(name).unwrap().to_problem().unwrap()
    }

    #[test]
    fn factor() {
        assert_eq!(bkk_factor(1), 0.5);
        assert_eq!(bkk_factor(2), 0.5);
        assert_eq!(bkk_factor(3), 0.75);
    }

    #[test]
    fn circle_estimate() {
        let p = builtin("circle-euclidean");
        let r = estimate_average(&p, 20_000, 5).unwrap();
        assert!((r.estimate - TAU).abs() < 4.0 * r.std_error, "{r:?}");
        assert!(r.std_error > 0.0);
        assert_eq!(r.t_ranges, vec![(-1.01, 1.01)]);
        assert_eq!(estimate_average(&p, 20_000, 5).unwrap(), r);
    }

    #[test]
    fn circle_verification() {
        let v = verify_bkk(&builtin("circle-euclidean"), 20_000, 200, 3).unwrap();
        assert!(v.pass, "{v:?}");
        assert!((v.rhs - TAU).abs() < 1e-4, "{}", v.rhs);
        let half = verify_bkk(&builtin("circle-half"), 20_000, 200, 3).unwrap();
        assert!(half.pass && (half.rhs - PI).abs() < 1e-3, "{half:?}");
    }

    #[test]
    fn theorem1_matches_theorem2_on_euclidean() {
        let p = builtin("circle-euclidean");
        let a = verify_bkk(&p.with_mode(Mode::Theorem1), 20_000, 200, 9).unwrap();
        assert!(a.pass, "{a:?}");
        assert!((a.rhs - TAU).abs() < 1e-9);
        let sq = builtin("circle-smooth-linf").with_mode(Mode::Theorem1);
        assert!(matches!(estimate_average(&sq, 10, 1), Err(Error::Unsupported(_))));
    }
}
