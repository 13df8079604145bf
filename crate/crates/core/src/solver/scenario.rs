use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::banach::NormSpec;
use crate::error::{Error, Result};
use crate::fspace::{BasisFunction, FunctionSpaceOnX, ManifoldChart, Metric, Region};

use super::{Mode, Problem};

fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// A scenario file: chart, region, one function space per equation and the
/// Monte-Carlo / quadrature budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub chart: ChartConfig,
    /// Box `U` inside the chart; the whole chart when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<Vec<[f64; 2]>>,
    pub factors: Vec<FactorConfig>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub norms: BTreeMap<String, NormConfig>,
    /// Sphere resolution used for zonoid symmetrization, per coefficient
    /// dimension default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetrize_resolution: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<f64>,
}

fn default_samples() -> usize {
    100_000
}

fn default_grid() -> usize {
    1000
}

fn default_seed() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartConfig {
    /// `circle`, `torus` or `box`; explicit intervals override the preset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intervals: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub periodic: Option<Vec<bool>>,
    /// Constant metric, row by row.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Trig,
    Poly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorConfig {
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequencies: Option<Vec<Vec<i32>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degrees: Option<Vec<Vec<u32>>>,
    /// Norm string such as `euclidean:2` or the name of a `[norms.*]` table.
    pub norm: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormConfig {
    /// `euclidean`, `lp`, `linf`, `linf-smooth`, `l1` or `support-csv`.
    pub kind: String,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
}

impl NormConfig {
    pub fn build(&self) -> Result<NormSpec<f64>> {
        let res = self.resolution.unwrap_or(default_support_resolution(self.dim));
        let norm = match self.kind.as_str() {
            "euclidean" => match &self.matrix {
                Some(m) => NormSpec::euclidean_matrix(self.dim, m.clone())?,
                None => NormSpec::euclidean(self.dim)?,
            },
            "lp" => NormSpec::lp(self.dim, self.p.ok_or_else(|| config("lp norm needs `p`"))?)?,
            "linf" => NormSpec::linf_sampled(self.dim, res)?,
            "linf-smooth" => {
                NormSpec::smoothed_linf(self.dim, self.eps.ok_or_else(|| config("linf-smooth needs `eps`"))?, res)?
            }
            "l1" => NormSpec::l1_sampled(self.dim, res)?,
            "support-csv" => {
                NormSpec::from_support_csv(self.dim, self.path.as_ref().ok_or_else(|| config("support-csv needs `path`"))?)?
            }
            other => return Err(config(format!("unknown norm kind `{other}`"))),
        };
        match self.scale {
            Some(c) => norm.scaled(c),
            None => Ok(norm),
        }
    }
}

/// Support-grid resolution for sampled norms: 256 directions on the circle,
/// icosahedral level 3 on `S^2`.
pub fn default_support_resolution(dim: usize) -> usize {
    if dim == 3 {
        3
    } else {
        256
    }
}

/// Sphere resolution for symmetrization: 2048 directions on the circle,
/// icosahedral level 5 on `S^2`, 24 angles on `S^3`.
pub fn default_symmetrize_resolution(dim: usize) -> usize {
    match dim {
        2 => 2048,
        3 => 5,
        4 => 24,
        _ => 1,
    }
}

/// Parses `euclidean:D`, `lp:P:D`, `linf:D`, `linf-smooth:EPS:D` or `l1:D`.
pub fn parse_norm(spec: &str, resolution: Option<usize>) -> Result<NormSpec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| config(format!("bad number `{s}` in norm `{spec}`")));
    let dim = |s: &str| s.trim().parse::<usize>().map_err(|_| config(format!("bad dimension `{s}` in norm `{spec}`")));
    let cfg = match parts.as_slice() {
        ["euclidean", d] => NormConfig::simple("euclidean", dim(d)?),
        ["lp", p, d] => NormConfig { p: Some(num(p)?), ..NormConfig::simple("lp", dim(d)?) },
        ["linf", d] => NormConfig::simple("linf", dim(d)?),
        ["l1", d] => NormConfig::simple("l1", dim(d)?),
        ["linf-smooth", e, d] => NormConfig { eps: Some(num(e)?), ..NormConfig::simple("linf-smooth", dim(d)?) },
        _ => return Err(config(format!("cannot parse norm `{spec}`"))),
    };
    NormConfig { resolution, ..cfg }.build()
}

impl NormConfig {
    fn simple(kind: &str, dim: usize) -> Self {
        Self { kind: kind.into(), dim, p: None, matrix: None, eps: None, resolution: None, path: None, scale: None }
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| config(e.to_string()))
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| config(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(m) => config(format!("{}: {m}", path.as_ref().display())),
            other => other,
        })
    }

    pub fn builtin(name: &str) -> Result<Self> {
        BUILTINS
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, text)| Self::from_toml_str(text))
            .unwrap_or_else(|| Err(config(format!("no built-in scenario `{name}`"))))
    }

    pub fn builtin_names() -> Vec<&'static str> {
        BUILTINS.iter().map(|(n, _)| *n).collect()
    }

    fn chart(&self) -> Result<ManifoldChart<f64>> {
        let c = &self.chart;
        let tau = std::f64::consts::TAU;
        let (mut intervals, mut periodic) = match c.kind.as_deref() {
            Some("circle") => (vec![(0.0, tau)], vec![true]),
            Some("torus") => (vec![(0.0, tau); 2], vec![true; 2]),
            Some("box") => {
                let n = c.dim.unwrap_or(1);
                (vec![(0.0, 1.0); n], vec![false; n])
            }
            Some(other) => return Err(config(format!("unknown chart kind `{other}`"))),
            None => (Vec::new(), Vec::new()),
        };
        if let Some(iv) = &c.intervals {
            intervals = iv.iter().map(|p| (p[0], p[1])).collect();
            periodic = vec![false; intervals.len()];
        }
        if let Some(p) = &c.periodic {
            periodic = p.clone();
        }
        if intervals.is_empty() {
            return Err(config("chart needs `kind` or `intervals`"));
        }
        let mut chart = ManifoldChart::new(intervals, periodic)?;
        if let Some(rows) = &c.metric {
            let n = chart.dim();
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(config(format!("metric must be {n}×{n}")));
            }
            chart = chart.with_metric(Metric::Constant(rows.concat()))?;
        }
        Ok(chart)
    }

    fn norm(&self, spec: &str) -> Result<NormSpec<f64>> {
        match self.norms.get(spec) {
            Some(cfg) => cfg.build(),
            None => parse_norm(spec, None),
        }
    }

    /// Validates the config and builds the numerical problem.
    pub fn to_problem(&self) -> Result<Problem> {
        if self.samples == 0 {
            return Err(config("samples must be positive"));
        }
        let chart = Arc::new(self.chart()?);
        let n = chart.dim();
        if self.factors.len() != n {
            return Err(config(format!("{} factors on a chart of dimension {n}", self.factors.len())));
        }
        let mut spaces = Vec::with_capacity(n);
        for (i, f) in self.factors.iter().enumerate() {
            let basis = match f.family {
                Family::Trig => BasisFunction::trig_family(
                    f.frequencies.as_ref().ok_or_else(|| config(format!("factor {i}: trig family needs `frequencies`")))?,
                ),
                Family::Poly => BasisFunction::monomial_family(
                    f.degrees.as_ref().ok_or_else(|| config(format!("factor {i}: poly family needs `degrees`")))?,
                ),
            };
            let norm = self.norm(&f.norm)?;
            spaces.push(Arc::new(FunctionSpaceOnX::new(chart.clone(), basis, norm)?));
        }
        let region = match &self.region {
            Some(r) => Region::new(&chart, r.iter().map(|p| (p[0], p[1])).collect())?,
            None => Region::full(&chart),
        };
        Problem::new(&self.name, self.mode, region, spaces, self.symmetrize_resolution, self.expected)
    }
}

const BUILTINS: &[(&str, &str)] = &[
    (
        "circle-euclidean",
        r#"
name = "circle-euclidean"
chart = { kind = "circle" }
factors = [{ family = "trig", frequencies = [[1]], norm = "euclidean:2" }]
expected = 6.283185307179586
"#,
    ),
    (
        "circle-k2",
        r#"
name = "circle-k2"
chart = { kind = "circle" }
factors = [{ family = "trig", frequencies = [[2]], norm = "euclidean:2" }]
expected = 12.566370614359172
"#,
    ),
    (
        "circle-k3",
        r#"
name = "circle-k3"
chart = { kind = "circle" }
factors = [{ family = "trig", frequencies = [[3]], norm = "euclidean:2" }]
expected = 18.84955592153876
"#,
    ),
    (
        "circle-half",
        r#"
name = "circle-half"
chart = { kind = "circle" }
region = [[0.0, 3.141592653589793]]
factors = [{ family = "trig", frequencies = [[1]], norm = "euclidean:2" }]
expected = 3.141592653589793
"#,
    ),
    (
        "circle-euclidean-thm1",
        r#"
name = "circle-euclidean-thm1"
mode = "theorem-1"
chart = { kind = "circle" }
factors = [{ family = "trig", frequencies = [[1]], norm = "euclidean:2" }]
expected = 6.283185307179586
"#,
    ),
    (
        "circle-affine",
        r#"
name = "circle-affine"
chart = { kind = "circle" }
factors = [{ family = "trig", frequencies = [[0], [1]], norm = "euclidean:3" }]
expected = 6.283185307179586
"#,
    ),
    (
        "circle-smooth-linf",
        r#"
name = "circle-smooth-linf"
chart = { kind = "circle" }
factors = [{ family = "trig", frequencies = [[1]], norm = "smooth-square" }]

[norms.smooth-square]
kind = "linf-smooth"
dim = 2
eps = 0.2
resolution = 512
"#,
    ),
    (
        "torus-decoupled",
        r#"
name = "torus-decoupled"
samples = 200000
grid = 64
chart = { kind = "torus" }
factors = [
    { family = "trig", frequencies = [[1, 0]], norm = "euclidean:2" },
    { family = "trig", frequencies = [[0, 1]], norm = "euclidean:2" },
]
expected = 39.47841760435743
"#,
    ),
    (
        "torus-skew",
        r#"
name = "torus-skew"
samples = 200000
grid = 64
chart = { kind = "torus" }
factors = [
    { family = "trig", frequencies = [[1, 1]], norm = "euclidean:2" },
    { family = "trig", frequencies = [[1, -1]], norm = "euclidean:2" },
]
expected = 78.95683520871486
"#,
    ),
    (
        "box-affine",
        r#"
name = "box-affine"
samples = 200000
grid = 32
chart = { kind = "box", dim = 2 }
factors = [
    { family = "poly", degrees = [[0, 0], [1, 0], [0, 1]], norm = "euclidean:3" },
    { family = "poly", degrees = [[0, 0], [1, 0], [0, 1]], norm = "euclidean:3" },
]
expected = 1.5707963267948966
"#,
    ),
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_parse_and_build() {
        for name in ScenarioConfig::builtin_names() {
            let cfg = ScenarioConfig::builtin(name).unwrap();
            assert_eq!(cfg.name, name);
            let p = cfg.to_problem().unwrap();
            assert_eq!(p.spaces().len(), p.region().dim());
        }
    }

    #[test]
    fn config_errors() {
        assert!(matches!(ScenarioConfig::from_toml_str("name = 3"), Err(Error::Config(_))));
        let bad = r#"
name = "x"
chart = { kind = "circle" }
factors = [{ family = "trig", frequencies = [[1]], norm = "euclidean:3" }]
"#;
        assert!(ScenarioConfig::from_toml_str(bad).unwrap().to_problem().is_err());
        assert!(matches!(parse_norm("lp:x:2", None), Err(Error::Config(_))));
        assert!((parse_norm("linf:2", None).unwrap().dual(&[1.0, 1.0]) - 2.0).abs() < 1e-9);
    }
}
