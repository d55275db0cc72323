//! The job configuration: one JSON document naming a chart, the connection
//! data and the verification parameters.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use fedosov_core::algebroid::{catalogue, ChartJson};
use fedosov_core::fedosov::{CurvatureClass, Gamma};
use fedosov_core::text::{parse_poly, parse_series};
use fedosov_core::{AlgebroidChart, Error};
use serde::Deserialize;

use crate::Failure;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ChartSpec {
    Catalogue {
        catalogue: String,
        #[serde(default)]
        params: Vec<usize>,
    },
    Inline {
        inline: ChartJson,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Samples {
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default = "default_degree")]
    pub degree: u32,
}

impl Default for Samples {
    fn default() -> Self {
        Samples {
            count: default_count(),
            degree: default_degree(),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorSpec {
    pub hbar_order: Option<i32>,
    pub degree_bound: Option<u32>,
}

/// The second connection of a `gauge` run. Unset fields fall back to the
/// first connection's data.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeSpec {
    pub connection: Option<PathBuf>,
    pub gamma: Option<Vec<Vec<Vec<String>>>>,
    pub theta: Option<BTreeMap<String, String>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusSpec {
    #[serde(default = "one")]
    pub n: usize,
    #[serde(default = "three")]
    pub max_freq: i32,
    #[serde(default = "three")]
    pub terms: usize,
    #[serde(default = "default_count")]
    pub samples: usize,
}

impl Default for TorusSpec {
    fn default() -> Self {
        TorusSpec {
            n: 1,
            max_freq: 3,
            terms: 3,
            samples: default_count(),
        }
    }
}

fn default_count() -> usize {
    20
}
fn default_degree() -> u32 {
    3
}
fn default_order() -> usize {
    6
}
fn one() -> usize {
    1
}
fn three<T: From<u8>>() -> T {
    T::from(3)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub chart: ChartSpec,
    /// `gamma[i][a][b]`: the linear connection matrix along `e_i`.
    #[serde(default)]
    pub gamma: Option<Vec<Vec<Vec<String>>>>,
    /// Perturbation added to `(iħ)⁻¹ω`, keyed by 1-based form index `"i,j"`.
    #[serde(default)]
    pub theta: BTreeMap<String, String>,
    #[serde(default = "default_order")]
    pub order: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub samples: Samples,
    #[serde(default)]
    pub tensor: TensorSpec,
    /// A `build` artifact to use instead of constructing the connection.
    #[serde(default)]
    pub connection: Option<PathBuf>,
    #[serde(default)]
    pub gauge: GaugeSpec,
    #[serde(default)]
    pub torus: TorusSpec,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

pub struct Job {
    pub config: JobConfig,
    pub base_dir: PathBuf,
    pub out_dir: PathBuf,
}

pub struct Overrides {
    pub order: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Turns a core error at a config location into a failure. Parse errors
/// carry the field path and the character offset inside the string.
pub fn located(at: &str, e: Error) -> Failure {
    match e {
        Error::Parse { pos, msg } => usage(format!("{at}: parse error at offset {pos}: {msg}")),
        Error::UnknownVariable(v) => usage(format!("{at}: unknown variable `{v}`")),
        Error::HbarUnderflow(k) => usage(format!("{at}: hbar exponent {k} is below -1")),
        Error::Json(m) => usage(format!("{at}: {m}")),
        Error::UnknownCatalogue(c) => usage(format!("{at}: unknown catalogue entry `{c}`")),
        other => Failure::Math(format!("{at}: {other}")),
    }
}

pub fn load(path: &Path, o: Overrides) -> Result<Job, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let mut config: JobConfig = serde_json::from_str(&text).map_err(|e| {
        usage(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column()))
    })?;
    if let Some(n) = o.order {
        config.order = n;
    }
    if let Some(s) = o.seed {
        config.seed = s;
    }
    if config.order < 2 {
        return Err(usage(format!("order must be at least 2, got {}", config.order)));
    }
    if config.samples.count == 0 || config.torus.samples == 0 {
        return Err(usage("sample counts must be at least 1"));
    }
    let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let out_dir = o
        .out
        .or_else(|| config.out.as_ref().map(|p| base_dir.join(p)))
        .unwrap_or_else(|| PathBuf::from("."));
    Ok(Job {
        config,
        base_dir,
        out_dir,
    })
}

impl Job {
    pub fn resolve(&self, p: &Path) -> PathBuf {
        self.base_dir.join(p)
    }

    /// The chart, with inline polynomial strings checked one by one so a
    /// malformed entry is reported with its position.
    pub fn chart(&self) -> Result<Arc<AlgebroidChart>, Failure> {
        match &self.config.chart {
            ChartSpec::Catalogue { catalogue: name, params } => {
                catalogue(name, params).map(Arc::new).map_err(|e| located("chart.catalogue", e))
            }
            ChartSpec::Inline { inline } => {
                let v = fedosov_core::vars(&inline.base_vars);
                let check = |at: String, s: &str| parse_poly(s, &v).map(|_| ()).map_err(|e| located(&at, e));
                for (a, row) in inline.anchor.iter().enumerate() {
                    for (i, s) in row.iter().enumerate() {
                        check(format!("chart.inline.anchor[{a}][{i}]"), s)?;
                    }
                }
                for (i, m) in inline.structure.iter().enumerate() {
                    for (j, row) in m.iter().enumerate() {
                        for (k, s) in row.iter().enumerate() {
                            check(format!("chart.inline.structure[{i}][{j}][{k}]"), s)?;
                        }
                    }
                }
                for (i, row) in inline.omega.iter().enumerate() {
                    for (j, s) in row.iter().enumerate() {
                        check(format!("chart.inline.omega[{i}][{j}]"), s)?;
                    }
                }
                match AlgebroidChart::from_json_value(inline) {
                    Ok(c) => Ok(Arc::new(c)),
                    // shape errors are input errors; broken axioms are found by `check`
                    Err(Error::InvalidChart(m)) if m.contains("must") || m.contains("match") => {
                        Err(usage(format!("chart.inline: {m}")))
                    }
                    Err(e) => Err(located("chart.inline", e)),
                }
            }
        }
    }

    pub fn gamma_of(&self, at: &str, g: &Option<Vec<Vec<Vec<String>>>>, chart: &AlgebroidChart) -> Result<Option<Gamma>, Failure> {
        let Some(g) = g else { return Ok(None) };
        let r = chart.rank();
        if g.len() != r || g.iter().any(|m| m.len() != r || m.iter().any(|row| row.len() != r)) {
            return Err(usage(format!("{at}: expected a {r} × {r} × {r} table")));
        }
        let mut out = Vec::with_capacity(r);
        for (i, m) in g.iter().enumerate() {
            let mut mm = Vec::with_capacity(r);
            for (a, row) in m.iter().enumerate() {
                let mut rr = Vec::with_capacity(r);
                for (b, s) in row.iter().enumerate() {
                    rr.push(parse_poly(s, chart.base_vars()).map_err(|e| located(&format!("{at}[{i}][{a}][{b}]"), e))?);
                }
                mm.push(rr);
            }
            out.push(mm);
        }
        Ok(Some(out))
    }

    /// `(iħ)⁻¹ω` plus the configured perturbation, through `ħ^{order/2}`.
    pub fn theta_of(&self, at: &str, t: &BTreeMap<String, String>, chart: &AlgebroidChart) -> Result<CurvatureClass, Failure> {
        let max_hbar = (self.config.order / 2) as i32;
        for (k, s) in t {
            parse_series(s, chart.base_vars(), max_hbar).map_err(|e| located(&format!("{at}[\"{k}\"]"), e))?;
        }
        let pert = CurvatureClass::from_json(chart, t, max_hbar).map_err(|e| located(at, e))?;
        let base = CurvatureClass::symplectic(chart, max_hbar);
        let sum = base.theta().try_add(pert.theta()).map_err(|e| located(at, e))?;
        CurvatureClass::new(sum).map_err(|e| located(at, e))
    }
}
