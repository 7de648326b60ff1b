//! Run configuration: a TOML file with `[map]`, `[params]` and `[run]` sections.

use std::fmt;

use serde::{Deserialize, Serialize};
use toral_core::bounds::{BoundFormula, ExponentPair};
use toral_core::determinant::DEFAULT_MAX_PERIOD;
use toral_core::fourier::AnisoParams;
use toral_core::growth::Projection;
use toral_core::torus::{MapSpec, SmoothToralMap};
use toral_core::transfer::{OperatorKind, DEFAULT_MAX_N};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub map: MapSpec,
    #[serde(default)]
    pub params: ParamsSection,
    #[serde(default)]
    pub run: RunSection,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    #[serde(default)]
    pub sets: Vec<ParamSet>,
}

/// One `(p, s, t)` triple; `q = s − p` may be given instead of `s`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamSet {
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default = "default_t")]
    pub t: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    /// Truncation half-width N of the Fourier box.
    pub n: usize,
    /// Largest N the run may assemble.
    pub budget: usize,
    /// Finer truncation for the essential-radius check (default N + 8).
    pub refine: Option<usize>,
    /// Side of the midpoint grid for the hyperbolicity exponents.
    pub grid: usize,
    /// Iterates for the bounds and for norm growth.
    pub n_max: u32,
    /// Number of trace sums in the determinant.
    pub n_tr: u32,
    pub formulas: Vec<String>,
    /// `L`, `M`, `Lt` or `Mt`; weighted kinds take `t` from the parameter set.
    pub kind: String,
    pub margin: f64,
    /// `none`, `constant` or `point_spectrum`; default depends on the kind.
    pub projection: Option<String>,
    pub threshold: f64,
    /// Size of the random test-function ensemble.
    pub functions: usize,
    pub match_tol: f64,
    /// Write the Galerkin matrices as binary dumps.
    pub dump: bool,
    pub seed: Option<u64>,
}

fn default_t() -> f64 {
    2.0
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            n: 16,
            budget: DEFAULT_MAX_N,
            refine: None,
            grid: 32,
            n_max: 8,
            n_tr: 10,
            formulas: vec!["rho_infty".into(), "rho_one".into()],
            kind: "L".into(),
            margin: 0.05,
            projection: None,
            threshold: 0.5,
            functions: 4,
            match_tol: 1e-3,
            dump: false,
            seed: None,
        }
    }
}

/// A configuration problem, reported with the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.field, self.message)
        }
    }
}

/// A validated parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolved {
    pub exps: ExponentPair,
    pub t: f64,
}

impl Resolved {
    pub fn aniso(&self, map: &SmoothToralMap) -> AnisoParams {
        AnisoParams::new(self.exps.p, self.exps.q(), self.t, map.base().stable().direction)
            .expect("validated parameters")
    }
}

impl RunConfig {
    /// Parse and validate. TOML syntax errors carry line and column.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError::new("", e.to_string().trim_end().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.map.build().map_err(|e| ConfigError::new("[map]", e.to_string()))?;
        if self.params.sets.is_empty() {
            return Err(ConfigError::new("[params] sets", "at least one parameter set is required"));
        }
        self.resolved_params()?;
        let r = &self.run;
        let field = |name: &str| format!("[run] {name}");
        if r.n == 0 {
            return Err(ConfigError::new(field("n"), "must be at least 1"));
        }
        if let Some(refine) = r.refine {
            if refine <= r.n {
                return Err(ConfigError::new(field("refine"), format!("must exceed n = {}", r.n)));
            }
        }
        if r.grid < 2 {
            return Err(ConfigError::new(field("grid"), "must be at least 2"));
        }
        if r.n_max < 2 {
            return Err(ConfigError::new(field("n_max"), "must be at least 2"));
        }
        if r.n_tr == 0 || r.n_tr > DEFAULT_MAX_PERIOD {
            return Err(ConfigError::new(field("n_tr"), format!("must lie in 1..={DEFAULT_MAX_PERIOD}")));
        }
        self.formulas()?;
        self.kind_name()?;
        self.projection()?;
        if !(r.margin > 0.0 && r.margin.is_finite()) {
            return Err(ConfigError::new(field("margin"), "must be positive"));
        }
        if !(r.threshold > 0.0 && r.threshold.is_finite()) {
            return Err(ConfigError::new(field("threshold"), "must be positive"));
        }
        if r.functions == 0 {
            return Err(ConfigError::new(field("functions"), "must be at least 1"));
        }
        if !(r.match_tol > 0.0 && r.match_tol.is_finite()) {
            return Err(ConfigError::new(field("match_tol"), "must be positive"));
        }
        Ok(())
    }

    pub fn resolved_params(&self) -> Result<Vec<Resolved>, ConfigError> {
        self.params
            .sets
            .iter()
            .enumerate()
            .map(|(i, set)| {
                let field = |name: &str| format!("[params] sets[{i}].{name}");
                let s = match (set.s, set.q) {
                    (Some(s), None) => s,
                    (None, Some(q)) => set.p + q,
                    (Some(s), Some(q)) if (set.p + q - s).abs() <= 1e-12 * s.abs().max(1.0) => s,
                    (Some(_), Some(_)) => return Err(ConfigError::new(field("q"), "inconsistent with s - p")),
                    (None, None) => return Err(ConfigError::new(field("s"), "give either s or q")),
                };
                if !(set.p < 0.0 && set.p.is_finite()) {
                    return Err(ConfigError::new(field("p"), format!("must be negative, got {}", set.p)));
                }
                if !(s > 0.0 && s.is_finite()) {
                    return Err(ConfigError::new(field("s"), format!("must be positive, got {s}")));
                }
                if !(set.t > 1.0 && set.t.is_finite()) {
                    return Err(ConfigError::new(field("t"), format!("must lie in (1, inf), got {}", set.t)));
                }
                let exps = ExponentPair::new(set.p, s).map_err(|e| ConfigError::new(field("p"), e.to_string()))?;
                Ok(Resolved { exps, t: set.t })
            })
            .collect()
    }

    pub fn formulas(&self) -> Result<Vec<BoundFormula>, ConfigError> {
        if self.run.formulas.is_empty() {
            return Err(ConfigError::new("[run] formulas", "at least one formula is required"));
        }
        self.run
            .formulas
            .iter()
            .enumerate()
            .map(|(i, f)| {
                f.parse::<BoundFormula>()
                    .map_err(|e| ConfigError::new(format!("[run] formulas[{i}]"), e.to_string()))
            })
            .collect()
    }

    fn kind_name(&self) -> Result<&str, ConfigError> {
        match self.run.kind.as_str() {
            k @ ("L" | "M" | "Lt" | "Mt") => Ok(k),
            other => Err(ConfigError::new("[run] kind", format!("expected L, M, Lt or Mt, got `{other}`"))),
        }
    }

    /// Operator kind for one parameter set; weighted kinds use its `t`.
    pub fn kind(&self, params: &Resolved) -> OperatorKind {
        match self.run.kind.as_str() {
            "M" => OperatorKind::M,
            "Lt" => OperatorKind::Lt(params.t),
            "Mt" => OperatorKind::Mt(params.t),
            _ => OperatorKind::L,
        }
    }

    /// Bound formula matching the operator kind.
    pub fn kind_formula(&self) -> BoundFormula {
        match self.run.kind.as_str() {
            "M" => BoundFormula::Thm2,
            "Lt" => BoundFormula::AppendixLt,
            "Mt" => BoundFormula::AppendixMt,
            _ => BoundFormula::Thm1,
        }
    }

    /// The requested projection; `constant` for `L` and `point_spectrum` otherwise.
    pub fn projection(&self) -> Result<Projection, ConfigError> {
        let threshold = self.run.threshold;
        let name = match &self.run.projection {
            Some(p) => p.as_str(),
            None if self.run.kind == "L" => "constant",
            None => "point_spectrum",
        };
        match name {
            "none" => Ok(Projection::None),
            "constant" => Ok(Projection::ConstantMode),
            "point_spectrum" => Ok(Projection::PointSpectrum { threshold }),
            other => Err(ConfigError::new(
                "[run] projection",
                format!("expected none, constant or point_spectrum, got `{other}`"),
            )),
        }
    }

    pub fn refine(&self) -> usize {
        self.run.refine.unwrap_or(self.run.n + 8)
    }

    pub fn build_map(&self) -> SmoothToralMap {
        self.map.build().expect("validated map")
    }
}
