//! Experiment configuration and machine-readable residual reports.
//!
//! A report is a list of case records, each carrying the expected and actual
//! values, residuals, the tolerance in force, and a pass flag. Reports are
//! sorted by case key and the emitted artifacts contain no timing data, so a
//! fixed configuration and seed reproduce them byte for byte. Wall time is
//! carried in memory for console summaries only.

use crate::convex::SmoothConvexFunction;
use crate::error::{Result, VconvError};
use crate::valuation::{RadialDensity, RawFormKind, SmoothValuationSpec, ValuationTerm};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::{BufRead, Write};

/// Bump density description: poly(t) * exp(-1/(1 - (t/radius)^2)) on [0, radius).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DensityConfig {
    pub radius: f64,
    pub poly: Vec<f64>,
}

impl DensityConfig {
    pub fn build(&self) -> Result<RadialDensity> {
        RadialDensity::bump(self.radius, self.poly.clone())
    }

    /// The edge-damped profile used as the default test density.
    pub fn damped(radius: f64, power: usize) -> Self {
        let d = RadialDensity::damped(radius, power).expect("valid bump");
        DensityConfig {
            radius: d.radius_t(),
            poly: d.poly_coefficients().to_vec(),
        }
    }
}

/// Density slots for one homogeneity component q.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct QDensities {
    pub q: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub phi: Option<DensityConfig>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub psi: Option<DensityConfig>,
}

/// Experiment configuration: sizes, density specs, quadrature orders, seed,
/// and optional per-case-class tolerance overrides. Every run echoes it into
/// the report.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub k: usize,
    pub densities: Vec<QDensities>,
    /// per-axis order of the differential-cycle quadrature
    pub base_order: usize,
    /// order of the 1-D transform quadratures
    pub profile_order: usize,
    pub seed: u64,
    /// overrides keyed by case class, e.g. "prop410.identity"
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    /// default output path for emitted reports (the CLI flag wins)
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub out: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n: 2,
            k: 2,
            densities: vec![
                QDensities {
                    q: 0,
                    phi: Some(DensityConfig::damped(1.0, 4)),
                    psi: None,
                },
                QDensities {
                    q: 1,
                    phi: Some(DensityConfig::damped(1.0, 4)),
                    psi: None,
                },
            ],
            base_order: 24,
            profile_order: 96,
            seed: 20240,
            tolerances: BTreeMap::new(),
            out: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 1 || self.n > crate::exterior::MAX_N {
            return Err(VconvError::InvalidConfig(format!(
                "n = {} outside supported range",
                self.n
            )));
        }
        if self.k > 2 * self.n {
            return Err(VconvError::InvalidConfig(format!(
                "k = {} exceeds 2n = {}",
                self.k,
                2 * self.n
            )));
        }
        if self.base_order < 8 || self.profile_order < 8 {
            return Err(VconvError::InvalidConfig(
                "quadrature orders must be at least 8".into(),
            ));
        }
        let (n, k) = (self.n, self.k);
        for qd in &self.densities {
            let q = qd.q;
            if qd.phi.is_some() && (q < k.saturating_sub(n) || 2 * q > k) {
                return Err(VconvError::InvalidConfig(format!(
                    "phi density at q = {q} outside the admissible range"
                )));
            }
            // psi lives on max(1, k-n) <= q <= floor((k-1)/2)
            if qd.psi.is_some() && (q < k.saturating_sub(n).max(1) || q > (k.max(1) - 1) / 2) {
                return Err(VconvError::InvalidConfig(format!(
                    "psi density at q = {q} outside the admissible range"
                )));
            }
            for d in [&qd.phi, &qd.psi].into_iter().flatten() {
                if d.radius <= 0.0 {
                    return Err(VconvError::InvalidConfig(
                        "density radius must be positive".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Assemble the Theta/Upsilon valuation described by the density slots.
    pub fn build_valuation(&self) -> Result<SmoothValuationSpec> {
        self.validate()?;
        let mut terms = Vec::new();
        for qd in &self.densities {
            if let Some(phi) = &qd.phi {
                terms.push(ValuationTerm::Theta {
                    q: qd.q,
                    density: phi.build()?,
                });
            }
            if let Some(psi) = &qd.psi {
                terms.push(ValuationTerm::Upsilon {
                    q: qd.q,
                    density: psi.build()?,
                });
            }
        }
        SmoothValuationSpec::new(self.n, self.k, terms)
    }

    /// Tolerance for a case class, with the built-in default.
    pub fn tolerance(&self, class: &str, default: f64) -> f64 {
        self.tolerances.get(class).copied().unwrap_or(default)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let config: ExperimentConfig = serde_json::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }
}

/// One verification case: the identity checked, the two values, and the
/// residuals against the tolerance in force.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CaseRecord {
    /// sort key, unique within a suite
    pub case: String,
    /// self-contained statement of the identity this case checks
    pub statement: String,
    pub expected: f64,
    pub actual: f64,
    pub abs_residual: f64,
    pub rel_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CaseRecord {
    /// Build a record from expected/actual values; passes iff the chosen
    /// residual (relative when `relative`, absolute otherwise) meets `tol`.
    pub fn compare(
        case: impl Into<String>,
        statement: impl Into<String>,
        expected: f64,
        actual: f64,
        tol: f64,
        relative: bool,
    ) -> Self {
        let abs = (expected - actual).abs();
        let rel = if expected != 0.0 {
            abs / expected.abs()
        } else if actual == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        let pass = if relative { rel < tol } else { abs < tol };
        CaseRecord {
            case: case.into(),
            statement: statement.into(),
            expected,
            actual,
            abs_residual: abs,
            rel_residual: rel,
            tolerance: tol,
            pass,
        }
    }

    /// Record for a quantity that must be small in absolute value.
    pub fn residual(
        case: impl Into<String>,
        statement: impl Into<String>,
        residual: f64,
        tol: f64,
    ) -> Self {
        CaseRecord {
            case: case.into(),
            statement: statement.into(),
            expected: 0.0,
            actual: residual,
            abs_residual: residual.abs(),
            rel_residual: residual.abs(),
            tolerance: tol,
            pass: residual.abs() < tol,
        }
    }
}

/// A suite run: config echo, sorted case records, and in-memory wall time.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ResidualReport {
    pub suite: String,
    pub config: ExperimentConfig,
    pub cases: Vec<CaseRecord>,
    pub passed: bool,
    /// measured run time; excluded from emitted artifacts so reports stay
    /// byte-identical per seed
    #[serde(skip)]
    pub wall_ms: u128,
}

impl ResidualReport {
    pub fn new(
        suite: impl Into<String>,
        config: ExperimentConfig,
        mut cases: Vec<CaseRecord>,
        wall_ms: u128,
    ) -> Self {
        cases.sort_by(|a, b| a.case.cmp(&b.case));
        let passed = cases.iter().all(|c| c.pass);
        ResidualReport {
            suite: suite.into(),
            config,
            cases,
            passed,
            wall_ms,
        }
    }

    pub fn max_abs_residual(&self) -> f64 {
        self.cases.iter().map(|c| c.abs_residual).fold(0.0, f64::max)
    }

    pub fn max_rel_residual(&self) -> f64 {
        self.cases.iter().map(|c| c.rel_residual).fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmitFormat {
    /// JSON lines: one header record, then one record per case.
    Record,
    /// Tab-separated table for plotting.
    Table,
}

impl EmitFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "record" => Ok(EmitFormat::Record),
            "table" => Ok(EmitFormat::Table),
            other => Err(VconvError::InvalidArgument(format!(
                "unknown format `{other}` (expected record|table)"
            ))),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type")]
enum RecordLine {
    #[serde(rename = "header")]
    Header {
        suite: String,
        config: ExperimentConfig,
        passed: bool,
    },
    #[serde(rename = "case")]
    Case(CaseRecord),
}

/// Write a report. The record format is one JSON object per line (a header
/// line then a line per case) and round-trips through [`parse_records`].
pub fn emit(report: &ResidualReport, format: EmitFormat, out: &mut dyn Write) -> Result<()> {
    match format {
        EmitFormat::Record => {
            let header = RecordLine::Header {
                suite: report.suite.clone(),
                config: report.config.clone(),
                passed: report.passed,
            };
            writeln!(out, "{}", serde_json::to_string(&header)?)?;
            for case in &report.cases {
                writeln!(out, "{}", serde_json::to_string(&RecordLine::Case(case.clone()))?)?;
            }
        }
        EmitFormat::Table => {
            writeln!(
                out,
                "case\tstatement\texpected\tactual\tabs_residual\trel_residual\ttolerance\tpass"
            )?;
            for c in &report.cases {
                writeln!(
                    out,
                    "{}\t{}\t{:.17e}\t{:.17e}\t{:.17e}\t{:.17e}\t{:.3e}\t{}",
                    c.case,
                    c.statement,
                    c.expected,
                    c.actual,
                    c.abs_residual,
                    c.rel_residual,
                    c.tolerance,
                    c.pass
                )?;
            }
        }
    }
    Ok(())
}

/// Parse a record-format stream back into a report (wall time is not stored
/// in artifacts and comes back as zero).
pub fn parse_records(input: &mut dyn BufRead) -> Result<ResidualReport> {
    let mut suite = None;
    let mut config = None;
    let mut cases = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<RecordLine>(&line)? {
            RecordLine::Header {
                suite: s,
                config: c,
                ..
            } => {
                suite = Some(s);
                config = Some(c);
            }
            RecordLine::Case(c) => cases.push(c),
        }
    }
    let suite = suite.ok_or_else(|| {
        VconvError::InvalidArgument("record stream is missing its header line".into())
    })?;
    let config =
        config.ok_or_else(|| VconvError::InvalidArgument("header carried no config".into()))?;
    Ok(ResidualReport::new(suite, config, cases, 0))
}

/// Serializable description of a smooth convex function for the ad-hoc `eval`
/// command.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FunctionConfig {
    Quadratic {
        /// full Hessian matrix, row major
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
        c: f64,
    },
    ExpLinear {
        dim: usize,
        terms: Vec<(f64, Vec<f64>)>,
    },
    SmoothNorm {
        dim: usize,
        alpha: f64,
    },
    Sum {
        parts: Vec<FunctionConfig>,
    },
}

impl FunctionConfig {
    pub fn build(&self) -> Result<SmoothConvexFunction> {
        Ok(match self {
            FunctionConfig::Quadratic { a, b, c } => {
                let d = b.len();
                let mat = DMatrix::from_fn(d, d, |r, cix| a[r][cix]);
                SmoothConvexFunction::quadratic(mat, DVector::from_vec(b.clone()), *c)?
            }
            FunctionConfig::ExpLinear { dim, terms } => {
                SmoothConvexFunction::exp_combination(*dim, terms.clone())?
            }
            FunctionConfig::SmoothNorm { dim, alpha } => {
                SmoothConvexFunction::smooth_norm(*dim, *alpha)?
            }
            FunctionConfig::Sum { parts } => SmoothConvexFunction::Sum(
                parts
                    .iter()
                    .map(|p| p.build())
                    .collect::<Result<Vec<_>>>()?,
            ),
        })
    }
}

/// Serializable valuation description for the `eval` command.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValuationConfig {
    pub n: usize,
    pub k: usize,
    pub terms: Vec<TermConfig>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TermConfig {
    Theta {
        q: usize,
        density: DensityConfig,
    },
    Upsilon {
        q: usize,
        density: DensityConfig,
    },
    Raw {
        q: usize,
        form: String,
        density: DensityConfig,
        constant: f64,
    },
}

impl ValuationConfig {
    pub fn build(&self) -> Result<SmoothValuationSpec> {
        let mut terms = Vec::new();
        for t in &self.terms {
            terms.push(match t {
                TermConfig::Theta { q, density } => ValuationTerm::Theta {
                    q: *q,
                    density: density.build()?,
                },
                TermConfig::Upsilon { q, density } => ValuationTerm::Upsilon {
                    q: *q,
                    density: density.build()?,
                },
                TermConfig::Raw {
                    q,
                    form,
                    density,
                    constant,
                } => {
                    let kind = match form.as_str() {
                        "theta" => RawFormKind::Theta,
                        "beta_beta" => RawFormKind::BetaBeta,
                        "beta_gamma" => RawFormKind::BetaGamma,
                        other => {
                            return Err(VconvError::InvalidArgument(format!(
                                "unknown raw form `{other}`"
                            )))
                        }
                    };
                    ValuationTerm::Raw {
                        q: *q,
                        kind,
                        density: density.build()?,
                        constant: *constant,
                    }
                }
            });
        }
        SmoothValuationSpec::new(self.n, self.k, terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        let mut config = ExperimentConfig::default();
        config.validate().unwrap();
        config.base_order = 4;
        assert!(config.validate().is_err());
        config.base_order = 24;
        config.densities[0].q = 5;
        assert!(config.validate().is_err());
    }

    #[test]
    fn record_round_trip() {
        let config = ExperimentConfig::default();
        let cases = vec![
            CaseRecord::compare("b-case", "identity B", 2.0, 2.0 + 1e-12, 1e-9, true),
            CaseRecord::residual("a-case", "residual A", 3e-11, 1e-9),
        ];
        let report = ResidualReport::new("demo", config, cases, 42);
        assert!(report.passed);
        // sorted by case key
        assert_eq!(report.cases[0].case, "a-case");
        let mut buf = Vec::new();
        emit(&report, EmitFormat::Record, &mut buf).unwrap();
        let parsed = parse_records(&mut std::io::BufReader::new(buf.as_slice())).unwrap();
        assert_eq!(parsed.suite, report.suite);
        assert_eq!(parsed.cases, report.cases);
        assert_eq!(parsed.config, report.config);
    }

    #[test]
    fn emitted_records_are_deterministic() {
        let report = ResidualReport::new(
            "demo",
            ExperimentConfig::default(),
            vec![CaseRecord::residual("x", "s", 1e-12, 1e-9)],
            7,
        );
        let mut one = Vec::new();
        let mut two = Vec::new();
        emit(&report, EmitFormat::Record, &mut one).unwrap();
        let mut again = report.clone();
        again.wall_ms = 999_999; // timing must not leak into artifacts
        emit(&again, EmitFormat::Record, &mut two).unwrap();
        assert_eq!(one, two);
    }

    #[test]
    fn table_has_header_even_when_empty() {
        let report = ResidualReport::new("demo", ExperimentConfig::default(), vec![], 0);
        let mut buf = Vec::new();
        emit(&report, EmitFormat::Table, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert!(text.starts_with("case\t"));
    }

    #[test]
    fn function_config_builds() {
        let f = FunctionConfig::Sum {
            parts: vec![
                FunctionConfig::SmoothNorm { dim: 4, alpha: 1.0 },
                FunctionConfig::ExpLinear {
                    dim: 4,
                    terms: vec![(1.0, vec![0.1, 0.2, 0.3, 0.4])],
                },
            ],
        };
        let built = f.build().unwrap();
        assert_eq!(built.dim(), 4);
    }
}
