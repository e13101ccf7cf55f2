//! Seeded verification suites and their JSON reports.
//!
//! Every case draws its inputs from its own ChaCha8 stream: the generator
//! is seeded with the run seed and switched to stream number `index`, so a
//! case's inputs depend only on `(seed, index)`.  Reports contain no
//! timestamps and, unless timing is requested, no wall times, so a report
//! is a pure function of suite, seed, configuration and toolkit version.

mod suites;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Hecke,
    RankinLocal,
    KloostermanKn,
    Weil,
    KernelIdentity,
    GammaIdentities,
    SpecMeasure,
    TestFunction,
    Kw4Contour,
    LpPaper,
    EulerPaper,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::Hecke,
        Suite::RankinLocal,
        Suite::KloostermanKn,
        Suite::Weil,
        Suite::KernelIdentity,
        Suite::GammaIdentities,
        Suite::SpecMeasure,
        Suite::TestFunction,
        Suite::Kw4Contour,
        Suite::LpPaper,
        Suite::EulerPaper,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Hecke => "hecke",
            Suite::RankinLocal => "rankin-local",
            Suite::KloostermanKn => "kloosterman-kn",
            Suite::Weil => "weil",
            Suite::KernelIdentity => "kernel-identity",
            Suite::GammaIdentities => "gamma-identities",
            Suite::SpecMeasure => "spec-measure",
            Suite::TestFunction => "test-function",
            Suite::Kw4Contour => "kw4-contour",
            Suite::LpPaper => "lp-paper",
            Suite::EulerPaper => "euler-paper",
        }
    }

    /// Default sample count, or `None` for suites with a fixed case list.
    pub fn default_samples(self) -> Option<usize> {
        match self {
            Suite::Hecke => Some(10),
            Suite::RankinLocal => Some(10),
            Suite::KernelIdentity => Some(200),
            Suite::GammaIdentities => Some(50),
            Suite::SpecMeasure => Some(60),
            Suite::TestFunction => Some(20),
            Suite::Kw4Contour => Some(5),
            Suite::EulerPaper => Some(20),
            Suite::KloostermanKn | Suite::Weil | Suite::LpPaper => None,
        }
    }

    pub fn default_tolerances(self) -> BTreeMap<String, f64> {
        let pairs: &[(&str, f64)] = match self {
            Suite::Hecke => &[("hecke", 1e-10)],
            Suite::RankinLocal => &[("rankin", 1e-9)],
            Suite::KloostermanKn => &[("kn", 1e-7)],
            Suite::Weil => &[("weil", 1e-9)],
            Suite::KernelIdentity => &[("kernel_identity", 1e-8), ("kernel_identity_off_axis", 1e-7)],
            Suite::GammaIdentities => &[("gamma", 1e-10)],
            Suite::SpecMeasure => &[("spec", 1e-10)],
            Suite::TestFunction => &[("test_function", 1e-10)],
            Suite::Kw4Contour => &[("kw4", 1e-6)],
            Suite::LpPaper => &[("lp", 0.0)],
            Suite::EulerPaper => &[("euler", 1e-9)],
        };
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    pub fn default_caps(self) -> BTreeMap<String, i64> {
        let pairs: &[(&str, i64)] = match self {
            Suite::Hecke => &[("product", 10_000)],
            Suite::RankinLocal => &[("order", 8)],
            Suite::KloostermanKn => &[("d1d2", 36), ("nm", 2)],
            Suite::Weil => &[("prime", 101)],
            Suite::KernelIdentity => &[("off_axis", 20)],
            Suite::TestFunction => &[("z", 20), ("a", 2)],
            Suite::LpPaper => &[("seconds", 60)],
            Suite::EulerPaper => &[("prime", 7)],
            Suite::GammaIdentities | Suite::SpecMeasure | Suite::Kw4Contour => &[],
        };
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = VerifyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| VerifyError::UnknownSuite(s.to_string()))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed report: {0}")]
    Report(#[from] serde_json::Error),
}

/// What to run.  Tolerance and cap maps hold overrides only; anything not
/// given takes the suite default.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub seed: u64,
    pub samples: Option<usize>,
    pub tolerances: BTreeMap<String, f64>,
    pub caps: BTreeMap<String, i64>,
    /// Directory with `<name>.plp` files replacing the bundled programs.
    pub programs: Option<PathBuf>,
    /// Record per-case wall time; makes reports run-dependent.
    pub timing: bool,
}

impl SuiteConfig {
    pub fn new(suite: Suite) -> Self {
        Self {
            suite,
            seed: DEFAULT_SEED,
            samples: None,
            tolerances: BTreeMap::new(),
            caps: BTreeMap::new(),
            programs: None,
            timing: false,
        }
    }

    /// Merges overrides into the defaults, rejecting names the suite does
    /// not use and out-of-range values.
    pub fn resolve(&self) -> Result<ReportConfig, VerifyError> {
        let suite = self.suite;
        let mut tolerances = suite.default_tolerances();
        for (k, v) in &self.tolerances {
            if !tolerances.contains_key(k) {
                return Err(VerifyError::Config(format!("suite {suite} has no tolerance `{k}`")));
            }
            if !(v.is_finite() && *v >= 0.0) {
                return Err(VerifyError::Config(format!("tolerance `{k}` must be a finite nonnegative number")));
            }
            tolerances.insert(k.clone(), *v);
        }
        let mut caps = suite.default_caps();
        for (k, v) in &self.caps {
            if !caps.contains_key(k) {
                return Err(VerifyError::Config(format!("suite {suite} has no cap `{k}`")));
            }
            caps.insert(k.clone(), *v);
        }
        let limits: &[(&str, i64, i64)] = &[
            ("product", 1, 200_000),
            ("order", 0, crate::hecke::MAX_RANKIN_ORDER as i64),
            ("d1d2", 1, 400),
            ("nm", 0, 10),
            ("prime", 2, 10_000),
            ("off_axis", 0, 100_000),
            ("z", 1, 1_000),
            ("a", 0, 10),
            ("seconds", 1, 86_400),
        ];
        for (k, lo, hi) in limits {
            if let Some(v) = caps.get(*k) {
                if v < lo || v > hi {
                    return Err(VerifyError::Config(format!("cap `{k}` must lie in [{lo}, {hi}], got {v}")));
                }
            }
        }
        let samples = match (suite.default_samples(), self.samples) {
            (Some(d), s) => Some(s.unwrap_or(d)),
            (None, _) => None,
        };
        if let Some(s) = samples {
            if s > 1_000_000 {
                return Err(VerifyError::Config("sample count above 1000000".into()));
            }
        }
        Ok(ReportConfig {
            samples,
            tolerances,
            caps,
            programs: self.programs.as_ref().map(|p| p.display().to_string()),
            timing: self.timing,
        })
    }
}

/// The effective configuration, as recorded in the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportConfig {
    pub samples: Option<usize>,
    pub tolerances: BTreeMap<String, f64>,
    pub caps: BTreeMap<String, i64>,
    pub programs: Option<String>,
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseResult {
    pub index: usize,
    /// Everything needed to recompute the residual with the library.
    pub inputs: serde_json::Value,
    /// SHA-256 of the compact JSON encoding of `inputs`.
    pub input_digest: String,
    /// `None` when the case hit a domain error; see `note`.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    pub wall_time_ms: Option<f64>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub suite: String,
    pub version: String,
    pub seed: u64,
    pub config: ReportConfig,
    pub cases: Vec<CaseResult>,
    pub max_residual: f64,
    pub pass: bool,
}

impl VerificationReport {
    pub fn failures(&self) -> impl Iterator<Item = &CaseResult> {
        self.cases.iter().filter(|c| !c.pass)
    }

    pub fn summary(&self) -> String {
        let failed = self.failures().count();
        format!(
            "{:<18} {} cases={} failed={} max_residual={:.3e}",
            self.suite,
            if self.pass { "PASS" } else { "FAIL" },
            self.cases.len(),
            failed,
            self.max_residual
        )
    }
}

/// The generator for case `index` of a run with seed `seed`.
pub fn case_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

pub fn input_digest(inputs: &serde_json::Value) -> String {
    hex::encode(Sha256::digest(inputs.to_string().as_bytes()))
}

/// Outcome of one case before bookkeeping.
pub(crate) struct CaseOutcome {
    pub inputs: serde_json::Value,
    pub residual: Result<f64, String>,
    pub tolerance: f64,
    /// Extra condition besides `residual <= tolerance`, with its reason.
    pub veto: Option<String>,
    pub note: Option<String>,
}

impl CaseOutcome {
    pub fn new(inputs: serde_json::Value, residual: Result<f64, String>, tolerance: f64) -> Self {
        Self { inputs, residual, tolerance, veto: None, note: None }
    }
}

pub(crate) struct CaseRunner {
    timing: bool,
    cases: Vec<CaseResult>,
}

impl CaseRunner {
    fn new(timing: bool) -> Self {
        Self { timing, cases: Vec::new() }
    }

    pub fn run(&mut self, f: impl FnOnce() -> CaseOutcome) {
        let start = Instant::now();
        let out = f();
        let ms = start.elapsed().as_secs_f64() * 1e3;
        let (residual, mut note) = match out.residual {
            Ok(r) if r.is_finite() => (Some(r), out.note),
            Ok(r) => (None, Some(format!("non-finite residual {r}"))),
            Err(e) => (None, Some(e)),
        };
        let within = residual.is_some_and(|r| r <= out.tolerance);
        if out.veto.is_some() {
            note = out.veto.clone();
        }
        self.cases.push(CaseResult {
            index: self.cases.len(),
            input_digest: input_digest(&out.inputs),
            inputs: out.inputs,
            residual,
            tolerance: out.tolerance,
            pass: within && out.veto.is_none(),
            wall_time_ms: self.timing.then_some(ms),
            note,
        });
    }
}

pub fn run_suite(c: &SuiteConfig) -> Result<VerificationReport, VerifyError> {
    let config = c.resolve()?;
    let mut runner = CaseRunner::new(config.timing);
    suites::run(c.suite, c.seed, &config, &mut runner)?;
    let cases = runner.cases;
    let max_residual = cases.iter().filter_map(|k| k.residual).fold(0.0, f64::max);
    let pass = cases.iter().all(|k| k.pass);
    Ok(VerificationReport {
        schema_version: SCHEMA_VERSION,
        suite: c.suite.name().to_string(),
        version: VERSION.to_string(),
        seed: c.seed,
        config,
        cases,
        max_residual,
        pass,
    })
}

pub fn report_to_string(r: &VerificationReport) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("reports serialise");
    s.push('\n');
    s
}

pub fn emit_report(r: &VerificationReport, path: &Path) -> Result<(), VerifyError> {
    std::fs::write(path, report_to_string(r)).map_err(|source| VerifyError::Io { path: path.to_path_buf(), source })
}

pub fn parse_report(text: &str) -> Result<VerificationReport, VerifyError> {
    let r: VerificationReport = serde_json::from_str(text)?;
    if r.schema_version != SCHEMA_VERSION {
        return Err(VerifyError::Config(format!("unsupported schema version {}", r.schema_version)));
    }
    Ok(r)
}

pub fn read_report(path: &Path) -> Result<VerificationReport, VerifyError> {
    let text = std::fs::read_to_string(path).map_err(|source| VerifyError::Io { path: path.to_path_buf(), source })?;
    parse_report(&text)
}
