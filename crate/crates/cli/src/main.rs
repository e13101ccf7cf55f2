use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use gl3_core::verify::{emit_report, run_suite, Suite, SuiteConfig, DEFAULT_SEED};

/// Run verification suites and write JSON reports.
///
/// Exit status is 0 when every suite passes, 1 when any case fails and
/// 2 on a usage or configuration error.
#[derive(Debug, Parser)]
#[command(name = "verify", version)]
struct Args {
    /// Suites to run: hecke, rankin-local, kloosterman-kn, weil,
    /// kernel-identity, gamma-identities, spec-measure, test-function,
    /// kw4-contour, lp-paper, euler-paper, or `all`.
    #[arg(required = true)]
    suites: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Sample count for the randomised suites.
    #[arg(long)]
    samples: Option<usize>,
    /// Tolerance override, `name=value`; repeatable.
    #[arg(long = "tol", value_parser = parse_pair::<f64>)]
    tolerances: Vec<(String, f64)>,
    /// Cap override, `name=value`; repeatable.
    #[arg(long = "cap", value_parser = parse_pair::<i64>)]
    caps: Vec<(String, i64)>,
    /// Report file.  With several suites, `<stem>.<suite>.json` is written
    /// next to it for each.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Directory of `.plp` files replacing the bundled programs.
    #[arg(long)]
    programs: Option<PathBuf>,
    /// Record per-case wall time in the report.
    #[arg(long)]
    timing: bool,
}

fn parse_pair<T: std::str::FromStr>(s: &str) -> Result<(String, T), String>
where
    T::Err: std::fmt::Display,
{
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let v = v.trim().parse::<T>().map_err(|e| format!("bad value for `{k}`: {e}"))?;
    Ok((k.trim().to_string(), v))
}

fn report_path(base: &Path, suite: Suite, several: bool) -> PathBuf {
    if !several {
        return base.to_path_buf();
    }
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
    base.with_file_name(format!("{stem}.{suite}.json"))
}

fn suites(names: &[String]) -> anyhow::Result<Vec<Suite>> {
    let mut out = Vec::new();
    for n in names {
        if n == "all" {
            out.extend(Suite::ALL);
        } else {
            out.push(n.parse()?);
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    out.retain(|s| seen.insert(*s));
    Ok(out)
}

fn own<T: Clone, U>(overrides: &BTreeMap<String, T>, known: &BTreeMap<String, U>) -> BTreeMap<String, T> {
    overrides.iter().filter(|(k, _)| known.contains_key(*k)).map(|(k, v)| (k.clone(), v.clone())).collect()
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let suites = match suites(&args.suites) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let tolerances: BTreeMap<String, f64> = args.tolerances.iter().cloned().collect();
    let caps: BTreeMap<String, i64> = args.caps.iter().cloned().collect();
    // with several suites an override goes to the suites that know its name
    for name in tolerances.keys() {
        if !suites.iter().any(|s| s.default_tolerances().contains_key(name)) {
            eprintln!("error: no requested suite has a tolerance `{name}`");
            return ExitCode::from(2);
        }
    }
    for name in caps.keys() {
        if !suites.iter().any(|s| s.default_caps().contains_key(name)) {
            eprintln!("error: no requested suite has a cap `{name}`");
            return ExitCode::from(2);
        }
    }
    let configs: Vec<SuiteConfig> = suites
        .iter()
        .map(|&suite| SuiteConfig {
            suite,
            seed: args.seed,
            samples: args.samples,
            tolerances: own(&tolerances, &suite.default_tolerances()),
            caps: own(&caps, &suite.default_caps()),
            programs: args.programs.clone(),
            timing: args.timing,
        })
        .collect();
    for c in &configs {
        if let Err(e) = c.resolve() {
            eprintln!("error: {}: {e}", c.suite);
            return ExitCode::from(2);
        }
    }
    let mut all_pass = true;
    for config in &configs {
        let suite = config.suite;
        let report = match run_suite(config) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("error: {suite}: {e}");
                return ExitCode::from(2);
            }
        };
        println!("{}", report.summary());
        for c in report.failures().take(5) {
            let note = c.note.as_deref().map(|n| format!(" ({n})")).unwrap_or_default();
            println!("  case {} failed: residual {:?}, tolerance {:e}{note}", c.index, c.residual, c.tolerance);
        }
        all_pass &= report.pass;
        if let Some(base) = &args.report {
            let path = report_path(base, suite, suites.len() > 1);
            if let Err(e) = emit_report(&report, &path) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
    }
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
