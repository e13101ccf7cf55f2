//! The sample plans behind each suite.

use std::collections::BTreeMap;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::{case_rng, CaseOutcome, CaseRunner, ReportConfig, Suite, VerifyError};
use crate::arith::primes_up_to;
use crate::euler::{closed_form_factor, EulerFactorSpec, EulerTerms, SumOptions};
use crate::exp_sums::{gl3_long, kloosterman, kn_decompose_rhs, KloostermanArgs};
use crate::hecke::{
    hecke_relation_residual, mobius_identity_residual, rankin_local_series, three_variable_residual, HeckeTable,
    ParamAssignment, SatakeTriple,
};
use crate::kernels::{
    gamma_identity_residuals, kernel_identity_residual, kw4_eval, spec_measure, test_function_hz, weyl_orbit,
    ContourSpec, KernelError, SpectralParameter, PERMUTATIONS,
};
use crate::plp::{check_witness, parse_program, solve, Outcome, BUNDLED_PROGRAMS};

const SIGN_PAIRS: [(i32, i32); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];

pub(super) fn run(suite: Suite, seed: u64, cfg: &ReportConfig, out: &mut CaseRunner) -> Result<(), VerifyError> {
    let samples = cfg.samples.unwrap_or(0);
    let tol = |k: &str| cfg.tolerances[k];
    let cap = |k: &str| cfg.caps[k];
    match suite {
        Suite::Hecke => hecke(seed, samples, tol("hecke"), cap("product") as u64, out),
        Suite::RankinLocal => rankin(seed, samples, tol("rankin"), cap("order") as usize, out),
        Suite::KloostermanKn => kn(tol("kn"), cap("d1d2"), cap("nm"), out),
        Suite::Weil => weil(tol("weil"), cap("prime") as u64, out),
        Suite::KernelIdentity => kernel_identity(
            seed,
            samples,
            cap("off_axis") as usize,
            tol("kernel_identity"),
            tol("kernel_identity_off_axis"),
            out,
        ),
        Suite::GammaIdentities => gamma(seed, samples, tol("gamma"), out),
        Suite::SpecMeasure => spec(seed, samples, tol("spec"), out),
        Suite::TestFunction => {
            test_function(seed, samples, tol("test_function"), cap("z") as f64, cap("a") as u32, out)
        }
        Suite::Kw4Contour => kw4(seed, samples, tol("kw4"), out),
        Suite::LpPaper => return lp(cfg, cap("seconds"), out),
        Suite::EulerPaper => euler(seed, samples, tol("euler"), cap("prime") as u64, out),
    }
    Ok(())
}

fn cjson(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn triple_json(t: &SatakeTriple) -> Value {
    Value::Array(t.as_array().map(cjson).to_vec())
}

fn mu_json(mu: &SpectralParameter) -> Value {
    Value::Array(mu.0.map(cjson).to_vec())
}

fn err_string(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Largest value of `f` over `items`, with the item attaining it.
fn worst<T: Clone>(items: impl IntoIterator<Item = T>, mut f: impl FnMut(&T) -> f64) -> Option<(f64, T)> {
    let mut best: Option<(f64, T)> = None;
    for it in items {
        let r = f(&it);
        if r.is_nan() {
            return Some((r, it));
        }
        if best.as_ref().map_or(true, |(b, _)| r > *b) {
            best = Some((r, it));
        }
    }
    best
}

/// Three cases per random assignment: the divisor-sum relations over all
/// `n m1 m2 <= product`, the Mobius identities over all `m n <= product`
/// and the three-variable formula over all `n1 n2 m <= product`.  The
/// assignment is `ParamAssignment::random(case_rng(seed, stream), product)`.
fn hecke(seed: u64, samples: usize, tol: f64, product: u64, out: &mut CaseRunner) {
    for stream in 0..samples {
        let a = ParamAssignment::random(&mut case_rng(seed, stream), product);
        let table = HeckeTable::new(&a, product as usize);
        let triples = || {
            (1..=product)
                .flat_map(move |x| (1..=product / x).flat_map(move |y| (1..=product / (x * y)).map(move |z| (x, y, z))))
        };
        let pairs = (1..=product).flat_map(|x| (1..=product / x).map(move |y| (x, y)));
        let checks: [(&str, Option<(f64, Vec<u64>)>); 3] = [
            (
                "relations",
                worst(triples(), |&(n, m1, m2)| hecke_relation_residual(&table, n, m1, m2))
                    .map(|(r, (n, m1, m2))| (r, vec![n, m1, m2])),
            ),
            (
                "mobius",
                worst(pairs, |&(m, n)| mobius_identity_residual(&table, m, n)).map(|(r, (m, n))| (r, vec![m, n])),
            ),
            (
                "three-variable",
                worst(triples(), |&(n1, n2, m)| three_variable_residual(&table, n1, n2, m))
                    .map(|(r, (n1, n2, m))| (r, vec![n1, n2, m])),
            ),
        ];
        for (identity, w) in checks {
            out.run(|| {
                let (r, at) = w.unwrap_or((0.0, Vec::new()));
                let primes: BTreeMap<String, Value> = at
                    .iter()
                    .flat_map(|&x| crate::arith::factorize(x).unwrap_or_default())
                    .map(|(p, _)| (p.to_string(), triple_json(a.triple(p))))
                    .collect();
                let inputs = json!({
                    "identity": identity,
                    "stream": stream,
                    "product": product,
                    "worst_indices": at,
                    "satake_at_worst": primes,
                });
                CaseOutcome::new(inputs, Ok(r), tol)
            });
        }
    }
}

fn rankin(seed: u64, samples: usize, tol: f64, order: usize, out: &mut CaseRunner) {
    for i in 0..samples {
        let t = SatakeTriple::random(&mut case_rng(seed, i));
        out.run(|| {
            let (lhs, rhs) = rankin_local_series(&t, order);
            let r = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            CaseOutcome::new(json!({ "satake": triple_json(&t), "order": order }), Ok(r), tol)
        });
    }
}

/// One case per modulus pair, maximised over all four frequencies in `0..=nm`.
fn kn(tol: f64, d1d2: i64, nm: i64, out: &mut CaseRunner) {
    for d1 in 1..=d1d2 {
        for d2 in 1..=d1d2 / d1 {
            out.run(|| {
                let mut res: Result<(f64, [i64; 4]), String> = Ok((0.0, [0; 4]));
                'all: for n1 in 0..=nm {
                    for n2 in 0..=nm {
                        for m1 in 0..=nm {
                            for m2 in 0..=nm {
                                let args = KloostermanArgs::new(n1, m2, m1, n2, d1, d2);
                                let r = gl3_long(&args)
                                    .and_then(|l| Ok((l - kn_decompose_rhs(&args)?).norm()))
                                    .map_err(err_string);
                                match (r, &mut res) {
                                    (Ok(r), Ok((best, at))) if r > *best => {
                                        *best = r;
                                        *at = [n1, n2, m1, m2];
                                    }
                                    (Ok(_), _) => {}
                                    (Err(e), _) => {
                                        res = Err(format!("n=({n1},{n2}) m=({m1},{m2}): {e}"));
                                        break 'all;
                                    }
                                }
                            }
                        }
                    }
                }
                let inputs = json!({
                    "d1": d1,
                    "d2": d2,
                    "frequency_max": nm,
                    "worst_n1_n2_m1_m2": res.as_ref().map(|(_, at)| at.to_vec()).unwrap_or_default(),
                });
                CaseOutcome::new(inputs, res.map(|(r, _)| r), tol * (d1 * d2) as f64)
            });
        }
    }
}

/// One case per prime, over every `n, m` prime to it; the residual is
/// the excess of `|S(n, m; p)|` over `2 sqrt p`.
fn weil(tol: f64, max_prime: u64, out: &mut CaseRunner) {
    for p in primes_up_to(max_prime) {
        let p = p as i64;
        out.run(|| {
            let bound = 2.0 * (p as f64).sqrt();
            let mut res: Result<(f64, f64, [i64; 2]), String> = Ok((f64::NEG_INFINITY, 0.0, [0; 2]));
            'all: for n in 1..p {
                for m in 1..p {
                    match kloosterman(n, m, p) {
                        Ok(s) => {
                            if let Ok((ex, abs, at)) = &mut res {
                                if s.norm() - bound > *ex {
                                    *ex = s.norm() - bound;
                                    *abs = s.norm();
                                    *at = [n, m];
                                }
                            }
                        }
                        Err(e) => {
                            res = Err(format!("n={n} m={m}: {e}"));
                            break 'all;
                        }
                    }
                }
            }
            let (abs, at) = res.as_ref().map(|(_, a, at)| (*a, at.to_vec())).unwrap_or_default();
            let inputs = json!({ "p": p, "worst_n_m": at, "max_abs": abs });
            CaseOutcome::new(inputs, res.map(|(ex, _, _)| ex.max(0.0)), tol)
        });
    }
}

/// `mu0` uniform on the traceless part of `(i[-1, 1])^3`.
fn traceless_imaginary(rng: &mut ChaCha8Rng, r: f64) -> SpectralParameter {
    loop {
        let (a, b) = (rng.gen_range(-r..=r), rng.gen_range(-r..=r));
        if (a + b).abs() <= r {
            return SpectralParameter::imaginary(a, b);
        }
    }
}

/// On-axis samples first, then the off-axis ones with `Re s = +-0.05`.
/// Points closer than 0.1 to a gamma pole are redrawn.
fn kernel_identity(seed: u64, on: usize, off: usize, tol_on: f64, tol_off: f64, out: &mut CaseRunner) {
    const MARGIN: f64 = 0.1;
    for i in 0..on + off {
        let off_axis = i >= on;
        let mut rng = case_rng(seed, i);
        let mu0 = traceless_imaginary(&mut rng, 1.0);
        let mut draw = |shift: f64| loop {
            let s = Complex64::new(0.0, rng.gen_range(-2.0..=2.0));
            if mu0.0.iter().all(|m| (s.im + shift * m.im).abs() >= MARGIN) {
                return s;
            }
        };
        let (mut s1, mut s2) = (draw(1.0), draw(-1.0));
        if off_axis {
            s1.re = if rng.gen::<bool>() { 0.05 } else { -0.05 };
            s2.re = if rng.gen::<bool>() { 0.05 } else { -0.05 };
        }
        out.run(|| {
            let res: Result<Vec<f64>, KernelError> =
                SIGN_PAIRS.iter().map(|&(e1, e2)| kernel_identity_residual(s1, s2, &mu0, e1, e2)).collect();
            let inputs = json!({
                "mu0": mu_json(&mu0),
                "s1": cjson(s1),
                "s2": cjson(s2),
                "off_axis": off_axis,
                "sign_pairs": SIGN_PAIRS.iter().map(|p| [p.0, p.1]).collect::<Vec<_>>(),
            });
            let r = res.map(|v| v.into_iter().fold(0.0, f64::max)).map_err(err_string);
            CaseOutcome::new(inputs, r, if off_axis { tol_off } else { tol_on })
        });
    }
}

/// `z = i t` with `0.1 <= |t| <= 10`.
fn gamma(seed: u64, samples: usize, tol: f64, out: &mut CaseRunner) {
    for i in 0..samples {
        let mut rng = case_rng(seed, i);
        let t = rng.gen_range(0.1..=10.0) * if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let z = Complex64::new(0.0, t);
        out.run(|| {
            let r = gamma_identity_residuals(z).map(|v| v.into_iter().fold(0.0, f64::max)).map_err(err_string);
            CaseOutcome::new(json!({ "z": cjson(z) }), r, tol)
        });
    }
}

/// Cycles through three kinds of point: an even nonzero coordinate
/// difference (the measure must vanish), an odd one (a pole must be
/// reported) and a generic imaginary point (nonzero and Weyl invariant,
/// residual relative).
fn spec(seed: u64, samples: usize, tol: f64, out: &mut CaseRunner) {
    for i in 0..samples {
        let mut rng = case_rng(seed, i);
        let perm = PERMUTATIONS[rng.gen_range(0..6)];
        let kind = ["even-difference", "odd-difference", "generic"][i % 3];
        let k = rng.gen_range(1..=3) as f64 * if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let u = rng.gen_range(0.1..=1.5) * if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let mu = match kind {
            "even-difference" => {
                SpectralParameter([Complex64::new(k, u), Complex64::new(-k, u), Complex64::new(0.0, -2.0 * u)])
            }
            "odd-difference" => {
                let h = k - k.signum() * 0.5;
                SpectralParameter([Complex64::new(h, u), Complex64::new(-h, u), Complex64::new(0.0, -2.0 * u)])
            }
            _ => traceless_imaginary(&mut rng, 2.0),
        }
        .permuted(perm);
        out.run(|| {
            let inputs = json!({ "kind": kind, "mu": mu_json(&mu) });
            let res = match kind {
                "even-difference" => spec_measure(&mu).map(|v| v.norm()).map_err(err_string),
                "odd-difference" => match spec_measure(&mu) {
                    Err(KernelError::MeasurePole) => Ok(0.0),
                    Err(e) => Err(e.to_string()),
                    Ok(v) => Err(format!("expected a pole, got {v}")),
                },
                _ => spec_measure(&mu).map_err(err_string).and_then(|v| {
                    if v.norm() == 0.0 {
                        return Err("measure vanishes at a generic point".into());
                    }
                    let mut r: f64 = 0.0;
                    for w in PERMUTATIONS {
                        let vw = spec_measure(&mu.permuted(w)).map_err(err_string)?;
                        r = r.max((vw - v).norm() / v.norm());
                    }
                    Ok(r)
                }),
            };
            CaseOutcome::new(inputs, res, tol)
        });
    }
}

/// Residual is the larger of `|h(mu0) - 1|` and `|h|` at a zero of the
/// normalising polynomial.  Base points are redrawn until every other
/// orbit point is at squared distance at least 1.5, so the cross terms
/// stay below `exp(-1.5 Z)`.
fn test_function(seed: u64, samples: usize, tol: f64, z: f64, a: u32, out: &mut CaseRunner) {
    for i in 0..samples {
        let mut rng = case_rng(seed, i);
        let mu0 = loop {
            let m = traceless_imaginary(&mut rng, 2.0);
            let sep = weyl_orbit(&m)
                .iter()
                .skip(1)
                .map(|w| m.0.iter().zip(w.0).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>())
                .fold(f64::INFINITY, f64::min);
            if sep >= 1.5 {
                break m;
            }
        };
        let n = rng.gen_range(-(a as i64)..=a as i64);
        let u = rng.gen_range(-1.0..=1.0);
        let h = (2 * n + 1) as f64 / 2.0;
        let zero = SpectralParameter([Complex64::new(h, u), Complex64::new(-h, u), Complex64::new(0.0, -2.0 * u)]);
        out.run(|| {
            let inputs = json!({ "mu0": mu_json(&mu0), "zero_point": mu_json(&zero), "z": z, "a": a });
            let r = (|| -> Result<f64, KernelError> {
                let at_base = (test_function_hz(&mu0, &mu0, z, a)? - 1.0).norm();
                let at_zero = test_function_hz(&zero, &mu0, z, a)?.norm();
                Ok(at_base.max(at_zero))
            })()
            .map_err(err_string);
            CaseOutcome::new(inputs, r, tol)
        });
    }
}

/// The kernel on the lines `Re s = 0.05` and `Re s = 0.12`; relative gap.
fn kw4(seed: u64, samples: usize, tol: f64, out: &mut CaseRunner) {
    for i in 0..samples {
        let mut rng = case_rng(seed, i);
        let mu = traceless_imaginary(&mut rng, 1.0);
        let y = rng.gen_range(0.5..=2.0) * if rng.gen::<bool>() { 1.0 } else { -1.0 };
        out.run(|| {
            let base = ContourSpec::for_mu(&mu);
            let inputs = json!({ "y": y, "mu": mu_json(&mu), "sigmas": [0.05, 0.12] });
            let r = (|| -> Result<f64, KernelError> {
                let a = kw4_eval(y, &mu, &ContourSpec { sigma: 0.05, ..base })?.value;
                let b = kw4_eval(y, &mu, &ContourSpec { sigma: 0.12, ..base })?.value;
                Ok((a - b).norm() / a.norm().max(b.norm()))
            })()
            .map_err(err_string);
            CaseOutcome::new(inputs, r, tol)
        });
    }
}

/// Exact optimum of each bundled program; the residual is the distance to
/// the published optimum.  The solver's argmax and the published argmax
/// must both attain it, and each solve must finish within the time cap.
fn lp(cfg: &ReportConfig, seconds: i64, out: &mut CaseRunner) -> Result<(), VerifyError> {
    for pp in &BUNDLED_PROGRAMS {
        let source = match &cfg.programs {
            None => pp.source.to_string(),
            Some(dir) => {
                let path = std::path::Path::new(dir).join(format!("{}.plp", pp.name));
                std::fs::read_to_string(&path).map_err(|source| VerifyError::Io { path, source })?
            }
        };
        out.run(|| {
            let inputs = json!({
                "program": pp.name,
                "source_digest": super::input_digest(&Value::String(source.clone())),
                "expected": pp.optimum,
            });
            let expected = pp.optimum();
            let p = match parse_program(pp.name, &source) {
                Ok(p) => p,
                Err(e) => return CaseOutcome::new(inputs, Err(format!("parse error: {e}")), 0.0),
            };
            let start = Instant::now();
            let sol = solve(&p);
            let elapsed = start.elapsed().as_secs_f64();
            let sol = match sol {
                Ok(s) => s,
                Err(e) => return CaseOutcome::new(inputs, Err(e.to_string()), 0.0),
            };
            let Outcome::Optimal { value, witness } = &sol.outcome else {
                return CaseOutcome::new(inputs, Err(format!("solver outcome {:?}", sol.outcome)), 0.0);
            };
            let gap = (value - &expected).abs().to_f64();
            let mut out = CaseOutcome::new(inputs, Ok(gap), 0.0);
            out.note = Some(format!("optimum {value} over {} branches", sol.branches));
            let published = match check_witness(&p, &pp.witness_point(&p)) {
                Ok(c) => c.attains(&expected),
                Err(_) => false,
            };
            if !check_witness(&p, witness).is_ok_and(|c| c.attains(value)) {
                out.veto = Some("solver argmax does not attain the optimum".into());
            } else if !published {
                out.veto = Some("published argmax does not attain the published optimum".into());
            } else if elapsed > seconds as f64 {
                out.veto = Some(format!("solve took {elapsed:.1} s, over the {seconds} s cap"));
            }
            out
        });
    }
    Ok(())
}

/// Every prime up to the cap, every exponent of `m`, the trivial triple and
/// `samples` random ones (triple `t` comes from stream `t`, so the same
/// triples appear at every prime).  Residual `|f - c| / (1 + |c|)`.
fn euler(seed: u64, samples: usize, tol: f64, max_prime: u64, out: &mut CaseRunner) {
    let triples: Vec<SatakeTriple> = std::iter::once(SatakeTriple::trivial())
        .chain((1..=samples).map(|t| SatakeTriple::random(&mut case_rng(seed, t))))
        .collect();
    for m_exp in 0..=2u32 {
        let terms = EulerTerms::enumerate(m_exp, SumOptions::default());
        for p in primes_up_to(max_prime) {
            for t in &triples {
                out.run(|| {
                    let inputs = json!({ "p": p, "m_exp": m_exp, "satake": triple_json(t) });
                    let r = EulerFactorSpec::new(p, m_exp, *t).map_err(err_string).map(|spec| {
                        let c = closed_form_factor(&spec);
                        (terms.evaluate(&spec) - c).norm() / (1.0 + c.norm())
                    });
                    CaseOutcome::new(inputs, r, tol)
                });
            }
        }
    }
}
