use std::collections::BTreeMap;

use gl3_core::arith::{gcd, is_prime};
use gl3_core::euler::{closed_form_factor, EulerFactorSpec, EulerTerms, SumOptions};
use gl3_core::exp_sums::{
    gl3_long, gl3_long_with, kloosterman, kn_decompose_rhs, KloostermanArgs, DEFAULT_MODULUS_CAP,
};
use gl3_core::hecke::{rankin_local_series, schur_coeff, SatakeTriple};
use gl3_core::kernels::{
    gamma_identity_residuals, kernel_identity_residual, kw4_eval, spec_measure, ContourSpec, SpectralParameter,
};
use gl3_core::plp::{check_witness, parse_program, solve, Outcome, Rational};
use gl3_core::verify::{parse_report, report_to_string, run_suite, Suite, SuiteConfig};
use num_complex::Complex64;
use proptest::prelude::*;
use std::sync::OnceLock;

fn angle() -> impl Strategy<Value = f64> {
    0.0..std::f64::consts::TAU
}

fn triple() -> impl Strategy<Value = SatakeTriple> {
    (angle(), angle()).prop_map(|(a, b)| SatakeTriple::from_angles(a, b))
}

fn det3(m: [[Complex64; 3]; 3]) -> Complex64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Schur polynomial of shape `(k + l, k, 0)` as a ratio of alternants.
fn alternant_ratio(t: &SatakeTriple, k: i32, l: i32) -> (Complex64, Complex64) {
    let x = t.as_array();
    let shape = [k + l + 2, k + 1, 0];
    let num = det3(std::array::from_fn(|i| std::array::from_fn(|j| x[i].powi(shape[j]))));
    let den = det3(std::array::from_fn(|i| std::array::from_fn(|j| x[i].powi(2 - j as i32))));
    (num, den)
}

fn ci(t: f64) -> Complex64 {
    Complex64::new(0.0, t)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn schur_conjugate_symmetry(t in triple(), k in 0i64..=4, l in 0i64..=4) {
        let d = schur_coeff(&t, k, l) - schur_coeff(&t, l, k).conj();
        prop_assert!(d.norm() <= 1e-10);
    }

    #[test]
    fn schur_matches_alternant_ratio(t in triple(), k in 0i32..=4, l in 0i32..=4) {
        let (num, den) = alternant_ratio(&t, k, l);
        prop_assume!(den.norm() >= 1e-3);
        let d = schur_coeff(&t, k as i64, l as i64) - num / den;
        prop_assert!(d.norm() <= 1e-11, "{d}");
    }

    #[test]
    fn rankin_series_identity(t in triple()) {
        let (lhs, rhs) = rankin_local_series(&t, 8);
        for (a, b) in lhs.iter().zip(&rhs) {
            prop_assert!((a - b).norm() <= 1e-9);
        }
    }

    #[test]
    fn kloosterman_symmetric(n in -50i64..50, m in -50i64..50, c in 1i64..60) {
        // same phases, summed in another order
        let d = kloosterman(n, m, c).unwrap() - kloosterman(m, n, c).unwrap();
        prop_assert!(d.norm() <= 1e-12 * c as f64);
    }

    #[test]
    fn weil_bound(n in 1i64..1000, m in 1i64..1000, p in 2i64..=101) {
        prop_assume!(is_prime(p as u64) && gcd(n * m, p) == 1);
        prop_assert!(kloosterman(n, m, p).unwrap().norm() <= 2.0 * (p as f64).sqrt() + 1e-9);
    }

    #[test]
    fn long_sum_independent_of_bezout_choice(
        f in proptest::array::uniform4(-3i64..6), d1 in 1i64..=8, d2 in 1i64..=8, shift in 1i64..20,
    ) {
        let args = KloostermanArgs::new(f[0], f[1], f[2], f[3], d1, d2);
        let a = gl3_long(&args).unwrap();
        let b = gl3_long_with(&args, shift, DEFAULT_MODULUS_CAP).unwrap();
        prop_assert!((a - b).norm() <= 1e-9);
        prop_assert!((a - kn_decompose_rhs(&args).unwrap()).norm() <= 1e-7 * (d1 * d2) as f64);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kernel_identity_on_axis(
        a in -1.0f64..1.0, b in -1.0f64..1.0, t1 in -2.0f64..2.0, t2 in -2.0f64..2.0,
    ) {
        prop_assume!((a + b).abs() <= 1.0);
        let mu0 = SpectralParameter::imaginary(a, b);
        prop_assume!(mu0.0.iter().all(|m| (t1 + m.im).abs() >= 0.1 && (t2 - m.im).abs() >= 0.1));
        for (e1, e2) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
            prop_assert!(kernel_identity_residual(ci(t1), ci(t2), &mu0, e1, e2).unwrap() <= 1e-8);
        }
    }

    #[test]
    fn gamma_identities_on_axis(t in 0.1f64..10.0, neg in any::<bool>()) {
        let z = ci(if neg { -t } else { t });
        for r in gamma_identity_residuals(z).unwrap() {
            prop_assert!(r <= 1e-10);
        }
    }

    #[test]
    fn spec_measure_vanishes_at_even_differences(k in 1i32..=4, u in 0.05f64..2.0, neg in any::<bool>()) {
        let u = if neg { -u } else { u };
        // (k + iu, -k + iu, -2iu): first difference 2k, the others off the real line
        let mu = SpectralParameter::new(Complex64::new(k as f64, u), Complex64::new(-k as f64, u), ci(-2.0 * u)).unwrap();
        prop_assert!(spec_measure(&mu).unwrap().norm() <= 1e-10);
    }

    #[test]
    fn spec_measure_is_weyl_invariant(a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let mu = SpectralParameter::imaginary(a, b);
        let v = spec_measure(&mu).unwrap();
        for p in gl3_core::kernels::PERMUTATIONS {
            let w = spec_measure(&mu.permuted(p)).unwrap();
            prop_assert!((w - v).norm() <= 1e-12 * (1.0 + v.norm()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn kw4_contour_independent(a in -1.0f64..1.0, b in -1.0f64..1.0, y in 0.5f64..2.0, neg in any::<bool>(), sigma in 0.02f64..0.16) {
        let mu = SpectralParameter::imaginary(a, b);
        let y = if neg { -y } else { y };
        let base = ContourSpec::for_mu(&mu);
        let v = kw4_eval(y, &mu, &base).unwrap().value;
        let w = kw4_eval(y, &mu, &ContourSpec { sigma, ..base }).unwrap().value;
        prop_assert!((v - w).norm() <= 1e-6 * v.norm());
    }
}

/// Small piecewise programs written out as text.
fn small_program() -> impl Strategy<Value = String> {
    let coef = -3i64..=3;
    (
        proptest::collection::vec((coef.clone(), coef.clone(), 0i64..=4), 1..=3),
        proptest::collection::vec((coef.clone(), coef.clone(), coef), 1..=3),
        any::<bool>(),
    )
        .prop_map(|(cons, obj, use_min)| {
            let mut s = String::from("var x >= 0; var y >= 0;\n");
            let pieces: Vec<String> = obj.iter().map(|(a, b, c)| format!("{a}*x + {b}*y + {c}")).collect();
            let kind = if use_min { "min" } else { "max" };
            if pieces.len() == 1 {
                s += &format!("maximize {};\n", pieces[0]);
            } else {
                s += &format!("maximize {kind}({});\n", pieces.join(", "));
            }
            s += "subject to x <= 4; subject to y <= 4;\n";
            for (a, b, c) in cons {
                s += &format!("subject to max({a}*x, {b}*y) <= {c};\n");
            }
            s
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solver_witness_attains_and_branches_bounded(src in small_program()) {
        let p = parse_program("random", &src).unwrap();
        let s = solve(&p).unwrap();
        let nodes = src.matches("max(").count() + src.matches("min(").count();
        prop_assert!(s.branches <= 3usize.pow(nodes as u32));
        match &s.outcome {
            Outcome::Optimal { value, witness } => {
                prop_assert!(check_witness(&p, witness).unwrap().attains(value));
                // no lattice point of the box does better
                for x in 0..=4 {
                    for y in 0..=4 {
                        let pt = BTreeMap::from([("x".to_string(), Rational::from_int(x)), ("y".to_string(), Rational::from_int(y))]);
                        let c = check_witness(&p, &pt).unwrap();
                        prop_assert!(!c.feasible || c.objective <= *value);
                    }
                }
            }
            Outcome::Infeasible => prop_assert!(!p.is_feasible(&[Rational::zero(), Rational::zero()])),
            Outcome::Unbounded => prop_assert!(false, "bounded box reported unbounded"),
        }
    }
}

fn m_terms() -> &'static [EulerTerms; 3] {
    static TERMS: OnceLock<[EulerTerms; 3]> = OnceLock::new();
    TERMS.get_or_init(|| std::array::from_fn(|m| EulerTerms::enumerate(m as u32, SumOptions::default())))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn euler_factor_matches_closed_form(t in triple(), pi in 0usize..4, m in 0u32..=2) {
        let p = [2, 3, 5, 7][pi];
        let spec = EulerFactorSpec::new(p, m, t).unwrap();
        let c = closed_form_factor(&spec);
        prop_assert!((m_terms()[m as usize].evaluate(&spec) - c).norm() <= 1e-9 * (1.0 + c.norm()));
    }

    #[test]
    fn euler_ratio_is_the_hecke_eigenvalue(t in triple(), pi in 0usize..4) {
        let p = [2, 3, 5, 7][pi];
        let f0 = m_terms()[0].evaluate(&EulerFactorSpec::new(p, 0, t).unwrap());
        let f1 = m_terms()[1].evaluate(&EulerFactorSpec::new(p, 1, t).unwrap());
        prop_assume!(f0.norm() > 1e-6);
        prop_assert!((f1 / f0 - schur_coeff(&t, 0, 1)).norm() <= 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn reports_are_deterministic_and_parse(seed in any::<u64>(), suite in prop::sample::select(vec![
        Suite::GammaIdentities, Suite::SpecMeasure, Suite::RankinLocal, Suite::KernelIdentity, Suite::TestFunction,
    ])) {
        let mut c = SuiteConfig::new(suite);
        c.seed = seed;
        c.samples = Some(6);
        c.caps = match suite {
            Suite::KernelIdentity => BTreeMap::from([("off_axis".to_string(), 3)]),
            _ => BTreeMap::new(),
        };
        let a = report_to_string(&run_suite(&c).unwrap());
        let b = report_to_string(&run_suite(&c).unwrap());
        prop_assert_eq!(&a, &b);
        let r = parse_report(&a).unwrap();
        prop_assert_eq!(r.pass, r.cases.iter().all(|k| k.pass));
        let max = r.cases.iter().filter_map(|k| k.residual).fold(0.0, f64::max);
        prop_assert_eq!(r.max_residual, max);
    }
}
