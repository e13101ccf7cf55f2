use gl3_core::euler::{
    blocks, closed_form_factor, infinity_exponent_sensitivity, mcal_valuation, EulerExponentVector, EulerFactorSpec,
    EulerTerms, SumOptions, EXPONENT_COUNT,
};
use gl3_core::hecke::{schur_coeff, SatakeTriple};
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The congruence modulus built from actual integers: every variable is
/// `p^e`, gcds are taken literally and `(..)^infinity` is the limit of
/// `gcd(u, y z^k)` as `k` grows.
fn modulus_valuation(e: &EulerExponentVector, p: u64) -> u32 {
    let v = |k: i64| BigUint::from(p).pow(k as u32);
    let (r0, n10, a0, al, o0, om) = (v(e.r0), v(e.n10), v(e.alpha0), v(e.alpha), v(e.omega0), v(e.omega));
    let (nu0, nu, tau, m0, n1, s) = (v(e.nu0), v(e.nu), v(e.tau10), v(e.m0), v(e.n1), v(e.s));
    let (a, g, d0, d20, f0, g0) = (v(e.a), v(e.g), v(e.d0), v(e.d20), v(e.f0), v(e.g0));
    let (r, h1, b) = (v(e.r), v(e.h1), v(e.b));
    let rn = r0.gcd(&n10);
    let num = &r0 * &r0 * &n10 / &rn * &a0 * &al * &o0 * &om * &nu0 * &nu * &tau * &rn * &m0 * &n1 * &s;
    let big_g = (&al * &om * &a).gcd(&(&d20 * &f0 * &g0 * &m0 * &g));
    let y = &al * &om * &a * &g / &big_g;
    let z = &d0 * &d20 * &f0 * &g0 * &m0 * &g / &big_g;
    let u = &a0 * &al * &o0 * &om * &nu0 * &nu * &tau * &n10 * &r0 * &s;
    let mut inner = u.gcd(&y);
    let mut zk = BigUint::one();
    loop {
        zk *= &z;
        let next = u.gcd(&(&y * &zk));
        if next == inner && (z.is_one() || zk > u) {
            break;
        }
        inner = next;
    }
    let den = (&r0 * &m0 * &n1 * &inner).gcd(&(&r * &s * &g * &g * &g * &h1 * &h1 * &b));
    let (q, rem) = num.div_rem(&den);
    assert!(rem.is_zero());
    let mut k = 0;
    let mut q = q;
    let pb = BigUint::from(p);
    while (&q % &pb).is_zero() {
        q /= &pb;
        k += 1;
    }
    k
}

#[test]
fn modulus_valuation_matches_integer_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let blks = blocks();
    let unit = EulerExponentVector { r0: 1, ..Default::default() };
    assert_eq!(mcal_valuation(&unit) as u32, modulus_valuation(&unit, 3));
    for _ in 0..500 {
        let blk = &blks[rng.gen_range(0..blks.len())];
        let mut arr = [0i64; EXPONENT_COUNT];
        for i in 0..EXPONENT_COUNT {
            arr[i] = rng.gen_range(blk.lo[i]..=blk.hi[i]);
        }
        let e = EulerExponentVector::from_array(arr);
        let p = [2u64, 3, 5][rng.gen_range(0..3)];
        let m = mcal_valuation(&e);
        assert!(m >= 0, "{e:?}");
        assert_eq!(m as u32, modulus_valuation(&e, p), "{e:?}");
    }
}

fn triples(seed: u64, n: usize) -> Vec<SatakeTriple> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![SatakeTriple::trivial()];
    out.extend((0..n).map(|_| SatakeTriple::random(&mut rng)));
    out
}

#[test]
fn factor_matches_closed_form_and_hecke_ratio() {
    let ts = triples(21, 4);
    for m in 0..=2u32 {
        let terms = EulerTerms::enumerate(m, SumOptions::default());
        let base = EulerTerms::enumerate(0, SumOptions::default());
        for p in [3u64, 5, 7] {
            for t in &ts {
                let s = EulerFactorSpec::new(p, m, *t).unwrap();
                let (f, c) = (terms.evaluate(&s), closed_form_factor(&s));
                assert!((f - c).norm() <= 1e-9 * (1.0 + c.norm()), "p={p} m={m}");
                if m == 1 {
                    let f0 = base.evaluate(&EulerFactorSpec::new(p, 0, *t).unwrap());
                    let ratio = f / f0;
                    assert!((ratio - schur_coeff(t, 0, 1)).norm() <= 1e-9 * (1.0 + ratio.norm()));
                }
            }
        }
    }
}

#[test]
fn ranges_are_complete() {
    let ts = triples(5, 2);
    for m in 0..=2u32 {
        let base = EulerTerms::enumerate(m, SumOptions::default());
        let wide = EulerTerms::enumerate(m, SumOptions { extend: 2, ..Default::default() });
        assert_eq!(base.len(), wide.len(), "m={m}");
        for p in [2u64, 7] {
            for t in &ts {
                let s = EulerFactorSpec::new(p, m, *t).unwrap();
                assert!((base.evaluate(&s) - wide.evaluate(&s)).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn infinity_stand_in_is_large_enough() {
    let specs: Vec<_> = [2u64, 3]
        .iter()
        .flat_map(|&p| (0..=2).map(move |m| EulerFactorSpec::new(p, m, SatakeTriple::from_angles(0.9, -2.1)).unwrap()))
        .collect();
    assert_eq!(infinity_exponent_sensitivity(&specs), 0.0);
}
