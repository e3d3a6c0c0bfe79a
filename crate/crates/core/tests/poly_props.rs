use std::collections::BTreeMap;

use proptest::prelude::*;
use tuq_core::poly::{monomial_count, Truncation};
use tuq_core::{MultiIndex, PolyContext, TruncatedPolynomial};

const N: usize = 3;
const ORDER: u8 = 4;

fn ctx() -> PolyContext {
    PolyContext::new(N, ORDER).unwrap()
}

fn poly_from(ctx: &PolyContext, coeffs: &[f64]) -> TruncatedPolynomial {
    TruncatedPolynomial::from_terms(ctx, ctx.monomials().iter().cloned().zip(coeffs.iter().copied())).unwrap()
}

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0..2.0f64, ctx().len())
}

fn close(a: &TruncatedPolynomial, b: &TruncatedPolynomial, tol: f64) -> bool {
    a.coefficients().iter().zip(b.coefficients()).all(|(x, y)| (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs())))
}

/// Schoolbook product over sparse maps, dropping terms above `order`.
fn naive_product(a: &TruncatedPolynomial, b: &TruncatedPolynomial, keep: impl Fn(&[u8]) -> bool) -> BTreeMap<Vec<u8>, f64> {
    let mut out = BTreeMap::new();
    for (ea, ca) in a.terms() {
        for (eb, cb) in b.terms() {
            let e: Vec<u8> = ea.exponents().iter().zip(eb.exponents()).map(|(x, y)| x + y).collect();
            if keep(&e) {
                *out.entry(e).or_insert(0.0) += ca * cb;
            }
        }
    }
    out
}

fn naive_eval(p: &TruncatedPolynomial, x: &[f64]) -> f64 {
    p.terms().map(|(e, c)| c * e.exponents().iter().zip(x).map(|(&k, v)| v.powi(k as i32)).product::<f64>()).sum()
}

fn count_by_enumeration(n: usize, order: usize) -> u64 {
    fn rec(vars_left: usize, budget: usize) -> u64 {
        if vars_left == 0 {
            return 1;
        }
        (0..=budget).map(|k| rec(vars_left - 1, budget - k)).sum()
    }
    rec(n, order) - 1
}

#[test]
fn monomial_count_matches_enumeration() {
    assert_eq!(monomial_count(6, 3), 83);
    for n in 1..=6 {
        for j in 0..=6 {
            assert_eq!(monomial_count(n, j), count_by_enumeration(n, j), "n={n} j={j}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn addition_axioms(a in coeffs(), b in coeffs(), c in coeffs()) {
        let ctx = ctx();
        let (a, b, c) = (poly_from(&ctx, &a), poly_from(&ctx, &b), poly_from(&ctx, &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert!(close(&(&(&a + &b) + &c), &(&a + &(&b + &c)), 1e-14));
        prop_assert_eq!(&a + &ctx.zero(), a.clone());
        prop_assert!((&a - &a).coefficients().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn multiplication_axioms(a in coeffs(), b in coeffs(), c in coeffs()) {
        let ctx = ctx();
        let (a, b, c) = (poly_from(&ctx, &a), poly_from(&ctx, &b), poly_from(&ctx, &c));
        prop_assert!(close(&(&a * &b), &(&b * &a), 1e-13));
        prop_assert!(close(&(&(&a * &b) * &c), &(&a * &(&b * &c)), 1e-11));
        prop_assert!(close(&(&a * &(&b + &c)), &(&(&a * &b) + &(&a * &c)), 1e-12));
        prop_assert_eq!(&a * &ctx.constant(1.0), a.clone());
    }

    #[test]
    fn truncated_product_matches_schoolbook(a in coeffs(), b in coeffs()) {
        let ctx = ctx();
        let (a, b) = (poly_from(&ctx, &a), poly_from(&ctx, &b));
        let prod = &a * &b;
        let expected = naive_product(&a, &b, |e| e.iter().map(|&k| k as usize).sum::<usize>() <= ORDER as usize);
        for (alpha, c) in prod.terms() {
            let e = expected.get(alpha.exponents()).copied().unwrap_or(0.0);
            prop_assert!((c - e).abs() < 1e-12 * (1.0 + e.abs()));
        }
        prop_assert_eq!(prod.terms().count(), expected.values().filter(|v| **v != 0.0).count());
    }

    #[test]
    fn evaluation_matches_power_sums(a in coeffs(), x in prop::collection::vec(-1.5..1.5f64, N)) {
        let p = poly_from(&ctx(), &a);
        let v = p.evaluate(&x).unwrap();
        let e = naive_eval(&p, &x);
        prop_assert!((v - e).abs() < 1e-12 * (1.0 + e.abs()));
    }

    #[test]
    fn directional_product_is_the_projected_full_product(a in prop::collection::vec(-2.0..2.0f64, 9), b in prop::collection::vec(-2.0..2.0f64, 9)) {
        let dir = PolyContext::with_truncation(6, 3, Truncation::Directional).unwrap();
        let (pa, pb) = (poly_from(&dir, &a), poly_from(&dir, &b));
        let prod = &pa * &pb;
        let kept = |e: &[u8]| dir.index_of(&MultiIndex::new(e.to_vec())).is_some();
        let expected = naive_product(&pa, &pb, kept);
        for (alpha, c) in prod.terms() {
            let e = expected.get(alpha.exponents()).copied().unwrap_or(0.0);
            prop_assert!((c - e).abs() < 1e-12 * (1.0 + e.abs()));
        }
        prop_assert!(prod.nonconstant_term_count() <= 8);
    }

    #[test]
    fn intrinsic_identities(a in coeffs(), c0 in 0.5..3.0f64) {
        let ctx = ctx();
        let mut a = a;
        a[0] = c0;
        let p = poly_from(&ctx, &a).scale(0.3).add_constant(0.7 * c0);
        let s = p.sqrt().unwrap();
        prop_assert!(close(&(&s * &s), &p, 1e-10));
        let r = p.inv_sqrt().unwrap();
        prop_assert!(close(&(&(&r * &r) * &p), &ctx.constant(1.0), 1e-10));
        prop_assert!(close(&p.exp().unwrap().ln().unwrap(), &p, 1e-10));
        let q = p.scale(0.5);
        prop_assert!(close(&(&q.exp().unwrap() * &q.exp().unwrap()), &p.exp().unwrap(), 1e-10));
        let (sn, cs) = (p.sin().unwrap(), p.cos().unwrap());
        prop_assert!(close(&(&(&sn * &sn) + &(&cs * &cs)), &ctx.constant(1.0), 1e-10));
    }

    #[test]
    fn composing_with_the_variables_is_identity(a in coeffs()) {
        let ctx = ctx();
        let p = poly_from(&ctx, &a);
        let vars: Vec<_> = (0..N).map(|i| ctx.variable(i).unwrap()).collect();
        prop_assert!(close(&p.compose(&vars, false).unwrap(), &p, 1e-14));
    }

    #[test]
    fn text_round_trip(a in coeffs()) {
        let ctx = ctx();
        let p = poly_from(&ctx, &a);
        prop_assert_eq!(TruncatedPolynomial::from_text(&ctx, &p.to_text()).unwrap(), p);
    }
}
