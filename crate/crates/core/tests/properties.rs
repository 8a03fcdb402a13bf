mod common;

use std::collections::BTreeMap;

use common::Oracle;
use gq_ucycle::cycle::{beta_exponents, frobenius_orbit_product_exponent};
use gq_ucycle::orbit::{collapse_degree, enumerate_pgl2, mobius_apply, orbit_partition, projective_ratio};
use gq_ucycle::{enumerate_grassmannian, gaussian_binomial, span, FieldContext, FieldElement};
use proptest::prelude::*;

fn gf32() -> FieldContext {
    FieldContext::new(2, 5, &[1, 0, 1, 0, 0, 1]).unwrap()
}

fn gf243() -> FieldContext {
    FieldContext::new(3, 5, &[1, 2, 0, 0, 0, 1]).unwrap()
}

fn nonbase(ctx: &FieldContext) -> Vec<FieldElement> {
    ctx.elements().filter(|&z| !z.is_zero() && !ctx.is_in_base_field(z)).collect()
}

#[test]
fn powers_of_alpha_match_the_oracle() {
    for (ctx, f) in [(gf32(), vec![1, 0, 1, 0, 0, 1]), (gf243(), vec![1, 2, 0, 0, 0, 1])] {
        let oracle = Oracle::new(ctx.q(), ctx.n(), &f);
        assert_eq!(oracle.order() as u32, ctx.group_order());
        for e in 0..ctx.group_order() {
            assert_eq!(ctx.coeffs(ctx.alpha_pow(e as i64)), oracle.powers[e as usize]);
        }
    }
}

#[test]
fn frobenius_commutes_with_mobius() {
    for ctx in [gf32(), gf243()] {
        for t in enumerate_pgl2(ctx.q()) {
            for &z in &nonbase(&ctx) {
                let lhs = ctx.frobenius(mobius_apply(&ctx, &t, z).unwrap());
                let rhs = mobius_apply(&ctx, &t, ctx.frobenius(z)).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }
}

fn assert_projection_well_defined(ctx: &FieldContext, f: &[u32]) {
    let (q, n) = (ctx.q(), ctx.n());
    let oracle = Oracle::new(q, n, f);
    let p = orbit_partition(ctx).unwrap();
    let subspaces = enumerate_grassmannian(q, n, 2).unwrap();
    assert_eq!(subspaces.len() as u128, gaussian_binomial(n, 2, q as u64));
    for w in &subspaces {
        // every ordered basis of w, taken from the oracle's element set
        let members: Vec<Vec<u32>> = oracle
            .span_set(&w.basis())
            .into_iter()
            .filter(|&x| x != 0)
            .map(|x| unkey(x, q as u64, n))
            .collect();
        let mut classes = Vec::new();
        for a in &members {
            for b in &members {
                if oracle.span_set(&[a.clone(), b.clone()]).len() != (q * q) as usize {
                    continue;
                }
                let v = ctx.from_coeffs(a).unwrap();
                let u = ctx.from_coeffs(b).unwrap();
                classes.push(p.class_index(ctx.discrete_log(ctx.div(v, u).unwrap()).unwrap()).unwrap());
            }
        }
        let b = w.basis();
        let direct = projective_ratio(ctx, ctx.from_coeffs(&b[0]).unwrap(), ctx.from_coeffs(&b[1]).unwrap()).unwrap();
        assert_eq!(p.classes[classes[0]], direct);
        let q = q as usize;
        assert_eq!(classes.len(), (q * q - 1) * (q * q - q));
        assert!(classes.iter().all(|&c| c == classes[0]), "{w:?}: {classes:?}");
    }
}

#[test]
fn projection_is_independent_of_basis_gf32() {
    assert_projection_well_defined(&gf32(), &[1, 0, 1, 0, 0, 1]);
}

#[test]
fn projection_is_independent_of_basis_gf243() {
    assert_projection_well_defined(&gf243(), &[1, 2, 0, 0, 0, 1]);
}

fn unkey(mut k: u64, q: u64, n: usize) -> Vec<u32> {
    (0..n)
        .map(|_| {
            let d = (k % q) as u32;
            k /= q;
            d
        })
        .collect()
}

#[test]
fn fibers_are_uniform() {
    for (ctx, expected) in [(gf32(), 31usize), (gf243(), 121)] {
        let p = orbit_partition(&ctx).unwrap();
        let mut fiber: BTreeMap<usize, usize> = BTreeMap::new();
        for w in enumerate_grassmannian(ctx.q(), ctx.n(), 2).unwrap() {
            let b = w.basis();
            let z = ctx.div(ctx.from_coeffs(&b[0]).unwrap(), ctx.from_coeffs(&b[1]).unwrap()).unwrap();
            *fiber.entry(p.class_index(ctx.discrete_log(z).unwrap()).unwrap()).or_default() += 1;
        }
        assert_eq!(fiber.len(), p.r());
        assert!(fiber.values().all(|&c| c == expected), "{fiber:?}");
        assert_eq!(p.r() as u128 * ctx.gamma_order() as u128, gaussian_binomial(ctx.n(), 2, ctx.q() as u64));
    }
}

#[test]
fn full_galois_orbit_products_land_in_base_field() {
    for (ctx, f) in [(gf32(), vec![1, 0, 1, 0, 0, 1]), (gf243(), vec![1, 2, 0, 0, 0, 1])] {
        let oracle = Oracle::new(ctx.q(), ctx.n(), &f);
        for e in 0..ctx.group_order() {
            let prod = frobenius_orbit_product_exponent(&ctx, e);
            assert!(ctx.is_fstar_exponent(prod));
            assert!(oracle.is_scalar_power(prod as u64));
        }
    }
}

#[test]
fn action_is_noncollapsing_exhaustively() {
    for ctx in [gf32(), gf243()] {
        for z in nonbase(&ctx) {
            assert_eq!(collapse_degree(&ctx, z).unwrap(), 1);
        }
    }
}

#[test]
fn ratio_classes_cover_each_class_gamma_times() {
    // the ratios β_{i+1}/β_i = c_{(i mod r)+1} hit each class exactly |Γ| times
    let ctx = gf32();
    let p = orbit_partition(&ctx).unwrap();
    let reps = [3u32, 4, 8, 16, 1];
    let betas = beta_exponents(&ctx, &reps);
    let len = betas.len();
    let mut hits = vec![0usize; p.r()];
    for i in 0..len {
        let d = (betas[(i + 1) % len] + ctx.group_order() - betas[i]) % ctx.group_order();
        hits[p.class_index(d).unwrap()] += 1;
    }
    assert!(hits.iter().all(|&h| h == 31), "{hits:?}");
}

fn arb_elem(size: u32) -> impl Strategy<Value = u32> {
    0..size
}

fn elem(ctx: &FieldContext, packed: u32) -> FieldElement {
    let digits: Vec<u32> = unkey(packed as u64, ctx.q() as u64, ctx.n());
    ctx.from_coeffs(&digits).unwrap()
}

proptest! {
    #[test]
    fn field_axioms_gf243(a in arb_elem(243), b in arb_elem(243), c in arb_elem(243)) {
        let ctx = gf243();
        let (a, b, c) = (elem(&ctx, a), elem(&ctx, b), elem(&ctx, c));
        prop_assert_eq!(ctx.mul(a, ctx.add(b, c)), ctx.add(ctx.mul(a, b), ctx.mul(a, c)));
        prop_assert_eq!(ctx.mul(ctx.mul(a, b), c), ctx.mul(a, ctx.mul(b, c)));
        prop_assert_eq!(ctx.add(a, ctx.neg(a)), FieldElement::ZERO);
        prop_assert_eq!(ctx.sub(ctx.add(a, b), b), a);
        if !a.is_zero() {
            prop_assert_eq!(ctx.mul(a, ctx.inv(a).unwrap()), FieldElement::ONE);
        }
    }

    #[test]
    fn log_is_a_homomorphism(a in 1u32..243, b in 1u32..243) {
        let ctx = gf243();
        let (x, y) = (elem(&ctx, a), elem(&ctx, b));
        prop_assume!(!x.is_zero() && !y.is_zero());
        let lhs = ctx.discrete_log(ctx.mul(x, y)).unwrap();
        let rhs = (ctx.discrete_log(x).unwrap() + ctx.discrete_log(y).unwrap()) % 242;
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(ctx.frobenius(ctx.mul(x, y)), ctx.mul(ctx.frobenius(x), ctx.frobenius(y)));
    }

    #[test]
    fn span_ignores_the_choice_of_basis(
        vs in prop::collection::vec(prop::collection::vec(0u32..3, 5), 1..4),
        coeffs in prop::collection::vec(1u32..3, 4),
        shear in 0u32..3,
    ) {
        let s = match span(3, 5, &vs) {
            Ok(s) => s,
            Err(_) => return Ok(()),
        };
        // scale each vector, add a multiple of the first to the others, reverse
        let mut ws: Vec<Vec<u32>> = vs.iter().zip(&coeffs).map(|(v, &c)| v.iter().map(|x| x * c % 3).collect()).collect();
        let first = ws[0].clone();
        for w in ws.iter_mut().skip(1) {
            for (x, f) in w.iter_mut().zip(&first) {
                *x = (*x + shear * f) % 3;
            }
        }
        ws.reverse();
        prop_assert_eq!(span(3, 5, &ws).unwrap(), s.clone());
        prop_assert_eq!(span(3, 5, &s.basis()).unwrap(), s);
    }
}

#[test]
fn frobenius_permutes_ratio_classes() {
    let ctx = gf243();
    let p = orbit_partition(&ctx).unwrap();
    for e in 0..242u32 {
        if let Some(c) = p.class_index(e) {
            assert_eq!(p.class_index(e * 3 % 242), Some(p.frobenius_image(c)));
        }
    }
}
