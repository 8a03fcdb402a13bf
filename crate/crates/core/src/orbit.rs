//! Projective ratios and the two commuting actions on E^× \ F^×.
//!
//! PGL₂(F_q) acts by Möbius transformations z ↦ (az + b)/(cz + d) and the
//! Galois group by Frobenius. The orbits of the first action are the
//! projective-ratio classes; Frobenius permutes those classes, and the cycles
//! of that permutation are the Galois groups C₁, …, C_m.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::field::{Exponent, FieldContext, FieldElement, FieldError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrbitError {
    #[error("element {0} lies in the base field")]
    InputInBaseField(String),
    #[error("projective ratio lies in the base field: the vectors span a line, not a plane")]
    RatioInBaseField,
    #[error("singular Möbius matrix ({a} {b}; {c} {d})")]
    Singular { a: u32, b: u32, c: u32, d: u32 },
    #[error("the Möbius and Galois actions collapse: m_z = {degree} for z = a^{exponent}")]
    CollapsingAction { exponent: Exponent, degree: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// An element of PGL₂(F_q), scaled so the first nonzero of (a, b, c, d) is 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MobiusTransform {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
}

impl MobiusTransform {
    pub fn new(q: u32, a: u32, b: u32, c: u32, d: u32) -> Result<Self, OrbitError> {
        let (a, b, c, d) = (a % q, b % q, c % q, d % q);
        if (a * d + q * q - b * c) % q == 0 {
            return Err(OrbitError::Singular { a, b, c, d });
        }
        let lead = [a, b, c, d].into_iter().find(|&x| x != 0).unwrap();
        let s = crate::field::inv_mod(lead, q);
        Ok(MobiusTransform { a: a * s % q, b: b * s % q, c: c * s % q, d: d * s % q })
    }

    pub fn identity() -> Self {
        MobiusTransform { a: 1, b: 0, c: 0, d: 1 }
    }
}

/// All q(q−1)(q+1) elements of PGL₂(F_q) in canonical form, sorted.
pub fn enumerate_pgl2(q: u32) -> Vec<MobiusTransform> {
    let mut out = BTreeSet::new();
    for a in 0..q {
        for b in 0..q {
            for c in 0..q {
                for d in 0..q {
                    if let Ok(t) = MobiusTransform::new(q, a, b, c, d) {
                        out.insert(t);
                    }
                }
            }
        }
    }
    out.into_iter().collect()
}

/// (az + b)/(cz + d) for z ∈ E \ F.
pub fn mobius_apply(
    ctx: &FieldContext,
    t: &MobiusTransform,
    z: FieldElement,
) -> Result<FieldElement, OrbitError> {
    if ctx.is_in_base_field(z) {
        return Err(OrbitError::InputInBaseField(ctx.format_exponent(z)));
    }
    let num = ctx.add(ctx.scale(t.a, z), ctx.scalar(t.b));
    let den = ctx.add(ctx.scale(t.c, z), ctx.scalar(t.d));
    // den = 0 would force z = −d/c ∈ F
    Ok(ctx.div(num, den)?)
}

/// A PGL₂-orbit in E^× \ F^×, as discrete logs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct RatioClass {
    /// Smallest exponent in the orbit.
    pub representative: Exponent,
    /// Sorted exponents of every orbit element.
    pub exponents: Vec<Exponent>,
}

impl RatioClass {
    pub fn contains(&self, e: Exponent) -> bool {
        self.exponents.binary_search(&e).is_ok()
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }
}

fn orbit_with(
    ctx: &FieldContext,
    group: &[MobiusTransform],
    z: FieldElement,
) -> Result<RatioClass, OrbitError> {
    if ctx.is_in_base_field(z) {
        return Err(OrbitError::InputInBaseField(ctx.format_exponent(z)));
    }
    // closure under the generator set, worklist style
    let mut seen = BTreeSet::from([ctx.discrete_log(z)?]);
    let mut work = vec![z];
    while let Some(x) = work.pop() {
        for t in group {
            let y = mobius_apply(ctx, t, x)?;
            if seen.insert(ctx.discrete_log(y)?) {
                work.push(y);
            }
        }
    }
    let exponents: Vec<Exponent> = seen.into_iter().collect();
    Ok(RatioClass { representative: exponents[0], exponents })
}

/// The full Möbius orbit PGL₂(F)·z.
pub fn pgl_orbit(ctx: &FieldContext, z: FieldElement) -> Result<RatioClass, OrbitError> {
    orbit_with(ctx, &enumerate_pgl2(ctx.q()), z)
}

/// The class of v/w in (E^× \ F^×)/PGL₂(F).
pub fn projective_ratio(
    ctx: &FieldContext,
    v: FieldElement,
    w: FieldElement,
) -> Result<RatioClass, OrbitError> {
    let z = ctx.div(v, w)?;
    if v.is_zero() || ctx.is_in_base_field(z) {
        return Err(OrbitError::RatioInBaseField);
    }
    pgl_orbit(ctx, z)
}

/// Exponents of {z, z^q, …, z^{q^{n−1}}}, sorted and deduplicated.
pub fn galois_orbit(ctx: &FieldContext, z: FieldElement) -> Result<Vec<Exponent>, OrbitError> {
    let e = ctx.discrete_log(z)?;
    Ok(galois_orbit_exponents(ctx, e))
}

pub(crate) fn galois_orbit_exponents(ctx: &FieldContext, e: Exponent) -> Vec<Exponent> {
    let m = ctx.group_order() as u64;
    let mut out: BTreeSet<Exponent> = BTreeSet::new();
    let mut cur = e as u64 % m;
    while out.insert(cur as Exponent) {
        cur = cur * ctx.q() as u64 % m;
    }
    out.into_iter().collect()
}

/// m_z = |PGL₂(F)·z ∩ ⟨σ⟩·z|.
pub fn collapse_degree(ctx: &FieldContext, z: FieldElement) -> Result<usize, OrbitError> {
    let class = pgl_orbit(ctx, z)?;
    Ok(galois_orbit(ctx, z)?.into_iter().filter(|&e| class.contains(e)).count())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CollapseCheck {
    /// Whether m_z = 1 for every z ∈ E \ F.
    pub noncollapsing: bool,
    pub max_degree: usize,
    /// First z (by exponent) with m_z > 1.
    pub counterexample: Option<Counterexample>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub exponent: Exponent,
    pub degree: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NoncollapsingVerdict {
    pub q: u64,
    pub n: usize,
    /// gcd(n, q(q² − 1)).
    pub gcd: u64,
    pub gcd_condition: bool,
    pub exhaustive: Option<CollapseCheck>,
}

impl NoncollapsingVerdict {
    /// The exhaustive result when available, else the gcd test.
    pub fn passed(&self) -> bool {
        match &self.exhaustive {
            Some(c) => c.noncollapsing,
            None => self.gcd_condition,
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The gcd criterion, plus an exhaustive m_z check when a context is given.
pub fn check_noncollapsing(q: u64, n: usize, ctx: Option<&FieldContext>) -> NoncollapsingVerdict {
    let g = gcd(n as u64, q * (q * q - 1));
    let exhaustive = ctx.map(|ctx| {
        let (classes, class_of) = compute_classes(ctx);
        let mut check = CollapseCheck { noncollapsing: true, max_degree: 0, counterexample: None };
        for e in 0..ctx.group_order() {
            let Some(ci) = class_of[e as usize] else { continue };
            let degree = galois_orbit_exponents(ctx, e)
                .into_iter()
                .filter(|&x| class_of[x as usize] == Some(ci))
                .count();
            debug_assert!(classes[ci].contains(e));
            check.max_degree = check.max_degree.max(degree);
            if degree > 1 && check.counterexample.is_none() {
                check.noncollapsing = false;
                check.counterexample = Some(Counterexample { exponent: e, degree });
            }
        }
        check
    });
    NoncollapsingVerdict { q, n, gcd: g, gcd_condition: g == 1, exhaustive }
}

/// Möbius orbits of E^× \ F^× ordered by representative, plus the exponent →
/// class index map (`None` on F^×).
fn compute_classes(ctx: &FieldContext) -> (Vec<RatioClass>, Vec<Option<usize>>) {
    let group = enumerate_pgl2(ctx.q());
    let mut class_of = vec![None; ctx.group_order() as usize];
    let mut classes = Vec::new();
    for e in 0..ctx.group_order() {
        if ctx.is_fstar_exponent(e) || class_of[e as usize].is_some() {
            continue;
        }
        let class = orbit_with(ctx, &group, ctx.alpha_pow(e as i64))
            .expect("non-base-field element has an orbit");
        for &x in &class.exponents {
            class_of[x as usize] = Some(classes.len());
        }
        classes.push(class);
    }
    (classes, class_of)
}

/// 𝒞 = C₁ ⊔ … ⊔ C_m.
#[derive(Debug, Clone, Serialize)]
pub struct OrbitPartition {
    /// Ratio classes sorted by representative exponent.
    pub classes: Vec<RatioClass>,
    /// Indices into `classes`; each group is one Frobenius cycle, sorted by
    /// representative, and groups are ordered by their smallest member.
    pub groups: Vec<Vec<usize>>,
    #[serde(skip)]
    class_of: Vec<Option<usize>>,
    #[serde(skip)]
    frobenius_next: Vec<usize>,
    #[serde(skip)]
    group_of: Vec<usize>,
}

impl OrbitPartition {
    /// Number of classes (the number of representatives c_i).
    pub fn r(&self) -> usize {
        self.classes.len()
    }

    /// Number of Galois groups.
    pub fn m(&self) -> usize {
        self.groups.len()
    }

    /// Class index of α^e, or `None` when α^e ∈ F^×.
    pub fn class_index(&self, e: Exponent) -> Option<usize> {
        self.class_of.get(e as usize).copied().flatten()
    }

    pub fn class_of_exponent(&self, e: Exponent) -> Option<&RatioClass> {
        self.class_index(e).map(|i| &self.classes[i])
    }

    /// Class reached by applying Frobenius to class `i`.
    pub fn frobenius_image(&self, i: usize) -> usize {
        self.frobenius_next[i]
    }

    pub fn group_of_class(&self, i: usize) -> usize {
        self.group_of[i]
    }

    /// Whether αg is Möbius-equivalent to g for g = α^e.
    pub fn is_twistable(&self, ctx: &FieldContext, e: Exponent) -> bool {
        let next = (e + 1) % ctx.group_order();
        match (self.class_index(e), self.class_index(next)) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        }
    }

    /// The partition as nested exponent lists: groups → classes → exponents.
    pub fn exponent_sets(&self) -> Vec<Vec<Vec<Exponent>>> {
        self.groups
            .iter()
            .map(|g| g.iter().map(|&i| self.classes[i].exponents.clone()).collect())
            .collect()
    }
}

/// Builds the full partition, refusing contexts where some m_z > 1.
pub fn orbit_partition(ctx: &FieldContext) -> Result<OrbitPartition, OrbitError> {
    let verdict = check_noncollapsing(ctx.q() as u64, ctx.n(), Some(ctx));
    if let Some(Counterexample { exponent, degree }) =
        verdict.exhaustive.and_then(|c| c.counterexample)
    {
        return Err(OrbitError::CollapsingAction { exponent, degree });
    }
    let (classes, class_of) = compute_classes(ctx);
    let m = ctx.group_order() as u64;
    let frobenius_next: Vec<usize> = classes
        .iter()
        .map(|c| {
            let img = (c.representative as u64 * ctx.q() as u64 % m) as usize;
            class_of[img].expect("Frobenius preserves E \\ F")
        })
        .collect();

    let mut group_of = vec![usize::MAX; classes.len()];
    let mut groups = Vec::new();
    for start in 0..classes.len() {
        if group_of[start] != usize::MAX {
            continue;
        }
        let mut members = Vec::new();
        let mut i = start;
        while group_of[i] == usize::MAX {
            group_of[i] = groups.len();
            members.push(i);
            i = frobenius_next[i];
        }
        members.sort_unstable();
        groups.push(members);
    }
    Ok(OrbitPartition { classes, groups, class_of, frobenius_next, group_of })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf32() -> FieldContext {
        FieldContext::new(2, 5, &[1, 0, 1, 0, 0, 1]).unwrap()
    }

    fn gf243() -> FieldContext {
        FieldContext::new(3, 5, &[1, 2, 0, 0, 0, 1]).unwrap()
    }

    #[test]
    fn pgl2_sizes() {
        for q in [2u32, 3, 5, 7] {
            let g = enumerate_pgl2(q);
            assert_eq!(g.len() as u32, q * (q - 1) * (q + 1));
            assert!(g.contains(&MobiusTransform::identity()));
        }
    }

    #[test]
    fn canonical_transform() {
        let t = MobiusTransform::new(3, 2, 0, 0, 2).unwrap();
        assert_eq!(t, MobiusTransform::identity());
        assert!(MobiusTransform::new(3, 1, 2, 2, 1).is_err());
    }

    #[test]
    fn mobius_examples() {
        let f = gf32();
        let z = f.alpha_pow(7);
        assert_eq!(mobius_apply(&f, &MobiusTransform::identity(), z).unwrap(), z);

        // z = 1/(α − 1): (1 1; 0 1)·z = z + 1 = αz
        let g1 = f.inv(f.sub(f.alpha(), FieldElement::ONE)).unwrap();
        let shift = MobiusTransform::new(2, 1, 1, 0, 1).unwrap();
        assert_eq!(mobius_apply(&f, &shift, g1).unwrap(), f.mul(f.alpha(), g1));

        let inversion = MobiusTransform::new(2, 0, 1, 1, 0).unwrap();
        assert_eq!(mobius_apply(&f, &inversion, f.alpha()).unwrap(), f.alpha_pow(30));
        assert!(matches!(
            mobius_apply(&f, &inversion, FieldElement::ONE),
            Err(OrbitError::InputInBaseField(_))
        ));
    }

    #[test]
    fn orbits_in_gf32() {
        let f = gf32();
        assert_eq!(pgl_orbit(&f, f.alpha()).unwrap().exponents, vec![1, 13, 14, 17, 18, 30]);
        assert_eq!(
            pgl_orbit(&f, f.alpha_pow(8)).unwrap().exponents,
            vec![8, 11, 12, 19, 20, 23]
        );
        let c = projective_ratio(&f, f.alpha_pow(3), FieldElement::ONE).unwrap();
        assert_eq!(c.exponents, vec![2, 3, 5, 26, 28, 29]);
        assert_eq!(
            projective_ratio(&f, f.alpha_pow(13), FieldElement::ONE).unwrap(),
            projective_ratio(&f, f.alpha(), FieldElement::ONE).unwrap()
        );
        assert_eq!(
            projective_ratio(&f, f.alpha_pow(4), f.alpha_pow(4)),
            Err(OrbitError::RatioInBaseField)
        );
    }

    #[test]
    fn ratio_invariant_under_scalars() {
        let g = gf243();
        let (v, w) = (g.alpha_pow(17), g.alpha_pow(200));
        let base = projective_ratio(&g, v, w).unwrap();
        for l in 1..3 {
            for m in 1..3 {
                assert_eq!(projective_ratio(&g, g.scale(l, v), g.scale(m, w)).unwrap(), base);
            }
        }
    }

    #[test]
    fn galois_orbits() {
        let g = gf243();
        assert_eq!(galois_orbit(&g, g.alpha()).unwrap(), vec![1, 3, 9, 27, 81]);
        assert_eq!(galois_orbit(&g, g.alpha_pow(2)).unwrap(), vec![2, 6, 18, 54, 162]);
        assert_eq!(galois_orbit(&g, FieldElement::ONE).unwrap(), vec![0]);
    }

    #[test]
    fn collapse_degrees() {
        let f = gf32();
        assert_eq!(collapse_degree(&f, f.alpha()).unwrap(), 1);
        let g = gf243();
        assert_eq!(collapse_degree(&g, g.alpha()).unwrap(), 1);
        assert!(collapse_degree(&g, g.scalar(2)).is_err());
    }

    #[test]
    fn noncollapsing_verdicts() {
        let v = check_noncollapsing(2, 5, Some(&gf32()));
        assert_eq!((v.gcd, v.gcd_condition), (1, true));
        assert!(v.passed());
        let v = check_noncollapsing(3, 5, Some(&gf243()));
        assert_eq!(v.gcd, 1);
        assert!(v.passed());
        let v = check_noncollapsing(2, 9, None);
        assert_eq!((v.gcd, v.passed()), (3, false));
    }

    #[test]
    fn partition_gf32() {
        let f = gf32();
        let p = orbit_partition(&f).unwrap();
        assert_eq!((p.r(), p.m()), (5, 1));
        assert_eq!(
            p.exponent_sets(),
            vec![vec![
                vec![1, 13, 14, 17, 18, 30],
                vec![2, 3, 5, 26, 28, 29],
                vec![4, 6, 10, 21, 25, 27],
                vec![7, 9, 15, 16, 22, 24],
                vec![8, 11, 12, 19, 20, 23],
            ]]
        );
        assert!(p.is_twistable(&f, 2));
        assert!(!p.is_twistable(&f, 1));
    }

    #[test]
    fn partition_gf243() {
        let g = gf243();
        let p = orbit_partition(&g).unwrap();
        assert_eq!((p.r(), p.m()), (10, 2));
        assert!(p.groups.iter().all(|grp| grp.len() == 5));
        assert!(p.is_twistable(&g, 81));
        assert_eq!(p.class_index(81), p.class_index(82));
        assert_ne!(p.group_of_class(p.class_index(1).unwrap()), p.group_of_class(p.class_index(2).unwrap()));
    }
}
