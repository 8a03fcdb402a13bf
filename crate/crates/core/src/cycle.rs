//! Representative systems and the β-sequence.
//!
//! A representative system picks one exponent c_i per ratio class. With
//! β_0 = 1 and β_i = β_{i−1}·c_{(i−1 mod r)+1}, the spans of consecutive β's
//! walk through every 2-subspace once, provided c_1⋯c_r ∈ αF^×.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Exponent, FieldContext, FieldElement};
use crate::grassmann::{Reducer, Subspace};
use crate::orbit::OrbitPartition;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CycleError {
    #[error("no element g with αg Möbius-equivalent to g in {0}")]
    NoTwistableRepresentative(String),
    #[error("representative product a^{0} is not in αF^×")]
    ProductConditionFailed(Exponent),
    #[error("invalid representative system: {}", .0.summary())]
    SpecInvalid(SpecVerdict),
    #[error("window size {k} out of range 1..={n}")]
    WindowSizeOutOfRange { k: usize, n: usize },
}

/// How the representatives were chosen.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpecSource {
    /// Built by [`default_representatives`]; `g1` is the twisted element.
    Default { g1: Exponent },
    #[default]
    UserSupplied,
    SearchResult,
}

/// An ordered representative system (c_1, …, c_r) as exponents of α.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleSpec {
    pub q: u32,
    pub n: usize,
    pub poly: Vec<u32>,
    pub reps: Vec<Exponent>,
    #[serde(default)]
    pub source: SpecSource,
}

impl CycleSpec {
    pub fn new(ctx: &FieldContext, reps: Vec<Exponent>, source: SpecSource) -> Self {
        CycleSpec { q: ctx.q(), n: ctx.n(), poly: ctx.modulus().to_vec(), reps, source }
    }

    /// Σ c_i mod q^n − 1, i.e. the exponent of the product.
    pub fn product_exponent(&self, ctx: &FieldContext) -> Exponent {
        let m = ctx.group_order() as u64;
        (self.reps.iter().map(|&e| e as u64).sum::<u64>() % m) as Exponent
    }

    pub fn matches(&self, ctx: &FieldContext) -> bool {
        self.q == ctx.q() && self.n == ctx.n() && self.poly == ctx.modulus()
    }
}

/// Which element plays g₁, the representative whose α-multiple is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum G1Choice {
    /// Smallest exponent e with α^{e+1} in the Möbius orbit of α^e.
    #[default]
    SmallestTwistable,
    /// g₁ = 1/(α − 1), which always satisfies (1 1; 0 1)·g₁ = αg₁.
    InverseAlphaMinusOne,
    Exponent(Exponent),
}

/// The Frobenius orbit of α^e taken `len` times: e, eq, eq², …
fn frobenius_run(ctx: &FieldContext, e: Exponent, len: usize) -> Vec<Exponent> {
    let m = ctx.group_order() as u64;
    let q = ctx.q() as u64;
    std::iter::successors(Some(e as u64 % m), |&x| Some(x * q % m))
        .take(len)
        .map(|x| x as Exponent)
        .collect()
}

/// Exponent of g·g^q⋯g^{q^{s−1}} over the full Frobenius orbit of g = α^e.
pub fn frobenius_orbit_product_exponent(ctx: &FieldContext, e: Exponent) -> Exponent {
    let orbit = crate::orbit::galois_orbit_exponents(ctx, e);
    let m = ctx.group_order() as u64;
    (orbit.iter().map(|&x| x as u64).sum::<u64>() % m) as Exponent
}

fn smallest_twistable_in_group(
    ctx: &FieldContext,
    partition: &OrbitPartition,
    group: usize,
) -> Option<Exponent> {
    (0..ctx.group_order()).find(|&e| {
        partition.class_index(e).map(|c| partition.group_of_class(c)) == Some(group)
            && partition.is_twistable(ctx, e)
    })
}

/// Representatives with the α-twist applied to the Galois group containing
/// `g1`; every other group contributes the Frobenius orbit of its smallest
/// exponent. Twisted group first.
fn assemble(ctx: &FieldContext, partition: &OrbitPartition, g1: Exponent) -> Vec<Exponent> {
    let twisted = partition.group_of_class(partition.class_index(g1).expect("g1 ∉ F"));
    let mut reps = frobenius_run(ctx, g1, partition.groups[twisted].len());
    reps[0] = (reps[0] + 1) % ctx.group_order();
    for (gi, group) in partition.groups.iter().enumerate() {
        if gi == twisted {
            continue;
        }
        let min = partition.classes[group[0]].representative;
        reps.extend(frobenius_run(ctx, min, group.len()));
    }
    reps
}

/// The default representative system {αg₁, g₁^q, …} ⊔ {g₂, g₂^q, …} ⊔ ⋯.
pub fn default_representatives(
    ctx: &FieldContext,
    partition: &OrbitPartition,
    choice: G1Choice,
) -> Result<CycleSpec, CycleError> {
    let g1 = match choice {
        G1Choice::SmallestTwistable => (0..ctx.group_order())
            .find(|&e| partition.is_twistable(ctx, e))
            .ok_or_else(|| CycleError::NoTwistableRepresentative("any group".into()))?,
        G1Choice::InverseAlphaMinusOne => {
            let z = ctx
                .inv(ctx.sub(ctx.alpha(), FieldElement::ONE))
                .expect("α ≠ 1 since n ≥ 2");
            ctx.discrete_log(z).expect("nonzero")
        }
        G1Choice::Exponent(e) => e % ctx.group_order(),
    };
    if !partition.is_twistable(ctx, g1) {
        return Err(CycleError::NoTwistableRepresentative(format!("a^{g1}")));
    }

    let reps = assemble(ctx, partition, g1);
    let spec = CycleSpec::new(ctx, reps, SpecSource::Default { g1 });
    let product = spec.product_exponent(ctx);
    if ctx.is_alpha_coset_exponent(product) {
        return Ok(spec);
    }
    // move the twist to a single other group
    let first = partition.group_of_class(partition.class_index(g1).unwrap());
    for gi in (0..partition.m()).filter(|&g| g != first) {
        if let Some(g) = smallest_twistable_in_group(ctx, partition, gi) {
            let spec = CycleSpec::new(ctx, assemble(ctx, partition, g), SpecSource::Default { g1: g });
            if ctx.is_alpha_coset_exponent(spec.product_exponent(ctx)) {
                return Ok(spec);
            }
        }
    }
    Err(CycleError::ProductConditionFailed(product))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    ContextMismatch,
    ExponentOutOfRange { exponent: Exponent },
    RepresentativeInBaseField { exponent: Exponent },
    ClassMissing { representative: Exponent },
    ClassRepeated { representative: Exponent, exponents: Vec<Exponent> },
    ProductNotInAlphaCoset { product_exponent: Exponent },
}

/// Outcome of [`validate_spec`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpecVerdict {
    pub valid: bool,
    pub coverage_ok: bool,
    pub product_ok: bool,
    pub product_exponent: Exponent,
    pub violations: Vec<Violation>,
}

impl SpecVerdict {
    pub fn summary(&self) -> String {
        if self.valid {
            return "valid".into();
        }
        self.violations
            .iter()
            .map(|v| match v {
                Violation::ContextMismatch => "spec belongs to a different field".into(),
                Violation::ExponentOutOfRange { exponent } => format!("exponent {exponent} out of range"),
                Violation::RepresentativeInBaseField { exponent } => {
                    format!("a^{exponent} lies in F^×")
                }
                Violation::ClassMissing { representative } => {
                    format!("class of a^{representative} has no representative")
                }
                Violation::ClassRepeated { representative, exponents } => {
                    format!("class of a^{representative} covered by {exponents:?}")
                }
                Violation::ProductNotInAlphaCoset { product_exponent } => {
                    format!("product a^{product_exponent} not in αF^×")
                }
            })
            .collect::<Vec<String>>()
            .join("; ")
    }
}

/// Checks one representative per ratio class and c_1⋯c_r ∈ αF^×.
pub fn validate_spec(ctx: &FieldContext, partition: &OrbitPartition, spec: &CycleSpec) -> SpecVerdict {
    let mut violations = Vec::new();
    if !spec.matches(ctx) {
        violations.push(Violation::ContextMismatch);
    }
    let mut hits: Vec<Vec<Exponent>> = vec![Vec::new(); partition.r()];
    for &e in &spec.reps {
        if e >= ctx.group_order() {
            violations.push(Violation::ExponentOutOfRange { exponent: e });
            continue;
        }
        match partition.class_index(e) {
            Some(c) => hits[c].push(e),
            None => violations.push(Violation::RepresentativeInBaseField { exponent: e }),
        }
    }
    for (c, h) in hits.iter().enumerate() {
        let representative = partition.classes[c].representative;
        match h.len() {
            0 => violations.push(Violation::ClassMissing { representative }),
            1 => {}
            _ => violations.push(Violation::ClassRepeated { representative, exponents: h.clone() }),
        }
    }
    let coverage_ok = violations.is_empty();
    let product_exponent = spec.product_exponent(ctx);
    let product_ok = ctx.is_alpha_coset_exponent(product_exponent);
    if !product_ok {
        violations.push(Violation::ProductNotInAlphaCoset { product_exponent });
    }
    SpecVerdict { valid: violations.is_empty(), coverage_ok, product_ok, product_exponent, violations }
}

/// A built cycle: β_0, …, β_{L−1} with L = r·|Γ|.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UniversalCycle {
    pub spec: CycleSpec,
    pub beta_exponents: Vec<Exponent>,
}

impl UniversalCycle {
    pub fn len(&self) -> usize {
        self.beta_exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta_exponents.is_empty()
    }

    pub fn r(&self) -> usize {
        self.spec.reps.len()
    }

    pub fn elements(&self, ctx: &FieldContext) -> Vec<FieldElement> {
        self.beta_exponents.iter().map(|&e| ctx.alpha_pow(e as i64)).collect()
    }

    /// β_i as coefficient vectors.
    pub fn vectors(&self, ctx: &FieldContext) -> Vec<Vec<u32>> {
        self.elements(ctx).into_iter().map(|x| ctx.coeffs(x)).collect()
    }
}

/// β_0 = 1, β_i = β_{i−1}·c_{(i−1 mod r)+1}.
pub fn beta_exponents(ctx: &FieldContext, reps: &[Exponent]) -> Vec<Exponent> {
    let len = reps.len() * ctx.gamma_order() as usize;
    let m = ctx.group_order();
    let mut out = Vec::with_capacity(len);
    let mut cur: Exponent = 0;
    for i in 0..len {
        out.push(cur);
        cur = ((cur as u64 + reps[i % reps.len()] as u64) % m as u64) as Exponent;
    }
    out
}

pub fn build_beta_sequence(
    ctx: &FieldContext,
    partition: &OrbitPartition,
    spec: &CycleSpec,
) -> Result<UniversalCycle, CycleError> {
    let verdict = validate_spec(ctx, partition, spec);
    if !verdict.valid {
        return Err(CycleError::SpecInvalid(verdict));
    }
    Ok(UniversalCycle { spec: spec.clone(), beta_exponents: beta_exponents(ctx, &spec.reps) })
}

/// Windows W_i = span{β_i, β_{i−1}, …, β_{i−k+1}} (cyclic indices).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WindowSet {
    pub k: usize,
    pub windows: Vec<Subspace>,
}

impl WindowSet {
    /// Positions whose window has rank below k.
    pub fn rank_defects(&self) -> Vec<usize> {
        (0..self.windows.len()).filter(|&i| self.windows[i].dim() < self.k).collect()
    }
}

pub fn build_windows(ctx: &FieldContext, cycle: &UniversalCycle, k: usize) -> Result<WindowSet, CycleError> {
    if k < 1 || k > ctx.n() {
        return Err(CycleError::WindowSizeOutOfRange { k, n: ctx.n() });
    }
    let vectors = cycle.vectors(ctx);
    let len = vectors.len();
    let mut red = Reducer::new(ctx.q(), ctx.n());
    let windows = (0..len)
        .map(|i| {
            red.reduce_with(k, |j, row| row.copy_from_slice(&vectors[(i + len * k - j) % len]));
            red.to_subspace()
        })
        .collect();
    Ok(WindowSet { k, windows })
}
