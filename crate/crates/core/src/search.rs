//! Exhaustive search for orderings of a representative system whose cycle is
//! universal for several window sizes at once (typically k = 2 and k = n − 2).
//!
//! Orderings are taken up to cyclic rotation only: the smallest exponent is
//! pinned to the first slot and the rest are permuted. Reversals are kept
//! distinct. Each ordering is screened with an early-exit duplicate check and
//! every survivor is re-certified by [`crate::verify`].

use std::collections::HashSet;
use std::time::{Duration, Instant};

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cycle::{beta_exponents, build_beta_sequence, validate_spec, CycleSpec, SpecSource, SpecVerdict};
use crate::field::{Exponent, FieldContext};
use crate::grassmann::{gaussian_binomial, Reducer};
use crate::orbit::OrbitPartition;
use crate::verify::{verify_cycle, VerifyError};

/// Default cap on the number of orderings examined.
pub const DEFAULT_CAP: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error("search space of {size} orderings exceeds the cap of {cap}")]
    SearchSpaceTooLarge { size: u64, cap: u64 },
    #[error("template is not a valid representative system: {}", .0.summary())]
    SpecInvalid(SpecVerdict),
    #[error("no α-twist placement yields a valid representative system")]
    NoValidCandidate,
    #[error("window size {k} out of range 1..={n}")]
    WindowSizeOutOfRange { k: usize, n: usize },
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    /// Permute the template's representatives as given.
    #[default]
    OrderingsOnly,
    /// Treat the template as untwisted and also try every single α-twist.
    OrderingsPlusTwist,
}

#[derive(Debug, Clone)]
pub struct SearchTask {
    pub template: CycleSpec,
    pub mode: SearchMode,
    pub ks: Vec<usize>,
    pub cap: u64,
    /// Keep a pass/fail record for every ordering (evaluates every k, no
    /// cross-k short circuit).
    pub record_all: bool,
}

impl SearchTask {
    /// Orderings-only task with ks = {2, n − 2}.
    pub fn new(template: CycleSpec) -> Self {
        let n = template.n;
        let ks = if n >= 4 { vec![2, n - 2] } else { vec![2] };
        SearchTask {
            template,
            mode: SearchMode::OrderingsOnly,
            ks: ks.into_iter().unique().collect(),
            cap: DEFAULT_CAP,
            record_all: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HitCheck {
    pub k: usize,
    pub universal: bool,
    pub exactly_once: usize,
    pub universe_size: u128,
    pub periodicity_ok: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hit {
    pub ordering: Vec<Exponent>,
    pub checks: Vec<HitCheck>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderingRecord {
    pub ordering: Vec<Exponent>,
    /// One flag per entry of `ks`.
    pub passes: Vec<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchResult {
    pub ks: Vec<usize>,
    pub mode: SearchMode,
    /// Representative multisets searched (sorted).
    pub candidates: Vec<Vec<Exponent>>,
    pub search_space_size: u64,
    /// Passing orderings, lexicographically sorted.
    pub hits: Vec<Hit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub records: Option<Vec<OrderingRecord>>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl SearchResult {
    pub fn hit_orderings(&self) -> Vec<Vec<Exponent>> {
        self.hits.iter().map(|h| h.ordering.clone()).collect()
    }
}

/// Single α-twists of `base` that give a valid representative system.
///
/// A member g qualifies when αg is Möbius-equivalent to g; the candidate
/// replaces g by αg and is kept only if the product lands in αF^×.
pub fn twist_placements(
    ctx: &FieldContext,
    partition: &OrbitPartition,
    base: &[Exponent],
) -> Vec<Vec<Exponent>> {
    let m = ctx.group_order();
    let mut out = Vec::new();
    for (j, &g) in base.iter().enumerate() {
        if g >= m || !partition.is_twistable(ctx, g) {
            continue;
        }
        let mut cand = base.to_vec();
        cand[j] = (g + 1) % m;
        let spec = CycleSpec::new(ctx, cand.clone(), SpecSource::UserSupplied);
        if validate_spec(ctx, partition, &spec).valid {
            out.push(cand);
        }
    }
    out
}

fn factorial(m: usize) -> u64 {
    (1..=m as u64).try_fold(1u64, |acc, x| acc.checked_mul(x)).unwrap_or(u64::MAX)
}

/// Early-exit screen: does the cycle of `ordering` have L pairwise distinct,
/// full-rank k-windows?
struct Screen<'a> {
    ctx: &'a FieldContext,
    k: usize,
    coeffs: &'a [u32],
    reducer: Reducer,
    packed: bool,
    keys: HashSet<u128>,
    wide: HashSet<Vec<u32>>,
    universe: u128,
}

impl<'a> Screen<'a> {
    fn new(ctx: &'a FieldContext, coeffs: &'a [u32], k: usize) -> Self {
        let packed = (ctx.q() as u128)
            .checked_pow((k * ctx.n()) as u32)
            .is_some();
        Screen {
            ctx,
            k,
            coeffs,
            reducer: Reducer::new(ctx.q(), ctx.n()),
            packed,
            keys: HashSet::new(),
            wide: HashSet::new(),
            universe: gaussian_binomial(ctx.n(), k, ctx.q() as u64),
        }
    }

    fn passes(&mut self, beta: &[Exponent]) -> bool {
        let len = beta.len();
        if len as u128 != self.universe {
            return false;
        }
        let (n, k, q) = (self.ctx.n(), self.k, self.ctx.q() as u128);
        self.keys.clear();
        self.wide.clear();
        for i in 0..len {
            let coeffs = self.coeffs;
            let rank = self.reducer.reduce_with(k, |j, row| {
                let e = beta[(i + len * k - j) % len] as usize;
                row.copy_from_slice(&coeffs[e * n..(e + 1) * n]);
            });
            if rank < k {
                return false;
            }
            let fresh = if self.packed {
                let key = self.reducer.echelon().iter().fold(0u128, |acc, &d| acc * q + d as u128);
                self.keys.insert(key)
            } else {
                self.wide.insert(self.reducer.echelon().to_vec())
            };
            if !fresh {
                return false;
            }
        }
        true
    }
}

/// Runs the search described by `task`.
pub fn search_dual(
    ctx: &FieldContext,
    partition: &OrbitPartition,
    task: &SearchTask,
) -> Result<SearchResult, SearchError> {
    let start = Instant::now();
    for &k in &task.ks {
        if k < 1 || k > ctx.n() {
            return Err(SearchError::WindowSizeOutOfRange { k, n: ctx.n() });
        }
    }

    let mut candidates: Vec<Vec<Exponent>> = match task.mode {
        SearchMode::OrderingsOnly => {
            let verdict = validate_spec(ctx, partition, &task.template);
            if !verdict.valid {
                return Err(SearchError::SpecInvalid(verdict));
            }
            vec![task.template.reps.clone()]
        }
        SearchMode::OrderingsPlusTwist => {
            let c = twist_placements(ctx, partition, &task.template.reps);
            if c.is_empty() {
                return Err(SearchError::NoValidCandidate);
            }
            c
        }
    };
    for c in candidates.iter_mut() {
        c.sort_unstable();
    }
    candidates.sort();
    candidates.dedup();

    let per = factorial(candidates[0].len().saturating_sub(1));
    let size = per.saturating_mul(candidates.len() as u64);
    if size > task.cap {
        return Err(SearchError::SearchSpaceTooLarge { size, cap: task.cap });
    }

    // coefficient vector of every α^e, flattened
    let coeffs: Vec<u32> = (0..ctx.group_order())
        .flat_map(|e| ctx.coeffs(ctx.alpha_pow(e as i64)))
        .collect();
    // screen the larger window sizes first: they reject fastest
    let mut order: Vec<usize> = (0..task.ks.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(task.ks[i]));

    let mut records = Vec::new();
    let mut survivors = Vec::new();
    for cand in &candidates {
        let (first, rest) = cand.split_first().expect("nonempty multiset");
        let branches: Vec<Vec<(Vec<Exponent>, Vec<bool>)>> = (0..rest.len().max(1))
            .into_par_iter()
            .map(|b| {
                let mut screens: Vec<Screen> = task.ks.iter().map(|&k| Screen::new(ctx, &coeffs, k)).collect();
                let mut out = Vec::new();
                let mut remaining = rest.to_vec();
                let second = (!remaining.is_empty()).then(|| remaining.remove(b));
                for perm in remaining.iter().copied().permutations(remaining.len()) {
                    let ordering: Vec<Exponent> =
                        std::iter::once(*first).chain(second).chain(perm).collect();
                    let beta = beta_exponents(ctx, &ordering);
                    let mut passes = vec![false; task.ks.len()];
                    let mut all = true;
                    for &i in &order {
                        if !all && !task.record_all {
                            break;
                        }
                        passes[i] = screens[i].passes(&beta);
                        all &= passes[i];
                    }
                    if all || task.record_all {
                        out.push((ordering, passes));
                    }
                }
                out
            })
            .collect();
        for (ordering, passes) in branches.into_iter().flatten() {
            if passes.iter().all(|&p| p) {
                survivors.push(ordering.clone());
            }
            if task.record_all {
                records.push(OrderingRecord { ordering, passes });
            }
        }
    }

    // certify survivors from scratch
    let mut hits = Vec::new();
    for ordering in survivors {
        let spec = CycleSpec::new(ctx, ordering.clone(), SpecSource::SearchResult);
        let cycle = build_beta_sequence(ctx, partition, &spec)
            .expect("candidate multisets are validated");
        let mut checks = Vec::new();
        for &k in &task.ks {
            let report = verify_cycle(ctx, &cycle, k)?;
            checks.push(HitCheck {
                k,
                universal: report.is_universal(),
                exactly_once: report.exactly_once(),
                universe_size: report.universe_size,
                periodicity_ok: report.periodicity.map(|p| p.ok),
            });
        }
        if checks.iter().all(|c| c.universal) {
            hits.push(Hit { ordering, checks });
        }
    }
    hits.sort_by(|a, b| a.ordering.cmp(&b.ordering));
    records.sort_by(|a, b| a.ordering.cmp(&b.ordering));

    Ok(SearchResult {
        ks: task.ks.clone(),
        mode: task.mode,
        candidates,
        search_space_size: size,
        hits,
        records: task.record_all.then_some(records),
        elapsed: start.elapsed(),
    })
}
