//! Brute-force certification of vector cycles.
//!
//! Works on raw coefficient vectors, so it certifies cycles from any source.
//! Window subspaces are compared against a fresh enumeration of G_q(k, n);
//! nothing from the orbit or cycle builders is trusted.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::cycle::UniversalCycle;
use crate::field::{FieldContext, FieldError};
use crate::grassmann::{enumerate_grassmannian, gaussian_binomial, GrassmannError, Reducer, Subspace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("empty sequence")]
    EmptySequence,
    #[error("zero vector at position {0}")]
    ZeroVectorInSequence(usize),
    #[error("vector at position {position} is not in F_{q}^{n}: {vector:?}")]
    BadVector { position: usize, vector: Vec<u32>, q: u32, n: usize },
    #[error("window size {k} out of range 1..={n}")]
    WindowSizeOutOfRange { k: usize, n: usize },
    #[error("window at position {0} is not in the enumerated Grassmannian")]
    Inconsistent(usize),
    #[error(transparent)]
    Grassmann(#[from] GrassmannError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A cyclic sequence of vectors in F_q^n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorSequence {
    pub q: u32,
    pub n: usize,
    pub vectors: Vec<Vec<u32>>,
}

impl VectorSequence {
    pub fn new(q: u32, n: usize, vectors: Vec<Vec<u32>>) -> Result<Self, VerifyError> {
        if vectors.is_empty() {
            return Err(VerifyError::EmptySequence);
        }
        for (position, v) in vectors.iter().enumerate() {
            if v.len() != n || v.iter().any(|&c| c >= q) {
                return Err(VerifyError::BadVector { position, vector: v.clone(), q, n });
            }
            if v.iter().all(|&c| c == 0) {
                return Err(VerifyError::ZeroVectorInSequence(position));
            }
        }
        Ok(VectorSequence { q, n, vectors })
    }

    pub fn from_cycle(ctx: &FieldContext, cycle: &UniversalCycle) -> Self {
        VectorSequence { q: ctx.q(), n: ctx.n(), vectors: cycle.vectors(ctx) }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// W_i = span{v_i, v_{i−1}, …, v_{i−k+1}}, cyclic, for every i.
    pub fn windows(&self, k: usize) -> Vec<Subspace> {
        let len = self.len();
        let mut red = Reducer::new(self.q, self.n);
        (0..len)
            .map(|i| {
                red.reduce_with(k, |j, row| row.copy_from_slice(&self.vectors[(i + len * k - j) % len]));
                red.to_subspace()
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MultiplicityCount {
    pub multiplicity: usize,
    pub count: usize,
}

fn histogram<I: IntoIterator<Item = usize>>(values: I) -> Vec<MultiplicityCount> {
    let mut map = BTreeMap::new();
    for v in values {
        *map.entry(v).or_insert(0) += 1;
    }
    map.into_iter().map(|(multiplicity, count)| MultiplicityCount { multiplicity, count }).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Duplicate {
    pub subspace: Subspace,
    pub positions: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineCount {
    pub line: Subspace,
    pub count: usize,
}

/// How often each line of F_q^n is hit by a sequence entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineUniformity {
    pub lines: usize,
    /// Sequence length / number of lines, when that divides evenly.
    pub expected: Option<usize>,
    pub uniform: bool,
    /// multiplicity → number of lines with that many hits.
    pub histogram: Vec<MultiplicityCount>,
    pub counts: Vec<LineCount>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeriodicityVerdict {
    pub ok: bool,
    pub period: usize,
    pub checked: usize,
    pub first_failure: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    Universal,
    /// Every subspace appears, some more than once; the profile is the full
    /// multiplicity histogram.
    AlmostUniversal { profile: Vec<MultiplicityCount> },
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub k: usize,
    pub length: usize,
    pub universe_size: u128,
    /// multiplicity → number of subspaces seen that many times (0 = missing).
    pub multiplicity_histogram: Vec<MultiplicityCount>,
    pub missing: Vec<Subspace>,
    pub duplicated: Vec<Duplicate>,
    pub rank_defects: Vec<usize>,
    pub line_uniformity: LineUniformity,
    pub periodicity: Option<PeriodicityVerdict>,
    pub verdict: Verdict,
}

impl VerificationReport {
    pub fn is_universal(&self) -> bool {
        self.verdict == Verdict::Universal
    }

    /// Subspaces that appear exactly once.
    pub fn exactly_once(&self) -> usize {
        self.multiplicity_histogram
            .iter()
            .find(|h| h.multiplicity == 1)
            .map_or(0, |h| h.count)
    }

    pub fn summary(&self) -> String {
        let verdict = match &self.verdict {
            Verdict::Universal => "universal",
            Verdict::AlmostUniversal { .. } => "almost universal",
            Verdict::Fail => "FAIL",
        };
        format!(
            "k={}: {verdict}, {}/{} exactly once, {} missing, {} duplicated, {} rank-defective",
            self.k,
            self.exactly_once(),
            self.universe_size,
            self.missing.len(),
            self.duplicated.len(),
            self.rank_defects.len()
        )
    }
}

/// Counts every window against the enumerated G_q(k, n).
pub fn verify_universal(seq: &VectorSequence, k: usize) -> Result<VerificationReport, VerifyError> {
    if k < 1 || k > seq.n {
        return Err(VerifyError::WindowSizeOutOfRange { k, n: seq.n });
    }
    if seq.is_empty() {
        return Err(VerifyError::EmptySequence);
    }
    if let Some(p) = seq.vectors.iter().position(|v| v.iter().all(|&c| c == 0)) {
        return Err(VerifyError::ZeroVectorInSequence(p));
    }
    let universe = enumerate_grassmannian(seq.q, seq.n, k)?;
    debug_assert_eq!(universe.len() as u128, gaussian_binomial(seq.n, k, seq.q as u64));

    let mut seen: HashMap<Subspace, Vec<usize>> = HashMap::new();
    let mut rank_defects = Vec::new();
    for (i, w) in seq.windows(k).into_iter().enumerate() {
        if w.dim() < k {
            rank_defects.push(i);
        } else {
            seen.entry(w).or_default().push(i);
        }
    }

    let mut missing = Vec::new();
    let mut duplicated = Vec::new();
    let mut counts = Vec::with_capacity(universe.len());
    let mut matched = 0;
    for s in universe.iter() {
        let positions = seen.get(s);
        let c = positions.map_or(0, Vec::len);
        counts.push(c);
        match positions {
            None => missing.push(s.clone()),
            Some(p) => {
                matched += 1;
                if p.len() > 1 {
                    duplicated.push(Duplicate { subspace: s.clone(), positions: p.clone() });
                }
            }
        }
    }
    if matched != seen.len() {
        let stray = seen
            .iter()
            .filter(|(s, _)| universe.binary_search(s).is_err())
            .flat_map(|(_, p)| p.iter().copied())
            .min()
            .unwrap_or(0);
        return Err(VerifyError::Inconsistent(stray));
    }

    let multiplicity_histogram = histogram(counts);
    let verdict = if !rank_defects.is_empty() || !missing.is_empty() {
        Verdict::Fail
    } else if duplicated.is_empty() {
        Verdict::Universal
    } else {
        Verdict::AlmostUniversal { profile: multiplicity_histogram.clone() }
    };

    Ok(VerificationReport {
        k,
        length: seq.len(),
        universe_size: universe.len() as u128,
        multiplicity_histogram,
        missing,
        duplicated,
        rank_defects,
        line_uniformity: verify_line_uniformity(seq)?,
        periodicity: None,
        verdict,
    })
}

/// Occurrences of each line [v_i] among the sequence entries.
pub fn verify_line_uniformity(seq: &VectorSequence) -> Result<LineUniformity, VerifyError> {
    let lines = enumerate_grassmannian(seq.q, seq.n, 1)?;
    let mut red = Reducer::new(seq.q, seq.n);
    let mut hits: HashMap<Subspace, usize> = HashMap::new();
    for v in &seq.vectors {
        red.reduce(&[v]);
        *hits.entry(red.to_subspace()).or_default() += 1;
    }
    let counts: Vec<LineCount> = lines
        .into_iter()
        .map(|line| {
            let count = hits.get(&line).copied().unwrap_or(0);
            LineCount { line, count }
        })
        .collect();
    let nlines = counts.len();
    let expected = (seq.len() % nlines == 0).then(|| seq.len() / nlines);
    let uniform = expected.is_some_and(|e| counts.iter().all(|c| c.count == e));
    Ok(LineUniformity {
        lines: nlines,
        expected,
        uniform,
        histogram: histogram(counts.iter().map(|c| c.count)),
        counts,
    })
}

/// Checks span{v_{i+r}, v_{i+r−1}} = α·span{v_i, v_{i−1}} at every position.
pub fn verify_periodicity(
    ctx: &FieldContext,
    seq: &VectorSequence,
    period: usize,
) -> Result<PeriodicityVerdict, VerifyError> {
    let len = seq.len();
    let windows = seq.windows(2.min(ctx.n()));
    let alpha = ctx.alpha();
    let mut red = Reducer::new(ctx.q(), ctx.n());
    let mut first_failure = None;
    for i in 0..len {
        let scaled: Vec<Vec<u32>> = windows[i]
            .rows()
            .map(|row| ctx.from_coeffs(row).map(|x| ctx.coeffs(ctx.mul(alpha, x))))
            .collect::<Result<_, _>>()?;
        let refs: Vec<&[u32]> = scaled.iter().map(Vec::as_slice).collect();
        red.reduce(&refs);
        if red.to_subspace() != windows[(i + period) % len] {
            first_failure = Some(i);
            break;
        }
    }
    Ok(PeriodicityVerdict {
        ok: first_failure.is_none(),
        period,
        checked: first_failure.map_or(len, |i| i + 1),
        first_failure,
    })
}

/// [`verify_universal`] on a built cycle, with periodicity filled in.
pub fn verify_cycle(
    ctx: &FieldContext,
    cycle: &UniversalCycle,
    k: usize,
) -> Result<VerificationReport, VerifyError> {
    let seq = VectorSequence::from_cycle(ctx, cycle);
    let mut report = verify_universal(&seq, k)?;
    report.periodicity = Some(verify_periodicity(ctx, &seq, cycle.r())?);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycle::{build_beta_sequence, CycleSpec, SpecSource};
    use crate::orbit::orbit_partition;

    fn gf32_cycle() -> (FieldContext, UniversalCycle) {
        let f = FieldContext::new(2, 5, &[1, 0, 1, 0, 0, 1]).unwrap();
        let p = orbit_partition(&f).unwrap();
        let spec = CycleSpec::new(&f, vec![3, 4, 8, 16, 1], SpecSource::UserSupplied);
        let c = build_beta_sequence(&f, &p, &spec).unwrap();
        (f, c)
    }

    #[test]
    fn worked_example_is_universal() {
        let (f, c) = gf32_cycle();
        let r = verify_cycle(&f, &c, 2).unwrap();
        assert!(r.is_universal());
        assert_eq!(r.exactly_once(), 155);
        assert_eq!(r.multiplicity_histogram, vec![MultiplicityCount { multiplicity: 1, count: 155 }]);
        assert!(r.periodicity.unwrap().ok);
        assert!(r.line_uniformity.uniform);
        assert_eq!(r.line_uniformity.expected, Some(5));
    }

    #[test]
    fn deleting_one_entry_breaks_universality() {
        let (f, c) = gf32_cycle();
        let mut seq = VectorSequence::from_cycle(&f, &c);
        seq.vectors.remove(10);
        let r = verify_universal(&seq, 2).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.missing.len(), 2);
        assert_eq!(r.duplicated.len(), 1);
        assert_eq!(r.duplicated[0].positions.len(), 2);
        let total: usize = r.multiplicity_histogram.iter().map(|h| h.multiplicity * h.count).sum();
        assert_eq!(total + r.rank_defects.len(), 154);
    }

    #[test]
    fn shuffled_sequence_loses_periodicity() {
        let (f, c) = gf32_cycle();
        let mut seq = VectorSequence::from_cycle(&f, &c);
        seq.vectors.swap(3, 40);
        let p = verify_periodicity(&f, &seq, 5).unwrap();
        assert!(!p.ok);
        assert!(p.first_failure.is_some());
    }

    #[test]
    fn repeated_sequence_is_almost_universal() {
        let (f, c) = gf32_cycle();
        let mut seq = VectorSequence::from_cycle(&f, &c);
        let copy = seq.vectors.clone();
        seq.vectors.extend(copy);
        let r = verify_universal(&seq, 2).unwrap();
        assert_eq!(
            r.verdict,
            Verdict::AlmostUniversal { profile: vec![MultiplicityCount { multiplicity: 2, count: 155 }] }
        );
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(
            VectorSequence::new(2, 3, vec![vec![1, 0, 0], vec![0, 0, 0]]),
            Err(VerifyError::ZeroVectorInSequence(1))
        );
        assert_eq!(VectorSequence::new(2, 3, vec![]), Err(VerifyError::EmptySequence));
        let seq = VectorSequence::new(2, 3, vec![vec![1, 0, 0]]).unwrap();
        let r = verify_universal(&seq, 2).unwrap();
        assert_eq!(r.rank_defects, vec![0]);
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.line_uniformity.expected, None);
        assert!(!r.line_uniformity.uniform);
        assert!(matches!(verify_universal(&seq, 4), Err(VerifyError::WindowSizeOutOfRange { .. })));
    }
}
