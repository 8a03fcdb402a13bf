//! Subspaces of F_q^n in reduced row-echelon form.
//!
//! This module is deliberately independent of the extension-field and orbit
//! machinery: it only sees coefficient vectors over the prime field, which is
//! what lets the verifier use it as an oracle.

use itertools::Itertools;
use serde::ser::{Serialize, SerializeSeq, Serializer};
use thiserror::Error;

use crate::field::inv_mod;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrassmannError {
    #[error("all spanning vectors are zero")]
    ZeroSpan,
    #[error("dimension {k} out of range for ambient dimension {n}")]
    DimensionOutOfRange { k: usize, n: usize },
    #[error("vector {vector:?} is not an element of F_{q}^{n}")]
    BadVector { vector: Vec<u32>, q: u32, n: usize },
}

/// A point of G_q(k, n), stored as its RREF basis (row-major, k rows of length n).
///
/// Equality is equality of subspaces. The derived order is lexicographic on
/// the RREF matrix for fixed `(n, k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    n: usize,
    k: usize,
    rows: Vec<u32>,
}

impl Subspace {
    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.rows.chunks(self.n.max(1)).take(self.k)
    }

    pub fn basis(&self) -> Vec<Vec<u32>> {
        self.rows().map(<[u32]>::to_vec).collect()
    }

    /// Pivot column of each row.
    pub fn pivots(&self) -> Vec<usize> {
        self.rows()
            .map(|r| r.iter().position(|&c| c != 0).expect("RREF rows are nonzero"))
            .collect()
    }

    /// Whether `v` lies in the subspace.
    pub fn contains(&self, q: u32, v: &[u32]) -> bool {
        // reduce v against the RREF basis; in RREF the pivot coefficient of v
        // is the multiple of that row to subtract
        let mut r = v.to_vec();
        for (row, p) in self.rows().zip(self.pivots()) {
            let c = r[p];
            if c != 0 {
                for (x, &b) in r.iter_mut().zip(row) {
                    *x = (*x + q - c * b % q) % q;
                }
            }
        }
        r.iter().all(|&x| x == 0)
    }
}

impl Serialize for Subspace {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.k))?;
        for row in self.rows() {
            seq.serialize_element(row)?;
        }
        seq.end()
    }
}

/// Reusable Gaussian-elimination workspace over F_q.
#[derive(Debug, Clone)]
pub struct Reducer {
    q: u32,
    n: usize,
    inv: Vec<u32>,
    buf: Vec<u32>,
    rank: usize,
}

impl Reducer {
    pub fn new(q: u32, n: usize) -> Self {
        let inv = (0..q).map(|a| if a == 0 { 0 } else { inv_mod(a, q) }).collect();
        Reducer { q, n, inv, buf: Vec::new(), rank: 0 }
    }

    /// Loads `count` rows, the i-th filled by `fill(i, row)`, and reduces them.
    /// Returns the rank.
    pub fn reduce_with(&mut self, count: usize, mut fill: impl FnMut(usize, &mut [u32])) -> usize {
        let n = self.n;
        self.buf.clear();
        self.buf.resize(count * n, 0);
        for (i, row) in self.buf.chunks_mut(n.max(1)).enumerate().take(count) {
            fill(i, row);
        }
        self.rank = self.eliminate(count);
        self.rank
    }

    pub fn reduce(&mut self, vectors: &[&[u32]]) -> usize {
        self.reduce_with(vectors.len(), |i, row| row.copy_from_slice(vectors[i]))
    }

    /// RREF of the last reduction, `rank` rows.
    pub fn echelon(&self) -> &[u32] {
        &self.buf[..self.rank * self.n]
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn to_subspace(&self) -> Subspace {
        Subspace { n: self.n, k: self.rank, rows: self.echelon().to_vec() }
    }

    fn eliminate(&mut self, count: usize) -> usize {
        let (q, n) = (self.q, self.n);
        let buf = &mut self.buf;
        let mut r = 0;
        for c in 0..n {
            if r == count {
                break;
            }
            let Some(p) = (r..count).find(|&i| buf[i * n + c] != 0) else {
                continue;
            };
            if p != r {
                for j in 0..n {
                    buf.swap(p * n + j, r * n + j);
                }
            }
            let s = self.inv[buf[r * n + c] as usize];
            if s != 1 {
                for j in c..n {
                    buf[r * n + j] = buf[r * n + j] * s % q;
                }
            }
            for i in 0..count {
                if i == r {
                    continue;
                }
                let f = buf[i * n + c];
                if f == 0 {
                    continue;
                }
                for j in c..n {
                    let v = buf[r * n + j];
                    if v != 0 {
                        buf[i * n + j] = (buf[i * n + j] + q - f * v % q) % q;
                    }
                }
            }
            r += 1;
        }
        r
    }
}

/// The canonical (RREF) form of the F_q-span of `vectors`.
pub fn span<V: AsRef<[u32]>>(q: u32, n: usize, vectors: &[V]) -> Result<Subspace, GrassmannError> {
    for v in vectors {
        let v = v.as_ref();
        if v.len() != n || v.iter().any(|&c| c >= q) {
            return Err(GrassmannError::BadVector { vector: v.to_vec(), q, n });
        }
    }
    let mut red = Reducer::new(q, n);
    let refs: Vec<&[u32]> = vectors.iter().map(AsRef::as_ref).collect();
    if red.reduce(&refs) == 0 {
        return Err(GrassmannError::ZeroSpan);
    }
    Ok(red.to_subspace())
}

/// All k-dimensional subspaces of F_q^n, each exactly once, sorted.
///
/// Built directly from pivot patterns: every choice of pivot columns and every
/// assignment of the free entries gives a distinct RREF matrix.
pub fn enumerate_grassmannian(q: u32, n: usize, k: usize) -> Result<Vec<Subspace>, GrassmannError> {
    if k > n {
        return Err(GrassmannError::DimensionOutOfRange { k, n });
    }
    let mut out = Vec::new();
    for pivots in (0..n).combinations(k) {
        // free slots: (row, col) with col > pivot of row and col not a pivot
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(row, &p)| {
                let pivots = &pivots;
                (p + 1..n).filter(move |c| !pivots.contains(c)).map(move |c| (row, c))
            })
            .collect();
        let mut base = vec![0u32; k * n];
        for (row, &p) in pivots.iter().enumerate() {
            base[row * n + p] = 1;
        }
        let mut digits = vec![0u32; free.len()];
        loop {
            let mut rows = base.clone();
            for (&(row, c), &d) in free.iter().zip(&digits) {
                rows[row * n + c] = d;
            }
            out.push(Subspace { n, k, rows });
            // odometer increment over the free entries
            let mut i = 0;
            while i < digits.len() {
                digits[i] += 1;
                if digits[i] < q {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
            if i == digits.len() {
                break;
            }
        }
    }
    out.sort();
    Ok(out)
}

/// |G_q(k, n)|, the Gaussian binomial coefficient. Zero when k > n.
///
/// Panics if the result does not fit in a `u128`.
pub fn gaussian_binomial(n: usize, k: usize, q: u64) -> u128 {
    if k > n {
        return 0;
    }
    let q = q as u128;
    let k = k.min(n - k);
    // [m, j] = [m-1, j-1] · (q^m − 1)/(q^j − 1), exact at every step
    let mut acc: u128 = 1;
    for j in 1..=k {
        let m = n - k + j;
        let num = q.checked_pow(m as u32).expect("gaussian binomial overflow") - 1;
        let den = q.pow(j as u32) - 1;
        acc = acc.checked_mul(num).expect("gaussian binomial overflow") / den;
    }
    acc
}
