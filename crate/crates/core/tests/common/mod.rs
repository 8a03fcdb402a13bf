//! Slow, table-free reference arithmetic used to cross-check the library.
//!
//! Elements of F_q[x]/(f) are plain coefficient vectors; powers of x come from
//! repeated shift-and-reduce; a subspace is the full set of its vectors.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

pub struct Oracle {
    pub q: u32,
    pub n: usize,
    /// Monic modulus, ascending, length n + 1.
    pub f: Vec<u32>,
    /// x^e for e = 0..q^n − 1.
    pub powers: Vec<Vec<u32>>,
}

impl Oracle {
    pub fn new(q: u32, n: usize, f: &[u32]) -> Self {
        assert_eq!(f.len(), n + 1);
        assert_eq!(f[n], 1, "oracle expects a monic modulus");
        let order = (q as usize).pow(n as u32) - 1;
        let mut powers = Vec::with_capacity(order);
        let mut cur = vec![0u32; n];
        cur[0] = 1;
        for _ in 0..order {
            powers.push(cur.clone());
            cur = times_x(q, f, &cur);
        }
        assert_eq!(cur[0], 1, "x^(q^n-1) must be 1");
        assert!(cur[1..].iter().all(|&c| c == 0));
        Oracle { q, n, f: f.to_vec(), powers }
    }

    pub fn order(&self) -> usize {
        self.powers.len()
    }

    pub fn times_x(&self, v: &[u32]) -> Vec<u32> {
        times_x(self.q, &self.f, v)
    }

    pub fn power(&self, e: u64) -> Vec<u32> {
        self.powers[(e % self.order() as u64) as usize].clone()
    }

    /// Whether x^e lies in F_q (only the constant coefficient is nonzero).
    pub fn is_scalar_power(&self, e: u64) -> bool {
        self.power(e)[1..].iter().all(|&c| c == 0)
    }

    pub fn key(&self, v: &[u32]) -> u64 {
        v.iter().rev().fold(0u64, |acc, &c| acc * self.q as u64 + c as u64)
    }

    /// Every F_q-linear combination of `vectors`, as keys.
    pub fn span_set(&self, vectors: &[Vec<u32>]) -> BTreeSet<u64> {
        let mut set = BTreeSet::from([0u64]);
        let mut all = vec![vec![0u32; self.n]];
        for v in vectors {
            let mut next = Vec::new();
            for base in &all {
                for c in 1..self.q {
                    let w: Vec<u32> = base.iter().zip(v).map(|(&a, &b)| (a + c * b) % self.q).collect();
                    if set.insert(self.key(&w)) {
                        next.push(w);
                    }
                }
            }
            all.extend(next);
        }
        set
    }

    /// Span sets of the cyclic windows {v_i, v_{i−1}, …, v_{i−k+1}}.
    pub fn window_sets(&self, seq: &[Vec<u32>], k: usize) -> Vec<BTreeSet<u64>> {
        let len = seq.len();
        (0..len)
            .map(|i| {
                let vs: Vec<Vec<u32>> = (0..k).map(|j| seq[(i + len * k - j) % len].clone()).collect();
                self.span_set(&vs)
            })
            .collect()
    }

    /// (distinct full-rank windows, windows of deficient rank, multiplicity counts).
    pub fn window_census(&self, seq: &[Vec<u32>], k: usize) -> (usize, usize, HashMap<BTreeSet<u64>, usize>) {
        let full = (self.q as usize).pow(k as u32);
        let mut counts = HashMap::new();
        let mut defects = 0;
        for w in self.window_sets(seq, k) {
            if w.len() != full {
                defects += 1;
                continue;
            }
            *counts.entry(w).or_insert(0) += 1;
        }
        (counts.len(), defects, counts)
    }
}

fn times_x(q: u32, f: &[u32], v: &[u32]) -> Vec<u32> {
    let n = v.len();
    let top = v[n - 1];
    let mut out = vec![0u32; n];
    out[1..n].copy_from_slice(&v[..n - 1]);
    for i in 0..n {
        out[i] = (out[i] + q * q - top * f[i] % q) % q;
    }
    out
}

/// ∏_{i<k} (q^{n−i} − 1)/(q^{i+1} − 1).
pub fn gaussian_product(n: u32, k: u32, q: u128) -> u128 {
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..k {
        num *= q.pow(n - i) - 1;
        den *= q.pow(i + 1) - 1;
    }
    assert_eq!(num % den, 0);
    num / den
}

/// β_i exponents by prefix sums, independently of the library.
pub fn beta_exponents(reps: &[u64], len: usize, order: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(len);
    let mut cur = 0u64;
    for i in 0..len {
        out.push(cur);
        cur = (cur + reps[i % reps.len()]) % order;
    }
    out
}
