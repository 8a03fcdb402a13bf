//! Arithmetic in a prime field F_q and its extension E = F_{q^n}.
//!
//! E is presented as F_q[x]/(f) for a primitive polynomial f, so the class of
//! x (written α) generates E^×. Elements are stored as packed coefficient
//! vectors (base-q digits, digit `i` is the coefficient of x^i) and the
//! multiplicative structure goes through exponent/log tables. Everything is
//! table-driven, which limits contexts to q^n ≤ 2^24.

mod poly;

use std::fmt;

use thiserror::Error;

pub(crate) use poly::inv_mod;

/// Exponent of α, always reduced into `[0, q^n - 1)`.
pub type Exponent = u32;

/// Largest supported extension field, in elements.
pub const MAX_FIELD_SIZE: u64 = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("base field modulus {0} is not prime")]
    NonPrimeModulus(u64),
    #[error("base field order {0} is a prime power; only prime base fields are supported")]
    PrimePowerBaseField(u64),
    #[error("polynomial must have degree {expected}, found {found:?}")]
    WrongDegree { expected: usize, found: Option<usize> },
    #[error("extension degree must be at least 2, got {0}")]
    DegreeTooSmall(usize),
    #[error("field of size {q}^{n} exceeds the supported table size 2^24")]
    FieldTooLarge { q: u64, n: usize },
    #[error("polynomial {0:?} is reducible over the base field")]
    NotIrreducible(Vec<u32>),
    #[error("polynomial {poly:?} is irreducible but its root has order {order} < {group_order}")]
    NotPrimitive {
        poly: Vec<u32>,
        order: u64,
        group_order: u64,
    },
    #[error("division by zero")]
    DivisionByZero,
    #[error("discrete logarithm of zero")]
    LogOfZero,
    #[error("coefficient vector {0:?} does not describe an element of this field")]
    InvalidCoefficients(Vec<u32>),
    #[error("cannot parse field element {0:?}")]
    Parse(String),
}

/// An element of E as a packed coefficient vector.
///
/// The value is only meaningful together with the [`FieldContext`] it came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Raw packed value: `Σ c_i q^i`.
    pub fn packed(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Parameters and tables of F_q and E = F_{q^n}. Immutable once built.
#[derive(Clone)]
pub struct FieldContext {
    q: u32,
    n: usize,
    modulus: Vec<u32>,
    size: u32,
    group_order: u32,
    gamma_order: u32,
    exp_table: Vec<FieldElement>,
    log_table: Vec<Exponent>,
}

impl fmt::Debug for FieldContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldContext")
            .field("q", &self.q)
            .field("n", &self.n)
            .field("modulus", &self.modulus)
            .finish_non_exhaustive()
    }
}

const NO_LOG: Exponent = Exponent::MAX;

impl FieldContext {
    /// Builds the context for F_q[x]/(poly), verifying that `poly` is primitive.
    ///
    /// `poly` is given in ascending order (constant term first). Coefficients
    /// are reduced mod q and a non-monic polynomial is normalized.
    pub fn new(q: u64, n: usize, poly: &[u64]) -> Result<Self, FieldError> {
        if !poly::is_prime(q) {
            let factors = poly::prime_factors(q);
            return Err(if q >= 2 && factors.len() == 1 {
                FieldError::PrimePowerBaseField(q)
            } else {
                FieldError::NonPrimeModulus(q)
            });
        }
        if n < 2 {
            return Err(FieldError::DegreeTooSmall(n));
        }
        let size = (q as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if size > MAX_FIELD_SIZE as u128 {
            return Err(FieldError::FieldTooLarge { q, n });
        }
        let q32 = q as u32;
        let mut f: Vec<u32> = poly.iter().map(|&c| (c % q) as u32).collect();
        poly::trim(&mut f);
        let deg = poly::degree(&f);
        if deg != Some(n) {
            return Err(FieldError::WrongDegree { expected: n, found: deg });
        }
        let lead_inv = poly::inv_mod(f[n], q32);
        f.iter_mut().for_each(|c| *c = *c * lead_inv % q32);

        if !poly::is_irreducible(&f, q32) {
            return Err(FieldError::NotIrreducible(f));
        }

        let size = size as u32;
        let group_order = size - 1;
        let x = [0u32, 1];
        for p in poly::prime_factors(group_order as u64) {
            let t = poly::pow_poly_mod(&x, group_order as u64 / p, &f, q32);
            if t == [1] {
                let order = element_order(&f, q32, group_order as u64);
                return Err(FieldError::NotPrimitive {
                    poly: f,
                    order,
                    group_order: group_order as u64,
                });
            }
        }

        let (exp_table, log_table) = build_tables(&f, q32, n, size);
        Ok(FieldContext {
            q: q32,
            n,
            modulus: f,
            size,
            group_order,
            gamma_order: group_order / (q32 - 1),
            exp_table,
            log_table,
        })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Monic modulus, ascending.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// q^n.
    pub fn size(&self) -> u32 {
        self.size
    }

    /// |E^×| = q^n − 1.
    pub fn group_order(&self) -> u32 {
        self.group_order
    }

    /// |Γ| = |E^×/F^×| = (q^n − 1)/(q − 1).
    pub fn gamma_order(&self) -> u32 {
        self.gamma_order
    }

    /// Exponents e with α^e ∈ F^×: the multiples of `gamma_order`.
    pub fn fstar_exponents(&self) -> Vec<Exponent> {
        (0..self.q - 1).map(|j| j * self.gamma_order).collect()
    }

    pub fn is_fstar_exponent(&self, e: Exponent) -> bool {
        e % self.gamma_order == 0
    }

    /// Whether α^e lies in the coset αF^×.
    pub fn is_alpha_coset_exponent(&self, e: Exponent) -> bool {
        (e + self.group_order - 1) % self.group_order % self.gamma_order == 0
    }

    pub fn alpha(&self) -> FieldElement {
        self.exp_table[1 % self.group_order as usize]
    }

    /// α^e for any integer exponent (reduced mod q^n − 1).
    pub fn alpha_pow(&self, e: i64) -> FieldElement {
        let m = self.group_order as i64;
        self.exp_table[e.rem_euclid(m) as usize]
    }

    /// The base-field scalar `c` embedded as a constant polynomial.
    pub fn scalar(&self, c: u32) -> FieldElement {
        FieldElement(c % self.q)
    }

    pub fn is_in_base_field(&self, x: FieldElement) -> bool {
        x.0 < self.q
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.q == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        self.digitwise(a, b, |x, y| (x + y) % self.q)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.q == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        self.digitwise(a, b, |x, y| (x + self.q - y) % self.q)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        self.sub(FieldElement::ZERO, a)
    }

    /// Multiplies by a base-field scalar coefficient-wise.
    pub fn scale(&self, c: u32, a: FieldElement) -> FieldElement {
        let c = c % self.q;
        self.digitwise(a, FieldElement::ZERO, |x, _| x * c % self.q)
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.is_zero() || b.is_zero() {
            return FieldElement::ZERO;
        }
        let e = self.log_table[a.0 as usize] + self.log_table[b.0 as usize];
        self.exp_table[(e % self.group_order) as usize]
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let e = self.log_table[a.0 as usize];
        Ok(self.exp_table[((self.group_order - e) % self.group_order) as usize])
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        if a.is_zero() {
            return FieldElement::ZERO;
        }
        let l = self.log_table[a.0 as usize] as u64;
        let m = self.group_order as u64;
        self.exp_table[(l * (e % m) % m) as usize]
    }

    /// x ↦ x^q.
    pub fn frobenius(&self, x: FieldElement) -> FieldElement {
        self.pow(x, self.q as u64)
    }

    pub fn discrete_log(&self, x: FieldElement) -> Result<Exponent, FieldError> {
        match self.log_table[x.0 as usize] {
            NO_LOG => Err(FieldError::LogOfZero),
            e => Ok(e),
        }
    }

    /// Coefficient vector of `x`, ascending, length n.
    pub fn coeffs(&self, x: FieldElement) -> Vec<u32> {
        let mut v = x.0;
        (0..self.n)
            .map(|_| {
                let d = v % self.q;
                v /= self.q;
                d
            })
            .collect()
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement, FieldError> {
        if coeffs.len() != self.n || coeffs.iter().any(|&c| c >= self.q) {
            return Err(FieldError::InvalidCoefficients(coeffs.to_vec()));
        }
        Ok(FieldElement(
            coeffs.iter().rev().fold(0u32, |acc, &c| acc * self.q + c),
        ))
    }

    /// Every element of E, in packed order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.size).map(FieldElement)
    }

    /// Parses either `a^e` (also `α^e`, `0`) or a coefficient list such as
    /// `[1,0,1,0,0]` / `1,0,1,0,0`.
    pub fn parse_element(&self, s: &str) -> Result<FieldElement, FieldError> {
        let t = s.trim();
        let err = || FieldError::Parse(s.to_string());
        if let Some(rest) = t.strip_prefix("a^").or_else(|| t.strip_prefix("α^")) {
            let e: i64 = rest.trim().parse().map_err(|_| err())?;
            return Ok(self.alpha_pow(e));
        }
        if t == "0" {
            return Ok(FieldElement::ZERO);
        }
        let inner = t.trim_start_matches('[').trim_end_matches(']');
        let digits = inner
            .split(',')
            .map(|d| d.trim().parse::<u32>().map_err(|_| err()))
            .collect::<Result<Vec<_>, _>>()?;
        self.from_coeffs(&digits)
    }

    /// `a^e` form, or `0`.
    pub fn format_exponent(&self, x: FieldElement) -> String {
        match self.discrete_log(x) {
            Ok(e) => format!("a^{e}"),
            Err(_) => "0".to_string(),
        }
    }

    fn digitwise(
        &self,
        a: FieldElement,
        b: FieldElement,
        op: impl Fn(u32, u32) -> u32,
    ) -> FieldElement {
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.n {
            out += op(x % self.q, y % self.q) * place;
            x /= self.q;
            y /= self.q;
            place = place.wrapping_mul(self.q);
        }
        FieldElement(out)
    }
}

fn element_order(f: &[u32], q: u32, group_order: u64) -> u64 {
    let x = [0u32, 1];
    let mut order = group_order;
    for p in poly::prime_factors(group_order) {
        while order % p == 0 && poly::pow_poly_mod(&x, order / p, f, q) == [1] {
            order /= p;
        }
    }
    order
}

fn build_tables(f: &[u32], q: u32, n: usize, size: u32) -> (Vec<FieldElement>, Vec<Exponent>) {
    let group_order = size - 1;
    let mut exp_table = Vec::with_capacity(group_order as usize);
    let mut log_table = vec![NO_LOG; size as usize];
    let mut digits = vec![0u32; n];
    digits[0] = 1;
    for e in 0..group_order {
        let packed = digits.iter().rev().fold(0u32, |acc, &c| acc * q + c);
        debug_assert_eq!(log_table[packed as usize], NO_LOG);
        log_table[packed as usize] = e;
        exp_table.push(FieldElement(packed));
        // multiply by x, then reduce with x^n = -Σ f_i x^i
        let top = digits[n - 1];
        digits.rotate_right(1);
        digits[0] = 0;
        for i in 0..n {
            digits[i] = (digits[i] + q - top * f[i] % q) % q;
        }
    }
    (exp_table, log_table)
}
