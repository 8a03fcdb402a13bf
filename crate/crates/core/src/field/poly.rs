//! Dense polynomials over a prime field, ascending coefficient order.
//!
//! Only what the context constructor needs: reduction, multiplication modulo
//! a monic polynomial, powering and gcd.

pub(crate) type Poly = Vec<u32>;

pub(crate) fn inv_mod(a: u32, q: u32) -> u32 {
    debug_assert!(a % q != 0);
    pow_mod(a as u64, (q - 2) as u64, q as u64) as u32
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

pub(crate) fn trim(p: &mut Poly) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

pub(crate) fn degree(p: &[u32]) -> Option<usize> {
    p.iter().rposition(|&c| c != 0)
}

/// `a mod f` for monic `f`.
pub(crate) fn rem(a: &[u32], f: &[u32], q: u32) -> Poly {
    let df = f.len() - 1;
    let mut r: Poly = a.to_vec();
    trim(&mut r);
    while r.len() > df {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - df;
        for (i, &fc) in f.iter().enumerate() {
            let idx = shift + i;
            r[idx] = (r[idx] + q - (lead * fc) % q) % q;
        }
        trim(&mut r);
    }
    r
}

pub(crate) fn mul_mod(a: &[u32], b: &[u32], f: &[u32], q: u32) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % q;
        }
    }
    rem(&out, f, q)
}

pub(crate) fn pow_poly_mod(base: &[u32], mut exp: u64, f: &[u32], q: u32) -> Poly {
    let mut acc: Poly = vec![1];
    let mut b = rem(base, f, q);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(&acc, &b, f, q);
        }
        b = mul_mod(&b, &b, f, q);
        exp >>= 1;
    }
    acc
}

pub(crate) fn sub(a: &[u32], b: &[u32], q: u32) -> Poly {
    let len = a.len().max(b.len());
    let mut out: Poly = (0..len)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + q - y) % q
        })
        .collect();
    trim(&mut out);
    out
}

/// Monic gcd.
pub(crate) fn gcd(a: &[u32], b: &[u32], q: u32) -> Poly {
    let mut x: Poly = a.to_vec();
    let mut y: Poly = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let lead_inv = inv_mod(*y.last().unwrap(), q);
        let monic: Poly = y.iter().map(|&c| c * lead_inv % q).collect();
        let r = rem(&x, &monic, q);
        x = monic;
        y = r;
    }
    if let Some(&lead) = x.last() {
        let li = inv_mod(lead, q);
        x.iter_mut().for_each(|c| *c = *c * li % q);
    }
    x
}

/// Distinct prime factors by trial division.
pub(crate) fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            out.push(p);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

pub(crate) fn is_prime(m: u64) -> bool {
    m >= 2 && prime_factors(m) == [m]
}

/// Irreducibility of a monic `f` of degree `n` over F_q: `x^{q^n} = x` mod f and
/// `gcd(x^{q^{n/p}} - x, f) = 1` for each prime `p | n`.
pub(crate) fn is_irreducible(f: &[u32], q: u32) -> bool {
    let n = f.len() - 1;
    if f[0] == 0 {
        return false;
    }
    let x: Poly = vec![0, 1];
    let frob_iter = |times: usize| {
        let mut cur = rem(&x, f, q);
        for _ in 0..times {
            cur = pow_poly_mod(&cur, q as u64, f, q);
        }
        cur
    };
    if sub(&frob_iter(n), &rem(&x, f, q), q) != Vec::<u32>::new() {
        return false;
    }
    prime_factors(n as u64).into_iter().all(|p| {
        let h = sub(&frob_iter(n / p as usize), &x, q);
        gcd(&h, f, q) == vec![1]
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn irreducibility_small_binary() {
        assert!(is_irreducible(&[1, 1, 1], 2));
        assert!(!is_irreducible(&[1, 0, 1], 2));
        assert!(is_irreducible(&[1, 1, 1, 1, 1], 2));
        assert!(!is_irreducible(&[1, 0, 0, 1, 1, 0, 1], 2)); // x = 1 is a root
    }

    #[test]
    fn brute_force_agrees_on_degree_4_binary() {
        // brute force: no root and not divisible by the unique irreducible quadratic
        for bits in 0u32..16 {
            let mut f: Poly = (0..4).map(|i| (bits >> i) & 1).collect();
            f.push(1);
            let has_root = f[0] == 0 || f.iter().sum::<u32>() % 2 == 0;
            let div_quad = rem(&f, &[1, 1, 1], 2).is_empty();
            assert_eq!(is_irreducible(&f, 2), !has_root && !div_quad, "{f:?}");
        }
    }

    #[test]
    fn factors() {
        assert_eq!(prime_factors(242), vec![2, 11]);
        assert_eq!(prime_factors(31), vec![31]);
        assert!(is_prime(3));
        assert!(!is_prime(4));
    }
}
