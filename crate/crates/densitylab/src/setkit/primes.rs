//! Primality and prime counting on a bounded range.

use std::sync::OnceLock;

/// Upper end of the sieve table.
pub const SIEVE_LIMIT: u64 = 10_000_000;

struct Sieve {
    bits: Vec<u64>,
    /// `cum[w]` = number of primes below `64·w`.
    cum: Vec<u32>,
}

fn sieve() -> &'static Sieve {
    static TABLE: OnceLock<Sieve> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = SIEVE_LIMIT as usize + 1;
        let mut composite = vec![false; n];
        composite[0] = true;
        composite[1] = true;
        let mut p = 2;
        while p * p < n {
            if !composite[p] {
                let mut q = p * p;
                while q < n {
                    composite[q] = true;
                    q += p;
                }
            }
            p += 1;
        }
        let words = n.div_ceil(64);
        let mut bits = vec![0u64; words];
        for (i, c) in composite.iter().enumerate() {
            if !c {
                bits[i / 64] |= 1 << (i % 64);
            }
        }
        let mut cum = Vec::with_capacity(words + 1);
        let mut acc = 0u32;
        for w in &bits {
            cum.push(acc);
            acc += w.count_ones();
        }
        cum.push(acc);
        Sieve { bits, cum }
    })
}

/// `π(n)` for `n ≤ SIEVE_LIMIT`.
pub fn prime_pi(n: u64) -> Option<u64> {
    if n > SIEVE_LIMIT {
        return None;
    }
    let s = sieve();
    let w = (n / 64) as usize;
    let b = n % 64;
    let mask = if b == 63 { u64::MAX } else { (1u64 << (b + 1)) - 1 };
    Some(s.cum[w] as u64 + (s.bits[w] & mask).count_ones() as u64)
}

/// Sieve lookup, `None` above [`SIEVE_LIMIT`].
pub fn sieve_contains(x: u64) -> Option<bool> {
    (x <= SIEVE_LIMIT).then(|| sieve().bits[(x / 64) as usize] >> (x % 64) & 1 == 1)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin, exact on all of `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'outer: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}
