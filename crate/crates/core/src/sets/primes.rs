//! Primality and prime enumeration.

use crate::error::{Error, Result};

/// Largest upper end accepted by [`primes_in`].
pub const PRIME_RANGE_LIMIT: u64 = 1 << 40;

const SEGMENT: u64 = 1 << 18;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin; exact on all of `u64`.
pub fn is_prime(n: u64) -> bool {
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for p in SMALL {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes up to `n` inclusive by the plain sieve.
pub fn small_primes(n: u64) -> Vec<u64> {
    let n = n as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Primes in `[lo, hi)`, ascending, by a segmented sieve.
pub fn primes_in(lo: u64, hi: u64) -> Result<Vec<u64>> {
    if hi > PRIME_RANGE_LIMIT {
        return Err(Error::Resource(format!(
            "prime range end {hi} exceeds 2^40"
        )));
    }
    let lo = lo.max(2);
    if hi <= lo {
        return Ok(Vec::new());
    }
    let base = small_primes((hi as f64).sqrt() as u64 + 1);
    let mut out = Vec::new();
    let mut start = lo;
    let mut seg = vec![true; SEGMENT as usize];
    while start < hi {
        let end = (start + SEGMENT).min(hi);
        let len = (end - start) as usize;
        seg[..len].fill(true);
        for &p in &base {
            if p * p >= end {
                break;
            }
            let mut m = (start.div_ceil(p) * p).max(p * p);
            while m < end {
                seg[(m - start) as usize] = false;
                m += p;
            }
        }
        out.extend((0..len).filter(|&i| seg[i]).map(|i| start + i as u64));
        start = end;
    }
    Ok(out)
}

/// Primality lookups that are cheap on a sieved prefix and exact beyond it.
#[derive(Clone, Debug)]
pub struct PrimeTable {
    bits: Vec<u64>,
    limit: u64,
}

impl PrimeTable {
    pub fn new(limit: u64) -> Self {
        let limit = limit.max(2);
        let mut bits = vec![0u64; (limit as usize >> 6) + 1];
        for p in small_primes(limit) {
            bits[(p >> 6) as usize] |= 1 << (p & 63);
        }
        PrimeTable { bits, limit }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn is_prime(&self, n: u64) -> bool {
        if n <= self.limit {
            self.bits[(n >> 6) as usize] >> (n & 63) & 1 == 1
        } else {
            is_prime(n)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert_eq!(primes_in(2, 10).unwrap(), vec![2, 3, 5, 7]);
        assert_eq!(primes_in(4, 8).unwrap(), vec![5, 7]);
        assert!(primes_in(0, 2).unwrap().is_empty());
        assert!(is_prime(2) && is_prime(3) && !is_prime(1) && !is_prime(91));
        assert!(is_prime(18446744073709551557));
        assert!(!is_prime(3215031751));
    }

    #[test]
    fn sieves_agree_across_segments() {
        let lo = SEGMENT - 1000;
        let hi = 3 * SEGMENT + 77;
        let seg = primes_in(lo, hi).unwrap();
        let plain: Vec<u64> = small_primes(hi - 1).into_iter().filter(|&p| p >= lo).collect();
        assert_eq!(seg, plain);
        assert!(seg.iter().all(|&p| is_prime(p)));
    }

    #[test]
    fn table_matches_miller_rabin() {
        let t = PrimeTable::new(5000);
        for n in 0..6000 {
            assert_eq!(t.is_prime(n), is_prime(n), "{n}");
        }
    }

    #[test]
    fn range_limit() {
        assert!(matches!(
            primes_in(PRIME_RANGE_LIMIT, PRIME_RANGE_LIMIT + 10),
            Err(Error::Resource(_))
        ));
    }
}
