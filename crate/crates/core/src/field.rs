//! Arithmetic in the prime field F_p.

use crate::error::{Error, Result};

/// The prime field F_p with `p < 2^31`. Elements are canonical residues in `0..p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp {
    p: u32,
}

impl Fp {
    pub fn new(p: u32) -> Result<Self> {
        if !is_prime(p as u64) || p >= 1 << 31 {
            return Err(Error::NotPrime(p as u64));
        }
        Ok(Fp { p })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn reduce(&self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        (s % self.p as u64) as u32
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.p - b % self.p)
    }

    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a % self.p;
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Inverse of a nonzero element.
    pub fn inv(&self, a: u32) -> u32 {
        assert!(a % self.p != 0, "inverse of zero in F_{}", self.p);
        self.pow(a, self.p as u64 - 2)
    }

    /// `(-1)^e` as a field element.
    pub fn sign(&self, odd: bool) -> u32 {
        if odd {
            self.neg(1)
        } else {
            1 % self.p
        }
    }

    /// Binomial coefficient reduced mod p, by Lucas' theorem.
    pub fn binom(&self, n: u64, k: u64) -> u32 {
        if k > n {
            return 0;
        }
        let p = self.p as u64;
        let (mut n, mut k) = (n, k);
        let mut acc = 1u32;
        while n > 0 || k > 0 {
            let (nd, kd) = (n % p, k % p);
            if kd > nd {
                return 0;
            }
            acc = self.mul(acc, self.small_binom(nd, kd));
            n /= p;
            k /= p;
        }
        acc
    }

    fn small_binom(&self, n: u64, k: u64) -> u32 {
        let mut num = 1u32;
        let mut den = 1u32;
        for i in 0..k {
            num = self.mul(num, ((n - i) % self.p as u64) as u32);
            den = self.mul(den, ((i + 1) % self.p as u64) as u32);
        }
        self.mul(num, self.inv(den))
    }

    /// `n!` mod p.
    pub fn factorial(&self, n: u64) -> u32 {
        let mut acc = 1 % self.p;
        for i in 1..=n {
            acc = self.mul(acc, (i % self.p as u64) as u32);
        }
        acc
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composites() {
        assert!(Fp::new(4).is_err());
        assert!(Fp::new(1).is_err());
        assert!(Fp::new(7).is_ok());
    }

    #[test]
    fn lucas_matches_direct() {
        let f = Fp::new(3).unwrap();
        let mut row = vec![1u64];
        for n in 1..30u64 {
            let mut next = vec![1u64; n as usize + 1];
            for k in 1..n as usize {
                next[k] = (row[k - 1] + row[k]) % 3;
            }
            row = next;
            for k in 0..=n {
                assert_eq!(f.binom(n, k) as u64, row[k as usize] % 3);
            }
        }
    }

    #[test]
    fn inverses() {
        let f = Fp::new(5).unwrap();
        for a in 1..5 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
        }
    }
}
