//! Base-p digit combinatorics on `S_{p^n} = {0, .., p^n - 1}`.
//!
//! Digits are indexed the way the scaffold literature does it: an element
//! `s` has digits `s_(n-1), .., s_(0)` with `s = sum s_(j) p^j`, and the
//! "i-th" digit in scaffold order is `s_(n-i)`. [`DigitVector`] stores them
//! most-significant first and offers accessors for both conventions.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Largest `p^n` accepted anywhere in the crate.
pub const MAX_MODULUS: u64 = 1 << 32;

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p < 4 {
        return true;
    }
    if p.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// The pair `(p, n)` together with the modulus `p^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Radix {
    p: u64,
    n: u32,
    modulus: u64,
}

impl Radix {
    pub fn new(p: u64, n: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if n == 0 {
            return domain("rank n must be at least 1");
        }
        let modulus = p
            .checked_pow(n)
            .filter(|&m| m <= MAX_MODULUS)
            .ok_or_else(|| Error::TooLarge(format!("{p}^{n} exceeds {MAX_MODULUS}")))?;
        Ok(Radix { p, n, modulus })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    /// `p^n`.
    #[inline]
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `p^j` for `0 <= j <= n`.
    #[inline]
    pub fn pow(&self, j: u32) -> u64 {
        debug_assert!(j <= self.n);
        self.p.pow(j)
    }

    pub fn contains(&self, s: u64) -> bool {
        s < self.modulus
    }

    pub fn check(&self, s: u64) -> Result<u64> {
        if self.contains(s) {
            Ok(s)
        } else {
            domain(format!("{s} is outside S_{{{}}}", self.modulus))
        }
    }

    /// Least non-negative residue `r(a)` of `a` modulo `p^n`.
    #[inline]
    pub fn residue(&self, a: i64) -> u64 {
        a.rem_euclid(self.modulus as i64) as u64
    }

    /// The digit `s_(j)`, i.e. the coefficient of `p^j`.
    #[inline]
    pub fn digit(&self, s: u64, j: u32) -> u64 {
        (s / self.p.pow(j)) % self.p
    }

    pub fn digits(&self, s: u64) -> Result<DigitVector> {
        self.check(s)?;
        let mut digits = vec![0; self.n as usize];
        let mut rest = s;
        for slot in digits.iter_mut().rev() {
            *slot = rest % self.p;
            rest /= self.p;
        }
        Ok(DigitVector { p: self.p, digits })
    }

    /// `s ⪯ t`: every digit of `s` is at most the matching digit of `t`.
    pub fn preceq(&self, s: u64, t: u64) -> bool {
        let (mut s, mut t) = (s, t);
        for _ in 0..self.n {
            if s % self.p > t % self.p {
                return false;
            }
            s /= self.p;
            t /= self.p;
        }
        true
    }

    /// All `u` in `S_{p^n}` with `s ⪯ u`, increasing.
    pub fn above(&self, s: u64) -> impl Iterator<Item = u64> + '_ {
        // Odometer over the free parts u_(j) - s_(j) of each digit.
        let mut next = Some(s);
        std::iter::from_fn(move || {
            let cur = next?;
            let mut u = cur;
            next = None;
            for j in 0..self.n {
                let w = self.pow(j);
                if self.digit(u, j) + 1 < self.p {
                    next = Some(u + w);
                    break;
                }
                u -= (self.digit(u, j) - self.digit(s, j)) * w;
            }
            Some(cur)
        })
    }

    /// `s ⪯ t` decided as "s <= t and adding s to t - s in base p has no carry".
    pub fn preceq_carry_free(&self, s: u64, t: u64) -> bool {
        if s > t {
            return false;
        }
        let (mut a, mut m) = (s, t - s);
        for _ in 0..self.n {
            if a % self.p + m % self.p >= self.p {
                return false;
            }
            a /= self.p;
            m /= self.p;
        }
        true
    }

    /// `|s|`, the sum of the base-p digits.
    pub fn digit_sum(&self, s: u64) -> u64 {
        (0..self.n).map(|j| self.digit(s, j)).sum()
    }

    /// `p^j * floor(s / p^j)`.
    pub fn floor_j(&self, s: u64, j: u32) -> u64 {
        let q = self.pow(j);
        q * (s / q)
    }

    /// `p^j * ceil(s / p^j)`.
    pub fn ceil_j(&self, s: u64, j: u32) -> u64 {
        let q = self.pow(j);
        let f = self.floor_j(s, j);
        if f == s {
            f
        } else {
            f + q
        }
    }

    /// Number of digits `s_(j)`, `v_p(s) < j <= n-1`, different from `p-1`.
    /// Zero at `s = 0`.
    pub fn alpha(&self, s: u64) -> u32 {
        let Some(v) = valuation(s, self.p) else {
            return 0;
        };
        (1..self.n)
            .filter(|&j| j > v && self.digit(s, j) != self.p - 1)
            .count() as u32
    }

    /// Length of the run of leading digits equal to `(p-1)/2`, stopping
    /// before the last nonzero digit. Zero for `p = 2` and at `s = 0`.
    pub fn beta(&self, s: u64) -> u32 {
        if self.p == 2 {
            return 0;
        }
        let Some(v) = valuation(s, self.p) else {
            return 0;
        };
        let half = (self.p - 1) / 2;
        let mut c = 0;
        while c + 1 < self.n - v && self.digit(s, self.n - 1 - c) == half {
            c += 1;
        }
        c
    }

    /// 1 exactly when `p = 2` and `s = 2^(n-1)`.
    pub fn gamma(&self, s: u64) -> u32 {
        u32::from(self.p == 2 && s == self.pow(self.n - 1))
    }

    pub fn elements(&self) -> std::ops::Range<u64> {
        0..self.modulus
    }
}

/// Base-p expansion `(s_(n-1), .., s_(0))` of an element of `S_{p^n}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DigitVector {
    p: u64,
    digits: Vec<u64>,
}

impl DigitVector {
    pub fn from_digits(p: u64, digits: Vec<u64>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if digits.is_empty() {
            return domain("a digit vector needs at least one digit");
        }
        if let Some(d) = digits.iter().find(|&&d| d >= p) {
            return domain(format!("digit {d} is not in [0, {}]", p - 1));
        }
        Ok(DigitVector { p, digits })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.digits.len() as u32
    }

    /// Most-significant first.
    pub fn as_slice(&self) -> &[u64] {
        &self.digits
    }

    /// `s_(j)`, the coefficient of `p^j`.
    pub fn digit(&self, j: u32) -> u64 {
        self.digits[self.digits.len() - 1 - j as usize]
    }

    /// `s_(n-i)` for `1 <= i <= n`, the digit paired with the i-th shift parameter.
    pub fn scaffold_digit(&self, i: u32) -> u64 {
        assert!(
            i >= 1 && i <= self.n(),
            "scaffold index {i} out of 1..={}",
            self.n()
        );
        self.digits[i as usize - 1]
    }

    pub fn value(&self) -> u64 {
        self.digits.iter().fold(0, |acc, &d| acc * self.p + d)
    }

    pub fn digit_sum(&self) -> u64 {
        self.digits.iter().sum()
    }
}

/// Digit expansion of `s` in `S_{p^n}`, leading zeros kept.
pub fn digits(s: u64, p: u64, n: u32) -> Result<DigitVector> {
    Radix::new(p, n)?.digits(s)
}

/// Range-checked `s ⪯ t`. Both characterizations are evaluated and must agree.
pub fn preceq(s: u64, t: u64, p: u64, n: u32) -> Result<bool> {
    let radix = Radix::new(p, n)?;
    radix.check(s)?;
    radix.check(t)?;
    let digitwise = radix.preceq(s, t);
    if digitwise != radix.preceq_carry_free(s, t) {
        return Err(Error::Consistency(format!(
            "digitwise and carry-free order disagree at ({s}, {t})"
        )));
    }
    Ok(digitwise)
}

/// `v_p(a)`, or `None` for `a = 0`.
pub fn valuation(a: u64, p: u64) -> Option<u32> {
    if a == 0 {
        return None;
    }
    let mut v = 0;
    let mut a = a;
    while a.is_multiple_of(p) {
        a /= p;
        v += 1;
    }
    Some(v)
}

/// `v_p(a)` for a signed integer.
pub fn valuation_i64(a: i64, p: u64) -> Option<u32> {
    valuation(a.unsigned_abs(), p)
}

fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u128;
    let mut b = (base % m) as u128;
    let m128 = m as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

/// Inverse of a unit modulo the prime `p`.
pub fn inv_mod_prime(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

fn small_binom_mod(a: u64, b: u64, p: u64) -> u64 {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    let (mut num, mut den) = (1u128, 1u128);
    let p128 = p as u128;
    for k in 0..b {
        num = num * ((a - k) as u128) % p128;
        den = den * ((k + 1) as u128) % p128;
    }
    (num * inv_mod_prime(den as u64, p) as u128 % p128) as u64
}

/// `C(a, b) mod p` by Lucas' theorem: the product of digitwise binomials.
pub fn lucas_binom(a: u64, b: u64, p: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    let mut acc = 1u128;
    while b > 0 {
        let (ad, bd) = (a % p, b % p);
        if bd > ad {
            return 0;
        }
        acc = acc * small_binom_mod(ad, bd, p) as u128 % p as u128;
        a /= p;
        b /= p;
    }
    (acc % p as u128) as u64
}

/// `k! mod p` for `k < p`.
pub fn factorial_mod(k: u64, p: u64) -> u64 {
    (1..=k).fold(1u128, |acc, j| acc * j as u128 % p as u128) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn above_matches_filter() {
        for (p, n) in [(2, 4), (3, 3), (5, 2), (7, 1)] {
            let r = Radix::new(p, n).unwrap();
            for s in r.elements() {
                let want: Vec<u64> = r.elements().filter(|&u| r.preceq(s, u)).collect();
                assert_eq!(r.above(s).collect::<Vec<_>>(), want, "p={p} n={n} s={s}");
            }
        }
    }

    fn long_division(mut s: u64, p: u64, n: u32) -> Vec<u64> {
        let mut out = Vec::new();
        for _ in 0..n {
            out.push(s % p);
            s /= p;
        }
        out.reverse();
        out
    }

    #[test]
    fn digits_examples() {
        assert_eq!(digits(0, 3, 2).unwrap().as_slice(), &[0, 0]);
        assert_eq!(digits(5, 3, 2).unwrap().as_slice(), &[1, 2]);
        assert_eq!(
            digits(8, 3, 2).unwrap().as_slice(),
            long_division(8, 3, 2).as_slice()
        );
        assert_eq!(digits(8, 3, 2).unwrap().as_slice(), &[2, 2]);
        assert!(matches!(digits(9, 3, 2), Err(Error::Domain(_))));
        assert!(matches!(digits(1, 4, 2), Err(Error::NotPrime(4))));
    }

    #[test]
    fn digit_accessors_agree() {
        let d = digits(5, 3, 2).unwrap();
        assert_eq!(d.digit(0), 2);
        assert_eq!(d.digit(1), 1);
        assert_eq!(d.scaffold_digit(1), 1);
        assert_eq!(d.scaffold_digit(2), 2);
        assert_eq!(d.value(), 5);
    }

    #[test]
    fn round_trip_all_small() {
        for (p, n) in [(2, 5), (3, 3), (5, 2), (7, 2)] {
            let r = Radix::new(p, n).unwrap();
            for s in r.elements() {
                let d = r.digits(s).unwrap();
                assert_eq!(d.value(), s);
                let back = DigitVector::from_digits(p, d.as_slice().to_vec()).unwrap();
                assert_eq!(back.value(), s);
            }
        }
    }

    #[test]
    fn preceq_examples() {
        assert!(preceq(1, 3, 2, 2).unwrap());
        assert!(!preceq(1, 2, 2, 2).unwrap());
        for s in 0..27 {
            assert!(preceq(s, s, 3, 3).unwrap());
        }
        assert!(preceq(4, 1, 2, 2).is_err());
    }

    #[test]
    fn lucas_examples() {
        assert_eq!(lucas_binom(5, 2, 3), 1);
        assert_eq!(lucas_binom(7, 5, 3), 0);
        for a in 0..50 {
            assert_eq!(lucas_binom(a, 0, 7), 1);
        }
        assert_eq!(lucas_binom(2, 5, 3), 0);
    }

    #[test]
    fn digit_sum_examples() {
        let r = Radix::new(3, 2).unwrap();
        assert_eq!(r.digit_sum(0), 0);
        assert_eq!(r.digit_sum(8), 4);
        let r = Radix::new(5, 3).unwrap();
        assert_eq!(r.digit_sum(124), 12);
    }

    #[test]
    fn floor_ceil_examples() {
        let r = Radix::new(3, 2).unwrap();
        assert_eq!(r.floor_j(5, 1), 3);
        assert_eq!(r.ceil_j(5, 1), 6);
        assert_eq!(r.ceil_j(6, 1), 6);
        assert_eq!(r.floor_j(5, 0), 5);
        assert_eq!(r.ceil_j(5, 0), 5);
    }

    #[test]
    fn alpha_beta_gamma_examples() {
        let r = Radix::new(3, 2).unwrap();
        assert_eq!(r.alpha(1), 1);
        assert_eq!(r.alpha(8), 0);
        assert_eq!(r.alpha(0), 0);
        assert_eq!(r.beta(0), 0);
        let r2 = Radix::new(2, 3).unwrap();
        for s in r2.elements() {
            assert_eq!(r2.beta(s), 0);
        }
        assert_eq!(r2.gamma(4), 1);
        assert_eq!(r2.gamma(2), 0);
        assert_eq!(Radix::new(3, 3).unwrap().gamma(9), 0);
    }

    #[test]
    fn beta_counts_leading_halves() {
        // p = 5, n = 3: half digit is 2.
        let r = Radix::new(5, 3).unwrap();
        // 2,2,1 -> v = 0, c < 3, leading (2,2) then 1 -> 2
        assert_eq!(r.beta(2 * 25 + 2 * 5 + 1), 2);
        // 2,2,2 -> the last nonzero digit is excluded -> 2
        assert_eq!(r.beta(2 * 25 + 2 * 5 + 2), 2);
        // 2,2,0 -> v = 1, c < 2 -> 1
        assert_eq!(r.beta(2 * 25 + 2 * 5), 1);
        // 1,2,2 -> 0
        assert_eq!(r.beta(25 + 2 * 5 + 2), 0);
    }

    #[test]
    fn radix_rejects_bad_input() {
        assert!(matches!(Radix::new(1, 2), Err(Error::NotPrime(1))));
        assert!(matches!(Radix::new(3, 0), Err(Error::Domain(_))));
        assert!(matches!(Radix::new(2, 40), Err(Error::TooLarge(_))));
    }

    #[test]
    fn valuation_basics() {
        assert_eq!(valuation(0, 3), None);
        assert_eq!(valuation(18, 3), Some(2));
        assert_eq!(valuation_i64(-12, 2), Some(2));
    }
}
