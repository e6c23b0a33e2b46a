//! Closed-form classifications for particular families: degree `p`
//! extensions via continued fractions, biquadratic extensions, weakly
//! ramified extensions, and the break formulas for cyclic Kummer extensions.
//!
//! Each of these is an independent route to what [`crate::structure::analyze`]
//! computes; the integration tests compare them exhaustively.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::padic::{is_prime, Radix};

/// Expansion `[0; q_1, .., q_m]` of a rational in `(0, 1)`, with `q_m >= 2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContinuedFraction {
    pub quotients: Vec<u64>,
    pub numerator: u64,
    pub denominator: u64,
}

impl ContinuedFraction {
    pub fn len(&self) -> usize {
        self.quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quotients.is_empty()
    }

    pub fn last(&self) -> u64 {
        *self
            .quotients
            .last()
            .expect("expansion of a rational in (0, 1) is non-empty")
    }

    /// Folds the quotients back into a reduced fraction.
    pub fn evaluate(&self) -> (u64, u64) {
        // [0; q_1..q_m] = 1 / (q_1 + 1 / (q_2 + ...))
        let (mut num, mut den) = (0u64, 1u64);
        for &q in self.quotients.iter().rev() {
            // x -> 1 / (q + x)
            let (n2, d2) = (den, q * den + num);
            num = n2;
            den = d2;
        }
        (num, den)
    }
}

/// Euclid's algorithm on `num / den`.
pub fn continued_fraction(num: u64, den: u64) -> Result<ContinuedFraction> {
    if num == 0 || num >= den {
        return domain(format!("{num}/{den} is not in (0, 1)"));
    }
    let mut quotients = Vec::new();
    let (mut a, mut b) = (den, num);
    while b != 0 {
        quotients.push(a / b);
        let r = a % b;
        a = b;
        b = r;
    }
    Ok(ContinuedFraction {
        quotients,
        numerator: num,
        denominator: den,
    })
}

/// Freeness of the ideal of exponent `h` in a degree-`p` extension whose
/// break has residue `b_prime` mod `p`, decided from the continued fraction
/// of `b_prime / p`.
pub fn ferton_free(h: i64, b_prime: u64, p: u64) -> Result<bool> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if b_prime == 0 || b_prime >= p {
        return domain(format!("b' = {b_prime} must lie in [1, {}]", p - 1));
    }
    let h = h.rem_euclid(p as i64) as u64;
    if b_prime == 1 {
        return Ok(h <= 1 || 2 * h > p + 1);
    }
    if h > b_prime {
        return Ok(false);
    }
    let cf = continued_fraction(b_prime, p)?;
    let q_last = cf.last();
    Ok(if cf.len() % 2 == 0 {
        h == b_prime || h + q_last == b_prime
    } else {
        // b' - q_m / 2 <= h <= b'
        2 * b_prime <= 2 * h + q_last
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleSummary {
    pub free: bool,
    pub min_generators: usize,
    pub embedding_dimension: usize,
}

/// Biquadratic classification (`p = 2`, `n = 2`, both breaks `≡ b1_mod4 (mod 4)`).
pub fn biquad_report(b1_mod4: u64, h: i64) -> Result<ModuleSummary> {
    if b1_mod4 != 1 && b1_mod4 != 3 {
        return domain(format!("b_1 mod 4 must be 1 or 3, got {b1_mod4}"));
    }
    let h4 = h.rem_euclid(4);
    let free = if b1_mod4 == 1 { h4 != 2 } else { h4 != 1 };
    let small = if b1_mod4 == 1 {
        h4 % 2 == 1
    } else {
        h4 % 2 == 0
    };
    Ok(ModuleSummary {
        free,
        min_generators: if free { 1 } else { 3 },
        embedding_dimension: if small { 3 } else { 4 },
    })
}

/// Module structure in the weakly ramified case (all breaks equal to 1).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakReport {
    pub p: u64,
    pub n: u32,
    pub h: i64,
    /// `h ≡ 1 (mod p^n)`; `h_prime`, `m` and `k` are then absent.
    pub residue_one: bool,
    /// Representative of `h` in `[2, p^n]`.
    pub h_prime: Option<u64>,
    pub m: Option<u64>,
    pub k: Option<u64>,
    pub free: bool,
    pub min_generators: usize,
    pub embedding_dimension: usize,
}

pub fn weak_report(p: u64, n: u32, h: i64) -> Result<WeakReport> {
    let radix = Radix::new(p, n)?;
    let q = radix.modulus();
    let r = radix.residue(h);
    if r == 1 {
        return Ok(WeakReport {
            p,
            n,
            h,
            residue_one: true,
            h_prime: None,
            m: None,
            k: None,
            free: true,
            min_generators: 1,
            embedding_dimension: n as usize + 1,
        });
    }
    let h_prime = if r < 2 { r + q } else { r };
    let m = h_prime - 1;
    let k = m.max(q - m);
    // h' >= 1 + p^n / 2, compared exactly
    let free = 2 * h_prime >= 2 + q;
    let min_generators = if free {
        1
    } else {
        (2 + radix.alpha(m) - radix.beta(m)) as usize
    };
    let embedding_dimension = (n + 2 + radix.alpha(k) - radix.gamma(k)) as usize;
    Ok(WeakReport {
        p,
        n,
        h,
        residue_one: false,
        h_prime: Some(h_prime),
        m: Some(m),
        k: Some(k),
        free,
        min_generators,
        embedding_dimension,
    })
}

/// Extremes of the weakly ramified invariants over all residues `h mod p^n`.
/// Witness lists hold representatives in `[0, p^n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakExtremes {
    pub p: u64,
    pub n: u32,
    pub max_generators: usize,
    pub max_generators_at: Vec<i64>,
    pub min_nonfree_generators: Option<usize>,
    pub min_nonfree_generators_at: Vec<i64>,
    pub generator_counts: Vec<usize>,
    pub min_embedding_dimension: usize,
    pub min_embedding_at: Vec<i64>,
    pub max_embedding_dimension: usize,
    pub max_embedding_at: Vec<i64>,
    pub embedding_dimensions: Vec<usize>,
}

impl WeakExtremes {
    fn sweep(p: u64, n: u32) -> Result<Self> {
        let q = Radix::new(p, n)?.modulus() as i64;
        let reports = (0..q)
            .map(|h| weak_report(p, n, h))
            .collect::<Result<Vec<_>>>()?;
        let at = |pred: &dyn Fn(&WeakReport) -> bool| -> Vec<i64> {
            reports.iter().filter(|r| pred(r)).map(|r| r.h).collect()
        };

        let max_generators = reports.iter().map(|r| r.min_generators).max().unwrap_or(1);
        let min_nonfree_generators = reports
            .iter()
            .filter(|r| !r.free)
            .map(|r| r.min_generators)
            .min();
        let min_embedding_dimension = reports.iter().map(|r| r.embedding_dimension).min().unwrap();
        let max_embedding_dimension = reports.iter().map(|r| r.embedding_dimension).max().unwrap();
        let generator_counts: BTreeSet<usize> = reports.iter().map(|r| r.min_generators).collect();
        let embedding_dimensions: BTreeSet<usize> =
            reports.iter().map(|r| r.embedding_dimension).collect();

        Ok(WeakExtremes {
            p,
            n,
            max_generators,
            max_generators_at: at(&|r| r.min_generators == max_generators),
            min_nonfree_generators,
            min_nonfree_generators_at: at(&|r| {
                !r.free && Some(r.min_generators) == min_nonfree_generators
            }),
            generator_counts: generator_counts.into_iter().collect(),
            min_embedding_dimension,
            min_embedding_at: at(&|r| r.embedding_dimension == min_embedding_dimension),
            max_embedding_dimension,
            max_embedding_at: at(&|r| r.embedding_dimension == max_embedding_dimension),
            embedding_dimensions: embedding_dimensions.into_iter().collect(),
        })
    }

    /// Claims about the extremes that fail for this `(p, n)`.
    pub fn violations(&self) -> Vec<String> {
        let (p, n) = (self.p, self.n as usize);
        let q = p.pow(self.n) as i64;
        let mut bad = Vec::new();
        let mut claim = |ok: bool, what: String| {
            if !ok {
                bad.push(what);
            }
        };
        let gens_at = |h: i64| weak_report(p, self.n, h).map(|r| r.min_generators).ok();
        let emb_at = |h: i64| {
            weak_report(p, self.n, h)
                .map(|r| r.embedding_dimension)
                .ok()
        };

        if p > 2 {
            let mid = (q + 1) / 2;
            claim(
                self.max_generators == n + 1,
                format!("max generators {} != n+1", self.max_generators),
            );
            claim(
                self.min_nonfree_generators == Some(2),
                format!(
                    "min non-free generators {:?} != 2",
                    self.min_nonfree_generators
                ),
            );
            claim(
                gens_at(mid) == Some(2),
                format!("h = {mid} does not need exactly 2 generators"),
            );
            let expected: Vec<usize> = (n + 1..=2 * n + 1).collect();
            claim(
                self.embedding_dimensions == expected,
                format!(
                    "embedding dimensions {:?} != {expected:?}",
                    self.embedding_dimensions
                ),
            );
            claim(
                self.min_embedding_at == vec![1],
                format!(
                    "minimum embedding dimension attained at {:?}",
                    self.min_embedding_at
                ),
            );
            claim(emb_at(2) == Some(n + 2), "h = 2 does not give n+2".into());
            claim(emb_at(q) == Some(n + 2), "h = p^n does not give n+2".into());
            claim(
                emb_at(mid) == Some(2 * n + 1),
                format!("h = {mid} does not give 2n+1"),
            );
        } else {
            let half = q / 2;
            if n > 1 {
                claim(
                    self.max_generators == n + 1,
                    format!("max generators {} != n+1", self.max_generators),
                );
                claim(
                    !self.generator_counts.contains(&2),
                    "some ideal needs exactly 2 generators".into(),
                );
                claim(
                    gens_at(half) == Some(3),
                    format!("h = {half} does not need exactly 3 generators"),
                );
                let mut at_max = vec![half, (half + 2) % q];
                at_max.sort_unstable();
                at_max.dedup();
                claim(
                    self.max_embedding_dimension == 2 * n,
                    format!(
                        "max embedding dimension {} != 2n",
                        self.max_embedding_dimension
                    ),
                );
                claim(
                    self.max_embedding_at == at_max,
                    format!(
                        "maximum embedding dimension attained at {:?}",
                        self.max_embedding_at
                    ),
                );
            }
            let mut at_min = vec![1 % q, (half + 1) % q];
            at_min.sort_unstable();
            at_min.dedup();
            claim(
                self.min_embedding_dimension == n + 1,
                format!(
                    "min embedding dimension {} != n+1",
                    self.min_embedding_dimension
                ),
            );
            claim(
                self.min_embedding_at == at_min,
                format!(
                    "minimum embedding dimension attained at {:?}",
                    self.min_embedding_at
                ),
            );
        }
        bad
    }
}

/// Sweeps every `h mod p^n` through [`weak_report`] and checks the known
/// extremes of generator counts and embedding dimensions.
pub fn weak_extremes(p: u64, n: u32) -> Result<WeakExtremes> {
    let ext = WeakExtremes::sweep(p, n)?;
    let bad = ext.violations();
    if bad.is_empty() {
        Ok(ext)
    } else {
        Err(Error::Consistency(format!(
            "p = {p}, n = {n}: {}",
            bad.join("; ")
        )))
    }
}

/// Lower breaks `b_1..b_n` of the cyclic Kummer extension `K(a^(1/p^n))`.
///
/// Needs `p^(n-1) (p-1) | v_K(p)` (the base field contains the `p^n`-th
/// roots of unity) and `gcd(v_K(a-1), p) = 1`.
pub fn miyata_breaks(p: u64, n: u32, v_a_minus_1: u64, v_p: u64) -> Result<Vec<i64>> {
    let radix = Radix::new(p, n)?;
    if v_a_minus_1 == 0 || v_p == 0 {
        return domain("valuations must be positive");
    }
    if v_a_minus_1.is_multiple_of(p) {
        return domain(format!("v_K(a-1) = {v_a_minus_1} is divisible by {p}"));
    }
    let root_index = radix.pow(n - 1) * (p - 1);
    if !v_p.is_multiple_of(root_index) {
        return domain(format!(
            "v_K(p) = {v_p} is not a multiple of p^(n-1)(p-1) = {root_index}"
        ));
    }
    let top = (p * v_p / (p - 1)) as i64;
    let b1 = top - v_a_minus_1 as i64;
    if b1 <= 0 {
        return domain(format!(
            "v_K(a-1) = {v_a_minus_1} gives non-positive b_1 = {b1}"
        ));
    }
    let mut breaks = vec![b1];
    for i in 2..=n {
        let tail: u64 = (1..i).map(|j| radix.pow(j)).sum();
        breaks.push(b1 + (v_p * tail) as i64);
    }
    let q = radix.modulus() as i64;
    let bn = breaks[n as usize - 1];
    if let Some(i) = breaks.iter().position(|&b| (b - bn).rem_euclid(q) != 0) {
        return Err(Error::Consistency(format!(
            "b_{} = {} is not congruent to b_n = {bn} mod p^n",
            i + 1,
            breaks[i]
        )));
    }
    Ok(breaks)
}

/// Whether `b_1 < p v_K(p) / (p-1) - 2`, the bound under which a degree-`p`
/// scaffold in characteristic 0 has tolerance at least `2p - 1`.
pub fn char0_degree_p_applicable(b1: i64, p: u64, v_p: u64) -> bool {
    // (p-1)(b_1 + 2) < p v_K(p)
    ((p as i128 - 1) * (b1 as i128 + 2)) < (p as i128 * v_p as i128)
}
