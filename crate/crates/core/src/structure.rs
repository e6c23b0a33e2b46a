//! Numerical engine: from shift parameters `b_1..b_n` and an ideal exponent
//! `h`, compute the valuation-criterion exponent, the `d`/`w` vectors, the
//! index sets counting generators and embedding dimension, and the
//! resulting [`StructureReport`].

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::padic::{valuation_i64, Radix};

/// Prime, rank and shift parameters of a scaffold.
///
/// Construction precomputes `eub(s) = sum_i s_(n-i) p^(n-i) b_i` on all of
/// `S_{p^n}` and the inverse table of `s -> r(-eub(s))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaffoldParams {
    radix: Radix,
    shifts: Vec<i64>,
    eub: Vec<i64>,
    eua: Vec<u64>,
}

impl ScaffoldParams {
    pub fn new(p: u64, n: u32, shifts: Vec<i64>) -> Result<Self> {
        let radix = Radix::new(p, n)?;
        if shifts.len() != n as usize {
            return domain(format!(
                "expected {n} shift parameters, got {}",
                shifts.len()
            ));
        }
        for (i, &b) in shifts.iter().enumerate() {
            if b.rem_euclid(p as i64) == 0 {
                return domain(format!(
                    "shift parameter b_{} = {b} is divisible by {p}",
                    i + 1
                ));
            }
        }

        // Weight of the digit paired with b_i is p^(n-i).
        let weights = (1..=n)
            .zip(&shifts)
            .map(|(i, &b)| (radix.pow(n - i) as i64).checked_mul(b))
            .collect::<Option<Vec<i64>>>()
            .ok_or_else(|| Error::TooLarge("shift parameters overflow i64".into()))?;
        let bound = weights
            .iter()
            .try_fold(0i64, |acc, w| {
                acc.checked_add(w.checked_abs()?.checked_mul(p as i64 - 1)?)
            })
            .ok_or_else(|| Error::TooLarge("shift parameters overflow i64".into()))?;
        if bound > i64::MAX / 4 {
            return Err(Error::TooLarge("shift parameters overflow i64".into()));
        }

        let size = radix.modulus() as usize;
        let mut eub = Vec::with_capacity(size);
        for s in radix.elements() {
            let v: i64 = (1..=n)
                .map(|i| radix.digit(s, n - i) as i64 * weights[i as usize - 1])
                .sum();
            eub.push(v);
        }

        let mut eua = vec![u64::MAX; size];
        for s in radix.elements() {
            let slot = radix.residue(-eub[s as usize]) as usize;
            if eua[slot] != u64::MAX {
                return Err(Error::Consistency(format!(
                    "r∘eub is not injective: {} and {s} collide",
                    eua[slot]
                )));
            }
            eua[slot] = s;
        }

        Ok(ScaffoldParams {
            radix,
            shifts,
            eub,
            eua,
        })
    }

    /// All shift parameters equal to `b`.
    pub fn uniform(p: u64, n: u32, b: i64) -> Result<Self> {
        Self::new(p, n, vec![b; n as usize])
    }

    pub fn radix(&self) -> Radix {
        self.radix
    }

    pub fn p(&self) -> u64 {
        self.radix.p()
    }

    pub fn n(&self) -> u32 {
        self.radix.n()
    }

    pub fn modulus(&self) -> u64 {
        self.radix.modulus()
    }

    pub fn shifts(&self) -> &[i64] {
        &self.shifts
    }

    /// `eub(s)` for `s` in `S_{p^n}`; an exact integer, possibly negative.
    pub fn eub(&self, s: u64) -> i64 {
        self.eub[s as usize]
    }

    /// `eua(t)`: the unique `s` with `eub(s) ≡ -t (mod p^n)`.
    pub fn eua(&self, t: i64) -> u64 {
        self.eua[self.radix.residue(t) as usize]
    }

    /// Range-checked `eub`.
    pub fn b_func(&self, s: u64) -> Result<i64> {
        self.radix.check(s)?;
        Ok(self.eub(s))
    }

    /// The unique `b` in `[h, h + p^n)` with `eua(b) = p^n - 1`.
    pub fn valuation_criterion_b(&self, h: i64) -> i64 {
        let q = self.modulus() as i64;
        // eua(b) = p^n - 1 means b ≡ -eub(p^n - 1).
        let target = self.radix.residue(-self.eub(self.modulus() - 1)) as i64;
        h + (target - h).rem_euclid(q)
    }

    /// Whether `b_i ≡ b_n (mod p^i)` for every `i`; `Err(i)` names the first failure.
    pub fn congruent_shifts(&self) -> std::result::Result<(), u32> {
        let n = self.n();
        let bn = self.shifts[n as usize - 1];
        for i in 1..=n {
            let q = self.radix.pow(i) as i64;
            if (self.shifts[i as usize - 1] - bn).rem_euclid(q) != 0 {
                return Err(i);
            }
        }
        Ok(())
    }
}

/// The numerical data attached to the ideal of exponent `h`.
#[derive(Clone, Debug)]
pub struct IdealStructure<'a> {
    params: &'a ScaffoldParams,
    h: i64,
    b: i64,
    d: Vec<i64>,
    w: Vec<i64>,
}

impl<'a> IdealStructure<'a> {
    /// Computes `d` and `w`. `w` is obtained both from its defining minimum
    /// over `u ⪰ s` and as the minimum of `D(s, t)` over the window; the two
    /// must coincide.
    pub fn new(params: &'a ScaffoldParams, h: i64) -> Result<Self> {
        let q = params.modulus() as i64;
        let b = params.valuation_criterion_b(h);
        let d: Vec<i64> = params
            .radix
            .elements()
            .map(|s| (params.eub(s) + b - h).div_euclid(q))
            .collect();
        let mut out = IdealStructure {
            params,
            h,
            b,
            d,
            w: Vec::new(),
        };
        let w: Vec<i64> = params
            .radix
            .elements()
            .map(|s| out.w_by_definition(s))
            .collect();
        out.w = w;
        for s in params.radix.elements() {
            let alt = out.w_by_window(s);
            if alt != out.w[s as usize] {
                return Err(Error::Consistency(format!(
                    "w({s}) = {} by definition but {alt} over the window (h = {h})",
                    out.w[s as usize]
                )));
            }
        }
        Ok(out)
    }

    pub fn params(&self) -> &ScaffoldParams {
        self.params
    }

    pub fn h(&self) -> i64 {
        self.h
    }

    /// Valuation-criterion exponent `b ∈ [h, h + p^n)`.
    pub fn b(&self) -> i64 {
        self.b
    }

    /// `[h, h + p^n)`.
    pub fn window(&self) -> Range<i64> {
        self.h..self.h + self.params.modulus() as i64
    }

    fn check_window(&self, t: i64) -> Result<()> {
        if self.window().contains(&t) {
            Ok(())
        } else {
            domain(format!("t = {t} is outside the window {:?}", self.window()))
        }
    }

    /// `D(s, t) = floor((eub(s) + t - h) / p^n)`.
    pub fn quotient(&self, s: u64, t: i64) -> Result<i64> {
        self.params.radix.check(s)?;
        self.check_window(t)?;
        Ok(self.quotient_unchecked(s, t))
    }

    /// `H(s, t) = h + r(eub(s) + t - h)`, the representative of `t + eub(s)` in the window.
    pub fn representative(&self, s: u64, t: i64) -> Result<i64> {
        self.params.radix.check(s)?;
        self.check_window(t)?;
        Ok(self.representative_unchecked(s, t))
    }

    pub(crate) fn quotient_unchecked(&self, s: u64, t: i64) -> i64 {
        (self.params.eub(s) + t - self.h).div_euclid(self.params.modulus() as i64)
    }

    pub(crate) fn representative_unchecked(&self, s: u64, t: i64) -> i64 {
        self.h + (self.params.eub(s) + t - self.h).rem_euclid(self.params.modulus() as i64)
    }

    pub fn d(&self, s: u64) -> i64 {
        self.d[s as usize]
    }

    pub fn w(&self, s: u64) -> i64 {
        self.w[s as usize]
    }

    pub fn d_vector(&self) -> &[i64] {
        &self.d
    }

    pub fn w_vector(&self) -> &[i64] {
        &self.w
    }

    /// `min { d(u) - d(u - s) : u ⪰ s }`.
    pub fn w_by_definition(&self, s: u64) -> i64 {
        let radix = self.params.radix;
        radix
            .above(s)
            .map(|u| self.d(u) - self.d(u - s))
            .min()
            .expect("u = s always qualifies")
    }

    /// `min { D(s, t) : t in the window, eua(t) ⪰ s }`.
    pub fn w_by_window(&self, s: u64) -> i64 {
        let q = self.params.modulus() as i64;
        // Walk a ⪰ s and take the window point t with eua(t) = a.
        self.params
            .radix
            .above(s)
            .map(|a| self.h + (-self.params.eub(a) - self.h).rem_euclid(q))
            .map(|t| self.quotient_unchecked(s, t))
            .min()
            .expect("t = b always qualifies")
    }

    /// `ε(s, t) = D(s, t) - w(s)`, defined when `s ⪯ eua(t)`.
    pub fn epsilon(&self, s: u64, t: i64) -> Result<u8> {
        let dq = self.quotient(s, t)?;
        if !self.params.radix.preceq(s, self.params.eua(t)) {
            return domain(format!(
                "ε({s}, {t}) needs s ⪯ eua(t) = {}",
                self.params.eua(t)
            ));
        }
        match dq - self.w(s) {
            0 => Ok(0),
            1 => Ok(1),
            other => Err(Error::Consistency(format!("ε({s}, {t}) = {other}"))),
        }
    }

    pub fn is_free(&self) -> bool {
        self.d == self.w
    }

    /// `{u : d(u) > d(u - s) + w(s) for all 0 ≺ s ⪯ u}`, sorted.
    pub fn dd_set(&self) -> Vec<u64> {
        let radix = self.params.radix;
        radix
            .elements()
            .filter(|&u| {
                (1..=u)
                    .filter(|&s| radix.preceq(s, u))
                    .all(|s| self.d(u) > self.d(u - s) + self.w(s))
            })
            .collect()
    }

    /// `{u : w(u) > w(u - s) + w(s) for all 0 ≺ s ≺ u}`, sorted.
    pub fn ee_set(&self) -> Vec<u64> {
        let radix = self.params.radix;
        radix
            .elements()
            .filter(|&u| {
                (1..u)
                    .filter(|&s| radix.preceq(s, u))
                    .all(|s| self.w(u) > self.w(u - s) + self.w(s))
            })
            .collect()
    }

    pub fn report(&self) -> Result<StructureReport> {
        let dd = self.dd_set();
        let ee = self.ee_set();
        let free = self.is_free();
        if free != (dd.len() == 1) {
            return Err(Error::Consistency(format!(
                "free = {free} but |DD| = {} (h = {})",
                dd.len(),
                self.h
            )));
        }
        Ok(StructureReport {
            p: self.params.p(),
            n: self.params.n(),
            b: self.params.shifts.clone(),
            h: self.h,
            b_exponent: self.b,
            d: self.d.clone(),
            w: self.w.clone(),
            free,
            min_generators: dd.len(),
            embedding_dimension: ee.len(),
            dd,
            ee,
            tolerance_required: self.params.modulus() as i64 + self.b - self.h,
        })
    }
}

/// Module structure of one ideal over its associated order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    pub p: u64,
    pub n: u32,
    /// Shift parameters.
    pub b: Vec<i64>,
    pub h: i64,
    /// Valuation-criterion exponent in `[h, h + p^n)`.
    pub b_exponent: i64,
    pub d: Vec<i64>,
    pub w: Vec<i64>,
    pub free: bool,
    pub dd: Vec<u64>,
    pub ee: Vec<u64>,
    pub min_generators: usize,
    pub embedding_dimension: usize,
    /// Tolerance `p^n + b - h` under which the conclusions hold.
    pub tolerance_required: i64,
}

impl StructureReport {
    /// Equality of everything that depends only on `h mod p^n`.
    pub fn same_structure(&self, other: &StructureReport) -> bool {
        self.p == other.p
            && self.n == other.n
            && self.b_exponent - self.h == other.b_exponent - other.h
            && self.d == other.d
            && self.w == other.w
            && self.free == other.free
            && self.dd == other.dd
            && self.ee == other.ee
            && self.min_generators == other.min_generators
            && self.embedding_dimension == other.embedding_dimension
            && self.tolerance_required == other.tolerance_required
    }
}

pub fn analyze(h: i64, params: &ScaffoldParams) -> Result<StructureReport> {
    IdealStructure::new(params, h)?.report()
}

/// Outcome of the valuation-ring freeness test for congruent shift parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingOfIntegersCertificate {
    pub free: bool,
    /// Least `m` in `1..=n` with `r(b_n) | p^m - 1`, if any.
    pub divisor_witness: Option<u32>,
}

fn require_congruent(params: &ScaffoldParams) -> Result<()> {
    params.congruent_shifts().map_err(|i| {
        Error::Domain(format!(
            "b_{i} = {} is not congruent to b_n = {} mod {}^{i}",
            params.shifts[i as usize - 1],
            params.shifts[params.n() as usize - 1],
            params.p()
        ))
    })
}

/// Freeness of the valuation ring (`h = 0`) together with the divisibility
/// witness. A witness forces freeness; for `n <= 2` freeness forces one.
pub fn ring_of_integers_free(params: &ScaffoldParams) -> Result<RingOfIntegersCertificate> {
    require_congruent(params)?;
    let radix = params.radix();
    let rbn = radix.residue(params.shifts[params.n() as usize - 1]);
    let free = analyze(0, params)?.free;
    let divisor_witness = (1..=params.n()).find(|&m| (radix.pow(m) - 1).is_multiple_of(rbn));
    if divisor_witness.is_some() && !free {
        return Err(Error::Consistency(format!(
            "r(b_n) = {rbn} divides p^m - 1 but the valuation ring is not free"
        )));
    }
    if params.n() <= 2 && free && divisor_witness.is_none() {
        return Err(Error::Consistency(format!(
            "valuation ring free but r(b_n) = {rbn} divides no p^m - 1"
        )));
    }
    Ok(RingOfIntegersCertificate {
        free,
        divisor_witness,
    })
}

/// Freeness of the inverse different, the ideal of exponent `r(b_n) + 1`.
pub fn inverse_different_free(params: &ScaffoldParams) -> Result<bool> {
    require_congruent(params)?;
    let radix = params.radix();
    let rbn = radix.residue(params.shifts[params.n() as usize - 1]);
    let free = analyze(rbn as i64 + 1, params)?.free;
    if free != (rbn == radix.modulus() - 1) {
        return Err(Error::Consistency(format!(
            "inverse different free = {free} but r(b_n) = {rbn}"
        )));
    }
    Ok(free)
}

/// Largest `p^n` for which [`bfunction_bijective`] brute-forces.
pub const BFUNCTION_MAX_MODULUS: u64 = 3125;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BFunctionOutcome {
    /// `order[k]` is the index of the coefficient with valuation `n - 1 - k`.
    Bijective { order: Vec<usize> },
    /// Two distinct digit tuples `(x_1..x_n)` with the same image.
    NotBijective { collision: (Vec<u64>, Vec<u64>) },
}

impl BFunctionOutcome {
    pub fn is_bijective(&self) -> bool {
        matches!(self, BFunctionOutcome::Bijective { .. })
    }
}

/// Decides whether `(x_1..x_n) -> sum a_i x_i mod p^n` is a bijection from
/// `S_p^n` onto `S_{p^n}`, by exhaustion and by the valuation profile of
/// the `a_i`. The two answers must agree.
pub fn bfunction_bijective(a: &[i64], p: u64, n: u32) -> Result<BFunctionOutcome> {
    let radix = Radix::new(p, n)?;
    if a.len() != n as usize {
        return domain(format!("expected {n} coefficients, got {}", a.len()));
    }
    if radix.modulus() > BFUNCTION_MAX_MODULUS {
        return Err(Error::TooLarge(format!(
            "p^n = {} exceeds {BFUNCTION_MAX_MODULUS}",
            radix.modulus()
        )));
    }

    let q = radix.modulus() as i128;
    let tuple = |s: u64| -> Vec<u64> { (0..n).map(|k| radix.digit(s, n - 1 - k)).collect() };
    let mut seen: Vec<Option<u64>> = vec![None; radix.modulus() as usize];
    let mut collision = None;
    for s in radix.elements() {
        let x = tuple(s);
        let image = x
            .iter()
            .zip(a)
            .map(|(&xi, &ai)| xi as i128 * ai as i128)
            .sum::<i128>()
            .rem_euclid(q) as usize;
        match seen[image] {
            Some(prev) => {
                collision = Some((tuple(prev), x));
                break;
            }
            None => seen[image] = Some(s),
        }
    }

    let mut order: Vec<Option<usize>> = vec![None; n as usize];
    let mut profile_ok = true;
    for (idx, &ai) in a.iter().enumerate() {
        match valuation_i64(ai, p) {
            Some(v) if v < n && order[(n - 1 - v) as usize].is_none() => {
                order[(n - 1 - v) as usize] = Some(idx);
            }
            _ => profile_ok = false,
        }
    }

    match (collision, profile_ok) {
        (None, true) => Ok(BFunctionOutcome::Bijective {
            order: order.into_iter().map(|o| o.expect("filled")).collect(),
        }),
        (Some(c), false) => Ok(BFunctionOutcome::NotBijective { collision: c }),
        (c, ok) => Err(Error::Consistency(format!(
            "exhaustive bijectivity {} but valuation profile {} for {a:?}",
            c.is_none(),
            ok
        ))),
    }
}
