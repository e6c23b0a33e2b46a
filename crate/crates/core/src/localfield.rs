//! Exact arithmetic in `K = F_p((t))` and in the purely inseparable
//! extension `L = K(x)`, `x^(p^n) = t^(-b)`.
//!
//! Every element that shows up in scaffold computations is a finite
//! combination of monomials, so `K` is modelled by sparse Laurent
//! polynomials and nothing is ever truncated.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::padic::{inv_mod_prime, is_prime, Radix};

static TERM_LIMIT: AtomicUsize = AtomicUsize::new(1_000_000);

/// Default cap on the number of stored terms in one element.
pub const DEFAULT_TERM_LIMIT: usize = 1_000_000;

pub fn term_limit() -> usize {
    TERM_LIMIT.load(Ordering::Relaxed)
}

/// Sets the process-wide term cap checked by multiplication.
pub fn set_term_limit(limit: usize) {
    TERM_LIMIT.store(limit.max(1), Ordering::Relaxed);
}

fn check_terms(terms: usize) -> Result<()> {
    let limit = term_limit();
    if terms > limit {
        Err(Error::TermLimit { terms, limit })
    } else {
        Ok(())
    }
}

/// A valuation, with an explicit infinite value for zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Valuation::Infinite
    }
}

impl Add for Valuation {
    type Output = Valuation;
    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("∞"),
        }
    }
}

/// Sparse Laurent polynomial in `t` over `F_p`. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LaurentPoly {
    p: u64,
    terms: BTreeMap<i64, u64>,
}

impl LaurentPoly {
    pub fn zero(p: u64) -> Self {
        debug_assert!(is_prime(p));
        LaurentPoly {
            p,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(p: u64) -> Self {
        Self::monomial(p, 0, 1)
    }

    /// `coeff * t^exp`, with `coeff` reduced mod `p`.
    pub fn monomial(p: u64, exp: i64, coeff: u64) -> Self {
        let mut out = Self::zero(p);
        let c = coeff % p;
        if c != 0 {
            out.terms.insert(exp, c);
        }
        out
    }

    /// `t^exp`.
    pub fn t_pow(p: u64, exp: i64) -> Self {
        Self::monomial(p, exp, 1)
    }

    /// Builds from `(exponent, coefficient)` pairs, summing repeats.
    pub fn from_terms(p: u64, terms: impl IntoIterator<Item = (i64, u64)>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let mut out = Self::zero(p);
        for (e, c) in terms {
            out.add_term(e, c % p);
        }
        Ok(out)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// `(exponent, coefficient)` in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    pub fn coeff(&self, exp: i64) -> u64 {
        self.terms.get(&exp).copied().unwrap_or(0)
    }

    pub fn valuation(&self) -> Valuation {
        self.terms
            .keys()
            .next()
            .map_or(Valuation::Infinite, |&e| Valuation::Finite(e))
    }

    fn add_term(&mut self, exp: i64, coeff: u64) {
        if coeff == 0 {
            return;
        }
        let p = self.p;
        let entry = self.terms.entry(exp).or_insert(0);
        *entry = (*entry + coeff) % p;
        if *entry == 0 {
            self.terms.remove(&exp);
        }
    }

    fn same_field(&self, other: &LaurentPoly) -> Result<()> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(Error::Mismatch(format!(
                "characteristic {} vs {}",
                self.p, other.p
            )))
        }
    }

    pub fn try_add(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.same_field(other)?;
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e, c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.same_field(other)?;
        // Sparse products often collapse, so only the realized size is checked.
        let p = self.p as u128;
        let mut out = LaurentPoly::zero(self.p);
        for (e1, c1) in self.terms() {
            for (e2, c2) in other.terms() {
                out.add_term(e1 + e2, (c1 as u128 * c2 as u128 % p) as u64);
            }
        }
        check_terms(out.term_count())?;
        Ok(out)
    }

    /// Multiplication by a scalar of `F_p`.
    pub fn scale(&self, c: u64) -> LaurentPoly {
        let c = c % self.p;
        let mut out = LaurentPoly::zero(self.p);
        if c == 0 {
            return out;
        }
        for (e, k) in self.terms() {
            out.terms
                .insert(e, (k as u128 * c as u128 % self.p as u128) as u64);
        }
        out
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: i64) -> LaurentPoly {
        LaurentPoly {
            p: self.p,
            terms: self.terms.iter().map(|(&e, &c)| (e + k, c)).collect(),
        }
    }

    fn neg_ref(&self) -> LaurentPoly {
        self.scale(self.p - 1)
    }

    pub fn pow(&self, mut e: u32) -> Result<LaurentPoly> {
        let mut base = self.clone();
        let mut acc = LaurentPoly::one(self.p);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.try_mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.try_mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Inverse of a monomial `c t^k`; other elements are not units of the
    /// polynomial model.
    pub fn monomial_inverse(&self) -> Result<LaurentPoly> {
        match self.terms.len() {
            1 => {
                let (&e, &c) = self.terms.iter().next().expect("one term");
                Ok(LaurentPoly::monomial(self.p, -e, inv_mod_prime(c, self.p)))
            }
            _ => domain(format!("{self} is not a monomial")),
        }
    }
}

/// Ring operators panic on mixed characteristic; use the `try_*` methods
/// when operands come from outside.
impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_add(rhs).expect("laurent addition")
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_sub(rhs).expect("laurent subtraction")
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_mul(rhs).expect("laurent multiplication")
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.neg_ref()
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (e, c)) in self.terms().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            match (c, e) {
                (c, 0) => write!(f, "{c}")?,
                (1, e) => write!(f, "t^{e}")?,
                (c, e) => write!(f, "{c}·t^{e}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly[F_{}]({self})", self.p)
    }
}

/// `(p, n, b)` describing `L = K(x)` with `x^(p^n) = t^(-b)` and `v_L(x) = -b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InsepParams {
    radix: Radix,
    b: i64,
}

impl InsepParams {
    pub fn new(p: u64, n: u32, b: i64) -> Result<Self> {
        let radix = Radix::new(p, n)?;
        if b <= 0 || b as u64 >= radix.modulus() {
            return domain(format!("b = {b} must lie in (0, {})", radix.modulus()));
        }
        if (b as u64).is_multiple_of(p) {
            return domain(format!("b = {b} is divisible by {p}"));
        }
        Ok(InsepParams { radix, b })
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

    pub fn b(&self) -> i64 {
        self.b
    }

    /// `[L : K] = p^n`.
    pub fn degree(&self) -> u64 {
        self.radix.modulus()
    }
}

/// Element `sum_a c_a x^a` of `L`, `0 <= a < p^n`, `c_a` in `K`.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InsepElement {
    params: InsepParams,
    coeffs: Vec<LaurentPoly>,
}

impl InsepElement {
    pub fn zero(params: InsepParams) -> Self {
        InsepElement {
            params,
            coeffs: vec![LaurentPoly::zero(params.p()); params.degree() as usize],
        }
    }

    pub fn one(params: InsepParams) -> Self {
        Self::from_k(params, LaurentPoly::one(params.p()))
    }

    /// `c * x^a`.
    pub fn monomial(params: InsepParams, c: LaurentPoly, a: u64) -> Result<Self> {
        params.radix.check(a)?;
        if c.p() != params.p() {
            return Err(Error::Mismatch("coefficient characteristic".into()));
        }
        let mut out = Self::zero(params);
        out.coeffs[a as usize] = c;
        Ok(out)
    }

    pub fn x_pow(params: InsepParams, a: u64) -> Result<Self> {
        Self::monomial(params, LaurentPoly::one(params.p()), a)
    }

    /// Embeds `c` from `K`.
    pub fn from_k(params: InsepParams, c: LaurentPoly) -> Self {
        let mut out = Self::zero(params);
        out.coeffs[0] = c;
        out
    }

    pub fn from_coeffs(params: InsepParams, coeffs: Vec<LaurentPoly>) -> Result<Self> {
        if coeffs.len() != params.degree() as usize {
            return domain(format!("expected {} coefficients", params.degree()));
        }
        if coeffs.iter().any(|c| c.p() != params.p()) {
            return Err(Error::Mismatch("coefficient characteristic".into()));
        }
        Ok(InsepElement { params, coeffs })
    }

    pub fn params(&self) -> InsepParams {
        self.params
    }

    /// Coefficient of `x^a`.
    pub fn coeff(&self, a: u64) -> &LaurentPoly {
        &self.coeffs[a as usize]
    }

    pub fn coeffs(&self) -> &[LaurentPoly] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(LaurentPoly::is_zero)
    }

    pub fn term_count(&self) -> usize {
        self.coeffs.iter().map(LaurentPoly::term_count).sum()
    }

    fn same_params(&self, other: &InsepElement) -> Result<()> {
        if self.params == other.params {
            Ok(())
        } else {
            Err(Error::Mismatch(format!(
                "extension parameters {:?} vs {:?}",
                self.params, other.params
            )))
        }
    }

    pub fn try_add(&self, other: &InsepElement) -> Result<InsepElement> {
        self.same_params(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.try_add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(InsepElement {
            params: self.params,
            coeffs,
        })
    }

    pub fn try_sub(&self, other: &InsepElement) -> Result<InsepElement> {
        self.same_params(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.try_sub(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(InsepElement {
            params: self.params,
            coeffs,
        })
    }

    /// Product, reduced by `x^(p^n) = t^(-b)`.
    pub fn try_mul(&self, other: &InsepElement) -> Result<InsepElement> {
        self.same_params(other)?;
        let q = self.params.degree() as usize;
        let mut out = InsepElement::zero(self.params);
        for (a1, c1) in self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for (a2, c2) in other
                .coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
            {
                let mut prod = c1.try_mul(c2)?;
                let mut a = a1 + a2;
                if a >= q {
                    prod = prod.shift(-self.params.b);
                    a -= q;
                }
                out.coeffs[a] = out.coeffs[a].try_add(&prod)?;
            }
        }
        check_terms(out.term_count())?;
        Ok(out)
    }

    /// Multiplication by a scalar from `K`.
    pub fn scale(&self, c: &LaurentPoly) -> Result<InsepElement> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| a.try_mul(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(InsepElement {
            params: self.params,
            coeffs,
        })
    }

    pub fn pow(&self, mut e: u32) -> Result<InsepElement> {
        let mut base = self.clone();
        let mut acc = InsepElement::one(self.params);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.try_mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.try_mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// `v_L(sum c_a x^a) = min_a (p^n v_K(c_a) - a b)`. The candidates are
    /// pairwise distinct mod `p^n`, so the minimum is attained once.
    pub fn valuation(&self) -> Valuation {
        let q = self.params.degree() as i64;
        self.coeffs
            .iter()
            .enumerate()
            .filter_map(|(a, c)| {
                c.valuation()
                    .finite()
                    .map(|v| q * v - a as i64 * self.params.b)
            })
            .min()
            .map_or(Valuation::Infinite, Valuation::Finite)
    }
}

impl fmt::Display for InsepElement {
    /// Terms `c·t^k·x^a` sorted by `(a, k)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (a, c) in self.coeffs.iter().enumerate() {
            for (e, k) in c.terms() {
                if !first {
                    f.write_str(" + ")?;
                }
                first = false;
                if k != 1 {
                    write!(f, "{k}·")?;
                }
                write!(f, "t^{e}·x^{a}")?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for InsepElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "InsepElement[p={}, n={}, b={}]({self})",
            self.params.p(),
            self.params.n(),
            self.params.b()
        )
    }
}
