//! The divided power Hopf algebra `A(n)` acting on `L = K(x)`,
//! `x^(p^n) = t^(-b)`, and the scaffold it carries.
//!
//! `A(n)` has `K`-basis `D_0, ..., D_(p^n - 1)` with
//! `D_i D_j = C(i + j, j) D_(i + j)` and acts by `D_r(x^a) = C(a, r) x^(a - r)`.
//! With `Ψ_i = D_(p^(n-i))` and
//! `λ_t = t^(f_t) x^(eua(t)) / Π eua(t)_(j)!` the scaffold equalities hold
//! exactly. The checks here compute everything by polynomial arithmetic and
//! compare against the numerical engine.

use std::fmt;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::localfield::{InsepElement, InsepParams, LaurentPoly, Valuation};
use crate::padic::{factorial_mod, inv_mod_prime, lucas_binom, Radix};
use crate::structure::{IdealStructure, ScaffoldParams, StructureReport};

/// Element `sum_i c_i D_i` of `A(n) ⊗ K`.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DividedPowerElement {
    radix: Radix,
    coeffs: Vec<LaurentPoly>,
}

impl DividedPowerElement {
    pub fn zero(radix: Radix) -> Self {
        DividedPowerElement {
            radix,
            coeffs: vec![LaurentPoly::zero(radix.p()); radix.modulus() as usize],
        }
    }

    pub fn identity(radix: Radix) -> Self {
        Self::basis(radix, 0).expect("D_0 exists")
    }

    /// `D_i`.
    pub fn basis(radix: Radix, i: u64) -> Result<Self> {
        Self::monomial(radix, LaurentPoly::one(radix.p()), i)
    }

    /// `c * D_i`.
    pub fn monomial(radix: Radix, c: LaurentPoly, i: u64) -> Result<Self> {
        radix.check(i)?;
        if c.p() != radix.p() {
            return Err(Error::Mismatch("coefficient characteristic".into()));
        }
        let mut out = Self::zero(radix);
        out.coeffs[i as usize] = c;
        Ok(out)
    }

    pub fn radix(&self) -> Radix {
        self.radix
    }

    /// Coefficient of `D_i`.
    pub fn coeff(&self, i: u64) -> &LaurentPoly {
        &self.coeffs[i as usize]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(LaurentPoly::is_zero)
    }

    fn same_radix(&self, other: Radix) -> Result<()> {
        if self.radix == other {
            Ok(())
        } else {
            domain(format!(
                "divided powers over (p, n) = ({}, {}) vs ({}, {})",
                self.radix.p(),
                self.radix.n(),
                other.p(),
                other.n()
            ))
        }
    }

    pub fn try_add(&self, other: &DividedPowerElement) -> Result<DividedPowerElement> {
        self.same_radix(other.radix)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.try_add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(DividedPowerElement {
            radix: self.radix,
            coeffs,
        })
    }

    pub fn try_sub(&self, other: &DividedPowerElement) -> Result<DividedPowerElement> {
        self.same_radix(other.radix)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.try_sub(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(DividedPowerElement {
            radix: self.radix,
            coeffs,
        })
    }

    pub fn scale(&self, c: &LaurentPoly) -> Result<DividedPowerElement> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| a.try_mul(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(DividedPowerElement {
            radix: self.radix,
            coeffs,
        })
    }

    pub fn pow(&self, e: u32) -> Result<DividedPowerElement> {
        let mut acc = Self::identity(self.radix);
        for _ in 0..e {
            acc = dp_mul(&acc, self)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for DividedPowerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({c})·D_{i}")?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for DividedPowerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DividedPowerElement({self})")
    }
}

/// Product in `A(n) ⊗ K`.
pub fn dp_mul(u: &DividedPowerElement, v: &DividedPowerElement) -> Result<DividedPowerElement> {
    u.same_radix(v.radix)?;
    let radix = u.radix;
    let q = radix.modulus();
    let mut out = DividedPowerElement::zero(radix);
    for (i, ci) in u.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
        for (j, cj) in v.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            let k = (i + j) as u64;
            if k >= q {
                continue;
            }
            let binom = lucas_binom(k, j as u64, radix.p());
            if binom == 0 {
                continue;
            }
            let term = ci.try_mul(cj)?.scale(binom);
            out.coeffs[k as usize] = out.coeffs[k as usize].try_add(&term)?;
        }
    }
    Ok(out)
}

/// Action of `A(n) ⊗ K` on `L`.
pub fn dp_act(u: &DividedPowerElement, z: &InsepElement) -> Result<InsepElement> {
    let params = z.params();
    u.same_radix(params.radix())?;
    let p = params.p();
    let mut coeffs = vec![LaurentPoly::zero(p); params.degree() as usize];
    for (r, cr) in u.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
        for (a, ea) in z.coeffs().iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            if r > a {
                continue;
            }
            let binom = lucas_binom(a as u64, r as u64, p);
            if binom == 0 {
                continue;
            }
            let term = cr.try_mul(ea)?.scale(binom);
            coeffs[a - r] = coeffs[a - r].try_add(&term)?;
        }
    }
    InsepElement::from_coeffs(params, coeffs)
}

/// The scaffold on `K(x)/K` with shift parameter `b`.
#[derive(Clone, Debug)]
pub struct ScaffoldRealization {
    params: InsepParams,
    engine: ScaffoldParams,
    /// `Ψ_1, ..., Ψ_n`.
    psi: Vec<DividedPowerElement>,
    /// `1 / Π a_(j)!` mod `p`, indexed by `a`.
    lambda_scale: Vec<u64>,
}

pub fn build_realization(p: u64, n: u32, b: i64) -> Result<ScaffoldRealization> {
    let params = InsepParams::new(p, n, b)?;
    let radix = params.radix();
    let engine = ScaffoldParams::uniform(p, n, b)?;
    let psi = (1..=n)
        .map(|i| DividedPowerElement::basis(radix, radix.pow(n - i)))
        .collect::<Result<Vec<_>>>()?;
    let inv_fact: Vec<u64> = (0..p)
        .map(|k| inv_mod_prime(factorial_mod(k, p), p))
        .collect();
    let lambda_scale = radix
        .elements()
        .map(|a| {
            (0..n).fold(1u64, |acc, j| {
                acc * inv_fact[radix.digit(a, j) as usize] % p
            })
        })
        .collect();
    Ok(ScaffoldRealization {
        params,
        engine,
        psi,
        lambda_scale,
    })
}

impl ScaffoldRealization {
    pub fn params(&self) -> InsepParams {
        self.params
    }

    /// Engine parameters with every shift equal to `b`.
    pub fn engine_params(&self) -> &ScaffoldParams {
        &self.engine
    }

    pub fn radix(&self) -> Radix {
        self.params.radix()
    }

    /// `f_t` with `t = -b eua(t) + p^n f_t`.
    pub fn f(&self, t: i64) -> i64 {
        let a = self.engine.eua(t) as i64;
        let q = self.params.degree() as i64;
        debug_assert_eq!((t + self.params.b() * a).rem_euclid(q), 0);
        (t + self.params.b() * a).div_euclid(q)
    }

    pub fn lambda(&self, t: i64) -> InsepElement {
        let a = self.engine.eua(t);
        let p = self.params.p();
        let c = LaurentPoly::monomial(p, self.f(t), self.lambda_scale[a as usize]);
        InsepElement::monomial(self.params, c, a).expect("eua(t) < p^n")
    }

    /// `Ψ_i` for `1 <= i <= n`.
    pub fn psi(&self, i: u32) -> &DividedPowerElement {
        &self.psi[i as usize - 1]
    }

    /// `Ψ^(s) = Ψ_n^(s_(0)) ... Ψ_1^(s_(n-1))`, multiplied in that order.
    pub fn psi_monomial(&self, s: u64) -> Result<DividedPowerElement> {
        let radix = self.radix();
        radix.check(s)?;
        let n = radix.n();
        let mut acc = DividedPowerElement::identity(radix);
        for j in 0..n {
            let e = radix.digit(s, j) as u32;
            acc = dp_mul(&acc, &self.psi(n - j).pow(e)?)?;
        }
        Ok(acc)
    }

    /// `Φ^(s) = t^(-w) Ψ^(s)`.
    pub fn phi(&self, s: u64, w: i64) -> Result<DividedPowerElement> {
        self.psi_monomial(s)?
            .scale(&LaurentPoly::t_pow(self.params.p(), -w))
    }
}

/// One failed equality.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckFailure {
    pub kind: String,
    pub i: Option<u32>,
    pub s: Option<u64>,
    pub t: Option<i64>,
    pub expected: String,
    pub got: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks_run: u64,
    pub failures: Vec<CheckFailure>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.checks_run += other.checks_run;
        self.failures.extend(other.failures);
    }

    fn check(
        &mut self,
        ok: bool,
        kind: &str,
        at: (Option<u32>, Option<u64>, Option<i64>),
        expected: impl FnOnce() -> String,
        got: impl FnOnce() -> String,
    ) {
        self.checks_run += 1;
        if !ok {
            self.failures.push(CheckFailure {
                kind: kind.to_string(),
                i: at.0,
                s: at.1,
                t: at.2,
                expected: expected(),
                got: got(),
            });
        }
    }
}

/// Checks the scaffold equalities for `t` in `t_range`, plus the
/// augmentation, `p`-nilpotence, shift and residue conditions on `A(n)`.
pub fn verify_scaffold(
    real: &ScaffoldRealization,
    t_range: RangeInclusive<i64>,
) -> Result<VerificationReport> {
    let radix = real.radix();
    let n = radix.n();
    let q = radix.modulus() as i64;
    let b = real.params.b();
    let p = radix.p();
    let mut rep = VerificationReport::default();

    for t in t_range {
        let lt = real.lambda(t);
        let v = lt.valuation();
        rep.check(
            v == Valuation::Finite(t),
            "lambda_valuation",
            (None, None, Some(t)),
            || t.to_string(),
            || v.to_string(),
        );
        let shifted = real.lambda(t + q);
        let expected = lt.scale(&LaurentPoly::t_pow(p, 1))?;
        rep.check(
            shifted == expected,
            "lambda_period",
            (None, None, Some(t)),
            || expected.to_string(),
            || shifted.to_string(),
        );
        let a = real.engine.eua(t);
        for i in 1..=n {
            let got = dp_act(real.psi(i), &lt)?;
            let expected = if radix.digit(a, n - i) >= 1 {
                real.lambda(t + radix.pow(n - i) as i64 * b)
            } else {
                InsepElement::zero(real.params)
            };
            rep.check(
                got == expected,
                "psi_lambda",
                (Some(i), None, Some(t)),
                || expected.to_string(),
                || got.to_string(),
            );
        }
    }

    let one = InsepElement::one(real.params);
    for i in 1..=n {
        let got = dp_act(real.psi(i), &one)?;
        rep.check(
            got.is_zero(),
            "augmentation",
            (Some(i), None, None),
            || "0".into(),
            || got.to_string(),
        );
        let pth = real.psi(i).pow(p as u32)?;
        rep.check(
            pth.is_zero(),
            "p_nilpotent",
            (Some(i), None, None),
            || "0".into(),
            || pth.to_string(),
        );
    }

    // eua(b) = p^n - 1, so rho = λ_b.
    let rho = real.lambda(b);
    let v_rho = rho.valuation();
    let mut residues = vec![false; q as usize];
    for s in radix.elements() {
        let got = dp_act(&real.psi_monomial(s)?, &rho)?.valuation();
        let expected = v_rho + Valuation::Finite(real.engine.eub(s));
        rep.check(
            got == expected,
            "eub_shift",
            (None, Some(s), Some(b)),
            || expected.to_string(),
            || got.to_string(),
        );
        if let Valuation::Finite(v) = got {
            residues[v.rem_euclid(q) as usize] = true;
        }
    }
    let missing: Vec<usize> = (0..q as usize).filter(|&r| !residues[r]).collect();
    rep.check(
        missing.is_empty(),
        "residues",
        (None, None, Some(b)),
        || "all residues".into(),
        || format!("missing {missing:?}"),
    );
    Ok(rep)
}

/// Default verification range `[h - p^n, h + 2 p^n]`.
pub fn default_t_range(real: &ScaffoldRealization, h: i64) -> RangeInclusive<i64> {
    let q = real.params.degree() as i64;
    h - q..=h + 2 * q
}

fn engine_structure<'a>(
    real: &'a ScaffoldRealization,
    h: i64,
    report: &StructureReport,
) -> Result<IdealStructure<'a>> {
    if report.h != h
        || report.p != real.params.p()
        || report.n != real.params.n()
        || report.b != real.engine.shifts()
    {
        return domain(format!(
            "report for (p, n, b, h) = ({}, {}, {:?}, {}) does not match the realization",
            report.p, report.n, report.b, report.h
        ));
    }
    IdealStructure::new(&real.engine, h)
}

/// The window `[h, h + p^n)`; `{λ_t}` over it is an `O_K`-basis of `P_L^h`.
fn window(real: &ScaffoldRealization, h: i64) -> std::ops::Range<i64> {
    h..h + real.params.degree() as i64
}

/// Checks that `Φ^(s)` lies in the associated order, that `t^(-1) Φ^(s)`
/// does not, and that `v_L(Φ^(s) λ_t)` is `H(s, t) + p^n ε(s, t)` or that
/// the image vanishes, for all `s` and all `t` in the window.
pub fn realize_associated_order_check(
    real: &ScaffoldRealization,
    h: i64,
    report: &StructureReport,
) -> Result<VerificationReport> {
    let engine = engine_structure(real, h, report)?;
    let radix = real.radix();
    let q = radix.modulus() as i64;
    let mut rep = VerificationReport::default();
    for s in radix.elements() {
        let w = report.w[s as usize];
        let phi = real.phi(s, w)?;
        let mut min_v: Option<i64> = None;
        for t in window(real, h) {
            let image = dp_act(&phi, &real.lambda(t))?;
            let v = image.valuation();
            if radix.preceq(s, real.engine.eua(t)) {
                let eps = engine.epsilon(s, t)? as i64;
                let expected = Valuation::Finite(engine.representative(s, t)? + q * eps);
                rep.check(
                    v == expected,
                    "phi_valuation",
                    (None, Some(s), Some(t)),
                    || expected.to_string(),
                    || v.to_string(),
                );
            } else {
                rep.check(
                    image.is_zero(),
                    "phi_vanishes",
                    (None, Some(s), Some(t)),
                    || "0".into(),
                    || image.to_string(),
                );
            }
            rep.check(
                v >= Valuation::Finite(h),
                "integrality",
                (None, Some(s), Some(t)),
                || format!(">= {h}"),
                || v.to_string(),
            );
            if let Valuation::Finite(v) = v {
                min_v = Some(min_v.map_or(v, |m| m.min(v)));
            }
        }
        // Maximality of w(s): some image falls below h + p^n.
        rep.check(
            min_v.is_some_and(|m| m < h + q),
            "maximality",
            (None, Some(s), None),
            || format!("< {}", h + q),
            || min_v.map_or("∞".into(), |m| m.to_string()),
        );
    }
    Ok(rep)
}

/// Compares the engine's freeness verdict with the valuations of
/// `Φ^(s) λ_b`: free exactly when they fill the window `[h, h + p^n)`.
pub fn realize_freeness_check(
    real: &ScaffoldRealization,
    h: i64,
    report: &StructureReport,
) -> Result<VerificationReport> {
    let engine = engine_structure(real, h, report)?;
    let radix = real.radix();
    let q = radix.modulus() as i64;
    let b = report.b_exponent;
    let lb = real.lambda(b);
    let mut rep = VerificationReport::default();
    let mut hit = vec![false; q as usize];
    for s in radix.elements() {
        let w = report.w[s as usize];
        let image = dp_act(&real.phi(s, w)?, &lb)?;
        let v = image.valuation();
        let d = Some(engine.d(s));
        // d(s) seen from the realization: how many powers of t separate
        // Ψ^(s) λ_b from the window.
        let got_d = v.finite().map(|v| (v + q * w - h).div_euclid(q));
        rep.check(
            got_d == d && Some(report.d[s as usize]) == d,
            "d_value",
            (None, Some(s), Some(b)),
            || format!("{:?}", d),
            || format!("{:?}", got_d),
        );
        if let Valuation::Finite(v) = v {
            if (h..h + q).contains(&v) {
                hit[(v - h) as usize] = true;
            }
        }
    }
    let covers = hit.iter().all(|&x| x);
    rep.check(
        covers == report.free,
        "freeness",
        (None, None, Some(b)),
        || format!("free = {}", report.free),
        || format!("valuations cover window = {covers}"),
    );
    Ok(rep)
}

/// `Φ^(r) Φ^(s)` is `Φ^(r+s)` when the digits of `r` and `s` add without
/// carry and `w` is additive on them; otherwise it lies in `t A`.
pub fn psi_prod_check(
    real: &ScaffoldRealization,
    h: i64,
    report: &StructureReport,
) -> Result<VerificationReport> {
    engine_structure(real, h, report)?;
    let radix = real.radix();
    let q = radix.modulus();
    let phis = radix
        .elements()
        .map(|s| real.phi(s, report.w[s as usize]))
        .collect::<Result<Vec<_>>>()?;
    let lambdas: Vec<InsepElement> = window(real, h).map(|t| real.lambda(t)).collect();
    let deep = Valuation::Finite(h + q as i64);
    let mut rep = VerificationReport::default();
    for r in radix.elements() {
        for s in radix.elements() {
            let prod = dp_mul(&phis[r as usize], &phis[s as usize])?;
            let additive = radix.preceq(r, q - 1 - s)
                && report.w[r as usize] + report.w[s as usize] == report.w[(r + s) as usize];
            let target = if additive {
                prod.try_sub(&phis[(r + s) as usize])?
            } else {
                prod
            };
            if additive {
                rep.check(
                    target.is_zero(),
                    "psi_prod_exact",
                    (None, Some(r), Some(s as i64)),
                    || "0".into(),
                    || target.to_string(),
                );
            }
            for (k, lt) in lambdas.iter().enumerate() {
                let v = dp_act(&target, lt)?.valuation();
                rep.check(
                    v >= deep,
                    if additive {
                        "psi_prod_unit"
                    } else {
                        "psi_prod_deep"
                    },
                    (None, Some(r), Some(h + k as i64)),
                    || format!(">= {deep} (s = {s})"),
                    || v.to_string(),
                );
            }
        }
    }
    Ok(rep)
}
