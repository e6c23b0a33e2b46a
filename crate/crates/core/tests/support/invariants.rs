// Exhaustive invariant checks shared by the core property tests and the
// acceptance suite. Each returns the first counterexample as an error string.
#![allow(dead_code)]

use num_bigint::BigUint;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use scaffold_core::insep::{build_realization, dp_act, dp_mul, DividedPowerElement};
use scaffold_core::localfield::{InsepElement, InsepParams, LaurentPoly, Valuation};
use scaffold_core::padic::{lucas_binom, Radix};
use scaffold_core::special::weak_report;
use scaffold_core::structure::{analyze, IdealStructure, ScaffoldParams};

pub type Check = Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// `(p, n)` with `p^n <= bound`, `p` in the given list.
pub fn radices(primes: &[u64], bound: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    for &p in primes {
        let mut n = 1;
        while p.pow(n) <= bound {
            out.push((p, n));
            n += 1;
        }
    }
    out
}

/// Reflexive, antisymmetric, transitive.
pub fn preceq_partial_order(p: u64, n: u32) -> Check {
    let r = Radix::new(p, n).unwrap();
    let q = r.modulus();
    for s in 0..q {
        ensure(r.preceq(s, s), || format!("{s} ⪯ {s} fails (p={p}, n={n})"))?;
        for t in 0..q {
            if s != t && r.preceq(s, t) {
                ensure(!r.preceq(t, s), || format!("antisymmetry at ({s},{t})"))?;
            }
        }
    }
    // Transitivity through the digitwise form: every chain s ⪯ t ⪯ u.
    for t in 0..q {
        let below: Vec<u64> = (0..=t).filter(|&s| r.preceq(s, t)).collect();
        let above: Vec<u64> = (t..q).filter(|&u| r.preceq(t, u)).collect();
        for &s in &below {
            for &u in &above {
                ensure(r.preceq(s, u), || format!("transitivity {s} ⪯ {t} ⪯ {u}"))?;
            }
        }
    }
    Ok(())
}

/// The four characterizations of digits adding without carry agree, and
/// the digitwise and carry-free forms of ⪯ coincide.
pub fn preceq_equivalences(p: u64, n: u32) -> Check {
    let r = Radix::new(p, n).unwrap();
    let q = r.modulus();
    for s in 0..q {
        for t in 0..q {
            let i = (0..n).all(|j| r.digit(s, j) + r.digit(t, j) < p);
            let ii = r.preceq(s, q - 1 - t);
            let iii = r.preceq(t, q - 1 - s);
            let iv = s + t < q && r.preceq(s, s + t);
            ensure(i == ii && ii == iii && iii == iv, || {
                format!("p={p} n={n} s={s} t={t}: {i} {ii} {iii} {iv}")
            })?;
            ensure(r.preceq(s, t) == r.preceq_carry_free(s, t), || {
                format!("two forms of ⪯ differ at ({s},{t})")
            })?;
        }
    }
    Ok(())
}

fn factorials(up_to: u64) -> Vec<BigUint> {
    let mut f = vec![BigUint::from(1u32)];
    for k in 1..=up_to {
        let next = &f[k as usize - 1] * BigUint::from(k);
        f.push(next);
    }
    f
}

/// Lucas binomials against exact factorials, `a, b <= max`.
pub fn lucas_matches_factorials(primes: &[u64], max: u64) -> Check {
    let f = factorials(max);
    for &p in primes {
        let pb = BigUint::from(p);
        for a in 0..=max {
            for b in 0..=a {
                let exact = &f[a as usize] / (&f[b as usize] * &f[(a - b) as usize]);
                let want = (exact % &pb).iter_u64_digits().next().unwrap_or(0);
                let got = lucas_binom(a, b, p);
                ensure(got == want, || {
                    format!("C({a},{b}) mod {p}: {got} vs {want}")
                })?;
            }
            for b in a + 1..=max.min(a + 3) {
                ensure(lucas_binom(a, b, p) == 0, || {
                    format!("C({a},{b}) should vanish")
                })?;
            }
        }
    }
    Ok(())
}

pub fn digit_sum_monotone(p: u64, n: u32) -> Check {
    let r = Radix::new(p, n).unwrap();
    for t in r.elements() {
        for s in 0..t {
            if r.preceq(s, t) {
                ensure(r.digit_sum(s) < r.digit_sum(t), || {
                    format!("digit_sum({s}) >= digit_sum({t}) with {s} ⪯ {t}")
                })?;
            }
        }
    }
    Ok(())
}

/// Deterministic pseudo-random shift vectors coprime to `p`.
pub fn sample_shifts(p: u64, n: u32, count: usize, seed: u64) -> Vec<Vec<i64>> {
    let mut rng = StdRng::seed_from_u64(seed);
    let bound = (p as i64).pow(n) * 3;
    (0..count)
        .map(|_| {
            (0..n)
                .map(|_| loop {
                    let b = rng.gen_range(-bound..=bound);
                    if b.rem_euclid(p as i64) != 0 {
                        break b;
                    }
                })
                .collect()
        })
        .collect()
}

/// eua and r∘eub depend only on `b_i mod p^i`; so do the reports.
pub fn eua_residue_dependence(p: u64, n: u32, shifts: &[i64], seed: u64) -> Check {
    let base = ScaffoldParams::new(p, n, shifts.to_vec()).unwrap();
    let radix = base.radix();
    let q = radix.modulus() as i64;
    let mut rng = StdRng::seed_from_u64(seed);
    let c: Vec<i64> = (0..n).map(|_| rng.gen_range(-3i64..=3)).collect();
    let moved: Vec<i64> = shifts
        .iter()
        .enumerate()
        .map(|(k, &b)| b + c[k] * radix.pow(k as u32 + 1) as i64)
        .collect();
    let other = ScaffoldParams::new(p, n, moved.clone()).unwrap();
    for s in radix.elements() {
        ensure(base.eua(s as i64) == other.eua(s as i64), || {
            format!("eua({s}) changes under {shifts:?} -> {moved:?}")
        })?;
        ensure(
            base.eub(s).rem_euclid(q) == other.eub(s).rem_euclid(q),
            || format!("r(eub({s})) changes under {shifts:?} -> {moved:?}"),
        )?;
    }
    for h in 0..q {
        let a = analyze(h, &base).unwrap();
        let b = analyze(h, &other).unwrap();
        // d and w both move by the digit-linear form sum_i s_(n-i) c_i.
        for s in radix.elements() {
            let lin: i64 = (1..=n)
                .map(|i| radix.digit(s, n - i) as i64 * c[i as usize - 1])
                .sum();
            ensure(
                b.d[s as usize] - a.d[s as usize] == lin
                    && b.w[s as usize] - a.w[s as usize] == lin,
                || {
                    format!(
                        "d/w at s={s}, h={h} do not shift by {lin} under {shifts:?} -> {moved:?}"
                    )
                },
            )?;
        }
        ensure(
            a.b_exponent == b.b_exponent
                && a.free == b.free
                && a.dd == b.dd
                && a.ee == b.ee
                && a.tolerance_required == b.tolerance_required,
            || format!("report for h={h} changes under {shifts:?} -> {moved:?}"),
        )?;
        let shifted = analyze(h + q * rng.gen_range(-2i64..=2), &base).unwrap();
        ensure(a.same_structure(&shifted), || {
            format!("report not periodic in h={h}")
        })?;
    }
    Ok(())
}

/// Congruent shifts give `eub(s) ≡ b_n s (mod p^n)`.
pub fn eub_congruent_linear(p: u64, n: u32, bn: i64, seed: u64) -> Check {
    let radix = Radix::new(p, n).unwrap();
    let q = radix.modulus() as i64;
    let mut rng = StdRng::seed_from_u64(seed);
    let shifts: Vec<i64> = (1..=n)
        .map(|i| bn + rng.gen_range(-2i64..=2) * radix.pow(i) as i64)
        .collect();
    let params = ScaffoldParams::new(p, n, shifts.clone()).unwrap();
    for s in radix.elements() {
        ensure((params.eub(s) - bn * s as i64).rem_euclid(q) == 0, || {
            format!("eub({s}) ≢ {bn}·{s} for shifts {shifts:?}")
        })?;
    }
    Ok(())
}

/// `s ⪯ t` gives `eub(s) + eub(t - s) = eub(t)`; eua and eub are inverse.
pub fn eub_eua_identities(params: &ScaffoldParams) -> Check {
    let radix = params.radix();
    let q = radix.modulus() as i64;
    for t in radix.elements() {
        for s in (0..=t).filter(|&s| radix.preceq(s, t)) {
            ensure(params.eub(s) + params.eub(t - s) == params.eub(t), || {
                format!("eub not additive on {s} ⪯ {t}")
            })?;
        }
        let ti = t as i64;
        ensure((params.eub(params.eua(ti)) + ti).rem_euclid(q) == 0, || {
            format!("eub(eua({t})) ≢ -{t}")
        })?;
        ensure(params.eua(-params.eub(t)) == t, || {
            format!("eua(-eub({t})) ≠ {t}")
        })?;
    }
    Ok(())
}

/// `t -> u` with `u + eua(t) = p^n - 1 + s` is a bijection from the window
/// points with `eua(t) ⪰ s` onto `{u ⪰ s}`, carrying `H(s,t)` to `H(u,b)`
/// and `D(s,t)` to `d(u) - d(u-s)`.
pub fn t_u_bijection(params: &ScaffoldParams, h: i64) -> Check {
    let st = IdealStructure::new(params, h).map_err(|e| e.to_string())?;
    let radix = params.radix();
    let q = radix.modulus();
    let b = st.b();
    // Digit table, so the q^2 comparisons below avoid repeated division.
    let digits: Vec<Vec<u64>> = radix
        .elements()
        .map(|x| (0..radix.n()).map(|j| radix.digit(x, j)).collect())
        .collect();
    let le = |x: u64, y: u64| {
        digits[x as usize]
            .iter()
            .zip(&digits[y as usize])
            .all(|(a, b)| a <= b)
    };
    for s in radix.elements() {
        let mut hit = vec![false; q as usize];
        for t in st.window() {
            let a = params.eua(t);
            if !le(s, a) {
                continue;
            }
            let u = q - 1 + s - a;
            ensure(u < q && le(s, u), || format!("s={s} t={t}: u={u} not ⪰ s"))?;
            ensure(!hit[u as usize], || format!("s={s}: u={u} hit twice"))?;
            hit[u as usize] = true;
            let lhs = st.representative(s, t).unwrap();
            let rhs = st.representative(u, b).unwrap();
            ensure(lhs == rhs, || {
                format!("H({s},{t})={lhs} but H({u},b)={rhs}")
            })?;
            let dq = st.quotient(s, t).unwrap();
            ensure(dq == st.d(u) - st.d(u - s), || {
                format!("D({s},{t}) ≠ d({u}) - d({u}-{s})")
            })?;
        }
        for u in radix.elements().filter(|&u| le(s, u)) {
            ensure(hit[u as usize], || {
                format!("s={s}: u={u} never reached (h={h})")
            })?;
        }
    }
    Ok(())
}

/// The two descriptions of `w`, the `eua(H)` identity and superadditivity.
pub fn w_identities(params: &ScaffoldParams, h: i64) -> Check {
    let st = IdealStructure::new(params, h).map_err(|e| e.to_string())?;
    let radix = params.radix();
    let q = radix.modulus();
    for s in radix.elements() {
        ensure(st.w_by_definition(s) == st.w_by_window(s), || {
            format!(
                "w({s}) differs between forms (h={h}, b={:?})",
                params.shifts()
            )
        })?;
        for t in st.window() {
            let a = params.eua(t);
            if radix.preceq(s, a) {
                let hh = st.representative(s, t).unwrap();
                ensure(params.eua(hh) == a - s, || {
                    format!("eua(H({s},{t})) ≠ eua({t}) - {s}")
                })?;
                let e = st.epsilon(s, t).map_err(|e| e.to_string())?;
                ensure(e <= 1, || format!("ε({s},{t}) = {e}"))?;
            }
        }
    }
    for r in radix.elements() {
        for s in radix.elements().filter(|&s| radix.preceq(s, q - 1 - r)) {
            ensure(st.w(r + s) >= st.w(r) + st.w(s), || {
                format!("w({r}+{s}) < w({r}) + w({s}) (h={h})")
            })?;
        }
    }
    Ok(())
}

/// `b_i = -1 + m_i p^i`, `h = 0`: `d = w` is digit-additive with weights `m_i`.
pub fn minus_one_shifts(p: u64, n: u32, m: &[i64]) -> Check {
    let radix = Radix::new(p, n).unwrap();
    let shifts: Vec<i64> = (1..=n)
        .map(|i| -1 + m[i as usize - 1] * radix.pow(i) as i64)
        .collect();
    let params = ScaffoldParams::new(p, n, shifts.clone()).unwrap();
    let st = IdealStructure::new(&params, 0).map_err(|e| e.to_string())?;
    ensure(st.is_free(), || format!("{shifts:?}, h=0 not free"))?;
    for s in radix.elements() {
        let by_digits: i64 = (1..=n)
            .map(|i| radix.digit(s, n - i) as i64 * m[i as usize - 1])
            .sum();
        ensure(st.d(s) == by_digits && st.w(s) == by_digits, || {
            format!(
                "{shifts:?}: d({s})={} w({s})={} expected {by_digits}",
                st.d(s),
                st.w(s)
            )
        })?;
        let additive: i64 = (0..n)
            .map(|j| radix.digit(s, j) as i64 * st.w(radix.pow(j)))
            .sum();
        ensure(st.w(s) == additive, || format!("w({s}) not digit-additive"))?;
    }
    Ok(())
}

/// All-ones shifts: `w` is unchanged under `h -> p^n + 2 - h`, and `h ≡ 1`
/// gives `d = w = 0`.
pub fn weak_duality(p: u64, n: u32) -> Check {
    let params = ScaffoldParams::uniform(p, n, 1).unwrap();
    let q = params.modulus() as i64;
    for h in 0..q {
        let a = analyze(h, &params).unwrap();
        let b = analyze(q + 2 - h, &params).unwrap();
        ensure(
            a.w == b.w && a.embedding_dimension == b.embedding_dimension,
            || format!("p={p} n={n}: w differs for h={h} and {}", q + 2 - h),
        )?;
    }
    let one = analyze(1, &params).unwrap();
    ensure(
        one.d.iter().all(|&x| x == 0) && one.w.iter().all(|&x| x == 0),
        || format!("p={p} n={n}: h=1 has d={:?} w={:?}", one.d, one.w),
    )?;
    let weak = weak_report(p, n, 1).map_err(|e| e.to_string())?;
    ensure(
        weak.free && weak.embedding_dimension == n as usize + 1,
        || format!("weak_report(h=1) = {weak:?}"),
    )
}

fn random_element(params: InsepParams, rng: &mut StdRng) -> InsepElement {
    let p = params.p();
    let coeffs = (0..params.degree())
        .map(|_| {
            let terms = rng.gen_range(0..3);
            LaurentPoly::from_terms(
                p,
                (0..terms).map(|_| (rng.gen_range(-4i64..=4), rng.gen_range(0..p))),
            )
            .unwrap()
        })
        .collect();
    InsepElement::from_coeffs(params, coeffs).unwrap()
}

/// `D_m(uv) = sum_i D_i(u) D_(m-i)(v)` on random pairs.
pub fn module_algebra_law(p: u64, n: u32, b: i64, pairs: usize, seed: u64) -> Check {
    let params = InsepParams::new(p, n, b).unwrap();
    let radix = params.radix();
    let basis: Vec<DividedPowerElement> = radix
        .elements()
        .map(|i| DividedPowerElement::basis(radix, i).unwrap())
        .collect();
    let mut rng = StdRng::seed_from_u64(seed);
    for _ in 0..pairs {
        let u = random_element(params, &mut rng);
        let v = random_element(params, &mut rng);
        let uv = u.try_mul(&v).unwrap();
        let m = rng.gen_range(0..radix.modulus());
        let lhs = dp_act(&basis[m as usize], &uv).unwrap();
        let mut rhs = InsepElement::zero(params);
        for i in 0..=m {
            let a = dp_act(&basis[i as usize], &u).unwrap();
            let c = dp_act(&basis[(m - i) as usize], &v).unwrap();
            rhs = rhs.try_add(&a.try_mul(&c).unwrap()).unwrap();
        }
        ensure(lhs == rhs, || {
            format!("p={p} n={n} b={b} m={m}: u={u:?} v={v:?}")
        })?;
    }
    Ok(())
}

/// `D_a = prod_r D_(p^r)^(a_r) / a_r!`, and `D_(p^r)^p = 0`.
pub fn divided_power_factorization(p: u64, n: u32) -> Check {
    let radix = Radix::new(p, n).unwrap();
    for a in radix.elements() {
        let mut prod = DividedPowerElement::identity(radix);
        let mut fact = 1u64;
        for r in 0..n {
            let ar = radix.digit(a, r);
            let gen = DividedPowerElement::basis(radix, radix.pow(r)).unwrap();
            prod = dp_mul(&prod, &gen.pow(ar as u32).unwrap()).unwrap();
            fact = fact * (1..=ar).product::<u64>() % p;
        }
        let inv = (1..p).find(|&k| k * fact % p == 1).unwrap();
        let got = prod.scale(&LaurentPoly::monomial(p, 0, inv)).unwrap();
        let want = DividedPowerElement::basis(radix, a).unwrap();
        ensure(got == want, || {
            format!("p={p} n={n}: factorization of D_{a} gives {got}")
        })?;
    }
    for r in 0..n {
        let gen = DividedPowerElement::basis(radix, radix.pow(r)).unwrap();
        ensure(gen.pow(p as u32).unwrap().is_zero(), || {
            format!("D_{}^p ≠ 0", radix.pow(r))
        })?;
    }
    Ok(())
}

/// `Ψ^(s)` raises valuations by at least `eub(s)` on `P_L^t`.
pub fn graded_action(p: u64, n: u32, b: i64, ts: &[i64]) -> Check {
    let real = build_realization(p, n, b).map_err(|e| e.to_string())?;
    let radix = real.radix();
    let q = radix.modulus() as i64;
    for s in radix.elements() {
        let psi = real.psi_monomial(s).unwrap();
        let shift = real.engine_params().eub(s);
        for &t in ts {
            for t2 in t..t + q {
                let v = dp_act(&psi, &real.lambda(t2)).unwrap().valuation();
                ensure(v >= Valuation::Finite(t + shift), || {
                    format!("p={p} n={n} b={b}: v(Ψ^({s}) λ_{t2}) = {v} < {t} + {shift}")
                })?;
            }
        }
    }
    Ok(())
}

/// Discrete valuation axioms on random elements.
pub fn valuation_axioms(p: u64, n: u32, b: i64, pairs: usize, seed: u64) -> Check {
    let params = InsepParams::new(p, n, b).unwrap();
    let q = params.degree() as i64;
    let mut rng = StdRng::seed_from_u64(seed);
    for _ in 0..pairs {
        let u = random_element(params, &mut rng);
        let v = random_element(params, &mut rng);
        let vu = u.valuation();
        let vv = v.valuation();
        let prod = u.try_mul(&v).unwrap().valuation();
        ensure(prod == vu + vv, || {
            format!("v(uv) ≠ v(u)+v(v): {u:?}, {v:?}")
        })?;
        let sum = u.try_add(&v).unwrap().valuation();
        ensure(sum >= vu.min(vv), || {
            format!("ultrametric fails: {u:?}, {v:?}")
        })?;
        let c = u.coeff(0).clone();
        let vc = InsepElement::from_k(params, c.clone()).valuation();
        let want = c
            .valuation()
            .finite()
            .map_or(Valuation::Infinite, |k| Valuation::Finite(q * k));
        ensure(vc == want, || format!("v_L on K is not p^n v_K at {c:?}"))?;
        let fr = u.try_add(&v).unwrap().pow(p as u32).unwrap();
        let fr2 = u
            .pow(p as u32)
            .unwrap()
            .try_add(&v.pow(p as u32).unwrap())
            .unwrap();
        ensure(fr == fr2, || format!("Frobenius fails: {u:?}, {v:?}"))?;
    }
    let mut seen = vec![false; q as usize];
    for a in 0..params.degree() {
        let v = InsepElement::x_pow(params, a)
            .unwrap()
            .valuation()
            .finite()
            .unwrap();
        seen[v.rem_euclid(q) as usize] = true;
    }
    ensure(seen.iter().all(|&x| x), || {
        format!("x^a residues incomplete for b={b}")
    })
}
