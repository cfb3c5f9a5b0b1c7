use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::Zero;

use super::kpoly::KPoly;
use super::word::{Word, WordElement};
use crate::combinatorics::catalan;
use crate::scalar::binomial;
use crate::{Error, Result};

/// Largest power accepted by [`jacobi_power`].
pub const POWER_GUARD: usize = 64;

/// Coefficients of `[(1+a)(1+b)]^n` in the reduced basis:
/// `m·1 + Σ c_j (ab)^j + Σ d_j (ba)^j + Σ e_j (ab)^j a + Σ f_j (ba)^j b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffTable {
    pub n: usize,
    pub m: KPoly,
    /// `c_1..c_n`.
    pub c: Vec<KPoly>,
    /// `d_1..d_n`.
    pub d: Vec<KPoly>,
    /// `e_0..e_{n-1}`.
    pub e: Vec<KPoly>,
    /// `f_0..f_{n-1}`.
    pub f: Vec<KPoly>,
}

fn get_from(v: &[KPoly], idx: Option<usize>) -> KPoly {
    idx.and_then(|i| v.get(i)).cloned().unwrap_or_else(KPoly::zero)
}

impl CoeffTable {
    /// `c_j`, zero outside `1..=n`.
    pub fn c(&self, j: usize) -> KPoly {
        get_from(&self.c, j.checked_sub(1))
    }

    /// `d_j`, zero outside `1..=n`.
    pub fn d(&self, j: usize) -> KPoly {
        get_from(&self.d, j.checked_sub(1))
    }

    /// `e_j`, zero outside `0..n`.
    pub fn e(&self, j: usize) -> KPoly {
        get_from(&self.e, Some(j))
    }

    /// `f_j`, zero outside `0..n`.
    pub fn f(&self, j: usize) -> KPoly {
        get_from(&self.f, Some(j))
    }

    fn from_element(n: usize, x: &WordElement) -> Result<Self> {
        let mut t = CoeffTable {
            n,
            m: x.coeff(Word::Unit),
            c: vec![KPoly::zero(); n],
            d: vec![KPoly::zero(); n],
            e: vec![KPoly::zero(); n],
            f: vec![KPoly::zero(); n],
        };
        for (w, coef) in x.terms() {
            let slot = match w {
                Word::Unit => continue,
                Word::Ab(j) if j <= n => &mut t.c[j - 1],
                Word::Ba(j) if j <= n => &mut t.d[j - 1],
                Word::Aba(j) if j < n => &mut t.e[j],
                Word::Bab(j) if j < n => &mut t.f[j],
                _ => {
                    return Err(Error::RelationViolated {
                        n,
                        detail: format!("word {w} is too long for power {n}"),
                    })
                }
            };
            *slot = coef.clone();
        }
        t.check_relations()?;
        Ok(t)
    }

    /// Rebuild the word element the table describes.
    pub fn to_element(&self) -> WordElement {
        let mut x = WordElement::zero();
        x.add_term(Word::Unit, self.m.clone());
        for j in 1..=self.n {
            x.add_term(Word::Ab(j), self.c(j));
            x.add_term(Word::Ba(j), self.d(j));
        }
        for j in 0..self.n {
            x.add_term(Word::Aba(j), self.e(j));
            x.add_term(Word::Bab(j), self.f(j));
        }
        x
    }

    /// `m = f_0 = e_0`, `c_j = f_{j-1} = e_{j-1}` and `d_j = c_{j+1}` (with `c_{n+1} = 0`).
    pub fn check_relations(&self) -> Result<()> {
        let fail = |detail: String| Err(Error::RelationViolated { n: self.n, detail });
        if self.m != self.e(0) || self.m != self.f(0) {
            return fail(format!("m = {}, e_0 = {}, f_0 = {}", self.m, self.e(0), self.f(0)));
        }
        for j in 1..=self.n {
            if self.c(j) != self.e(j - 1) || self.c(j) != self.f(j - 1) {
                return fail(format!("c_{j} differs from e_{} or f_{}", j - 1, j - 1));
            }
            if self.d(j) != self.c(j + 1) {
                return fail(format!("d_{j} = {} but c_{} = {}", self.d(j), j + 1, self.c(j + 1)));
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("sequence,j,value\n");
        let mut row = |name: &str, j: usize, p: &KPoly| {
            let _ = writeln!(out, "{name},{j},{p}");
        };
        row("m", 0, &self.m);
        for j in 1..=self.n {
            row("c", j, &self.c(j));
        }
        for j in 1..=self.n {
            row("d", j, &self.d(j));
        }
        for j in 0..self.n {
            row("e", j, &self.e(j));
        }
        for j in 0..self.n {
            row("f", j, &self.f(j));
        }
        out
    }
}

fn check_power(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("power must be at least 1".into()));
    }
    if n > POWER_GUARD {
        return Err(Error::SizeGuard {
            what: "Jacobi word power",
            limit: POWER_GUARD,
            got: n,
        });
    }
    Ok(())
}

/// Multiply by `(1+a)(1+b)` on the right.
fn step(x: &WordElement) -> WordElement {
    let y = x.add(&x.mul_right_a());
    y.add(&y.mul_right_b())
}

/// Expand `[(1+a)(1+b)]^n` and read off its coefficient table.
pub fn jacobi_power(n: usize) -> Result<CoeffTable> {
    check_power(n)?;
    let mut x = WordElement::unit();
    for _ in 0..n {
        x = step(&x);
    }
    CoeffTable::from_element(n, &x)
}

/// Tables for every power `1..=n_max`, sharing one expansion.
pub fn jacobi_power_sequence(n_max: usize) -> Result<Vec<CoeffTable>> {
    check_power(n_max)?;
    let mut x = WordElement::unit();
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        x = step(&x);
        out.push(CoeffTable::from_element(n, &x)?);
    }
    Ok(out)
}

/// `K_{n,0..=n}` from the `c` coefficients:
/// `K_{n,j} = c_j + c_{j+1} + 2(k-2) Σ_{l=j+1}^n (k-1)^{l-j-1} c_l` for `j >= 1` and
/// `K_{n,0} = 2(k-1)(c_1 + (k-2) Σ_{l=2}^n (k-1)^{l-2} c_l)`.
pub fn knj_from_table(t: &CoeffTable) -> Vec<KPoly> {
    let n = t.n;
    let k1 = KPoly::k_plus(-1);
    let k2 = KPoly::k_plus(-2);
    let two = KPoly::constant(2);
    // tail[j] = Σ_{l=j}^n (k-1)^{l-j} c_l, built from the top down.
    let mut tail = vec![KPoly::zero(); n + 2];
    for l in (1..=n).rev() {
        tail[l] = &t.c(l) + &(&k1 * &tail[l + 1]);
    }
    let mut out = Vec::with_capacity(n + 1);
    out.push(&(&two * &k1) * &(&t.c(1) + &(&k2 * &tail[2])));
    for j in 1..=n {
        let sum = &(&two * &k2) * &tail[j + 1];
        out.push(&(&t.c(j) + &t.c(j + 1)) + &sum);
    }
    out
}

/// `(k-1)^{n-j} binom(2n, n-j)`.
pub fn knj_closed_form(n: usize, j: usize) -> Result<KPoly> {
    if j > n {
        return Err(Error::InvalidParameter(format!("j = {j} exceeds n = {n}")));
    }
    let b = binomial(2 * n as u64, (n - j) as i64);
    Ok(KPoly::k_plus(-1).pow((n - j) as u32).scale(&b))
}

/// Linear form `Σ_j coeffs[j]·τ_j` with `τ_0 = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceForm {
    pub coeffs: Vec<KPoly>,
}

impl TraceForm {
    pub fn coeff(&self, j: usize) -> KPoly {
        self.coeffs.get(j).cloned().unwrap_or_else(KPoly::zero)
    }

    fn add_at(&mut self, j: usize, p: &KPoly) {
        if self.coeffs.len() <= j {
            self.coeffs.resize(j + 1, KPoly::zero());
        }
        self.coeffs[j] = &self.coeffs[j] + p;
    }
}

/// Trace of a word element under a trace with `τ(a) = τ(b) = 0`:
/// `τ((ab)^j) = τ((ba)^j) = τ_j` and
/// `τ((ab)^j a) = τ((ba)^j b) = (k-2) Σ_{l=1}^j (k-1)^{j-l} τ_l`.
pub fn formal_trace(x: &WordElement) -> TraceForm {
    let k1 = KPoly::k_plus(-1);
    let k2 = KPoly::k_plus(-2);
    let mut form = TraceForm { coeffs: vec![KPoly::zero()] };
    for (w, c) in x.terms() {
        match w {
            Word::Unit => form.add_at(0, c),
            Word::Ab(j) | Word::Ba(j) => form.add_at(j, c),
            Word::Aba(j) | Word::Bab(j) => {
                let base = &k2 * c;
                for l in 1..=j {
                    form.add_at(l, &(&base * &k1.pow((j - l) as u32)));
                }
            }
        }
    }
    while form.coeffs.len() > 1 && form.coeffs.last().is_some_and(Zero::is_zero) {
        form.coeffs.pop();
    }
    form
}

/// `m_n`, the unit coefficient of `[(1+a)(1+b)]^n`; the stationary moment is `m_n / k^{2n-1}`.
pub fn stationary_from_words(n: usize) -> Result<KPoly> {
    Ok(jacobi_power(n)?.m)
}

/// One row per `n`, one column per `j`, cells rendered as k-polynomials.
pub fn triangle_csv(rows: &[Vec<KPoly>], first_n: usize) -> String {
    let width = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = String::from("n");
    for j in 0..width {
        let _ = write!(out, ",j{j}");
    }
    out.push('\n');
    for (i, row) in rows.iter().enumerate() {
        let _ = write!(out, "{}", first_n + i);
        for j in 0..width {
            match row.get(j) {
                Some(p) => {
                    let _ = write!(out, ",{p}");
                }
                None => out.push(','),
            }
        }
        out.push('\n');
    }
    out
}

/// Outcome of checking every coefficient identity of the expansion up to `n_max`.
#[derive(Clone, Debug, Default, serde::Serialize)]
pub struct ExpansionReport {
    pub n_max: usize,
    pub checks: usize,
    pub failures: Vec<String>,
    #[serde(skip)]
    pub k_triangle: Vec<Vec<KPoly>>,
    #[serde(skip)]
    pub c_triangle: Vec<Vec<KPoly>>,
}

impl ExpansionReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

/// Expand through `n_max` (one power further for the recurrences) and check the
/// closed form of `K_{n,j}`, the trace route to `K_{n,j}`, both three-term
/// recurrences, the Catalan difference law and `k² m_n - m_{n+1} = (k-1)^{n+1} C_n`.
pub fn verify_expansion(n_max: usize) -> Result<ExpansionReport> {
    let tables = jacobi_power_sequence(n_max + 1)?;
    let k1 = KPoly::k_plus(-1);
    let k1sq = k1.pow(2);
    let two_k1 = k1.scale(&BigInt::from(2));
    let ksq = KPoly::k().pow(2);
    let mut rep = ExpansionReport {
        n_max,
        ..Default::default()
    };

    let ks: Vec<Vec<KPoly>> = tables.iter().map(knj_from_table).collect();
    let kget = |n: usize, j: usize| -> KPoly {
        ks[n - 1].get(j).cloned().unwrap_or_else(KPoly::zero)
    };

    for t in &tables[..n_max] {
        let n = t.n;
        let trace = formal_trace(&t.to_element());
        rep.record(trace.coeff(0) == t.m, || format!("n={n}: trace constant term differs from m_n"));
        for j in 0..=n {
            let closed = knj_closed_form(n, j)?;
            let kj = kget(n, j);
            rep.record(kj == closed, || format!("K_{{{n},{j}}} = {kj}, closed form {closed}"));
            if j >= 1 {
                let tj = trace.coeff(j);
                rep.record(tj == kj, || format!("trace route K_{{{n},{j}}} = {tj}, table route {kj}"));
            }
        }
        for j in 1..=n + 1 {
            let rhs = &(&(&k1sq * &kget(n, j + 1)) + &(&two_k1 * &kget(n, j))) + &kget(n, j - 1);
            rep.record(kget(n + 1, j) == rhs, || format!("K recurrence fails at n={n}, j={j}"));
        }
        let next = &tables[n];
        let two_k_minus_1 = KPoly::from_coeffs([-1, 2]);
        let rhs = &(&two_k_minus_1 * &t.c(1)) + &(&k1sq * &t.c(2));
        rep.record(next.c(1) == rhs, || format!("c_{{{},1}} recurrence fails", n + 1));
        for j in 2..=n + 1 {
            let rhs = &(&(&two_k1 * &t.c(j)) + &t.c(j - 1)) + &(&k1sq * &t.c(j + 1));
            rep.record(next.c(j) == rhs, || format!("c_{{{},{j}}} recurrence fails", n + 1));
        }
        let cat = catalan(n as u64);
        let lhs = &(&ksq * &t.m) - &next.m;
        let rhs = k1.pow(n as u32 + 1).scale(&cat);
        rep.record(lhs == rhs, || format!("k^2 m_{n} - m_{} = {lhs}, expected {rhs}", n + 1));
        let lhs = &t.c(1) - &t.c(2);
        let rhs = k1.pow(n as u32 - 1).scale(&(binomial(2 * n as u64, n as i64) / BigInt::from(n + 1)));
        rep.record(lhs == rhs, || format!("c_{{{n},1}} - c_{{{n},2}} = {lhs}, expected {rhs}"));
    }
    rep.k_triangle = ks[..n_max].to_vec();
    rep.c_triangle = tables[..n_max]
        .iter()
        .map(|t| std::iter::once(KPoly::zero()).chain(t.c.iter().cloned()).collect())
        .collect();
    Ok(rep)
}
