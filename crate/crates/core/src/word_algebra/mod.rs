//! Exact reduction of words in two letters `a, b` obeying
//! `a² = (k-2)a + (k-1)` and `b² = (k-2)b + (k-1)`, with coefficients in `ℤ[k]`.
//!
//! With `a = kP - 1` and `b = U(kP - 1)U*` for a projection `P` of trace `1/k`,
//! the expansion of `[(1+a)(1+b)]^n` traced against `τ` yields
//! `k τ((PUPU*P)^n) = k^{1-2n} (m_n + Σ_j K_{n,j} τ((ab)^j))`.

mod kpoly;
mod table;
mod word;

pub use kpoly::KPoly;
pub use table::{
    formal_trace, jacobi_power, jacobi_power_sequence, knj_closed_form, knj_from_table,
    stationary_from_words, triangle_csv, verify_expansion, CoeffTable, ExpansionReport, TraceForm,
    POWER_GUARD,
};
pub use word::{Word, WordElement};
