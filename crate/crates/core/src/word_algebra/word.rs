use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::kpoly::KPoly;

/// Reduced words in `a, b` with `a² = (k-2)a + (k-1)` and `b² = (k-2)b + (k-1)`.
///
/// `Aba(0)` is `a` and `Bab(0)` is `b`; `Ab(0)` and `Ba(0)` never appear, the
/// empty word is `Unit`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Word {
    Unit,
    /// `(ab)^j`, `j >= 1`.
    Ab(usize),
    /// `(ba)^j`, `j >= 1`.
    Ba(usize),
    /// `(ab)^j a`, `j >= 0`.
    Aba(usize),
    /// `(ba)^j b`, `j >= 0`.
    Bab(usize),
}

impl Word {
    pub fn ab(j: usize) -> Self {
        if j == 0 {
            Word::Unit
        } else {
            Word::Ab(j)
        }
    }

    pub fn ba(j: usize) -> Self {
        if j == 0 {
            Word::Unit
        } else {
            Word::Ba(j)
        }
    }

    /// Number of letters.
    pub fn len(self) -> usize {
        match self {
            Word::Unit => 0,
            Word::Ab(j) | Word::Ba(j) => 2 * j,
            Word::Aba(j) | Word::Bab(j) => 2 * j + 1,
        }
    }

    pub fn is_empty(self) -> bool {
        self == Word::Unit
    }

    /// The same word with `a` and `b` exchanged.
    pub fn swap(self) -> Self {
        match self {
            Word::Unit => Word::Unit,
            Word::Ab(j) => Word::Ba(j),
            Word::Ba(j) => Word::Ab(j),
            Word::Aba(j) => Word::Bab(j),
            Word::Bab(j) => Word::Aba(j),
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Word::Unit => f.write_str("1"),
            Word::Ab(j) => write!(f, "(ab)^{j}"),
            Word::Ba(j) => write!(f, "(ba)^{j}"),
            Word::Aba(j) => write!(f, "(ab)^{j}a"),
            Word::Bab(j) => write!(f, "(ba)^{j}b"),
        }
    }
}

/// Sparse linear combination of reduced words with `KPoly` coefficients.
/// Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WordElement {
    terms: BTreeMap<Word, KPoly>,
}

impl WordElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn unit() -> Self {
        Self::word(Word::Unit)
    }

    pub fn word(w: Word) -> Self {
        let mut x = Self::zero();
        x.add_term(w, KPoly::one());
        x
    }

    pub fn a() -> Self {
        Self::word(Word::Aba(0))
    }

    pub fn b() -> Self {
        Self::word(Word::Bab(0))
    }

    pub fn coeff(&self, w: Word) -> KPoly {
        self.terms.get(&w).cloned().unwrap_or_else(KPoly::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (Word, &KPoly)> {
        self.terms.iter().map(|(w, c)| (*w, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, w: Word, c: KPoly) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&w) {
            Some(old) => &old + &c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(w, sum);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in other.terms() {
            out.add_term(w, c.clone());
        }
        out
    }

    /// Right multiplication by `a`.
    pub fn mul_right_a(&self) -> Self {
        let k2 = KPoly::k_plus(-2);
        let k1 = KPoly::k_plus(-1);
        let mut out = Self::zero();
        for (w, c) in self.terms() {
            match w {
                Word::Unit => out.add_term(Word::Aba(0), c.clone()),
                Word::Ab(j) => out.add_term(Word::Aba(j), c.clone()),
                // (ba)^j a = (ba)^{j-1} b a a
                Word::Ba(j) => {
                    out.add_term(Word::Ba(j), c * &k2);
                    out.add_term(Word::Bab(j - 1), c * &k1);
                }
                Word::Aba(j) => {
                    out.add_term(Word::Aba(j), c * &k2);
                    out.add_term(Word::ab(j), c * &k1);
                }
                Word::Bab(j) => out.add_term(Word::Ba(j + 1), c.clone()),
            }
        }
        out
    }

    /// Right multiplication by `b`; the mirror image of [`Self::mul_right_a`].
    pub fn mul_right_b(&self) -> Self {
        self.swapped().mul_right_a().swapped()
    }

    /// Exchange `a` and `b` in every word.
    pub fn swapped(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(w, c)| (w.swap(), c.clone())).collect(),
        }
    }
}

impl fmt::Display for WordElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (w, c)) in self.terms().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})·{w}")?;
        }
        Ok(())
    }
}
