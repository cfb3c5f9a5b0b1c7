use std::fmt;

use num_bigint::BigInt;

use crate::scalar::binomial;
use crate::{Error, Result};

/// Largest `n` accepted by the enumerators (`C_16` is about 35 million).
pub const NC_GUARD: usize = 16;

/// `C_n = (2n)! / (n! (n+1)!)`.
pub fn catalan(n: u64) -> BigInt {
    binomial(2 * n, n as i64) / BigInt::from(n + 1)
}

/// A partition of `{0, .., n-1}` into blocks with no crossings.
///
/// Blocks are sorted internally and ordered by their smallest element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NcPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl NcPartition {
    /// Validates that `blocks` partition `{0..n}` without crossings.
    pub fn new(n: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.retain(|b| !b.is_empty());
        blocks.sort_by_key(|b| b[0]);
        let p = Self { n, blocks };
        if !p.covers_exactly() {
            return Err(Error::InvalidParameter(format!("{p} is not a partition of {n} elements")));
        }
        if p.has_crossing() {
            return Err(Error::InvalidParameter(format!("{p} has a crossing")));
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Number of blocks, `|π|`.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    fn covers_exactly(&self) -> bool {
        let mut seen = vec![false; self.n];
        for &i in self.blocks.iter().flatten() {
            if i >= self.n || seen[i] {
                return false;
            }
            seen[i] = true;
        }
        seen.into_iter().all(|s| s)
    }

    /// Brute-force crossing test: `a < b < c < d` with `a, c` in one block and
    /// `b, d` in another.
    pub fn has_crossing(&self) -> bool {
        let mut owner = vec![usize::MAX; self.n];
        for (id, b) in self.blocks.iter().enumerate() {
            for &i in b {
                owner[i] = id;
            }
        }
        let n = self.n;
        for a in 0..n {
            for b in a + 1..n {
                if owner[b] == owner[a] {
                    continue;
                }
                for c in b + 1..n {
                    if owner[c] != owner[a] {
                        continue;
                    }
                    if (c + 1..n).any(|d| owner[d] == owner[b]) {
                        return true;
                    }
                }
            }
        }
        false
    }
}

impl fmt::Display for NcPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{")?;
            for (j, e) in b.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", e + 1)?;
            }
            write!(f, "}}")?;
        }
        write!(f, "}}")
    }
}

/// Calls `visit` with the blocks of every non-crossing partition of
/// `{0..n}` without materializing the whole lattice.
///
/// Elements are placed left to right. Open blocks form a stack: a new element
/// either opens a block or joins an open one, and joining closes every block
/// opened after it (a later join there would cross). Each partition arises
/// from exactly one sequence of choices.
pub fn for_each_nc<F>(n: usize, mut visit: F) -> Result<()>
where
    F: FnMut(&[Vec<usize>]),
{
    if n > NC_GUARD {
        return Err(Error::SizeGuard {
            what: "non-crossing partition enumeration",
            limit: NC_GUARD,
            got: n,
        });
    }
    let mut blocks: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut stack: Vec<usize> = Vec::with_capacity(n);
    place(0, n, &mut blocks, &mut stack, &mut visit);
    Ok(())
}

fn place<F>(i: usize, n: usize, blocks: &mut Vec<Vec<usize>>, stack: &mut Vec<usize>, visit: &mut F)
where
    F: FnMut(&[Vec<usize>]),
{
    if i == n {
        visit(blocks);
        return;
    }
    blocks.push(vec![i]);
    stack.push(blocks.len() - 1);
    place(i + 1, n, blocks, stack, visit);
    stack.pop();
    blocks.pop();

    for depth in 0..stack.len() {
        let id = stack[depth];
        let saved = stack.split_off(depth + 1);
        blocks[id].push(i);
        place(i + 1, n, blocks, stack, visit);
        blocks[id].pop();
        stack.extend(saved);
    }
}

/// All non-crossing partitions of `{0..n}`; there are `catalan(n)` of them.
pub fn enumerate_nc(n: usize) -> Result<Vec<NcPartition>> {
    let mut out = Vec::new();
    for_each_nc(n, |blocks| {
        let mut blocks = blocks.to_vec();
        blocks.sort_by_key(|b| b[0]);
        out.push(NcPartition { n, blocks });
    })?;
    Ok(out)
}
