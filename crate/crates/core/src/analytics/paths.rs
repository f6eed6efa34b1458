//! Exact counts of error paths through a grid of faulty pass junctions.
//!
//! A path through `Z` rows starts with a symmetric choice of direction and
//! then crosses `Z - 1` pass junctions, each of which may flip it. A path
//! with `m` turns consists of `m` alternating straight runs; `A[m][i]` is the
//! number of such paths that leave through exit `i`, split into those that
//! start vertically (`vA`) and diagonally (`dA`).
//!
//! The recursion peels off the first run: a path starting with a vertical run
//! of length `j` continues as a diagonally-starting path on `Z - j` rows with
//! one turn fewer, and likewise for a diagonal first run (which also shifts
//! the exit by `j`). Entries inside the band `i <= g(m)` or `i >= Z - g(m)`
//! are structurally zero and are skipped.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::PathCount;

/// Largest grid handled by [`path_counts`].
pub const MAX_PATH_GRID: usize = 64;

/// Zero-band width `g(m) = (m - m mod 2) / 2 - 1`.
pub fn turn_band(m: usize) -> i64 {
    let m = m as i64;
    (m - m % 2) / 2 - 1
}

/// Exit with the largest number of error paths, `g(Z) + 1`.
pub fn central_exit(z: usize) -> usize {
    (turn_band(z) + 1).max(0) as usize
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathCountTable<C> {
    z: usize,
    // [m - 1][i] for m in 1..=z, i in 0..=z
    vertical: Vec<Vec<C>>,
    diagonal: Vec<Vec<C>>,
    total: Vec<Vec<C>>,
}

impl<C: PathCount> PathCountTable<C> {
    pub(crate) fn from_parts(
        z: usize,
        vertical: Vec<Vec<C>>,
        diagonal: Vec<Vec<C>>,
    ) -> Result<Self> {
        let mut total = vec![vec![C::zero(); z + 1]; z];
        for m in 0..z {
            for i in 0..=z {
                total[m][i] = vertical[m][i]
                    .checked_add(&diagonal[m][i])
                    .ok_or(Error::Overflow { z, m: m + 1, i })?;
            }
        }
        Ok(Self {
            z,
            vertical,
            diagonal,
            total,
        })
    }

    pub fn z(&self) -> usize {
        self.z
    }

    /// Largest possible number of turns; equals `Z`.
    pub fn max_turns(&self) -> usize {
        self.z
    }

    fn get(table: &[Vec<C>], m: usize, i: usize) -> C {
        if m == 0 {
            return C::zero();
        }
        table
            .get(m - 1)
            .and_then(|row| row.get(i))
            .copied()
            .unwrap_or_else(C::zero)
    }

    /// `A[m][i]`: paths with `m` turns ending at exit `i`.
    pub fn count(&self, m: usize, i: usize) -> C {
        Self::get(&self.total, m, i)
    }

    /// `vA[m][i]`: as [`count`](Self::count), restricted to vertical starts.
    pub fn vertical(&self, m: usize, i: usize) -> C {
        Self::get(&self.vertical, m, i)
    }

    /// `dA[m][i]`: as [`count`](Self::count), restricted to diagonal starts.
    pub fn diagonal(&self, m: usize, i: usize) -> C {
        Self::get(&self.diagonal, m, i)
    }

    /// `Σ_{m,i} A[m][i]`, or `None` if it does not fit in `C`.
    pub fn grand_total(&self) -> Option<C> {
        self.total
            .iter()
            .flatten()
            .try_fold(C::zero(), |acc, x| acc.checked_add(x))
    }
}

/// Computes the path-count table for a simplistic grid of `z` rows.
pub fn path_counts<C: PathCount>(z: usize) -> Result<PathCountTable<C>> {
    if z == 0 || z > MAX_PATH_GRID {
        return Err(Error::param(
            "Z",
            format!("path counts need 1 <= Z <= {MAX_PATH_GRID}, got {z}"),
        ));
    }
    let lit = |x: usize, m: usize, i: usize| C::from_usize(x).ok_or(Error::Overflow { z, m, i });

    // Tables for every sub-grid length, indexed [m][len][i].
    let mut v = vec![vec![vec![C::zero(); z + 1]; z + 1]; z + 1];
    let mut d = v.clone();

    for len in 1..=z {
        v[1][len][0] = C::one();
        d[1][len][len] = C::one();
        for i in 1..len {
            v[2][len][i] = C::one();
            d[2][len][i] = C::one();
            if z >= 3 {
                v[3][len][i] = lit(len - 1 - i, 3, i)?;
                d[3][len][i] = lit(i - 1, 3, i)?;
            }
        }
    }

    for m in 4..=z {
        let band = turn_band(m) as usize;
        for len in 1..=z {
            if len <= 2 * band {
                continue;
            }
            for i in band + 1..len - band {
                let mut vs = C::zero();
                for j in 1..len - i + 1 {
                    vs = vs
                        .checked_add(&d[m - 1][len - j][i])
                        .ok_or(Error::Overflow { z, m, i })?;
                }
                let mut ds = C::zero();
                for j in 1..=i {
                    ds = ds
                        .checked_add(&v[m - 1][len - j][i - j])
                        .ok_or(Error::Overflow { z, m, i })?;
                }
                v[m][len][i] = vs;
                d[m][len][i] = ds;
            }
        }
    }

    let vertical = (1..=z).map(|m| v[m][z].clone()).collect();
    let diagonal = (1..=z).map(|m| d[m][z].clone()).collect();
    PathCountTable::from_parts(z, vertical, diagonal)
}
