//! Exhaustive enumeration of every path through a simplistic grid.
//!
//! Independent of the recursion in [`super::paths`]: each of the
//! `2 · 2^(Z-1)` combinations of initial direction and flip pattern is walked
//! with bit arithmetic and its probability accumulated directly.

use super::noise::{check_error_prob, NoiseDistribution};
use super::paths::PathCountTable;
use crate::error::{Error, Result};
use crate::scalar::{PathCount, Real};

/// Largest grid the enumeration accepts.
pub const MAX_ORACLE_GRID: usize = 22;

fn guard(z: usize) -> Result<()> {
    if z == 0 || z > MAX_ORACLE_GRID {
        return Err(Error::TooLarge {
            what: "grid length for path enumeration",
            value: z as u64,
            limit: MAX_ORACLE_GRID as u64,
        });
    }
    Ok(())
}

/// Per-row directions (bit set = diagonal) of the pass rows `2..=Z`, given
/// the flip mask over those rows and the initial direction.
fn pass_row_directions(flips: u64, diagonal_start: bool, width: usize) -> u64 {
    // prefix XOR: bit k becomes the parity of flips 0..=k
    let mut x = flips;
    let mut shift = 1;
    while shift < 64 {
        x ^= x << shift;
        shift <<= 1;
    }
    let mask = if width == 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    };
    if diagonal_start {
        !x & mask
    } else {
        x & mask
    }
}

/// Visits every path as `(diagonal_start, exit, turns)`.
fn for_each_path(z: usize, mut visit: impl FnMut(bool, usize, usize)) {
    let width = z - 1;
    for diagonal_start in [false, true] {
        for flips in 0..1u64 << width {
            let dirs = pass_row_directions(flips, diagonal_start, width);
            let exit = diagonal_start as usize + dirs.count_ones() as usize;
            let turns = 1 + flips.count_ones() as usize;
            visit(diagonal_start, exit, turns);
        }
    }
}

/// Path-count table by enumeration.
pub fn brute_force_path_counts<C: PathCount>(z: usize) -> Result<PathCountTable<C>> {
    guard(z)?;
    let mut vertical = vec![vec![C::zero(); z + 1]; z];
    let mut diagonal = vertical.clone();
    let mut overflow = None;
    for_each_path(z, |diag, exit, m| {
        let cell = if diag {
            &mut diagonal[m - 1][exit]
        } else {
            &mut vertical[m - 1][exit]
        };
        match cell.checked_add(&C::one()) {
            Some(v) => *cell = v,
            None => overflow = Some(Error::Overflow { z, m, i: exit }),
        }
    });
    if let Some(e) = overflow {
        return Err(e);
    }
    PathCountTable::from_parts(z, vertical, diagonal)
}

/// Path-count table and error-induced exit distribution by enumeration.
///
/// Each path contributes `(1/2) · p^(m-1) · q^(Z-m)` to its exit; exits `0`
/// and `Z` are then dropped and the interior renormalized.
pub fn brute_force_path_distribution<C: PathCount, F: Real>(
    z: usize,
    p: F,
) -> Result<(PathCountTable<C>, NoiseDistribution<F>)> {
    guard(z)?;
    check_error_prob(p)?;
    let table = brute_force_path_counts(z)?;
    let q = F::one() - p;
    let half = F::lit(0.5);
    let mut mass = vec![F::zero(); z + 1];
    for_each_path(z, |_, exit, m| {
        mass[exit] = mass[exit] + half * p.powi(m as i32 - 1) * q.powi((z - m) as i32);
    });
    let dist = NoiseDistribution::from_weights(z, mass, p)?;
    Ok((table, dist))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_rows_by_hand() {
        let t: PathCountTable<u64> = brute_force_path_counts(4).unwrap();
        assert_eq!(t.grand_total(), Some(16));
        assert_eq!(t.count(1, 0), 1);
        assert_eq!(t.count(1, 4), 1);
        assert_eq!(t.count(4, 2), 2);
        // vertical start, flips at rows 2 and 4: v d d v -> exit 2
        assert_eq!(t.vertical(3, 2), 1);
    }

    #[test]
    fn single_row() {
        let t: PathCountTable<u64> = brute_force_path_counts(1).unwrap();
        assert_eq!(t.count(1, 0), 1);
        assert_eq!(t.count(1, 1), 1);
    }

    #[test]
    fn guards() {
        assert!(brute_force_path_counts::<u64>(23).is_err());
        assert!(brute_force_path_counts::<u64>(0).is_err());
        assert!(brute_force_path_distribution::<u64, f64>(10, 0.0).is_err());
    }
}
