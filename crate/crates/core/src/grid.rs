//! Instance encoding and the brute-force subset-sum oracle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest set cardinality the exhaustive oracle will enumerate.
pub const MAX_ORACLE_ELEMENTS: usize = 30;

/// A subset sum instance: an ordered list of positive integers.
///
/// Order is preserved as given. Duplicates are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance", into = "RawInstance")]
pub struct SubsetInstance {
    elements: Vec<u64>,
    total: u64,
}

#[derive(Serialize, Deserialize)]
struct RawInstance {
    elements: Vec<i64>,
}

impl TryFrom<RawInstance> for SubsetInstance {
    type Error = Error;

    fn try_from(raw: RawInstance) -> Result<Self> {
        Self::from_signed(&raw.elements)
    }
}

impl From<SubsetInstance> for RawInstance {
    fn from(inst: SubsetInstance) -> Self {
        RawInstance {
            elements: inst.elements.iter().map(|&e| e as i64).collect(),
        }
    }
}

impl SubsetInstance {
    pub fn new(elements: Vec<u64>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::EmptyInstance);
        }
        if elements.contains(&0) {
            return Err(Error::NonPositiveElement(0));
        }
        let total = elements
            .iter()
            .try_fold(0u64, |acc, &e| acc.checked_add(e))
            .ok_or_else(|| Error::param("elements", "sum overflows u64"))?;
        Ok(Self { elements, total })
    }

    /// Validates signed input, as read from JSON or the command line.
    pub fn from_signed(elements: &[i64]) -> Result<Self> {
        if let Some(&bad) = elements.iter().find(|&&e| e <= 0) {
            return Err(Error::NonPositiveElement(bad));
        }
        Self::new(elements.iter().map(|&e| e as u64).collect())
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    /// Set cardinality `s`.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid depth `Z = N_tot`, the sum of all elements.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of split junctions, one per element.
    pub fn split_junctions(&self) -> u64 {
        self.elements.len() as u64
    }

    /// Number of pass junctions, `N_tot - s`.
    pub fn pass_junctions(&self) -> u64 {
        self.total - self.split_junctions()
    }

    /// Number of distinct subsets, `2^s`.
    pub fn subset_count(&self) -> Result<u64> {
        if self.len() > 63 {
            return Err(Error::TooLarge {
                what: "set cardinality",
                value: self.len() as u64,
                limit: 63,
            });
        }
        Ok(1u64 << self.len())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowKind {
    /// Agent freshly chooses vertical or diagonal.
    Split,
    /// Agent keeps its direction unless the junction is faulty.
    Pass,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub kind: RowKind,
    /// 1-based index of the element block this row belongs to.
    pub block: usize,
}

/// Row-by-row junction structure of the grid. Exits are `0..=Z`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridLayout {
    rows: Vec<Row>,
}

impl GridLayout {
    /// Encodes an instance: element `N_j` becomes one split row followed by
    /// `N_j - 1` pass rows.
    pub fn build(instance: &SubsetInstance) -> Self {
        let rows = instance
            .elements()
            .iter()
            .enumerate()
            .flat_map(|(j, &n)| {
                (0..n).map(move |k| Row {
                    kind: if k == 0 {
                        RowKind::Split
                    } else {
                        RowKind::Pass
                    },
                    block: j + 1,
                })
            })
            .collect();
        Self { rows }
    }

    /// A single split row followed by `z - 1` pass rows.
    pub fn simplistic(z: usize) -> Result<Self> {
        if z == 0 {
            return Err(Error::param("Z", "grid length must be at least 1"));
        }
        Ok(Self::build(&SubsetInstance::new(vec![z as u64])?))
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    /// Grid depth `Z`; the highest exit index.
    pub fn depth(&self) -> usize {
        self.rows.len()
    }

    pub fn exit_count(&self) -> usize {
        self.rows.len() + 1
    }

    pub fn split_count(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.kind == RowKind::Split)
            .count()
    }

    pub fn pass_count(&self) -> usize {
        self.depth() - self.split_count()
    }

    /// 1-based positions of the split rows.
    pub fn split_rows(&self) -> Vec<usize> {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.kind == RowKind::Split)
            .map(|(k, _)| k + 1)
            .collect()
    }
}

/// Number of subsets summing to each exit index `0..=Z`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExitSpectrum {
    multiplicity: Vec<u64>,
}

impl ExitSpectrum {
    pub fn multiplicity(&self, exit: usize) -> u64 {
        self.multiplicity.get(exit).copied().unwrap_or(0)
    }

    pub fn multiplicities(&self) -> &[u64] {
        &self.multiplicity
    }

    pub fn depth(&self) -> usize {
        self.multiplicity.len() - 1
    }

    /// Total number of subsets, `2^s`.
    pub fn subset_count(&self) -> u64 {
        self.multiplicity.iter().sum()
    }

    pub fn correct_exits(&self) -> Vec<usize> {
        self.multiplicity
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_solution(&self, exit: usize) -> bool {
        self.multiplicity(exit) > 0
    }
}

fn oracle_guard(instance: &SubsetInstance) -> Result<()> {
    if instance.len() > MAX_ORACLE_ELEMENTS {
        return Err(Error::TooLarge {
            what: "set cardinality",
            value: instance.len() as u64,
            limit: MAX_ORACLE_ELEMENTS as u64,
        });
    }
    if instance.total() > usize::MAX as u64 / 2 {
        return Err(Error::TooLarge {
            what: "grid depth",
            value: instance.total(),
            limit: usize::MAX as u64 / 2,
        });
    }
    Ok(())
}

fn subset_sum(elements: &[u64], mask: u64) -> usize {
    elements
        .iter()
        .enumerate()
        .filter(|(j, _)| mask >> j & 1 == 1)
        .map(|(_, &e)| e as usize)
        .sum()
}

/// Enumerates all `2^s` subsets and tallies their sums.
pub fn enumerate_subset_sums(instance: &SubsetInstance) -> Result<ExitSpectrum> {
    oracle_guard(instance)?;
    let mut multiplicity = vec![0u64; instance.total() as usize + 1];
    for mask in 0..instance.subset_count()? {
        multiplicity[subset_sum(instance.elements(), mask)] += 1;
    }
    Ok(ExitSpectrum { multiplicity })
}

/// Sorted exits reachable by some subset. Always contains `0` and `Z`.
pub fn correct_exits(instance: &SubsetInstance) -> Result<Vec<usize>> {
    Ok(enumerate_subset_sums(instance)?.correct_exits())
}

/// Exit probabilities on an ideal grid whose split junction `j` goes
/// diagonal with probability `split_ratios[j]`. Exhaustive, like
/// [`enumerate_subset_sums`].
pub fn ideal_exit_probabilities(
    instance: &SubsetInstance,
    split_ratios: &[f64],
) -> Result<Vec<f64>> {
    oracle_guard(instance)?;
    if split_ratios.len() != instance.len() {
        return Err(Error::LengthMismatch {
            left: split_ratios.len(),
            right: instance.len(),
        });
    }
    let mut probs = vec![0.0; instance.total() as usize + 1];
    for mask in 0..instance.subset_count()? {
        let weight: f64 = split_ratios
            .iter()
            .enumerate()
            .map(|(j, &b)| if mask >> j & 1 == 1 { b } else { 1.0 - b })
            .product();
        probs[subset_sum(instance.elements(), mask)] += weight;
    }
    Ok(probs)
}
