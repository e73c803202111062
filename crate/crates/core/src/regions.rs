//! Download-cost regions: the three-transmitter region in rank and in
//! component coordinates, and the general cut-set and partition bounds for
//! any number of transmitters.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polyhedra::{lp_solve, HPolyhedron, Inequality, PolyError, Sense};
use crate::rational::{int, rat, Rational};
use crate::standard_form::{FunctionSpec, NVector, RankProfile, SpecError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegionError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("invalid symmetric profile ({0}, {1}, {2})")]
    InvalidSymmetricProfile(usize, usize, usize),
}

/// Coefficients on the cost tuple, one row per facet family.
pub const COST_COEFFS: [[i64; 3]; 10] = [
    [2, 0, 0],
    [0, 2, 0],
    [0, 0, 2],
    [1, 1, 1],
    [2, 2, 2],
    [2, 2, 2],
    [2, 2, 2],
    [4, 2, 2],
    [2, 4, 2],
    [2, 2, 4],
];

/// Right-hand sides over `(r1, r2, r3, r12, r13, r23, r123)`.
pub const RANK_COEFFS: [[i64; 7]; 10] = [
    [1, 0, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 1],
    [1, 1, 1, -1, 0, 0, 1],
    [1, 1, 1, 0, -1, 0, 1],
    [1, 1, 1, 0, 0, -1, 1],
    [2, 1, 1, -1, -1, 0, 2],
    [1, 2, 1, -1, 0, -1, 2],
    [1, 1, 2, 0, -1, -1, 2],
];

/// Right-hand sides over `(n123, n12, n13, n23, no, n1, n2, n3)`.
///
/// Row `i` equals row `i` of [`RANK_COEFFS`] after substituting the ranks of
/// a standard form, so the three `(2,2,2)` rows are listed with the doubled
/// private symbol on `n3`, `n2`, `n1` in that order.
pub const COMPONENT_COEFFS: [[i64; 8]; 10] = [
    [1, 1, 1, 0, 1, 1, 0, 0],
    [1, 1, 0, 1, 1, 0, 1, 0],
    [1, 0, 1, 1, 1, 0, 0, 1],
    [1, 1, 1, 1, 2, 1, 1, 1],
    [3, 2, 2, 2, 3, 1, 1, 2],
    [3, 2, 2, 2, 3, 1, 2, 1],
    [3, 2, 2, 2, 3, 2, 1, 1],
    [4, 3, 3, 2, 4, 2, 2, 2],
    [4, 3, 2, 3, 4, 2, 2, 2],
    [4, 2, 3, 3, 4, 2, 2, 2],
];

fn region_from(rhs: impl Iterator<Item = i64>) -> HPolyhedron {
    let rows = COST_COEFFS
        .iter()
        .zip(rhs)
        .map(|(a, b)| Inequality::new(a.iter().map(|&v| int(v)).collect(), int(b)))
        .collect();
    HPolyhedron { dim: 3, rows }
}

fn weighted<const N: usize>(coeffs: &[i64; N], values: &[usize; N]) -> i64 {
    coeffs.iter().zip(values).map(|(c, &v)| c * v as i64).sum()
}

/// The ten-row region `A Δ >= B r` of a three-transmitter profile.
pub fn region_from_ranks(rp: &RankProfile) -> Result<HPolyhedron, RegionError> {
    rp.validate()?;
    let r = rp.as_array();
    Ok(region_from(RANK_COEFFS.iter().map(|row| weighted(row, &r))))
}

/// The same region written in component counts, `A Δ >= C n`.
pub fn region_standard(n: &NVector) -> HPolyhedron {
    let n = n.as_array();
    region_from(COMPONENT_COEFFS.iter().map(|row| weighted(row, &n)))
}

/// The ten right-hand sides `B r`.
pub fn rank_rhs(rp: &RankProfile) -> [i64; 10] {
    let r = rp.as_array();
    std::array::from_fn(|i| weighted(&RANK_COEFFS[i], &r))
}

/// The ten right-hand sides `C n`.
pub fn component_rhs(n: &NVector) -> [i64; 10] {
    let n = n.as_array();
    std::array::from_fn(|i| weighted(&COMPONENT_COEFFS[i], &n))
}

/// Where a converse row comes from. Transmitter sets are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundOrigin {
    /// The total cost is at least the joint rank.
    TotalCut,
    /// Twice the cost of a subset is at least its rank.
    SubsetCut(Vec<usize>),
    /// Twice the total cost against a partition with a distinguished part.
    PartitionSum {
        partition: Vec<Vec<usize>>,
        lead: usize,
    },
    /// Two distinguished parts weighted 2, the rest weighted 4.
    PartitionPair {
        partition: Vec<Vec<usize>>,
        first: usize,
        second: usize,
    },
}

impl fmt::Display for BoundOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set = |s: &[usize]| {
            let parts: Vec<String> = s.iter().map(|v| v.to_string()).collect();
            format!("{{{}}}", parts.join(","))
        };
        let part = |p: &[Vec<usize>]| {
            let parts: Vec<String> = p.iter().map(|s| set(s)).collect();
            parts.join("|")
        };
        match self {
            BoundOrigin::TotalCut => write!(f, "total-cut"),
            BoundOrigin::SubsetCut(s) => write!(f, "subset-cut {}", set(s)),
            BoundOrigin::PartitionSum { partition, lead } => {
                write!(
                    f,
                    "partition-sum {} lead {}",
                    part(partition),
                    set(&partition[*lead])
                )
            }
            BoundOrigin::PartitionPair {
                partition,
                first,
                second,
            } => write!(
                f,
                "partition-pair {} pair {} {}",
                part(partition),
                set(&partition[*first]),
                set(&partition[*second])
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bound {
    pub row: Inequality,
    /// Every derivation producing this row, in enumeration order.
    pub origins: Vec<BoundOrigin>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundSet {
    pub transmitters: usize,
    pub bounds: Vec<Bound>,
}

impl BoundSet {
    pub fn to_polyhedron(&self) -> HPolyhedron {
        HPolyhedron {
            dim: self.transmitters,
            rows: self.bounds.iter().map(|b| b.row.clone()).collect(),
        }
    }

    /// The strongest bound on the total cost given by a single row with
    /// equal coefficients.
    pub fn best_uniform_total(&self) -> Option<(Rational, &Bound)> {
        self.bounds
            .iter()
            .filter_map(|b| {
                let c0 = b.row.coeffs.first()?;
                if c0.is_positive() && b.row.coeffs.iter().all(|c| c == c0) {
                    Some((&b.row.rhs / c0, b))
                } else {
                    None
                }
            })
            .max_by(|a, b| a.0.cmp(&b.0))
    }

    /// Exact minimum of the total cost over all rows jointly.
    pub fn min_total(&self) -> Option<Rational> {
        let ones = vec![int(1); self.transmitters];
        lp_solve(&self.to_polyhedron(), &ones, Sense::Minimize)
            .ok()
            .and_then(|r| r.optimum)
    }
}

/// All set partitions of `0..k`, via restricted growth strings.
pub fn set_partitions(k: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    if k == 0 {
        out.push(Vec::new());
        return out;
    }
    let mut growth = vec![0usize; k];
    loop {
        let blocks = growth.iter().max().map_or(0, |m| m + 1);
        let mut parts = vec![Vec::new(); blocks];
        for (i, &g) in growth.iter().enumerate() {
            parts[g].push(i);
        }
        out.push(parts);
        // next restricted growth string
        let mut i = k - 1;
        loop {
            if i == 0 {
                return out;
            }
            let prefix_max = growth[..i].iter().copied().max().unwrap_or(0);
            if growth[i] <= prefix_max {
                growth[i] += 1;
                for g in growth.iter_mut().skip(i + 1) {
                    *g = 0;
                }
                break;
            }
            i -= 1;
        }
    }
}

fn mask_of(set: &[usize]) -> usize {
    set.iter().fold(0, |m, &k| m | (1 << k))
}

/// Cut-set and partition bounds for any number of transmitters,
/// deduplicated by normalized row (keeping the largest right-hand side).
pub fn converse_bounds_general(spec: &FunctionSpec) -> BoundSet {
    dedup(spec.transmitters(), enumerate_bounds(spec, true))
}

/// Only the total and subset cut-set rows.
pub fn cut_set_bounds(spec: &FunctionSpec) -> BoundSet {
    dedup(spec.transmitters(), enumerate_bounds(spec, false))
}

struct RawBound {
    row: Inequality,
    origin: BoundOrigin,
}

fn enumerate_bounds(spec: &FunctionSpec, with_partitions: bool) -> Vec<RawBound> {
    let k = spec.transmitters();
    let full = (1usize << k) - 1;
    let ranks: Vec<i64> = (0..=full)
        .map(|mask| {
            let members: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
            spec.rank_of(&members) as i64
        })
        .collect();
    let s = |mask: usize| ranks[full] - ranks[full & !mask];
    let coeff_row = |weights: &dyn Fn(usize) -> i64| -> Vec<Rational> {
        (0..k).map(|i| int(weights(i))).collect()
    };
    let one_based = |set: &[usize]| set.iter().map(|v| v + 1).collect::<Vec<_>>();

    let mut raw: Vec<RawBound> = Vec::new();
    raw.push(RawBound {
        row: Inequality::new(coeff_row(&|_| 1), int(ranks[full])),
        origin: BoundOrigin::TotalCut,
    });
    for mask in 1..=full {
        let members: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        raw.push(RawBound {
            row: Inequality::new(
                coeff_row(&|i| if mask & (1 << i) != 0 { 2 } else { 0 }),
                int(ranks[mask]),
            ),
            origin: BoundOrigin::SubsetCut(one_based(&members)),
        });
    }
    if !with_partitions {
        return raw;
    }
    for partition in set_partitions(k) {
        let masks: Vec<usize> = partition.iter().map(|p| mask_of(p)).collect();
        let rank_sum: i64 = masks.iter().map(|&m| ranks[m]).sum();
        let labelled: Vec<Vec<usize>> = partition.iter().map(|p| one_based(p)).collect();
        for (lead, &lm) in masks.iter().enumerate() {
            raw.push(RawBound {
                row: Inequality::new(coeff_row(&|_| 2), int(s(lm) + rank_sum)),
                origin: BoundOrigin::PartitionSum {
                    partition: labelled.clone(),
                    lead,
                },
            });
        }
        if masks.len() >= 2 {
            for (first, &m1) in masks.iter().enumerate() {
                for (second, &m2) in masks.iter().enumerate() {
                    if first == second {
                        continue;
                    }
                    let pair = m1 | m2;
                    let rest: i64 = masks
                        .iter()
                        .filter(|&&m| m != m1 && m != m2)
                        .map(|&m| ranks[m])
                        .sum();
                    let rhs = s(m1) + s(m2) + ranks[m1] + ranks[m2] + 2 * rest;
                    raw.push(RawBound {
                        row: Inequality::new(
                            coeff_row(&|i| if pair & (1 << i) != 0 { 2 } else { 4 }),
                            int(rhs),
                        ),
                        origin: BoundOrigin::PartitionPair {
                            partition: labelled.clone(),
                            first,
                            second,
                        },
                    });
                }
            }
        }
    }
    raw
}

fn dedup(transmitters: usize, raw: Vec<RawBound>) -> BoundSet {
    let mut best: BTreeMap<Vec<Rational>, (Rational, Bound)> = BTreeMap::new();
    let mut order: Vec<Vec<Rational>> = Vec::new();
    for b in raw {
        let norm = b.row.normalized();
        match best.get_mut(&norm.coeffs) {
            Some(entry) => {
                if norm.rhs > entry.0 {
                    *entry = (
                        norm.rhs,
                        Bound {
                            row: b.row,
                            origins: vec![b.origin],
                        },
                    );
                } else if norm.rhs == entry.0 {
                    entry.1.origins.push(b.origin);
                }
            }
            None => {
                order.push(norm.coeffs.clone());
                best.insert(
                    norm.coeffs,
                    (
                        norm.rhs,
                        Bound {
                            row: b.row,
                            origins: vec![b.origin],
                        },
                    ),
                );
            }
        }
    }
    let bounds = order
        .into_iter()
        .map(|key| best.remove(&key).expect("inserted above").1)
        .collect();
    BoundSet {
        transmitters,
        bounds,
    }
}

/// Membership of a cost tuple, returning the first violated row.
pub fn check_cost(region: &HPolyhedron, cost: &[Rational]) -> Result<Option<usize>, RegionError> {
    Ok(region.first_violation(cost)?)
}

/// Minimum total cost of a symmetric profile with single rank `r1`,
/// pairwise rank `r2` and joint rank `r3`.
pub fn symmetric_min_total(r1: usize, r2: usize, r3: usize) -> Result<Rational, RegionError> {
    let bad = RegionError::InvalidSymmetricProfile(r1, r2, r3);
    if !(r1 <= r2 && r2 <= r3 && r3 <= (3 * r1).min(r1 + r2)) {
        return Err(bad);
    }
    RankProfile::from_array([r1, r1, r1, r2, r2, r2, r3])
        .validate()
        .map_err(|_| bad)?;
    let formula = rat(3 * r1 as i64, 2) + rat(3 * (r3 as i64 - r2 as i64), 4);
    Ok(formula.max(int(r3 as i64)))
}
