//! Normalized Kendall distances between rankings.
//!
//! [`kendall_full`] compares two permutations of one ground set.
//! [`kendall_topk`] compares two top-k lists that may hold different
//! elements, using the penalty-parameter formulation: for every pair of
//! elements drawn from the union of both lists,
//!
//! - both elements in both lists: 1 if the lists order them differently;
//! - both in one list, one of them in the other: 1 if the list holding
//!   both ranks the shared element below the missing one, else 0;
//! - each element in only one list, and not the same list: 1;
//! - both in one list and neither in the other: `p`.
//!
//! The sum is divided by `k^2 + p k (k-1)`, its value for disjoint lists.

use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::similarity::Ranking;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("rankings do not cover the same elements")]
    MismatchedGroundSets,
    #[error("ranking lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("ranking contains duplicate element at position {0}")]
    DuplicateElement(usize),
    #[error("full mode needs at least 2 elements, got {0}")]
    TooShort(usize),
    #[error("penalty must lie in [0,1], got {0}")]
    InvalidPenalty(f64),
    #[error("{0} query rankings on the left, {1} on the right")]
    MisalignedQueries(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KendallMode {
    Full,
    Topk,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KendallParams {
    pub mode: KendallMode,
    /// Penalty for pairs that neither list can order (top-k mode only).
    pub penalty: f64,
}

impl Default for KendallParams {
    fn default() -> Self {
        KendallParams {
            mode: KendallMode::Topk,
            penalty: 0.5,
        }
    }
}

fn positions<T: Eq + Hash>(list: &[T]) -> Result<HashMap<&T, usize>, MetricError> {
    let mut pos = HashMap::with_capacity(list.len());
    for (i, x) in list.iter().enumerate() {
        if pos.insert(x, i).is_some() {
            return Err(MetricError::DuplicateElement(i));
        }
    }
    Ok(pos)
}

/// Number of inversions in `v`, by merge sort.
fn inversions(v: &mut [usize]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut count = inversions(&mut v[..mid]) + inversions(&mut v[mid..]);
    let mut merged = Vec::with_capacity(n);
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if v[i] <= v[j] {
            merged.push(v[i]);
            i += 1;
        } else {
            count += (mid - i) as u64;
            merged.push(v[j]);
            j += 1;
        }
    }
    merged.extend_from_slice(&v[i..mid]);
    merged.extend_from_slice(&v[j..n]);
    v.copy_from_slice(&merged);
    count
}

/// Discordant pairs over `C(n, 2)` for two orderings of one set.
pub fn kendall_full<T: Eq + Hash>(r1: &[T], r2: &[T]) -> Result<f64, MetricError> {
    if r1.len() != r2.len() {
        return Err(MetricError::MismatchedGroundSets);
    }
    if r1.len() < 2 {
        return Err(MetricError::TooShort(r1.len()));
    }
    let pos2 = positions(r2)?;
    positions(r1)?;
    let mut mapped = r1
        .iter()
        .map(|x| {
            pos2.get(x)
                .copied()
                .ok_or(MetricError::MismatchedGroundSets)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let n = r1.len() as f64;
    Ok(inversions(&mut mapped) as f64 / (n * (n - 1.0) / 2.0))
}

/// Unnormalized top-k distance, split into the integer part and the number
/// of pairs charged the penalty.
fn topk_terms<T: Eq + Hash>(r1: &[T], r2: &[T]) -> Result<(u64, u64), MetricError> {
    let pos1 = positions(r1)?;
    let pos2 = positions(r2)?;

    // pairs present in both lists
    let mut shared: Vec<usize> = r1.iter().filter_map(|x| pos2.get(x).copied()).collect();
    let z = shared.len() as u64;
    let mut whole = inversions(&mut shared);

    // an element missing from the other list is implicitly ranked below
    // everything that list holds; charge each shared element placed after it
    for (list, other) in [(r1, &pos2), (r2, &pos1)] {
        let mut shared_seen = 0u64;
        for x in list {
            if other.contains_key(x) {
                shared_seen += 1;
            } else {
                whole += z - shared_seen;
            }
        }
    }

    let only1 = r1.len() as u64 - z;
    let only2 = r2.len() as u64 - z;
    whole += only1 * only2;
    let pairs = |m: u64| m * m.saturating_sub(1) / 2;
    Ok((whole, pairs(only1) + pairs(only2)))
}

/// Normalized top-k Kendall distance with penalty `params.penalty`; in
/// `Full` mode delegates to [`kendall_full`].
pub fn kendall_topk<T: Eq + Hash>(
    r1: &[T],
    r2: &[T],
    params: &KendallParams,
) -> Result<f64, MetricError> {
    if params.mode == KendallMode::Full {
        return kendall_full(r1, r2);
    }
    let p = params.penalty;
    if !(0.0..=1.0).contains(&p) {
        return Err(MetricError::InvalidPenalty(p));
    }
    if r1.len() != r2.len() {
        return Err(MetricError::LengthMismatch(r1.len(), r2.len()));
    }
    let k = r1.len() as f64;
    if r1.is_empty() {
        return Ok(0.0);
    }
    let (whole, penalized) = topk_terms(r1, r2)?;
    let max = k * k + p * k * (k - 1.0);
    Ok((whole as f64 + p * penalized as f64) / max)
}

/// The top-k pair-penalty sum before normalization. With identical ground
/// sets and `p = 0` this is the plain discordant-pair count.
pub fn kendall_topk_unnormalized<T: Eq + Hash>(
    r1: &[T],
    r2: &[T],
    penalty: f64,
) -> Result<f64, MetricError> {
    if !(0.0..=1.0).contains(&penalty) {
        return Err(MetricError::InvalidPenalty(penalty));
    }
    let (whole, penalized) = topk_terms(r1, r2)?;
    Ok(whole as f64 + penalty * penalized as f64)
}

/// Top-k distance between two rankings, comparing nodes by `type:label`.
pub fn ranking_distance(
    r1: &Ranking,
    r2: &Ranking,
    params: &KendallParams,
) -> Result<f64, MetricError> {
    kendall_topk(&r1.keys(), &r2.keys(), params)
}

/// Mean of the per-query distances.
pub fn avg_ranking_difference(
    rankings1: &[Ranking],
    rankings2: &[Ranking],
    params: &KendallParams,
) -> Result<f64, MetricError> {
    let per_query = per_query_differences(rankings1, rankings2, params)?;
    if per_query.is_empty() {
        return Ok(0.0);
    }
    Ok(per_query.iter().sum::<f64>() / per_query.len() as f64)
}

pub fn per_query_differences(
    rankings1: &[Ranking],
    rankings2: &[Ranking],
    params: &KendallParams,
) -> Result<Vec<f64>, MetricError> {
    if rankings1.len() != rankings2.len() {
        return Err(MetricError::MisalignedQueries(
            rankings1.len(),
            rankings2.len(),
        ));
    }
    rankings1
        .iter()
        .zip(rankings2)
        .map(|(a, b)| ranking_distance(a, b, params))
        .collect()
}
