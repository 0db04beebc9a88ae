//! Optimal one-to-one speaker mapping.
//!
//! The core solver is the O(n^3) shortest-augmenting-path form of the
//! Hungarian algorithm over integer weights, run on a zero-padded square
//! matrix so rectangular inputs work. Ties between optimal pairings are
//! broken deterministically: reference speakers are visited in name order
//! and each takes the first system speaker (in name order) that still
//! admits an optimal completion, falling back to "unmapped".

use serde::{Deserialize, Serialize};

use super::OverlapMatrix;
use crate::timeline::Ticks;

/// Pairs of (reference speaker, system speaker), sorted by reference name.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SpeakerMapping {
    pub pairs: Vec<(String, String)>,
    /// Total matched overlap.
    pub objective: Ticks,
}

impl SpeakerMapping {
    pub fn sys_for(&self, ref_speaker: &str) -> Option<&str> {
        self.pairs.iter().find(|(r, _)| r == ref_speaker).map(|(_, s)| s.as_str())
    }

    pub fn ref_for(&self, sys_speaker: &str) -> Option<&str> {
        self.pairs.iter().find(|(_, s)| s == sys_speaker).map(|(r, _)| r.as_str())
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Maximum-weight assignment of rows to columns.
///
/// Returns the optimal total and, per row, the assigned column (or `None`
/// when the row is left unassigned because there are more rows than
/// columns). Weights may be any non-negative values; zero-weight
/// assignments are reported like any other.
pub fn max_weight_assignment(weights: &[Vec<i64>]) -> (i64, Vec<Option<usize>>) {
    let rows = weights.len();
    let cols = weights.first().map_or(0, Vec::len);
    debug_assert!(weights.iter().all(|r| r.len() == cols));
    if rows == 0 || cols == 0 {
        return (0, vec![None; rows]);
    }

    let n = rows.max(cols);
    let cost = |i: usize, j: usize| -> i64 {
        if i < rows && j < cols {
            -weights[i][j]
        } else {
            0
        }
    };

    let inf = i64::MAX / 4;
    // 1-based potentials and matching; column 0 is the virtual root.
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut matched_row = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![None; rows];
    let mut total = 0;
    for j in 1..=cols {
        let i = matched_row[j];
        if i >= 1 && i <= rows {
            assignment[i - 1] = Some(j - 1);
            total += weights[i - 1][j - 1];
        }
    }
    (total, assignment)
}

/// Best total over a sub-matrix given by row and column index lists.
fn best_total(m: &OverlapMatrix, rows: &[usize], cols: &[usize]) -> i64 {
    let sub: Vec<Vec<i64>> = rows.iter().map(|&i| cols.iter().map(|&j| m.get(i, j).ticks()).collect()).collect();
    max_weight_assignment(&sub).0
}

/// Maximum-overlap one-to-one mapping. Zero-overlap pairs are never part of
/// the mapping.
pub fn optimal_mapping(m: &OverlapMatrix) -> SpeakerMapping {
    let all_rows: Vec<usize> = (0..m.rows()).collect();
    let all_cols: Vec<usize> = (0..m.cols()).collect();
    let best = best_total(m, &all_rows, &all_cols);

    let mut col_free = vec![true; m.cols()];
    let mut fixed_total = 0i64;
    let mut pairs = Vec::new();
    for i in 0..m.rows() {
        let later_rows = &all_rows[i + 1..];
        for j in 0..m.cols() {
            let w = m.get(i, j).ticks();
            if !col_free[j] || w == 0 {
                continue;
            }
            let rest: Vec<usize> = (0..m.cols()).filter(|&c| c != j && col_free[c]).collect();
            if fixed_total + w + best_total(m, later_rows, &rest) == best {
                col_free[j] = false;
                fixed_total += w;
                pairs.push((m.ref_names[i].clone(), m.sys_names[j].clone()));
                break;
            }
        }
    }
    debug_assert_eq!(fixed_total, best);
    SpeakerMapping { pairs, objective: Ticks(best) }
}
