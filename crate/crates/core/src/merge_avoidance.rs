//! Merge-avoidance solvers.
//!
//! *Single target*: pick the fewest inputs whose values cover a payment.
//! Sorting by value and taking a prefix is optimal, since the top-k prefix
//! maximizes every size-k sum.
//!
//! *Multi target*: find a non-negative integer matrix with the given row
//! (input) and column (output) sums and as few positive entries as possible.
//! NP-hard in general (partition reduces to it with two equal outputs), so the
//! exact solver is exponential and size-guarded.

use std::collections::HashMap;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::domain::{MAInstance, MASolution, PartitionInstance, SingleTargetInstance};
use crate::error::{Error, Result};

/// Default cell budget for [`solve_multi_target_exact`]: an 8x8 transaction.
pub const DEFAULT_NODE_BUDGET: usize = 64;

/// Enumeration guard for [`brute_single_target`].
pub const BRUTE_MAX_VALUES: usize = 20;

/// Greedy single-target solver. Returns the chosen input indices in ascending
/// order. Equal values are taken lowest index first.
pub fn solve_single_target(inst: &SingleTargetInstance) -> Result<Vec<usize>> {
    inst.validate()?;
    check_feasible(inst)?;
    let mut order: Vec<usize> = (0..inst.values.len()).collect();
    // stable: ties keep index order
    order.sort_by(|&a, &b| inst.values[b].cmp(&inst.values[a]));

    let mut chosen = Vec::new();
    let mut covered: u128 = 0;
    for i in order {
        if covered >= inst.v as u128 {
            break;
        }
        covered += inst.values[i] as u128;
        chosen.push(i);
    }
    chosen.sort_unstable();
    Ok(chosen)
}

/// Exhaustive oracle for [`solve_single_target`]: tries every subset by
/// increasing size and returns the first feasible one.
pub fn brute_single_target(inst: &SingleTargetInstance) -> Result<Vec<usize>> {
    inst.validate()?;
    let n = inst.values.len();
    if n > BRUTE_MAX_VALUES {
        return Err(Error::TooLarge {
            size: n,
            limit: BRUTE_MAX_VALUES,
        });
    }
    check_feasible(inst)?;
    for size in 1..=n {
        for combo in (0..n).combinations(size) {
            let sum: u128 = combo.iter().map(|&i| inst.values[i] as u128).sum();
            if sum >= inst.v as u128 {
                return Ok(combo);
            }
        }
    }
    unreachable!("feasibility was checked")
}

fn check_feasible(inst: &SingleTargetInstance) -> Result<()> {
    let total = inst.total();
    if total < inst.v as u128 {
        Err(Error::Infeasible {
            total,
            target: inst.v,
        })
    } else {
        Ok(())
    }
}

/// Bounds on the optimal transaction count: every input needs at least one
/// transfer, and no more than one per output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MABounds {
    pub lower: usize,
    pub upper: usize,
}

pub fn bounds(inst: &MAInstance) -> MABounds {
    MABounds {
        lower: inst.rows(),
        upper: inst.rows() * inst.cols(),
    }
}

/// Northwest-corner filling. Feasible in O(l + r) steps with at most
/// `l + r - 1` positive entries; not optimal in general.
pub fn heuristic_multi_target(inst: &MAInstance) -> Result<MASolution> {
    inst.validate()?;
    let mut rows = inst.inputs.clone();
    let mut cols = inst.outputs.clone();
    let mut sol = MASolution::zeros(inst.rows(), inst.cols());
    let (mut i, mut j) = (0, 0);
    while i < rows.len() && j < cols.len() {
        let x = rows[i].min(cols[j]);
        sol.m[i][j] = x;
        rows[i] -= x;
        cols[j] -= x;
        if rows[i] == 0 {
            i += 1;
        }
        if cols[j] == 0 {
            j += 1;
        }
    }
    Ok(sol)
}

/// Exact minimum-transaction split, by branch and bound.
///
/// Cells are visited row-major. Some optimal matrix is a union of northwest
/// staircases, one per group of inputs and outputs with equal sums. In such a
/// matrix every positive entry equals `min(remaining row, remaining column)`
/// at the moment its cell is visited, so each cell only branches on "fill it"
/// or "leave it empty". Subproblems are memoized on `(row, remaining column
/// sums)`; inside a row, branches are cut once entries placed plus
/// `max(unfinished rows, unfinished columns)` cannot beat the best completion.
///
/// `node_budget` caps `rows * cols`.
pub fn solve_multi_target_exact(inst: &MAInstance, node_budget: usize) -> Result<MASolution> {
    inst.validate()?;
    let size = inst.rows() * inst.cols();
    if size > node_budget {
        return Err(Error::TooLarge {
            size,
            limit: node_budget,
        });
    }
    let mut search = ExactSearch {
        inputs: &inst.inputs,
        memo: HashMap::new(),
    };
    let (_, rows) = search
        .best_from(0, inst.outputs.clone())
        .expect("balanced instances always have a feasible split");
    Ok(MASolution { m: rows })
}

type Completion = Option<(usize, Vec<Vec<u64>>)>;

struct ExactSearch<'a> {
    inputs: &'a [u64],
    memo: HashMap<(usize, Vec<u64>), Completion>,
}

impl ExactSearch<'_> {
    /// Optimal fill of rows `i..` given what the columns still need.
    fn best_from(&mut self, i: usize, cols: Vec<u64>) -> Completion {
        let n_rows = self.inputs.len();
        if i == n_rows {
            return cols.iter().all(|&c| c == 0).then(|| (0, Vec::new()));
        }
        if i + 1 == n_rows {
            // last row must take whatever is left
            let need: u128 = cols.iter().map(|&c| c as u128).sum();
            if need != self.inputs[i] as u128 {
                return None;
            }
            let count = cols.iter().filter(|&&c| c > 0).count();
            return Some((count, vec![cols]));
        }
        let key = (i, cols);
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let cols = key.1.clone();

        let mut best: Completion = None;
        let mut row = vec![0u64; cols.len()];
        let mut rem_cols = cols.clone();
        // suffix[j] = sum of cols[j..], for the "can we still fill this row" cut
        let mut suffix = vec![0u128; cols.len() + 1];
        for j in (0..cols.len()).rev() {
            suffix[j] = suffix[j + 1] + cols[j] as u128;
        }
        self.branch_row(
            i,
            0,
            self.inputs[i],
            0,
            &mut row,
            &mut rem_cols,
            &suffix,
            &mut best,
        );

        self.memo.insert(key, best.clone());
        best
    }

    #[allow(clippy::too_many_arguments)]
    fn branch_row(
        &mut self,
        i: usize,
        j: usize,
        rem_row: u64,
        placed: usize,
        row: &mut Vec<u64>,
        cols: &mut Vec<u64>,
        suffix: &[u128],
        best: &mut Completion,
    ) {
        if rem_row == 0 {
            let rows_left = self.inputs.len() - i - 1;
            let cols_left = cols.iter().filter(|&&c| c > 0).count();
            if let Some((b, _)) = best {
                if placed + rows_left.max(cols_left) >= *b {
                    return;
                }
            }
            if let Some((tail, rest)) = self.best_from(i + 1, cols.clone()) {
                let total = placed + tail;
                if best.as_ref().is_none_or(|(b, _)| total < *b) {
                    let mut rows = Vec::with_capacity(rest.len() + 1);
                    rows.push(row.clone());
                    rows.extend(rest);
                    *best = Some((total, rows));
                }
            }
            return;
        }
        if j == cols.len() || suffix[j] < rem_row as u128 {
            return;
        }
        // at least one more entry for this row, plus the rows below
        let rows_left = self.inputs.len() - i - 1;
        if let Some((b, _)) = best {
            if placed + 1 + rows_left >= *b {
                return;
            }
        }

        if cols[j] > 0 {
            let x = rem_row.min(cols[j]);
            row[j] = x;
            cols[j] -= x;
            self.branch_row(i, j + 1, rem_row - x, placed + 1, row, cols, suffix, best);
            cols[j] += x;
            row[j] = 0;
        }
        self.branch_row(i, j + 1, rem_row, placed, row, cols, suffix, best);
    }
}

/// Partition instance -> merge-avoidance instance with two outputs of half the
/// total each.
pub fn partition_to_ma(p: &PartitionInstance) -> Result<MAInstance> {
    p.validate()?;
    let total = p.total();
    if !total.is_multiple_of(2) {
        return Err(Error::OddSum(total));
    }
    let half = u64::try_from(total / 2).map_err(|_| Error::TooLarge {
        size: usize::MAX,
        limit: u64::MAX as usize,
    })?;
    MAInstance::new(p.elements.clone(), vec![half, half])
}

/// Subset-sum DP over `total / 2`. Pseudo-polynomial in the element values.
pub fn has_partition(p: &PartitionInstance) -> bool {
    let total = p.total();
    if !total.is_multiple_of(2) {
        return false;
    }
    let half = (total / 2) as usize;
    let mut reachable = vec![false; half + 1];
    reachable[0] = true;
    for &e in &p.elements {
        let e = e as usize;
        if e > half {
            continue;
        }
        for s in (e..=half).rev() {
            if reachable[s - e] {
                reachable[s] = true;
            }
        }
        if reachable[half] {
            return true;
        }
    }
    reachable[half]
}
