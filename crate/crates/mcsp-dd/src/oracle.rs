//! Exhaustive reference solver for small instances.
//!
//! Depth-first search over partitions: at every step it covers the
//! leftmost uncovered position of `s1` with some piece and recurses.
//! Branching on the leftmost position makes the search tree canonical
//! (no permuted duplicates), and the piece count bound prunes hopeless
//! branches. Kept deliberately independent of the diagram construction:
//! it scans substrings directly and never touches the block set or the
//! transition logic.

use crate::blocks::Block;
use crate::instance::Instance;
use crate::solver::{validate_partition, Partition};
use serde_json::{json, Value};
use std::fmt;

/// Result of an exhaustive search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub value: usize,
    pub partition: Partition,
    pub nodes_explored: usize,
}

impl OracleResult {
    pub fn to_json(&self, n: usize) -> Value {
        json!({
            "value": self.value,
            "n": n,
            "nodes_explored": self.nodes_explored,
            "partition": self.partition.to_json(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    /// The search exhausted its node budget; no optimality claim possible.
    BudgetExceeded { explored: usize },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::BudgetExceeded { explored } => {
                write!(f, "oracle node budget exceeded after {explored} nodes")
            }
        }
    }
}

impl std::error::Error for OracleError {}

struct Search<'a> {
    s1: &'a [u8],
    s2: &'a [u8],
    n: usize,
    covered1: Vec<bool>,
    covered2: Vec<bool>,
    pieces: Vec<Block>,
    best_value: usize,
    best_pieces: Vec<Block>,
    explored: usize,
    budget: Option<usize>,
    prune: bool,
}

impl Search<'_> {
    fn dfs(&mut self) -> Result<(), OracleError> {
        self.explored += 1;
        if let Some(budget) = self.budget {
            if self.explored > budget {
                return Err(OracleError::BudgetExceeded {
                    explored: self.explored,
                });
            }
        }

        let Some(p) = self.covered1.iter().position(|&c| !c) else {
            if self.pieces.len() < self.best_value {
                self.best_value = self.pieces.len();
                self.best_pieces = self.pieces.clone();
            }
            return Ok(());
        };

        // Every completion places at least one more piece.
        if self.prune && self.pieces.len() + 1 >= self.best_value {
            return Ok(());
        }

        // Candidate start positions in s2 with their maximal extensions.
        let mut candidates: Vec<(usize, usize)> = Vec::new();
        let mut t_max = 0;
        for k2 in 0..self.n {
            if self.covered2[k2] || self.s2[k2] != self.s1[p] {
                continue;
            }
            let mut t = 1;
            while p + t < self.n
                && k2 + t < self.n
                && !self.covered1[p + t]
                && !self.covered2[k2 + t]
                && self.s1[p + t] == self.s2[k2 + t]
            {
                t += 1;
            }
            candidates.push((k2, t));
            t_max = t_max.max(t);
        }

        // Longest pieces first for fast incumbents, start position ascending
        // within a length.
        for t in (1..=t_max).rev() {
            for &(k2, ext) in &candidates {
                if ext < t {
                    continue;
                }
                for off in 0..t {
                    self.covered1[p + off] = true;
                    self.covered2[k2 + off] = true;
                }
                self.pieces.push(Block::new(p, k2, t));
                let outcome = self.dfs();
                self.pieces.pop();
                for off in 0..t {
                    self.covered1[p + off] = false;
                    self.covered2[k2 + off] = false;
                }
                outcome?;
            }
        }
        Ok(())
    }
}

fn search(
    instance: &Instance,
    node_budget: Option<usize>,
    prune: bool,
) -> Result<OracleResult, OracleError> {
    let n = instance.n();
    let mut state = Search {
        s1: instance.s1(),
        s2: instance.s2(),
        n,
        covered1: vec![false; n],
        covered2: vec![false; n],
        pieces: Vec::new(),
        best_value: usize::MAX,
        best_pieces: Vec::new(),
        explored: 0,
        budget: node_budget,
        prune,
    };
    state.dfs()?;
    let partition = Partition::new(state.best_pieces);
    debug_assert!(validate_partition(instance, &partition).is_ok());
    Ok(OracleResult {
        value: state.best_value,
        partition,
        nodes_explored: state.explored,
    })
}

/// Finds the minimum partition size by exhaustive search.
///
/// Intended for short instances (roughly `n <= 14`); `node_budget` guards
/// against larger inputs. On success the returned partition is optimal
/// and passes [`validate_partition`].
pub fn brute_force(
    instance: &Instance,
    node_budget: Option<usize>,
) -> Result<OracleResult, OracleError> {
    search(instance, node_budget, true)
}
