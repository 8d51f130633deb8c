//! Searching for all-zero minors `E(I, J) = ∅`.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::subsets::binomial_sat;
use crate::bits;
use crate::graph::{Digraph, Vertex};

/// Row sets of size `l` are enumerated exhaustively up to this many.
pub const EXACT_ZERO_MINOR_LIMIT: u64 = 2_000_000;
/// Random restarts of the greedy heuristic.
pub const ZERO_MINOR_RESTARTS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Exact,
    Heuristic,
    /// Exact when `C(n, l) <= EXACT_ZERO_MINOR_LIMIT`.
    Auto,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ZeroMinorOutcome {
    /// `E(I, J) = ∅` with `|I| = l` and `|J| >= r`; `J` is all of `[n] \ N^out(I)`.
    Found { i_set: Vec<Vertex>, j_set: Vec<Vertex> },
    /// Exact search proved that no such minor exists.
    Absent,
    /// Heuristic search found nothing; not a proof.
    Inconclusive,
}

impl ZeroMinorOutcome {
    pub fn witness(&self) -> Option<(&[Vertex], &[Vertex])> {
        match self {
            ZeroMinorOutcome::Found { i_set, j_set } => Some((i_set, j_set)),
            _ => None,
        }
    }
}

/// Looks for `I, J` with `|I| >= l`, `|J| >= r` and no edge from `I` to `J`.
///
/// Shrinking `I` only enlarges the admissible `J`, so it suffices to try
/// `|I| = l` and take `J = [n] \ N^out(I)`. Values of `l` or `r` outside
/// `1..=n` never admit a minor.
pub fn zero_minor_search<R: Rng + ?Sized>(
    g: &Digraph,
    l: usize,
    r: usize,
    mode: SearchMode,
    rng: &mut R,
) -> ZeroMinorOutcome {
    let n = g.n();
    if l == 0 || r == 0 || l > n || r > n {
        return ZeroMinorOutcome::Absent;
    }
    let exact = match mode {
        SearchMode::Exact => true,
        SearchMode::Heuristic => false,
        SearchMode::Auto => binomial_sat(n as u64, l as u64) <= EXACT_ZERO_MINOR_LIMIT,
    };
    if exact {
        exact_search(g, l, r)
    } else {
        greedy_search(g, l, r, rng)
    }
}

fn found(g: &Digraph, i_set: Vec<Vertex>, cover: &[u64]) -> ZeroMinorOutcome {
    let j_set = (0..g.n()).filter(|&j| !bits::get(cover, j)).collect();
    ZeroMinorOutcome::Found { i_set, j_set }
}

fn exact_search(g: &Digraph, l: usize, r: usize) -> ZeroMinorOutcome {
    let n = g.n();
    let words = g.words_per_row();
    // Covering at most n - r columns is required.
    let max_cover = n - r;
    let mut stack = Vec::with_capacity(l);
    let mut acc = vec![vec![0u64; words]; l + 1];
    fn rec(
        g: &Digraph,
        l: usize,
        max_cover: usize,
        start: usize,
        stack: &mut Vec<usize>,
        acc: &mut [Vec<u64>],
    ) -> bool {
        let depth = stack.len();
        if depth == l {
            return true;
        }
        for v in start..=g.n() - (l - depth) {
            let (head, tail) = acc.split_at_mut(depth + 1);
            tail[0].copy_from_slice(&head[depth]);
            bits::or_into(&mut tail[0], g.row_bits(v));
            // Unions only grow, so prune as soon as too much is covered.
            if bits::count(&tail[0]) > max_cover {
                continue;
            }
            stack.push(v);
            if rec(g, l, max_cover, v + 1, stack, acc) {
                return true;
            }
            stack.pop();
        }
        false
    }
    if rec(g, l, max_cover, 0, &mut stack, &mut acc) {
        found(g, stack, &acc[l])
    } else {
        ZeroMinorOutcome::Absent
    }
}

/// Grows `I` one row at a time, always adding the row that covers the fewest
/// new columns (ties broken at random), from random starting rows.
fn greedy_search<R: Rng + ?Sized>(g: &Digraph, l: usize, r: usize, rng: &mut R) -> ZeroMinorOutcome {
    let n = g.n();
    let mut order: Vec<usize> = (0..n).collect();
    for _ in 0..ZERO_MINOR_RESTARTS {
        order.shuffle(rng);
        let mut chosen = vec![false; n];
        let mut i_set = vec![order[0]];
        chosen[order[0]] = true;
        let mut cover = g.row_bits(order[0]).to_vec();
        while i_set.len() < l {
            let mut best = None;
            let mut best_gain = usize::MAX;
            for &v in &order {
                if chosen[v] {
                    continue;
                }
                let gain = bits::or_count(&cover, g.row_bits(v));
                if gain < best_gain {
                    best_gain = gain;
                    best = Some(v);
                }
            }
            let v = best.expect("l <= n leaves a candidate");
            chosen[v] = true;
            i_set.push(v);
            bits::or_into(&mut cover, g.row_bits(v));
        }
        if n - bits::count(&cover) >= r {
            i_set.sort_unstable();
            return found(g, i_set, &cover);
        }
    }
    ZeroMinorOutcome::Inconclusive
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::task_rng;

    #[test]
    fn single_zero_entry_always_exists() {
        let g = Digraph::circulant(7, &[1, 3]).unwrap();
        let out = zero_minor_search(&g, 1, 1, SearchMode::Exact, &mut task_rng(0, 0));
        let (i, j) = out.witness().unwrap();
        assert_eq!(i.len(), 1);
        assert_eq!(j.len(), 5);
        assert_eq!(g.edges_between(i, j).unwrap(), 0);
    }

    #[test]
    fn complete_graph_has_no_zero_minor() {
        let g = Digraph::complete(5);
        for mode in [SearchMode::Exact, SearchMode::Heuristic] {
            let out = zero_minor_search(&g, 1, 1, mode, &mut task_rng(0, 0));
            assert!(out.witness().is_none());
        }
        assert_eq!(zero_minor_search(&g, 1, 1, SearchMode::Exact, &mut task_rng(0, 0)), ZeroMinorOutcome::Absent);
    }

    #[test]
    fn exact_agrees_with_heuristic_when_found() {
        // Rows {0,1} of the consecutive circulant cover {0,1,2}; J = {3..7}.
        let g = Digraph::consecutive_circulant(8, 2).unwrap();
        let exact = zero_minor_search(&g, 2, 5, SearchMode::Exact, &mut task_rng(0, 0));
        assert!(exact.witness().is_some());
        assert_eq!(zero_minor_search(&g, 2, 6, SearchMode::Exact, &mut task_rng(0, 0)), ZeroMinorOutcome::Absent);
        let heur = zero_minor_search(&g, 2, 5, SearchMode::Heuristic, &mut task_rng(0, 0));
        assert!(heur.witness().is_some());
    }
}
