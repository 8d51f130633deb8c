//! Independence number of a digraph: no edge (in either direction, loops
//! included) inside the set.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::graph::{Digraph, Vertex};

pub const DEFAULT_EXACT_CAP: usize = 40;
const GREEDY_RESTARTS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndependenceResult {
    pub size: usize,
    pub set: Vec<Vertex>,
    /// True when `size` is the independence number, false for a lower bound.
    pub exact: bool,
}

/// `α(G)` by branch and bound when `n <= min(exact_cap, 64)`, otherwise a greedy lower bound.
pub fn independence_number<R: Rng + ?Sized>(g: &Digraph, exact_cap: usize, rng: &mut R) -> IndependenceResult {
    let n = g.n();
    let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut looped = vec![false; n];
    for (i, j) in g.edges() {
        if i == j {
            looped[i] = true;
        } else {
            nbrs[i].push(j);
            nbrs[j].push(i);
        }
    }
    if n <= exact_cap.min(64) {
        let adj: Vec<u64> = nbrs.iter().map(|l| l.iter().fold(0u64, |m, &v| m | 1 << v)).collect();
        let cand = (0..n).filter(|&v| !looped[v]).fold(0u64, |m, v| m | 1 << v);
        let mut best = 0u64;
        branch(&adj, cand, 0, &mut best);
        let set: Vec<Vertex> = (0..n).filter(|&v| best >> v & 1 == 1).collect();
        return IndependenceResult { size: set.len(), set, exact: true };
    }
    let mut best: Vec<Vertex> = Vec::new();
    let mut order: Vec<usize> = (0..n).filter(|&v| !looped[v]).collect();
    for _ in 0..GREEDY_RESTARTS {
        order.shuffle(rng);
        let set = greedy(&nbrs, &order, n);
        if set.len() > best.len() {
            best = set;
        }
    }
    best.sort_unstable();
    IndependenceResult { size: best.len(), set: best, exact: false }
}

/// Some vertex of `N[v]` lies in every maximal independent set, so branching
/// on the closed neighborhood of a minimum-degree vertex is complete.
fn branch(adj: &[u64], mut cand: u64, cur: u64, best: &mut u64) {
    if cand == 0 {
        if cur.count_ones() > best.count_ones() {
            *best = cur;
        }
        return;
    }
    if cur.count_ones() + cand.count_ones() <= best.count_ones() {
        return;
    }
    let mut v = 0;
    let mut min_deg = u32::MAX;
    let mut rest = cand;
    while rest != 0 {
        let u = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let deg = (adj[u] & cand).count_ones();
        if deg < min_deg {
            min_deg = deg;
            v = u;
        }
    }
    let mut choices = (adj[v] & cand) | 1 << v;
    while choices != 0 {
        let u = choices.trailing_zeros() as usize;
        choices &= choices - 1;
        branch(adj, cand & !adj[u] & !(1 << u), cur | 1 << u, best);
        // Sets containing u are done.
        cand &= !(1 << u);
        if cur.count_ones() + cand.count_ones() <= best.count_ones() {
            return;
        }
    }
}

/// Repeatedly takes the remaining vertex of smallest residual degree, scanning in `order`.
fn greedy(nbrs: &[Vec<usize>], order: &[usize], n: usize) -> Vec<Vertex> {
    let mut alive = vec![false; n];
    for &v in order {
        alive[v] = true;
    }
    let mut deg: Vec<usize> = (0..n).map(|v| nbrs[v].iter().filter(|&&u| alive[u]).count()).collect();
    let mut set = Vec::new();
    loop {
        let Some(&v) = order.iter().filter(|&&v| alive[v]).min_by_key(|&&v| deg[v]) else {
            break;
        };
        set.push(v);
        let mut removed = vec![v];
        alive[v] = false;
        for &u in &nbrs[v] {
            if alive[u] {
                alive[u] = false;
                removed.push(u);
            }
        }
        for &r in &removed {
            for &w in &nbrs[r] {
                if alive[w] {
                    deg[w] -= 1;
                }
            }
        }
    }
    set
}
