//! d-regular digraphs on `n` labeled vertices.
//!
//! A [`Digraph`] is at the same time the 0/1 adjacency matrix `M` whose rows
//! `R_i` are the out-neighborhoods and whose columns `X_j` are the
//! in-neighborhoods. Loops and anti-parallel edges are allowed, multiple
//! edges are not, so every row and column of `M` sums to `d`.
//!
//! Vertices are 0-indexed everywhere.

use std::fmt::Write as _;
use std::hash::{Hash, Hasher};

use crate::bits;
use crate::frac::Frac;

pub type Vertex = usize;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("degree {d} invalid for n = {n} (need 1 <= d <= n)")]
    InvalidDegree { n: usize, d: usize },
    #[error("row {row} has {len} out-neighbors, expected {d}")]
    RowSize { row: usize, len: usize, d: usize },
    #[error("row {row} lists vertex {vertex} more than once")]
    DuplicateNeighbor { row: usize, vertex: usize },
    #[error("column {col} has {sum} in-neighbors, expected {d}")]
    ColumnSum { col: usize, sum: usize, d: usize },
    #[error("expected {expected} rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("vertices must be distinct (got {0} twice)")]
    SameVertex(usize),
    #[error("vertex set must be nonempty")]
    EmptySet,
    #[error("complement of a complete digraph has degree 0")]
    CompleteComplement,
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Why a proposed switching was not applied.
#[derive(Debug, thiserror::Error, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SwitchRejection {
    #[error("rows coincide (i1 = i2)")]
    SameRow,
    #[error("columns coincide (j1 = j2)")]
    SameColumn,
    #[error("edge ({0},{1}) is not present")]
    MissingEdge(usize, usize),
    #[error("edge ({0},{1}) already present; switching would create a multi-edge")]
    WouldDuplicate(usize, usize),
    #[error("vertex out of range")]
    OutOfRange,
}

/// Replace edges `(i1,j1), (i2,j2)` by `(i1,j2), (i2,j1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct SwitchingMove {
    pub i1: Vertex,
    pub j1: Vertex,
    pub i2: Vertex,
    pub j2: Vertex,
}

impl SwitchingMove {
    pub fn new(i1: Vertex, j1: Vertex, i2: Vertex, j2: Vertex) -> Self {
        SwitchingMove { i1, j1, i2, j2 }
    }

    /// The move that undoes this one.
    pub fn inverse(&self) -> Self {
        SwitchingMove { i1: self.i1, j1: self.j2, i2: self.i2, j2: self.j1 }
    }
}

/// Indicator of the rows meeting a column set `J`, i.e. of `N^in(J)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DeltaVector {
    words: Vec<u64>,
    n: usize,
    j_set: Vec<Vertex>,
}

impl DeltaVector {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: Vertex) -> bool {
        bits::get(&self.words, i)
    }

    pub fn support_size(&self) -> usize {
        bits::count(&self.words)
    }

    pub fn support(&self) -> Vec<Vertex> {
        bits::ones(&self.words).collect()
    }

    pub fn j_set(&self) -> &[Vertex] {
        &self.j_set
    }

    /// Packed bits; two vectors over the same `J` are equal iff their words are.
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.n).map(|i| self.get(i) as u8).collect()
    }
}

#[derive(Debug, Clone)]
pub struct Digraph {
    n: usize,
    d: usize,
    out_adj: Vec<Vec<u32>>,
    in_adj: Vec<Vec<u32>>,
    words: usize,
    row_bits: Vec<u64>,
    col_bits: Vec<u64>,
}

impl PartialEq for Digraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.d == other.d && self.row_bits == other.row_bits
    }
}

impl Eq for Digraph {}

impl Hash for Digraph {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.row_bits.hash(state);
    }
}

impl Digraph {
    /// Builds a digraph from out-neighbor lists, validating regularity.
    pub fn new(n: usize, d: usize, out_adj: Vec<Vec<usize>>) -> Result<Self, GraphError> {
        if n == 0 || d == 0 || d > n {
            return Err(GraphError::InvalidDegree { n, d });
        }
        if out_adj.len() != n {
            return Err(GraphError::RowCount { expected: n, found: out_adj.len() });
        }
        let words = bits::words_for(n);
        let mut row_bits = vec![0u64; n * words];
        let mut rows = Vec::with_capacity(n);
        for (i, mut row) in out_adj.into_iter().enumerate() {
            if row.len() != d {
                return Err(GraphError::RowSize { row: i, len: row.len(), d });
            }
            row.sort_unstable();
            for w in row.windows(2) {
                if w[0] == w[1] {
                    return Err(GraphError::DuplicateNeighbor { row: i, vertex: w[0] });
                }
            }
            for &j in &row {
                if j >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: j, n });
                }
                bits::set(&mut row_bits[i * words..(i + 1) * words], j);
            }
            rows.push(row.into_iter().map(|j| j as u32).collect::<Vec<u32>>());
        }
        let mut col_count = vec![0usize; n];
        for row in &rows {
            for &j in row {
                col_count[j as usize] += 1;
            }
        }
        if let Some((col, &sum)) = col_count.iter().enumerate().find(|(_, &c)| c != d) {
            return Err(GraphError::ColumnSum { col, sum, d });
        }
        Ok(Self::assemble(n, d, rows, row_bits))
    }

    /// Builds from a flat bit matrix known to be d-regular.
    pub(crate) fn from_row_bits(n: usize, d: usize, row_bits: Vec<u64>) -> Self {
        let words = bits::words_for(n);
        debug_assert_eq!(row_bits.len(), n * words);
        let rows: Vec<Vec<u32>> = (0..n)
            .map(|i| bits::ones(&row_bits[i * words..(i + 1) * words]).map(|j| j as u32).collect())
            .collect();
        let g = Self::assemble(n, d, rows, row_bits);
        debug_assert!(g.check_invariants().is_ok(), "{:?}", g.check_invariants());
        g
    }

    fn assemble(n: usize, d: usize, out_adj: Vec<Vec<u32>>, row_bits: Vec<u64>) -> Self {
        let words = bits::words_for(n);
        let mut in_adj = vec![Vec::with_capacity(d); n];
        let mut col_bits = vec![0u64; n * words];
        for (i, row) in out_adj.iter().enumerate() {
            for &j in row {
                in_adj[j as usize].push(i as u32);
                bits::set(&mut col_bits[j as usize * words..(j as usize + 1) * words], i);
            }
        }
        Digraph { n, d, out_adj, in_adj, words, row_bits, col_bits }
    }

    /// `out_adj[i] = {i + o : o in offsets} mod n`.
    pub fn circulant(n: usize, offsets: &[usize]) -> Result<Self, GraphError> {
        let rows = (0..n).map(|i| offsets.iter().map(|o| (i + o) % n).collect()).collect();
        Self::new(n, offsets.len(), rows)
    }

    /// The default switch-chain start: `out_adj[i] = {i, ..., i + d - 1} mod n`.
    pub fn consecutive_circulant(n: usize, d: usize) -> Result<Self, GraphError> {
        let offsets: Vec<usize> = (0..d).collect();
        Self::circulant(n, &offsets)
    }

    /// All-ones matrix (`d = n`, loops everywhere).
    pub fn complete(n: usize) -> Self {
        Self::consecutive_circulant(n, n).expect("complete digraph is regular")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn out_neighbors(&self, i: Vertex) -> &[u32] {
        &self.out_adj[i]
    }

    pub fn in_neighbors(&self, j: Vertex) -> &[u32] {
        &self.in_adj[j]
    }

    pub fn has_edge(&self, i: Vertex, j: Vertex) -> bool {
        bits::get(self.row_bits(i), j)
    }

    /// Row `R_i` as packed bits.
    pub fn row_bits(&self, i: Vertex) -> &[u64] {
        &self.row_bits[i * self.words..(i + 1) * self.words]
    }

    /// Column `X_j` as packed bits.
    pub fn col_bits(&self, j: Vertex) -> &[u64] {
        &self.col_bits[j * self.words..(j + 1) * self.words]
    }

    pub fn words_per_row(&self) -> usize {
        self.words
    }

    /// All rows concatenated; the canonical key of the matrix.
    pub fn packed_rows(&self) -> &[u64] {
        &self.row_bits
    }

    /// Dense 0/1 rows.
    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.has_edge(i, j) as u8).collect()).collect()
    }

    /// Edges in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.out_adj
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |&j| (i, j as usize)))
    }

    fn check_range(&self, set: &[Vertex]) -> Result<(), GraphError> {
        match set.iter().find(|&&v| v >= self.n) {
            Some(&v) => Err(GraphError::VertexOutOfRange { vertex: v, n: self.n }),
            None => Ok(()),
        }
    }

    fn union_bits<'a>(&'a self, set: &[Vertex], pick: impl Fn(Vertex) -> &'a [u64]) -> Vec<u64> {
        let mut acc = vec![0u64; self.words];
        for &v in set {
            bits::or_into(&mut acc, pick(v));
        }
        acc
    }

    /// `N^in(S)` as packed bits (no range check).
    pub fn n_in_bits(&self, s: &[Vertex]) -> Vec<u64> {
        self.union_bits(s, |j| self.col_bits(j))
    }

    /// `N^out(S)` as packed bits (no range check).
    pub fn n_out_bits(&self, s: &[Vertex]) -> Vec<u64> {
        self.union_bits(s, |i| self.row_bits(i))
    }

    /// `N^in(S) = { v : (v, i) is an edge for some i in S }`, sorted.
    pub fn n_in(&self, s: &[Vertex]) -> Result<Vec<Vertex>, GraphError> {
        self.check_range(s)?;
        Ok(bits::ones(&self.n_in_bits(s)).collect())
    }

    /// `N^out(S)`, sorted.
    pub fn n_out(&self, s: &[Vertex]) -> Result<Vec<Vertex>, GraphError> {
        self.check_range(s)?;
        Ok(bits::ones(&self.n_out_bits(s)).collect())
    }

    /// `|E(I, J)|`: number of edges leaving `I` and landing in `J`.
    pub fn edges_between(&self, i_set: &[Vertex], j_set: &[Vertex]) -> Result<usize, GraphError> {
        self.check_range(i_set)?;
        self.check_range(j_set)?;
        let jb = bits::from_indices(self.n, j_set.iter().copied());
        Ok(i_set.iter().map(|&i| bits::and_count(self.row_bits(i), &jb)).sum())
    }

    /// The edges of `E(I, J)` themselves.
    pub fn edge_list_between(
        &self,
        i_set: &[Vertex],
        j_set: &[Vertex],
    ) -> Result<Vec<(Vertex, Vertex)>, GraphError> {
        self.check_range(i_set)?;
        self.check_range(j_set)?;
        let jb = bits::from_indices(self.n, j_set.iter().copied());
        let mut out = Vec::new();
        for &i in i_set {
            for &j in &self.out_adj[i] {
                if bits::get(&jb, j as usize) {
                    out.push((i, j as usize));
                }
            }
        }
        Ok(out)
    }

    /// Common out-neighbors `C^out(u, v) = supp R_u ∩ supp R_v`.
    pub fn co_out(&self, u: Vertex, v: Vertex) -> Result<Vec<Vertex>, GraphError> {
        self.check_range(&[u, v])?;
        if u == v {
            return Err(GraphError::SameVertex(u));
        }
        let (a, b) = (self.row_bits(u), self.row_bits(v));
        let inter: Vec<u64> = a.iter().zip(b).map(|(x, y)| x & y).collect();
        Ok(bits::ones(&inter).collect())
    }

    /// Largest co-degree `max_{u<v} |C^out(u,v)|` (0 when `n = 1`).
    pub fn max_codegree(&self) -> usize {
        let mut best = 0;
        for u in 0..self.n {
            for v in u + 1..self.n {
                best = best.max(bits::and_count(self.row_bits(u), self.row_bits(v)));
            }
        }
        best
    }

    /// Membership in `D^co(ε)`: every pair of distinct rows shares at most `εd` columns.
    pub fn in_dco(&self, epsilon: Frac) -> bool {
        epsilon.bounds_above(self.max_codegree() as u64, self.d as u64)
    }

    /// `δ^J`: `bits[i] = 1` iff row `i` has a one in some column of `J`.
    pub fn delta_vector(&self, j_set: &[Vertex]) -> Result<DeltaVector, GraphError> {
        if j_set.is_empty() {
            return Err(GraphError::EmptySet);
        }
        self.check_range(j_set)?;
        let mut j: Vec<Vertex> = j_set.to_vec();
        j.sort_unstable();
        j.dedup();
        Ok(DeltaVector { words: self.n_in_bits(&j), n: self.n, j_set: j })
    }

    /// Checks whether a switching is applicable.
    pub fn validate_switching(&self, m: &SwitchingMove) -> Result<(), SwitchRejection> {
        let n = self.n;
        if m.i1 >= n || m.i2 >= n || m.j1 >= n || m.j2 >= n {
            return Err(SwitchRejection::OutOfRange);
        }
        if m.i1 == m.i2 {
            return Err(SwitchRejection::SameRow);
        }
        if m.j1 == m.j2 {
            return Err(SwitchRejection::SameColumn);
        }
        if !self.has_edge(m.i1, m.j1) {
            return Err(SwitchRejection::MissingEdge(m.i1, m.j1));
        }
        if !self.has_edge(m.i2, m.j2) {
            return Err(SwitchRejection::MissingEdge(m.i2, m.j2));
        }
        if self.has_edge(m.i1, m.j2) {
            return Err(SwitchRejection::WouldDuplicate(m.i1, m.j2));
        }
        if self.has_edge(m.i2, m.j1) {
            return Err(SwitchRejection::WouldDuplicate(m.i2, m.j1));
        }
        Ok(())
    }

    /// Applies a simple switching, returning the new graph.
    pub fn apply_switching(&self, m: &SwitchingMove) -> Result<Digraph, SwitchRejection> {
        self.validate_switching(m)?;
        let mut row_bits = self.row_bits.clone();
        let w = self.words;
        bits::clear(&mut row_bits[m.i1 * w..(m.i1 + 1) * w], m.j1);
        bits::clear(&mut row_bits[m.i2 * w..(m.i2 + 1) * w], m.j2);
        bits::set(&mut row_bits[m.i1 * w..(m.i1 + 1) * w], m.j2);
        bits::set(&mut row_bits[m.i2 * w..(m.i2 + 1) * w], m.j1);
        Ok(Digraph::from_row_bits(self.n, self.d, row_bits))
    }

    /// The `(n - d)`-regular digraph with adjacency `J_n - M`.
    pub fn complement(&self) -> Result<Digraph, GraphError> {
        if self.d == self.n {
            return Err(GraphError::CompleteComplement);
        }
        let w = self.words;
        let tail = if self.n % 64 == 0 { u64::MAX } else { (1u64 << (self.n % 64)) - 1 };
        let mut row_bits = self.row_bits.clone();
        for i in 0..self.n {
            let row = &mut row_bits[i * w..(i + 1) * w];
            for x in row.iter_mut() {
                *x = !*x;
            }
            row[w - 1] &= tail;
        }
        Ok(Digraph::from_row_bits(self.n, self.n - self.d, row_bits))
    }

    /// Re-checks every structural invariant.
    pub fn check_invariants(&self) -> Result<(), GraphError> {
        let n = self.n;
        let mut col = vec![0usize; n];
        for (i, row) in self.out_adj.iter().enumerate() {
            if row.len() != self.d {
                return Err(GraphError::RowSize { row: i, len: row.len(), d: self.d });
            }
            for w in row.windows(2) {
                if w[0] >= w[1] {
                    return Err(GraphError::DuplicateNeighbor { row: i, vertex: w[0] as usize });
                }
            }
            for &j in row {
                col[j as usize] += 1;
                if !bits::get(self.row_bits(i), j as usize) || !bits::get(self.col_bits(j as usize), i)
                {
                    return Err(GraphError::Parse { line: i, msg: "bit index out of sync".into() });
                }
            }
            if bits::count(self.row_bits(i)) != self.d {
                return Err(GraphError::RowSize { row: i, len: bits::count(self.row_bits(i)), d: self.d });
            }
        }
        if let Some((c, &sum)) = col.iter().enumerate().find(|(_, &c)| c != self.d) {
            return Err(GraphError::ColumnSum { col: c, sum, d: self.d });
        }
        for (j, ins) in self.in_adj.iter().enumerate() {
            for &i in ins {
                if !self.has_edge(i as usize, j) {
                    return Err(GraphError::ColumnSum { col: j, sum: ins.len(), d: self.d });
                }
            }
        }
        Ok(())
    }

    /// Text form: `"n d"` then one sorted out-neighbor list per line.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.n * (self.d * 4 + 1) + 16);
        writeln!(s, "{} {}", self.n, self.d).unwrap();
        for row in &self.out_adj {
            let mut first = true;
            for &j in row {
                if !first {
                    s.push(' ');
                }
                first = false;
                write!(s, "{j}").unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Digraph, GraphError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(GraphError::Parse { line: 1, msg: "empty input".into() })?;
        let parse_err = |line: usize, msg: &str| GraphError::Parse { line: line + 1, msg: msg.to_string() };
        let head: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| parse_err(0, "bad header")))
            .collect::<Result<_, _>>()?;
        if head.len() != 2 {
            return Err(parse_err(0, "header must be \"n d\""));
        }
        let (n, d) = (head[0], head[1]);
        let mut rows = Vec::with_capacity(n);
        for (ln, line) in lines {
            if rows.len() == n {
                if line.trim().is_empty() {
                    continue;
                }
                return Err(parse_err(ln, "trailing content after last row"));
            }
            let row: Vec<usize> = line
                .split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|_| parse_err(ln, "bad vertex index")))
                .collect::<Result<_, _>>()?;
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(parse_err(ln, "neighbor list must be strictly increasing"));
            }
            rows.push(row);
        }
        Digraph::new(n, d, rows)
    }
}
