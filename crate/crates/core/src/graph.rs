//! Labeled simple graphs with bit-packed adjacency, exact edge and triangle
//! statistics, Turán graphs and single-edge update deltas.

use std::fmt;
use std::io::{BufRead, Write};

use serde::ser::SerializeTuple;
use serde::{Serialize, Serializer};

use crate::error::{domain, Error, Result};
use crate::rational::{q, to_f64, Rational};

const WORD: usize = 64;

/// Edge and triangle homomorphism densities `(e, t)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DensityPoint {
    pub e: Rational,
    pub t: Rational,
}

impl DensityPoint {
    pub fn new(e: Rational, t: Rational) -> Self {
        DensityPoint { e, t }
    }

    /// `(2E/n², 6T/n³)` for a graph on `n` nodes with `E` edges and `T` triangles.
    pub fn from_counts(n: usize, edges: u64, triangles: u64) -> Self {
        let n = n as i128;
        DensityPoint {
            e: q(2 * edges as i128, n * n),
            t: q(6 * triangles as i128, n * n * n),
        }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (to_f64(&self.e), to_f64(&self.t))
    }

    pub fn distance(&self, other: &DensityPoint) -> f64 {
        let (a, b) = self.to_f64();
        let (c, d) = other.to_f64();
        (a - c).hypot(b - d)
    }
}

impl fmt::Display for DensityPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.e, self.t)
    }
}

impl Serialize for DensityPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (e, t) = self.to_f64();
        let mut tup = s.serialize_tuple(2)?;
        tup.serialize_element(&e)?;
        tup.serialize_element(&t)?;
        tup.end()
    }
}

/// Labeled simple graph on `n >= 2` nodes.
///
/// Row `i` of the adjacency matrix occupies `words` consecutive `u64`s; bit
/// `j` of row `i` is set iff `{i, j}` is an edge. The matrix is symmetric with
/// a zero diagonal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edge_count())
            .finish()
    }
}

impl Graph {
    pub fn empty(n: usize) -> Result<Self> {
        if n < 2 {
            return domain(format!("graphs need at least 2 nodes, got {n}"));
        }
        let words = n.div_ceil(WORD);
        Ok(Graph { n, words, bits: vec![0; n * words] })
    }

    pub fn complete(n: usize) -> Result<Self> {
        let mut g = Graph::empty(n)?;
        for i in 0..n {
            for j in (i + 1)..n {
                g.set(i, j, true);
            }
        }
        Ok(g)
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Graph::empty(n)?;
        for (i, j) in edges {
            g.check_pair(i, j)?;
            g.set(i, j, true);
        }
        Ok(g)
    }

    /// Builds a graph on `n <= 64` nodes from one neighbor mask per node.
    /// Masks are symmetrized; bits at or beyond `n` and diagonal bits are rejected.
    pub fn from_rows(n: usize, rows: &[u64]) -> Result<Self> {
        if rows.len() != n || n > WORD {
            return domain("from_rows expects n <= 64 rows");
        }
        let mut g = Graph::empty(n)?;
        for (i, &row) in rows.iter().enumerate() {
            if row >> i & 1 == 1 || (n < WORD && row >> n != 0) {
                return domain(format!("row {i} has a self-loop or an out-of-range bit"));
            }
            for j in 0..n {
                if row >> j & 1 == 1 {
                    g.set(i, j, true);
                }
            }
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    fn set(&mut self, i: usize, j: usize, on: bool) {
        let (wi, bi) = (j / WORD, j % WORD);
        let (wj, bj) = (i / WORD, i % WORD);
        let w = self.words;
        if on {
            self.bits[i * w + wi] |= 1 << bi;
            self.bits[j * w + wj] |= 1 << bj;
        } else {
            self.bits[i * w + wi] &= !(1 << bi);
            self.bits[j * w + wj] &= !(1 << bj);
        }
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        if i == j {
            return domain(format!("node pair must be distinct, got ({i}, {j})"));
        }
        if i >= self.n || j >= self.n {
            return domain(format!("node index out of range for n = {}: ({i}, {j})", self.n));
        }
        Ok(())
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && self.row(i)[j / WORD] >> (j % WORD) & 1 == 1
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.row(i).iter().map(|w| w.count_ones()).sum()
    }

    pub fn edge_count(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum::<u64>() / 2
    }

    /// Number of unordered triangles.
    pub fn triangle_count(&self) -> u64 {
        let mut twice_three_t = 0u64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.has_edge(i, j) {
                    twice_three_t += self.common_unchecked(i, j) as u64;
                }
            }
        }
        twice_three_t / 3
    }

    fn common_unchecked(&self, i: usize, j: usize) -> u32 {
        self.row(i)
            .iter()
            .zip(self.row(j))
            .map(|(a, b)| (a & b).count_ones())
            .sum()
    }

    /// `|N(i) ∩ N(j)|` by word-parallel intersection.
    pub fn common_neighbors(&self, i: usize, j: usize) -> Result<u32> {
        self.check_pair(i, j)?;
        Ok(self.common_unchecked(i, j))
    }

    /// Change in `(E, T)` that toggling `{i, j}` would cause, without mutating.
    pub fn flip_delta(&self, i: usize, j: usize) -> Result<(i8, i64)> {
        self.check_pair(i, j)?;
        let c = self.common_unchecked(i, j) as i64;
        Ok(if self.has_edge(i, j) { (-1, -c) } else { (1, c) })
    }

    /// Toggles `{i, j}` and returns `(ΔE, ΔT)`.
    pub fn flip_edge(&mut self, i: usize, j: usize) -> Result<(i8, i64)> {
        let delta = self.flip_delta(i, j)?;
        self.set(i, j, delta.0 > 0);
        Ok(delta)
    }

    pub fn densities(&self) -> DensityPoint {
        DensityPoint::from_counts(self.n, self.edge_count(), self.triangle_count())
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| ((i + 1)..self.n).filter(move |&j| self.has_edge(i, j)).map(move |j| (i, j)))
    }

    /// Edge-list text: a `n <count>` header, then one `i j` line per edge with
    /// `i < j`, 0-indexed.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n {}", self.n)?;
        for (i, j) in self.edges() {
            writeln!(w, "{i} {j}")?;
        }
        Ok(())
    }

    pub fn read_edge_list<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let n = parse_header(lines.next())?;
        let mut g = Graph::empty(n)?;
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let parse = |s: Option<&str>| -> Result<usize> {
                s.and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::Parse(format!("line {}: expected `i j`", lineno + 2)))
            };
            let (i, j) = (parse(it.next())?, parse(it.next())?);
            if it.next().is_some() {
                return Err(Error::Parse(format!("line {}: trailing tokens", lineno + 2)));
            }
            g.check_pair(i, j)?;
            g.set(i, j, true);
        }
        Ok(g)
    }

    /// Adjacency dump: a `n <count>` header, then one line per node holding the
    /// row words as 16-digit lowercase hex, lowest word first.
    pub fn write_hex<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n {}", self.n)?;
        for i in 0..self.n {
            let line: String = self.row(i).iter().map(|x| format!("{x:016x}")).collect();
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn read_hex<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let n = parse_header(lines.next())?;
        let mut g = Graph::empty(n)?;
        let words = g.words;
        for i in 0..n {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing row {i}")))??;
            let line = line.trim();
            if line.len() != 16 * words {
                return Err(Error::Parse(format!("row {i}: expected {} hex digits", 16 * words)));
            }
            for k in 0..words {
                let word = u64::from_str_radix(&line[16 * k..16 * (k + 1)], 16)
                    .map_err(|e| Error::Parse(format!("row {i}: {e}")))?;
                g.bits[i * words + k] = word;
            }
        }
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        for i in 0..self.n {
            for k in 0..self.words {
                let word = self.bits[i * self.words + k];
                for b in 0..WORD {
                    if word >> b & 1 == 0 {
                        continue;
                    }
                    let j = k * WORD + b;
                    if j >= self.n || j == i || !self.has_edge(j, i) {
                        return Err(Error::Parse(format!("adjacency not symmetric or loop-free at ({i}, {j})")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Heuristic complete-multipartite fit.
    ///
    /// Starts from a greedy proper coloring of the graph (color classes are
    /// independent sets, which are the parts of a complete multipartite graph),
    /// then moves single nodes between classes while that strictly lowers the
    /// number of violating pairs. A pair violates the fit when it is an edge
    /// inside a class or a non-edge across classes.
    pub fn partition_recovery(&self) -> PartitionFit {
        let n = self.n;
        let mut class_of = vec![usize::MAX; n];
        let mut classes = 0usize;
        for v in 0..n {
            let c = (0..classes)
                .find(|&c| (0..v).all(|u| class_of[u] != c || !self.has_edge(u, v)))
                .unwrap_or_else(|| {
                    classes += 1;
                    classes - 1
                });
            class_of[v] = c;
        }

        // cost(v, c) = edges from v into c + non-edges from v to nodes outside c
        let cost = |class_of: &[usize], v: usize, c: usize| -> usize {
            (0..n)
                .filter(|&u| u != v)
                .filter(|&u| (class_of[u] == c) == self.has_edge(u, v))
                .count()
        };
        for _round in 0..(4 * n) {
            let mut moved = false;
            for v in 0..n {
                let current = cost(&class_of, v, class_of[v]);
                // candidate `classes` is a fresh singleton
                let (best_c, best) = (0..=classes)
                    .map(|c| (c, cost(&class_of, v, c)))
                    .min_by_key(|&(c, k)| (k, c))
                    .expect("non-empty");
                if best < current {
                    class_of[v] = best_c;
                    if best_c == classes {
                        classes += 1;
                    }
                    moved = true;
                }
            }
            if !moved {
                break;
            }
        }

        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); classes];
        for (v, &c) in class_of.iter().enumerate() {
            groups[c].push(v);
        }
        groups.retain(|g| !g.is_empty());
        groups.sort_by_key(|g| g[0]);

        let mut label = vec![0usize; n];
        for (c, g) in groups.iter().enumerate() {
            for &v in g {
                label[v] = c;
            }
        }
        let mut misfit_pairs = 0u64;
        for i in 0..n {
            for j in (i + 1)..n {
                if (label[i] == label[j]) == self.has_edge(i, j) {
                    misfit_pairs += 1;
                }
            }
        }
        let pairs = (n * (n - 1) / 2) as f64;
        PartitionFit { misfit: misfit_pairs as f64 / pairs, misfit_pairs, classes: groups }
    }
}

fn parse_header(line: Option<std::io::Result<String>>) -> Result<usize> {
    let line = line.ok_or_else(|| Error::Parse("missing `n <count>` header".into()))??;
    let mut it = line.split_whitespace();
    match (it.next(), it.next().and_then(|s| s.parse::<usize>().ok()), it.next()) {
        (Some("n"), Some(n), None) => Ok(n),
        _ => Err(Error::Parse(format!("bad header `{line}`, expected `n <count>`"))),
    }
}

/// Result of [`Graph::partition_recovery`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartitionFit {
    pub classes: Vec<Vec<usize>>,
    pub misfit_pairs: u64,
    /// Violating pairs divided by `n(n-1)/2`.
    pub misfit: f64,
}

/// Class sizes of `T(n, r)`: `n mod r` classes of size `⌈n/r⌉`, the rest `⌊n/r⌋`.
pub fn turan_class_sizes(n: usize, r: usize) -> Result<Vec<usize>> {
    if r == 0 || r > n {
        return domain(format!("Turán class count must satisfy 1 <= r <= n, got r = {r}, n = {n}"));
    }
    Ok((0..r).map(|c| n / r + usize::from(c < n % r)).collect())
}

/// Complete `r`-partite graph with node `i` in class `i mod r`.
pub fn turan_graph(n: usize, r: usize) -> Result<Graph> {
    turan_class_sizes(n, r)?;
    let mut g = Graph::empty(n)?;
    for i in 0..n {
        for j in (i + 1)..n {
            if i % r != j % r {
                g.set(i, j, true);
            }
        }
    }
    Ok(g)
}

/// Exact `(E, T)` of `T(n, r)` from its class sizes.
pub fn turan_counts(n: usize, r: usize) -> Result<(u64, u64)> {
    Ok(multipartite_counts(&turan_class_sizes(n, r)?))
}

/// Exact `(E, T)` of the complete multipartite graph with the given class sizes.
pub fn multipartite_counts(sizes: &[usize]) -> (u64, u64) {
    let p1: u128 = sizes.iter().map(|&s| s as u128).sum();
    let p2: u128 = sizes.iter().map(|&s| (s as u128).pow(2)).sum();
    let p3: u128 = sizes.iter().map(|&s| (s as u128).pow(3)).sum();
    let edges = (p1 * p1 - p2) / 2;
    // elementary symmetric e3 = (p1^3 - 3 p1 p2 + 2 p3) / 6
    let triangles = (p1.pow(3) + 2 * p3 - 3 * p1 * p2) / 6;
    (edges as u64, triangles as u64)
}

/// `t(T(n, r))` in closed form; equals `turan_graph(n, r).densities()`.
pub fn turan_densities(n: usize, r: usize) -> Result<DensityPoint> {
    let (e, t) = turan_counts(n, r)?;
    Ok(DensityPoint::from_counts(n, e, t))
}
