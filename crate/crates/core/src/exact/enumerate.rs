//! Exhaustive enumeration of labeled graphs on up to eight nodes.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{multipartite_counts, DensityPoint};
use crate::rational::qi;

/// Largest `n` enumerated without an explicit opt-in (2^21 graphs).
pub const DEFAULT_ENUMERATION_CAP: usize = 7;
/// Largest `n` enumerated at all (2^28 graphs).
pub const LONG_ENUMERATION_CAP: usize = 8;

/// Histogram of `(E, T)` over all labeled graphs on `n` nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportTable {
    n: usize,
    counts: BTreeMap<(u64, u64), u64>,
}

impl SupportTable {
    pub fn from_counts(n: usize, counts: BTreeMap<(u64, u64), u64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("support table needs n >= 2, got {n}")));
        }
        let pairs = (n * (n - 1) / 2) as u64;
        let triples = (n * (n - 1) * (n - 2) / 6) as u64;
        for (&(e, t), &c) in &counts {
            if e > pairs || t > triples || c == 0 {
                return Err(Error::Domain(format!("invalid support entry ({e}, {t}): {c}")));
            }
        }
        Ok(SupportTable { n, counts })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `(E, T, count)` rows in lexicographic order.
    pub fn entries(&self) -> impl Iterator<Item = (u64, u64, u64)> + '_ {
        self.counts.iter().map(|(&(e, t), &c)| (e, t, c))
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// `ν_n` at the point with the given counts, 0 off the support.
    pub fn count(&self, edges: u64, triangles: u64) -> u64 {
        self.counts.get(&(edges, triangles)).copied().unwrap_or(0)
    }

    /// `ν_n` at a density point, 0 off the support.
    pub fn count_at(&self, x: &DensityPoint) -> u64 {
        let n = self.n as i128;
        let e2 = x.e * qi(n * n);
        let t6 = x.t * qi(n * n * n);
        if !e2.is_integer() || !t6.is_integer() || e2.numer() % 2 != 0 || t6.numer() % 6 != 0 {
            return 0;
        }
        let (ec, tc) = (e2.numer() / 2, t6.numer() / 6);
        if ec < 0 || tc < 0 {
            return 0;
        }
        self.count(ec as u64, tc as u64)
    }

    pub fn total(&self) -> u128 {
        self.counts.values().map(|&c| c as u128).sum()
    }

    pub fn points(&self) -> Vec<DensityPoint> {
        self.counts
            .keys()
            .map(|&(e, t)| DensityPoint::from_counts(self.n, e, t))
            .collect()
    }

    /// Writes `n,<n>` followed by `E,T,count` rows.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::WriterBuilder::new().flexible(true).from_writer(w);
        let io = |e: csv::Error| Error::Io(e.into());
        wr.write_record(["n", &self.n.to_string()]).map_err(io)?;
        wr.write_record(["E", "T", "count"]).map_err(io)?;
        for (e, t, c) in self.entries() {
            wr.write_record([e.to_string(), t.to_string(), c.to_string()]).map_err(io)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(r);
        let mut records = rd.records();
        let mut next = || -> Result<Option<csv::StringRecord>> {
            records.next().transpose().map_err(|e| Error::Parse(e.to_string()))
        };
        let head = next()?.ok_or_else(|| Error::Parse("empty support table".into()))?;
        if head.len() != 2 || &head[0] != "n" {
            return Err(Error::Parse("support table must start with `n,<nodes>`".into()));
        }
        let n: usize = head[1].parse().map_err(|_| Error::Parse(format!("bad node count `{}`", &head[1])))?;
        let cols = next()?.ok_or_else(|| Error::Parse("missing column header".into()))?;
        if cols.iter().collect::<Vec<_>>() != ["E", "T", "count"] {
            return Err(Error::Parse("expected header `E,T,count`".into()));
        }
        let mut counts = BTreeMap::new();
        while let Some(rec) = next()? {
            if rec.len() != 3 {
                return Err(Error::Parse(format!("expected 3 fields, got {}", rec.len())));
            }
            let p = |s: &str| s.parse::<u64>().map_err(|_| Error::Parse(format!("bad integer `{s}`")));
            if counts.insert((p(&rec[0])?, p(&rec[1])?), p(&rec[2])?).is_some() {
                return Err(Error::Parse("duplicate support point".into()));
            }
        }
        SupportTable::from_counts(n, counts)
    }
}

/// A full enumeration: the support table plus structural tallies used to
/// separate statistic counts from isomorphism-class counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration {
    pub table: SupportTable,
    /// Labeled complete multipartite graphs keyed by class sizes in
    /// nonincreasing order (the empty graph is the single class of size `n`).
    pub multipartite: BTreeMap<Vec<usize>, u64>,
    /// Labeled bipartite graphs, indexed by edge count.
    pub bipartite_by_edges: Vec<u64>,
}

impl Enumeration {
    /// Number of labeled graphs that are complete multipartite with the given
    /// class sizes, in any order.
    pub fn multipartite_count(&self, sizes: &[usize]) -> u64 {
        let mut key = sizes.to_vec();
        key.sort_unstable_by(|a, b| b.cmp(a));
        self.multipartite.get(&key).copied().unwrap_or(0)
    }
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct EnumerationOptions {
    /// Permits `n = 8`, which walks 2^28 graphs.
    pub allow_long: bool,
}

/// `(E, T)` histogram over all `2^{C(n,2)}` labeled graphs.
pub fn enumerate_support(n: usize) -> Result<SupportTable> {
    Ok(enumerate(n, EnumerationOptions::default(), None)?.table)
}

pub type Progress<'a> = &'a (dyn Fn(u64, u64) + Sync);

/// Walks every labeled graph on `n` nodes in Gray-code order, updating edge
/// and triangle counts by single-edge deltas. Disjoint index ranges are walked
/// in parallel and merged deterministically. `progress` receives
/// `(graphs done, total)` after each range.
pub fn enumerate(n: usize, opts: EnumerationOptions, progress: Option<Progress<'_>>) -> Result<Enumeration> {
    let cap = if opts.allow_long { LONG_ENUMERATION_CAP } else { DEFAULT_ENUMERATION_CAP };
    if n < 2 || n > cap {
        return Err(Error::Feasibility { n, cap });
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let m = pairs.len();
    let total = 1u64 << m;
    let chunk_bits = m.min(14);
    let chunks = total >> chunk_bits;
    let max_t = n * (n - 1) * (n - 2) / 6;
    let stride = max_t + 1;

    let parts = multipartite_signatures(n);
    let mut mp_lookup = vec![false; (m + 1) * stride];
    for (e, t, _) in &parts {
        mp_lookup[e * stride + t] = true;
    }

    let done = AtomicU64::new(0);
    let tallies: Vec<Tally> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let tally = walk_chunk(n, &pairs, c << chunk_bits, 1 << chunk_bits, stride, &mp_lookup);
            if let Some(p) = progress {
                let d = done.fetch_add(1 << chunk_bits, Ordering::Relaxed) + (1 << chunk_bits);
                p(d, total);
            }
            tally
        })
        .collect();

    let mut hist = vec![0u64; (m + 1) * stride];
    let mut multipartite: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
    let mut bipartite_by_edges = vec![0u64; m + 1];
    for t in tallies {
        for (h, x) in hist.iter_mut().zip(&t.hist) {
            *h += x;
        }
        for (k, v) in t.multipartite {
            *multipartite.entry(k).or_default() += v;
        }
        for (b, x) in bipartite_by_edges.iter_mut().zip(&t.bipartite) {
            *b += x;
        }
    }
    let counts = hist
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, &c)| (((i / stride) as u64, (i % stride) as u64), c))
        .collect();
    Ok(Enumeration { table: SupportTable::from_counts(n, counts)?, multipartite, bipartite_by_edges })
}

struct Tally {
    hist: Vec<u64>,
    multipartite: BTreeMap<Vec<usize>, u64>,
    bipartite: Vec<u64>,
}

fn walk_chunk(
    n: usize,
    pairs: &[(usize, usize)],
    start: u64,
    len: u64,
    stride: usize,
    mp_lookup: &[bool],
) -> Tally {
    let mut adj = [0u8; 8];
    let gray = start ^ (start >> 1);
    for (b, &(i, j)) in pairs.iter().enumerate() {
        if gray >> b & 1 == 1 {
            adj[i] |= 1 << j;
            adj[j] |= 1 << i;
        }
    }
    let mut edges = gray.count_ones() as usize;
    let mut tri = 0usize;
    for &(i, j) in pairs {
        if adj[i] >> j & 1 == 1 {
            tri += (adj[i] & adj[j]).count_ones() as usize;
        }
    }
    tri /= 3;

    let mut tally = Tally {
        hist: vec![0; (pairs.len() + 1) * stride],
        multipartite: BTreeMap::new(),
        bipartite: vec![0; pairs.len() + 1],
    };
    let full = ((1u16 << n) - 1) as u8;
    for step in 0..len {
        let idx = edges * stride + tri;
        tally.hist[idx] += 1;
        if mp_lookup[idx] {
            if let Some(sizes) = multipartite_classes(&adj[..n], full) {
                *tally.multipartite.entry(sizes).or_default() += 1;
            }
        }
        if tri == 0 && is_bipartite(&adj[..n]) {
            tally.bipartite[edges] += 1;
        }
        if step + 1 == len {
            break;
        }
        let (i, j) = pairs[(start + step + 1).trailing_zeros() as usize];
        let common = (adj[i] & adj[j]).count_ones() as usize;
        if adj[i] >> j & 1 == 1 {
            edges -= 1;
            tri -= common;
        } else {
            edges += 1;
            tri += common;
        }
        adj[i] ^= 1 << j;
        adj[j] ^= 1 << i;
    }
    tally
}

/// Class sizes if non-adjacency is an equivalence relation.
fn multipartite_classes(adj: &[u8], full: u8) -> Option<Vec<usize>> {
    let mut seen = 0u8;
    let mut sizes = Vec::new();
    for u in 0..adj.len() {
        if seen >> u & 1 == 1 {
            continue;
        }
        let class = !adj[u] & full;
        for (w, &row) in adj.iter().enumerate() {
            if class >> w & 1 == 1 && !row & full != class {
                return None;
            }
        }
        seen |= class;
        sizes.push(class.count_ones() as usize);
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    Some(sizes)
}

fn is_bipartite(adj: &[u8]) -> bool {
    let n = adj.len();
    let mut color = [0i8; 8];
    let mut stack = Vec::with_capacity(n);
    for s in 0..n {
        if color[s] != 0 {
            continue;
        }
        color[s] = 1;
        stack.push(s);
        while let Some(u) = stack.pop() {
            let mut nb = adj[u];
            while nb != 0 {
                let w = nb.trailing_zeros() as usize;
                nb &= nb - 1;
                if color[w] == 0 {
                    color[w] = -color[u];
                    stack.push(w);
                } else if color[w] == color[u] {
                    return false;
                }
            }
        }
    }
    true
}

/// `(E, T, sizes)` for every complete multipartite graph on `n` nodes, one
/// entry per integer partition of `n`.
fn multipartite_signatures(n: usize) -> Vec<(usize, usize, Vec<usize>)> {
    fn rec(rem: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        for s in (1..=rem.min(max)).rev() {
            cur.push(s);
            rec(rem - s, s, cur, out);
            cur.pop();
        }
    }
    let mut parts = Vec::new();
    rec(n, n, &mut Vec::new(), &mut parts);
    parts
        .into_iter()
        .map(|p| {
            let (e, t) = multipartite_counts(&p);
            (e as usize, t as usize, p)
        })
        .collect()
}
