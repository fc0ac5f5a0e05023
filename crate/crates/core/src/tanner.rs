//! Standard-form Tanner graphs, edge local complementation and orbits.
//!
//! A [`TannerGraph`] keeps the parity-check matrix in standard form: every
//! check `j` owns a pivot bit whose column is the unit vector `e_j`. ELC on an
//! edge `(j, v)` between a check and a non-pivot bit is carried out as a
//! Gaussian pivot: every other check adjacent to `v` absorbs row `j`, and `v`
//! becomes the new pivot bit of `j`. The code is unchanged.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::gf2::{support_of, BinMatrix, StandardFormInfo};
use crate::{Error, Result};

/// Bipartite check/bit graph of a parity-check matrix in standard form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TannerGraph {
    h: BinMatrix,
    pivot_of_check: Vec<usize>,
    /// `check_of_pivot[v] = Some(j)` iff bit `v` is the pivot bit of check `j`.
    check_of_pivot: Vec<Option<usize>>,
    check_nbrs: Vec<Vec<usize>>,
    bit_nbrs: Vec<Vec<usize>>,
}

/// Incidence changes made by one in-place ELC.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ElcRecord {
    pub check: usize,
    pub new_pivot: usize,
    pub old_pivot: usize,
    /// Checks whose rows absorbed the pivot row.
    pub touched_checks: Vec<usize>,
    /// `(check, bit)` incidences that did not exist before the operation.
    pub created: Vec<(usize, usize)>,
    /// `(check, bit)` incidences removed by the operation.
    pub removed: Vec<(usize, usize)>,
}

impl TannerGraph {
    /// Wraps a matrix that already has a unit column per row.
    pub fn from_standard(h: BinMatrix) -> Result<Self> {
        let info = h.detect_standard_form().ok_or(Error::NotStandardForm)?;
        Ok(Self::with_info(h, &info))
    }

    /// Wraps any full-rank matrix as-is, without pivot bookkeeping. Such a
    /// graph supports message passing but no ELC.
    pub fn unpivoted(h: &BinMatrix) -> Self {
        let check_nbrs = (0..h.n_rows()).map(|j| h.row_support(j)).collect();
        let bit_nbrs = (0..h.n_cols()).map(|v| h.col_support(v)).collect();
        TannerGraph {
            pivot_of_check: Vec::new(),
            check_of_pivot: vec![None; h.n_cols()],
            check_nbrs,
            bit_nbrs,
            h: h.clone(),
        }
    }

    /// False for graphs built with [`TannerGraph::unpivoted`].
    pub fn has_pivots(&self) -> bool {
        self.pivot_of_check.len() == self.n_checks()
    }

    /// Row-reduces `h` to standard form first if needed.
    pub fn from_matrix(h: &BinMatrix) -> Result<Self> {
        if let Some(info) = h.detect_standard_form() {
            return Ok(Self::with_info(h.clone(), &info));
        }
        let (s, info) = h.standard_form()?;
        Ok(Self::with_info(s, &info))
    }

    fn with_info(h: BinMatrix, info: &StandardFormInfo) -> Self {
        let mut check_of_pivot = vec![None; h.n_cols()];
        for (j, &p) in info.pivot_of_row.iter().enumerate() {
            check_of_pivot[p] = Some(j);
        }
        let check_nbrs = (0..h.n_rows()).map(|j| h.row_support(j)).collect();
        let bit_nbrs = (0..h.n_cols()).map(|v| h.col_support(v)).collect();
        TannerGraph {
            pivot_of_check: info.pivot_of_row.clone(),
            check_of_pivot,
            check_nbrs,
            bit_nbrs,
            h,
        }
    }

    #[inline]
    pub fn n_bits(&self) -> usize {
        self.h.n_cols()
    }

    #[inline]
    pub fn n_checks(&self) -> usize {
        self.h.n_rows()
    }

    pub fn matrix(&self) -> &BinMatrix {
        &self.h
    }

    pub fn to_matrix(&self) -> BinMatrix {
        self.h.clone()
    }

    pub fn pivot_of(&self, check: usize) -> usize {
        self.pivot_of_check[check]
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivot_of_check
    }

    pub fn is_pivot(&self, bit: usize) -> bool {
        self.check_of_pivot[bit].is_some()
    }

    #[inline]
    pub fn has_edge(&self, check: usize, bit: usize) -> bool {
        self.h.get(check, bit)
    }

    #[inline]
    pub fn check_nbrs(&self, check: usize) -> &[usize] {
        &self.check_nbrs[check]
    }

    #[inline]
    pub fn bit_nbrs(&self, bit: usize) -> &[usize] {
        &self.bit_nbrs[bit]
    }

    /// Number of incidences (the weight of `H`).
    pub fn n_edges(&self) -> usize {
        self.check_nbrs.iter().map(Vec::len).sum()
    }

    /// Edges eligible for ELC: every incidence except a check and its pivot bit.
    pub fn eligible_edge_count(&self) -> usize {
        if !self.has_pivots() {
            return 0;
        }
        self.n_edges() - self.n_checks()
    }

    /// The `idx`-th eligible edge in check-major, bit-ascending order.
    pub fn nth_eligible_edge(&self, mut idx: usize) -> Option<(usize, usize)> {
        if !self.has_pivots() {
            return None;
        }
        for (j, nbrs) in self.check_nbrs.iter().enumerate() {
            let cnt = nbrs.len() - 1;
            if idx < cnt {
                let p = self.pivot_of_check[j];
                return nbrs.iter().copied().filter(|&v| v != p).nth(idx).map(|v| (j, v));
            }
            idx -= cnt;
        }
        None
    }

    pub fn eligible_edges(&self) -> Vec<(usize, usize)> {
        if !self.has_pivots() {
            return Vec::new();
        }
        let mut out = Vec::with_capacity(self.eligible_edge_count());
        for (j, nbrs) in self.check_nbrs.iter().enumerate() {
            let p = self.pivot_of_check[j];
            out.extend(nbrs.iter().copied().filter(|&v| v != p).map(|v| (j, v)));
        }
        out
    }

    fn check_edge(&self, check: usize, bit: usize) -> Result<()> {
        if !self.has_pivots() {
            return Err(Error::NotStandardForm);
        }
        if check >= self.n_checks() || bit >= self.n_bits() || !self.h.get(check, bit) {
            return Err(Error::NoSuchEdge { check, bit });
        }
        if self.pivot_of_check[check] == bit {
            return Err(Error::PivotBit { check, bit });
        }
        Ok(())
    }

    /// ELC on `(check, bit)`, returning the new graph.
    pub fn elc(&self, check: usize, bit: usize) -> Result<TannerGraph> {
        let mut g = self.clone();
        g.elc_in_place(check, bit)?;
        Ok(g)
    }

    /// ELC on `(check, bit)` in place. Undo with
    /// `elc_in_place(rec.check, rec.old_pivot)`.
    pub fn elc_in_place(&mut self, check: usize, bit: usize) -> Result<ElcRecord> {
        self.check_edge(check, bit)?;
        let old_pivot = self.pivot_of_check[check];
        let pivot_row = self.check_nbrs[check].clone();
        let touched: Vec<usize> = self.bit_nbrs[bit]
            .iter()
            .copied()
            .filter(|&c| c != check)
            .collect();
        let mut created = Vec::new();
        let mut removed = Vec::new();
        for &c in &touched {
            for &b in &pivot_row {
                if self.h.get(c, b) {
                    removed.push((c, b));
                } else {
                    created.push((c, b));
                }
            }
            self.h.add_row(c, check);
            self.check_nbrs[c] = support_of(self.h.row(c));
        }
        for &b in &pivot_row {
            self.bit_nbrs[b] = self.h.col_support(b);
        }
        self.pivot_of_check[check] = bit;
        self.check_of_pivot[old_pivot] = None;
        self.check_of_pivot[bit] = Some(check);
        debug_assert!(self.is_consistent());
        Ok(ElcRecord {
            check,
            new_pivot: bit,
            old_pivot,
            touched_checks: touched,
            created,
            removed,
        })
    }

    /// Checks the pairing and adjacency invariants.
    pub fn is_consistent(&self) -> bool {
        let pairing_ok = self.pivot_of_check.iter().enumerate().all(|(j, &p)| {
            self.check_of_pivot[p] == Some(j) && self.bit_nbrs[p].as_slice() == [j]
        });
        let lists_ok = (0..self.n_checks()).all(|j| self.check_nbrs[j] == self.h.row_support(j))
            && (0..self.n_bits()).all(|v| self.bit_nbrs[v] == self.h.col_support(v));
        let pivots = self.check_of_pivot.iter().filter(|c| c.is_some()).count();
        pairing_ok && lists_ok && pivots == self.n_checks()
    }

    /// Canonical labeling of the incidence structure.
    pub fn canonical_form(&self) -> StructureId {
        canonical_form(&self.h)
    }

    /// Writes the graph as one line: pivots then hex rows.
    fn to_line(&self) -> String {
        let pivots: Vec<String> = self.pivot_of_check.iter().map(|p| p.to_string()).collect();
        format!("{} {}", pivots.join(","), self.h.to_hex_rows().join(","))
    }

    fn from_line(line: &str, rows: usize, cols: usize) -> Result<TannerGraph> {
        let bad = || Error::Parse {
            line: 0,
            msg: "corrupt frontier record".into(),
        };
        let (piv, hex) = line.trim_end().split_once(' ').ok_or_else(bad)?;
        let pivots: Vec<usize> = piv
            .split(',')
            .map(|s| s.parse().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let hex: Vec<String> = hex.split(',').map(str::to_string).collect();
        let h = BinMatrix::from_hex_rows(&hex, cols)?;
        if h.n_rows() != rows || pivots.len() != rows {
            return Err(bad());
        }
        let info = StandardFormInfo {
            info_cols: Vec::new(),
            pivot_of_row: pivots,
        };
        Ok(TannerGraph::with_info(h, &info))
    }
}

/// Structure identity of a parity-check matrix up to independent row and
/// column permutations.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StructureId {
    /// Dimensions followed by the row-major bits of the canonically relabeled matrix.
    pub canonical: Vec<u8>,
    pub weight: usize,
    pub four_cycles: usize,
}

impl StructureId {
    /// Short hex digest of the canonical string.
    pub fn hash_hex(&self) -> String {
        let d = Sha256::digest(&self.canonical);
        d.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

/// Result of a labeled orbit count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitCount {
    Exact(usize),
    Overflow(usize),
}

/// Number of distinct labeled graphs reachable by ELC, or `Overflow(cap)`
/// once more than `cap` are found. A labeled graph is a standard-form matrix
/// together with its pivot bits; it is determined by the pivot set alone, so
/// codes with repeated columns count one graph per pivot set.
pub fn labeled_orbit_size(tg: &TannerGraph, cap: usize) -> Result<OrbitCount> {
    let key = |g: &TannerGraph| {
        let mut p = g.pivot_of_check.clone();
        p.sort_unstable();
        p
    };
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut frontier = Frontier::new(tg.n_checks(), tg.n_bits(), DEFAULT_SPILL_THRESHOLD);
    seen.insert(key(tg));
    if seen.len() > cap {
        return Ok(OrbitCount::Overflow(cap));
    }
    frontier.push(tg.clone())?;
    while let Some(g) = frontier.pop()? {
        for (j, v) in g.eligible_edges() {
            let next = g.elc(j, v)?;
            if seen.insert(key(&next)) {
                if seen.len() > cap {
                    return Ok(OrbitCount::Overflow(cap));
                }
                frontier.push(next)?;
            }
        }
    }
    Ok(OrbitCount::Exact(seen.len()))
}

/// Number of column subsets of size `rank(H)` whose columns are linearly
/// independent, i.e. the number of information sets of the code.
pub fn count_information_sets(h: &BinMatrix) -> Result<u64> {
    let n = h.n_cols();
    if n > 32 {
        return Err(Error::TooLarge(format!("{n} columns exceed the limit of 32")));
    }
    let e = h.rref();
    let r = e.rank;
    if r > 64 {
        return Err(Error::TooLarge(format!("rank {r} exceeds 64")));
    }
    let cols: Vec<u64> = (0..n)
        .map(|c| {
            (0..r).fold(0u64, |acc, row| acc | ((e.reduced.get(row, c) as u64) << row))
        })
        .collect();
    let mut basis = [0u64; 64];
    Ok(count_bases(&cols, 0, r, &mut basis))
}

/// Counts size-`need` independent subsets of `cols[start..]` extending the
/// XOR basis in `basis` (indexed by leading bit).
fn count_bases(cols: &[u64], start: usize, need: usize, basis: &mut [u64; 64]) -> u64 {
    if need == 0 {
        return 1;
    }
    if cols.len() - start < need {
        return 0;
    }
    let mut total = 0;
    for i in start..=cols.len() - need {
        let mut x = cols[i];
        while x != 0 {
            let lead = 63 - x.leading_zeros() as usize;
            if basis[lead] == 0 {
                break;
            }
            x ^= basis[lead];
        }
        if x == 0 {
            continue;
        }
        let lead = 63 - x.leading_zeros() as usize;
        basis[lead] = x;
        total += count_bases(cols, i + 1, need - 1, basis);
        basis[lead] = 0;
    }
    total
}

/// One structure of an s-orbit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StructureEntry {
    pub id: StructureId,
    /// ELC moves from explored representatives that landed on this structure
    /// (the seed structure starts at 1).
    pub multiplicity: usize,
    #[serde(skip)]
    pub representative: Option<TannerGraph>,
}

/// Structures reached by ELC, in discovery order.
#[derive(Clone, Debug)]
pub struct SOrbit {
    pub structures: Vec<StructureEntry>,
    pub overflowed: bool,
    pub cap: usize,
}

/// JSON row of an orbit report.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct OrbitReportRow {
    pub canonical_hash: String,
    pub weight: usize,
    pub four_cycles: usize,
    pub multiplicity: usize,
}

impl SOrbit {
    pub fn report(&self) -> Vec<OrbitReportRow> {
        self.structures
            .iter()
            .map(|s| OrbitReportRow {
                canonical_hash: s.id.hash_hex(),
                weight: s.id.weight,
                four_cycles: s.id.four_cycles,
                multiplicity: s.multiplicity,
            })
            .collect()
    }

    pub fn weights(&self) -> Vec<usize> {
        self.structures.iter().map(|s| s.id.weight).collect()
    }
}

/// Breadth-first enumeration of the structurally distinct graphs reachable
/// by ELC. Stops with `overflowed = true` once more than `cap` structures
/// are known.
pub fn s_orbit(tg: &TannerGraph, cap: usize) -> Result<SOrbit> {
    let mut index: HashMap<Vec<u8>, usize> = HashMap::new();
    let mut structures = Vec::new();
    let seed = tg.canonical_form();
    index.insert(seed.canonical.clone(), 0);
    structures.push(StructureEntry {
        id: seed,
        multiplicity: 1,
        representative: Some(tg.clone()),
    });
    let mut frontier = Frontier::new(tg.n_checks(), tg.n_bits(), DEFAULT_SPILL_THRESHOLD);
    frontier.push(tg.clone())?;
    let mut overflowed = structures.len() > cap;
    while !overflowed {
        let Some(g) = frontier.pop()? else { break };
        let neighbours: Vec<(TannerGraph, StructureId)> = g
            .eligible_edges()
            .into_par_iter()
            .map(|(j, v)| {
                let next = g.elc(j, v).expect("eligible edge");
                let id = next.canonical_form();
                (next, id)
            })
            .collect();
        for (next, id) in neighbours {
            if let Some(&i) = index.get(&id.canonical) {
                structures[i].multiplicity += 1;
                continue;
            }
            index.insert(id.canonical.clone(), structures.len());
            structures.push(StructureEntry {
                id,
                multiplicity: 1,
                representative: Some(next.clone()),
            });
            if structures.len() > cap {
                overflowed = true;
                break;
            }
            frontier.push(next)?;
        }
    }
    Ok(SOrbit {
        structures,
        overflowed,
        cap,
    })
}

/// Like [`s_orbit`], but reports overflow as an error.
pub fn s_orbit_strict(tg: &TannerGraph, cap: usize) -> Result<SOrbit> {
    let orbit = s_orbit(tg, cap)?;
    if orbit.overflowed {
        return Err(Error::Overflow(cap));
    }
    Ok(orbit)
}

/// Graphs kept in memory before the BFS frontier spills to a temp file.
pub const DEFAULT_SPILL_THRESHOLD: usize = 1 << 16;

/// FIFO of graphs that moves to disk above a size threshold.
struct Frontier {
    mem: VecDeque<TannerGraph>,
    threshold: usize,
    rows: usize,
    cols: usize,
    spill: Option<Spill>,
}

struct Spill {
    writer: BufWriter<File>,
    reader: BufReader<File>,
    pending: usize,
    _file: tempfile::NamedTempFile,
}

impl Frontier {
    fn new(rows: usize, cols: usize, threshold: usize) -> Self {
        Frontier {
            mem: VecDeque::new(),
            threshold: threshold.max(1),
            rows,
            cols,
            spill: None,
        }
    }

    fn push(&mut self, g: TannerGraph) -> Result<()> {
        let spilling = self.spill.as_ref().is_some_and(|s| s.pending > 0);
        if !spilling && self.mem.len() < self.threshold {
            self.mem.push_back(g);
            return Ok(());
        }
        if self.spill.is_none() {
            let file = tempfile::NamedTempFile::new()?;
            let writer = BufWriter::new(file.reopen()?);
            let reader = BufReader::new(file.reopen()?);
            self.spill = Some(Spill {
                writer,
                reader,
                pending: 0,
                _file: file,
            });
        }
        let s = self.spill.as_mut().unwrap();
        writeln!(s.writer, "{}", g.to_line())?;
        s.pending += 1;
        Ok(())
    }

    fn pop(&mut self) -> Result<Option<TannerGraph>> {
        if let Some(g) = self.mem.pop_front() {
            return Ok(Some(g));
        }
        let Some(s) = self.spill.as_mut() else {
            return Ok(None);
        };
        if s.pending == 0 {
            return Ok(None);
        }
        s.writer.flush()?;
        let mut line = String::new();
        s.reader.read_line(&mut line)?;
        s.pending -= 1;
        TannerGraph::from_line(&line, self.rows, self.cols).map(Some)
    }
}

/// Canonical form of the check/bit incidence of `h` under independent row
/// and column permutations.
///
/// Individualization-refinement: colour refinement to an equitable ordered
/// partition, branching on the first smallest non-singleton cell, keeping the
/// lexicographically smallest relabeled matrix over all leaves. Automorphisms
/// found between leaves prune sibling branches in the same orbit.
pub fn canonical_form(h: &BinMatrix) -> StructureId {
    let m = h.n_rows();
    let n = h.n_cols();
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); m + n];
    for r in 0..m {
        for c in h.row_support(r) {
            adj[r].push((m + c) as u32);
            adj[m + c].push(r as u32);
        }
    }
    let init: Vec<u32> = (0..m + n).map(|v| u32::from(v >= m)).collect();
    let mut search = CanonSearch {
        adj: &adj,
        m,
        n,
        best: None,
        automorphisms: Vec::new(),
    };
    let root = refine(&adj, compress(init));
    search.descend(root, &mut Vec::new());
    let (best, _) = search.best.expect("at least one leaf");
    let mut canonical = Vec::with_capacity(8 + best.len() * 8);
    canonical.extend_from_slice(&(m as u32).to_be_bytes());
    canonical.extend_from_slice(&(n as u32).to_be_bytes());
    for w in &best {
        canonical.extend_from_slice(&w.to_be_bytes());
    }
    StructureId {
        canonical,
        weight: h.weight(),
        four_cycles: h.four_cycles(),
    }
}

struct CanonSearch<'a> {
    adj: &'a [Vec<u32>],
    m: usize,
    n: usize,
    /// Best encoding so far and the vertex at each canonical position.
    best: Option<(Vec<u64>, Vec<u32>)>,
    automorphisms: Vec<Vec<u32>>,
}

impl CanonSearch<'_> {
    fn descend(&mut self, colors: Vec<u32>, prefix: &mut Vec<u32>) {
        let v_count = self.m + self.n;
        let n_cells = colors.iter().max().map_or(0, |&c| c as usize + 1);
        if n_cells == v_count {
            self.leaf(&colors);
            return;
        }
        let mut sizes = vec![0usize; n_cells];
        for &c in &colors {
            sizes[c as usize] += 1;
        }
        let target = (0..n_cells)
            .filter(|&c| sizes[c] > 1)
            .min_by_key(|&c| (sizes[c], c))
            .unwrap() as u32;
        let cell: Vec<u32> = (0..v_count as u32)
            .filter(|&v| colors[v as usize] == target)
            .collect();
        let mut explored: Vec<u32> = Vec::new();
        for &v in &cell {
            if !explored.is_empty() && self.equivalent_to_explored(v, &explored, prefix) {
                continue;
            }
            explored.push(v);
            let child = refine(self.adj, individualize(&colors, v));
            prefix.push(v);
            self.descend(child, prefix);
            prefix.pop();
        }
    }

    /// True if some stored automorphism fixing `prefix` pointwise links `v`
    /// to an already explored sibling.
    fn equivalent_to_explored(&self, v: u32, explored: &[u32], prefix: &[u32]) -> bool {
        let gens: Vec<&Vec<u32>> = self
            .automorphisms
            .iter()
            .filter(|g| prefix.iter().all(|&p| g[p as usize] == p))
            .collect();
        if gens.is_empty() {
            return false;
        }
        // Orbit of v under the group generated by `gens`.
        let mut orbit = vec![v];
        let mut seen: HashSet<u32> = HashSet::from([v]);
        let mut i = 0;
        while i < orbit.len() {
            let x = orbit[i];
            for g in &gens {
                let y = g[x as usize];
                if seen.insert(y) {
                    orbit.push(y);
                }
            }
            i += 1;
        }
        explored.iter().any(|e| seen.contains(e))
    }

    fn leaf(&mut self, colors: &[u32]) {
        let m = self.m;
        let n = self.n;
        let mut vertex_at = vec![0u32; m + n];
        for (v, &c) in colors.iter().enumerate() {
            vertex_at[c as usize] = v as u32;
        }
        let stride = n.div_ceil(64);
        let mut enc = vec![0u64; m * stride];
        for r in 0..m {
            let check = vertex_at[r] as usize;
            for &b in &self.adj[check] {
                let pos = colors[b as usize] as usize - m;
                // Most significant bit first so that word order is lexicographic.
                enc[r * stride + pos / 64] |= 1u64 << (63 - pos % 64);
            }
        }
        match &self.best {
            None => self.best = Some((enc, vertex_at)),
            Some((best, best_at)) => match enc.cmp(best) {
                std::cmp::Ordering::Less => self.best = Some((enc, vertex_at)),
                std::cmp::Ordering::Equal => {
                    let mut gamma = vec![0u32; m + n];
                    for (pos, &x) in best_at.iter().enumerate() {
                        gamma[x as usize] = vertex_at[pos];
                    }
                    if gamma.iter().enumerate().any(|(i, &g)| g as usize != i) {
                        self.automorphisms.push(gamma);
                    }
                }
                std::cmp::Ordering::Greater => {}
            },
        }
    }
}

/// Renumbers colours to dense ranks preserving order.
fn compress(colors: Vec<u32>) -> Vec<u32> {
    let mut vals: Vec<u32> = colors.clone();
    vals.sort_unstable();
    vals.dedup();
    colors
        .iter()
        .map(|c| vals.binary_search(c).unwrap() as u32)
        .collect()
}

/// Places `v` in its own cell directly before the rest of its cell.
fn individualize(colors: &[u32], v: u32) -> Vec<u32> {
    let cv = colors[v as usize];
    let raw = colors
        .iter()
        .enumerate()
        .map(|(w, &c)| 2 * c + u32::from(c == cv && w as u32 != v))
        .collect();
    compress(raw)
}

/// Colour refinement to the coarsest equitable refinement of `colors`.
/// New cells are ordered by (old colour, sorted neighbour colours), which
/// depends only on the partition, never on vertex labels.
fn refine(adj: &[Vec<u32>], mut colors: Vec<u32>) -> Vec<u32> {
    let mut n_cells = colors.iter().max().map_or(0, |&c| c + 1);
    loop {
        let sigs: Vec<(u32, Vec<u32>)> = adj
            .iter()
            .enumerate()
            .map(|(v, nbrs)| {
                let mut s: Vec<u32> = nbrs.iter().map(|&w| colors[w as usize]).collect();
                s.sort_unstable();
                (colors[v], s)
            })
            .collect();
        let mut distinct: Vec<&(u32, Vec<u32>)> = sigs.iter().collect();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() as u32 == n_cells {
            return colors;
        }
        n_cells = distinct.len() as u32;
        colors = sigs
            .iter()
            .map(|s| distinct.binary_search(&s).unwrap() as u32)
            .collect();
    }
}
