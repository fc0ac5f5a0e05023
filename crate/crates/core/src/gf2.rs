//! Dense matrices over GF(2) with bit-packed rows.
//!
//! Rows are stored as runs of `u64` words so that row additions, syndrome
//! checks and codeword enumeration are word-level XOR/popcount loops. Bits
//! past `n_cols` in the last word of a row are always zero.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const WORD: usize = 64;

/// Largest dimension accepted by [`BinMatrix::min_distance`].
pub const MAX_DISTANCE_DIM: usize = 26;

#[inline]
fn words_for(cols: usize) -> usize {
    cols.div_ceil(WORD)
}

/// A dense binary matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    words: Vec<u64>,
}

/// Column bookkeeping for a matrix in standard form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StandardFormInfo {
    /// `pivot_of_row[j]` is the column equal to the unit vector `e_j`.
    pub pivot_of_row: Vec<usize>,
    /// The non-pivot columns, ascending.
    pub info_cols: Vec<usize>,
}

/// Reduced row echelon form together with rank and pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub reduced: BinMatrix,
    pub rank: usize,
    pub pivot_cols: Vec<usize>,
}

impl BinMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        BinMatrix {
            rows,
            cols,
            stride,
            words: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows of 0/1 bytes. All rows must have `cols` entries.
    pub fn from_bits(rows: &[Vec<u8>], cols: usize) -> Result<Self> {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for (j, &b) in row.iter().enumerate() {
                match b {
                    0 => {}
                    1 => m.set(i, j, true),
                    _ => {
                        return Err(Error::DimensionMismatch(format!(
                            "entry ({i},{j}) is {b}, expected 0 or 1"
                        )))
                    }
                }
            }
        }
        Ok(m)
    }

    /// Parses rows written as strings of `0`/`1` characters (whitespace ignored).
    pub fn from_strs(rows: &[&str]) -> Result<Self> {
        let parsed: Vec<Vec<u8>> = rows
            .iter()
            .map(|r| {
                r.chars()
                    .filter(|c| !c.is_whitespace())
                    .map(|c| match c {
                        '0' => Ok(0),
                        '1' => Ok(1),
                        other => Err(Error::DimensionMismatch(format!(
                            "unexpected character {other:?} in matrix row"
                        ))),
                    })
                    .collect::<Result<Vec<u8>>>()
            })
            .collect::<Result<_>>()?;
        let cols = parsed.first().map_or(0, Vec::len);
        Self::from_bits(&parsed, cols)
    }

    /// Builds a matrix from explicit row supports.
    pub fn from_supports(rows: usize, cols: usize, supports: &[Vec<usize>]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, s) in supports.iter().enumerate() {
            for &j in s {
                m.set(i, j, true);
            }
        }
        m
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.cols
    }

    /// Number of `u64` words per row.
    #[inline]
    pub fn stride(&self) -> usize {
        self.stride
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        (self.words[r * self.stride + c / WORD] >> (c % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let w = &mut self.words[r * self.stride + c / WORD];
        let mask = 1u64 << (c % WORD);
        if v {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, r: usize, c: usize) {
        self.words[r * self.stride + c / WORD] ^= 1u64 << (c % WORD);
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u64] {
        &self.words[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.words[r * self.stride..(r + 1) * self.stride]
    }

    /// `row[dst] ^= row[src]`.
    #[inline]
    pub fn add_row(&mut self, dst: usize, src: usize) {
        debug_assert_ne!(dst, src);
        let s = self.stride;
        let (d, sr) = if dst < src {
            let (a, b) = self.words.split_at_mut(src * s);
            (&mut a[dst * s..dst * s + s], &b[..s])
        } else {
            let (a, b) = self.words.split_at_mut(dst * s);
            (&mut b[..s], &a[src * s..src * s + s])
        };
        for (x, y) in d.iter_mut().zip(sr) {
            *x ^= *y;
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.words.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Column indices of the ones in row `r`, ascending.
    pub fn row_support(&self, r: usize) -> Vec<usize> {
        support_of(self.row(r))
    }

    pub fn col_weight(&self, c: usize) -> usize {
        (0..self.rows).filter(|&r| self.get(r, c)).count()
    }

    /// Row indices with a one in column `c`, ascending.
    pub fn col_support(&self, c: usize) -> Vec<usize> {
        (0..self.rows).filter(|&r| self.get(r, c)).collect()
    }

    /// Row `r` as a vector of 0/1 bytes.
    pub fn row_bits(&self, r: usize) -> Vec<u8> {
        (0..self.cols).map(|c| self.get(r, c) as u8).collect()
    }

    pub fn to_bits(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|r| self.row_bits(r)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Number of nonzero entries.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of 4-cycles in the Tanner graph, i.e. of 2×2 all-one submatrices.
    ///
    /// Counted over row pairs, which gives the same total as summing
    /// `C(overlap, 2)` over column pairs.
    pub fn four_cycles(&self) -> usize {
        let mut total = 0usize;
        for i in 0..self.rows {
            for j in i + 1..self.rows {
                let ov = overlap(self.row(i), self.row(j));
                total += ov * ov.saturating_sub(1) / 2;
            }
        }
        total
    }

    pub fn transpose(&self) -> BinMatrix {
        let mut t = BinMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in support_of(self.row(r)) {
                t.set(c, r, true);
            }
        }
        t
    }

    /// `self · other` over GF(2).
    pub fn mul(&self, other: &BinMatrix) -> Result<BinMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = BinMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in support_of(self.row(r)) {
                let src = other.row(k);
                for (d, s) in out.row_mut(r).iter_mut().zip(src) {
                    *d ^= *s;
                }
            }
        }
        Ok(out)
    }

    /// `self · otherᵀ` over GF(2); both operands must have the same column count.
    pub fn mul_transpose(&self, other: &BinMatrix) -> Result<BinMatrix> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "cannot form A·Bᵀ with {} and {} columns",
                self.cols, other.cols
            )));
        }
        let mut out = BinMatrix::zeros(self.rows, other.rows);
        for i in 0..self.rows {
            for j in 0..other.rows {
                if overlap(self.row(i), other.row(j)) % 2 == 1 {
                    out.set(i, j, true);
                }
            }
        }
        Ok(out)
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &BinMatrix) -> Result<BinMatrix> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch("hstack row counts differ".into()));
        }
        let mut out = BinMatrix::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in support_of(self.row(r)) {
                out.set(r, c, true);
            }
            for c in support_of(other.row(r)) {
                out.set(r, self.cols + c, true);
            }
        }
        Ok(out)
    }

    /// Keeps the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> BinMatrix {
        let mut out = BinMatrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (k, &c) in cols.iter().enumerate() {
                if self.get(r, c) {
                    out.set(r, k, true);
                }
            }
        }
        out
    }

    /// Keeps the listed rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> BinMatrix {
        let mut out = BinMatrix::zeros(rows.len(), self.cols);
        for (k, &r) in rows.iter().enumerate() {
            out.row_mut(k).copy_from_slice(self.row(r));
        }
        out
    }

    /// Appends a row given as packed words of matching stride.
    pub fn push_row_words(&mut self, words: &[u64]) {
        assert_eq!(words.len(), self.stride);
        self.words.extend_from_slice(words);
        self.rows += 1;
    }

    /// Reduced row echelon form, rank and pivot columns.
    pub fn rref(&self) -> Echelon {
        let mut m = self.clone();
        let mut pivot_cols = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| m.get(i, c)) else {
                continue;
            };
            m.swap_rows(r, p);
            for i in 0..m.rows {
                if i != r && m.get(i, c) {
                    m.add_row(i, r);
                }
            }
            pivot_cols.push(c);
            r += 1;
        }
        Echelon {
            reduced: m,
            rank: r,
            pivot_cols,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Row-reduces to standard form without moving columns.
    ///
    /// Pivots are chosen by a left-to-right column scan, so the output is
    /// the reduced row echelon form and row `j` owns unit column
    /// `pivot_of_row[j]`.
    pub fn standard_form(&self) -> Result<(BinMatrix, StandardFormInfo)> {
        let e = self.rref();
        if e.rank < self.rows {
            return Err(Error::RankDeficient {
                rank: e.rank,
                rows: self.rows,
            });
        }
        let info = StandardFormInfo::from_pivots(e.pivot_cols, self.cols);
        Ok((e.reduced, info))
    }

    /// Returns the standard-form bookkeeping if the matrix already has a unit
    /// column for every row (leftmost such column per row).
    pub fn detect_standard_form(&self) -> Option<StandardFormInfo> {
        let mut pivot_of_row = vec![usize::MAX; self.rows];
        for c in 0..self.cols {
            let supp = self.col_support(c);
            if let [r] = supp[..] {
                if pivot_of_row[r] == usize::MAX {
                    pivot_of_row[r] = c;
                }
            }
        }
        if pivot_of_row.contains(&usize::MAX) {
            return None;
        }
        Some(StandardFormInfo::from_pivots(pivot_of_row, self.cols))
    }

    /// A basis of the null space, as rows: `G` with `G · selfᵀ = 0`.
    ///
    /// Requires full row rank so that `G` has exactly `n − rank` rows.
    pub fn generator_from_h(&self) -> Result<BinMatrix> {
        let e = self.rref();
        if e.rank < self.rows {
            return Err(Error::RankDeficient {
                rank: e.rank,
                rows: self.rows,
            });
        }
        Ok(null_space_from_rref(&e, self.cols))
    }

    /// Null-space basis without the full-rank precondition.
    pub fn null_space(&self) -> BinMatrix {
        null_space_from_rref(&self.rref(), self.cols)
    }

    /// True iff both matrices span the same row space.
    pub fn row_space_equal(&self, other: &BinMatrix) -> bool {
        if self.cols != other.cols {
            return false;
        }
        let a = self.rref();
        let b = other.rref();
        a.rank == b.rank && (0..a.rank).all(|r| a.reduced.row(r) == b.reduced.row(r))
    }

    /// Syndrome test: true iff `word · selfᵀ = 0` for a packed word.
    pub fn annihilates(&self, word: &[u64]) -> bool {
        (0..self.rows).all(|r| overlap(self.row(r), word).is_multiple_of(2))
    }

    /// Minimum Hamming weight over the nonzero vectors of the row space of a
    /// full-rank matrix, by Gray-code enumeration of all `2^k − 1` nonzero
    /// combinations. Returns `None` for a matrix with no rows.
    pub fn min_distance(&self) -> Result<Option<usize>> {
        let k = self.rows;
        if k > MAX_DISTANCE_DIM {
            return Err(Error::TooLarge(format!(
                "dimension {k} exceeds brute-force budget {MAX_DISTANCE_DIM}"
            )));
        }
        if k == 0 {
            return Ok(None);
        }
        let total: u64 = 1 << k;
        let chunks: u64 = if k <= 12 { 1 } else { 256 };
        let chunk_len = total / chunks;
        let best = (0..chunks)
            .into_par_iter()
            .map(|ci| {
                let start = ci * chunk_len;
                let end = start + chunk_len;
                if self.stride == 1 {
                    self.gray_scan_single(start, end)
                } else {
                    self.gray_scan_multi(start, end)
                }
            })
            .min()
            .unwrap_or(usize::MAX);
        Ok(Some(best))
    }

    fn gray_scan_single(&self, start: u64, end: u64) -> usize {
        let rows: Vec<u64> = (0..self.rows).map(|r| self.words[r]).collect();
        let gray = start ^ (start >> 1);
        let mut cw = 0u64;
        for (i, row) in rows.iter().enumerate() {
            if (gray >> i) & 1 == 1 {
                cw ^= row;
            }
        }
        let mut best = if start == 0 {
            usize::MAX
        } else {
            cw.count_ones() as usize
        };
        for idx in start + 1..end {
            cw ^= rows[idx.trailing_zeros() as usize];
            best = best.min(cw.count_ones() as usize);
        }
        best
    }

    fn gray_scan_multi(&self, start: u64, end: u64) -> usize {
        let gray = start ^ (start >> 1);
        let mut cw = vec![0u64; self.stride];
        for r in 0..self.rows {
            if (gray >> r) & 1 == 1 {
                xor_into(&mut cw, self.row(r));
            }
        }
        let wt = |v: &[u64]| v.iter().map(|w| w.count_ones() as usize).sum::<usize>();
        let mut best = if start == 0 { usize::MAX } else { wt(&cw) };
        for idx in start + 1..end {
            xor_into(&mut cw, self.row(idx.trailing_zeros() as usize));
            best = best.min(wt(&cw));
        }
        best
    }

    /// Each row as a lowercase hex string, least significant column first
    /// within each 4-bit digit group: digit `d` covers columns `4d..4d+4`
    /// with column `4d` as the most significant bit of the digit.
    pub fn to_hex_rows(&self) -> Vec<String> {
        (0..self.rows)
            .map(|r| {
                (0..self.cols.div_ceil(4))
                    .map(|d| {
                        let mut v = 0u8;
                        for b in 0..4 {
                            let c = 4 * d + b;
                            if c < self.cols && self.get(r, c) {
                                v |= 8 >> b;
                            }
                        }
                        char::from_digit(v as u32, 16).unwrap()
                    })
                    .collect()
            })
            .collect()
    }

    /// Inverse of [`BinMatrix::to_hex_rows`].
    pub fn from_hex_rows(rows: &[String], cols: usize) -> Result<BinMatrix> {
        let mut m = BinMatrix::zeros(rows.len(), cols);
        for (r, s) in rows.iter().enumerate() {
            if s.len() != cols.div_ceil(4) {
                return Err(Error::DimensionMismatch(format!(
                    "hex row {r} has {} digits, expected {}",
                    s.len(),
                    cols.div_ceil(4)
                )));
            }
            for (d, ch) in s.chars().enumerate() {
                let v = ch.to_digit(16).ok_or_else(|| {
                    Error::DimensionMismatch(format!("bad hex digit {ch:?} in row {r}"))
                })?;
                for b in 0..4 {
                    if v & (8 >> b) != 0 {
                        let c = 4 * d + b;
                        if c >= cols {
                            return Err(Error::DimensionMismatch(format!(
                                "hex row {r} sets column {c} beyond {cols}"
                            )));
                        }
                        m.set(r, c, true);
                    }
                }
            }
        }
        Ok(m)
    }

    /// Rows sorted bytewise, used as an identity key for check-unordered graphs.
    pub fn sorted_rows_key(&self) -> Vec<u8> {
        let mut rows: Vec<&[u64]> = (0..self.rows).map(|r| self.row(r)).collect();
        rows.sort_unstable();
        let mut key = Vec::with_capacity(self.words.len() * 8);
        for r in rows {
            for w in r {
                key.extend_from_slice(&w.to_be_bytes());
            }
        }
        key
    }
}

impl StandardFormInfo {
    fn from_pivots(pivot_of_row: Vec<usize>, cols: usize) -> Self {
        let mut is_pivot = vec![false; cols];
        for &p in &pivot_of_row {
            is_pivot[p] = true;
        }
        let info_cols = (0..cols).filter(|&c| !is_pivot[c]).collect();
        StandardFormInfo {
            pivot_of_row,
            info_cols,
        }
    }
}

fn null_space_from_rref(e: &Echelon, cols: usize) -> BinMatrix {
    let mut is_pivot = vec![false; cols];
    for &p in &e.pivot_cols {
        is_pivot[p] = true;
    }
    let free: Vec<usize> = (0..cols).filter(|&c| !is_pivot[c]).collect();
    let mut g = BinMatrix::zeros(free.len(), cols);
    for (i, &f) in free.iter().enumerate() {
        g.set(i, f, true);
        for (r, &p) in e.pivot_cols.iter().enumerate() {
            if e.reduced.get(r, f) {
                g.set(i, p, true);
            }
        }
    }
    g
}

/// Popcount of the AND of two packed rows.
#[inline]
pub fn overlap(a: &[u64], b: &[u64]) -> usize {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x & y).count_ones() as usize)
        .sum()
}

#[inline]
pub fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= *s;
    }
}

/// Indices of set bits in a packed row, ascending.
pub fn support_of(words: &[u64]) -> Vec<usize> {
    let mut out = Vec::new();
    for (wi, &w) in words.iter().enumerate() {
        let mut x = w;
        while x != 0 {
            let b = x.trailing_zeros() as usize;
            out.push(wi * WORD + b);
            x &= x - 1;
        }
    }
    out
}

/// Packs a 0/1 vector into words.
pub fn pack_bits(bits: &[u8]) -> Vec<u64> {
    let mut out = vec![0u64; words_for(bits.len())];
    for (i, &b) in bits.iter().enumerate() {
        if b & 1 == 1 {
            out[i / WORD] |= 1 << (i % WORD);
        }
    }
    out
}

impl fmt::Debug for BinMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let s: String = (0..self.cols)
                .map(|c| if self.get(r, c) { '1' } else { '0' })
                .collect();
            writeln!(f, "  {s}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> BinMatrix {
        let mut m = BinMatrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if rng.random_bool(0.5) {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    fn random_full_rank(rng: &mut impl Rng, rows: usize, cols: usize) -> BinMatrix {
        loop {
            let m = random_matrix(rng, rows, cols);
            if m.rank() == rows {
                return m;
            }
        }
    }

    #[test]
    fn rref_examples() {
        let id = BinMatrix::identity(3);
        let e = id.rref();
        assert_eq!(e.reduced, id);
        assert_eq!(e.rank, 3);

        let z = BinMatrix::zeros(2, 4);
        let e = z.rref();
        assert_eq!(e.reduced, z);
        assert_eq!(e.rank, 0);
        assert!(e.pivot_cols.is_empty());

        let dup = BinMatrix::from_strs(&["11", "11"]).unwrap();
        let e = dup.rref();
        assert_eq!(e.reduced, BinMatrix::from_strs(&["11", "00"]).unwrap());
        assert_eq!(e.rank, 1);
    }

    #[test]
    fn standard_form_examples() {
        let h = BinMatrix::from_strs(&["1001", "0111"]).unwrap();
        let (s, info) = h.standard_form().unwrap();
        assert_eq!(s, h);
        assert_eq!(info.pivot_of_row, vec![0, 1]);
        assert_eq!(info.info_cols, vec![2, 3]);

        let h = BinMatrix::from_strs(&["110", "011"]).unwrap();
        let (s, info) = h.standard_form().unwrap();
        assert_eq!(s, BinMatrix::from_strs(&["101", "011"]).unwrap());
        assert_eq!(info.pivot_of_row, vec![0, 1]);
        assert_eq!(info.info_cols, vec![2]);

        let bad = BinMatrix::from_strs(&["110", "110"]).unwrap();
        assert!(matches!(
            bad.standard_form(),
            Err(Error::RankDeficient { rank: 1, rows: 2 })
        ));
    }

    #[test]
    fn standard_form_random_full_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let h = random_full_rank(&mut rng, 12, 24);
            let (s, info) = h.standard_form().unwrap();
            assert!(s.row_space_equal(&h));
            assert_eq!(info.pivot_of_row.len(), 12);
            assert_eq!(info.info_cols.len(), 12);
            for (j, &p) in info.pivot_of_row.iter().enumerate() {
                assert_eq!(s.col_support(p), vec![j]);
            }
            let mut all: Vec<usize> = info
                .pivot_of_row
                .iter()
                .chain(&info.info_cols)
                .copied()
                .collect();
            all.sort_unstable();
            assert_eq!(all, (0..24).collect::<Vec<_>>());
        }
    }

    #[test]
    fn generator_examples() {
        let h = BinMatrix::from_strs(&["11"]).unwrap();
        assert_eq!(
            h.generator_from_h().unwrap(),
            BinMatrix::from_strs(&["11"]).unwrap()
        );

        let g = BinMatrix::identity(5).generator_from_h().unwrap();
        assert_eq!((g.n_rows(), g.n_cols()), (0, 5));

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_full_rank(&mut rng, 9, 20);
        let g = h.generator_from_h().unwrap();
        assert_eq!(g.n_rows(), 11);
        assert_eq!(g.rank(), 11);
        assert!(g.mul_transpose(&h).unwrap().is_zero());
    }

    #[test]
    fn row_space_equal_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = random_full_rank(&mut rng, 5, 10);
        let mut swapped = m.clone();
        swapped.swap_rows(0, 3);
        assert!(m.row_space_equal(&swapped));
        let mut added = m.clone();
        added.add_row(0, 1);
        assert!(m.row_space_equal(&added));
        let mut changed = m.clone();
        changed.flip(0, 0);
        // A single flipped bit may or may not leave the span; compare against rank.
        let stacked = {
            let mut s = m.clone();
            s.push_row_words(changed.row(0));
            s
        };
        assert_eq!(m.row_space_equal(&changed), stacked.rank() == 5);
    }

    #[test]
    fn weight_and_cycles_examples() {
        let ones = BinMatrix::from_strs(&["11", "11"]).unwrap();
        assert_eq!(ones.weight(), 4);
        assert_eq!(ones.four_cycles(), 1);
        let id = BinMatrix::identity(7);
        assert_eq!(id.weight(), 7);
        assert_eq!(id.four_cycles(), 0);
    }

    /// Counts 4-cycles by enumerating ordered closed walks r1-c1-r2-c2 with
    /// distinct rows and columns, then divides out the 4 equivalent traversals.
    fn four_cycles_naive(m: &BinMatrix) -> usize {
        let mut count = 0;
        for r1 in 0..m.n_rows() {
            for r2 in 0..m.n_rows() {
                if r1 == r2 {
                    continue;
                }
                for c1 in 0..m.n_cols() {
                    for c2 in 0..m.n_cols() {
                        if c1 != c2
                            && m.get(r1, c1)
                            && m.get(r2, c1)
                            && m.get(r2, c2)
                            && m.get(r1, c2)
                        {
                            count += 1;
                        }
                    }
                }
            }
        }
        count / 4
    }

    #[test]
    fn min_distance_examples() {
        let rep = BinMatrix::from_strs(&["1111111"]).unwrap();
        assert_eq!(rep.min_distance().unwrap(), Some(7));
        // [7,4,3] Hamming generator.
        let ham = BinMatrix::from_strs(&["1000110", "0100101", "0010011", "0001111"]).unwrap();
        assert_eq!(ham.min_distance().unwrap(), Some(3));
        let big = BinMatrix::zeros(27, 40);
        assert!(matches!(big.min_distance(), Err(Error::TooLarge(_))));
    }

    #[test]
    fn min_distance_multiword_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = random_full_rank(&mut rng, 14, 90);
        let mut best = usize::MAX;
        for mask in 1u32..(1 << 14) {
            let mut cw = vec![0u64; g.stride()];
            for r in 0..14 {
                if mask >> r & 1 == 1 {
                    xor_into(&mut cw, g.row(r));
                }
            }
            best = best.min(cw.iter().map(|w| w.count_ones() as usize).sum());
        }
        assert_eq!(g.min_distance().unwrap(), Some(best));
    }

    #[test]
    fn hex_rows_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = random_matrix(&mut rng, 6, 23);
        let hex = m.to_hex_rows();
        assert_eq!(BinMatrix::from_hex_rows(&hex, 23).unwrap(), m);
        let m = BinMatrix::from_strs(&["1000010"]).unwrap();
        assert_eq!(m.to_hex_rows(), vec!["84".to_string()]);
    }

    proptest! {
        #[test]
        fn rref_is_idempotent(seed in any::<u64>(), rows in 1usize..10, cols in 1usize..80) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_matrix(&mut rng, rows, cols);
            let once = m.rref().reduced;
            prop_assert_eq!(once.rref().reduced, once.clone());
            prop_assert!(once.row_space_equal(&m));
        }

        #[test]
        fn four_cycles_matches_walk_enumeration(seed in any::<u64>(), rows in 1usize..=8, cols in 1usize..=16) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_matrix(&mut rng, rows, cols);
            prop_assert_eq!(m.four_cycles(), four_cycles_naive(&m));
        }

        #[test]
        fn transpose_is_involution(seed in any::<u64>(), rows in 0usize..10, cols in 0usize..70) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_matrix(&mut rng, rows, cols);
            prop_assert_eq!(m.transpose().transpose(), m);
        }
    }
}
