//! Code constructions, alist I/O and parity-check matrix weight reduction.

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::gf2::{overlap, BinMatrix};
use crate::tanner::TannerGraph;
use crate::{Error, Result};

/// Where a code's parity-check matrix came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Cyclic quadratic residue code of prime length `p`, optionally extended.
    Constructed { p: u64, extended: bool },
    Loaded { path: String },
    Reduced { from: String, restricted: bool },
    Other,
}

/// A binary linear code described by a full-rank parity-check matrix.
#[derive(Clone, Debug)]
pub struct CodeSpec {
    pub name: String,
    pub n: usize,
    pub k: usize,
    /// Minimum distance, when known.
    pub d: Option<usize>,
    /// True when `d` was computed by exhaustive enumeration.
    pub d_verified: bool,
    pub h: BinMatrix,
    /// Generator matrix, when the construction provides a natural one.
    pub generator: Option<BinMatrix>,
    pub provenance: Provenance,
}

/// JSON export: `{name, n, k, d, H}` with `H` as hex rows.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CodeJson {
    pub name: String,
    pub n: usize,
    pub k: usize,
    pub d: Option<usize>,
    #[serde(rename = "H")]
    pub h: Vec<String>,
}

impl CodeSpec {
    /// Wraps a parity-check matrix, checking full row rank.
    pub fn from_h(name: impl Into<String>, h: BinMatrix, provenance: Provenance) -> Result<Self> {
        let rank = h.rank();
        if rank != h.n_rows() {
            return Err(Error::RankDeficient {
                rank,
                rows: h.n_rows(),
            });
        }
        Ok(CodeSpec {
            name: name.into(),
            n: h.n_cols(),
            k: h.n_cols() - h.n_rows(),
            d: None,
            d_verified: false,
            h,
            generator: None,
            provenance,
        })
    }

    /// A generator matrix: the stored one, or a null-space basis of `H`.
    pub fn generator_matrix(&self) -> BinMatrix {
        match &self.generator {
            Some(g) => g.clone(),
            None => self
                .h
                .generator_from_h()
                .expect("CodeSpec holds a full-rank H"),
        }
    }

    /// Computes and stores the minimum distance by brute force.
    pub fn verify_distance(&mut self) -> Result<usize> {
        let d = self
            .generator_matrix()
            .min_distance()?
            .unwrap_or(0);
        self.d = Some(d);
        self.d_verified = true;
        Ok(d)
    }

    /// Same code, i.e. same row space of `H`.
    pub fn same_code(&self, other: &CodeSpec) -> bool {
        self.h.row_space_equal(&other.h)
    }

    pub fn to_json(&self) -> CodeJson {
        CodeJson {
            name: self.name.clone(),
            n: self.n,
            k: self.k,
            d: self.d,
            h: self.h.to_hex_rows(),
        }
    }

    pub fn from_json(j: &CodeJson) -> Result<Self> {
        let h = BinMatrix::from_hex_rows(&j.h, j.n)?;
        let mut c = CodeSpec::from_h(j.name.clone(), h, Provenance::Other)?;
        if c.k != j.k {
            return Err(Error::DimensionMismatch(format!(
                "JSON declares k={} but H gives k={}",
                j.k, c.k
            )));
        }
        c.d = j.d;
        Ok(c)
    }
}

// ---------------------------------------------------------------------------
// Number theory and GF(2^m).

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// True iff `p` is an odd prime and 2 is a nonzero quadratic residue mod `p`.
pub fn is_qr_prime(p: u64) -> bool {
    p > 2 && is_prime(p) && pow_mod(2, (p - 1) / 2, p) == 1
}

/// Nonzero quadratic residues mod `p`, ascending.
pub fn quadratic_residues(p: u64) -> Vec<u64> {
    let mut q: Vec<u64> = (1..p).map(|x| x * x % p).collect();
    q.sort_unstable();
    q.dedup();
    q
}

/// Multiplicative order of 2 mod odd `p`.
fn order_of_two(p: u64) -> u32 {
    let mut x = 2 % p;
    let mut k = 1;
    while x != 1 {
        x = x * 2 % p;
        k += 1;
    }
    k
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn clmul(a: u64, b: u64) -> u128 {
    let mut r = 0u128;
    let mut x = a;
    while x != 0 {
        let i = x.trailing_zeros();
        r ^= (b as u128) << i;
        x &= x - 1;
    }
    r
}

fn poly_deg(a: u128) -> i32 {
    127 - a.leading_zeros() as i32
}

fn poly_mod(mut a: u128, f: u128) -> u128 {
    let df = poly_deg(f);
    while poly_deg(a) >= df {
        a ^= f << (poly_deg(a) - df);
    }
    a
}

fn poly_gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = poly_mod(a, b);
        a = b;
        b = r;
    }
    a
}

/// Arithmetic in GF(2^m) modulo a fixed irreducible polynomial.
#[derive(Clone, Copy, Debug)]
pub struct Gf2m {
    m: u32,
    modulus: u128,
}

impl Gf2m {
    /// The field with modulus the numerically smallest irreducible
    /// polynomial of degree `m` (1 ≤ m ≤ 63).
    pub fn new(m: u32) -> Self {
        assert!((1..=63).contains(&m));
        let top = 1u128 << m;
        let mut low = 1u128;
        loop {
            let f = top | low;
            if is_irreducible(f, m) {
                return Gf2m { m, modulus: f };
            }
            low += 2;
        }
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn modulus(&self) -> u128 {
        self.modulus
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        poly_mod(clmul(a, b), self.modulus) as u64
    }

    pub fn pow(&self, mut b: u64, mut e: u64) -> u64 {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }
}

/// Rabin's test: `f` of degree `m` is irreducible iff `x^(2^m) = x mod f`
/// and `gcd(x^(2^(m/q)) - x, f) = 1` for each prime `q | m`.
fn is_irreducible(f: u128, m: u32) -> bool {
    if f & 1 == 0 {
        return false;
    }
    let x = 2u128;
    let frob = |k: u32| {
        let mut y = x;
        for _ in 0..k {
            y = poly_mod(clmul(y as u64, y as u64), f);
        }
        y
    };
    if frob(m) != poly_mod(x, f) {
        return false;
    }
    prime_factors(m)
        .into_iter()
        .all(|q| poly_gcd(f, frob(m / q) ^ x) == 1)
}

/// Generator polynomial `g(x) = Π_{r ∈ Q} (x − α^r)` of the quadratic residue
/// code of length `p`, coefficients from degree 0 upward.
pub fn qr_generator_poly(p: u64) -> Result<Vec<u8>> {
    if !is_qr_prime(p) {
        return Err(Error::NotQrPrime(p));
    }
    let m = order_of_two(p);
    if m > 63 {
        return Err(Error::TooLarge(format!("GF(2^{m}) needed for p={p}")));
    }
    let field = Gf2m::new(m);
    let order = (1u128 << m) - 1;
    let cofactor = (order / p as u128) as u64;
    let alpha = (2u64..)
        .map(|beta| field.pow(beta, cofactor))
        .find(|&a| a != 1)
        .expect("a primitive p-th root of unity exists");
    let mut coeffs = vec![1u64];
    for r in quadratic_residues(p) {
        let root = field.pow(alpha, r);
        // Multiply by (x + root).
        let mut next = vec![0u64; coeffs.len() + 1];
        for (i, &c) in coeffs.iter().enumerate() {
            next[i + 1] ^= c;
            next[i] ^= field.mul(c, root);
        }
        coeffs = next;
    }
    coeffs
        .into_iter()
        .map(|c| match c {
            0 => Ok(0),
            1 => Ok(1),
            _ => Err(Error::InvalidConfig(format!(
                "generator coefficient outside GF(2) for p={p}"
            ))),
        })
        .collect()
}

/// Polynomial division over GF(2): returns (quotient, remainder).
pub fn poly_divmod(num: &[u8], den: &[u8]) -> (Vec<u8>, Vec<u8>) {
    let dd = den.iter().rposition(|&c| c == 1).expect("nonzero divisor");
    let mut rem = num.to_vec();
    let mut quot = vec![0u8; num.len().saturating_sub(dd).max(1)];
    for i in (dd..rem.len()).rev() {
        if rem[i] == 1 {
            quot[i - dd] = 1;
            for (j, &c) in den[..=dd].iter().enumerate() {
                rem[i - dd + j] ^= c;
            }
        }
    }
    rem.truncate(dd.max(1));
    (quot, rem)
}

fn cyclic_shifts(poly: &[u8], rows: usize, n: usize) -> BinMatrix {
    let mut m = BinMatrix::zeros(rows, n);
    for r in 0..rows {
        for (i, &c) in poly.iter().enumerate() {
            if c == 1 {
                m.set(r, (r + i) % n, true);
            }
        }
    }
    m
}

/// The cyclic quadratic residue code of prime length `p` and dimension
/// `(p+1)/2`. `H` consists of the shifts of the reciprocal check polynomial.
pub fn qr_code(p: u64) -> Result<CodeSpec> {
    let g = qr_generator_poly(p)?;
    let n = p as usize;
    let k = n - (g.len() - 1);
    let mut xn1 = vec![0u8; n + 1];
    xn1[0] = 1;
    xn1[n] = 1;
    let (h_poly, rem) = poly_divmod(&xn1, &g);
    debug_assert!(rem.iter().all(|&c| c == 0));
    let mut h_rev: Vec<u8> = h_poly[..=k].to_vec();
    h_rev.reverse();
    let h = cyclic_shifts(&h_rev, n - k, n);
    let gen = cyclic_shifts(&g, k, n);
    let mut code = CodeSpec::from_h(
        format!("QR{p}"),
        h,
        Provenance::Constructed { p, extended: false },
    )?;
    code.generator = Some(gen);
    Ok(code)
}

/// Appends an overall parity coordinate.
///
/// The parity-check matrix becomes `[H 0; 1…1 1]`, except when the extended
/// code is self-dual and the construction supplied a generator matrix: then
/// the extended generator rows are used as `H` (for extended QR codes of
/// length `p + 1` with `p ≡ −1 mod 8` this is the sparse cyclic form).
pub fn extend(code: &CodeSpec) -> Result<CodeSpec> {
    let n = code.n + 1;
    let gen = code.generator_matrix();
    let mut g_ext = BinMatrix::zeros(gen.n_rows(), n);
    for r in 0..gen.n_rows() {
        for c in gen.row_support(r) {
            g_ext.set(r, c, true);
        }
        if gen.row_weight(r) % 2 == 1 {
            g_ext.set(r, code.n, true);
        }
    }
    let self_dual = 2 * code.k == n && g_ext.mul_transpose(&g_ext)?.is_zero();
    let h = if self_dual && code.generator.is_some() {
        g_ext.clone()
    } else {
        let mut h = BinMatrix::zeros(code.h.n_rows() + 1, n);
        for r in 0..code.h.n_rows() {
            for c in code.h.row_support(r) {
                h.set(r, c, true);
            }
        }
        for c in 0..n {
            h.set(code.h.n_rows(), c, true);
        }
        h
    };
    let provenance = match code.provenance {
        Provenance::Constructed { p, .. } => Provenance::Constructed { p, extended: true },
        ref other => other.clone(),
    };
    let name = match provenance {
        Provenance::Constructed { p, .. } => format!("EQR{}", p + 1),
        _ => format!("{}-ext", code.name),
    };
    let mut ext = CodeSpec::from_h(name, h, provenance)?;
    ext.generator = Some(g_ext);
    ext.d = code.d.map(|d| if d % 2 == 1 { d + 1 } else { d });
    Ok(ext)
}

/// Extended quadratic residue code of length `p + 1`.
pub fn eqr_code(p: u64) -> Result<CodeSpec> {
    extend(&qr_code(p)?)
}

// ---------------------------------------------------------------------------
// alist I/O.

/// Serialises `h` in MacKay's alist format, padding index lists with zeros.
pub fn to_alist(h: &BinMatrix) -> String {
    let n = h.n_cols();
    let m = h.n_rows();
    let cols: Vec<Vec<usize>> = (0..n).map(|c| h.col_support(c)).collect();
    let rows: Vec<Vec<usize>> = (0..m).map(|r| h.row_support(r)).collect();
    let max_col = cols.iter().map(Vec::len).max().unwrap_or(0);
    let max_row = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = String::new();
    let _ = writeln!(out, "{n} {m}");
    let _ = writeln!(out, "{max_col} {max_row}");
    let degs = |lists: &[Vec<usize>]| {
        lists
            .iter()
            .map(|l| l.len().to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    let _ = writeln!(out, "{}", degs(&cols));
    let _ = writeln!(out, "{}", degs(&rows));
    let line = |l: &[usize], width: usize| {
        let mut v: Vec<String> = l.iter().map(|x| (x + 1).to_string()).collect();
        v.resize(width, "0".to_string());
        v.join(" ")
    };
    for c in &cols {
        let _ = writeln!(out, "{}", line(c, max_col));
    }
    for r in &rows {
        let _ = writeln!(out, "{}", line(r, max_row));
    }
    out
}

/// Parses MacKay's alist format. Zero entries in index lists are padding.
pub fn parse_alist(text: &str) -> Result<BinMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let mut last_line = 0;
    let mut next_nums = |what: &str| -> Result<(usize, Vec<usize>)> {
        let (ln, l) = lines.next().ok_or_else(|| Error::Parse {
            line: last_line + 1,
            msg: format!("unexpected end of file, expected {what}"),
        })?;
        last_line = ln;
        let nums = l
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>().map_err(|_| Error::Parse {
                    line: ln,
                    msg: format!("invalid integer {t:?} in {what}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((ln, nums))
    };
    let expect_len = |ln: usize, v: &[usize], len: usize, what: &str| -> Result<()> {
        if v.len() != len {
            return Err(Error::Parse {
                line: ln,
                msg: format!("expected {len} entries for {what}, found {}", v.len()),
            });
        }
        Ok(())
    };
    let (ln, dims) = next_nums("dimensions")?;
    expect_len(ln, &dims, 2, "dimensions")?;
    let (n, m) = (dims[0], dims[1]);
    let (ln, maxes) = next_nums("maximum degrees")?;
    expect_len(ln, &maxes, 2, "maximum degrees")?;
    let (max_col, max_row) = (maxes[0], maxes[1]);
    let (ln, col_deg) = next_nums("column degrees")?;
    expect_len(ln, &col_deg, n, "column degrees")?;
    let (ln, row_deg) = next_nums("row degrees")?;
    expect_len(ln, &row_deg, m, "row degrees")?;
    if col_deg.iter().any(|&d| d > max_col) || row_deg.iter().any(|&d| d > max_row) {
        return Err(Error::InconsistentDegrees(
            "a degree exceeds the declared maximum".into(),
        ));
    }
    let mut h = BinMatrix::zeros(m, n);
    for (c, &deg) in col_deg.iter().enumerate() {
        let (ln, list) = next_nums("column index list")?;
        let idx: Vec<usize> = list.into_iter().filter(|&x| x != 0).collect();
        if idx.len() != deg {
            return Err(Error::InconsistentDegrees(format!(
                "line {ln}: column {} lists {} rows, degree is {deg}",
                c + 1,
                idx.len()
            )));
        }
        for r in idx {
            if r > m {
                return Err(Error::InconsistentDegrees(format!(
                    "line {ln}: column {} names row {r} of {m}",
                    c + 1
                )));
            }
            h.set(r - 1, c, true);
        }
    }
    for (r, &deg) in row_deg.iter().enumerate() {
        let (ln, list) = next_nums("row index list")?;
        let idx: Vec<usize> = list.into_iter().filter(|&x| x != 0).collect();
        if idx.len() != deg {
            return Err(Error::InconsistentDegrees(format!(
                "line {ln}: row {} lists {} columns, degree is {deg}",
                r + 1,
                idx.len()
            )));
        }
        let mut sorted = idx.clone();
        sorted.sort_unstable();
        let expected: Vec<usize> = h.row_support(r).iter().map(|c| c + 1).collect();
        if sorted != expected {
            return Err(Error::InconsistentDegrees(format!(
                "line {ln}: row {} disagrees with the column lists",
                r + 1
            )));
        }
    }
    Ok(h)
}

pub fn load_alist(path: impl AsRef<Path>) -> Result<CodeSpec> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let h = parse_alist(&text)?;
    let name = path
        .file_stem()
        .map_or_else(|| "code".to_string(), |s| s.to_string_lossy().into_owned());
    CodeSpec::from_h(
        name,
        h,
        Provenance::Loaded {
            path: path.display().to_string(),
        },
    )
}

pub fn save_alist(code: &CodeSpec, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_alist(&code.h))?;
    Ok(())
}

/// Resolves a code reference: `qr:<p>`, `eqr:<p>` or a path to an alist file.
pub fn resolve_code(reference: &str) -> Result<CodeSpec> {
    let parse_p = |s: &str| {
        s.parse::<u64>().map_err(|_| Error::InvalidConfig(format!("bad prime in {reference:?}")))
    };
    if let Some(p) = reference.strip_prefix("eqr:") {
        eqr_code(parse_p(p)?)
    } else if let Some(p) = reference.strip_prefix("qr:") {
        qr_code(parse_p(p)?)
    } else {
        load_alist(reference)
    }
}

// ---------------------------------------------------------------------------
// Weight reduction.

/// Outcome of [`reduce_weight`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub initial_weight: usize,
    pub initial_cycles: usize,
    pub final_weight: usize,
    pub final_cycles: usize,
    /// Accepted improving moves.
    pub moves: u64,
    /// Candidate moves evaluated (the budget unit).
    pub candidates: u64,
    pub restarts: u64,
    pub restricted_to_standard_form: bool,
}

const PLATEAU_PROB: f64 = 0.2;

/// Lexicographic objective: weight first, then 4-cycles.
type Score = (usize, usize);

#[inline]
fn c2(x: usize) -> usize {
    x * x.saturating_sub(1) / 2
}

/// 4-cycles through row `i` if its content were `row`.
fn row_cycles(h: &BinMatrix, i: usize, row: &[u64]) -> usize {
    (0..h.n_rows())
        .filter(|&l| l != i)
        .map(|l| c2(overlap(row, h.row(l))))
        .sum()
}

/// Reduces the weight (then the 4-cycle count) of a parity-check matrix
/// without changing the code.
///
/// Unrestricted mode runs greedy descent over row additions `row_i += row_j`
/// with random restarts (random row additions applied to the best matrix).
/// Equal-weight moves are occasionally taken to cross plateaus.
/// Restricted mode keeps the matrix in standard form and searches over ELC
/// moves instead, starting from the standard form of `H`. `budget` bounds
/// the number of candidate moves evaluated.
pub fn reduce_weight<R: Rng>(
    code: &CodeSpec,
    restrict_standard_form: bool,
    budget: u64,
    rng: &mut R,
) -> Result<(CodeSpec, ReductionReport)> {
    let rank = code.h.rank();
    if rank != code.h.n_rows() {
        return Err(Error::RankDeficient {
            rank,
            rows: code.h.n_rows(),
        });
    }
    let (h, report) = if restrict_standard_form {
        reduce_elc(&code.h, budget, rng)?
    } else {
        reduce_rows(&code.h, budget, rng)
    };
    debug_assert!(h.row_space_equal(&code.h));
    let mut out = CodeSpec::from_h(
        format!("{}-reduced{}", code.name, if restrict_standard_form { "-ip" } else { "" }),
        h,
        Provenance::Reduced {
            from: code.name.clone(),
            restricted: restrict_standard_form,
        },
    )?;
    out.d = code.d;
    out.d_verified = code.d_verified;
    out.generator = code.generator.clone();
    Ok((out, report))
}

fn reduce_rows<R: Rng>(h0: &BinMatrix, budget: u64, rng: &mut R) -> (BinMatrix, ReductionReport) {
    let m = h0.n_rows();
    let initial: Score = (h0.weight(), h0.four_cycles());
    let mut report = ReductionReport {
        initial_weight: initial.0,
        initial_cycles: initial.1,
        final_weight: initial.0,
        final_cycles: initial.1,
        moves: 0,
        candidates: 0,
        restarts: 0,
        restricted_to_standard_form: false,
    };
    let mut best = h0.clone();
    let mut best_score = initial;
    if m < 2 {
        return (best, report);
    }
    let mut pairs: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let mut cur = h0.clone();
    let mut score = initial;
    let mut scratch = vec![0u64; h0.stride()];
    loop {
        // Greedy descent to a local minimum.
        loop {
            pairs.shuffle(rng);
            let mut improved = false;
            for &(i, j) in &pairs {
                if report.candidates >= budget {
                    break;
                }
                report.candidates += 1;
                for ((s, a), b) in scratch.iter_mut().zip(cur.row(i)).zip(cur.row(j)) {
                    *s = a ^ b;
                }
                let old_w = cur.row_weight(i);
                let new_w: usize = scratch.iter().map(|w| w.count_ones() as usize).sum();
                if new_w > old_w {
                    continue;
                }
                let old_c = row_cycles(&cur, i, cur.row(i));
                let new_c = row_cycles(&cur, i, &scratch);
                let better = new_w < old_w || new_c < old_c;
                if better || rng.random_bool(PLATEAU_PROB) {
                    cur.add_row(i, j);
                    score = (score.0 + new_w - old_w, score.1 + new_c - old_c);
                    if score < best_score {
                        best.clone_from(&cur);
                        best_score = score;
                    }
                    report.moves += 1;
                    improved |= better;
                }
            }
            if !improved || report.candidates >= budget {
                break;
            }
        }
        if score < best_score {
            best = cur.clone();
            best_score = score;
        }
        if report.candidates >= budget {
            break;
        }
        // Restart: perturb the best matrix by a few random row additions.
        report.restarts += 1;
        cur = best.clone();
        let kicks = rng.random_range(1..=m.max(2) / 2);
        for _ in 0..kicks {
            let i = rng.random_range(0..m);
            let mut j = rng.random_range(0..m - 1);
            if j >= i {
                j += 1;
            }
            cur.add_row(i, j);
        }
        score = (cur.weight(), cur.four_cycles());
    }
    report.final_weight = best_score.0;
    report.final_cycles = best_score.1;
    (best, report)
}

fn reduce_elc<R: Rng>(
    h0: &BinMatrix,
    budget: u64,
    rng: &mut R,
) -> Result<(BinMatrix, ReductionReport)> {
    let start = TannerGraph::from_matrix(h0)?;
    let sm = start.matrix();
    let initial: Score = (sm.weight(), sm.four_cycles());
    let mut report = ReductionReport {
        initial_weight: initial.0,
        initial_cycles: initial.1,
        final_weight: initial.0,
        final_cycles: initial.1,
        moves: 0,
        candidates: 0,
        restarts: 0,
        restricted_to_standard_form: true,
    };
    let mut best = start.clone();
    let mut best_score = initial;
    let mut cur = start;
    let mut score = initial;
    if cur.eligible_edge_count() == 0 {
        return Ok((best.to_matrix(), report));
    }
    loop {
        loop {
            let mut edges = cur.eligible_edges();
            edges.shuffle(rng);
            let mut improved = false;
            for (j, v) in edges {
                if report.candidates >= budget {
                    break;
                }
                if !cur.has_edge(j, v) || cur.pivot_of(j) == v {
                    // Stale after an accepted move.
                    continue;
                }
                report.candidates += 1;
                let rec = cur.elc_in_place(j, v)?;
                let w = cur.n_edges();
                let new_score = if w > score.0 {
                    (w, usize::MAX)
                } else {
                    (w, cur.matrix().four_cycles())
                };
                if new_score < score {
                    score = new_score;
                    report.moves += 1;
                    improved = true;
                } else {
                    cur.elc_in_place(rec.check, rec.old_pivot)?;
                }
            }
            if !improved || report.candidates >= budget {
                break;
            }
        }
        if score < best_score {
            best = cur.clone();
            best_score = score;
        }
        if report.candidates >= budget {
            break;
        }
        report.restarts += 1;
        cur = best.clone();
        let kicks = rng.random_range(1..=cur.n_checks().max(2));
        for _ in 0..kicks {
            let idx = rng.random_range(0..cur.eligible_edge_count());
            let (j, v) = cur.nth_eligible_edge(idx).expect("index in range");
            cur.elc_in_place(j, v)?;
        }
        score = (cur.n_edges(), cur.matrix().four_cycles());
    }
    report.final_weight = best_score.0;
    report.final_cycles = best_score.1;
    Ok((best.to_matrix(), report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn qr_prime_predicate() {
        assert!(is_qr_prime(7));
        assert!(is_qr_prime(17));
        assert!(is_qr_prime(23));
        assert!(is_qr_prime(47));
        assert!(is_qr_prime(103));
        assert!(!is_qr_prime(5));
        assert!(!is_qr_prime(2));
        assert!(!is_qr_prime(21));
        assert!(!is_qr_prime(11));
        assert_eq!(quadratic_residues(5), vec![1, 4]);
    }

    #[test]
    fn field_construction_is_irreducible() {
        for m in [2u32, 3, 4, 8, 11, 23, 51] {
            let f = Gf2m::new(m);
            assert_eq!(poly_deg(f.modulus()), m as i32);
            // The multiplicative group has order 2^m - 1.
            assert_eq!(f.pow(2, (1u64 << m) - 1), 1);
        }
        assert_eq!(Gf2m::new(8).modulus(), 0x11b);
    }

    #[test]
    fn qr_examples() {
        let c = qr_code(23).unwrap();
        assert_eq!((c.n, c.k), (23, 12));
        let c = qr_code(47).unwrap();
        assert_eq!((c.n, c.k), (47, 24));
        assert!(matches!(qr_code(5), Err(Error::NotQrPrime(5))));
    }

    #[test]
    fn golay_generator_divides_xn_minus_one() {
        let g = qr_generator_poly(23).unwrap();
        assert_eq!(g.len() - 1, 11);
        let mut xn1 = vec![0u8; 24];
        xn1[0] = 1;
        xn1[23] = 1;
        let (_, rem) = poly_divmod(&xn1, &g);
        assert!(rem.iter().all(|&c| c == 0));
    }

    #[test]
    fn qr_generator_and_check_are_orthogonal() {
        for p in [7u64, 17, 23, 31, 47] {
            let c = qr_code(p).unwrap();
            let g = c.generator.as_ref().unwrap();
            assert_eq!(g.rank(), c.k);
            assert!(g.mul_transpose(&c.h).unwrap().is_zero(), "p={p}");
        }
    }

    #[test]
    fn small_qr_distances() {
        let mut ham = qr_code(7).unwrap();
        assert_eq!(ham.verify_distance().unwrap(), 3);
        let mut q17 = qr_code(17).unwrap();
        assert_eq!((q17.n, q17.k), (17, 9));
        assert_eq!(q17.verify_distance().unwrap(), 5);
        let mut e17 = extend(&q17).unwrap();
        assert_eq!(e17.verify_distance().unwrap(), 6);
    }

    #[test]
    fn golay_distance_and_extension() {
        let mut golay = qr_code(23).unwrap();
        assert_eq!(golay.verify_distance().unwrap(), 7);
        let mut ext = extend(&golay).unwrap();
        assert_eq!((ext.n, ext.k), (24, 12));
        assert_eq!(ext.d, Some(8));
        assert_eq!(ext.verify_distance().unwrap(), 8);
        let g = ext.generator_matrix();
        for r in 0..g.n_rows() {
            assert_eq!(g.row_weight(r) % 2, 0);
        }
        assert_eq!(ext.h.weight(), 96);
    }

    #[test]
    fn extension_of_non_self_dual_code_uses_parity_row() {
        let ham = qr_code(7).unwrap();
        let ext = extend(&ham).unwrap();
        assert_eq!((ext.n, ext.k), (8, 4));
        let g = ext.generator_matrix();
        assert!(g.mul_transpose(&ext.h).unwrap().is_zero());
        let mut plain = CodeSpec::from_h("h", ham.h.clone(), Provenance::Other).unwrap();
        plain.generator = None;
        let ext2 = extend(&plain).unwrap();
        assert_eq!(ext2.h.n_rows(), 4);
        assert!((0..8).all(|c| ext2.h.get(3, c)));
        assert!(ext2.same_code(&ext));
    }

    #[test]
    fn alist_round_trip_and_errors() {
        let golay = eqr_code(23).unwrap();
        let text = to_alist(&golay.h);
        assert_eq!(parse_alist(&text).unwrap(), golay.h);

        let truncated: String = text.lines().take(10).collect::<Vec<_>>().join("\n");
        assert!(matches!(parse_alist(&truncated), Err(Error::Parse { .. })));

        let bad = "3 2\n2 2\n1 1 1\n1 2\n1\n3\n2\n1 0\n2 3\n";
        assert!(matches!(
            parse_alist(bad),
            Err(Error::InconsistentDegrees(_))
        ));
        let garbage = "3 x\n";
        assert!(matches!(
            parse_alist(garbage),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn alist_known_text() {
        let h = BinMatrix::from_strs(&["110", "011"]).unwrap();
        assert_eq!(
            to_alist(&h),
            "3 2\n2 2\n1 2 1\n2 2\n1 0\n1 2\n2 0\n1 2\n2 3\n"
        );
    }

    #[test]
    fn json_round_trip() {
        let mut c = eqr_code(23).unwrap();
        c.d = Some(8);
        let j = serde_json::to_string(&c.to_json()).unwrap();
        assert!(j.contains("\"H\""));
        let back = CodeSpec::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
        assert_eq!(back.h, c.h);
        assert_eq!(back.d, Some(8));
    }

    #[test]
    fn reduction_keeps_code_and_never_increases_weight() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let golay = eqr_code(23).unwrap();
        for restricted in [false, true] {
            let (out, rep) = reduce_weight(&golay, restricted, 20_000, &mut rng).unwrap();
            assert!(out.same_code(&golay));
            assert!(rep.final_weight <= rep.initial_weight);
            assert_eq!(out.h.weight(), rep.final_weight);
            assert_eq!(out.h.four_cycles(), rep.final_cycles);
            assert_eq!(rep.final_weight, 96);
            if restricted {
                assert!(out.h.detect_standard_form().is_some());
            }
        }
    }

    #[test]
    fn reduction_of_optimal_matrix_is_identity() {
        let h = BinMatrix::identity(4).hstack(&BinMatrix::zeros(4, 2)).unwrap();
        let code = CodeSpec::from_h("id", h.clone(), Provenance::Other).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (out, rep) = reduce_weight(&code, false, 1000, &mut rng).unwrap();
        assert_eq!(out.h, h);
        assert_eq!((rep.final_weight, rep.final_cycles), (rep.initial_weight, rep.initial_cycles));
        let (out, _) = reduce_weight(&code, true, 1000, &mut rng).unwrap();
        assert_eq!(out.h, h);
    }

    #[test]
    fn reduction_zero_budget_is_unchanged() {
        let golay = eqr_code(23).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (out, rep) = reduce_weight(&golay, false, 0, &mut rng).unwrap();
        assert_eq!(out.h, golay.h);
        assert_eq!(rep.candidates, 0);
    }

    #[test]
    fn reduction_rejects_rank_deficient_input() {
        let h = BinMatrix::from_strs(&["110", "110"]).unwrap();
        let code = CodeSpec {
            name: "bad".into(),
            n: 3,
            k: 1,
            d: None,
            d_verified: false,
            h,
            generator: None,
            provenance: Provenance::Other,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            reduce_weight(&code, false, 10, &mut rng),
            Err(Error::RankDeficient { .. })
        ));
    }
}
