//! Coordinate permutations, PSL(2,p) generators for extended QR codes and a
//! product-replacement sampler for random automorphisms.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::codes::{is_qr_prime, pow_mod};
use crate::gf2::{pack_bits, BinMatrix};
use crate::{Error, Result};

/// A bijection on `{0, …, n−1}`.
///
/// Applied to a vector, coordinate `i` moves to position `images[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n as u32).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(Error::InvalidConfig(format!(
                    "image list is not a permutation of 0..{n}"
                )));
            }
            seen[x] = true;
        }
        Ok(Permutation {
            images: images.into_iter().map(|x| x as u32).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    #[inline]
    pub fn image(&self, i: usize) -> usize {
        self.images[i] as usize
    }

    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&x| x as usize).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.len(), other.len());
        Permutation {
            images: other.images.iter().map(|&x| self.images[x as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Permutation { images: inv }
    }

    /// Moves `v[i]` to position `self(i)`.
    pub fn apply<T: Copy>(&self, v: &[T]) -> Vec<T> {
        let mut out = v.to_vec();
        self.apply_into(v, &mut out);
        out
    }

    pub fn apply_into<T: Copy>(&self, v: &[T], out: &mut [T]) {
        for (i, &x) in self.images.iter().enumerate() {
            out[x as usize] = v[i];
        }
    }

    /// Smallest `k ≥ 1` with `self^k = id`.
    pub fn order(&self) -> u64 {
        let mut seen = vec![false; self.len()];
        let mut ord = 1u64;
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0u64;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.image(x);
                len += 1;
            }
            ord = lcm(ord, len);
        }
        ord
    }

    /// True iff every row of `gen`, permuted, satisfies the checks of `h`.
    pub fn preserves_code(&self, gen: &BinMatrix, h: &BinMatrix) -> bool {
        (0..gen.n_rows()).all(|r| {
            let moved = self.apply(&gen.row_bits(r));
            h.annihilates(&pack_bits(&moved))
        })
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Source of a generator set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorSource {
    Psl2 { p: u64 },
    File { path: String },
    Other,
}

/// Generators of a subgroup of the automorphism group of a code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSet {
    pub n: usize,
    pub gens: Vec<Permutation>,
    pub source: GeneratorSource,
}

/// On-disk form: `{n, gens: [[images...], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneratorFile {
    pub n: usize,
    pub gens: Vec<Vec<usize>>,
}

impl GeneratorSet {
    pub fn new(n: usize, gens: Vec<Permutation>, source: GeneratorSource) -> Result<Self> {
        if let Some(g) = gens.iter().find(|g| g.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "generator on {} points, expected {n}",
                g.len()
            )));
        }
        Ok(GeneratorSet { n, gens, source })
    }

    /// Fails unless every generator maps the code into itself.
    pub fn verify(&self, gen: &BinMatrix, h: &BinMatrix) -> Result<()> {
        if gen.n_cols() != self.n || h.n_cols() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "generators act on {} points, code has length {}",
                self.n,
                h.n_cols()
            )));
        }
        for (i, g) in self.gens.iter().enumerate() {
            if !g.preserves_code(gen, h) {
                return Err(Error::NotAutomorphism(format!("generator {i}")));
            }
        }
        Ok(())
    }

    pub fn to_file(&self) -> GeneratorFile {
        GeneratorFile {
            n: self.n,
            gens: self.gens.iter().map(Permutation::images).collect(),
        }
    }

    pub fn from_file_data(f: GeneratorFile, source: GeneratorSource) -> Result<Self> {
        let gens = f
            .gens
            .into_iter()
            .map(Permutation::from_images)
            .collect::<Result<Vec<_>>>()?;
        GeneratorSet::new(f.n, gens, source)
    }

    /// Loads generators from JSON and checks them against the code.
    pub fn load(path: impl AsRef<Path>, gen: &BinMatrix, h: &BinMatrix) -> Result<Self> {
        let path = path.as_ref();
        let f: GeneratorFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        let set = Self::from_file_data(
            f,
            GeneratorSource::File {
                path: path.display().to_string(),
            },
        )?;
        set.verify(gen, h)?;
        Ok(set)
    }
}

/// Smallest primitive root mod prime `p`.
pub fn primitive_root(p: u64) -> u64 {
    let phi = p - 1;
    let mut factors = Vec::new();
    let mut n = phi;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            factors.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        factors.push(n);
    }
    (2..p)
        .find(|&g| factors.iter().all(|&q| pow_mod(g, phi / q, p) != 1))
        .expect("prime modulus has a primitive root")
}

/// Generators of PSL(2,p) acting on the `p + 1` coordinates of an extended QR
/// code: positions `0..p` are the residues mod `p`, position `p` is ∞.
///
/// Returns `S: y ↦ y+1`, `V: y ↦ ρ²y` (ρ the smallest primitive root) and
/// `T: y ↦ −1/y` with `0 ↔ ∞`.
pub fn psl2_generators(p: u64) -> Result<GeneratorSet> {
    if !is_qr_prime(p) {
        return Err(Error::NotQrPrime(p));
    }
    let n = (p + 1) as usize;
    let inf = p as usize;
    let rho2 = pow_mod(primitive_root(p), 2, p);
    let mut s = vec![0usize; n];
    let mut v = vec![0usize; n];
    let mut t = vec![0usize; n];
    for y in 0..p {
        s[y as usize] = ((y + 1) % p) as usize;
        v[y as usize] = (rho2 * y % p) as usize;
        t[y as usize] = if y == 0 {
            inf
        } else {
            let inv = pow_mod(y, p - 2, p);
            ((p - inv) % p) as usize
        };
    }
    s[inf] = inf;
    v[inf] = inf;
    t[inf] = 0;
    GeneratorSet::new(
        n,
        vec![
            Permutation::from_images(s)?,
            Permutation::from_images(v)?,
            Permutation::from_images(t)?,
        ],
        GeneratorSource::Psl2 { p },
    )
}

/// Product-replacement parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerParams {
    pub slots: usize,
    pub burn_in: usize,
    pub steps_per_sample: usize,
}

impl Default for SamplerParams {
    fn default() -> Self {
        SamplerParams {
            slots: 10,
            burn_in: 60,
            steps_per_sample: 20,
        }
    }
}

/// Product-replacement random walk over the group generated by a
/// [`GeneratorSet`]. Every returned element is a product of generators.
#[derive(Clone, Debug)]
pub struct ProductReplacement {
    slots: Vec<Permutation>,
    params: SamplerParams,
    rng: ChaCha8Rng,
}

impl ProductReplacement {
    pub fn new(set: &GeneratorSet, params: SamplerParams, seed: u64) -> Self {
        let n_slots = params.slots.max(2);
        let slots = if set.gens.is_empty() {
            vec![Permutation::identity(set.n); n_slots]
        } else {
            (0..n_slots)
                .map(|i| set.gens[i % set.gens.len()].clone())
                .collect()
        };
        let mut pr = ProductReplacement {
            slots,
            params,
            rng: ChaCha8Rng::seed_from_u64(seed),
        };
        for _ in 0..params.burn_in {
            pr.step();
        }
        pr
    }

    /// The same walk state with an independent random stream.
    pub fn reseeded(&self, seed: u64) -> Self {
        ProductReplacement {
            slots: self.slots.clone(),
            params: self.params,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn step(&mut self) {
        let k = self.slots.len();
        let i = self.rng.random_range(0..k);
        let mut j = self.rng.random_range(0..k - 1);
        if j >= i {
            j += 1;
        }
        let other = if self.rng.random_bool(0.5) {
            self.slots[j].clone()
        } else {
            self.slots[j].inverse()
        };
        self.slots[i] = self.slots[i].compose(&other);
    }

    pub fn sample(&mut self) -> Permutation {
        for _ in 0..self.params.steps_per_sample {
            self.step();
        }
        let idx = self.rng.random_range(0..self.slots.len());
        self.slots[idx].clone()
    }
}
