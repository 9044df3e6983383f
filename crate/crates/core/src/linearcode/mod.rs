//! Linear codes used as deterministic, linear secure sketches for the
//! Hamming metric.
//!
//! For a `k x n` parity-check matrix `S`, the sketch of `w` is `S*w`, its
//! complement is `S_perp*w` for rows `S_perp` completing `S` to a basis, and
//! recovery from a nearby `w'` decodes the error from `S*w' + s`.

mod bch;
mod matrix;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bits::BitString;
use crate::error::{Error, Result};

pub use bch::BchCode;
pub use matrix::{build_complement, BitMatrix};

/// Codes up to this length get an exhaustive coset-leader decoder.
pub const EXHAUSTIVE_MAX_N: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Hamming,
    Bch,
    ExhaustiveRandom,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Hamming => "hamming",
            Family::Bch => "bch",
            Family::ExhaustiveRandom => "exhaustive-random",
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hamming" => Ok(Family::Hamming),
            "bch" => Ok(Family::Bch),
            "exhaustive-random" => Ok(Family::ExhaustiveRandom),
            _ => Err(Error::InvalidInput(format!("unknown code family {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecoderKind {
    Exhaustive,
    Algebraic,
}

#[derive(Clone)]
enum Decoder {
    /// Error pattern (bit `j` of the word = bit `n-1-j` of the integer) per
    /// syndrome value; `u32::MAX` marks a coset with no leader of weight <= t.
    Table(Vec<u32>),
    Bch(Box<BchCode>),
}

/// A linear `[n, n-k, 2t+1]` code packaged as a secure sketch.
#[derive(Clone)]
pub struct LinearSketchSpec {
    n: usize,
    k: usize,
    t: usize,
    s: BitMatrix,
    s_perp: BitMatrix,
    stacked_inv: BitMatrix,
    decoder: Decoder,
    key: String,
}

impl fmt::Debug for LinearSketchSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LinearSketchSpec")
            .field("key", &self.key)
            .field("n", &self.n)
            .field("k", &self.k)
            .field("t", &self.t)
            .field("decoder", &self.decoder_kind())
            .finish()
    }
}

impl PartialEq for LinearSketchSpec {
    fn eq(&self, other: &Self) -> bool {
        self.t == other.t && self.s == other.s && self.s_perp == other.s_perp
    }
}

impl Eq for LinearSketchSpec {}

fn word_to_u32(w: &BitString) -> u32 {
    w.to_u64() as u32
}

/// Every nonempty subset of `0..n` of size at most `t`, as bit masks.
fn low_weight_masks(n: usize, t: usize) -> Vec<u32> {
    let mut out = Vec::new();
    let mut stack: Vec<(u32, usize, usize)> = vec![(0, 0, 0)];
    while let Some((mask, from, weight)) = stack.pop() {
        if weight > 0 {
            out.push(mask);
        }
        if weight == t {
            continue;
        }
        for j in from..n {
            stack.push((mask | 1 << j, j + 1, weight + 1));
        }
    }
    out
}

impl LinearSketchSpec {
    /// Wraps a full-row-rank parity-check matrix. For `n <= 20` an
    /// exhaustive decoder is built, which also proves minimum distance
    /// `>= 2t + 1`; larger codes need an algebraic decoder.
    pub fn from_parity_check(s: BitMatrix, t: usize, key: impl Into<String>) -> Result<Self> {
        let n = s.ncols();
        if n > EXHAUSTIVE_MAX_N {
            return Err(Error::Unsupported(format!("no decoder for a generic code of length {n} > {EXHAUSTIVE_MAX_N}")));
        }
        let table = Self::coset_table(&s, t)?;
        Self::assemble(s, t, key.into(), Decoder::Table(table))
    }

    fn assemble(s: BitMatrix, t: usize, key: String, decoder: Decoder) -> Result<Self> {
        let (n, k) = (s.ncols(), s.nrows());
        if k == 0 || k >= n {
            return Err(Error::Unsupported(format!("sketch length {k} must be in 1..{n}")));
        }
        let s_perp = build_complement(&s)?;
        let stacked_inv = s.stack(&s_perp)?.inverse()?;
        Ok(LinearSketchSpec { n, k, t, s, s_perp, stacked_inv, decoder, key })
    }

    fn coset_table(s: &BitMatrix, t: usize) -> Result<Vec<u32>> {
        let (n, k) = (s.ncols(), s.nrows());
        if s.rank() != k {
            return Err(Error::NotFullRank);
        }
        let mut table = vec![u32::MAX; 1 << k];
        table[0] = 0;
        for mask in low_weight_masks(n, t) {
            let e = BitString::from_u64(mask as u64, n);
            let syn = word_to_u32(&s.mul_vec(&e)?) as usize;
            if table[syn] != u32::MAX {
                return Err(Error::Unsupported(format!("minimum distance is below 2t+1 = {}", 2 * t + 1)));
            }
            table[syn] = mask;
        }
        Ok(table)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Sketch length.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// Family key such as `bch-255-8`; empty for ad-hoc matrices.
    pub fn key(&self) -> &str {
        &self.key
    }

    pub fn sketch_matrix(&self) -> &BitMatrix {
        &self.s
    }

    pub fn complement_matrix(&self) -> &BitMatrix {
        &self.s_perp
    }

    pub fn decoder_kind(&self) -> DecoderKind {
        match self.decoder {
            Decoder::Table(_) => DecoderKind::Exhaustive,
            Decoder::Bch(_) => DecoderKind::Algebraic,
        }
    }

    pub fn ss(&self, w: &BitString) -> Result<BitString> {
        self.s.mul_vec(w)
    }

    pub fn ss_perp(&self, w: &BitString) -> Result<BitString> {
        self.s_perp.mul_vec(w)
    }

    /// The unique `w` with `ss(w) = s` and `ss_perp(w) = c`.
    pub fn reconstruct(&self, s: &BitString, c: &BitString) -> Result<BitString> {
        if s.len() != self.k {
            return Err(Error::LengthMismatch { expected: self.k, actual: s.len() });
        }
        self.stacked_inv.mul_vec(&s.concat(c))
    }

    /// The error pattern of weight `<= t` with the given syndrome.
    pub fn decode_syndrome(&self, syndrome: &BitString) -> Option<BitString> {
        match &self.decoder {
            Decoder::Table(table) => {
                let e = table[word_to_u32(syndrome) as usize];
                (e != u32::MAX).then(|| BitString::from_u64(e as u64, self.n))
            }
            Decoder::Bch(code) => code.decode_remainder(syndrome),
        }
    }

    /// Recovers `w` from `w'` and `s = ss(w)`, or `None` when no error
    /// pattern of weight `<= t` explains the difference.
    pub fn srec(&self, w_prime: &BitString, s: &BitString) -> Result<Option<BitString>> {
        if s.len() != self.k {
            return Err(Error::LengthMismatch { expected: self.k, actual: s.len() });
        }
        let syn = self.ss(w_prime)?.xor(s);
        Ok(self.decode_syndrome(&syn).map(|e| w_prime.xor(&e)))
    }

    /// Minimum distance by enumerating the code (`n - k <= 24`).
    pub fn min_distance(&self) -> Result<usize> {
        let dim = self.n - self.k;
        if dim > 24 {
            return Err(Error::InstanceTooLarge { cost: 1 << dim, limit: 1 << 24 });
        }
        // Codewords are the images of nonzero c under reconstruct(0, c).
        let zero = BitString::zeros(self.k);
        let mut best = usize::MAX;
        for c in 1..1u64 << dim {
            let w = self.reconstruct(&zero, &BitString::from_u64(c, dim))?;
            best = best.min(w.weight());
        }
        Ok(best)
    }
}

/// Builds a code of the given family, length and radius with the smallest
/// sketch length the family allows.
pub fn make_code(family: Family, n: usize, t: usize) -> Result<LinearSketchSpec> {
    let key = format!("{}-{n}-{t}", family.name());
    match family {
        Family::Hamming => {
            if t != 1 || n < 3 {
                return Err(Error::Unsupported(format!("Hamming codes need t = 1 and n >= 3 (got n = {n}, t = {t})")));
            }
            if n > EXHAUSTIVE_MAX_N {
                return Err(Error::Unsupported(format!("Hamming codes are provided up to n = {EXHAUSTIVE_MAX_N}")));
            }
            LinearSketchSpec::from_parity_check(hamming_parity_check(n), t, key)
        }
        Family::Bch => {
            let code = BchCode::new(n, t)?;
            let s = code.sketch_matrix();
            let decoder = if n <= EXHAUSTIVE_MAX_N {
                Decoder::Table(LinearSketchSpec::coset_table(&s, t)?)
            } else {
                Decoder::Bch(Box::new(code))
            };
            LinearSketchSpec::assemble(s, t, key, decoder)
        }
        Family::ExhaustiveRandom => exhaustive_random(n, t, key),
    }
}

/// Like [`make_code`] for BCH but always with the algebraic decoder.
pub fn make_bch_algebraic(n: usize, t: usize) -> Result<LinearSketchSpec> {
    let code = BchCode::new(n, t)?;
    let s = code.sketch_matrix();
    LinearSketchSpec::assemble(s, t, format!("bch-{n}-{t}"), Decoder::Bch(Box::new(code)))
}

/// Parses `family-n-t`, e.g. `hamming-7-1`, `bch-255-8`, `exhaustive-random-12-1`.
pub fn code_from_key(key: &str) -> Result<LinearSketchSpec> {
    let bad = || Error::InvalidInput(format!("code key {key:?} is not family-n-t"));
    let mut parts = key.rsplitn(3, '-');
    let t: usize = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
    let n: usize = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
    let family: Family = parts.next().ok_or_else(bad)?.parse()?;
    make_code(family, n, t)
}

/// Column `j` is `j + 1` in binary over `r` rows (shortened when
/// `n < 2^r - 1`). When `n = 2^r` the extended code is built instead: an
/// extra zero column and an all-ones parity row.
fn hamming_parity_check(n: usize) -> BitMatrix {
    let extended = n.is_power_of_two();
    let base = if extended { n - 1 } else { n };
    let r = usize::BITS as usize - base.leading_zeros() as usize;
    let mut rows = r;
    if extended {
        rows += 1;
    }
    let mut m = BitMatrix::zeros(rows, n);
    for j in 0..base {
        for bit in 0..r {
            m.set(bit, j, (j + 1) >> (r - 1 - bit) & 1 == 1);
        }
    }
    if extended {
        for j in 0..n {
            m.set(r, j, true);
        }
    }
    m
}

fn exhaustive_random(n: usize, t: usize, key: String) -> Result<LinearSketchSpec> {
    if n > 16 || n < 2 * t + 1 || t == 0 {
        return Err(Error::Unsupported(format!("exhaustive-random needs 2t+1 <= n <= 16 (got n = {n}, t = {t})")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(((n as u64) << 8) | t as u64);
    for k in 1..n {
        for _ in 0..256 {
            let rows = (0..k).map(|_| BitString::random(n, &mut rng)).collect();
            let s = BitMatrix::from_rows(rows, n)?;
            if s.rank() != k {
                continue;
            }
            if let Ok(spec) = LinearSketchSpec::from_parity_check(s, t, key.clone()) {
                return Ok(spec);
            }
        }
    }
    Err(Error::Unsupported(format!("no [{n}, *, {}] code found", 2 * t + 1)))
}

/// A uniformly random error pattern with exactly `weight` ones.
pub fn random_error<R: Rng + ?Sized>(n: usize, weight: usize, rng: &mut R) -> BitString {
    let mut e = BitString::zeros(n);
    for p in rand::seq::index::sample(rng, n, weight) {
        e.set(p, true);
    }
    e
}
