//! Exact small-scale oracles: distributions as rational tables, statistical
//! distance, average conditional min-entropy, the two lemmas they obey, and
//! exhaustive checks of the bounds the constructions rely on.
//!
//! Pass/fail decisions are made on exact rationals; floating point appears
//! only in reported logarithms.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::adversary::{pow2, FlatDistribution, Transcript};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::extractor::ExtractorParams;
use crate::fuzzy::FuzzyExtractor;
use crate::gf2k::FieldSpec;
use crate::linearcode::LinearSketchSpec;
use crate::raw::{FastField, RawExtractor};

/// Default limit on enumerated `(w, i)` pairs.
pub const ENUMERATION_LIMIT: u128 = 1 << 24;

fn check_cost(cost: u128, limit: u128) -> Result<()> {
    if cost > limit {
        return Err(Error::InstanceTooLarge { cost, limit });
    }
    Ok(())
}

fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// `log2(x)` for a positive rational.
pub fn log2_rational(x: &BigRational) -> f64 {
    let (n, d) = (x.numer(), x.denom());
    let shift = n.bits() as i64 - d.bits() as i64;
    let scaled = if shift >= 0 {
        BigRational::new(n.clone(), d.clone() << shift as usize)
    } else {
        BigRational::new(n.clone() << (-shift) as usize, d.clone())
    };
    scaled.to_f64().unwrap_or(f64::NAN).log2() + shift as f64
}

/// Whether `x <= 2^(e/2)`, decided as `x^2 <= 2^e`.
pub fn within_sqrt_pow2(x: &BigRational, e: i64) -> bool {
    !x.is_negative() && x * x <= pow2(e)
}

/// A finite distribution with exact rational probabilities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointDistribution<O: Ord + Clone> {
    table: BTreeMap<O, BigRational>,
}

impl<O: Ord + Clone> JointDistribution<O> {
    /// Merges repeated outcomes; probabilities must be nonnegative and sum
    /// to exactly one.
    pub fn from_probabilities(entries: impl IntoIterator<Item = (O, BigRational)>) -> Result<Self> {
        let mut table: BTreeMap<O, BigRational> = BTreeMap::new();
        for (o, p) in entries {
            if p.is_negative() {
                return Err(Error::InvalidInput("negative probability".into()));
            }
            *table.entry(o).or_insert_with(BigRational::zero) += p;
        }
        table.retain(|_, p| !p.is_zero());
        let total: BigRational = table.values().sum();
        if !total.is_one() {
            return Err(Error::InvalidInput(format!("probabilities sum to {total}, not 1")));
        }
        Ok(JointDistribution { table })
    }

    /// Normalised integer weights.
    pub fn from_counts(entries: impl IntoIterator<Item = (O, u64)>) -> Result<Self> {
        let entries: Vec<(O, u64)> = entries.into_iter().collect();
        let total: u128 = entries.iter().map(|(_, c)| *c as u128).sum();
        if total == 0 {
            return Err(Error::InvalidInput("empty table".into()));
        }
        Self::from_probabilities(entries.into_iter().map(|(o, c)| (o, ratio(c, total))))
    }

    pub fn uniform(outcomes: impl IntoIterator<Item = O>) -> Result<Self> {
        Self::from_counts(outcomes.into_iter().map(|o| (o, 1)))
    }

    pub fn point_mass(o: O) -> Self {
        JointDistribution { table: BTreeMap::from([(o, BigRational::one())]) }
    }

    pub fn prob(&self, o: &O) -> BigRational {
        self.table.get(o).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Outcomes with nonzero probability.
    pub fn support_len(&self) -> usize {
        self.table.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&O, &BigRational)> {
        self.table.iter()
    }

    pub fn max_prob(&self) -> BigRational {
        self.table.values().max().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn min_entropy(&self) -> MinEntropy {
        MinEntropy { guess_probability: self.max_prob() }
    }

    /// Pushforward under `f`.
    pub fn map<P: Ord + Clone>(&self, f: impl Fn(&O) -> P) -> JointDistribution<P> {
        let mut table: BTreeMap<P, BigRational> = BTreeMap::new();
        for (o, p) in &self.table {
            *table.entry(f(o)).or_insert_with(BigRational::zero) += p;
        }
        JointDistribution { table }
    }

    /// Independent product.
    pub fn product<P: Ord + Clone>(&self, other: &JointDistribution<P>) -> JointDistribution<(O, P)> {
        let mut table = BTreeMap::new();
        for (a, pa) in &self.table {
            for (b, pb) in &other.table {
                table.insert((a.clone(), b.clone()), pa * pb);
            }
        }
        JointDistribution { table }
    }
}

impl<A: Ord + Clone, B: Ord + Clone> JointDistribution<(A, B)> {
    pub fn marginal_first(&self) -> JointDistribution<A> {
        self.map(|(a, _)| a.clone())
    }

    pub fn marginal_second(&self) -> JointDistribution<B> {
        self.map(|(_, b)| b.clone())
    }
}

/// Half the L1 distance. Both arguments live on the same outcome type, so
/// outcomes missing from one table simply have probability zero there.
pub fn statistical_distance<O: Ord + Clone>(x: &JointDistribution<O>, y: &JointDistribution<O>) -> BigRational {
    let mut sum = BigRational::zero();
    for (o, p) in &x.table {
        sum += (p - y.prob(o)).abs();
    }
    for (o, p) in &y.table {
        if !x.table.contains_key(o) {
            sum += p;
        }
    }
    sum / BigRational::from_integer(2.into())
}

/// A min-entropy kept as the exact guessing probability `2^-H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinEntropy {
    pub guess_probability: BigRational,
}

impl MinEntropy {
    pub fn bits(&self) -> f64 {
        -log2_rational(&self.guess_probability)
    }

    /// Whether the entropy is at least `bits`.
    pub fn at_least(&self, bits: i64) -> bool {
        self.guess_probability <= pow2(-bits)
    }
}

/// Average conditional min-entropy of `A` given `E`:
/// `-log sum_e max_a Pr[A = a, E = e]`. Values of `e` with zero probability
/// never appear in the table, so they drop out of the expectation.
pub fn avg_cond_min_entropy<A: Ord + Clone, E: Ord + Clone>(joint: &JointDistribution<(A, E)>) -> MinEntropy {
    let mut best: BTreeMap<&E, &BigRational> = BTreeMap::new();
    for ((_, e), p) in joint.iter() {
        let slot = best.entry(e).or_insert(p);
        if p > *slot {
            *slot = p;
        }
    }
    MinEntropy { guess_probability: best.into_values().sum() }
}

/// `H~(A|B) >= H(A,B) - log |range B|`, compared as
/// `guess(A|B) <= maxprob(A,B) * |range B|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainRuleCheck {
    pub conditional: MinEntropy,
    pub joint: MinEntropy,
    pub range_b: usize,
    pub holds: bool,
}

pub fn check_chain_rule<A: Ord + Clone, B: Ord + Clone>(joint: &JointDistribution<(A, B)>) -> ChainRuleCheck {
    let conditional = avg_cond_min_entropy(joint);
    let range_b = joint.marginal_second().support_len();
    let j = joint.min_entropy();
    let holds = conditional.guess_probability <= &j.guess_probability * BigRational::from_integer(range_b.into());
    ChainRuleCheck { conditional, joint: j, range_b, holds }
}

/// `alpha = SD((A,B), C x D)` against `SD((A,B), C x B) <= 2 alpha`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SdSwitch {
    pub alpha: BigRational,
    pub lhs: BigRational,
    pub holds: bool,
}

pub fn check_sd_switch<A: Ord + Clone, B: Ord + Clone>(
    joint: &JointDistribution<(A, B)>,
    c: &JointDistribution<A>,
    d: &JointDistribution<B>,
) -> SdSwitch {
    let alpha = statistical_distance(joint, &c.product(d));
    let lhs = statistical_distance(joint, &c.product(&joint.marginal_second()));
    let holds = lhs <= &alpha * BigRational::from_integer(2.into());
    SdSwitch { alpha, lhs, holds }
}

/// A random `rows x cols` table with small integer weights.
pub fn random_joint<R: Rng + ?Sized>(rows: u8, cols: u8, rng: &mut R) -> JointDistribution<(u8, u8)> {
    loop {
        let entries: Vec<((u8, u8), u64)> = (0..rows)
            .flat_map(|a| (0..cols).map(move |b| (a, b)))
            .map(|o| (o, rng.random_range(0..16)))
            .collect();
        if let Ok(d) = JointDistribution::from_counts(entries) {
            return d;
        }
    }
}

/// A random distribution on `0..size`.
pub fn random_marginal<R: Rng + ?Sized>(size: u8, rng: &mut R) -> JointDistribution<u8> {
    loop {
        if let Ok(d) = JointDistribution::from_counts((0..size).map(|o| (o, rng.random_range(0..16)))) {
            return d;
        }
    }
}

/// The largest `SD((A,B), C x B) / alpha` found over 2x2 tables and binary
/// `C`, `D` whose probabilities are multiples of `1/steps`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SdSwitchExtremum {
    pub ratio: BigRational,
    pub joint: JointDistribution<(u8, u8)>,
    pub c: JointDistribution<u8>,
    pub d: JointDistribution<u8>,
}

pub fn sd_switch_grid_search(steps: u64) -> Result<SdSwitchExtremum> {
    check_cost((steps as u128 + 1).pow(5), 1 << 24)?;
    let binary = |p: u64| JointDistribution::from_counts([(0u8, p), (1u8, steps - p)]).expect("steps > 0");
    let mut best: Option<SdSwitchExtremum> = None;
    for w00 in 0..=steps {
        for w01 in 0..=steps - w00 {
            for w10 in 0..=steps - w00 - w01 {
                let w11 = steps - w00 - w01 - w10;
                let joint = JointDistribution::from_counts([((0, 0), w00), ((0, 1), w01), ((1, 0), w10), ((1, 1), w11)])?;
                for pc in 0..=steps {
                    for pd in 0..=steps {
                        let (c, d) = (binary(pc), binary(pd));
                        let check = check_sd_switch(&joint, &c, &d);
                        if check.alpha.is_zero() {
                            continue;
                        }
                        let r = &check.lhs / &check.alpha;
                        if best.as_ref().is_none_or(|b| r > b.ratio) {
                            best = Some(SdSwitchExtremum { ratio: r, joint: joint.clone(), c, d });
                        }
                    }
                }
            }
        }
    }
    best.ok_or_else(|| Error::InvalidInput("grid has no table with alpha > 0".into()))
}

/// `SD((R, P), U x P)` for the errorless construction, with `P = (i, sigma)`
/// and `i` uniform, enumerated exactly.
pub fn extractor_output_distance(params: &ExtractorParams, dist: &FlatDistribution) -> Result<BigRational> {
    if dist.n() != params.n {
        return Err(Error::LengthMismatch { expected: params.n, actual: dist.n() });
    }
    check_cost((dist.support_size() as u128) << params.field_degree().min(100), ENUMERATION_LIMIT)?;
    let raw = RawExtractor::new(params)?;
    let members = dist.members_u64()?;
    let (v, ell) = (params.v, params.ell);
    let keys = 1u64 << ell;

    // sum over (i, sigma, R) of |2^ell c(i,sigma,R) - c(i,sigma)|
    let num: u128 = (0..raw.field.size())
        .into_par_iter()
        .map(|i| {
            let mut counts = vec![0u64; 1 << (v + ell)];
            for &w in &members {
                let (sigma, key) = raw.tag_key(w, i);
                counts[(sigma << ell | key) as usize] += 1;
            }
            counts
                .chunks(keys as usize)
                .map(|row| {
                    let marginal: u64 = row.iter().sum();
                    row.iter().map(|&c| (keys * c).abs_diff(marginal) as u128).sum::<u128>()
                })
                .sum::<u128>()
        })
        .sum();
    let total = members.len() as u128 * raw.field.size() as u128;
    Ok(ratio(num, total * 2 * keys as u128))
}

/// `SD((R, P), U x P)` for the fuzzy construction, `P = (s, i, sigma)`.
pub fn fuzzy_output_distance(fx: &FuzzyExtractor, dist: &FlatDistribution) -> Result<BigRational> {
    let p = fx.params();
    if dist.n() != p.n {
        return Err(Error::LengthMismatch { expected: p.n, actual: dist.n() });
    }
    let field = fx.field();
    check_cost((dist.support_size() as u128) << field.degree().min(100), ENUMERATION_LIMIT)?;
    let members = dist.members_u64()?;
    let seeds: Vec<_> = field.elements().collect();
    let keys = 1u64 << p.ell;

    let mut counts: HashMap<(u64, u64, u64), Vec<u64>> = HashMap::new();
    for &w in &members {
        let wb = BitString::from_u64(w, p.n);
        for i in &seeds {
            let (key, helper) = fx.gen_with_seed(&wb, i)?;
            let row = counts
                .entry((helper.s.to_u64(), i.to_basis_u64(), helper.sigma.to_u64()))
                .or_insert_with(|| vec![0; keys as usize]);
            row[key.bits().to_u64() as usize] += 1;
        }
    }
    let num: u128 = counts
        .values()
        .map(|row| {
            let marginal: u64 = row.iter().sum();
            row.iter().map(|&c| (keys * c).abs_diff(marginal) as u128).sum::<u128>()
        })
        .sum();
    let total = members.len() as u128 * seeds.len() as u128;
    Ok(ratio(num, total * 2 * keys as u128))
}

/// `H~(W | SS(W))` for a flat `W`.
pub fn sketch_min_entropy(code: &LinearSketchSpec, dist: &FlatDistribution) -> Result<MinEntropy> {
    check_cost(dist.support_size() as u128, ENUMERATION_LIMIT)?;
    let pairs: Result<Vec<((u64, BitString), u64)>> = dist
        .members_u64()?
        .into_iter()
        .map(|w| Ok(((w, code.ss(&BitString::from_u64(w, dist.n()))?), 1)))
        .collect();
    Ok(avg_cond_min_entropy(&JointDistribution::from_counts(pairs?)?))
}

/// Transcript fields as integers for the word-level extractor.
fn transcript_words(raw: &RawExtractor, tr: &Transcript) -> Result<[u64; 5]> {
    let d = raw.degree();
    for e in [&tr.i, &tr.i_prime] {
        if e.spec() != &raw.field.spec {
            return Err(Error::SpecMismatch);
        }
    }
    for (bits, len) in [(&tr.sigma, raw.v), (&tr.sigma_prime, raw.v), (&tr.key, raw.ell)] {
        if bits.len() != len {
            return Err(Error::LengthMismatch { expected: len, actual: bits.len() });
        }
    }
    debug_assert!(d <= 16);
    Ok([tr.i.to_basis_u64(), tr.sigma.to_u64(), tr.key.to_u64(), tr.i_prime.to_basis_u64(), tr.sigma_prime.to_u64()])
}

/// Number of `w in {0,1}^n` producing `(sigma, R)` under `i` whose tag under
/// `i'` is `sigma'`.
pub fn bad_set_count(params: &ExtractorParams, tr: &Transcript) -> Result<u64> {
    check_cost(1 << params.n.min(100), 1 << 16)?;
    let raw = RawExtractor::new(params)?;
    let [i, sigma, key, i_prime, sigma_prime] = transcript_words(&raw, tr)?;
    Ok((0..1u64 << params.n)
        .filter(|&w| raw.tag_key(w, i) == (sigma, key) && raw.tag(w, i_prime) == sigma_prime)
        .count() as u64)
}

/// Bad-set sizes over every transcript of the errorless game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BadSetCensus {
    /// Transcripts with `i' != i`, each expected to have `2^(n/2 - v)` secrets.
    pub transcripts: u64,
    pub expected: u64,
    pub min: u64,
    pub max: u64,
    pub deviations: u64,
    /// Transcripts with `i' = i`, `sigma' != sigma` and a nonzero count.
    pub same_seed_nonzero: u64,
}

pub fn bad_set_census(params: &ExtractorParams) -> Result<BadSetCensus> {
    let raw = RawExtractor::new(params)?;
    let size = raw.field.size();
    check_cost(((size * size) as u128) << params.n, 1 << 30)?;
    let (v, ell) = (params.v, params.ell);
    let cells = 1usize << (2 * v + ell);
    let expected = 1u64 << (raw.degree() - v);

    let rows: Vec<(u64, u64, u64, u64)> = (0..size)
        .into_par_iter()
        .map(|i| {
            let mut acc = (0u64, u64::MAX, 0u64, 0u64);
            let mut counts = vec![0u64; cells];
            for i_prime in (0..size).filter(|&x| x != i) {
                counts.iter_mut().for_each(|c| *c = 0);
                for w in 0..1u64 << params.n {
                    let (sigma, key) = raw.tag_key(w, i);
                    let idx = (sigma << ell | key) << v | raw.tag(w, i_prime);
                    counts[idx as usize] += 1;
                }
                for &c in &counts {
                    acc.1 = acc.1.min(c);
                    acc.2 = acc.2.max(c);
                    acc.3 += (c != expected) as u64;
                }
            }
            // With i' = i the only accepted tag is sigma itself.
            let mut same = 0u64;
            for w in 0..1u64 << params.n {
                let (sigma, _) = raw.tag_key(w, i);
                same += (raw.tag(w, i) != sigma) as u64;
            }
            (acc.1, acc.2, acc.3, same)
        })
        .collect();
    Ok(BadSetCensus {
        transcripts: size * (size - 1) * cells as u64,
        expected,
        min: rows.iter().map(|r| r.0).min().unwrap_or(0),
        max: rows.iter().map(|r| r.1).max().unwrap_or(0),
        deviations: rows.iter().map(|r| r.2).sum(),
        same_seed_nonzero: rows.iter().map(|r| r.3).sum(),
    })
}

/// Number of `w` consistent with the honest part `(s, i, sigma, R)` of the
/// transcript for which Rep accepts `(s', i', sigma')` on `w xor delta`.
pub fn fuzzy_bad_set_count(fx: &FuzzyExtractor, tr: &Transcript, delta: &BitString) -> Result<u64> {
    let p = fx.params();
    check_cost(1 << p.n.min(100), 1 << 16)?;
    let Some((s, s_prime)) = &tr.sketches else {
        return Err(Error::InvalidInput("fuzzy transcript needs both sketches".into()));
    };
    let forged = crate::fuzzy::FuzzyHelper { s: s_prime.clone(), i: tr.i_prime.clone(), sigma: tr.sigma_prime.clone() };
    let mut count = 0;
    for w in 0..1u64 << p.n {
        let wb = BitString::from_u64(w, p.n);
        let (key, helper) = fx.gen_with_seed(&wb, &tr.i)?;
        if &helper.s != s || helper.sigma != tr.sigma || key.bits() != &tr.key {
            continue;
        }
        if fx.rep(&wb.xor(delta), &forged)?.is_some() {
            count += 1;
        }
    }
    Ok(count)
}

/// Collision probabilities of `h_i(a, b) = i*a + b` over uniform `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollisionReport {
    /// Max over all distinct pairs.
    pub max: BigRational,
    /// Max over pairs with `a = a'`, `b != b'`.
    pub max_same_a: BigRational,
}

/// Enumerates all input differences `(a - a', b - b')`; the collision event
/// `i*(a - a') = b' - b` depends on nothing else.
pub fn pairwise_collision_max(field: &FieldSpec) -> Result<CollisionReport> {
    let k = field.degree();
    check_cost(1u128 << (3 * k.min(40)), 1 << 24)?;
    let ff = FastField::new(field)?;
    let size = ff.size();
    let counts: Vec<(u64, u64)> = (0..size)
        .into_par_iter()
        .map(|da| {
            let mut best = (0, 0);
            for db in 0..size {
                if da == 0 && db == 0 {
                    continue;
                }
                let hits = (0..size).filter(|&i| ff.mul(i, da) == db).count() as u64;
                if da == 0 {
                    best.1 = best.1.max(hits);
                }
                best.0 = best.0.max(hits);
            }
            best
        })
        .collect();
    let max = counts.iter().map(|c| c.0).max().unwrap_or(0);
    let same = counts.iter().map(|c| c.1).max().unwrap_or(0);
    Ok(CollisionReport { max: ratio(max, size), max_same_a: ratio(same, size) })
}

/// Same as [`pairwise_collision_max`] but over literal input pairs, for
/// degree <= 4.
pub fn pairwise_collision_max_full(field: &FieldSpec) -> Result<CollisionReport> {
    let k = field.degree();
    check_cost(1u128 << (5 * k.min(25)), 1 << 20)?;
    let ff = FastField::new(field)?;
    let size = ff.size();
    let h = |i: u64, a: u64, b: u64| ff.mul(i, a) ^ b;
    let mut max = 0;
    let mut same = 0;
    for x in 0..size * size {
        for y in x + 1..size * size {
            let (a, b, a2, b2) = (x / size, x % size, y / size, y % size);
            let hits = (0..size).filter(|&i| h(i, a, b) == h(i, a2, b2)).count() as u64;
            max = max.max(hits);
            if a == a2 {
                same = same.max(hits);
            }
        }
    }
    Ok(CollisionReport { max: ratio(max, size), max_same_a: ratio(same, size) })
}

/// How [`mac_root_census`] covers the polynomial family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CensusMode {
    Exhaustive,
    Sampled { samples: u64, seed: u64 },
}

/// Largest number of points at which `f_{s,i}(x) - f_{s',i'}(x + d)` takes a
/// single value, over `(s, i) != (s', i')` and all offsets `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MacCensus {
    pub degree: usize,
    pub l: usize,
    pub exhaustive: bool,
    /// Distinct difference polynomials examined (up to the constant term).
    pub polynomials: u64,
    pub max_count: u64,
    /// `L + 2`.
    pub bound: u64,
    pub violations: u64,
    /// Top coefficient cancels and the next one equals `d`, for every `d`.
    pub leading_terms_ok: bool,
    /// Dimension over GF(2) of the family for each offset.
    pub dimensions: Vec<usize>,
}

/// Polynomials over a small field, ascending degree, basis-order integers.
type Poly = Vec<u64>;

/// `sum_t c_t (x + d)^t`.
fn shift_poly(ff: &FastField, p: &[u64], d: u64) -> Poly {
    let mut out = vec![0u64; p.len()];
    for (deg, &c) in p.iter().enumerate() {
        if c == 0 {
            continue;
        }
        // (x + d)^deg = sum over t with binom(deg, t) odd of d^(deg - t) x^t.
        for (t, slot) in out.iter_mut().enumerate().take(deg + 1) {
            if t & deg == t {
                let mut term = c;
                for _ in 0..deg - t {
                    term = ff.mul(term, d);
                }
                *slot ^= term;
            }
        }
    }
    out
}

/// `f_{s,i}` with `s` given as `[s_0, ..., s_{L-1}]`.
fn mac_poly(l: usize, s: &[u64], i: u64) -> Poly {
    let mut p = vec![0u64; l + 4];
    p[l + 3] = 1;
    p[2..l + 2].copy_from_slice(s);
    p[1] = i;
    p
}

/// Packs coefficients of degree >= 1 into one word, `k` bits each.
fn pack(p: &[u64], k: usize) -> u128 {
    p.iter().skip(1).enumerate().fold(0u128, |acc, (j, &c)| acc | (c as u128) << (j * k))
}

fn unpack(x: u128, k: usize, len: usize) -> Poly {
    let mut p = vec![0u64; len];
    for (j, slot) in p.iter_mut().enumerate().skip(1) {
        *slot = (x >> ((j - 1) * k)) as u64 & ((1 << k) - 1);
    }
    p
}

fn value_table(ff: &FastField, p: &[u64]) -> Vec<u64> {
    (0..ff.size())
        .map(|a| p.iter().rev().fold(0u64, |acc, &c| ff.mul(acc, a) ^ c))
        .collect()
}

/// Reduces `vectors` to an echelon basis.
fn echelon(vectors: impl IntoIterator<Item = u128>) -> Vec<u128> {
    let mut basis: Vec<u128> = Vec::new();
    for mut v in vectors {
        for b in &basis {
            let pivot = 127 - b.leading_zeros();
            if v >> pivot & 1 == 1 {
                v ^= b;
            }
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis
}

/// The family for one offset `d`: an affine space `offset + span(basis)` of
/// packed difference polynomials, plus whether the all-zero combination
/// stands for the excluded `(s, i) = (s', i')`.
struct OffsetFamily {
    offset: u128,
    basis: Vec<u128>,
    skip_zero: bool,
    leading_ok: bool,
    /// Some `(s, i) != (s', i')` gives a constant difference.
    degenerate: bool,
}

fn offset_family(ff: &FastField, l: usize, d: u64) -> Result<OffsetFamily> {
    let k = ff.degree();
    let diff = |s: &[u64], i: u64, s2: &[u64], i2: u64| -> u128 {
        let a = mac_poly(l, s, i);
        let b = shift_poly(ff, &mac_poly(l, s2, i2), d);
        pack(&a.iter().zip(&b).map(|(x, y)| x ^ y).collect::<Vec<_>>(), k)
    };
    let zeros = vec![0u64; l];
    let offset = diff(&zeros, 0, &zeros, 0);

    // Images of single parameter bits, for each of s, i, s', i'.
    let params = l + 1;
    let unit = |slot: usize, bit: usize| -> (Vec<u64>, u64) {
        let mut s = vec![0u64; l];
        let mut i = 0;
        if slot < l {
            s[slot] = 1 << bit;
        } else {
            i = 1 << bit;
        }
        (s, i)
    };
    let mut primal = Vec::new();
    let mut diagonal = Vec::new();
    for slot in 0..params {
        for bit in 0..k {
            let (s, i) = unit(slot, bit);
            let a = diff(&s, i, &zeros, 0) ^ offset;
            let b = diff(&zeros, 0, &s, i) ^ offset;
            primal.push(a);
            primal.push(b);
            diagonal.push(a ^ b);
        }
    }
    let basis = echelon(primal.iter().copied());
    let diag_rank = echelon(diagonal.iter().copied()).len();
    let dim_params = 2 * params * k;
    let dim_diag = params * k;
    // Kernel inside the diagonal iff dim(K & D) = dim K.
    let kernel_in_diagonal = dim_diag - diag_rank == dim_params - basis.len();

    let top = |x: u128, deg: usize| (x >> ((deg - 1) * k)) as u64 & ((1 << k) - 1);
    let leading_ok = top(offset, l + 3) == 0
        && top(offset, l + 2) == d
        && primal.iter().all(|&x| top(x, l + 3) == 0 && top(x, l + 2) == 0);

    if d == 0 {
        // Unshifted, the difference depends on (s + s', i + i') only, so the
        // family is the image of nonzero differences. A rank drop would give
        // a constant difference for some distinct pair.
        let degenerate = offset != 0 || basis.len() < dim_diag;
        return Ok(OffsetFamily { offset, basis, skip_zero: true, leading_ok, degenerate });
    }
    if kernel_in_diagonal {
        return Err(Error::Unsupported(format!("offset {d}: every kernel vector lies on the diagonal")));
    }
    Ok(OffsetFamily { offset, basis, skip_zero: false, leading_ok, degenerate: false })
}

fn max_multiplicity(table: &[u64], hist: &mut [u32]) -> u64 {
    let mut best = 0;
    for &y in table {
        hist[y as usize] += 1;
        best = best.max(hist[y as usize]);
    }
    for &y in table {
        hist[y as usize] = 0;
    }
    best as u64
}

/// Root-count census for the MAC family over `field` with `L = l` sketch
/// blocks. Exhaustive mode walks each affine family in Gray-code order.
pub fn mac_root_census(field: &FieldSpec, l: usize, mode: CensusMode) -> Result<MacCensus> {
    let ff = FastField::new(field)?;
    let k = ff.degree();
    if l == 0 || l % 2 == 1 || (l + 3) * k > 128 {
        return Err(Error::InvalidInput(format!("L = {l} must be even, positive and fit the packing")));
    }
    let size = ff.size();
    let len = l + 4;
    if mode == CensusMode::Exhaustive {
        let cost = (size as u128) << ((l + 1) * k) << k;
        check_cost(cost, 1 << 36)?;
    }
    let families: Vec<OffsetFamily> = (0..size).map(|d| offset_family(&ff, l, d)).collect::<Result<_>>()?;
    let leading_terms_ok = families.iter().all(|f| f.leading_ok);
    let dimensions = families.iter().map(|f| f.basis.len()).collect();
    let degenerate = families.iter().filter(|f| f.degenerate).count() as u64;
    let bound = l as u64 + 2;

    let per_offset: Vec<(u64, u64, u64)> = families
        .par_iter()
        .enumerate()
        .map(|(d, fam)| {
            let tables: Vec<Vec<u64>> = fam.basis.iter().map(|&b| value_table(&ff, &unpack(b, k, len))).collect();
            let mut current = value_table(&ff, &unpack(fam.offset, k, len));
            let mut hist = vec![0u32; size as usize];
            let (mut polys, mut max, mut bad) = (0u64, 0u64, 0u64);
            let mut visit = |table: &[u64]| {
                let c = max_multiplicity(table, &mut hist);
                polys += 1;
                max = max.max(c);
                bad += (c > bound) as u64;
            };
            match mode {
                CensusMode::Exhaustive => {
                    if !fam.skip_zero {
                        visit(&current);
                    }
                    for step in 1u64..1 << tables.len() {
                        let t = &tables[step.trailing_zeros() as usize];
                        current.iter_mut().zip(t).for_each(|(c, x)| *c ^= x);
                        visit(&current);
                    }
                }
                CensusMode::Sampled { samples, seed } => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(d as u64);
                    let per = samples.div_ceil(size);
                    let base = current.clone();
                    for _ in 0..per {
                        let pick: u64 = rng.random::<u64>() & ((1u64 << tables.len()) - 1);
                        if pick == 0 && fam.skip_zero {
                            continue;
                        }
                        current.copy_from_slice(&base);
                        for (j, t) in tables.iter().enumerate() {
                            if pick >> j & 1 == 1 {
                                current.iter_mut().zip(t).for_each(|(c, x)| *c ^= x);
                            }
                        }
                        visit(&current);
                    }
                }
            }
            (polys, max, bad)
        })
        .collect();

    Ok(MacCensus {
        degree: k,
        l,
        exhaustive: mode == CensusMode::Exhaustive,
        polynomials: per_offset.iter().map(|r| r.0).sum(),
        max_count: per_offset.iter().map(|r| r.1).max().unwrap_or(0),
        bound,
        violations: per_offset.iter().map(|r| r.2).sum::<u64>() + degenerate,
        leading_terms_ok,
        dimensions,
    })
}
