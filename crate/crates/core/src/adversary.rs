//! Adversaries against the robustness game.
//!
//! * The split-basis attack on the `dkrs` family: with `i' = i + i/x`, Rep
//!   accepts `sigma' = sigma + tau` exactly when `tau = [i*a/x]_1^v`. In the
//!   parity-split basis, and when `i*a` has a zero constant coefficient, the
//!   bits of `i*a/x` are a permutation of bits of `i*a`, many of which the
//!   adversary already sees in `sigma` and `R`. The rest are guessed.
//! * An exhaustive optimal forger for tiny parameters, giving the exact best
//!   success probability of any post-application adversary.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::extractor::{ExtractedKey, Extractor, ExtractorParams, HelperString};
use crate::gf2k::{Basis, FieldElement};
use crate::raw::RawExtractor;

/// Largest `n` for which supports are materialised.
const MAX_ENUMERATED_N: usize = 26;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Support {
    /// All strings with zeros at these positions.
    ZeroPositions(Vec<usize>),
    /// An explicit list of equiprobable members, as integers.
    Explicit(Vec<u64>),
}

/// A flat (uniform-on-its-support) distribution over `n`-bit secrets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatDistribution {
    n: usize,
    support: Support,
}

impl FlatDistribution {
    pub fn uniform(n: usize) -> Self {
        FlatDistribution { n, support: Support::ZeroPositions(Vec::new()) }
    }

    /// Strings that are zero at `positions` and uniform elsewhere.
    pub fn with_zero_positions(n: usize, mut positions: Vec<usize>) -> Result<Self> {
        positions.sort_unstable();
        positions.dedup();
        if positions.last().is_some_and(|&p| p >= n) {
            return Err(Error::InvalidInput(format!("zero position out of range for n = {n}")));
        }
        Ok(FlatDistribution { n, support: Support::ZeroPositions(positions) })
    }

    /// The attack distribution: the top `n - m` bits of `b` are zero, where
    /// `b` is the part of `w` outside the field element `a`.
    pub fn top_of_b_zero(params: &ExtractorParams) -> Result<Self> {
        let start = params.n - if params.variant.is_dkrs() { params.v } else { params.n / 2 };
        let zeros = params.n - params.m;
        if zeros > params.n - start {
            return Err(Error::InvalidInput(format!(
                "cannot fix {zeros} bits of b, which has only {} bits",
                params.n - start
            )));
        }
        Self::with_zero_positions(params.n, (start..start + zeros).collect())
    }

    /// Uniform over the given members; their number must be a power of two.
    pub fn explicit(n: usize, mut members: Vec<u64>) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        if n > 63 || members.last().is_some_and(|&w| w >> n != 0) {
            return Err(Error::InvalidInput(format!("members must be {n}-bit integers")));
        }
        if !members.len().is_power_of_two() {
            return Err(Error::InvalidInput(format!("support size {} is not a power of two", members.len())));
        }
        Ok(FlatDistribution { n, support: Support::Explicit(members) })
    }

    /// A random support of size `2^m`.
    pub fn random_subset<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Self> {
        if n > MAX_ENUMERATED_N || m > n {
            return Err(Error::InstanceTooLarge { cost: 1 << n.min(127), limit: 1 << MAX_ENUMERATED_N });
        }
        let all: Vec<u64> = (0..1u64 << n).collect();
        let members = all.choose_multiple(rng, 1 << m).copied().collect();
        Self::explicit(n, members)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Min-entropy, `log2` of the support size.
    pub fn m(&self) -> usize {
        match &self.support {
            Support::ZeroPositions(z) => self.n - z.len(),
            Support::Explicit(members) => members.len().trailing_zeros() as usize,
        }
    }

    pub fn support_size(&self) -> u64 {
        1 << self.m()
    }

    pub fn contains(&self, w: &BitString) -> bool {
        w.len() == self.n
            && match &self.support {
                Support::ZeroPositions(z) => z.iter().all(|&p| !w.get(p)),
                Support::Explicit(members) => self.n <= 63 && members.binary_search(&w.to_u64()).is_ok(),
            }
    }

    /// Whether every member has a zero at `pos`.
    pub fn always_zero(&self, pos: usize) -> bool {
        match &self.support {
            Support::ZeroPositions(z) => z.binary_search(&pos).is_ok(),
            Support::Explicit(members) => members.iter().all(|&w| w >> (self.n - 1 - pos) & 1 == 0),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BitString {
        match &self.support {
            Support::ZeroPositions(z) => {
                let mut w = BitString::random(self.n, rng);
                for &p in z {
                    w.set(p, false);
                }
                w
            }
            Support::Explicit(members) => BitString::from_u64(*members.choose(rng).expect("nonempty"), self.n),
        }
    }

    /// All members as integers, for `n <= 26`.
    pub fn members_u64(&self) -> Result<Vec<u64>> {
        if self.n > MAX_ENUMERATED_N {
            return Err(Error::InstanceTooLarge { cost: self.support_size() as u128, limit: 1 << MAX_ENUMERATED_N });
        }
        Ok(match &self.support {
            Support::Explicit(members) => members.clone(),
            Support::ZeroPositions(z) => {
                let zero_mask = z.iter().fold(0u64, |acc, &p| acc | 1 << (self.n - 1 - p));
                (0..1u64 << self.n).filter(|w| w & zero_mask == 0).collect()
            }
        })
    }

    pub fn describe(&self) -> String {
        match &self.support {
            Support::ZeroPositions(z) if z.is_empty() => format!("uniform(n={})", self.n),
            Support::ZeroPositions(z) => format!("zeros{:?}(n={}, m={})", z, self.n, self.m()),
            Support::Explicit(_) => format!("explicit(n={}, m={})", self.n, self.m()),
        }
    }
}

/// A robustness-game transcript `(i, sigma, R, i', sigma')`, with the
/// sketches `(s, s')` in the fuzzy game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transcript {
    pub i: FieldElement,
    pub sigma: BitString,
    pub key: BitString,
    pub i_prime: FieldElement,
    pub sigma_prime: BitString,
    pub sketches: Option<(BitString, BitString)>,
}

impl Transcript {
    /// Fails when the forged helper equals the original.
    pub fn new(
        i: FieldElement,
        sigma: BitString,
        key: BitString,
        i_prime: FieldElement,
        sigma_prime: BitString,
        sketches: Option<(BitString, BitString)>,
    ) -> Result<Self> {
        let same_sketch = sketches.as_ref().is_none_or(|(s, sp)| s == sp);
        if i == i_prime && sigma == sigma_prime && same_sketch {
            return Err(Error::InvalidInput("forged helper equals the original".into()));
        }
        Ok(Transcript { i, sigma, key, i_prime, sigma_prime, sketches })
    }
}

/// Where the attacker takes each bit of `tau` from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TauSource {
    /// The bit of `i*a/x` has no counterpart in `i*a`; it is zero.
    Zero,
    /// Equal to bit `p` of `sigma`.
    Sigma(usize),
    /// Equal to bit `p` of `R`.
    Key(usize),
    Guess,
}

/// The per-parameter recipe for assembling `tau`.
#[derive(Clone, Debug)]
pub struct AttackPlan {
    params: ExtractorParams,
    sources: Vec<TauSource>,
    guesses: usize,
}

impl AttackPlan {
    /// Derives the recipe from the half-swap property of the field basis and
    /// from which bits of `i*a` the view reveals under `dist`.
    pub fn derive(params: &ExtractorParams, dist: &FlatDistribution) -> Result<Self> {
        if params.basis != Basis::ParitySplit {
            return Err(Error::Unsupported("the attack assumes the parity-split basis".into()));
        }
        if params.variant.is_dkrs() && params.v < params.ell + (params.n - params.m) {
            return Err(Error::Unsupported(format!(
                "not in the attackable regime: v = {} < ell + (n - m) = {}",
                params.v,
                params.ell + params.n - params.m
            )));
        }
        if dist.n() != params.n {
            return Err(Error::LengthMismatch { expected: params.n, actual: dist.n() });
        }
        let field = params.field()?;
        let d = field.degree();
        // The entropy-free top of sigma reaches tau only through the swapped
        // low half of i*a/x, which holds v - d/2 of its bits.
        if params.variant.is_dkrs() && 2 * params.v < d + 2 * (params.n - params.m) {
            return Err(Error::Unsupported(format!(
                "not in the attackable regime: v - (n - v)/2 = {} < n - m = {}",
                params.v as f64 - d as f64 / 2.0,
                params.n - params.m
            )));
        }
        let b_start = params.n - if params.variant.is_dkrs() { params.v } else { d };

        // Which bit of z = i*a lands at each position of z/x (when z_0 = 0).
        let mut origin = vec![None; d];
        for p in 0..d {
            let mut unit = BitString::zeros(d);
            unit.set(p, true);
            let e = field.from_bits(&unit)?;
            if e.constant_coefficient() {
                continue;
            }
            let moved = e.div_by_x().bits();
            let q = moved.first_one().expect("nonzero");
            debug_assert_eq!(moved.weight(), 1);
            origin[q] = Some(p);
        }

        // Bit p of z is visible when the matching bit of b is always zero.
        let visible = |p: usize| -> Option<TauSource> {
            let b_zero = p < params.n - b_start && dist.always_zero(b_start + p);
            if p < params.v {
                b_zero.then_some(TauSource::Sigma(p))
            } else if p < params.v + params.ell {
                // dkrs keys are bits of z itself; new keys are bits of z + b.
                (params.variant.is_dkrs() || b_zero).then_some(TauSource::Key(p - params.v))
            } else {
                None
            }
        };
        let sources: Vec<TauSource> = (0..params.v)
            .map(|q| match origin[q] {
                None => TauSource::Zero,
                Some(p) => visible(p).unwrap_or(TauSource::Guess),
            })
            .collect();
        let guesses = sources.iter().filter(|s| **s == TauSource::Guess).count();
        Ok(AttackPlan { params: params.clone(), sources, guesses })
    }

    pub fn sources(&self) -> &[TauSource] {
        &self.sources
    }

    /// Number of bits of `tau` that must be guessed.
    pub fn guesses(&self) -> usize {
        self.guesses
    }

    pub fn params(&self) -> &ExtractorParams {
        &self.params
    }

    /// The forged helper, taking guessed bits from `guess` in order.
    pub fn forge(&self, helper: &HelperString, key: &ExtractedKey, guess: &BitString) -> Result<HelperString> {
        if guess.len() != self.guesses {
            return Err(Error::LengthMismatch { expected: self.guesses, actual: guess.len() });
        }
        let mut g = guess.iter();
        let tau: BitString = self
            .sources
            .iter()
            .map(|s| match *s {
                TauSource::Zero => false,
                TauSource::Sigma(p) => helper.sigma.get(p),
                TauSource::Key(p) => key.bits().get(p),
                TauSource::Guess => g.next().expect("guess length checked"),
            })
            .collect();
        Ok(HelperString { i: &helper.i + &helper.i.div_by_x(), sigma: helper.sigma.xor(&tau) })
    }

    pub fn forge_random<R: Rng + ?Sized>(&self, helper: &HelperString, key: &ExtractedKey, rng: &mut R) -> Result<HelperString> {
        self.forge(helper, key, &BitString::random(self.guesses, rng))
    }

    /// Word form of [`forge`](Self::forge): `sigma'` from `sigma`, `R` and
    /// the guess bits (most significant first).
    fn forge_sigma_u64(&self, sigma: u64, key: u64, guess: u64) -> u64 {
        let (v, ell) = (self.params.v, self.params.ell);
        let mut tau = 0u64;
        let mut gi = 0;
        for (q, s) in self.sources.iter().enumerate() {
            let bit = match *s {
                TauSource::Zero => 0,
                TauSource::Sigma(p) => sigma >> (v - 1 - p) & 1,
                TauSource::Key(p) => key >> (ell - 1 - p) & 1,
                TauSource::Guess => {
                    gi += 1;
                    guess >> (self.guesses - gi) & 1
                }
            };
            tau |= bit << (v - 1 - q);
        }
        sigma ^ tau
    }
}

/// The split-basis forgery against the `dkrs` family, assuming the top
/// `n - m` bits of `b` are zero.
pub fn dkrs_attack_forge<R: Rng + ?Sized>(
    helper: &HelperString,
    key: &ExtractedKey,
    params: &ExtractorParams,
    rng: &mut R,
) -> Result<HelperString> {
    if !params.variant.is_dkrs() {
        return Err(Error::InvalidInput(format!("variant {} is not in the dkrs family", params.variant)));
    }
    let plan = AttackPlan::derive(params, &FlatDistribution::top_of_b_zero(params)?)?;
    plan.forge_random(helper, key, rng)
}

/// Two-sided Wilson score interval.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// `z` for a two-sided 99% interval.
pub const Z_99: f64 = 2.575_829_303_548_900_4;

#[derive(Clone, Debug, PartialEq)]
pub struct AttackReport {
    pub variant: String,
    pub n: usize,
    pub m: usize,
    pub v: usize,
    pub ell: usize,
    pub guesses: usize,
    pub trials: u64,
    /// Trials with seed `i = 0`, where `i' = i` and no forgery is possible.
    pub excluded_zero_seed: u64,
    pub successes: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// `2^-log2(1/delta)`; `2^-guesses` when the layout was explicit.
    pub delta: f64,
    /// `delta/2` for the `dkrs` family (a lower target), `delta` for the new
    /// construction (an upper bound).
    pub bound: f64,
    pub stderr: f64,
    pub passed: bool,
}

impl AttackReport {
    pub fn effective_trials(&self) -> u64 {
        self.trials - self.excluded_zero_seed
    }

    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.fields() {
            out.push_str(&format!("{k}={v}\n"));
        }
        out
    }

    pub fn csv_header() -> String {
        Self::field_names().join(",")
    }

    pub fn csv_row(&self) -> String {
        self.fields().into_iter().map(|(_, v)| v).collect::<Vec<_>>().join(",")
    }

    fn field_names() -> Vec<&'static str> {
        vec![
            "variant", "n", "m", "v", "ell", "guesses", "trials", "excluded_zero_seed", "successes", "rate", "ci_low",
            "ci_high", "delta", "bound", "stderr", "result",
        ]
    }

    fn fields(&self) -> Vec<(&'static str, String)> {
        let values = vec![
            self.variant.clone(),
            self.n.to_string(),
            self.m.to_string(),
            self.v.to_string(),
            self.ell.to_string(),
            self.guesses.to_string(),
            self.trials.to_string(),
            self.excluded_zero_seed.to_string(),
            self.successes.to_string(),
            format!("{:.6}", self.rate),
            format!("{:.6}", self.ci_low),
            format!("{:.6}", self.ci_high),
            format!("{:.6}", self.delta),
            format!("{:.6}", self.bound),
            format!("{:.6}", self.stderr),
            if self.passed { "PASS" } else { "FAIL" }.to_string(),
        ];
        Self::field_names().into_iter().zip(values).collect()
    }
}

/// Runs the split-basis attack for `trials` independent trials. Trial `t`
/// draws from ChaCha8 seeded with `seed` on stream `t`, so results do not
/// depend on scheduling.
pub fn run_attack_experiment(
    params: &ExtractorParams,
    dist: &FlatDistribution,
    trials: u64,
    seed: u64,
) -> Result<AttackReport> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be at least 1".into()));
    }
    let plan = AttackPlan::derive(params, dist)?;
    let ex = Extractor::new(params.clone())?;
    let outcomes: Result<Vec<(u64, u64)>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t);
            let w = dist.sample(&mut rng);
            let (key, helper) = ex.gen(&w, &mut rng)?;
            if helper.i.is_zero() {
                return Ok((0, 1));
            }
            let forged = plan.forge_random(&helper, &key, &mut rng)?;
            let accepted = forged != helper && ex.rep(&w, &forged)?.is_some();
            Ok((accepted as u64, 0))
        })
        .collect();
    let (successes, excluded) = outcomes?.into_iter().fold((0, 0), |(s, e), (a, b)| (s + a, e + b));

    let effective = trials - excluded;
    let rate = if effective == 0 { 0.0 } else { successes as f64 / effective as f64 };
    let (ci_low, ci_high) = wilson_interval(successes, effective, Z_99);
    let log_delta = if params.log2_inv_delta == num_rational::Rational64::from_integer(0) {
        plan.guesses as f64
    } else {
        params.log2_inv_delta_f64()
    };
    let delta = (-log_delta).exp2();
    let dkrs = params.variant.is_dkrs();
    let bound = if dkrs { delta / 2.0 } else { delta };
    let stderr = (bound * (1.0 - bound) / effective.max(1) as f64).sqrt();
    let passed = if dkrs { rate >= bound - 3.0 * stderr } else { rate <= bound };
    Ok(AttackReport {
        variant: params.variant.to_string(),
        n: params.n,
        m: params.m,
        v: params.v,
        ell: params.ell,
        guesses: plan.guesses,
        trials,
        excluded_zero_seed: excluded,
        successes,
        rate,
        ci_low,
        ci_high,
        delta,
        bound,
        stderr,
        passed,
    })
}

/// Exact outcome of the attack over every member of `dist`, every nonzero
/// seed and every guess.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExhaustiveAttackReport {
    /// Pairs `(w, i)` with `i != 0`.
    pub pairs: u64,
    pub excluded_zero_seed: u64,
    /// Pairs where `i*a` has a zero constant coefficient.
    pub even_events: u64,
    pub guesses: usize,
    /// Accepted `(w, i, guess)` triples among even events.
    pub successes_on_even: u64,
    /// Accepted triples overall.
    pub successes_total: u64,
}

impl ExhaustiveAttackReport {
    fn ratio(num: u64, den: u64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    /// `Pr[z_0 = 0]` over `w` and nonzero `i`.
    pub fn even_probability(&self) -> BigRational {
        Self::ratio(self.even_events, self.pairs)
    }

    /// `Pr[accept | z_0 = 0]`, averaged over guesses.
    pub fn success_given_even(&self) -> BigRational {
        Self::ratio(self.successes_on_even, self.even_events << self.guesses)
    }

    /// `Pr[accept and z_0 = 0]`.
    pub fn success_and_even(&self) -> BigRational {
        Self::ratio(self.successes_on_even, self.pairs << self.guesses)
    }

    pub fn success_probability(&self) -> BigRational {
        Self::ratio(self.successes_total, self.pairs << self.guesses)
    }
}

/// Runs the attack against every `(w, i != 0, guess)`; needs `n <= 26`,
/// field degree <= 16 and at most 2^30 evaluations.
pub fn exhaustive_attack(params: &ExtractorParams, dist: &FlatDistribution) -> Result<ExhaustiveAttackReport> {
    let plan = AttackPlan::derive(params, dist)?;
    let raw = RawExtractor::new(params)?;
    let members = dist.members_u64()?;
    let size = raw.field.size();
    let cost = members.len() as u128 * size as u128 * (1u128 << plan.guesses);
    if cost > 1 << 30 {
        return Err(Error::InstanceTooLarge { cost, limit: 1 << 30 });
    }
    let shift: Vec<u64> = (0..size).map(|i| i ^ raw.field.div_by_x(i)).collect();
    let (even, on_even, total) = (1..size)
        .into_par_iter()
        .map(|i| {
            let i_prime = shift[i as usize];
            let mut acc = (0u64, 0u64, 0u64);
            for &w in &members {
                let even = !raw.field.constant_coefficient(raw.product(w, i));
                let (sigma, key) = raw.tag_key(w, i);
                let expected = raw.tag(w, i_prime);
                let hits = (0..1u64 << plan.guesses)
                    .filter(|&g| plan.forge_sigma_u64(sigma, key, g) == expected)
                    .count() as u64;
                acc.0 += even as u64;
                acc.1 += if even { hits } else { 0 };
                acc.2 += hits;
            }
            acc
        })
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    let n_members = members.len() as u64;
    Ok(ExhaustiveAttackReport {
        pairs: n_members * (size - 1),
        excluded_zero_seed: n_members,
        even_events: even,
        guesses: plan.guesses,
        successes_on_even: on_even,
        successes_total: total,
    })
}

/// Default evaluation budget for [`optimal_forgery_probability`].
pub const OPTIMAL_FORGER_BUDGET: u128 = 1 << 28;

/// Exact success probability of the best post-application adversary: for
/// each view `(i, sigma, R)` it picks the `(i', sigma')` accepted by the most
/// secrets consistent with that view.
///
/// Candidates with `i' = i` are skipped: every secret in a view shares the
/// tag `sigma`, so `sigma' != sigma` is never accepted.
pub fn optimal_forgery_probability(params: &ExtractorParams, dist: &FlatDistribution) -> Result<BigRational> {
    optimal_forgery_probability_with_budget(params, dist, OPTIMAL_FORGER_BUDGET)
}

pub fn optimal_forgery_probability_with_budget(
    params: &ExtractorParams,
    dist: &FlatDistribution,
    budget: u128,
) -> Result<BigRational> {
    if dist.n() != params.n {
        return Err(Error::LengthMismatch { expected: params.n, actual: dist.n() });
    }
    let field_size = 1u128 << params.field_degree().min(100);
    let cost = field_size * field_size * dist.support_size() as u128;
    if cost > budget || params.field_degree() > 16 {
        return Err(Error::InstanceTooLarge { cost, limit: budget });
    }
    let raw = RawExtractor::new(params)?;
    let members = dist.members_u64()?;
    let size = raw.field.size();
    // tags[i][j] and views[i][j] for secret j under seed i.
    let (tags, views): (Vec<Vec<u32>>, Vec<Vec<u64>>) = (0..size)
        .into_par_iter()
        .map(|i| {
            members
                .iter()
                .map(|&w| {
                    let (sigma, key) = raw.tag_key(w, i);
                    (sigma as u32, sigma << params.ell | key)
                })
                .unzip()
        })
        .unzip();

    let total: u64 = (0..size as usize)
        .into_par_iter()
        .map(|i| {
            let mut order: Vec<u32> = (0..members.len() as u32).collect();
            order.sort_unstable_by_key(|&j| views[i][j as usize]);
            let mut counts = vec![0u32; 1 << params.v];
            let mut best_sum = 0u64;
            for group in order.chunk_by(|&x, &y| views[i][x as usize] == views[i][y as usize]) {
                let mut best = 0u32;
                for (i_prime, row) in tags.iter().enumerate() {
                    if i_prime == i {
                        continue;
                    }
                    for &j in group {
                        let slot = &mut counts[row[j as usize] as usize];
                        *slot += 1;
                        best = best.max(*slot);
                    }
                    for &j in group {
                        counts[row[j as usize] as usize] = 0;
                    }
                }
                best_sum += best as u64;
            }
            best_sum
        })
        .sum();
    let denom = members.len() as u64 * size;
    Ok(BigRational::new(BigInt::from(total), BigInt::from(denom)))
}

/// `2^(n - v - m)` as a rational, the robustness bound for the new
/// construction.
pub fn robustness_bound(params: &ExtractorParams, m: usize) -> BigRational {
    let e = params.n as i64 - params.v as i64 - m as i64;
    pow2(e)
}

pub(crate) fn pow2(e: i64) -> BigRational {
    let one = BigInt::from(1);
    if e >= 0 {
        BigRational::from_integer(one << e as usize)
    } else {
        BigRational::new(one.clone(), one << (-e) as usize)
    }
}
