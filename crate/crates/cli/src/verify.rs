//! `rfext verify`: exhaustive and statistical checks, one line per property.

use std::io::Write;
use std::sync::Arc;

use clap::{Args, ValueEnum};
use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rfext_core::adversary::{
    exhaustive_attack, optimal_forgery_probability, robustness_bound, run_attack_experiment, FlatDistribution,
};
use rfext_core::oracle::{
    bad_set_census, check_chain_rule, check_sd_switch, extractor_output_distance, fuzzy_output_distance,
    mac_root_census, pairwise_collision_max, random_joint, random_marginal, sketch_min_entropy, within_sqrt_pow2,
    CensusMode,
};
use rfext_core::{
    code_from_key, derive_params, Basis, BitString, ExtractorParams, FieldSpec, FuzzyExtractor, FuzzyParams, Variant,
};

use crate::{UsageError, EXIT_OK, EXIT_REJECT};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Field,
    Sketch,
    Uniformity,
    Robustness,
    Mac,
    Lemmas,
    Attack,
    All,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    /// Secret length for the uniformity (4..=12) and robustness (4..=10)
    /// suites. Both default to 8.
    #[arg(long)]
    pub n: Option<usize>,
    /// Random tables for the lemma suite.
    #[arg(long, default_value_t = 10_000)]
    pub tables: u64,
    /// Monte Carlo trials for the attack suite.
    #[arg(long, default_value_t = 20_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<T>(r: rfext_core::Result<T>) -> Result<T, String> {
    r.map_err(|err| err.to_string())
}

fn inv_pow2(k: usize) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << k)
}

struct Property {
    name: &'static str,
    run: Box<dyn Fn() -> Outcome>,
}

fn prop(name: &'static str, run: impl Fn() -> Outcome + 'static) -> Property {
    Property { name, run: Box::new(run) }
}

fn field_suite(seed: u64) -> Vec<Property> {
    vec![
        prop("field.ring_laws", move || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut checked = 0;
            for k in [4usize, 8, 16, 32, 64, 128] {
                for basis in [Basis::Standard, Basis::ParitySplit] {
                    let f = e(FieldSpec::with_default_modulus(k, basis))?;
                    for _ in 0..64 {
                        let (a, b, c) = (f.random(&mut rng), f.random(&mut rng), f.random(&mut rng));
                        check(&a * &b == &b * &a, || format!("k={k}: commutativity"))?;
                        check(&(&a * &b) * &c == &a * &(&b * &c), || format!("k={k}: associativity"))?;
                        check(&a * &(&b + &c) == &(&a * &b) + &(&a * &c), || format!("k={k}: distributivity"))?;
                        check(a.is_zero() || (&a * &e(a.inv())?).is_one(), || format!("k={k}: inverse"))?;
                        check(&a.div_by_x() * &f.x() == a, || format!("k={k}: div_by_x"))?;
                        checked += 1;
                    }
                }
            }
            Ok(format!("{checked} triples over 6 degrees and 2 bases"))
        }),
        prop("field.basis_change", move || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
            for k in [8usize, 16, 64] {
                let f = e(FieldSpec::standard(k))?;
                for _ in 0..64 {
                    let (a, b) = (f.random(&mut rng), f.random(&mut rng));
                    let to = |x: &rfext_core::FieldElement| x.change_basis(Basis::ParitySplit);
                    check(e(to(&(&a * &b)))? == &e(to(&a))? * &e(to(&b))?, || format!("k={k}: not multiplicative"))?;
                    check(e(e(to(&a))?.change_basis(Basis::Standard))? == a, || format!("k={k}: not invertible"))?;
                }
            }
            Ok("standard <-> parity-split is a field isomorphism".into())
        }),
        prop("field.half_swap", || {
            let mut checked = 0;
            for k in [4usize, 8] {
                let f = e(FieldSpec::with_default_modulus(k, Basis::ParitySplit))?;
                let h = k / 2;
                for z in f.elements().filter(|z| !z.constant_coefficient()) {
                    check(z.bits().slice(0, h) == z.div_by_x().bits().slice(h, k), || {
                        format!("k={k}, z={}", z.to_hex())
                    })?;
                    checked += 1;
                }
            }
            Ok(format!("{checked} elements with zero constant coefficient, k in {{4, 8}}"))
        }),
    ]
}

fn sketch_suite(seed: u64) -> Vec<Property> {
    vec![
        prop("sketch.recovery", || {
            let code = e(code_from_key("hamming-7-1"))?;
            for wv in 0..128u64 {
                let w = BitString::from_u64(wv, 7);
                let s = e(code.ss(&w))?;
                check(e(code.reconstruct(&s, &e(code.ss_perp(&w))?))? == w, || format!("reconstruct w={w}"))?;
                for flip in 0..7 {
                    let mut wp = w.clone();
                    wp.flip(flip);
                    check(e(code.srec(&wp, &s))? == Some(w.clone()), || format!("srec w={w} flip={flip}"))?;
                }
            }
            Ok("[7,4,3]: every w recovered from every single-bit error".into())
        }),
        prop("sketch.min_distance", || {
            let mut found = Vec::new();
            for key in ["hamming-7-1", "bch-15-2", "bch-15-3"] {
                let code = e(code_from_key(key))?;
                let d = e(code.min_distance())?;
                check(d > 2 * code.t(), || format!("{key}: distance {d}"))?;
                found.push(format!("{key}: d={d}"));
            }
            Ok(found.join(", "))
        }),
        prop("sketch.entropy_loss", move || {
            let code = e(code_from_key("hamming-7-1"))?;
            let k = code.k() as i64;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut sources = vec![FlatDistribution::uniform(7), e(FlatDistribution::with_zero_positions(7, vec![0, 3]))?];
            for m in [4, 5, 6] {
                sources.push(e(FlatDistribution::random_subset(7, m, &mut rng))?);
            }
            for dist in &sources {
                let h = e(sketch_min_entropy(&code, dist))?;
                let m = dist.m() as i64;
                check(h.at_least(m - k), || format!("{}: {:.3} < {}", dist.describe(), h.bits(), m - k))?;
            }
            Ok(format!("{} sources, residual entropy >= m - k", sources.len()))
        }),
    ]
}

fn uniformity_suite(n: usize, seed: u64) -> Vec<Property> {
    vec![
        prop("uniformity.extractor", move || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut cases = 0;
            for m in n / 2 + 2..=n {
                let zeros = n - m;
                let sources = [
                    e(FlatDistribution::with_zero_positions(n, (0..zeros).collect()))?,
                    e(FlatDistribution::with_zero_positions(n, (n / 2..n / 2 + zeros).collect()))?,
                    e(FlatDistribution::random_subset(n, m, &mut rng))?,
                ];
                for dist in &sources {
                    for v in 1..n / 2 {
                        let p = e(ExtractorParams::with_layout(Variant::New, n, m, v, n / 2 - v))?;
                        let sd = e(extractor_output_distance(&p, dist))?;
                        check(within_sqrt_pow2(&sd, n as i64 / 2 - m as i64), || {
                            format!("m={m} v={v} {}: SD={sd}", dist.describe())
                        })?;
                        cases += 1;
                    }
                }
            }
            Ok(format!("n={n}: {cases} cases with SD <= 2^((n/2-m)/2)"))
        }),
        prop("uniformity.fuzzy", || {
            let code = Arc::new(e(code_from_key("hamming-7-1"))?);
            let fx = e(FuzzyExtractor::new(e(FuzzyParams::with_layout(code, 7, 1, 1, false))?))?;
            let p = fx.params();
            for dist in [FlatDistribution::uniform(7), e(FlatDistribution::with_zero_positions(7, vec![6]))?] {
                let sd = e(fuzzy_output_distance(&fx, &dist))?;
                let exp = p.n_prime as i64 / 2 - dist.m() as i64 + p.k as i64;
                check(within_sqrt_pow2(&sd, exp), || format!("{}: SD={sd}", dist.describe()))?;
            }
            Ok("[7,4,3]: SD <= 2^((n'/2-m+k)/2)".into())
        }),
    ]
}

fn robustness_suite(n: usize, seed: u64) -> Vec<Property> {
    vec![
        prop("robustness.bad_sets", move || {
            let mut transcripts = 0;
            for v in 1..n / 2 {
                let p = e(ExtractorParams::with_layout(Variant::New, n, n, v, n / 2 - v))?;
                let c = e(bad_set_census(&p))?;
                check(c.deviations == 0 && c.same_seed_nonzero == 0, || format!("v={v}: {c:?}"))?;
                transcripts += c.transcripts;
            }
            Ok(format!("n={n}: {transcripts} transcripts, every count = 2^(n/2-v)"))
        }),
        prop("robustness.optimal_forgery", move || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut sources = vec![FlatDistribution::uniform(n)];
            for m in [n - 1, n - 2] {
                sources.push(e(FlatDistribution::with_zero_positions(n, (n / 2..n / 2 + n - m).collect()))?);
                sources.push(e(FlatDistribution::random_subset(n, m, &mut rng))?);
            }
            let mut worst = BigRational::zero();
            for dist in &sources {
                for v in 1..n / 2 {
                    let p = e(ExtractorParams::with_layout(Variant::New, n, dist.m(), v, n / 2 - v))?;
                    let opt = e(optimal_forgery_probability(&p, dist))?;
                    let bound = robustness_bound(&p, dist.m());
                    check(opt <= bound, || format!("v={v} {}: {opt} > {bound}", dist.describe()))?;
                    worst = worst.max(opt / bound);
                }
            }
            Ok(format!("n={n}: optimal forger <= 2^(n-v-m), max ratio {worst}"))
        }),
    ]
}

fn mac_suite() -> Vec<Property> {
    vec![prop("mac.root_census", || {
        let mut summary = Vec::new();
        for (k, l) in [(4, 2), (4, 4), (6, 2)] {
            let c = e(mac_root_census(&e(FieldSpec::standard(k))?, l, CensusMode::Exhaustive))?;
            check(c.violations == 0 && c.max_count <= c.bound && c.leading_terms_ok, || format!("{c:?}"))?;
            summary.push(format!("GF(2^{k}) L={l}: max {} <= {}", c.max_count, c.bound));
        }
        Ok(summary.join("; "))
    })]
}

fn lemma_suite(tables: u64, seed: u64) -> Vec<Property> {
    vec![
        prop("lemmas.sd_switch", move || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for t in 0..tables {
                let joint = random_joint(4, 4, &mut rng);
                let (c, d) = (random_marginal(4, &mut rng), random_marginal(4, &mut rng));
                check(check_sd_switch(&joint, &c, &d).holds, || format!("table {t}"))?;
            }
            Ok(format!("{tables} tables"))
        }),
        prop("lemmas.chain_rule", move || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
            for t in 0..tables {
                check(check_chain_rule(&random_joint(4, 4, &mut rng)).holds, || format!("table {t}"))?;
            }
            Ok(format!("{tables} tables"))
        }),
        prop("lemmas.pairwise_collision", || {
            for k in [4usize, 6, 8] {
                let rep = e(pairwise_collision_max(&e(FieldSpec::standard(k))?))?;
                check(rep.max == inv_pow2(k), || format!("k={k}: {}", rep.max))?;
            }
            Ok("max collision = 2^-k for k in {4, 6, 8}".into())
        }),
    ]
}

fn split(variant: Variant, n: usize, m: usize, v: usize, ell: usize) -> Result<ExtractorParams, String> {
    Ok(e(ExtractorParams::with_layout(variant, n, m, v, ell))?.with_basis(Basis::ParitySplit))
}

fn attack_suite(trials: u64, seed: u64) -> Vec<Property> {
    let monte_carlo = move |variant: Variant| -> Outcome {
        let int = Rational64::from_integer;
        let p = e(derive_params(56, 54, int(2), int(1), variant))?.with_basis(Basis::ParitySplit);
        let rep = e(run_attack_experiment(&p, &e(FlatDistribution::top_of_b_zero(&p))?, trials, seed))?;
        check(rep.passed, || format!("rate {:.5} vs bound {:.5}, stderr {:.5}", rep.rate, rep.bound, rep.stderr))?;
        Ok(format!("n=56 {variant}: rate {:.5}, bound {:.5}, {trials} trials", rep.rate, rep.bound))
    };
    vec![
        prop("attack.delta_free", || {
            let p = split(Variant::DkrsPost, 12, 12, 4, 4)?;
            let rep = e(exhaustive_attack(&p, &FlatDistribution::uniform(12)))?;
            check(rep.success_and_even() == inv_pow2(1) && rep.success_given_even().is_one(), || {
                format!("Pr[even]={} Pr[win|even]={}", rep.even_probability(), rep.success_given_even())
            })?;
            Ok("n=12 exhaustive: Pr[win and even] = 1/2, Pr[win | even] = 1".into())
        }),
        prop("attack.guess_contract", || {
            let p = split(Variant::DkrsPost, 14, 12, 6, 2)?;
            let rep = e(exhaustive_attack(&p, &e(FlatDistribution::top_of_b_zero(&p))?))?;
            check(rep.success_given_even() == inv_pow2(rep.guesses), || {
                format!("{} guesses, Pr[win | even] = {}", rep.guesses, rep.success_given_even())
            })?;
            Ok(format!("n=14: Pr[win | even] = 2^-{}", rep.guesses))
        }),
        prop("attack.baseline", move || monte_carlo(Variant::DkrsPost)),
        prop("attack.new_construction", move || monte_carlo(Variant::New)),
    ]
}

fn size(n: Option<usize>, max: usize, suite: &str) -> Result<usize, UsageError> {
    let n = n.unwrap_or(8);
    if n < 4 || n > max || n % 2 == 1 {
        return Err(UsageError(format!("--n for the {suite} suite must be even and in 4..={max}, got {n}")));
    }
    Ok(n)
}

pub fn run(a: &VerifyArgs, out: &mut dyn Write) -> Result<u8, UsageError> {
    let want = |s: Suite| a.suite == s || a.suite == Suite::All;
    let mut props = Vec::new();
    if want(Suite::Field) {
        props.extend(field_suite(a.seed));
    }
    if want(Suite::Sketch) {
        props.extend(sketch_suite(a.seed));
    }
    if want(Suite::Uniformity) {
        props.extend(uniformity_suite(size(a.n, 12, "uniformity")?, a.seed));
    }
    if want(Suite::Robustness) {
        props.extend(robustness_suite(size(a.n, 10, "robustness")?, a.seed));
    }
    if want(Suite::Mac) {
        props.extend(mac_suite());
    }
    if want(Suite::Lemmas) {
        props.extend(lemma_suite(a.tables, a.seed));
    }
    if want(Suite::Attack) {
        if a.trials == 0 {
            return Err(UsageError("--trials must be at least 1".into()));
        }
        props.extend(attack_suite(a.trials, a.seed));
    }
    let mut failed = 0;
    for p in &props {
        match (p.run)() {
            Ok(detail) => writeln!(out, "PASS {}: {detail}", p.name)?,
            Err(why) => {
                failed += 1;
                writeln!(out, "FAIL {}: {why}", p.name)?;
            }
        }
    }
    writeln!(out, "passed={} failed={failed}", props.len() - failed)?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_REJECT })
}
