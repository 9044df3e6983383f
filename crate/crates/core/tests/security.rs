//! Exhaustive security checks at desk scale.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};

use rfext_core::adversary::{
    exhaustive_attack, optimal_forgery_probability, run_attack_experiment, AttackPlan, FlatDistribution, TauSource,
    Transcript,
};
use rfext_core::oracle::{fuzzy_bad_set_count, fuzzy_output_distance, sd_switch_grid_search, within_sqrt_pow2};
use rfext_core::{code_from_key, derive_params, BitString, Basis, ExtractorParams, FuzzyExtractor, FuzzyParams, Variant};

fn pow2(e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(BigInt::one() << e as usize)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-e) as usize)
    }
}

fn hamming7() -> FuzzyExtractor {
    let code = Arc::new(code_from_key("hamming-7-1").unwrap());
    FuzzyExtractor::new(FuzzyParams::with_layout(code, 7, 1, 1, false).unwrap()).unwrap()
}

#[test]
fn optimal_forger_beats_half_delta_on_the_baseline() {
    // n - v = 8, two guessed bits, so delta = 1/4.
    let p = ExtractorParams::with_layout(Variant::DkrsPost, 14, 12, 6, 2).unwrap().with_basis(Basis::ParitySplit);
    let dist = FlatDistribution::top_of_b_zero(&p).unwrap();
    let plan = AttackPlan::derive(&p, &dist).unwrap();
    assert_eq!(plan.guesses(), 2);
    let opt = optimal_forgery_probability(&p, &dist).unwrap();
    assert!(opt >= pow2(-3), "optimal forger only reaches {opt}");
}

#[test]
fn guess_contract_over_several_regimes() {
    for (n, m, v, ell) in [(12, 12, 4, 4), (14, 12, 6, 2), (16, 15, 6, 4)] {
        let p = ExtractorParams::with_layout(Variant::DkrsPost, n, m, v, ell).unwrap().with_basis(Basis::ParitySplit);
        let rep = exhaustive_attack(&p, &FlatDistribution::top_of_b_zero(&p).unwrap()).unwrap();
        let g = v - ell - (n - m);
        assert_eq!(rep.guesses, g);
        assert_eq!(rep.success_given_even(), pow2(-(g as i64)), "n={n}");
    }
}

#[test]
fn plan_uses_every_visible_bit() {
    let p = derive_params(56, 54, Rational64::from_integer(2), Rational64::from_integer(1), Variant::DkrsPost)
        .unwrap()
        .with_basis(Basis::ParitySplit);
    let plan = AttackPlan::derive(&p, &FlatDistribution::top_of_b_zero(&p).unwrap()).unwrap();
    let count = |f: fn(&TauSource) -> bool| plan.sources().iter().filter(|s| f(s)).count();
    // R fills tau except one position, which is the always-zero bit.
    assert_eq!(count(|s| matches!(s, TauSource::Key(_))) + count(|s| *s == TauSource::Zero), p.ell);
    assert_eq!(count(|s| matches!(s, TauSource::Sigma(_))), p.n - p.m);
    assert_eq!(plan.guesses(), p.v - p.ell - (p.n - p.m));
}

#[test]
fn attack_on_new_construction_finds_little() {
    let p = derive_params(56, 54, Rational64::from_integer(2), Rational64::from_integer(1), Variant::New)
        .unwrap()
        .with_basis(Basis::ParitySplit);
    let rep = run_attack_experiment(&p, &FlatDistribution::top_of_b_zero(&p).unwrap(), 20_000, 77).unwrap();
    assert!(rep.rate <= rep.delta);
    assert!(rep.passed);
}

#[test]
fn fuzzy_output_distance_within_bound() {
    let fx = hamming7();
    let p = fx.params();
    for dist in [
        FlatDistribution::uniform(7),
        FlatDistribution::with_zero_positions(7, vec![6]).unwrap(),
    ] {
        let sd = fuzzy_output_distance(&fx, &dist).unwrap();
        let exp = p.n_prime as i64 / 2 - dist.m() as i64 + p.k as i64;
        assert!(within_sqrt_pow2(&sd, exp), "{}: {sd}", dist.describe());
    }
}

#[test]
fn fuzzy_bad_sets_respect_the_polynomial_bound() {
    let fx = hamming7();
    let p = fx.params();
    let f = fx.field().clone();
    let bound = (p.l as u64 + 2) << (p.n_prime / 2 - p.v);
    let mut probed = 0;
    let mut worst = 0;
    for (wv, iv) in [(0b1011001u64, 1u64), (0b0110110, 3)] {
        let w = BitString::from_u64(wv, 7);
        let (key, helper) = fx.gen_with_seed(&w, &f.from_basis_u64(iv)).unwrap();
        for dv in (0..128u64).filter(|d| d.count_ones() <= 2) {
            let delta = BitString::from_u64(dv, 7);
            for sv in 0..8u64 {
                let s_prime = BitString::from_u64(sv, 3);
                let Some((da, _)) = fx.offsets_from_delta(&delta, &helper.s, &s_prime).unwrap() else { continue };
                if da.is_zero() {
                    continue;
                }
                for ip in f.elements() {
                    for sigma_prime in ["0", "1"] {
                        let Ok(tr) = Transcript::new(
                            helper.i.clone(),
                            helper.sigma.clone(),
                            key.bits().clone(),
                            ip.clone(),
                            sigma_prime.parse().unwrap(),
                            Some((helper.s.clone(), s_prime.clone())),
                        ) else {
                            continue;
                        };
                        let c = fuzzy_bad_set_count(&fx, &tr, &delta).unwrap();
                        assert!(c <= bound, "count {c} > {bound}");
                        worst = worst.max(c);
                        probed += 1;
                    }
                }
            }
        }
    }
    assert!(probed > 0 && worst > 0);
}

#[test]
fn sd_switch_grid_optimum_is_frozen() {
    // Oracle: exhaustive grid search, frozen. The optimum is 2 - 2/steps,
    // reached by A = 1 - B with C the law of A and D a point mass.
    for (steps, frozen) in [(4, "3/2"), (8, "7/4")] {
        let best = sd_switch_grid_search(steps).unwrap();
        assert_eq!(best.ratio, frozen.parse::<BigRational>().unwrap());
        assert_eq!(best.d.support_len(), 1);
        assert_eq!(best.c, best.joint.marginal_first());
    }
    assert!(!pow2(0).is_zero());
}
