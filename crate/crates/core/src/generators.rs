//! Instance generators: three adversarial lower-bound families and a
//! configurable random family.
//!
//! The lower-bound families deliberately break the standing model (rates
//! above the hint, lengths above the budget, or duplicated hints), so they
//! are marked adversarial and the harness skips Assumption-1 validation for
//! them. The random family always satisfies Assumption 1: distinct hints,
//! distinct `t·h` bounds, and lengths within the budget.

use crate::model::{Article, InformationProfile, Instance, ModelError, Segment};
use crate::rat::rat_u64;
use crate::rng::stream_rng;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// ChaCha stream id for generator randomness.
const STREAM_GENERATOR: u64 = 9;

/// Errors raised by instance generators.
#[derive(Debug, Error)]
pub enum GenError {
    #[error("parameter {name} invalid: {detail}")]
    InvalidParam { name: &'static str, detail: String },
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn shuffled_priority(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut priority: Vec<usize> = (0..n).collect();
    priority.shuffle(rng);
    priority
}

/// Family with n=l² equal-hint articles where a hidden rate spike makes
/// hint-guided reading fail by a factor of order sqrt(n).
///
/// Budget T=n, lengths t=n, hints h=n. The l type-A articles spike to n² at
/// step l; the rest spike to n² at the last step. Rates exceed the hint, so
/// the instance is adversarial by construction.
pub fn gen_lemma3(l: u64, seed: u64) -> Result<Instance, GenError> {
    if l < 2 {
        return Err(GenError::InvalidParam {
            name: "l",
            detail: format!("must be at least 2, got {l}"),
        });
    }
    if l > 65_535 {
        return Err(GenError::InvalidParam {
            name: "l",
            detail: format!("must be at most 65535 to keep rates in range, got {l}"),
        });
    }
    let n = l * l;
    let spike = n * n;
    let mut rng = stream_rng(seed, STREAM_GENERATOR);
    let type_a = InformationProfile::new(segments_with_spike(n, l, spike))?;
    let type_b = InformationProfile::new(segments_with_spike(n, n, spike))?;
    let mut articles = Vec::with_capacity(n as usize);
    for i in 0..n {
        let profile = if i < l { type_a.clone() } else { type_b.clone() };
        articles.push(Article::new(n, profile)?);
    }
    let priority = shuffled_priority(n as usize, &mut rng);
    Ok(Instance::new(
        n,
        articles,
        priority,
        true,
        format!("lemma3-l{l}-s{seed}"),
    )?)
}

/// Profile of `total` unit steps at rate 1 except a `spike` at step `at`.
fn segments_with_spike(total: u64, at: u64, spike: u64) -> Vec<Segment> {
    let mut segments = Vec::new();
    if at > 1 {
        segments.push(Segment {
            len: rat_u64(at - 1),
            rate: 1,
        });
    }
    segments.push(Segment {
        len: rat_u64(1),
        rate: spike,
    });
    if at < total {
        segments.push(Segment {
            len: rat_u64(total - at),
            rate: 1,
        });
    }
    segments
}

/// Family where articles are longer than the budget and the only valuable
/// step is hidden mid-article in a single distinguished article.
///
/// Budget T=2, lengths t=3, hints h=M=n. The distinguished article (seeded
/// random index) has rates [1, M, 1]; all others have [1, 1, M].
pub fn gen_lemma4(n: usize, seed: u64) -> Result<Instance, GenError> {
    if n < 2 {
        return Err(GenError::InvalidParam {
            name: "n",
            detail: format!("must be at least 2, got {n}"),
        });
    }
    let m = n as u64;
    let mut rng = stream_rng(seed, STREAM_GENERATOR);
    let k = rng.gen_range(0..n);
    let mut articles = Vec::with_capacity(n);
    for i in 0..n {
        let rates = if i == k { [1, m, 1] } else { [1, 1, m] };
        articles.push(Article::new(m, InformationProfile::from_steps(&rates)?)?);
    }
    let priority = shuffled_priority(n, &mut rng);
    Ok(Instance::new(
        2,
        articles,
        priority,
        true,
        format!("lemma4-n{n}-s{seed}"),
    )?)
}

/// Family where hints are maximally inaccurate for all but one article.
///
/// Budget T=2, lengths t=2, hints h=c_acc. The distinguished article (seeded
/// random index) has rates [1, c_acc]; all others have [1, 1]. The instance
/// accuracy is exactly c_acc.
pub fn gen_lemma5(n: usize, c_acc: u64, seed: u64) -> Result<Instance, GenError> {
    if n < 2 {
        return Err(GenError::InvalidParam {
            name: "n",
            detail: format!("must be at least 2, got {n}"),
        });
    }
    if c_acc < 1 {
        return Err(GenError::InvalidParam {
            name: "c_acc",
            detail: "must be at least 1".to_string(),
        });
    }
    let mut rng = stream_rng(seed, STREAM_GENERATOR);
    let k = rng.gen_range(0..n);
    let mut articles = Vec::with_capacity(n);
    for i in 0..n {
        let rates = if i == k { [1, c_acc] } else { [1, 1] };
        articles.push(Article::new(
            c_acc,
            InformationProfile::from_steps(&rates)?,
        )?);
    }
    let priority = shuffled_priority(n, &mut rng);
    Ok(Instance::new(
        2,
        articles,
        priority,
        true,
        format!("lemma5-n{n}-c{c_acc}-s{seed}"),
    )?)
}

/// Article length distribution for the random family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthDistribution {
    Fixed(u64),
    Uniform { min: u64, max: u64 },
}

/// Profile shape for the random family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileShape {
    /// Rates equal the hint everywhere; accuracy is exactly 1.
    Constant,
    /// A non-increasing staircase hitting a per-article accuracy target
    /// exactly (hint-rate steps, one filler step, then rate-1 steps).
    NonIncreasingSteps,
    /// Geometrically decaying rates tuned toward the accuracy target.
    NonIncreasingGeometric,
}

/// Parameters of the random instance family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomParams {
    pub n: usize,
    pub budget: u64,
    pub hint_min: u64,
    pub hint_max: u64,
    pub length: LengthDistribution,
    pub shape: ProfileShape,
    /// Inclusive range the per-article accuracy targets are drawn from (on a
    /// grid of thousandths). The realized instance accuracy is the maximum
    /// drawn target after clamping to what the shape can express.
    #[serde(default = "default_accuracy_range")]
    pub accuracy: [f64; 2],
}

fn default_accuracy_range() -> [f64; 2] {
    [1.0, 1.0]
}

const MAX_DISTINCTNESS_RETRIES: usize = 200;

/// Generates a seeded random instance satisfying Assumption 1.
pub fn gen_random(params: &RandomParams, seed: u64) -> Result<Instance, GenError> {
    validate_params(params)?;
    let mut rng = stream_rng(seed, STREAM_GENERATOR);
    let n = params.n;

    let span = params.hint_max - params.hint_min + 1;
    let hints: Vec<u64> = rand::seq::index::sample(&mut rng, span as usize, n)
        .into_iter()
        .map(|offset| params.hint_min + offset as u64)
        .collect();

    let lengths = draw_distinct_product_lengths(params, &hints, &mut rng)?;

    let acc_lo = ((params.accuracy[0] * 1000.0).ceil() as u64).max(1000);
    let acc_hi = (params.accuracy[1] * 1000.0).floor() as u64;
    let mut articles = Vec::with_capacity(n);
    for (&hint, &length) in hints.iter().zip(&lengths) {
        let target_millis = if acc_lo >= acc_hi {
            acc_lo
        } else {
            rng.gen_range(acc_lo..=acc_hi)
        };
        let profile = build_profile(params.shape, hint, length, target_millis)?;
        articles.push(Article::new(hint, profile)?);
    }
    let priority = shuffled_priority(n, &mut rng);
    Ok(Instance::new(
        params.budget,
        articles,
        priority,
        false,
        format!("random-n{n}-s{seed}"),
    )?)
}

fn validate_params(params: &RandomParams) -> Result<(), GenError> {
    if params.n == 0 {
        return Err(GenError::InvalidParam {
            name: "n",
            detail: "must be at least 1".to_string(),
        });
    }
    if params.budget == 0 {
        return Err(GenError::InvalidParam {
            name: "budget",
            detail: "must be at least 1".to_string(),
        });
    }
    if params.hint_min < 1 || params.hint_max < params.hint_min {
        return Err(GenError::InvalidParam {
            name: "hint range",
            detail: format!("bad range [{}, {}]", params.hint_min, params.hint_max),
        });
    }
    let span = params.hint_max - params.hint_min + 1;
    if (span as u128) < params.n as u128 {
        return Err(GenError::Infeasible(format!(
            "hint range [{}, {}] too small for {} distinct hints",
            params.hint_min, params.hint_max, params.n
        )));
    }
    if span > u32::MAX as u64 {
        return Err(GenError::InvalidParam {
            name: "hint range",
            detail: "span must fit in 32 bits".to_string(),
        });
    }
    let (len_min, len_max) = match params.length {
        LengthDistribution::Fixed(v) => (v, v),
        LengthDistribution::Uniform { min, max } => (min, max),
    };
    if len_min < 1 || len_max < len_min {
        return Err(GenError::InvalidParam {
            name: "length",
            detail: format!("bad range [{len_min}, {len_max}]"),
        });
    }
    if len_max > params.budget {
        return Err(GenError::Infeasible(format!(
            "maximum length {len_max} exceeds budget {}",
            params.budget
        )));
    }
    if !(params.accuracy[0].is_finite() && params.accuracy[1].is_finite())
        || params.accuracy[0] > params.accuracy[1]
        || params.accuracy[1] < 1.0
    {
        return Err(GenError::InvalidParam {
            name: "accuracy",
            detail: format!(
                "range [{}, {}] must be ordered and allow C >= 1",
                params.accuracy[0], params.accuracy[1]
            ),
        });
    }
    if matches!(params.shape, ProfileShape::Constant) && params.accuracy[0] > 1.0 {
        return Err(GenError::Infeasible(
            "constant profiles always have accuracy 1, which is outside the requested range"
                .to_string(),
        ));
    }
    Ok(())
}

fn draw_distinct_product_lengths(
    params: &RandomParams,
    hints: &[u64],
    rng: &mut impl Rng,
) -> Result<Vec<u64>, GenError> {
    match params.length {
        LengthDistribution::Fixed(v) => Ok(vec![v; params.n]),
        LengthDistribution::Uniform { min, max } => {
            for _ in 0..MAX_DISTINCTNESS_RETRIES {
                let lengths: Vec<u64> =
                    (0..params.n).map(|_| rng.gen_range(min..=max)).collect();
                let mut products: Vec<u128> = hints
                    .iter()
                    .zip(&lengths)
                    .map(|(&h, &t)| h as u128 * t as u128)
                    .collect();
                products.sort_unstable();
                if products.windows(2).all(|w| w[0] != w[1]) {
                    return Ok(lengths);
                }
            }
            Err(GenError::Infeasible(format!(
                "could not draw distinct t*h bounds in {MAX_DISTINCTNESS_RETRIES} attempts"
            )))
        }
    }
}

fn build_profile(
    shape: ProfileShape,
    hint: u64,
    length: u64,
    target_millis: u64,
) -> Result<InformationProfile, GenError> {
    match shape {
        ProfileShape::Constant => Ok(InformationProfile::new(vec![Segment {
            len: rat_u64(length),
            rate: hint,
        }])?),
        ProfileShape::NonIncreasingSteps => {
            let total = staircase_total(hint, length, target_millis);
            Ok(staircase_profile(hint, length, total)?)
        }
        ProfileShape::NonIncreasingGeometric => geometric_profile(hint, length, target_millis),
    }
}

/// Total information with average rate hint/(target_millis/1000), clamped to
/// what rates in [1, hint] can realize.
fn staircase_total(hint: u64, length: u64, target_millis: u64) -> u64 {
    let ideal = (hint as u128 * length as u128 * 1000 + target_millis as u128 / 2)
        / target_millis as u128;
    let clamped = ideal.clamp(length as u128, hint as u128 * length as u128);
    clamped as u64
}

/// Non-increasing integer staircase of `length` steps in [1, hint] summing to
/// exactly `total`: full-rate steps, one filler step, then rate-1 steps.
fn staircase_profile(hint: u64, length: u64, total: u64) -> Result<InformationProfile, ModelError> {
    debug_assert!(total >= length && total <= hint * length);
    if hint == 1 || total == length {
        return InformationProfile::new(vec![Segment {
            len: rat_u64(length),
            rate: 1.max(total / length),
        }]);
    }
    let surplus = total - length;
    let full = surplus / (hint - 1);
    let rem = surplus % (hint - 1);
    let mut segments = Vec::new();
    if full == length {
        return InformationProfile::new(vec![Segment {
            len: rat_u64(length),
            rate: hint,
        }]);
    }
    if full > 0 {
        segments.push(Segment {
            len: rat_u64(full),
            rate: hint,
        });
    }
    segments.push(Segment {
        len: rat_u64(1),
        rate: 1 + rem,
    });
    let ones = length - full - 1;
    if ones > 0 {
        segments.push(Segment {
            len: rat_u64(ones),
            rate: 1,
        });
    }
    InformationProfile::new(segments)
}

/// Rates max(1, floor(hint * q^j)) with q bisected so the total information
/// approaches the accuracy target.
fn geometric_profile(
    hint: u64,
    length: u64,
    target_millis: u64,
) -> Result<InformationProfile, GenError> {
    let target_total = hint as f64 * length as f64 * 1000.0 / target_millis as f64;
    let rates_for = |q: f64| -> Vec<u64> {
        let mut power = 1.0f64;
        let mut rates = Vec::with_capacity(length as usize);
        for _ in 0..length {
            rates.push(((hint as f64 * power).floor() as u64).max(1));
            power *= q;
        }
        rates
    };
    let total_of = |rates: &[u64]| rates.iter().map(|&r| r as f64).sum::<f64>();
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if total_of(&rates_for(mid)) < target_total {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let rates = rates_for(hi);
    Ok(InformationProfile::from_steps(&rates)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{accuracy, validate_instance};
    use crate::rat::rat;

    #[test]
    fn lemma3_structure() {
        let inst = gen_lemma3(3, 1).unwrap();
        assert_eq!(inst.len(), 9);
        assert_eq!(inst.budget(), 9);
        assert!(inst.adversarial());
        let spikes_at_3 = inst
            .articles()
            .iter()
            .filter(|a| a.info_gain(&rat(3, 1)).unwrap() == rat(83, 1))
            .count();
        assert_eq!(spikes_at_3, 3);
        for a in inst.articles() {
            assert_eq!(a.hint(), 9);
            assert_eq!(a.length(), &rat(9, 1));
            assert_eq!(a.profile().max_rate(), 81);
        }
        assert!(!validate_instance(&inst, false).is_valid());
    }

    #[test]
    fn lemma3_smallest_case() {
        let inst = gen_lemma3(2, 0).unwrap();
        assert_eq!(inst.len(), 4);
        assert_eq!(inst.budget(), 4);
        let type_a = inst
            .articles()
            .iter()
            .filter(|a| a.profile().rate_after(&rat(1, 1)) == Some(16))
            .count();
        assert_eq!(type_a, 2);
        assert!(gen_lemma3(1, 0).is_err());
    }

    #[test]
    fn lemma4_structure() {
        let inst = gen_lemma4(4, 7).unwrap();
        assert_eq!(inst.budget(), 2);
        assert!(inst.adversarial());
        let distinguished: Vec<usize> = inst
            .articles()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.profile().rate_after(&rat(1, 1)) == Some(4))
            .map(|(i, _)| i)
            .collect();
        assert_eq!(distinguished.len(), 1);
        for a in inst.articles() {
            assert_eq!(a.length(), &rat(3, 1));
            assert_eq!(a.hint(), 4);
            assert_eq!(a.total_info(), rat(6, 1));
        }
        assert!(!validate_instance(&inst, true).is_valid());
        assert!(gen_lemma4(1, 0).is_err());
    }

    #[test]
    fn lemma5_structure_and_accuracy() {
        let inst = gen_lemma5(5, 10, 3).unwrap();
        assert_eq!(inst.budget(), 2);
        assert_eq!(accuracy(&inst).unwrap().c_value, rat(10, 1));
        let spiked = inst
            .articles()
            .iter()
            .filter(|a| a.total_info() == rat(11, 1))
            .count();
        assert_eq!(spiked, 1);

        let degenerate = gen_lemma5(3, 1, 0).unwrap();
        assert_eq!(accuracy(&degenerate).unwrap().c_value, rat(1, 1));
        for a in degenerate.articles() {
            assert_eq!(a.total_info(), rat(2, 1));
        }
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(gen_lemma3(4, 9).unwrap(), gen_lemma3(4, 9).unwrap());
        assert_eq!(gen_lemma4(6, 9).unwrap(), gen_lemma4(6, 9).unwrap());
        assert_eq!(gen_lemma5(6, 3, 9).unwrap(), gen_lemma5(6, 3, 9).unwrap());
        let params = RandomParams {
            n: 12,
            budget: 30,
            hint_min: 1,
            hint_max: 40,
            length: LengthDistribution::Uniform { min: 2, max: 8 },
            shape: ProfileShape::NonIncreasingSteps,
            accuracy: [1.0, 3.0],
        };
        assert_eq!(
            gen_random(&params, 11).unwrap(),
            gen_random(&params, 11).unwrap()
        );
        assert_ne!(
            gen_random(&params, 11).unwrap(),
            gen_random(&params, 12).unwrap()
        );
    }

    #[test]
    fn random_constant_has_accuracy_one() {
        let params = RandomParams {
            n: 8,
            budget: 20,
            hint_min: 2,
            hint_max: 50,
            length: LengthDistribution::Uniform { min: 1, max: 6 },
            shape: ProfileShape::Constant,
            accuracy: [1.0, 1.0],
        };
        let inst = gen_random(&params, 5).unwrap();
        assert_eq!(accuracy(&inst).unwrap().c_value, rat(1, 1));
        assert!(validate_instance(&inst, true).is_valid());
        assert!(!inst.adversarial());
    }

    #[test]
    fn random_geometric_is_non_increasing() {
        let params = RandomParams {
            n: 50,
            budget: 100,
            hint_min: 5,
            hint_max: 500,
            length: LengthDistribution::Uniform { min: 3, max: 12 },
            shape: ProfileShape::NonIncreasingGeometric,
            accuracy: [1.0, 4.0],
        };
        let inst = gen_random(&params, 21).unwrap();
        assert!(inst.articles().iter().all(Article::non_increasing));
        assert!(validate_instance(&inst, true).is_valid());
    }

    #[test]
    fn random_steps_hit_accuracy_targets() {
        let params = RandomParams {
            n: 10,
            budget: 40,
            hint_min: 10,
            hint_max: 99,
            length: LengthDistribution::Uniform { min: 4, max: 10 },
            shape: ProfileShape::NonIncreasingSteps,
            accuracy: [2.0, 2.0],
        };
        let inst = gen_random(&params, 2).unwrap();
        let c = accuracy(&inst).unwrap().c_value;
        let c_f = crate::rat::rat_to_f64(&c);
        assert!((c_f - 2.0).abs() < 0.15, "accuracy {c_f} far from target 2");
        assert!(inst.articles().iter().all(Article::non_increasing));
    }

    #[test]
    fn random_rejects_infeasible_params() {
        let base = RandomParams {
            n: 10,
            budget: 20,
            hint_min: 1,
            hint_max: 5,
            length: LengthDistribution::Fixed(3),
            shape: ProfileShape::Constant,
            accuracy: [1.0, 1.0],
        };
        assert!(matches!(
            gen_random(&base, 0),
            Err(GenError::Infeasible(_))
        ));

        let too_long = RandomParams {
            hint_max: 50,
            length: LengthDistribution::Uniform { min: 10, max: 30 },
            ..base.clone()
        };
        assert!(gen_random(&too_long, 0).is_err());

        let constant_c2 = RandomParams {
            hint_max: 50,
            accuracy: [2.0, 3.0],
            ..base.clone()
        };
        assert!(gen_random(&constant_c2, 0).is_err());

        let bad_range = RandomParams {
            hint_max: 50,
            accuracy: [3.0, 2.0],
            ..base
        };
        assert!(gen_random(&bad_range, 0).is_err());
    }

    #[test]
    fn staircase_sums_exactly() {
        for hint in [1u64, 2, 7, 30] {
            for length in [1u64, 2, 5, 9] {
                for total in [length, hint * length, (length + hint * length) / 2] {
                    let p = staircase_profile(hint, length, total).unwrap();
                    assert_eq!(p.total_length(), rat_u64(length));
                    assert_eq!(p.total_info(), rat_u64(total));
                    assert!(p.is_non_increasing());
                    assert!(p.max_rate() <= hint);
                }
            }
        }
    }
}
