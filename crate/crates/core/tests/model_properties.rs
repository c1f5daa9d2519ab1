//! Property tests for the instance model: exact prefix arithmetic, accuracy,
//! truncation, serialization, and validation.

use num_traits::Zero;
use proptest::prelude::*;
use rao_core::model::{
    accuracy, cut_instance, validate_instance, Article, InformationProfile, Instance, Violation,
};
use rao_core::rat::{rat, rat_u64, Rat};

fn profile_strategy() -> impl Strategy<Value = InformationProfile> {
    prop::collection::vec(1u64..=60, 1..12)
        .prop_map(|rates| InformationProfile::from_steps(&rates).unwrap())
}

fn article_strategy() -> impl Strategy<Value = Article> {
    (profile_strategy(), 0u64..=80).prop_map(|(profile, extra)| {
        let hint = profile.max_rate() + extra;
        Article::new(hint, profile).unwrap()
    })
}

fn instance_strategy() -> impl Strategy<Value = Instance> {
    (prop::collection::vec(article_strategy(), 1..6), 1u64..=40)
        .prop_flat_map(|(articles, budget)| {
            let n = articles.len();
            (Just(articles), Just(budget), Just(()).prop_perturb(move |_, mut rng| {
                let mut priority: Vec<usize> = (0..n).collect();
                for i in (1..n).rev() {
                    priority.swap(i, rng.random_range(0..=i));
                }
                priority
            }))
        })
        .prop_map(|(articles, budget, priority)| {
            Instance::new(budget, articles, priority, false, "prop").unwrap()
        })
}

/// Rational in [0, hi] with small denominator, monotone in `num`.
fn point_in(hi: &Rat, num: u64, den: u64) -> Rat {
    let frac = rat(num.min(den * 8) as i64, (den * 8) as i64);
    hi * frac
}

proptest! {
    #[test]
    fn prefix_is_monotone_and_bounded(profile in profile_strategy(), a in 0u64..200, b in 0u64..200, den in 1u64..6) {
        let t = profile.total_length();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let s1 = point_in(&t, lo, den);
        let s2 = point_in(&t, hi, den);
        let p1 = profile.prefix(&s1).unwrap();
        let p2 = profile.prefix(&s2).unwrap();
        prop_assert!(p1 <= p2);
        prop_assert!(p2 <= profile.total_info());
        prop_assert_eq!(profile.prefix(&Rat::zero()).unwrap(), Rat::zero());
        prop_assert_eq!(profile.prefix(&t).unwrap(), profile.total_info());
    }

    #[test]
    fn prefix_gain_is_additive(profile in profile_strategy(), a in 0u64..200, b in 0u64..200, den in 1u64..6) {
        let t = profile.total_length();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let s1 = point_in(&t, lo, den);
        let s2 = point_in(&t, hi, den);
        let whole = profile.prefix(&s2).unwrap();
        let first = profile.prefix(&s1).unwrap();
        let hint = profile.max_rate() + 1;
        let article = Article::new(hint, profile).unwrap();
        prop_assert_eq!(&whole - &first, article.info_gain(&s2).unwrap() - article.info_gain(&s1).unwrap());
    }

    #[test]
    fn from_steps_preserves_totals(rates in prop::collection::vec(1u64..=60, 1..20)) {
        let profile = InformationProfile::from_steps(&rates).unwrap();
        prop_assert_eq!(profile.total_length(), rat_u64(rates.len() as u64));
        prop_assert_eq!(profile.total_info(), rat_u64(rates.iter().sum()));
        // Runs of equal rates collapse into single segments.
        let mut runs = 1;
        for pair in rates.windows(2) {
            if pair[0] != pair[1] {
                runs += 1;
            }
        }
        prop_assert_eq!(profile.segments().len(), runs);
    }

    #[test]
    fn accuracy_is_at_least_one(inst in instance_strategy()) {
        let report = accuracy(&inst).unwrap();
        prop_assert!(report.c_value >= rat(1, 1));
        prop_assert!(report.argmax_article < inst.len());
    }

    #[test]
    fn constant_profiles_have_unit_accuracy(rate in 1u64..=80, len in 1usize..10, n in 1usize..5) {
        let articles: Vec<Article> = (0..n)
            .map(|i| {
                let profile = InformationProfile::from_steps(&vec![rate + i as u64; len]).unwrap();
                Article::new(rate + i as u64, profile).unwrap()
            })
            .collect();
        let priority: Vec<usize> = (0..n).collect();
        let inst = Instance::new(10, articles, priority, false, "const").unwrap();
        prop_assert_eq!(accuracy(&inst).unwrap().c_value, rat(1, 1));
    }

    #[test]
    fn cut_keeps_everything_but_lengths(inst in instance_strategy(), num in 1u64..=8, den in 8u64..=8) {
        let g = rat(num as i64, den as i64);
        let cut = cut_instance(&inst, &g).unwrap();
        let cap = &g * inst.budget_rat();
        prop_assert_eq!(cut.budget(), inst.budget());
        prop_assert_eq!(cut.tie_priority(), inst.tie_priority());
        prop_assert_eq!(cut.len(), inst.len());
        for (orig, shortened) in inst.articles().iter().zip(cut.articles()) {
            prop_assert_eq!(orig.hint(), shortened.hint());
            prop_assert!(shortened.length() <= orig.length());
            prop_assert!(*shortened.length() <= cap);
            // The cut profile agrees with the original on its whole domain.
            prop_assert_eq!(
                shortened.profile().total_info(),
                orig.profile().prefix(shortened.length()).unwrap()
            );
        }
        // Cutting twice changes nothing.
        let twice = cut_instance(&cut, &g).unwrap();
        prop_assert_eq!(&twice, &cut);
    }

    #[test]
    fn instance_json_round_trips(inst in instance_strategy()) {
        let text = serde_json::to_string(&inst).unwrap();
        let mut back: Instance = serde_json::from_str(&text).unwrap();
        back.set_id(inst.id());
        prop_assert_eq!(back, inst);
    }
}

#[test]
fn validation_flags_each_assumption() {
    let sneaky = Article::new(
        3,
        InformationProfile::from_steps(&[5, 1]).unwrap(),
    )
    .unwrap();
    let inst = Instance::new(4, vec![sneaky], vec![0], false, "bad-rate").unwrap();
    let report = validate_instance(&inst, false);
    assert!(report
        .violations
        .iter()
        .any(|v| matches!(v, Violation::RateExceedsHint { article: 0, .. })));

    let twin = |h: u64, rates: &[u64]| {
        Article::new(h, InformationProfile::from_steps(rates).unwrap()).unwrap()
    };
    let inst = Instance::new(
        3,
        vec![twin(5, &[2, 2]), twin(5, &[3]), twin(2, &[1, 1, 1, 1, 1])],
        vec![0, 1, 2],
        false,
        "a1",
    )
    .unwrap();
    let report = validate_instance(&inst, true);
    assert!(report.violations.iter().any(|v| matches!(v, Violation::DuplicateHint { .. })));
    assert!(report.violations.iter().any(|v| matches!(v, Violation::LengthExceedsBudget { article: 2, .. })));
    assert!(report.violations.iter().any(|v| matches!(v, Violation::DuplicateProduct { .. })));
    // The same instance is fine when Assumption 1 is waived.
    assert!(validate_instance(&inst, false).is_valid());
}
