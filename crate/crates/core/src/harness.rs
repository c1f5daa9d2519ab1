//! Random-order Monte Carlo engine.
//!
//! A trial draws a uniform arrival permutation, streams the instance to a
//! freshly built reader under the information-revelation rules, enforces the
//! budget, and records a transcript. Trials are embarrassingly parallel:
//! each gets a seed derived from the master seed by its index, and
//! aggregation is a sequential pass over the index-ordered results, so every
//! estimate is independent of worker count.

use crate::model::{Article, Instance, ValidationReport};
use crate::oracles::{opt_rao_dp, opt_rao_waterfill, solve_kph_instance, OracleError};
use crate::rat::{rat_display, rat_to_f64, Rat};
use crate::readers::{ArrivalDecision, ArrivalInfo, Reader, ReaderFactory, StepDecision};
use crate::rng::{derive_seed, stream_rng, STREAM_PERMUTATION, STREAM_READER};
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A reader breaking its contract or an infeasible transcript.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TrialError {
    #[error("article {article} in round {round}: reading past the remaining budget")]
    BudgetExceeded { article: usize, round: usize },
    #[error("article {article} in round {round}: reading past the article length")]
    LengthExceeded { article: usize, round: usize },
    #[error("article {article} in round {round}: {detail}")]
    InvalidDecision {
        article: usize,
        round: usize,
        detail: String,
    },
    #[error("transcript infeasible: {0}")]
    InfeasibleTranscript(String),
}

/// Errors raised while estimating over many trials.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("instance {instance} fails validation:\n{report}")]
    Validation {
        instance: String,
        report: ValidationReport,
    },
    #[error("trial with seed {seed} failed: {source}")]
    Trial {
        seed: u64,
        #[source]
        source: TrialError,
    },
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Reading length and realized information for one article.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArticleRead {
    pub s: Rat,
    pub info: Rat,
}

/// Everything one trial did: the permutation, per-article reading lengths,
/// and realized information.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    /// `order[k]` is the article arriving in round k+1.
    pub order: Vec<usize>,
    /// Indexed by article id.
    pub reads: Vec<ArticleRead>,
    pub total_info: Rat,
    pub total_time: Rat,
}

impl Transcript {
    /// Builds a transcript from reading lengths, computing information from
    /// the profiles and checking feasibility.
    pub fn from_articles(
        articles: &[Article],
        budget: &Rat,
        order: Vec<usize>,
        s: Vec<Rat>,
    ) -> Result<Self, TrialError> {
        assert_eq!(articles.len(), s.len());
        let mut reads = Vec::with_capacity(s.len());
        let mut total_info = Rat::zero();
        let mut total_time = Rat::zero();
        for (i, (article, s_i)) in articles.iter().zip(s.into_iter()).enumerate() {
            if s_i.is_negative() || &s_i > article.length() {
                return Err(TrialError::LengthExceeded { article: i, round: 0 });
            }
            let info = article
                .info_gain(&s_i)
                .map_err(|e| TrialError::InfeasibleTranscript(e.to_string()))?;
            total_info += &info;
            total_time += &s_i;
            reads.push(ArticleRead { s: s_i, info });
        }
        if &total_time > budget {
            return Err(TrialError::InfeasibleTranscript(format!(
                "total reading time {} exceeds budget {}",
                rat_display(&total_time),
                rat_display(budget)
            )));
        }
        Ok(Self {
            order,
            reads,
            total_info,
            total_time,
        })
    }

    /// [`Transcript::from_articles`] against an instance.
    pub fn from_reads(inst: &Instance, order: Vec<usize>, s: Vec<Rat>) -> Result<Self, TrialError> {
        Self::from_articles(inst.articles(), &inst.budget_rat(), order, s)
    }

    /// Re-verifies feasibility and information consistency post hoc.
    pub fn verify(&self, inst: &Instance) -> Result<(), TrialError> {
        let rebuilt = Self::from_reads(
            inst,
            self.order.clone(),
            self.reads.iter().map(|r| r.s.clone()).collect(),
        )?;
        if rebuilt != *self {
            return Err(TrialError::InfeasibleTranscript(
                "recorded information differs from the profiles".to_string(),
            ));
        }
        Ok(())
    }
}

/// Outcome of a single trial.
#[derive(Debug, Clone)]
pub struct TrialResult {
    pub transcript: Transcript,
    pub seed: u64,
    pub reader: String,
    pub tags: Vec<(String, String)>,
    pub wall: std::time::Duration,
}

/// Runs one seeded trial: uniform permutation, then the revelation loop.
pub fn run_trial(
    inst: &Instance,
    factory: &dyn ReaderFactory,
    seed: u64,
) -> Result<TrialResult, TrialError> {
    let mut perm_rng = stream_rng(seed, STREAM_PERMUTATION);
    let mut order: Vec<usize> = (0..inst.len()).collect();
    order.shuffle(&mut perm_rng);
    run_with_order(inst, factory, order, seed)
}

/// Runs one trial with a fixed arrival order; the seed only feeds the
/// reader's private randomness.
pub fn run_with_order(
    inst: &Instance,
    factory: &dyn ReaderFactory,
    order: Vec<usize>,
    seed: u64,
) -> Result<TrialResult, TrialError> {
    let started = std::time::Instant::now();
    let mut reader_rng = stream_rng(seed, STREAM_READER);
    let budget = inst.budget_rat();
    let mut reader = factory.build(inst.len(), &budget, &mut reader_rng);
    let transcript = drive(inst, reader.as_mut(), &order)?;
    Ok(TrialResult {
        transcript,
        seed,
        reader: factory.id(),
        tags: reader.tags(),
        wall: started.elapsed(),
    })
}

/// Streams the instance to the reader and enforces the contract.
fn drive(inst: &Instance, reader: &mut dyn Reader, order: &[usize]) -> Result<Transcript, TrialError> {
    let budget = inst.budget_rat();
    let mut remaining = budget.clone();
    let mut s = vec![Rat::zero(); inst.len()];

    for (k, &article_idx) in order.iter().enumerate() {
        let round = k + 1;
        let article = &inst.articles()[article_idx];
        let length = article.length().clone();
        let arrival = ArrivalInfo {
            round,
            hint: article.hint(),
            length: length.clone(),
            remaining: remaining.clone(),
        };
        let mut pos = Rat::zero();
        let mut amount = match reader.on_arrival(&arrival) {
            ArrivalDecision::Skip => continue,
            ArrivalDecision::Start => step_amount(&pos, &length),
            ArrivalDecision::StartFraction(f) => {
                check_fraction(&f, article_idx, round, "start fraction")?;
                f
            }
        };
        loop {
            let is_full_step = amount == step_amount(&pos, &length);
            if amount > remaining {
                return Err(TrialError::BudgetExceeded {
                    article: article_idx,
                    round,
                });
            }
            let end = &pos + &amount;
            if end > length {
                return Err(TrialError::LengthExceeded {
                    article: article_idx,
                    round,
                });
            }
            let observed_rate = article
                .profile()
                .rate_after(&pos)
                .expect("position is strictly inside the article");
            remaining -= &amount;
            pos = end;
            if !is_full_step || pos == length {
                // A fractional read ends the article by contract; a full read
                // of the last step exhausts it.
                break;
            }
            amount = match reader.on_step(observed_rate, &remaining) {
                StepDecision::Stop => break,
                StepDecision::Continue => step_amount(&pos, &length),
                StepDecision::ContinueFraction(f) => {
                    check_fraction(&f, article_idx, round, "continue fraction")?;
                    f
                }
            };
        }
        s[article_idx] = pos;
    }

    let transcript = Transcript::from_reads(inst, order.to_vec(), s)?;
    debug_assert!(transcript.verify(inst).is_ok());
    Ok(transcript)
}

/// Duration of the next time step from `pos`: a whole step, or the short
/// final step of an article with fractional length.
fn step_amount(pos: &Rat, length: &Rat) -> Rat {
    let left = length - pos;
    if left < Rat::one() {
        left
    } else {
        Rat::one()
    }
}

fn check_fraction(f: &Rat, article: usize, round: usize, what: &str) -> Result<(), TrialError> {
    if f.is_positive() && f < &Rat::one() {
        Ok(())
    } else {
        Err(TrialError::InvalidDecision {
            article,
            round,
            detail: format!("{what} {} outside (0,1)", rat_display(f)),
        })
    }
}

/// What a trial is scored on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Total information gained.
    Value,
    /// 1 when the article with the largest `t·h` was read fully, else 0.
    SelectMax,
}

/// Oracle used for the offline optimum in ratio estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptSource {
    Dp,
    Waterfill,
    KphUpper,
    /// DP when within limits, else water-filling when applicable, else the
    /// knapsack upper bound.
    Auto,
}

/// Oracle actually used, recorded in results so knapsack-relative ratios are
/// labeled as upper-bound-relative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptSourceUsed {
    Dp,
    Waterfill,
    KphUpper,
}

impl OptSourceUsed {
    pub fn label(&self) -> &'static str {
        match self {
            OptSourceUsed::Dp => "dp",
            OptSourceUsed::Waterfill => "waterfill",
            OptSourceUsed::KphUpper => "kph-upper",
        }
    }
}

/// Mean metric value with a 95% normal-approximation confidence interval.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueEstimate {
    pub mean: f64,
    pub ci95: f64,
    pub trials: usize,
}

/// Empirical competitive ratio against an offline oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioEstimate {
    pub mean: f64,
    pub ci95: f64,
    pub trials: usize,
    pub opt: Rat,
    pub opt_source: OptSourceUsed,
    /// opt / mean; infinite when the mean is 0.
    pub ratio: f64,
}

fn validation_gate(inst: &Instance) -> Result<(), HarnessError> {
    if inst.adversarial() {
        return Ok(());
    }
    let report = crate::model::validate_instance(inst, true);
    if report.is_valid() {
        Ok(())
    } else {
        Err(HarnessError::Validation {
            instance: inst.id().to_string(),
            report,
        })
    }
}

/// Index of the article a [`Metric::SelectMax`] trial must fully read: the
/// largest `t·h`, ties broken by instance priority.
pub fn max_product_article(inst: &Instance) -> usize {
    (0..inst.len())
        .max_by(|&a, &b| {
            let pa = inst.articles()[a].product();
            let pb = inst.articles()[b].product();
            pa.cmp(&pb)
                .then(inst.tie_priority()[b].cmp(&inst.tie_priority()[a]))
        })
        .expect("instances are non-empty")
}

/// Runs seeded trials in parallel and keeps every transcript, for tests
/// that inspect permutations or reader tags. Memory scales with `trials`.
pub fn run_trials_collect(
    inst: &Instance,
    factory: &dyn ReaderFactory,
    trials: usize,
    master_seed: u64,
) -> Result<Vec<TrialResult>, HarnessError> {
    validation_gate(inst)?;
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(master_seed, i as u64);
            run_trial(inst, factory, seed).map_err(|source| HarnessError::Trial { seed, source })
        })
        .collect()
}

/// Runs seeded trials in parallel and scores each with the metric.
pub fn trial_scores(
    inst: &Instance,
    factory: &dyn ReaderFactory,
    trials: usize,
    master_seed: u64,
    metric: Metric,
) -> Result<Vec<f64>, HarnessError> {
    validation_gate(inst)?;
    let target = match metric {
        Metric::Value => None,
        Metric::SelectMax => Some(max_product_article(inst)),
    };
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(master_seed, i as u64);
            let result =
                run_trial(inst, factory, seed).map_err(|source| HarnessError::Trial {
                    seed,
                    source,
                })?;
            Ok(match target {
                None => rat_to_f64(&result.transcript.total_info),
                Some(article) => {
                    let read = &result.transcript.reads[article];
                    if read.s == *inst.articles()[article].length() {
                        1.0
                    } else {
                        0.0
                    }
                }
            })
        })
        .collect()
}

fn summarize(scores: &[f64]) -> ValueEstimate {
    let n = scores.len();
    let mean = scores.iter().sum::<f64>() / n as f64;
    let ci95 = if n > 1 {
        let var = scores.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        1.96 * (var / n as f64).sqrt()
    } else {
        0.0
    };
    ValueEstimate {
        mean,
        ci95,
        trials: n,
    }
}

/// Estimates the expected metric over seeded trials.
pub fn estimate_metric(
    inst: &Instance,
    factory: &dyn ReaderFactory,
    trials: usize,
    master_seed: u64,
    metric: Metric,
) -> Result<ValueEstimate, HarnessError> {
    assert!(trials >= 1, "at least one trial required");
    let scores = trial_scores(inst, factory, trials, master_seed, metric)?;
    Ok(summarize(&scores))
}

/// Estimates the expected total information over seeded trials.
pub fn estimate_value(
    inst: &Instance,
    factory: &dyn ReaderFactory,
    trials: usize,
    master_seed: u64,
) -> Result<ValueEstimate, HarnessError> {
    estimate_metric(inst, factory, trials, master_seed, Metric::Value)
}

/// Computes the offline optimum with the requested oracle.
pub fn resolve_opt(inst: &Instance, source: OptSource) -> Result<(Rat, OptSourceUsed), HarnessError> {
    match source {
        OptSource::Dp => Ok((opt_rao_dp(inst)?.value, OptSourceUsed::Dp)),
        OptSource::Waterfill => Ok((opt_rao_waterfill(inst)?.value, OptSourceUsed::Waterfill)),
        OptSource::KphUpper => Ok((solve_kph_instance(inst)?.value, OptSourceUsed::KphUpper)),
        OptSource::Auto => {
            if let Ok(opt) = opt_rao_dp(inst) {
                return Ok((opt.value, OptSourceUsed::Dp));
            }
            if let Ok(opt) = opt_rao_waterfill(inst) {
                return Ok((opt.value, OptSourceUsed::Waterfill));
            }
            Ok((solve_kph_instance(inst)?.value, OptSourceUsed::KphUpper))
        }
    }
}

/// Estimates the empirical competitive ratio opt/mean.
pub fn estimate_ratio(
    inst: &Instance,
    factory: &dyn ReaderFactory,
    trials: usize,
    master_seed: u64,
    opt_source: OptSource,
) -> Result<RatioEstimate, HarnessError> {
    let est = estimate_value(inst, factory, trials, master_seed)?;
    let (opt, used) = resolve_opt(inst, opt_source)?;
    let opt_f = rat_to_f64(&opt);
    let ratio = if est.mean > 0.0 {
        opt_f / est.mean
    } else {
        f64::INFINITY
    };
    Ok(RatioEstimate {
        mean: est.mean,
        ci95: est.ci95,
        trials: est.trials,
        opt,
        opt_source: used,
        ratio,
    })
}
