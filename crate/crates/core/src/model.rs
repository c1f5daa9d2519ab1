//! Articles, instances, profiles, accuracy, validation, and instance cutting.
//!
//! An article carries a hint `h` (announced upper bound on its information
//! rate), a length `t` in time steps, and a hidden piecewise-constant rate
//! profile that a reader only observes step by step. An instance bundles a
//! time budget with a list of articles plus a tie-breaking priority used by
//! every offline comparator.

use crate::rat::{rat_display, rat_serde, rat_u64, Rat};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use thiserror::Error;

/// Errors raised while constructing model objects.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("profile must contain at least one segment")]
    EmptyProfile,
    #[error("segment {index} has non-positive length {len}")]
    NonPositiveSegment { index: usize, len: String },
    #[error("segment {index} has rate 0; rates must be at least 1")]
    ZeroRate { index: usize },
    #[error("article hint must be at least 1")]
    ZeroHint,
    #[error("declared length {declared} does not match profile length {actual}")]
    LengthMismatch { declared: String, actual: String },
    #[error("instance budget must be at least 1")]
    ZeroBudget,
    #[error("tie_priority must be a permutation of 0..{n}, got {got:?}")]
    BadTiePriority { n: usize, got: Vec<usize> },
    #[error("instance has no articles")]
    EmptyInstance,
    #[error("cut fraction must satisfy 0 < g <= 1, got {0}")]
    CutFractionOutOfRange(String),
    #[error("reading position {pos} exceeds article length {len}")]
    PositionPastEnd { pos: String, len: String },
}

/// One run of consecutive time steps sharing an information rate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    /// Duration in time steps; fractional at cut boundaries.
    pub len: Rat,
    /// Information units gained per time step within the run.
    pub rate: u64,
}

/// Piecewise-constant information rate of one article, run-length encoded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InformationProfile {
    segments: Vec<Segment>,
}

impl InformationProfile {
    /// Builds a profile, rejecting empty profiles, non-positive segment
    /// lengths, and zero rates.
    pub fn new(segments: Vec<Segment>) -> Result<Self, ModelError> {
        if segments.is_empty() {
            return Err(ModelError::EmptyProfile);
        }
        for (index, seg) in segments.iter().enumerate() {
            if !seg.len.is_positive() {
                return Err(ModelError::NonPositiveSegment {
                    index,
                    len: rat_display(&seg.len),
                });
            }
            if seg.rate == 0 {
                return Err(ModelError::ZeroRate { index });
            }
        }
        Ok(Self { segments })
    }

    /// Builds a profile from per-step rates.
    pub fn from_steps(rates: &[u64]) -> Result<Self, ModelError> {
        let mut segments: Vec<Segment> = Vec::new();
        for &rate in rates {
            match segments.last_mut() {
                Some(last) if last.rate == rate => last.len += rat_u64(1),
                _ => segments.push(Segment {
                    len: rat_u64(1),
                    rate,
                }),
            }
        }
        Self::new(segments)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Total duration covered by the profile.
    pub fn total_length(&self) -> Rat {
        self.segments.iter().map(|s| s.len.clone()).sum()
    }

    /// Information gained by reading the whole profile.
    pub fn total_info(&self) -> Rat {
        self.segments
            .iter()
            .map(|s| &s.len * rat_u64(s.rate))
            .sum()
    }

    /// Information gained by reading the first `s` time steps; the final
    /// partial step contributes its rate scaled by the fraction read.
    pub fn prefix(&self, s: &Rat) -> Result<Rat, ModelError> {
        if s.is_negative() {
            return Err(ModelError::PositionPastEnd {
                pos: rat_display(s),
                len: rat_display(&self.total_length()),
            });
        }
        let mut remaining = s.clone();
        let mut gained = Rat::zero();
        for seg in &self.segments {
            if remaining <= seg.len {
                gained += &remaining * rat_u64(seg.rate);
                return Ok(gained);
            }
            gained += &seg.len * rat_u64(seg.rate);
            remaining -= &seg.len;
        }
        if remaining.is_zero() {
            Ok(gained)
        } else {
            Err(ModelError::PositionPastEnd {
                pos: rat_display(s),
                len: rat_display(&self.total_length()),
            })
        }
    }

    /// Rate in effect immediately after position `pos`, i.e. the rate a
    /// reader observes while reading forward from `pos`.
    pub fn rate_after(&self, pos: &Rat) -> Option<u64> {
        let mut remaining = pos.clone();
        for seg in &self.segments {
            if remaining < seg.len {
                return Some(seg.rate);
            }
            remaining -= &seg.len;
        }
        None
    }

    /// Largest rate appearing in the profile.
    pub fn max_rate(&self) -> u64 {
        self.segments.iter().map(|s| s.rate).max().unwrap_or(0)
    }

    /// True when rates never increase along the profile.
    pub fn is_non_increasing(&self) -> bool {
        self.segments.windows(2).all(|w| w[0].rate >= w[1].rate)
    }

    /// Profile truncated to the first `cut` time steps.
    pub fn truncated(&self, cut: &Rat) -> Result<Self, ModelError> {
        let mut remaining = cut.clone();
        let mut segments = Vec::new();
        for seg in &self.segments {
            if remaining.is_zero() {
                break;
            }
            if remaining <= seg.len {
                segments.push(Segment {
                    len: remaining,
                    rate: seg.rate,
                });
                break;
            }
            segments.push(seg.clone());
            remaining -= &seg.len;
        }
        Self::new(segments)
    }
}

/// One article: announced hint and length plus the hidden rate profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Article {
    hint: u64,
    length: Rat,
    profile: InformationProfile,
    non_increasing: bool,
}

impl Article {
    /// Builds an article; the length is derived from the profile so the two
    /// can never disagree. Rates above the hint are allowed here (some
    /// adversarial families use them) and reported by [`validate_instance`].
    pub fn new(hint: u64, profile: InformationProfile) -> Result<Self, ModelError> {
        if hint == 0 {
            return Err(ModelError::ZeroHint);
        }
        let length = profile.total_length();
        let non_increasing = profile.is_non_increasing();
        Ok(Self {
            hint,
            length,
            profile,
            non_increasing,
        })
    }

    pub fn hint(&self) -> u64 {
        self.hint
    }

    pub fn length(&self) -> &Rat {
        &self.length
    }

    pub fn profile(&self) -> &InformationProfile {
        &self.profile
    }

    pub fn non_increasing(&self) -> bool {
        self.non_increasing
    }

    /// Announced information upper bound `t·h`.
    pub fn product(&self) -> Rat {
        &self.length * rat_u64(self.hint)
    }

    /// Total information contained in the article.
    pub fn total_info(&self) -> Rat {
        self.profile.total_info()
    }

    /// Information gained by reading the first `s` time steps.
    pub fn info_gain(&self, s: &Rat) -> Result<Rat, ModelError> {
        self.profile.prefix(s)
    }
}

/// Information gained by reading the first `s` time steps of `a`.
pub fn info_gain(a: &Article, s: &Rat) -> Result<Rat, ModelError> {
    a.info_gain(s)
}

/// A time budget plus articles; the unit of experimentation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance", into = "RawInstance")]
pub struct Instance {
    budget: u64,
    articles: Vec<Article>,
    tie_priority: Vec<usize>,
    adversarial: bool,
    id: String,
}

impl Instance {
    /// Builds an instance. `tie_priority` must be a permutation of article
    /// indices; `tie_priority[i]` is the rank of article `i`, lower ranks
    /// winning ties in every offline comparator.
    pub fn new(
        budget: u64,
        articles: Vec<Article>,
        tie_priority: Vec<usize>,
        adversarial: bool,
        id: impl Into<String>,
    ) -> Result<Self, ModelError> {
        if budget == 0 {
            return Err(ModelError::ZeroBudget);
        }
        if articles.is_empty() {
            return Err(ModelError::EmptyInstance);
        }
        let n = articles.len();
        let mut seen = vec![false; n];
        let mut ok = tie_priority.len() == n;
        if ok {
            for &rank in &tie_priority {
                if rank >= n || seen[rank] {
                    ok = false;
                    break;
                }
                seen[rank] = true;
            }
        }
        if !ok {
            return Err(ModelError::BadTiePriority {
                n,
                got: tie_priority,
            });
        }
        Ok(Self {
            budget,
            articles,
            tie_priority,
            adversarial,
            id: id.into(),
        })
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn budget_rat(&self) -> Rat {
        rat_u64(self.budget)
    }

    pub fn articles(&self) -> &[Article] {
        &self.articles
    }

    pub fn len(&self) -> usize {
        self.articles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.articles.is_empty()
    }

    pub fn tie_priority(&self) -> &[usize] {
        &self.tie_priority
    }

    pub fn adversarial(&self) -> bool {
        self.adversarial
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn set_id(&mut self, id: impl Into<String>) {
        self.id = id.into();
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    budget: u64,
    articles: Vec<RawArticle>,
    tie_priority: Vec<usize>,
    adversarial: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawArticle {
    hint: u64,
    #[serde(with = "rat_serde")]
    length: Rat,
    segments: Vec<RawSegment>,
}

#[derive(Serialize, Deserialize)]
struct RawSegment(#[serde(with = "rat_serde")] Rat, u64);

impl TryFrom<RawInstance> for Instance {
    type Error = ModelError;

    fn try_from(raw: RawInstance) -> Result<Self, ModelError> {
        let mut articles = Vec::with_capacity(raw.articles.len());
        for a in raw.articles {
            let profile = InformationProfile::new(
                a.segments
                    .into_iter()
                    .map(|RawSegment(len, rate)| Segment { len, rate })
                    .collect(),
            )?;
            let article = Article::new(a.hint, profile)?;
            if article.length != a.length {
                return Err(ModelError::LengthMismatch {
                    declared: rat_display(&a.length),
                    actual: rat_display(&article.length),
                });
            }
            articles.push(article);
        }
        Instance::new(
            raw.budget,
            articles,
            raw.tie_priority,
            raw.adversarial,
            String::new(),
        )
    }
}

impl From<Instance> for RawInstance {
    fn from(inst: Instance) -> Self {
        RawInstance {
            budget: inst.budget,
            articles: inst
                .articles
                .into_iter()
                .map(|a| RawArticle {
                    hint: a.hint,
                    length: a.length,
                    segments: a
                        .profile
                        .segments
                        .into_iter()
                        .map(|s| RawSegment(s.len, s.rate))
                        .collect(),
                })
                .collect(),
            tie_priority: inst.tie_priority,
            adversarial: inst.adversarial,
        }
    }
}

/// A single invariant violation found by [`validate_instance`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A profile rate exceeds the article's hint.
    RateExceedsHint { article: usize, rate: u64, hint: u64 },
    /// An article is longer than the time budget (checked under Assumption 1).
    LengthExceedsBudget { article: usize },
    /// Two articles share a hint (checked under Assumption 1).
    DuplicateHint { articles: (usize, usize), hint: u64 },
    /// Two articles share the upper bound `t·h` (checked under Assumption 1).
    DuplicateProduct { articles: (usize, usize) },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::RateExceedsHint {
                article,
                rate,
                hint,
            } => write!(
                f,
                "article {article}: rate exceeds hint ({rate} > {hint})"
            ),
            Violation::LengthExceedsBudget { article } => {
                write!(f, "article {article}: length exceeds budget")
            }
            Violation::DuplicateHint { articles, hint } => write!(
                f,
                "articles {} and {}: duplicate hint {hint}",
                articles.0, articles.1
            ),
            Violation::DuplicateProduct { articles } => write!(
                f,
                "articles {} and {}: duplicate value bound t*h",
                articles.0, articles.1
            ),
        }
    }
}

/// Result of instance validation; empty iff the instance is valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.violations.is_empty() {
            write!(f, "ok")
        } else {
            for (i, v) in self.violations.iter().enumerate() {
                if i > 0 {
                    writeln!(f)?;
                }
                write!(f, "{v}")?;
            }
            Ok(())
        }
    }
}

/// Checks model invariants; with `assume_a1` also checks that lengths fit the
/// budget and that hints and `t·h` bounds are pairwise distinct.
pub fn validate_instance(inst: &Instance, assume_a1: bool) -> ValidationReport {
    let mut violations = Vec::new();
    for (i, article) in inst.articles().iter().enumerate() {
        for seg in article.profile().segments() {
            if seg.rate > article.hint() {
                violations.push(Violation::RateExceedsHint {
                    article: i,
                    rate: seg.rate,
                    hint: article.hint(),
                });
                break;
            }
        }
    }
    if assume_a1 {
        let budget = inst.budget_rat();
        for (i, article) in inst.articles().iter().enumerate() {
            if article.length() > &budget {
                violations.push(Violation::LengthExceedsBudget { article: i });
            }
        }
        let mut hints: HashSet<u64> = HashSet::new();
        for (i, article) in inst.articles().iter().enumerate() {
            if !hints.insert(article.hint()) {
                let first = inst
                    .articles()
                    .iter()
                    .position(|a| a.hint() == article.hint())
                    .expect("duplicate hint has a first occurrence");
                violations.push(Violation::DuplicateHint {
                    articles: (first, i),
                    hint: article.hint(),
                });
            }
        }
        let products: Vec<Rat> = inst.articles().iter().map(Article::product).collect();
        for i in 0..products.len() {
            for j in (i + 1)..products.len() {
                if products[i] == products[j] {
                    violations.push(Violation::DuplicateProduct { articles: (i, j) });
                }
            }
        }
    }
    ValidationReport { violations }
}

/// Hint quality of an instance: the smallest `C` with
/// `h_i <= C * (average rate of article i)` for every article.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccuracyReport {
    pub c_value: Rat,
    pub argmax_article: usize,
}

/// Computes the accuracy `C` of an instance exactly.
pub fn accuracy(inst: &Instance) -> Result<AccuracyReport, ModelError> {
    let mut best: Option<(Rat, usize)> = None;
    for (i, article) in inst.articles().iter().enumerate() {
        let ratio = article.product() / article.total_info();
        match &best {
            Some((b, _)) if *b >= ratio => {}
            _ => best = Some((ratio, i)),
        }
    }
    let (max_ratio, argmax_article) = best.ok_or(ModelError::EmptyInstance)?;
    let one = rat_u64(1);
    Ok(AccuracyReport {
        c_value: if max_ratio > one { max_ratio } else { one },
        argmax_article,
    })
}

/// Truncates every article to at most `g·T` time steps; budget, hints, and
/// tie priority are unchanged.
pub fn cut_instance(inst: &Instance, g: &Rat) -> Result<Instance, ModelError> {
    if !g.is_positive() || g > &rat_u64(1) {
        return Err(ModelError::CutFractionOutOfRange(rat_display(g)));
    }
    let cap = g * inst.budget_rat();
    let articles = inst
        .articles()
        .iter()
        .map(|a| {
            if a.length() <= &cap {
                Ok(a.clone())
            } else {
                Article::new(a.hint(), a.profile().truncated(&cap)?)
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Instance::new(
        inst.budget(),
        articles,
        inst.tie_priority().to_vec(),
        inst.adversarial(),
        inst.id(),
    )
}
