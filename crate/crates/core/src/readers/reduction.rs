//! Reduction to an online knapsack black box, and the direct variant.

use super::secretary::SecretaryReader;
use super::{
    ArrivalDecision, ArrivalInfo, KnapsackSecretaryOkp, OkpBlackBox, ReadPlan, Reader,
    ReaderFactory, StepDecision, KNAPSACK_SECRETARY_ALPHA,
};
use crate::rat::{rat_u64, Rat};
use crate::rng::{STREAM_COIN, STREAM_INNER};
use rand::Rng;
use rand_chacha::ChaCha12Rng;

/// Declared alpha of the shipped baseline black box.
pub const BASELINE_ALPHA: f64 = KNAPSACK_SECRETARY_ALPHA;

/// Branch probability P[b=1] = alpha / (e + alpha).
pub fn reduction_delta(alpha: f64) -> f64 {
    alpha / (std::f64::consts::E + alpha)
}

/// With probability delta = alpha/(e+alpha) feeds every article as item
/// (value `t·h`, weight `t`) to the black box and fully reads accepted
/// articles; otherwise runs the secretary strategy.
pub struct ReductionFactory {
    alpha: f64,
    force_branch: Option<bool>,
}

impl ReductionFactory {
    /// `alpha` is the declared competitive ratio of the black box.
    pub fn new(alpha: f64) -> Result<Self, String> {
        if !(alpha >= 1.0) {
            return Err(format!("alpha must be at least 1, got {alpha}"));
        }
        Ok(Self {
            alpha,
            force_branch: None,
        })
    }

    /// Test hook: pins the branch coin instead of flipping it.
    pub fn with_forced_branch(mut self, b: bool) -> Self {
        self.force_branch = Some(b);
        self
    }
}

impl ReaderFactory for ReductionFactory {
    fn id(&self) -> String {
        "reduction".to_string()
    }

    fn params(&self) -> String {
        format!("alpha={},okp=baseline", self.alpha)
    }

    fn build(&self, n: usize, budget: &Rat, rng: &mut ChaCha12Rng) -> Box<dyn Reader> {
        let b = self.force_branch.unwrap_or_else(|| {
            let mut coin_rng = rng.clone();
            coin_rng.set_stream(STREAM_COIN);
            coin_rng.gen_bool(reduction_delta(self.alpha))
        });
        if b {
            let mut inner_rng = rng.clone();
            inner_rng.set_stream(STREAM_INNER);
            let okp = KnapsackSecretaryOkp::new(n, budget.clone(), &mut inner_rng)
                .with_declared_alpha(self.alpha);
            Box::new(OkpDrivenReader::new(Box::new(okp), "okp"))
        } else {
            Box::new(SecretaryBranchReader {
                inner: SecretaryReader::new(n),
            })
        }
    }
}

/// Runs the black box on every article directly, with no secretary branch.
pub struct DirectKnapsackFactory {
    alpha: f64,
}

impl DirectKnapsackFactory {
    pub fn new(alpha: f64) -> Result<Self, String> {
        if !(alpha >= 1.0) {
            return Err(format!("alpha must be at least 1, got {alpha}"));
        }
        Ok(Self { alpha })
    }
}

impl ReaderFactory for DirectKnapsackFactory {
    fn id(&self) -> String {
        "direct".to_string()
    }

    fn params(&self) -> String {
        format!("alpha={},okp=baseline", self.alpha)
    }

    fn build(&self, n: usize, budget: &Rat, rng: &mut ChaCha12Rng) -> Box<dyn Reader> {
        let mut inner_rng = rng.clone();
        inner_rng.set_stream(STREAM_INNER);
        let okp = KnapsackSecretaryOkp::new(n, budget.clone(), &mut inner_rng)
            .with_declared_alpha(self.alpha);
        Box::new(OkpDrivenReader::new(Box::new(okp), "direct"))
    }
}

/// Reader that offers each arrival to a black box and fully reads accepted
/// articles. Reads are not capped at the remaining budget: a box accepting
/// beyond its capacity is a contract breach the harness must surface.
struct OkpDrivenReader {
    okp: Box<dyn OkpBlackBox>,
    branch_tag: &'static str,
    plan: ReadPlan,
}

impl OkpDrivenReader {
    fn new(okp: Box<dyn OkpBlackBox>, branch_tag: &'static str) -> Self {
        Self {
            okp,
            branch_tag,
            plan: ReadPlan::default(),
        }
    }
}

impl Reader for OkpDrivenReader {
    fn on_arrival(&mut self, arrival: &ArrivalInfo) -> ArrivalDecision {
        let value = &arrival.length * rat_u64(arrival.hint);
        if self.okp.offer(&value, &arrival.length) {
            self.plan.start(arrival.length.clone())
        } else {
            ArrivalDecision::Skip
        }
    }

    fn on_step(&mut self, _observed_rate: u64, _remaining: &Rat) -> StepDecision {
        self.plan.next()
    }

    fn tags(&self) -> Vec<(String, String)> {
        vec![("branch".to_string(), self.branch_tag.to_string())]
    }
}

struct SecretaryBranchReader {
    inner: SecretaryReader,
}

impl Reader for SecretaryBranchReader {
    fn on_arrival(&mut self, arrival: &ArrivalInfo) -> ArrivalDecision {
        self.inner.on_arrival(arrival)
    }

    fn on_step(&mut self, observed_rate: u64, remaining: &Rat) -> StepDecision {
        self.inner.on_step(observed_rate, remaining)
    }

    fn tags(&self) -> Vec<(String, String)> {
        vec![("branch".to_string(), "secretary".to_string())]
    }
}
