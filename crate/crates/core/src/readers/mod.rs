//! The online reader contract and the shipped readers.
//!
//! A reader sees articles strictly round by round: at arrival it learns the
//! hint and length, and it observes information rates only for steps it has
//! actually read. Budget violations are not clamped by the harness; a reader
//! that starts or continues past the remaining budget breaches its contract
//! and the trial aborts with a diagnostic.

mod okp;
mod prefix;
mod reduction;
mod secretary;
mod threshold;

pub use okp::{density_threshold, KnapsackSecretaryOkp, OkpBlackBox, OkpBranch, KNAPSACK_SECRETARY_ALPHA};
pub use prefix::PrefixFactory;
pub use reduction::{DirectKnapsackFactory, ReductionFactory, BASELINE_ALPHA};
pub use secretary::SecretaryFactory;
pub use threshold::ThresholdFactory;

use crate::rat::Rat;
use num_traits::{Signed, Zero};
use rand_chacha::ChaCha12Rng;

/// Data revealed when an article arrives.
#[derive(Debug, Clone)]
pub struct ArrivalInfo {
    /// 1-based arrival round.
    pub round: usize,
    pub hint: u64,
    pub length: Rat,
    /// Budget still available, measured against the full budget T.
    pub remaining: Rat,
}

/// Decision on an arriving article.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArrivalDecision {
    Skip,
    /// Read the first time step (possibly the article's short final step).
    Start,
    /// Read only a fraction in (0,1) of the first time step and stop there.
    StartFraction(Rat),
}

/// Decision after reading a full time step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepDecision {
    Continue,
    /// Read a fraction in (0,1) of the next step, then the article ends.
    ContinueFraction(Rat),
    Stop,
}

/// Behavioral interface every reader implements.
pub trait Reader {
    fn on_arrival(&mut self, arrival: &ArrivalInfo) -> ArrivalDecision;

    /// Called after each fully read step with the rate just observed.
    fn on_step(&mut self, observed_rate: u64, remaining: &Rat) -> StepDecision;

    /// Diagnostic key/value pairs describing private choices of this trial
    /// (branch coins, sample sizes); used by tests and never by the harness.
    fn tags(&self) -> Vec<(String, String)> {
        Vec::new()
    }
}

/// Builds one reader per trial from the trial's reader RNG stream.
pub trait ReaderFactory: Send + Sync {
    /// Short reader name for result rows, e.g. `threshold`.
    fn id(&self) -> String;

    /// Canonical parameter string for result rows, e.g. `g=43/2000`.
    fn params(&self) -> String;

    fn build(&self, n: usize, budget: &Rat, rng: &mut ChaCha12Rng) -> Box<dyn Reader>;
}

/// Step-by-step execution of a reading target fixed at arrival: read whole
/// steps while more than one step is left, finish with a fractional step.
#[derive(Debug, Default)]
pub(crate) struct ReadPlan {
    left: Rat,
}

impl ReadPlan {
    /// Begins reading `target` time steps; `target` must already respect the
    /// article length and the remaining budget.
    pub(crate) fn start(&mut self, target: Rat) -> ArrivalDecision {
        if !target.is_positive() {
            return ArrivalDecision::Skip;
        }
        let one = Rat::from_integer(1.into());
        if target < one {
            self.left = Rat::zero();
            ArrivalDecision::StartFraction(target)
        } else {
            self.left = target - one;
            ArrivalDecision::Start
        }
    }

    pub(crate) fn next(&mut self) -> StepDecision {
        if self.left.is_zero() {
            return StepDecision::Stop;
        }
        let one = Rat::from_integer(1.into());
        if self.left < one {
            let f = std::mem::take(&mut self.left);
            StepDecision::ContinueFraction(f)
        } else {
            self.left -= one;
            StepDecision::Continue
        }
    }
}

/// Smaller of three rationals.
pub(crate) fn min3(a: Rat, b: Rat, c: Rat) -> Rat {
    a.min(b).min(c)
}
