//! Reference reader that reads a fixed prefix of every article.

use super::{min3, ArrivalDecision, ArrivalInfo, ReadPlan, Reader, ReaderFactory, StepDecision};
use crate::rat::{rat_display, Rat};
use num_traits::Signed;
use rand_chacha::ChaCha12Rng;

/// Reads `min(len, t_i, remaining budget)` steps of every arriving article.
/// Serves as the hint-agnostic baseline in lower-bound experiments.
pub struct PrefixFactory {
    len: Rat,
}

impl PrefixFactory {
    /// `len` is the prefix length in time steps; must be non-negative.
    pub fn new(len: Rat) -> Result<Self, String> {
        if len.is_negative() {
            return Err(format!("prefix length must be >= 0, got {}", rat_display(&len)));
        }
        Ok(Self { len })
    }
}

impl ReaderFactory for PrefixFactory {
    fn id(&self) -> String {
        "prefix".to_string()
    }

    fn params(&self) -> String {
        format!("len={}", rat_display(&self.len))
    }

    fn build(&self, _n: usize, _budget: &Rat, _rng: &mut ChaCha12Rng) -> Box<dyn Reader> {
        Box::new(PrefixReader {
            len: self.len.clone(),
            plan: ReadPlan::default(),
        })
    }
}

struct PrefixReader {
    len: Rat,
    plan: ReadPlan,
}

impl Reader for PrefixReader {
    fn on_arrival(&mut self, arrival: &ArrivalInfo) -> ArrivalDecision {
        let target = min3(
            self.len.clone(),
            arrival.length.clone(),
            arrival.remaining.clone(),
        );
        self.plan.start(target)
    }

    fn on_step(&mut self, _observed_rate: u64, _remaining: &Rat) -> StepDecision {
        self.plan.next()
    }
}
