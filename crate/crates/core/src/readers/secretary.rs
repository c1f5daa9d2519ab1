//! Classical secretary strategy on announced values `t·h`.

use super::{ArrivalDecision, ArrivalInfo, ReadPlan, Reader, ReaderFactory, StepDecision};
use crate::rat::{rat_u64, Rat};
use rand_chacha::ChaCha12Rng;

/// Rejects the first floor(n/e) articles, then fully reads the first article
/// whose announced value `t·h` beats everything seen in that phase; selects
/// at most one article.
pub struct SecretaryFactory;

impl ReaderFactory for SecretaryFactory {
    fn id(&self) -> String {
        "secretary".to_string()
    }

    fn params(&self) -> String {
        String::new()
    }

    fn build(&self, n: usize, _budget: &Rat, _rng: &mut ChaCha12Rng) -> Box<dyn Reader> {
        Box::new(SecretaryReader::new(n))
    }
}

pub(crate) struct SecretaryReader {
    phase_len: usize,
    best_seen: Option<Rat>,
    committed: bool,
    plan: ReadPlan,
}

impl SecretaryReader {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            phase_len: rejection_phase_len(n),
            best_seen: None,
            committed: false,
            plan: ReadPlan::default(),
        }
    }
}

/// Length floor(n/e) of the rejection phase.
pub(crate) fn rejection_phase_len(n: usize) -> usize {
    (n as f64 / std::f64::consts::E).floor() as usize
}

impl Reader for SecretaryReader {
    fn on_arrival(&mut self, arrival: &ArrivalInfo) -> ArrivalDecision {
        let value = &arrival.length * rat_u64(arrival.hint);
        let beats_phase_max = self.best_seen.as_ref().map_or(true, |best| value > *best);
        if arrival.round <= self.phase_len {
            if beats_phase_max {
                self.best_seen = Some(value);
            }
            return ArrivalDecision::Skip;
        }
        if self.committed || !beats_phase_max {
            return ArrivalDecision::Skip;
        }
        self.committed = true;
        // Under Assumption 1 the article fits the budget and is read fully;
        // on adversarial instances the read is capped at the remaining budget.
        let target = arrival.length.clone().min(arrival.remaining.clone());
        self.plan.start(target)
    }

    fn on_step(&mut self, _observed_rate: u64, _remaining: &Rat) -> StepDecision {
        self.plan.next()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_lengths() {
        assert_eq!(rejection_phase_len(100), 36);
        assert_eq!(rejection_phase_len(1), 0);
        assert_eq!(rejection_phase_len(3), 1);
        assert_eq!(rejection_phase_len(10), 3);
    }
}
