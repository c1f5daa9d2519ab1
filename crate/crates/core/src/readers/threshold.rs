//! Sampling-based threshold strategy with per-article reading caps.

use super::{min3, ArrivalDecision, ArrivalInfo, ReadPlan, Reader, ReaderFactory, StepDecision};
use crate::oracles::{solve_kph, KphItem};
use crate::rat::{rat, rat_display, Rat};
use num_traits::Signed;
use rand_chacha::ChaCha12Rng;
use rand_distr::Distribution;

/// Samples r ~ Bin(n, 1/2) articles without reading, solves the hint
/// knapsack on the sample with budget T/2 and lengths cut at gT, then fully
/// accepts later articles whose hint meets the sample threshold, reading
/// `min(t_i, gT, remaining budget)` of each.
pub struct ThresholdFactory {
    g: Rat,
    forced_sample_size: Option<usize>,
}

impl ThresholdFactory {
    /// `g` is the per-article cap as a fraction of the budget, in (0,1).
    pub fn new(g: Rat) -> Result<Self, String> {
        if !g.is_positive() || g >= rat(1, 1) {
            return Err(format!(
                "cut fraction g must be in (0,1), got {}",
                rat_display(&g)
            ));
        }
        Ok(Self {
            g,
            forced_sample_size: None,
        })
    }

    /// Test hook: replaces the binomial draw with a fixed sample size.
    pub fn with_forced_sample_size(mut self, r: usize) -> Self {
        self.forced_sample_size = Some(r);
        self
    }
}

impl ReaderFactory for ThresholdFactory {
    fn id(&self) -> String {
        "threshold".to_string()
    }

    fn params(&self) -> String {
        format!("g={}", rat_display(&self.g))
    }

    fn build(&self, n: usize, budget: &Rat, rng: &mut ChaCha12Rng) -> Box<dyn Reader> {
        let r = self.forced_sample_size.unwrap_or_else(|| {
            let bin = rand_distr::Binomial::new(n as u64, 0.5)
                .expect("p=0.5 is a valid binomial parameter");
            bin.sample(rng) as usize
        });
        Box::new(ThresholdReader {
            sample_size: r,
            cut_len: &self.g * budget,
            half_budget: budget / rat(2, 1),
            sample: Vec::new(),
            rho: None,
            plan: ReadPlan::default(),
        })
    }
}

struct ThresholdReader {
    sample_size: usize,
    /// Per-article cap gT.
    cut_len: Rat,
    half_budget: Rat,
    /// (hint, length) pairs observed during the sample phase.
    sample: Vec<(u64, Rat)>,
    rho: Option<u64>,
    plan: ReadPlan,
}

impl ThresholdReader {
    /// Threshold hint of the sample knapsack; 0 (accept everything) when the
    /// sample is empty or does not fill the budget T/2.
    fn compute_rho(&self) -> u64 {
        let items: Vec<KphItem> = self
            .sample
            .iter()
            .enumerate()
            .map(|(id, (hint, length))| KphItem {
                id,
                hint: *hint,
                weight: length.clone().min(self.cut_len.clone()),
            })
            .collect();
        let priority: Vec<usize> = (0..items.len()).collect();
        let sol = solve_kph(&items, &self.half_budget, &priority)
            .expect("sample knapsack budget is non-negative");
        if sol.weight < self.half_budget {
            0
        } else {
            sol.rho
        }
    }
}

impl Reader for ThresholdReader {
    fn on_arrival(&mut self, arrival: &ArrivalInfo) -> ArrivalDecision {
        if arrival.round <= self.sample_size {
            self.sample.push((arrival.hint, arrival.length.clone()));
            return ArrivalDecision::Skip;
        }
        if self.rho.is_none() {
            self.rho = Some(self.compute_rho());
        }
        let rho = self.rho.expect("threshold computed above");
        if arrival.hint < rho {
            return ArrivalDecision::Skip;
        }
        let target = min3(
            arrival.length.clone(),
            self.cut_len.clone(),
            arrival.remaining.clone(),
        );
        self.plan.start(target)
    }

    fn on_step(&mut self, _observed_rate: u64, _remaining: &Rat) -> StepDecision {
        self.plan.next()
    }

    fn tags(&self) -> Vec<(String, String)> {
        let mut tags = vec![("r".to_string(), self.sample_size.to_string())];
        if let Some(rho) = self.rho {
            tags.push(("rho".to_string(), rho.to_string()));
        }
        tags
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_g() {
        assert!(ThresholdFactory::new(rat(43, 2000)).is_ok());
        assert!(ThresholdFactory::new(rat(0, 1)).is_err());
        assert!(ThresholdFactory::new(rat(1, 1)).is_err());
        assert!(ThresholdFactory::new(rat(-1, 2)).is_err());
    }
}
