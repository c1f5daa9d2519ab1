//! Online 0/1 knapsack black boxes.
//!
//! The reduction machinery only needs *some* alpha-competitive online
//! knapsack algorithm behind an accept/reject interface. The shipped
//! baseline is a knapsack-secretary strategy: a fair coin selects between a
//! value secretary (one accept) and a sample-then-density-threshold rule.

use crate::rat::Rat;
use num_traits::Zero;
use rand::Rng;
use rand_chacha::ChaCha12Rng;

/// Declared competitive ratio of the baseline box, 10e.
pub const KNAPSACK_SECRETARY_ALPHA: f64 = 10.0 * std::f64::consts::E;

/// Accept/reject interface of an online 0/1 knapsack algorithm.
///
/// `declared_alpha` is trusted metadata: the harness never verifies it, only
/// capacity feasibility of the accepted set.
pub trait OkpBlackBox: Send {
    fn declared_alpha(&self) -> f64;

    /// Offers the next item; `true` accepts it irrevocably.
    fn offer(&mut self, value: &Rat, weight: &Rat) -> bool;
}

/// Branch taken by [`KnapsackSecretaryOkp`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OkpBranch {
    /// Classical secretary on item values; accepts at most one item.
    ValueSecretary,
    /// Observes the first floor(n/2) items, then accepts items whose value
    /// density meets the sample's fractional-knapsack threshold.
    DensityThreshold,
}

/// Baseline knapsack-secretary black box with declared ratio 10e.
pub struct KnapsackSecretaryOkp {
    declared_alpha: f64,
    capacity: Rat,
    used: Rat,
    round: usize,
    branch: OkpBranch,
    // value-secretary state
    value_phase_len: usize,
    best_seen: Option<Rat>,
    taken: bool,
    // density-threshold state
    sample_len: usize,
    sample: Vec<(Rat, Rat)>,
    threshold: Option<Rat>,
}

impl KnapsackSecretaryOkp {
    pub fn new(n: usize, capacity: Rat, rng: &mut ChaCha12Rng) -> Self {
        let branch = if rng.gen_bool(0.5) {
            OkpBranch::ValueSecretary
        } else {
            OkpBranch::DensityThreshold
        };
        Self::with_branch(n, capacity, branch)
    }

    /// Test hook: fixes the branch instead of flipping the coin.
    pub fn with_branch(n: usize, capacity: Rat, branch: OkpBranch) -> Self {
        Self {
            declared_alpha: KNAPSACK_SECRETARY_ALPHA,
            capacity,
            used: Rat::zero(),
            round: 0,
            branch,
            value_phase_len: super::secretary::rejection_phase_len(n),
            best_seen: None,
            taken: false,
            sample_len: n / 2,
            sample: Vec::new(),
            threshold: None,
        }
    }

    /// Overrides the declared competitive ratio reported to callers.
    pub fn with_declared_alpha(mut self, alpha: f64) -> Self {
        self.declared_alpha = alpha;
        self
    }

    pub fn branch(&self) -> OkpBranch {
        self.branch
    }

    fn fits(&self, weight: &Rat) -> bool {
        &self.used + weight <= self.capacity
    }

    fn offer_value_secretary(&mut self, value: &Rat, weight: &Rat) -> bool {
        let beats = self.best_seen.as_ref().map_or(true, |best| value > best);
        if beats {
            self.best_seen = Some(value.clone());
        }
        if self.round <= self.value_phase_len || self.taken || !beats || !self.fits(weight) {
            return false;
        }
        self.taken = true;
        self.used += weight;
        true
    }

    fn offer_density_threshold(&mut self, value: &Rat, weight: &Rat) -> bool {
        let density = value / weight;
        if self.round <= self.sample_len {
            self.sample.push((density, weight.clone()));
            return false;
        }
        if self.threshold.is_none() {
            self.threshold = Some(density_threshold(&self.sample, &self.capacity));
        }
        let threshold = self.threshold.as_ref().expect("threshold just computed");
        if &density >= threshold && self.fits(weight) {
            self.used += weight;
            return true;
        }
        false
    }
}

impl OkpBlackBox for KnapsackSecretaryOkp {
    fn declared_alpha(&self) -> f64 {
        self.declared_alpha
    }

    fn offer(&mut self, value: &Rat, weight: &Rat) -> bool {
        self.round += 1;
        match self.branch {
            OkpBranch::ValueSecretary => self.offer_value_secretary(value, weight),
            OkpBranch::DensityThreshold => self.offer_density_threshold(value, weight),
        }
    }
}

/// Density threshold of the optimal fractional knapsack over `(density,
/// weight)` items: the density cut by the capacity, the smallest packed
/// density when the knapsack is exactly full, and 0 (accept everything) when
/// the items do not fill the capacity. Ties break toward earlier items.
pub fn density_threshold(items: &[(Rat, Rat)], capacity: &Rat) -> Rat {
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&a, &b| items[b].0.cmp(&items[a].0).then(a.cmp(&b)));
    let mut remaining = capacity.clone();
    let mut min_packed: Option<&Rat> = None;
    for &i in &order {
        let (density, weight) = &items[i];
        if remaining.is_zero() {
            break;
        }
        if weight <= &remaining {
            remaining -= weight;
            min_packed = Some(density);
        } else {
            return density.clone();
        }
    }
    if remaining.is_zero() {
        min_packed.cloned().unwrap_or_else(Rat::zero)
    } else {
        Rat::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn items(pairs: &[(i64, i64)]) -> Vec<(Rat, Rat)> {
        pairs
            .iter()
            .map(|&(d, w)| (rat(d, 1), rat(w, 1)))
            .collect()
    }

    #[test]
    fn density_threshold_cases() {
        // Underfull: capacity exceeds total weight.
        assert_eq!(
            density_threshold(&items(&[(5, 2), (3, 2)]), &rat(10, 1)),
            Rat::zero()
        );
        // Fractional cut at density 3.
        assert_eq!(
            density_threshold(&items(&[(5, 2), (3, 4)]), &rat(4, 1)),
            rat(3, 1)
        );
        // Exactly full: smallest packed density.
        assert_eq!(
            density_threshold(&items(&[(5, 2), (3, 2)]), &rat(4, 1)),
            rat(3, 1)
        );
        // Empty sample accepts everything.
        assert_eq!(density_threshold(&[], &rat(4, 1)), Rat::zero());
    }

    #[test]
    fn value_secretary_accepts_at_most_one() {
        let mut okp = KnapsackSecretaryOkp::with_branch(4, rat(10, 1), OkpBranch::ValueSecretary);
        assert!(!okp.offer(&rat(5, 1), &rat(2, 1))); // phase (floor(4/e)=1)
        assert!(okp.offer(&rat(7, 1), &rat(2, 1)));
        assert!(!okp.offer(&rat(9, 1), &rat(1, 1)));
        assert_eq!(okp.used, rat(2, 1));
    }

    #[test]
    fn value_secretary_skips_nonfitting_record() {
        let mut okp = KnapsackSecretaryOkp::with_branch(4, rat(3, 1), OkpBranch::ValueSecretary);
        assert!(!okp.offer(&rat(5, 1), &rat(2, 1)));
        assert!(!okp.offer(&rat(9, 1), &rat(4, 1))); // record but does not fit
        assert!(!okp.offer(&rat(8, 1), &rat(1, 1))); // not a record
    }

    #[test]
    fn density_branch_respects_capacity_and_threshold() {
        let mut okp = KnapsackSecretaryOkp::with_branch(4, rat(4, 1), OkpBranch::DensityThreshold);
        assert!(!okp.offer(&rat(12, 1), &rat(2, 1))); // sample (floor(4/2)=2)
        assert!(!okp.offer(&rat(2, 1), &rat(2, 1))); // sample
        // Threshold: knapsack of capacity 4 over sample fits both items
        // exactly, so threshold = min packed density = 1.
        assert!(okp.offer(&rat(3, 1), &rat(3, 1)));
        assert!(!okp.offer(&rat(9, 1), &rat(2, 1))); // density 4.5 but does not fit
        assert!(okp.offer(&rat(1, 1), &rat(1, 1)));
    }
}
