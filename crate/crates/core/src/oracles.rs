//! Offline oracles: the fractional knapsack relaxation over hints (with its
//! threshold structure), an exact 0/1 knapsack solver, an exact dynamic
//! program for the reading optimum, and a water-filling solver for
//! non-increasing profiles.

use crate::harness::Transcript;
use crate::model::{Article, Instance, ModelError};
use crate::rat::{rat_display, rat_u64, rat_usize, Rat};
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

/// Errors raised by offline oracles.
#[derive(Debug, Error)]
pub enum OracleError {
    #[error("negative budget {0}")]
    NegativeBudget(String),
    #[error("oracle limit exceeded: {0}")]
    LimitExceeded(String),
    #[error("article {0} has a non-integer length; the DP needs integer steps")]
    NonIntegerLength(usize),
    #[error("article {0} is not non-increasing; water-filling does not apply")]
    NotNonIncreasing(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// One knapsack item: an article reference with its hint and weight. The
/// item value is always `weight * hint`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KphItem {
    pub id: usize,
    pub hint: u64,
    pub weight: Rat,
}

impl KphItem {
    pub fn value(&self) -> Rat {
        &self.weight * rat_u64(self.hint)
    }
}

/// Optimal fractional knapsack over hints with its threshold structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KphSolution {
    /// Fill level per item id, in [0, 1]; at most one strictly fractional.
    pub y: BTreeMap<usize, Rat>,
    /// Threshold hint: the fractional item's hint, else the smallest packed
    /// hint, else 0 for an empty solution.
    pub rho: u64,
    /// Item cut by the capacity, if any.
    pub fractional_item: Option<usize>,
    /// Items packed integrally, in packing order.
    pub integral_set: Vec<usize>,
    /// Total value `sum weight*hint*y`.
    pub value: Rat,
    /// Total packed weight `min(budget, sum weights)`.
    pub weight: Rat,
}

impl KphSolution {
    /// Value restricted to the item ids in `subset`.
    pub fn value_of(&self, subset: &[usize], items: &[KphItem]) -> Rat {
        self.restrict(subset, items, |item| item.value())
    }

    /// Weight restricted to the item ids in `subset`.
    pub fn weight_of(&self, subset: &[usize], items: &[KphItem]) -> Rat {
        self.restrict(subset, items, |item| item.weight.clone())
    }

    fn restrict(&self, subset: &[usize], items: &[KphItem], f: impl Fn(&KphItem) -> Rat) -> Rat {
        let mut total = Rat::zero();
        for item in items {
            if subset.contains(&item.id) {
                if let Some(y) = self.y.get(&item.id) {
                    if !y.is_zero() {
                        total += f(item) * y;
                    }
                }
            }
        }
        total
    }

    /// JSON export of the headline numbers.
    pub fn export_json(&self) -> serde_json::Value {
        let y: serde_json::Map<String, serde_json::Value> = self
            .y
            .iter()
            .map(|(id, y)| (id.to_string(), rat_display(y).into()))
            .collect();
        serde_json::json!({
            "value": rat_display(&self.value),
            "y": y,
            "rho": self.rho,
        })
    }
}

/// Solves the fractional knapsack with values `weight*hint` and the given
/// budget by greedy descent on hints; `priority_rank[id]` breaks hint ties,
/// lower rank first.
pub fn solve_kph(
    items: &[KphItem],
    budget: &Rat,
    priority_rank: &[usize],
) -> Result<KphSolution, OracleError> {
    if budget.is_negative() {
        return Err(OracleError::NegativeBudget(rat_display(budget)));
    }
    let mut order: Vec<&KphItem> = items.iter().collect();
    order.sort_by(|a, b| {
        b.hint
            .cmp(&a.hint)
            .then_with(|| priority_rank[a.id].cmp(&priority_rank[b.id]))
    });

    let mut y = BTreeMap::new();
    let mut integral_set = Vec::new();
    let mut fractional_item = None;
    let mut value = Rat::zero();
    let mut weight = Rat::zero();
    let mut remaining = budget.clone();
    let mut min_packed_hint: Option<u64> = None;
    for item in &order {
        if remaining.is_zero() {
            y.insert(item.id, Rat::zero());
            continue;
        }
        if item.weight <= remaining {
            y.insert(item.id, rat_u64(1));
            integral_set.push(item.id);
            value += item.value();
            weight += &item.weight;
            remaining -= &item.weight;
            min_packed_hint = Some(item.hint);
        } else {
            let fraction = &remaining / &item.weight;
            value += item.value() * &fraction;
            weight += &remaining;
            y.insert(item.id, fraction);
            fractional_item = Some(item.id);
            remaining = Rat::zero();
        }
    }
    let rho = match fractional_item {
        Some(id) => items
            .iter()
            .find(|item| item.id == id)
            .expect("fractional item comes from the item list")
            .hint,
        None => min_packed_hint.unwrap_or(0),
    };
    Ok(KphSolution {
        y,
        rho,
        fractional_item,
        integral_set,
        value,
        weight,
    })
}

/// Items of an instance in hint-knapsack form: weights are lengths, values
/// are `t*h`.
pub fn instance_items(inst: &Instance) -> Vec<KphItem> {
    inst.articles()
        .iter()
        .enumerate()
        .map(|(id, a)| KphItem {
            id,
            hint: a.hint(),
            weight: a.length().clone(),
        })
        .collect()
}

/// Fractional knapsack optimum of a whole instance at its own budget.
pub fn solve_kph_instance(inst: &Instance) -> Result<KphSolution, OracleError> {
    solve_kph(
        &instance_items(inst),
        &inst.budget_rat(),
        inst.tie_priority(),
    )
}

/// Exact 0/1 knapsack optimum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralKnapsack {
    pub set: Vec<usize>,
    pub value: Rat,
    pub weight: Rat,
}

/// Default item-count limit for the exhaustive integral solver.
pub const INTEGRAL_ITEM_LIMIT: usize = 22;

/// Solves the 0/1 knapsack with values `weight*hint` exactly by subset
/// enumeration; intended for oracle use on small item sets.
pub fn solve_kph_integral(
    items: &[KphItem],
    budget: &Rat,
    item_limit: usize,
) -> Result<IntegralKnapsack, OracleError> {
    if budget.is_negative() {
        return Err(OracleError::NegativeBudget(rat_display(budget)));
    }
    if items.len() > item_limit {
        return Err(OracleError::LimitExceeded(format!(
            "{} items exceed the integral solver limit {item_limit}",
            items.len()
        )));
    }
    let mut best = IntegralKnapsack {
        set: Vec::new(),
        value: Rat::zero(),
        weight: Rat::zero(),
    };
    for mask in 0u64..(1u64 << items.len()) {
        let mut weight = Rat::zero();
        let mut value = Rat::zero();
        let mut feasible = true;
        for (i, item) in items.iter().enumerate() {
            if mask & (1 << i) != 0 {
                weight += &item.weight;
                if &weight > budget {
                    feasible = false;
                    break;
                }
                value += item.value();
            }
        }
        if feasible && value > best.value {
            best = IntegralKnapsack {
                set: items
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, item)| item.id)
                    .collect(),
                value,
                weight,
            };
        }
    }
    Ok(best)
}

/// Offline reading optimum together with a witnessing transcript.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OfflineOptimum {
    pub value: Rat,
    pub witness: Transcript,
}

/// Default work limit (sum of lengths times budget) for the reading DP.
pub const DP_WORK_LIMIT: u128 = 50_000_000;

/// Exact reading optimum over integer prefix lengths via a knapsack-style DP
/// on (article, remaining budget).
///
/// For instances with integer budget and lengths this equals the optimum of
/// the fractional-reading model: the objective is piecewise-linear in each
/// prefix length with breakpoints at integers, so some optimal prefix vector
/// is integral.
pub fn opt_rao_dp(inst: &Instance) -> Result<OfflineOptimum, OracleError> {
    opt_rao_dp_limited(inst, DP_WORK_LIMIT)
}

/// [`opt_rao_dp`] with an explicit work limit.
pub fn opt_rao_dp_limited(inst: &Instance, work_limit: u128) -> Result<OfflineOptimum, OracleError> {
    let budget = inst.budget() as usize;
    let mut lengths = Vec::with_capacity(inst.len());
    for (i, article) in inst.articles().iter().enumerate() {
        if !article.length().is_integer() {
            return Err(OracleError::NonIntegerLength(i));
        }
        let t = article
            .length()
            .numer()
            .try_into()
            .map_err(|_| OracleError::LimitExceeded(format!("article {i} length overflows")))?;
        lengths.push(std::cmp::min(t, budget as u64) as usize);
    }
    let work: u128 = lengths
        .iter()
        .map(|&t| (t as u128 + 1) * (budget as u128 + 1))
        .sum();
    if work > work_limit {
        return Err(OracleError::LimitExceeded(format!(
            "DP work {work} exceeds limit {work_limit}"
        )));
    }

    // prefix_gain[i][s] = information in the first s steps of article i.
    let prefix_gain: Vec<Vec<Rat>> = inst
        .articles()
        .iter()
        .zip(&lengths)
        .map(|(article, &t)| {
            (0..=t)
                .map(|s| {
                    article
                        .info_gain(&rat_usize(s))
                        .expect("prefix within article length")
                })
                .collect()
        })
        .collect();

    let mut table = vec![Rat::zero(); budget + 1];
    let mut choices: Vec<Vec<u16>> = Vec::with_capacity(inst.len());
    for (i, &t) in lengths.iter().enumerate() {
        let mut next = table.clone();
        let mut choice = vec![0u16; budget + 1];
        for b in 0..=budget {
            for s in 1..=t.min(b) {
                let candidate = &table[b - s] + &prefix_gain[i][s];
                if candidate > next[b] {
                    next[b] = candidate;
                    choice[b] = s as u16;
                }
            }
        }
        table = next;
        choices.push(choice);
    }

    let value = table[budget].clone();
    let mut reads = vec![Rat::zero(); inst.len()];
    let mut b = budget;
    for i in (0..inst.len()).rev() {
        let s = choices[i][b] as usize;
        reads[i] = rat_usize(s);
        b -= s;
    }
    let witness = Transcript::from_reads(inst, (0..inst.len()).collect(), reads)
        .expect("DP witness is feasible");
    debug_assert_eq!(witness.total_info, value);
    Ok(OfflineOptimum { value, witness })
}

/// Exact reading optimum for non-increasing profiles: takes time steps
/// globally in non-increasing order of marginal rate, with a fractional last
/// step. Works with fractional budgets.
pub fn waterfill(articles: &[Article], budget: &Rat) -> Result<OfflineOptimum, OracleError> {
    if budget.is_negative() {
        return Err(OracleError::NegativeBudget(rat_display(budget)));
    }
    for (i, article) in articles.iter().enumerate() {
        if !article.non_increasing() {
            return Err(OracleError::NotNonIncreasing(i));
        }
    }
    // Every segment is one marginal-rate block; position breaks ties so that
    // blocks of one article are taken in prefix order.
    let mut blocks: Vec<(u64, usize, usize, &Rat)> = Vec::new();
    for (i, article) in articles.iter().enumerate() {
        for (pos, seg) in article.profile().segments().iter().enumerate() {
            blocks.push((seg.rate, i, pos, &seg.len));
        }
    }
    blocks.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut remaining = budget.clone();
    let mut reads = vec![Rat::zero(); articles.len()];
    let mut value = Rat::zero();
    for (rate, article, _, len) in blocks {
        if remaining.is_zero() {
            break;
        }
        let take = if *len <= remaining {
            len.clone()
        } else {
            remaining.clone()
        };
        remaining -= &take;
        value += &take * rat_u64(rate);
        reads[article] += take;
    }
    let witness = Transcript::from_articles(articles, budget, (0..articles.len()).collect(), reads)
        .expect("water-filling respects budget and lengths");
    debug_assert_eq!(witness.total_info, value);
    Ok(OfflineOptimum { value, witness })
}

/// [`waterfill`] on a whole instance at its own budget.
pub fn opt_rao_waterfill(inst: &Instance) -> Result<OfflineOptimum, OracleError> {
    waterfill(inst.articles(), &inst.budget_rat())
}
