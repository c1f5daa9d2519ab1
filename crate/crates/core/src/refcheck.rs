//! Brute-force reference solvers, deliberately independent of the
//! production oracles so tests can cross-check them. Test-scale only.

use crate::model::Instance;
use crate::rat::Rat;

/// Fractional knapsack optimum by vertex enumeration: some optimal solution
/// takes a subset of items fully plus at most one partial item, and partial
/// value is `hint · time` because item value is `hint · weight`. Integer
/// weights and budget keep all arithmetic in `u128`.
pub fn exhaustive_fractional_knapsack(items: &[(u64, u64)], budget: u64) -> Rat {
    assert!(items.len() <= 20, "exhaustive oracle is test-scale only");
    let n = items.len();
    let mut best: u128 = 0;
    for mask in 0u32..1 << n {
        let mut weight: u128 = 0;
        let mut value: u128 = 0;
        for (i, &(hint, w)) in items.iter().enumerate() {
            if mask >> i & 1 == 1 {
                weight += w as u128;
                value += hint as u128 * w as u128;
            }
        }
        if weight > budget as u128 {
            continue;
        }
        let left = budget as u128 - weight;
        best = best.max(value);
        for (i, &(hint, w)) in items.iter().enumerate() {
            if mask >> i & 1 == 0 {
                best = best.max(value + hint as u128 * left.min(w as u128));
            }
        }
    }
    Rat::from_integer(best.into())
}

/// Offline reading optimum by exhaustive search over integral reading
/// lengths. With an integer budget and integer step boundaries some optimal
/// allocation is integral, so the search is exact.
pub fn exhaustive_rao_opt(inst: &Instance) -> Rat {
    assert!(inst.len() <= 8, "exhaustive oracle is test-scale only");
    let tables: Vec<Vec<u128>> = inst
        .articles()
        .iter()
        .map(|article| {
            let mut sums = vec![0u128];
            for seg in article.profile().segments() {
                assert!(seg.len.is_integer(), "integer lengths required");
                let len = u64::try_from(seg.len.to_integer()).expect("test-scale length");
                for _ in 0..len {
                    sums.push(sums.last().unwrap() + seg.rate as u128);
                }
            }
            sums
        })
        .collect();

    fn dfs(tables: &[Vec<u128>], left: u64, acc: u128, best: &mut u128) {
        match tables.split_first() {
            None => *best = (*best).max(acc),
            Some((table, rest)) => {
                let max_read = (table.len() - 1).min(left as usize);
                for tau in 0..=max_read {
                    dfs(rest, left - tau as u64, acc + table[tau], best);
                }
            }
        }
    }

    let mut best = 0u128;
    dfs(&tables, inst.budget(), 0, &mut best);
    Rat::from_integer(best.into())
}

/// Success probability of the cutoff rule in the classical secretary
/// problem: reject the first `cutoff` candidates, then take the first one
/// beating all of them.
pub fn secretary_success_probability(n: usize, cutoff: usize) -> f64 {
    assert!(n >= 1 && cutoff < n);
    if cutoff == 0 {
        return 1.0 / n as f64;
    }
    let harmonic_span: f64 = (cutoff..n).map(|j| 1.0 / j as f64).sum();
    cutoff as f64 / n as f64 * harmonic_span
}

/// Pearson goodness-of-fit statistic against the uniform distribution.
pub fn chi_squared_uniform(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    counts
        .iter()
        .map(|&c| {
            let diff = c as f64 - expected;
            diff * diff / expected
        })
        .sum()
}
