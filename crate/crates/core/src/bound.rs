//! Guarantee analysis for the threshold reader.
//!
//! The acceptance probability of a high-value article is lower-bounded by
//! controlling two bad events with Chernoff tails: the accepted prefix
//! filling half the budget too early (`Z1`), and the sample knapsack staying
//! under its half-budget (`Z2`). Maximizing the resulting objective
//! `g·β·p′/2` over the feasible parameter region yields the competitive-ratio
//! multiplier `2/(g·β·p′)`.

use thiserror::Error;

/// Slack applied to the strict feasibility inequalities so tail logarithms
/// stay away from their singularities. The constraint `γ + g > 3/2` is
/// treated as closed up to this margin because the optimum sits on it.
pub const FEASIBILITY_MARGIN: f64 = 1e-9;

/// Search parameters: cut fraction `g`, prefix-budget fraction `β`, and
/// sample-knapsack inflation `γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    pub g: f64,
    pub beta: f64,
    pub gamma: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("argument {name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
}

/// First violated feasibility constraint, if any.
pub fn feasibility_violation(p: &BoundParams) -> Option<String> {
    const M: f64 = FEASIBILITY_MARGIN;
    let BoundParams { g, beta, gamma } = *p;
    if !(g >= M && g <= 0.5 - M) {
        return Some(format!("g = {g} outside (0, 1/2)"));
    }
    if !(beta >= M && beta <= 1.0 - M) {
        return Some(format!("beta = {beta} outside (0, 1)"));
    }
    if !(gamma >= 1.0 + M) {
        return Some(format!("gamma = {gamma} not above 1"));
    }
    if !(gamma + g >= 1.5 - M) {
        return Some(format!("gamma + g = {} below 3/2", gamma + g));
    }
    if !(2.0 * g + beta <= 1.0 - M) {
        return Some(format!("2g + beta = {} not below 1", 2.0 * g + beta));
    }
    if !(4.0 * g + gamma <= 2.0 - M) {
        return Some(format!("4g + gamma = {} not below 2", 4.0 * g + gamma));
    }
    None
}

pub fn is_feasible(p: &BoundParams) -> bool {
    feasibility_violation(p).is_none()
}

/// Upper tail of a sum of independent random variables supported in
/// `[0, z_max]` with mean at most `mu_h`:
/// `P[Z ≥ (1+δ)·mu_h] ≤ exp(−(mu_h/z_max)·((1+δ)·ln(1+δ) − δ))`.
pub fn chernoff_tail(mu_h: f64, z_max: f64, delta: f64) -> Result<f64, BoundError> {
    for (name, value) in [("mu_h", mu_h), ("z_max", z_max), ("delta", delta)] {
        if !(value > 0.0) {
            return Err(BoundError::NonPositive { name, value });
        }
    }
    let exponent = -(mu_h / z_max) * ((1.0 + delta) * delta.ln_1p() - delta);
    Ok(exponent.exp())
}

/// Tail of the event that accepted articles fill `T/2 − gT` of the budget
/// before a marked article arrives; `δ₁ = (1−2g)/β − 1` must be positive.
pub fn tail_z1(g: f64, beta: f64) -> Result<f64, BoundError> {
    let delta = (1.0 - 2.0 * g) / beta - 1.0;
    if !(delta > 0.0) {
        return Err(BoundError::Infeasible(format!(
            "2g + beta = {} not below 1",
            2.0 * g + beta
        )));
    }
    Ok(((1.0 - 1.0 / (2.0 * g)) * ((1.0 - 2.0 * g) / beta).ln() - 1.0
        + (1.0 - beta) / (2.0 * g))
        .exp())
}

/// Tail of the event that the sample knapsack stays below half the budget;
/// `δ₂ = (2−4g)/γ − 1` must be positive.
pub fn tail_z2(g: f64, gamma: f64) -> Result<f64, BoundError> {
    let delta = (2.0 - 4.0 * g) / gamma - 1.0;
    if !(delta > 0.0) {
        return Err(BoundError::Infeasible(format!(
            "4g + gamma = {} not below 2",
            4.0 * g + gamma
        )));
    }
    Ok(((2.0 - 1.0 / g) * ((2.0 - 4.0 * g) / gamma).ln() - 2.0 + (1.0 - gamma / 2.0) / g)
        .exp())
}

/// Assembled bound at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundEvaluation {
    pub params: BoundParams,
    pub tail1: f64,
    pub tail2: f64,
    /// Lower bound on the conditional full-read probability p′.
    pub p_prime_lb: f64,
    /// Unconditional full-read probability bound, p′/2.
    pub p: f64,
    /// Guaranteed value fraction `g·β·p′/2`.
    pub objective: f64,
    /// Competitive-ratio multiplier `2/(g·β·p′)`; infinite when `p′ ≤ 0`.
    pub ratio_multiplier: f64,
}

/// Evaluates tails, the p′ lower bound, and the ratio multiplier.
pub fn evaluate_bound(params: &BoundParams) -> Result<BoundEvaluation, BoundError> {
    if let Some(violation) = feasibility_violation(params) {
        return Err(BoundError::Infeasible(violation));
    }
    let tail1 = tail_z1(params.g, params.beta)?;
    let tail2 = tail_z2(params.g, params.gamma)?;
    let p_prime_lb = 1.0 - tail1 - tail2;
    let objective = params.g * params.beta * p_prime_lb / 2.0;
    let ratio_multiplier = if p_prime_lb > 0.0 {
        2.0 / (params.g * params.beta * p_prime_lb)
    } else {
        f64::INFINITY
    };
    Ok(BoundEvaluation {
        params: *params,
        tail1,
        tail2,
        p_prime_lb,
        p: p_prime_lb / 2.0,
        objective,
        ratio_multiplier,
    })
}

/// Ratio multiplier treating infeasibility and non-positive p′ as +∞, for
/// the optimizer.
fn penalized_ratio(params: &BoundParams) -> f64 {
    match evaluate_bound(params) {
        Ok(eval) => eval.ratio_multiplier,
        Err(_) => f64::INFINITY,
    }
}

/// Grid resolution and refinement budget for [`maximize_bound`].
#[derive(Debug, Clone)]
pub struct MaximizeConfig {
    pub g_step: f64,
    pub beta_step: f64,
    pub gamma_step: f64,
    /// Restrict the search to one value of `g`.
    pub fixed_g: Option<f64>,
    /// Simplex value-spread tolerance.
    pub refine_tol: f64,
    pub max_refine_iters: usize,
}

impl Default for MaximizeConfig {
    fn default() -> Self {
        Self {
            g_step: 1e-3,
            beta_step: 1e-2,
            gamma_step: 1e-2,
            fixed_g: None,
            refine_tol: 1e-13,
            max_refine_iters: 2000,
        }
    }
}

/// Feasible grid points for the config, including for each `g` the point on
/// the `γ + g = 3/2` face where the optimum lives.
pub fn grid_points(config: &MaximizeConfig) -> Vec<BoundParams> {
    let gs: Vec<f64> = match config.fixed_g {
        Some(g) => vec![g],
        None => {
            let count = (0.5 / config.g_step).ceil() as usize;
            (1..count).map(|k| k as f64 * config.g_step).collect()
        }
    };
    let mut points = Vec::new();
    for &g in &gs {
        let mut gammas: Vec<f64> = Vec::new();
        let gamma_count = (1.0 / config.gamma_step).ceil() as usize;
        for k in 0..=gamma_count {
            gammas.push(1.0 + k as f64 * config.gamma_step);
        }
        gammas.push(1.5 - g);
        let beta_count = (1.0 / config.beta_step).ceil() as usize;
        for bk in 1..beta_count {
            let beta = bk as f64 * config.beta_step;
            for &gamma in &gammas {
                let p = BoundParams { g, beta, gamma };
                if is_feasible(&p) {
                    points.push(p);
                }
            }
        }
    }
    points
}

/// Nelder–Mead minimization; deterministic for fixed inputs.
fn nelder_mead<F>(f: F, start: &[f64], scale: &[f64], tol: f64, max_iter: usize) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64,
{
    let d = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    simplex.push((start.to_vec(), f(start)));
    for i in 0..d {
        let mut p = start.to_vec();
        p[i] += scale[i];
        let value = f(&p);
        simplex.push((p, value));
    }
    let order = |a: &(Vec<f64>, f64), b: &(Vec<f64>, f64)| {
        a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal)
    };
    for _ in 0..max_iter {
        simplex.sort_by(order);
        let spread = simplex[d].1 - simplex[0].1;
        if spread.is_finite() && spread < tol {
            break;
        }
        let mut centroid = vec![0.0; d];
        for point in &simplex[..d] {
            for (c, x) in centroid.iter_mut().zip(&point.0) {
                *c += x / d as f64;
            }
        }
        let worst = simplex[d].clone();
        let lerp = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let reflected = lerp(1.0);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = lerp(2.0);
            let fe = f(&expanded);
            simplex[d] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[d - 1].1 {
            simplex[d] = (reflected, fr);
        } else {
            let contracted = if fr < worst.1 { lerp(0.5) } else { lerp(-0.5) };
            let fc = f(&contracted);
            if fc < worst.1.min(fr) {
                simplex[d] = (contracted, fc);
            } else {
                let best = simplex[0].0.clone();
                for point in simplex.iter_mut().skip(1) {
                    for (x, b) in point.0.iter_mut().zip(&best) {
                        *x = b + 0.5 * (*x - b);
                    }
                    point.1 = f(&point.0);
                }
            }
        }
    }
    simplex.sort_by(order);
    simplex.swap_remove(0)
}

/// Maximizes the objective (equivalently minimizes the ratio multiplier)
/// over the feasible region: coarse grid scan, simplex refinement, then a
/// polish pass restricted to the `γ + g = 3/2` face.
pub fn maximize_bound(config: &MaximizeConfig) -> Result<(BoundParams, BoundEvaluation), BoundError> {
    let mut best: Option<(BoundParams, f64)> = None;
    for p in grid_points(config) {
        let ratio = penalized_ratio(&p);
        if ratio.is_finite() && best.as_ref().map_or(true, |(_, r)| ratio < *r) {
            best = Some((p, ratio));
        }
    }
    let (grid_best, _) = best.ok_or_else(|| {
        BoundError::Infeasible("no feasible grid point for this configuration".to_string())
    })?;

    let mut candidates: Vec<BoundParams> = vec![grid_best];

    match config.fixed_g {
        Some(g) => {
            let (x, _) = nelder_mead(
                |x| penalized_ratio(&BoundParams { g, beta: x[0], gamma: x[1] }),
                &[grid_best.beta, grid_best.gamma],
                &[config.beta_step, config.gamma_step],
                config.refine_tol,
                config.max_refine_iters,
            );
            candidates.push(BoundParams { g, beta: x[0], gamma: x[1] });
            let (x, _) = nelder_mead(
                |x| penalized_ratio(&BoundParams { g, beta: x[0], gamma: 1.5 - g }),
                &[grid_best.beta],
                &[config.beta_step],
                config.refine_tol,
                config.max_refine_iters,
            );
            candidates.push(BoundParams { g, beta: x[0], gamma: 1.5 - g });
        }
        None => {
            let (x, _) = nelder_mead(
                |x| penalized_ratio(&BoundParams { g: x[0], beta: x[1], gamma: x[2] }),
                &[grid_best.g, grid_best.beta, grid_best.gamma],
                &[config.g_step, config.beta_step, config.gamma_step],
                config.refine_tol,
                config.max_refine_iters,
            );
            candidates.push(BoundParams { g: x[0], beta: x[1], gamma: x[2] });
            let (x, _) = nelder_mead(
                |x| penalized_ratio(&BoundParams { g: x[0], beta: x[1], gamma: 1.5 - x[0] }),
                &[grid_best.g, grid_best.beta],
                &[config.g_step, config.beta_step],
                config.refine_tol,
                config.max_refine_iters,
            );
            candidates.push(BoundParams { g: x[0], beta: x[1], gamma: 1.5 - x[0] });
        }
    }

    let winner = candidates
        .into_iter()
        .filter(|p| is_feasible(p))
        .min_by(|a, b| {
            penalized_ratio(a)
                .partial_cmp(&penalized_ratio(b))
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .expect("the grid best is feasible");
    let eval = evaluate_bound(&winner)?;
    Ok((winner, eval))
}

#[cfg(test)]
mod tests {
    use super::*;

    const PAPER_POINT: BoundParams = BoundParams {
        g: 0.021425,
        beta: 0.565728,
        gamma: 1.478575,
    };

    #[test]
    fn chernoff_vacuous_and_log_linear() {
        let near_one = chernoff_tail(1.0, 1.0, 1e-12).unwrap();
        assert!((near_one - 1.0).abs() < 1e-9);

        let single = chernoff_tail(0.3, 0.1, 0.7).unwrap();
        let doubled = chernoff_tail(0.6, 0.1, 0.7).unwrap();
        assert!((doubled - single * single).abs() < 1e-12 * doubled.max(1.0));

        assert!(chernoff_tail(0.0, 1.0, 1.0).is_err());
        assert!(chernoff_tail(1.0, -1.0, 1.0).is_err());
        assert!(chernoff_tail(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn chernoff_in_unit_interval_and_monotone() {
        let mut prev = 1.0;
        for k in 1..40 {
            let delta = k as f64 * 0.25;
            let tail = chernoff_tail(0.4, 0.2, delta).unwrap();
            assert!(tail > 0.0 && tail <= 1.0);
            assert!(tail < prev);
            prev = tail;
        }
        let mut prev = 1.0;
        for k in 1..40 {
            let ratio = k as f64 * 0.5;
            let tail = chernoff_tail(ratio * 0.2, 0.2, 0.8).unwrap();
            assert!(tail < prev);
            prev = tail;
        }
    }

    #[test]
    fn closed_forms_match_chernoff_substitution() {
        for gk in 1..24 {
            let g = gk as f64 * 0.005;
            for bk in 1..20 {
                let beta = bk as f64 * 0.04;
                if 2.0 * g + beta >= 1.0 - 1e-6 {
                    continue;
                }
                let direct = tail_z1(g, beta).unwrap();
                let delta = (1.0 - 2.0 * g) / beta - 1.0;
                let generic = chernoff_tail(beta / 2.0, g, delta).unwrap();
                assert!((direct - generic).abs() <= 1e-12 * direct.max(1e-30));
            }
            for ck in 1..20 {
                let gamma = 1.0 + ck as f64 * 0.04;
                if 4.0 * g + gamma >= 2.0 - 1e-6 {
                    continue;
                }
                let direct = tail_z2(g, gamma).unwrap();
                let delta = (2.0 - 4.0 * g) / gamma - 1.0;
                let generic = chernoff_tail(gamma / 2.0, g, delta).unwrap();
                assert!((direct - generic).abs() <= 1e-12 * direct.max(1e-30));
            }
        }
    }

    #[test]
    fn tail_z1_rejects_non_positive_delta() {
        assert!(tail_z1(0.2, 0.6).is_err());
        assert!(tail_z1(0.2, 0.7).is_err());
        assert!(tail_z2(0.2, 1.2).is_err());
    }

    #[test]
    fn tail_z1_decreases_as_g_shrinks() {
        let beta = 0.5;
        let mut prev = f64::NEG_INFINITY;
        for k in 1..24 {
            let g = k as f64 * 0.01;
            let tail = tail_z1(g, beta).unwrap();
            assert!(tail > prev, "tail1 must grow with g at fixed beta");
            prev = tail;
        }
    }

    #[test]
    fn evaluate_at_early_point() {
        let eval = evaluate_bound(&BoundParams { g: 1.0 / 81.0, beta: 0.75, gamma: 1.5 }).unwrap();
        assert!((eval.tail1 - 0.2862500).abs() < 2e-5, "tail1 = {}", eval.tail1);
        assert!((eval.tail2 - 0.0819389).abs() < 2e-5, "tail2 = {}", eval.tail2);
        assert!((eval.p_prime_lb - 0.631811).abs() < 4e-5);
        assert!((eval.ratio_multiplier - 341.874253).abs() < 341.87 * 0.01);
        assert!((eval.ratio_multiplier - 341.874253).abs() < 1e-3);
        assert!((eval.ratio_multiplier - 125.77 * std::f64::consts::E).abs() < 341.87 * 0.01);
    }

    #[test]
    fn evaluate_at_tuned_point() {
        let eval = evaluate_bound(&PAPER_POINT).unwrap();
        assert!(eval.ratio_multiplier <= 246.0);
        assert!(eval.ratio_multiplier > 240.0);
        assert!((eval.ratio_multiplier - 245.418009).abs() < 1e-3);
    }

    #[test]
    fn ratio_and_objective_are_reciprocal() {
        for params in [
            PAPER_POINT,
            BoundParams { g: 1.0 / 81.0, beta: 0.75, gamma: 1.5 },
            BoundParams { g: 0.05, beta: 0.4, gamma: 1.45 },
        ] {
            let eval = evaluate_bound(&params).unwrap();
            assert!((eval.ratio_multiplier * eval.objective - 1.0).abs() < 1e-12);
            assert_eq!(eval.objective > 0.0, eval.p_prime_lb > 0.0);
            assert_eq!(eval.p, eval.p_prime_lb / 2.0);
        }
    }

    #[test]
    fn degenerate_point_is_flagged_unbounded() {
        let eval = evaluate_bound(&BoundParams { g: 0.1, beta: 0.7, gamma: 1.4 }).unwrap();
        assert!(eval.p_prime_lb <= 0.0);
        assert!(eval.objective <= 0.0);
        assert!(eval.ratio_multiplier.is_infinite());
    }

    #[test]
    fn feasibility_boundaries() {
        assert!(is_feasible(&PAPER_POINT));
        // The optimum face gamma + g = 3/2 is allowed...
        assert!(is_feasible(&BoundParams { g: 0.0214, beta: 0.566, gamma: 1.5 - 0.0214 }));
        // ...but clearly below it is not.
        assert!(!is_feasible(&BoundParams { g: 0.0214, beta: 0.566, gamma: 1.478 }));
        assert!(!is_feasible(&BoundParams { g: 0.0, beta: 0.5, gamma: 1.5 }));
        assert!(!is_feasible(&BoundParams { g: 0.5, beta: 0.1, gamma: 1.5 }));
        assert!(!is_feasible(&BoundParams { g: 0.1, beta: 0.8, gamma: 1.45 }));
        assert!(!is_feasible(&BoundParams { g: 0.2, beta: 0.3, gamma: 1.3 }));
        assert!(!is_feasible(&BoundParams { g: 0.01, beta: 0.5, gamma: 0.9 }));
    }

    #[test]
    fn feasible_region_implies_positive_deltas() {
        for p in grid_points(&MaximizeConfig {
            g_step: 7e-3,
            beta_step: 4e-2,
            gamma_step: 4e-2,
            ..MaximizeConfig::default()
        }) {
            assert!((1.0 - 2.0 * p.g) / p.beta - 1.0 > 0.0);
            assert!((2.0 - 4.0 * p.g) / p.gamma - 1.0 > 0.0);
            assert!(tail_z1(p.g, p.beta).is_ok());
            assert!(tail_z2(p.g, p.gamma).is_ok());
        }
    }

    #[test]
    fn maximize_with_coarse_grid_still_converges() {
        let config = MaximizeConfig {
            g_step: 4e-3,
            beta_step: 2e-2,
            gamma_step: 2e-2,
            ..MaximizeConfig::default()
        };
        let (params, eval) = maximize_bound(&config).unwrap();
        assert!(is_feasible(&params));
        assert!((params.g - 0.021425).abs() < 2e-3);
        assert!((params.beta - 0.565728).abs() < 2e-3);
        assert!((params.gamma - 1.478575).abs() < 2e-3);
        assert!(eval.ratio_multiplier > 245.0 && eval.ratio_multiplier < 245.6);
        let at_reference = evaluate_bound(&PAPER_POINT).unwrap();
        assert!(eval.objective >= at_reference.objective - 1e-8);

        let (params2, eval2) = maximize_bound(&config).unwrap();
        assert_eq!(params.g.to_bits(), params2.g.to_bits());
        assert_eq!(params.beta.to_bits(), params2.beta.to_bits());
        assert_eq!(params.gamma.to_bits(), params2.gamma.to_bits());
        assert_eq!(eval.ratio_multiplier.to_bits(), eval2.ratio_multiplier.to_bits());
    }

    #[test]
    fn fixed_g_slice_is_worse_than_unrestricted() {
        let slice = MaximizeConfig {
            fixed_g: Some(1.0 / 81.0),
            ..MaximizeConfig::default()
        };
        let (slice_params, slice_eval) = maximize_bound(&slice).unwrap();
        assert_eq!(slice_params.g, 1.0 / 81.0);
        let full = MaximizeConfig {
            g_step: 4e-3,
            beta_step: 2e-2,
            gamma_step: 2e-2,
            ..MaximizeConfig::default()
        };
        let (_, full_eval) = maximize_bound(&full).unwrap();
        assert!(slice_eval.ratio_multiplier > full_eval.ratio_multiplier + 10.0);
        // The best the slice can do is still far better than the first
        // published point on it, and far worse than the tuned optimum.
        assert!(slice_eval.ratio_multiplier < 341.874253);
        assert!(full_eval.ratio_multiplier <= 246.0);
    }
}
