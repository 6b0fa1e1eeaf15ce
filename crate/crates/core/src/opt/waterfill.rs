use crate::error::{Error, Result};

/// Power allocation across parallel Gaussian modes.
#[derive(Clone, Debug, PartialEq)]
pub struct WaterfillResult {
    pub powers: Vec<f64>,
    pub water_level: f64,
}

/// Maximizes `sum_i log2(1 + g_i p_i / noise_var)` subject to
/// `sum_i p_i = budget`, `p_i >= 0`.
///
/// Modes with zero gain never receive power. The optimal level `mu` gives
/// `p_i = max(0, mu - noise_var / g_i)`.
pub fn waterfill(gains: &[f64], noise_var: f64, budget: f64) -> Result<WaterfillResult> {
    if !(budget > 0.0 && budget.is_finite()) {
        return Err(Error::InvalidInput(format!("water-filling budget must be positive, got {budget}")));
    }
    if !(noise_var > 0.0) {
        return Err(Error::InvalidInput("noise variance must be positive".into()));
    }
    if gains.iter().any(|g| !(*g >= 0.0) || !g.is_finite()) {
        return Err(Error::InvalidInput("mode gains must be finite and nonnegative".into()));
    }
    let mut order: Vec<usize> = (0..gains.len()).filter(|&i| gains[i] > 0.0).collect();
    if order.is_empty() {
        return Err(Error::InvalidInput("all mode gains are zero".into()));
    }
    let floor = |i: usize| noise_var / gains[i];
    order.sort_by(|&a, &b| floor(a).total_cmp(&floor(b)));

    // Grow the active set from the strongest mode until the next floor sits
    // above the water level.
    let mut active = 0;
    let mut floor_sum = 0.0;
    let mut level = 0.0;
    for (m, &i) in order.iter().enumerate() {
        let candidate = (budget + floor_sum + floor(i)) / (m + 1) as f64;
        if m > 0 && candidate <= floor(i) {
            break;
        }
        active = m + 1;
        floor_sum += floor(i);
        level = candidate;
    }

    let mut powers = vec![0.0; gains.len()];
    for &i in &order[..active] {
        powers[i] = (level - floor(i)).max(0.0);
    }
    // Absorb rounding so the budget is met exactly.
    let total: f64 = powers.iter().sum();
    if total > 0.0 {
        let fix = budget / total;
        powers.iter_mut().for_each(|p| *p *= fix);
    }
    Ok(WaterfillResult { powers, water_level: level })
}

impl WaterfillResult {
    pub fn rate_bits(&self, gains: &[f64], noise_var: f64) -> f64 {
        gains.iter().zip(&self.powers).map(|(g, p)| (1.0 + g * p / noise_var).log2()).sum()
    }

    /// Worst violation of the optimality conditions: active modes sit exactly
    /// at the water level, inactive ones have their floor at or above it.
    pub fn kkt_residual(&self, gains: &[f64], noise_var: f64) -> f64 {
        let mut worst = 0.0f64;
        for (g, p) in gains.iter().zip(&self.powers) {
            if *g <= 0.0 {
                worst = worst.max(*p);
                continue;
            }
            let floor = noise_var / g;
            if *p > 0.0 {
                worst = worst.max((p + floor - self.water_level).abs());
            } else {
                worst = worst.max(self.water_level - floor);
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode_takes_everything() {
        let r = waterfill(&[1.0], 1.0, 1.0).unwrap();
        assert_eq!(r.powers, vec![1.0]);
        assert!((r.water_level - 2.0).abs() < 1e-15);
    }

    #[test]
    fn equal_gains_split_evenly() {
        let r = waterfill(&[2.0, 2.0, 2.0], 0.5, 3.0).unwrap();
        for p in &r.powers {
            assert!((p - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn two_gain_closed_form() {
        let r = waterfill(&[4.0, 1.0], 1.0, 1.0).unwrap();
        assert!((r.powers[0] - 0.875).abs() < 1e-12);
        assert!((r.powers[1] - 0.125).abs() < 1e-12);
        assert!((r.water_level - 1.125).abs() < 1e-12);
        // Grid search oracle over p0 in steps of 1e-4.
        let mut best = (f64::NEG_INFINITY, 0.0);
        for i in 0..=10_000 {
            let p0 = i as f64 * 1e-4;
            let rate = (1.0 + 4.0 * p0).log2() + (1.0 + (1.0 - p0)).log2();
            if rate > best.0 {
                best = (rate, p0);
            }
        }
        assert!((best.1 - 0.875).abs() <= 1e-4);
    }

    #[test]
    fn small_budget_goes_to_best_mode() {
        let r = waterfill(&[1.0, 10.0, 3.0], 1.0, 0.01).unwrap();
        assert_eq!(r.powers[0], 0.0);
        assert_eq!(r.powers[2], 0.0);
        assert!((r.powers[1] - 0.01).abs() < 1e-15);
    }

    #[test]
    fn zero_gains_rejected() {
        assert!(waterfill(&[0.0, 0.0], 1.0, 1.0).is_err());
        let r = waterfill(&[0.0, 1.0], 1.0, 1.0).unwrap();
        assert_eq!(r.powers[0], 0.0);
    }
}
