use std::time::Duration;

use super::CuttingPlan;

/// Summary row of a plan: stocks used, counted trim, trim percentage, welds,
/// banked leftovers and solve time.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanStats {
    pub stocks_used: usize,
    pub total_trim_loss: u64,
    /// 100 · trim / (stocks · c − Σ usable leftovers); 0 when the
    /// denominator vanishes.
    pub trim_percentage: f64,
    pub weld_count: u64,
    /// Sorted ascending.
    pub usable_leftovers: Vec<u64>,
    pub elapsed: Duration,
}

impl PlanStats {
    /// Leftovers grouped as `(length, count)`, ascending by length.
    pub fn leftover_groups(&self) -> Vec<(u64, usize)> {
        let mut groups: Vec<(u64, usize)> = Vec::new();
        for &len in &self.usable_leftovers {
            match groups.last_mut() {
                Some((l, n)) if *l == len => *n += 1,
                _ => groups.push((len, 1)),
            }
        }
        groups
    }
}

pub fn compute_stats(plan: &CuttingPlan, elapsed: Duration) -> PlanStats {
    let mut usable_leftovers: Vec<u64> = plan
        .patterns
        .iter()
        .filter(|p| p.leftover_usable)
        .map(|p| p.trim)
        .collect();
    usable_leftovers.sort_unstable();

    let total_trim_loss = plan.total_trim_loss();
    let material = plan.patterns.len() as u128 * u128::from(plan.instance.stock_length);
    let banked: u128 = usable_leftovers.iter().map(|&l| u128::from(l)).sum();
    let trim_percentage = match material.checked_sub(banked) {
        Some(base) if base > 0 => 100.0 * total_trim_loss as f64 / base as f64,
        _ => 0.0,
    };

    PlanStats {
        stocks_used: plan.patterns.len(),
        total_trim_loss,
        trim_percentage,
        weld_count: plan.weld_count(),
        usable_leftovers,
        elapsed,
    }
}
