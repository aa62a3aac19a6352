use std::ops::RangeInclusive;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{Instance, Item};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid range: {0}")]
    InvalidRange(String),
}

/// `n` distinct item lengths drawn uniformly from `lengths`, each with a
/// demand drawn uniformly from `demands`. Deterministic in `seed`.
pub fn gen_instance(
    seed: u64,
    n: usize,
    stock_length: u64,
    lengths: RangeInclusive<u64>,
    demands: RangeInclusive<u32>,
) -> Result<Instance, GenError> {
    let (wmin, wmax) = (*lengths.start(), *lengths.end());
    let (vmin, vmax) = (*demands.start(), *demands.end());
    if n == 0 {
        return Err(GenError::InvalidRange("n must be at least 1".into()));
    }
    if wmin < 1 || wmin > wmax || wmax > stock_length {
        return Err(GenError::InvalidRange(format!(
            "lengths {wmin}..={wmax} must lie within 1..={stock_length}"
        )));
    }
    if vmin < 1 || vmin > vmax {
        return Err(GenError::InvalidRange(format!(
            "demands {vmin}..={vmax} must be nonempty and positive"
        )));
    }
    let span = wmax - wmin + 1;
    if (n as u64) > span {
        return Err(GenError::InvalidRange(format!(
            "cannot draw {n} distinct lengths from {span} values"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks: Vec<u64> = index::sample(&mut rng, span as usize, n)
        .into_iter()
        .map(|i| wmin + i as u64)
        .collect();
    let items = picks
        .into_iter()
        .enumerate()
        .map(|(i, length)| Item {
            id: i as u32 + 1,
            length,
            demand: rng.gen_range(vmin..=vmax),
        })
        .collect();
    Ok(Instance {
        stock_length,
        items,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::write_instance;

    #[test]
    fn same_seed_same_bytes() {
        let a = gen_instance(42, 8, 12000, 1000..=6000, 1..=20).unwrap();
        let b = gen_instance(42, 8, 12000, 1000..=6000, 1..=20).unwrap();
        assert_eq!(a.items.len(), 8);
        assert_eq!(write_instance(&a), write_instance(&b));
        let c = gen_instance(43, 8, 12000, 1000..=6000, 1..=20).unwrap();
        assert_ne!(write_instance(&a), write_instance(&c));
    }

    #[test]
    fn lengths_are_distinct_and_in_range() {
        let inst = gen_instance(7, 41, 12000, 1000..=1040, 1..=30).unwrap();
        let mut lens: Vec<u64> = inst.items.iter().map(|i| i.length).collect();
        lens.sort_unstable();
        lens.dedup();
        assert_eq!(lens.len(), 41);
        assert!(lens.iter().all(|l| (1000..=1040).contains(l)));
        assert!(inst.items.iter().all(|i| (1..=30).contains(&i.demand)));
    }

    #[test]
    fn bad_ranges() {
        assert!(gen_instance(1, 0, 12000, 1000..=6000, 1..=20).is_err());
        assert!(gen_instance(1, 8, 12000, 13000..=14000, 1..=20).is_err());
        assert!(gen_instance(1, 8, 12000, 1000..=6000, 0..=20).is_err());
        assert!(gen_instance(1, 8, 12000, 1000..=1004, 1..=20).is_err());
    }
}
