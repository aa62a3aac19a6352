mod common;

use common::{model_violations, mutate, rich_plan, rng};
use divcut::check_plan_feasibility;
use rand::Rng;

fn tags(plan: &divcut::CuttingPlan) -> Vec<u8> {
    match check_plan_feasibility(plan) {
        Ok(()) => Vec::new(),
        Err(v) => v.iter().map(|v| v.constraint).collect(),
    }
}

#[test]
fn every_targeted_edit_is_flagged_with_its_constraint() {
    let mut r = rng(0x5e15);
    let mut done = [0usize; 10];
    while done[3..=9].iter().sum::<usize>() < 700 {
        let target = r.gen_range(3..=9u8);
        let plan = rich_plan(&mut r);
        assert_eq!(check_plan_feasibility(&plan), Ok(()));
        assert!(model_violations(&plan).is_empty());
        let Some(bad) = mutate(&plan, target, &mut r) else {
            continue;
        };
        let found = tags(&bad);
        assert!(
            found.contains(&target),
            "target {target}, got {found:?}: {bad:?}"
        );
        assert!(
            model_violations(&bad).contains(&target),
            "reference missed {target}"
        );
        done[target as usize] += 1;
    }
    assert!(done[3..=9].iter().all(|&n| n >= 50), "{done:?}");
}

#[test]
fn checker_and_reference_agree_on_random_edits() {
    let mut r = rng(0xa9e);
    for _ in 0..2000 {
        let mut plan = rich_plan(&mut r);
        let j = r.gen_range(0..plan.patterns.len());
        let p = &mut plan.patterns[j];
        match r.gen_range(0..6) {
            0 => {
                p.trim = p
                    .trim
                    .saturating_add(r.gen_range(0..3))
                    .saturating_sub(r.gen_range(0..3))
            }
            1 => p.leftover_usable = r.gen(),
            2 => {
                if let Some(w) = p.whole_items.first_mut() {
                    w.1 = r.gen_range(0..=w.1 + 1);
                }
            }
            3 => {
                if let Some(d) = p.divisions.first_mut() {
                    d.piece_here = d
                        .piece_here
                        .saturating_add(r.gen_range(0..2))
                        .saturating_sub(r.gen_range(0..2));
                    d.residual = d
                        .residual
                        .saturating_add(r.gen_range(0..2))
                        .saturating_sub(r.gen_range(0..2));
                }
            }
            4 => {
                if let Some(res) = p.placed_residuals.first_mut() {
                    res.unit_index = r.gen_range(0..=res.unit_index + 1);
                }
            }
            _ => p.stock_index = r.gen_range(1..=j + 2),
        }
        let checker = check_plan_feasibility(&plan).is_ok();
        let reference = model_violations(&plan).is_empty();
        assert_eq!(checker, reference, "{plan:?}");
    }
}
