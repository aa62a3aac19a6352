#![no_main]

use divcut::io::{parse_instance, parse_plan};
use divcut::{check_plan_feasibility, Params};
use libfuzzer_sys::fuzz_target;

// Input: an instance, a line holding `---`, then a plan.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Some((inst, plan)) = text.split_once("\n---\n") else {
        return;
    };
    let (Ok(inst), Ok(file)) = (parse_instance(inst), parse_plan(plan)) else {
        return;
    };
    if let Ok(plan) = file.into_plan(&inst, &Params::default()) {
        let _ = check_plan_feasibility(&plan);
    }
});
