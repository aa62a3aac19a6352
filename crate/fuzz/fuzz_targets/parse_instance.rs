#![no_main]

use divcut::io::{parse_instance, write_instance};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(inst) = parse_instance(text) {
        let again = parse_instance(&write_instance(&inst)).expect("written instance parses");
        assert_eq!(again, inst);
    }
});
