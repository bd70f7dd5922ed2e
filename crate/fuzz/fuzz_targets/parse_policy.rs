#![no_main]

use libfuzzer_sys::fuzz_target;
use policy_model::{parse_condition, parse_policy};

// The rule-language parser must never panic; errors are fine.
fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_policy(text);
        let _ = parse_condition(text);
    }
});
