#![no_main]

use cfgain::counterfactual::{check_identities, GainSummary};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(report) = serde_json::from_slice::<GainSummary>(data) else {
        return;
    };
    let _ = check_identities(&report, 1e-10);
    let text = serde_json::to_string(&report).expect("a parsed report serializes");
    let again: GainSummary = serde_json::from_str(&text).expect("serialized report parses");
    assert_eq!(serde_json::to_string(&again).unwrap(), text);
});
