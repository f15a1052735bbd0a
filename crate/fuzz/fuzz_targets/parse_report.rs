#![no_main]

use libfuzzer_sys::fuzz_target;
use moisil::harness::VerificationReport;

// Accepted reports survive a write/read round trip unchanged.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(report) = VerificationReport::from_json(text) else {
        return;
    };
    let back = VerificationReport::from_json(&report.to_json()).expect("emitted report must parse");
    assert_eq!(back.to_json(), report.to_json());
});
