#![no_main]

use libfuzzer_sys::fuzz_target;
use moisil::expr::parse;

// Anything that parses must print, reparse and differentiate without panicking.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(e) = parse(text) else { return };
    let printed = e.to_string();
    let again = parse(&printed).expect("printed expression must reparse");
    let p = [0.3, 1.1, -0.7];
    if let (Ok(a), Ok(b)) = (e.eval_at(&p), again.eval_at(&p)) {
        assert!(a == b || (a.is_nan() && b.is_nan()) || (a - b).abs() <= 1e-9 * (1.0 + a.abs()));
    }
    let _ = e.diff_coord(0).eval_at(&p);
});
