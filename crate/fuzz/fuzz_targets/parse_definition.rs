#![no_main]

use std::sync::Arc;

use libfuzzer_sys::fuzz_target;
use moisil::geometry::DefinitionFile;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(def) = DefinitionFile::from_json(text) else {
        return;
    };
    if let Ok(chart) = def.chart() {
        let _ = def.field(Arc::new(chart));
    }
});
