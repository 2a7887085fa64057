#![no_main]

use cotlar_core::replay::replay_document;
use cotlar_core::report::ReportDocument;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(doc) = serde_json::from_slice::<ReportDocument>(data) {
        let _ = replay_document(&doc);
    }
});
