#![no_main]

use cotlar_core::text::{format_cmat, parse_cmat};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(g) = parse_cmat(s) {
        assert_eq!(parse_cmat(&format_cmat(&g)).unwrap(), g);
    }
});
