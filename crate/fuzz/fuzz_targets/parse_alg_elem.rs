#![no_main]

use cotlar_core::ncfourier::{format_alg_elem, parse_alg_elem};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(x) = parse_alg_elem(s) {
        assert_eq!(parse_alg_elem(&format_alg_elem(&x)).unwrap(), x);
    }
});
