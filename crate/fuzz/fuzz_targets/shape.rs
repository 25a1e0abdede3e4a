#![no_main]

use asbsr::io::{format_shape, parse_shape};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = parse_shape(text) else { return };
    assert_eq!(parse_shape(&format_shape(&spec)).unwrap(), spec);
});
