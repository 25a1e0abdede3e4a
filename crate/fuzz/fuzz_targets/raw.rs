#![no_main]

use asbsr::io::{read_raw, write_raw};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(values) = read_raw(data) else { return };
    let mut buf = Vec::new();
    write_raw(&mut buf, &values).unwrap();
    assert_eq!(buf, data);
});
