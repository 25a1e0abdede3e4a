#![no_main]

use asbsr::io::csv::{read_sparse_spectrum, write_sparse_spectrum};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(spectrum) = read_sparse_spectrum(data, 8, 8) else { return };
    let mut buf = Vec::new();
    write_sparse_spectrum(&mut buf, &spectrum).unwrap();
    let again = read_sparse_spectrum(&buf[..], 8, 8).unwrap();
    assert_eq!(again.positions(), spectrum.positions());
});
