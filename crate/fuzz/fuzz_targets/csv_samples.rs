#![no_main]

use asbsr::io::csv::{read_mask_indices, read_samples, write_samples};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = read_mask_indices(data, 16, 16);
    let Ok(samples) = read_samples(data, 16, 16) else { return };
    let mut buf = Vec::new();
    write_samples(&mut buf, &samples).unwrap();
    assert_eq!(read_samples(&buf[..], 16, 16).unwrap(), samples);
});
