#![no_main]

use asbsr::io::png::{decode_png_gray, write_png_gray};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(image) = decode_png_gray(data) else { return };
    let mut buf = Vec::new();
    write_png_gray(&mut buf, &image).unwrap();
    assert_eq!(decode_png_gray(&buf).unwrap().dims(), image.dims());
});
