#![no_main]

use asbsr::io::{read_pnm, write_pbm, write_pgm, write_ppm, Pnm};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(image) = read_pnm(data) else { return };
    // Anything accepted must survive a write and re-read.
    let mut buf = Vec::new();
    match &image {
        Pnm::Bitmap(b) => write_pbm(&mut buf, b).unwrap(),
        Pnm::Gray(g) => write_pgm(&mut buf, g).unwrap(),
        Pnm::Rgb(rgb) => write_ppm(&mut buf, rgb).unwrap(),
    }
    let again = read_pnm(&buf).expect("re-read of written image");
    if let (Pnm::Bitmap(a), Pnm::Bitmap(b)) = (&image, &again) {
        assert_eq!(a, b);
    }
});
