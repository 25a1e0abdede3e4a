#![no_main]

use asbsr::io::csv::read_sinogram_cells;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(cells) = read_sinogram_cells(data) {
        assert!(cells.iter().all(|c| c.angle.is_finite() && c.value.is_finite()));
    }
});
