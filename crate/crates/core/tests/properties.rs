use asbsr::io;
use asbsr::masks::{make_shape_mask, ShapeKind, ShapeSpec};
use asbsr::recon::{reconstruct_bs, ReconOptions};
use asbsr::sampling::{make_grid, prefilter, take_samples, GridKind, SampleSet};
use asbsr::spectrum::{k_largest_mask, magnitude_order};
use asbsr::synthetic::{smooth_image, tomo_phantom};
use asbsr::transforms::{
    dct1, forward_dct, forward_dft, inverse_dct, inverse_dft, radon_forward, radon_inverse, uniform_angles, Direction,
};
use asbsr::ImageGrid;
use ndarray::Array2;
use proptest::prelude::*;

fn image(max_side: usize) -> impl Strategy<Value = ImageGrid> {
    (1..=max_side, 1..=max_side).prop_flat_map(|(h, w)| {
        prop::collection::vec(-300.0..300.0f64, h * w)
            .prop_map(move |v| ImageGrid::new(Array2::from_shape_vec((h, w), v).unwrap()).unwrap())
    })
}

fn kind() -> impl Strategy<Value = ShapeKind> {
    prop::sample::select(ShapeKind::ALL.to_vec())
}

fn grid_kind() -> impl Strategy<Value = GridKind> {
    prop::sample::select(GridKind::ALL.to_vec())
}

fn max_abs_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dct_and_dft_preserve_energy_and_invert(img in image(24)) {
        let e = img.energy();
        let dct = forward_dct(&img);
        let dft = forward_dft(&img);
        prop_assert!((dct.energy() - e).abs() <= 1e-10 * e.max(1.0));
        prop_assert!((dft.energy() - e).abs() <= 1e-10 * e.max(1.0));
        prop_assert!(max_abs_diff(inverse_dct(&dct).as_array(), img.as_array()) <= 1e-9);
        prop_assert!(max_abs_diff(inverse_dft(&dft).as_array(), img.as_array()) <= 1e-9);
    }

    #[test]
    fn dct1_round_trip(signal in prop::collection::vec(-1e3..1e3f64, 1..200)) {
        let back = dct1(&dct1(&signal, Direction::Forward).unwrap(), Direction::Inverse).unwrap();
        for (a, b) in signal.iter().zip(&back) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn masks_nest_hold_dc_and_hit_their_area(
        kind in kind(), h in 2usize..40, w in 2usize..40,
        f1 in 0.05..1.0f64, f2 in 0.05..1.0f64, aspect in 0.3..3.0f64, angle in -90.0..90.0f64,
    ) {
        let (lo, hi) = if f1 <= f2 { (f1, f2) } else { (f2, f1) };
        let base = ShapeSpec::new(kind, lo).with_aspect_ratio(aspect).with_orientation(angle);
        let small = make_shape_mask(&base, h, w);
        let large = make_shape_mask(&base.with_area_fraction(hi), h, w);
        if let (Ok(small), Ok(large)) = (small, large) {
            prop_assert!(small.get(0, 0));
            prop_assert_eq!(small.count(), (lo * (h * w) as f64).round() as usize);
            prop_assert!(ndarray::Zip::from(small.cells()).and(large.cells()).all(|&s, &l| !s || l));
        }
    }

    #[test]
    fn grids_hold_m_distinct_sorted_positions(
        kind in grid_kind(), h in 1usize..50, w in 1usize..50, frac in 0.01..1.0f64, seed in any::<u64>(),
    ) {
        let m = ((frac * (h * w) as f64).round() as usize).max(1);
        let grid = make_grid(kind, h, w, m, seed).unwrap();
        prop_assert_eq!(grid.len(), m);
        prop_assert!(grid.windows(2).all(|p| p[0] < p[1]));
        prop_assert!(grid.iter().all(|&(r, c)| r < h && c < w));
        prop_assert_eq!(grid, make_grid(kind, h, w, m, seed).unwrap());
    }

    #[test]
    fn k_largest_keeps_the_most_energy(
        (values, other) in prop::collection::vec(-50.0..50.0f64, 16).prop_flat_map(|v| {
            (1usize..16).prop_flat_map(move |k| (Just(v.clone()), prop::sample::subsequence((0..16).collect::<Vec<usize>>(), k)))
        }),
    ) {
        let k = other.len();
        let coeffs = Array2::from_shape_vec((4, 4), values).unwrap();
        let kept = |mask: &Array2<bool>| coeffs.iter().zip(mask).filter(|(_, &m)| m).map(|(v, _)| v * v).sum::<f64>();
        let best = kept(k_largest_mask(&coeffs, k).cells());
        let alt = Array2::from_shape_fn((4, 4), |(r, c)| other.contains(&(r * 4 + c)));
        prop_assert!(best + 1e-9 >= kept(&alt));
        prop_assert_eq!(magnitude_order(coeffs.as_slice().unwrap()).len(), 16);
    }

    #[test]
    fn text_formats_round_trip(img in image(12), seed in any::<u64>()) {
        let rounded = ImageGrid::new(img.as_array().mapv(|v| v.abs().round().min(255.0))).unwrap();
        let mut buf = Vec::new();
        io::write_pgm(&mut buf, &rounded).unwrap();
        prop_assert_eq!(io::decode_gray(&buf).unwrap(), rounded);

        let mut raw = Vec::new();
        io::write_raw(&mut raw, img.as_array()).unwrap();
        prop_assert_eq!(&io::read_raw(&raw).unwrap(), img.as_array());

        let (h, w) = (img.height(), img.width());
        let m = (h * w).div_ceil(2);
        let samples = take_samples(&img, &make_grid(GridKind::Pseudorandom, h, w, m, seed).unwrap()).unwrap();
        let mut table = Vec::new();
        io::csv::write_samples(&mut table, &samples).unwrap();
        prop_assert_eq!(io::csv::read_samples(&table[..], h, w).unwrap(), samples);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn reconstruction_is_linear(seed in any::<u64>(), a in -4.0..4.0f64, b in -4.0..4.0f64) {
        let n = 24;
        let mask = make_shape_mask(&ShapeSpec::pie_sector(0.3), n, n).unwrap();
        let positions = make_grid(GridKind::Jittered, n, n, 220, seed).unwrap();
        let x = smooth_image(n, n, seed);
        let y = smooth_image(n, n, seed ^ 1);
        let run = |img: &ImageGrid| {
            let s = take_samples(img, &positions).unwrap();
            reconstruct_bs(&s, &mask, None, &ReconOptions::fixed(30)).unwrap().0.into_array()
        };
        let combo = ImageGrid::new(x.as_array() * a + y.as_array() * b).unwrap();
        let lhs = run(&combo);
        let rhs = run(&x) * a + run(&y) * b;
        let scale = lhs.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        prop_assert!(max_abs_diff(&lhs, &rhs) <= 1e-9 * scale);
    }

    #[test]
    fn band_limited_image_is_a_fixed_point(seed in any::<u64>(), kind in kind()) {
        let n = 20;
        let mask = make_shape_mask(&ShapeSpec::new(kind, 0.4), n, n).unwrap();
        let img = prefilter(&smooth_image(n, n, seed), &mask).unwrap();
        let all: Vec<_> = (0..n).flat_map(|r| (0..n).map(move |c| (r, c))).collect();
        let samples = SampleSet::new(n, n, all, img.as_array().iter().copied().collect()).unwrap();
        let (rec, report) = reconstruct_bs(&samples, &mask, Some(&img), &ReconOptions::default()).unwrap();
        prop_assert_eq!(report.iterations_run, 1);
        prop_assert!(max_abs_diff(rec.as_array(), img.as_array()) <= 1e-9);
    }

    #[test]
    fn radon_projections_conserve_mass(seed in any::<u64>(), count in 1usize..24) {
        let img = smooth_image(16, 16, seed);
        let sino = radon_forward(&img, &uniform_angles(count)).unwrap();
        let total = img.sum();
        for row in sino.values().rows() {
            prop_assert!((row.sum() - total).abs() <= 1e-9 * total);
        }
    }
}

fn fbp_relative_error(img: &ImageGrid, angles: usize) -> f64 {
    let back = radon_inverse(&radon_forward(img, &uniform_angles(angles)).unwrap()).unwrap();
    let err = back.as_array() - img.as_array();
    (err.mapv(|v| v * v).sum() / img.energy()).sqrt()
}

#[test]
fn filtered_back_projection_recovers_smooth_content() {
    let rel = fbp_relative_error(&smooth_image(64, 64, 3), 128);
    assert!(rel < 0.05, "relative error {rel}");
}

#[test]
fn filtered_back_projection_sharpens_with_resolution() {
    // Edges blur under the footprint model, so the phantom error shrinks with size.
    let coarse = fbp_relative_error(&tomo_phantom(64, 0.45), 128);
    let fine = fbp_relative_error(&tomo_phantom(128, 0.45), 256);
    assert!(coarse < 0.3 && fine < coarse, "relative errors {coarse} {fine}");
}
