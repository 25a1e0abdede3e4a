use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use rand::Rng;

use crate::error::{ensure_dims, invalid, Error, Result};
use crate::image::ImageGrid;
use crate::masks::{make_shape_mask, ShapeSpec};
use crate::recon::{reconstruct_bs, ReconOptions, ReconReport};
use crate::sampling::SampleSet;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    R,
    G,
    B,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::R, Channel::G, Channel::B];

    pub fn index(self) -> usize {
        match self {
            Channel::R => 0,
            Channel::G => 1,
            Channel::B => 2,
        }
    }

    /// Share of mosaic pixels carrying this channel.
    pub fn density(self) -> f64 {
        match self {
            Channel::G => 0.5,
            Channel::R | Channel::B => 0.25,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arrangement {
    /// G on the diagonal of every 2x2 cell, R at `(0, 1)`, B at `(1, 0)`.
    RegularBayer,
    /// Bayer green; red and blue swapped at random per 2x2 cell.
    SemiRandom,
}

impl Arrangement {
    pub fn as_str(self) -> &'static str {
        match self {
            Arrangement::RegularBayer => "regular_bayer",
            Arrangement::SemiRandom => "semi_random",
        }
    }
}

impl fmt::Display for Arrangement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Arrangement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "regular_bayer" | "bayer" | "regular" => Ok(Arrangement::RegularBayer),
            "semi_random" | "semirandom" => Ok(Arrangement::SemiRandom),
            other => Err(invalid(format!("unknown arrangement '{other}'"))),
        }
    }
}

/// A single-channel-per-pixel colour filter array capture.
#[derive(Debug, Clone, PartialEq)]
pub struct MosaicImage {
    pub channel_of_pixel: Array2<Channel>,
    pub values: Array2<f64>,
    pub arrangement: Arrangement,
    pub seed: Option<u64>,
}

impl MosaicImage {
    pub fn height(&self) -> usize {
        self.values.nrows()
    }

    pub fn width(&self) -> usize {
        self.values.ncols()
    }

    pub fn count(&self, channel: Channel) -> usize {
        self.channel_of_pixel.iter().filter(|&&c| c == channel).count()
    }

    /// The known pixels of one channel.
    pub fn samples(&self, channel: Channel) -> Result<SampleSet> {
        let mut positions = Vec::new();
        let mut values = Vec::new();
        for ((r, c), &ch) in self.channel_of_pixel.indexed_iter() {
            if ch == channel {
                positions.push((r, c));
                values.push(self.values[[r, c]]);
            }
        }
        SampleSet::new(self.height(), self.width(), positions, values)
    }
}

/// Channel layout of a `height x width` filter array.
pub fn channel_layout(height: usize, width: usize, arrangement: Arrangement, seed: u64) -> Array2<Channel> {
    let mut layout = Array2::from_shape_fn((height, width), |(r, c)| match (r % 2, c % 2) {
        (0, 0) | (1, 1) => Channel::G,
        (0, 1) => Channel::R,
        _ => Channel::B,
    });
    if arrangement == Arrangement::SemiRandom {
        let mut rng = seed::stream(seed, "mosaic/semi_random");
        for r in (0..height).step_by(2) {
            for c in (0..width).step_by(2) {
                if rng.random::<bool>() {
                    layout[[r, c + 1]] = Channel::B;
                    layout[[r + 1, c]] = Channel::R;
                }
            }
        }
    }
    layout
}

/// Keeps one channel value per pixel according to `arrangement`.
pub fn mosaic(rgb: &[ImageGrid; 3], arrangement: Arrangement, seed: u64) -> Result<MosaicImage> {
    let dims = rgb[0].dims();
    for ch in &rgb[1..] {
        ensure_dims(dims, ch.dims())?;
    }
    if dims.height % 2 != 0 || dims.width % 2 != 0 {
        return Err(invalid(format!("mosaic needs even dimensions, got {dims}")));
    }
    let layout = channel_layout(dims.height, dims.width, arrangement, seed);
    let values = Array2::from_shape_fn((dims.height, dims.width), |(r, c)| {
        rgb[layout[[r, c]].index()].get(r, c)
    });
    Ok(MosaicImage {
        channel_of_pixel: layout,
        values,
        arrangement,
        seed: (arrangement == Arrangement::SemiRandom).then_some(seed),
    })
}

const AXIS: [(isize, isize); 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];
const DIAGONAL: [(isize, isize); 4] = [(-1, -1), (-1, 1), (1, -1), (1, 1)];

/// Fills each channel's missing pixels with the mean of that channel's
/// axis neighbours, or of its diagonal neighbours when no axis neighbour
/// carries it, or of the nearest ring that does. Neighbours outside the
/// image are left out of the mean.
pub fn demosaic_bilinear(m: &MosaicImage) -> [ImageGrid; 3] {
    let (h, w) = (m.height(), m.width());
    Channel::ALL.map(|channel| {
        let has = |r: isize, c: isize| {
            r >= 0 && c >= 0 && (r as usize) < h && (c as usize) < w && m.channel_of_pixel[[r as usize, c as usize]] == channel
        };
        let out = Array2::from_shape_fn((h, w), |(r, c)| {
            if m.channel_of_pixel[[r, c]] == channel {
                return m.values[[r, c]];
            }
            let (ri, ci) = (r as isize, c as isize);
            for set in [&AXIS[..], &DIAGONAL[..]] {
                let (sum, n) = set.iter().fold((0.0, 0usize), |(s, n), &(dr, dc)| {
                    if has(ri + dr, ci + dc) {
                        (s + m.values[[(ri + dr) as usize, (ci + dc) as usize]], n + 1)
                    } else {
                        (s, n)
                    }
                });
                if n > 0 {
                    return sum / n as f64;
                }
            }
            ring_mean(m, channel, r, c)
        });
        ImageGrid::from_array_unchecked(out)
    })
}

fn ring_mean(m: &MosaicImage, channel: Channel, r: usize, c: usize) -> f64 {
    let (h, w) = (m.height(), m.width());
    for ring in 2..=h.max(w) {
        let mut sum = 0.0;
        let mut n = 0usize;
        for rr in r.saturating_sub(ring)..=(r + ring).min(h - 1) {
            for cc in c.saturating_sub(ring)..=(c + ring).min(w - 1) {
                let on_ring = rr.abs_diff(r) == ring || cc.abs_diff(c) == ring;
                if on_ring && m.channel_of_pixel[[rr, cc]] == channel {
                    sum += m.values[[rr, cc]];
                    n += 1;
                }
            }
        }
        if n > 0 {
            return sum / n as f64;
        }
    }
    0.0
}

/// Reconstructs each channel from its own pixels with `shape` calibrated to
/// that channel's density (R 0.25, G 0.5, B 0.25).
pub fn demosaic_bs(
    m: &MosaicImage,
    shape: &ShapeSpec,
    opts: &ReconOptions,
    reference: Option<&[ImageGrid; 3]>,
) -> Result<([ImageGrid; 3], [ReconReport; 3])> {
    let mut images = Vec::with_capacity(3);
    let mut reports = Vec::with_capacity(3);
    for channel in Channel::ALL {
        let spec = shape.with_area_fraction(channel.density());
        let mask = make_shape_mask(&spec, m.height(), m.width())?;
        let samples = m.samples(channel)?;
        let (img, rep) = reconstruct_bs(&samples, &mask, reference.map(|r| &r[channel.index()]), opts)?;
        images.push(img);
        reports.push(rep);
    }
    let images: [ImageGrid; 3] = images.try_into().expect("three channels");
    let reports: [ReconReport; 3] = reports.try_into().expect("three channels");
    Ok((images, reports))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::error_metrics;

    fn constant_rgb(h: usize, w: usize) -> [ImageGrid; 3] {
        [ImageGrid::filled(h, w, 200.0), ImageGrid::filled(h, w, 90.0), ImageGrid::filled(h, w, 15.0)]
    }

    #[test]
    fn two_by_two_bayer() {
        let m = mosaic(&constant_rgb(2, 2), Arrangement::RegularBayer, 0).unwrap();
        assert_eq!((m.count(Channel::G), m.count(Channel::R), m.count(Channel::B)), (2, 1, 1));
    }

    #[test]
    fn densities_are_exact_for_both_arrangements() {
        for arr in [Arrangement::RegularBayer, Arrangement::SemiRandom] {
            let m = mosaic(&constant_rgb(64, 48), arr, 5).unwrap();
            assert_eq!(m.count(Channel::G), 64 * 48 / 2);
            assert_eq!(m.count(Channel::R), 64 * 48 / 4);
            assert_eq!(m.count(Channel::B), 64 * 48 / 4);
        }
    }

    #[test]
    fn semi_random_is_seeded() {
        let a = channel_layout(32, 32, Arrangement::SemiRandom, 4);
        let b = channel_layout(32, 32, Arrangement::SemiRandom, 4);
        let c = channel_layout(32, 32, Arrangement::SemiRandom, 5);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, channel_layout(32, 32, Arrangement::RegularBayer, 4));
    }

    #[test]
    fn odd_dimensions_rejected() {
        assert!(mosaic(&constant_rgb(3, 4), Arrangement::RegularBayer, 0).is_err());
    }

    #[test]
    fn constant_colour_is_recovered_by_both() {
        let rgb = constant_rgb(16, 16);
        for arr in [Arrangement::RegularBayer, Arrangement::SemiRandom] {
            let m = mosaic(&rgb, arr, 1).unwrap();
            let bil = demosaic_bilinear(&m);
            let (bs, _) = demosaic_bs(&m, &ShapeSpec::pie_sector(0.25), &ReconOptions::fixed(20), None).unwrap();
            for i in 0..3 {
                assert_eq!(error_metrics(&rgb[i], &bil[i]).unwrap().rmse_all, 0.0);
                assert!(error_metrics(&rgb[i], &bs[i]).unwrap().rmse_all < 1e-6);
            }
        }
    }

    #[test]
    fn green_checkerboard_aliases_under_bilinear() {
        // Green varies at the mosaic frequency: every green pixel is 255,
        // every non-green pixel 0, so interpolation fills 255 where 0 belongs.
        let g = ImageGrid::from_fn(8, 8, |(r, c)| if (r + c) % 2 == 0 { 255.0 } else { 0.0 });
        let rgb = [ImageGrid::zeros(8, 8), g.clone(), ImageGrid::zeros(8, 8)];
        let m = mosaic(&rgb, Arrangement::RegularBayer, 0).unwrap();
        let out = demosaic_bilinear(&m);
        assert!(error_metrics(&g, &out[1]).unwrap().rmse_all > 100.0);
    }
}
