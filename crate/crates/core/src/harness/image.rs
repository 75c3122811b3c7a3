//! Grayscale image recovery demo on binary PGM (P5) images.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::initialization::{spectral_init, InitOptions};
use crate::operators::{
    dist_mod_phase, optimal_phase, ComplexVector, ConvolutionalMeasurement, MeasurementOperator, C64,
};
use crate::rng::{mix_seed, stream};
use crate::solver::{gd_solve, SolveResult, SolverConfig};

use super::gen_kernel;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    /// Row-major 8-bit intensities.
    pub pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || pixels.len() != width * height {
            return Err(Error::InvalidInput(format!(
                "image of {width}x{height} needs {} pixels, got {}",
                width * height,
                pixels.len()
            )));
        }
        Ok(GrayImage { width, height, pixels })
    }
}

fn pgm_error(msg: &str) -> Error {
    Error::InvalidInput(format!("malformed PGM: {msg}"))
}

/// Parses a binary PGM with `maxval ≤ 255`. Header comments are skipped.
pub fn parse_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let mut pos = 0;
    let mut token = || -> Result<String> {
        loop {
            match bytes.get(pos) {
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(_) => break,
                None => return Err(pgm_error("truncated header")),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(|b| !b.is_ascii_whitespace()) {
            pos += 1;
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    if token()? != "P5" {
        return Err(pgm_error("expected magic P5"));
    }
    let mut num = |what: &str| -> Result<usize> {
        token()?.parse().map_err(|_| pgm_error(&format!("bad {what}")))
    };
    let width = num("width")?;
    let height = num("height")?;
    let maxval = num("maxval")?;
    if !(1..=255).contains(&maxval) {
        return Err(pgm_error("only 8-bit images are supported"));
    }
    // A single whitespace byte separates the header from the raster.
    let data_start = pos + 1;
    let len = width * height;
    let raster = bytes
        .get(data_start..data_start + len)
        .ok_or_else(|| pgm_error("truncated raster"))?;
    GrayImage::new(width, height, raster.to_vec()).map_err(|_| pgm_error("empty image"))
}

pub fn read_pgm(path: &Path) -> Result<GrayImage> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_pgm(&bytes)
}

pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.pixels);
    out
}

pub fn write_pgm(img: &GrayImage, path: &Path) -> Result<()> {
    std::fs::write(path, encode_pgm(img)).map_err(|e| Error::io(path, e))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImageDemoOptions {
    /// `m = ⌈factor · n ln n⌉`.
    pub oversampling_factor: f64,
    pub power_iters: usize,
    pub success_tol: f64,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for ImageDemoOptions {
    fn default() -> Self {
        ImageDemoOptions {
            oversampling_factor: 5.0,
            power_iters: 100,
            success_tol: 1e-4,
            max_iters: crate::DEFAULT_MAX_ITERS,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChannelOutcome {
    pub channel: usize,
    pub result: Option<SolveResult>,
    /// Distance of the unit-norm reconstruction to the unit-norm channel.
    pub dist: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ImageDemoResult {
    pub n: usize,
    pub m: usize,
    pub channels: Vec<ChannelOutcome>,
    pub reconstructed: GrayImage,
    /// `None` when the reconstruction equals the input exactly.
    pub psnr_db: Option<f64>,
}

fn psnr(a: &[u8], b: &[u8]) -> Option<f64> {
    let mse = a
        .iter()
        .zip(b)
        .map(|(&p, &q)| (f64::from(p) - f64::from(q)).powi(2))
        .sum::<f64>()
        / a.len() as f64;
    (mse > 0.0).then(|| 10.0 * (255.0f64 * 255.0 / mse).log10())
}

/// Recovers the image, flattened into one real channel, from convolutional
/// magnitudes.
pub fn image_demo_on(img: &GrayImage, opts: &ImageDemoOptions) -> Result<ImageDemoResult> {
    if !(opts.oversampling_factor > 0.0 && opts.oversampling_factor.is_finite()) {
        return Err(Error::InvalidParameter("oversampling factor must be positive".into()));
    }
    let n = img.pixels.len();
    if n < 2 {
        return Err(Error::InvalidInput("image needs at least two pixels".into()));
    }
    let m = ((opts.oversampling_factor * n as f64 * (n as f64).ln()).ceil() as usize).max(n);
    let scale = img.pixels.iter().map(|&p| f64::from(p).powi(2)).sum::<f64>().sqrt();
    let x: Vec<C64> = img
        .pixels
        .iter()
        .map(|&p| C64::new(if scale > 0.0 { f64::from(p) / scale } else { 0.0 }, 0.0))
        .collect();
    let x = ComplexVector::new(x)?;

    let seed = mix_seed(opts.seed, &[0x1aa5, 0]);
    let kernel = gen_kernel(m, &mut stream(mix_seed(seed, &[2])))?;
    let model = ConvolutionalMeasurement::new(kernel, n)?;
    let y = model.measure(&x)?;
    let init = InitOptions {
        power_iters: opts.power_iters,
        rel_tol: 0.0,
    };
    let config = SolverConfig {
        success_tol: opts.success_tol,
        max_iters: opts.max_iters,
        ..SolverConfig::default()
    };

    let solved = spectral_init(&model, &y, init, &mut stream(mix_seed(seed, &[3])))
        .and_then(|z0| gd_solve(&model, &y, &z0.z0, &config, Some(&x)));
    let (outcome, pixels) = match solved {
        Ok(res) => {
            let theta = optimal_phase(&res.z_hat, &x)?;
            let pixels = res
                .z_hat
                .iter()
                .map(|z| ((z * theta.conj()).re * scale).round().clamp(0.0, 255.0) as u8)
                .collect();
            let dist = dist_mod_phase(&res.z_hat, &x)?;
            (
                ChannelOutcome {
                    channel: 0,
                    result: Some(res),
                    dist: Some(dist),
                    error: None,
                },
                pixels,
            )
        }
        Err(e @ (Error::DegenerateOperator(_) | Error::NumericalDivergence { .. })) => (
            ChannelOutcome {
                channel: 0,
                result: None,
                dist: None,
                error: Some(e.to_string()),
            },
            vec![0; n],
        ),
        Err(e) => return Err(e),
    };
    let reconstructed = GrayImage::new(img.width, img.height, pixels)?;
    Ok(ImageDemoResult {
        n,
        m,
        psnr_db: psnr(&img.pixels, &reconstructed.pixels),
        channels: vec![outcome],
        reconstructed,
    })
}

pub fn image_demo(image_path: &Path, oversampling_factor: f64, seed: u64) -> Result<ImageDemoResult> {
    let img = read_pgm(image_path)?;
    image_demo_on(
        &img,
        &ImageDemoOptions {
            oversampling_factor,
            seed,
            ..ImageDemoOptions::default()
        },
    )
}
