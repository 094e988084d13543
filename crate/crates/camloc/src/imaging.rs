//! Image noise: synthesis, estimation, averaging, filtering, spectra.
//!
//! The precision of marker detection is limited by sensor noise, modeled
//! as additive zero-mean Gaussian noise whose standard deviation varies
//! over the operational space (a [`NoiseField`]). Averaging `N` aligned
//! frames reduces the noise standard deviation by `1/√N`, so the number
//! of pictures needed at a location follows directly from the measured
//! noise level and the target level ([`picture_count`]).
//!
//! The noise level of a single frame is estimated blind with a
//! difference-kernel method: convolving with the 3×3 kernel
//!
//! ```text
//!  1 -2  1
//! -2  4 -2
//!  1 -2  1
//! ```
//!
//! annihilates locally planar image content while passing iid noise with
//! a gain of 6 in standard deviation; a median of absolute responses
//! divided by `0.6745·6` is then a robust estimate of σ.

use crate::error::{Error, Result};
use crate::rng;
use crate::vec3::{self, Point3};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Noise-passing difference kernel; annihilates planar content.
pub const NOISE_KERNEL: [[f64; 3]; 3] = [[1.0, -2.0, 1.0], [-2.0, 4.0, -2.0], [1.0, -2.0, 1.0]];

/// Gain of [`NOISE_KERNEL`] on iid noise: `sqrt(Σ k²) = 6`.
const KERNEL_NOISE_GAIN: f64 = 6.0;

/// Median of |N(0,1)| (Φ⁻¹(3/4)), the MAD-to-σ constant.
const MAD_CONSTANT: f64 = 0.6745;

/// A grayscale frame with row-major intensities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageFrame {
    /// Columns.
    pub width: usize,
    /// Rows.
    pub height: usize,
    /// Row-major samples, `height × width`, each in `[0, 1]`.
    pub intensities: Vec<f64>,
}

impl ImageFrame {
    /// Validating constructor: dimensions positive, `width·height`
    /// samples, all finite; values are clamped into `[0, 1]`.
    pub fn new(width: usize, height: usize, mut intensities: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::ValidationError(format!(
                "ImageFrame dimensions must be positive, got {width}x{height}"
            )));
        }
        if intensities.len() != width * height {
            return Err(Error::ValidationError(format!(
                "ImageFrame needs {} samples for {width}x{height}, got {}",
                width * height,
                intensities.len()
            )));
        }
        if intensities.iter().any(|v| !v.is_finite()) {
            return Err(Error::ValidationError("ImageFrame intensities must be finite".into()));
        }
        for v in &mut intensities {
            *v = v.clamp(0.0, 1.0);
        }
        Ok(ImageFrame { width, height, intensities })
    }

    /// Sample at `(row, col)`.
    #[inline]
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.intensities[row * self.width + col]
    }
}

/// A smooth spatial map of per-frame noise standard deviation.
///
/// `σ(p) = max(floor, base − Σ_j depth_j · exp(−|p − c_j|²/(2 w_j²)))`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseField {
    sigma_base: f64,
    sigma_floor: f64,
    wells: Vec<NoiseWell>,
}

/// One Gaussian depression of the noise field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseWell {
    /// Well center (m).
    pub center_m: Point3,
    /// Depth subtracted at the center (σ units).
    pub depth: f64,
    /// Gaussian width (m).
    pub width_m: f64,
}

impl NoiseField {
    /// Validating constructor: `floor > 0`, `base > floor`, every well
    /// has `depth ≥ 0` and `width > 0`, and `Σ depths < base − floor`
    /// (strict), so the field never reaches its floor.
    pub fn new(sigma_base: f64, sigma_floor: f64, wells: Vec<NoiseWell>) -> Result<Self> {
        if !(sigma_floor.is_finite() && sigma_floor > 0.0) {
            return Err(Error::ValidationError(format!(
                "NoiseField sigma_floor must be > 0, got {sigma_floor}"
            )));
        }
        if !(sigma_base.is_finite() && sigma_base > sigma_floor) {
            return Err(Error::ValidationError(format!(
                "NoiseField sigma_base must exceed sigma_floor, got base {sigma_base} vs floor {sigma_floor}"
            )));
        }
        let mut depth_sum = 0.0;
        for (i, w) in wells.iter().enumerate() {
            if !w.center_m.iter().all(|c| c.is_finite()) {
                return Err(Error::ValidationError(format!("well {i}: center must be finite")));
            }
            if !(w.depth.is_finite() && w.depth >= 0.0) {
                return Err(Error::ValidationError(format!(
                    "well {i}: depth must be >= 0, got {}",
                    w.depth
                )));
            }
            if !(w.width_m.is_finite() && w.width_m > 0.0) {
                return Err(Error::ValidationError(format!(
                    "well {i}: width must be > 0, got {}",
                    w.width_m
                )));
            }
            depth_sum += w.depth;
        }
        if !(depth_sum < sigma_base - sigma_floor) {
            return Err(Error::ValidationError(format!(
                "sum of well depths ({depth_sum}) must stay strictly below sigma_base - sigma_floor ({})",
                sigma_base - sigma_floor
            )));
        }
        Ok(NoiseField { sigma_base, sigma_floor, wells })
    }

    /// Background noise level far from every well.
    pub fn sigma_base(&self) -> f64 {
        self.sigma_base
    }

    /// Hard lower clamp of the field.
    pub fn sigma_floor(&self) -> f64 {
        self.sigma_floor
    }

    /// The wells.
    pub fn wells(&self) -> &[NoiseWell] {
        &self.wells
    }

    /// Noise standard deviation at a position (m).
    pub fn sigma_at(&self, p: Point3) -> f64 {
        let mut sigma = self.sigma_base;
        for w in &self.wells {
            let d2 = vec3::dist2(p, w.center_m);
            sigma -= w.depth * (-d2 / (2.0 * w.width_m * w.width_m)).exp();
        }
        sigma.max(self.sigma_floor)
    }
}

/// The noise level frames must be averaged down to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseTarget {
    /// Required post-averaging standard deviation, > 0.
    pub sigma_reduced: f64,
}

impl NoiseTarget {
    /// Validating constructor.
    pub fn new(sigma_reduced: f64) -> Result<Self> {
        if !(sigma_reduced.is_finite() && sigma_reduced > 0.0) {
            return Err(Error::ValidationError(format!(
                "NoiseTarget sigma_reduced must be > 0, got {sigma_reduced}"
            )));
        }
        Ok(NoiseTarget { sigma_reduced })
    }
}

fn valid_conv3(frame: &ImageFrame) -> Vec<f64> {
    let (w, h) = (frame.width, frame.height);
    let mut out = Vec::with_capacity((h - 2) * (w - 2));
    for r in 0..h - 2 {
        for c in 0..w - 2 {
            let mut acc = 0.0;
            for (dr, krow) in NOISE_KERNEL.iter().enumerate() {
                for (dc, &k) in krow.iter().enumerate() {
                    acc += k * frame.at(r + dr, c + dc);
                }
            }
            out.push(acc);
        }
    }
    out
}

/// True median; even-length inputs average the two central order
/// statistics.
fn median(mut v: Vec<f64>) -> f64 {
    let n = v.len();
    debug_assert!(n > 0);
    let (_, mid, _) = v.select_nth_unstable_by(n / 2, f64::total_cmp);
    let mid = *mid;
    if n % 2 == 1 {
        mid
    } else {
        let lower = v[..n / 2].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + mid)
    }
}

/// Blind per-frame noise estimate: median of absolute difference-kernel
/// responses over all valid 3×3 windows, scaled by `1/(0.6745·6)`.
pub fn estimate_sigma(frame: &ImageFrame) -> Result<f64> {
    if frame.width < 3 || frame.height < 3 {
        return Err(Error::FrameTooSmall { width: frame.width, height: frame.height });
    }
    let responses: Vec<f64> = valid_conv3(frame).into_iter().map(f64::abs).collect();
    Ok(median(responses) / (MAD_CONSTANT * KERNEL_NOISE_GAIN))
}

/// Add zero-mean Gaussian noise of standard deviation `sigma` to a frame
/// and clip back into `[0, 1]`. Draws are row-major from a ChaCha8 stream
/// seeded with `seed`; `sigma = 0` returns the input unchanged.
pub fn add_noise(truth: &ImageFrame, sigma: f64, seed: u64) -> Result<ImageFrame> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::ValidationError(format!("noise sigma must be >= 0, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(truth.clone());
    }
    let mut rng = rng::chacha(seed);
    let normal = Normal::new(0.0, sigma)
        .map_err(|e| Error::ValidationError(format!("bad noise distribution: {e}")))?;
    let intensities = truth
        .intensities
        .iter()
        .map(|&v| (v + normal.sample(&mut rng)).clamp(0.0, 1.0))
        .collect();
    ImageFrame::new(truth.width, truth.height, intensities)
}

/// One simulated exposure of `truth` at position `p`: Gaussian noise at
/// the field's local level, clipped to `[0, 1]`.
pub fn synth_image(field: &NoiseField, p: Point3, truth: &ImageFrame, seed: u64) -> ImageFrame {
    add_noise(truth, field.sigma_at(p), seed).expect("field sigma is validated positive")
}

/// Pixelwise mean of equally sized frames.
pub fn average_images(frames: &[ImageFrame]) -> Result<ImageFrame> {
    let first = frames.first().ok_or(Error::EmptyList)?;
    let mut acc = vec![0.0f64; first.intensities.len()];
    for (i, f) in frames.iter().enumerate() {
        if f.width != first.width || f.height != first.height {
            return Err(Error::DimensionMismatch(format!(
                "frame {i} is {}x{}, expected {}x{}",
                f.width, f.height, first.width, first.height
            )));
        }
        for (a, v) in acc.iter_mut().zip(&f.intensities) {
            *a += v;
        }
    }
    let n = frames.len() as f64;
    for a in &mut acc {
        *a /= n;
    }
    ImageFrame::new(first.width, first.height, acc)
}

/// Number of frames to average so that `sigma_actual/√N` meets the
/// target: `max(1, ceil((σ_a/σ_target)²))`, with a relative guard so that
/// exact integer ratios do not round up one count.
pub fn picture_count(sigma_actual: f64, target: &NoiseTarget) -> u64 {
    let ratio = sigma_actual / target.sigma_reduced;
    let n = (ratio * ratio * (1.0 - 1e-12)).ceil();
    if n < 1.0 {
        1
    } else {
        n as u64
    }
}

/// Separable Gaussian blur with an odd `size`×`size` kernel and
/// edge-including symmetric padding; output has the input's size.
pub fn gaussian_filter(frame: &ImageFrame, size: usize, sigma: f64) -> Result<ImageFrame> {
    if size < 3 || size % 2 == 0 {
        return Err(Error::BadKernel(format!("kernel size must be odd and >= 3, got {size}")));
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::BadKernel(format!("kernel sigma must be > 0, got {sigma}")));
    }
    let half = size / 2;
    let mut kernel: Vec<f64> = (0..size)
        .map(|i| {
            let ax = i as f64 - half as f64;
            (-ax * ax / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let sum: f64 = kernel.iter().sum();
    for k in &mut kernel {
        *k /= sum;
    }
    // symmetric (edge-including) index fold, iterated for narrow frames
    let fold = |mut idx: i64, n: usize| -> usize {
        let n = n as i64;
        loop {
            if idx < 0 {
                idx = -idx - 1;
            } else if idx >= n {
                idx = 2 * n - 1 - idx;
            } else {
                return idx as usize;
            }
        }
    };
    let (w, h) = (frame.width, frame.height);
    // horizontal pass
    let mut mid = vec![0.0f64; w * h];
    for r in 0..h {
        for c in 0..w {
            let mut acc = 0.0;
            for (j, &k) in kernel.iter().enumerate() {
                let cc = fold(c as i64 + j as i64 - half as i64, w);
                acc += k * frame.at(r, cc);
            }
            mid[r * w + c] = acc;
        }
    }
    // vertical pass
    let mut out = vec![0.0f64; w * h];
    for r in 0..h {
        for c in 0..w {
            let mut acc = 0.0;
            for (j, &k) in kernel.iter().enumerate() {
                let rr = fold(r as i64 + j as i64 - half as i64, h);
                acc += k * mid[rr * w + c];
            }
            out[r * w + c] = acc;
        }
    }
    ImageFrame::new(w, h, out)
}

/// One radial bin of a 2-D power spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumBin {
    /// Integer radius `b = floor(√(kx² + ky²))`.
    pub bin_index: usize,
    /// Normalized frequency `b / n` (cycles per pixel).
    pub frequency: f64,
    /// Mean unnormalized power `|F|²` over the annulus.
    pub mean_power: f64,
}

/// Radially averaged 2-D power spectrum.
///
/// Non-square or non-power-of-two frames are zero-padded (embedded at the
/// top-left) into the next power-of-two square. Integer frequencies
/// follow FFT ordering (`k = i` for `i < n/2`, else `i − n`); bins with
/// `1 ≤ b < n/2` are returned in increasing order.
pub fn radial_power_spectrum(frame: &ImageFrame) -> Result<Vec<SpectrumBin>> {
    if frame.width < 3 || frame.height < 3 {
        return Err(Error::FrameTooSmall { width: frame.width, height: frame.height });
    }
    let n = frame.width.max(frame.height).next_power_of_two();
    let mut data = vec![Complex::new(0.0f64, 0.0f64); n * n];
    for r in 0..frame.height {
        for c in 0..frame.width {
            data[r * n + c].re = frame.at(r, c);
        }
    }
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    for r in 0..n {
        fft.process(&mut data[r * n..(r + 1) * n]);
    }
    let mut col = vec![Complex::new(0.0f64, 0.0f64); n];
    for c in 0..n {
        for r in 0..n {
            col[r] = data[r * n + c];
        }
        fft.process(&mut col);
        for r in 0..n {
            data[r * n + c] = col[r];
        }
    }
    let freq = |i: usize| -> f64 {
        if i < n / 2 {
            i as f64
        } else {
            i as f64 - n as f64
        }
    };
    let nbins = n / 2;
    let mut power_sum = vec![0.0f64; nbins];
    let mut counts = vec![0u64; nbins];
    for r in 0..n {
        let ky = freq(r);
        for c in 0..n {
            let kx = freq(c);
            let b = ky.hypot(kx).floor() as usize;
            if (1..nbins).contains(&b) {
                power_sum[b] += data[r * n + c].norm_sqr();
                counts[b] += 1;
            }
        }
    }
    Ok((1..nbins)
        .map(|b| SpectrumBin {
            bin_index: b,
            frequency: b as f64 / n as f64,
            mean_power: power_sum[b] / counts[b] as f64,
        })
        .collect())
}

/// Deterministic synthetic measurement scene: a windowed illumination
/// gradient, four rectangular plates of random size/placement/contrast,
/// and 200 contrast speckles; clipped into `[0.05, 0.95]`.
pub fn scene(seed: u64, height: usize, width: usize) -> Result<ImageFrame> {
    if height < 16 || width < 16 {
        return Err(Error::ValidationError(format!(
            "scene needs at least 16x16 pixels, got {height}x{width}"
        )));
    }
    let mut img = base_gradient(height, width);
    let mut rng = rng::chacha(seed);
    let (mh, mw) = (height / 8, width / 8);
    for _ in 0..4 {
        let rh = rng.gen_range(height / 8..height / 4);
        let rw = rng.gen_range(width / 8..width / 4);
        let r0 = rng.gen_range(mh..height - mh - rh);
        let c0 = rng.gen_range(mw..width - mw - rw);
        let mag = rng.gen_range(0.10..0.18);
        let amp = if rng.gen::<f64>() < 0.5 { mag } else { -mag };
        for r in r0..r0 + rh {
            for c in c0..c0 + rw {
                img[r * width + c] += amp;
            }
        }
    }
    for _ in 0..200 {
        let r0 = rng.gen_range(mh..height - mh);
        let c0 = rng.gen_range(mw..width - mw);
        let amp = if rng.gen::<f64>() < 0.5 { 0.2 } else { -0.2 };
        img[r0 * width + c0] += amp;
    }
    for v in &mut img {
        *v = v.clamp(0.05, 0.95);
    }
    ImageFrame::new(width, height, img)
}

/// The scene's illumination gradient alone — smooth content with no
/// plates or speckles, for calibrating blind noise estimation.
pub fn smooth_scene(side: usize) -> Result<ImageFrame> {
    if side < 3 {
        return Err(Error::FrameTooSmall { width: side, height: side });
    }
    ImageFrame::new(side, side, base_gradient(side, side))
}

fn base_gradient(height: usize, width: usize) -> Vec<f64> {
    let mut img = vec![0.0f64; width * height];
    for r in 0..height {
        let ty = r as f64 / height as f64;
        let sy = (std::f64::consts::PI * ty).sin().powi(2);
        for c in 0..width {
            let tx = c as f64 / width as f64;
            let sx = (std::f64::consts::PI * tx).sin().powi(2);
            img[r * width + c] = 0.32 + 0.28 * sx * (0.55 + 0.45 * sy);
        }
    }
    img
}
