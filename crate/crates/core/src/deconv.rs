//! PSF capture and 1-D deconvolution along the scan direction.
//!
//! A metal rod parallel to the array acts as a line target: imaging it and
//! cutting the image along x yields the system's point-spread profile at that
//! depth, including whatever widening the separated transmit/receive rows
//! introduce. A bank of such profiles, captured over the depth of focus,
//! drives a single-pass Wiener-regularized spectral division that sharpens
//! every (y, z) line of an image without iteration.

use std::sync::Arc;

use ndarray::Axis;
use num_complex::Complex;
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::DeconvError;
use crate::forward::{rod_to_scene, ArrayGeometry, FanBeam, FrequencySweep};
use crate::recon::{
    argmax_magnitude, default_z0, reconstruct_volume, ImageVolume, ReconGrid, ReconOptions,
    SpectralPlan,
};
use crate::scalar::{real, Scalar};

/// One captured x-profile: odd length, peak at the center tap, unit peak.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsfEntry<T> {
    /// Depth this profile was captured at (mm).
    pub depth: T,
    /// Complex profile samples, peak-normalized.
    pub profile: Vec<Complex<T>>,
}

impl<T: Scalar> PsfEntry<T> {
    pub fn len(&self) -> usize {
        self.profile.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profile.is_empty()
    }

    pub fn center(&self) -> usize {
        self.profile.len() / 2
    }

    /// A discrete delta: the identity kernel.
    pub fn delta(depth: T, taps: usize) -> Self {
        assert!(taps % 2 == 1, "delta kernel needs odd length");
        let mut profile = vec![Complex::new(T::zero(), T::zero()); taps];
        profile[taps / 2] = Complex::new(T::one(), T::zero());
        Self { depth, profile }
    }

    pub fn magnitudes(&self) -> Vec<T> {
        self.profile.iter().map(|c| c.norm()).collect()
    }
}

/// Depth-indexed collection of x-profiles with their sample pitch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsfBank<T> {
    pub entries: Vec<PsfEntry<T>>,
    /// Sample pitch of every profile (mm along x).
    pub x_pitch: T,
    /// Hash of the capture geometry, for provenance tracking.
    pub geometry_hash: u64,
}

impl<T: Scalar> PsfBank<T> {
    /// The entry nearest in depth to `z`.
    pub fn nearest(&self, z: T) -> Result<&PsfEntry<T>, DeconvError> {
        self.entries
            .iter()
            .min_by(|a, b| {
                (a.depth - z)
                    .abs()
                    .partial_cmp(&(b.depth - z).abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .ok_or(DeconvError::EmptyBank)
    }

    pub fn max_profile_len(&self) -> usize {
        self.entries.iter().map(|e| e.len()).max().unwrap_or(0)
    }
}

/// Simulate a rod at `rod_z`, reconstruct it, and cut the x-profile through
/// the image peak.
///
/// The scan extent is sized from the beam footprint at the rod depth (plus
/// the transmit/receive separation) so the profile tails are captured; the
/// rod spans the array with samples finer than a quarter wavelength. The
/// returned profile is centered on its peak and peak-normalized.
pub fn capture_psf<T: Scalar>(
    geometry: &ArrayGeometry<T>,
    sweep: &FrequencySweep<T>,
    beam: &FanBeam<T>,
    rod_z: T,
) -> Result<PsfEntry<T>, DeconvError> {
    if rod_z <= T::zero() {
        return Err(DeconvError::Echo(
            crate::error::EchoError::ScattererAtArrayPlane {
                z: rod_z.to_f64(),
            },
        ));
    }
    // Columns out to 3.5 beam radii (plus the element split) on both sides.
    let w = beam.radius_at(rod_z);
    let reach = real::<T>(3.5) * w + geometry.tx_rx_offset.abs();
    let half_count = (reach / geometry.x_step).to_f64().ceil() as usize;
    let n_x = 2 * half_count.max(2) + 1;

    let mut capture_geometry = *geometry;
    capture_geometry.n_x = n_x;
    capture_geometry.x_start =
        -geometry.x_step * real::<T>(half_count.max(2) as f64);

    let rod_pitch = sweep.min_wavelength_mm() / real::<T>(4.0);
    let y_span = capture_geometry.y_pitch * real::<T>((capture_geometry.n_y - 1) as f64);
    let scene = rod_to_scene(rod_z, y_span, rod_pitch);

    let echo = crate::forward::simulate_echo(&scene, &capture_geometry, sweep, beam)?;
    let plan = SpectralPlan::new(&capture_geometry, sweep, ReconOptions::default())?;
    let grid = ReconGrid::from_plan(&plan, &capture_geometry, default_z0(Some(rod_z)));
    let image = reconstruct_volume(&echo, &plan, &grid)?;

    let (px, py, pz) = argmax_magnitude(&image.data);
    let n_total = image.data.dim().0;
    let mut raw: Vec<Complex<T>> = (0..n_total).map(|ix| image.data[[ix, py, pz]]).collect();

    // Re-center on the peak tap, keeping an odd symmetric extent.
    let half = n_total / 2;
    let mut centered = vec![Complex::new(T::zero(), T::zero()); n_total];
    for (i, slot) in centered.iter_mut().enumerate() {
        let src = px as isize + i as isize - half as isize;
        if src >= 0 && (src as usize) < n_total {
            *slot = raw[src as usize];
        }
    }
    raw = centered;

    let peak = raw[half];
    if !(peak.norm() > T::zero()) {
        return Err(DeconvError::NoPeak);
    }
    let normalized: Vec<Complex<T>> = raw.into_iter().map(|c| c / peak).collect();

    // Trim the dead tails: keep the smallest symmetric window that still
    // holds every tap above a relative floor. Keeps kernels compact so short
    // scans remain deconvolvable.
    let floor = real::<T>(1e-3);
    let mut keep = 2usize;
    for d in (2..=half).rev() {
        if normalized[half - d].norm() >= floor || normalized[half + d].norm() >= floor {
            keep = d;
            break;
        }
    }
    let profile = normalized[half - keep..=half + keep].to_vec();
    Ok(PsfEntry {
        depth: rod_z,
        profile,
    })
}

/// Capture a bank of profiles at the given depths.
pub fn capture_psf_bank<T: Scalar>(
    geometry: &ArrayGeometry<T>,
    sweep: &FrequencySweep<T>,
    beam: &FanBeam<T>,
    depths: &[T],
) -> Result<PsfBank<T>, DeconvError> {
    if depths.is_empty() {
        return Err(DeconvError::EmptyBank);
    }
    let entries = depths
        .iter()
        .map(|&z| capture_psf(geometry, sweep, beam, z))
        .collect::<Result<Vec<_>, _>>()?;
    let hash = {
        let mut h = crate::forward::Fnv1a::new();
        for v in [
            geometry.y_start.to_f64(),
            geometry.y_pitch.to_f64(),
            geometry.x_step.to_f64(),
            geometry.tx_rx_offset.to_f64(),
            sweep.f_start_ghz.to_f64(),
            sweep.f_stop_ghz.to_f64(),
            sweep.f_step_ghz.to_f64(),
            beam.waist.to_f64(),
            beam.wavelength.to_f64(),
            beam.focal_distance.to_f64(),
        ] {
            h.write_u64(v.to_bits());
        }
        h.finish()
    };
    Ok(PsfBank {
        entries,
        x_pitch: geometry.x_step,
        geometry_hash: hash,
    })
}

/// Wiener-regularized deconvolution of every x-line of the image.
///
/// Each (y, z) line is zero-padded to the next power of two at or above
/// `line + psf - 1` samples (so the spectral product inverts a linear, not
/// circular, convolution), divided by the nearest-depth PSF spectrum through
/// the Wiener gain `H* / (|H|^2 + eps max|H|^2)`, and transformed back.
/// Output dimensions equal input dimensions.
pub fn deconvolve<T: Scalar>(
    image: &ImageVolume<T>,
    bank: &PsfBank<T>,
    epsilon: T,
) -> Result<ImageVolume<T>, DeconvError> {
    deconvolve_impl(image, bank, epsilon, false)
}

/// Magnitude-only fallback: deconvolve |image| instead of the complex data.
/// Useful when the phase across x is not trusted.
pub fn deconvolve_magnitude<T: Scalar>(
    image: &ImageVolume<T>,
    bank: &PsfBank<T>,
    epsilon: T,
) -> Result<ImageVolume<T>, DeconvError> {
    deconvolve_impl(image, bank, epsilon, true)
}

fn deconvolve_impl<T: Scalar>(
    image: &ImageVolume<T>,
    bank: &PsfBank<T>,
    epsilon: T,
    magnitude_only: bool,
) -> Result<ImageVolume<T>, DeconvError> {
    if !(epsilon > T::zero()) {
        return Err(DeconvError::EpsilonNonPositive(epsilon.to_f64()));
    }
    if bank.entries.is_empty() {
        return Err(DeconvError::EmptyBank);
    }
    let (n_x, n_y, n_z) = image.data.dim();
    let psf_len = bank.max_profile_len();
    if n_x < psf_len {
        return Err(DeconvError::ImageShorterThanPsf {
            image: n_x,
            psf: psf_len,
        });
    }

    let n_fft = (n_x + psf_len - 1).next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd: Arc<dyn Fft<T>> = planner.plan_fft(n_fft, FftDirection::Forward);
    let inv: Arc<dyn Fft<T>> = planner.plan_fft(n_fft, FftDirection::Inverse);

    // One Wiener gain per bank entry, reused by every line at that depth.
    let gains: Vec<Vec<Complex<T>>> = bank
        .entries
        .iter()
        .map(|entry| {
            let mut h = vec![Complex::new(T::zero(), T::zero()); n_fft];
            // Rotate the centered kernel so its peak sits at index 0; the
            // filtered line then stays aligned with the input.
            let c = entry.center();
            for (i, &v) in entry.profile.iter().enumerate() {
                let idx = (i + n_fft - c) % n_fft;
                h[idx] = v;
            }
            fwd.process(&mut h);
            let max_sq = h
                .iter()
                .map(|v| v.norm_sqr())
                .fold(T::zero(), |a, b| a.max(b));
            let floor = epsilon * max_sq;
            h.iter()
                .map(|v| v.conj() / (v.norm_sqr() + floor))
                .collect()
        })
        .collect();

    // Nearest bank entry for each depth slice.
    let entry_for_z: Vec<usize> = image
        .grid
        .z_centers
        .iter()
        .map(|&z| {
            bank.entries
                .iter()
                .enumerate()
                .min_by(|a, b| {
                    (a.1.depth - z)
                        .abs()
                        .partial_cmp(&(b.1.depth - z).abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .map(|(i, _)| i)
                .unwrap()
        })
        .collect();

    let lines: Vec<((usize, usize), Vec<Complex<T>>)> = (0..n_y * n_z)
        .into_par_iter()
        .map(|flat| {
            let iy = flat / n_z;
            let iz = flat % n_z;
            let gain = &gains[entry_for_z[iz]];
            let mut buf = vec![Complex::new(T::zero(), T::zero()); n_fft];
            for (ix, slot) in buf.iter_mut().take(n_x).enumerate() {
                let v = image.data[[ix, iy, iz]];
                *slot = if magnitude_only {
                    Complex::new(v.norm(), T::zero())
                } else {
                    v
                };
            }
            fwd.process(&mut buf);
            for (v, g) in buf.iter_mut().zip(gain.iter()) {
                *v = *v * g;
            }
            inv.process(&mut buf);
            let scale = T::one() / real::<T>(n_fft as f64);
            buf.truncate(n_x);
            for v in buf.iter_mut() {
                *v = Complex::new(v.re * scale, v.im * scale);
            }
            ((iy, iz), buf)
        })
        .collect();

    let mut out = image.clone();
    for ((iy, iz), line) in lines {
        for (ix, v) in line.into_iter().enumerate() {
            out.data[[ix, iy, iz]] = v;
        }
    }
    Ok(out)
}

/// Full width at half maximum of a sampled magnitude profile, in the units
/// of `pitch`, with linear interpolation between samples.
///
/// Plateau peaks (e.g. a rectangular profile) are measured from the leftmost
/// and rightmost samples attaining the maximum.
pub fn profile_fwhm<T: Scalar>(values: &[T], pitch: T) -> Result<T, DeconvError> {
    if values.len() < 3 {
        return Err(DeconvError::NoPeak);
    }
    let peak = values.iter().cloned().fold(T::neg_infinity(), T::max);
    if !(peak > T::zero()) {
        return Err(DeconvError::NoPeak);
    }
    let half = peak / real::<T>(2.0);
    let left_peak = values.iter().position(|&v| v == peak).unwrap();
    let right_peak = values.len() - 1 - values.iter().rev().position(|&v| v == peak).unwrap();

    // Walk outward to the first samples below half maximum.
    let mut left_cross = None;
    for i in (0..left_peak).rev() {
        if values[i] < half {
            let frac = (half - values[i]) / (values[i + 1] - values[i]);
            left_cross = Some(real::<T>(i as f64) + frac);
            break;
        }
    }
    let mut right_cross = None;
    for i in (right_peak + 1)..values.len() {
        if values[i] < half {
            let frac = (values[i - 1] - half) / (values[i - 1] - values[i]);
            right_cross = Some(real::<T>((i - 1) as f64) + frac);
            break;
        }
    }
    match (left_cross, right_cross) {
        (Some(l), Some(r)) => Ok((r - l) * pitch),
        _ => Err(DeconvError::NoPeak),
    }
}

/// Cut the x-profile of an image through a given (y, z) voxel.
pub fn x_profile<T: Scalar>(image: &ImageVolume<T>, iy: usize, iz: usize) -> Vec<Complex<T>> {
    image
        .data
        .index_axis(Axis(1), iy)
        .index_axis(Axis(1), iz)
        .to_vec()
}
