//! Gaussian-beam propagation and hyperbolic cylindrical lens design.
//!
//! A feed element radiates an approximately Gaussian beam; a bi-convex
//! cylindrical lens re-images its waist to the standoff region, producing a
//! fan beam that is narrow along the scan direction and wide along the array.
//! This module sizes that lens from the desired waist magnification: effective
//! focal length, image distance, center thickness, aperture, and the two
//! hyperbolic contour curves for export.
//!
//! Conventions: all lengths in millimeters; `w` always denotes the 1/e field
//! radius of the beam.

use serde::{Deserialize, Serialize};

use crate::error::LensError;
use crate::scalar::{real, Scalar};

/// A Gaussian beam: waist radius, wavelength, and where the waist sits on the
/// propagation axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamParams<T> {
    /// Waist radius w0 (mm), the minimum 1/e field radius.
    pub waist_radius: T,
    /// Wavelength (mm).
    pub wavelength: T,
    /// Axial position of the waist along the propagation axis (mm).
    pub waist_axial_position: T,
}

impl<T: Scalar> BeamParams<T> {
    pub fn new(waist_radius: T, wavelength: T, waist_axial_position: T) -> Self {
        debug_assert!(waist_radius > T::zero() && wavelength > T::zero());
        Self {
            waist_radius,
            wavelength,
            waist_axial_position,
        }
    }

    /// Rayleigh length of this beam.
    pub fn rayleigh_length(&self) -> T {
        rayleigh_length(self.waist_radius, self.wavelength)
    }

    /// Beam radius at axial position `z` (absolute, not waist-relative).
    pub fn radius_at(&self, z: T) -> T {
        beam_radius(self, z - self.waist_axial_position)
    }
}

/// Beam radius w(z) at a distance `z` from the waist:
/// `w0 * sqrt(1 + (lambda z / (pi w0^2))^2)`. Even in `z`.
pub fn beam_radius<T: Scalar>(beam: &BeamParams<T>, z: T) -> T {
    let w0 = beam.waist_radius;
    let ratio = beam.wavelength * z / (T::PI() * w0 * w0);
    w0 * (T::one() + ratio * ratio).sqrt()
}

/// Rayleigh length `pi w0^2 / lambda`: the distance over which the beam
/// cross-section doubles.
pub fn rayleigh_length<T: Scalar>(w0: T, wavelength: T) -> T {
    T::PI() * w0 * w0 / wavelength
}

/// Full half-power beamwidth of a Gaussian beam of radius `w`:
/// `2 sqrt(ln 2 / 2) w ≈ 1.1774 w`.
pub fn hpbw<T: Scalar>(w: T) -> T {
    let two = real::<T>(2.0);
    two * (T::LN_2() / two).sqrt() * w
}

/// Requested lens design: re-image an object-side waist `w01` at distance `s1`
/// into an image-side waist `w02`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LensSpec<T> {
    /// Object distance s1 (mm): feed waist to lens vertex.
    pub object_distance: T,
    /// Object-side waist w01 (mm).
    pub object_waist: T,
    /// Image-side waist w02 (mm); must satisfy w02 >= w01.
    pub image_waist: T,
    /// Wavelength (mm).
    pub wavelength: T,
    /// Refractive index of the lens material (Teflon is about 1.45 in the
    /// millimeter-wave band).
    pub refractive_index: T,
    /// Aperture rule D = aperture_factor * w(s1); 2.5 captures 95.6% of the
    /// beam power.
    pub aperture_factor: T,
    /// Extrusion length of the cylindrical profile (mm).
    pub lens_length: T,
}

impl<T: Scalar> LensSpec<T> {
    /// Paper-style defaults for aperture factor (2.5).
    pub fn new(
        object_distance: T,
        object_waist: T,
        image_waist: T,
        wavelength: T,
        refractive_index: T,
        lens_length: T,
    ) -> Self {
        Self {
            object_distance,
            object_waist,
            image_waist,
            wavelength,
            refractive_index,
            aperture_factor: real(2.5),
            lens_length,
        }
    }

    pub fn validate(&self) -> Result<(), LensError> {
        if !(self.object_distance > T::zero())
            || !(self.object_waist > T::zero())
            || !(self.wavelength > T::zero())
        {
            return Err(LensError::InvalidSpec(
                "object distance, waist, and wavelength must be positive".into(),
            ));
        }
        if self.image_waist < self.object_waist {
            return Err(LensError::InvalidSpec(
                "image waist must be >= object waist".into(),
            ));
        }
        if self.refractive_index <= T::one() {
            return Err(LensError::InvalidSpec(
                "refractive index must exceed 1".into(),
            ));
        }
        Ok(())
    }

    /// Rayleigh length of the object-side beam.
    pub fn object_rayleigh_length(&self) -> T {
        rayleigh_length(self.object_waist, self.wavelength)
    }
}

/// Completed lens design: derived distances, thickness, aperture, and the
/// sampled contour curves of both faces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LensDesign<T> {
    pub spec: LensSpec<T>,
    /// Effective focal length f (mm).
    pub focal_length: T,
    /// Image distance s2 (mm): lens vertex to image waist.
    pub image_distance: T,
    /// Center thickness T (mm).
    pub thickness: T,
    /// Aperture D (mm).
    pub aperture: T,
    /// Object-side contour, sampled (x, z) pairs over [-D/2, D/2].
    pub object_side_profile: Vec<(T, T)>,
    /// Image-side contour, sampled (x, z) pairs over [-D/2, D/2].
    pub image_side_profile: Vec<(T, T)>,
    /// Feed-to-focal-plane distance s1 + T + s2 (mm).
    pub predicted_focal_plane: T,
    /// Fraction of beam power passing the aperture.
    pub interception_efficiency: T,
}

/// Effective focal length that magnifies waist w01 at s1 into w02:
///
/// `f = 2 (s1^2 + zR^2) / (2 s1 + sqrt(4 s1^2 - 4 (s1^2 + zR^2)(1 - w01^2/w02^2)))`
///
/// Fails when the requested magnification is unreachable at this object
/// distance (negative discriminant).
pub fn effective_focal_length<T: Scalar>(spec: &LensSpec<T>) -> Result<T, LensError> {
    let s1 = spec.object_distance;
    let zr = spec.object_rayleigh_length();
    let four = real::<T>(4.0);
    let two = real::<T>(2.0);
    let waist_ratio_sq = (spec.object_waist / spec.image_waist).powi(2);
    let sum_sq = s1 * s1 + zr * zr;
    let discriminant = four * s1 * s1 - four * sum_sq * (T::one() - waist_ratio_sq);
    if discriminant < T::zero() {
        return Err(LensError::NegativeDiscriminant {
            discriminant: discriminant.to_f64(),
        });
    }
    Ok(two * sum_sq / (two * s1 + discriminant.sqrt()))
}

/// Image distance of a Gaussian beam through a lens of focal length `f`:
///
/// `s2 = f + f^2 (s1 - f) / ((s1 - f)^2 + zR^2)`
///
/// Finite for all inputs since `zR > 0`; reduces to `s2 = f` when the object
/// waist sits at the focal point.
pub fn image_distance<T: Scalar>(focal_length: T, s1: T, rayleigh: T) -> T {
    let d = s1 - focal_length;
    focal_length + focal_length * focal_length * d / (d * d + rayleigh * rayleigh)
}

/// Waist magnification w02/w01 of the Gaussian imaging system.
pub fn waist_magnification<T: Scalar>(focal_length: T, s1: T, rayleigh: T) -> T {
    let d = s1 - focal_length;
    focal_length / (d * d + rayleigh * rayleigh).sqrt()
}

/// Center thickness of the bi-hyperbolic lens with edge-matched faces:
///
/// `T = [sqrt(s1^2 + Q) + sqrt(s2^2 + Q) - (s1 + s2)] / (n + 1)`,
/// `Q = (n+1) D^2 / (4 (n-1))`.
pub fn lens_thickness<T: Scalar>(n: T, s1: T, s2: T, aperture: T) -> T {
    let q = (n + T::one()) * aperture * aperture / (real::<T>(4.0) * (n - T::one()));
    ((s1 * s1 + q).sqrt() + (s2 * s2 + q).sqrt() - (s1 + s2)) / (n + T::one())
}

/// Sag of a hyperbolic face with vertex distance `s` at lateral offset `x`:
/// `(sqrt(((n-1) s)^2 + (n^2-1) x^2) - (n-1) s) / (n^2 - 1)`.
fn hyperbolic_sag<T: Scalar>(n: T, s: T, x: T) -> T {
    let nm1 = n - T::one();
    let n2m1 = n * n - T::one();
    (((nm1 * s).powi(2) + n2m1 * x * x).sqrt() - nm1 * s) / n2m1
}

/// Sampled contour curves of the two hyperbolic faces over x in [-D/2, D/2].
///
/// The object-side vertex sits at z = s1 and bulges toward the object; the
/// image-side vertex sits at z = s1 + T and bulges toward the image, so the
/// faces meet at the rim |x| = D/2 (that closure is what the thickness
/// formula encodes).
pub fn contour_profiles<T: Scalar>(
    n: T,
    s1: T,
    s2: T,
    thickness: T,
    aperture: T,
    samples: usize,
) -> (Vec<(T, T)>, Vec<(T, T)>) {
    assert!(samples >= 2, "need at least two profile samples");
    let half = aperture / real::<T>(2.0);
    let step = aperture / real::<T>((samples - 1) as f64);
    let mut object_side = Vec::with_capacity(samples);
    let mut image_side = Vec::with_capacity(samples);
    for i in 0..samples {
        let x = -half + step * real::<T>(i as f64);
        object_side.push((x, s1 + hyperbolic_sag(n, s1, x)));
        image_side.push((x, s1 + thickness - hyperbolic_sag(n, s2, x)));
    }
    (object_side, image_side)
}

/// Fraction of Gaussian beam power passing an aperture of diameter `D` when
/// the local beam radius is `w`: `1 - exp(-2 (D/2)^2 / w^2)`.
pub fn interception_efficiency<T: Scalar>(aperture: T, w: T) -> T {
    let half = aperture / real::<T>(2.0);
    T::one() - (-real::<T>(2.0) * half * half / (w * w)).exp()
}

/// Number of samples per contour curve emitted by [`design_lens`].
pub const PROFILE_SAMPLES: usize = 512;

/// Run the full design chain: focal length, image distance, aperture from the
/// beam footprint at the lens, thickness, contours, focal plane, efficiency.
///
/// Deterministic: identical specs produce bitwise-identical designs.
pub fn design_lens<T: Scalar>(spec: &LensSpec<T>) -> Result<LensDesign<T>, LensError> {
    spec.validate()?;
    let s1 = spec.object_distance;
    let zr = spec.object_rayleigh_length();
    let focal_length = effective_focal_length(spec)?;
    let s2 = image_distance(focal_length, s1, zr);

    let feed_beam = BeamParams::new(spec.object_waist, spec.wavelength, T::zero());
    let w_at_lens = beam_radius(&feed_beam, s1);
    let aperture = spec.aperture_factor * w_at_lens;

    let thickness = lens_thickness(spec.refractive_index, s1, s2, aperture);
    let (object_side_profile, image_side_profile) = contour_profiles(
        spec.refractive_index,
        s1,
        s2,
        thickness,
        aperture,
        PROFILE_SAMPLES,
    );

    Ok(LensDesign {
        spec: *spec,
        focal_length,
        image_distance: s2,
        thickness,
        aperture,
        object_side_profile,
        image_side_profile,
        predicted_focal_plane: s1 + thickness + s2,
        interception_efficiency: interception_efficiency(aperture, w_at_lens),
    })
}
