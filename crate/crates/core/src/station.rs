//! One party's noninterfering Mach-Zehnder interferometer followed by a
//! polarizer on each output.
//!
//! Two routes produce the same [`StationOutputs`]: [`closed_form_station`]
//! evaluates the known output fields directly, [`composed_station`] propagates
//! the input through the individual elements of [`crate::optics`]. They agree up
//! to one overall phase fixed by the element conventions.

use num_complex::Complex;

use crate::optics::{
    beam_splitter_field, half_wave_plate, mirror, pbs_split, phase_shift, polarizer_project,
    Amplitude, ElementConventions, JonesVector, TwoModeField,
};
use crate::scalar::Scalar;

/// Fast-axis angle of the preparation half-wave plate: turns the V-polarized
/// input into +45° linear polarization so the PBS splits it equally.
pub fn preparation_hwp_angle<T: Scalar>() -> T {
    T::lit(3.0) * T::PI() / T::lit(8.0)
}

/// Settings of one station.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationParams<T> {
    /// Phase on the V arm of the interferometer (φ for Alice, ψ for Bob).
    pub mzi_phase: T,
    /// Polarizer angle measured counterclockwise from H (ξ for Alice, θ for Bob).
    pub polarizer_angle: T,
    /// Propagation phase from the source to this station (zero for Alice).
    pub global_phase: T,
    /// Amplitude of the photon entering the station.
    pub input_amplitude: Amplitude<T>,
}

impl<T: Scalar> StationParams<T> {
    pub fn new(mzi_phase: T, polarizer_angle: T) -> Self {
        Self {
            mzi_phase,
            polarizer_angle,
            global_phase: T::zero(),
            input_amplitude: Complex::new(T::one(), T::zero()),
        }
    }

    pub fn with_global_phase(mut self, eta: T) -> Self {
        self.global_phase = eta;
        self
    }

    pub fn with_input(mut self, amplitude: Amplitude<T>) -> Self {
        self.input_amplitude = amplitude;
        self
    }

    pub fn is_finite(&self) -> bool {
        self.mzi_phase.is_finite()
            && self.polarizer_angle.is_finite()
            && self.global_phase.is_finite()
            && self.input_amplitude.re.is_finite()
            && self.input_amplitude.im.is_finite()
    }
}

/// Interferometer outputs before and after the polarizers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationOutputs<T> {
    /// First interferometer output (the port that feeds detector A or C).
    pub out1: JonesVector<T>,
    /// Second interferometer output (detector B or D).
    pub out2: JonesVector<T>,
    /// Polarizer-transmitted amplitude on the first output (E_A or E_C).
    pub proj_minus: Amplitude<T>,
    /// Polarizer-transmitted amplitude on the second output (E_B or E_D).
    pub proj_plus: Amplitude<T>,
}

impl<T: Scalar> StationOutputs<T> {
    pub fn components(&self) -> [Amplitude<T>; 6] {
        [
            self.out1.h,
            self.out1.v,
            self.out2.h,
            self.out2.v,
            self.proj_minus,
            self.proj_plus,
        ]
    }

    /// `|out1|² + |out2|²`, the power leaving the interferometer.
    pub fn interferometer_intensity(&self) -> T {
        self.out1.intensity() + self.out2.intensity()
    }

    /// `|proj_minus|²`: detector A (or C) intensity.
    pub fn intensity_minus(&self) -> T {
        self.proj_minus.norm_sqr()
    }

    /// `|proj_plus|²`: detector B (or D) intensity.
    pub fn intensity_plus(&self) -> T {
        self.proj_plus.norm_sqr()
    }

    /// Squared magnitudes of all six components, in [`Self::components`] order.
    pub fn intensities(&self) -> [T; 6] {
        self.components().map(|z| z.norm_sqr())
    }
}

/// Output fields evaluated directly:
///
/// ```text
/// out1       = (E0/2) e^{iη} (H − V e^{iφ})
/// out2       = (iE0/2) e^{iη} (H + V e^{iφ})
/// proj_minus = (E0/2) e^{iη} (cos ζ − sin ζ e^{iφ})
/// proj_plus  = (iE0/2) e^{iη} (cos ζ + sin ζ e^{iφ})
/// ```
pub fn closed_form_station<T: Scalar>(params: &StationParams<T>) -> StationOutputs<T> {
    let i = Complex::new(T::zero(), T::one());
    let pre = params.input_amplitude.scale(T::half()) * Complex::from_polar(T::one(), params.global_phase);
    let fringe = Complex::from_polar(T::one(), params.mzi_phase);
    let (s, c) = params.polarizer_angle.sin_cos();
    let c = Complex::new(c, T::zero());
    StationOutputs {
        out1: JonesVector::new(pre, -(pre * fringe)),
        out2: JonesVector::new(i * pre, i * pre * fringe),
        proj_minus: pre * (c - fringe.scale(s)),
        proj_plus: i * pre * (c + fringe.scale(s)),
    }
}

/// Output fields by element-by-element propagation.
///
/// V-polarized input (carrying the station's propagation phase) → preparation
/// HWP → PBS (H arm transmitted, V arm reflected) → `mzi_phase` on the V arm →
/// one mirror per arm → recombining 50:50 BS → polarizer on each output.
pub fn composed_station<T: Scalar>(
    params: &StationParams<T>,
    conv: &ElementConventions<T>,
) -> StationOutputs<T> {
    let input = JonesVector::<T>::vertical()
        .scale(params.input_amplitude * Complex::from_polar(T::one(), params.global_phase));
    let prepared = half_wave_plate(&input, preparation_hwp_angle());
    let (arm_h, arm_v) = pbs_split(&prepared, conv);
    let arm_v = phase_shift(arm_v, params.mzi_phase);
    let zero = Complex::new(T::zero(), T::zero());
    let arms = TwoModeField::new(
        JonesVector::new(mirror(arm_h, conv), zero),
        JonesVector::new(zero, mirror(arm_v, conv)),
    );
    let out = beam_splitter_field(&arms, conv);
    StationOutputs {
        out1: out.upper,
        out2: out.lower,
        proj_minus: polarizer_project(&out.upper, params.polarizer_angle),
        proj_plus: polarizer_project(&out.lower, params.polarizer_angle),
    }
}

/// Result of comparing two output sets modulo a common phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseMatch<T> {
    /// Phase factor `candidate ≈ phase · reference`, extracted from the first
    /// non-negligible reference component.
    pub phase: Amplitude<T>,
    /// Largest componentwise `|candidate − phase · reference|`.
    pub max_error: T,
}

/// Extracts one common phase from the first non-negligible component of
/// `reference` and measures how well it explains every component of `candidate`.
///
/// When all reference components vanish the phase is 1 and `max_error` is the
/// largest candidate magnitude.
pub fn match_up_to_global_phase<T: Scalar>(
    reference: &StationOutputs<T>,
    candidate: &StationOutputs<T>,
) -> PhaseMatch<T> {
    let refs = reference.components();
    let cands = candidate.components();
    let scale = refs.iter().map(|z| z.norm()).fold(T::zero(), T::max);
    let threshold = scale * T::lit(1e-3);
    let phase = refs
        .iter()
        .zip(cands.iter())
        .find(|(r, _)| scale > T::zero() && r.norm() > threshold)
        .map(|(r, c)| {
            let ratio = c / r;
            let n = ratio.norm();
            if n > T::zero() {
                ratio.unscale(n)
            } else {
                Complex::new(T::one(), T::zero())
            }
        })
        .unwrap_or_else(|| Complex::new(T::one(), T::zero()));
    let max_error = refs
        .iter()
        .zip(cands.iter())
        .map(|(r, c)| (c - phase * r).norm())
        .fold(T::zero(), T::max);
    PhaseMatch { phase, max_error }
}
