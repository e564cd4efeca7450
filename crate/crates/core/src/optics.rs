//! Jones-calculus building blocks for the interferometer stations.
//!
//! Every element is a pure function on complex amplitudes. Spatial modes are
//! tracked separately from polarization: a [`JonesVector`] is the polarization
//! state in one spatial mode, a [`TwoModeField`] carries the two arms (or the two
//! outputs) of an interferometer.

use num_complex::Complex;

use crate::scalar::Scalar;

/// Complex scalar field amplitude in dimensionless field units.
pub type Amplitude<T> = Complex<T>;

/// Polarization state of one spatial mode on the H/V basis.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct JonesVector<T> {
    pub h: Amplitude<T>,
    pub v: Amplitude<T>,
}

impl<T: Scalar> JonesVector<T> {
    pub fn new(h: Amplitude<T>, v: Amplitude<T>) -> Self {
        Self { h, v }
    }

    pub fn zero() -> Self {
        Self::new(Complex::new(T::zero(), T::zero()), Complex::new(T::zero(), T::zero()))
    }

    /// Unit-amplitude horizontal polarization.
    pub fn horizontal() -> Self {
        Self::new(Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::zero()))
    }

    /// Unit-amplitude vertical polarization.
    pub fn vertical() -> Self {
        Self::new(Complex::new(T::zero(), T::zero()), Complex::new(T::one(), T::zero()))
    }

    /// Linear polarization at `angle` (radians, counterclockwise from H).
    pub fn linear(angle: T) -> Self {
        Self::new(
            Complex::new(angle.cos(), T::zero()),
            Complex::new(angle.sin(), T::zero()),
        )
    }

    pub fn intensity(&self) -> T {
        self.h.norm_sqr() + self.v.norm_sqr()
    }

    pub fn scale(&self, factor: Amplitude<T>) -> Self {
        Self::new(self.h * factor, self.v * factor)
    }
}

/// The two spatial modes of an interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TwoModeField<T> {
    pub upper: JonesVector<T>,
    pub lower: JonesVector<T>,
}

impl<T: Scalar> TwoModeField<T> {
    pub fn new(upper: JonesVector<T>, lower: JonesVector<T>) -> Self {
        Self { upper, lower }
    }

    pub fn intensity(&self) -> T {
        self.upper.intensity() + self.lower.intensity()
    }
}

/// Phase factors picked up on reflection by each element kind.
///
/// Only the composed interferometer response is physically fixed; these are the
/// factors that make element-by-element propagation reproduce it. Each factor
/// must have unit magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementConventions<T> {
    /// Reflection factor of the 50:50 beam splitter (transmission is real).
    pub bs_reflection: Amplitude<T>,
    /// Reflection factor of the polarizing beam splitter for the V component.
    pub pbs_reflection: Amplitude<T>,
    /// Factor applied by each steering mirror.
    pub mirror: Amplitude<T>,
}

impl<T: Scalar> ElementConventions<T> {
    /// Symmetric BS (`i` on reflection), PBS reflecting V with `i`, and metallic
    /// mirrors contributing `-1`. The mirrors appear once per arm, so they only
    /// set the station's overall phase.
    pub fn standard() -> Self {
        let i = Complex::new(T::zero(), T::one());
        Self {
            bs_reflection: i,
            pbs_reflection: i,
            mirror: Complex::new(-T::one(), T::zero()),
        }
    }

    /// Largest deviation of any factor's magnitude from one.
    pub fn unit_magnitude_error(&self) -> T {
        [self.bs_reflection, self.pbs_reflection, self.mirror]
            .iter()
            .map(|z| (z.norm() - T::one()).abs())
            .fold(T::zero(), T::max)
    }
}

impl<T: Scalar> Default for ElementConventions<T> {
    fn default() -> Self {
        Self::standard()
    }
}

/// 50:50 beam splitter acting on one polarization component of two modes.
///
/// `out_upper = t·in_upper + r·in_lower`, `out_lower = r·in_upper + t·in_lower`,
/// with `t = 1/√2` and `r = bs_reflection/√2`.
pub fn beam_splitter_mix<T: Scalar>(
    in_upper: Amplitude<T>,
    in_lower: Amplitude<T>,
    conv: &ElementConventions<T>,
) -> (Amplitude<T>, Amplitude<T>) {
    let t = T::FRAC_1_SQRT_2();
    let r = conv.bs_reflection.scale(t);
    (in_upper.scale(t) + in_lower * r, in_upper * r + in_lower.scale(t))
}

/// Beam splitter applied to both polarization components of a two-mode field.
pub fn beam_splitter_field<T: Scalar>(
    field: &TwoModeField<T>,
    conv: &ElementConventions<T>,
) -> TwoModeField<T> {
    let (uh, lh) = beam_splitter_mix(field.upper.h, field.lower.h, conv);
    let (uv, lv) = beam_splitter_mix(field.upper.v, field.lower.v, conv);
    TwoModeField::new(JonesVector::new(uh, uv), JonesVector::new(lh, lv))
}

/// Polarizing beam splitter: H is transmitted, V is reflected.
///
/// Returns `(path_h, path_v)`.
pub fn pbs_split<T: Scalar>(
    input: &JonesVector<T>,
    conv: &ElementConventions<T>,
) -> (Amplitude<T>, Amplitude<T>) {
    (input.h, input.v * conv.pbs_reflection)
}

/// Half-wave plate with its fast axis at `fast_axis` radians from H.
///
/// Uses the real reflection form `[[cos 2α, sin 2α], [sin 2α, −cos 2α]]`, which maps
/// linear polarization at β to 2α − β.
pub fn half_wave_plate<T: Scalar>(input: &JonesVector<T>, fast_axis: T) -> JonesVector<T> {
    let (s, c) = (T::two() * fast_axis).sin_cos();
    JonesVector::new(
        input.h.scale(c) + input.v.scale(s),
        input.h.scale(s) - input.v.scale(c),
    )
}

/// Multiplies an amplitude by `e^{iφ}`.
pub fn phase_shift<T: Scalar>(input: Amplitude<T>, phi: T) -> Amplitude<T> {
    input * Complex::from_polar(T::one(), phi)
}

/// Mirror reflection.
pub fn mirror<T: Scalar>(input: Amplitude<T>, conv: &ElementConventions<T>) -> Amplitude<T> {
    input * conv.mirror
}

/// Ideal linear polarizer at `zeta`: returns the transmitted amplitude
/// `h·cos ζ + v·sin ζ` along the pass axis.
pub fn polarizer_project<T: Scalar>(input: &JonesVector<T>, zeta: T) -> Amplitude<T> {
    let (s, c) = zeta.sin_cos();
    input.h.scale(c) + input.v.scale(s)
}
