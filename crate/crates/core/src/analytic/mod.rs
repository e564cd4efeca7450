//! Closed-form detector intensities and cross-station correlations.
//!
//! Each station contributes a fringe factor per detector,
//!
//! ```text
//! A: 1 − sin 2ξ cos φ     B: 1 + sin 2ξ cos φ
//! C: 1 − sin 2θ cos ψ     D: 1 + sin 2θ cos ψ
//! ```
//!
//! so that `I_j = (I0/4)·factor(j)`. A cross-station correlation `R_ij` is the
//! product `factor(i)·factor(j)`, which equals `I_i·I_j` normalized by the
//! phase-averaged singles `⟨I_i⟩ = ⟨I_j⟩ = I0/4`. It lies in `[0, 4]`.

mod sweep;

pub use sweep::{
    normalized_by_peak, sweep, Axis, CorrelationRecord, Preset, SweepParam, SweepSpec,
};

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::station::{closed_form_station, StationParams};

/// Settings of both stations plus the per-photon input intensity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointSettings<T> {
    /// Alice's interferometer phase φ.
    pub phi: T,
    /// Bob's interferometer phase ψ.
    pub psi: T,
    /// Alice's polarizer angle ξ.
    pub xi: T,
    /// Bob's polarizer angle θ.
    pub theta: T,
    /// Input intensity I0, non-negative.
    pub i0: T,
}

impl<T: Scalar> JointSettings<T> {
    pub fn new(phi: T, psi: T, xi: T, theta: T) -> Self {
        Self { phi, psi, xi, theta, i0: T::one() }
    }

    /// Synchronized settings: φ = ψ = ρ and ξ = θ = ζ.
    pub fn synchronized(rho: T, zeta: T) -> Self {
        Self::new(rho, rho, zeta, zeta)
    }

    pub fn with_i0(mut self, i0: T) -> Self {
        self.i0 = i0;
        self
    }

    fn check_i0(&self) -> Result<()> {
        check_i0(self.i0)
    }

    /// Alice's station with unit-intensity input scaled to I0.
    pub fn alice(&self) -> StationParams<T> {
        StationParams::new(self.phi, self.xi)
            .with_input(num_complex::Complex::new(self.i0.sqrt(), T::zero()))
    }

    /// Bob's station; `eta` is the source-to-Bob propagation phase.
    pub fn bob(&self, eta: T) -> StationParams<T> {
        StationParams::new(self.psi, self.theta)
            .with_global_phase(eta)
            .with_input(num_complex::Complex::new(self.i0.sqrt(), T::zero()))
    }
}

fn check_i0<T: Scalar>(i0: T) -> Result<()> {
    if i0 >= T::zero() && i0.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidIntensity(i0.to_f64().unwrap_or(f64::NAN)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Detector {
    A,
    B,
    C,
    D,
}

impl Detector {
    pub const ALL: [Detector; 4] = [Detector::A, Detector::B, Detector::C, Detector::D];

    pub fn label(self) -> char {
        match self {
            Detector::A => 'A',
            Detector::B => 'B',
            Detector::C => 'C',
            Detector::D => 'D',
        }
    }

    /// `true` for Alice's detectors.
    pub fn is_alice(self) -> bool {
        matches!(self, Detector::A | Detector::B)
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Detector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// A pair of detectors on opposite stations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CrossPair {
    AD,
    BC,
    AC,
    BD,
}

impl CrossPair {
    pub const ALL: [CrossPair; 4] = [CrossPair::AD, CrossPair::BC, CrossPair::AC, CrossPair::BD];

    /// `(alice, bob)` detectors of the pair.
    pub fn detectors(self) -> (Detector, Detector) {
        match self {
            CrossPair::AD => (Detector::A, Detector::D),
            CrossPair::BC => (Detector::B, Detector::C),
            CrossPair::AC => (Detector::A, Detector::C),
            CrossPair::BD => (Detector::B, Detector::D),
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Builds the pair from two detectors in either order.
    pub fn from_detectors(i: Detector, j: Detector) -> Result<Self> {
        let (alice, bob) = match (i.is_alice(), j.is_alice()) {
            (true, false) => (i, j),
            (false, true) => (j, i),
            _ => return Err(Error::SameStationPair(i.label(), j.label())),
        };
        Ok(match (alice, bob) {
            (Detector::A, Detector::D) => CrossPair::AD,
            (Detector::B, Detector::C) => CrossPair::BC,
            (Detector::A, Detector::C) => CrossPair::AC,
            (Detector::B, Detector::D) => CrossPair::BD,
            _ => unreachable!("alice side is A/B and bob side is C/D"),
        })
    }
}

impl fmt::Display for CrossPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (i, j) = self.detectors();
        write!(f, "{i}{j}")
    }
}

/// Intensities at the four detectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorIntensities<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Scalar> DetectorIntensities<T> {
    pub fn get(&self, detector: Detector) -> T {
        match detector {
            Detector::A => self.a,
            Detector::B => self.b,
            Detector::C => self.c,
            Detector::D => self.d,
        }
    }
}

/// Fringe factor of a detector, in `[0, 2]`.
pub fn fringe_factor<T: Scalar>(settings: &JointSettings<T>, detector: Detector) -> T {
    let alice = (T::two() * settings.xi).sin() * settings.phi.cos();
    let bob = (T::two() * settings.theta).sin() * settings.psi.cos();
    match detector {
        Detector::A => T::one() - alice,
        Detector::B => T::one() + alice,
        Detector::C => T::one() - bob,
        Detector::D => T::one() + bob,
    }
}

pub fn detector_intensities<T: Scalar>(
    settings: &JointSettings<T>,
) -> Result<DetectorIntensities<T>> {
    settings.check_i0()?;
    let q = settings.i0 * T::quarter();
    Ok(DetectorIntensities {
        a: q * fringe_factor(settings, Detector::A),
        b: q * fringe_factor(settings, Detector::B),
        c: q * fringe_factor(settings, Detector::C),
        d: q * fringe_factor(settings, Detector::D),
    })
}

/// Same intensities taken as squared amplitudes from the station model, with
/// Bob's propagation phase `eta`.
pub fn intensities_from_amplitudes<T: Scalar>(
    settings: &JointSettings<T>,
    eta: T,
) -> Result<DetectorIntensities<T>> {
    settings.check_i0()?;
    let alice = closed_form_station(&settings.alice());
    let bob = closed_form_station(&settings.bob(eta));
    Ok(DetectorIntensities {
        a: alice.intensity_minus(),
        b: alice.intensity_plus(),
        c: bob.intensity_minus(),
        d: bob.intensity_plus(),
    })
}

/// `R_ij = factor(i)·factor(j)` for a cross-station pair.
pub fn general_cross_correlation<T: Scalar>(settings: &JointSettings<T>, pair: CrossPair) -> T {
    let (i, j) = pair.detectors();
    fringe_factor(settings, i) * fringe_factor(settings, j)
}

/// Synchronized `R_AD` at ζ = π/4, which reduces to `sin²ρ`.
pub fn synchronized_correlation<T: Scalar>(rho: T) -> T {
    general_cross_correlation(&JointSettings::synchronized(rho, T::FRAC_PI_4()), CrossPair::AD)
}

/// `R_AD` with both polarizers fixed at `sign·π/4`:
/// `(1 − sign·cos φ)(1 + sign·cos ψ)`.
pub fn cross_correlation_fixed_pol<T: Scalar>(phi: T, psi: T, sign: i32) -> Result<T> {
    let zeta = match sign {
        1 => T::FRAC_PI_4(),
        -1 => -T::FRAC_PI_4(),
        other => return Err(Error::InvalidSign(other)),
    };
    Ok(general_cross_correlation(&JointSettings::new(phi, psi, zeta, zeta), CrossPair::AD))
}

/// Sum of a detector's synchronized intensity over the two polarizer bases
/// ζ = ±π/4. The fringe terms cancel, leaving `i0/2` for every ρ.
pub fn local_basis_sum<T: Scalar>(rho: T, detector: Detector, i0: T) -> Result<T> {
    check_i0(i0)?;
    let plus = detector_intensities(&JointSettings::synchronized(rho, T::FRAC_PI_4()).with_i0(i0))?;
    let minus =
        detector_intensities(&JointSettings::synchronized(rho, -T::FRAC_PI_4()).with_i0(i0))?;
    Ok(plus.get(detector) + minus.get(detector))
}
