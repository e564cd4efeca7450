use std::fmt;
use std::str::FromStr;

use crate::analytic::{
    detector_intensities, general_cross_correlation, CrossPair, DetectorIntensities, JointSettings,
};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A setting that can be swept or fixed. `Rho` and `Zeta` are the synchronized
/// aliases that drive both stations at once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParam {
    Phi,
    Psi,
    Xi,
    Theta,
    Rho,
    Zeta,
}

impl SweepParam {
    pub const ALL: [SweepParam; 6] = [
        SweepParam::Phi,
        SweepParam::Psi,
        SweepParam::Xi,
        SweepParam::Theta,
        SweepParam::Rho,
        SweepParam::Zeta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Phi => "phi",
            SweepParam::Psi => "psi",
            SweepParam::Xi => "xi",
            SweepParam::Theta => "theta",
            SweepParam::Rho => "rho",
            SweepParam::Zeta => "zeta",
        }
    }

    /// Underlying per-station settings written by this parameter, as a bitmask
    /// over (φ, ψ, ξ, θ).
    fn targets(self) -> u8 {
        match self {
            SweepParam::Phi => 0b0001,
            SweepParam::Psi => 0b0010,
            SweepParam::Xi => 0b0100,
            SweepParam::Theta => 0b1000,
            SweepParam::Rho => 0b0011,
            SweepParam::Zeta => 0b1100,
        }
    }

    /// Whether two parameters write any common setting.
    pub fn overlaps(self, other: SweepParam) -> bool {
        self.targets() & other.targets() != 0
    }

    pub fn apply<T: Scalar>(self, settings: &mut JointSettings<T>, value: T) {
        match self {
            SweepParam::Phi => settings.phi = value,
            SweepParam::Psi => settings.psi = value,
            SweepParam::Xi => settings.xi = value,
            SweepParam::Theta => settings.theta = value,
            SweepParam::Rho => {
                settings.phi = value;
                settings.psi = value;
            }
            SweepParam::Zeta => {
                settings.xi = value;
                settings.theta = value;
            }
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        SweepParam::ALL.into_iter().find(|p| p.name() == s).ok_or(())
    }
}

/// Inclusive grid `start, start + step, …` up to `stop`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis<T> {
    pub start: T,
    pub stop: T,
    pub step: T,
}

impl<T: Scalar> Axis<T> {
    pub fn new(start: T, stop: T, step: T) -> Self {
        Self { start, stop, step }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        let fail = |reason: &str| Error::InvalidAxis {
            axis: name.to_string(),
            reason: reason.to_string(),
        };
        if !(self.start.is_finite() && self.stop.is_finite() && self.step.is_finite()) {
            return Err(fail("bounds and step must be finite"));
        }
        if self.step <= T::zero() {
            return Err(fail("step must be positive"));
        }
        if self.start >= self.stop {
            return Err(fail("start must be below stop"));
        }
        Ok(())
    }

    /// Number of grid points; a stop that falls within rounding of a grid point
    /// is included.
    pub fn len(&self) -> usize {
        let span = (self.stop - self.start) / self.step;
        let slack = T::lit(1e-9) * (T::one() + span);
        (span + slack).floor().to_usize().unwrap_or(0) + 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn value(&self, k: usize) -> T {
        self.start + T::from_usize(k).expect("grid index fits scalar") * self.step
    }

    pub fn values(&self) -> Vec<T> {
        (0..self.len()).map(|k| self.value(k)).collect()
    }
}

/// Sweep over a subset of the settings with the rest held at `base`.
///
/// Grid points are ordered row-major over `axes`: the first axis varies slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec<T> {
    pub base: JointSettings<T>,
    pub axes: Vec<(SweepParam, Axis<T>)>,
}

impl<T: Scalar> SweepSpec<T> {
    pub fn new(base: JointSettings<T>) -> Self {
        Self { base, axes: Vec::new() }
    }

    pub fn axis(mut self, param: SweepParam, axis: Axis<T>) -> Result<Self> {
        self.push_axis(param, axis)?;
        Ok(self)
    }

    pub fn push_axis(&mut self, param: SweepParam, axis: Axis<T>) -> Result<()> {
        axis.validate(param.name())?;
        if self.axes.iter().any(|(p, _)| p.overlaps(param)) {
            return Err(Error::DuplicateParameter(param.name().to_string()));
        }
        self.axes.push((param, axis));
        Ok(())
    }

    pub fn len(&self) -> usize {
        if self.axes.is_empty() {
            0
        } else {
            self.axes.iter().map(|(_, a)| a.len()).product()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Settings at every grid point.
    pub fn points(&self) -> Result<Vec<JointSettings<T>>> {
        for (p, a) in &self.axes {
            a.validate(p.name())?;
        }
        let total = self.len();
        if total == 0 {
            return Err(Error::EmptySweep);
        }
        let lens: Vec<usize> = self.axes.iter().map(|(_, a)| a.len()).collect();
        let mut points = Vec::with_capacity(total);
        for flat in 0..total {
            let mut settings = self.base;
            let mut rem = flat;
            for (k, (param, axis)) in self.axes.iter().enumerate().rev() {
                let idx = rem % lens[k];
                rem /= lens[k];
                param.apply(&mut settings, axis.value(idx));
            }
            points.push(settings);
        }
        Ok(points)
    }
}

/// Figure presets: the synchronized ρ scan and the two cross-correlation maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// ρ ∈ [0, 2π] step π/100 with ζ = π/4.
    Fig2,
    /// (φ, ψ) ∈ [0, 2π]² step π/50 with ξ = θ = π/4.
    Fig3,
    /// (φ, ξ) ∈ [0, 2π]² step π/40 with ψ = 0, θ = π/4. The step puts
    /// ξ = π/4 and ξ = 3π/4 on the grid.
    Fig4,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Fig2, Preset::Fig3, Preset::Fig4];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
        }
    }

    /// Fixed settings of the preset.
    pub fn fixed<T: Scalar>(self) -> Vec<(SweepParam, T)> {
        let q = T::FRAC_PI_4();
        match self {
            Preset::Fig2 => vec![(SweepParam::Zeta, q)],
            Preset::Fig3 => vec![(SweepParam::Xi, q), (SweepParam::Theta, q)],
            Preset::Fig4 => vec![(SweepParam::Psi, T::zero()), (SweepParam::Theta, q)],
        }
    }

    /// Swept axes of the preset, in row-major order.
    pub fn axes<T: Scalar>(self) -> Vec<(SweepParam, Axis<T>)> {
        let two_pi = T::two() * T::PI();
        let fine = Axis::new(T::zero(), two_pi, T::PI() / T::lit(100.0));
        let coarse = Axis::new(T::zero(), two_pi, T::PI() / T::lit(50.0));
        let quarter_aligned = Axis::new(T::zero(), two_pi, T::PI() / T::lit(40.0));
        match self {
            Preset::Fig2 => vec![(SweepParam::Rho, fine)],
            Preset::Fig3 => vec![(SweepParam::Phi, coarse), (SweepParam::Psi, coarse)],
            Preset::Fig4 => vec![
                (SweepParam::Phi, quarter_aligned),
                (SweepParam::Xi, quarter_aligned),
            ],
        }
    }

    pub fn spec<T: Scalar>(self, i0: T) -> SweepSpec<T> {
        let mut base = JointSettings::new(T::zero(), T::zero(), T::zero(), T::zero()).with_i0(i0);
        for (p, v) in self.fixed::<T>() {
            p.apply(&mut base, v);
        }
        SweepSpec {
            base,
            axes: self.axes(),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        Preset::ALL.into_iter().find(|p| p.name() == s).ok_or(())
    }
}

/// Analytic values at one sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationRecord<T> {
    pub settings: JointSettings<T>,
    pub intensities: DetectorIntensities<T>,
    pub r_ad: T,
    pub r_bc: T,
}

impl<T: Scalar> CorrelationRecord<T> {
    pub fn at(settings: JointSettings<T>) -> Result<Self> {
        Ok(Self {
            settings,
            intensities: detector_intensities(&settings)?,
            r_ad: general_cross_correlation(&settings, CrossPair::AD),
            r_bc: general_cross_correlation(&settings, CrossPair::BC),
        })
    }
}

pub fn sweep<T: Scalar>(spec: &SweepSpec<T>) -> Result<Vec<CorrelationRecord<T>>> {
    spec.points()?.into_iter().map(CorrelationRecord::at).collect()
}

/// `R_AD` divided by its largest value over the sweep (all zeros stay zero).
///
/// For the synchronized scan the peak is 1 and the column is `sin²ρ`; for the
/// two-dimensional maps with both polarizers at ±π/4 the peak is 4.
pub fn normalized_by_peak<T: Scalar>(records: &[CorrelationRecord<T>]) -> Vec<T> {
    let peak = records.iter().map(|r| r.r_ad).fold(T::zero(), T::max);
    records
        .iter()
        .map(|r| if peak > T::zero() { r.r_ad / peak } else { T::zero() })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tolerance::ALGEBRAIC;
    use std::f64::consts::{FRAC_PI_4, PI};

    #[test]
    fn axis_lengths_include_stop() {
        assert_eq!(Axis::new(0.0, 2.0 * PI, PI / 100.0).len(), 201);
        assert_eq!(Axis::new(0.0, 2.0 * PI, PI / 50.0).len(), 101);
        assert_eq!(Axis::new(0.0, 7.0 * PI / 4.0, PI / 4.0).len(), 8);
        assert_eq!(Axis::new(0.0, 1.0, 0.3).len(), 4);
    }

    #[test]
    fn invalid_axes_rejected() {
        let spec = SweepSpec::new(JointSettings::<f64>::new(0.0, 0.0, 0.0, 0.0));
        assert!(spec.clone().axis(SweepParam::Phi, Axis::new(0.0, 1.0, 0.0)).is_err());
        assert!(spec.clone().axis(SweepParam::Phi, Axis::new(0.0, 1.0, -0.1)).is_err());
        assert!(spec.clone().axis(SweepParam::Phi, Axis::new(1.0, 0.0, 0.1)).is_err());
        assert!(spec.clone().axis(SweepParam::Phi, Axis::new(0.0, f64::NAN, 0.1)).is_err());
        assert!(spec.clone().axis(SweepParam::Phi, Axis::new(0.0, f64::INFINITY, 0.1)).is_err());
        assert_eq!(spec.points(), Err(Error::EmptySweep));
    }

    #[test]
    fn overlapping_axes_rejected() {
        let spec = SweepSpec::new(JointSettings::<f64>::new(0.0, 0.0, 0.0, 0.0))
            .axis(SweepParam::Rho, Axis::new(0.0, 1.0, 0.5))
            .unwrap();
        assert!(matches!(
            spec.clone().axis(SweepParam::Psi, Axis::new(0.0, 1.0, 0.5)),
            Err(Error::DuplicateParameter(_))
        ));
        assert!(spec.axis(SweepParam::Xi, Axis::new(0.0, 1.0, 0.5)).is_ok());
    }

    #[test]
    fn row_major_order() {
        let spec = SweepSpec::new(JointSettings::<f64>::new(0.0, 0.0, 0.0, 0.0))
            .axis(SweepParam::Phi, Axis::new(0.0, 1.0, 1.0))
            .unwrap()
            .axis(SweepParam::Xi, Axis::new(0.0, 2.0, 1.0))
            .unwrap();
        let pts: Vec<(f64, f64)> = spec.points().unwrap().iter().map(|s| (s.phi, s.xi)).collect();
        assert_eq!(
            pts,
            vec![(0.0, 0.0), (0.0, 1.0), (0.0, 2.0), (1.0, 0.0), (1.0, 1.0), (1.0, 2.0)]
        );
    }

    #[test]
    fn fig2_preset_is_sin_squared() {
        let recs = sweep(&Preset::Fig2.spec::<f64>(1.0)).unwrap();
        assert_eq!(recs.len(), 201);
        for r in &recs {
            assert_eq!(r.settings.phi, r.settings.psi);
            assert!((r.r_ad - r.settings.phi.sin().powi(2)).abs() < ALGEBRAIC);
        }
        let norm = normalized_by_peak(&recs);
        for (r, n) in recs.iter().zip(&norm) {
            assert!((n - r.settings.phi.sin().powi(2)).abs() < ALGEBRAIC);
        }
    }

    #[test]
    fn fig3_preset_product_form() {
        let recs = sweep(&Preset::Fig3.spec::<f64>(1.0)).unwrap();
        assert_eq!(recs.len(), 101 * 101);
        for r in &recs {
            let (phi, psi) = (r.settings.phi, r.settings.psi);
            assert!((r.r_ad - (1.0 - phi.cos()) * (1.0 + psi.cos())).abs() < ALGEBRAIC);
            assert!((r.r_bc - (1.0 + phi.cos()) * (1.0 - psi.cos())).abs() < ALGEBRAIC);
        }
        let peak = normalized_by_peak(&recs);
        let max = recs.iter().map(|r| r.r_ad).fold(0.0, f64::max);
        assert!((max - 4.0).abs() < ALGEBRAIC);
        assert!((peak[0] - recs[0].r_ad / 4.0).abs() < ALGEBRAIC);
    }

    #[test]
    fn fig4_preset_fixed_values() {
        let spec = Preset::Fig4.spec::<f64>(1.0);
        assert_eq!(spec.base.psi, 0.0);
        assert_eq!(spec.base.theta, FRAC_PI_4);
        let recs = sweep(&spec).unwrap();
        assert_eq!(recs.len(), 81 * 81);
        let peak = recs.iter().map(|r| r.r_ad).fold(0.0, f64::max);
        assert!((peak - 4.0).abs() < ALGEBRAIC);
        // every maximum has sin 2ξ cos φ = −1; (φ, ξ) = (π, π/4) is one of them
        let maxima: Vec<_> = recs.iter().filter(|r| (r.r_ad - peak).abs() < 1e-9).collect();
        assert!(maxima
            .iter()
            .all(|r| ((2.0 * r.settings.xi).sin() * r.settings.phi.cos() + 1.0).abs() < 1e-9));
        assert!(maxima
            .iter()
            .any(|r| (r.settings.xi - FRAC_PI_4).abs() < 1e-9 && (r.settings.phi - PI).abs() < 1e-9));
    }

    #[test]
    fn all_zero_normalizes_to_zero() {
        let spec = SweepSpec::new(JointSettings::<f64>::new(0.0, 0.0, FRAC_PI_4, FRAC_PI_4))
            .axis(SweepParam::Theta, Axis::new(FRAC_PI_4, FRAC_PI_4 + 1e-3, 1.0))
            .unwrap();
        let recs = sweep(&spec).unwrap();
        assert!(normalized_by_peak(&recs).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn names_round_trip() {
        for p in SweepParam::ALL {
            assert_eq!(p.name().parse::<SweepParam>(), Ok(p));
        }
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>(), Ok(p));
        }
        assert!("omega".parse::<SweepParam>().is_err());
    }
}
