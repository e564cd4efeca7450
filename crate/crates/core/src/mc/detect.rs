use rand::Rng;

use crate::analytic::{fringe_factor, Detector, JointSettings};

/// Per-photon outcome probabilities at one station.
///
/// A photon reaches the first output's detector with probability
/// `factor/4`, the second with `factor/4`, and is absorbed by the polarizer
/// otherwise (probability 1/2 for every setting).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationProbabilities {
    pub minus: f64,
    pub plus: f64,
    pub loss: f64,
    minus_detector: Detector,
    plus_detector: Detector,
}

impl StationProbabilities {
    pub fn alice(settings: &JointSettings<f64>) -> Self {
        Self::from_factors(settings, Detector::A, Detector::B)
    }

    pub fn bob(settings: &JointSettings<f64>) -> Self {
        Self::from_factors(settings, Detector::C, Detector::D)
    }

    fn from_factors(settings: &JointSettings<f64>, minus: Detector, plus: Detector) -> Self {
        let pm = fringe_factor(settings, minus) / 4.0;
        let pp = fringe_factor(settings, plus) / 4.0;
        let sp = Self {
            minus: pm,
            plus: pp,
            loss: 1.0 - pm - pp,
            minus_detector: minus,
            plus_detector: plus,
        };
        debug_assert!((sp.total() - 1.0).abs() < 1e-12, "probabilities sum to {}", sp.total());
        sp
    }

    pub fn total(&self) -> f64 {
        self.minus + self.plus + self.loss
    }

    pub fn probability(&self, detector: Detector) -> f64 {
        if detector == self.minus_detector {
            self.minus
        } else if detector == self.plus_detector {
            self.plus
        } else {
            0.0
        }
    }

    /// Maps a uniform draw in `[0, 1)` to an outcome; `None` is a loss.
    pub fn outcome(&self, u: f64) -> Option<Detector> {
        if u < self.minus {
            Some(self.minus_detector)
        } else if u < self.minus + self.plus {
            Some(self.plus_detector)
        } else {
            None
        }
    }
}

/// Detection statistics for both stations at fixed settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionModel {
    pub alice: StationProbabilities,
    pub bob: StationProbabilities,
}

impl DetectionModel {
    pub fn new(settings: &JointSettings<f64>) -> Self {
        Self {
            alice: StationProbabilities::alice(settings),
            bob: StationProbabilities::bob(settings),
        }
    }
}

/// Where each photon of a pair ended up; `None` means absorbed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairOutcome {
    pub alice: Option<Detector>,
    pub bob: Option<Detector>,
}

/// Samples both photons of a pair independently.
pub fn detect_pair<R: Rng + ?Sized>(model: &DetectionModel, rng: &mut R) -> PairOutcome {
    PairOutcome {
        alice: model.alice.outcome(rng.random()),
        bob: model.bob.outcome(rng.random()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_4, PI};

    #[test]
    fn dark_port_at_zero_phase() {
        let m = DetectionModel::new(&JointSettings::new(0.0, 0.0, FRAC_PI_4, FRAC_PI_4));
        assert_eq!(m.alice.minus, 0.0);
        assert!((m.alice.plus - 0.5).abs() < 1e-15);
        assert!((m.alice.loss - 0.5).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            assert_ne!(detect_pair(&m, &mut rng).alice, Some(Detector::A));
        }
    }

    #[test]
    fn polarizer_at_h_gives_quarter_each() {
        for phi in [0.0, 1.0, PI] {
            let m = DetectionModel::new(&JointSettings::new(phi, phi, 0.0, 0.0));
            assert!((m.alice.minus - 0.25).abs() < 1e-15);
            assert!((m.alice.plus - 0.25).abs() < 1e-15);
            assert_eq!(m.bob.probability(Detector::C), m.bob.minus);
            assert_eq!(m.bob.probability(Detector::A), 0.0);
        }
    }

    #[test]
    fn outcome_mapping() {
        let sp = StationProbabilities::alice(&JointSettings::new(PI, 0.0, FRAC_PI_4, 0.0));
        assert_eq!(sp.outcome(0.0), Some(Detector::A));
        assert_eq!(sp.outcome(0.49), Some(Detector::A));
        assert_eq!(sp.outcome(0.75), None);
    }

    proptest! {
        #[test]
        fn probabilities_sum_to_one(phi in -7.0f64..7.0, psi in -7.0f64..7.0, xi in -4.0f64..4.0, theta in -4.0f64..4.0) {
            let m = DetectionModel::new(&JointSettings::new(phi, psi, xi, theta));
            for sp in [m.alice, m.bob] {
                prop_assert!((sp.total() - 1.0).abs() < 1e-12);
                prop_assert!(sp.minus >= 0.0 && sp.plus >= 0.0);
                prop_assert!((sp.loss - 0.5).abs() < 1e-12);
            }
        }
    }
}
