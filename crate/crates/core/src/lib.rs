//! Paired noninterfering Mach-Zehnder interferometers with polarizer
//! projection and coincidence detection.
//!
//! The optics and analytic layers are generic over the real scalar type
//! ([`Scalar`], implemented for `f32` and `f64`); the aliases below fix it to
//! `f64`, which is what the Monte Carlo, CSV and CLI layers use.

pub mod analytic;
pub mod config;
pub mod error;
pub mod mc;
pub mod output;
pub mod run;
pub mod optics;
pub mod scalar;
pub mod station;
pub mod tolerance;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use analytic::{CrossPair, Detector, Preset, SweepParam};

pub type ComplexAmplitude = optics::Amplitude<f64>;
pub type JonesVector = optics::JonesVector<f64>;
pub type TwoModeField = optics::TwoModeField<f64>;
pub type ElementConventions = optics::ElementConventions<f64>;
pub type StationParams = station::StationParams<f64>;
pub type StationOutputs = station::StationOutputs<f64>;
pub type JointSettings = analytic::JointSettings<f64>;
pub type DetectorIntensities = analytic::DetectorIntensities<f64>;
pub type CorrelationRecord = analytic::CorrelationRecord<f64>;
pub type SweepSpec = analytic::SweepSpec<f64>;
pub type Axis = analytic::Axis<f64>;

pub use mc::{CoincidenceCounts, EstimatedCorrelation, SourceParams};
