use rayon::prelude::*;

use crate::analytic::{CrossPair, JointSettings};
use crate::error::{Error, Result};
use crate::mc::detect::{detect_pair, DetectionModel};
use crate::mc::estimate::{estimate_correlation, CoincidenceCounts, EstimatedCorrelation, Normalization};
use crate::mc::source::{PairRouting, PairStream, SourceParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormalizationMode {
    #[default]
    Analytic,
    /// Normalize by singles rates averaged over all points of the run.
    Measured,
}

impl NormalizationMode {
    pub fn name(self) -> &'static str {
        match self {
            NormalizationMode::Analytic => "analytic",
            NormalizationMode::Measured => "measured",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "analytic" => Some(NormalizationMode::Analytic),
            "measured" => Some(NormalizationMode::Measured),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPoint {
    pub settings: JointSettings<f64>,
    pub counts: CoincidenceCounts,
    /// Indexed by [`CrossPair::index`].
    pub estimates: [EstimatedCorrelation; 4],
    /// Singles per post-selected pair, indexed by [`crate::Detector::index`].
    pub singles_rates: [f64; 4],
}

impl ExperimentPoint {
    pub fn estimate(&self, pair: CrossPair) -> &EstimatedCorrelation {
        &self.estimates[pair.index()]
    }
}

/// A full run. `partition` records the bins assigned to each stream, which
/// together with the seed fixes every draw.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub source: SourceParams,
    pub routing: PairRouting,
    pub partition: Vec<u64>,
    pub normalization: Normalization,
    pub points: Vec<ExperimentPoint>,
}

/// Runs one (point, stream) cell to exhaustion.
fn run_cell(
    settings: &JointSettings<f64>,
    src: &SourceParams,
    routing: PairRouting,
    point: usize,
    stream: usize,
    bins: std::ops::Range<u64>,
) -> Result<CoincidenceCounts> {
    let model = DetectionModel::new(settings);
    let mut pairs = PairStream::new(src.mean_photon_number, bins, routing, src.stream_rng(point, stream))?;
    let mut counts = CoincidenceCounts::default();
    while let Some((_, rng)) = pairs.next_pair() {
        counts.record(detect_pair(&model, rng));
    }
    counts.bins = *pairs.tally();
    Ok(counts)
}

/// Counts for one sweep point, streams merged in order.
pub fn simulate_point(
    settings: &JointSettings<f64>,
    src: &SourceParams,
    routing: PairRouting,
    point: usize,
) -> Result<CoincidenceCounts> {
    src.validate()?;
    let cells: Vec<CoincidenceCounts> = src
        .partition()
        .into_par_iter()
        .enumerate()
        .map(|(s, bins)| run_cell(settings, src, routing, point, s, bins))
        .collect::<Result<_>>()?;
    let mut total = CoincidenceCounts::default();
    for c in &cells {
        total.merge(c);
    }
    Ok(total)
}

/// Simulates every sweep point and attaches correlation estimates for all four
/// cross-station pairs.
pub fn run_experiment(
    points: &[JointSettings<f64>],
    src: &SourceParams,
    routing: PairRouting,
    mode: NormalizationMode,
) -> Result<Experiment> {
    if points.is_empty() {
        return Err(Error::EmptySweep);
    }
    src.validate()?;
    let partition = src.partition();
    let cells: Vec<(usize, usize, std::ops::Range<u64>)> = (0..points.len())
        .flat_map(|p| partition.iter().cloned().enumerate().map(move |(s, r)| (p, s, r)))
        .collect();
    let results: Vec<CoincidenceCounts> = cells
        .into_par_iter()
        .map(|(p, s, bins)| run_cell(&points[p], src, routing, p, s, bins))
        .collect::<Result<_>>()?;

    let mut per_point = vec![CoincidenceCounts::default(); points.len()];
    for (k, c) in results.iter().enumerate() {
        per_point[k / partition.len()].merge(c);
    }
    let normalization = match mode {
        NormalizationMode::Analytic => Normalization::Analytic,
        NormalizationMode::Measured => Normalization::measured_from(&per_point),
    };
    let mut out = Vec::with_capacity(points.len());
    for (settings, counts) in points.iter().zip(per_point) {
        debug_assert!(counts.is_consistent());
        let estimates = [
            estimate_correlation(&counts, CrossPair::AD, &normalization)?,
            estimate_correlation(&counts, CrossPair::BC, &normalization)?,
            estimate_correlation(&counts, CrossPair::AC, &normalization)?,
            estimate_correlation(&counts, CrossPair::BD, &normalization)?,
        ];
        out.push(ExperimentPoint {
            settings: *settings,
            singles_rates: counts.singles_rates(),
            counts,
            estimates,
        });
    }
    Ok(Experiment {
        source: *src,
        routing,
        partition: partition.iter().map(|r| r.end - r.start).collect(),
        normalization,
        points: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{general_cross_correlation, Detector};
    use std::f64::consts::{FRAC_PI_4, PI};

    #[test]
    fn empty_sweep_rejected() {
        let src = SourceParams::new(0.05, 1000, 0, 1).unwrap();
        assert_eq!(
            run_experiment(&[], &src, PairRouting::OnePerStation, NormalizationMode::Analytic),
            Err(Error::EmptySweep)
        );
    }

    #[test]
    fn identical_seed_identical_result() {
        let pts = [JointSettings::synchronized(0.3, FRAC_PI_4), JointSettings::synchronized(2.0, FRAC_PI_4)];
        let src = SourceParams::new(0.1, 200_000, 9, 3).unwrap();
        let a = run_experiment(&pts, &src, PairRouting::OnePerStation, NormalizationMode::Analytic).unwrap();
        let b = run_experiment(&pts, &src, PairRouting::OnePerStation, NormalizationMode::Analytic).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.partition, vec![66_667, 66_667, 66_666]);
        assert_eq!(a.points[0].counts.bins.bins, 200_000);
    }

    #[test]
    fn simulate_point_matches_experiment_cell() {
        let s = JointSettings::synchronized(1.0, FRAC_PI_4);
        let src = SourceParams::new(0.1, 100_000, 5, 2).unwrap();
        let direct = simulate_point(&s, &src, PairRouting::OnePerStation, 0).unwrap();
        let exp = run_experiment(&[s], &src, PairRouting::OnePerStation, NormalizationMode::Analytic).unwrap();
        assert_eq!(direct, exp.points[0].counts);
        assert!(direct.is_consistent());
    }

    #[test]
    fn cross_peak_estimate_agrees_with_product_form() {
        let s = JointSettings::new(PI, 0.0, FRAC_PI_4, FRAC_PI_4);
        let src = SourceParams::new(0.2, 2_000_000, 11, 1).unwrap();
        let exp = run_experiment(&[s], &src, PairRouting::OnePerStation, NormalizationMode::Analytic).unwrap();
        let e = exp.points[0].estimate(CrossPair::AD);
        let expected = general_cross_correlation(&s, CrossPair::AD);
        assert!((expected - 4.0).abs() < 1e-12);
        assert!((e.value - expected).abs() < 5.0 * e.std_error, "{e:?}");
    }

    #[test]
    fn zero_phase_has_no_ad_coincidences() {
        let s = JointSettings::synchronized(0.0, FRAC_PI_4);
        let src = SourceParams::new(0.2, 500_000, 2, 1).unwrap();
        let exp = run_experiment(&[s], &src, PairRouting::OnePerStation, NormalizationMode::Analytic).unwrap();
        let p = &exp.points[0];
        assert_eq!(p.counts.coincidences(CrossPair::AD), 0);
        assert!(p.estimate(CrossPair::AD).zero_coincidences);
        assert_eq!(p.counts.singles(Detector::A), 0);
    }

    #[test]
    fn measured_normalization_over_full_phase_sweep() {
        let pts: Vec<_> = (0..8).map(|k| JointSettings::synchronized(k as f64 * PI / 4.0, FRAC_PI_4)).collect();
        let src = SourceParams::new(0.2, 400_000, 4, 2).unwrap();
        let exp = run_experiment(&pts, &src, PairRouting::OnePerStation, NormalizationMode::Measured).unwrap();
        match exp.normalization {
            Normalization::Measured(r) => {
                for rate in r {
                    assert!((rate - 0.25).abs() < 0.01, "{r:?}");
                }
            }
            _ => panic!("expected measured normalization"),
        }
    }

    #[test]
    fn binomial_routing_runs() {
        let s = JointSettings::synchronized(1.0, FRAC_PI_4);
        let src = SourceParams::new(0.2, 200_000, 8, 1).unwrap();
        let exp = run_experiment(&[s], &src, PairRouting::Binomial, NormalizationMode::Analytic).unwrap();
        let c = &exp.points[0].counts;
        assert_eq!(c.post_selected_pairs + c.bins.misrouted, c.bins.two_photon);
    }
}
