//! Invariant verification across all layers, reported as one line per check.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analytic::{
    detector_intensities, general_cross_correlation, intensities_from_amplitudes, local_basis_sum,
    CrossPair, Detector,
};
use crate::mc::{run_experiment, sample_post_selected_pairs, NormalizationMode, PairRouting};
use crate::optics::{beam_splitter_mix, half_wave_plate, pbs_split, polarizer_project};
use crate::station::{closed_form_station, composed_station, match_up_to_global_phase};
use crate::tolerance::{ALGEBRAIC, MC_SIGMA, RATE_SIGMA};
use crate::{ElementConventions, JointSettings, JonesVector, SourceParams, StationParams};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    /// Largest deviation observed; for statistical checks, in standard errors.
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    fn new(name: &str, max_deviation: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            max_deviation,
            tolerance,
            passed: max_deviation <= tolerance,
        }
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:<44} max deviation {:.3e} (tolerance {:.1e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.max_deviation,
            self.tolerance
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        write!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Element conventions used by the composed station; replacing them is a
    /// negative control for the composed-vs-closed-form check.
    pub conventions: ElementConventions,
    pub draws: usize,
    pub seed: u64,
    /// Source for the Monte Carlo checks; `None` skips them.
    pub source: Option<SourceParams>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            conventions: ElementConventions::standard(),
            draws: 1000,
            seed: 1,
            source: Some(SourceParams {
                mean_photon_number: 0.05,
                time_bins: 90_000_000,
                seed: 1,
                streams: 4,
            }),
        }
    }
}

fn max_abs(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().map(f64::abs).fold(0.0, f64::max)
}

fn random_settings(rng: &mut ChaCha8Rng) -> JointSettings {
    JointSettings::new(
        rng.random_range(-2.0 * PI..2.0 * PI),
        rng.random_range(-2.0 * PI..2.0 * PI),
        rng.random_range(-PI..PI),
        rng.random_range(-PI..PI),
    )
    .with_i0(rng.random_range(0.0..4.0))
}

fn random_jones(rng: &mut ChaCha8Rng) -> JonesVector {
    let mut c = || Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    JonesVector::new(c(), c())
}

fn random_station(rng: &mut ChaCha8Rng) -> StationParams {
    StationParams::new(rng.random_range(-2.0 * PI..2.0 * PI), rng.random_range(-PI..PI))
        .with_global_phase(rng.random_range(-PI..PI))
        .with_input(Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// Exact identities of the optics, station and analytic layers.
pub fn algebraic_checks(opts: &VerifyOptions) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let n = opts.draws;
    let conv = opts.conventions;
    let mut checks = Vec::new();

    let mut bs = 0.0f64;
    let mut pbs = 0.0f64;
    let mut hwp = 0.0f64;
    let mut pol = 0.0f64;
    let mut malus = 0.0f64;
    for _ in 0..n {
        let j = random_jones(&mut rng);
        let (u, l) = beam_splitter_mix(j.h, j.v, &conv);
        bs = bs.max((u.norm_sqr() + l.norm_sqr() - j.intensity()).abs());
        let (h, v) = pbs_split(&j, &conv);
        pbs = pbs.max((h.norm_sqr() + v.norm_sqr() - j.intensity()).abs());
        let alpha = rng.random_range(-PI..PI);
        let once = half_wave_plate(&j, alpha);
        let twice = half_wave_plate(&once, alpha);
        hwp = hwp
            .max((once.intensity() - j.intensity()).abs())
            .max((twice.h - j.h).norm())
            .max((twice.v - j.v).norm());
        let zeta = rng.random_range(-PI..PI);
        pol = pol.max(polarizer_project(&j, zeta).norm_sqr() - j.intensity());
        malus = malus.max((polarizer_project(&JonesVector::horizontal(), zeta).norm_sqr() - zeta.cos().powi(2)).abs());
    }
    checks.push(CheckResult::new("beam splitter unitarity", bs, ALGEBRAIC));
    checks.push(CheckResult::new("PBS losslessness", pbs, ALGEBRAIC));
    checks.push(CheckResult::new("HWP intensity and involution", hwp, ALGEBRAIC));
    checks.push(CheckResult::new("polarizer contraction", pol.max(0.0), ALGEBRAIC));
    checks.push(CheckResult::new("Malus law for H input", malus, ALGEBRAIC));
    checks.push(CheckResult::new(
        "element phases have unit magnitude",
        conv.unit_magnitude_error(),
        ALGEBRAIC,
    ));

    let mut oracle = 0.0f64;
    let mut energy = 0.0f64;
    let mut half = 0.0f64;
    let mut eta_dev = 0.0f64;
    for _ in 0..n {
        let p = random_station(&mut rng);
        let closed = closed_form_station(&p);
        let composed = composed_station(&p, &conv);
        oracle = oracle.max(match_up_to_global_phase(&closed, &composed).max_error);
        let e0 = p.input_amplitude.norm_sqr();
        energy = energy
            .max((closed.interferometer_intensity() - e0).abs())
            .max((composed.interferometer_intensity() - e0).abs());
        half = half.max((closed.intensity_minus() + closed.intensity_plus() - e0 / 2.0).abs());
        let reference = closed_form_station(&p.with_global_phase(0.0)).intensities();
        for eta in [PI / 3.0, PI] {
            let shifted = closed_form_station(&p.with_global_phase(eta)).intensities();
            eta_dev = eta_dev.max(max_abs(reference.iter().zip(shifted).map(|(a, b)| a - b)));
        }
    }
    checks.push(CheckResult::new("composed station equals closed form", oracle, ALGEBRAIC));
    checks.push(CheckResult::new("interferometer energy conservation", energy, ALGEBRAIC));
    checks.push(CheckResult::new("polarizers pass half the power", half, ALGEBRAIC));
    checks.push(CheckResult::new("global phase insensitivity", eta_dev, ALGEBRAIC));

    let mut consistency = 0.0f64;
    let mut sums = 0.0f64;
    let mut product = 0.0f64;
    let mut period = 0.0f64;
    for _ in 0..n {
        let s = random_settings(&mut rng);
        let direct = detector_intensities(&s).expect("non-negative i0");
        let eta = rng.random_range(-PI..PI);
        let amps = intensities_from_amplitudes(&s, eta).expect("non-negative i0");
        consistency = consistency.max(max_abs(Detector::ALL.map(|d| direct.get(d) - amps.get(d))));
        sums = sums
            .max((direct.a + direct.b - s.i0 / 2.0).abs())
            .max((direct.c + direct.d - s.i0 / 2.0).abs());
        let shifted = JointSettings { xi: s.xi + PI, theta: s.theta - PI, ..s };
        for pair in CrossPair::ALL {
            let (i, j) = pair.detectors();
            let r = general_cross_correlation(&s, pair);
            product = product.max((r * s.i0 * s.i0 / 16.0 - direct.get(i) * direct.get(j)).abs());
            period = period.max((r - general_cross_correlation(&shifted, pair)).abs());
        }
    }
    checks.push(CheckResult::new("intensities equal squared amplitudes", consistency, ALGEBRAIC));
    checks.push(CheckResult::new("station intensities sum to i0/2", sums, ALGEBRAIC));
    checks.push(CheckResult::new("R_ij i0^2/16 equals I_i I_j", product, ALGEBRAIC));
    checks.push(CheckResult::new("polarizer angle period pi", period, ALGEBRAIC));

    let mut sync = 0.0f64;
    let mut basis = 0.0f64;
    let mut ad_bc = 0.0f64;
    let mut flat = 0.0f64;
    for k in 0..=200 {
        let rho = 2.0 * PI * k as f64 / 200.0;
        let plus = JointSettings::synchronized(rho, FRAC_PI_4);
        let minus = JointSettings::synchronized(rho, -FRAC_PI_4);
        let r = general_cross_correlation(&plus, CrossPair::AD);
        sync = sync.max((r - rho.sin().powi(2)).abs());
        basis = basis.max((r - general_cross_correlation(&minus, CrossPair::AD)).abs());
        ad_bc = ad_bc.max((r - general_cross_correlation(&plus, CrossPair::BC)).abs());
        for d in Detector::ALL {
            flat = flat.max((local_basis_sum(rho, d, 1.0).expect("i0 = 1") - 0.5).abs());
        }
    }
    checks.push(CheckResult::new("synchronized R_AD equals sin^2 rho", sync, ALGEBRAIC));
    checks.push(CheckResult::new("R_AD independent of zeta sign", basis, ALGEBRAIC));
    checks.push(CheckResult::new("synchronized R_AD equals R_BC", ad_bc, ALGEBRAIC));
    checks.push(CheckResult::new("local basis sum is flat", flat, ALGEBRAIC));
    checks
}

/// Statistical checks against the analytic values, reported in standard errors.
pub fn monte_carlo_checks(src: &SourceParams) -> crate::Result<Vec<CheckResult>> {
    let points: Vec<JointSettings> = (0..8)
        .map(|k| JointSettings::synchronized(k as f64 * PI / 4.0, FRAC_PI_4))
        .collect();
    let exp = run_experiment(&points, src, PairRouting::OnePerStation, NormalizationMode::Analytic)?;
    let mut corr = 0.0f64;
    let mut singles = 0.0f64;
    for p in &exp.points {
        let e = p.estimate(CrossPair::AD);
        let expected = general_cross_correlation(&p.settings, CrossPair::AD);
        corr = corr.max(sigmas(e.value - expected, e.std_error));
        let n = p.counts.post_selected_pairs as f64;
        for d in Detector::ALL {
            let expected = detector_intensities(&p.settings)?.get(d);
            let sigma = (expected * (1.0 - expected) / n).sqrt();
            singles = singles.max(sigmas(p.singles_rates[d.index()] - expected, sigma));
        }
    }

    let mut post = 0.0f64;
    for mu in [0.01, 0.05, 0.2] {
        let s = SourceParams { mean_photon_number: mu, time_bins: 4_000_000, ..*src };
        let mut streams = sample_post_selected_pairs(&s, PairRouting::OnePerStation, 0)?;
        let mut two = 0u64;
        let mut bins = 0u64;
        for st in &mut streams {
            st.by_ref().for_each(drop);
            two += st.tally().two_photon;
            bins += st.tally().bins;
        }
        let p = s.pair_probability();
        let frac = two as f64 / bins as f64;
        post = post.max(sigmas(frac - p, (p * (1.0 - p) / bins as f64).sqrt()));
    }
    Ok(vec![
        CheckResult::new("MC R_AD within 5 sigma at 8 phase points", corr, MC_SIGMA),
        CheckResult::new("MC singles within 4 sigma", singles, RATE_SIGMA),
        CheckResult::new("two-photon fraction within 4 sigma", post, RATE_SIGMA),
    ])
}

/// Deviation in units of `sigma`. A deviation at the level of rounding error
/// counts as zero so exactly-dark settings (zero counts, zero error) pass.
pub fn sigmas(deviation: f64, sigma: f64) -> f64 {
    if deviation.abs() <= ALGEBRAIC {
        0.0
    } else if sigma > 0.0 {
        deviation.abs() / sigma
    } else {
        f64::INFINITY
    }
}

pub fn verify(opts: &VerifyOptions) -> crate::Result<Report> {
    let mut checks = algebraic_checks(opts);
    if let Some(src) = &opts.source {
        checks.extend(monte_carlo_checks(src)?);
    }
    Ok(Report { checks })
}
