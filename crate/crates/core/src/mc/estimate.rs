use crate::analytic::{CrossPair, Detector};
use crate::error::{Error, Result};
use crate::mc::detect::PairOutcome;
use crate::mc::source::BinTally;

/// Tallies for one sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CoincidenceCounts {
    pub post_selected_pairs: u64,
    /// Indexed by [`Detector::index`].
    pub singles: [u64; 4],
    /// Indexed by [`CrossPair::index`].
    pub coincidences: [u64; 4],
    pub alice_losses: u64,
    pub bob_losses: u64,
    pub bins: BinTally,
}

impl CoincidenceCounts {
    pub fn record(&mut self, outcome: PairOutcome) {
        self.post_selected_pairs += 1;
        match outcome.alice {
            Some(d) => self.singles[d.index()] += 1,
            None => self.alice_losses += 1,
        }
        match outcome.bob {
            Some(d) => self.singles[d.index()] += 1,
            None => self.bob_losses += 1,
        }
        if let (Some(a), Some(b)) = (outcome.alice, outcome.bob) {
            let pair = CrossPair::from_detectors(a, b).expect("alice and bob detectors are on opposite stations");
            self.coincidences[pair.index()] += 1;
        }
    }

    pub fn merge(&mut self, other: &CoincidenceCounts) {
        self.post_selected_pairs += other.post_selected_pairs;
        for k in 0..4 {
            self.singles[k] += other.singles[k];
            self.coincidences[k] += other.coincidences[k];
        }
        self.alice_losses += other.alice_losses;
        self.bob_losses += other.bob_losses;
        self.bins.merge(&other.bins);
    }

    pub fn loss_events(&self) -> u64 {
        self.alice_losses + self.bob_losses
    }

    pub fn singles(&self, detector: Detector) -> u64 {
        self.singles[detector.index()]
    }

    pub fn coincidences(&self, pair: CrossPair) -> u64 {
        self.coincidences[pair.index()]
    }

    /// Singles per post-selected pair.
    pub fn singles_rate(&self, detector: Detector) -> f64 {
        if self.post_selected_pairs == 0 {
            0.0
        } else {
            self.singles(detector) as f64 / self.post_selected_pairs as f64
        }
    }

    pub fn singles_rates(&self) -> [f64; 4] {
        Detector::ALL.map(|d| self.singles_rate(d))
    }

    /// Bookkeeping identities: each station accounts for every pair, and the
    /// coincidences are bounded by the singles they involve.
    pub fn is_consistent(&self) -> bool {
        let n = self.post_selected_pairs;
        let alice = self.singles[0] + self.singles[1] + self.alice_losses == n;
        let bob = self.singles[2] + self.singles[3] + self.bob_losses == n;
        let per_detector = Detector::ALL.iter().all(|&d| {
            let involved: u64 = CrossPair::ALL
                .iter()
                .filter(|p| {
                    let (i, j) = p.detectors();
                    i == d || j == d
                })
                .map(|&p| self.coincidences(p))
                .sum();
            involved <= self.singles(d)
        });
        alice && bob && per_detector
    }
}

/// Per-detector marginals used to normalize a coincidence rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Normalization {
    /// Phase-averaged marginal 1/4 for every detector.
    Analytic,
    /// Measured singles rates per detector (indexed by [`Detector::index`]),
    /// averaged over a full phase sweep.
    Measured([f64; 4]),
}

impl Normalization {
    pub const ANALYTIC_MARGINAL: f64 = 0.25;

    pub fn marginal(&self, detector: Detector) -> f64 {
        match self {
            Normalization::Analytic => Self::ANALYTIC_MARGINAL,
            Normalization::Measured(rates) => rates[detector.index()],
        }
    }

    /// Averages singles rates over the points of a sweep.
    pub fn measured_from(points: &[CoincidenceCounts]) -> Self {
        let mut mean = [0.0; 4];
        if points.is_empty() {
            return Normalization::Measured(mean);
        }
        for c in points {
            for (m, r) in mean.iter_mut().zip(c.singles_rates()) {
                *m += r;
            }
        }
        for m in &mut mean {
            *m /= points.len() as f64;
        }
        Normalization::Measured(mean)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatedCorrelation {
    pub value: f64,
    pub std_error: f64,
    /// Pairs contributing to the estimate.
    pub n_effective: u64,
    /// Set when no coincidences were seen; `std_error` is then zero and the
    /// binomial error bar carries no information.
    pub zero_coincidences: bool,
}

/// `R̂_ij = p̂_ij / (p̄_i p̄_j)` with `p̂_ij` the coincidence fraction of the
/// post-selected pairs. The standard error is the binomial error on `p̂_ij`
/// scaled by the same constant; covariance with measured marginals is ignored.
pub fn estimate_correlation(
    counts: &CoincidenceCounts,
    pair: CrossPair,
    normalization: &Normalization,
) -> Result<EstimatedCorrelation> {
    let n = counts.post_selected_pairs;
    if n == 0 {
        return Err(Error::NoPostSelectedPairs);
    }
    let (i, j) = pair.detectors();
    let (pi, pj) = (normalization.marginal(i), normalization.marginal(j));
    if pi <= 0.0 {
        return Err(Error::ZeroMarginal(i.label()));
    }
    if pj <= 0.0 {
        return Err(Error::ZeroMarginal(j.label()));
    }
    let k = counts.coincidences(pair);
    let nf = n as f64;
    let p = k as f64 / nf;
    let scale = 1.0 / (pi * pj);
    Ok(EstimatedCorrelation {
        value: p * scale,
        std_error: (p * (1.0 - p) / nf).sqrt() * scale,
        n_effective: n,
        zero_coincidences: k == 0,
    })
}
