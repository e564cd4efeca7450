use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};

/// Attenuated-laser source and run size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceParams {
    /// Mean photon number μ per time bin.
    pub mean_photon_number: f64,
    /// Time bins simulated per sweep point.
    pub time_bins: u64,
    pub seed: u64,
    /// Independent RNG streams the time bins are partitioned over.
    pub streams: usize,
}

impl SourceParams {
    /// Above this μ the two-photon post-selection is no longer dominated by
    /// genuine pairs; runs still proceed but a warning is logged.
    pub const LOW_FLUX_LIMIT: f64 = 0.5;

    pub fn new(mean_photon_number: f64, time_bins: u64, seed: u64, streams: usize) -> Result<Self> {
        let src = Self {
            mean_photon_number,
            time_bins,
            seed,
            streams,
        };
        src.validate()?;
        Ok(src)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mean_photon_number > 0.0 && self.mean_photon_number.is_finite()) {
            return Err(Error::InvalidMeanPhotonNumber(self.mean_photon_number));
        }
        if self.time_bins == 0 {
            return Err(Error::ZeroTimeBins);
        }
        if self.streams == 0 {
            return Err(Error::ZeroStreams);
        }
        if self.mean_photon_number > Self::LOW_FLUX_LIMIT {
            log::warn!(
                "mean photon number {} exceeds the low-flux limit {}",
                self.mean_photon_number,
                Self::LOW_FLUX_LIMIT
            );
        }
        Ok(())
    }

    /// Poisson probability of exactly two photons in a bin, `e^{−μ} μ²/2`.
    pub fn pair_probability(&self) -> f64 {
        let mu = self.mean_photon_number;
        (-mu).exp() * mu * mu / 2.0
    }

    /// Contiguous bin ranges, one per stream. The first `time_bins % streams`
    /// streams take one extra bin.
    pub fn partition(&self) -> Vec<Range<u64>> {
        let k = self.streams as u64;
        let base = self.time_bins / k;
        let extra = self.time_bins % k;
        let mut start = 0;
        (0..k)
            .map(|s| {
                let len = base + u64::from(s < extra);
                let r = start..start + len;
                start += len;
                r
            })
            .collect()
    }

    /// Generator for one (sweep point, stream) cell: a single ChaCha8 key from
    /// `seed`, with the cell selecting the stream so cells never overlap.
    pub fn stream_rng(&self, point: usize, stream: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let id = (point as u64)
            .wrapping_mul(self.streams as u64)
            .wrapping_add(stream as u64);
        rng.set_stream(id);
        rng
    }
}

/// How the two photons of a post-selected bin reach the stations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairRouting {
    /// One photon to each station.
    #[default]
    OnePerStation,
    /// Each photon independently 50:50 to either station; bins with both
    /// photons on one side are discarded.
    Binomial,
}

impl PairRouting {
    pub fn name(self) -> &'static str {
        match self {
            PairRouting::OnePerStation => "one-per-station",
            PairRouting::Binomial => "binomial",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "one-per-station" => Some(PairRouting::OnePerStation),
            "binomial" => Some(PairRouting::Binomial),
            _ => None,
        }
    }
}

/// Photon-number bookkeeping over the simulated bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BinTally {
    pub bins: u64,
    pub vacuum: u64,
    pub single: u64,
    /// Bins with exactly two photons, before routing.
    pub two_photon: u64,
    /// Bins with three or more photons, discarded.
    pub multi: u64,
    /// Two-photon bins discarded because both photons went to one station.
    pub misrouted: u64,
}

impl BinTally {
    pub fn merge(&mut self, other: &BinTally) {
        self.bins += other.bins;
        self.vacuum += other.vacuum;
        self.single += other.single;
        self.two_photon += other.two_photon;
        self.multi += other.multi;
        self.misrouted += other.misrouted;
    }

    /// Observed fraction of bins holding exactly two photons.
    pub fn two_photon_fraction(&self) -> f64 {
        if self.bins == 0 {
            0.0
        } else {
            self.two_photon as f64 / self.bins as f64
        }
    }
}

/// A post-selected two-photon bin, one photon bound for each station.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairEvent {
    pub bin: u64,
}

/// Iterator over the post-selected pairs in a range of bins.
///
/// Every bin draws `n ~ Poisson(μ)`; only `n = 2` bins (that pass routing) are
/// yielded. The generator is exposed so the caller can keep drawing detection
/// outcomes from the same stream.
pub struct PairStream<R> {
    poisson: Poisson<f64>,
    routing: PairRouting,
    bins: Range<u64>,
    rng: R,
    tally: BinTally,
}

impl<R: Rng> PairStream<R> {
    pub fn new(mean_photon_number: f64, bins: Range<u64>, routing: PairRouting, rng: R) -> Result<Self> {
        let poisson = Poisson::new(mean_photon_number)
            .map_err(|_| Error::InvalidMeanPhotonNumber(mean_photon_number))?;
        Ok(Self {
            poisson,
            routing,
            bins,
            rng,
            tally: BinTally::default(),
        })
    }

    pub fn rng(&mut self) -> &mut R {
        &mut self.rng
    }

    pub fn tally(&self) -> &BinTally {
        &self.tally
    }

    /// Next pair, together with the generator for drawing its detection.
    pub fn next_pair(&mut self) -> Option<(PairEvent, &mut R)> {
        let event = self.next()?;
        Some((event, &mut self.rng))
    }
}

impl<R: Rng> Iterator for PairStream<R> {
    type Item = PairEvent;

    fn next(&mut self) -> Option<PairEvent> {
        for bin in self.bins.by_ref() {
            self.tally.bins += 1;
            let n = self.poisson.sample(&mut self.rng) as u64;
            match n {
                0 => self.tally.vacuum += 1,
                1 => self.tally.single += 1,
                2 => {
                    self.tally.two_photon += 1;
                    let split = match self.routing {
                        PairRouting::OnePerStation => true,
                        PairRouting::Binomial => {
                            self.rng.random::<bool>() != self.rng.random::<bool>()
                        }
                    };
                    if split {
                        return Some(PairEvent { bin });
                    }
                    self.tally.misrouted += 1;
                }
                _ => self.tally.multi += 1,
            }
        }
        None
    }
}

/// Post-selected pair streams for sweep point `point`, one per partition cell.
pub fn sample_post_selected_pairs(
    src: &SourceParams,
    routing: PairRouting,
    point: usize,
) -> Result<Vec<PairStream<ChaCha8Rng>>> {
    src.validate()?;
    src.partition()
        .into_iter()
        .enumerate()
        .map(|(s, bins)| PairStream::new(src.mean_photon_number, bins, routing, src.stream_rng(point, s)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_source() {
        assert_eq!(SourceParams::new(0.0, 10, 1, 1), Err(Error::InvalidMeanPhotonNumber(0.0)));
        assert_eq!(SourceParams::new(-0.1, 10, 1, 1), Err(Error::InvalidMeanPhotonNumber(-0.1)));
        assert!(SourceParams::new(f64::NAN, 10, 1, 1).is_err());
        assert_eq!(SourceParams::new(0.1, 0, 1, 1), Err(Error::ZeroTimeBins));
        assert_eq!(SourceParams::new(0.1, 10, 1, 0), Err(Error::ZeroStreams));
    }

    #[test]
    fn partition_covers_all_bins() {
        let src = SourceParams::new(0.1, 10, 0, 3).unwrap();
        let parts = src.partition();
        assert_eq!(parts, vec![0..4, 4..7, 7..10]);
    }

    #[test]
    fn pair_count_matches_poisson_mass() {
        // 10^6 bins at μ = 0.05: expected e^{-μ}μ²/2 · N ≈ 1189 pairs.
        let src = SourceParams::new(0.05, 1_000_000, 7, 1).unwrap();
        let mut streams = sample_post_selected_pairs(&src, PairRouting::OnePerStation, 0).unwrap();
        let n = streams[0].by_ref().count() as f64;
        let p = src.pair_probability();
        let expected = p * 1e6;
        assert!((expected - 1189.0).abs() < 1.0);
        let sigma = (1e6 * p * (1.0 - p)).sqrt();
        assert!((n - expected).abs() < 4.0 * sigma, "n={n} expected={expected}");
        let t = streams[0].tally();
        assert_eq!(t.bins, 1_000_000);
        assert_eq!(t.vacuum + t.single + t.two_photon + t.multi, t.bins);
    }

    #[test]
    fn small_mu_pair_rate_scales_as_half_mu_squared() {
        for mu in [1e-3, 1e-4] {
            let src = SourceParams::new(mu, 1, 0, 1).unwrap();
            assert!((src.pair_probability() / (mu * mu) - 0.5).abs() < mu);
        }
    }

    #[test]
    fn fixed_seed_replays_the_stream() {
        let src = SourceParams::new(0.2, 50_000, 42, 1).unwrap();
        let a: Vec<u64> = sample_post_selected_pairs(&src, PairRouting::OnePerStation, 0).unwrap()
            .remove(0)
            .map(|e| e.bin)
            .collect();
        let b: Vec<u64> = sample_post_selected_pairs(&src, PairRouting::OnePerStation, 0).unwrap()
            .remove(0)
            .map(|e| e.bin)
            .collect();
        assert!(!a.is_empty());
        assert_eq!(a, b);
        let other = SourceParams { seed: 43, ..src };
        let c: Vec<u64> = sample_post_selected_pairs(&other, PairRouting::OnePerStation, 0).unwrap()
            .remove(0)
            .map(|e| e.bin)
            .collect();
        assert_ne!(a, c);
    }

    #[test]
    fn binomial_routing_keeps_about_half() {
        let src = SourceParams::new(0.2, 200_000, 3, 1).unwrap();
        let mut s = sample_post_selected_pairs(&src, PairRouting::Binomial, 0).unwrap().remove(0);
        let kept = s.by_ref().count() as u64;
        let t = *s.tally();
        assert_eq!(kept + t.misrouted, t.two_photon);
        let frac = kept as f64 / t.two_photon as f64;
        let sigma = (0.25 / t.two_photon as f64).sqrt();
        assert!((frac - 0.5).abs() < 4.0 * sigma);
    }
}
