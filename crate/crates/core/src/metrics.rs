//! Throughput, packet loss and power-normalized efficiency.
//!
//! Normalized efficiency compares the capacity of a random access scheme
//! with that of a transmitter sending continuously at the same average
//! received power:
//!
//! ```text
//! eta = T * log(1 + snr / D) / log(1 + snr),    D = mean_degree * G
//! ```
//!
//! `D` is the ratio between the average transmitted power and the power of a
//! single burst. Bandwidth and the logarithm base cancel in the ratio.

use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("packet loss ratio {0} outside [0, 1]")]
    PlrOutOfRange(f64),
    #[error("offered load {0} must be >= 0")]
    NegativeLoad(f64),
    #[error("signal-to-noise ratio {0} must be > 0")]
    NonPositiveSnr(f64),
    #[error("mean degree {0} must be >= 1")]
    InvalidMeanDegree(f64),
    #[error("throughput {0} must be >= 0")]
    NegativeThroughput(f64),
    #[error("confidence level {0} must lie in (0, 1)")]
    InvalidConfidence(f64),
}

/// `T = G (1 - PLR)`, in decoded packets per slot.
pub fn throughput(g: f64, plr: f64) -> Result<f64, MetricsError> {
    if !(0.0..=1.0).contains(&plr) {
        return Err(MetricsError::PlrOutOfRange(plr));
    }
    if g.is_nan() || g < 0.0 {
        return Err(MetricsError::NegativeLoad(g));
    }
    Ok(g * (1.0 - plr))
}

pub fn snr_db_to_linear(snr_db: f64) -> f64 {
    10f64.powf(snr_db / 10.0)
}

/// Average-power penalty of replication, `D = mean_degree * G`.
pub fn power_ratio(g: f64, mean_degree: f64) -> f64 {
    mean_degree * g
}

/// Normalized efficiency of a scheme with throughput `t` at load `g`.
///
/// A load of zero carries no traffic and has efficiency 0.
pub fn normalized_efficiency(
    t: f64,
    g: f64,
    mean_degree: f64,
    snr_linear: f64,
) -> Result<f64, MetricsError> {
    if snr_linear.is_nan() || snr_linear <= 0.0 {
        return Err(MetricsError::NonPositiveSnr(snr_linear));
    }
    if mean_degree.is_nan() || mean_degree < 1.0 {
        return Err(MetricsError::InvalidMeanDegree(mean_degree));
    }
    if t.is_nan() || t < 0.0 {
        return Err(MetricsError::NegativeThroughput(t));
    }
    if g.is_nan() || g < 0.0 {
        return Err(MetricsError::NegativeLoad(g));
    }
    if g == 0.0 {
        return Ok(0.0);
    }
    let d = power_ratio(g, mean_degree);
    if d == 1.0 {
        return Ok(t);
    }
    Ok(t * (snr_linear / d).ln_1p() / snr_linear.ln_1p())
}

/// Two-sided standard normal quantile for a confidence level, e.g. 1.96 for 0.95.
pub fn z_score(confidence: f64) -> Result<f64, MetricsError> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(MetricsError::InvalidConfidence(confidence));
    }
    let std = Normal::standard();
    Ok(std.inverse_cdf(1.0 - (1.0 - confidence) / 2.0))
}

/// Wilson score interval for a binomial proportion `successes / trials`.
///
/// With no trials the interval is the whole `[0, 1]`.
pub fn wilson_interval(successes: u64, trials: u64, confidence: f64) -> Result<(f64, f64), MetricsError> {
    let z = z_score(confidence)?;
    if trials == 0 {
        return Ok((0.0, 1.0));
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let low = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let high = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    Ok((low, high))
}

/// Aggregated outcome of one simulated load point.
#[derive(Debug, Clone, PartialEq)]
pub struct RunStats {
    /// Offered load G in logical packets per slot.
    pub offered_load: f64,
    pub packets_sent: u64,
    pub packets_decoded: u64,
    pub packets_lost: u64,
    pub measured_slots: u64,
    /// Mean slots between readiness and decoding, over decoded packets.
    pub mean_delay_slots: f64,
    pub plr: f64,
    pub plr_ci: (f64, f64),
    pub throughput: f64,
}

impl RunStats {
    /// Builds the statistics from raw counts. `delay_sum` is the total delay
    /// over all decoded packets.
    pub fn from_counts(
        offered_load: f64,
        packets_sent: u64,
        packets_decoded: u64,
        packets_lost: u64,
        measured_slots: u64,
        delay_sum: u64,
        confidence: f64,
    ) -> Result<Self, MetricsError> {
        let plr = if packets_sent == 0 { 0.0 } else { packets_lost as f64 / packets_sent as f64 };
        let plr_ci = if packets_sent == 0 {
            (0.0, 0.0)
        } else {
            wilson_interval(packets_lost, packets_sent, confidence)?
        };
        let mean_delay_slots =
            if packets_decoded == 0 { 0.0 } else { delay_sum as f64 / packets_decoded as f64 };
        Ok(Self {
            offered_load,
            packets_sent,
            packets_decoded,
            packets_lost,
            measured_slots,
            mean_delay_slots,
            plr,
            plr_ci,
            throughput: throughput(offered_load, plr)?,
        })
    }

    /// Throughput interval implied by the PLR interval.
    pub fn throughput_ci(&self) -> (f64, f64) {
        (self.offered_load * (1.0 - self.plr_ci.1), self.offered_load * (1.0 - self.plr_ci.0))
    }
}

/// Normalized efficiency of one load point at one SNR.
#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyPoint {
    pub offered_load: f64,
    pub scheme: String,
    pub distribution: String,
    pub snr_db: f64,
    pub snr_linear: f64,
    pub power_ratio: f64,
    pub eta: f64,
}

impl EfficiencyPoint {
    pub fn new(
        stats: &RunStats,
        scheme: impl Into<String>,
        distribution: impl Into<String>,
        mean_degree: f64,
        snr_db: f64,
    ) -> Result<Self, MetricsError> {
        let snr_linear = snr_db_to_linear(snr_db);
        let g = stats.offered_load;
        Ok(Self {
            offered_load: g,
            scheme: scheme.into(),
            distribution: distribution.into(),
            snr_db,
            snr_linear,
            power_ratio: power_ratio(g, mean_degree),
            eta: normalized_efficiency(stats.throughput, g, mean_degree, snr_linear)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn throughput_examples() {
        assert_eq!(throughput(0.5, 0.0), Ok(0.5));
        assert_eq!(throughput(0.8, 1.0), Ok(0.0));
        let e = (-1f64).exp();
        assert!((throughput(1.0, 1.0 - e).unwrap() - 0.367_879).abs() < 1e-6);
        assert!(throughput(1.0, 1.1).is_err());
        assert!(throughput(1.0, -0.1).is_err());
        assert!(throughput(-1.0, 0.1).is_err());
    }

    #[test]
    fn efficiency_examples() {
        for snr in [0.1, 1.0, 3.98, 63.0] {
            assert_eq!(normalized_efficiency(0.47, 0.5, 2.0, snr), Ok(0.47));
            assert_eq!(normalized_efficiency(0.0, 0.7, 3.0, snr), Ok(0.0));
        }
        let eta = normalized_efficiency(0.5, 1.0, 2.0, 1.0).unwrap();
        let expected = 0.5 * 1.5f64.ln() / 2f64.ln();
        assert!((eta - expected).abs() < 1e-15);
        assert!((eta - 0.2925).abs() < 1e-4);
        assert_eq!(normalized_efficiency(0.0, 0.0, 2.0, 1.0), Ok(0.0));
        assert!(normalized_efficiency(0.5, 1.0, 2.0, 0.0).is_err());
        assert!(normalized_efficiency(0.5, 1.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn efficiency_is_base_invariant() {
        for &(t, g, l, snr) in &[(0.3f64, 0.4f64, 1.0f64, 1.0f64), (0.55, 0.6, 2.0, 3.98), (0.8, 0.9, 3.6, 63.1)] {
            let d = l * g;
            let base2 = t * (1.0 + snr / d).log2() / (1.0 + snr).log2();
            let base10 = t * (1.0 + snr / d).log10() / (1.0 + snr).log10();
            let eta = normalized_efficiency(t, g, l, snr).unwrap();
            assert!((eta - base2).abs() <= 1e-12 * eta);
            assert!((eta - base10).abs() <= 1e-12 * eta);
        }
    }

    #[test]
    fn efficiency_decreases_with_replication() {
        let mut prev = f64::INFINITY;
        for k in 0..40 {
            let l = 1.0 + 0.25 * f64::from(k);
            let eta = normalized_efficiency(0.4, 0.5, l, 3.98).unwrap();
            assert!(eta < prev);
            prev = eta;
        }
    }

    #[test]
    fn snr_conversion() {
        assert_eq!(snr_db_to_linear(0.0), 1.0);
        assert_eq!(snr_db_to_linear(10.0), 10.0);
        assert!((snr_db_to_linear(6.0) - 3.981_071_7).abs() < 1e-6);
    }

    #[test]
    fn wilson_examples() {
        assert_eq!(wilson_interval(0, 100, 0.95).unwrap().0, 0.0);
        assert_eq!(wilson_interval(100, 100, 0.95).unwrap().1, 1.0);
        let (lo, hi) = wilson_interval(50, 100, 0.95).unwrap();
        assert!((lo - 0.4038).abs() < 5e-4, "{lo}");
        assert!((hi - 0.5962).abs() < 5e-4, "{hi}");
        assert!(wilson_interval(1, 10, 1.0).is_err());
        assert!((z_score(0.95).unwrap() - 1.959_964).abs() < 1e-5);
    }

    #[test]
    fn run_stats_invariants() {
        let s = RunStats::from_counts(0.5, 1000, 990, 10, 2000, 5000, 0.95).unwrap();
        assert_eq!(s.plr, 0.01);
        assert_eq!(s.throughput, 0.5 * 0.99);
        assert_eq!(s.mean_delay_slots, 5000.0 / 990.0);
        let (lo, hi) = s.throughput_ci();
        assert!(lo < s.throughput && s.throughput < hi);

        let idle = RunStats::from_counts(0.0, 0, 0, 0, 2000, 0, 0.95).unwrap();
        assert_eq!((idle.plr, idle.throughput), (0.0, 0.0));
    }

    #[test]
    fn sa_power_ratio_equals_load() {
        assert_eq!(power_ratio(0.7, 1.0), 0.7);
    }
}
