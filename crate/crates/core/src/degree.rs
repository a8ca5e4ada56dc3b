//! Burst degree distributions `Λ(x) = Σ Λ_l x^l`.
//!
//! A distribution gives, for every degree `l`, the probability that a packet
//! is sent as `l` replicas. Distributions are validated once at construction
//! and are immutable afterwards, so they can be shared freely between sweep
//! workers and sampled in the hot loop without further checks.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Probabilities must sum to one within this tolerance.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Name of the shipped variable-degree preset with maximum degree 8.
pub const IRSA8_PRESET: &str = "irsa8";

/// Coefficients of the `irsa8` preset, `0.5x^2 + 0.28x^3 + 0.22x^8`.
///
/// These come from the irregular repetition slotted Aloha literature and are
/// a stand-in: the only published facts used here are the maximum degree
/// of 8 and the asymptotic peak throughput of about 0.938.
pub const IRSA8_TERMS: [(u32, f64); 3] = [(2, 0.5), (3, 0.28), (8, 0.22)];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistributionError {
    #[error("invalid burst degree {0}: degrees must be at least 1")]
    InvalidDegree(u32),
    #[error("probability {probability} for degree {degree} is not in (0, 1]")]
    InvalidProbability { degree: u32, probability: f64 },
    #[error("degree {0} appears more than once")]
    DuplicateDegree(u32),
    #[error("probabilities sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("distribution has no terms")]
    Empty,
    #[error("cannot parse distribution {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

/// A validated burst degree distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    /// `(degree, probability)` pairs, degrees strictly ascending.
    terms: Vec<(u32, f64)>,
    /// Running sums of the probabilities, same order as `terms`.
    cdf: Vec<f64>,
    name: Option<&'static str>,
}

impl DegreeDistribution {
    /// Builds a distribution from `(degree, probability)` pairs in any order.
    pub fn new(terms: impl IntoIterator<Item = (u32, f64)>) -> Result<Self, DistributionError> {
        let mut terms: Vec<(u32, f64)> = terms.into_iter().collect();
        if terms.is_empty() {
            return Err(DistributionError::Empty);
        }
        for &(degree, probability) in &terms {
            if degree == 0 {
                return Err(DistributionError::InvalidDegree(degree));
            }
            if !(probability > 0.0 && probability <= 1.0) {
                return Err(DistributionError::InvalidProbability { degree, probability });
            }
        }
        terms.sort_by_key(|&(degree, _)| degree);
        if let Some(w) = terms.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(DistributionError::DuplicateDegree(w[0].0));
        }
        let total: f64 = terms.iter().map(|&(_, p)| p).sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(DistributionError::NotNormalized(total));
        }
        let cdf = terms
            .iter()
            .scan(0.0, |acc, &(_, p)| {
                *acc += p;
                Some(*acc)
            })
            .collect();
        Ok(Self { terms, cdf, name: None })
    }

    /// Every packet is sent with exactly `degree` replicas, `Λ(x) = x^degree`.
    pub fn regular(degree: u32) -> Result<Self, DistributionError> {
        Self::new([(degree, 1.0)])
    }

    /// The `irsa8` preset, see [`IRSA8_TERMS`].
    pub fn irsa8() -> Self {
        let mut d = Self::new(IRSA8_TERMS).expect("preset is valid");
        d.name = Some(IRSA8_PRESET);
        d
    }

    pub fn terms(&self) -> &[(u32, f64)] {
        &self.terms
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.last().map(|&(l, _)| l).unwrap_or(1)
    }

    /// `Λ'(1) = Σ l·Λ_l`, the average number of replicas per packet.
    pub fn mean_degree(&self) -> f64 {
        self.terms.iter().map(|&(l, p)| f64::from(l) * p).sum()
    }

    /// Inverse-CDF sampling over ascending degrees.
    ///
    /// Bins are half-open `[lo, hi)`, so a `u` sitting exactly on a boundary
    /// selects the higher degree.
    pub fn sample(&self, u: f64) -> u32 {
        let idx = self.cdf.partition_point(|&c| c <= u);
        // `u` close to 1 may exceed a cdf that sums to 1 - 1e-12.
        self.terms[idx.min(self.terms.len() - 1)].0
    }

    /// Stable identifier used in CSV output and seed derivation.
    pub fn id(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for DegreeDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(name) = self.name {
            return f.write_str(name);
        }
        for (i, &(l, p)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            if p != 1.0 {
                write!(f, "{p}")?;
            }
            match l {
                1 => f.write_str("x")?,
                _ => write!(f, "x^{l}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for DegreeDistribution {
    type Err = DistributionError;

    /// Parses `x^2`, `x`, `0.5x^2+0.28x^3+0.22x^8` (an optional `*` may sit
    /// between coefficient and `x`) or the preset name `irsa8`. Whitespace is
    /// ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let parse_err = |reason: &str| DistributionError::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        if compact.eq_ignore_ascii_case(IRSA8_PRESET) {
            return Ok(Self::irsa8());
        }
        if compact.is_empty() {
            return Err(parse_err("empty input"));
        }
        let mut terms = Vec::new();
        for term in compact.split('+') {
            let Some(x_pos) = term.find(['x', 'X']) else {
                return Err(parse_err("each term needs an `x`"));
            };
            let coef = term[..x_pos].trim_end_matches('*');
            let probability = if coef.is_empty() {
                1.0
            } else {
                coef.parse::<f64>()
                    .map_err(|_| parse_err(&format!("bad coefficient {coef:?}")))?
            };
            let rest = &term[x_pos + 1..];
            let degree = if rest.is_empty() {
                1
            } else if let Some(exp) = rest.strip_prefix('^') {
                exp.parse::<u32>()
                    .map_err(|_| parse_err(&format!("bad exponent {exp:?}")))?
            } else {
                return Err(parse_err(&format!("unexpected {rest:?} after x")));
            };
            terms.push((degree, probability));
        }
        Self::new(terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_distributions() {
        assert_eq!(DegreeDistribution::regular(2).unwrap().terms(), &[(2, 1.0)]);
        assert_eq!(DegreeDistribution::regular(1).unwrap().terms(), &[(1, 1.0)]);
        assert_eq!(DegreeDistribution::regular(3).unwrap().terms(), &[(3, 1.0)]);
        assert_eq!(
            DegreeDistribution::regular(0),
            Err(DistributionError::InvalidDegree(0))
        );
    }

    #[test]
    fn mean_degree_examples() {
        assert_eq!(DegreeDistribution::regular(2).unwrap().mean_degree(), 2.0);
        assert_eq!(DegreeDistribution::regular(1).unwrap().mean_degree(), 1.0);
        // 2*0.5 + 3*0.28 + 8*0.22 = 1.0 + 0.84 + 1.76
        assert!((DegreeDistribution::irsa8().mean_degree() - 3.6).abs() < 1e-12);
        for l in 1..=16 {
            assert_eq!(DegreeDistribution::regular(l).unwrap().mean_degree(), f64::from(l));
        }
    }

    #[test]
    fn inverse_cdf_sampling() {
        let x2 = DegreeDistribution::regular(2).unwrap();
        for u in [0.0, 0.3, 0.999_999] {
            assert_eq!(x2.sample(u), 2);
        }
        let half = DegreeDistribution::new([(2, 0.5), (3, 0.5)]).unwrap();
        assert_eq!(half.sample(0.25), 2);
        assert_eq!(half.sample(0.5), 3, "boundary belongs to the higher bin");
        let irsa = DegreeDistribution::irsa8();
        // cdf boundaries 0.5, 0.78, 1.0
        assert_eq!(irsa.sample(0.9), 8);
        assert_eq!(irsa.sample(0.6), 3);
        assert_eq!(irsa.sample(0.1), 2);
        assert_eq!(irsa.sample(0.9), irsa.sample(0.9));
    }

    #[test]
    fn rejects_invalid_terms() {
        assert!(matches!(
            DegreeDistribution::new([(2, 0.5), (3, 0.4)]),
            Err(DistributionError::NotNormalized(_))
        ));
        assert!(matches!(
            DegreeDistribution::new([(2, 1.0), (3, 0.0)]),
            Err(DistributionError::InvalidProbability { degree: 3, .. })
        ));
        assert_eq!(
            DegreeDistribution::new([(2, 0.5), (2, 0.5)]),
            Err(DistributionError::DuplicateDegree(2))
        );
        assert_eq!(DegreeDistribution::new([]), Err(DistributionError::Empty));
        assert!(DegreeDistribution::new([(2, f64::NAN)]).is_err());
    }

    #[test]
    fn sorts_terms() {
        let d = DegreeDistribution::new([(8, 0.22), (2, 0.5), (3, 0.28)]).unwrap();
        assert_eq!(d.terms(), &IRSA8_TERMS);
        assert_eq!(d.max_degree(), 8);
    }

    #[test]
    fn parses_text_syntax() {
        let d: DegreeDistribution = "x^2".parse().unwrap();
        assert_eq!(d.terms(), &[(2, 1.0)]);
        let d: DegreeDistribution = " 0.5x^2 + 0.28 x^3+0.22*x^8 ".parse().unwrap();
        assert_eq!(d.terms(), &IRSA8_TERMS);
        assert_eq!(d.to_string(), "0.5x^2+0.28x^3+0.22x^8");
        let d: DegreeDistribution = "x".parse().unwrap();
        assert_eq!(d.terms(), &[(1, 1.0)]);
        assert_eq!(d.to_string(), "x");
        let d: DegreeDistribution = "IRSA8".parse().unwrap();
        assert_eq!(d.to_string(), "irsa8");
        assert_eq!("x^3".parse::<DegreeDistribution>().unwrap().to_string(), "x^3");

        for bad in ["", "2", "x^", "x^a", "0.5x^2", "x2", "x^0"] {
            assert!(bad.parse::<DegreeDistribution>().is_err(), "{bad:?} should fail");
        }
    }

    #[test]
    fn display_round_trips() {
        for text in ["x", "x^2", "0.25x+0.75x^4", "irsa8"] {
            let d: DegreeDistribution = text.parse().unwrap();
            let again: DegreeDistribution = d.to_string().parse().unwrap();
            assert_eq!(d, again);
        }
    }
}
