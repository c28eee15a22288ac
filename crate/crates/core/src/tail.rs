//! Symbolic coordinate envelopes and their closed-form tail-norm bounds.
//!
//! An envelope bounds `|x_k - limit|` for every index `k` past an element's
//! stored prefix. Each model yields a bound `tau(K)` on the norm of the
//! coordinates with index greater than `K`; `tau` is nonincreasing in `K`
//! and tends to zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{Norm, SpaceKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum TailModel {
    Zero,
    /// `c * r^k` with `0 <= r < 1`.
    Geometric { c: f64, r: f64 },
    /// `c * k^(-s)` with `s > 0` (and `s * p > 1` in `lp`).
    Power { c: f64, s: f64 },
}

impl TailModel {
    pub fn validate(&self, space: SpaceKind) -> Result<()> {
        match *self {
            TailModel::Zero => Ok(()),
            TailModel::Geometric { c, r } => {
                check_coefficient(c)?;
                if !(r.is_finite() && (0.0..1.0).contains(&r)) {
                    return Err(Error::invalid(
                        "tail",
                        format!("geometric ratio must satisfy 0 <= r < 1, got {r}"),
                    ));
                }
                Ok(())
            }
            TailModel::Power { c, s } => {
                check_coefficient(c)?;
                if !(s.is_finite() && s > 0.0) {
                    return Err(Error::invalid(
                        "tail",
                        format!("power exponent must be positive, got {s}"),
                    ));
                }
                if let Norm::P(p) = space.norm() {
                    if s * p <= 1.0 {
                        return Err(Error::invalid(
                            "tail",
                            format!("power tail k^-{s} is not {p}-summable in {space} (need s*p > 1)"),
                        ));
                    }
                }
                Ok(())
            }
        }
    }

    /// Envelope value at index `k >= 1`.
    pub fn value(&self, k: usize) -> f64 {
        match *self {
            TailModel::Zero => 0.0,
            TailModel::Geometric { c, r } => c * r.powf(k as f64),
            TailModel::Power { c, s } => c * (k as f64).powf(-s),
        }
    }

    /// Upper bound on the norm of the envelope restricted to indices `> k`.
    pub fn tail_bound(&self, k: usize, norm: Norm) -> f64 {
        let kf = k as f64;
        match (*self, norm) {
            (TailModel::Zero, _) => 0.0,
            (TailModel::Geometric { c, r }, _) if c == 0.0 || r == 0.0 => 0.0,
            (TailModel::Geometric { c, r }, Norm::Sup) => c * r.powf(kf + 1.0),
            (TailModel::Geometric { c, r }, Norm::P(p)) => {
                c * r.powf(kf + 1.0) * (1.0 - r.powf(p)).powf(-p.recip())
            }
            (TailModel::Power { c: 0.0, .. }, _) => 0.0,
            (TailModel::Power { c, s }, Norm::Sup) => c * (kf + 1.0).powf(-s),
            (TailModel::Power { c, s }, Norm::P(p)) => {
                let e = s * p;
                // integral test; at K = 0 the first term is split off
                let sum = if k == 0 {
                    e / (e - 1.0)
                } else {
                    kf.powf(1.0 - e) / (e - 1.0)
                };
                c * sum.powf(p.recip())
            }
        }
    }

    pub fn scaled(&self, factor: f64) -> TailModel {
        let factor = factor.abs();
        match *self {
            TailModel::Zero => TailModel::Zero,
            TailModel::Geometric { c, r } => TailModel::Geometric { c: c * factor, r },
            TailModel::Power { c, s } => TailModel::Power { c: c * factor, s },
        }
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            TailModel::Zero => true,
            TailModel::Geometric { c, r } => c == 0.0 || r == 0.0,
            TailModel::Power { c, .. } => c == 0.0,
        }
    }
}

fn check_coefficient(c: f64) -> Result<()> {
    if c.is_finite() && c >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            "tail",
            format!("envelope coefficient must be finite and nonnegative, got {c}"),
        ))
    }
}

/// One envelope model, optionally switched off past `cutoff`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeTerm {
    pub model: TailModel,
    pub cutoff: Option<usize>,
}

impl EnvelopeTerm {
    fn value(&self, k: usize) -> f64 {
        match self.cutoff {
            Some(cut) if k > cut => 0.0,
            _ => self.model.value(k),
        }
    }

    fn tail_bound(&self, k: usize, norm: Norm) -> f64 {
        match self.cutoff {
            Some(cut) if k >= cut => 0.0,
            _ => self.model.tail_bound(k, norm),
        }
    }
}

/// Sum of envelope terms. An empty envelope is identically zero.
///
/// Tail bounds of a sum are summed, which is valid for every supported norm
/// by the triangle inequality.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Envelope {
    terms: Vec<EnvelopeTerm>,
}

impl Envelope {
    pub fn zero() -> Self {
        Envelope::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = EnvelopeTerm>) -> Self {
        Envelope {
            terms: terms
                .into_iter()
                .filter(|t| t.model != TailModel::Zero)
                .collect(),
        }
    }

    pub fn terms(&self) -> &[EnvelopeTerm] {
        &self.terms
    }

    /// The single model this envelope consists of, if it is that simple.
    pub fn as_model(&self) -> Option<TailModel> {
        match self.terms.as_slice() {
            [] => Some(TailModel::Zero),
            [EnvelopeTerm {
                model,
                cutoff: None,
            }] => Some(*model),
            _ => None,
        }
    }

    pub fn validate(&self, space: SpaceKind) -> Result<()> {
        self.terms.iter().try_for_each(|t| t.model.validate(space))
    }

    pub fn value(&self, k: usize) -> f64 {
        self.terms.iter().map(|t| t.value(k)).sum()
    }

    pub fn tail_bound(&self, k: usize, norm: Norm) -> f64 {
        self.terms.iter().map(|t| t.tail_bound(k, norm)).sum()
    }

    /// True if the envelope vanishes at every index `> k`.
    pub fn vanishes_after(&self, k: usize) -> bool {
        self.terms
            .iter()
            .all(|t| t.model.is_zero() || t.cutoff.is_some_and(|cut| cut <= k))
    }

    pub fn scaled(&self, factor: f64) -> Envelope {
        Envelope::from_terms(self.terms.iter().map(|t| EnvelopeTerm {
            model: t.model.scaled(factor),
            cutoff: t.cutoff,
        }))
    }

    /// Restricts the envelope to indices `<= cutoff`.
    pub fn truncated(&self, cutoff: usize) -> Envelope {
        Envelope::from_terms(self.terms.iter().map(|t| EnvelopeTerm {
            model: t.model,
            cutoff: Some(t.cutoff.map_or(cutoff, |c| c.min(cutoff))),
        }))
    }

    pub fn sum(&self, other: &Envelope) -> Envelope {
        Envelope::from_terms(self.terms.iter().chain(other.terms.iter()).copied())
    }
}

impl From<TailModel> for Envelope {
    fn from(model: TailModel) -> Self {
        Envelope::from_terms([EnvelopeTerm {
            model,
            cutoff: None,
        }])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force norm of the envelope over indices `k+1 ..= k+terms`.
    fn brute_tail(model: TailModel, k: usize, norm: Norm, terms: usize) -> f64 {
        let values = (k + 1..=k + terms).map(|i| model.value(i));
        match norm {
            Norm::Sup => values.fold(0.0, f64::max),
            Norm::P(p) => values.map(|v| v.powf(p)).sum::<f64>().powf(1.0 / p),
        }
    }

    #[test]
    fn geometric_l1_tail_matches_series() {
        // sum_{k>=4} 0.5^k = 0.125
        let m = TailModel::Geometric { c: 1.0, r: 0.5 };
        assert!((m.tail_bound(3, Norm::P(1.0)) - 0.125).abs() < 1e-15);
        assert!((brute_tail(m, 3, Norm::P(1.0), 200) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn geometric_l2_tail_is_exact() {
        let m = TailModel::Geometric { c: 1.0, r: 0.5 };
        // (sum_{k>=1} 4^-k)^(1/2) = 1/sqrt(3)
        assert!((m.tail_bound(0, Norm::P(2.0)) - 3f64.sqrt().recip()).abs() < 1e-15);
        for k in [0, 1, 5, 20] {
            let brute = brute_tail(m, k, Norm::P(2.0), 400);
            assert!((m.tail_bound(k, Norm::P(2.0)) - brute).abs() <= 1e-15 * brute.max(1e-300) + 1e-300);
        }
    }

    #[test]
    fn power_tail_dominates_brute_force() {
        for (s, p) in [(1.0, 2.0), (2.0, 1.0), (0.75, 2.0), (1.5, 1.0)] {
            let m = TailModel::Power { c: 1.5, s };
            for k in [0, 1, 2, 10, 100] {
                let brute = brute_tail(m, k, Norm::P(p), 100_000);
                assert!(m.tail_bound(k, Norm::P(p)) >= brute, "s={s} p={p} k={k}");
            }
            for k in [0, 1, 9] {
                let sup = brute_tail(m, k, Norm::Sup, 10);
                assert_eq!(m.tail_bound(k, Norm::Sup), sup);
            }
        }
    }

    #[test]
    fn tail_bounds_are_monotone() {
        let models = [
            TailModel::Geometric { c: 3.0, r: 0.9 },
            TailModel::Power { c: 1.0, s: 0.6 },
            TailModel::Power { c: 1.0, s: 3.0 },
        ];
        for m in models {
            for norm in [Norm::P(2.0), Norm::P(1.7), Norm::Sup] {
                if m.validate(SpaceKind::Lp { p: 1.7 }).is_err() && norm != Norm::Sup {
                    continue;
                }
                let mut prev = f64::INFINITY;
                for k in 0..200 {
                    let t = m.tail_bound(k, norm);
                    assert!(t <= prev, "{m:?} {norm:?} k={k}");
                    prev = t;
                }
                assert!(m.tail_bound(1 << 40, norm) < m.tail_bound(0, norm));
            }
        }
    }

    #[test]
    fn power_summability_is_checked() {
        let m = TailModel::Power { c: 1.0, s: 0.5 };
        assert!(m.validate(SpaceKind::Lp { p: 2.0 }).is_err());
        assert!(m.validate(SpaceKind::Lp { p: 3.0 }).is_ok());
        assert!(m.validate(SpaceKind::C0).is_ok());
        assert!(TailModel::Geometric { c: 1.0, r: 1.0 }
            .validate(SpaceKind::C0)
            .is_err());
        assert!(TailModel::Geometric { c: -1.0, r: 0.5 }
            .validate(SpaceKind::C0)
            .is_err());
    }

    #[test]
    fn zero_ratio_collapses() {
        let m = TailModel::Geometric { c: 5.0, r: 0.0 };
        assert_eq!(m.value(1), 0.0);
        assert_eq!(m.tail_bound(0, Norm::P(1.0)), 0.0);
        assert!(m.is_zero());
    }

    #[test]
    fn truncated_envelope_vanishes_past_cutoff() {
        let env = Envelope::from(TailModel::Geometric { c: 1.0, r: 0.5 }).truncated(4);
        assert_eq!(env.value(5), 0.0);
        assert!(env.value(4) > 0.0);
        assert_eq!(env.tail_bound(4, Norm::P(2.0)), 0.0);
        assert!(env.tail_bound(3, Norm::P(2.0)) > 0.0);
        assert!(env.vanishes_after(4));
        assert!(!env.vanishes_after(3));
    }
}
