//! Certified representation of sequence-space elements.
//!
//! An element stores an explicit prefix `x_1..x_m`, a limit (nonzero only in
//! `c`), and an [`Envelope`] bounding `|x_k - limit|` for every `k > m`.
//! Norms are reported as enclosures: `lo` comes from the stored data alone
//! and `hi` adds the closed-form tail bound plus an additive slack.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::ElementDescriptor;
use crate::space::{Norm, SpaceKind};
use crate::tail::{Envelope, TailModel};

/// Additive slack added to every upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Slack(f64);

impl Slack {
    /// 2^-30.
    pub const DEFAULT: Slack = Slack(9.313225746154785e-10);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(Slack(value))
        } else {
            Err(Error::invalid(
                "slack",
                format!("must be finite and positive, got {value}"),
            ))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for Slack {
    fn default() -> Self {
        Slack::DEFAULT
    }
}

/// Closed interval of reals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn point(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    pub fn around(center: f64, radius: f64) -> Self {
        Interval {
            lo: center - radius,
            hi: center + radius,
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo - other.hi,
            hi: self.hi - other.lo,
        }
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    /// Smallest absolute value in the interval.
    pub fn mag_lo(&self) -> f64 {
        if self.lo > 0.0 {
            self.lo
        } else if self.hi < 0.0 {
            -self.hi
        } else {
            0.0
        }
    }

    /// Largest absolute value in the interval.
    pub fn mag_hi(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest distance between a point of `self` and a point of `other`.
    pub fn distance_lo(&self, other: &Interval) -> f64 {
        self.sub(other).mag_lo()
    }
}

/// Enclosure `lo <= ||.|| <= hi` of a norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormInterval {
    pub lo: f64,
    pub hi: f64,
}

impl NormInterval {
    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Lowers a computed nonnegative quantity by a bound on the accumulated
/// rounding error of an `m`-term evaluation, so that it stays a lower bound.
fn deflate(value: f64, m: usize) -> f64 {
    value * (1.0 - (2 * m + 4) as f64 * f64::EPSILON)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ElementDescriptor", into = "ElementDescriptor")]
pub struct SeqElement {
    space: SpaceKind,
    prefix: Vec<f64>,
    limit: f64,
    tail: Envelope,
}

impl SeqElement {
    /// `limit` is required in `c` and must be absent (or zero) elsewhere.
    pub fn new(
        space: SpaceKind,
        prefix: Vec<f64>,
        limit: Option<f64>,
        tail: impl Into<Envelope>,
    ) -> Result<Self> {
        space.validate()?;
        if let Some(i) = prefix.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(
                "element",
                format!("prefix entry {} is not finite", i + 1),
            ));
        }
        let limit = match (space.has_limit(), limit) {
            (true, Some(l)) if l.is_finite() => l,
            (true, Some(l)) => {
                return Err(Error::invalid("element", format!("limit {l} is not finite")))
            }
            (true, None) => {
                return Err(Error::invalid(
                    "element",
                    "elements of c must carry an explicit limit",
                ))
            }
            (false, None) => 0.0,
            (false, Some(0.0)) => 0.0,
            (false, Some(l)) => {
                return Err(Error::invalid(
                    "element",
                    format!("limit {l} given outside c (elements of {space} tend to 0)"),
                ))
            }
        };
        let tail = tail.into();
        tail.validate(space)?;
        Ok(SeqElement {
            space,
            prefix,
            limit,
            tail,
        })
    }

    /// Assembles an element from parts already known to be valid.
    pub(crate) fn from_parts(space: SpaceKind, prefix: Vec<f64>, limit: f64, tail: Envelope) -> Self {
        SeqElement {
            space,
            prefix,
            limit,
            tail,
        }
    }

    pub fn zero(space: SpaceKind) -> Self {
        SeqElement {
            space,
            prefix: Vec::new(),
            limit: 0.0,
            tail: Envelope::zero(),
        }
    }

    /// Finitely supported element with the given prefix (limit 0 in `c`).
    pub fn finite(space: SpaceKind, prefix: Vec<f64>) -> Result<Self> {
        let limit = space.has_limit().then_some(0.0);
        SeqElement::new(space, prefix, limit, TailModel::Zero)
    }

    /// The standard unit vector `e_n`, `n >= 1`.
    pub fn unit(space: SpaceKind, n: usize) -> Self {
        assert!(n >= 1, "unit vectors are indexed from 1");
        let mut prefix = vec![0.0; n];
        prefix[n - 1] = 1.0;
        SeqElement {
            space,
            prefix,
            limit: 0.0,
            tail: Envelope::zero(),
        }
    }

    /// The constant sequence `(value, value, ...)` in `c`.
    pub fn constant(value: f64) -> Self {
        SeqElement {
            space: SpaceKind::C,
            prefix: Vec::new(),
            limit: value,
            tail: Envelope::zero(),
        }
    }

    pub fn space(&self) -> SpaceKind {
        self.space
    }

    pub fn prefix(&self) -> &[f64] {
        &self.prefix
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix.len()
    }

    pub fn limit(&self) -> f64 {
        self.limit
    }

    pub fn tail(&self) -> &Envelope {
        &self.tail
    }

    /// Raw sequence term `x_k`, `k >= 1`.
    pub fn term(&self, k: usize) -> Interval {
        debug_assert!(k >= 1);
        match self.prefix.get(k.wrapping_sub(1)) {
            Some(&v) => Interval::point(v),
            None => Interval::around(self.limit, self.tail.value(k)),
        }
    }

    /// `x_k - limit`, `k >= 1`.
    pub fn recentred(&self, k: usize) -> Interval {
        match self.prefix.get(k.wrapping_sub(1)) {
            Some(&v) => Interval::point(v - self.limit),
            None => Interval::around(0.0, self.tail.value(k)),
        }
    }

    /// Coordinate functional `c_k` of the standard basis: `x_k` in `lp`,
    /// `c0` and ℓ₂; in `c`, `c_0` is the limit and `c_k = x_k - limit`.
    pub fn coordinate(&self, k: usize) -> Result<Interval> {
        match (self.space.has_limit(), k) {
            (true, 0) => Ok(Interval::point(self.limit)),
            (true, _) => Ok(self.recentred(k)),
            (false, 0) => Err(Error::Index {
                index: 0,
                space: self.space,
            }),
            (false, _) => Ok(self.term(k)),
        }
    }

    pub fn norm_bounds(&self, slack: Slack) -> NormInterval {
        if !self.space.has_limit() {
            return self.tail_norm_bounds(0, slack);
        }
        let m = self.prefix.len();
        let head = self.prefix.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let tau = self.tail.tail_bound(m, Norm::Sup);
        NormInterval {
            lo: head.max(self.limit.abs()),
            hi: head.max(self.limit.abs() + tau) + slack.value(),
        }
    }

    /// Enclosure of `||R_K x||`: the norm of the (recentred, in `c`)
    /// coordinates with index greater than `k`.
    pub fn tail_norm_bounds(&self, k: usize, slack: Slack) -> NormInterval {
        let norm = self.space.norm();
        let m = self.prefix.len();
        // summed from the far end so that the result is monotone in k
        let acc = self
            .prefix
            .iter()
            .skip(k)
            .rev()
            .fold(0.0, |acc, &v| norm.combine(acc, norm.weight((v - self.limit).abs())));
        let tau = self.tail.tail_bound(k.max(m), norm);
        NormInterval {
            lo: deflate(norm.finish(acc), m),
            hi: norm.finish(norm.combine(acc, norm.weight(tau))) + slack.value(),
        }
    }

    pub fn scaled(&self, factor: f64) -> SeqElement {
        SeqElement {
            space: self.space,
            prefix: self.prefix.iter().map(|v| v * factor).collect(),
            limit: self.limit * factor,
            tail: self.tail.scaled(factor),
        }
    }

    /// Moves `len - m` tail coordinates into the prefix. Succeeds only where
    /// the envelope pins them to the limit exactly.
    pub fn extended(&self, len: usize) -> Result<SeqElement> {
        let m = self.prefix.len();
        if let Some(k) = (m + 1..=len).find(|&k| self.tail.value(k) != 0.0) {
            return Err(Error::Undetermined {
                index: k,
                tolerance: 0.0,
            });
        }
        let mut out = self.clone();
        out.prefix.resize(len.max(m), self.limit);
        Ok(out)
    }

    pub fn checked_add(&self, other: &SeqElement) -> Result<SeqElement> {
        self.combine(other, 1.0)
    }

    pub fn checked_sub(&self, other: &SeqElement) -> Result<SeqElement> {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &SeqElement, sign: f64) -> Result<SeqElement> {
        self.require_same_space(other)?;
        let len = self.prefix.len().max(other.prefix.len());
        let a = self.extended(len)?;
        let b = other.extended(len)?;
        Ok(SeqElement {
            space: self.space,
            prefix: a
                .prefix
                .iter()
                .zip(&b.prefix)
                .map(|(x, y)| x + sign * y)
                .collect(),
            limit: self.limit + sign * other.limit,
            tail: self.tail.sum(&other.tail),
        })
    }

    pub(crate) fn require_same_space(&self, other: &SeqElement) -> Result<()> {
        if self.space == other.space {
            Ok(())
        } else {
            Err(Error::SpaceMismatch {
                expected: self.space,
                found: other.space,
            })
        }
    }

    /// Enclosure of `||self - other||` that does not require either
    /// envelope to be resolvable.
    pub fn distance_bounds(&self, other: &SeqElement, slack: Slack) -> Result<NormInterval> {
        self.require_same_space(other)?;
        if self == other {
            return Ok(NormInterval {
                lo: 0.0,
                hi: slack.value(),
            });
        }
        let norm = self.space.norm();
        let m = self.prefix.len().max(other.prefix.len());
        let (mut acc_lo, mut acc_hi) = (0.0f64, 0.0f64);
        for k in (1..=m).rev() {
            let d = self.term(k).sub(&other.term(k));
            acc_lo = norm.combine(acc_lo, norm.weight(d.mag_lo()));
            acc_hi = norm.combine(acc_hi, norm.weight(d.mag_hi()));
        }
        let tau = self.tail.tail_bound(m, norm) + other.tail.tail_bound(m, norm);
        if self.space.has_limit() {
            let gap = (self.limit - other.limit).abs();
            return Ok(NormInterval {
                lo: deflate(acc_lo.max(gap), m),
                hi: acc_hi.max(gap + tau) + slack.value(),
            });
        }
        Ok(NormInterval {
            lo: deflate(norm.finish(acc_lo), m),
            hi: norm.finish(norm.combine(acc_hi, norm.weight(tau))) + slack.value(),
        })
    }

    /// Relabels the element in an isometrically identical space: ℓ₂ and
    /// `hilbert`, or `c0` and limit-zero elements of `c`.
    pub fn with_space(&self, space: SpaceKind) -> Result<SeqElement> {
        let compatible = self.space.same_norm_space(&space)
            || matches!((self.space, space), (SpaceKind::C0, SpaceKind::C))
            || (matches!((self.space, space), (SpaceKind::C, SpaceKind::C0)) && self.limit == 0.0);
        if !compatible {
            return Err(Error::SpaceMismatch {
                expected: space,
                found: self.space,
            });
        }
        self.tail.validate(space)?;
        Ok(SeqElement {
            space,
            ..self.clone()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tail::EnvelopeTerm;

    const L2: SpaceKind = SpaceKind::Lp { p: 2.0 };
    const L1: SpaceKind = SpaceKind::Lp { p: 1.0 };

    fn slack() -> Slack {
        Slack::default()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= slack().value()
    }

    #[test]
    fn default_slack_is_two_to_minus_thirty() {
        assert_eq!(Slack::DEFAULT.value(), 2f64.powi(-30));
    }

    #[test]
    fn unit_vector_norm() {
        let e1 = SeqElement::new(L2, vec![1.0], None, TailModel::Zero).unwrap();
        let n = e1.norm_bounds(slack());
        assert!(close(n.lo, 1.0) && close(n.hi, 1.0));
    }

    #[test]
    fn finite_support_l1_norm() {
        let x = SeqElement::new(L1, vec![1.0, 0.5], None, TailModel::Zero).unwrap();
        let n = x.norm_bounds(slack());
        assert!(close(n.lo, 1.5) && close(n.hi, 1.5));
        assert!(n.contains(1.5));
    }

    #[test]
    fn c_norm_with_geometric_tail() {
        // brute force over x = (2, 1 + 0.5^2, 1 + 0.5^3, ...), which obeys the envelope
        let x = SeqElement::new(
            SpaceKind::C,
            vec![2.0],
            Some(1.0),
            TailModel::Geometric { c: 1.0, r: 0.5 },
        )
        .unwrap();
        let brute = (2..10_000)
            .map(|k| 1.0 + 0.5f64.powi(k))
            .fold(2.0f64, f64::max);
        let n = x.norm_bounds(slack());
        assert_eq!(n.lo, 2.0);
        assert!(close(n.hi, 2.0));
        assert!(n.contains(brute));
    }

    #[test]
    fn coordinates_in_c() {
        let e0 = SeqElement::constant(1.0);
        assert_eq!(e0.coordinate(0).unwrap(), Interval::point(1.0));
        assert_eq!(e0.coordinate(3).unwrap(), Interval::point(0.0));
        let x = SeqElement::new(SpaceKind::C, vec![2.0, 1.5], Some(1.0), TailModel::Zero).unwrap();
        assert_eq!(x.coordinate(1).unwrap(), Interval::point(1.0));
    }

    #[test]
    fn coordinates_in_lp() {
        let x = SeqElement::new(L2, vec![3.0, 4.0], None, TailModel::Zero).unwrap();
        assert_eq!(x.coordinate(2).unwrap(), Interval::point(4.0));
        assert!(matches!(x.coordinate(0), Err(Error::Index { index: 0, .. })));
        let y = SeqElement::new(L2, vec![], None, TailModel::Geometric { c: 1.0, r: 0.5 }).unwrap();
        assert_eq!(y.coordinate(2).unwrap(), Interval::around(0.0, 0.25));
    }

    #[test]
    fn tail_of_finite_support_vanishes() {
        let e1 = SeqElement::unit(L2, 1);
        let t = e1.tail_norm_bounds(1, slack());
        assert_eq!(t.lo, 0.0);
        assert!(close(t.hi, 0.0));
    }

    #[test]
    fn tail_in_c_is_recentred() {
        let x = SeqElement::new(
            SpaceKind::C,
            vec![2.0, 1.5, 1.25],
            Some(1.0),
            TailModel::Geometric { c: 2.0, r: 0.5 },
        )
        .unwrap();
        // brute force over x_k = 1 + 2^(1-k)
        let brute = (2..10_000)
            .map(|k| 2f64.powi(1 - k))
            .fold(0.0f64, f64::max);
        let t = x.tail_norm_bounds(1, slack());
        assert!(close(t.lo, 0.5) && close(t.hi, 0.5));
        assert!(t.contains(brute));
    }

    #[test]
    fn geometric_tail_in_l1() {
        let x = SeqElement::new(L1, vec![], None, TailModel::Geometric { c: 1.0, r: 0.5 }).unwrap();
        let brute: f64 = (4..200).map(|k| 0.5f64.powi(k)).sum();
        let t = x.tail_norm_bounds(3, slack());
        assert_eq!(t.lo, 0.0);
        assert!(close(t.hi, 0.125));
        assert!(t.contains(brute));
    }

    #[test]
    fn rejects_inconsistent_inputs() {
        assert!(SeqElement::new(SpaceKind::C, vec![1.0], None, TailModel::Zero).is_err());
        assert!(SeqElement::new(L2, vec![1.0], Some(2.0), TailModel::Zero).is_err());
        assert!(SeqElement::new(L2, vec![f64::NAN], None, TailModel::Zero).is_err());
        assert!(SeqElement::new(L2, vec![], None, TailModel::Power { c: 1.0, s: 0.5 }).is_err());
    }

    #[test]
    fn norm_equals_tail_at_zero_outside_c() {
        let x = SeqElement::new(
            SpaceKind::C0,
            vec![0.5, -3.0],
            None,
            TailModel::Power { c: 2.0, s: 1.0 },
        )
        .unwrap();
        assert_eq!(x.norm_bounds(slack()), x.tail_norm_bounds(0, slack()));
    }

    #[test]
    fn distance_of_unknown_tails() {
        let x = SeqElement::new(L2, vec![1.0], None, TailModel::Geometric { c: 1.0, r: 0.5 }).unwrap();
        assert_eq!(x.distance_bounds(&x, slack()).unwrap().hi, slack().value());
        let half = EnvelopeTerm {
            model: TailModel::Geometric { c: 0.5, r: 0.5 },
            cutoff: None,
        };
        let y = SeqElement::new(L2, vec![1.0], None, Envelope::from_terms([half, half])).unwrap();
        let d = x.distance_bounds(&y, slack()).unwrap();
        assert_eq!(d.lo, 0.0);
        // the two unknown tails may differ by up to the sum of the envelopes
        assert!(d.hi >= 2.0 * TailModel::Geometric { c: 1.0, r: 0.5 }.tail_bound(1, Norm::P(2.0)));
        let z = SeqElement::zero(L2);
        let dz = x.distance_bounds(&z, slack()).unwrap();
        let n = x.norm_bounds(slack());
        assert!(close(dz.lo, n.lo) && close(dz.hi, n.hi));
    }

    #[test]
    fn distance_in_c_sees_limits() {
        let a = SeqElement::constant(1.0);
        let b = SeqElement::finite(SpaceKind::C, vec![1.0, 1.0]).unwrap();
        let d = a.distance_bounds(&b, slack()).unwrap();
        assert!(close(d.lo, 1.0) && close(d.hi, 1.0));
    }

    #[test]
    fn extension_requires_pinned_coordinates() {
        let x = SeqElement::new(L2, vec![1.0], None, TailModel::Geometric { c: 1.0, r: 0.5 }).unwrap();
        assert!(matches!(x.extended(3), Err(Error::Undetermined { index: 2, .. })));
        let y = SeqElement::constant(2.0).extended(2).unwrap();
        assert_eq!(y.prefix(), &[2.0, 2.0]);
    }

    #[test]
    fn retagging() {
        let x = SeqElement::unit(L2, 2);
        assert_eq!(x.with_space(SpaceKind::Hilbert).unwrap().space(), SpaceKind::Hilbert);
        assert!(x.with_space(SpaceKind::C0).is_err());
        assert!(SeqElement::constant(1.0).with_space(SpaceKind::C0).is_err());
        let y = SeqElement::finite(SpaceKind::C, vec![1.0]).unwrap();
        assert!(y.with_space(SpaceKind::C0).is_ok());
    }
}
