//! Families `(x_n)` of sequence-space elements.
//!
//! A family is either a finite list of members, optionally accompanied by
//! symbolic discrepancy envelopes and a uniform tail majorant that describe
//! the whole sequence, or one of the built-in parametric generators whose
//! coordinate limits and tail behaviour are known in closed form.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::element::{Interval, SeqElement, Slack};
use crate::error::{Error, Result};
use crate::json::FamilyDescriptor;
use crate::space::SpaceKind;
use crate::tail::{Envelope, TailModel};

/// Number of explicit coordinates materialised for geometric-ramp members.
const RAMP_PREFIX: usize = 32;

/// Symbolic bound `eta(n)` on a coordinate discrepancy; every variant tends
/// to zero as `n -> infinity`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Rate {
    Zero,
    /// `bound` for `n < from`, zero afterwards.
    EventuallyZero { bound: f64, from: usize },
    /// `c * n^(-q)`.
    InversePower { c: f64, q: f64 },
}

impl Rate {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Rate::Zero => true,
            Rate::EventuallyZero { bound, .. } => bound.is_finite() && bound >= 0.0,
            Rate::InversePower { c, q } => c.is_finite() && c >= 0.0 && q.is_finite() && q > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid("rate", format!("{self:?} does not tend to zero")))
        }
    }

    pub fn eval(&self, n: usize) -> f64 {
        match *self {
            Rate::Zero => 0.0,
            Rate::EventuallyZero { bound, from } => {
                if n < from {
                    bound
                } else {
                    0.0
                }
            }
            Rate::InversePower { c, q } => c * (n as f64).powf(-q),
        }
    }
}

/// Per-coordinate discrepancy envelopes `k -> eta_k(n)` bounding
/// `|c_k(x_n) - c_k(x)|` against the candidate limit `x`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Discrepancy {
    pub default: Option<Rate>,
    pub per_coordinate: BTreeMap<usize, Rate>,
}

impl Discrepancy {
    pub fn uniform(rate: Rate) -> Self {
        Discrepancy {
            default: Some(rate),
            per_coordinate: BTreeMap::new(),
        }
    }

    pub fn rate(&self, k: usize) -> Option<Rate> {
        self.per_coordinate.get(&k).copied().or(self.default)
    }

    fn validate(&self) -> Result<()> {
        self.default
            .iter()
            .chain(self.per_coordinate.values())
            .try_for_each(Rate::validate)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    /// `x_n = v`.
    Constant(SeqElement),
    /// `x_n = (-1)^n v`.
    Alternating(SeqElement),
    /// `x_n = scale * e_n`.
    BasisShift { scale: f64 },
    /// `x_n = (limit + scale * a^k / n)_k`; `limit` is nonzero only in `c`.
    GeometricRamp { a: f64, scale: f64, limit: f64 },
    /// In `c`: `x_n = (0, ..., 0, 1, 1, ...)` with ones from position `n + 1`.
    PlateauShift,
}

impl Generator {
    pub fn name(&self) -> &'static str {
        match self {
            Generator::Constant(_) => "constant",
            Generator::Alternating(_) => "alternating",
            Generator::BasisShift { .. } => "basis_shift",
            Generator::GeometricRamp { .. } => "geometric_ramp",
            Generator::PlateauShift => "plateau_shift",
        }
    }

    fn validate(&self, space: SpaceKind) -> Result<()> {
        match self {
            Generator::Constant(v) | Generator::Alternating(v) => {
                if v.space() != space {
                    return Err(Error::SpaceMismatch {
                        expected: space,
                        found: v.space(),
                    });
                }
            }
            Generator::BasisShift { scale } => {
                if !scale.is_finite() {
                    return Err(Error::invalid("generator", "basis_shift scale must be finite"));
                }
            }
            Generator::GeometricRamp { a, scale, limit } => {
                if !(*a > 0.0 && *a < 1.0) {
                    return Err(Error::invalid(
                        "generator",
                        format!("geometric_ramp needs 0 < a < 1, got {a}"),
                    ));
                }
                if !scale.is_finite() || !limit.is_finite() {
                    return Err(Error::invalid(
                        "generator",
                        "geometric_ramp scale and limit must be finite",
                    ));
                }
                if *limit != 0.0 && !space.has_limit() {
                    return Err(Error::invalid(
                        "generator",
                        format!("geometric_ramp limit {limit} given outside c"),
                    ));
                }
            }
            Generator::PlateauShift => {
                if space != SpaceKind::C {
                    return Err(Error::invalid(
                        "generator",
                        format!("plateau_shift lives in c, not {space}"),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Asymptotic behaviour of one coordinate sequence `n -> c_k(x_n)`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum CoordinateLimit {
    /// `|c_k(x_n) - l| <= rate(n)` for some `l` in `limit`.
    Tends { limit: Interval, rate: Rate },
    /// Every listed value is a cluster point of the sequence.
    Clusters(Vec<Interval>),
}

/// Which coordinates condition (1) is phrased in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoordinateForm {
    /// Schauder coordinates `c_k` of the standard basis (`x_k - lim` in `c`).
    Schauder,
    /// Raw terms `x_k`, plus the limit as coordinate 0 in `c`.
    Termwise,
}

impl CoordinateForm {
    pub(crate) fn read(&self, x: &SeqElement, k: usize) -> Interval {
        match (self, k) {
            (_, 0) => Interval::point(x.limit()),
            (CoordinateForm::Schauder, _) => x.recentred(k),
            (CoordinateForm::Termwise, _) => x.term(k),
        }
    }
}

/// What is known about `sup_n ||R_K x_n||`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum UniformTail {
    /// The tail norms of this element dominate those of every member.
    Majorant(SeqElement),
    /// `sup_n ||R_K x_n|| = value` for every `K`, attained at `n = K + 1`.
    Persistent(f64),
    /// Only the listed members are known.
    MembersOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteFamily {
    space: SpaceKind,
    members: Vec<SeqElement>,
    discrepancy: Option<Discrepancy>,
    uniform_tail: Option<TailModel>,
}

impl FiniteFamily {
    pub fn space(&self) -> SpaceKind {
        self.space
    }

    pub fn members(&self) -> &[SeqElement] {
        &self.members
    }

    pub fn discrepancy(&self) -> Option<&Discrepancy> {
        self.discrepancy.as_ref()
    }

    pub fn uniform_tail(&self) -> Option<TailModel> {
        self.uniform_tail
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FamilyDescriptor", into = "FamilyDescriptor")]
pub enum Family {
    Finite(FiniteFamily),
    Parametric {
        space: SpaceKind,
        generator: Generator,
    },
}

/// Tail indices at which a claimed uniform majorant is spot-checked.
fn spot_indices() -> impl Iterator<Item = usize> {
    (0..=64).chain((7..=20).map(|e| 1usize << e))
}

impl Family {
    pub fn finite(space: SpaceKind, members: Vec<SeqElement>) -> Result<Family> {
        space.validate()?;
        if let Some((i, m)) = members.iter().enumerate().find(|(_, m)| m.space() != space) {
            return Err(Error::invalid(
                "family",
                format!("member {} lives in {} but the family is in {space}", i + 1, m.space()),
            ));
        }
        Ok(Family::Finite(FiniteFamily {
            space,
            members,
            discrepancy: None,
            uniform_tail: None,
        }))
    }

    pub fn parametric(space: SpaceKind, generator: Generator) -> Result<Family> {
        space.validate()?;
        generator.validate(space)?;
        Ok(Family::Parametric { space, generator })
    }

    /// Attaches discrepancy envelopes to a finite family.
    pub fn with_discrepancy(self, discrepancy: Discrepancy) -> Result<Family> {
        discrepancy.validate()?;
        match self {
            Family::Finite(f) => Ok(Family::Finite(FiniteFamily {
                discrepancy: Some(discrepancy),
                ..f
            })),
            Family::Parametric { .. } => Err(Error::invalid(
                "family",
                "discrepancy envelopes are derived for parametric families",
            )),
        }
    }

    /// Attaches a uniform tail majorant to a finite family. Every member's
    /// tail enclosure must stay below the majorant's.
    pub fn with_uniform_tail(self, model: TailModel) -> Result<Family> {
        let Family::Finite(f) = self else {
            return Err(Error::invalid(
                "family",
                "uniform tails are derived for parametric families",
            ));
        };
        model.validate(f.space)?;
        let majorant = SeqElement::from_parts(f.space, Vec::new(), 0.0, Envelope::from(model));
        let slack = Slack::DEFAULT;
        for (i, m) in f.members.iter().enumerate() {
            for k in spot_indices() {
                let member = m.tail_norm_bounds(k, slack).hi;
                let bound = majorant.tail_norm_bounds(k, slack).hi;
                if member > bound + slack.value() {
                    return Err(Error::invalid(
                        "family",
                        format!(
                            "uniform tail {model:?} does not dominate member {} at K = {k} ({member} > {bound})",
                            i + 1
                        ),
                    ));
                }
            }
        }
        Ok(Family::Finite(FiniteFamily {
            uniform_tail: Some(model),
            ..f
        }))
    }

    pub fn space(&self) -> SpaceKind {
        match self {
            Family::Finite(f) => f.space,
            Family::Parametric { space, .. } => *space,
        }
    }

    /// Number of members, `None` for the infinite parametric families.
    pub fn len(&self) -> Option<usize> {
        match self {
            Family::Finite(f) => Some(f.members.len()),
            Family::Parametric { .. } => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    /// The member `x_n`, `n >= 1`.
    pub fn member(&self, n: usize) -> Option<SeqElement> {
        if n == 0 {
            return None;
        }
        match self {
            Family::Finite(f) => f.members.get(n - 1).cloned(),
            Family::Parametric { space, generator } => Some(match generator {
                Generator::Constant(v) => v.clone(),
                Generator::Alternating(v) => {
                    if n.is_multiple_of(2) {
                        v.clone()
                    } else {
                        v.scaled(-1.0)
                    }
                }
                Generator::BasisShift { scale } => SeqElement::unit(*space, n).scaled(*scale),
                Generator::GeometricRamp { a, scale, limit } => {
                    let nf = n as f64;
                    let prefix = (1..=RAMP_PREFIX)
                        .map(|k| limit + scale * a.powf(k as f64) / nf)
                        .collect();
                    let tail = TailModel::Geometric {
                        c: scale.abs() / nf,
                        r: *a,
                    };
                    SeqElement::from_parts(*space, prefix, *limit, Envelope::from(tail))
                }
                Generator::PlateauShift => {
                    SeqElement::from_parts(*space, vec![0.0; n], 1.0, Envelope::zero())
                }
            }),
        }
    }

    /// Relabels the family in an isometrically identical space
    /// (see [`SeqElement::with_space`]).
    pub fn with_space(&self, space: SpaceKind) -> Result<Family> {
        let probe = SeqElement::zero(self.space());
        probe.with_space(space)?;
        match self {
            Family::Finite(f) => {
                let members = f
                    .members
                    .iter()
                    .map(|m| m.with_space(space))
                    .collect::<Result<Vec<_>>>()?;
                let mut out = Family::finite(space, members)?;
                if let Some(d) = &f.discrepancy {
                    out = out.with_discrepancy(d.clone())?;
                }
                if let Some(t) = f.uniform_tail {
                    out = out.with_uniform_tail(t)?;
                }
                Ok(out)
            }
            Family::Parametric { generator, .. } => {
                let generator = match generator {
                    Generator::Constant(v) => Generator::Constant(v.with_space(space)?),
                    Generator::Alternating(v) => Generator::Alternating(v.with_space(space)?),
                    g => g.clone(),
                };
                Family::parametric(space, generator)
            }
        }
    }

    /// Closed-form behaviour of coordinate `k` for parametric families.
    pub(crate) fn coordinate_limit(&self, k: usize, form: CoordinateForm) -> Option<CoordinateLimit> {
        let Family::Parametric { generator, .. } = self else {
            return None;
        };
        let tends = |limit: f64, rate: Rate| CoordinateLimit::Tends {
            limit: Interval::point(limit),
            rate,
        };
        Some(match generator {
            Generator::Constant(v) => CoordinateLimit::Tends {
                limit: form.read(v, k),
                rate: Rate::Zero,
            },
            Generator::Alternating(v) => {
                let value = form.read(v, k);
                if value == Interval::point(0.0) {
                    tends(0.0, Rate::Zero)
                } else {
                    CoordinateLimit::Clusters(vec![value, value.neg()])
                }
            }
            Generator::BasisShift { .. } if k == 0 => tends(0.0, Rate::Zero),
            Generator::BasisShift { scale } => tends(
                0.0,
                Rate::EventuallyZero {
                    bound: scale.abs(),
                    from: k + 1,
                },
            ),
            Generator::GeometricRamp { limit, .. } if k == 0 => tends(*limit, Rate::Zero),
            Generator::GeometricRamp { a, scale, limit } => {
                let rate = Rate::InversePower {
                    c: scale.abs() * a.powf(k as f64),
                    q: 1.0,
                };
                match form {
                    CoordinateForm::Schauder => tends(0.0, rate),
                    CoordinateForm::Termwise => tends(*limit, rate),
                }
            }
            Generator::PlateauShift if k == 0 => tends(1.0, Rate::Zero),
            Generator::PlateauShift => {
                let rate = Rate::EventuallyZero { bound: 1.0, from: k };
                match form {
                    // x_k - 1 = -1 once n >= k
                    CoordinateForm::Schauder => tends(-1.0, rate),
                    CoordinateForm::Termwise => tends(0.0, rate),
                }
            }
        })
    }

    pub(crate) fn uniform_tail_data(&self) -> UniformTail {
        let space = self.space();
        let envelope_element =
            |model: TailModel| SeqElement::from_parts(space, Vec::new(), 0.0, Envelope::from(model));
        match self {
            Family::Finite(f) => match f.uniform_tail {
                Some(model) => UniformTail::Majorant(envelope_element(model)),
                None => UniformTail::MembersOnly,
            },
            Family::Parametric { generator, .. } => match generator {
                Generator::Constant(v) | Generator::Alternating(v) => UniformTail::Majorant(v.clone()),
                Generator::BasisShift { scale } if *scale == 0.0 => {
                    UniformTail::Majorant(SeqElement::zero(space))
                }
                Generator::BasisShift { scale } => UniformTail::Persistent(scale.abs()),
                Generator::GeometricRamp { a, scale, .. } => UniformTail::Majorant(envelope_element(
                    TailModel::Geometric {
                        c: scale.abs(),
                        r: *a,
                    },
                )),
                Generator::PlateauShift => UniformTail::Persistent(1.0),
            },
        }
    }
}
