//! Precompactness of described sets: bounded, with uniformly small tails.
//!
//! Only precompactness is decided; whether a described set is closed is not
//! something these descriptors can settle.

use serde::{Deserialize, Serialize};

use crate::config::CheckConfig;
use crate::convergence::{first_below, K_SEARCH_CAP};
use crate::element::{SeqElement, Slack};
use crate::error::{Error, Result};
use crate::json::SetJson;
use crate::space::SpaceKind;
use crate::tail::{Envelope, TailModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SetJson", into = "SetJson")]
pub enum SetDescriptor {
    Finite { space: SpaceKind, members: Vec<SeqElement> },
    /// `{x : |x_k| <= a_k for all k}` with `a_k` given by `envelope`.
    HilbertCube { space: SpaceKind, envelope: TailModel },
    /// `{scale * e_n : n >= 1}`.
    BasisVectors { space: SpaceKind, scale: f64 },
    /// `{x : ||x|| <= radius}`.
    Ball { space: SpaceKind, radius: f64 },
}

impl SetDescriptor {
    pub fn finite(space: SpaceKind, members: Vec<SeqElement>) -> Result<Self> {
        space.validate()?;
        if let Some(i) = members.iter().position(|m| m.space() != space) {
            return Err(Error::SpaceMismatch {
                expected: space,
                found: members[i].space(),
            });
        }
        Ok(SetDescriptor::Finite { space, members })
    }

    pub fn hilbert_cube(space: SpaceKind, envelope: TailModel) -> Result<Self> {
        space.validate()?;
        envelope.validate(space)?;
        Ok(SetDescriptor::HilbertCube { space, envelope })
    }

    pub fn basis_vectors(space: SpaceKind, scale: f64) -> Result<Self> {
        space.validate()?;
        if !scale.is_finite() {
            return Err(Error::invalid("set", format!("scale {scale} is not finite")));
        }
        Ok(SetDescriptor::BasisVectors { space, scale })
    }

    pub fn ball(space: SpaceKind, radius: f64) -> Result<Self> {
        space.validate()?;
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(Error::invalid("set", format!("radius {radius} must be finite and nonnegative")));
        }
        Ok(SetDescriptor::Ball { space, radius })
    }

    pub fn space(&self) -> SpaceKind {
        match *self {
            SetDescriptor::Finite { space, .. }
            | SetDescriptor::HilbertCube { space, .. }
            | SetDescriptor::BasisVectors { space, .. }
            | SetDescriptor::Ball { space, .. } => space,
        }
    }

    fn cube_element(space: SpaceKind, envelope: TailModel) -> SeqElement {
        SeqElement::from_parts(space, Vec::new(), 0.0, Envelope::from(envelope))
    }

    /// Does `x` belong to the set? Used to re-check witnesses.
    pub fn contains(&self, x: &SeqElement, slack: Slack) -> bool {
        if x.space() != self.space() {
            return false;
        }
        match self {
            SetDescriptor::Finite { members, .. } => members.contains(x),
            SetDescriptor::HilbertCube { envelope, .. } => {
                x.tail().terms().is_empty()
                    && x.limit() == 0.0
                    && x
                        .prefix()
                        .iter()
                        .enumerate()
                        .all(|(i, v)| v.abs() <= envelope.value(i + 1) + slack.value())
            }
            SetDescriptor::BasisVectors { space, scale } => {
                x.prefix_len() >= 1 && *x == SeqElement::unit(*space, x.prefix_len()).scaled(*scale)
            }
            SetDescriptor::Ball { radius, .. } => x.norm_bounds(slack).hi <= radius + slack.value(),
        }
    }
}

/// `sup_{x in C} ||x|| <= bound`.
pub fn check_bounded(set: &SetDescriptor, slack: Slack) -> f64 {
    match set {
        SetDescriptor::Finite { members, .. } => members
            .iter()
            .map(|m| m.norm_bounds(slack).hi)
            .fold(0.0, f64::max),
        SetDescriptor::HilbertCube { space, envelope } => {
            SetDescriptor::cube_element(*space, *envelope).norm_bounds(slack).hi
        }
        SetDescriptor::BasisVectors { scale, .. } => scale.abs(),
        SetDescriptor::Ball { radius, .. } => *radius,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailWitness {
    pub k: usize,
    pub member: SeqElement,
    pub lower_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum SetTail {
    /// `||R_K x|| < eps` for all `x` in the set and all `K >= k0`.
    Bound { epsilon: f64, k0: usize },
    /// For each `K`, a member with `||R_K x|| >= lower_bound >= eps`.
    Failure { epsilon: f64, witnesses: Vec<TailWitness> },
    Inconclusive { epsilon: f64, reason: String },
}

/// The member whose tail past `k` is as large as the set allows, with that
/// tail size, for the sets whose tails never shrink.
fn extremal_member(set: &SetDescriptor, k: usize) -> Option<SeqElement> {
    match *set {
        SetDescriptor::BasisVectors { space, scale } => Some(SeqElement::unit(space, k + 1).scaled(scale)),
        SetDescriptor::Ball { space, radius } if space.has_limit() => {
            // (r, ..., r, -r, r, r, ...) has ||R_K x|| = 2r
            let mut prefix = vec![radius; k + 1];
            prefix[k] = -radius;
            Some(SeqElement::from_parts(space, prefix, radius, Envelope::zero()))
        }
        SetDescriptor::Ball { space, radius } => Some(SeqElement::unit(space, k + 1).scaled(radius)),
        _ => None,
    }
}

/// `sup_{x in C} ||R_K x||`, the same for every `K`, for the sets that have one.
fn persistent_tail(set: &SetDescriptor) -> Option<f64> {
    match *set {
        SetDescriptor::BasisVectors { scale, .. } => Some(scale.abs()),
        SetDescriptor::Ball { space, radius } if space.has_limit() => Some(2.0 * radius),
        SetDescriptor::Ball { radius, .. } => Some(radius),
        _ => None,
    }
}

fn witnesses(set: &SetDescriptor, k_max: usize, slack: Slack) -> Vec<TailWitness> {
    (0..=k_max)
        .filter_map(|k| {
            let member = extremal_member(set, k)?;
            let lower_bound = member.tail_norm_bounds(k, slack).lo;
            Some(TailWitness { k, member, lower_bound })
        })
        .collect()
}

pub fn check_uniform_tail_set(set: &SetDescriptor, epsilon: f64, k_max: usize, slack: Slack) -> Result<SetTail> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::invalid("epsilon", format!("must be positive, got {epsilon}")));
    }
    let search = |f: &dyn Fn(usize) -> f64| match first_below(f, epsilon, K_SEARCH_CAP) {
        Some(k0) => SetTail::Bound { epsilon, k0 },
        None => SetTail::Inconclusive {
            epsilon,
            reason: format!("no tail index up to {K_SEARCH_CAP} brings the tails below eps"),
        },
    };
    Ok(match set {
        SetDescriptor::Finite { members, .. } => search(&|k| {
            members
                .iter()
                .map(|m| m.tail_norm_bounds(k, slack).hi)
                .fold(0.0, f64::max)
        }),
        SetDescriptor::HilbertCube { space, envelope } => {
            let cube = SetDescriptor::cube_element(*space, *envelope);
            search(&|k| cube.tail_norm_bounds(k, slack).hi)
        }
        _ => {
            let v = persistent_tail(set).expect("remaining sets have persistent tails");
            if v + slack.value() < epsilon {
                SetTail::Bound { epsilon, k0: 0 }
            } else {
                let witnesses = witnesses(set, k_max, slack);
                if witnesses.iter().all(|w| w.lower_bound >= epsilon) {
                    SetTail::Failure { epsilon, witnesses }
                } else {
                    SetTail::Inconclusive {
                        epsilon,
                        reason: "tail size within rounding of eps".to_string(),
                    }
                }
            }
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecompactRow {
    pub epsilon: f64,
    pub k0: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecompactCertificate {
    pub norm_bound: f64,
    pub rows: Vec<PrecompactRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "witness", rename_all = "snake_case")]
pub enum CompactnessWitness {
    TailFailure { epsilon: f64, witnesses: Vec<TailWitness> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompactnessBlocker {
    pub reason: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocking_epsilon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "certificate", rename_all = "snake_case")]
pub enum CompactnessVerdict {
    Precompact(PrecompactCertificate),
    NotPrecompact(CompactnessWitness),
    Inconclusive(CompactnessBlocker),
}

impl CompactnessVerdict {
    pub fn tag(&self) -> &'static str {
        match self {
            CompactnessVerdict::Precompact(_) => "precompact",
            CompactnessVerdict::NotPrecompact(_) => "not_precompact",
            CompactnessVerdict::Inconclusive(_) => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompactnessReport {
    pub norm_bound: f64,
    pub tails: Vec<SetTail>,
    #[serde(flatten)]
    pub verdict: CompactnessVerdict,
}

pub fn analyze_set(set: &SetDescriptor, config: &CheckConfig) -> Result<CompactnessReport> {
    config.validate()?;
    let slack = config.slack;
    let norm_bound = check_bounded(set, slack);
    let tails = config
        .eps_grid
        .iter()
        .map(|&eps| check_uniform_tail_set(set, eps, config.k_max, slack))
        .collect::<Result<Vec<_>>>()?;
    let verdict = if let Some(SetTail::Failure { epsilon, witnesses }) =
        tails.iter().find(|t| matches!(t, SetTail::Failure { .. }))
    {
        CompactnessVerdict::NotPrecompact(CompactnessWitness::TailFailure {
            epsilon: *epsilon,
            witnesses: witnesses.clone(),
        })
    } else if let Some(SetTail::Inconclusive { epsilon, reason }) =
        tails.iter().find(|t| matches!(t, SetTail::Inconclusive { .. }))
    {
        CompactnessVerdict::Inconclusive(CompactnessBlocker {
            reason: reason.clone(),
            blocking_epsilon: Some(*epsilon),
        })
    } else if persistent_tail(set).is_some_and(|v| v > 0.0) {
        // every grid eps is above the tail size, which never shrinks
        let witnesses = witnesses(set, config.k_max, slack);
        let epsilon = witnesses.iter().map(|w| w.lower_bound).fold(f64::INFINITY, f64::min);
        if epsilon > 0.0 {
            CompactnessVerdict::NotPrecompact(CompactnessWitness::TailFailure { epsilon, witnesses })
        } else {
            CompactnessVerdict::Inconclusive(CompactnessBlocker {
                reason: "tail size below floating-point resolution".to_string(),
                blocking_epsilon: None,
            })
        }
    } else {
        CompactnessVerdict::Precompact(PrecompactCertificate {
            norm_bound,
            rows: tails
                .iter()
                .map(|t| match *t {
                    SetTail::Bound { epsilon, k0 } => PrecompactRow { epsilon, k0 },
                    _ => unreachable!(),
                })
                .collect(),
        })
    };
    Ok(CompactnessReport {
        norm_bound,
        tails,
        verdict,
    })
}

pub fn check_precompact(set: &SetDescriptor, config: &CheckConfig) -> Result<CompactnessVerdict> {
    Ok(analyze_set(set, config)?.verdict)
}

impl CompactnessWitness {
    /// Every witness lies in the set and has the claimed tail.
    pub fn recheck(&self, set: &SetDescriptor, slack: Slack) -> bool {
        let CompactnessWitness::TailFailure { epsilon, witnesses } = self;
        !witnesses.is_empty()
            && witnesses.iter().enumerate().all(|(i, w)| {
                w.k == i
                    && w.lower_bound >= *epsilon
                    && set.contains(&w.member, slack)
                    && w.member.tail_norm_bounds(w.k, slack).lo >= w.lower_bound
            })
    }
}
