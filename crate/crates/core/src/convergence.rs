//! Deciding `x_n -> x` from coordinate convergence plus uniformly small
//! tails, with re-checkable certificates and witnesses.

use serde::{Deserialize, Serialize};

use crate::config::CheckConfig;
use crate::element::{NormInterval, SeqElement, Slack};
use crate::error::{Error, Result};
use crate::family::{CoordinateForm, CoordinateLimit, Family, Generator, Rate, UniformTail};
use crate::space::{Norm, SpaceKind};

/// Upper end of the tail-index search.
pub const K_SEARCH_CAP: usize = 1 << 40;
/// Largest split index a convergence certificate may use.
pub const SPLIT_CAP: usize = 1 << 16;
/// Upper end of the member-index search.
pub const N_SEARCH_CAP: usize = 1 << 53;

/// Member indices probed when re-checking a coordinate gap.
const GAP_PROBES: [usize; 6] = [10, 100, 1_000, 10_000, 100_000, 1_000_000];

/// Which characterization is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decider {
    /// Any space: Schauder coordinates and tail norms.
    General,
    /// `lp`: p-th power tail sums.
    Lp,
    /// `c0`: sup tails.
    C0,
    /// Hilbert space: squared Fourier tails compared against `eps` itself.
    Hilbert,
    /// `c`: raw terms plus the limit, recentred sup tails.
    C,
}

/// How `||R_K x||` is compared against `eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TailForm {
    Norm,
    /// `||R_K x||^exponent`.
    PowerSum { exponent: f64 },
}

impl TailForm {
    pub fn apply(&self, norm: f64) -> f64 {
        match *self {
            TailForm::Norm => norm,
            TailForm::PowerSum { exponent } => norm.powf(exponent),
        }
    }
}

impl Decider {
    /// The specialised decider for `space`.
    pub fn for_space(space: SpaceKind) -> Decider {
        match space {
            SpaceKind::Lp { .. } => Decider::Lp,
            SpaceKind::C0 => Decider::C0,
            SpaceKind::C => Decider::C,
            SpaceKind::Hilbert => Decider::Hilbert,
        }
    }

    pub fn check_space(&self, space: SpaceKind) -> Result<()> {
        let ok = match self {
            Decider::General => true,
            Decider::Lp => matches!(space, SpaceKind::Lp { .. }),
            Decider::C0 => space == SpaceKind::C0,
            Decider::Hilbert => space == SpaceKind::Hilbert,
            Decider::C => space == SpaceKind::C,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(
                "decider",
                format!("the {self:?} decider does not apply to {space}"),
            ))
        }
    }

    pub fn coordinate_form(&self) -> CoordinateForm {
        match self {
            Decider::C => CoordinateForm::Termwise,
            _ => CoordinateForm::Schauder,
        }
    }

    pub fn tail_form(&self, space: SpaceKind) -> TailForm {
        match (self, space.norm()) {
            (Decider::Lp, Norm::P(p)) => TailForm::PowerSum { exponent: p },
            (Decider::Hilbert, _) => TailForm::PowerSum { exponent: 2.0 },
            _ => TailForm::Norm,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CoordinateStatus {
    /// `|c_k(x_n) - c_k(x)| <= offset + rate(n)` for every `n`.
    CertifiedPass { rate: Rate, offset: f64 },
    /// `limsup_n |c_k(x_n) - c_k(x)| >= gap`.
    CertifiedFail { gap: f64 },
    /// Last listed member agrees with the candidate to within `delta`.
    EmpiricalPass { difference: f64 },
    EmpiricalFail { difference: f64 },
    Undetermined { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoordinateResult {
    pub k: usize,
    #[serde(flatten)]
    pub status: CoordinateStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition1 {
    pub results: Vec<CoordinateResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notice: Option<String>,
}

impl Condition1 {
    pub fn all_certified(&self) -> bool {
        self.notice.is_none()
            && self
                .results
                .iter()
                .all(|r| matches!(r.status, CoordinateStatus::CertifiedPass { .. }))
    }

    pub fn first_failure(&self) -> Option<(usize, f64)> {
        self.results.iter().find_map(|r| match r.status {
            CoordinateStatus::CertifiedFail { gap } => Some((r.k, gap)),
            _ => None,
        })
    }
}

fn coordinate_status(
    family: &Family,
    candidate: &SeqElement,
    form: CoordinateForm,
    k: usize,
    delta: f64,
    slack: Slack,
) -> Result<CoordinateStatus> {
    if let Family::Parametric {
        generator: Generator::Constant(v),
        ..
    } = family
    {
        if v == candidate {
            return Ok(CoordinateStatus::CertifiedPass {
                rate: Rate::Zero,
                offset: 0.0,
            });
        }
    }
    let target = form.read(candidate, k);
    if target.width() > slack.value() {
        return Ok(CoordinateStatus::Undetermined {
            reason: format!("candidate coordinate {k} is not determined to within the slack"),
        });
    }
    let undetermined = |what: &str| CoordinateStatus::Undetermined {
        reason: format!("{what} at coordinate {k}"),
    };
    match family {
        Family::Parametric { .. } => match family.coordinate_limit(k, form) {
            Some(CoordinateLimit::Tends { limit, rate }) => {
                let d = limit.sub(&target);
                Ok(if d.mag_hi() <= slack.value() {
                    CoordinateStatus::CertifiedPass {
                        rate,
                        offset: d.mag_hi(),
                    }
                } else if d.mag_lo() >= delta {
                    CoordinateStatus::CertifiedFail { gap: d.mag_lo() }
                } else {
                    undetermined("coordinate limit within delta of the candidate")
                })
            }
            Some(CoordinateLimit::Clusters(values)) => {
                let gap = values
                    .iter()
                    .map(|v| v.distance_lo(&target))
                    .fold(0.0, f64::max);
                let spread = values
                    .iter()
                    .map(|v| v.sub(&target).mag_hi())
                    .fold(0.0, f64::max);
                Ok(if gap >= delta {
                    CoordinateStatus::CertifiedFail { gap }
                } else if spread <= slack.value() {
                    CoordinateStatus::CertifiedPass {
                        rate: Rate::Zero,
                        offset: spread,
                    }
                } else {
                    undetermined("cluster points within delta of the candidate")
                })
            }
            None => Ok(undetermined("no closed form")),
        },
        Family::Finite(f) => {
            if let Some(rate) = f.discrepancy().and_then(|d| d.rate(k)) {
                for (i, m) in f.members().iter().enumerate() {
                    let d = form.read(m, k).sub(&target);
                    let bound = rate.eval(i + 1) + slack.value();
                    if d.mag_lo() > bound {
                        return Err(Error::invalid(
                            "family",
                            format!(
                                "discrepancy envelope at coordinate {k} is contradicted by member {} ({} > {bound})",
                                i + 1,
                                d.mag_lo()
                            ),
                        ));
                    }
                }
                return Ok(CoordinateStatus::CertifiedPass { rate, offset: 0.0 });
            }
            let Some(last) = f.members().last() else {
                return Ok(undetermined("no members"));
            };
            let d = form.read(last, k).sub(&target);
            Ok(if d.width() > slack.value() {
                undetermined("last member not determined")
            } else if d.mag_hi() <= delta {
                CoordinateStatus::EmpiricalPass {
                    difference: d.mag_hi(),
                }
            } else {
                CoordinateStatus::EmpiricalFail {
                    difference: d.mag_lo(),
                }
            })
        }
    }
}

/// Condition (1) for `k` up to `k_max` (from 0 in `c`). Stops at the first
/// coordinate that cannot be determined.
pub fn check_condition1(
    family: &Family,
    candidate: &SeqElement,
    form: CoordinateForm,
    k_max: usize,
    delta: f64,
    slack: Slack,
) -> Result<Condition1> {
    family_candidate_space(family, candidate)?;
    let mut results = Vec::new();
    let mut notice = None;
    for k in family.space().first_coordinate()..=k_max {
        let status = coordinate_status(family, candidate, form, k, delta, slack)?;
        let stop = matches!(status, CoordinateStatus::Undetermined { .. });
        results.push(CoordinateResult { k, status });
        if stop {
            notice = Some(format!(
                "coordinate {k} could not be determined; results end there"
            ));
            break;
        }
    }
    Ok(Condition1 { results, notice })
}

fn family_candidate_space(family: &Family, candidate: &SeqElement) -> Result<()> {
    if family.space() == candidate.space() {
        Ok(())
    } else {
        Err(Error::SpaceMismatch {
            expected: family.space(),
            found: candidate.space(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailPair {
    pub k: usize,
    pub n: usize,
    pub lower_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum TailCheck {
    /// `sup_n ||R_K x_n|| < eps` for every `K >= k0`; `certified` is false
    /// when only the listed members were examined.
    Bound { epsilon: f64, k0: usize, certified: bool },
    /// For every `K`, `||R_K x_n|| >= eps` at the paired member.
    Fails { epsilon: f64, pairs: Vec<TailPair> },
    Inconclusive { epsilon: f64, reason: String },
}

impl TailCheck {
    pub fn epsilon(&self) -> f64 {
        match *self {
            TailCheck::Bound { epsilon, .. }
            | TailCheck::Fails { epsilon, .. }
            | TailCheck::Inconclusive { epsilon, .. } => epsilon,
        }
    }
}

/// Smallest `k <= cap` with `f(k) < eps`, for nonincreasing `f`: doubling,
/// then bisection.
pub(crate) fn first_below(f: impl Fn(usize) -> f64, eps: f64, cap: usize) -> Option<usize> {
    if f(0) < eps {
        return Some(0);
    }
    let (mut lo, mut hi) = (0usize, 1usize);
    while f(hi) >= eps {
        if hi >= cap {
            return None;
        }
        lo = hi;
        hi = hi.saturating_mul(2).min(cap);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if f(mid) < eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// `(K, K + 1, ||R_K x_{K+1}||)` for `K <= k_max`.
fn persistent_pairs(family: &Family, tail_form: TailForm, k_max: usize, slack: Slack) -> Vec<TailPair> {
    (0..=k_max)
        .filter_map(|k| {
            let member = family.member(k + 1)?;
            Some(TailPair {
                k,
                n: k + 1,
                lower_bound: tail_form.apply(member.tail_norm_bounds(k, slack).lo),
            })
        })
        .collect()
}

/// Condition (2) at one `eps`.
pub fn check_condition2(
    family: &Family,
    epsilon: f64,
    tail_form: TailForm,
    k_max: usize,
    slack: Slack,
) -> Result<TailCheck> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::invalid("epsilon", format!("must be positive, got {epsilon}")));
    }
    let too_far = || TailCheck::Inconclusive {
        epsilon,
        reason: format!("no tail index up to {K_SEARCH_CAP} brings the tails below eps"),
    };
    Ok(match family.uniform_tail_data() {
        UniformTail::Majorant(m) => {
            let f = |k| tail_form.apply(m.tail_norm_bounds(k, slack).hi);
            match first_below(f, epsilon, K_SEARCH_CAP) {
                Some(k0) => TailCheck::Bound {
                    epsilon,
                    k0,
                    certified: true,
                },
                None => too_far(),
            }
        }
        UniformTail::MembersOnly => {
            let Family::Finite(f) = family else {
                unreachable!("only finite families lack closed-form tails")
            };
            let g = |k| {
                f.members()
                    .iter()
                    .map(|m| tail_form.apply(m.tail_norm_bounds(k, slack).hi))
                    .fold(0.0, f64::max)
            };
            match first_below(g, epsilon, K_SEARCH_CAP) {
                Some(k0) => TailCheck::Bound {
                    epsilon,
                    k0,
                    certified: false,
                },
                None => too_far(),
            }
        }
        UniformTail::Persistent(v) => {
            if tail_form.apply(v + slack.value()) < epsilon {
                TailCheck::Bound {
                    epsilon,
                    k0: 0,
                    certified: true,
                }
            } else {
                let pairs = persistent_pairs(family, tail_form, k_max, slack);
                if pairs.iter().all(|p| p.lower_bound >= epsilon) {
                    TailCheck::Fails { epsilon, pairs }
                } else {
                    TailCheck::Inconclusive {
                        epsilon,
                        reason: "persistent tail within rounding of eps".to_string(),
                    }
                }
            }
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateRow {
    pub epsilon: f64,
    /// Tail index from condition (2).
    pub k0: usize,
    /// `K` with `||R_K x_n|| < eps/3` for all `n` and `||R_K x|| < eps/3`.
    pub split_index: usize,
    /// `||x_n - x|| < eps` for every `n >= threshold_n`.
    pub threshold_n: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceCertificate {
    pub k0: usize,
    pub epsilon_checked: Vec<f64>,
    pub coord_index_checked: usize,
    pub rows: Vec<CertificateRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "witness", rename_all = "snake_case")]
pub enum Witness {
    CoordinateGap { k: usize, gap: f64 },
    /// Coordinate gap in the limit functional of `c`.
    LimitGap { gap: f64 },
    TailLowerBound { epsilon: f64, pairs: Vec<TailPair> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Blocker {
    pub reason: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocking_epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocking_coordinate: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "certificate", rename_all = "snake_case")]
pub enum Verdict {
    Converges(ConvergenceCertificate),
    Diverges(Witness),
    Inconclusive(Blocker),
}

impl Verdict {
    pub fn tag(&self) -> &'static str {
        match self {
            Verdict::Converges(_) => "converges",
            Verdict::Diverges(_) => "diverges",
            Verdict::Inconclusive(_) => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub decider: Decider,
    pub condition1: Condition1,
    pub condition2: Vec<TailCheck>,
    #[serde(flatten)]
    pub verdict: Verdict,
}

fn inconclusive(reason: impl Into<String>, eps: Option<f64>, k: Option<usize>) -> Verdict {
    Verdict::Inconclusive(Blocker {
        reason: reason.into(),
        blocking_epsilon: eps,
        blocking_coordinate: k,
    })
}

/// Full analysis: both conditions and the verdict.
pub fn analyze(
    decider: Decider,
    family: &Family,
    candidate: &SeqElement,
    config: &CheckConfig,
) -> Result<ConvergenceReport> {
    config.validate()?;
    decider.check_space(family.space())?;
    family_candidate_space(family, candidate)?;
    let space = family.space();
    let form = decider.coordinate_form();
    let tail_form = decider.tail_form(space);
    let slack = config.slack;

    let condition1 = check_condition1(family, candidate, form, config.k_max, config.delta, slack)?;
    let condition2 = config
        .eps_grid
        .iter()
        .map(|&eps| check_condition2(family, eps, tail_form, config.k_max, slack))
        .collect::<Result<Vec<_>>>()?;

    let verdict = if let Some((k, gap)) = condition1.first_failure() {
        Verdict::Diverges(if k == 0 && space.has_limit() {
            Witness::LimitGap { gap }
        } else {
            Witness::CoordinateGap { k, gap }
        })
    } else if let Some(TailCheck::Fails { epsilon, pairs }) =
        condition2.iter().find(|t| matches!(t, TailCheck::Fails { .. }))
    {
        Verdict::Diverges(Witness::TailLowerBound {
            epsilon: *epsilon,
            pairs: pairs.clone(),
        })
    } else if let UniformTail::Persistent(_) = family.uniform_tail_data() {
        // the grid is too coarse to see it, but tails stay at a fixed size
        let pairs = persistent_pairs(family, tail_form, config.k_max, slack);
        let epsilon = pairs.iter().map(|p| p.lower_bound).fold(f64::INFINITY, f64::min);
        if epsilon > 0.0 && epsilon.is_finite() {
            Verdict::Diverges(Witness::TailLowerBound { epsilon, pairs })
        } else {
            inconclusive("persistent tail has no positive lower bound", None, None)
        }
    } else {
        converges_or_block(family, candidate, form, &condition1, &condition2, config)?
    };
    Ok(ConvergenceReport {
        decider,
        condition1,
        condition2,
        verdict,
    })
}

fn converges_or_block(
    family: &Family,
    candidate: &SeqElement,
    form: CoordinateForm,
    condition1: &Condition1,
    condition2: &[TailCheck],
    config: &CheckConfig,
) -> Result<Verdict> {
    if let Some(r) = condition1
        .results
        .iter()
        .find(|r| !matches!(r.status, CoordinateStatus::CertifiedPass { .. }))
    {
        let reason = match &r.status {
            CoordinateStatus::Undetermined { reason } => reason.clone(),
            _ => format!("coordinate {} has only empirical evidence", r.k),
        };
        return Ok(inconclusive(reason, None, Some(r.k)));
    }
    for t in condition2 {
        match t {
            TailCheck::Bound {
                certified: false,
                epsilon,
                ..
            } => {
                return Ok(inconclusive(
                    "tail bound rests on the listed members only",
                    Some(*epsilon),
                    None,
                ))
            }
            TailCheck::Inconclusive { epsilon, reason } => {
                return Ok(inconclusive(reason.clone(), Some(*epsilon), None))
            }
            _ => {}
        }
    }
    let UniformTail::Majorant(majorant) = family.uniform_tail_data() else {
        return Ok(inconclusive("no uniform tail majorant", None, None));
    };
    let slack = config.slack;
    let mut rows = Vec::new();
    let mut statuses: Vec<(Rate, f64)> = condition1
        .results
        .iter()
        .map(|r| match r.status {
            CoordinateStatus::CertifiedPass { rate, offset } => (rate, offset),
            _ => unreachable!(),
        })
        .collect();
    let first = family.space().first_coordinate();
    for t in condition2 {
        let &TailCheck::Bound { epsilon, k0, .. } = t else {
            unreachable!()
        };
        let third = epsilon / 3.0;
        let split = first_below(
            |k| {
                majorant
                    .tail_norm_bounds(k, slack)
                    .hi
                    .max(candidate.tail_norm_bounds(k, slack).hi)
            },
            third,
            SPLIT_CAP,
        );
        let Some(split) = split else {
            return Ok(inconclusive(
                format!("no split index up to {SPLIT_CAP} makes both tails smaller than eps/3"),
                Some(epsilon),
                None,
            ));
        };
        while first + statuses.len() <= split {
            let k = first + statuses.len();
            match coordinate_status(family, candidate, form, k, config.delta, slack)? {
                CoordinateStatus::CertifiedPass { rate, offset } => statuses.push((rate, offset)),
                _ => {
                    return Ok(inconclusive(
                        format!("coordinate {k}, needed for eps = {epsilon}, is not certified"),
                        Some(epsilon),
                        Some(k),
                    ))
                }
            }
        }
        let head = &statuses[..=split - first];
        let discrepancy = |j: usize| {
            let n = j + 1;
            head.iter().map(|(rate, offset)| offset + rate.eval(n)).sum::<f64>() + slack.value()
        };
        let Some(j) = first_below(discrepancy, third, N_SEARCH_CAP) else {
            return Ok(inconclusive(
                "coordinate discrepancies do not fall below eps/3",
                Some(epsilon),
                None,
            ));
        };
        rows.push(CertificateRow {
            epsilon,
            k0,
            split_index: split,
            threshold_n: (j + 1) as u64,
        });
    }
    Ok(Verdict::Converges(ConvergenceCertificate {
        k0: rows.iter().map(|r| r.k0).max().unwrap_or(0),
        epsilon_checked: config.eps_grid.clone(),
        coord_index_checked: first + statuses.len() - 1,
        rows,
    }))
}

pub fn decide(
    decider: Decider,
    family: &Family,
    candidate: &SeqElement,
    config: &CheckConfig,
) -> Result<Verdict> {
    Ok(analyze(decider, family, candidate, config)?.verdict)
}

pub fn decide_convergence(family: &Family, candidate: &SeqElement, config: &CheckConfig) -> Result<Verdict> {
    decide(Decider::General, family, candidate, config)
}

pub fn decide_lp(family: &Family, candidate: &SeqElement, config: &CheckConfig) -> Result<Verdict> {
    decide(Decider::Lp, family, candidate, config)
}

pub fn decide_c0(family: &Family, candidate: &SeqElement, config: &CheckConfig) -> Result<Verdict> {
    decide(Decider::C0, family, candidate, config)
}

pub fn decide_hilbert(family: &Family, candidate: &SeqElement, config: &CheckConfig) -> Result<Verdict> {
    decide(Decider::Hilbert, family, candidate, config)
}

pub fn decide_c(family: &Family, candidate: &SeqElement, config: &CheckConfig) -> Result<Verdict> {
    decide(Decider::C, family, candidate, config)
}

/// Enclosure of `||x_n - x||`, `None` past the end of a finite family.
pub fn direct_distance(
    family: &Family,
    candidate: &SeqElement,
    n: usize,
    slack: Slack,
) -> Result<Option<NormInterval>> {
    family
        .member(n)
        .map(|m| m.distance_bounds(candidate, slack))
        .transpose()
}

/// `||x_n - x||` for `n = 1..=n_max` (fewer for short finite families).
pub fn direct_norm_check(
    family: &Family,
    candidate: &SeqElement,
    n_max: usize,
    slack: Slack,
) -> Result<Vec<NormInterval>> {
    family_candidate_space(family, candidate)?;
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        match direct_distance(family, candidate, n, slack)? {
            Some(d) => out.push(d),
            None => break,
        }
    }
    Ok(out)
}

impl Witness {
    /// Re-derives the witness from the family data.
    pub fn recheck(
        &self,
        decider: Decider,
        family: &Family,
        candidate: &SeqElement,
        slack: Slack,
    ) -> Result<bool> {
        family_candidate_space(family, candidate)?;
        let space = family.space();
        match self {
            Witness::CoordinateGap { k, gap } => Ok(recheck_gap(decider, family, candidate, *k, *gap, slack)),
            Witness::LimitGap { gap } => {
                Ok(space.has_limit() && recheck_gap(decider, family, candidate, 0, *gap, slack))
            }
            Witness::TailLowerBound { epsilon, pairs } => {
                let tail_form = decider.tail_form(space);
                Ok(!pairs.is_empty()
                    && pairs.iter().enumerate().all(|(i, p)| {
                        p.k == i
                            && p.lower_bound >= *epsilon
                            && family.member(p.n).is_some_and(|m| {
                                tail_form.apply(m.tail_norm_bounds(p.k, slack).lo) >= p.lower_bound
                            })
                    }))
            }
        }
    }
}

fn recheck_gap(
    decider: Decider,
    family: &Family,
    candidate: &SeqElement,
    k: usize,
    gap: f64,
    slack: Slack,
) -> bool {
    let form = decider.coordinate_form();
    let target = form.read(candidate, k);
    let rate = match family.coordinate_limit(k, form) {
        Some(CoordinateLimit::Tends { rate, .. }) => rate,
        _ => Rate::Zero,
    };
    let probe = |n: usize| family.member(n).map(|m| form.read(&m, k).sub(&target).mag_lo());
    match family.len() {
        Some(len) => {
            // a finite family can only exhibit the gap among its members
            (1..=len).filter_map(probe).fold(0.0, f64::max) + slack.value() >= gap
        }
        None => GAP_PROBES.iter().all(|&n| {
            let seen = probe(n).unwrap_or(0.0).max(probe(n + 1).unwrap_or(0.0));
            seen + rate.eval(n) + slack.value() >= gap
        }),
    }
}

impl ConvergenceCertificate {
    /// Checks `||x_n - x|| < eps` directly at `n = N .. N + span` and at a
    /// few multiples of `N`, for every row.
    pub fn verify(&self, family: &Family, candidate: &SeqElement, span: usize, slack: Slack) -> Result<bool> {
        for row in &self.rows {
            let n0 = usize::try_from(row.threshold_n).unwrap_or(usize::MAX);
            let probes = (0..span)
                .map(|i| n0.saturating_add(i))
                .chain([2, 10, 1000].map(|f| n0.saturating_mul(f)));
            for n in probes {
                match direct_distance(family, candidate, n, slack)? {
                    Some(d) if d.hi >= row.epsilon => return Ok(false),
                    _ => {}
                }
            }
        }
        Ok(true)
    }
}
