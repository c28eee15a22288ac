//! Sampling lower bounds on operator norms.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::basis::{BasisDescriptor, BasisFamily};
use crate::element::{SeqElement, Slack};
use crate::error::{Error, Result};
use crate::tail::Envelope;

/// Largest support of a sampled element.
pub const MAX_SUPPORT: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", content = "index", rename_all = "snake_case")]
pub enum Operator {
    PartialSum(usize),
    Remainder(usize),
    /// The coordinate functional `c_k`.
    Coordinate(usize),
    /// `S_K + R_K`.
    Identity(usize),
}

impl Operator {
    fn index(&self) -> usize {
        match *self {
            Operator::PartialSum(k)
            | Operator::Remainder(k)
            | Operator::Coordinate(k)
            | Operator::Identity(k) => k,
        }
    }

    /// `||op(x)||`, or `|c_k(x)|` for a functional, as a lower estimate.
    pub fn apply_lo(&self, basis: &BasisDescriptor, x: &SeqElement, slack: Slack) -> Result<f64> {
        Ok(match *self {
            Operator::PartialSum(k) => basis.apply_s(x, k)?.norm_bounds(slack).lo,
            Operator::Remainder(k) => basis.apply_r(x, k)?.norm_bounds(slack).lo,
            Operator::Coordinate(k) => basis.coordinate(x, k)?.mag_lo(),
            Operator::Identity(k) => basis
                .apply_s(x, k)?
                .checked_add(&basis.apply_r(x, k)?)?
                .norm_bounds(slack)
                .lo,
        })
    }
}

/// Random element with support of size `1..=32` among the first `dim`
/// coordinates and entries uniform on `[-1, 1]`. In `c` the limit is zero
/// half of the time and uniform on `[-1, 1]` otherwise; off the support the
/// sequence sits at its limit.
pub fn sample_element(basis: &BasisDescriptor, dim: usize, rng: &mut ChaCha8Rng) -> SeqElement {
    let space = basis.space();
    let limit = if space.has_limit() && rng.random_bool(0.5) {
        rng.random_range(-1.0..=1.0)
    } else {
        0.0
    };
    let size = rng.random_range(1..=MAX_SUPPORT.min(dim));
    let mut prefix = vec![limit; dim];
    for i in sample(rng, dim, size) {
        prefix[i] = rng.random_range(-1.0..=1.0);
    }
    SeqElement::from_parts(space, prefix, limit, Envelope::zero())
}

/// Maximum of `||op(x)|| / ||x||` over `trials` sampled elements. Trial `t`
/// draws from a generator seeded by `(seed, t)`, so the result does not
/// depend on how trials are scheduled.
pub fn estimate_operator_norm(
    op: Operator,
    basis: &BasisDescriptor,
    trials: usize,
    seed: u64,
    slack: Slack,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::invalid("trials", "at least one trial is required"));
    }
    if matches!(op, Operator::Coordinate(0)) && !basis.space().has_limit() {
        return Err(Error::Index {
            index: 0,
            space: basis.space(),
        });
    }
    let d = match basis.family() {
        BasisFamily::FiniteRotation(r) => r.dim(),
        _ => 0,
    };
    let dim = op.index().max(d) + MAX_SUPPORT;
    let mut best = 0.0f64;
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t as u64);
        let x = sample_element(basis, dim, &mut rng);
        let norm = x.norm_bounds(slack).lo;
        if norm == 0.0 {
            continue;
        }
        let x = x.scaled(1.0 / norm);
        let ratio = op.apply_lo(basis, &x, slack)? / x.norm_bounds(slack).lo;
        best = best.max(ratio);
    }
    Ok(best)
}
