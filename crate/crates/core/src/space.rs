//! Sequence spaces and their norms.

use std::fmt;

use crate::error::{Error, Result};

/// The sequence spaces supported by the library.
///
/// `Hilbert` is ℓ₂ viewed through its inner product; as a normed space it
/// coincides with `Lp { p: 2.0 }`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpaceKind {
    Lp { p: f64 },
    C0,
    C,
    Hilbert,
}

/// Which norm a space carries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Norm {
    P(f64),
    Sup,
}

impl SpaceKind {
    pub fn lp(p: f64) -> Result<Self> {
        let space = SpaceKind::Lp { p };
        space.validate()?;
        Ok(space)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SpaceKind::Lp { p } if !(p.is_finite() && p >= 1.0) => Err(Error::invalid(
                "space",
                format!("lp requires a finite exponent p >= 1, got {p}"),
            )),
            _ => Ok(()),
        }
    }

    pub fn norm(&self) -> Norm {
        match *self {
            SpaceKind::Lp { p } => Norm::P(p),
            SpaceKind::Hilbert => Norm::P(2.0),
            SpaceKind::C0 | SpaceKind::C => Norm::Sup,
        }
    }

    /// Only `c` carries a limit functional.
    pub fn has_limit(&self) -> bool {
        matches!(self, SpaceKind::C)
    }

    /// Index of the first coordinate functional: 0 for `c` (the limit), 1 otherwise.
    pub fn first_coordinate(&self) -> usize {
        if self.has_limit() {
            0
        } else {
            1
        }
    }

    /// Same underlying normed space, possibly under a different label
    /// (ℓ₂ and `Hilbert`).
    pub fn same_norm_space(&self, other: &SpaceKind) -> bool {
        self == other || (self.norm() == Norm::P(2.0) && other.norm() == Norm::P(2.0))
    }
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceKind::Lp { p } => write!(f, "lp(p={p})"),
            SpaceKind::C0 => f.write_str("c0"),
            SpaceKind::C => f.write_str("c"),
            SpaceKind::Hilbert => f.write_str("hilbert"),
        }
    }
}

impl Norm {
    /// Contribution of one coordinate magnitude to the accumulator.
    pub(crate) fn weight(&self, magnitude: f64) -> f64 {
        match *self {
            Norm::P(1.0) => magnitude,
            Norm::P(2.0) => magnitude * magnitude,
            Norm::P(p) => magnitude.powf(p),
            Norm::Sup => magnitude,
        }
    }

    /// Folds accumulated weights: sum for p-norms, max for the sup-norm.
    pub(crate) fn combine(&self, acc: f64, weight: f64) -> f64 {
        match self {
            Norm::P(_) => acc + weight,
            Norm::Sup => acc.max(weight),
        }
    }

    pub(crate) fn finish(&self, acc: f64) -> f64 {
        match *self {
            Norm::P(1.0) => acc,
            Norm::P(2.0) => acc.sqrt(),
            Norm::P(p) => acc.powf(p.recip()),
            Norm::Sup => acc,
        }
    }

    /// Norm of the concatenation of two disjointly supported pieces with
    /// norms `a` and `b`.
    pub fn join(&self, a: f64, b: f64) -> f64 {
        match *self {
            Norm::P(_) => self.finish(self.weight(a) + self.weight(b)),
            Norm::Sup => a.max(b),
        }
    }
}
