//! Schauder expansions in the standard bases, and a finite rotation of the
//! ℓ₂ basis.

use serde::{Deserialize, Serialize};

use crate::element::{Interval, NormInterval, SeqElement, Slack};
use crate::error::{Error, Result};
use crate::space::{Norm, SpaceKind};
use crate::tail::Envelope;

/// Orthogonal `d x d` matrix `Q`. Basis vector `b_i` is row `i` of `Q`
/// (padded with zeros), so the coordinates of `x` are `Q x_head`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Rotation {
    matrix: Vec<Vec<f64>>,
}

impl Rotation {
    pub fn new(matrix: Vec<Vec<f64>>, slack: Slack) -> Result<Rotation> {
        let d = matrix.len();
        if d == 0 {
            return Err(Error::invalid("basis", "rotation matrix is empty"));
        }
        if let Some(i) = matrix.iter().position(|row| row.len() != d) {
            return Err(Error::invalid(
                "basis",
                format!("rotation row {} has length {}, expected {d}", i + 1, matrix[i].len()),
            ));
        }
        if matrix.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid("basis", "rotation entries must be finite"));
        }
        for i in 0..d {
            for j in 0..d {
                let dot: f64 = (0..d).map(|r| matrix[r][i] * matrix[r][j]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                if (dot - want).abs() > slack.value() {
                    return Err(Error::invalid(
                        "basis",
                        format!("rotation columns {} and {} are not orthonormal ({dot})", i + 1, j + 1),
                    ));
                }
            }
        }
        Ok(Rotation { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    /// `(Q x)_i` for `i` in `1..=d`, with interval entries.
    fn coordinate(&self, x: &SeqElement, i: usize) -> Interval {
        let row = &self.matrix[i - 1];
        let (mut lo, mut hi) = (0.0, 0.0);
        for (j, q) in row.iter().enumerate() {
            let t = x.term(j + 1);
            let (a, b) = (q * t.lo, q * t.hi);
            lo += a.min(b);
            hi += a.max(b);
        }
        // rounding in the d-term sums
        let pad = (self.dim() as f64 + 2.0) * f64::EPSILON * (lo.abs().max(hi.abs()));
        Interval { lo: lo - pad, hi: hi + pad }
    }

    /// `sum_i c_i b_i` restricted to the first `d` coordinates.
    fn synthesize(&self, coords: &[f64]) -> Vec<f64> {
        let d = self.dim();
        (0..d)
            .map(|j| {
                coords
                    .iter()
                    .take(d)
                    .enumerate()
                    .map(|(i, c)| c * self.matrix[i][j])
                    .sum()
            })
            .collect()
    }
}

impl TryFrom<Vec<Vec<f64>>> for Rotation {
    type Error = Error;

    fn try_from(matrix: Vec<Vec<f64>>) -> Result<Rotation> {
        Rotation::new(matrix, Slack::DEFAULT)
    }
}

impl From<Rotation> for Vec<Vec<f64>> {
    fn from(r: Rotation) -> Self {
        r.matrix
    }
}

/// `{"family": "standard" | "c_standard"}` or
/// `{"family": "rotation", "matrix": [[...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "matrix", rename_all = "snake_case")]
pub enum BasisFamily {
    #[serde(rename = "standard")]
    StandardUnitVectors,
    /// `e_0 = (1, 1, ...)` followed by the unit vectors; the basis of `c`.
    CStandard,
    #[serde(rename = "rotation")]
    FiniteRotation(Rotation),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisDescriptor {
    space: SpaceKind,
    family: BasisFamily,
}

/// The constant bounding `||S_K||` by itself and `||R_K||` by twice itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisConstant(pub f64);

impl BasisDescriptor {
    /// The standard basis of `space` (`CStandard` for `c`).
    pub fn standard(space: SpaceKind) -> BasisDescriptor {
        let family = if space.has_limit() {
            BasisFamily::CStandard
        } else {
            BasisFamily::StandardUnitVectors
        };
        BasisDescriptor { space, family }
    }

    pub fn new(space: SpaceKind, family: BasisFamily) -> Result<BasisDescriptor> {
        space.validate()?;
        match (&family, space) {
            (BasisFamily::CStandard, SpaceKind::C) => {}
            (BasisFamily::CStandard, _) => {
                return Err(Error::invalid("basis", format!("c_standard is the basis of c, not {space}")))
            }
            (BasisFamily::StandardUnitVectors, SpaceKind::C) => {
                return Err(Error::invalid(
                    "basis",
                    "the unit vectors alone do not span c; use c_standard",
                ))
            }
            (BasisFamily::FiniteRotation(_), s) if s.norm() != Norm::P(2.0) => {
                return Err(Error::invalid("basis", format!("rotations need a Hilbert space, not {space}")))
            }
            _ => {}
        }
        Ok(BasisDescriptor { space, family })
    }

    pub fn space(&self) -> SpaceKind {
        self.space
    }

    pub fn family(&self) -> &BasisFamily {
        &self.family
    }

    pub fn constant(&self) -> BasisConstant {
        BasisConstant(1.0)
    }

    fn rotation(&self) -> Option<&Rotation> {
        match &self.family {
            BasisFamily::FiniteRotation(r) => Some(r),
            _ => None,
        }
    }

    fn check(&self, x: &SeqElement) -> Result<()> {
        if self.space.same_norm_space(&x.space()) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch {
                expected: self.space,
                found: x.space(),
            })
        }
    }

    /// Coordinate functional `c_k`; `k = 0` exists only for `c`.
    pub fn coordinate(&self, x: &SeqElement, k: usize) -> Result<Interval> {
        self.check(x)?;
        match self.rotation() {
            Some(rot) if (1..=rot.dim()).contains(&k) => Ok(rot.coordinate(x, k)),
            _ => x.coordinate(k),
        }
    }

    /// `S_K x = sum_{k <= K} c_k(x) e_k`.
    pub fn apply_s(&self, x: &SeqElement, k: usize) -> Result<SeqElement> {
        self.check(x)?;
        if let Some(rot) = self.rotation() {
            if k < rot.dim() {
                let head = x.extended(rot.dim())?;
                let coords: Vec<f64> = (1..=k).map(|i| rot.coordinate(&head, i).mid()).collect();
                let prefix = rot.synthesize(&coords);
                return Ok(SeqElement::from_parts(x.space(), prefix, 0.0, Envelope::zero()));
            }
        }
        let m = x.prefix_len();
        Ok(if k <= m {
            SeqElement::from_parts(x.space(), x.prefix()[..k].to_vec(), x.limit(), Envelope::zero())
        } else {
            SeqElement::from_parts(x.space(), x.prefix().to_vec(), x.limit(), x.tail().truncated(k))
        })
    }

    /// `R_K x = x - S_K x`.
    pub fn apply_r(&self, x: &SeqElement, k: usize) -> Result<SeqElement> {
        self.check(x)?;
        if let Some(rot) = self.rotation() {
            if k < rot.dim() {
                let head = x.extended(rot.dim())?;
                return head.checked_sub(&self.apply_s(&head, k)?);
            }
        }
        let limit = x.limit();
        let mut prefix = vec![0.0; k];
        prefix.extend(x.prefix().iter().skip(k).map(|v| v - limit));
        Ok(SeqElement::from_parts(x.space(), prefix, 0.0, x.tail().clone()))
    }

    /// Coordinates `c_1..c_K` (`c_0..c_K` in `c`), each determined to
    /// within the slack.
    pub fn expand(&self, x: &SeqElement, k: usize, slack: Slack) -> Result<Vec<f64>> {
        self.check(x)?;
        (self.space.first_coordinate()..=k)
            .map(|i| {
                let c = self.coordinate(x, i)?;
                if c.width() > slack.value() {
                    Err(Error::Undetermined {
                        index: i,
                        tolerance: slack.value(),
                    })
                } else {
                    Ok(c.mid())
                }
            })
            .collect()
    }

    /// `sum_k coords[k-1] e_k`, plus `limit_coord * e_0` in `c`.
    pub fn reconstruct(&self, coords: &[f64], limit_coord: Option<f64>) -> Result<SeqElement> {
        if coords.iter().chain(limit_coord.iter()).any(|v| !v.is_finite()) {
            return Err(Error::invalid("coordinates", "coordinates must be finite"));
        }
        match (&self.family, limit_coord) {
            (BasisFamily::CStandard, l) => {
                let l = l.unwrap_or(0.0);
                let prefix = coords.iter().map(|c| c + l).collect();
                Ok(SeqElement::from_parts(self.space, prefix, l, Envelope::zero()))
            }
            (_, Some(_)) => Err(Error::invalid(
                "coordinates",
                "a limit coordinate only exists for the basis of c",
            )),
            (BasisFamily::StandardUnitVectors, None) => {
                Ok(SeqElement::from_parts(self.space, coords.to_vec(), 0.0, Envelope::zero()))
            }
            (BasisFamily::FiniteRotation(rot), None) => {
                let mut prefix = rot.synthesize(coords);
                if coords.len() > rot.dim() {
                    prefix.extend_from_slice(&coords[rot.dim()..]);
                }
                Ok(SeqElement::from_parts(self.space, prefix, 0.0, Envelope::zero()))
            }
        }
    }

    /// Enclosure of `||x||_Y = sup_n ||S_n x||`: `lo` from `n <= N`, `hi`
    /// also covering every `n > N` through `||S_n x|| <= ||S_N x|| + ||R_N x||`
    /// and `||S_n x|| <= ||x||`.
    pub fn y_norm(&self, x: &SeqElement, n_max: usize, slack: Slack) -> Result<NormInterval> {
        if n_max == 0 {
            return Err(Error::invalid("y_norm", "N must be at least 1"));
        }
        let mut lo = 0.0f64;
        let mut hi = 0.0f64;
        let mut last_hi = 0.0;
        for n in 1..=n_max {
            let b = self.apply_s(x, n)?.norm_bounds(slack);
            lo = lo.max(b.lo);
            hi = hi.max(b.hi);
            last_hi = b.hi;
        }
        let rest = self.apply_r(x, n_max)?.norm_bounds(slack).hi;
        let beyond = (self.constant().0 * x.norm_bounds(slack).hi).min(last_hi + rest);
        Ok(NormInterval {
            lo,
            hi: hi.max(beyond),
        })
    }
}
