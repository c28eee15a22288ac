//! Wire descriptors for elements, families and sets.
//!
//! Domain types deserialize through these descriptors (`try_from`), so every
//! document that parses also passes the domain invariants.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::compactness::SetDescriptor;
use crate::element::SeqElement;
use crate::error::{Error, Result};
use crate::family::{Discrepancy, Family, Generator, Rate};
use crate::space::SpaceKind;
use crate::tail::{Envelope, EnvelopeTerm, TailModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceTag {
    Lp,
    C0,
    C,
    Hilbert,
}

pub(crate) fn space_from(tag: SpaceTag, p: Option<f64>) -> Result<SpaceKind> {
    match (tag, p) {
        (SpaceTag::Lp, Some(p)) => SpaceKind::lp(p),
        (SpaceTag::Lp, None) => Err(Error::invalid("space", "lp requires the exponent field `p`")),
        (_, Some(p)) => Err(Error::invalid(
            "space",
            format!("exponent p = {p} is only meaningful for lp"),
        )),
        (SpaceTag::C0, None) => Ok(SpaceKind::C0),
        (SpaceTag::C, None) => Ok(SpaceKind::C),
        (SpaceTag::Hilbert, None) => Ok(SpaceKind::Hilbert),
    }
}

pub(crate) fn space_to(space: SpaceKind) -> (SpaceTag, Option<f64>) {
    match space {
        SpaceKind::Lp { p } => (SpaceTag::Lp, Some(p)),
        SpaceKind::C0 => (SpaceTag::C0, None),
        SpaceKind::C => (SpaceTag::C, None),
        SpaceKind::Hilbert => (SpaceTag::Hilbert, None),
    }
}

/// `{"type": "zero" | "geometric" | "power" | "sum", ...}`; `cutoff`
/// switches a term off past the given index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum TailDescriptor {
    Zero,
    Geometric {
        c: f64,
        r: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cutoff: Option<usize>,
    },
    Power {
        c: f64,
        s: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cutoff: Option<usize>,
    },
    Sum {
        terms: Vec<TailDescriptor>,
    },
}

impl TailDescriptor {
    fn zero() -> Self {
        TailDescriptor::Zero
    }

    fn push_terms(&self, out: &mut Vec<EnvelopeTerm>) {
        match *self {
            TailDescriptor::Zero => {}
            TailDescriptor::Geometric { c, r, cutoff } => out.push(EnvelopeTerm {
                model: TailModel::Geometric { c, r },
                cutoff,
            }),
            TailDescriptor::Power { c, s, cutoff } => out.push(EnvelopeTerm {
                model: TailModel::Power { c, s },
                cutoff,
            }),
            TailDescriptor::Sum { ref terms } => terms.iter().for_each(|t| t.push_terms(out)),
        }
    }

    fn from_term(term: &EnvelopeTerm) -> Self {
        match term.model {
            TailModel::Zero => TailDescriptor::Zero,
            TailModel::Geometric { c, r } => TailDescriptor::Geometric {
                c,
                r,
                cutoff: term.cutoff,
            },
            TailModel::Power { c, s } => TailDescriptor::Power {
                c,
                s,
                cutoff: term.cutoff,
            },
        }
    }
}

impl From<&TailDescriptor> for Envelope {
    fn from(d: &TailDescriptor) -> Self {
        let mut terms = Vec::new();
        d.push_terms(&mut terms);
        Envelope::from_terms(terms)
    }
}

impl From<&Envelope> for TailDescriptor {
    fn from(env: &Envelope) -> Self {
        match env.terms() {
            [] => TailDescriptor::Zero,
            [t] => TailDescriptor::from_term(t),
            terms => TailDescriptor::Sum {
                terms: terms.iter().map(TailDescriptor::from_term).collect(),
            },
        }
    }
}

/// `{"space", "p"?, "prefix", "limit"?, "tail"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementDescriptor {
    pub space: SpaceTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default)]
    pub prefix: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<f64>,
    #[serde(default = "TailDescriptor::zero")]
    pub tail: TailDescriptor,
}

impl TryFrom<ElementDescriptor> for SeqElement {
    type Error = Error;

    fn try_from(d: ElementDescriptor) -> Result<Self> {
        let space = space_from(d.space, d.p)?;
        SeqElement::new(space, d.prefix, d.limit, Envelope::from(&d.tail))
    }
}

impl From<SeqElement> for ElementDescriptor {
    fn from(x: SeqElement) -> Self {
        let (space, p) = space_to(x.space());
        ElementDescriptor {
            space,
            p,
            prefix: x.prefix().to_vec(),
            limit: x.space().has_limit().then_some(x.limit()),
            tail: TailDescriptor::from(x.tail()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorTag {
    Constant,
    Alternating,
    BasisShift,
    GeometricRamp,
    PlateauShift,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element: Option<SeqElement>,
}

/// Either `{"space", "members", "discrepancy"?, "uniform_tail"?}` or
/// `{"space", "generator", "params"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDescriptor {
    pub space: SpaceTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<SeqElement>>,
    /// Keys are coordinate indices or `"default"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discrepancy: Option<BTreeMap<String, Rate>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniform_tail: Option<TailModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorTag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<GeneratorParams>,
}

fn discrepancy_from(map: BTreeMap<String, Rate>) -> Result<Discrepancy> {
    let mut out = Discrepancy::default();
    for (key, rate) in map {
        if key == "default" {
            out.default = Some(rate);
        } else {
            let k = key.parse::<usize>().map_err(|_| {
                Error::invalid(
                    "family",
                    format!("discrepancy key `{key}` is neither an index nor \"default\""),
                )
            })?;
            out.per_coordinate.insert(k, rate);
        }
    }
    Ok(out)
}

fn generator_from(tag: GeneratorTag, params: GeneratorParams) -> Result<Generator> {
    let GeneratorParams {
        scale,
        a,
        limit,
        element,
    } = params;
    let unused = |name: &str, present: bool| -> Result<()> {
        if present {
            Err(Error::invalid(
                "generator",
                format!("parameter `{name}` is not used by this generator"),
            ))
        } else {
            Ok(())
        }
    };
    let need_element = |element: Option<SeqElement>| {
        element.ok_or_else(|| Error::invalid("generator", "parameter `element` is required"))
    };
    match tag {
        GeneratorTag::Constant | GeneratorTag::Alternating => {
            unused("scale", scale.is_some())?;
            unused("a", a.is_some())?;
            unused("limit", limit.is_some())?;
            let v = need_element(element)?;
            Ok(if tag == GeneratorTag::Constant {
                Generator::Constant(v)
            } else {
                Generator::Alternating(v)
            })
        }
        GeneratorTag::BasisShift => {
            unused("a", a.is_some())?;
            unused("limit", limit.is_some())?;
            unused("element", element.is_some())?;
            Ok(Generator::BasisShift {
                scale: scale.unwrap_or(1.0),
            })
        }
        GeneratorTag::GeometricRamp => {
            unused("element", element.is_some())?;
            let a = a.ok_or_else(|| Error::invalid("generator", "parameter `a` is required"))?;
            Ok(Generator::GeometricRamp {
                a,
                scale: scale.unwrap_or(1.0),
                limit: limit.unwrap_or(0.0),
            })
        }
        GeneratorTag::PlateauShift => {
            unused("scale", scale.is_some())?;
            unused("a", a.is_some())?;
            unused("limit", limit.is_some())?;
            unused("element", element.is_some())?;
            Ok(Generator::PlateauShift)
        }
    }
}

impl TryFrom<FamilyDescriptor> for Family {
    type Error = Error;

    fn try_from(d: FamilyDescriptor) -> Result<Self> {
        let space = space_from(d.space, d.p)?;
        match (d.members, d.generator) {
            (Some(members), None) => {
                if d.params.is_some() {
                    return Err(Error::invalid("family", "`params` requires `generator`"));
                }
                let mut family = Family::finite(space, members)?;
                if let Some(map) = d.discrepancy {
                    family = family.with_discrepancy(discrepancy_from(map)?)?;
                }
                if let Some(model) = d.uniform_tail {
                    family = family.with_uniform_tail(model)?;
                }
                Ok(family)
            }
            (None, Some(tag)) => {
                if d.discrepancy.is_some() || d.uniform_tail.is_some() {
                    return Err(Error::invalid(
                        "family",
                        "`discrepancy` and `uniform_tail` apply to member lists only",
                    ));
                }
                let generator = generator_from(tag, d.params.unwrap_or_default())?;
                Family::parametric(space, generator)
            }
            (Some(_), Some(_)) => Err(Error::invalid(
                "family",
                "give either `members` or `generator`, not both",
            )),
            (None, None) => Err(Error::invalid("family", "expected `members` or `generator`")),
        }
    }
}

impl From<Family> for FamilyDescriptor {
    fn from(f: Family) -> Self {
        let (space, p) = space_to(f.space());
        let mut d = FamilyDescriptor {
            space,
            p,
            members: None,
            discrepancy: None,
            uniform_tail: None,
            generator: None,
            params: None,
        };
        match f {
            Family::Finite(f) => {
                d.members = Some(f.members().to_vec());
                d.discrepancy = f.discrepancy().map(|disc| {
                    disc.default
                        .map(|r| ("default".to_string(), r))
                        .into_iter()
                        .chain(disc.per_coordinate.iter().map(|(k, r)| (k.to_string(), *r)))
                        .collect()
                });
                d.uniform_tail = f.uniform_tail();
            }
            Family::Parametric { generator, .. } => {
                let mut params = GeneratorParams::default();
                let tag = match generator {
                    Generator::Constant(v) => {
                        params.element = Some(v);
                        GeneratorTag::Constant
                    }
                    Generator::Alternating(v) => {
                        params.element = Some(v);
                        GeneratorTag::Alternating
                    }
                    Generator::BasisShift { scale } => {
                        params.scale = Some(scale);
                        GeneratorTag::BasisShift
                    }
                    Generator::GeometricRamp { a, scale, limit } => {
                        params.a = Some(a);
                        params.scale = Some(scale);
                        if limit != 0.0 {
                            params.limit = Some(limit);
                        }
                        GeneratorTag::GeometricRamp
                    }
                    Generator::PlateauShift => GeneratorTag::PlateauShift,
                };
                d.generator = Some(tag);
                d.params = Some(params);
            }
        }
        d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetTag {
    Finite,
    HilbertCube,
    BasisVectors,
    Ball,
}

/// `{"set": "finite" | "hilbert_cube" | "basis_vectors" | "ball", "space", ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetJson {
    pub set: SetTag,
    pub space: SpaceTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<SeqElement>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub envelope: Option<TailModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

impl TryFrom<SetJson> for SetDescriptor {
    type Error = Error;

    fn try_from(d: SetJson) -> Result<Self> {
        let space = space_from(d.space, d.p)?;
        let fields = [
            ("members", d.members.is_some(), SetTag::Finite),
            ("envelope", d.envelope.is_some(), SetTag::HilbertCube),
            ("scale", d.scale.is_some(), SetTag::BasisVectors),
            ("radius", d.radius.is_some(), SetTag::Ball),
        ];
        if let Some((name, _, _)) = fields.iter().find(|(_, present, tag)| *present && *tag != d.set) {
            return Err(Error::invalid(
                "set",
                format!("field `{name}` does not belong to a {:?} set", d.set),
            ));
        }
        let missing = |name: &str| Error::invalid("set", format!("field `{name}` is required"));
        match d.set {
            SetTag::Finite => SetDescriptor::finite(space, d.members.ok_or_else(|| missing("members"))?),
            SetTag::HilbertCube => {
                SetDescriptor::hilbert_cube(space, d.envelope.ok_or_else(|| missing("envelope"))?)
            }
            SetTag::BasisVectors => {
                SetDescriptor::basis_vectors(space, d.scale.ok_or_else(|| missing("scale"))?)
            }
            SetTag::Ball => SetDescriptor::ball(space, d.radius.ok_or_else(|| missing("radius"))?),
        }
    }
}

impl From<SetDescriptor> for SetJson {
    fn from(s: SetDescriptor) -> Self {
        let (space, p) = space_to(s.space());
        let mut d = SetJson {
            set: SetTag::Finite,
            space,
            p,
            members: None,
            envelope: None,
            scale: None,
            radius: None,
        };
        match s {
            SetDescriptor::Finite { members, .. } => d.members = Some(members),
            SetDescriptor::HilbertCube { envelope, .. } => {
                d.set = SetTag::HilbertCube;
                d.envelope = Some(envelope);
            }
            SetDescriptor::BasisVectors { scale, .. } => {
                d.set = SetTag::BasisVectors;
                d.scale = Some(scale);
            }
            SetDescriptor::Ball { radius, .. } => {
                d.set = SetTag::Ball;
                d.radius = Some(radius);
            }
        }
        d
    }
}
