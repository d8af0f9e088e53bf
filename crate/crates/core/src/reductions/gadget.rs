use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::rational::{int, to_f64};
use crate::poly::{lie_derivative, norm_squared, Monomial, Polynomial, Rational, VectorField};

/// Qualitative property whose decision problem the gadget encodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GadgetKind {
    StabilityInLyapunovSense,
    Boundedness,
    Control,
    BallInvariance,
    SemialgebraicInvariance,
    RegionOfAttractionBall,
    LocalAttractivity,
    CollisionAvoidance,
}

impl GadgetKind {
    pub const ALL: [GadgetKind; 8] = [
        GadgetKind::StabilityInLyapunovSense,
        GadgetKind::Boundedness,
        GadgetKind::Control,
        GadgetKind::BallInvariance,
        GadgetKind::SemialgebraicInvariance,
        GadgetKind::RegionOfAttractionBall,
        GadgetKind::LocalAttractivity,
        GadgetKind::CollisionAvoidance,
    ];

    /// Kinds built from a quartic form rather than from a gradient field.
    pub fn takes_form(self) -> bool {
        matches!(
            self,
            GadgetKind::BallInvariance | GadgetKind::SemialgebraicInvariance
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            GadgetKind::StabilityInLyapunovSense => "stability-in-lyapunov-sense",
            GadgetKind::Boundedness => "boundedness",
            GadgetKind::Control => "control",
            GadgetKind::BallInvariance => "ball-invariance",
            GadgetKind::SemialgebraicInvariance => "semialgebraic-invariance",
            GadgetKind::RegionOfAttractionBall => "region-of-attraction-ball",
            GadgetKind::LocalAttractivity => "local-attractivity",
            GadgetKind::CollisionAvoidance => "collision-avoidance",
        }
    }

    pub fn from_name(s: &str) -> Option<GadgetKind> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

#[derive(Clone, Debug)]
pub enum GadgetBase {
    Form(Polynomial),
    Field(VectorField),
}

/// The closed halfspace `normal . x <= bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Halfspace {
    pub normal: Vec<Rational>,
    pub bound: Rational,
}

impl Halfspace {
    pub fn contains_f64(&self, x: &[f64]) -> bool {
        let lhs: f64 = self.normal.iter().zip(x).map(|(a, v)| to_f64(a) * v).sum();
        lhs <= to_f64(&self.bound)
    }
}

/// `{x | x_i >= 0, 1 <= sum x_i <= 2}` as a list of halfspaces.
pub fn obstacle_polytope(n: usize) -> Vec<Halfspace> {
    let mut hs: Vec<Halfspace> = (0..n)
        .map(|i| Halfspace {
            normal: (0..n).map(|j| int(if i == j { -1 } else { 0 })).collect(),
            bound: int(0),
        })
        .collect();
    hs.push(Halfspace {
        normal: vec![int(-1); n],
        bound: int(-1),
    });
    hs.push(Halfspace {
        normal: vec![int(1); n],
        bound: int(2),
    });
    hs
}

#[derive(Clone, Debug)]
pub enum GadgetSet {
    /// `{x | ||x|| <= radius}`
    Ball(Rational),
    /// `{x | p(x) <= level}`
    Sublevel(Polynomial, Rational),
    Polytope(Vec<Halfspace>),
}

/// A constructed instance: dynamics plus whatever set or input matrix the
/// property refers to, and an exact derivative identity where one exists.
#[derive(Clone, Debug)]
pub struct Gadget {
    pub kind: GadgetKind,
    pub field: VectorField,
    pub control: Option<Vec<Vec<Polynomial>>>,
    pub set: Option<GadgetSet>,
    /// `(function, derivative along field, claimed closed form)`
    pub identity: Option<(Polynomial, Polynomial, Polynomial)>,
}

impl Gadget {
    pub fn identity_holds(&self) -> bool {
        match &self.identity {
            Some((_, lhs, rhs)) => lhs == rhs,
            None => true,
        }
    }
}

fn cubic_field(base: &GadgetBase, kind: GadgetKind) -> Result<VectorField> {
    match base {
        GadgetBase::Field(f) if f.homogeneous_degree() == Some(3) => Ok(f.clone()),
        _ => Err(Error::Invalid(format!(
            "gadget {} expects a homogeneous cubic vector field",
            kind.name()
        ))),
    }
}

fn quartic_form(base: &GadgetBase, kind: GadgetKind) -> Result<Polynomial> {
    match base {
        GadgetBase::Form(p) if p.homogeneous_degree() == Some(4) => Ok(p.clone()),
        _ => Err(Error::Invalid(format!(
            "gadget {} expects a quartic form",
            kind.name()
        ))),
    }
}

/// `(x_1^k, ..., x_n^k)`
fn power_field(n: usize, k: u32) -> Result<VectorField> {
    VectorField::new(
        (0..n)
            .map(|i| Polynomial::term(Monomial::var(n, i).pow(k), int(1)))
            .collect(),
    )
}

fn plain(kind: GadgetKind, field: VectorField) -> Gadget {
    Gadget {
        kind,
        field,
        control: None,
        set: None,
        identity: None,
    }
}

pub fn gadget(kind: GadgetKind, base: &GadgetBase) -> Result<Gadget> {
    match kind {
        GadgetKind::RegionOfAttractionBall => {
            let f = cubic_field(base, kind)?;
            Ok(Gadget {
                set: Some(GadgetSet::Ball(int(1))),
                ..plain(kind, f)
            })
        }
        GadgetKind::LocalAttractivity => Ok(plain(kind, cubic_field(base, kind)?)),
        GadgetKind::StabilityInLyapunovSense => {
            let f = cubic_field(base, kind)?;
            Ok(plain(kind, f.add(&power_field(f.nvars(), 4)?)?))
        }
        GadgetKind::Boundedness => {
            let f = cubic_field(base, kind)?;
            Ok(plain(kind, f.add(&power_field(f.nvars(), 1)?)?))
        }
        GadgetKind::CollisionAvoidance => {
            let f = cubic_field(base, kind)?;
            let n = f.nvars();
            Ok(Gadget {
                set: Some(GadgetSet::Polytope(obstacle_polytope(n))),
                ..plain(kind, f.add(&power_field(n, 4)?)?)
            })
        }
        GadgetKind::Control => {
            let f = cubic_field(base, kind)?;
            let n = f.nvars();
            if n < 2 {
                return Err(Error::Invalid("control gadget needs at least two variables".into()));
            }
            let x1 = Polynomial::var(n, 0);
            let x2 = Polynomial::var(n, 1);
            let entry = &(&x1 * &(&x2 * &x2)) - &(&(&x1 * &x1) * &x2);
            Ok(Gadget {
                control: Some(vec![vec![entry; n]; n]),
                ..plain(kind, f)
            })
        }
        GadgetKind::BallInvariance => {
            let p = quartic_form(base, kind)?;
            let f = VectorField::negative_gradient(&p)?;
            let w = norm_squared(p.nvars());
            let wdot = lie_derivative(&w, &f)?;
            Ok(Gadget {
                set: Some(GadgetSet::Ball(int(1))),
                identity: Some((w, wdot, p.scale(&int(-8)))),
                ..plain(kind, f)
            })
        }
        GadgetKind::SemialgebraicInvariance => {
            let p = quartic_form(base, kind)?;
            let n = p.nvars();
            let f = power_field(n, 1)?.scale(&int(-1));
            let pdot = lie_derivative(&p, &f)?;
            Ok(Gadget {
                set: Some(GadgetSet::Sublevel(p.clone(), int(1))),
                identity: Some((p.clone(), pdot, p.scale(&int(-4)))),
                ..plain(kind, f)
            })
        }
    }
}
