use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::cnf::{check_cap, first_mask, mask_to_bools, CnfInstance};
use crate::error::{Error, Result};
use crate::poly::rational::int;
use crate::poly::{Polynomial, Rational, VectorField};

fn literal(nvars: usize, l: i32) -> Polynomial {
    let x = Polynomial::var(nvars, l.unsigned_abs() as usize - 1);
    if l > 0 {
        x
    } else {
        &Polynomial::one(nvars) - &x
    }
}

/// `sum x_i^2 (1 - x_i)^2 + sum_clauses (l1 + l2 + l3 - 1)^2`, where a
/// negated literal `!x_i` becomes `1 - x_i`. Vanishes at a boolean point
/// exactly when the point one-in-three satisfies the instance.
pub fn sat_to_quartic(inst: &CnfInstance) -> Polynomial {
    let n = inst.nvars();
    let one = Polynomial::one(n);
    let mut p = Polynomial::zero(n);
    for i in 0..n {
        let x = Polynomial::var(n, i);
        let t = &x * &(&one - &x);
        p = &p + &(&t * &t);
    }
    for c in inst.clauses() {
        let s = c
            .iter()
            .fold(-&one, |acc, &l| &acc + &literal(n, l));
        p = &p + &(&s * &s);
    }
    p
}

/// `y^4 p(x / y)` with `y` appended as the last variable.
pub fn homogenize_quartic(p: &Polynomial) -> Result<Polynomial> {
    if p.degree() != 4 {
        return Err(Error::WrongDegree {
            expected: 4,
            found: p.degree(),
        });
    }
    p.homogenize(4)
}

/// The gradient flow `x' = -grad V` of a quartic form, a homogeneous cubic field.
pub fn quartic_to_gradient_field(v: &Polynomial) -> Result<VectorField> {
    match v.homogeneous_degree() {
        Some(4) => VectorField::negative_gradient(v),
        Some(_) => Err(Error::WrongDegree {
            expected: 4,
            found: v.degree(),
        }),
        None => Err(Error::NotHomogeneous),
    }
}

/// First point of `{0,1}^n` (binary counting order, `x1` least significant)
/// where `p` vanishes exactly.
pub fn boolean_zero(p: &Polynomial) -> Result<Option<Vec<bool>>> {
    let n = p.nvars();
    check_cap(n)?;
    let terms: Vec<(u32, Rational)> = p
        .terms()
        .map(|(m, c)| {
            let support = m
                .exponents()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .fold(0u32, |acc, (i, _)| acc | (1 << i));
            (support, c.clone())
        })
        .collect();
    // on {0,1}^n a monomial is 1 exactly when its support is switched on
    let found = first_mask(n, |mask| {
        let mut acc = Rational::zero();
        for (s, c) in &terms {
            if s & mask == *s {
                acc += c;
            }
        }
        acc.is_zero()
    });
    Ok(found.map(|m| mask_to_bools(m, n)))
}

/// `(x, 1)` as an exact rational point.
pub fn augmented_point(assignment: &[bool]) -> Vec<Rational> {
    assignment
        .iter()
        .map(|&b| int(b as i64))
        .chain(std::iter::once(int(1)))
        .collect()
}

/// Summary of a generated instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceMetadata {
    pub nvars: usize,
    pub degree: i64,
    pub homogeneous: bool,
    pub construction: String,
    pub clauses: usize,
}

/// Stage of the reduction chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Poly,
    Form,
    Field,
}

impl Stage {
    pub fn parse(s: &str) -> Option<Stage> {
        match s {
            "poly" => Some(Stage::Poly),
            "form" => Some(Stage::Form),
            "field" => Some(Stage::Field),
            _ => None,
        }
    }
}

/// The three artifacts of the reduction chain for one instance.
#[derive(Clone, Debug)]
pub struct ReductionChain {
    pub quartic: Polynomial,
    pub form: Polynomial,
    pub field: VectorField,
}

impl ReductionChain {
    pub fn build(inst: &CnfInstance) -> Result<Self> {
        let quartic = sat_to_quartic(inst);
        let form = homogenize_quartic(&quartic)?;
        let field = quartic_to_gradient_field(&form)?;
        Ok(ReductionChain {
            quartic,
            form,
            field,
        })
    }

    pub fn metadata(&self, inst: &CnfInstance, stage: Stage) -> InstanceMetadata {
        let (nvars, degree, homogeneous, construction) = match stage {
            Stage::Poly => (
                self.quartic.nvars(),
                self.quartic.degree(),
                self.quartic.is_homogeneous(),
                "one-in-three quartic: sum x_i^2(1-x_i)^2 + sum (l1+l2+l3-1)^2",
            ),
            Stage::Form => (
                self.form.nvars(),
                self.form.degree(),
                true,
                "homogenization y^4 p(x/y)",
            ),
            Stage::Field => (
                self.field.nvars(),
                self.field.degree(),
                true,
                "gradient flow x' = -grad p_h",
            ),
        };
        InstanceMetadata {
            nvars,
            degree,
            homogeneous,
            construction: construction.into(),
            clauses: inst.clauses().len(),
        }
    }
}
