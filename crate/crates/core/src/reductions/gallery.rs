use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::poly::rational::{approximate, format_rational, int, rat};
use crate::poly::{parse_polynomial, parse_vector_field, Polynomial, Rational, VectorField};

pub const GALLERY_NAMES: [&str; 6] = [
    "krstic",
    "bacciotti-rosier",
    "rotated-br",
    "non-monotone",
    "septic-planar",
    "motzkin-cx",
];

const SEPTIC_PLANAR: &str = "\
dx1 = -0.15*x1^7 + 200*x1^6*x2 - 10.5*x1^5*x2^2 - 807*x1^4*x2^3 + 14*x1^3*x2^4 + 600*x1^2*x2^5 - 3.5*x1*x2^6 + 9*x2^7
dx2 = -9*x1^7 - 3.5*x1^6*x2 - 600*x1^5*x2^2 + 14*x1^4*x2^3 + 807*x1^3*x2^4 - 10.5*x1^2*x2^5 - 200*x1*x2^6 - 0.15*x2^7
";

const MOTZKIN_CX: &str = "\
dx1 = -x1^3*x2^2 + 2*x1^3*x2 - x1^3 + 4*x1^2*x2^2 - 8*x1^2*x2 + 4*x1^2 - x1*x2^4 + 4*x1*x2^3 - 4*x1 + 10*x2^2
dx2 = -9*x1^2*x2 + 10*x1^2 + 2*x1*x2^3 - 8*x1*x2^2 - 4*x1 - x2^3 + 4*x2^2 - 4*x2
";

/// Default irrational stand-in for the Bacciotti-Rosier parameter: pi to five digits.
pub fn default_lambda() -> Rational {
    rat(314_159, 100_000)
}

/// An exact point `(cos, sin)` on the unit circle close to angle `theta`,
/// from the rational parametrization with `t ~ tan(theta / 2)`.
pub fn rotation_pair(theta: f64, max_den: u64) -> Result<(Rational, Rational)> {
    let t = approximate((theta / 2.0).tan(), max_den)
        .ok_or_else(|| Error::Invalid(format!("angle {theta} is not finite")))?;
    let one = int(1);
    let t2 = &t * &t;
    let den = &one + &t2;
    Ok(((&one - &t2) / &den, (int(2) * &t) / den))
}

#[derive(Clone, Debug, Default)]
pub struct GalleryParams {
    pub lambda: Option<Rational>,
    pub rotation: Option<(Rational, Rational)>,
}

#[derive(Clone, Debug)]
pub struct GalleryEntry {
    pub name: String,
    pub description: String,
    pub params: BTreeMap<String, String>,
    pub field: VectorField,
}

fn xy(expr: &str) -> Polynomial {
    parse_polynomial(expr, Some(2)).expect("built-in polynomial")
}

fn bacciotti_rosier_parts(lambda: &Rational) -> (Polynomial, Polynomial) {
    let r2 = xy("x1^2 + x2^2");
    let q = xy("2*x1^2 + x2^2");
    let x = xy("x1");
    let y = xy("x2");
    let a = (&y * &r2).scale(&(int(-2) * lambda)) - (&y * &q).scale(&int(2));
    let b = (&x * &r2).scale(&(int(4) * lambda)) + (&x * &q).scale(&int(2));
    (a, b)
}

pub fn gallery(name: &str, params: &GalleryParams) -> Result<GalleryEntry> {
    let mut meta = BTreeMap::new();
    let (description, field) = match name {
        "krstic" => (
            "quadratic planar field that is globally asymptotically stable without a polynomial Lyapunov function",
            VectorField::new(vec![xy("-x1 + x1*x2"), xy("-x2")])?,
        ),
        "bacciotti-rosier" => {
            let lambda = params.lambda.clone().unwrap_or_else(default_lambda);
            meta.insert("lambda".into(), format_rational(&lambda));
            let (a, b) = bacciotti_rosier_parts(&lambda);
            ("homogeneous cubic center parameterized by lambda", VectorField::new(vec![a, b])?)
        }
        "rotated-br" => {
            let lambda = params.lambda.clone().unwrap_or_else(default_lambda);
            let (c, s) = match &params.rotation {
                Some(r) => r.clone(),
                None => rotation_pair(0.1, 1000)?,
            };
            meta.insert("lambda".into(), format_rational(&lambda));
            meta.insert("cos".into(), format_rational(&c));
            meta.insert("sin".into(), format_rational(&s));
            let (a, b) = bacciotti_rosier_parts(&lambda);
            let f1 = &a.scale(&c) - &b.scale(&s);
            let f2 = &a.scale(&s) + &b.scale(&c);
            (
                "rotation of the Bacciotti-Rosier center; asymptotically stable for sin > 0",
                VectorField::new(vec![f1, f2])?,
            )
        }
        "non-monotone" => {
            let (c, s) = match &params.rotation {
                Some(r) => r.clone(),
                None => rotation_pair(0.01, 1000)?,
            };
            meta.insert("cos".into(), format_rational(&c));
            meta.insert("sin".into(), format_rational(&s));
            let x3 = xy("x1^3");
            let y3 = xy("x2^3");
            let f1 = &y3.scale(&c) - &x3.scale(&s);
            let f2 = -&(&x3.scale(&c) + &y3.scale(&s));
            (
                "x' = -[[s, -c], [c, s]] (x^3, y^3); admits x^4 + y^4 but no sextic for small angles",
                VectorField::new(vec![f1, f2])?,
            )
        }
        "septic-planar" => (
            "homogeneous degree-7 planar field needing a degree-8 Lyapunov function",
            parse_vector_field(SEPTIC_PLANAR)?,
        ),
        "motzkin-cx" => (
            "planar field whose 1/2 |x|^2 derivative is minus a shifted Motzkin polynomial",
            parse_vector_field(MOTZKIN_CX)?,
        ),
        _ => {
            return Err(Error::Invalid(format!(
                "unknown gallery system `{name}`, expected one of {}",
                GALLERY_NAMES.join(", ")
            )))
        }
    };
    Ok(GalleryEntry {
        name: name.into(),
        description: description.into(),
        params: meta,
        field,
    })
}

/// `x1^4 x2^2 + x1^2 x2^4 - 3 x1^2 x2^2 + 1`
pub fn motzkin() -> Polynomial {
    xy("x1^4*x2^2 + x1^2*x2^4 - 3*x1^2*x2^2 + 1")
}

/// `M(x1 - 1, x2 - 1)`
pub fn shifted_motzkin() -> Polynomial {
    motzkin()
        .substitute(&[xy("x1 - 1"), xy("x2 - 1")])
        .expect("two substitutions for two variables")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{lie_derivative, norm_squared, Monomial};
    use num_traits::One;

    #[test]
    fn krstic_field() {
        let e = gallery("krstic", &GalleryParams::default()).unwrap();
        assert_eq!(e.field.component(0), &xy("-x1 + x1*x2"));
        assert_eq!(e.field.component(1), &xy("-x2"));
    }

    #[test]
    fn non_monotone_center_conserves_quartic() {
        let p = GalleryParams {
            rotation: Some((int(1), int(0))),
            ..Default::default()
        };
        let f = gallery("non-monotone", &p).unwrap().field;
        assert_eq!(f.component(0), &xy("x2^3"));
        assert_eq!(f.component(1), &xy("-x1^3"));
        assert!(lie_derivative(&xy("x1^4 + x2^4"), &f).unwrap().is_zero());
    }

    #[test]
    fn non_monotone_decay_rate() {
        let f = gallery("non-monotone", &GalleryParams::default()).unwrap().field;
        let s = -f.component(0).coeff(&Monomial::new(vec![3, 0]));
        let want = xy("x1^6 + x2^6").scale(&(int(-4) * s));
        assert_eq!(lie_derivative(&xy("x1^4 + x2^4"), &f).unwrap(), want);
    }

    #[test]
    fn motzkin_cx_identity() {
        let f = gallery("motzkin-cx", &GalleryParams::default()).unwrap().field;
        let v = norm_squared(2).scale(&rat(1, 2));
        assert_eq!(lie_derivative(&v, &f).unwrap(), -shifted_motzkin());
    }

    #[test]
    fn rotation_pair_is_on_circle() {
        let (c, s) = rotation_pair(0.01, 1000).unwrap();
        assert!((&c * &c + &s * &s).is_one());
        assert_eq!(s, rat(400, 40001));
    }

    #[test]
    fn rotated_br_unrotated_is_center() {
        let lambda = default_lambda();
        let p = GalleryParams {
            lambda: Some(lambda.clone()),
            rotation: Some((int(1), int(0))),
        };
        let rot = gallery("rotated-br", &p).unwrap().field;
        let br = gallery("bacciotti-rosier", &p).unwrap().field;
        assert_eq!(rot, br);
        assert_eq!(br.component(1).coeff(&Monomial::new(vec![3, 0])), int(4) * lambda + int(4));
    }

    #[test]
    fn every_entry_vanishes_at_origin() {
        for name in GALLERY_NAMES {
            let e = gallery(name, &GalleryParams::default()).unwrap();
            assert!(e.field.vanishes_at_origin(), "{name}");
        }
        assert!(gallery("nope", &GalleryParams::default()).is_err());
    }
}
