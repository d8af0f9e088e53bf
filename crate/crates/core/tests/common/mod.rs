#![allow(dead_code)]

use polylyap::poly::rational::{int, rat};
use polylyap::poly::{norm_squared, parse_polynomial, Monomial, Polynomial, Rational};
use polylyap::reductions::CnfInstance;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_form(r: &mut ChaCha8Rng, nvars: usize, degree: u32, range: i64) -> Polynomial {
    let terms = Monomial::all_of_degree(nvars, degree)
        .into_iter()
        .map(|m| (m, int(r.gen_range(-range..=range))));
    Polynomial::from_terms(nvars, terms).unwrap()
}

/// A form that is never the zero polynomial.
pub fn random_nonzero_form(r: &mut ChaCha8Rng, nvars: usize, degree: u32, range: i64) -> Polynomial {
    loop {
        let p = random_form(r, nvars, degree, range);
        if !p.is_zero() {
            return p;
        }
    }
}

pub fn random_instance(r: &mut ChaCha8Rng, nvars: usize, nclauses: usize) -> CnfInstance {
    let clauses = (0..nclauses)
        .map(|_| {
            let mut c = [0i32; 3];
            for l in &mut c {
                let v = r.gen_range(1..=nvars as i32);
                *l = if r.gen_bool(0.5) { v } else { -v };
            }
            c
        })
        .collect();
    CnfInstance::new(nvars, clauses).unwrap()
}

/// All one-in-three satisfying assignments, by direct enumeration.
pub fn all_solutions(inst: &CnfInstance) -> Vec<Vec<bool>> {
    let n = inst.nvars();
    (0..1u32 << n)
        .map(|m| (0..n).map(|i| (m >> i) & 1 == 1).collect::<Vec<bool>>())
        .filter(|a| inst.one_in_three(a))
        .collect()
}

/// `(x1^2 + x2^2)^(d/2)`
pub fn circle_power(d: u32) -> Polynomial {
    norm_squared(2).pow(d / 2)
}

/// Strictly positive bivariate form of even degree `d`: a sum of three
/// squares plus a tenth of `(x^2 + y^2)^(d/2)`.
pub fn positive_binary_form(r: &mut ChaCha8Rng, d: u32) -> Polynomial {
    let mut p = circle_power(d).scale(&rat(1, 10));
    for _ in 0..3 {
        let h = random_form(r, 2, d / 2, 3);
        p = &p + &(&h * &h);
    }
    p
}

/// A form of even degree `d` that is negative at a known integer point.
pub fn negative_binary_form(r: &mut ChaCha8Rng, d: u32) -> (Polynomial, Vec<Rational>) {
    let p = positive_binary_form(r, d);
    let u = loop {
        let u = vec![int(r.gen_range(-3..=3)), int(r.gen_range(-3..=3))];
        if !(u[0] == int(0) && u[1] == int(0)) {
            break u;
        }
    };
    let c = circle_power(d);
    let scale = p.evaluate(&u).unwrap() / c.evaluate(&u).unwrap() + rat(1, 2);
    (&p - &c.scale(&scale), u)
}

/// The degree-8 Lyapunov function reported for the degree-7 example, to
/// three decimals.
pub fn reported_septic_v() -> Polynomial {
    parse_polynomial(
        "0.02*x1^8 + 0.015*x1^7*x2 + 1.743*x1^6*x2^2 - 0.106*x1^5*x2^3 - 3.517*x1^4*x2^4 \
         + 0.106*x1^3*x2^5 + 1.743*x1^2*x2^6 - 0.015*x1*x2^7 + 0.02*x2^8",
        Some(2),
    )
    .unwrap()
}
