//! Inputs shared by the benchmarks.

use polylyap::poly::{parse_polynomial, Polynomial};
use polylyap::reductions::CnfInstance;

/// A random-looking but fixed ONE-IN-THREE instance on `n` variables.
pub fn fixed_instance(n: usize) -> CnfInstance {
    let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    let clauses = (0..n)
        .map(|_| {
            let mut c = [0i32; 3];
            for l in &mut c {
                let v = (next() % n as u64) as i32 + 1;
                *l = if next() % 2 == 0 { v } else { -v };
            }
            c
        })
        .collect();
    CnfInstance::new(n, clauses).expect("literals in range")
}

/// `(x1^2 + x2^2 + x3^2)^2 + (x1 x2 - x3^2)^2`, a positive ternary quartic.
pub fn ternary_quartic() -> Polynomial {
    parse_polynomial("(x1^2 + x2^2 + x3^2)^2 + (x1*x2 - x3^2)^2", Some(3)).expect("valid polynomial")
}
