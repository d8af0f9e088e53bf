mod common;

use polylyap::lyap::{degree_sweep, search_sos_lyapunov, LyapunovProblem, LyapunovResult, SweepConfig};
use polylyap::poly::rational::int;
use polylyap::poly::{lie_derivative, parse_vector_field};
use polylyap::reductions::{gallery, GalleryParams};

#[test]
fn verdict_is_invariant_under_time_scaling() {
    let f = gallery("septic-planar", &GalleryParams::default()).unwrap().field;
    let g = f.scale(&int(2));
    for d in [6, 8] {
        let a = search_sos_lyapunov(&LyapunovProblem::plain(f.clone(), d, true)).unwrap();
        let b = search_sos_lyapunov(&LyapunovProblem::plain(g.clone(), d, true)).unwrap();
        assert_eq!(a.label(), b.label(), "degree {d}");
    }
}

#[test]
fn linear_stable_field_has_quadratic_certificate() {
    let f = parse_vector_field("dx1 = -x1 + x2\ndx2 = -x1 - x2").unwrap();
    let LyapunovResult::Found(c) = search_sos_lyapunov(&LyapunovProblem::new(f.clone(), 2, true)).unwrap() else {
        panic!("expected a quadratic Lyapunov function");
    };
    assert!(c.verify(&f, 2, 1e-8));
    let vdot = lie_derivative(&c.v, &f).unwrap();
    assert!(vdot.evaluate_f64(&[1.0, 0.3]).unwrap() < 0.0);
}

#[test]
fn center_has_no_strict_certificate() {
    let f = parse_vector_field("dx1 = x2\ndx2 = -x1").unwrap();
    let r = search_sos_lyapunov(&LyapunovProblem::new(f, 2, true)).unwrap();
    assert!(!r.is_found());
}

#[test]
fn sweep_stops_at_first_success() {
    let f = gallery("septic-planar", &GalleryParams::default()).unwrap().field;
    let cfg = SweepConfig { homogeneous: true, stop_on_found: true, ..Default::default() };
    let out = degree_sweep(&f, &[2, 4, 6, 8, 10], &cfg).unwrap();
    assert_eq!(out.last().unwrap().0, 8);
    assert!(out.last().unwrap().1.is_found());
    assert!(out[..out.len() - 1].iter().all(|(_, r)| !r.is_found()));
}
