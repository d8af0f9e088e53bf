mod common;

use polylyap::dynamics::{integrate, integrate_fixed, lyapunov_monotonic, Order, SimConfig, Terminal};
use polylyap::poly::rational::rat;
use polylyap::poly::{norm_squared, parse_vector_field};
use polylyap::reductions::{gallery, GalleryParams};

fn err_at(order: Order, h: f64) -> f64 {
    // x' = -x^3 has x(t) = x0 / sqrt(1 + 2 x0^2 t).
    let f = parse_vector_field("dx1 = -x1^3").unwrap();
    let steps = (1.0 / h).round() as usize;
    let x = integrate_fixed(&f, &[1.0], h, steps, order).unwrap();
    (x[0] - 1.0 / 3f64.sqrt()).abs()
}

#[test]
fn fixed_step_convergence_orders() {
    for (order, lo) in [(Order::Four, 3.5), (Order::Five, 4.5)] {
        let slope = (err_at(order, 0.02) / err_at(order, 0.01)).log2();
        assert!(slope > lo, "{order:?}: slope {slope}");
    }
}

#[test]
fn homogeneous_field_time_rescaling() {
    // For a cubic field, x(t) solves from x0 iff c x(t / c^2) solves from c x0.
    let f = parse_vector_field("dx1 = -x1^3 + x2^3\ndx2 = -x1^3 - 2*x2^3").unwrap();
    let cfg = SimConfig { t_end: 4.0, ..Default::default() };
    let a = integrate(&f, &[1.0, 0.5], &cfg).unwrap();
    let c = 2.0;
    let scaled = SimConfig { t_end: 4.0 / (c * c), ..Default::default() };
    let b = integrate(&f, &[c, c * 0.5], &scaled).unwrap();
    for (u, v) in a.last_state().iter().zip(b.last_state()) {
        assert!((c * u - v).abs() < 1e-7, "{u} vs {v}");
    }
}

#[test]
fn krstic_converges_from_far_point() {
    let f = gallery("krstic", &GalleryParams::default()).unwrap().field;
    let t = integrate(&f, &[2.0, 2.0], &SimConfig::default()).unwrap();
    assert_eq!(t.terminal, Terminal::Converged);
}

#[test]
fn degree_seven_field_approaches_origin() {
    // The decay is polynomial in time, so convergence needs a huge horizon.
    let f = gallery("septic-planar", &GalleryParams::default()).unwrap().field;
    let cfg = SimConfig { t_end: 1e60, ..Default::default() };
    let t = integrate(&f, &[2.0, 2.0], &cfg).unwrap();
    assert_eq!(t.terminal, Terminal::Converged, "{} steps, t = {:e}, x = {:?}", t.len(), t.times.last().unwrap(), t.last_state());
}

#[test]
fn quadratic_function_decreases_on_motzkin_field() {
    let f = gallery("motzkin-cx", &GalleryParams::default()).unwrap().field;
    let v = norm_squared(2).scale(&rat(1, 2));
    for x0 in [[2.0, 2.0], [-2.5, -3.0]] {
        let t = integrate(&f, &x0, &SimConfig { t_end: 20.0, ..Default::default() }).unwrap();
        assert!(lyapunov_monotonic(&v, &t).unwrap().is_monotone(), "{x0:?}");
    }
}

#[test]
fn unstable_field_escapes() {
    let f = parse_vector_field("dx1 = x1^2").unwrap();
    let t = integrate(&f, &[1.0], &SimConfig::default()).unwrap();
    assert!(matches!(t.terminal, Terminal::Escaped { .. }));
}
