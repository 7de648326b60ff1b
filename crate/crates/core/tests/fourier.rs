use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use toral_core::fourier::{
    aniso_norm, apply_multiplier, parseval_norm, pullback, pushforward, symbol_value, AnisoParams, MultiplierDirection,
    TrigPoly,
};
use toral_core::torus::ConjugacyDiffeo;
use toral_core::{Point, Vector2};

fn params(p: f64, q: f64, t: f64) -> AnisoParams {
    AnisoParams::new(p, q, t, Vector2::new(1.0, -1.618_033_988_749_895).normalize()).unwrap()
}

fn axis(p: f64, q: f64) -> AnisoParams {
    AnisoParams::new(p, q, 2.0, Vector2::new(1.0, 0.0)).unwrap()
}

fn poly(seed: u64, n: usize) -> TrigPoly {
    TrigPoly::random(&mut ChaCha8Rng::seed_from_u64(seed), n, true)
}

fn max_diff(a: &TrigPoly, b: &TrigPoly) -> f64 {
    a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn symbol_examples() {
    assert_eq!(symbol_value(&params(-2.0, 3.0, 2.0), [0, 0]), 1.0);
    assert!((symbol_value(&axis(-2.0, 2.0), [3, 0]) - 1.0).abs() < 1e-14);
    let expected = 1.0 / (1.0 + 36.0 * std::f64::consts::PI.powi(2));
    assert!((symbol_value(&axis(-2.0, 2.0), [0, 3]) / expected - 1.0).abs() < 1e-14);
}

#[test]
fn invalid_params_rejected() {
    let e = Vector2::new(1.0, 0.0);
    assert!(AnisoParams::new(-1.0, 1.0, 1.0, e).is_err());
    assert!(AnisoParams::new(-1.0, 1.0, f64::INFINITY, e).is_err());
    assert!(AnisoParams::new(-1.0, 1.0, 2.0, Vector2::zeros()).is_err());
}

#[test]
fn multiplier_basics() {
    let p = params(-2.0, 4.0, 2.0);
    let one = TrigPoly::constant(5, Complex64::new(1.0, 0.0));
    assert_eq!(apply_multiplier(&one, &p, MultiplierDirection::Forward), one);
    let f = poly(1, 16);
    assert!(max_diff(&apply_multiplier(&f, &params(0.0, 0.0, 2.0), MultiplierDirection::Forward), &f) == 0.0);
    let back = apply_multiplier(&apply_multiplier(&f, &p, MultiplierDirection::Forward), &p, MultiplierDirection::Inverse);
    assert!(max_diff(&back, &f) / f.max_abs() < 1e-13);
}

#[test]
fn norm_examples() {
    let c = Complex64::new(-0.6, 0.8) * 3.0;
    for t in [1.1, 2.0, 7.0] {
        let f = TrigPoly::constant(4, c);
        assert!((aniso_norm(&f, &params(-1.0, 2.0, t)).unwrap() - 3.0).abs() < 1e-13);
    }
    let p = params(-2.0, 4.0, 2.0);
    for k in [[1, 0], [4, -3], [0, 7]] {
        let f = TrigPoly::mode(8, k);
        assert!((aniso_norm(&f, &p).unwrap() / symbol_value(&p, k) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn grid_round_trip_and_evaluation() {
    let f = poly(3, 9);
    let g = 24;
    let values = f.to_grid(g).unwrap();
    let back = TrigPoly::from_grid(values.clone(), g, 9).unwrap();
    assert!(max_diff(&back, &f) / f.max_abs() < 1e-12);
    let x = Point::new(5.0 / g as f64, 11.0 / g as f64);
    assert!((f.evaluate(&x) - values[5 * g + 11]).norm() < 1e-11 * f.l2_norm());
}

#[test]
fn csv_round_trip() {
    let f = poly(4, 3);
    let mut buf = Vec::new();
    f.write_csv(&mut buf).unwrap();
    assert_eq!(TrigPoly::read_csv(buf.as_slice()).unwrap(), f);
}

#[test]
fn chart_resampling() {
    let f = poly(5, 4);
    let id = ConjugacyDiffeo::identity();
    assert!(max_diff(&pullback(&f, &id, 4).unwrap().poly, &f) < 1e-12);
    let phi = ConjugacyDiffeo::shear(0.02, [1, 2]).unwrap();
    let c = TrigPoly::constant(4, Complex64::new(2.5, 0.0));
    let pc = pullback(&c, &phi, 6).unwrap().poly;
    assert!(max_diff(&pc, &c.resized(6)) < 1e-12);
    let gentle = ConjugacyDiffeo::shear(0.02, [0, 1]).unwrap();
    let back = pullback(&pushforward(&f, &gentle, 16).unwrap().poly, &gentle, 4).unwrap().poly;
    assert!(max_diff(&back, &f) / f.max_abs() < 1e-8);
    // A steeper chart loses more to truncation; the loss stays at the reported tail.
    let pushed = pushforward(&f, &phi, 16).unwrap();
    let back = pullback(&pushed.poly, &phi, 4).unwrap().poly;
    assert!(max_diff(&back, &f) / f.max_abs() < 4.0 * pushed.relative_tail());
}

#[test]
fn parseval_on_random_ensemble() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let p = params(-1.5, 2.5, 2.0);
    for _ in 0..100 {
        let f = TrigPoly::random(&mut rng, 6, false);
        let a = aniso_norm(&f, &p).unwrap();
        assert!((a / parseval_norm(&f, &p) - 1.0).abs() < 1e-10);
    }
}

fn exps() -> impl Strategy<Value = (f64, f64)> {
    (-4.0..0.0f64, 0.0..4.0f64)
}

fn wavevector() -> impl Strategy<Value = [i64; 2]> {
    (-40i64..=40, -40i64..=40).prop_map(|(a, b)| [a, b])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symbol_multiplicative((p, q) in exps(), (p2, q2) in exps(), k in wavevector()) {
        let a = symbol_value(&params(p, q, 2.0), k) * symbol_value(&params(p2, q2, 2.0), k);
        let b = symbol_value(&params(p + p2, q + q2, 2.0), k);
        prop_assert!(a > 0.0 && (a / b - 1.0).abs() < 1e-14);
    }

    #[test]
    fn symbol_monotone((p, q) in exps(), dp in 0.0..2.0f64, dq in 0.0..2.0f64, k in wavevector()) {
        prop_assert!(symbol_value(&params(p, q, 2.0), k) <= symbol_value(&params(p + dp, q + dq, 2.0), k));
    }

    #[test]
    fn homogeneous(seed in any::<u64>(), re in -3.0..3.0f64, im in -3.0..3.0f64, t in 1.05..6.0f64) {
        let p = params(-1.0, 2.0, t);
        let f = poly(seed, 4);
        let c = Complex64::new(re, im);
        let lhs = aniso_norm(&f.scale(c), &p).unwrap();
        let rhs = c.norm() * aniso_norm(&f, &p).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
    }

    #[test]
    fn triangle(a in any::<u64>(), b in any::<u64>(), t in 1.05..6.0f64) {
        let p = params(-2.0, 1.0, t);
        let (f, g) = (poly(a, 4), poly(b, 4));
        let sum = aniso_norm(&f.add(&g), &p).unwrap();
        prop_assert!(sum <= aniso_norm(&f, &p).unwrap() + aniso_norm(&g, &p).unwrap() + 1e-10);
    }

    #[test]
    fn weak_norm_embeds(seed in any::<u64>(), (p, q) in exps()) {
        let strong = params(p, q, 2.0);
        let f = poly(seed, 5);
        prop_assert!(aniso_norm(&f, &strong.with_pq(p - 1.0, q)).unwrap() <= aniso_norm(&f, &strong).unwrap() * (1.0 + 1e-12));
    }
}
