use num_complex::Complex64;
use proptest::prelude::*;

use toral_core::fourier::{symbol_value, AnisoParams, TrigPoly};
use toral_core::torus::{ConjugacyDiffeo, SmoothToralMap, ToralAutomorphism};
use toral_core::transfer::{
    apply_operator, assemble_galerkin, assemble_galerkin_with, essential_radius_check, realify, spectrum,
    GalerkinMatrix, GalerkinOptions, OperatorKind,
};
use toral_core::Error;

fn cat() -> SmoothToralMap {
    SmoothToralMap::cat()
}

fn shear(eps: f64) -> SmoothToralMap {
    SmoothToralMap::conjugated(ToralAutomorphism::cat(), ConjugacyDiffeo::shear(eps, [0, 1]).unwrap()).unwrap()
}

fn sine(eps: f64) -> SmoothToralMap {
    SmoothToralMap::conjugated(ToralAutomorphism::cat(), ConjugacyDiffeo::diagonal_sine(eps).unwrap()).unwrap()
}

fn params_for(map: &SmoothToralMap, p: f64, q: f64) -> AnisoParams {
    AnisoParams::new(p, q, 2.0, map.base().stable().direction).unwrap()
}

fn one(n: usize) -> TrigPoly {
    TrigPoly::constant(n, Complex64::new(1.0, 0.0))
}

fn dist(a: &TrigPoly, b: &TrigPoly) -> f64 {
    a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn constants_under_l_and_m() {
    for map in [cat(), shear(0.03), sine(0.03)] {
        let l = apply_operator(OperatorKind::L, &map, &one(4), 64).unwrap();
        assert!(dist(&l.poly, &one(4)) < 1e-12);
    }
    for map in [cat(), shear(0.03)] {
        let m = apply_operator(OperatorKind::M, &map, &one(4), 64).unwrap();
        assert!(dist(&m.poly, &one(4)) < 1e-12);
    }
    let m = apply_operator(OperatorKind::M, &sine(0.03), &one(4), 64).unwrap();
    assert!(dist(&m.poly, &one(4)) > 1e-3);
    assert!((m.poly.coeff([0, 0]).re - 1.0).abs() < 1e-12, "mass is preserved");
}

#[test]
fn cat_moves_modes() {
    let m = cat().base().entries();
    for k in [[1i64, 0], [0, 1], [-1, 1], [2, -3]] {
        let img = [m[0][0] * k[0] + m[1][0] * k[1], m[0][1] * k[0] + m[1][1] * k[1]];
        let out = apply_operator(OperatorKind::L, &cat(), &TrigPoly::mode(8, k), 64).unwrap().poly;
        assert!(dist(&out, &TrigPoly::mode(8, img)) < 1e-13, "{k:?}");
    }
}

#[test]
fn unweighted_linear_section_is_partial_permutation() {
    let map = cat();
    let m = assemble_galerkin(OperatorKind::L, &map, &params_for(&map, 0.0, 0.0), 5).unwrap();
    for z in m.data() {
        assert!(z.im == 0.0 && (z.re == 0.0 || (z.re - 1.0).abs() < 1e-14));
    }
    let d = m.dim();
    for c in 0..d {
        assert!(m.column(c).iter().filter(|z| z.re != 0.0).count() <= 1);
    }
}

#[test]
fn linear_columns_closed_form() {
    let map = cat();
    let mt = |k: [i64; 2]| [2 * k[0] + k[1], k[0] + k[1]];
    for (p, q, n) in [(-2.0, 2.0, 4usize), (-1.0, 3.0, 6), (-2.5, 0.5, 3)] {
        let params = params_for(&map, p, q);
        let m = assemble_galerkin(OperatorKind::L, &map, &params, n).unwrap();
        let nn = n as i64;
        for k1 in -nn..=nn {
            for k2 in -nn..=nn {
                let k = [k1, k2];
                let img = mt(k);
                for j1 in -nn..=nn {
                    for j2 in -nn..=nn {
                        let want = if [j1, j2] == img { symbol_value(&params, img) / symbol_value(&params, k) } else { 0.0 };
                        let got = m.entry([j1, j2], k);
                        assert!((got - want).norm() <= 1e-12 * want.max(1.0), "{k:?} -> {:?}", [j1, j2]);
                    }
                }
            }
        }
    }
    let params = AnisoParams::new(-2.0, 2.0, 2.0, map.base().stable().direction).unwrap();
    let m = assemble_galerkin(OperatorKind::L, &map, &params, 3).unwrap();
    let want = symbol_value(&params, [2, 1]) / symbol_value(&params, [1, 0]);
    assert!((m.entry([2, 1], [1, 0]).re / want - 1.0).abs() < 1e-12);
}

#[test]
fn linear_spectrum_collapses() {
    let map = cat();
    for n in [4, 6] {
        for kind in [OperatorKind::L, OperatorKind::M] {
            let s = spectrum(&assemble_galerkin(kind, &map, &params_for(&map, -2.0, 4.0), n).unwrap()).unwrap();
            assert!((s.eigenvalues[0].value - 1.0).norm() < 1e-10);
            assert!(s.eigenvalues[1].modulus() < 1e-8);
        }
    }
}

#[test]
fn m_is_l_of_inverse_when_area_preserving() {
    let map = shear(0.03);
    let params = params_for(&map, -2.0, 4.0);
    let m = spectrum(&assemble_galerkin(OperatorKind::M, &map, &params, 8).unwrap()).unwrap();
    let l = spectrum(&assemble_galerkin(OperatorKind::L, &map.inverse(), &params, 8).unwrap()).unwrap();
    for (a, b) in m.eigenvalues.iter().zip(&l.eigenvalues).take(20) {
        assert!((a.value - b.value).norm() < 1e-10);
    }
}

#[test]
fn m_is_adjoint_of_l_when_area_preserving() {
    let map = shear(0.03);
    let params = params_for(&map, 0.0, 0.0);
    let l = assemble_galerkin(OperatorKind::L, &map, &params, 5).unwrap();
    let m = assemble_galerkin(OperatorKind::M, &map, &params, 5).unwrap();
    let d = l.dim();
    let (ld, md) = (l.data(), m.data());
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            worst = worst.max((md[j * d + i] - ld[i * d + j].conj()).norm());
        }
    }
    assert!(worst < 1e-12, "{worst:e}");
}

#[test]
fn zero_displacement_section_is_linear() {
    let lin = cat();
    let conj = SmoothToralMap::conjugated(ToralAutomorphism::cat(), ConjugacyDiffeo::identity()).unwrap();
    let params = params_for(&lin, -2.0, 4.0);
    let a = assemble_galerkin(OperatorKind::L, &lin, &params, 6).unwrap();
    let b = assemble_galerkin(OperatorKind::L, &conj, &params, 6).unwrap();
    assert!(a.data().iter().zip(b.data()).all(|(x, y)| (x - y).norm() < 1e-12));
}

#[test]
fn conjugated_spectra_approach_linear() {
    let params = params_for(&cat(), -2.0, 4.0);
    let errs: Vec<f64> = [0.02, 0.01, 0.005]
        .iter()
        .map(|&e| {
            let s = spectrum(&assemble_galerkin(OperatorKind::L, &shear(e), &params, 10).unwrap()).unwrap();
            (s.eigenvalues[0].value - 1.0).norm().max(s.eigenvalues[1].modulus())
        })
        .collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
}

#[test]
fn volume_preserving_weights_are_trivial() {
    let map = shear(0.03);
    let params = params_for(&map, -1.0, 2.0);
    let l = assemble_galerkin(OperatorKind::L, &map, &params, 6).unwrap();
    let lt = assemble_galerkin(OperatorKind::Lt(1.7), &map, &params, 6).unwrap();
    let m = assemble_galerkin(OperatorKind::M, &map, &params, 6).unwrap();
    let mt = assemble_galerkin(OperatorKind::Mt(2.0), &map, &params, 6).unwrap();
    let close = |a: &GalerkinMatrix, b: &GalerkinMatrix| a.data().iter().zip(b.data()).all(|(x, y)| (x - y).norm() < 1e-12);
    assert!(close(&l, &lt) && close(&m, &mt));
}

#[test]
fn refinement_stability_linear() {
    let map = cat();
    let params = params_for(&map, -2.0, 4.0);
    let a = spectrum(&assemble_galerkin(OperatorKind::L, &map, &params, 6).unwrap()).unwrap();
    let b = spectrum(&assemble_galerkin(OperatorKind::L, &map, &params, 14).unwrap()).unwrap();
    for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues).take(5) {
        assert!((x.modulus() - y.modulus()).abs() < 1e-6);
    }
}

#[test]
fn radius_checks() {
    let map = cat();
    let params = params_for(&map, -2.0, 4.0);
    let a = spectrum(&assemble_galerkin(OperatorKind::L, &map, &params, 8).unwrap()).unwrap();
    let b = spectrum(&assemble_galerkin(OperatorKind::L, &map, &params, 12).unwrap()).unwrap();
    let check = essential_radius_check(&a, &b, 0.1459, 0.05);
    assert!(check.pass);
    assert_eq!(check.stable_outliers().len(), 1);
    assert!((check.stable_outliers()[0] - 1.0).norm() < 1e-10);

    let conj = shear(0.03);
    let a = spectrum(&assemble_galerkin(OperatorKind::L, &conj, &params, 10).unwrap()).unwrap();
    let b = spectrum(&assemble_galerkin(OperatorKind::L, &conj, &params, 14).unwrap()).unwrap();
    let bound = 0.146;
    let degenerate = essential_radius_check(&a, &b, bound, 1.0 - bound);
    assert!(degenerate.outliers.iter().all(|o| (Complex64::new(o.re, o.im) - 1.0).norm() < 1e-6));
}

#[test]
fn budget_and_dump() {
    let map = cat();
    let params = params_for(&map, -2.0, 4.0);
    let opts = GalerkinOptions { max_n: 4, ..GalerkinOptions::default() };
    assert!(matches!(
        assemble_galerkin_with(OperatorKind::L, &map, &params, 5, &opts),
        Err(Error::BudgetExceeded { .. })
    ));
    let m = assemble_galerkin(OperatorKind::Mt(3.0), &sine(0.02), &params, 3).unwrap();
    let mut buf = Vec::new();
    m.write_dump(&mut buf).unwrap();
    assert_eq!(buf.len(), 32 + 16 * m.dim() * m.dim());
    let back = GalerkinMatrix::read_dump(buf.as_slice(), params.stable_dir).unwrap();
    assert_eq!(back.data(), m.data());
    assert_eq!(back.kind, m.kind);
}

#[test]
fn realified_section_is_real() {
    let map = sine(0.02);
    let m = assemble_galerkin(OperatorKind::Lt(2.0), &map, &params_for(&map, -1.0, 2.0), 4).unwrap();
    let r = realify(&m).unwrap();
    assert_eq!(r.len(), m.dim() * m.dim());
    assert!(r.iter().all(|x| x.is_finite()));
}

#[test]
fn kind_names_round_trip() {
    for k in [OperatorKind::L, OperatorKind::M, OperatorKind::Lt(1.5), OperatorKind::Mt(8.0)] {
        assert_eq!(k.to_string().parse::<OperatorKind>().unwrap(), k);
    }
    assert!("Lt(1.0)".parse::<OperatorKind>().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn l_fixes_constants(eps in 0.0..0.04f64, dir in 0usize..3) {
        let c = [[0, 1], [1, 0], [1, 1]][dir];
        let map = SmoothToralMap::conjugated(ToralAutomorphism::cat(), ConjugacyDiffeo::shear(eps, c).unwrap()).unwrap();
        let out = apply_operator(OperatorKind::L, &map, &one(3), 48).unwrap();
        prop_assert!(dist(&out.poly, &one(3)) < 1e-12);
    }

    #[test]
    fn matrix_matches_direct_application(k1 in -3i64..=3, k2 in -3i64..=3) {
        let map = sine(0.02);
        let params = params_for(&map, 0.0, 0.0);
        let m = assemble_galerkin(OperatorKind::Lt(1.5), &map, &params, 3).unwrap();
        let f = TrigPoly::mode(3, [k1, k2]);
        let direct = apply_operator(OperatorKind::Lt(1.5), &map, &f, 96).unwrap().poly;
        prop_assert!(dist(&m.apply(&f).unwrap(), &direct) < 1e-10);
    }
}
