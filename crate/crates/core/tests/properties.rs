use daha_opuc::daha::{verify_involutions, BuildOptions, RepCoefficients};
use daha_opuc::interval::{s1_recurrence, s2_recurrence, IntervalFamily, family_recurrence};
use daha_opuc::operator::max_abs;
use daha_opuc::opuc::{cmv_factors, szego_family, szego_values, Family, VerblunskySource};
use daha_opuc::params::tilde;
use daha_opuc::truncation::{solve_truncation, TruncationCondition, TruncationKind};
use daha_opuc::{derive_parameters, Mode, ParameterSet};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn infinite() -> impl Strategy<Value = ParameterSet> {
    (0.05..0.95f64, 0.05..0.95f64, 0.05..0.95f64, 0.05..0.95f64, 0.2..0.95f64)
        .prop_map(|(b1, b2, b3, b4, q)| derive_parameters([b1, b2, -b3, -b4], q, Mode::Infinite).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn reflections_are_involutions(p in infinite()) {
        let r = verify_involutions(32, &p, BuildOptions::default()).unwrap();
        prop_assert!(r.max_square_scaled() < 1e-13, "{:?}", r.reflection_square_scaled);
        prop_assert!(r.max_quadratic_scaled() < 1e-12, "{:?}", r.quadratic_scaled);
        prop_assert!(r.r1_r2_symmetric);
    }

    #[test]
    fn infinite_coefficients_stay_inside(p in infinite()) {
        let c = RepCoefficients::compute(&p, 64).unwrap();
        for v in c.a_values().iter().chain(c.alpha_values()) {
            prop_assert!(v.abs() < 1.0);
        }
        prop_assert!(p.t.iter().all(|t| t.re == 0.0));
    }

    #[test]
    fn tilde_is_an_involution(b in prop::array::uniform4(-3.0..3.0f64), q in 0.1..0.99f64) {
        let back = tilde(tilde(b, q), q);
        for k in 0..4 {
            prop_assert!((back[k] - b[k]).abs() <= 1e-14 * b[k].abs().max(1.0));
        }
    }

    #[test]
    fn szego_reversal_on_the_circle(p in infinite(), th in 0.0..std::f64::consts::TAU) {
        let src = VerblunskySource::from_params(Family::A, &p, 20).unwrap();
        let z = Complex64::from_polar(1.0, th);
        for (n, (phi, star)) in szego_values(16, z, &src).unwrap().into_iter().enumerate() {
            // Φ*_n(z) = zⁿ conj(Φ_n(z)) for |z| = 1.
            let expect = z.powi(n as i32) * phi.conj();
            prop_assert!((star - expect).norm() < 1e-12 * phi.norm().max(1.0));
        }
    }

    #[test]
    fn szego_polynomials_are_monic(p in infinite()) {
        let src = VerblunskySource::from_params(Family::Alpha, &p, 16).unwrap();
        for (n, ph) in szego_family(15, &src).unwrap().iter().enumerate() {
            prop_assert_eq!(ph.degree, n);
            prop_assert_eq!(ph.coeffs[n], 1.0);
        }
    }

    #[test]
    fn cmv_factors_are_symmetric_involutions(p in infinite(), n in 4usize..40) {
        let src = VerblunskySource::from_params(Family::A, &p, n).unwrap();
        let (l, m) = cmv_factors(n, &src).unwrap();
        let id = DMatrix::<f64>::identity(n, n);
        prop_assert_eq!(&l, &l.transpose());
        prop_assert_eq!(&m, &m.transpose());
        // A trailing 1×1 block is padded with ±1, so the full sections are involutive.
        prop_assert!(max_abs(&(&l * &l - &id)) < 1e-14);
        prop_assert!(max_abs(&(&m * &m - &id)) < 1e-14);
    }

    #[test]
    fn interval_recurrences_are_positive(p in infinite()) {
        let src = VerblunskySource::from_params(Family::A, &p, 40).unwrap();
        for f in [IntervalFamily::S1, IntervalFamily::S2, IntervalFamily::S3] {
            let rec = family_recurrence(f, &src, 16).unwrap();
            prop_assert!(rec.sub.iter().skip(1).all(|&u| u > 0.0), "{f}");
        }
        // S⁽¹⁾ and S⁽²⁾ are symmetric: zero diagonal.
        prop_assert!(s1_recurrence(&src, 16).unwrap().diag.iter().all(|&b| b == 0.0));
        prop_assert!(s2_recurrence(&src, 16).unwrap().diag.iter().all(|&b| b == 0.0));
    }

    #[test]
    fn truncation_reaches_the_boundary(order in 1usize..8, q in 0.5..0.95f64) {
        let c = TruncationCondition::new(TruncationKind::B1B4, order).unwrap();
        let p = solve_truncation(&c, None, q).unwrap();
        let a = daha_opuc::daha::coeff_a(c.index() as i64, &p).unwrap();
        prop_assert!((a - 1.0).abs() < 1e-10);
        prop_assert!(p.t.iter().all(|t| t.im.abs() < 1e-14));
    }
}
