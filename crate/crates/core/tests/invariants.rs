use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use proptest::prelude::*;
use ra_bergman::discs::{self, five_point_predicate, wedge_chart};
use ra_bergman::generator::{blaschke_sum, Generator, ZeroSet};
use ra_bergman::quadrature::Weight;
use ra_bergman::space::{BasisIndex, ModelSpace};
use ra_bergman::suite;

fn gen() -> &'static Generator {
    static G: OnceLock<Generator> = OnceLock::new();
    G.get_or_init(|| Generator::triple_sine(10.0).unwrap())
}

fn space() -> &'static ModelSpace {
    static S: OnceLock<ModelSpace> = OnceLock::new();
    S.get_or_init(|| ModelSpace::monomial(gen(), BasisIndex::weighted(6, 3), Weight::Gaussian).unwrap())
}

fn point(r: f64) -> impl Strategy<Value = Complex64> {
    (0.0..r, 0.0..2.0 * PI).prop_map(|(m, a)| Complex64::from_polar(m, a))
}

#[test]
fn invariant_suite_passes() {
    let summary = suite::invariants();
    for c in &summary.criteria {
        println!("{}", c.line());
    }
    assert!(summary.pass);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generator_is_real_on_real_axis(z in point(6.0)) {
        let a = gen().value(z.conj()).unwrap();
        let b = gen().value(z).unwrap().conj();
        prop_assert!((a - b).norm() <= 1e-13 * (1.0 + b.norm()));
    }

    #[test]
    fn half_disc_map_inverts_and_reflects(z in point(0.999)) {
        let w = discs::phi(z).unwrap();
        prop_assert!(w.im > 0.0 && w.norm() < 1.0);
        prop_assert!((discs::psi(w).unwrap() - z).norm() < 1e-10);
        prop_assert!((discs::phi(-z.conj()).unwrap() + w.conj()).norm() < 1e-12);
    }

    #[test]
    fn lens_maps_inside_its_bounding_box(z in point(0.999), aspect in 0.125f64..8.0) {
        let beta = discs::aspect_to_beta(aspect);
        let w = discs::phi_lens(beta, z).unwrap();
        prop_assert!(w.im > 0.0 && w.im < aspect + 1e-12);
    }

    #[test]
    fn kernel_is_hermitian(z in point(2.0), w in point(2.0)) {
        let k = &space().kernel;
        let a = k.kernel_eval(z, w).unwrap();
        let b = k.kernel_eval(w, z).unwrap().conj();
        prop_assert!((a - b).norm() < 1e-12 * (1.0 + a.norm()));
        prop_assert!(k.kernel_eval(z, z).unwrap().re > 0.0);
    }

    #[test]
    fn wedge_chart_identity(z in point(3.0), w in point(3.0)) {
        let (zeta, tau, jac) = wedge_chart(z, w);
        prop_assert!((zeta - tau - (z + w)).norm() < 1e-12);
        prop_assert!((jac - (z - w)).norm() == 0.0);
    }

    #[test]
    fn ray_verdict_is_rotation_invariant(
        pts in prop::collection::vec(point(3.0), 5..9),
        z in point(1.0),
        rot in 0.0..2.0 * PI,
    ) {
        prop_assume!(pts.iter().all(|p| (p - z).norm() > 1e-6));
        let base = five_point_predicate(&pts, z).unwrap();
        prop_assume!((base.max_gap - PI).abs() > 1e-6);
        let u = Complex64::from_polar(1.0, rot);
        let turned: Vec<_> = pts.iter().map(|p| p * u).collect();
        let other = five_point_predicate(&turned, z * u).unwrap();
        prop_assert_eq!(base.verdict, other.verdict);
    }

    #[test]
    fn blaschke_partials_increase(n_max in 1u32..6, t in 0.5f64..3.0) {
        let set = ZeroSet::disc_dyadic(n_max, 1).unwrap();
        let s = blaschke_sum(&set, t).unwrap();
        prop_assert!(s.partial.windows(2).all(|w| w[1] >= w[0]));
        prop_assert!((s.total() - s.subtotals.iter().sum::<f64>()).abs() < 1e-12);
    }
}
