mod common;

use std::f64::consts::{PI, TAU};

use conewright::acceptance::random_isometry;
use conewright::holonomy::{
    angle_error, cone_conditions, lift_obstruction, order_two_example, prop_angle_witness, standard_cone_pair,
    verify_presentation, weave_commutator, weave_example, AxisOrientation, ConeFailure, ConeVerdict, GaussMatrix,
    Image, LiftWitness, PeripheralPair, Presentation, RepAssignment, RepFile, Word,
};
use conewright::hypgeo::{Geodesic, IsomClass, Isometry};
use conewright::Error;
use num_complex::{Complex, Complex64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const WEAVE_REP: &str = include_str!("../data/weave_rep.json");

fn g(re: i64, im: i64) -> Complex<i64> {
    Complex::new(re, im)
}

/// Lifts of the Klein four-group: every word evaluates to a scalar multiple
/// of one of these, so a relator is central exactly when it lands on `±I`.
fn quaternion_units() -> [GaussMatrix; 4] {
    [
        [g(1, 0), g(0, 0), g(0, 0), g(1, 0)],
        [g(0, 1), g(0, 0), g(0, 0), g(0, -1)],
        [g(0, 0), g(1, 0), g(-1, 0), g(0, 0)],
        [g(0, 0), g(0, 1), g(0, 1), g(0, 0)],
    ]
}

fn scalar_sign(m: &GaussMatrix) -> Option<i8> {
    let zero = g(0, 0);
    (m[1] == zero && m[2] == zero && m[0] == m[3] && m[0].im == 0 && m[0].re.abs() == 1).then(|| m[0].re as i8)
}

fn raw_mul(x: &[Complex64; 4], y: &[Complex64; 4]) -> [Complex64; 4] {
    [x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]]
}

/// `k m k⁻¹` on the matrix level, keeping the sign of `m`.
fn conjugate_image(img: &Image, k: &Isometry) -> Image {
    let ke = k.entries();
    let kinv = [ke[3], -ke[1], -ke[2], ke[0]];
    let r = raw_mul(&raw_mul(&ke, &img.raw()), &kinv);
    Image::Float(Isometry { a: r[0], b: r[1], c: r[2], d: r[3] })
}

/// Random presentation over the quaternion units, keeping central relators only.
fn random_central(rng: &mut impl Rng) -> (Presentation, RepAssignment) {
    let ngen = rng.gen_range(1..=4);
    let generators: Vec<String> = (0..ngen).map(|i| format!("g{i}")).collect();
    let units = quaternion_units();
    let images = generators
        .iter()
        .map(|name| {
            let mut m = units[rng.gen_range(0..4)];
            if rng.gen_bool(0.5) {
                m = m.map(|z| -z);
            }
            (name.clone(), Image::Exact(m))
        })
        .collect();
    let r = RepAssignment { images };
    let mut relators = Vec::new();
    let want = rng.gen_range(0..=4);
    while relators.len() < want {
        let len = rng.gen_range(1..=6);
        let w: Word = (0..len)
            .map(|_| {
                let e = *[-2i64, -1, 1, 2, 3].get(rng.gen_range(0..5)).unwrap();
                (generators[rng.gen_range(0..ngen)].clone(), e)
            })
            .collect();
        if scalar_sign(&r.eval_exact(&w).unwrap().unwrap()).is_some() {
            relators.push(w);
        }
    }
    (Presentation { generators, relators }, r)
}

fn signs_with_flips(p: &Presentation, r: &RepAssignment, flips: &[bool]) -> Vec<i8> {
    let mut r = r.clone();
    for (name, &f) in p.generators.iter().zip(flips) {
        if f {
            r = r.negated(name).unwrap();
        }
    }
    p.relators.iter().map(|w| scalar_sign(&r.eval_exact(w).unwrap().unwrap()).unwrap()).collect()
}

#[test]
fn weave_representation() {
    let f = RepFile::from_json(WEAVE_REP).unwrap();
    let (p, r) = weave_example();
    assert_eq!(f.presentation, p);
    assert_eq!(f.assignment(), r);
    assert_eq!(verify_presentation(&p, &r).unwrap(), vec![true, true]);
    let rep = lift_obstruction(&p, &r).unwrap();
    assert_eq!(rep.signs, vec![-1, -1]);
    assert!(!rep.liftable);
    let LiftWitness::Certificate { relators } = rep.witness else { panic!() };
    assert!(!relators.is_empty());
    let comm = weave_commutator();
    assert!(comm == [g(-3, 0), g(-2, 0), g(-4, 0), g(-3, 0)] || comm == [g(3, 0), g(2, 0), g(4, 0), g(3, 0)]);
    let c = Image::Exact(comm).isometry();
    assert!((c.trace_sq() - Complex64::new(36.0, 0.0)).norm() < 1e-12);
    assert!(matches!(c.classify(), IsomClass::Loxodromic { .. }));
}

#[test]
fn order_two_and_free_groups() {
    let (p, r) = order_two_example();
    assert!(!lift_obstruction(&p, &r).unwrap().liftable);
    let free = Presentation { generators: p.generators.clone(), relators: vec![] };
    assert!(lift_obstruction(&free, &r).unwrap().liftable);
    let (p, r) = weave_example();
    let free = Presentation { generators: p.generators, relators: vec![] };
    assert!(lift_obstruction(&free, &r).unwrap().liftable);
}

#[test]
fn lift_decision_ignores_the_chosen_lifts() {
    let (p, r) = weave_example();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let parity = p.parity_matrix();
    let base = lift_obstruction(&p, &r).unwrap();
    for _ in 0..1000 {
        let flips: Vec<bool> = (0..3).map(|_| rng.gen_bool(0.5)).collect();
        let mut s = r.clone();
        for (name, &f) in p.generators.iter().zip(&flips) {
            if f {
                s = s.negated(name).unwrap();
            }
        }
        let rep = lift_obstruction(&p, &s).unwrap();
        assert_eq!(rep.liftable, base.liftable);
        for (k, row) in parity.iter().enumerate() {
            let flip = row.iter().zip(&flips).filter(|(&m, &f)| m == 1 && f).count() % 2;
            assert_eq!(rep.rhs[k], base.rhs[k] ^ flip as u8);
        }
    }
}

#[test]
fn lift_decision_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut seen = [0usize; 2];
    for _ in 0..400 {
        let (p, r) = random_central(&mut rng);
        let oracle = common::liftable_by_enumeration(p.generators.len(), |flips| signs_with_flips(&p, &r, flips));
        let rep = lift_obstruction(&p, &r).unwrap();
        assert_eq!(rep.liftable, oracle, "{p:?}");
        seen[usize::from(oracle)] += 1;
        match rep.witness {
            LiftWitness::Flips { generators } => {
                let flips: Vec<bool> = p.generators.iter().map(|x| generators.contains(x)).collect();
                assert!(signs_with_flips(&p, &r, &flips).iter().all(|&s| s == 1));
            }
            LiftWitness::Certificate { relators } => {
                // The certified relators have even total parity but odd sign product.
                let parity = p.parity_matrix();
                for col in 0..p.generators.len() {
                    assert_eq!(relators.iter().map(|&k| parity[k][col]).sum::<u8>() % 2, 0);
                }
                assert_eq!(relators.iter().filter(|&&k| rep.signs[k] < 0).count() % 2, 1);
            }
        }
    }
    assert!(seen[0] > 20 && seen[1] > 20, "{seen:?}");
}

#[test]
fn lift_decision_is_conjugation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let (p, r) = random_central(&mut rng);
        let k = random_isometry(&mut rng);
        let conj =
            RepAssignment { images: r.images.iter().map(|(n, m)| (n.clone(), conjugate_image(m, &k))).collect() };
        let (a, b) = (lift_obstruction(&p, &r).unwrap(), lift_obstruction(&p, &conj).unwrap());
        assert_eq!(a.liftable, b.liftable);
        assert_eq!(a.signs, b.signs);
    }
}

#[test]
fn non_central_relator_is_reported() {
    let (_, r) = weave_example();
    let p = Presentation {
        generators: vec!["alpha".into(), "beta".into(), "mu".into()],
        relators: vec![vec![("beta".into(), 1)]],
    };
    assert_eq!(lift_obstruction(&p, &r), Err(Error::RelatorNotCentral(0)));
}

#[test]
fn malformed_rep_files() {
    assert!(RepFile::from_json(&WEAVE_REP.replace("rep/1", "rep/2")).is_err());
    let missing = WEAVE_REP.replace(
        r#""mu": {"exact": true, "entries": [[1, 0], [0, 0], [0, 0], [1, 0]]}"#,
        r#""nu": {"exact": true, "entries": [[1, 0], [0, 0], [0, 0], [1, 0]]}"#,
    );
    assert!(matches!(RepFile::from_json(&missing), Err(Error::UnknownGenerator(_))));
    let bad_det = WEAVE_REP.replace("[[1, 0], [1, 0], [-2, 0], [-1, 0]]", "[[1, 0], [1, 0], [-3, 0], [-1, 0]]");
    assert!(RepFile::from_json(&bad_det).is_err());
    let float = r#"{"schema": "rep/1", "generators": ["a"], "relators": [[["a", 2]]],
        "images": {"a": [0, 1, 0, 0, 0, 0, 0, -1]}}"#;
    let f = RepFile::from_json(float).unwrap();
    assert!(!lift_obstruction(&f.presentation, &f.assignment()).unwrap().liftable);
    assert!(matches!(RepFile::from_json(&f.to_json()), Ok(ref back) if *back == f));
}

#[test]
fn weave_structure_at_full_angle() {
    // μ ↦ I with the loxodromic commutator as longitude: cone angle 2π, i.e. no cone.
    let lambda = Image::Exact(weave_commutator()).isometry();
    match cone_conditions(&PeripheralPair::new(Isometry::identity(), lambda)) {
        ConeVerdict::ConePair { theta, length, .. } => {
            assert!(angle_error(theta, TAU) < 1e-12);
            assert!((length - 2.0 * 3f64.acosh()).abs() < 1e-12);
        }
        other => panic!("{other:?}"),
    }
    let (lifted, v) = prop_angle_witness(&[TAU], &[1]).unwrap();
    assert!((lifted[0] - 3.0 * TAU).abs() < 1e-12);
    assert_eq!(v.x, vec![2]);
    assert!(matches!(prop_angle_witness(&[0.0], &[0]), Err(Error::NonPositiveAngle(_))));
}

#[test]
fn cone_rejections() {
    let axis = Geodesic::vertical_axis();
    let lox = Isometry::loxodromic_along(&axis, 1.0, 0.2);
    let meridian_lox = PeripheralPair::new(Isometry::loxodromic_along(&axis, 0.5, 0.0), lox);
    assert_eq!(cone_conditions(&meridian_lox), ConeVerdict::Fails { reason: ConeFailure::MeridianTrace });
    let elliptic_longitude =
        PeripheralPair::new(Isometry::rotation_about(&axis, 1.0), Isometry::rotation_about(&axis, 0.5));
    assert_eq!(cone_conditions(&elliptic_longitude), ConeVerdict::Fails { reason: ConeFailure::LongitudeTrace });
    let other = Geodesic::new(
        conewright::hypgeo::BoundaryPoint::new(1.0, 0.0),
        conewright::hypgeo::BoundaryPoint::new(2.0, 1.0),
    )
    .unwrap();
    let skew = PeripheralPair::new(Isometry::rotation_about(&other, 1.0), lox);
    assert_eq!(cone_conditions(&skew), ConeVerdict::Fails { reason: ConeFailure::SkewAxes });
    let t = |x: f64, y: f64| {
        Isometry::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(x, y),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        )
        .unwrap()
    };
    assert_eq!(
        cone_conditions(&PeripheralPair::new(t(1.0, 0.0), t(2.5, 0.0))),
        ConeVerdict::Fails { reason: ConeFailure::RankOne }
    );
    assert_eq!(cone_conditions(&PeripheralPair::new(t(1.0, 0.0), t(0.3, 1.0))), ConeVerdict::ParabolicRankTwo);
    let swapped = Isometry::new(
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(1.0, 0.0),
    )
    .unwrap();
    assert_eq!(
        cone_conditions(&PeripheralPair::new(t(1.0, 0.0), swapped)),
        ConeVerdict::Fails { reason: ConeFailure::NonCommuting }
    );
}

fn theta_range() -> impl Strategy<Value = f64> {
    0.05..TAU - 0.05
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn cone_pair_survives_conjugation(theta in theta_range(), length in 0.1..3.0f64, twist in -PI..PI, seed in any::<u64>()) {
        let k = random_isometry(&mut ChaCha8Rng::seed_from_u64(seed));
        let pp = standard_cone_pair(theta, length, twist).conjugate_by(&k);
        let ConeVerdict::ConePair { theta: got, length: l, .. } = cone_conditions(&pp) else {
            return Err(TestCaseError::fail(format!("{:?}", cone_conditions(&pp))));
        };
        prop_assert!(angle_error(got, theta) < 1e-8);
        prop_assert!((l - length).abs() < 1e-8);
        let tr2 = pp.mu.trace_sq();
        prop_assert!(tr2.im.abs() < 1e-9 && tr2.re > -1e-9 && tr2.re < 4.0 + 1e-9);
        let reversed = PeripheralPair { orientation: AxisOrientation::Reversed, ..pp };
        let ConeVerdict::ConePair { theta: back, .. } = cone_conditions(&reversed) else {
            return Err(TestCaseError::fail("reversed pair rejected"));
        };
        prop_assert!(angle_error(back, TAU - theta) < 1e-8);
    }
}
