use nalgebra::DMatrix;
use orbitope::linalg::{haar_orthogonal_with, haar_rotation_with, GeneralMatrix, SkewMatrix, SymmetricMatrix};
use orbitope::matrix_orbitopes::{
    fan_membership, fan_membership_lmi, nuclear_ball_membership, on_membership, sh_skew_membership,
    sh_skew_membership_lmi, sh_sym_membership, sh_sym_membership_lmi, sh_sym_support, so3_membership,
    son_membership,
};
use orbitope::verdict::{MembershipVerdict, Status};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-7;

fn uniform(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0))
}

/// `center + s·(mean of two orbit points - center)` for a random `s`.
fn near_boundary(rng: &mut ChaCha8Rng, orbit: &dyn Fn(&mut ChaCha8Rng) -> DMatrix<f64>, center: &DMatrix<f64>) -> DMatrix<f64> {
    let a = orbit(rng);
    let b = orbit(rng);
    let w = rng.random_range(0.0..1.0);
    let s = rng.random_range(0.0..1.6);
    center + (a * w + b * (1.0 - w) - center) * s
}

#[test]
fn symmetric_routes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for case in 0..200 {
        let n = 2 + case % 4;
        let m = SymmetricMatrix::symmetrize(&uniform(&mut rng, n)).unwrap();
        let center = DMatrix::identity(n, n) * (m.trace() / n as f64);
        let orbit = |r: &mut ChaCha8Rng| m.conjugate(&haar_orthogonal_with(r, n)).into_inner();
        let a = SymmetricMatrix::symmetrize(&near_boundary(&mut rng, &orbit, &center)).unwrap();
        let v1 = sh_sym_membership(&m, &a, TOL).unwrap();
        let v2 = sh_sym_membership_lmi(&m, &a, TOL).unwrap();
        assert_eq!(v1.status, v2.status, "case {case}: {} vs {}", v1.margin, v2.margin);
    }
}

#[test]
fn skew_routes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..200 {
        let n = 2 + case % 4;
        let nm = SkewMatrix::skew_part(&uniform(&mut rng, n)).unwrap();
        let zero = DMatrix::zeros(n, n);
        let orbit = |r: &mut ChaCha8Rng| nm.conjugate(&haar_rotation_with(r, n)).into_inner();
        let a = SkewMatrix::skew_part(&near_boundary(&mut rng, &orbit, &zero)).unwrap();
        let v1 = sh_skew_membership(&nm, &a, TOL).unwrap();
        let v2 = sh_skew_membership_lmi(&nm, &a, TOL).unwrap();
        assert_eq!(v1.status, v2.status, "case {case}: {} vs {}", v1.margin, v2.margin);
    }
}

#[test]
fn fan_routes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for case in 0..200 {
        let n = 2 + case % 4;
        let a = GeneralMatrix::new(uniform(&mut rng, n)).unwrap();
        let zero = DMatrix::zeros(n, n);
        let orbit = |r: &mut ChaCha8Rng| haar_orthogonal_with(r, n) * a.as_matrix() * haar_orthogonal_with(r, n);
        let x = GeneralMatrix::new(near_boundary(&mut rng, &orbit, &zero)).unwrap();
        let v1 = fan_membership(&a, &x, TOL).unwrap();
        let v2 = fan_membership_lmi(&a, &x, TOL).unwrap();
        assert_eq!(v1.status, v2.status, "case {case}: {} vs {}", v1.margin, v2.margin);
    }
}

#[test]
fn orbit_points_are_on_the_boundary() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for n in 2..=5 {
        let m = SymmetricMatrix::symmetrize(&uniform(&mut rng, n)).unwrap();
        let a = GeneralMatrix::new(uniform(&mut rng, n)).unwrap();
        for _ in 0..20 {
            let g = haar_orthogonal_with(&mut rng, n);
            let v = sh_sym_membership(&m, &m.conjugate(&g), TOL).unwrap();
            assert!(v.status == Status::Boundary && v.margin.abs() <= TOL);
            let h = haar_orthogonal_with(&mut rng, n);
            let x = GeneralMatrix::new(&g * a.as_matrix() * h.transpose()).unwrap();
            let v = fan_membership(&a, &x, TOL).unwrap();
            assert!(v.status == Status::Boundary && v.margin.abs() <= TOL);
        }
    }
}

#[test]
fn support_dominates_orbit_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for n in [2, 3, 4] {
        let m = SymmetricMatrix::symmetrize(&uniform(&mut rng, n)).unwrap();
        let b = SymmetricMatrix::symmetrize(&uniform(&mut rng, n)).unwrap();
        let (h, arg) = sh_sym_support(&m, &b).unwrap();
        assert!((arg.as_matrix().dot(b.as_matrix()) - h).abs() <= 1e-8);
        assert_eq!(sh_sym_membership(&m, &arg, TOL).unwrap().status, Status::Boundary);
        for _ in 0..2000 {
            let g = haar_orthogonal_with(&mut rng, n);
            let val = m.conjugate(&g).as_matrix().dot(b.as_matrix());
            assert!(h - val >= -1e-9);
        }
    }
}

#[test]
fn so3_oracles_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..300 {
        let x = if rng.random_bool(0.5) {
            DMatrix::from_fn(3, 3, |_, _| rng.random_range(-2.0..2.0))
        } else {
            let w = rng.random_range(0.0..1.0);
            let s = rng.random_range(0.2..1.3);
            (haar_rotation_with(&mut rng, 3) * w + haar_rotation_with(&mut rng, 3) * (1.0 - w)) * s
        };
        let x = GeneralMatrix::new(x).unwrap();
        assert_eq!(so3_membership(&x, TOL).unwrap().status, son_membership(&x, TOL).unwrap().status);
    }
}

type Oracle = Box<dyn Fn(&DMatrix<f64>) -> MembershipVerdict>;

#[test]
fn midpoints_of_inside_points_are_inside() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let n = 3;
    let m = SymmetricMatrix::symmetrize(&uniform(&mut rng, n)).unwrap();
    let nm = SkewMatrix::skew_part(&uniform(&mut rng, n)).unwrap();
    let a = GeneralMatrix::new(uniform(&mut rng, n)).unwrap();
    let (m2, nm2, a2) = (m.clone(), nm.clone(), a.clone());
    let oracles: Vec<(Oracle, Box<dyn Fn(&mut ChaCha8Rng) -> DMatrix<f64>>)> = vec![
        (
            Box::new(move |x| sh_sym_membership(&m, &SymmetricMatrix::symmetrize(x).unwrap(), TOL).unwrap()),
            Box::new(move |r| {
                let g = haar_orthogonal_with(r, n);
                let h = haar_orthogonal_with(r, n);
                (m2.conjugate(&g).into_inner() + m2.conjugate(&h).into_inner()) * 0.5
            }),
        ),
        (
            Box::new(move |x| sh_skew_membership(&nm, &SkewMatrix::skew_part(x).unwrap(), TOL).unwrap()),
            Box::new(move |r| {
                let g = haar_rotation_with(r, n);
                let h = haar_rotation_with(r, n);
                (nm2.conjugate(&g).into_inner() + nm2.conjugate(&h).into_inner()) * 0.5
            }),
        ),
        (
            Box::new(move |x| fan_membership(&a, &GeneralMatrix::new(x.clone()).unwrap(), TOL).unwrap()),
            Box::new(move |r| a2.as_matrix() * haar_orthogonal_with(r, n) * rand_scale(r)),
        ),
        (
            Box::new(|x| so3_membership(&GeneralMatrix::new(x.clone()).unwrap(), TOL).unwrap()),
            Box::new(mean_of_four_rotations),
        ),
        (
            Box::new(|x| son_membership(&GeneralMatrix::new(x.clone()).unwrap(), TOL).unwrap()),
            Box::new(mean_of_four_rotations),
        ),
        (
            Box::new(|x| on_membership(&GeneralMatrix::new(x.clone()).unwrap(), TOL)),
            Box::new(|r| haar_orthogonal_with(r, 3) * rand_scale(r)),
        ),
        (
            Box::new(|x| nuclear_ball_membership(&GeneralMatrix::new(x.clone()).unwrap(), TOL)),
            Box::new(|r| {
                let u = haar_orthogonal_with(r, 3);
                u.column(0) * u.column(1).transpose() * rand_scale(r)
            }),
        ),
    ];
    for (i, (oracle, sample)) in oracles.iter().enumerate() {
        let mut inside = Vec::new();
        let mut tries = 0;
        while inside.len() < 20 {
            tries += 1;
            assert!(tries < 10_000, "oracle {i}: no inside samples");
            let x = sample(&mut rng);
            if oracle(&x).status == Status::Inside {
                inside.push(x);
            }
        }
        for p in inside.windows(2) {
            let mid = (&p[0] + &p[1]) * 0.5;
            assert_eq!(oracle(&mid).status, Status::Inside, "oracle {i}");
        }
    }
}

/// Two rotations only span an edge of conv SO(3) (their lift has rank 2),
/// so interior samples need at least four.
fn mean_of_four_rotations(r: &mut ChaCha8Rng) -> DMatrix<f64> {
    (0..4).map(|_| haar_rotation_with(r, 3)).sum::<DMatrix<f64>>() * 0.25
}

fn rand_scale(r: &mut ChaCha8Rng) -> f64 {
    r.random_range(0.1..0.99)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sym_membership_is_conjugation_invariant(seed in any::<u64>(), n in 2usize..5, s in 0.0f64..1.5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = SymmetricMatrix::symmetrize(&uniform(&mut rng, n)).unwrap();
        let center = DMatrix::identity(n, n) * (m.trace() / n as f64);
        let a = center.clone() + (m.conjugate(&haar_orthogonal_with(&mut rng, n)).into_inner() - &center) * s;
        let a = SymmetricMatrix::symmetrize(&a).unwrap();
        let g = haar_orthogonal_with(&mut rng, n);
        let v1 = sh_sym_membership(&m, &a, TOL).unwrap();
        let v2 = sh_sym_membership(&m, &a.conjugate(&g), TOL).unwrap();
        prop_assert!((v1.margin - v2.margin).abs() < 1e-9);
    }
}
