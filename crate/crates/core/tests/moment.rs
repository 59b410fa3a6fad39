use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use orbitope::linalg::{haar_rotation_with, hermitian_embed, symmetric_eigenvalues};
use orbitope::moment::{
    cara_face_points, cara_hankel_membership, cara_toeplitz_matrix, cara_toeplitz_membership, hankel_matrix,
    moment_curve_point, rotate_lambda, veronese34_membership, veronese_point, CaraPoint, HankelPoint,
    TernaryQuarticLambda,
};
use orbitope::trigpoly::{fejer_riesz, ComplexPolynomial, TrigPolynomial};
use orbitope::verdict::Status;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-8;

fn toeplitz_rank(p: &CaraPoint, tol: f64) -> usize {
    let emb = hermitian_embed(&cara_toeplitz_matrix(p));
    let ev = symmetric_eigenvalues(emb.as_matrix());
    // the real embedding doubles every eigenvalue
    ev.iter().filter(|&&v| v > tol).count() / 2
}

fn mix(points: &[CaraPoint], w: &[f64]) -> CaraPoint {
    let d = points[0].degree();
    let c = (0..d).map(|k| points.iter().zip(w).map(|(p, w)| w * p.c[k]).sum()).collect();
    let s = (0..d).map(|k| points.iter().zip(w).map(|(p, w)| w * p.s[k]).sum()).collect();
    CaraPoint::new(c, s).unwrap()
}

fn unit_root(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

#[test]
fn curve_points_give_rank_one_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for _ in 0..100 {
        let d = rng.random_range(1..6);
        let t = rng.random_range(0.0..TAU);
        let p = CaraPoint::on_curve(d, t);
        assert_eq!(toeplitz_rank(&p, 1e-8), 1);
        assert_eq!(cara_toeplitz_membership(&p, TOL).unwrap().status, Status::Boundary);

        let h = HankelPoint::new(moment_curve_point(2 * d, t).unwrap()).unwrap();
        let ev = symmetric_eigenvalues(hankel_matrix(&h).as_matrix());
        assert!(ev[1].abs() <= 1e-8, "{ev:?}");
        assert_eq!(cara_hankel_membership(&h, TOL).unwrap().status, Status::Boundary);
    }
}

#[test]
fn face_barycenters_have_rank_equal_to_vertex_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..40 {
        let d = rng.random_range(2..6);
        let k = rng.random_range(1..=d);
        let mut zeros: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..TAU)).collect();
        zeros.sort_by(f64::total_cmp);
        if zeros.windows(2).any(|w| w[1] - w[0] < 0.2) || zeros[0] + TAU - zeros[k - 1] < 0.2 {
            continue;
        }
        // R = |H|² with H vanishing exactly at the chosen circle points
        let mut roots: Vec<Complex64> = zeros.iter().map(|&t| unit_root(t)).collect();
        roots.extend((k..d).map(|_| unit_root(rng.random_range(0.0..TAU)) * rng.random_range(0.1..0.6)));
        let r = TrigPolynomial::squared_modulus(&ComplexPolynomial::from_roots(Complex64::new(1.0, 0.0), &roots));
        let found = cara_face_points(&r, 1e-9).unwrap();
        assert_eq!(found.len(), k, "{found:?} vs {zeros:?}");

        let verts: Vec<CaraPoint> = found.iter().map(|&t| CaraPoint::on_curve(d, t)).collect();
        let bary = mix(&verts, &vec![1.0 / k as f64; k]);
        assert_eq!(toeplitz_rank(&bary, 1e-7), k);
        // the functional vanishes on the face
        let v = r.delta()
            + (0..d)
                .map(|j| r.cos_coeffs()[j] * bary.c[j] + r.sin_coeffs()[j] * bary.s[j])
                .sum::<f64>();
        assert!(v.abs() <= 1e-7 * r.norm());

        let h = fejer_riesz(&r, 1e-9).unwrap();
        for &t in &found {
            assert!(h.eval(unit_root(t)).norm() <= 1e-5);
        }
    }
}

#[test]
fn rank_deficient_hankel_points_have_zero_determinant() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..50 {
        let n = rng.random_range(1..5);
        let count = rng.random_range(1..=n);
        let mut w: Vec<f64> = (0..count).map(|_| rng.random_range(0.1..1.0)).collect();
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= total);
        let mut lambda = vec![0.0; 2 * n + 1];
        for wi in &w {
            let pt = moment_curve_point(2 * n, rng.random_range(0.0..TAU)).unwrap();
            lambda.iter_mut().zip(pt).for_each(|(l, p)| *l += wi * p);
        }
        let h = HankelPoint::new(lambda).unwrap();
        assert!(hankel_matrix(&h).as_matrix().determinant().abs() <= 1e-10);
        assert_eq!(cara_hankel_membership(&h, TOL).unwrap().status, Status::Boundary);
    }
}

#[test]
fn veronese_is_rotation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let unit = |rng: &mut ChaCha8Rng| {
        let v = haar_rotation_with(rng, 3);
        [v[(0, 0)], v[(1, 0)], v[(2, 0)]]
    };
    for _ in 0..100 {
        let g = haar_rotation_with(&mut rng, 3);
        let v = unit(&mut rng);
        let gv = &g * nalgebra::Vector3::from(v);
        let lhs = rotate_lambda(&veronese_point(v).unwrap(), &g);
        let rhs = veronese_point([gv[0], gv[1], gv[2]]).unwrap();
        assert!(lhs.0.iter().zip(&rhs.0).all(|(a, b)| (a - b).abs() < 1e-12));

        // the monomial basis is not orthonormal, so only the status is invariant
        for count in [5, 8] {
            let mut acc = [0.0; 15];
            for _ in 0..count {
                let p = veronese_point(unit(&mut rng)).unwrap();
                acc.iter_mut().zip(p.0).for_each(|(a, x)| *a += x / count as f64);
            }
            let l = TernaryQuarticLambda(acc);
            let s1 = veronese34_membership(&l, TOL).unwrap().status;
            let s2 = veronese34_membership(&rotate_lambda(&l, &g), TOL).unwrap().status;
            let expected = if count < 6 { Status::Boundary } else { Status::Inside };
            assert_eq!((s1, s2), (expected, expected));
        }
    }
}

fn rotate_cara(p: &CaraPoint, phi: f64) -> CaraPoint {
    let (c, s) = (0..p.degree())
        .map(|k| {
            let z = Complex64::new(p.c[k], p.s[k]) * unit_root((k + 1) as f64 * phi);
            (z.re, z.im)
        })
        .unzip();
    CaraPoint::new(c, s).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn toeplitz_margin_is_rotation_invariant(seed in any::<u64>(), d in 1usize..6, phi in 0.0f64..TAU) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let verts: Vec<CaraPoint> = (0..3).map(|_| CaraPoint::on_curve(d, rng.random_range(0.0..TAU))).collect();
        let w: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..1.0)).collect();
        let total: f64 = w.iter().sum();
        let w: Vec<f64> = w.iter().map(|x| x / total * rng.random_range(0.2..1.3)).collect();
        let p = mix(&verts, &w);
        let a = cara_toeplitz_membership(&p, TOL).unwrap();
        let b = cara_toeplitz_membership(&rotate_cara(&p, phi), TOL).unwrap();
        prop_assert!((a.margin - b.margin).abs() < 1e-9);
    }

    #[test]
    fn hankel_points_scale_off_the_hyperplane(seed in any::<u64>(), n in 1usize..4, t in 1.01f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lambda = moment_curve_point(2 * n, rng.random_range(0.0..TAU)).unwrap();
        let h = HankelPoint::new(lambda.iter().map(|x| x * t).collect()).unwrap();
        prop_assert_eq!(cara_hankel_membership(&h, TOL).unwrap().status, Status::Outside);
    }
}

#[test]
fn hankel_matrix_of_moments_is_gram() {
    // K is the Gram matrix of (cos^{n-j} sin^j) over the measure
    let n = 3;
    let ts = [0.3, 1.1, 2.9, 4.0];
    let w = [0.1, 0.2, 0.3, 0.4];
    let mut lambda = vec![0.0; 2 * n + 1];
    let mut gram = DMatrix::zeros(n + 1, n + 1);
    for (t, wi) in ts.iter().zip(w) {
        let m = moment_curve_point(2 * n, *t).unwrap();
        lambda.iter_mut().zip(&m).for_each(|(l, p)| *l += wi * p);
        let (s, c) = t.sin_cos();
        let v = DMatrix::from_fn(n + 1, 1, |j, _| c.powi((n - j) as i32) * s.powi(j as i32));
        gram += &v * v.transpose() * wi;
    }
    let k = hankel_matrix(&HankelPoint::new(lambda).unwrap());
    assert!((k.as_matrix() - gram).norm() < 1e-12);
}
