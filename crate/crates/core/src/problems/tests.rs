use nalgebra::DMatrix;

use super::*;
use crate::linalg::{self, SymMatrix};
use crate::manifold::Manifold;
use crate::rng::{self, Stream};

fn sphere_pt(v: &[f64]) -> Point {
    Manifold::Sphere(v.len()).unit_point(v).unwrap()
}

fn diag_spd(d: &[f64]) -> Point {
    Manifold::Spd(d.len())
        .spd_point(&SymMatrix::from_diagonal(d))
        .unwrap()
}

fn random_dirs(x: &Point, n: usize, seed: u64) -> Vec<Tangent> {
    let mut r = rng::stream(seed, Stream::Sampling);
    (0..n).map(|_| x.manifold().random_unit_tangent(x, &mut r)).collect()
}

#[test]
fn rayleigh_values() {
    let id = Rayleigh::new(SymMatrix::identity(3)).unwrap();
    assert_close!(id.value(&sphere_pt(&[0.3, -1.0, 2.0])).unwrap(), -0.5, 1e-15);
    let p = Rayleigh::new(SymMatrix::from_diagonal(&[3.0, 1.0])).unwrap();
    assert_close!(p.value(&sphere_pt(&[1.0, 0.0])).unwrap(), -1.5, 1e-15);
    assert_close!(p.value(&sphere_pt(&[1.0, 1.0])).unwrap(), -1.0, 1e-15);
    assert_eq!(p.lipschitz, 3.0);
    assert_eq!(p.mu_hint, 1.0);
    assert_eq!(p.optimum_value(), -1.5);
}

#[test]
fn rayleigh_grad_stationary_and_descent() {
    let p = Rayleigh::new(SymMatrix::from_diagonal(&[3.0, 2.0, 1.0])).unwrap();
    for e in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] {
        assert_eq!(p.grad(&sphere_pt(&e)).unwrap().norm(), 0.0);
    }
    let id = Rayleigh::new(SymMatrix::identity(3)).unwrap();
    assert!(id.grad(&sphere_pt(&[1.0, 2.0, 3.0])).unwrap().norm() < 1e-15);

    let p = Rayleigh::new(SymMatrix::from_diagonal(&[3.0, 1.0])).unwrap();
    let x = sphere_pt(&[1.0, 1.0]);
    let g = p.grad(&x).unwrap();
    // the descent direction −g points toward e1
    assert!(-g.coords()[0] > 0.0);
    let err = gradient_check(&p, &x, &random_dirs(&x, 5, 1), 1e-5).unwrap();
    assert!(err < 1e-5, "{err}");
}

#[test]
fn rayleigh_generator() {
    let a = gen_rayleigh(20, 21, 5).unwrap();
    let b = gen_rayleigh(20, 21, 5).unwrap();
    assert_eq!(a.matrix(), b.matrix());
    assert_ne!(a.matrix(), gen_rayleigh(20, 21, 6).unwrap().matrix());
    // many samples per dimension: spectrum concentrates near 1
    let w = gen_rayleigh(10, 10_000, 3).unwrap();
    assert!(w.mu_hint / w.lipschitz > 0.8);
    let x0 = rayleigh_start(&a, 9);
    assert!(x0.coords().dot(a.dominant_eigenvector(None).coords()) > 0.0);
    assert_eq!(x0, rayleigh_start(&a, 9));
}

#[test]
fn rayleigh_shift() {
    let p = Rayleigh::new(SymMatrix::from_diagonal(&[3.0, 1.0])).unwrap();
    let s = p.shifted(0.5).unwrap();
    assert_eq!(s.lipschitz, 3.5);
    assert_eq!(s.mu_hint, 1.5);
}

#[test]
fn karcher_examples() {
    let a = SymMatrix::from_rows(2, &[2.0, 0.5, 0.5, 1.0]).unwrap();
    let one = Karcher::new(std::slice::from_ref(&a)).unwrap();
    let pa = Manifold::Spd(2).spd_point(&a).unwrap();
    assert_eq!(one.value(&pa).unwrap(), 0.0);

    let pair = Karcher::new(&[
        SymMatrix::from_diagonal(&[1.0, 1.0]),
        SymMatrix::from_diagonal(&[4.0, 4.0]),
    ])
    .unwrap();
    let g = pair.grad(&diag_spd(&[2.0, 2.0])).unwrap();
    assert!(g.norm() < 1e-14);
    // off the mean the gradient does not vanish
    assert!(pair.grad(&diag_spd(&[3.0, 2.0])).unwrap().norm() > 0.1);
}

#[test]
fn karcher_gradient_fd() {
    let k = gen_spd_set(4, 4, 100.0, 2).unwrap();
    let mut r = rng::stream(3, Stream::Sampling);
    for i in 0..3 {
        let x = Manifold::Spd(4).random_point(&mut r, 1.0);
        let err = gradient_check(&k, &x, &random_dirs(&x, 5, i), 1e-5).unwrap();
        assert!(err < 1e-5, "{err}");
    }
}

#[test]
fn spd_set_condition_numbers() {
    let k = gen_spd_set(5, 6, 1e4, 11).unwrap();
    for a in k.matrices() {
        let e = linalg::sym_eig(&SymMatrix::new(a.coords().clone()).unwrap()).unwrap();
        let c = e.max_eigenvalue() / e.min_eigenvalue();
        assert!((c / 1e4 - 1.0).abs() < 1e-6, "{c}");
    }
    let ones = gen_spd_set(3, 3, 1.0, 1).unwrap();
    for a in ones.matrices() {
        assert!(linalg::rel_frobenius(a.coords(), &DMatrix::identity(3, 3)) < 1e-12);
    }
    assert!(gen_spd_set(3, 3, 0.5, 1).is_err());
}

#[test]
fn random_orthogonal_is_orthogonal() {
    let mut r = rng::stream(1, Stream::Instance);
    let q = random_orthogonal(&mut r, 7);
    let e = q.transpose() * &q - DMatrix::<f64>::identity(7, 7);
    assert!(e.norm() < 1e-12);
}

#[test]
fn capacity_identity_operator() {
    let c = Capacity::new(vec![DMatrix::identity(3, 3)]).unwrap();
    let mut r = rng::stream(4, Stream::Sampling);
    let x = Manifold::Spd(3).random_point(&mut r, 1.0);
    assert!(c.value(&x).unwrap().abs() < 1e-12);
    assert!(c.grad(&x).unwrap().norm() < 1e-12);
}

#[test]
fn capacity_scale_invariance_and_fd() {
    let c = gen_scaling(3, 5, 8).unwrap();
    let mut r = rng::stream(5, Stream::Sampling);
    let m = Manifold::Spd(5);
    for i in 0..3 {
        let x = m.random_point(&mut r, 1.0);
        let x2 = m.point(x.coords() * 2.0).unwrap();
        assert_close!(c.value(&x).unwrap(), c.value(&x2).unwrap(), 1e-10);
        let err = gradient_check(&c, &x, &random_dirs(&x, 5, 10 + i), 1e-5).unwrap();
        assert!(err < 1e-5, "{err}");
    }
}

#[test]
fn capacity_rejects_singular() {
    let mut a = DMatrix::zeros(2, 2);
    a[(0, 0)] = 1.0;
    assert!(matches!(Capacity::new(vec![a]), Err(crate::Error::Domain { .. })));
}

#[test]
fn ds_distance_examples() {
    let i2 = Manifold::Spd(2).origin();
    let ds = Capacity::new(vec![DMatrix::identity(2, 2)]).unwrap();
    assert_eq!(ds.ds_distance(&i2, &i2).unwrap(), 0.0);
    let c = Capacity::new(vec![DMatrix::identity(2, 2) * 2f64.sqrt()]).unwrap();
    assert_close!(c.ds_distance(&i2, &i2).unwrap(), 4.0, 1e-12);
}

#[test]
fn gurvits_half_steps_normalise() {
    let c = gen_scaling(3, 4, 2).unwrap();
    let right = capacity::right_half(c.ops()).unwrap();
    let mut g = DMatrix::<f64>::zeros(4, 4);
    for a in &right {
        g += a.transpose() * a;
    }
    assert!((g - DMatrix::<f64>::identity(4, 4)).norm() < 1e-12);
    let left = capacity::left_half(&right).unwrap();
    let mut h = DMatrix::<f64>::zeros(4, 4);
    for a in &left {
        h += a * a.transpose();
    }
    assert!((h - DMatrix::<f64>::identity(4, 4)).norm() < 1e-12);

    let twice = gurvits_step(&[DMatrix::identity(3, 3) * 2.0]).unwrap();
    assert!((&twice[0] - DMatrix::<f64>::identity(3, 3)).norm() < 1e-14);
    let fixed = gurvits_step(&twice).unwrap();
    assert!((&fixed[0] - &twice[0]).norm() < 1e-14);
}

#[test]
fn gurvits_residual_monotone() {
    let c = gen_scaling(3, 10, 1).unwrap();
    let mut s = GurvitsState::new(&c);
    s.step().unwrap();
    let mut prev = s.residual();
    for _ in 0..100 {
        s.step().unwrap();
        let r = s.residual();
        assert!(r <= prev * (1.0 + 1e-12) + 1e-300, "{r} > {prev}");
        prev = r;
    }
}

#[test]
fn geodesic_convexity_spot_check() {
    let k = gen_spd_set(3, 3, 50.0, 4).unwrap();
    let c = gen_scaling(2, 3, 4).unwrap();
    let mut r = rng::stream(6, Stream::Sampling);
    let m = Manifold::Spd(3);
    for _ in 0..200 {
        let x = m.random_point(&mut r, 1.0);
        let y = m.random_point(&mut r, 1.0);
        for p in [&k as &dyn Problem, &c] {
            let lhs = p.value(&y).unwrap() - p.value(&x).unwrap();
            let rhs = x.inner(&p.grad(&x).unwrap(), &x.log(&y).unwrap());
            assert!(lhs >= rhs - 1e-9 * (1.0 + rhs.abs()), "{lhs} < {rhs}");
        }
    }
}
