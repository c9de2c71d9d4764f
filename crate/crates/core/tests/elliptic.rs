mod common;

use std::f64::consts::PI;

use common::{c, random_tau, random_unit, random_z, rng, RowOracle};
use lame_core::{Complex64 as C, Error, LatticeData};
use proptest::prelude::*;
use rand::Rng;

fn legendre_grid() -> Vec<C> {
    (0..20)
        .map(|i| {
            let x = -0.5 + (i % 5) as f64 * 0.25;
            let y = 0.5 + (i / 5) as f64 * (2.5 / 3.0);
            c(x, y)
        })
        .collect()
}

#[test]
fn legendre_relation_on_grid() {
    for tau in legendre_grid() {
        let l = LatticeData::new(tau, 1e-12).unwrap();
        let r = tau * l.eta1() - l.eta2() - c(0.0, 2.0 * PI);
        assert!(r.norm() < 1e-12, "tau = {tau}: {r}");
    }
}

#[test]
fn row_oracle_agrees_with_series() {
    let mut rng = rng(11);
    for _ in 0..50 {
        let tau = c(rng.gen_range(-0.5..0.5), rng.gen_range(0.5..2.0));
        let l = LatticeData::new(tau, 1e-12).unwrap();
        let z = random_z(&mut rng, &l);
        let oracle = RowOracle { tau };
        let (w, zt) = (l.wp(z).unwrap(), l.zeta(z).unwrap());
        assert!((w - oracle.wp(z)).norm() < 1e-8 * (1.0 + w.norm()));
        assert!((zt - oracle.zeta(z)).norm() < 1e-8 * (1.0 + zt.norm()));
    }
}

#[test]
fn quasi_periods_match_zeta_shifts() {
    let mut rng = rng(12);
    for _ in 0..10 {
        let l = LatticeData::new(random_tau(&mut rng), 1e-12).unwrap();
        let z = random_z(&mut rng, &l);
        let zt = l.zeta(z).unwrap();
        assert!((l.zeta(z + 1.0).unwrap() - zt - l.eta1()).norm() < 1e-10);
        assert!((l.zeta(z + l.tau()).unwrap() - zt - l.eta2()).norm() < 1e-10);
    }
}

#[test]
fn addition_and_duplication() {
    let mut rng = rng(13);
    for _ in 0..30 {
        let l = LatticeData::new(random_tau(&mut rng), 1e-12).unwrap();
        let u = random_z(&mut rng, &l);
        let v = random_z(&mut rng, &l);
        if l.lattice_distance(u + v) < 0.1
            || l.lattice_distance(u - v) < 0.1
            || l.torsion_distance(u) < 0.1
        {
            continue;
        }
        let (wu, wv) = (l.wp(u).unwrap(), l.wp(v).unwrap());
        let lhs = l.zeta(u + v).unwrap() + l.zeta(u - v).unwrap() - 2.0 * l.zeta(u).unwrap();
        let rhs = l.wp_prime(u).unwrap() / (wu - wv);
        assert!((lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()));
        let lhs = l.zeta(2.0 * u).unwrap() - 2.0 * l.zeta(u).unwrap();
        let rhs = l.wp_pp(u).unwrap() / (2.0 * l.wp_prime(u).unwrap());
        assert!((lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()));
    }
}

#[test]
fn finite_difference_consistency() {
    let mut rng = rng(14);
    let h = 1e-5;
    for _ in 0..10 {
        let l = LatticeData::new(random_tau(&mut rng), 1e-12).unwrap();
        let z = random_z(&mut rng, &l);
        let dz = (l.zeta(z + h).unwrap() - l.zeta(z - h).unwrap()) / (2.0 * h);
        assert!((dz + l.wp(z).unwrap()).norm() < 1e-6);
        let ds = (l.sigma(z + h) - l.sigma(z - h)) / (2.0 * h);
        assert!((ds / l.sigma(z) - l.zeta(z).unwrap()).norm() < 1e-6);
        let dw = (l.wp(z + h).unwrap() - l.wp(z - h).unwrap()) / (2.0 * h);
        let w1 = l.wp_prime(z).unwrap();
        assert!((dw - w1).norm() < 1e-6 * (1.0 + w1.norm()));
    }
}

#[test]
fn invariants_match_half_period_values() {
    let mut rng = rng(15);
    for _ in 0..10 {
        let l = LatticeData::new(random_tau(&mut rng), 1e-12).unwrap();
        let e: Vec<C> = (1..=3).map(|k| l.e(k)).collect();
        let sum: C = e.iter().sum();
        assert!(sum.norm() < 1e-11 * l.g2().norm());
        let g2 = -4.0 * (e[0] * e[1] + e[1] * e[2] + e[2] * e[0]);
        let g3 = 4.0 * e[0] * e[1] * e[2];
        assert!((g2 - l.g2()).norm() < 1e-11 * l.g2().norm());
        assert!((g3 - l.g3()).norm() < 1e-11 * (1.0 + l.g3().norm()));
    }
}

#[test]
fn inv_wp_returns_canonical_preimage() {
    let mut rng = rng(16);
    for _ in 0..20 {
        let l = LatticeData::new(random_tau(&mut rng), 1e-12).unwrap();
        let z = random_z(&mut rng, &l);
        let w = l.wp(z).unwrap();
        let back = l.inv_wp(w).unwrap();
        assert!((l.wp(back).unwrap() - w).norm() < 1e-10 * (1.0 + w.norm()));
        let (_, y) = l.cell_coords(back);
        assert!((-1e-12..=0.5 + 1e-12).contains(&y));
    }
}

#[test]
fn inv_wp_near_critical_values() {
    let mut rng = rng(17);
    for _ in 0..10 {
        let l = LatticeData::new(random_tau(&mut rng), 1e-12).unwrap();
        for e in (1..=3).map(|k| l.e(k)) {
            for d in [1e-3, 1e-6, 0.0] {
                let w = e + random_unit(&mut rng) * d;
                let z = l.inv_wp(w).unwrap();
                assert!((l.wp(z).unwrap() - w).norm() < 1e-9 * (1.0 + w.norm()), "{w}");
            }
        }
    }
}

#[test]
fn large_values_approach_the_origin_like_the_oracle() {
    let tau = c(0.2, 1.1);
    let l = LatticeData::new(tau, 1e-12).unwrap();
    let oracle = RowOracle { tau };
    for mag in [1e3, 1e5, 1e7] {
        let w = c(mag, -0.5 * mag);
        let z = l.inv_wp(w).unwrap();
        assert!(l.lattice_distance(z) < 2.0 / mag.sqrt());
        assert!((oracle.wp(z) - w).norm() < 1e-8 * mag);
    }
}

#[test]
fn bad_lattices_are_rejected() {
    assert!(matches!(
        LatticeData::new(c(0.0, -1.0), 1e-10),
        Err(Error::NonPositiveImaginaryPart(_))
    ));
    assert!(matches!(
        LatticeData::new(c(0.0, 1.0), 0.0),
        Err(Error::InvalidTolerance(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wp_is_even_and_periodic(
        tx in -0.5f64..0.5, ty in 0.6f64..2.0,
        x in -0.5f64..0.5, y in -0.5f64..0.5,
    ) {
        let l = LatticeData::new(c(tx, ty), 1e-12).unwrap();
        let z = l.from_coords(x, y);
        prop_assume!(l.lattice_distance(z) > 0.05);
        let w = l.wp(z).unwrap();
        let tol = 1e-10 * (1.0 + w.norm());
        prop_assert!((l.wp(-z).unwrap() - w).norm() < tol);
        prop_assert!((l.wp(z + 1.0).unwrap() - w).norm() < tol);
        prop_assert!((l.wp(z - l.tau()).unwrap() - w).norm() < tol);
        let d = l.wp_prime(z).unwrap();
        prop_assert!((l.wp_prime(-z).unwrap() + d).norm() < 1e-10 * (1.0 + d.norm()));
    }

    #[test]
    fn sigma_is_odd_and_quasi_periodic(
        tx in -0.5f64..0.5, ty in 0.6f64..2.0,
        x in -0.5f64..0.5, y in -0.5f64..0.5,
    ) {
        let l = LatticeData::new(c(tx, ty), 1e-12).unwrap();
        let z = l.from_coords(x, y);
        let s = l.sigma(z);
        prop_assert!((l.sigma(-z) + s).norm() < 1e-12 * (1.0 + s.norm()));
        for j in 1..=2 {
            let w = l.omega(j);
            let lhs = l.sigma(z + w);
            let rhs = -(l.eta(j) * (z + w / 2.0)).exp() * s;
            prop_assert!((lhs - rhs).norm() < 1e-10 * (1e-300 + lhs.norm()));
        }
    }

    #[test]
    fn reduction_lands_in_the_centred_cell(
        tx in -0.5f64..0.5, ty in 0.6f64..2.0,
        x in -20.0f64..20.0, y in -20.0f64..20.0,
    ) {
        let l = LatticeData::new(c(tx, ty), 1e-12).unwrap();
        let z = l.from_coords(x, y);
        let (z0, m, n) = l.reduce(z);
        prop_assert!(z0.re.abs() <= 0.5 + 1e-9);
        prop_assert!(z0.im.abs() <= 0.5 * ty + 1e-9);
        let back = z0 + l.from_coords(m as f64, n as f64);
        prop_assert!((back - z).norm() < 1e-12 * (1.0 + z.norm()));
    }
}
