#![allow(dead_code)]

use std::f64::consts::PI;

use lame_core::{Complex64 as C, LatticeData};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Lattice sums for `wp` and `zeta`, summed row by row: the sum over `m` at fixed `n`
/// is done exactly with `pi cot` and `pi^2 / sin^2`, the rows are added until the
/// contribution drops below `1e-17` (rows decay like `exp(-2 pi |n| Im tau)`).
pub struct RowOracle {
    pub tau: C,
}

impl RowOracle {
    fn rows(&self) -> i64 {
        let decay = 2.0 * PI * self.tau.im;
        ((40.0 * 10f64.ln()) / decay).ceil() as i64 + 2
    }

    fn cot(w: C) -> C {
        (PI * w).cos() / (PI * w).sin()
    }

    fn csc2(w: C) -> C {
        let s = (PI * w).sin();
        1.0 / (s * s)
    }

    pub fn wp(&self, z: C) -> C {
        let pi2 = PI * PI;
        let mut s = pi2 * Self::csc2(z) - pi2 / 3.0;
        for n in 1..=self.rows() {
            for n in [n as f64, -(n as f64)] {
                let t = n * self.tau;
                s += pi2 * (Self::csc2(z - t) - Self::csc2(t));
            }
        }
        s
    }

    pub fn zeta(&self, z: C) -> C {
        let pi2 = PI * PI;
        let mut s = PI * Self::cot(z) + z * pi2 / 3.0;
        for n in 1..=self.rows() {
            for n in [n as f64, -(n as f64)] {
                let t = n * self.tau;
                s += PI * Self::cot(z - t) + PI * Self::cot(t) + z * pi2 * Self::csc2(t);
            }
        }
        s
    }
}

pub fn random_tau(rng: &mut impl Rng) -> C {
    c(rng.gen_range(-0.5..0.5), rng.gen_range(0.8..1.6))
}

/// A point of the cell at distance at least `margin` (in units of `min(1, Im tau)`)
/// from the 2-torsion points and twice that from the lattice. Near the lattice
/// `B ~ -2.2 / p^2` and the transfer matrices grow like `exp(sqrt|B|)`.
pub fn random_p(rng: &mut impl Rng, l: &LatticeData, margin: f64) -> C {
    let scale = l.tau().im.min(1.0);
    loop {
        let p = l.from_coords(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        if l.torsion_distance(p) >= margin * scale && l.lattice_distance(p) >= 2.0 * margin * scale {
            return p;
        }
    }
}

pub fn random_unit(rng: &mut impl Rng) -> C {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// A generic point of the cell away from the lattice.
pub fn random_z(rng: &mut impl Rng, l: &LatticeData) -> C {
    loop {
        let z = l.from_coords(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        if l.lattice_distance(z) > 0.1 {
            return z;
        }
    }
}

pub fn rel(a: C, b: C) -> f64 {
    (a - b).norm() / (1.0 + b.norm())
}

/// `n` points `tau0 + m h` with a real step.
pub fn real_grid(tau0: C, h: f64, n: usize) -> Vec<C> {
    (0..n).map(|m| tau0 + m as f64 * h).collect()
}

/// Five-point central second difference of `f` at `z` with step `h`.
pub fn second_difference(f: impl Fn(C) -> C, z: C, h: f64) -> C {
    (-f(z + 2.0 * h) + 16.0 * f(z + h) - 30.0 * f(z) + 16.0 * f(z - h) - f(z - 2.0 * h)) / (12.0 * h * h)
}
