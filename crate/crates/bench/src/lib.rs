//! Shared fixtures for the criterion benchmarks.

use lame_core::{Complex64 as C, GleParams, LatticeData, LAME_N};

pub fn lattice() -> LatticeData {
    LatticeData::new(C::new(0.1, 1.2), 1e-12).expect("valid lattice")
}

/// Points of the cell away from the lattice.
pub fn points(l: &LatticeData, n: usize) -> Vec<C> {
    (0..n)
        .map(|k| {
            let t = k as f64 / n as f64;
            l.from_coords(0.45 * (7.0 * t).sin(), 0.45 * (5.0 * t + 0.3).cos())
        })
        .filter(|&z| l.lattice_distance(z) > 0.1)
        .collect()
}

pub fn equation(l: &LatticeData) -> GleParams<'_> {
    GleParams::apparent(LAME_N, C::new(0.3, 0.25), C::new(0.4, 0.1), l).expect("apparent equation")
}
