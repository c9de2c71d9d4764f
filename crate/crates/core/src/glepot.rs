//! The generalized Lamé equation `y'' = I(z) y` and its potential.
//!
//! ```text
//! I(z) = sum_k n_k (n_k + 1) wp(z + omega_k/2) + 3/4 (wp(z+p) + wp(z-p))
//!        + A (zeta(z+p) - zeta(z-p)) + B
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::elliptic::LatticeData;
use crate::error::{Error, Result};

type C = Complex64;

/// Minimum distance from `p` to the 2-torsion points, and from evaluation
/// points to the singular set.
pub const SINGULAR_RADIUS: f64 = 1e-6;

/// Number of trapezoid nodes on residue and Laurent-coefficient contours.
pub const CONTOUR_NODES: usize = 64;

/// Equation data; the lattice is borrowed so many parameter sets can share it.
#[derive(Debug, Clone)]
pub struct GleParams<'a> {
    pub n: [u32; 4],
    pub p: C,
    pub a: C,
    pub b: C,
    pub lattice: &'a LatticeData,
}

/// The exponent vector of the Lamé case studied in closed form.
pub const LAME_N: [u32; 4] = [1, 0, 0, 0];

fn check_p(p: C, lattice: &LatticeData) -> Result<()> {
    if lattice.torsion_distance(p) < SINGULAR_RADIUS {
        return Err(Error::SingularP(p));
    }
    Ok(())
}

/// The apparent-singularity value of `B` for given `(p, A)`.
pub fn b_from(p: C, a: C, n: [u32; 4], lattice: &LatticeData) -> Result<C> {
    check_p(p, lattice)?;
    let (wp2p, zeta2p) = lattice.wp_and_zeta(2.0 * p)?;
    let mut b = a * a - zeta2p * a - 0.75 * wp2p;
    for (k, &nk) in n.iter().enumerate() {
        if nk > 0 {
            let w = lattice.wp(p + lattice.omega(k) / 2.0)?;
            b -= (nk * (nk + 1)) as f64 * w;
        }
    }
    Ok(b)
}

impl<'a> GleParams<'a> {
    /// Parameters with `B` fixed by the apparency condition.
    pub fn apparent(n: [u32; 4], p: C, a: C, lattice: &'a LatticeData) -> Result<Self> {
        let b = b_from(p, a, n, lattice)?;
        Ok(GleParams { n, p, a, b, lattice })
    }

    /// Parameters with an arbitrary `B`.
    pub fn with_b(n: [u32; 4], p: C, a: C, b: C, lattice: &'a LatticeData) -> Result<Self> {
        check_p(p, lattice)?;
        Ok(GleParams { n, p, a, b, lattice })
    }

    /// Representatives (in the plane, one per class mod the lattice) of the singular set.
    pub fn singular_points(&self) -> Vec<C> {
        let l = self.lattice;
        let mut pts: Vec<C> = (0..4)
            .filter(|&k| self.n[k] > 0)
            .map(|k| l.reduced(l.omega(k) / 2.0))
            .collect();
        let p = l.reduced(self.p);
        pts.push(p);
        pts.push(l.reduced(-p));
        pts
    }

    /// Distance from `z` to the singular set `S + Lambda`.
    pub fn singular_distance(&self, z: C) -> f64 {
        self.singular_points()
            .into_iter()
            .map(|s| self.lattice.lattice_distance(z - s))
            .fold(f64::INFINITY, f64::min)
    }

    /// Evaluates `I(z)`.
    pub fn potential(&self, z: C) -> Result<C> {
        let dist = self.singular_distance(z);
        if dist < SINGULAR_RADIUS {
            return Err(Error::SingularityProximity { z, distance: dist });
        }
        self.potential_unchecked(z)
    }

    /// `I(z)` without the distance check; the series still reject exact poles.
    pub(crate) fn potential_unchecked(&self, z: C) -> Result<C> {
        let l = self.lattice;
        let mut v = self.b;
        for (k, &nk) in self.n.iter().enumerate() {
            if nk > 0 {
                v += (nk * (nk + 1)) as f64 * l.wp(z + l.omega(k) / 2.0)?;
            }
        }
        let (wp_plus, zeta_plus) = l.wp_and_zeta(z + self.p)?;
        let (wp_minus, zeta_minus) = l.wp_and_zeta(z - self.p)?;
        v += 0.75 * (wp_plus + wp_minus) + self.a * (zeta_plus - zeta_minus);
        Ok(v)
    }

    /// Contour radius for local expansions at `center`: a third of the distance
    /// to the rest of the singular set, capped at `0.1 / 3`.
    pub fn local_radius(&self, center: C) -> f64 {
        let l = self.lattice;
        let others = self
            .singular_points()
            .into_iter()
            .flat_map(|s| {
                (-1..=1).flat_map(move |m| (-1..=1).map(move |n| (s, m, n)))
            })
            .map(|(s, m, n)| s + m as f64 + n as f64 * l.tau())
            .map(|s| (s - center).norm())
            .filter(|&d| d > 1e-9)
            .fold(f64::INFINITY, f64::min);
        others.min(0.1) / 3.0
    }

    /// Laurent coefficients `c_j` of `I(z) = sum_j c_j (z - center)^(j - 2)`, `j = 0..count`,
    /// from the trapezoid rule on a circle.
    pub fn laurent_coefficients(&self, center: C, count: usize) -> Result<Vec<C>> {
        let r = self.local_radius(center);
        let nodes: Vec<(C, C)> = (0..CONTOUR_NODES)
            .map(|k| {
                let u = C::from_polar(r, 2.0 * PI * k as f64 / CONTOUR_NODES as f64);
                Ok((u, self.potential(center + u)?))
            })
            .collect::<Result<_>>()?;
        Ok((0..count)
            .map(|j| {
                let sum: C = nodes
                    .iter()
                    .map(|&(u, v)| v * u.powi(2 - j as i32))
                    .sum();
                sum / CONTOUR_NODES as f64
            })
            .collect())
    }

    /// Residue of `I` at `center` by a contour integral.
    pub fn residue(&self, center: C) -> Result<C> {
        Ok(self.laurent_coefficients(center, 2)?[1])
    }

    /// Frobenius analysis at `z = p`.
    pub fn apparent_check(&self) -> Result<ApparencyReport> {
        let coeffs = self.laurent_coefficients(self.p, FROBENIUS_DEPTH + 1)?;
        let leading = coeffs[0];
        // rho (rho - 1) = c_0
        let disc = (1.0 + 4.0 * leading).sqrt();
        let exponents = ((1.0 - disc) / 2.0, (1.0 + disc) / 2.0);
        let rho = exponents.0;

        // a_m [(m + rho)(m + rho - 1) - c_0] = sum_{j>=1} c_j a_{m-j}
        let gap = disc.re.round();
        let resonant = (disc - gap).norm() < 1e-8 && gap >= 1.0;
        let resonance = if resonant { gap as usize } else { usize::MAX };
        let mut series = vec![C::new(1.0, 0.0)];
        let mut obstruction = C::default();
        for m in 1..=FROBENIUS_DEPTH {
            let rhs: C = (1..=m).map(|j| coeffs[j] * series[m - j]).sum();
            let mf = m as f64;
            let indicial = (mf + rho) * (mf + rho - 1.0) - leading;
            if m == resonance {
                obstruction = rhs;
                series.push(C::default());
            } else {
                series.push(rhs / indicial);
            }
        }
        let threshold = APPARENCY_TOL * (1.0 + self.b.norm());
        Ok(ApparencyReport {
            apparent: resonant && obstruction.norm() < threshold,
            exponents,
            obstruction: obstruction.norm(),
            series,
        })
    }
}

/// Frobenius recurrence depth at the apparent singularity.
pub const FROBENIUS_DEPTH: usize = 4;

/// Relative size below which the log obstruction counts as zero.
pub const APPARENCY_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct ApparencyReport {
    pub apparent: bool,
    /// Roots of the indicial equation, smaller real part first.
    pub exponents: (C, C),
    /// Magnitude of the coefficient that would force a logarithm.
    pub obstruction: f64,
    /// Frobenius coefficients `a_0..=a_depth` for the smaller exponent.
    pub series: Vec<C>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn lattice() -> LatticeData {
        LatticeData::new(c(0.12, 1.15), 1e-12).unwrap()
    }

    #[test]
    fn b_from_specializations() {
        let l = lattice();
        let p = c(0.31, 0.27);
        let b = b_from(p, C::default(), [0; 4], &l).unwrap();
        assert!((b + 0.75 * l.wp(2.0 * p).unwrap()).norm() < 1e-12 * b.norm());

        let a = c(0.4, -0.7);
        let b = b_from(p, a, LAME_N, &l).unwrap();
        let expected = a * a - l.zeta(2.0 * p).unwrap() * a - 0.75 * l.wp(2.0 * p).unwrap()
            - 2.0 * l.wp(p).unwrap();
        assert!((b - expected).norm() < 1e-12 * expected.norm());
    }

    #[test]
    fn b_shift_by_period_keeps_potential() {
        // B itself moves by -2 A eta1 under p -> p + 1; the potential is unchanged.
        let l = lattice();
        let p = c(0.31, 0.27);
        let a = c(0.4, -0.7);
        let b0 = b_from(p, a, LAME_N, &l).unwrap();
        let b1 = b_from(p + 1.0, a, LAME_N, &l).unwrap();
        assert!((b1 - (b0 - 2.0 * a * l.eta1())).norm() < 1e-10 * b0.norm());
        let g0 = GleParams::apparent(LAME_N, p, a, &l).unwrap();
        let g1 = GleParams::apparent(LAME_N, p + 1.0, a, &l).unwrap();
        let z = c(-0.2, 0.41);
        let (i0, i1) = (g0.potential(z).unwrap(), g1.potential(z).unwrap());
        assert!((i0 - i1).norm() < 1e-10 * (1.0 + i0.norm()));
        assert_eq!(g0.singular_points().len(), 3);
    }

    #[test]
    fn singular_p_rejected() {
        let l = lattice();
        for k in 0..4 {
            let p = l.omega(k) / 2.0 + 1e-8;
            assert!(matches!(
                b_from(p, C::default(), LAME_N, &l),
                Err(Error::SingularP(_))
            ));
        }
    }

    #[test]
    fn potential_is_even_elliptic() {
        let l = lattice();
        let g = GleParams::apparent(LAME_N, c(0.31, 0.27), c(1.1, 0.3), &l).unwrap();
        for z in [c(0.11, 0.52), c(-0.37, -0.2), c(0.45, 0.05)] {
            let v = g.potential(z).unwrap();
            let tol = 1e-10 * (1.0 + v.norm());
            assert!((g.potential(z + 1.0).unwrap() - v).norm() < tol);
            assert!((g.potential(z + l.tau()).unwrap() - v).norm() < tol);
            assert!((g.potential(-z).unwrap() - v).norm() < tol);
        }
        assert!(matches!(
            g.potential(g.p + 1e-9),
            Err(Error::SingularityProximity { .. })
        ));
    }

    #[test]
    fn double_pole_at_origin_for_lame_case() {
        let l = lattice();
        let g = GleParams::apparent(LAME_N, c(0.31, 0.27), c(1.1, 0.3), &l).unwrap();
        let z = c(1e-4, -5e-5);
        assert!((g.potential(z).unwrap() * z * z - 2.0).norm() < 1e-6);
    }

    #[test]
    fn principal_part_at_p() {
        let l = lattice();
        let a = c(-0.6, 0.9);
        let g = GleParams::apparent(LAME_N, c(0.31, 0.27), a, &l).unwrap();
        // (z-p)^2 (I - principal) = O((z-p)^2): shrinks quadratically.
        let remainder = |h: f64| {
            let u = c(h, 0.5 * h);
            let v = g.potential(g.p + u).unwrap();
            ((v - 0.75 / (u * u) + a / u) * u * u).norm()
        };
        let (r1, r2) = (remainder(1e-3), remainder(5e-4));
        assert!(r1 < 1e-4);
        assert!((r1 / r2 - 4.0).abs() < 0.5, "ratio {}", r1 / r2);
    }

    #[test]
    fn residues_at_plus_minus_p() {
        let l = lattice();
        let a = c(-0.6, 0.9);
        let g = GleParams::apparent(LAME_N, c(0.31, 0.27), a, &l).unwrap();
        assert!((g.residue(g.p).unwrap() + a).norm() < 1e-8 * a.norm());
        assert!((g.residue(-g.p).unwrap() - a).norm() < 1e-8 * a.norm());
    }

    #[test]
    fn frobenius_detects_apparency() {
        let l = lattice();
        let g = GleParams::apparent(LAME_N, c(0.31, 0.27), c(0.5, 0.2), &l).unwrap();
        let report = g.apparent_check().unwrap();
        assert!(report.apparent);
        assert!(report.obstruction < 1e-8);
        assert!((report.exponents.0 - c(-0.5, 0.0)).norm() < 1e-9);
        assert!((report.exponents.1 - c(1.5, 0.0)).norm() < 1e-9);

        let bad = GleParams::with_b(LAME_N, g.p, g.a, g.b + 0.1, &l).unwrap();
        let report = bad.apparent_check().unwrap();
        assert!(!report.apparent);
        // The obstruction is affine in B with unit slope.
        assert!((report.obstruction - 0.1).abs() < 1e-8);
    }
}
