//! The common eigenfunction
//! `y1 = exp((r eta1 + s eta2) z) sigma(z - a1) sigma(z - a2) / sigma(z) / [sigma(z - p) sigma(z + p)]^(1/2)`
//! and the second solution `y2 = y1 chi` with `chi' = y1^(-2)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{c_from_wp_a1, CaseTag};
use crate::elliptic::LatticeData;
use crate::error::{Error, Result};
use crate::ext::ExtComplex;
use crate::numint::{polyline_slit_distance, slit_endpoint};

type C = Complex64;

const I: C = C::new(0.0, 1.0);

/// How to seed [`eig_ansatz`]: a zero `a1` off the 2-torsion points, or the
/// half-period case index `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnsatzSeed {
    A1(C),
    HalfPeriod(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigAnsatz {
    pub case: CaseTag,
    pub a1: C,
    pub a2: C,
    pub r: f64,
    pub s: f64,
    pub c3: C,
    pub c4: C,
    pub chi1: C,
    pub chi2: C,
    pub c: ExtComplex,
}

impl EigAnsatz {
    /// `r eta1 + s eta2`.
    pub fn momentum(&self, l: &LatticeData) -> C {
        self.r * l.eta1() + self.s * l.eta2()
    }
}

fn ratio(chi1: C, chi2: C) -> ExtComplex {
    if chi1.norm() <= 1e-13 * chi2.norm() {
        ExtComplex::Infinity
    } else {
        ExtComplex::Finite(chi2 / chi1)
    }
}

/// Eigenfunction data at `p`.
pub fn eig_ansatz(p: C, seed: AnsatzSeed, l: &LatticeData) -> Result<EigAnsatz> {
    let w = l.wp(p)?;
    match seed {
        AnsatzSeed::A1(a1) => {
            let (x, d1) = l.wp_and_prime(a1)?;
            if d1.norm() <= 1e-8 * (1.0 + x.norm()).powf(1.5) {
                return Err(Error::DegenerateAnsatz(format!(
                    "wp'(a1) vanishes at a1 = {a1}; use the half-period case"
                )));
            }
            let c3 = (x - w) / (d1 * d1);
            let chi1 = -2.0 * c3 * (l.eta1() + x);
            let chi2 = -2.0 * c3 * (l.eta2() + x * l.tau());
            if chi1 == C::default() && chi2 == C::default() {
                return Err(Error::DegenerateAnsatz("chi1 = chi2 = 0".into()));
            }
            Ok(EigAnsatz {
                case: CaseTag::Generic,
                a1,
                a2: -a1,
                r: 0.0,
                s: 0.0,
                c3,
                c4: c3,
                chi1,
                chi2,
                c: c_from_wp_a1(x, l),
            })
        }
        AnsatzSeed::HalfPeriod(k) => {
            let case = CaseTag::from_k(k)?;
            if case == CaseTag::Generic {
                return Err(Error::InconsistentInput("half-period case needs k in 1..=3".into()));
            }
            let (i, j) = CaseTag::pair(k);
            let (ei, ej) = (l.e(i), l.e(j));
            let g2 = l.g2();
            let (wpp_i, wpp_j) = (6.0 * ei * ei - g2 / 2.0, 6.0 * ej * ej - g2 / 2.0);
            let c3 = 2.0 * (ei - w) / ((ei - ej) * wpp_i);
            let c4 = 2.0 * (ej - w) / ((ej - ei) * wpp_j);
            let chi1 = -l.eta1() * (c3 + c4) - (c3 * ei + c4 * ej);
            let chi2 = l.tau() * chi1 + 2.0 * PI * I * (c3 + c4);
            if chi1.norm() + chi2.norm() <= 1e-14 * (c3.norm() + c4.norm()) {
                return Err(Error::DegenerateAnsatz("chi1 = chi2 = 0".into()));
            }
            let (a1, a2) = (l.omega(i) / 2.0, l.omega(j) / 2.0);
            let (r, s) = l.cell_coords(a1 + a2);
            Ok(EigAnsatz {
                case,
                a1,
                a2,
                r,
                s,
                c3,
                c4,
                chi1,
                chi2,
                c: ratio(chi1, chi2),
            })
        }
    }
}

/// Accessory parameter: the regular part of `y1'/y1` at `z = p`.
pub fn accessory_from_eig(ans: &EigAnsatz, p: C, l: &LatticeData) -> Result<C> {
    Ok(ans.momentum(l) + l.zeta(p - ans.a1)? + l.zeta(p - ans.a2)? - l.zeta(p)?
        - 0.5 * l.zeta(2.0 * p)?)
}

/// Residuals of the zero conditions
/// `zeta(ai+p) + zeta(ai-p) - 2 zeta(ai) = 2 [zeta(ai-aj) + zeta(aj) - zeta(ai)]`
/// for `(i, j) = (1, 2), (2, 1)`, followed by the two quasi-momentum residuals
/// `r + s tau - (a1 + a2)` and `r eta1 + s eta2 - zeta(a1) - zeta(a2)`.
pub fn constraint_residuals(ans: &EigAnsatz, p: C, l: &LatticeData) -> Result<[C; 4]> {
    let zero = |ai: C, aj: C| -> Result<C> {
        let lhs = l.zeta(ai + p)? + l.zeta(ai - p)? - 2.0 * l.zeta(ai)?;
        let rhs = 2.0 * (l.zeta(ai - aj)? + l.zeta(aj)? - l.zeta(ai)?);
        Ok(lhs - rhs)
    };
    Ok([
        zero(ans.a1, ans.a2)?,
        zero(ans.a2, ans.a1)?,
        ans.r + ans.s * l.tau() - (ans.a1 + ans.a2),
        ans.momentum(l) - l.zeta(ans.a1)? - l.zeta(ans.a2)?,
    ])
}

/// `y1` with its square-root branch fixed by continuity from a base point.
#[derive(Debug, Clone)]
pub struct Eigenfunction<'l> {
    ansatz: EigAnsatz,
    lattice: &'l LatticeData,
    p: C,
    q0: C,
    root_q0: C,
    norm: C,
}

const CONTINUATION_PIECES: usize = 32;
const MAX_BISECTIONS: usize = 40;

impl<'l> Eigenfunction<'l> {
    /// Normalized so that `y1^(-2) = chi'`; the branch slit is `[-p, p] + Lambda` with
    /// `p = slit_endpoint(p)`, and the root at `q0` is the principal one.
    pub fn new(ansatz: EigAnsatz, p: C, lattice: &'l LatticeData, q0: C) -> Result<Self> {
        let p = slit_endpoint(p, lattice);
        if polyline_slit_distance(&[q0, q0], p, lattice) <= 1e-12 {
            return Err(Error::BranchCutCrossing { from: q0, to: q0 });
        }
        let mut y = Eigenfunction {
            ansatz,
            lattice,
            p,
            q0,
            root_q0: C::new(1.0, 0.0),
            norm: C::new(1.0, 0.0),
        };
        y.root_q0 = y.slit_product(q0).sqrt();
        let raw = y.entire_part(q0) / y.root_q0;
        let chi_prime = y.chi_prime(q0)?;
        y.norm = (raw * raw * chi_prime).sqrt().inv();
        Ok(y)
    }

    pub fn ansatz(&self) -> &EigAnsatz {
        &self.ansatz
    }

    pub fn q0(&self) -> C {
        self.q0
    }

    /// `exp((r eta1 + s eta2) z) sigma(z - a1) sigma(z - a2) / sigma(z)`.
    fn entire_part(&self, z: C) -> C {
        let l = self.lattice;
        let a = &self.ansatz;
        (a.momentum(l) * z).exp() * l.sigma(z - a.a1) * l.sigma(z - a.a2) / l.sigma(z)
    }

    /// `sigma(z - p) sigma(z + p)`.
    fn slit_product(&self, z: C) -> C {
        self.lattice.sigma(z - self.p) * self.lattice.sigma(z + self.p)
    }

    fn continue_root(&self, a: C, root_a: C, b: C, depth: usize) -> C {
        let r = self.slit_product(b).sqrt();
        let root_b = if (r - root_a).norm() <= (r + root_a).norm() {
            r
        } else {
            -r
        };
        if depth >= MAX_BISECTIONS || (root_b - root_a).norm() <= 0.25 * root_a.norm().max(root_b.norm()) {
            return root_b;
        }
        let mid = (a + b) / 2.0;
        let root_mid = self.continue_root(a, root_a, mid, depth + 1);
        self.continue_root(mid, root_mid, b, depth + 1)
    }

    /// `[sigma(z - p) sigma(z + p)]^(1/2)` continued along the segment from `q0`.
    fn root(&self, z: C) -> Result<C> {
        if polyline_slit_distance(&[self.q0, z], self.p, self.lattice) <= 1e-12 {
            return Err(Error::BranchCutCrossing {
                from: self.q0,
                to: z,
            });
        }
        let mut prev = (self.q0, self.root_q0);
        for k in 1..=CONTINUATION_PIECES {
            let pt = self.q0 + (z - self.q0) * (k as f64 / CONTINUATION_PIECES as f64);
            prev = (pt, self.continue_root(prev.0, prev.1, pt, 0));
        }
        Ok(prev.1)
    }

    /// `y1'/y1`.
    pub fn log_derivative(&self, z: C) -> Result<C> {
        let l = self.lattice;
        let a = &self.ansatz;
        Ok(a.momentum(l) + l.zeta(z - a.a1)? + l.zeta(z - a.a2)? - l.zeta(z)?
            - 0.5 * (l.zeta(z - self.p)? + l.zeta(z + self.p)?))
    }

    /// `(y1, y1')` at `z`, continued along the straight segment from `q0`.
    pub fn eval(&self, z: C) -> Result<(C, C)> {
        let y = self.norm * self.entire_part(z) / self.root(z)?;
        Ok((y, y * self.log_derivative(z)?))
    }

    /// `y1(z)^2`, which needs no branch choice.
    pub fn square(&self, z: C) -> C {
        let g = self.entire_part(z);
        self.norm * self.norm * g * g / self.slit_product(z)
    }

    /// `chi(z) = -c3 (zeta(z - a1) + wp(a1) z) - c4 (zeta(z - a2) + wp(a2) z)`.
    pub fn chi(&self, z: C) -> Result<C> {
        let l = self.lattice;
        let a = &self.ansatz;
        Ok(-a.c3 * (l.zeta(z - a.a1)? + l.wp(a.a1)? * z) - a.c4 * (l.zeta(z - a.a2)? + l.wp(a.a2)? * z))
    }

    /// `chi'(z) = c3 (wp(z - a1) - wp(a1)) + c4 (wp(z - a2) - wp(a2))`.
    pub fn chi_prime(&self, z: C) -> Result<C> {
        let l = self.lattice;
        let a = &self.ansatz;
        Ok(a.c3 * (l.wp(z - a.a1)? - l.wp(a.a1)?) + a.c4 * (l.wp(z - a.a2)? - l.wp(a.a2)?))
    }

    /// `(chi, y2, y2')` at `z`.
    pub fn chi_and_second_solution(&self, z: C) -> Result<(C, C, C)> {
        let (y, dy) = self.eval(z)?;
        let chi = self.chi(z)?;
        let dchi = self.chi_prime(z)?;
        Ok((chi, y * chi, dy * chi + y * dchi))
    }
}
