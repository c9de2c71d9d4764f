//! Closed-form monodromy data for `n = (1, 0, 0, 0)` and the constructive
//! Riemann–Hilbert solver.
//!
//! Notation: `X = C eta1 - eta2`, `Y = C - tau`, and `w = wp(p)`.
//! The generic case ("case 0") relates `w` and `C` by a rational map of degree
//! three; the half-period cases `k = 1, 2, 3` by a Möbius map.

mod ansatz;
pub mod poly;

pub use ansatz::{
    accessory_from_eig, constraint_residuals, eig_ansatz, AnsatzSeed, EigAnsatz, Eigenfunction,
};

use num_complex::Complex64;

use crate::elliptic::LatticeData;
use crate::error::{Error, Result};
use crate::ext::ExtComplex;
use crate::glepot::{b_from, LAME_N};
use crate::numint::{MonodromyData, Sign};

type C = Complex64;

/// Relative precondition tolerance of [`solve_rh`].
pub const CONSISTENCY_TOL: f64 = 1e-8;

/// Relative size below which a denominator counts as zero.
const DENOM_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseTag {
    /// `a1, a2 = -a1` away from the 2-torsion points.
    Generic,
    /// `{a1, a2} = {omega_i / 2, omega_j / 2}` with `{i, j, k} = {1, 2, 3}`.
    HalfPeriod(usize),
}

impl CaseTag {
    /// `0` is the generic case, `1..=3` the half-period cases.
    pub fn from_k(k: usize) -> Result<CaseTag> {
        match k {
            0 => Ok(CaseTag::Generic),
            1..=3 => Ok(CaseTag::HalfPeriod(k)),
            _ => Err(Error::InconsistentInput(format!(
                "case index must be 0, 1, 2 or 3, got {k}"
            ))),
        }
    }

    pub fn k(self) -> usize {
        match self {
            CaseTag::Generic => 0,
            CaseTag::HalfPeriod(k) => k,
        }
    }

    /// The pair `(i, j)` complementary to `k`, in increasing order.
    pub fn pair(k: usize) -> (usize, usize) {
        match k {
            1 => (2, 3),
            2 => (1, 3),
            _ => (1, 2),
        }
    }

    /// Predicted signs `(eps1, eps2)` of the monodromy.
    pub fn signs(self) -> (Sign, Sign) {
        match self {
            CaseTag::Generic => (Sign::Plus, Sign::Plus),
            CaseTag::HalfPeriod(1) => (Sign::Plus, Sign::Minus),
            CaseTag::HalfPeriod(2) => (Sign::Minus, Sign::Plus),
            CaseTag::HalfPeriod(_) => (Sign::Minus, Sign::Minus),
        }
    }
}

fn degenerate(what: &str) -> Error {
    Error::DegenerateDenominator(what.to_string())
}

fn is_zero(x: C, scale: f64) -> bool {
    x.norm() <= DENOM_TOL * scale
}

/// `wp(p)` for monodromy data `C` in the generic case.
pub fn p_from_c_case0(c: ExtComplex, l: &LatticeData) -> Result<C> {
    let (eta1, eta2, tau, g2, g3) = (l.eta1(), l.eta2(), l.tau(), l.g2(), l.g3());
    let Some(c) = c.finite() else {
        let den = 12.0 * eta1 * eta1 - g2;
        if is_zero(den, 12.0 * eta1.norm_sqr() + g2.norm()) {
            return Err(degenerate("12 eta1^2 - g2"));
        }
        return Ok((2.0 * g3 - 4.0 * eta1 * eta1 * eta1 - g2 * eta1) / den);
    };
    let x = c * eta1 - eta2;
    let y = c - tau;
    if is_zero(y, 1.0 + c.norm() + tau.norm()) {
        return Err(degenerate("C - tau"));
    }
    let quad = 12.0 * x * x - g2 * y * y;
    if is_zero(quad, 12.0 * x.norm_sqr() + g2.norm() * y.norm_sqr()) {
        return Err(degenerate("12 (C eta1 - eta2)^2 - g2 (C - tau)^2"));
    }
    Ok((2.0 * g3 * y * y * y - 4.0 * x * x * x - g2 * x * y * y) / (y * quad))
}

/// Coefficients (ascending in `C`) of the cubic whose roots satisfy
/// `p_from_c_case0(C) = w`.
pub fn case0_cubic(w: C, l: &LatticeData) -> Vec<C> {
    use poly::{add, mul, scale};
    let (eta1, eta2, tau, g2, g3) = (l.eta1(), l.eta2(), l.tau(), l.g2(), l.g3());
    let x = [-eta2, eta1];
    let y = [-tau, C::new(1.0, 0.0)];
    let x2 = mul(&x, &x);
    let y2 = mul(&y, &y);
    let x3 = mul(&x2, &x);
    let y3 = mul(&y2, &y);
    let quad = add(&scale(&x2, C::new(12.0, 0.0)), &scale(&y2, -g2));
    let lhs = scale(&mul(&y, &quad), w);
    let rhs = add(
        &add(&scale(&y3, 2.0 * g3), &scale(&x3, C::new(-4.0, 0.0))),
        &scale(&mul(&x, &y2), -g2),
    );
    add(&lhs, &scale(&rhs, C::new(-1.0, 0.0)))
}

/// All `C` (with multiplicity) mapping to `w` in the generic case; `Infinity`
/// is appended once per degree lost by the cubic.
pub fn c_from_p_case0(w: C, l: &LatticeData) -> Vec<ExtComplex> {
    let cubic = case0_cubic(w, l);
    let drop = poly::degree_drop(&cubic);
    let mut out: Vec<ExtComplex> = poly::roots(&cubic).into_iter().map(ExtComplex::Finite).collect();
    out.extend(std::iter::repeat_n(ExtComplex::Infinity, drop));
    out
}

/// Möbius coefficients `(alpha, beta, gamma)` of case `k`:
/// `w = (alpha X + beta Y) / (gamma X + alpha Y)`.
pub fn mobius_coefficients(k: usize, l: &LatticeData) -> (C, C, C) {
    let (g2, ek) = (l.g2(), l.e(k));
    (g2 / 2.0 - 3.0 * ek * ek, g2 / 4.0 * ek, 3.0 * ek)
}

/// Determinant of the Möbius map `C -> w` of case `k`.
pub fn mobius_determinant(k: usize, l: &LatticeData) -> C {
    let (alpha, beta, gamma) = mobius_coefficients(k, l);
    let (eta1, eta2, tau) = (l.eta1(), l.eta2(), l.tau());
    let (a, b) = (alpha * eta1 + beta, -(alpha * eta2 + beta * tau));
    let (c, d) = (gamma * eta1 + alpha, -(gamma * eta2 + alpha * tau));
    a * d - b * c
}

/// `wp(p)` for monodromy data `C` in the half-period case `k`.
pub fn p_from_c_casek(c: ExtComplex, k: usize, l: &LatticeData) -> Result<C> {
    CaseTag::from_k(k)?;
    let (alpha, beta, gamma) = mobius_coefficients(k, l);
    let (x, y) = match c.finite() {
        Some(c) => (c * l.eta1() - l.eta2(), c - l.tau()),
        None => (l.eta1(), C::new(1.0, 0.0)),
    };
    let den = gamma * x + alpha * y;
    if is_zero(den, gamma.norm() * x.norm() + alpha.norm() * y.norm()) {
        return Err(degenerate("3 e_k (C eta1 - eta2) + (g2/2 - 3 e_k^2)(C - tau)"));
    }
    Ok((alpha * x + beta * y) / den)
}

/// Exact inverse of [`p_from_c_casek`].
pub fn c_from_p_casek(w: C, k: usize, l: &LatticeData) -> Result<ExtComplex> {
    CaseTag::from_k(k)?;
    let (alpha, beta, gamma) = mobius_coefficients(k, l);
    let (eta1, eta2, tau) = (l.eta1(), l.eta2(), l.tau());
    // X (w gamma - alpha) = Y (beta - w alpha)
    let u = w * gamma - alpha;
    let v = beta - w * alpha;
    let num = eta2 * u - tau * v;
    let den = eta1 * u - v;
    let scale = (eta1.norm() + eta2.norm() + tau.norm() + 1.0) * (u.norm() + v.norm());
    match (is_zero(num, scale), is_zero(den, scale)) {
        (true, true) => Err(degenerate("Möbius inverse (0/0)")),
        (_, true) => Ok(ExtComplex::Infinity),
        _ => Ok(ExtComplex::Finite(num / den)),
    }
}

/// Coefficients (ascending in `x = wp(a1)`) of `2x^3 - 6wx^2 + (g2/2)x + (g2/2)w + g3`.
pub fn a1_cubic(w: C, l: &LatticeData) -> [C; 4] {
    let (g2, g3) = (l.g2(), l.g3());
    [g2 / 2.0 * w + g3, g2 / 2.0, -6.0 * w, C::new(2.0, 0.0)]
}

/// Candidates `a1` with `wp(p) = wp(a1) - wp'(a1)^2 / wp''(a1)` and `wp''(a1) != 0`.
pub fn a1_from_p(w: C, l: &LatticeData) -> Result<Vec<C>> {
    let g2 = l.g2();
    let xs = poly::roots(&a1_cubic(w, l));
    let mut out = Vec::new();
    for x in xs {
        let wpp = 6.0 * x * x - g2 / 2.0;
        if wpp.norm() <= 1e-10 * (6.0 * x.norm_sqr() + g2.norm() / 2.0) {
            continue;
        }
        out.push(l.inv_wp(x)?);
    }
    if out.is_empty() {
        return Err(Error::AllRootsDegenerate);
    }
    Ok(out)
}

/// `C = (eta2 + wp(a1) tau) / (eta1 + wp(a1))`, or `Infinity` when the denominator vanishes.
pub fn c_from_a1(a1: C, l: &LatticeData) -> Result<ExtComplex> {
    let x = l.wp(a1)?;
    Ok(c_from_wp_a1(x, l))
}

pub(crate) fn c_from_wp_a1(x: C, l: &LatticeData) -> ExtComplex {
    let den = l.eta1() + x;
    if is_zero(den, 1.0 + l.eta1().norm() + x.norm()) {
        ExtComplex::Infinity
    } else {
        ExtComplex::Finite((l.eta2() + x * l.tau()) / den)
    }
}

/// `wp(a1) = (C eta1 - eta2) / (tau - C)`, with `-eta1` for `C = Infinity`.
pub fn wp_a1_from_c(c: ExtComplex, l: &LatticeData) -> Result<C> {
    match c.finite() {
        None => Ok(-l.eta1()),
        Some(c) => {
            let den = l.tau() - c;
            if is_zero(den, 1.0 + c.norm() + l.tau().norm()) {
                return Err(degenerate("tau - C"));
            }
            Ok((c * l.eta1() - l.eta2()) / den)
        }
    }
}

/// Output of [`solve_rh`].
#[derive(Debug, Clone)]
pub struct RhSolution {
    pub a: C,
    pub b: C,
    pub p: C,
    pub ansatz: EigAnsatz,
    pub predicted: MonodromyData,
}

/// Builds the accessory parameter `A` realizing the monodromy data `C` at `p`.
pub fn solve_rh(c: ExtComplex, case: CaseTag, p: C, l: &LatticeData) -> Result<RhSolution> {
    let w = l.wp(p)?;
    let predicted_w = match case {
        CaseTag::Generic => p_from_c_case0(c, l),
        CaseTag::HalfPeriod(k) => p_from_c_casek(c, k, l),
    }
    .map_err(|e| Error::InconsistentInput(format!("monodromy data {c} is degenerate: {e}")))?;
    let residual = (predicted_w - w).norm() / (1.0 + w.norm());
    if residual > CONSISTENCY_TOL {
        return Err(Error::InconsistentInput(format!(
            "C = {c} does not satisfy the case-{} relation at p = {p} (relative residual {residual:e})",
            case.k()
        )));
    }
    let seed = match case {
        CaseTag::Generic => AnsatzSeed::A1(l.inv_wp(wp_a1_from_c(c, l)?)?),
        CaseTag::HalfPeriod(k) => AnsatzSeed::HalfPeriod(k),
    };
    let ansatz = eig_ansatz(p, seed, l)?;
    let a = accessory_from_eig(&ansatz, p, l)?;
    let b = b_from(p, a, LAME_N, l)?;
    let (eps1, eps2) = case.signs();
    Ok(RhSolution {
        a,
        b,
        p,
        predicted: MonodromyData {
            eps1,
            eps2,
            c: ansatz.c,
        },
        ansatz,
    })
}
