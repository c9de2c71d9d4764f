//! Painlevé VI: the explicit Riccati-type solutions `p_C^(k)(tau)`, their
//! elliptic-form and `(t, lambda)`-form residuals, and the isomonodromy check.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::closedform::{solve_rh, CaseTag};
use crate::elliptic::LatticeData;
use crate::error::{Error, Result};
use crate::ext::ExtComplex;
use crate::glepot::{b_from, GleParams, LAME_N};
use crate::numint::{build_cycles, monodromy_rep, MonodromyData, NormalForm};

type C = Complex64;

/// Parameters of PVI together with those of its elliptic form,
/// `(alpha_0, alpha_1, alpha_2, alpha_3) = (alpha, -beta, gamma, 1/2 - delta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PviParams {
    alpha: C,
    beta: C,
    gamma: C,
    delta: C,
    alpha_k: [C; 4],
}

impl PviParams {
    pub fn new(alpha: C, beta: C, gamma: C, delta: C) -> Self {
        PviParams {
            alpha,
            beta,
            gamma,
            delta,
            alpha_k: [alpha, -beta, gamma, 0.5 - delta],
        }
    }

    /// `PVI(9/8, -1/8, 1/8, 3/8)`, whose elliptic form has `alpha_k = (9/8, 1/8, 1/8, 1/8)`.
    pub fn lame() -> Self {
        let r = |x: f64| C::new(x, 0.0);
        PviParams::new(r(9.0 / 8.0), r(-1.0 / 8.0), r(1.0 / 8.0), r(3.0 / 8.0))
    }

    pub fn alpha(&self) -> C {
        self.alpha
    }

    pub fn beta(&self) -> C {
        self.beta
    }

    pub fn gamma(&self) -> C {
        self.gamma
    }

    pub fn delta(&self) -> C {
        self.delta
    }

    pub fn alpha_k(&self) -> [C; 4] {
        self.alpha_k
    }
}

/// `wp(p_C^(k)(tau) | tau)` for `k = 0` (cubic family) or `k = 1, 2, 3` (Möbius family).
pub fn theorem_a_wp(c: ExtComplex, k: usize, l: &LatticeData) -> Result<C> {
    let (eta1, eta2, tau, g2, g3) = (l.eta1(), l.eta2(), l.tau(), l.g2(), l.g3());
    // Homogeneous coordinates (X, Y) = (C eta1 - eta2, C - tau), or (eta1, 1) at infinity.
    let (x, y) = match c.finite() {
        Some(c) => (c * eta1 - eta2, c - tau),
        None => (eta1, C::new(1.0, 0.0)),
    };
    let (num, den, scale) = match k {
        0 => {
            let num = 2.0 * g3 * y.powi(3) - 4.0 * x.powi(3) - g2 * x * y * y;
            let den = y * (12.0 * x * x - g2 * y * y);
            let scale = y.norm() * (12.0 * x.norm_sqr() + g2.norm() * y.norm_sqr());
            (num, den, scale)
        }
        1..=3 => {
            let ek = l.e(k);
            let m = g2 / 2.0 - 3.0 * ek * ek;
            let num = m * x + g2 / 4.0 * ek * y;
            let den = 3.0 * ek * x + m * y;
            let scale = 3.0 * ek.norm() * x.norm() + m.norm() * y.norm();
            (num, den, scale)
        }
        _ => {
            return Err(Error::InconsistentInput(format!(
                "case index must be 0, 1, 2 or 3, got {k}"
            )))
        }
    };
    if den.norm() <= 1e-13 * scale {
        return Err(Error::DegenerateDenominator(format!(
            "wp(p_C^({k})) has a pole at tau = {tau}"
        )));
    }
    Ok(num / den)
}

/// The explicit solution `p_C^(k)` with its continuation state (last `tau` and `p`).
#[derive(Debug, Clone, PartialEq)]
pub struct TheoremASolution {
    pub c: ExtComplex,
    pub k: usize,
    pub last: Option<(C, C)>,
}

impl TheoremASolution {
    pub fn new(c: ExtComplex, k: usize) -> Result<Self> {
        CaseTag::from_k(k)?;
        Ok(TheoremASolution { c, k, last: None })
    }

    /// Starts the continuation from a chosen preimage `p0` at `tau0`.
    pub fn starting_at(mut self, tau0: C, p0: C) -> Self {
        self.last = Some((tau0, p0));
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackPoint {
    pub tau: C,
    pub p: C,
    /// The continuation restarted here after passing a pole of `wp(p(tau))`.
    pub splice: bool,
}

/// Largest admissible move of `p` between consecutive grid points.
pub fn continuation_bound(tau: C) -> f64 {
    0.25 * tau.im.min(1.0)
}

/// Translate of `s` closest to `target`.
fn nearest_translate(l: &LatticeData, s: C, target: C) -> C {
    let base = target - l.reduced(target - s);
    (-1..=1)
        .flat_map(|n| (-1..=1).map(move |m| (m, n)))
        .map(|(m, n)| base + l.from_coords(m as f64, n as f64))
        .min_by(|a, b| (a - target).norm().total_cmp(&(b - target).norm()))
        .expect("window is non-empty")
}

/// Continues `p(tau)` with `wp(p(tau)) = theorem_a_wp(tau)` along the grid.
/// A pole of `wp(p(tau))` on the grid is skipped and the continuation restarts
/// from the canonical preimage at the next point, marked as a splice.
pub fn track_p(sol: &mut TheoremASolution, grid: &[C], target_tol: f64) -> Result<Vec<TrackPoint>> {
    let mut out = Vec::with_capacity(grid.len());
    let mut splice = false;
    for &tau in grid {
        let l = LatticeData::new(tau, target_tol)?;
        let w = match theorem_a_wp(sol.c, sol.k, &l) {
            Ok(w) => w,
            Err(Error::DegenerateDenominator(_)) => {
                sol.last = None;
                splice = true;
                continue;
            }
            Err(e) => return Err(e),
        };
        let p = match sol.last {
            None => match l.inv_wp(w) {
                Ok(p) => p,
                Err(Error::PoleProximity { .. }) => {
                    sol.last = None;
                    splice = true;
                    continue;
                }
                Err(e) => return Err(e),
            },
            Some((_, prev)) => {
                let z = l.newton_wp(w, prev).or_else(|_| l.inv_wp(w))?;
                let best = [z, -z]
                    .into_iter()
                    .map(|s| nearest_translate(&l, s, prev))
                    .min_by(|a, b| (a - prev).norm().total_cmp(&(b - prev).norm()))
                    .expect("two candidates");
                let distance = (best - prev).norm();
                let bound = continuation_bound(tau);
                if distance > bound {
                    return Err(Error::ContinuationJump {
                        tau,
                        distance,
                        bound,
                    });
                }
                best
            }
        };
        out.push(TrackPoint { tau, p, splice });
        splice = false;
        sol.last = Some((tau, p));
    }
    Ok(out)
}

/// Residuals of `p'' = -(1/4 pi^2) sum_k alpha_k wp'(p + omega_k/2 | tau)` at interior
/// points of a uniform straight grid, with `p''` by central differences.
pub fn elliptic_residual(
    track: &[C],
    grid: &[C],
    alpha_k: [C; 4],
    target_tol: f64,
) -> Result<Vec<C>> {
    if track.len() != grid.len() {
        return Err(Error::InconsistentInput(format!(
            "track has {} points but the grid has {}",
            track.len(),
            grid.len()
        )));
    }
    if grid.len() < 3 {
        return Ok(Vec::new());
    }
    let h = grid[1] - grid[0];
    (1..grid.len() - 1)
        .map(|m| {
            let l = LatticeData::new(grid[m], target_tol)?;
            let second = (track[m + 1] - 2.0 * track[m] + track[m - 1]) / (h * h);
            let force: C = (0..4)
                .filter(|&k| alpha_k[k] != C::default())
                .map(|k| Ok(alpha_k[k] * l.wp_prime(track[m] + l.omega(k) / 2.0)?))
                .sum::<Result<C>>()?;
            Ok(second + force / (4.0 * PI * PI))
        })
        .collect()
}

/// `t = (e3 - e1)/(e2 - e1)`, `lambda = (wp(p) - e1)/(e2 - e1)`.
pub fn to_pvi_coords(p: C, l: &LatticeData) -> Result<(C, C)> {
    let (e1, e2, e3) = (l.e(1), l.e(2), l.e(3));
    let w = l.wp(p)?;
    Ok(((e3 - e1) / (e2 - e1), (w - e1) / (e2 - e1)))
}

/// Residuals of PVI at the interior samples of `(t, lambda)`, with three-point
/// Lagrange derivatives on the (possibly non-uniform, complex) `t` nodes.
pub fn pvi_residual(samples: &[(C, C)], params: &PviParams) -> Result<Vec<C>> {
    let one = C::new(1.0, 0.0);
    for &(t, lam) in samples {
        let near = |a: C, b: C| (a - b).norm() <= 1e-12 * (1.0 + a.norm());
        if near(t, C::default()) || near(t, one) {
            return Err(Error::SingularConfiguration(format!("t = {t} is a fixed singularity")));
        }
        if near(lam, C::default()) || near(lam, one) || near(lam, t) {
            return Err(Error::SingularConfiguration(format!(
                "lambda = {lam} collides with {{0, 1, t}} at t = {t}"
            )));
        }
    }
    Ok(samples
        .windows(3)
        .map(|s| {
            let ((t0, l0), (t1, l1), (t2, l2)) = (s[0], s[1], s[2]);
            let d0 = (t0 - t1) * (t0 - t2);
            let d1 = (t1 - t0) * (t1 - t2);
            let d2 = (t2 - t0) * (t2 - t1);
            let lp = l0 * (t1 - t2) / d0 + l1 * (2.0 * t1 - t0 - t2) / d1 + l2 * (t1 - t0) / d2;
            let lpp = 2.0 * (l0 / d0 + l1 / d1 + l2 / d2);
            let (t, lam) = (t1, l1);
            let rhs = 0.5 * (1.0 / lam + 1.0 / (lam - 1.0) + 1.0 / (lam - t)) * lp * lp
                - (1.0 / t + 1.0 / (t - 1.0) + 1.0 / (lam - t)) * lp
                + lam * (lam - 1.0) * (lam - t) / (t * t * (t - 1.0) * (t - 1.0))
                    * (params.alpha
                        + params.beta * t / (lam * lam)
                        + params.gamma * (t - 1.0) / ((lam - 1.0) * (lam - 1.0))
                        + params.delta * t * (t - 1.0) / ((lam - t) * (lam - t)));
            lpp - rhs
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsoSample {
    pub tau: C,
    pub p: C,
    pub a: C,
    pub traces: (C, C),
    pub normal_form: NormalForm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsomonodromyReport {
    pub predicted: MonodromyData,
    pub samples: Vec<IsoSample>,
}

impl IsomonodromyReport {
    /// Largest relative (chordal at infinity) distance of the extracted `C` from the
    /// first sample's; infinite if some sample is completely reducible.
    pub fn c_spread(&self) -> f64 {
        let cs: Vec<Option<ExtComplex>> = self
            .samples
            .iter()
            .map(|s| s.normal_form.data().map(|d| d.c))
            .collect();
        let Some(Some(first)) = cs.first().copied() else {
            return f64::INFINITY;
        };
        cs.iter()
            .map(|c| c.map_or(f64::INFINITY, |c| c_mismatch(&c, &first)))
            .fold(0.0, f64::max)
    }

    /// Whether every sample carries the predicted signs.
    pub fn signs_match(&self) -> bool {
        self.samples.iter().all(|s| {
            s.normal_form
                .data()
                .is_some_and(|d| (d.eps1, d.eps2) == (self.predicted.eps1, self.predicted.eps2))
        })
    }

    /// Worst deviation from the predicted monodromy: half-trace errors plus the
    /// mismatch in `C` (1 when no `C` can be extracted).
    pub fn deviation(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| {
                let tr = (s.traces.0 / 2.0 - self.predicted.eps1.value()).norm()
                    + (s.traces.1 / 2.0 - self.predicted.eps2.value()).norm();
                let c = s
                    .normal_form
                    .data()
                    .map_or(1.0, |d| c_mismatch(&d.c, &self.predicted.c).min(1.0));
                tr + c
            })
            .fold(0.0, f64::max)
    }
}

fn c_mismatch(a: &ExtComplex, b: &ExtComplex) -> f64 {
    match (a, b) {
        (ExtComplex::Finite(_), ExtComplex::Finite(_)) => a.relative_distance(b),
        _ => a.chordal_distance(b),
    }
}

/// Realizes the solution at each `tau` through the Riemann–Hilbert construction and
/// extracts the numerical monodromy. `a_offset` perturbs the accessory parameter
/// (zero for the genuine check).
pub fn isomonodromy_check(
    sol: &TheoremASolution,
    taus: &[C],
    tol: f64,
    a_offset: C,
) -> Result<IsomonodromyReport> {
    let case = CaseTag::from_k(sol.k)?;
    let (eps1, eps2) = case.signs();
    let predicted = MonodromyData {
        eps1,
        eps2,
        c: sol.c,
    };
    let mut samples = Vec::with_capacity(taus.len());
    for &tau in taus {
        let l = LatticeData::new(tau, 1e-12)?;
        let w = theorem_a_wp(sol.c, sol.k, &l)?;
        let p = l.inv_wp(w)?;
        let rh = solve_rh(sol.c, case, p, &l)?;
        let a = rh.a + a_offset;
        let params = GleParams::with_b(LAME_N, p, a, b_from(p, a, LAME_N, &l)?, &l)?;
        let spec = build_cycles(&params, None)?;
        let rep = monodromy_rep(&params, &spec, tol)?;
        samples.push(IsoSample {
            tau,
            p,
            a,
            traces: (rep.matrices.m1.trace(), rep.matrices.m2.trace()),
            normal_form: rep.normal_form,
        });
    }
    Ok(IsomonodromyReport { predicted, samples })
}
