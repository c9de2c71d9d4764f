//! Weierstrass functions on the torus `C / (Z + Z tau)`.
//!
//! Everything is evaluated from Fourier (q-)series in the nome `q = exp(i pi tau)`
//! after reducing the argument into the centred period cell. With the argument
//! reduced, `|Im z| <= Im(tau)/2` and the n-th series term is bounded by
//! `exp(-n pi Im tau)`, so a fixed number of terms chosen at construction time
//! reaches double precision for every argument.
//!
//! Conventions: the periods are `1` and `tau`, `eta1 = zeta(z+1) - zeta(z)`,
//! `eta2 = zeta(z+tau) - zeta(z)`, and the Legendre relation reads
//! `tau*eta1 - eta2 = 2 pi i`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

type C = Complex64;

const I: C = C::new(0.0, 1.0);

/// Distance (after reduction) below which an argument is treated as a pole.
pub const POLE_RADIUS: f64 = 1e-6;

const MAX_SERIES_TERMS: usize = 4000;
/// Relative size of the first neglected series term.
const SERIES_FLOOR: f64 = 1e-18;
/// Smallest target tolerance reachable in double precision.
const TOL_FLOOR: f64 = 1e-13;

/// A normalized lattice `Z + Z tau` together with its derived constants.
#[derive(Debug, Clone)]
pub struct LatticeData {
    tau: C,
    nome: C,
    eta1: C,
    eta2: C,
    g2: C,
    g3: C,
    e: [C; 3],
    target_tol: f64,
    /// `q^{2n} / (1 - q^{2n})` for `n = 1..=N`.
    lambert: Vec<C>,
    /// `(-1)^n q^{n(n+1)}` for the sigma theta-series.
    theta_coeffs: Vec<C>,
    /// Derivative at 0 of the sigma theta-series.
    theta_slope: C,
}

/// Values of the four q-series sums needed by every Weierstrass function.
struct Series {
    sin_pi: C,
    cos_pi: C,
    /// sum L_n sin(2 n pi z)
    s_sin: C,
    /// sum n L_n cos(2 n pi z)
    s_cos1: C,
    /// sum n^2 L_n sin(2 n pi z)
    s_sin2: C,
    /// sum n^3 L_n cos(2 n pi z)
    s_cos3: C,
}

impl LatticeData {
    /// Builds the lattice data for `tau` in the upper half plane.
    pub fn new(tau: C, target_tol: f64) -> Result<Self> {
        if !(tau.im > 0.0) || !tau.re.is_finite() || !tau.im.is_finite() {
            return Err(Error::NonPositiveImaginaryPart(tau));
        }
        if !(1e-15..=1e-6).contains(&target_tol) {
            return Err(Error::InvalidTolerance(target_tol));
        }
        if target_tol < TOL_FLOOR {
            return Err(Error::PrecisionUnreachable {
                target: target_tol,
                reason: format!("double precision supports tolerances down to {TOL_FLOOR:e}"),
            });
        }

        let nome = (I * PI * tau).exp();
        let ratio = (-PI * tau.im).exp();

        // n^3 ratio^n must fall below the floor (the worst weighted sum is wp'').
        let mut n_terms = 1usize;
        loop {
            let n = n_terms as f64;
            if n.powi(3) * ratio.powf(n) < SERIES_FLOOR {
                break;
            }
            n_terms += 1;
            if n_terms > MAX_SERIES_TERMS {
                return Err(Error::PrecisionUnreachable {
                    target: target_tol,
                    reason: format!(
                        "Im(tau) = {} needs more than {MAX_SERIES_TERMS} q-series terms",
                        tau.im
                    ),
                });
            }
        }

        let q2 = nome * nome;
        let mut lambert = Vec::with_capacity(n_terms);
        let mut q2n = C::new(1.0, 0.0);
        for _ in 0..n_terms {
            q2n *= q2;
            lambert.push(q2n / (1.0 - q2n));
        }

        let (mut s1, mut s3, mut s5) = (C::default(), C::default(), C::default());
        for (idx, l) in lambert.iter().enumerate() {
            let n = (idx + 1) as f64;
            s1 += n * l;
            s3 += n.powi(3) * l;
            s5 += n.powi(5) * l;
        }
        let pi2 = PI * PI;
        let eta1 = pi2 / 3.0 * (1.0 - 24.0 * s1);
        let eta2 = tau * eta1 - 2.0 * PI * I;
        let g2 = 4.0 * pi2 * pi2 / 3.0 * (1.0 + 240.0 * s3);
        let g3 = 8.0 * pi2 * pi2 * pi2 / 27.0 * (1.0 - 504.0 * s5);

        // theta_1-type series for sigma: terms decay like exp(-pi Im tau n^2).
        let mut theta_coeffs = Vec::new();
        let mut theta_slope = C::default();
        let mut n = 0usize;
        loop {
            let nf = n as f64;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let coeff = sign * (I * PI * tau * nf * (nf + 1.0)).exp();
            theta_coeffs.push(coeff);
            theta_slope += PI * (2.0 * nf + 1.0) * coeff;
            // Worst case after reduction: |Im z| <= Im tau / 2.
            let bound = (-PI * tau.im * (nf * nf - 0.5)).exp() * (2.0 * nf + 1.0);
            if n > 0 && bound < SERIES_FLOOR {
                break;
            }
            n += 1;
            if n > MAX_SERIES_TERMS {
                return Err(Error::PrecisionUnreachable {
                    target: target_tol,
                    reason: "theta series for sigma does not converge".into(),
                });
            }
        }

        let mut lattice = LatticeData {
            tau,
            nome,
            eta1,
            eta2,
            g2,
            g3,
            e: [C::default(); 3],
            target_tol,
            lambert,
            theta_coeffs,
            theta_slope,
        };
        for k in 1..=3 {
            lattice.e[k - 1] = lattice.wp(lattice.omega(k) / 2.0)?;
        }
        lattice.check_invariants()?;
        Ok(lattice)
    }

    fn check_invariants(&self) -> Result<()> {
        let [e1, e2, e3] = self.e;
        let scale = 1.0 + self.g2.norm() + e1.norm().powi(2);
        let sum = (e1 + e2 + e3).norm() / (1.0 + e1.norm() + e2.norm() + e3.norm());
        let g2_res = (self.g2 - 4.0 * (e3 * e3 - e1 * e2)).norm() / scale;
        let g3_res = (self.g3 - 4.0 * e1 * e2 * e3).norm() / (scale * (1.0 + e1.norm()));
        let worst = sum.max(g2_res).max(g3_res);
        if worst > self.target_tol {
            return Err(Error::PrecisionUnreachable {
                target: self.target_tol,
                reason: format!("lattice invariants hold only to {worst:e}"),
            });
        }
        Ok(())
    }

    pub fn tau(&self) -> C {
        self.tau
    }

    pub fn nome(&self) -> C {
        self.nome
    }

    pub fn target_tol(&self) -> f64 {
        self.target_tol
    }

    pub fn eta1(&self) -> C {
        self.eta1
    }

    pub fn eta2(&self) -> C {
        self.eta2
    }

    pub fn eta3(&self) -> C {
        self.eta1 + self.eta2
    }

    /// Quasi-period attached to `omega_j`, `j = 0..=3`.
    pub fn eta(&self, j: usize) -> C {
        match j {
            0 => C::default(),
            1 => self.eta1,
            2 => self.eta2,
            3 => self.eta3(),
            _ => panic!("eta index {j} out of range"),
        }
    }

    pub fn g2(&self) -> C {
        self.g2
    }

    pub fn g3(&self) -> C {
        self.g3
    }

    /// `e_k = wp(omega_k / 2)` for `k = 1, 2, 3`.
    pub fn e(&self, k: usize) -> C {
        assert!((1..=3).contains(&k), "e_k index {k} out of range");
        self.e[k - 1]
    }

    /// `omega_0 = 0, omega_1 = 1, omega_2 = tau, omega_3 = 1 + tau`.
    pub fn omega(&self, k: usize) -> C {
        match k {
            0 => C::default(),
            1 => C::new(1.0, 0.0),
            2 => self.tau,
            3 => 1.0 + self.tau,
            _ => panic!("omega index {k} out of range"),
        }
    }

    pub fn omegas(&self) -> [C; 4] {
        [self.omega(0), self.omega(1), self.omega(2), self.omega(3)]
    }

    /// Real coordinates `(x, y)` with `z = x + y tau`.
    pub fn cell_coords(&self, z: C) -> (f64, f64) {
        let y = z.im / self.tau.im;
        (z.re - y * self.tau.re, y)
    }

    pub fn from_coords(&self, x: f64, y: f64) -> C {
        x + y * self.tau
    }

    /// Splits `z = z0 + m + n tau` with `z0` in the centred cell
/// `|Re z0| <= 1/2, |Im z0| <= Im tau / 2`.
    pub fn reduce(&self, z: C) -> (C, i64, i64) {
        let n = (z.im / self.tau.im).round();
        let z1 = z - n * self.tau;
        let m = z1.re.round();
        (z1 - m, m as i64, n as i64)
    }

    /// The centred-cell representative of `z`.
    pub fn reduced(&self, z: C) -> C {
        self.reduce(z).0
    }

    /// Euclidean distance from `z` to the lattice.
    pub fn lattice_distance(&self, z: C) -> f64 {
        let z0 = self.reduced(z);
        let mut best = f64::INFINITY;
        for a in -1..=1 {
            for b in -1..=1 {
                let d = (z0 - (a as f64 + b as f64 * self.tau)).norm();
                best = best.min(d);
            }
        }
        best
    }

    /// Distance from `z` to the 2-torsion points `E[2]`.
    pub fn torsion_distance(&self, z: C) -> f64 {
        (0..4)
            .map(|k| self.lattice_distance(z - self.omega(k) / 2.0))
            .fold(f64::INFINITY, f64::min)
    }

    fn series(&self, z0: C) -> Series {
        let pz = PI * z0;
        let sin_pi = pz.sin();
        let cos_pi = pz.cos();
        let w = (2.0 * PI * I * z0).exp();
        let w_inv = 1.0 / w;
        let (mut wn, mut wi) = (C::new(1.0, 0.0), C::new(1.0, 0.0));
        let (mut s_sin, mut s_cos1, mut s_sin2, mut s_cos3) =
            (C::default(), C::default(), C::default(), C::default());
        for (idx, l) in self.lambert.iter().enumerate() {
            let n = (idx + 1) as f64;
            wn *= w;
            wi *= w_inv;
            let cos_n = 0.5 * (wn + wi);
            let sin_n = (wn - wi) / (2.0 * I);
            s_sin += l * sin_n;
            s_cos1 += n * l * cos_n;
            s_sin2 += n * n * l * sin_n;
            s_cos3 += n * n * n * l * cos_n;
        }
        Series {
            sin_pi,
            cos_pi,
            s_sin,
            s_cos1,
            s_sin2,
            s_cos3,
        }
    }

    fn reduce_off_pole(&self, z: C) -> Result<(C, i64, i64)> {
        let (z0, m, n) = self.reduce(z);
        if self.lattice_distance(z0) < POLE_RADIUS {
            return Err(Error::PoleProximity {
                z,
                radius: POLE_RADIUS,
            });
        }
        Ok((z0, m, n))
    }

    fn wp_reduced(&self, s: &Series) -> C {
        let pi2 = PI * PI;
        -self.eta1 + pi2 / (s.sin_pi * s.sin_pi) - 8.0 * pi2 * s.s_cos1
    }

    fn zeta_reduced(&self, z0: C, s: &Series) -> C {
        self.eta1 * z0 + PI * s.cos_pi / s.sin_pi + 4.0 * PI * s.s_sin
    }

    fn wp_prime_reduced(&self, s: &Series) -> C {
        let pi3 = PI * PI * PI;
        -2.0 * pi3 * s.cos_pi / (s.sin_pi * s.sin_pi * s.sin_pi) + 16.0 * pi3 * s.s_sin2
    }

    fn wp_pp_reduced(&self, s: &Series) -> C {
        let pi4 = PI.powi(4);
        let inv2 = 1.0 / (s.sin_pi * s.sin_pi);
        6.0 * pi4 * inv2 * inv2 - 4.0 * pi4 * inv2 + 32.0 * pi4 * s.s_cos3
    }

    /// Weierstrass `wp(z)`.
    pub fn wp(&self, z: C) -> Result<C> {
        let (z0, _, _) = self.reduce_off_pole(z)?;
        let s = self.series(z0);
        Ok(self.wp_reduced(&s))
    }

    pub fn wp_prime(&self, z: C) -> Result<C> {
        let (z0, _, _) = self.reduce_off_pole(z)?;
        let s = self.series(z0);
        Ok(self.wp_prime_reduced(&s))
    }

    /// Second derivative `wp''(z)`, summed from its own series (not from `6 wp^2 - g2/2`).
    pub fn wp_pp(&self, z: C) -> Result<C> {
        let (z0, _, _) = self.reduce_off_pole(z)?;
        let s = self.series(z0);
        Ok(self.wp_pp_reduced(&s))
    }

    /// `(wp(z), wp'(z))` from a single series evaluation.
    pub fn wp_and_prime(&self, z: C) -> Result<(C, C)> {
        let (z0, _, _) = self.reduce_off_pole(z)?;
        let s = self.series(z0);
        Ok((self.wp_reduced(&s), self.wp_prime_reduced(&s)))
    }

    /// `(wp(z), zeta(z))` from a single series evaluation.
    pub fn wp_and_zeta(&self, z: C) -> Result<(C, C)> {
        let (z0, m, n) = self.reduce_off_pole(z)?;
        let s = self.series(z0);
        let shift = m as f64 * self.eta1 + n as f64 * self.eta2;
        Ok((self.wp_reduced(&s), self.zeta_reduced(z0, &s) + shift))
    }

    /// Weierstrass `zeta(z)`, quasi-periodic with jumps `eta1`, `eta2`.
    pub fn zeta(&self, z: C) -> Result<C> {
        Ok(self.wp_and_zeta(z)?.1)
    }

    /// Weierstrass `sigma(z)`; entire, so defined for every `z`.
    pub fn sigma(&self, z: C) -> C {
        let (z0, m, n) = self.reduce(z);
        let u = (I * PI * z0).exp();
        let u_inv = 1.0 / u;
        let u2 = u * u;
        let u2_inv = u_inv * u_inv;
        let (mut up, mut ui) = (u, u_inv);
        let mut theta = C::default();
        for coeff in &self.theta_coeffs {
            theta += coeff * (up - ui) / (2.0 * I);
            up *= u2;
            ui *= u2_inv;
        }
        let base = (self.eta1 * z0 * z0 / 2.0).exp() * theta / self.theta_slope;
        if m == 0 && n == 0 {
            return base;
        }
        let shift = m as f64 + n as f64 * self.tau;
        let eta = m as f64 * self.eta1 + n as f64 * self.eta2;
        let parity = (m + n + m * n).rem_euclid(2);
        let sign = if parity == 0 { 1.0 } else { -1.0 };
        sign * (eta * (z0 + shift / 2.0)).exp() * base
    }

    /// Canonical representative of `{z, -z} + Lambda`: `z = x + y tau` with
    /// `y` in `[0, 1/2]`, `x` in `[-1/2, 1/2)`, and `x <= 0` on the two boundary lines.
    pub fn canonical_half(&self, z: C) -> C {
        let z0 = self.reduced(z);
        let (mut x, mut y) = self.cell_coords(z0);
        if y < 0.0 {
            x = -x;
            y = -y;
        }
        const EDGE: f64 = 1e-12;
        if y < EDGE || (0.5 - y).abs() < EDGE {
            x = -x.abs();
        }
        x -= (x + 0.5).div_euclid(1.0);
        self.from_coords(x, y)
    }

    /// Inverse of `wp`: returns the canonical preimage of `w`; the other one is `-z`.
    pub fn inv_wp(&self, w: C) -> Result<C> {
        if !(w.re.is_finite() && w.im.is_finite()) {
            return Err(Error::NoConvergence {
                w,
                residual: f64::INFINITY,
            });
        }
        // A coarse seed almost always suffices; the fine grid is the fallback.
        let z = match self.newton_wp(w, self.inv_wp_seed(w, 16)) {
            Ok(z) => z,
            Err(_) => self.newton_wp(w, self.inv_wp_seed(w, 64))?,
        };
        Ok(self.canonical_half(z))
    }

    /// Best point of a `grid x grid` sampling of the half cell `0 <= y <= 1/2`.
    fn inv_wp_seed(&self, w: C, grid: usize) -> C {
        let mut best = (f64::INFINITY, C::default());
        for i in 0..grid {
            for j in 0..grid {
                let x = -0.5 + (i as f64 + 0.5) / grid as f64;
                let y = (j as f64 + 0.5) / (2 * grid) as f64;
                let z = self.from_coords(x, y);
                if let Ok(v) = self.wp(z) {
                    let r = (v - w).norm();
                    if r < best.0 {
                        best = (r, z);
                    }
                }
            }
        }
        // Near the pole wp(z) ~ 1/z^2; the grid cannot resolve large |w|.
        if w.norm() > 1.0 {
            let z = 1.0 / w.sqrt();
            if let Ok(v) = self.wp(z) {
                if (v - w).norm() < best.0 {
                    best.1 = z;
                }
            }
        }
        best.1
    }

    /// Newton polishing of `wp(z) = w` from a seed. Returns an uncanonicalized preimage.
    pub fn newton_wp(&self, w: C, seed: C) -> Result<C> {
        let scale = 1.0 + w.norm();
        let step_cap = 0.25 * self.tau.im.min(1.0);
        let mut z = seed;
        let (mut v, mut d) = self.wp_and_prime(z)?;
        let mut resid = (v - w).norm();
        let mut converged_iters = 0;
        for _ in 0..200 {
            if resid <= 4.0 * f64::EPSILON * (scale + v.norm()) {
                converged_iters += 1;
                if converged_iters > 1 {
                    break;
                }
            }
            if d.norm() == 0.0 {
                break;
            }
            let mut step = (v - w) / d;
            if step.norm() > step_cap {
                step *= step_cap / step.norm();
            }
            // Backtrack until the residual does not grow.
            let mut accepted = false;
            for _ in 0..30 {
                let trial = z - step;
                if let Ok((tv, td)) = self.wp_and_prime(trial) {
                    let tr = (tv - w).norm();
                    if tr <= resid || step.norm() < 1e-15 {
                        z = trial;
                        v = tv;
                        d = td;
                        resid = tr;
                        accepted = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
            if step.norm() < 1e-16 * (1.0 + z.norm()) {
                converged_iters += 1;
                if converged_iters > 2 {
                    break;
                }
            }
        }
        let rel = resid / scale;
        if rel > self.target_tol.max(1e-12) {
            return Err(Error::NoConvergence { w, residual: rel });
        }
        Ok(z)
    }
}
