//! Dormand–Prince 5(4) transport of a fundamental system along polylines.

use nalgebra::Matrix2;
use num_complex::Complex64;

use super::paths::polyline_distance;
use crate::error::{Error, Result};
use crate::glepot::{GleParams, SINGULAR_RADIUS};

type C = Complex64;

/// 2×2 complex matrix.
pub type Mat2 = Matrix2<C>;

/// Smallest step the controller may request before giving up.
pub const MIN_STEP: f64 = 1e-12;

/// Step budget per path.
pub const MAX_STEPS: usize = 200_000;

const SAFETY: f64 = 0.9;
const ALPHA: f64 = 0.7 / 5.0;
const BETA: f64 = 0.4 / 5.0;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Right-hand side of `Y' = u [[0, 1], [I, 0]] Y` at arc length `s` on the segment `a + u s`.
struct Segment<'p, 'a> {
    params: &'p GleParams<'a>,
    start: C,
    dir: C,
}

impl Segment<'_, '_> {
    fn rhs(&self, s: f64, y: &Mat2) -> Result<Mat2> {
        let i = self.params.potential_unchecked(self.start + self.dir * s)?;
        let d = self.dir;
        Ok(Mat2::new(
            d * y[(1, 0)],
            d * y[(1, 1)],
            d * i * y[(0, 0)],
            d * i * y[(0, 1)],
        ))
    }
}

/// `y + h * sum_i w_i k_i`.
fn comb(y: &Mat2, h: f64, terms: &[(f64, &Mat2)]) -> Mat2 {
    let mut out = *y;
    for &(w, k) in terms {
        out += k.map(|x| x * (w * h));
    }
    out
}

fn error_norm(err: &Mat2, y0: &Mat2, y1: &Mat2, tol: f64) -> f64 {
    err.iter()
        .zip(y0.iter().zip(y1.iter()))
        .map(|(e, (a, b))| e.norm() / (tol * (1.0 + a.norm().max(b.norm()))))
        .fold(0.0, f64::max)
}

/// Transfer matrix `T` with `(y, y')(end) = T (y, y')(start)` along the polyline.
pub fn transport(path: &[C], params: &GleParams, tol: f64) -> Result<Mat2> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidTolerance(tol));
    }
    let mut y = Mat2::identity();
    if path.len() < 2 {
        return Ok(y);
    }
    let clearance = polyline_distance(path, &params.singular_points(), params.lattice);
    if clearance < SINGULAR_RADIUS {
        let z = path[0];
        return Err(Error::SingularityProximity { z, distance: clearance });
    }
    let h_max = clearance / 4.0;
    let mut steps = 0usize;
    let mut h = h_max;
    for w in path.windows(2) {
        let len = (w[1] - w[0]).norm();
        if len == 0.0 {
            continue;
        }
        let seg = Segment {
            params,
            start: w[0],
            dir: (w[1] - w[0]) / len,
        };
        y = integrate_segment(&seg, len, y, tol, h_max, &mut h, &mut steps)?;
    }
    Ok(y)
}

fn integrate_segment(
    seg: &Segment,
    len: f64,
    mut y: Mat2,
    tol: f64,
    h_max: f64,
    h: &mut f64,
    steps: &mut usize,
) -> Result<Mat2> {
    let mut s = 0.0;
    let mut k1 = seg.rhs(0.0, &y)?;
    let mut err_prev = 1e-4_f64;
    while s < len {
        *steps += 1;
        if *steps > MAX_STEPS {
            return Err(Error::TolUnreachable {
                tol,
                max_steps: MAX_STEPS,
            });
        }
        let last = *h >= len - s;
        let step = if last { len - s } else { *h };

        let k2 = seg.rhs(s + C2 * step, &comb(&y, step, &[(A21, &k1)]))?;
        let k3 = seg.rhs(s + C3 * step, &comb(&y, step, &[(A31, &k1), (A32, &k2)]))?;
        let k4 = seg.rhs(
            s + C4 * step,
            &comb(&y, step, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
        )?;
        let k5 = seg.rhs(
            s + C5 * step,
            &comb(&y, step, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        )?;
        let k6 = seg.rhs(
            s + step,
            &comb(
                &y,
                step,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        )?;
        let y_new = comb(
            &y,
            step,
            &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
        );
        let s_new = if last { len } else { s + step };
        let k7 = seg.rhs(s_new, &y_new)?;
        let err_mat = comb(
            &Mat2::zeros(),
            step,
            &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
        );
        let err = error_norm(&err_mat, &y, &y_new, tol);

        let factor = if err <= 1.0 {
            y = y_new;
            k1 = k7;
            s = s_new;
            let f = if err == 0.0 {
                5.0
            } else {
                SAFETY * err.powf(-ALPHA) * err_prev.powf(BETA)
            };
            err_prev = err.max(1e-4);
            f.clamp(0.2, 5.0)
        } else {
            (SAFETY * err.powf(-0.2)).max(0.2)
        };
        let proposed = step * factor;
        if proposed < MIN_STEP && s < len {
            return Err(Error::StepUnderflow {
                z: seg.start + seg.dir * s,
                h: proposed,
            });
        }
        // A short final step should not shrink the next segment's first step.
        if !(last && err <= 1.0) || proposed > *h {
            *h = proposed.min(h_max);
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::LatticeData;
    use crate::glepot::LAME_N;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn coarse_and_fine_tolerances_agree() {
        let l = LatticeData::new(c(0.0, 1.2), 1e-12).unwrap();
        let g = GleParams::apparent(LAME_N, c(0.31, 0.27), c(0.3, 0.1), &l).unwrap();
        let path = [c(-0.4, 0.6), c(0.1, 0.55), c(0.5, 0.62)];
        let coarse = transport(&path, &g, 1e-8).unwrap();
        let fine = transport(&path, &g, 1e-13).unwrap();
        assert!((coarse - fine).norm() < 1e-6);
        assert!((fine.determinant() - 1.0).norm() < 1e-10);
    }

    #[test]
    fn zero_length_path_is_identity() {
        let l = LatticeData::new(c(0.0, 1.2), 1e-12).unwrap();
        let g = GleParams::apparent(LAME_N, c(0.31, 0.27), c(0.3, 0.1), &l).unwrap();
        let z = c(0.2, 0.6);
        assert_eq!(transport(&[z, z], &g, 1e-10).unwrap(), Mat2::identity());
        assert_eq!(transport(&[z], &g, 1e-10).unwrap(), Mat2::identity());
    }

    #[test]
    fn rejects_paths_through_singularities() {
        let l = LatticeData::new(c(0.0, 1.2), 1e-12).unwrap();
        let g = GleParams::apparent(LAME_N, c(0.31, 0.27), c(0.3, 0.1), &l).unwrap();
        let r = transport(&[c(-0.5, 0.0), c(0.5, 0.0)], &g, 1e-10);
        assert!(matches!(r, Err(Error::SingularityProximity { .. })));
        assert!(matches!(
            transport(&[c(0.1, 0.6), c(0.2, 0.6)], &g, -1.0),
            Err(Error::InvalidTolerance(_))
        ));
    }
}
