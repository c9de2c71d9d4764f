//! Concrete realizations of the cycles `l1`, `l2` and the loops around `±p`.
//!
//! The branch slit is the segment `L = [-p, p]` through the origin, with `p` the
//! representative of smallest modulus, so that the translates `L + Lambda` are disjoint.
//! Any path from `q0` to `q0 + omega` avoiding `L + Lambda` represents the same
//! cycle for an apparent equation, since a loop around a whole slit encircles
//! `p`, `-p` and `0` and has trivial monodromy.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::elliptic::LatticeData;
use crate::error::{Error, Result};
use crate::glepot::GleParams;

type C = Complex64;

/// Candidate grid size per direction for the base point.
pub const BASE_GRID: usize = 32;

/// Vertices on each loop around `±p`.
pub const LOOP_VERTICES: usize = 32;

/// Offsets (in units of `p`) of the slanted middle segment of a cycle route.
const ROUTE_OFFSETS: [f64; 13] = [
    0.0, 0.25, -0.25, 0.5, -0.5, 0.75, -0.75, 1.0, -1.0, 1.25, -1.25, 1.5, -1.5,
];

/// Half-lengths of the crossing segment of a route through a 2-torsion point.
const TORSION_CROSSINGS: [f64; 3] = [0.0, 0.1, 0.2];

#[derive(Debug, Clone, PartialEq)]
pub struct PathSpec {
    pub q0: C,
    /// Slit endpoint (see [`slit_endpoint`]); the slit is `[-p, p]`.
    pub p: C,
    pub ell1: Vec<C>,
    pub ell2: Vec<C>,
    pub gamma_plus: Vec<C>,
    pub gamma_minus: Vec<C>,
    /// Minimum distance from `l1`, `l2` to the singular set and the slits.
    pub clearance: f64,
    pub gamma_radius: f64,
}

pub(crate) fn point_segment_distance(z: C, a: C, b: C) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = (((z - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (z - (a + d * t)).norm()
}

fn cross(u: C, v: C) -> f64 {
    u.re * v.im - u.im * v.re
}

pub(crate) fn segment_distance(a: C, b: C, c: C, d: C) -> f64 {
    let (d1, d2) = (cross(b - a, c - a), cross(b - a, d - a));
    let (d3, d4) = (cross(d - c, a - c), cross(d - c, b - c));
    if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
        return 0.0;
    }
    point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b))
}

/// Lattice vectors whose translate of `anchor` may come near the segment `[a, b]`.
fn nearby_translates(l: &LatticeData, a: C, b: C, anchor: C) -> impl Iterator<Item = C> + '_ {
    let (xa, ya) = l.cell_coords(a - anchor);
    let (xb, yb) = l.cell_coords(b - anchor);
    let m_lo = xa.min(xb).floor() as i64 - 1;
    let m_hi = xa.max(xb).ceil() as i64 + 1;
    let n_lo = ya.min(yb).floor() as i64 - 1;
    let n_hi = ya.max(yb).ceil() as i64 + 1;
    (n_lo..=n_hi).flat_map(move |n| (m_lo..=m_hi).map(move |m| l.from_coords(m as f64, n as f64)))
}

fn segment_points_distance(a: C, b: C, points: &[C], l: &LatticeData, exclude: Option<C>) -> f64 {
    points
        .iter()
        .flat_map(|&s| nearby_translates(l, a, b, s).map(move |v| s + v))
        .filter(|&s| exclude.is_none_or(|e| (s - e).norm() > 1e-12))
        .map(|s| point_segment_distance(s, a, b))
        .fold(f64::INFINITY, f64::min)
}

fn segment_slit_distance(a: C, b: C, p: C, l: &LatticeData) -> f64 {
    nearby_translates(l, a, b, C::default())
        .map(|v| segment_distance(a, b, v - p, v + p))
        .fold(f64::INFINITY, f64::min)
}

/// Distance from a polyline to `points + Lambda`.
pub fn polyline_distance(path: &[C], points: &[C], l: &LatticeData) -> f64 {
    match path {
        [] => f64::INFINITY,
        [z] => segment_points_distance(*z, *z, points, l, None),
        _ => path
            .windows(2)
            .map(|w| segment_points_distance(w[0], w[1], points, l, None))
            .fold(f64::INFINITY, f64::min),
    }
}

/// Distance from a polyline to the slits `[-p, p] + Lambda`.
pub fn polyline_slit_distance(path: &[C], p: C, l: &LatticeData) -> f64 {
    path.windows(2)
        .map(|w| segment_slit_distance(w[0], w[1], p, l))
        .fold(f64::INFINITY, f64::min)
}

/// The representative of `p` mod `Lambda` closest to the origin (ties broken by
/// lexicographic order).
pub fn slit_endpoint(p: C, l: &LatticeData) -> C {
    let p0 = l.reduced(p);
    (-2..=2)
        .flat_map(|n| (-2..=2).map(move |m| (m, n)))
        .map(|(m, n)| p0 + l.from_coords(m as f64, n as f64))
        .min_by(|a, b| {
            a.norm()
                .total_cmp(&b.norm())
                .then(a.re.total_cmp(&b.re))
                .then(a.im.total_cmp(&b.im))
        })
        .expect("window is non-empty")
}

fn route(q0: C, period: C, p: C, offset: f64) -> Vec<C> {
    if offset == 0.0 {
        vec![q0, q0 + period]
    } else {
        let mid = q0 + period / 2.0;
        vec![q0, mid - p * offset, mid + p * offset, q0 + period]
    }
}

struct Geometry<'l> {
    lattice: &'l LatticeData,
    points: Vec<C>,
    p: C,
}

impl Geometry<'_> {
    /// Distance from `path` to the singular set and the slits; stops early (with
    /// some value below `bound`) once the path is known to score below `bound`.
    fn route_score(&self, path: &[C], bound: f64) -> f64 {
        let l = self.lattice;
        let mut score = f64::INFINITY;
        for w in path.windows(2) {
            score = score.min(segment_points_distance(w[0], w[1], &self.points, l, None));
            if score < bound {
                return score;
            }
            score = score.min(segment_slit_distance(w[0], w[1], self.p, l));
            if score < bound {
                return score;
            }
        }
        score
    }

    /// Unit vector at `w` perpendicular to the direction of the nearest singular
    /// point, oriented along `period`.
    fn gap_normal(&self, w: C, period: C) -> C {
        let l = self.lattice;
        let nearest = self
            .points
            .iter()
            .flat_map(|&s| nearby_translates(l, w, w, s).map(move |v| s + v))
            .min_by(|a, b| (a - w).norm().total_cmp(&(b - w).norm()))
            .expect("singular set is non-empty");
        let d = w - nearest;
        if d.norm() == 0.0 {
            return period / period.norm();
        }
        let n = C::i() * d / d.norm();
        if (n * period.conj()).re < 0.0 {
            -n
        } else {
            n
        }
    }

    /// The best-scoring route, first among equals, if it scores at least `floor`.
    fn best_route(&self, q0: C, period: C, floor: f64) -> Option<(f64, Vec<C>)> {
        let l = self.lattice;
        let end = q0 + period;
        // Through a 2-torsion point, where the gaps between chained slits sit,
        // crossing the gap at a right angle.
        let via_torsion = (1..=3).flat_map(|k| {
            let h = l.omega(k) / 2.0;
            nearby_translates(l, q0, end, h)
                .map(move |v| h + v)
                .filter(move |w| (w - (q0 + period / 2.0)).norm() <= period.norm())
                .flat_map(move |w| {
                    let across = self.gap_normal(w, period);
                    TORSION_CROSSINGS.iter().map(move |&r| {
                        if r == 0.0 {
                            vec![q0, w, end]
                        } else {
                            vec![q0, w - across * r, w + across * r, end]
                        }
                    })
                })
        });
        let candidates = ROUTE_OFFSETS
            .iter()
            .map(|&t| route(q0, period, self.p, t))
            .chain(via_torsion);
        let mut best: Option<(f64, Vec<C>)> = None;
        for r in candidates {
            let bound = best.as_ref().map_or(floor, |(b, _)| *b);
            let score = self.route_score(&r, bound);
            if score >= floor && best.as_ref().is_none_or(|(b, _)| score > *b) {
                best = Some((score, r));
            }
        }
        best
    }

    /// Routes for both cycles from `q0`, if both score at least `floor`.
    fn cycles(&self, q0: C, floor: f64) -> Option<(f64, Vec<C>, Vec<C>)> {
        let (s1, ell1) = self.best_route(q0, C::new(1.0, 0.0), floor)?;
        let (s2, ell2) = self.best_route(q0, self.lattice.tau(), floor)?;
        Some((s1.min(s2), ell1, ell2))
    }

    /// Required clearance: a quarter of the smallest gap between singular points.
    fn required(&self) -> f64 {
        let mut gap = f64::INFINITY;
        for (i, &a) in self.points.iter().enumerate() {
            for &b in &self.points[i + 1..] {
                gap = gap.min(self.lattice.lattice_distance(a - b));
            }
        }
        gap / 4.0
    }

    /// Distance from `z` to `points + Lambda`, ignoring the copy sitting at `z` itself.
    fn isolation(&self, z: C) -> f64 {
        segment_points_distance(z, z, &self.points, self.lattice, Some(z))
            .min(shortest_period(self.lattice))
    }

    /// Loop from `q0` around `target` (counterclockwise), with a tail that avoids
    /// the other singular points.
    fn around(&self, q0: C, target: C, radius: f64) -> Result<Vec<C>> {
        let l = self.lattice;
        let target = q0 + l.reduced(target - q0);
        let entry = |from: C| target + (from - target) / (from - target).norm() * radius;
        let tail_score = |tail: &[C]| {
            let n = tail.len();
            let head = tail[..n - 1]
                .windows(2)
                .map(|w| segment_points_distance(w[0], w[1], &self.points, l, None))
                .fold(f64::INFINITY, f64::min);
            let last = segment_points_distance(tail[n - 2], tail[n - 1], &self.points, l, Some(target));
            head.min(last)
        };

        let straight = vec![q0, entry(q0)];
        let mut best = (tail_score(&straight), straight);
        if best.0 < radius {
            let centre = (q0 + target) / 2.0;
            for i in 0..BASE_GRID {
                for j in 0..BASE_GRID {
                    let x = -0.5 + (i as f64 + 0.5) / BASE_GRID as f64;
                    let y = -0.5 + (j as f64 + 0.5) / BASE_GRID as f64;
                    let w = centre + l.from_coords(x, y);
                    if (w - target).norm() <= radius {
                        continue;
                    }
                    let tail = vec![q0, w, entry(w)];
                    let score = tail_score(&tail);
                    if score > best.0 {
                        best = (score, tail);
                    }
                }
            }
        }
        let (score, tail) = best;
        if score < radius / 4.0 {
            return Err(Error::NoRouteFound {
                required: radius / 4.0,
                found: score,
            });
        }
        let start = *tail.last().expect("tail has an end point");
        let theta0 = (start - target).arg();
        let mut path = tail.clone();
        path.extend((1..LOOP_VERTICES).map(|k| {
            target + C::from_polar(radius, theta0 + 2.0 * PI * k as f64 / LOOP_VERTICES as f64)
        }));
        path.push(start);
        path.extend(tail.iter().rev().skip(1));
        Ok(path)
    }
}

fn shortest_period(l: &LatticeData) -> f64 {
    let tau = l.tau();
    (-2..=2)
        .flat_map(|n| (-2..=2).map(move |m| (m, n)))
        .filter(|&(m, n)| (m, n) != (0, 0))
        .map(|(m, n)| (m as f64 + n as f64 * tau).norm())
        .fold(f64::INFINITY, f64::min)
}

/// Builds `l1`, `l2`, `gamma_plus` and `gamma_minus` for the given equation.
pub fn build_cycles(params: &GleParams, q0_hint: Option<C>) -> Result<PathSpec> {
    let l = params.lattice;
    let p = slit_endpoint(params.p, l);
    let geometry = Geometry {
        lattice: l,
        points: params.singular_points(),
        p,
    };
    let required = geometry.required();

    let hinted = q0_hint.and_then(|q| geometry.cycles(q, required).map(|c| (q, c)));
    let (q0, (clearance, ell1, ell2)) = match hinted {
        Some(found) => found,
        None => {
            let mut best: Option<(C, (f64, Vec<C>, Vec<C>))> = None;
            for i in 0..BASE_GRID {
                for j in 0..BASE_GRID {
                    let x = -0.5 + (i as f64 + 0.5) / BASE_GRID as f64;
                    let y = -0.5 + (j as f64 + 0.5) / BASE_GRID as f64;
                    let q = l.from_coords(x, y);
                    let floor = best.as_ref().map_or(f64::NEG_INFINITY, |(_, (bs, _, _))| *bs);
                    let Some(cand) = geometry.cycles(q, floor) else {
                        continue;
                    };
                    let better = match &best {
                        None => true,
                        Some((bq, (bs, _, _))) => {
                            cand.0 > *bs
                                || (cand.0 == *bs && (q.re, q.im) < (bq.re, bq.im))
                        }
                    };
                    if better {
                        best = Some((q, cand));
                    }
                }
            }
            best.expect("candidate grid is non-empty")
        }
    };
    if clearance < required {
        return Err(Error::NoRouteFound {
            required,
            found: clearance,
        });
    }

    let radius_for = |target: C| (clearance / 2.0).min(geometry.isolation(target) / 3.0);
    let (r_plus, r_minus) = (radius_for(p), radius_for(-p));
    let gamma_radius = r_plus.min(r_minus);
    let gamma_plus = geometry.around(q0, p, gamma_radius)?;
    let gamma_minus = geometry.around(q0, -p, gamma_radius)?;
    Ok(PathSpec {
        q0,
        p,
        ell1,
        ell2,
        gamma_plus,
        gamma_minus,
        clearance,
        gamma_radius,
    })
}
