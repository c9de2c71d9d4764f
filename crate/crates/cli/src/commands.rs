use std::f64::consts::PI;

use lame_core::closedform::{
    c_from_a1, c_from_p_casek, eig_ansatz, p_from_c_case0, p_from_c_casek, AnsatzSeed,
};
use lame_core::pvi::{elliptic_residual, pvi_residual, to_pvi_coords, track_p, TrackPoint};
use lame_core::{
    b_from, build_cycles, monodromy_rep, solve_rh, CaseTag, Complex64 as C, Error, ExtComplex,
    GleParams, LatticeData, Mat2, MonodromyData, PviParams, TheoremASolution, LAME_N,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{Command, Grid, JobConfig};
use crate::error::CliError;
use crate::report::{cx, ext, f17, mat, FieldTable, SCHEMA};

/// Agreement required between predicted and extracted monodromy data.
pub const MATCH_TOL: f64 = 1e-6;
/// Bound on the identity residuals of `verify-thm1`.
pub const IDENTITY_TOL: f64 = 1e-9;

pub struct Report {
    pub json: Value,
    pub csv: String,
    /// Set when the report was produced but the check it carries failed.
    pub failure: Option<CliError>,
}

pub fn run(cfg: &JobConfig) -> Result<Report, CliError> {
    if !(1e-15..=1e-6).contains(&cfg.tol) {
        return Err(Error::InvalidTolerance(cfg.tol).into());
    }
    match cfg.command {
        Command::Lattice => lattice(cfg),
        Command::Monodromy => monodromy(cfg),
        Command::RhSolve => rh_solve(cfg),
        Command::VerifyThm1 => verify_thm1(cfg),
        Command::Pvi => pvi(cfg),
    }
}

/// Lattice data for the series: never looser than `1e-12`.
fn lattice_at(tau: C, cfg: &JobConfig) -> Result<LatticeData, CliError> {
    Ok(LatticeData::new(tau, cfg.tol.min(1e-12))?)
}

fn header(cfg: &JobConfig) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    m.insert("command".into(), json!(cfg.command.name()));
    m.insert("tol".into(), json!(cfg.tol));
    m
}

fn lattice(cfg: &JobConfig) -> Result<Report, CliError> {
    let tau = cfg.require(cfg.tau, "tau")?;
    let l = lattice_at(tau, cfg)?;
    let legendre = (tau * l.eta1() - l.eta2() - C::new(0.0, 2.0 * PI)).norm();
    let mut j = header(cfg);
    j.insert("tau".into(), cx(tau));
    j.insert("eta1".into(), cx(l.eta1()));
    j.insert("eta2".into(), cx(l.eta2()));
    j.insert("g2".into(), cx(l.g2()));
    j.insert("g3".into(), cx(l.g3()));
    j.insert("e".into(), json!([cx(l.e(1)), cx(l.e(2)), cx(l.e(3))]));
    j.insert("legendre_residual".into(), json!(legendre));
    let mut t = FieldTable::default();
    t.complex("tau", tau)
        .complex("eta1", l.eta1())
        .complex("eta2", l.eta2())
        .complex("g2", l.g2())
        .complex("g3", l.g3())
        .complex("e1", l.e(1))
        .complex("e2", l.e(2))
        .complex("e3", l.e(3))
        .real("legendre_residual", legendre);
    Ok(Report {
        json: Value::Object(j),
        csv: t.finish(),
        failure: None,
    })
}

struct Numerics {
    q0: C,
    clearance: f64,
    m: [Mat2; 4],
    data: Option<MonodromyData>,
}

impl Numerics {
    fn compute(g: &GleParams, tol: f64) -> Result<Numerics, CliError> {
        let spec = build_cycles(g, None)?;
        let rep = monodromy_rep(g, &spec, tol)?;
        let mm = &rep.matrices;
        Ok(Numerics {
            q0: spec.q0,
            clearance: spec.clearance,
            m: [mm.m1, mm.m2, mm.mgp, mm.mgm],
            data: rep.data(),
        })
    }

    fn gamma_defect(&self) -> f64 {
        let id = Mat2::identity();
        (self.m[2] + id).norm().max((self.m[3] + id).norm())
    }

    fn commutator(&self) -> f64 {
        (self.m[0] * self.m[1] - self.m[1] * self.m[0]).norm()
    }

    fn classification(&self) -> &'static str {
        if self.data.is_some() {
            "NotCompletelyReducible"
        } else {
            "CompletelyReducible"
        }
    }

    fn insert(&self, j: &mut serde_json::Map<String, Value>) {
        j.insert("q0".into(), cx(self.q0));
        j.insert("clearance".into(), json!(self.clearance));
        let names = ["l1", "l2", "gamma_plus", "gamma_minus"];
        let ms: serde_json::Map<String, Value> =
            names.iter().zip(&self.m).map(|(n, m)| (n.to_string(), mat(m))).collect();
        j.insert("matrices".into(), Value::Object(ms));
        j.insert("traces".into(), json!([cx(self.m[0].trace()), cx(self.m[1].trace())]));
        j.insert("gamma_defect".into(), json!(self.gamma_defect()));
        j.insert("commutator".into(), json!(self.commutator()));
        j.insert("classification".into(), json!(self.classification()));
        j.insert("extracted".into(), data_json(self.data));
    }

    fn rows(&self, t: &mut FieldTable) {
        t.complex("q0", self.q0).real("clearance", self.clearance);
        for (n, m) in ["l1", "l2", "gamma_plus", "gamma_minus"].iter().zip(&self.m) {
            t.mat(n, m);
        }
        t.real("gamma_defect", self.gamma_defect())
            .real("commutator", self.commutator())
            .text("classification", self.classification());
        if let Some(d) = self.data {
            t.text("eps1", &d.eps1.to_string())
                .text("eps2", &d.eps2.to_string())
                .ext("C", d.c);
        }
    }
}

fn data_json(d: Option<MonodromyData>) -> Value {
    match d {
        None => Value::Null,
        Some(d) => json!({"eps1": d.eps1.as_i8(), "eps2": d.eps2.as_i8(), "C": ext(d.c)}),
    }
}

fn monodromy(cfg: &JobConfig) -> Result<Report, CliError> {
    let tau = cfg.require(cfg.tau, "tau")?;
    let p = cfg.require(cfg.p, "p")?;
    let a = cfg.require(cfg.a, "A")?;
    let l = lattice_at(tau, cfg)?;
    let b = b_from(p, a, LAME_N, &l)?;
    let g = GleParams::with_b(LAME_N, p, a, b, &l)?;
    let num = Numerics::compute(&g, cfg.tol)?;
    let mut j = header(cfg);
    j.insert("tau".into(), cx(tau));
    j.insert("p".into(), cx(p));
    j.insert("A".into(), cx(a));
    j.insert("B".into(), cx(b));
    num.insert(&mut j);
    let mut t = FieldTable::default();
    t.complex("tau", tau).complex("p", p).complex("A", a).complex("B", b);
    num.rows(&mut t);
    Ok(Report {
        json: Value::Object(j),
        csv: t.finish(),
        failure: None,
    })
}

fn wp_from_c(c: ExtComplex, k: usize, l: &LatticeData) -> lame_core::Result<C> {
    if k == 0 {
        p_from_c_case0(c, l)
    } else {
        p_from_c_casek(c, k, l)
    }
}

fn c_error(a: &ExtComplex, b: &ExtComplex) -> f64 {
    match (a, b) {
        (ExtComplex::Finite(_), ExtComplex::Finite(_)) => a.relative_distance(b),
        _ => a.chordal_distance(b),
    }
}

fn rh_solve(cfg: &JobConfig) -> Result<Report, CliError> {
    let tau = cfg.require(cfg.tau, "tau")?;
    let c = cfg.require(cfg.c, "C")?;
    let k = cfg.k.unwrap_or(0);
    let case = CaseTag::from_k(k)?;
    let l = lattice_at(tau, cfg)?;
    let p = match cfg.p {
        Some(p) => p,
        None => l.inv_wp(wp_from_c(c, k, &l)?)?,
    };
    let rh = solve_rh(c, case, p, &l)?;
    let g = GleParams::with_b(LAME_N, p, rh.a, rh.b, &l)?;
    let num = Numerics::compute(&g, cfg.tol)?;
    let pred = rh.predicted;
    let error = match num.data {
        Some(d) if (d.eps1, d.eps2) == (pred.eps1, pred.eps2) => c_error(&d.c, &pred.c),
        _ => f64::INFINITY,
    };
    let matched = error < MATCH_TOL;
    let mut j = header(cfg);
    j.insert("tau".into(), cx(tau));
    j.insert("k".into(), json!(k));
    j.insert("p".into(), cx(p));
    j.insert("A".into(), cx(rh.a));
    j.insert("B".into(), cx(rh.b));
    j.insert("predicted".into(), data_json(Some(pred)));
    num.insert(&mut j);
    j.insert("c_error".into(), if error.is_finite() { json!(error) } else { Value::Null });
    j.insert("match".into(), json!(matched));
    let mut t = FieldTable::default();
    t.complex("tau", tau)
        .real("k", k as f64)
        .complex("p", p)
        .complex("A", rh.a)
        .complex("B", rh.b)
        .text("predicted_eps1", &pred.eps1.to_string())
        .text("predicted_eps2", &pred.eps2.to_string())
        .ext("predicted_C", pred.c);
    num.rows(&mut t);
    t.real("c_error", error).text("match", &matched.to_string());
    let failure = (!matched).then(|| {
        CliError::Verification(format!(
            "extracted monodromy differs from the prediction (error {error:e})"
        ))
    });
    Ok(Report {
        json: Value::Object(j),
        csv: t.finish(),
        failure,
    })
}

fn random_tau(rng: &mut ChaCha8Rng) -> C {
    C::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.8..1.6))
}

/// Worst residual per case over `samples` random draws.
fn verify_thm1(cfg: &JobConfig) -> Result<Report, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let lattice = |rng: &mut ChaCha8Rng| match cfg.tau {
        Some(tau) => lattice_at(tau, cfg),
        None => lattice_at(random_tau(rng), cfg),
    };
    let mut worst = [0.0f64; 4];
    // Case 1: a1 -> wp(p) by the residue condition, a1 -> C, then C -> wp(p).
    let mut n = 0;
    while n < cfg.samples {
        let l = lattice(&mut rng)?;
        let a1 = l.from_coords(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        if l.torsion_distance(a1) < 0.1 * l.tau().im.min(1.0) {
            continue;
        }
        let (x, d) = l.wp_and_prime(a1)?;
        let target = x - d * d / l.wp_pp(a1)?;
        let w = p_from_c_case0(c_from_a1(a1, &l)?, &l)?;
        worst[0] = worst[0].max((w - target).norm() / (1.0 + target.norm()));
        n += 1;
    }
    // Case 2: C -> wp(p) -> C through the Mobius map and the eigenfunction ansatz.
    for k in 1..=3 {
        let mut n = 0;
        while n < cfg.samples {
            let l = lattice(&mut rng)?;
            let c = ExtComplex::Finite(C::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)));
            let w = p_from_c_casek(c, k, &l)?;
            let Ok(p) = l.inv_wp(w) else { continue };
            let Ok(ans) = eig_ansatz(p, AnsatzSeed::HalfPeriod(k), &l) else {
                continue;
            };
            let r = c_error(&ans.c, &c).max(c_error(&c_from_p_casek(w, k, &l)?, &c));
            worst[k] = worst[k].max(r);
            n += 1;
        }
    }
    let overall = worst.iter().copied().fold(0.0, f64::max);
    let passed = overall < IDENTITY_TOL;
    let cases: Vec<Value> = (0..4)
        .map(|k| {
            let (e1, e2) = CaseTag::from_k(k).expect("k in range").signs();
            json!({"k": k, "samples": cfg.samples, "max_residual": worst[k], "signs": [e1.as_i8(), e2.as_i8()]})
        })
        .collect();
    let mut j = header(cfg);
    j.insert("tau".into(), cfg.tau.map_or(Value::Null, cx));
    j.insert("seed".into(), json!(cfg.seed));
    j.insert("cases".into(), Value::Array(cases));
    j.insert("max_residual".into(), json!(overall));
    j.insert("pass".into(), json!(passed));
    let mut csv = String::from("k,samples,max_residual,eps1,eps2\n");
    for (k, w) in worst.iter().enumerate() {
        let (e1, e2) = CaseTag::from_k(k).expect("k in range").signs();
        csv.push_str(&format!("{k},{},{},{e1},{e2}\n", cfg.samples, f17(*w)));
    }
    let failure = (!passed).then(|| {
        CliError::Verification(format!("identity residual {overall:e} exceeds {IDENTITY_TOL:e}"))
    });
    Ok(Report {
        json: Value::Object(j),
        csv,
        failure,
    })
}

struct PviRow {
    point: TrackPoint,
    residual: Option<C>,
    pvi: Option<f64>,
}

/// Tracks the solution on `grid` and evaluates both residuals on each unspliced run.
fn pvi_rows(c: ExtComplex, k: usize, grid: &Grid, tol: f64) -> Result<Vec<PviRow>, CliError> {
    let lattice_tol = tol.min(1e-12);
    let mut sol = TheoremASolution::new(c, k)?;
    let track = track_p(&mut sol, &grid.points(), lattice_tol)?;
    let mut rows: Vec<PviRow> = track
        .iter()
        .map(|&point| PviRow {
            point,
            residual: None,
            pvi: None,
        })
        .collect();
    let mut start = 0;
    while start < rows.len() {
        let end = (start + 1..rows.len())
            .find(|&i| rows[i].point.splice)
            .unwrap_or(rows.len());
        let run = &track[start..end];
        let taus: Vec<C> = run.iter().map(|t| t.tau).collect();
        let ps: Vec<C> = run.iter().map(|t| t.p).collect();
        let ell = elliptic_residual(&ps, &taus, PviParams::lame().alpha_k(), lattice_tol)?;
        let coords = run
            .iter()
            .map(|t| to_pvi_coords(t.p, &LatticeData::new(t.tau, lattice_tol)?))
            .collect::<lame_core::Result<Vec<_>>>()?;
        let pv = pvi_residual(&coords, &PviParams::lame())?;
        for (i, r) in ell.iter().enumerate() {
            rows[start + 1 + i].residual = Some(*r);
        }
        for (i, r) in pv.iter().enumerate() {
            rows[start + 1 + i].pvi = Some(r.norm());
        }
        start = end;
    }
    Ok(rows)
}

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

fn pvi(cfg: &JobConfig) -> Result<Report, CliError> {
    let c = cfg.require(cfg.c, "C")?;
    let k = cfg.require(cfg.k, "k")?;
    let grid = cfg.require(cfg.grid, "grid")?;
    let rows = pvi_rows(c, k, &grid, cfg.tol)?;
    let fine = pvi_rows(c, k, &grid.refined(), cfg.tol)?;
    let summary = |rows: &[PviRow]| {
        (
            max_of(rows.iter().filter_map(|r| r.residual.map(|z| z.norm()))),
            max_of(rows.iter().filter_map(|r| r.pvi)),
        )
    };
    let (max_ell, max_pvi) = summary(&rows);
    let (fine_ell, fine_pvi) = summary(&fine);
    let h = grid.step().norm();
    let splices = rows.iter().filter(|r| r.point.splice).count();
    let skipped = grid.count - rows.len();

    let points: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "tau": cx(r.point.tau),
                "p": cx(r.point.p),
                "residual": r.residual.map_or(Value::Null, cx),
                "pvi_residual": r.pvi,
                "splice": r.point.splice,
            })
        })
        .collect();
    let mut j = header(cfg);
    j.insert("C".into(), ext(c));
    j.insert("k".into(), json!(k));
    j.insert(
        "grid".into(),
        json!({"start": cx(grid.start), "end": cx(grid.end), "count": grid.count, "step": h}),
    );
    j.insert("points".into(), Value::Array(points));
    j.insert(
        "summary".into(),
        json!({"max_residual": max_ell, "max_pvi_residual": max_pvi, "splices": splices, "skipped": skipped}),
    );
    j.insert(
        "order".into(),
        json!([
            {"h": h, "max_residual": max_ell, "max_pvi_residual": max_pvi},
            {"h": h / 2.0, "max_residual": fine_ell, "max_pvi_residual": fine_pvi},
        ]),
    );
    j.insert(
        "ratio".into(),
        json!({"residual": max_ell / fine_ell, "pvi_residual": max_pvi / fine_pvi}),
    );

    let mut csv = String::from(
        "tau_re,tau_im,p_re,p_im,residual_re,residual_im,residual_abs,pvi_residual_abs,splice\n",
    );
    for r in &rows {
        let (rr, ri, ra) = match r.residual {
            Some(z) => (f17(z.re), f17(z.im), f17(z.norm())),
            None => Default::default(),
        };
        csv.push_str(&format!(
            "{},{},{},{},{rr},{ri},{ra},{},{}\n",
            f17(r.point.tau.re),
            f17(r.point.tau.im),
            f17(r.point.p.re),
            f17(r.point.p.im),
            r.pvi.map(f17).unwrap_or_default(),
            u8::from(r.point.splice),
        ));
    }
    Ok(Report {
        json: Value::Object(j),
        csv,
        failure: None,
    })
}

/// The order table of a `pvi` report, for stderr when the main output is CSV.
pub fn pvi_summary(json: &Value) -> Option<String> {
    let order = json.get("order")?.as_array()?;
    let mut s = String::from("h,max_residual,max_pvi_residual\n");
    for row in order {
        s.push_str(&format!(
            "{},{},{}\n",
            f17(row["h"].as_f64()?),
            f17(row["max_residual"].as_f64()?),
            f17(row["max_pvi_residual"].as_f64()?)
        ));
    }
    let summary = &json["summary"];
    s.push_str(&format!(
        "splices,{}\nskipped,{}\n",
        summary["splices"], summary["skipped"]
    ));
    Some(s)
}
