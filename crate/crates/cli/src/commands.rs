//! One function per subcommand: config in, report (and optional table) out.

use std::f64::consts::PI;
use std::sync::Arc;

use jacobi_core::algebroid::{
    apath_from_fiber, apath_from_fn, cocycle_integral, cotangent_algebroid, homotopy_transport, jacobi_algebroid,
    reeb_cocycle, tangent_algebroid, APath, AlgebroidStructure, FamilyOptions, HomotopyFamily, PathCorrespondence,
};
use jacobi_core::geometry::combin::Combos;
use jacobi_core::geometry::{halton_box, Kind, TensorField};
use jacobi_core::groupoidlab::{
    cocycle_defect, conformal_groupoid, multiplicativity_residual, pair_contact_groupoid, pair_groupoid,
    symplectization_equivalence, vf_contact_groupoid, vf_group_product, Multiplicativity, VfArrow,
};
use jacobi_core::jacobi::{depoissonize, poissonize, verify_jacobi, JacobiStructure, VerifyOptions};
use jacobi_core::monodromy::{
    decide_jacobi_integrable, decide_poisson_integrable, dim2_periods, discreteness_check, prequantizable_check,
    symplectic_area, DeciderOptions, MaFamily, PeriodData,
};
use jacobi_core::report::{num, Answer, DiagnosisReport, Provenance, Verdict};
use jacobi_core::Expr;
use serde_json::json;

use crate::config::{AlgebroidKind, GroupoidKind, Loaded, PeriodCheck};
use crate::error::{CliError, CliResult};
use crate::output::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    VerifyJacobi,
    Poissonize,
    DiagnoseMa,
    Apath,
    GroupoidCheck,
    PeriodsCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::VerifyJacobi => "verify-jacobi",
            Command::Poissonize => "poissonize",
            Command::DiagnoseMa => "diagnose-ma",
            Command::Apath => "apath",
            Command::GroupoidCheck => "groupoid-check",
            Command::PeriodsCheck => "periods-check",
        }
    }
}

/// Result of a command: the report and an optional CSV table.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: DiagnosisReport,
    pub table: Option<Table>,
}

impl Outcome {
    fn report(report: DiagnosisReport) -> Outcome {
        Outcome { report, table: None }
    }
}

pub fn exit_code(a: Answer) -> i32 {
    match a {
        Answer::Yes => 0,
        Answer::No => 1,
        Answer::Inconclusive => 2,
    }
}

fn provenance(o: &VerifyOptions) -> Provenance {
    Provenance::new(o.seed, o.tol, o.samples)
}

/// A failing report for errors that happen after the config was accepted.
pub fn failure(cmd: Command, o: &VerifyOptions, e: &jacobi_core::Error) -> DiagnosisReport {
    let mut rep = DiagnosisReport::new(cmd.name(), provenance(o));
    let mut v = Verdict::new("completed", Answer::No).with("error", e.to_string());
    if let jacobi_core::Error::LeftDomain { time } = e {
        v = v.with_num("exit_time", *time);
    }
    rep.verdict(v);
    rep.note(format!("run failed: {e}"));
    rep.outcome = Answer::No;
    rep
}

/// Config errors propagate; core errors from the computation become failing reports.
fn guarded(cmd: Command, o: &VerifyOptions, r: CliResult<Outcome>) -> CliResult<Outcome> {
    match r {
        Err(CliError::Core(e)) => Ok(Outcome::report(failure(cmd, o, &e))),
        other => other,
    }
}

pub fn run(cmd: Command, cfg: &Loaded, o: VerifyOptions) -> CliResult<Outcome> {
    let r = match cmd {
        Command::VerifyJacobi => verify(cfg, o),
        Command::Poissonize => poissonize_cmd(cfg, o),
        Command::DiagnoseMa => diagnose_ma(cfg, o),
        Command::Apath => apath(cfg, o),
        Command::GroupoidCheck => groupoid_check(cfg, o),
        Command::PeriodsCheck => periods_check(cfg, o),
    };
    guarded(cmd, &o, r)
}

/// Builds the structure; parse problems stay config errors.
fn jacobi_of(cfg: &Loaded, o: VerifyOptions) -> CliResult<JacobiStructure> {
    match cfg.jacobi(o) {
        Err(CliError::Core(e @ (jacobi_core::Error::Syntax { .. } | jacobi_core::Error::UnknownIdentifier { .. }))) => {
            Err(CliError::config(format!("section [structure]: {e}")))
        }
        other => other,
    }
}

fn verify(cfg: &Loaded, o: VerifyOptions) -> CliResult<Outcome> {
    let j = jacobi_of(cfg, o)?;
    let mut rep = verify_jacobi(&j, o);
    rep.note(format!("chart: {}", j.chart().coords().join(", ")));
    Ok(Outcome::report(rep))
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn poissonize_cmd(cfg: &Loaded, o: VerifyOptions) -> CliResult<Outcome> {
    let j = jacobi_of(cfg, o)?;
    let mut rep = DiagnosisReport::new("poissonize", provenance(&o));
    let input = verify_jacobi(&j, o);
    let jacobi_ok = input.passed();
    rep.verdict(Verdict::new("input_jacobi", Answer::from_bool(jacobi_ok)).with("residuals", json!(input.residuals)));
    let h = poissonize(&j)?;
    let pts = h.chart().sample(o.samples.max(1), o.seed);
    let scale = pts.iter().map(|p| h.lambda_tilde.max_abs(p)).collect::<Result<Vec<_>, _>>()?.into_iter().fold(1.0, f64::max);
    rep.residual("homogeneity", h.homogeneity_residual(&pts)? / scale, o.tol);
    rep.residual("poisson", h.poisson_residual(&pts)? / (scale * scale), o.tol);
    let back = depoissonize(&h, o)?;
    let mut rt = 0.0f64;
    for p in j.chart().sample(o.samples.max(1), o.seed) {
        rt = rt.max(max_diff(&back.lambda().eval(&p)?, &j.lambda().eval(&p)?));
        rt = rt.max(max_diff(&back.reeb().eval(&p)?, &j.reeb().eval(&p)?));
    }
    rep.residual("round_trip", rt, o.tol);
    rep.settle_by_residuals();
    if !jacobi_ok {
        rep.outcome = Answer::No;
        rep.note("input is not a Jacobi structure; the poissonization is not Poisson");
    }
    let c = h.chart();
    let combos = Combos::get(c.dim(), 2);
    let mut header: Vec<String> = c.coords().to_vec();
    header.extend((0..combos.len()).map(|i| {
        let t = combos.tuple(i);
        format!("lambda_tilde_{}_{}", c.coords()[t[0]], c.coords()[t[1]])
    }));
    let mut rows = Vec::with_capacity(pts.len());
    for p in &pts {
        let mut row = p.clone();
        row.extend(h.lambda_tilde.eval(p)?);
        rows.push(row);
    }
    Ok(Outcome { report: rep, table: Some(Table::new(header, rows)) })
}

/// Reference families with their expected verdicts (Poisson, Jacobi).
const REFERENCE_CASES: [(&str, &str, Answer, Answer); 3] = [
    ("i", "r*exp(r)", Answer::Yes, Answer::No),
    ("ii", "1/(sin(r)+2)", Answer::No, Answer::Yes),
    ("iii", "r*exp(bump(r;1,2)*r)", Answer::No, Answer::No),
];

/// The reference case whose `a` agrees with `f` on a radius grid.
fn reference_case(f: &MaFamily) -> Option<(&'static str, Answer, Answer)> {
    REFERENCE_CASES.iter().find_map(|(name, src, p, j)| {
        let g = MaFamily::parse(src, f.r_max()).ok()?;
        let same = (1..=64).all(|k| {
            let r = f.r_max() * k as f64 / 64.0;
            match (f.a(r), g.a(r)) {
                (Ok(x), Ok(y)) => (x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1.0),
                _ => false,
            }
        });
        same.then_some((*name, *p, *j))
    })
}

fn diagnose_ma(cfg: &Loaded, o: VerifyOptions) -> CliResult<Outcome> {
    let m = cfg.section(&cfg.config.ma, "ma")?;
    if !(m.r_max > 0.0 && m.r_max.is_finite()) {
        return Err(CliError::config("field `ma.r_max` must be positive"));
    }
    if m.grid < 2 || m.csv_rows < 1 {
        return Err(CliError::config("fields `ma.grid` ≥ 2 and `ma.csv_rows` ≥ 1 required"));
    }
    let a = cfg.expr("ma.a", &m.a, &["r"])?;
    let fam = MaFamily::new(a, m.r_max)?;
    let d = DeciderOptions { grid: m.grid, tol: m.flat_tol, ..DeciderOptions::default() };
    let mut prov = provenance(&o);
    prov.grids.insert("radius_grid".into(), m.grid);
    prov.grids.insert("csv_rows".into(), m.csv_rows);
    let mut rep = DiagnosisReport::new("diagnose-ma", prov);
    let p = decide_poisson_integrable(&fam, d)?;
    let j = decide_jacobi_integrable(&fam, d)?;
    let conclusive = p.answer != Answer::Inconclusive && j.answer != Answer::Inconclusive;
    let (pa, ja) = (p.answer, j.answer);
    rep.verdict(p);
    rep.verdict(j);
    for &r in &m.verify_area_at {
        let ar = symplectic_area(&fam, r, true)?;
        rep.residual(&format!("area_rel_error_r={r}"), ar.relative_error().unwrap_or(f64::NAN), 1e-6);
    }
    rep.outcome = if !conclusive {
        Answer::Inconclusive
    } else {
        Answer::from_bool(rep.all_residuals_pass())
    };
    match reference_case(&fam) {
        Some((name, ep, ej)) => {
            let agree = pa == ep && ja == ej;
            rep.verdict(
                Verdict::new("reference_agreement", Answer::from_bool(agree))
                    .with("case", name)
                    .with("expected_poisson", json!(ep))
                    .with("expected_jacobi", json!(ej)),
            );
            if conclusive && !agree {
                rep.outcome = Answer::No;
            }
        }
        None => rep.note("a(r) is not one of the built-in cases; no reference comparison"),
    }
    let rows = fam.area_table(m.csv_rows)?.into_iter().map(|r| r.to_vec()).collect();
    let header = ["r", "A", "dA", "A_plus_dA"].map(String::from).to_vec();
    Ok(Outcome { report: rep, table: Some(Table::new(header, rows)) })
}

fn build_algebroid(cfg: &Loaded, kind: AlgebroidKind, o: VerifyOptions) -> CliResult<(Arc<AlgebroidStructure>, Option<JacobiStructure>)> {
    Ok(match kind {
        AlgebroidKind::Tangent => {
            let chart = if cfg.structure_present() { jacobi_of(cfg, o)?.chart().clone() } else { cfg.chart()? };
            (Arc::new(tangent_algebroid(chart)?), None)
        }
        AlgebroidKind::Cotangent => {
            let j = jacobi_of(cfg, o)?;
            (Arc::new(cotangent_algebroid(&j, o)?), Some(j))
        }
        AlgebroidKind::Jacobi => {
            let j = jacobi_of(cfg, o)?;
            (Arc::new(jacobi_algebroid(&j, o)?), Some(j))
        }
    })
}

fn apath(cfg: &Loaded, o: VerifyOptions) -> CliResult<Outcome> {
    let c = cfg.section(&cfg.config.apath, "apath")?;
    let fiber = c
        .fiber
        .iter()
        .enumerate()
        .map(|(i, s)| cfg.expr(&format!("apath.fiber[{i}]"), s, &["t"]))
        .collect::<CliResult<Vec<Expr>>>()?;
    if c.translate && c.algebroid != AlgebroidKind::Jacobi {
        return Err(CliError::config("field `apath.translate` needs `algebroid = \"jacobi\"`"));
    }
    let (alg, j) = build_algebroid(cfg, c.algebroid, o)?;
    if fiber.len() != alg.rank() {
        return Err(CliError::config(format!("field `apath.fiber`: {} components for an algebroid of rank {}", fiber.len(), alg.rank())));
    }
    if c.x0.len() != alg.dim() {
        return Err(CliError::config(format!("field `apath.x0`: {} coordinates on a {}-dimensional chart", c.x0.len(), alg.dim())));
    }
    let invariant = match &c.invariant {
        Some(s) => Some(TensorField::function(alg.chart().clone(), cfg.expr("apath.invariant", s, alg.chart().coords())?)?),
        None => None,
    };
    let family_fiber = match &c.family {
        Some(fc) => Some(
            fc.fiber
                .iter()
                .enumerate()
                .map(|(i, s)| cfg.expr(&format!("apath.family.fiber[{i}]"), s, &["eps", "t"]))
                .collect::<CliResult<Vec<Expr>>>()?,
        ),
        None => None,
    };

    let mut prov = provenance(&o);
    prov.grids.insert("t_grid".into(), c.grid);
    let mut rep = DiagnosisReport::new("apath", prov);
    let path = apath_from_fiber(alg.clone(), &fiber, &c.x0, c.grid)?;
    rep.residual("path_invariant", path.invariant_residual()?, c.path_tol);
    if let Some(f) = &invariant {
        let f0 = f.eval(path.start())?[0];
        let mut drift = 0.0f64;
        for g in path.base() {
            drift = drift.max((f.eval(g)?[0] - f0).abs());
        }
        rep.residual("invariant_drift", drift, c.drift_tol);
    }
    let mut endpoint = Verdict::new("path", Answer::Yes)
        .with("start", json!(path.start()))
        .with("end", json!(path.end()));
    if let (AlgebroidKind::Jacobi, Some(j)) = (c.algebroid, &j) {
        let ra = cocycle_integral(&path, &reeb_cocycle(j)?)?;
        endpoint = endpoint.with_num("cocycle_integral", ra);
        if c.translate {
            let pc = PathCorrespondence::new(j, o)?;
            let tilde = pc.from_jacobi(&path, c.s0)?;
            let (back, s) = pc.to_jacobi(&tilde)?;
            let mut worst = (s - c.s0).abs();
            for (u, v) in back.fiber().iter().zip(path.fiber()).chain(back.base().iter().zip(path.base())) {
                worst = worst.max(max_diff(u, v));
            }
            let n = alg.dim();
            let shift = tilde.end()[n] - tilde.start()[n];
            rep.residual("translate_round_trip", worst, o.tol);
            rep.residual("gamma0_shift_plus_cocycle", (shift + ra).abs(), o.tol);
            endpoint = endpoint.with_num("gamma0_shift", shift);
        }
    }
    rep.verdict(endpoint);

    let mut table = Table::new(path.csv_header(), path.csv_rows(0.0));
    if let (Some(ff), Some(fc)) = (family_fiber, &c.family) {
        if ff.len() != alg.rank() {
            return Err(CliError::config(format!("field `apath.family.fiber`: {} components for rank {}", ff.len(), alg.rank())));
        }
        if fc.eps_grid < 2 {
            return Err(CliError::config("field `apath.family.eps_grid` must be at least 2"));
        }
        let slices = (0..=fc.eps_grid)
            .map(|m| {
                let e = m as f64 / fc.eps_grid as f64;
                apath_from_fn(alg.clone(), |t| ff.iter().map(|x| x.eval(&[e, t])).collect(), &c.x0, c.grid)
            })
            .collect::<Result<Vec<APath>, _>>()?;
        let fam = HomotopyFamily::new(alg.clone(), slices, FamilyOptions { endpoint_tol: 1e-6, path_tol: c.path_tol })?;
        let tr = homotopy_transport(&fam, 1e-6)?;
        rep.provenance.grids.insert("eps_grid".into(), fc.eps_grid);
        rep.verdict(
            Verdict::new("a_homotopy", Answer::from_bool(tr.is_homotopy))
                .with_num("max_end_transport", tr.max_end)
                .with("end_norms", json!(tr.end_norm)),
        );
        table = Table::new(fam.csv_header(), fam.csv_rows());
    }
    rep.settle_by_residuals();
    Ok(Outcome { report: rep, table: Some(table) })
}

fn absorb(top: &mut DiagnosisReport, sub: &DiagnosisReport, prefix: &str) {
    for r in &sub.residuals {
        let mut r = r.clone();
        r.name = format!("{prefix}.{}", r.name);
        top.residuals.push(r);
    }
    for v in &sub.verdicts {
        let mut v = v.clone();
        v.criterion = format!("{prefix}.{}", v.criterion);
        top.verdicts.push(v);
    }
    top.notes.extend(sub.notes.iter().map(|n| format!("{prefix}: {n}")));
}

fn groupoid_check(cfg: &Loaded, o: VerifyOptions) -> CliResult<Outcome> {
    let g = cfg.section(&cfg.config.groupoid, "groupoid")?;
    let mut rep = DiagnosisReport::new("groupoid-check", provenance(&o));
    let mut table = None;
    match g.kind {
        GroupoidKind::Pair => {
            let pg = pair_groupoid(cfg.chart()?)?;
            absorb(&mut rep, &pg.check_axioms(o)?, "axioms");
            let mut header: Vec<String> = pg.arrows().coords().to_vec();
            header.extend(pg.arrows().coords().iter().map(|c| format!("{c}_2")));
            let rows = pg.sample_tuples(2, o.samples, o.seed)?.into_iter().map(|t| t.concat()).collect();
            table = Some(Table::new(header, rows));
        }
        GroupoidKind::PairContact => {
            let theta = cfg.theta()?;
            let data = pair_contact_groupoid(&theta)?;
            absorb(&mut rep, &data.groupoid.check_axioms(o)?, "axioms");
            absorb(&mut rep, &symplectization_equivalence(&data, o)?, "multiplicativity");
            let (defect, _) = cocycle_defect(&data.groupoid, &data.r, o)?;
            rep.residual("r_additivity", defect, o.tol);
            if let Some(t) = &g.tau {
                let base = data.groupoid.base().clone();
                let tau = TensorField::function(base.clone(), cfg.expr("groupoid.tau", t, base.coords())?)?;
                let c = conformal_groupoid(&data, &tau)?;
                let eq = multiplicativity_residual(&c.groupoid, &c.theta, &Multiplicativity::Contact { r: c.r.clone() }, o)?;
                absorb(&mut rep, &eq, "conformal");
            }
        }
        GroupoidKind::Vf => {
            let chart = cfg.chart()?;
            if g.field.is_empty() {
                return Err(CliError::config("missing field `groupoid.field`"));
            }
            let field = cfg.vector_like(&chart, Kind::Multivector, "groupoid.field", &g.field)?;
            let vg = vf_contact_groupoid(&field, (g.t_range[0], g.t_range[1]))?;
            vf_checks(&mut rep, &vg, &chart, o, g.t_range)?;
            if let Some(x) = &g.period_point {
                if x.len() != chart.dim() {
                    return Err(CliError::config("field `groupoid.period_point` has the wrong dimension"));
                }
                let t = vg.return_time(x, g.period_window[0], g.period_window[1], g.period_tol)?;
                let mut v = Verdict::new("closed_orbit", Answer::from_bool(t.is_some())).with("point", json!(x));
                if let Some(t) = t {
                    v = v.with_num("period", t).with_num("period_over_2pi", t / (2.0 * PI));
                }
                rep.verdict(v);
            }
        }
    }
    rep.settle_by_residuals();
    Ok(Outcome { report: rep, table })
}

/// Associativity of arrow composition and of the isotropy product at sampled triples.
fn vf_checks(
    rep: &mut DiagnosisReport,
    vg: &jacobi_core::groupoidlab::VfContactGroupoid,
    chart: &jacobi_core::geometry::Chart,
    o: VerifyOptions,
    t_range: [f64; 2],
) -> CliResult<()> {
    let n = chart.dim();
    let span = (t_range[1].min(-t_range[0]) / 3.0).min(2.0);
    // base points from the central half of the sampling box so short flows stay in the chart
    let mut bx: Vec<(f64, f64)> = chart
        .sampling_box()
        .into_iter()
        .map(|(a, b)| (0.75 * a + 0.25 * b, 0.25 * a + 0.75 * b))
        .collect();
    bx.extend(std::iter::repeat((-span, span)).take(3));
    bx.extend(std::iter::repeat((-0.2, 0.2)).take(3 * n));
    let (mut assoc, mut group) = (0.0f64, 0.0f64);
    let count = o.samples.min(50).max(1);
    for p in halton_box(&bx, count, o.seed) {
        let x = p[..n].to_vec();
        let ts = &p[n..n + 3];
        let lam = |i: usize| p[n + 3 + i * n..n + 3 + (i + 1) * n].to_vec();
        let x2 = vg.flow(&x, ts[0])?.0;
        let x3 = vg.flow(&x2, ts[1])?.0;
        let a = VfArrow { lambda: lam(0), x: x.clone(), t: ts[0] };
        let b = VfArrow { lambda: lam(1), x: x2, t: ts[1] };
        let c = VfArrow { lambda: lam(2), x: x3, t: ts[2] };
        let l = vg.compose(&vg.compose(&a, &b)?, &c)?;
        let r = vg.compose(&a, &vg.compose(&b, &c)?)?;
        assoc = assoc.max(max_diff(&l.lambda, &r.lambda)).max((l.t - r.t).abs());
        let v = vg.x_at(&x)?;
        let (u, w, z) = (lam(0), lam(1), lam(2));
        let gl = vf_group_product(&v, &vf_group_product(&v, &u, &w)?, &z)?;
        let gr = vf_group_product(&v, &u, &vf_group_product(&v, &w, &z)?)?;
        group = group.max(max_diff(&gl, &gr));
    }
    rep.residual("composition_associativity", assoc, 1e-8);
    rep.residual("isotropy_associativity", group, 1e-12);
    rep.verdict(Verdict::new("sampled_triples", Answer::Yes).with("count", count).with("flow_time_span", num(span)));
    Ok(())
}

fn periods_check(cfg: &Loaded, o: VerifyOptions) -> CliResult<Outcome> {
    let c = cfg.section(&cfg.config.periods, "periods")?;
    let data = if !c.leaves.is_empty() {
        if !(c.points.is_empty() && c.generators.is_empty()) {
            return Err(CliError::config("`periods.leaves` excludes `points` and `generators`"));
        }
        dim2_periods(&jacobi_of(cfg, o)?, &c.leaves)?
    } else {
        if c.points.len() != c.generators.len() {
            return Err(CliError::config(format!(
                "fields `periods.points` ({}) and `periods.generators` ({}) differ in length",
                c.points.len(),
                c.generators.len()
            )));
        }
        PeriodData::new(c.points.clone(), c.generators.clone())?
    };
    let mut rep = DiagnosisReport::new("periods-check", provenance(&o));
    rep.verdict(Verdict::new("period_data", Answer::Yes).with("generators", json!(data.generators)));
    let mut answers = Vec::new();
    for check in &c.checks {
        let v = match check {
            PeriodCheck::Discreteness => discreteness_check(&data, c.tol)?,
            PeriodCheck::Prequantizable => prequantizable_check(&data, c.tol)?,
        };
        answers.push(v.answer);
        rep.verdict(v);
    }
    rep.outcome = if answers.contains(&Answer::Inconclusive) {
        Answer::Inconclusive
    } else {
        Answer::from_bool(answers.iter().all(|a| *a == Answer::Yes))
    };
    Ok(Outcome::report(rep))
}
