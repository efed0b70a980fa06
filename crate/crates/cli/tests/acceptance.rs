//! Acceptance run: one line per criterion, non-zero exit if any fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use jacobi_core::algebroid::{
    algebroid_differential, apath_from_fn, cocycle_integral, concatenate, cotangent_algebroid, jacobi_algebroid,
    leaf_area_via_transport, reeb_cocycle, AlgebroidCochain, AlgebroidStructure, FamilyOptions, HomotopyFamily,
    PathCorrespondence,
};
use jacobi_core::exprlang::random_polynomial;
use jacobi_core::geometry::{max_diff_over, Chart, Kind, TensorField};
use jacobi_core::groupoidlab::{
    groupoid_cochain_differential, pair_contact_groupoid, pair_groupoid, symplectization_equivalence, tuple_chart,
    vf_contact_groupoid, vf_group_product, vf_phi, ContactGroupoidData, GroupoidCochain,
};
use jacobi_core::jacobi::corpus::{known_jacobi, perturbed, standard_contact, standard_contact_form, su2};
use jacobi_core::jacobi::{depoissonize, poissonize, verify_jacobi, JacobiStructure, VerifyOptions};
use jacobi_core::monodromy::{discreteness_check, prequantizable_check, symplectic_area, MaFamily, PeriodData};
use jacobi_core::report::{Answer, DiagnosisReport};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn opts() -> VerifyOptions {
    VerifyOptions::default()
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn ma_verdicts() -> Outcome {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut lines = Vec::new();
    let mut ok = true;
    for (file, p, j) in [
        ("ma_case_i.toml", Answer::Yes, Answer::No),
        ("ma_case_ii.toml", Answer::No, Answer::Yes),
        ("ma_case_iii.toml", Answer::No, Answer::No),
    ] {
        let dir = tempfile::tempdir().map_err(err)?;
        let out = dir.path().join("report.json");
        let start = Instant::now();
        let o = Command::new(env!("CARGO_BIN_EXE_jacobi-lab"))
            .current_dir(dir.path())
            .args(["diagnose-ma", "--no-timestamp", "--config"])
            .arg(configs.join(file))
            .arg("--out")
            .arg(&out)
            .output()
            .map_err(err)?;
        let secs = start.elapsed().as_secs_f64();
        let rep = DiagnosisReport::from_json(&std::fs::read_to_string(&out).map_err(err)?).map_err(err)?;
        let got = (rep.find("poisson_integrable").map(|v| v.answer), rep.find("jacobi_integrable").map(|v| v.answer));
        let case_ok = o.status.code() == Some(0) && got == (Some(p), Some(j)) && secs <= 10.0;
        ok &= case_ok;
        lines.push(format!("{file}: {got:?} in {secs:.2}s"));
    }
    check(ok, lines.join("; "))
}

fn area_closed_form() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (c0, c1): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let amp: f64 = rng.gen_range(0.0..0.9);
        let src = format!("exp({c0} + {c1}*r)*(1 + {amp}*sin(3*r))");
        let r: f64 = rng.gen_range(0.05..2.5);
        let a = (c0 + c1 * r).exp() * (1.0 + amp * (3.0 * r).sin());
        let f = MaFamily::parse(&src, 3.0).map_err(err)?;
        let want = 4.0 * PI * r / a;
        let q = symplectic_area(&f, r, true).map_err(err)?.quadrature.ok_or("no quadrature")?;
        worst = worst.max((q - want).abs() / want);
    }
    let one = MaFamily::parse("1", 1.0).map_err(err)?;
    let q = symplectic_area(&one, 1.0, true).map_err(err)?.quadrature.ok_or("no quadrature")?;
    let unit = (q - 4.0 * PI).abs();
    let secs = start.elapsed().as_secs_f64();
    check(
        worst <= 1e-6 && unit <= 1e-5 && secs <= 5.0,
        format!("max rel error {worst:.2e} over 20 cases, |A-4π| = {unit:.2e} at a=1 r=1, {secs:.2}s"),
    )
}

fn corpus() -> Outcome {
    let known = known_jacobi();
    let bad = perturbed();
    let mut worst = 0.0f64;
    let mut ok = known.len() >= 5 && bad.len() >= 5;
    let mut notes = Vec::new();
    for (name, j) in &known {
        let r = verify_jacobi(j, opts());
        worst = worst.max(r.residuals.iter().map(|x| x.value).fold(0.0, f64::max));
        let agree = r.find("jacobi").map(|v| v.evidence["criteria_agree"] == true).unwrap_or(false);
        if !r.passed() || !agree {
            ok = false;
            notes.push(format!("{name} rejected"));
        }
    }
    for (name, j) in &bad {
        let r = verify_jacobi(j, opts());
        let agree = r.find("jacobi").map(|v| v.evidence["criteria_agree"] == true).unwrap_or(false);
        if r.passed() || !agree {
            ok = false;
            notes.push(format!("{name} accepted"));
        }
    }
    ok &= worst <= 1e-8;
    check(ok, format!("{} known (max residual {worst:.2e}), {} perturbed rejected {}", known.len(), bad.len(), notes.join(" ")))
}

fn round_trip() -> Outcome {
    let (mut rt, mut hom, mut pois) = (0.0f64, 0.0f64, 0.0f64);
    for (name, j) in known_jacobi() {
        let h = poissonize(&j).map_err(err)?;
        let back = depoissonize(&h, opts()).map_err(|e| format!("{name}: {e:?}"))?;
        let pts = j.chart().sample(200, 4);
        rt = rt.max(max_diff_over(back.lambda(), j.lambda(), &pts).map_err(err)?);
        rt = rt.max(max_diff_over(back.reeb(), j.reeb(), &pts).map_err(err)?);
        let hp = h.chart().sample(200, 5);
        hom = hom.max(h.homogeneity_residual(&hp).map_err(err)?);
        pois = pois.max(h.poisson_residual(&hp).map_err(err)?);
    }
    check(
        rt <= 1e-10 && hom <= 1e-9,
        format!("round trip {rt:.2e}, homogeneity {hom:.2e} (poisson residual {pois:.2e})"),
    )
}

fn wiggly(t: f64) -> Vec<f64> {
    vec![0.7 * (3.0 * t).sin(), 0.4 + t * t, -0.5 * (2.0 * t).cos()]
}

fn apaths() -> Outcome {
    let j = standard_contact();
    let ja = Arc::new(jacobi_algebroid(&j, opts()).map_err(err)?);
    let rc = reeb_cocycle(&j).map_err(err)?;
    let n = 256;
    let b = apath_from_fn(ja.clone(), |t| Ok(vec![0.3, (2.0 * t).sin(), 1.0 + 0.5 * t, -0.2 * t]), &[0.1, 0.2, -0.3], n)
        .map_err(err)?;
    let a = apath_from_fn(ja.clone(), |t| Ok(vec![t.cos(), -0.1, 0.4 * t, 0.5]), b.end(), n).map_err(err)?;
    let mut additivity = 0.0f64;
    for cutoff in [false, true] {
        let ab = concatenate(&a, &b, cutoff).map_err(err)?;
        let lhs = cocycle_integral(&ab, &rc).map_err(err)?;
        let rhs = cocycle_integral(&a, &rc).map_err(err)? + cocycle_integral(&b, &rc).map_err(err)?;
        additivity = additivity.max((lhs - rhs).abs());
    }
    let reparam = (cocycle_integral(&b, &rc).map_err(err)? - cocycle_integral(&b.reparametrize().map_err(err)?, &rc).map_err(err)?).abs();

    let s = Arc::new(cotangent_algebroid(&su2(), opts()).map_err(err)?);
    let res: Vec<f64> = [64, 128, 256]
        .iter()
        .map(|&k| apath_from_fn(s.clone(), |t| Ok(wiggly(t)), &[0.3, -0.4, 0.5], k).and_then(|p| p.invariant_residual()))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let slope = (res[0] / res[1]).log2().min((res[1] / res[2]).log2());

    let pc = PathCorrespondence::new(&j, opts()).map_err(err)?;
    let tilde = apath_from_fn(
        pc.symplectic.clone(),
        |t| Ok(vec![0.2 * (3.0 * t).sin(), 0.5, 0.3 - t, 0.4 * t]),
        &[0.1, -0.2, 0.3, 0.25],
        256,
    )
    .map_err(err)?;
    let (jp, s0) = pc.to_jacobi(&tilde).map_err(err)?;
    let back = pc.from_jacobi(&jp, s0).map_err(err)?;
    let mut trip = 0.0f64;
    for k in 0..=256 {
        trip = trip.max(max_abs_diff(&back.fiber()[k], &tilde.fiber()[k]));
        trip = trip.max(max_abs_diff(&back.base()[k], &tilde.base()[k]));
    }
    let shift = (tilde.end()[3] - tilde.start()[3] + cocycle_integral(&jp, &pc.reeb).map_err(err)?).abs();
    check(
        additivity <= 1e-8 && reparam <= 1e-8 && slope >= 3.5 && trip <= 1e-8 && shift <= 1e-8,
        format!(
            "additivity {additivity:.2e}, reparametrization {reparam:.2e}, slope {slope:.2}, translate round trip {trip:.2e}, γ₀ shift {shift:.2e}"
        ),
    )
}

fn meridians(alg: Arc<AlgebroidStructure>, n: usize) -> jacobi_core::Result<HomotopyFamily> {
    HomotopyFamily::from_fn(
        alg,
        n,
        n,
        |e, t| {
            let (ph, th) = (2.0 * PI * e, PI * t);
            let g = vec![th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()];
            let gt = [PI * th.cos() * ph.cos(), PI * th.cos() * ph.sin(), -PI * th.sin()];
            // a = γ̇ × γ on the unit sphere, so Λ^♯a = γ̇
            let a = vec![gt[1] * g[2] - gt[2] * g[1], gt[2] * g[0] - gt[0] * g[2], gt[0] * g[1] - gt[1] * g[0]];
            Ok((g, a))
        },
        FamilyOptions::default(),
    )
}

fn period_cross_check() -> Outcome {
    let start = Instant::now();
    let s = Arc::new(cotangent_algebroid(&su2(), opts()).map_err(err)?);
    let ext = Arc::new(jacobi_algebroid(&su2(), opts()).map_err(err)?);
    let fam = meridians(s, 128).map_err(err)?;
    let area = leaf_area_via_transport(&fam, ext, FamilyOptions::default()).map_err(err)?;
    let secs = start.elapsed().as_secs_f64();
    let rel = (area - 4.0 * PI).abs() / (4.0 * PI);
    check(rel <= 1e-3 && secs <= 30.0, format!("area {area:.8} vs 4π, rel {rel:.2e}, {secs:.2}s at 128x128"))
}

fn perturb(d: &ContactGroupoidData) -> Result<ContactGroupoidData, String> {
    let extra = TensorField::parse_sparse(d.theta.chart().clone(), Kind::Form, 1, &[(&[1], "0.1*x")]).map_err(err)?;
    Ok(ContactGroupoidData { theta: d.theta.add(&extra).map_err(err)?, ..d.clone() })
}

fn groupoid_equations() -> Outcome {
    let d = pair_contact_groupoid(&standard_contact_form()).map_err(err)?;
    let good = symplectization_equivalence(&d, opts()).map_err(err)?;
    let bad = symplectization_equivalence(&perturb(&d)?, opts()).map_err(err)?;
    let val = |r: &DiagnosisReport, n: &str| r.residual_value(n).unwrap_or(f64::NAN);
    let (e5, e7) = (val(&good, "contact"), val(&good, "symplectic"));
    let (p5, p7) = (val(&bad, "contact"), val(&bad, "symplectic"));
    let holds = |r: &DiagnosisReport| r.find("equivalence_holds").map(|v| v.is_yes()).unwrap_or(false);
    check(
        e5 <= 1e-8 && e7 <= 1e-8 && p5 >= 1e-3 && p7 >= 1e-3 && holds(&good) && holds(&bad),
        format!("contact {e5:.2e}, symplectic {e7:.2e}; perturbed {p5:.2e} / {p7:.2e}; equivalence on both inputs"),
    )
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

fn vf_groupoid() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut assoc, mut hom) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let v: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut pick = || loop {
            let l: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if 1.0 + l.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() > 0.1 {
                break l;
            }
        };
        let (a, b, c) = (pick(), pick(), pick());
        let ab = vf_group_product(&v, &a, &b).map_err(err)?;
        let l = vf_group_product(&v, &ab, &c).map_err(err)?;
        let r = vf_group_product(&v, &a, &vf_group_product(&v, &b, &c).map_err(err)?).map_err(err)?;
        assoc = assoc.max(max_abs_diff(&l, &r));
        let m = matmul(&vf_phi(&v, &a), &vf_phi(&v, &b));
        let p = vf_phi(&v, &ab);
        hom = hom.max(max_abs_diff(&m.concat(), &p.concat()));
    }
    let c = Arc::new(Chart::new(&["x", "y"], vec![(-5.0, 5.0); 2]).map_err(err)?);
    let x = TensorField::parse_sparse(c, Kind::Multivector, 1, &[(&[0], "-y"), (&[1], "x")]).map_err(err)?;
    let g = vf_contact_groupoid(&x, (-20.0, 20.0)).map_err(err)?;
    let t = g.return_time(&[1.0, 0.5], 0.5, 10.0, 1e-9).map_err(err)?.ok_or("no return")?;
    let pe = (t - 2.0 * PI).abs();
    check(
        assoc <= 1e-12 && hom <= 1e-12 && pe <= 1e-6,
        format!("associativity {assoc:.2e}, φ-homomorphism {hom:.2e} over 1000 triples, period error {pe:.2e}"),
    )
}

fn complexes() -> Outcome {
    let mut dd_alg = 0.0f64;
    let algs = [
        cotangent_algebroid(&su2(), opts()).map_err(err)?,
        jacobi_algebroid(&standard_contact(), opts()).map_err(err)?,
    ];
    for (ai, a) in algs.iter().enumerate() {
        for p in (0..=2).filter(|p| p + 2 <= a.rank()) {
            let m = jacobi_core::geometry::combin::binomial(a.rank(), p);
            let e = (0..m as u64).map(|q| random_polynomial(a.chart().coords(), 3, 5, 40 + 10 * ai as u64 + q)).collect();
            let c = AlgebroidCochain::from_exprs(a.chart().clone(), a.rank(), p, e).map_err(err)?;
            let dd = algebroid_differential(a, &algebroid_differential(a, &c).map_err(err)?).map_err(err)?;
            for x in a.chart().sample(50, 3) {
                dd_alg = dd_alg.max(dd.max_abs(&x).map_err(err)?);
            }
        }
    }

    let mut dd_grp = 0.0f64;
    let plane = Arc::new(Chart::euclidean(&["x", "y"]).map_err(err)?);
    for g in [pair_groupoid(plane).map_err(err)?, pair_contact_groupoid(&standard_contact_form()).map_err(err)?.groupoid] {
        for p in 0..=2 {
            let ch = if p == 0 { g.base().clone() } else { tuple_chart(g.arrows(), p).map_err(err)? };
            let value = TensorField::function(ch.clone(), random_polynomial(ch.coords(), 3, 6, 70 + p as u64)).map_err(err)?;
            let c = GroupoidCochain::new(&g, p, value).map_err(err)?;
            let dd = groupoid_cochain_differential(&g, &groupoid_cochain_differential(&g, &c).map_err(err)?).map_err(err)?;
            dd_grp = dd_grp.max(dd.max_on_composable(&g, VerifyOptions { samples: 60, ..opts() }).map_err(err)?);
        }
    }

    let p = su2();
    let ca = cotangent_algebroid(&p, opts()).map_err(err)?;
    let dl = algebroid_differential(&ca, &AlgebroidCochain::from_multivector(p.lambda()).map_err(err)?).map_err(err)?;
    let mut d_lambda = 0.0f64;
    for x in p.chart().sample(200, 9) {
        d_lambda = d_lambda.max(dl.max_abs(&x).map_err(err)?);
    }

    let h = Arc::new(Chart::euclidean(&["x", "y", "s"]).map_err(err)?);
    let lt = TensorField::parse_sparse(h.clone(), Kind::Multivector, 2, &[(&[0, 1], "exp(-s)")]).map_err(err)?;
    let mut hp = JacobiStructure::poisson(lt.clone()).map_err(err)?;
    hp.verify(opts());
    let th = cotangent_algebroid(&hp, opts()).map_err(err)?;
    let z = AlgebroidCochain::from_multivector(&TensorField::coordinate_vector(h.clone(), 2).map_err(err)?).map_err(err)?;
    let dz = algebroid_differential(&th, &z).map_err(err)?;
    let lc = AlgebroidCochain::from_multivector(&lt).map_err(err)?;
    let mut homog = 0.0f64;
    for x in h.sample(200, 10) {
        let (a, b) = (dz.eval(&x).map_err(err)?, lc.eval(&x).map_err(err)?);
        homog = homog.max(a.iter().zip(&b).map(|(u, v)| (u + v).abs()).fold(0.0, f64::max));
    }
    check(
        dd_alg <= 1e-9 && dd_grp <= 1e-9 && d_lambda <= 1e-9 && homog <= 1e-9,
        format!("d_A² {dd_alg:.2e}, groupoid d² {dd_grp:.2e}, d_(T*P)Λ {d_lambda:.2e}, Λ + d_(T*M)Z {homog:.2e}"),
    )
}

fn deciders() -> Outcome {
    let pts = |n: usize| (0..n).map(|i| vec![i as f64]).collect::<Vec<_>>();
    let dense = discreteness_check(&PeriodData::new(pts(1), vec![vec![1.0, 2f64.sqrt()]]).map_err(err)?, 1e-9).map_err(err)?;
    let lattice = discreteness_check(&PeriodData::new(pts(5), vec![vec![2.0 * PI]; 5]).map_err(err)?, 1e-9).map_err(err)?;
    let mut mismatches = Vec::new();
    for (g, want) in [
        (3.0, true),
        (3.0 + 5e-10, true),
        (3.0 + 2e-9, false),
        (-2.0, true),
        (0.5, false),
        (2.0 * PI, false),
        (1e6 + 1e-10, true),
    ] {
        let v = prequantizable_check(&PeriodData::new(pts(1), vec![vec![g]]).map_err(err)?, 1e-9).map_err(err)?;
        if v.is_yes() != want {
            mismatches.push(g);
        }
    }
    check(
        dense.answer == Answer::No && lattice.answer == Answer::Yes && mismatches.is_empty(),
        format!(
            "{{1,√2}} → {:?}, constant 2π → {:?}, prequantizable mismatches {mismatches:?}",
            dense.answer, lattice.answer
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("M_a verdict table", ma_verdicts),
        ("area closed form", area_closed_form),
        ("Jacobi verification corpus", corpus),
        ("poissonization round trip", round_trip),
        ("A-path machinery", apaths),
        ("period cross-check", period_cross_check),
        ("groupoid equation suite", groupoid_equations),
        ("vector-field groupoid", vf_groupoid),
        ("cocycle complexes", complexes),
        ("decider robustness", deciders),
    ];
    let mut failed = 0;
    let total = Instant::now();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let got = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = Duration::as_secs_f64(&start.elapsed());
        match got {
            Ok(d) => println!("criterion {:>2} PASS  {name}: {d} [{secs:.2}s]", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {d} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} of 10 passed in {:.1}s", 10 - failed, total.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
