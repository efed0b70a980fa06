use std::sync::Arc;

use super::groupoid::{dist, pair_groupoid, scale_of, ExplicitGroupoid};
use crate::error::{Error, Result};
use crate::exprlang::{log_derivative, Expr, Scalar, Taylor};
use crate::geometry::{exterior_derivative, lie_derivative, Chart, JetField, Kind, SmoothMap, TensorField};
use crate::jacobi::VerifyOptions;
use crate::report::{Answer, DiagnosisReport, Provenance, Verdict};

/// A groupoid with a contact form on arrows and the additive cocycle `r` with
/// `m*θ = pr₂*(e^{−r}) pr₁*θ + pr₂*θ`.
#[derive(Debug, Clone)]
pub struct ContactGroupoidData {
    pub groupoid: ExplicitGroupoid,
    pub theta: TensorField,
    /// Function on arrows with `r(gh) = r(g) + r(h)`.
    pub r: TensorField,
}

fn coord(chart: &Arc<Chart>, i: usize) -> TensorField {
    TensorField::function(chart.clone(), Expr::var(chart.coords(), i)).expect("scalar field")
}

pub(crate) fn map_function(f: &TensorField, g: fn(&Taylor) -> Taylor) -> Result<TensorField> {
    TensorField::function_jets(f.comps().map(1, move |v| Ok(vec![g(&v[0])])))
}

pub(crate) fn exp_t(t: &Taylor) -> Taylor {
    t.lift(&|_, x| x.exp(), 0)
}

pub(crate) fn log_t(t: &Taylor) -> Taylor {
    t.lift(&log_derivative, 0)
}

/// Pair groupoid of `M` times `ℝ` with `θ = −e^{t} p₁*θ₀ + p₂*θ₀` and `r = −t`.
///
/// Arrows are `(x, x_s, t)` with target `x` and source `x_s`; `(x, y, t)(y, z, t') = (x, z, t + t')`.
pub fn pair_contact_groupoid(theta0: &TensorField) -> Result<ContactGroupoidData> {
    crate::jacobi::contact::check_contact(theta0, VerifyOptions::default())?;
    let m = theta0.chart().clone();
    let n = m.dim();
    let pg = pair_groupoid(m.clone())?;
    let arrows = Arc::new(pg.arrows().extend("t", (f64::NEG_INFINITY, f64::INFINITY))?);
    let na = 2 * n + 1;
    let v = |c: &Arc<Chart>, i: usize| Expr::var(c.coords(), i);
    let proj = |src: &Arc<Chart>, dst: &Arc<Chart>, idx: &[usize]| SmoothMap::projection(src.clone(), dst.clone(), idx);
    let source = proj(&arrows, &m, &(n..2 * n).collect::<Vec<_>>())?;
    let target = proj(&arrows, &m, &(0..n).collect::<Vec<_>>())?;
    let mut ue: Vec<Expr> = (0..2 * n).map(|i| v(&m, i % n)).collect();
    ue.push(Expr::constant(m.coords(), 0.0));
    let unit = SmoothMap::from_exprs(m.clone(), arrows.clone(), ue)?;
    let mut ie: Vec<Expr> = (0..2 * n).map(|i| v(&arrows, (i + n) % (2 * n))).collect();
    ie.push(v(&arrows, 2 * n).neg());
    let inverse = SmoothMap::from_exprs(arrows.clone(), arrows.clone(), ie)?;
    let pair = super::groupoid::tuple_chart(&arrows, 2)?;
    let mut me: Vec<Expr> = (0..n).map(|i| v(&pair, i)).collect();
    me.extend((0..n).map(|i| v(&pair, na + n + i)));
    me.push(v(&pair, 2 * n).add(&v(&pair, na + 2 * n)));
    let multiply = SmoothMap::from_exprs(pair.clone(), arrows.clone(), me)?;
    let comp = Arc::new(arrows.product(&Chart::new(&[m.coords(), &["t".to_string()]].concat(), [m.bounds(), &[(f64::NEG_INFINITY, f64::INFINITY)]].concat())?, "_n")?);
    let mut ce: Vec<Expr> = (0..na).map(|i| v(&comp, i)).collect();
    ce.extend((n..2 * n).map(|i| v(&comp, i)));
    ce.extend((0..=n).map(|i| v(&comp, na + i)));
    let composable = SmoothMap::from_exprs(comp, pair, ce)?;
    let groupoid = ExplicitGroupoid::new(
        format!("pair_contact({})", m.coords().join(",")),
        source,
        target,
        unit,
        inverse,
        multiply,
        composable,
    )?;
    let p1 = theta0.embed(arrows.clone(), (0..n).collect())?;
    let p2 = theta0.embed(arrows.clone(), (n..2 * n).collect())?;
    let et = map_function(&coord(&arrows, 2 * n), exp_t)?;
    let theta = p2.sub(&p1.mul_fn(&et)?)?;
    let r = coord(&arrows, 2 * n).neg();
    Ok(ContactGroupoidData { groupoid, theta, r })
}

/// Worst `|r(gh) − r(g) − r(h)|` over sampled composable pairs, with the pair.
pub fn cocycle_defect(g: &ExplicitGroupoid, r: &TensorField, opts: VerifyOptions) -> Result<(f64, Vec<f64>)> {
    let mut worst = (0.0, vec![]);
    for t in g.sample_tuples(2, opts.samples, opts.seed)? {
        let gh = g.mul(&t[0], &t[1])?;
        let rv = |a: &[f64]| Ok::<f64, Error>(r.eval(a)?[0]);
        let d = (rv(&gh)? - rv(&t[0])? - rv(&t[1])?).abs();
        if d > worst.0 || worst.1.is_empty() {
            worst = (d, [t[0].clone(), t[1].clone()].concat());
        }
    }
    Ok(worst)
}

/// `Σ ×_r ℝ`: `α(g, s) = (α(g), s)`, `β(g, s) = (β(g), s − r(g))`, `(g₁, s₁)(g₂, s₂) = (g₁g₂, s₂)`.
pub fn times_r_extension(g: &ExplicitGroupoid, r: &TensorField, opts: VerifyOptions) -> Result<ExplicitGroupoid> {
    if r.degree() != 0 {
        return Err(Error::DegreeMismatch("r must be a function".into()));
    }
    let (worst, pair) = cocycle_defect(g, r, opts)?;
    if worst > opts.tol {
        return Err(Error::NotMultiplicative { residual: worst, pair });
    }
    let na = g.arrows().dim();
    let line = (f64::NEG_INFINITY, f64::INFINITY);
    let arrows = Arc::new(g.arrows().extend("s", line)?);
    let base = Arc::new(g.base().extend("s", line)?);
    let lift = |f: &JetField, big: &Arc<Chart>, map: Vec<usize>| f.embed(big.clone(), map);
    let s_of = |c: &Arc<Chart>, i: usize| coord(c, i).comps().clone();
    let id_a: Vec<usize> = (0..na).collect();
    let r_up = lift(r.comps(), &arrows, id_a.clone());
    let minus = |a: &JetField, b: &JetField| -> Result<JetField> {
        Ok(a.concat(b)?.map(1, |v| Ok(vec![v[0].minus(&v[1])])))
    };
    let source = SmoothMap::from_jets(arrows.clone(), base.clone(), lift(g.source().comps(), &arrows, id_a.clone()).concat(&s_of(&arrows, na))?)?;
    let target = SmoothMap::from_jets(
        arrows.clone(),
        base.clone(),
        lift(g.target().comps(), &arrows, id_a.clone()).concat(&minus(&s_of(&arrows, na), &r_up)?)?,
    )?;
    let nb = g.base().dim();
    let unit = SmoothMap::from_jets(base.clone(), arrows.clone(), lift(g.unit().comps(), &base, (0..nb).collect()).concat(&s_of(&base, nb))?)?;
    let inverse = SmoothMap::from_jets(
        arrows.clone(),
        arrows.clone(),
        lift(g.inverse().comps(), &arrows, id_a.clone()).concat(&minus(&s_of(&arrows, na), &r_up)?)?,
    )?;
    let pair = super::groupoid::tuple_chart(&arrows, 2)?;
    let pair_map: Vec<usize> = (0..na).chain(na + 1..2 * na + 1).collect();
    let multiply = SmoothMap::from_jets(pair.clone(), arrows.clone(), lift(g.multiply().comps(), &pair, pair_map).concat(&s_of(&pair, 2 * na + 1))?)?;
    // composable chart (g, s, u) over the original (g, u)
    let c0 = g.composable().source().clone();
    let mut names: Vec<String> = arrows.coords().to_vec();
    names.extend_from_slice(&c0.coords()[na..]);
    let mut bounds = arrows.bounds().to_vec();
    bounds.extend_from_slice(&c0.bounds()[na..]);
    let comp = Arc::new(Chart::new(&names, bounds)?);
    let gh = lift(g.composable().comps(), &comp, (0..na).chain(na + 1..c0.dim() + 1).collect());
    let s1 = s_of(&comp, na);
    let h = SmoothMap::from_jets(comp.clone(), g.arrows().clone(), gh.select((na..2 * na).collect()))?;
    let s2 = s1.concat(&h.pullback_functions(r.comps())?)?.map(1, |v| Ok(vec![v[0].plus(&v[1])]));
    let comps = gh.select(id_a.clone()).concat(&s1)?.concat(&gh.select((na..2 * na).collect()))?.concat(&s2)?;
    let composable = SmoothMap::from_jets(comp, pair, comps)?;
    ExplicitGroupoid::new(format!("{} x_r R", g.name), source, target, unit, inverse, multiply, composable)
}

/// Which pullback identity to test.
#[derive(Debug, Clone)]
pub enum Multiplicativity {
    /// `m*ω = pr₁*ω + pr₂*ω` for a 2-form.
    Symplectic,
    /// `m*θ = pr₂*(e^{−r})·pr₁*θ + pr₂*θ` for a 1-form.
    Contact { r: TensorField },
}

/// Pullbacks of the identity along the composable parametrization, so only directions tangent to
/// the composable pairs enter.
pub fn multiplicativity_form(g: &ExplicitGroupoid, w: &TensorField, kind: &Multiplicativity) -> Result<TensorField> {
    let want = match kind {
        Multiplicativity::Symplectic => 2,
        Multiplicativity::Contact { .. } => 1,
    };
    if w.degree() != want {
        return Err(Error::DegreeMismatch(format!("expected a {want}-form, got degree {}", w.degree())));
    }
    if w.kind() != Kind::Form {
        return Err(Error::DegreeMismatch("expected a differential form".into()));
    }
    let c = g.composable();
    let na = g.arrows().dim();
    let first = SmoothMap::projection(g.pair_chart().clone(), g.arrows().clone(), &(0..na).collect::<Vec<_>>())?;
    let second = SmoothMap::projection(g.pair_chart().clone(), g.arrows().clone(), &(na..2 * na).collect::<Vec<_>>())?;
    let (m, p1, p2) = (c.then(g.multiply())?, c.then(&first)?, c.then(&second)?);
    let lhs = m.pullback_form(w)?;
    let a = p1.pullback_form(w)?;
    let b = p2.pullback_form(w)?;
    match kind {
        Multiplicativity::Symplectic => lhs.sub(&a)?.sub(&b),
        Multiplicativity::Contact { r } => {
            let e = map_function(&p2.pullback_function(r)?, |t| exp_t(&t.negate()))?;
            lhs.sub(&a.mul_fn(&e)?)?.sub(&b)
        }
    }
}

pub fn multiplicativity_residual(g: &ExplicitGroupoid, w: &TensorField, kind: &Multiplicativity, opts: VerifyOptions) -> Result<DiagnosisReport> {
    let f = multiplicativity_form(g, w, kind)?;
    let mut rep = DiagnosisReport::new("multiplicativity", Provenance::new(opts.seed, opts.tol, opts.samples));
    let pts = g.composable().source().sample(opts.samples, opts.seed);
    let mut worst = 0.0f64;
    for p in &pts {
        worst = worst.max(f.max_abs(p)?);
    }
    let name = match kind {
        Multiplicativity::Symplectic => "m*w - pr1*w - pr2*w",
        Multiplicativity::Contact { .. } => "m*theta - e^-r pr1*theta - pr2*theta",
    };
    rep.residual(name, worst, opts.tol);
    rep.settle_by_residuals();
    Ok(rep)
}

/// `Σ ×_r ℝ` with `ω = d(e^s θ)` and `Z = ∂/∂s`.
#[derive(Debug, Clone)]
pub struct Symplectization {
    pub groupoid: ExplicitGroupoid,
    pub omega: TensorField,
    pub euler: TensorField,
}

pub fn symplectize(data: &ContactGroupoidData, opts: VerifyOptions) -> Result<Symplectization> {
    let groupoid = times_r_extension(&data.groupoid, &data.r, opts)?;
    let arrows = groupoid.arrows().clone();
    let na = data.groupoid.arrows().dim();
    let lifted = data.theta.embed(arrows.clone(), (0..na).collect())?;
    let es = map_function(&coord(&arrows, na), exp_t)?;
    let omega = exterior_derivative(&lifted.mul_fn(&es)?)?;
    let euler = TensorField::coordinate_vector(arrows, na)?;
    Ok(Symplectization { groupoid, omega, euler })
}

/// Contact multiplicativity of `θ` and symplectic multiplicativity of `d(e^s θ)` side by side; the
/// verdict is whether they agree.
pub fn symplectization_equivalence(data: &ContactGroupoidData, opts: VerifyOptions) -> Result<DiagnosisReport> {
    let contact = multiplicativity_residual(&data.groupoid, &data.theta, &Multiplicativity::Contact { r: data.r.clone() }, opts)?;
    let s = symplectize(data, opts)?;
    let symplectic = multiplicativity_residual(&s.groupoid, &s.omega, &Multiplicativity::Symplectic, opts)?;
    let mut rep = DiagnosisReport::new("symplectization-equivalence", Provenance::new(opts.seed, opts.tol, opts.samples));
    let (a, b) = (contact.residuals[0].value, symplectic.residuals[0].value);
    let (pa, pb) = (a <= opts.tol, b <= opts.tol);
    rep.residuals.push(crate::report::Residual { name: "contact".into(), value: a, tol: opts.tol, passed: pa });
    rep.residuals.push(crate::report::Residual { name: "symplectic".into(), value: b, tol: opts.tol, passed: pb });
    rep.verdict(Verdict::new("contact_multiplicative", Answer::from_bool(pa)));
    rep.verdict(Verdict::new("symplectic_multiplicative", Answer::from_bool(pb)));
    rep.verdict(Verdict::new("equivalence_holds", Answer::from_bool(pa == pb)));
    rep.outcome = Answer::from_bool(pa == pb);
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomogeneityReport {
    /// `max |L_Z ω − ω|` over sampled arrows.
    pub lie: f64,
    /// Worst failure of the time-`h` flow of `Z` to commute with multiplication and to preserve
    /// composability.
    pub morphism: f64,
}

/// Time-`t` flow of a vector field by RK4.
pub(crate) fn flow(z: &TensorField, x: &[f64], t: f64, steps: usize) -> Result<Vec<f64>> {
    let h = t / steps as f64;
    let f = |_: f64, y: &[f64]| z.eval(y);
    let mut y = x.to_vec();
    for k in 0..steps {
        y = crate::numerics::rk4_step(&f, k as f64 * h, &y, h)?;
    }
    Ok(y)
}

pub fn homogeneity_residual(g: &ExplicitGroupoid, w: &TensorField, z: &TensorField, opts: VerifyOptions) -> Result<HomogeneityReport> {
    for c in [w.chart(), z.chart()] {
        if c.as_ref() != g.arrows().as_ref() {
            return Err(Error::ChartMismatch("fields must live on the arrow chart".into()));
        }
    }
    let d = lie_derivative(z, w)?.sub(w)?;
    let mut lie = 0.0f64;
    for p in g.arrows().sample(opts.samples, opts.seed) {
        lie = lie.max(d.max_abs(&p)?);
    }
    let mut morphism = 0.0f64;
    let h = 0.05;
    for t in g.sample_tuples(2, opts.samples.min(50), opts.seed)? {
        let (a, b) = (flow(z, &t[0], h, 20)?, flow(z, &t[1], h, 20)?);
        let sc = scale_of(&a).max(scale_of(&b));
        let gap = dist(&g.alpha(&a)?, &g.beta(&b)?) / sc;
        if gap > super::groupoid::COMPOSABLE_TOL * 1e3 {
            morphism = morphism.max(gap);
            continue;
        }
        let mut pr = a.clone();
        pr.extend_from_slice(&b);
        let lhs = g.multiply().apply(&pr)?;
        let rhs = flow(z, &g.mul(&t[0], &t[1])?, h, 20)?;
        morphism = morphism.max(gap).max(dist(&lhs, &rhs) / sc);
    }
    Ok(HomogeneityReport { lie, morphism })
}

/// `θ_τ = α*(τ) θ` with `r_τ = r − log(α*τ / β*τ)`.
pub fn conformal_groupoid(data: &ContactGroupoidData, tau: &TensorField) -> Result<ContactGroupoidData> {
    let g = &data.groupoid;
    let at = g.source().pullback_function(tau)?;
    let bt = g.target().pullback_function(tau)?;
    let theta = data.theta.mul_fn(&at)?;
    let ratio = TensorField::function_jets(at.comps().concat(bt.comps())?.map(1, |v| Ok(vec![log_t(&v[0].over(&v[1]))])))?;
    let r = data.r.sub(&ratio)?;
    Ok(ContactGroupoidData { groupoid: g.clone(), theta, r })
}

