use std::f64::consts::PI;
use std::sync::Arc;

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use jacobi_core::algebroid::{
    apath_from_fn, cotangent_algebroid, jacobi_algebroid, leaf_area_via_transport, FamilyOptions, HomotopyFamily,
};
use jacobi_core::geometry::schouten;
use jacobi_core::groupoidlab::vf_group_product;
use jacobi_core::jacobi::corpus::{standard_contact, su2};
use jacobi_core::jacobi::{poissonize, verify_jacobi, VerifyOptions};
use jacobi_core::monodromy::{decide_poisson_integrable, DeciderOptions, MaFamily};
use jacobi_core::{eval_jet2, parse};

fn expressions(c: &mut Criterion) {
    let vars = ["x", "y", "z"];
    let e = parse("exp(x*y)*sin(z) + sqrt(1 + x^2)/(2 + cos(y*z))", &vars).unwrap();
    c.bench_function("parse", |b| b.iter(|| parse(black_box("exp(x*y)*sin(z) + sqrt(1 + x^2)/(2 + cos(y*z))"), &vars)));
    c.bench_function("eval_jet2", |b| b.iter(|| eval_jet2(&e, black_box(&[0.3, -0.2, 0.9]))));
}

fn calculus(c: &mut Criterion) {
    let j = standard_contact();
    let x = [0.1, 0.2, 0.3];
    c.bench_function("schouten_lambda_lambda", |b| {
        b.iter(|| schouten(j.lambda(), j.lambda()).unwrap().eval(black_box(&x)).unwrap())
    });
    let opts = VerifyOptions { samples: 50, ..VerifyOptions::default() };
    c.bench_function("verify_jacobi_contact", |b| b.iter(|| verify_jacobi(&j, opts)));
    c.bench_function("poissonize_contact", |b| b.iter(|| poissonize(&j).unwrap()));
}

fn paths(c: &mut Criterion) {
    let s = Arc::new(cotangent_algebroid(&su2(), VerifyOptions::default()).unwrap());
    c.bench_function("apath_su2_256", |b| {
        b.iter(|| apath_from_fn(s.clone(), |t| Ok(vec![t.sin(), 0.4, -t]), &[0.3, -0.4, 0.5], 256).unwrap())
    });
    let ext = Arc::new(jacobi_algebroid(&su2(), VerifyOptions::default()).unwrap());
    let fam = HomotopyFamily::from_fn(
        s,
        32,
        32,
        |e, t| {
            let (ph, th) = (2.0 * PI * e, PI * t);
            let g = vec![th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()];
            let gt = [PI * th.cos() * ph.cos(), PI * th.cos() * ph.sin(), -PI * th.sin()];
            let a = vec![gt[1] * g[2] - gt[2] * g[1], gt[2] * g[0] - gt[0] * g[2], gt[0] * g[1] - gt[1] * g[0]];
            Ok((g, a))
        },
        FamilyOptions::default(),
    )
    .unwrap();
    let mut group = c.benchmark_group("transport");
    group.sample_size(20);
    group.bench_function("leaf_area_32x32", |b| {
        b.iter(|| leaf_area_via_transport(&fam, ext.clone(), FamilyOptions::default()).unwrap())
    });
    group.finish();
}

fn deciders(c: &mut Criterion) {
    let f = MaFamily::parse("1/(sin(r)+2)", 10.0).unwrap();
    let o = DeciderOptions { grid: 1000, check_refinement: false, ..DeciderOptions::default() };
    c.bench_function("decide_poisson_1000", |b| b.iter(|| decide_poisson_integrable(&f, o).unwrap()));
    let v = [0.5, -0.3, 0.1];
    c.bench_function("vf_group_product", |b| {
        b.iter(|| vf_group_product(&v, black_box(&[0.1, 0.2, 0.3]), black_box(&[-0.2, 0.1, 0.4])).unwrap())
    });
}

criterion_group!(benches, expressions, calculus, paths, deciders);
criterion_main!(benches);
