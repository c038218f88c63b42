//! One line per acceptance criterion; the test fails if any line is red.

use std::collections::BTreeMap;
use std::time::Instant;

use anyhow::{ensure, Context, Result};
use poisson_compact::boundary::{
    check_pseudoconvex, contact_ball, cosymplectic, dirac_interpolation, pfaffian_class, pfaffian_kernel, poisson_extension,
    BoundaryData, BoundaryModel, PfaffianData,
};
use poisson_compact::constructors::{ball_support, product, radial_map, PolyPoisson, ProductInput};
use poisson_compact::exterior::FormField;
use poisson_compact::linalg::sphere_directions;
use poisson_compact::patch::Region;
use poisson_compact::patchwork::{assemble_patchwork, simplex_ball_map, TriangulationData};
use poisson_compact::symexpr::{est_flat_order_fn, Expr, FlatProbe, Node, Poly, Tape, rational_from_f64};
use poisson_compact::taper::{CasimirBump, FlatTaper, Regime};
use poisson_compact::verify::{flat_order_along, germ_compare, jacobi_residual, support_check, GridSpec};
use poisson_compact_cli::gallery::{self, Config};
use poisson_compact_cli::seeds;

const JACOBI_TOL: f64 = 1e-8;
const JACOBI_POINTS: usize = 10_000;
const BALL_FLAT_MIN: usize = 5;
const BALL_RAYS: usize = 20;
const CLOSED_FORM_TOL: f64 = 1e-9;
const ANNULUS_POINTS: usize = 1_000;
/// Radii `1.05 < |x| < 1.5` of the unscaled construction, taken in the
/// collar variable `t = log2 |x|` so that every seed's rate sees the same band.
const ANNULUS: (f64, f64) = (1.05, 1.5);
const GERM_POINTS: usize = 200;
const PRODUCT_ENCLOSURE: f64 = 1.25;
const FACE_MISMATCH_TOL: f64 = 1e-6;
const FACE_FLAT_MIN: usize = 4;
const PATCHWORK_SAMPLES: usize = 400;
const PHI2_POINTS: usize = 200;
const PHI2_TOL: f64 = 1e-12;
const DIRAC_TOL: f64 = 1e-10;
const DIRAC_FROM: f64 = 1.0 - 1e-2;
const SCALAR_FLAT_MIN: usize = 6;
const COLLAR_SAMPLES: usize = 20_000;
const EXTENSION_BOUNDARY_SAMPLES: usize = 40;
const EXTENSION_GERM_TOL: f64 = 1e-10;
const SEED: u64 = 2024;

fn single() -> FlatTaper {
    FlatTaper::new(Regime::Single, 0.1).unwrap()
}

fn double() -> FlatTaper {
    FlatTaper::new(Regime::Double, 0.1).unwrap()
}

fn bump() -> CasimirBump {
    CasimirBump::new(1.0, 2.0).unwrap()
}

fn ball_seeds() -> Vec<(&'static str, PolyPoisson)> {
    vec![
        ("symplectic-r2", seeds::symplectic_r2()),
        ("rank2-r4", seeds::rank2_r4()),
        ("so3", seeds::so3()),
        ("heisenberg", seeds::heisenberg()),
        ("affine+constant", seeds::affine_plus_constant()),
        ("quadratic", seeds::quadratic_r3()),
    ]
}

fn ball_soundness() -> Result<String> {
    let mut worst_jacobi: f64 = 0.0;
    let mut min_flat = usize::MAX;
    for (name, seed) in ball_seeds() {
        let n = seed.dim();
        let out = ball_support(&seed, &single(), &bump())?;
        let pi = &out.bivector;
        let inner = GridSpec::random(Region::Ball { radius: 0.5 }, GERM_POINTS, SEED).points(n);
        let germ = germ_compare(pi, &seed.bivector, &Region::Ball { radius: 0.5 }, 0, &inner);
        ensure!(germ.pass && germ.detail.starts_with("symbolic"), "{name}: {germ}");
        let grid = GridSpec::random(Region::Ball { radius: 1.2 }, JACOBI_POINTS, SEED).points(n);
        let support = support_check(pi, &Region::Ball { radius: 1.0 }, &grid);
        ensure!(support.pass, "{name}: {support}");
        let jac = jacobi_residual(pi, &grid);
        ensure!(jac.worst_residual <= JACOBI_TOL, "{name}: {jac}");
        worst_jacobi = worst_jacobi.max(jac.worst_residual);
        let origin = vec![0.0; n];
        for dir in sphere_directions(n, BALL_RAYS) {
            let dir: Vec<f64> = dir.iter().copied().collect();
            for (idx, e) in pi.entries() {
                let o = flat_order_along(e, &origin, &dir, 1.0, &FlatProbe::default()).order;
                ensure!(o >= BALL_FLAT_MIN, "{name}: component {idx:?} has flat order {o} along {dir:?}");
                min_flat = min_flat.min(o);
            }
        }
    }
    Ok(format!("6 seeds, jacobi {worst_jacobi:.1e}, flat order >= {min_flat}"))
}

fn closed_form_vs_pullback() -> Result<String> {
    let mut worst: f64 = 0.0;
    for (name, seed) in ball_seeds() {
        let n = seed.dim();
        let out = ball_support(&seed, &single(), &bump())?;
        let psi = radial_map(n, &single(), out.rate);
        let tape = out.bivector.compile();
        let radius = |r: f64| 0.5 * (out.rate * r.log2()).exp();
        let region = Region::Annulus { inner: radius(ANNULUS.0), outer: radius(ANNULUS.1) };
        for x in GridSpec::random(region, ANNULUS_POINTS, SEED).points(n) {
            let generic = psi.pullback_bivector_at(&seed.bivector, &x)?;
            let err = (generic - tape.matrix(&x)).abs().max();
            ensure!(err <= CLOSED_FORM_TOL, "{name}: {err:.2e} at {x:?}");
            worst = worst.max(err);
        }
    }
    Ok(format!("worst gap {worst:.1e} over {} points", 6 * ANNULUS_POINTS))
}

fn product_r2_r3() -> Result<String> {
    let factor = |p: &PolyPoisson| -> Result<ProductInput> {
        let out = ball_support(p, &single(), &bump())?;
        Ok(ProductInput {
            bivector: out.bivector,
            support: out.support,
            enclosure: Region::Ball { radius: PRODUCT_ENCLOSURE },
        })
    };
    let (a, b) = (factor(&seeds::symplectic_r2())?, factor(&seeds::so3())?);
    let big = product(&a, &b)?;
    let ys: Vec<Expr> = (2..5).map(Expr::var).collect();
    let direct_sum = a
        .bivector
        .reindex(5, &[0, 1])
        .add(&b.bivector.substitute(&ys).reindex(5, &[2, 3, 4]))?;

    let xs = GridSpec::random(Region::Ball { radius: 1.0 }, GERM_POINTS, SEED).points(2);
    let yv = GridSpec::random(Region::Ball { radius: 1.0 }, GERM_POINTS, SEED + 1).points(3);
    let inside: Vec<Vec<f64>> = xs.iter().zip(&yv).map(|(x, y)| [x.as_slice(), y.as_slice()].concat()).collect();
    let all = Region::Box { bounds: vec![(-2.0, 2.0); 5] };
    let germ = germ_compare(&big, &direct_sum, &all, 0, &inside);
    ensure!(germ.pass && germ.detail.starts_with("symbolic"), "branch-level sum: {germ}");

    let r2 = |p: &[f64]| p.iter().map(|v| v * v).sum::<f64>();
    let wide = GridSpec::random(Region::Box { bounds: vec![(-1.5, 1.5); 5] }, JACOBI_POINTS, SEED).points(5);
    let limit = PRODUCT_ENCLOSURE * PRODUCT_ENCLOSURE;
    let mut outside = 0;
    for p in wide.iter().filter(|p| r2(&p[..2]) >= limit || r2(&p[2..]) >= limit) {
        outside += 1;
        ensure!(big.is_structural_zero_at(p), "nonzero branch at {p:?}");
    }
    let jac = jacobi_residual(&big, &wide);
    ensure!(jac.worst_residual <= JACOBI_TOL, "{jac}");
    Ok(format!("symbolic sum on {} points, {outside} outside zeros, jacobi {:.1e}", inside.len(), jac.worst_residual))
}

fn unit(n: usize) -> Poly {
    Poly::constant(n, rational_from_f64(1.0))
}

/// `(num, den)` of a rational expression, with `√a · √a = a` applied to squares.
fn rational(e: &Expr, n: usize) -> Option<(Poly, Poly)> {
    if let Some(p) = Poly::from_expr(e, n) {
        return Some((p, unit(n)));
    }
    match e.node() {
        Node::Mul(fs) => fs.iter().try_fold((unit(n), unit(n)), |(a, b), f| {
            let (c, d) = rational(f, n)?;
            Some((a.mul(&c), b.mul(&d)))
        }),
        Node::Pow(a, k) => {
            let (c, d) = rational(a, n)?;
            let k32 = k.unsigned_abs();
            Some(if *k >= 0 { (c.pow(k32), d.pow(k32)) } else { (d.pow(k32), c.pow(k32)) })
        }
        Node::Div(a, b) => {
            let ((p, q), (r, s)) = (rational(a, n)?, rational(b, n)?);
            Some((p.mul(&s), q.mul(&r)))
        }
        _ => None,
    }
}

/// Square of an expression whose only irrational factors are square roots.
fn squared(e: &Expr, n: usize) -> Option<(Poly, Poly)> {
    match e.node() {
        Node::Sqrt(a) => rational(a, n),
        Node::Mul(fs) => fs.iter().try_fold((unit(n), unit(n)), |(a, b), f| {
            let (c, d) = squared(f, n)?;
            Some((a.mul(&c), b.mul(&d)))
        }),
        _ => rational(e, n).map(|(p, q)| (p.pow(2), q.pow(2))),
    }
}

/// `φ₂(x, y) = (2√((1+y)/(1-y)) x, y)`, compared through its square and sign.
fn phi2_matches() -> Result<()> {
    let phi = simplex_ball_map(2);
    let (x, y) = (Expr::var(0), Expr::var(1));
    let one = Expr::one();
    let printed = Expr::int(2) * ((&one + &y) * (&one - &y).powi(-1)).sqrt() * &x;
    ensure!(phi.comps[1].structurally_eq(&y), "second component is {}", phi.comps[1]);
    let (p, q) = squared(&phi.comps[0], 2).context("first component is not a product of roots")?;
    let (r, s) = squared(&printed, 2).context("printed formula")?;
    ensure!(p.mul(&s) == r.mul(&q), "squares differ");
    let tape = Tape::compile(&[phi.comps[0].clone(), printed]);
    for p in GridSpec::random(Region::Simplex, PHI2_POINTS, SEED).points(2) {
        let v = tape.eval(&p);
        ensure!((v[0] - v[1]).abs() <= PHI2_TOL * (1.0 + v[1].abs()), "sign or value differs at {p:?}");
    }
    Ok(())
}

fn patchwork_square() -> Result<String> {
    let tri = TriangulationData::square([1, 0]);
    let (pw, report) = assemble_patchwork(&tri, &single(), &bump(), PATCHWORK_SAMPLES, SEED)?;
    let only = |h: &BTreeMap<usize, usize>, r: usize| h.keys().eq([r].iter());
    ensure!(only(&report.simplices[0].rank_histogram, 2), "triangle 1: {:?}", report.simplices[0].rank_histogram);
    ensure!(only(&report.simplices[1].rank_histogram, 0), "triangle 2: {:?}", report.simplices[1].rank_histogram);
    for s in 0..=100 {
        let u = s as f64 / 100.0;
        ensure!(pw.rank_at(&[u, u])? == 0, "rank on the diagonal at {u}");
    }
    let face = &report.faces[0];
    ensure!(
        face.continuity_worst <= FACE_MISMATCH_TOL && face.min_flat_order >= FACE_FLAT_MIN,
        "face mismatch {:.2e}, flat order {}",
        face.continuity_worst,
        face.min_flat_order
    );
    phi2_matches()?;
    Ok(format!(
        "ranks {{2}} / {{0}}, diagonal 0, mismatch {:.1e}, flat order {}, phi2 exact",
        face.continuity_worst, face.min_flat_order
    ))
}

/// `dx7 + Σ_{i<k} x_{2i+1} dx_{2i+2}` on `R^7`.
fn darboux(k: usize) -> FormField {
    let mut g = FormField::basis(7, &[6]);
    for i in 0..k {
        g.set(&[2 * i + 1], Expr::var(2 * i));
    }
    g
}

fn pfaffian() -> Result<String> {
    let pts = GridSpec::random(Region::Ball { radius: 1.0 }, 20, SEED).points(7);
    for k in 0..=3 {
        let (class, regular, _) = pfaffian_class(&darboux(k), &pts)?;
        ensure!(class == k && regular, "k = {k}: got {class}, regular {regular}");
        let pd = PfaffianData::new(darboux(k), &pts)?;
        let frame = pfaffian_kernel(&pd, &pts)?;
        ensure!(frame.rank == 7 - 2 * k - 1, "k = {k}: kernel rank {}", frame.rank);
    }
    let mut bad = FormField::basis(3, &[2]);
    bad.set(&[1], Expr::var(0).powi(2));
    let pts = vec![vec![0.5, 0.3, 0.1], vec![0.0, 0.3, 0.1], vec![-0.4, 0.2, 0.0]];
    let (_, regular, witnesses) = pfaffian_class(&bad, &pts)?;
    ensure!(!regular && witnesses.iter().any(|w| w[0] == 0.0), "non-regular form passed: {witnesses:?}");
    Ok(format!("k = 0..3 exact, kernels 6/4/2/0, witness {:?}", witnesses[0]))
}

fn contact_r3() -> FormField {
    let mut g = FormField::basis(3, &[2]);
    g.set(&[0], -Expr::var(1));
    g
}

fn dirac() -> Result<String> {
    let mut worst: f64 = 0.0;
    for (name, gamma, k) in [("contact", contact_r3(), 1), ("closed", FormField::basis(3, &[0]), 0)] {
        let pts = GridSpec::random(Region::Ball { radius: 1.0 }, 10, SEED).points(3);
        let pd = PfaffianData::new(gamma, &pts)?;
        ensure!(pd.k == k, "{name}: class {}", pd.k);
        let di = dirac_interpolation(&pd, &double())?;
        for (i, p) in pts.iter().enumerate() {
            for s in 0..=20 {
                let t = DIRAC_FROM + (2.0 - DIRAC_FROM) * s as f64 / 20.0;
                let q = [p.as_slice(), &[t]].concat();
                let (a, b) = (di.normalized.eval_parts(&q), di.limit.eval_parts(&q));
                for (x, y) in a.iter().flatten().zip(b.iter().flatten()) {
                    let gap = (x - y).abs();
                    ensure!(gap <= DIRAC_TOL, "{name}: gap {gap:.2e} at sample {i}, t = {t}");
                    worst = worst.max(gap);
                }
            }
        }
        let scalar = Tape::compile(&[double().inv_fp_f_pow(&Expr::var(0), k as i32)]);
        let order = est_flat_order_fn(&|t: f64| scalar.eval(&[t])[0], 1.0, &FlatProbe::default()).order;
        ensure!(order >= SCALAR_FLAT_MIN, "{name}: flat order {order}");
    }
    Ok(format!("normalized vs limit {worst:.1e} for t >= {DIRAC_FROM}, scalar flat order >= {SCALAR_FLAT_MIN}"))
}

fn extension_model(model: &BoundaryModel, leaf_rank: usize) -> Result<String> {
    let boundary = model.samples(EXTENSION_BOUNDARY_SAMPLES, SEED);
    let ext = poisson_extension(&model.data, &double(), &bump(), &boundary)?;
    let cert = &ext.certificate;
    let failing: Vec<String> = cert.checks.iter().filter(|c| !c.pass).map(|c| c.to_string()).collect();
    ensure!(cert.pass, "{}: {}", model.name, failing.join("; "));
    ensure!(cert.leaf_rank == leaf_rank, "{}: leaf rank {}", model.name, cert.leaf_rank);
    let germ = cert.checks.iter().find(|c| c.check == "germ").context("germ check")?;
    ensure!(germ.worst_residual <= EXTENSION_GERM_TOL, "{}: {germ}", model.name);
    let collar: Vec<Vec<f64>> = model
        .samples(COLLAR_SAMPLES, SEED + 1)
        .into_iter()
        .enumerate()
        .map(|(i, mut p)| {
            p.push(-0.1 + 2.6 * (i as f64 + 0.5) / COLLAR_SAMPLES as f64);
            p
        })
        .collect();
    let jac = jacobi_residual(&ext.bivector, &collar);
    ensure!(jac.worst_residual <= JACOBI_TOL, "{}: {jac}", model.name);
    Ok(format!("{} leaf rank {leaf_rank}, jacobi {:.1e}, germ {:.1e}", model.name, jac.worst_residual, germ.worst_residual))
}

fn extension() -> Result<String> {
    let a = extension_model(&contact_ball(), 0)?;
    let b = extension_model(&cosymplectic(), 2)?;
    Ok(format!("{a}; {b}"))
}

fn negative_controls() -> Result<String> {
    let r = jacobi_residual(&seeds::non_poisson_r3(), &[]);
    ensure!(!r.pass && r.witness.as_deref() == Some(&[1.0, 1.0, 1.0][..]), "non-Poisson: {r}");
    ensure!(FlatTaper::new(Regime::Single, 0.5).is_err(), "delta = 0.5 accepted");
    let mut gamma = FormField::basis(3, &[2]);
    gamma.set(&[1], Expr::var(0).powi(2));
    let bd = BoundaryData::new(FormField::basis(3, &[0, 1]), gamma, None)?;
    let pts = vec![vec![0.0, 0.3, 0.1], vec![0.5, 0.2, 0.0]];
    let c = check_pseudoconvex(&bd, &pts)?;
    ensure!(!c.pass() && c.witness.is_some(), "pseudoconvexity passed: {c}");
    Ok(format!("jacobi witness {:?}, delta 0.5 rejected, convexity witness {:?}", r.witness.unwrap(), c.witness.unwrap()))
}

fn determinism() -> Result<String> {
    let cfg = Config { grid: 1000, seed: SEED, ..Config::default() };
    let first = serde_json::to_vec(&gallery::run(&cfg)?)?;
    let reports = gallery::run(&cfg)?;
    let second = serde_json::to_vec(&reports)?;
    ensure!(first == second, "gallery reports differ");
    let failing: Vec<&str> = reports.iter().filter(|r| !r.pass).map(|r| r.name.as_str()).collect();
    ensure!(failing.is_empty(), "failing entries {failing:?}");
    Ok(format!("{} entries, {} bytes identical", reports.len(), first.len()))
}

type Criterion = (&'static str, fn() -> Result<String>);

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("ball-support soundness", ball_soundness),
        ("closed form vs pullback", closed_form_vs_pullback),
        ("product R2 x R3", product_r2_r3),
        ("patchwork square (1,0)", patchwork_square),
        ("pfaffian classifier", pfaffian),
        ("dirac interpolation", dirac),
        ("extension pipeline", extension),
        ("negative controls", negative_controls),
        ("determinism", determinism),
    ];
    let mut red = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (mark, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(e) => {
                red.push(i + 1);
                ("FAIL", format!("{e:#}"))
            }
        };
        println!("[{mark}] {}. {name} ({:.1?}): {detail}", i + 1, start.elapsed());
    }
    assert!(red.is_empty(), "criteria {red:?} failed");
}
