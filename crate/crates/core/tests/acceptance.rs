//! Acceptance run in exact arithmetic: one line per criterion, nonzero exit
//! status when any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::{One, Signed, Zero};
use planecal::calibrate::{lhs_signed, lhs_sum};
use planecal::io;
use planecal::kdim::{mu_signed, revalidate, revalidation_seed, MuSearchStatus};
use planecal::polytope::{mixed_area, polar_polygon};
use planecal::sampling::DEFAULT_RANGE;
use planecal::surfaces::{alpha_area, tent_competitor};
use planecal::*;
use serde_json::{json, Value};

type Q = Rational;

fn q(n: i64, d: i64) -> Q {
    Q::from_ratio(n, d)
}

struct Outcome {
    passed: bool,
    detail: String,
    report: Value,
}

impl Outcome {
    fn from_failures(what: &str, runs: usize, failures: &[usize], report: Value) -> Self {
        Outcome {
            passed: failures.is_empty(),
            detail: format!(
                "{what}: {runs} runs, {} failures{}",
                failures.len(),
                if failures.is_empty() { String::new() } else { format!(" (first: {:?})", &failures[..failures.len().min(5)]) }
            ),
            report,
        }
    }

    fn rendered(&self) -> String {
        io::render(&self.report)
    }
}

/// A point of `K*`: a vertex `±f_k`, or a shrunk point on a chord between two vertices.
fn polar_point(k: &QSymPolygon, s: &mut Sampler) -> Vec2<Q> {
    let vertices: Vec<Vec2<Q>> = k.supports().iter().flat_map(|f| [f.clone(), f.neg()]).collect();
    let a = vertices[s.index(vertices.len())].clone();
    if s.coin() {
        return a;
    }
    let b = vertices[s.index(vertices.len())].clone();
    let t = q(s.int(0, 12), 12);
    let shrink = q(s.int(1, 12), 12);
    a.scale(&t).add(&b.scale(&(Q::one() - t))).scale(&shrink)
}

fn weights_two_positive(s: &mut Sampler, n: usize) -> Vec<Q> {
    loop {
        let p: Vec<Q> = s.weights_with_zeros(n);
        if p.iter().filter(|w| w.is_positive()).count() >= 2 {
            return p;
        }
    }
}

fn criterion1(seed: u64, count: usize) -> Outcome {
    let mut s = Sampler::new(seed);
    let mut failures = Vec::new();
    let mut reports = Vec::new();
    for idx in 0..count {
        let k: QSymPolygon = s.sym_polygon(8, 10);
        let l1 = lemma1_check(&k);
        let l2 = lemma2_check(&k);
        let exact = k.n() <= 8
            && l1.area == l1.sum_of_abs
            && l1.area == l1.abs_of_sum
            && l2.pairs.iter().all(|(_, _, a, b)| a == b)
            && l2.sum == l2.bound;
        if !exact {
            failures.push(idx);
        }
        reports.push(json!({"lemma1": io::lemma1_report(&l1), "lemma2": io::lemma2_report(&l2)}));
    }
    Outcome::from_failures("area and per-pair identities", count, &failures, json!(reports))
}

fn criterion2(seed: u64, count: usize) -> Outcome {
    let mut s = Sampler::new(seed);
    let mut failures = Vec::new();
    let mut reports = Vec::new();
    let mut equality_cases = 0;
    for idx in 0..count {
        let k: QSymPolygon = s.sym_polygon(8, 10);
        let own = idx % 4 == 0;
        let p: Vec<Q> = match idx % 4 {
            0 => k.weights(),
            1 => s.weights(k.n()),
            _ => weights_two_positive(&mut s, k.n()),
        };
        let Ok(c) = lemma3_certificate(&k, &p) else {
            failures.push(idx);
            reports.push(Value::Null);
            continue;
        };
        let a = c.area_k.clone();
        let bound = Q::one() / k.area().clone();
        let mut ok = c.mixed == a
            && mixed_area(&c.polygon, &c.k_prime) == a
            && c.lhs.clone() * a.clone() * a.clone() == c.area_k_prime
            && c.k_prime.area() == &c.area_k_prime
            && !c.gap.is_negative()
            && c.lhs == lhs_sum(&k.supports(), &p)
            && c.lhs <= bound;
        if own {
            equality_cases += 1;
            ok &= c.lhs == bound;
        }
        if !ok {
            failures.push(idx);
        }
        reports.push(io::lemma3_report(&c));
    }
    let mut out = Outcome::from_failures("mixed-area certificates", count, &failures, json!(reports));
    out.detail += &format!(", {equality_cases} with p = q");
    out
}

fn criterion3(seed: u64, count: usize, polar_count: usize) -> Outcome {
    let mut s = Sampler::new(seed);
    let mut failures = Vec::new();
    let mut reports = Vec::new();
    for idx in 0..count {
        let k: QSymPolygon = s.sym_polygon(8, 10);
        let m = s.int(1, k.n() as i64 + 2) as usize;
        let f: Vec<Vec2<Q>> = (0..m).map(|_| polar_point(&k, &mut s)).collect();
        let p: Vec<Q> = s.weights_with_zeros(m);
        let bound = Q::one() / k.area().clone();
        let Ok(r) = check_main_prop(&k, &f, &p) else {
            failures.push(idx);
            reports.push(Value::Null);
            continue;
        };
        let mut ok = r.lhs_abs <= r.lhs_sum && r.lhs_sum <= bound && r.lhs_abs == lhs_signed(&f, &p).abs();
        let Ok((rf, rw)) = reduce_functionals(&f, &p) else {
            failures.push(idx);
            reports.push(Value::Null);
            continue;
        };
        ok &= lhs_sum(&rf, &rw) == r.lhs_sum;
        let mut polar = Value::Null;
        if idx < polar_count {
            let i = s.index(m);
            match maximize_over_polar(&k, &f, &p, i) {
                Ok(best) => {
                    // interior points of K* never beat the vertex maximum
                    let mut g = f.clone();
                    let interior_ok = (0..20).all(|_| {
                        g[i] = polar_point(&k, &mut s);
                        lhs_sum(&g, &p) <= best.value
                    });
                    ok &= interior_ok && r.lhs_sum <= best.value && best.value <= bound;
                    polar = json!({"free_index": i, "vertex": io::vec2(&best.vertex), "value": io::s(&best.value)});
                }
                Err(_) => ok = false,
            }
        }
        if !ok {
            failures.push(idx);
        }
        reports.push(json!({"main_prop": io::main_prop_report(&r), "reduced_pairs": rf.len(), "polar": polar}));
    }
    let mut out = Outcome::from_failures("main inequality, reduction, polar maximality", count, &failures, json!(reports));
    out.detail += &format!(", polar check on {}", polar_count.min(count));
    out
}

struct NormInstance {
    ball: QSymPolytope,
    plane: QPlaneBasis,
}

/// Random norms alternating between R^3 and R^4, with at most 12 facet pairs.
fn norm_instances(seed: u64, count: usize, max_pairs: i64) -> Vec<NormInstance> {
    let mut s = Sampler::new(seed);
    (0..count)
        .map(|i| {
            let dim = if i % 2 == 0 { 3 } else { 4 };
            let pairs = s.int(dim as i64, max_pairs) as usize;
            let ball = s.sym_polytope(dim, pairs, 5);
            let plane = s.plane(dim, 3);
            NormInstance { ball, plane }
        })
        .collect()
}

fn criterion4(instances: &[NormInstance], samples: usize, seed: u64) -> Outcome {
    let mut failures = Vec::new();
    let mut reports = Vec::new();
    for (idx, inst) in instances.iter().enumerate() {
        let result = build_calibrator(&inst.ball, &inst.plane).and_then(|c| {
            let r = verify_calibrator(&c, samples, seed.wrapping_add(idx as u64))?;
            Ok((c, r))
        });
        match result {
            Ok((c, r)) => {
                let ok = r.equality_residual.is_zero() && r.max_violation.as_ref().is_some_and(|v| !v.is_positive());
                if !ok {
                    failures.push(idx);
                }
                reports.push(json!({
                    "norm": io::polytope_to_json(&inst.ball),
                    "calibrator": io::calibrator_report(&c, &r),
                }));
            }
            Err(_) => {
                failures.push(idx);
                reports.push(Value::Null);
            }
        }
    }
    let mut out = Outcome::from_failures("calibrators on random norms", instances.len(), &failures, json!(reports));
    out.detail += &format!(", {samples} samples each");
    out
}

fn criterion5() -> Outcome {
    let mut checks: Vec<(&str, bool)> = Vec::new();
    let v = |c: &[i64]| Vector::<Q>::from_i64(c);
    let sv = |a: &[i64], b: &[i64]| SimpleTwoVector::new(v(a), v(b)).unwrap();
    let sq2 = QSymPolytope::linf(2).unwrap();
    let sq3 = QSymPolytope::linf(3).unwrap();
    let p12_2 = QPlaneBasis::coordinate(2, 0, 1).unwrap();
    let p12_3 = QPlaneBasis::coordinate(3, 0, 1).unwrap();
    let k = section(&sq3, &p12_3).unwrap();

    let mut verts: Vec<(Q, Q)> = k.vertices().iter().map(|p| (p.x.clone(), p.y.clone())).collect();
    verts.sort();
    let one = Q::one();
    let expected = vec![(-one.clone(), -one.clone()), (-one.clone(), one.clone()), (one.clone(), -one.clone()), (one.clone(), one.clone())];
    checks.push(("section is the square (±1, ±1)", k.n() == 2 && verts == expected));
    checks.push(("weights (1/2, 1/2)", k.weights() == vec![q(1, 2), q(1, 2)]));
    checks.push(("area 4", k.area() == &q(4, 1)));
    checks.push(("self mixed area 4", mixed_area(&k, &k) == q(4, 1)));
    let polar = polar_polygon(&k).unwrap();
    checks.push(("polar is the diamond of area 2", polar.area() == &q(2, 1)));

    let bh2 = BhDensity::new(sq2.clone());
    checks.push(("bh(e1∧e2) = pi/4", bh2.eval(&sv(&[1, 0], &[0, 1])).unwrap().0 == q(1, 4)));
    checks.push(("bh(e1∧(e1+e2)) = pi/4", bh2.eval(&sv(&[1, 0], &[1, 1])).unwrap().0 == q(1, 4)));
    checks.push(("ht(e1∧e2) = 2/pi", HtDensity::new(sq2.clone()).eval(&sv(&[1, 0], &[0, 1])).unwrap().0 == q(2, 1)));
    let alpha = AlphaDensity::from_section(&k).unwrap();
    checks.push(("alpha(e1∧e2) = pi/4", alpha.eval(&sv(&[1, 0, 0], &[0, 1, 0])).unwrap().0 == q(1, 4)));

    let c2 = build_calibrator(&sq2, &p12_2).unwrap();
    checks.push(("omega = (pi/4) dx∧dy in R^2", c2.omega().coeff(0, 1) == q(1, 4) && c2.omega().entries().count() <= 1));
    let c3 = build_calibrator(&sq3, &p12_3).unwrap();
    let only_xy = c3.omega().entries().all(|(&(i, j), c)| (i, j) == (0, 1) || c.is_zero());
    checks.push(("omega = (pi/4) dx∧dy in R^3", c3.omega().coeff(0, 1) == q(1, 4) && only_xy));
    checks.push(("omega(e1∧e3) = 0", c3.eval(&sv(&[1, 0, 0], &[0, 0, 1])).unwrap().0.is_zero()));
    let r = verify_calibrator(&c3, 10_000, 7).unwrap();
    checks.push(("10^4 samples: max violation <= 0, residual 0", r.equality_residual.is_zero() && r.max_violation.as_ref().is_some_and(|v| !v.is_positive())));

    let l1 = lemma1_check(&k);
    checks.push(("area = |v1∧v2| = 4", l1.sum_of_abs == q(4, 1) && l1.abs_of_sum == q(4, 1)));
    let l2 = lemma2_check(&k);
    checks.push(("p1 p2 |f1∧f2| = 1/4 = |v1∧v2|/16", l2.pairs.len() == 1 && l2.pairs[0].2 == q(1, 4) && l2.pairs[0].3 == q(1, 4)));
    let c = lemma3_certificate(&k, &[q(3, 4), q(1, 4)]).unwrap();
    checks.push(("p = (3/4, 1/4): lambda (3/2, 1/2), A(K') = 3, lhs 3/16", c.lambda == vec![q(3, 2), q(1, 2)] && c.area_k_prime == q(3, 1) && c.mixed == q(4, 1) && c.lhs == q(3, 16)));

    let dx = Vec2::new(one.clone(), Q::zero());
    let best = maximize_over_polar(&k, &[dx.clone(), dx], &[q(1, 2), q(1, 2)], 1).unwrap();
    checks.push(("polar maximum at ±dy", best.vertex.x.is_zero() && best.vertex.y.abs() == one && best.value == q(1, 4)));

    let mut s = Sampler::new(11);
    let samples: Vec<SimpleTwoVector<Q>> = (0..200).map(|_| s.two_vector(3, DEFAULT_RANGE)).collect();
    let lp = lp_calibrator_search(&BhDensity::new(sq3.clone()), &p12_3, &samples).unwrap();
    checks.push(("LP feasible, explicit omega fits", lp.outcome.is_feasible() && lp.check_form(c3.omega())));

    let mu = MuCoefficients::planar_products(&sq2).unwrap();
    checks.push(("mu_12 = 1/4", mu.get(&[0, 1]) == q(1, 4)));
    let ms = mu_search(&sq2, 50, 3, 200).unwrap();
    checks.push(("k = 2 search on the square is feasible", matches!(ms.status, MuSearchStatus::SampleFeasible { .. })));

    let unit = TriMesh::new(
        vec![v(&[0, 0, 0]), v(&[1, 0, 0]), v(&[1, 1, 0]), v(&[0, 1, 0])],
        vec![Triangle { indices: [0, 1, 2], coefficient: 1 }, Triangle { indices: [0, 2, 3], coefficient: 1 }],
        Ring::Z,
    )
    .unwrap();
    let bh3 = BhDensity::new(sq3.clone());
    checks.push(("unit square disc: bh area pi/4 = alpha area", bh_area(&unit, &bh3).unwrap().0 == q(1, 4) && alpha_area(&unit, &alpha).unwrap().0 == q(1, 4)));
    let disc = PlanarDisc::new(p12_3.clone(), vec![Vec2::new(q(0, 1), q(0, 1)), Vec2::new(q(1, 1), q(0, 1)), Vec2::new(q(1, 1), q(1, 1)), Vec2::new(q(0, 1), q(1, 1))]).unwrap();
    let tent = tent_competitor(&disc, &v(&[0, 0, 1]), &one, Ring::Z).unwrap();
    let gap = bh_area(&tent, &bh3).unwrap().0 - bh_area(disc.mesh(), &bh3).unwrap().0;
    checks.push(("tent of height 1 has positive gap", gap.is_positive()));

    let failed: Vec<&str> = checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    let report = json!(checks.iter().map(|(n, ok)| json!({"check": n, "ok": ok})).collect::<Vec<_>>());
    Outcome {
        passed: failed.is_empty(),
        detail: if failed.is_empty() {
            format!("square example: {} checks", checks.len())
        } else {
            format!("square example: failed {failed:?}")
        },
        report,
    }
}

fn criterion6(seed: u64, configs: usize, trials: usize) -> Outcome {
    let mut failures = Vec::new();
    let mut reports = Vec::new();
    let mut competitors = 0;
    let mut min_gap: Option<Q> = None;
    for (r_idx, ring) in [Ring::Z, Ring::Z2].into_iter().enumerate() {
        let mut s = Sampler::new(seed + r_idx as u64);
        for c in 0..configs {
            let dim = if c % 2 == 0 { 3 } else { 4 };
            let pairs = s.int(dim as i64, 8) as usize;
            let ball: QSymPolytope = s.sym_polytope(dim, pairs, 5);
            let plane: QPlaneBasis = s.plane(dim, 3);
            let disc = PlanarDisc::random(plane, &mut s);
            let trial_seed = s.int(0, i64::MAX) as u64;
            let idx = r_idx * configs + c;
            match semi_ellipticity_experiment(&ball, &disc, &Generator::Mixed, ring, trials, trial_seed) {
                Ok(r) => {
                    competitors += r.records.len();
                    let gap_ok = r.min_gap.as_ref().is_some_and(|g| !g.is_negative());
                    let alpha_ok = r.records.iter().all(|t| t.alpha_area <= t.bh_area);
                    let disc_ok = r.disc_alpha_area == r.disc_bh_area;
                    if let Some(g) = &r.min_gap {
                        if min_gap.as_ref().map_or(true, |m| g < m) {
                            min_gap = Some(g.clone());
                        }
                    }
                    if !(gap_ok && alpha_ok && disc_ok && r.passed()) {
                        failures.push(idx);
                    }
                    reports.push(io::experiment_report(&r));
                }
                Err(_) => {
                    failures.push(idx);
                    reports.push(Value::Null);
                }
            }
        }
    }
    let mut out = Outcome::from_failures("semi-ellipticity experiments", 2 * configs, &failures, json!(reports));
    out.detail += &format!(
        ", {competitors} competitors over rings Z and Z2, min gap {}",
        min_gap.map_or("none".to_string(), |g| io::pi(&g))
    );
    out
}

fn criterion7(instances: &[NormInstance], samples: usize, seed: u64) -> Outcome {
    let mut failures = Vec::new();
    let mut reports = Vec::new();
    for (idx, inst) in instances.iter().enumerate() {
        let mut s = Sampler::new(seed.wrapping_add(idx as u64));
        let sigma: Vec<SimpleTwoVector<Q>> = (0..samples).map(|_| s.two_vector(inst.ball.dim(), DEFAULT_RANGE)).collect();
        let result = build_calibrator(&inst.ball, &inst.plane)
            .and_then(|c| Ok((c, lp_calibrator_search(&BhDensity::new(inst.ball.clone()), &inst.plane, &sigma)?)));
        match result {
            Ok((c, lp)) => {
                let own = lp.form().is_some_and(|w| lp.check_form(&w));
                if !(lp.outcome.is_feasible() && own && lp.check_form(c.omega())) {
                    failures.push(idx);
                }
                reports.push(io::lp_report(&lp));
            }
            Err(_) => {
                failures.push(idx);
                reports.push(Value::Null);
            }
        }
    }
    let mut out = Outcome::from_failures("LP cross-validation", instances.len(), &failures, json!(reports));
    out.detail += &format!(", {samples} sampled constraints each");
    out
}

fn criterion8(seed: u64, polygons: usize, revalidations: usize, search_samples: usize, search_revalidations: usize) -> Outcome {
    let mut s = Sampler::new(seed);
    let mut failures = Vec::new();
    let mut reports = Vec::new();
    for idx in 0..polygons {
        let pairs = s.int(2, 6) as usize;
        let ball: QSymPolytope = s.sym_polytope(2, pairs, 5).irredundant();
        let result = MuCoefficients::planar_products(&ball).and_then(|mu| {
            let vol = volume_k(&ball.to_constraints())?;
            let equality = mu_signed(&mu, ball.facets())? == Q::one() / vol;
            let violations = revalidate(&mu, &ball, revalidations, revalidation_seed(seed.wrapping_add(idx as u64)))?;
            Ok((mu, equality, violations))
        });
        match result {
            Ok((mu, equality, violations)) => {
                if !equality || violations != 0 {
                    failures.push(idx);
                }
                reports.push(json!({"mu": io::mu_to_json(&mu), "equality": equality, "violations": violations}));
            }
            Err(_) => {
                failures.push(idx);
                reports.push(Value::Null);
            }
        }
    }
    let mut out = Outcome::from_failures("k = 2 products", polygons, &failures, Value::Null);
    out.detail += &format!(", {revalidations} instances each");
    let mut searches = Vec::new();
    for (name, ball) in [("cube", QSymPolytope::linf(3).unwrap()), ("octahedron", QSymPolytope::l1(3).unwrap())] {
        match mu_search(&ball, search_samples, seed, search_revalidations) {
            Ok(r) => {
                let status = match &r.status {
                    MuSearchStatus::SampleFeasible { .. } => format!(
                        "sample-feasible, {}/{} fresh violations",
                        r.revalidation_violations, r.revalidation_samples
                    ),
                    MuSearchStatus::SampleInfeasible { .. } => "sampled infeasibility certificate".to_string(),
                };
                out.detail += &format!("; {name}: {status}");
                searches.push(json!({"name": name, "search": io::mu_search_report(&r)}));
            }
            Err(e) => {
                out.passed = false;
                out.detail += &format!("; {name}: no report ({e})");
            }
        }
    }
    out.report = json!({"products": reports, "searches": searches});
    out
}

const SEED: u64 = 0x5eed;

fn main() -> ExitCode {
    let mut all_passed = true;
    let mut line = |n: usize, out: &Outcome, elapsed: Duration, budget: Option<Duration>| {
        let in_time = budget.map_or(true, |b| elapsed <= b);
        let passed = out.passed && in_time;
        all_passed &= passed;
        let budget = budget.map_or(String::new(), |b| format!(" / {} s", b.as_secs()));
        println!(
            "criterion {n}: {} {} [{:.1} s{budget}]{}",
            if passed { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            if in_time { "" } else { " over budget" }
        );
    };
    let timed = |f: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let out = f();
        (out, start.elapsed())
    };
    let secs = |s: u64| Some(Duration::from_secs(s));

    let (o1, t) = timed(&|| criterion1(SEED + 1, 1000));
    line(1, &o1, t, secs(30));
    let (o2, t) = timed(&|| criterion2(SEED + 2, 1000));
    line(2, &o2, t, secs(60));
    let (o3, t) = timed(&|| criterion3(SEED + 3, 500, 100));
    line(3, &o3, t, secs(60));
    let instances = norm_instances(SEED + 4, 50, 12);
    let (o4, t) = timed(&|| criterion4(&instances, 10_000, SEED + 40));
    line(4, &o4, t, secs(600));
    let (o5, t) = timed(&criterion5);
    line(5, &o5, t, None);
    let (o6, t) = timed(&|| criterion6(SEED + 6, 10, 10));
    line(6, &o6, t, secs(300));
    let (o7, t) = timed(&|| criterion7(&instances, 200, SEED + 70));
    line(7, &o7, t, secs(600));
    let (o8, t) = timed(&|| criterion8(SEED + 8, 20, 10_000, 500, 10_000));
    line(8, &o8, t, secs(600));

    // reruns: full size where cheap, reduced size where a full rerun would double the run time
    let (o9, t) = timed(&|| {
        let small = norm_instances(SEED + 4, 4, 12);
        let pairs: Vec<(&str, String, String)> = vec![
            ("1", o1.rendered(), criterion1(SEED + 1, 1000).rendered()),
            ("2", o2.rendered(), criterion2(SEED + 2, 1000).rendered()),
            ("3", o3.rendered(), criterion3(SEED + 3, 500, 100).rendered()),
            ("4 (reduced)", criterion4(&small, 500, SEED + 40).rendered(), criterion4(&small, 500, SEED + 40).rendered()),
            ("5", o5.rendered(), criterion5().rendered()),
            ("6 (reduced)", criterion6(SEED + 6, 2, 5).rendered(), criterion6(SEED + 6, 2, 5).rendered()),
            ("7 (reduced)", criterion7(&small, 50, SEED + 70).rendered(), criterion7(&small, 50, SEED + 70).rendered()),
            ("8 (reduced)", criterion8(SEED + 8, 2, 300, 60, 200).rendered(), criterion8(SEED + 8, 2, 300, 60, 200).rendered()),
        ];
        let differing: Vec<&str> = pairs.iter().filter(|(_, a, b)| a != b).map(|(n, _, _)| *n).collect();
        Outcome {
            passed: differing.is_empty(),
            detail: if differing.is_empty() {
                format!("byte-identical reports on rerun for criteria {}", pairs.iter().map(|p| p.0).collect::<Vec<_>>().join(", "))
            } else {
                format!("reports differ for criteria {differing:?}")
            },
            report: Value::Null,
        }
    });
    line(9, &o9, t, None);

    if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
