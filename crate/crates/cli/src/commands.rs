use std::fmt::Write as _;

use planecal::calibrate::{lhs_sum, Lemma3Certificate};
use planecal::density::HtDensity;
use planecal::io;
use planecal::kdim::revalidate;
use planecal::sampling::DEFAULT_RANGE;
use planecal::surfaces::alpha_area;
use planecal::{
    bh_area, build_calibrator, check_main_prop, lemma1_check, lemma2_check, lemma3_certificate, lp_calibrator_search,
    maximize_over_polar, mu_search, reduce_functionals, section, semi_ellipticity_experiment, verify_calibrator, AlphaDensity,
    BhDensity, Generator, MuCoefficients, PlanarDisc, PlaneBasis, Ring, Sampler, Scalar, SimpleTwoVector, SymPolygon,
    SymPolytope, Vec2, Vector,
};
use serde_json::{json, Value};

use crate::args::{
    CalibrateArgs, Common, DensityArgs, DensityKind, GeneratorArg, KdimArgs, LpDensity, LpSearchArgs, PropCheckArgs, RingArg,
    SemiEllipticArgs,
};
use crate::CliError;

/// What a command produced.
pub struct Outcome {
    pub report: Value,
    /// All asserted invariants held.
    pub passed: bool,
    /// Replaces the JSON report on standard output when set.
    pub text: Option<String>,
    pub csv: Option<String>,
}

impl Outcome {
    fn new(report: Value, passed: bool) -> Self {
        Outcome {
            report,
            passed,
            text: None,
            csv: None,
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

pub fn load_norm<T: Scalar>(c: &Common) -> Result<SymPolytope<T>, CliError> {
    let ball = match c.norm.as_str() {
        "linf" => SymPolytope::linf(c.dim)?,
        "l1" => SymPolytope::l1(c.dim)?,
        "random" => {
            if c.dim < 2 || c.facets < c.dim {
                return Err(CliError::Input(format!("a random norm needs dim >= 2 and at least dim facet pairs (got {} and {})", c.dim, c.facets)));
            }
            Sampler::new(c.norm_seed).sym_polytope(c.dim, c.facets, 5)
        }
        path => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read norm file {path}: {e}")))?;
            io::parse_polytope(&text)?
        }
    };
    Ok(ball)
}

fn norm_json<T: Scalar>(c: &Common, ball: &SymPolytope<T>) -> Value {
    json!({"spec": c.norm, "norm_seed": c.norm_seed, "polytope": io::polytope_to_json(ball)})
}

/// `e1,e2` or `1,0,0;0,1/2,1`.
pub fn parse_vectors<T: Scalar>(spec: &str, dim: usize) -> Result<Vec<Vector<T>>, CliError> {
    let names: Vec<&str> = spec.split(',').map(str::trim).collect();
    if names.iter().all(|n| n.starts_with('e') && n.len() > 1 && n[1..].chars().all(|c| c.is_ascii_digit())) {
        return names
            .iter()
            .map(|n| {
                let i: usize = n[1..].parse().map_err(input)?;
                if i == 0 || i > dim {
                    return Err(CliError::Input(format!("basis vector {n} out of range for dimension {dim}")));
                }
                Ok(Vector::basis(dim, i - 1))
            })
            .collect();
    }
    spec.split(';')
        .map(|v| {
            let coords = v.split(',').map(|x| T::parse_scalar(x).map_err(input)).collect::<Result<Vec<T>, _>>()?;
            if coords.len() != dim {
                return Err(CliError::Input(format!("vector `{v}` has {} coordinates, expected {dim}", coords.len())));
            }
            Ok(Vector(coords))
        })
        .collect()
}

fn parse_pair<T: Scalar>(spec: &str, dim: usize) -> Result<(Vector<T>, Vector<T>), CliError> {
    let mut v = parse_vectors::<T>(spec, dim)?;
    if v.len() != 2 {
        return Err(CliError::Input(format!("`{spec}` must name exactly two vectors")));
    }
    let b = v.pop().expect("two vectors");
    let a = v.pop().expect("two vectors");
    Ok((a, b))
}

fn load_plane<T: Scalar>(c: &Common, dim: usize) -> Result<PlaneBasis<T>, CliError> {
    let (u1, u2) = parse_pair(&c.plane, dim)?;
    Ok(PlaneBasis::new(u1, u2)?)
}

fn parse_points<T: Scalar>(spec: &str) -> Result<Vec<Vec2<T>>, CliError> {
    parse_vectors::<T>(spec, 2)?
        .into_iter()
        .map(|v| Ok(Vec2::new(v.0[0].clone(), v.0[1].clone())))
        .collect()
}

fn header<T: Scalar>(command: &str, c: &Common) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("command".into(), json!(command));
    m.insert("mode".into(), json!(T::MODE));
    m.insert("seed".into(), json!(c.seed));
    m
}

fn finish(mut head: serde_json::Map<String, Value>, body: Value, passed: bool) -> Value {
    if let Value::Object(b) = body {
        head.extend(b);
    }
    head.insert("passed".into(), json!(passed));
    Value::Object(head)
}

pub fn section_cmd<T: Scalar>(c: &Common) -> Result<Outcome, CliError> {
    let ball = load_norm::<T>(c)?;
    let plane = load_plane(c, ball.dim())?;
    let k = section(&ball, &plane)?;
    let body = json!({
        "norm": norm_json(c, &ball),
        "plane": [io::row(&plane.u1.0), io::row(&plane.u2.0)],
        "section": io::section_report(&k),
    });
    Ok(Outcome::new(finish(header::<T>("section", c), body, true), true))
}

pub fn density_cmd<T: Scalar>(a: &DensityArgs) -> Result<Outcome, CliError> {
    let c = &a.common;
    let ball = load_norm::<T>(c)?;
    let (v1, v2) = parse_pair(&a.sigma, ball.dim())?;
    let sigma = SimpleTwoVector::new(v1, v2)?;
    let (bh, degenerate) = BhDensity::new(ball.clone()).eval_flagged(&sigma)?;
    let (ht, _) = HtDensity::new(ball.clone()).eval_flagged(&sigma)?;
    let text = match a.kind {
        DensityKind::Bh => format!("{bh}\n"),
        DensityKind::Ht => format!("{ht}\n"),
        DensityKind::Both => format!("bh {bh}\nht {ht}\n"),
    };
    let body = json!({
        "norm": norm_json(c, &ball),
        "sigma": io::two_vector(&sigma),
        "degenerate": degenerate,
        "busemann_hausdorff": bh.to_report_string(),
        "holmes_thompson": ht.to_report_string(),
    });
    let mut out = Outcome::new(finish(header::<T>("density", c), body, true), true);
    out.text = Some(text);
    Ok(out)
}

pub fn calibrate_cmd<T: Scalar>(a: &CalibrateArgs) -> Result<Outcome, CliError> {
    let c = &a.common;
    let ball = load_norm::<T>(c)?;
    let plane = load_plane(c, ball.dim())?;
    let cal = build_calibrator(&ball, &plane)?;
    let r = verify_calibrator(&cal, a.samples, c.seed)?;
    let passed = r.passed();
    let body = json!({
        "norm": norm_json(c, &ball),
        "calibrator": io::calibrator_report(&cal, &r),
    });
    let mut out = Outcome::new(finish(header::<T>("calibrate", c), body, passed), passed);
    if a.csv.is_some() {
        // same stream as the verification
        let bh = BhDensity::new(ball.clone());
        let mut sampler = Sampler::new(c.seed);
        let mut csv = String::from("index,v1,v2,omega_over_pi,bh_over_pi,gap_over_pi\n");
        for i in 0..a.samples {
            let s = sampler.two_vector::<T>(ball.dim(), DEFAULT_RANGE);
            let w = cal.eval(&s)?.0.abs();
            let b = bh.eval(&s)?.0;
            let join = |v: &Vector<T>| v.0.iter().map(io::s).collect::<Vec<_>>().join(" ");
            let _ = writeln!(csv, "{i},{},{},{},{},{}", join(&s.v1), join(&s.v2), io::s(&w), io::s(&b), io::s(&(w.clone() - b.clone())));
        }
        out.csv = Some(csv);
    }
    Ok(out)
}

#[derive(Default)]
struct Tally {
    runs: usize,
    failures: Vec<usize>,
}

impl Tally {
    fn record(&mut self, instance: usize, ok: bool) {
        self.runs += 1;
        if !ok {
            self.failures.push(instance);
        }
    }

    fn json(&self) -> Value {
        json!({"runs": self.runs, "failures": self.failures.len(), "failed_instances": self.failures.iter().take(10).collect::<Vec<_>>()})
    }
}

/// A point of `K*`: a vertex `±f_k`, or a convex combination of two
/// vertices shrunk by a random factor.
fn polar_point<T: Scalar>(k: &SymPolygon<T>, s: &mut Sampler) -> Vec2<T> {
    let vertices: Vec<Vec2<T>> = k.supports().iter().flat_map(|f| [f.clone(), f.neg()]).collect();
    let a = vertices[s.index(vertices.len())].clone();
    if s.coin() {
        return a;
    }
    let b = vertices[s.index(vertices.len())].clone();
    let t = T::from_ratio(s.int(0, 12), 12);
    let shrink = T::from_ratio(s.int(1, 12), 12);
    a.scale(&t).add(&b.scale(&(T::one() - t))).scale(&shrink)
}

pub fn prop_check_cmd<T: Scalar>(a: &PropCheckArgs) -> Result<Outcome, CliError> {
    let c = &a.common;
    if a.max_pairs < 2 {
        return Err(CliError::Input("--max-pairs must be at least 2".into()));
    }
    let mut sampler = Sampler::new(c.seed);
    let polygons: Vec<SymPolygon<T>> = match &a.polygon {
        Some(spec) => vec![SymPolygon::from_points(&parse_points::<T>(spec)?)?],
        None => (0..a.random_polygons).map(|_| sampler.sym_polygon(a.max_pairs, 10)).collect(),
    };
    let (mut l1, mut l2, mut l3, mut l3eq, mut mp, mut red, mut pol) =
        (Tally::default(), Tally::default(), Tally::default(), Tally::default(), Tally::default(), Tally::default(), Tally::default());
    for (idx, k) in polygons.iter().enumerate() {
        let n = k.n();
        l1.record(idx, lemma1_check(k).holds);
        l2.record(idx, lemma2_check(k).holds);
        let own = lemma3_certificate(k, &k.weights())?;
        l3eq.record(idx, own.verified() && is_equal(&own.lhs, &(T::one() / k.area().clone())));
        let p = loop {
            let p: Vec<T> = sampler.weights_with_zeros(n);
            if p.iter().filter(|w| !w.is_zero()).count() >= 2 {
                break p;
            }
        };
        let cert: Lemma3Certificate<T> = lemma3_certificate(k, &p)?;
        l3.record(idx, cert.verified() && le(&cert.lhs, &(T::one() / k.area().clone())));
        let m = sampler.int(1, n as i64 + 2) as usize;
        let f: Vec<Vec2<T>> = (0..m).map(|_| polar_point(k, &mut sampler)).collect();
        let w: Vec<T> = sampler.weights_with_zeros(m);
        mp.record(idx, check_main_prop(k, &f, &w)?.holds());
        let (rf, rw) = reduce_functionals(&f, &w)?;
        red.record(idx, is_equal(&lhs_sum(&rf, &rw), &lhs_sum(&f, &w)));
        let i = sampler.index(m);
        let best = maximize_over_polar(k, &f, &w, i)?;
        pol.record(idx, le(&lhs_sum(&f, &w), &best.value) && le(&best.value, &(T::one() / k.area().clone())));
    }
    let all = [&l1, &l2, &l3, &l3eq, &mp, &red, &pol];
    let passed = all.iter().all(|t| t.failures.is_empty());
    let body = json!({
        "polygons": polygons.len(),
        "max_pairs": a.max_pairs,
        "lemma1": l1.json(),
        "lemma2": l2.json(),
        "lemma3": l3.json(),
        "lemma3_equality": l3eq.json(),
        "main_prop": mp.json(),
        "reduction": red.json(),
        "polar_vertex_max": pol.json(),
    });
    Ok(Outcome::new(finish(header::<T>("prop-check", c), body, passed), passed))
}

fn is_equal<T: Scalar>(a: &T, b: &T) -> bool {
    planecal::scalar::is_negligible(&(a.clone() - b.clone()), &planecal::scalar::max_of(a.abs(), T::one()))
}

fn le<T: Scalar>(a: &T, b: &T) -> bool {
    a <= b || is_equal(a, b)
}

pub fn semi_elliptic_cmd<T: Scalar>(a: &SemiEllipticArgs) -> Result<Outcome, CliError> {
    let c = &a.common;
    let ball = load_norm::<T>(c)?;
    let plane = load_plane(c, ball.dim())?;
    let disc = match &a.disc {
        Some(spec) => PlanarDisc::new(plane.clone(), parse_points(spec)?)?,
        None => PlanarDisc::random(plane.clone(), &mut Sampler::new(c.seed ^ 0xd15c)),
    };
    let generator = match a.generator {
        GeneratorArg::Tent => Generator::Tent {
            height: T::parse_scalar(&a.height).map_err(input)?,
        },
        GeneratorArg::Displace => Generator::Displace { magnitude: a.magnitude },
        GeneratorArg::Mixed => Generator::Mixed,
    };
    let ring = match a.ring {
        RingArg::Z => Ring::Z,
        RingArg::Z2 => Ring::Z2,
    };
    let r = semi_ellipticity_experiment(&ball, &disc, &generator, ring, a.trials, c.seed)?;
    let passed = r.passed();
    let mesh = match &a.mesh {
        None => Value::Null,
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read mesh {}: {e}", path.display())))?;
            let m = io::parse_mesh::<T>(&text)?;
            let alpha = AlphaDensity::from_section(&section(&ball, &plane)?)?;
            json!({
                "bh_area": io::pi(&bh_area(&m, &BhDensity::new(ball.clone()))?.0),
                "alpha_area": io::pi(&alpha_area(&m, &alpha)?.0),
                "boundary_edges": m.boundary().len(),
            })
        }
    };
    let body = json!({
        "norm": norm_json(c, &ball),
        "plane": [io::row(&plane.u1.0), io::row(&plane.u2.0)],
        "disc": disc.boundary_polygon().iter().map(io::vec2).collect::<Vec<_>>(),
        "experiment": io::experiment_report(&r),
        "mesh": mesh,
    });
    Ok(Outcome::new(finish(header::<T>("semi-elliptic", c), body, passed), passed))
}

pub fn lp_search_cmd<T: Scalar>(a: &LpSearchArgs) -> Result<Outcome, CliError> {
    let c = &a.common;
    let ball = load_norm::<T>(c)?;
    let plane = load_plane(c, ball.dim())?;
    let mut sampler = Sampler::new(c.seed);
    let samples: Vec<SimpleTwoVector<T>> = (0..a.samples).map(|_| sampler.two_vector(ball.dim(), DEFAULT_RANGE)).collect();
    let (r, explicit, passed) = match a.density {
        LpDensity::Bh => {
            let r = lp_calibrator_search(&BhDensity::new(ball.clone()), &plane, &samples)?;
            let fits = r.check_form(build_calibrator(&ball, &plane)?.omega());
            let passed = r.outcome.is_feasible() && fits;
            (r, json!(fits), passed)
        }
        // nothing is asserted for Holmes-Thompson; infeasibility is a finding
        LpDensity::Ht => (lp_calibrator_search(&HtDensity::new(ball.clone()), &plane, &samples)?, Value::Null, true),
    };
    let body = json!({
        "norm": norm_json(c, &ball),
        "density": match a.density { LpDensity::Bh => "busemann-hausdorff", LpDensity::Ht => "holmes-thompson" },
        "plane": [io::row(&plane.u1.0), io::row(&plane.u2.0)],
        "n_samples": a.samples,
        "lp": io::lp_report(&r),
        "explicit_calibrator_fits": explicit,
    });
    Ok(Outcome::new(finish(header::<T>("lp-search", c), body, passed), passed))
}

pub fn kdim_cmd<T: Scalar>(a: &KdimArgs) -> Result<Outcome, CliError> {
    let c = &a.common;
    // random norms may carry functionals that support no facet
    let ball = load_norm::<T>(c)?.irredundant();
    let r = mu_search(&ball, a.samples, c.seed, a.revalidate)?;
    // the searched witness is exploratory; only the k = 2 products are asserted
    let mut passed = true;
    let products = if ball.dim() == 2 {
        let mu = MuCoefficients::planar_products(&ball)?;
        let v = revalidate(&mu, &ball, a.revalidate, planecal::kdim::revalidation_seed(c.seed))?;
        passed &= v == 0;
        json!({"mu": io::mu_to_json(&mu), "revalidation_violations": v})
    } else {
        Value::Null
    };
    let body = json!({
        "norm": norm_json(c, &ball),
        "search": io::mu_search_report(&r),
        "planar_products": products,
    });
    Ok(Outcome::new(finish(header::<T>("kdim-search", c), body, passed), passed))
}
