//! One function per subcommand. Each returns whether every check passed.

use std::path::Path;
use std::sync::Arc;

use rand::Rng;
use roughbody::body::{geometric_boundary_surface, koch_report, stokes_deviation, Body, KochSnowflake};
use roughbody::flat::flat_norm;
use roughbody::forms::Cochain;
use roughbody::io;
use roughbody::mechanics::{
    self, cochains_from_flux, estimate_balance_constants, flux_from_cochains, piola_cauchy_deviation,
    virtual_power_report, CauchyFlux, Configuration, VirtualVelocity, EXTENSION_TOL,
};
use roughbody::random::{self, CampaignRng};
use roughbody::sharp::{MaterializeOptions, SharpField};
use roughbody::{Chain, Complex, Error, PAMap};
use serde_json::{json, Value};

use crate::files::{self, emit, invalid, load_chain, load_cochain, load_fields, load_map, load_mesh, num, InputError, Mesh, Outcome};
use crate::{Campaign, FluxKind, Output, PowerInputs};

const STOKES_TOL: f64 = 1e-10;
const PRODUCT_TOL: f64 = 1e-9;

/// Emits the witness of a verdict error and stops; other errors are input
/// errors.
macro_rules! settle {
    ($r:expr, $out:expr, $path:expr) => {
        match $r {
            Ok(v) => v,
            Err(e) => match files::witness(&e) {
                Some(w) => {
                    let row = vec![w["error"].as_str().unwrap_or("").to_string()];
                    emit($out, &json!({"passed": false, "witness": w}), &["error"], &[row])?;
                    return Ok(false);
                }
                None => return Err(invalid($path, e)),
            },
        }
    };
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

pub fn mesh_validate(path: &Path, out: &Output) -> Outcome {
    let mesh = load_mesh(path)?;
    let r = mesh.complex.report();
    let mut report = to_json(r);
    report["passed"] = json!(true);
    let rows: Vec<Vec<String>> = r.counts.iter().enumerate().map(|(k, c)| vec![k.to_string(), c.to_string()]).collect();
    emit(out, &report, &["degree", "count"], &rows)?;
    Ok(true)
}

pub fn flatnorm(mesh_path: &Path, chain_path: &Path, subdivide: usize, out: &Output) -> Outcome {
    let mesh = load_mesh(mesh_path)?;
    let (t, _) = load_chain(chain_path, &mesh)?;
    let (mut ambient, mut t) = (mesh.complex.clone(), t);
    for _ in 0..subdivide {
        let r = ambient.barycentric_refinement();
        t = t.refine(&r).map_err(|e| invalid(chain_path, e))?;
        ambient = r.fine.clone();
    }
    let d = flat_norm(&t, &ambient).map_err(|e| invalid(chain_path, e))?;
    let passed = d.value <= t.mass() * (1.0 + 1e-9) + 1e-12;
    let report = json!({
        "value": d.value,
        "R": io::chain_to_json(&d.r, &mesh.reference(), None)["coefficients"],
        "S": io::chain_to_json(&d.s, &mesh.reference(), None)["coefficients"],
        "iterations": d.iterations,
        "mass": t.mass(),
        "mass_r": d.r.mass(),
        "mass_s": d.s.mass(),
        "subdivide": subdivide,
        "ambient_counts": (0..=ambient.dim()).map(|k| ambient.count(k)).collect::<Vec<_>>(),
        "passed": passed,
    });
    let row = vec![
        num(d.value),
        num(t.mass()),
        num(d.r.mass()),
        num(d.s.mass()),
        d.iterations.to_string(),
        subdivide.to_string(),
    ];
    emit(out, &report, &["value", "mass", "mass_r", "mass_s", "iterations", "subdivide"], &[row])?;
    Ok(passed)
}

pub fn koch(level: usize, body_out: &Path, epsilon: f64, out: &Output) -> Outcome {
    if !(epsilon > 0.0) {
        return Err(InputError::Env(format!("epsilon must be positive, got {epsilon}")));
    }
    let bad = |e: Error| invalid(body_out, e);
    let snow = KochSnowflake::new(level).map_err(bad)?;
    let body = snow.body(level).map_err(bad)?;
    let stem = body_out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "body".into());
    let dir = body_out.parent().unwrap_or(Path::new(""));
    let mesh_name = format!("{stem}.mesh.json");
    let surface_name = format!("{stem}.surface.json");
    files::write_json(&dir.join(&mesh_name), &io::mesh_to_json(snow.complex(), Some(&format!("{stem}.mesh"))))?;
    files::write_json(body_out, &io::chain_to_json(body.chain(), &mesh_name, Some("body")))?;
    let surface = geometric_boundary_surface(&body);
    files::write_json(&dir.join(&surface_name), &io::chain_to_json(surface.chain(), &mesh_name, Some("surface")))?;
    let r = koch_report(level, epsilon).map_err(bad)?;
    let mut report = to_json(&r);
    report["perimeter"] = json!(body.boundary().mass());
    report["perimeter_closed_form"] = json!(KochSnowflake::perimeter(level));
    report["area"] = json!(body.mass());
    report["area_closed_form"] = json!(KochSnowflake::area(level));
    report["files"] = json!({"body": body_out.to_string_lossy(), "mesh": mesh_name, "surface": surface_name});
    let rows: Vec<Vec<String>> = (0..=level)
        .map(|k| {
            let opt = |v: Option<&f64>| v.map_or(String::new(), |x| num(*x));
            let ratio = if k >= 2 { opt(r.ratios.get(k - 2)) } else { String::new() };
            let (dist, annexed) = if k >= 1 {
                (opt(r.flat_distances.get(k - 1)), opt(r.annexed_areas.get(k - 1)))
            } else {
                (String::new(), String::new())
            };
            vec![k.to_string(), num(r.perimeters[k]), num(r.areas[k]), dist, annexed, ratio]
        })
        .collect();
    emit(out, &report, &["level", "perimeter", "area", "flat_distance", "annexed_area", "ratio"], &rows)?;
    Ok(true)
}

/// A flux file and, for cochain fluxes, the cochains it was built from.
struct FluxFile {
    flux: CauchyFlux,
    cochains: Option<Vec<Cochain>>,
}

fn counting_flux(c: &Arc<Complex>, s: f64, b: f64) -> CauchyFlux {
    CauchyFlux::new(c, s, b, |_, t, u| {
        let cx = t.complex();
        Ok(t.iter()
            .map(|(f, a)| {
                let vs = cx.simplex(t.degree(), f);
                a * vs.iter().map(|&v| u.values()[v]).sum::<f64>() / vs.len() as f64
            })
            .sum())
    })
}

fn schema(pointer: impl Into<String>, message: impl Into<String>) -> Error {
    Error::SchemaViolation {
        pointer: pointer.into(),
        message: message.into(),
    }
}

fn load_flux(path: &Path, mesh: &Mesh) -> Result<FluxFile, InputError> {
    let v = files::read_json(path)?;
    let bad = |e: Error| invalid(path, e);
    let c = &mesh.complex;
    let n = c.dim();
    let kind = v["kind"].as_str().ok_or_else(|| bad(schema("/kind", "expected \"cochains\" or \"counting\"")))?;
    let mesh_ref = v["mesh"].as_str().ok_or_else(|| bad(schema("/mesh", "expected a string")))?;
    files::check_reference(mesh_ref, mesh, path)?;
    match kind {
        "cochains" => {
            let comps = v["components"]
                .as_array()
                .ok_or_else(|| bad(schema("/components", "expected an array")))?;
            if comps.len() != n {
                return Err(bad(schema("/components", format!("expected {n} components, found {}", comps.len()))));
            }
            let cochains = comps
                .iter()
                .enumerate()
                .map(|(i, coeffs)| {
                    let file = json!({"mesh": mesh_ref, "degree": n - 1, "coefficients": coeffs});
                    io::parse_cochain(&file, c).map(|(x, _)| x).map_err(|e| match e {
                        Error::SchemaViolation { pointer, message } => schema(
                            format!("/components/{i}{}", pointer.trim_start_matches("/coefficients")),
                            message,
                        ),
                        other => other,
                    })
                })
                .collect::<Result<Vec<_>, Error>>()
                .map_err(bad)?;
            Ok(FluxFile {
                flux: flux_from_cochains(&cochains).map_err(bad)?,
                cochains: Some(cochains),
            })
        }
        "counting" => {
            let read = |key: &str| {
                v[key]
                    .as_f64()
                    .filter(|x| x.is_finite() && *x >= 0.0)
                    .ok_or_else(|| bad(schema(format!("/{key}"), "expected a nonnegative number")))
            };
            Ok(FluxFile {
                flux: counting_flux(c, read("s")?, read("b")?),
                cochains: None,
            })
        }
        other => Err(bad(schema("/kind", format!("unknown flux kind \"{other}\"")))),
    }
}

pub fn flux_build(mesh_path: &Path, cochains: &[std::path::PathBuf], kind: FluxKind, s: f64, b: f64, flux_out: &Path) -> Outcome {
    let mesh = load_mesh(mesh_path)?;
    let n = mesh.complex.dim();
    let file = match kind {
        FluxKind::Cochains => {
            let xs = cochains.iter().map(|p| load_cochain(p, &mesh)).collect::<Result<Vec<_>, _>>()?;
            let flux = flux_from_cochains(&xs).map_err(|e| invalid(cochains.first().map_or(mesh_path, |p| p.as_path()), e))?;
            let (s, b) = flux.declared();
            let comps: Vec<Value> = xs
                .iter()
                .map(|x| io::cochain_to_json(x, &mesh.reference())["coefficients"].clone())
                .collect();
            json!({"mesh": mesh.reference(), "kind": "cochains", "degree": n - 1, "components": comps, "s": s, "b": b})
        }
        FluxKind::Counting => {
            if !(s >= 0.0 && b >= 0.0) {
                return Err(InputError::Env("declared constants must be nonnegative".into()));
            }
            json!({"mesh": mesh.reference(), "kind": "counting", "degree": n - 1, "s": s, "b": b})
        }
    };
    files::write_json(flux_out, &file)?;
    Ok(true)
}

pub fn flux_eval(mesh_path: &Path, flux_path: &Path, surface: &Path, velocity: &Path, out: &Output) -> Outcome {
    let mesh = load_mesh(mesh_path)?;
    let f = load_flux(flux_path, &mesh)?;
    let (t, _) = load_chain(surface, &mesh)?;
    let v = VirtualVelocity::new(load_fields(velocity, &mesh)?).map_err(|e| invalid(velocity, e))?;
    let comps = (0..mesh.complex.dim())
        .map(|i| f.flux.component(i, &t, v.component(i)))
        .collect::<Result<Vec<f64>, _>>()
        .map_err(|e| invalid(surface, e))?;
    let value: f64 = comps.iter().sum();
    let rows: Vec<Vec<String>> = comps.iter().enumerate().map(|(i, x)| vec![i.to_string(), num(*x)]).collect();
    emit(out, &json!({"value": value, "components": comps}), &["component", "value"], &rows)?;
    Ok(true)
}

pub fn flux_roundtrip(mesh_path: &Path, flux_path: &Path, out: &Output) -> Outcome {
    let mesh = load_mesh(mesh_path)?;
    let f = load_flux(flux_path, &mesh)?;
    let rec = settle!(cochains_from_flux(&f.flux, &mesh.complex), out, flux_path);
    let deviations: Vec<Option<f64>> = (0..rec.cochains.len())
        .map(|i| {
            f.cochains.as_ref().map(|orig| {
                orig[i]
                    .coefficients()
                    .iter()
                    .zip(rec.cochains[i].coefficients())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
        })
        .collect();
    let exact = deviations.iter().flatten().all(|&d| d <= EXTENSION_TOL);
    let passed = rec.within_bound && exact;
    let report = json!({
        "components": rec.cochains.iter().map(|x| io::cochain_to_json(x, &mesh.reference())["coefficients"].clone()).collect::<Vec<_>>(),
        "flat_norms": rec.flat_norms,
        "bound": rec.bound,
        "within_bound": rec.within_bound,
        "max_deviation": deviations,
        "passed": passed,
    });
    let rows: Vec<Vec<String>> = (0..rec.cochains.len())
        .map(|i| {
            vec![
                i.to_string(),
                num(rec.flat_norms[i]),
                num(rec.bound),
                deviations[i].map_or(String::new(), num),
            ]
        })
        .collect();
    emit(out, &report, &["component", "flat_norm", "bound", "max_deviation"], &rows)?;
    Ok(passed)
}

fn random_subset(rng: &mut CampaignRng, count: usize) -> Vec<usize> {
    let ids: Vec<usize> = (0..count).filter(|_| rng.gen_bool(0.5)).collect();
    if ids.is_empty() {
        vec![rng.gen_range(0..count)]
    } else {
        ids
    }
}

pub fn verify_stokes(mesh_path: &Path, body: Option<&Path>, trials: usize, run: &Campaign, out: &Output) -> Outcome {
    let mesh = load_mesh(mesh_path)?;
    let c = &mesh.complex;
    let n = c.dim();
    let seed = files::seed(run)?;
    let mut bodies = vec![match body {
        Some(p) => Body::from_chain(load_chain(p, &mesh)?.0).map_err(|e| invalid(p, e))?,
        None => Body::from_simplices(c, &(0..c.count(n)).collect::<Vec<_>>()).map_err(|e| invalid(mesh_path, e))?,
    }];
    let mut rng = random::rng(seed);
    for _ in 0..trials {
        let ids = random_subset(&mut rng, c.count(n));
        bodies.push(Body::from_simplices(c, &ids).map_err(|e| invalid(mesh_path, e))?);
    }
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for (i, b) in bodies.iter().enumerate() {
        let d = stokes_deviation(b);
        worst = worst.max(d);
        rows.push(vec![
            i.to_string(),
            b.simplices().len().to_string(),
            num(b.mass()),
            num(b.boundary().mass()),
            num(d),
            (d <= STOKES_TOL).to_string(),
        ]);
    }
    let passed = worst <= STOKES_TOL;
    let report = json!({"seed": seed, "samples": bodies.len(), "max_deviation": worst, "tolerance": STOKES_TOL, "passed": passed});
    emit(out, &report, &["sample", "simplices", "mass", "boundary_mass", "deviation", "passed"], &rows)?;
    Ok(passed)
}

fn random_field(rng: &mut CampaignRng, c: &Arc<Complex>) -> SharpField {
    SharpField::new(c, (0..c.count(0)).map(|_| rng.gen_range(-1.0..1.0)).collect()).expect("finite values")
}

#[allow(clippy::too_many_arguments)]
pub fn verify_product_rule(
    mesh_path: &Path,
    chain: Option<&Path>,
    field: Option<&Path>,
    trials: usize,
    levels: usize,
    run: &Campaign,
    out: &Output,
) -> Outcome {
    let mesh = load_mesh(mesh_path)?;
    let c = &mesh.complex;
    let n = c.dim();
    let seed = files::seed(run)?;
    let given_chain = chain.map(|p| load_chain(p, &mesh)).transpose()?.map(|(t, _)| t);
    if let (Some(t), Some(p)) = (&given_chain, chain) {
        if t.degree() == 0 {
            return Err(invalid(p, Error::DegreeZero));
        }
    }
    let given_field = match field {
        Some(p) => {
            let mut f = load_fields(p, &mesh)?;
            if f.len() != 1 {
                return Err(invalid(p, schema("/values", "expected a scalar field")));
            }
            Some(f.remove(0))
        }
        None => None,
    };
    let opts = MaterializeOptions { max_levels: levels, tol: 1e-3 };
    let mut rng = random::rng(seed);
    let mut rows = Vec::new();
    let (mut worst, mut violations) = (0.0f64, 0usize);
    for trial in 0..trials.max(1) {
        let a = match &given_chain {
            Some(t) => t.clone(),
            None => {
                let k = rng.gen_range(1..=n);
                random::chain(&mut rng, c, k, 0.4)
            }
        };
        let phi = given_field.clone().unwrap_or_else(|| random_field(&mut rng, c));
        let omega = random::form(&mut rng, n, a.degree() - 1);
        let bad = |e: Error| invalid(mesh_path, e);
        let lhs = phi.multiply(&a).and_then(|p| p.boundary()).and_then(|b| b.evaluate(&omega)).map_err(bad)?;
        let rhs = phi.boundary_product(&a).and_then(|b| b.evaluate(&omega)).map_err(bad)?;
        let residual = (lhs - rhs).abs();
        worst = worst.max(residual);
        let bounds = phi.check_product_bounds(&a, None, opts).map_err(bad)?;
        let ok = residual <= PRODUCT_TOL && bounds.passed;
        if !ok {
            violations += 1;
        }
        rows.push(vec![
            trial.to_string(),
            a.degree().to_string(),
            num(lhs),
            num(rhs),
            num(residual),
            num(bounds.normal_lhs),
            num(bounds.normal_rhs),
            num(bounds.flat_lhs),
            num(bounds.flat_rhs),
            ok.to_string(),
        ]);
    }
    let passed = violations == 0;
    let report = json!({
        "seed": seed, "trials": rows.len(), "max_residual": worst, "tolerance": PRODUCT_TOL,
        "violations": violations, "materialize_levels": levels, "passed": passed,
    });
    emit(
        out,
        &report,
        &["trial", "degree", "lhs", "rhs", "residual", "normal_lhs", "normal_rhs", "flat_lhs", "flat_rhs", "passed"],
        &rows,
    )?;
    Ok(passed)
}

/// Everything the power and stress reports consume.
struct PowerCase {
    config: Configuration,
    cochains: Vec<Cochain>,
    body: Chain,
    velocity: VirtualVelocity,
    identity: bool,
    seed: u64,
}

enum Prepared {
    Case(Box<PowerCase>),
    Stopped,
}

fn prepare(inputs: &PowerInputs, run: &Campaign, out: &Output) -> Result<Prepared, InputError> {
    let mesh = load_mesh(&inputs.mesh)?;
    let c = mesh.complex.clone();
    let n = c.dim();
    let seed = files::seed(run)?;
    let mut rng = random::rng(seed);
    let map = match &inputs.map {
        Some(p) => load_map(p, &mesh)?,
        None => PAMap::identity(&c),
    };
    let map_path = inputs.map.as_deref().unwrap_or(&inputs.mesh);
    let config = match Configuration::new(map) {
        Ok(k) => k,
        Err(e) => {
            let w = files::witness(&e).ok_or_else(|| invalid(map_path, e))?;
            emit(out, &json!({"passed": false, "witness": w}), &["error"], &[vec!["NotAnEmbedding".into()]])?;
            return Ok(Prepared::Stopped);
        }
    };
    let body_chain = match &inputs.body {
        Some(p) => Body::from_chain(load_chain(p, &mesh)?.0).map_err(|e| invalid(p, e))?,
        None => Body::from_simplices(&c, &(0..c.count(n)).collect::<Vec<_>>()).map_err(|e| invalid(&inputs.mesh, e))?,
    };
    let body_cochains = if inputs.cochains.is_empty() {
        (0..n).map(|_| random::cochain(&mut rng, &c, n - 1)).collect()
    } else {
        if inputs.cochains.len() != n {
            return Err(InputError::Env(format!("expected {n} --cochain files, found {}", inputs.cochains.len())));
        }
        inputs.cochains.iter().map(|p| load_cochain(p, &mesh)).collect::<Result<Vec<_>, _>>()?
    };
    let cochains = body_cochains
        .iter()
        .map(|x| config.spatial_cochain(x))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| invalid(&inputs.mesh, e))?;
    let velocity = match &inputs.velocity {
        Some(p) => config.spatial_velocity(&load_fields(p, &mesh)?).map_err(|e| invalid(p, e))?,
        None => {
            let coeffs: Vec<Vec<f64>> = (0..n).map(|_| (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
            VirtualVelocity::from_fn(config.image(), |p| {
                coeffs.iter().map(|a| a[0] + (0..n).map(|j| a[j + 1] * p[j]).sum::<f64>()).collect()
            })
        }
    };
    Ok(Prepared::Case(Box::new(PowerCase {
        config,
        cochains,
        body: body_chain.chain().clone(),
        velocity,
        identity: inputs.map.is_none(),
        seed,
    })))
}

pub fn verify_virtual_power(inputs: &PowerInputs, run: &Campaign, out: &Output) -> Outcome {
    let case = match prepare(inputs, run, out)? {
        Prepared::Case(c) => c,
        Prepared::Stopped => return Ok(false),
    };
    let r = virtual_power_report(&case.cochains, &case.config, &case.body, &case.velocity)
        .map_err(|e| invalid(&inputs.mesh, e))?;
    let mut report = to_json(&r);
    report["seed"] = json!(case.seed);
    report["tolerance"] = json!(mechanics::POWER_TOL);
    let rows = vec![
        vec!["surface".into(), num(r.surface_power)],
        vec!["body".into(), num(r.body_power)],
        vec!["internal".into(), num(r.internal_power)],
        vec!["residual".into(), num(r.residual)],
    ];
    emit(out, &report, &["term", "value"], &rows)?;
    Ok(r.passed)
}

pub fn stress_report(inputs: &PowerInputs, run: &Campaign, out: &Output) -> Outcome {
    let case = match prepare(inputs, run, out)? {
        Prepared::Case(c) => c,
        Prepared::Stopped => return Ok(false),
    };
    let map_path = inputs.map.as_deref().unwrap_or(&inputs.mesh);
    let r = settle!(
        mechanics::stress_report(&case.cochains, &case.config, &case.body, &case.velocity),
        out,
        map_path
    );
    let bad = |e: Error| invalid(&inputs.mesh, e);
    let body = case.config.body();
    let pk = r
        .piola_kirchhoff
        .iter()
        .map(|f| Cochain::from_form(body, f).map(|x| io::cochain_to_json(&x, "body")["coefficients"].clone()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(bad)?;
    let mut report = to_json(&r);
    report["seed"] = json!(case.seed);
    report["tolerance"] = json!(mechanics::POWER_TOL);
    report["piola_kirchhoff_facet_integrals"] = json!(pk);
    let mut passed = r.passed;
    if case.identity {
        let d = piola_cauchy_deviation(&r, &case.config).map_err(bad)?;
        report["piola_cauchy_deviation"] = json!(d);
        passed &= d <= 1e-12;
    }
    report["passed"] = json!(passed);
    let row = |name: &str, s: f64, m: f64| vec![name.to_string(), num(s), num(m), num((s - m).abs())];
    let rows = vec![
        row("surface", r.spatial.surface_power, r.material_surface_power),
        row("body", r.spatial.body_power, r.material_body_power),
        row("internal", r.spatial.internal_power, r.material_internal_power),
    ];
    emit(out, &report, &["term", "spatial", "material", "deviation"], &rows)?;
    Ok(passed)
}

pub fn verify_balance(mesh_path: &Path, flux_path: &Path, trials: usize, run: &Campaign, out: &Output) -> Outcome {
    let mesh = load_mesh(mesh_path)?;
    let c = &mesh.complex;
    let n = c.dim();
    let f = load_flux(flux_path, &mesh)?;
    let seed = files::seed(run)?;
    let mut rng = random::rng(seed);
    let trials = trials.max(1);
    let surfaces: Vec<Chain> = (0..trials).map(|_| random::chain(&mut rng, c, n - 1, 0.3)).collect();
    let bodies = (0..trials)
        .map(|_| {
            let ids = random_subset(&mut rng, c.count(n));
            Body::from_simplices(c, &ids).map(|b| b.chain().clone())
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| invalid(mesh_path, e))?;
    let velocities = (0..trials)
        .map(|_| VirtualVelocity::new((0..n).map(|_| random_field(&mut rng, c)).collect()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| invalid(mesh_path, e))?;
    let est = settle!(estimate_balance_constants(&f.flux, &surfaces, &bodies, &velocities), out, flux_path);
    let mut report = to_json(&est);
    report["seed"] = json!(seed);
    report["passed"] = json!(true);
    let rows = vec![
        vec!["s".into(), num(est.s_empirical), num(est.s_declared)],
        vec!["b".into(), num(est.b_empirical), num(est.b_declared)],
    ];
    emit(out, &report, &["constant", "empirical", "declared"], &rows)?;
    Ok(true)
}
