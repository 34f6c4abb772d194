//! Acceptance suite. Runs without the libtest harness so that one PASS/FAIL
//! line per criterion is always printed; exits nonzero if any fails.

use std::collections::BTreeMap;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::Rng;
use roughbody::body::{geometric_boundary_surface, koch_report, Body, KochSnowflake};
use roughbody::flat::flat_norm;
use roughbody::forms::Cochain;
use roughbody::lipschitz::random_map;
use roughbody::mechanics::{
    cochains_from_flux, flux_from_cochains, piola_cauchy_deviation, strain, stress_report, virtual_power_report,
};
use roughbody::random::{self, CampaignRng};
use roughbody::sharp::MaterializeOptions;
use roughbody::{
    build_complex, meshes, Chain, CauchyFlux, Complex, Configuration, Current, Error, HalfSpace, SharpField,
    VirtualVelocity,
};

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// Jittered `nx × ny` grid of the unit square.
fn jittered_grid(rng: &mut CampaignRng, nx: usize, ny: usize) -> Arc<Complex> {
    let (mut v, t) = meshes::grid_data(nx, ny, [0.0, 0.0], [1.0, 1.0]);
    let h = 1.0 / nx.max(ny) as f64;
    for p in v.iter_mut() {
        if p.iter().all(|&x| x > 1e-12 && x < 1.0 - 1e-12) {
            for x in p.iter_mut() {
                *x += rng.gen_range(-0.2 * h..0.2 * h);
            }
        }
    }
    build_complex(2, &v, &BTreeMap::from([(2, t)])).expect("valid mesh")
}

fn random_body(rng: &mut CampaignRng, c: &Arc<Complex>, p: f64) -> Body {
    let n = c.dim();
    let ids: Vec<usize> = (0..c.count(n)).filter(|_| rng.gen_bool(p)).collect();
    Body::from_simplices(c, &ids).expect("indices in range")
}

fn random_field(rng: &mut CampaignRng, c: &Arc<Complex>) -> SharpField {
    let values = (0..c.num_vertices()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    SharpField::new(c, values).expect("one value per vertex")
}

fn stokes() -> Verdict {
    let start = Instant::now();
    let mut rng = random::rng(101);
    let mut worst: f64 = 0.0;
    let mut largest = 0;
    for trial in 0..50 {
        let c = if trial % 10 == 9 {
            random::mesh(&mut rng, 3)
        } else {
            let (nx, ny) = (rng.gen_range(5..=31), rng.gen_range(5..=31));
            jittered_grid(&mut rng, nx, ny)
        };
        largest = largest.max(c.count(c.dim()));
        let p = rng.gen_range(0.2..0.9);
        let b = random_body(&mut rng, &c, p);
        let s = geometric_boundary_surface(&b);
        worst = worst.max(s.chain().max_deviation(&b.boundary()).expect("same complex"));
    }
    let elapsed = start.elapsed();
    verdict(
        worst <= 1e-10 && largest <= 2000 && elapsed < Duration::from_secs(10),
        format!("50 bodies, largest mesh {largest} top simplices, max deviation {worst:.2e}, {elapsed:.2?}"),
    )
}

fn flat_norm_oracle() -> Verdict {
    let c = meshes::unit_square();
    let square = Body::from_simplices(&c, &[0, 1]).unwrap();
    let edge = square.boundary();
    // Either ∂Q itself (mass 4) or the filling Q (mass 1).
    let analytic = edge.mass().min(square.mass());
    let f = flat_norm(&edge, &c).unwrap().value;
    let exact = close(f, 1.0, 1e-6) && close(analytic, 1.0, 1e-12);

    let mut rng = random::rng(202);
    let mut monotone_failures = 0;
    let mut violations = 0;
    for trial in 0..500 {
        let dim = 1 + trial % 2;
        let c = random::mesh(&mut rng, dim);
        let k = rng.gen_range(0..=dim);
        let t = random::chain(&mut rng, &c, k, 0.5);
        let coarse = flat_norm(&t, &c).unwrap().value;
        if coarse > t.mass() * (1.0 + 1e-9) + 1e-12 {
            violations += 1;
        }
        if trial < 40 {
            let r = c.barycentric_refinement();
            let fine = flat_norm(&t.refine(&r).unwrap(), &r.fine).unwrap().value;
            if fine > coarse * (1.0 + 1e-9) + 1e-12 {
                monotone_failures += 1;
            }
        }
    }
    verdict(
        exact && monotone_failures == 0 && violations == 0,
        format!("F(∂Q) = {f:.9}, refinement increases: {monotone_failures}/40, F > M: {violations}/500"),
    )
}

fn koch() -> Verdict {
    let start = Instant::now();
    let level = 5;
    let rep = koch_report(level, 0.05).unwrap();
    let elapsed = start.elapsed();
    // Each side spawns four; the bumps added at step k+1 are 3·4ᵏ triangles
    // of side 3^-(k+1).
    let mut area = 3f64.sqrt() / 4.0;
    let mut ok = true;
    let mut worst_ratio: f64 = 0.0;
    for k in 0..=level {
        let perimeter = 3.0 * (4.0f64 / 3.0).powi(k as i32);
        ok &= close(rep.perimeters[k], perimeter, 1e-9);
        ok &= close(rep.areas[k], area, 1e-9);
        let side = 3f64.powi(-(k as i32 + 1));
        let annexed = 3.0 * 4f64.powi(k as i32) * 3f64.sqrt() / 4.0 * side * side;
        if k < level {
            let d = rep.flat_distances[k];
            ok &= d <= annexed * (1.0 + 1e-9);
            ok &= close(KochSnowflake::annexed_area(k), annexed, 1e-12);
        }
        if k > 0 {
            ok &= rep.perimeters[k] > rep.perimeters[k - 1];
        }
        area += annexed;
    }
    for w in rep.flat_distances.windows(2) {
        let r = w[1] / w[0];
        worst_ratio = worst_ratio.max(r);
        ok &= r <= 4.0 / 9.0 + 1e-3;
    }
    verdict(
        ok && elapsed < Duration::from_secs(30),
        format!(
            "levels 0..={level}, {} triangles, perimeter {:.6}, max distance ratio {worst_ratio:.6}, {elapsed:.2?}",
            rep.triangles, rep.perimeters[level]
        ),
    )
}

fn product_rule() -> Verdict {
    let mut rng = random::rng(404);
    let mut worst: f64 = 0.0;
    for trial in 0..200 {
        let dim = 1 + trial % 3;
        let c = random::mesh(&mut rng, dim);
        let k = rng.gen_range(1..=dim);
        let a = random::chain(&mut rng, &c, k, 0.5);
        let phi = random_field(&mut rng, &c);
        let omega = if trial % 2 == 0 {
            random::cochain(&mut rng, &c, k - 1).whitney()
        } else {
            random::form(&mut rng, dim, k - 1)
        };
        let lhs = phi.boundary_product(&a).unwrap().evaluate(&omega).unwrap();
        // φ∂A(ω) − A(dφ ∧ ω), assembled from chain integrals.
        let first = Current::weighted(&a.boundary().unwrap(), &phi.form()).unwrap().evaluate(&omega).unwrap();
        let second = Current::from_chain(&a).evaluate(&phi.form().d().wedge(&omega).unwrap()).unwrap();
        // ∂(φA)(ω) is also (φA)(dω).
        let via_d = phi.multiply(&a).unwrap().evaluate(&omega.d()).unwrap();
        worst = worst.max((lhs - (first - second)).abs()).max((lhs - via_d).abs());
    }
    let opts = MaterializeOptions { max_levels: 1, tol: 1e-3 };
    let mut violations = 0;
    for trial in 0..500 {
        let dim = 1 + trial % 2;
        let c = if dim == 1 {
            meshes::interval(rng.gen_range(2..5), 0.0, 1.0)
        } else {
            meshes::grid(rng.gen_range(1..3), rng.gen_range(1..3), [0.0, 0.0], [1.0, 1.0])
        };
        let k = rng.gen_range(0..=dim);
        let a = random::chain(&mut rng, &c, k, 0.6);
        let phi = random_field(&mut rng, &c);
        if !phi.check_product_bounds(&a, None, opts).unwrap().passed {
            violations += 1;
        }
    }
    verdict(
        worst <= 1e-9 && violations == 0,
        format!("200 cases, max residual {worst:.2e}; N and F bounds violated in {violations}/500"),
    )
}

fn pushforward() -> Verdict {
    let mut rng = random::rng(505);
    let mut bound_failures = 0;
    let mut natural = true;
    let mut worst_adjoint: f64 = 0.0;
    for trial in 0..200 {
        let dim = 1 + trial % 3;
        let c = random::mesh(&mut rng, dim);
        let f = random_map(&mut rng, &c, 0.3);
        let k = rng.gen_range(0..=dim);
        let t = random::chain(&mut rng, &c, k, 0.5);
        if !f.check_bounds(&t).unwrap().passed {
            bound_failures += 1;
        }
        if k > 0 {
            let lhs = f.pushforward(&t.boundary().unwrap()).unwrap();
            let rhs = f.pushforward(&t).unwrap().boundary().unwrap();
            natural &= lhs.max_deviation(&rhs).unwrap() == 0.0;
        }
        let x = random::cochain(&mut rng, f.image_complex(), k);
        let ft = f.pushforward(&t).unwrap();
        let pairing = x.evaluate(&ft).unwrap();
        let pulled = f.pullback_cochain(&x).unwrap().evaluate(&t).unwrap();
        // The same pairing through forms: ∫_T F^#ω against ∫_{F#T} ω.
        let omega = x.whitney();
        let by_forms = f.pullback_form(&omega).unwrap().integrate(&t).unwrap();
        let direct = omega.integrate(&ft).unwrap();
        worst_adjoint = worst_adjoint
            .max((pulled - pairing).abs() / (1.0 + pairing.abs()))
            .max((by_forms - direct).abs() / (1.0 + direct.abs()));
    }
    verdict(
        bound_failures == 0 && natural && worst_adjoint <= 1e-10,
        format!(
            "200 maps, bound failures {bound_failures}, ∂F# = F#∂ exact: {natural}, max adjointness gap {worst_adjoint:.2e}"
        ),
    )
}

fn flux_round_trip() -> Verdict {
    let mut rng = random::rng(606);
    let complexes = [
        meshes::grid(3, 3, [0.0, 0.0], [1.0, 1.0]),
        jittered_grid(&mut rng, 4, 3),
        meshes::cube_grid(1, 1.0),
    ];
    let mut worst: f64 = 0.0;
    let mut within = true;
    for c in &complexes {
        let n = c.dim();
        for _ in 0..20 {
            let x: Vec<Cochain> = (0..n).map(|_| random::cochain(&mut rng, c, n - 1)).collect();
            let flux = flux_from_cochains(&x).unwrap();
            let rec = cochains_from_flux(&flux, c).unwrap();
            within &= rec.within_bound;
            for (a, b) in x.iter().zip(&rec.cochains) {
                for (p, q) in a.coefficients().iter().zip(b.coefficients()) {
                    worst = worst.max((p - q).abs());
                }
            }
        }
    }
    let c = &complexes[0];
    // Reads the test field at vertex 0 whatever facet it is given.
    let nonlocal = CauchyFlux::new(c, 1.0, 1.0, |_, t, u| Ok(t.iter().map(|(_, a)| a).sum::<f64>() * u.values()[0]));
    let (rejected, witness) = match cochains_from_flux(&nonlocal, c) {
        Err(e @ Error::ExtensionDependence { .. }) => (true, e.to_string()),
        Err(e) => (false, format!("unexpected error {e}")),
        Ok(_) => (false, "accepted".into()),
    };
    verdict(
        worst <= 1e-9 && within && rejected,
        format!("60 tuples, max coefficient error {worst:.2e}, F(α) ≤ max(s, b): {within}; adversary: {witness}"),
    )
}

fn mechanics_case(rng: &mut CampaignRng) -> Option<(Vec<Cochain>, Configuration, Chain, VirtualVelocity)> {
    let dim = rng.gen_range(1..=3);
    let c = random::mesh(rng, dim);
    let config = Configuration::new(random_map(rng, &c, 0.1)).ok()?;
    let img = config.image().clone();
    let x: Vec<Cochain> = (0..dim).map(|_| random::cochain(rng, &img, dim - 1)).collect();
    let t = random_body(rng, &c, 0.5).chain().clone();
    let coeffs: Vec<Vec<f64>> = (0..dim).map(|_| (0..=dim).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let v = VirtualVelocity::from_fn(&img, |p| {
        coeffs.iter().map(|a| a[0] + (0..dim).map(|j| a[j + 1] * p[j]).sum::<f64>()).collect()
    });
    Some((x, config, t, v))
}

fn virtual_power() -> Verdict {
    let mut rng = random::rng(707);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    let mut rigid_zero = true;
    while cases < 100 {
        let Some((x, config, t, v)) = mechanics_case(&mut rng) else {
            continue;
        };
        cases += 1;
        worst = worst.max(virtual_power_report(&x, &config, &t, &v).unwrap().residual);
        let shift: Vec<f64> = (0..config.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let rigid = VirtualVelocity::constant(config.image(), &shift);
        rigid_zero &= strain(&config, &t, &rigid).unwrap().iter().all(Current::is_zero);
    }
    verdict(
        worst <= 1e-8 && rigid_zero,
        format!("100 cases, max residual {worst:.2e}, translation strain identically zero: {rigid_zero}"),
    )
}

fn stress() -> Verdict {
    let mut rng = random::rng(808);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    while cases < 50 {
        let Some((x, config, t, v)) = mechanics_case(&mut rng) else {
            continue;
        };
        if config.check_orientation().is_err() {
            continue;
        }
        cases += 1;
        worst = worst.max(stress_report(&x, &config, &t, &v).unwrap().max_deviation);
    }
    let c = random::mesh(&mut rng, 2);
    let id = Configuration::identity(&c);
    let x: Vec<Cochain> = (0..2).map(|_| random::cochain(&mut rng, id.image(), 1)).collect();
    let t = random_body(&mut rng, &c, 0.7).chain().clone();
    let v = VirtualVelocity::from_fn(id.image(), |p| vec![p[0] * p[1], 1.0 - p[0]]);
    let rep = stress_report(&x, &id, &t, &v).unwrap();
    let identity_gap = piola_cauchy_deviation(&rep, &id).unwrap();
    verdict(
        worst <= 1e-8 && identity_gap == 0.0,
        format!("50 configurations, max frame deviation {worst:.2e}, identity PK − Cauchy = {identity_gap:e}"),
    )
}

fn restriction() -> Verdict {
    let c = meshes::unit_square();
    let body = Body::from_simplices(&c, &[0, 1]).unwrap();
    let theta: f64 = 0.3;
    let u = [theta.cos(), theta.sin()];
    let levels: Vec<f64> = (0..c.num_vertices())
        .map(|i| c.vertex_coords(i).iter().zip(&u).map(|(x, n)| x * n).sum())
        .collect();
    let lo = levels.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = levels.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let samples = 1000;
    let h = (hi - lo) / samples as f64;
    let mut integral = 0.0;
    for j in 0..samples {
        let s = lo + (j as f64 + 0.5) * h;
        assert!(levels.iter().all(|l| (l - s).abs() > 1e-9), "sweep hits a vertex");
        integral += body.chain().restriction_defect(&HalfSpace::new(&u, s)).unwrap() * h;
    }
    let mass = body.mass();
    verdict(
        close(integral, mass, 1e-3),
        format!("∫ defect ds = {integral:.6} against mass {mass:.6}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("stokes identity", stokes),
        ("flat norm oracle", flat_norm_oracle),
        ("koch rough body", koch),
        ("product rule", product_rule),
        ("pushforward bounds", pushforward),
        ("flux cochain round trip", flux_round_trip),
        ("virtual power", virtual_power),
        ("stress frames", stress),
        ("restriction sweep", restriction),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let v = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            verdict(false, format!("panicked: {msg}"))
        });
        if !v.passed {
            failed += 1;
        }
        println!("{} {}. {name}: {}", if v.passed { "PASS" } else { "FAIL" }, i + 1, v.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
