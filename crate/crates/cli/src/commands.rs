//! Subcommand implementations. Each produces a schema-versioned JSON value
//! and a text rendering; nothing here depends on wall-clock time unless
//! explicitly requested.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use conewright::acceptance::{self, CRITERIA};
use conewright::framing::{brute_force_kernel, framing_group, generated_in_box, HandleData};
use conewright::gluing::{weave4_spec, Context, GluingSpec};
use conewright::holonomy::{
    cone_conditions, evaluate_relators, lift_obstruction, AxisOrientation, ConeVerdict, PeripheralPair, RepFile,
};
use conewright::hypgeo::{HPoint, Isometry};
use conewright::mesh::{ball_volume, geodesic_sphere, SurfaceMesh};
use conewright::polyhedron::{
    angles_from_b, b_from_angles, boundary_mesh, build_geometry, check_dihedrals, edge_length, AngleParams, BParams,
};
use conewright::volume::{enclosed_volume, quadrature_volume, schlafli_check, structure_volume, SchlafliPath};
use serde_json::{json, Value};

use crate::{Cli, Command, Format, ParamArgs};

pub struct Output {
    pub body: String,
    pub pass: bool,
}

type Res<T> = std::result::Result<T, String>;

fn parse_reals<const N: usize>(flag: &str, s: &str) -> Res<[f64; N]> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(format!("--{flag}: expected {N} comma-separated numbers, found {}", parts.len()));
    }
    let mut out = [0.0; N];
    for (k, (slot, p)) in out.iter_mut().zip(&parts).enumerate() {
        *slot = p.parse().map_err(|_| format!("--{flag}: entry {} (`{p}`) is not a number", k + 1))?;
    }
    Ok(out)
}

fn parse_b(s: &str) -> Res<BParams> {
    let [q1, q2, q3, q4, t] = parse_reals::<5>("b", s)?;
    BParams::new([q1, q2, q3, q4], t).map_err(|e| format!("--b: {e}"))
}

fn parse_alpha(s: &str) -> Res<AngleParams> {
    AngleParams::new(parse_reals::<4>("alpha", s)?).map_err(|e| format!("--alpha: {e}"))
}

fn parse_isometry(flag: &str, s: &str) -> Res<Isometry> {
    Isometry::from_reals(parse_reals::<8>(flag, s)?).map_err(|e| format!("--{flag}: {e}"))
}

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn in_file<T>(path: &Path, r: conewright::Result<T>) -> Res<T> {
    r.map_err(|e| format!("{}: {e}", path.display()))
}

fn tolerance(cli: &Cli, default: f64) -> Res<f64> {
    match cli.tol {
        Some(t) if !(t > 0.0) || !t.is_finite() => Err(format!("--tol must be positive, got {t}")),
        Some(t) => Ok(t),
        None => Ok(default),
    }
}

/// Wraps a report with its schema, the seed and the verdict.
fn finish(cli: &Cli, schema: &str, mut body: Value, text: String, pass: bool) -> Res<Output> {
    let map = body.as_object_mut().expect("reports are objects");
    map.insert("schema".into(), json!(schema));
    map.insert("seed".into(), json!(cli.seed));
    map.insert("pass".into(), json!(pass));
    let body = match cli.format {
        Format::Json => serde_json::to_string_pretty(&body).expect("reports serialize") + "\n",
        Format::Text => format!("{text}seed: {}\nresult: {}\n", cli.seed, if pass { "pass" } else { "fail" }),
        Format::Obj => return Err("--format obj applies to mesh-export only".into()),
    };
    Ok(Output { body, pass })
}

fn fmt_b(b: &BParams) -> String {
    format!("q = {:?}, t = {}", b.q, b.t)
}

pub fn run(cli: &Cli) -> Res<Output> {
    match &cli.command {
        Command::Build(args) => build(cli, args),
        Command::Angles { b } => angles(cli, &parse_b(b)?),
        Command::Invert { alpha, cosines } => invert(cli, alpha.as_deref(), cosines.as_deref()),
        Command::Volume { b, sphere, quadrature } => volume(cli, b.as_deref(), *sphere, *quadrature),
        Command::Schlafli { path, steps } => schlafli(cli, path, *steps),
        Command::GlueCheck { b, spec } => glue_check(cli, b.as_deref(), spec.as_ref()),
        Command::Framing { handles, oracle, bound } => framing(cli, handles, *oracle, *bound),
        Command::LiftCheck { rep } => lift_check(cli, rep),
        Command::ConeCheck { mu, lambda, reversed } => cone_check(cli, mu, lambda, *reversed),
        Command::MeshExport { b, sphere, clip_height, out } => {
            mesh_export(cli, b.as_deref(), *sphere, *clip_height, out.as_ref())
        }
        Command::Acceptance { suite, timings } => run_acceptance(cli, suite, *timings),
    }
}

fn build(cli: &Cli, args: &ParamArgs) -> Res<Output> {
    let b = match (&args.b, &args.alpha) {
        (Some(b), _) => parse_b(b)?,
        (None, Some(a)) => b_from_angles(&parse_alpha(a)?).map_err(|e| format!("--alpha: {e}"))?,
        (None, None) => return Err("one of --b or --alpha is required".into()),
    };
    let tol = tolerance(cli, 1e-9)?;
    let g = build_geometry(&b);
    let report = check_dihedrals(&g);
    let lengths: Vec<Option<f64>> = (0..4).map(|i| edge_length(&g, i).ok()).collect();
    // Right angles are only claimed in the non-holed regime.
    let checked = b.in_b0();
    let pass = !checked || (report.cone_error <= tol && report.right_angle_error <= tol);
    let mut text = format!("b: {}\nholed: {:?}\nalpha: {:?}\n", fmt_b(&b), g.holed, g.alpha);
    let _ = writeln!(
        text,
        "cone angle error: {:.3e}\nright angle error: {:.3e}",
        report.cone_error, report.right_angle_error
    );
    let _ = writeln!(text, "edge lengths: {lengths:?}");
    let body = json!({
        "b": b,
        "geometry": g,
        "dihedrals": report,
        "edge_lengths": lengths,
        "dihedrals_checked": checked,
        "tolerance": tol,
    });
    finish(cli, "geometry/1", body, text, pass)
}

fn angles(cli: &Cli, b: &BParams) -> Res<Output> {
    let a = angles_from_b(b);
    let text = format!("b: {}\nalpha: {:?}\ncosines: {:?}\n", fmt_b(b), a.alpha, a.cosines());
    finish(cli, "angles/1", json!({ "b": b, "alpha": a.alpha, "cosines": a.cosines() }), text, true)
}

fn invert(cli: &Cli, alpha: Option<&str>, cosines: Option<&str>) -> Res<Output> {
    let a = match (alpha, cosines) {
        (Some(a), _) => parse_alpha(a)?,
        (None, Some(c)) => {
            AngleParams::from_cosines(parse_reals::<4>("cosines", c)?).map_err(|e| format!("--cosines: {e}"))?
        }
        (None, None) => return Err("one of --alpha or --cosines is required".into()),
    };
    let b = b_from_angles(&a).map_err(|e| e.to_string())?;
    let back = angles_from_b(&b).alpha;
    let residual = (0..4).map(|i| (back[i] - a.alpha[i]).abs()).fold(0.0, f64::max);
    let tol = tolerance(cli, 1e-8)?;
    let text = format!("alpha: {:?}\nb: {}\nin B0: {}\nresidual: {residual:.3e}\n", a.alpha, fmt_b(&b), b.in_b0());
    let body = json!({ "alpha": a.alpha, "b": b, "in_b0": b.in_b0(), "residual": residual });
    finish(cli, "invert/1", body, text, residual <= tol)
}

fn volume(cli: &Cli, b: Option<&str>, sphere: Option<f64>, quadrature: bool) -> Res<Output> {
    if let Some(r) = sphere {
        if !(r > 0.0) {
            return Err(format!("--sphere: radius must be positive, got {r}"));
        }
        let tol = tolerance(cli, 0.01)?;
        let mesh = geodesic_sphere(r, cli.refine);
        let v = enclosed_volume(&mesh, &HPoint { x: 0.0, y: 0.0, h: 1.0 }).map_err(|e| e.to_string())?;
        let exact = ball_volume(r);
        let rel = (v.value - exact).abs() / exact;
        let text = format!(
            "sphere radius: {r}\nrefine: {}\nvolume: {}\nexact: {exact}\nrelative error: {rel:.3e}\n",
            cli.refine, v.value
        );
        let body = json!({
            "sphere_radius": r,
            "refine": cli.refine,
            "triangles": mesh.triangles.len(),
            "volume": v,
            "exact": exact,
            "relative_error": rel,
        });
        return finish(cli, "volume/1", body, text, rel <= tol);
    }
    let b = parse_b(b.ok_or("one of --b or --sphere is required")?)?;
    let v = structure_volume(&b);
    let mut text = format!("b: {}\nvolume: {}\nestimated error: {:.1e}\n", fmt_b(&b), v.value, v.est_error);
    let mut body = json!({ "b": b, "volume": v, "in_b0": b.in_b0() });
    let mut pass = true;
    if quadrature {
        let tol = tolerance(cli, 1e-5)?;
        let (q, est) = quadrature_volume(&b, tol / 100.0).map_err(|e| e.to_string())?;
        let diff = (q - v.value).abs();
        pass = diff <= tol;
        let _ = writeln!(text, "quadrature: {q} (difference {diff:.3e})");
        body["quadrature"] = json!({ "value": q, "est_error": est, "difference": diff, "tolerance": tol });
    }
    finish(cli, "volume/1", body, text, pass)
}

fn schlafli(cli: &Cli, path: &Path, steps: usize) -> Res<Output> {
    let p = in_file(path, SchlafliPath::from_json(&read(path)?))?;
    let tol = tolerance(cli, 1e-4)?;
    let r = schlafli_check(&p, steps).map_err(|e| format!("{}: {e}", path.display()))?;
    let pass = r.max_rel_error <= tol;
    let text = format!(
        "steps: {}\nmax relative error: {:.3e} at s = {:.4}\ntolerance: {tol:e}\n",
        r.steps, r.max_rel_error, r.worst_s
    );
    finish(cli, "schlafli/1", json!({ "path": p, "report": r, "tolerance": tol }), text, pass)
}

fn glue_check(cli: &Cli, b: Option<&str>, spec: Option<&PathBuf>) -> Res<Output> {
    let gluing = match spec {
        Some(path) => in_file(path, GluingSpec::from_json(&read(path)?))?,
        None => weave4_spec(),
    };
    let b = b.map(parse_b).transpose()?;
    let geometry = b.as_ref().map(build_geometry);
    let ctx = geometry.as_ref().map_or_else(Context::literal, Context::of);
    let reports = gluing.check_all(&ctx).map_err(|e| e.to_string())?;
    let pass = reports.iter().all(|r| r.pass);
    let width = reports.iter().map(|r| r.edge.len()).max().unwrap_or(4).max(4);
    let mut text = format!("gluing: {}\n", gluing.name);
    let _ = writeln!(
        text,
        "{:<width$}  {:<10}  {:>10}  {:>10}  {:>11}  pass",
        "edge", "class", "target", "measured", "translation"
    );
    for r in &reports {
        let _ = writeln!(
            text,
            "{:<width$}  {:<10}  {:>10.6}  {:>10.6}  {:>11.3e}  {}",
            r.edge,
            r.class.name(),
            r.target_angle,
            r.measured_angle,
            r.translation,
            if r.pass { "yes" } else { "NO" }
        );
    }
    let body = json!({ "gluing": gluing.name, "b": b, "edges": reports });
    finish(cli, "glue-check/1", body, text, pass)
}

fn framing(cli: &Cli, path: &Path, oracle: bool, bound: i64) -> Res<Output> {
    let h = in_file(path, HandleData::from_json(&read(path)?))?;
    let f = framing_group(&h).map_err(|e| e.to_string())?;
    let mut text = format!(
        "n = {}, m = {}, r = {}\nrank: {}\nindex: {}\ninfinite: {}\nfree rank: {}\ntorsion: {:?}\n",
        h.n, h.m, h.r, f.rank, f.index, f.infinite, f.invariants.free_rank, f.invariants.torsion
    );
    let mut body = json!({ "handles": h, "group": f });
    let mut pass = true;
    if oracle {
        if !(0..=4).contains(&bound) {
            return Err(format!("--bound must lie in 0..=4, got {bound}"));
        }
        let brute = brute_force_kernel(&h, bound).map_err(|e| e.to_string())?;
        let generated = generated_in_box(&f.generators, h.n, h.m, bound);
        let missing = brute.difference(&generated).count();
        let extra = generated.difference(&brute).count();
        pass = missing == 0 && extra == 0;
        let _ = writeln!(text, "oracle (bound {bound}): {} elements, {missing} missing, {extra} extra", brute.len());
        body["oracle"] = json!({ "bound": bound, "elements": brute.len(), "missing": missing, "extra": extra });
    }
    finish(cli, "framing/1", body, text, pass)
}

fn lift_check(cli: &Cli, path: &Path) -> Res<Output> {
    let file = in_file(path, RepFile::from_json(&read(path)?))?;
    let r = file.assignment();
    let values = in_file(path, evaluate_relators(&file.presentation, &r))?;
    if values.iter().any(|v| v.sign.is_none()) {
        // The images do not satisfy the presentation in PSL(2, C).
        let text = format!("relators: {values:?}\nthe images do not define a representation\n");
        return finish(cli, "lift-check/1", json!({ "relators": values, "lift": null }), text, false);
    }
    let rep = lift_obstruction(&file.presentation, &r).map_err(|e| e.to_string())?;
    let text = format!("relator signs: {:?}\nliftable: {}\nwitness: {:?}\n", rep.signs, rep.liftable, rep.witness);
    finish(cli, "lift-check/1", json!({ "relators": values, "lift": rep }), text, true)
}

fn cone_check(cli: &Cli, mu: &str, lambda: &str, reversed: bool) -> Res<Output> {
    let orientation = if reversed { AxisOrientation::Reversed } else { AxisOrientation::Longitude };
    let pp = PeripheralPair { mu: parse_isometry("mu", mu)?, lambda: parse_isometry("lambda", lambda)?, orientation };
    let verdict = cone_conditions(&pp);
    let pass = !matches!(verdict, ConeVerdict::Fails { .. });
    let text = format!("verdict: {verdict:?}\n");
    finish(cli, "cone-check/1", json!({ "pair": pp, "verdict": verdict }), text, pass)
}

fn mesh_export(cli: &Cli, b: Option<&str>, sphere: Option<f64>, clip: f64, out: Option<&PathBuf>) -> Res<Output> {
    if !(clip > 0.0) || !clip.is_finite() {
        return Err(format!("--clip-height must be positive, got {clip}"));
    }
    let (mesh, source): (SurfaceMesh, Value) = match (b, sphere) {
        (Some(b), _) => {
            let b = parse_b(b)?;
            (boundary_mesh(&build_geometry(&b)), json!({ "b": b }))
        }
        (None, Some(r)) if r > 0.0 => {
            (geodesic_sphere(r, cli.refine), json!({ "sphere_radius": r, "refine": cli.refine }))
        }
        (None, Some(r)) => return Err(format!("--sphere: radius must be positive, got {r}")),
        (None, None) => return Err("one of --b or --sphere is required".into()),
    };
    let obj = mesh.to_obj(clip);
    let sidecar = mesh.ideal_sidecar(clip);
    let sidecar_text = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes") + "\n";
    let Some(path) = out else {
        return match cli.format {
            Format::Obj => Ok(Output { body: obj, pass: true }),
            _ => finish(
                cli,
                "mesh-export/1",
                json!({ "source": source, "obj": obj, "ideal": sidecar }),
                obj.clone(),
                true,
            ),
        };
    };
    let side_path = PathBuf::from(format!("{}.ideal.json", path.display()));
    fs::write(path, &obj).map_err(|e| format!("{}: {e}", path.display()))?;
    fs::write(&side_path, &sidecar_text).map_err(|e| format!("{}: {e}", side_path.display()))?;
    let text = format!(
        "wrote {} ({} vertices, {} triangles)\nwrote {}\n",
        path.display(),
        mesh.vertices.len(),
        mesh.proper_triangles().count(),
        side_path.display()
    );
    let body = json!({
        "source": source,
        "obj_path": path.display().to_string(),
        "sidecar_path": side_path.display().to_string(),
        "vertices": mesh.vertices.len(),
        "triangles": mesh.proper_triangles().count(),
        "clip_height": clip,
    });
    if cli.format == Format::Obj {
        return Ok(Output { body: text, pass: true });
    }
    finish(cli, "mesh-export/1", body, text, true)
}

fn run_acceptance(cli: &Cli, suite: &str, timings: bool) -> Res<Output> {
    let ids: Vec<usize> = if suite == "all" {
        (1..=CRITERIA.len()).collect()
    } else {
        let id: usize =
            suite.parse().map_err(|_| format!("--suite: expected `all` or 1..={}, got `{suite}`", CRITERIA.len()))?;
        if !(1..=CRITERIA.len()).contains(&id) {
            return Err(format!("--suite: no criterion {id}"));
        }
        vec![id]
    };
    let reports: Vec<_> = ids.iter().map(|&id| acceptance::run(id, cli.seed)).collect();
    let pass = reports.iter().all(|r| r.pass);
    let mut text = String::new();
    for r in &reports {
        let _ = writeln!(text, "{r}");
    }
    let _ = writeln!(text, "{} of {} criteria passed", reports.iter().filter(|r| r.pass).count(), reports.len());
    let rows: Vec<Value> = reports
        .iter()
        .map(|r| {
            let mut v = json!({ "id": r.id, "name": r.name, "pass": r.pass, "detail": r.detail });
            if timings {
                v["seconds"] = json!(r.seconds);
            }
            v
        })
        .collect();
    finish(cli, "acceptance/1", json!({ "criteria": rows }), text, pass)
}
