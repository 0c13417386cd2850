//! One function per subcommand.

use std::f64::consts::PI;

use serde_json::{json, Value};
use spaceforms::cone::{certify_embedded, density_report, Verdict};
use spaceforms::h2xr::{calculus_suite, end_curve_sweep, DecayingGraph};
use spaceforms::hyp_density::{cone_boundary_integral, density_bound_check, ConeSurface};
use spaceforms::knot::{determinant, project};
use spaceforms::mobius::{mobius_volume, MobiusBudget};
use spaceforms::polycurve::{spherical_length, tangent_indicatrix, total_curvature, validate};
use spaceforms::random::{seeded, unit_vector};
use spaceforms::spherical_bounds::{
    check_bound, extremal_search, sharpness_family, Budget, Variant,
};
use spaceforms::Kind;

use crate::input::CurveFile;
use crate::report::{angle, num, to_value, Report, Table};
use crate::{Cli, CliError, Command};

pub fn dispatch(cli: &Cli) -> Result<(Report, Value), CliError> {
    match &cli.command {
        Command::Totcurv { curve } => totcurv(&CurveFile::load(curve)?),
        Command::BoundsCheck { curve, variant } => {
            bounds_check(&CurveFile::load(curve)?, variant.map(Into::into), cli.tol)
        }
        Command::ExtremalSearch {
            k,
            variant,
            ambient,
            iterations,
        } => extremal(
            *k,
            (*variant).into(),
            *ambient,
            cli.budget.unwrap_or(16),
            *iterations,
            cli.seed,
        ),
        Command::Sharpness { m, eps } => sharpness(*m, *eps, cli.seed),
        Command::Certify { curve } => certify(
            &CurveFile::load(curve)?,
            cli.budget.unwrap_or(1000),
            cli.seed,
        ),
        Command::MobiusVol { curve } => {
            mobius(&CurveFile::load(curve)?, cli.budget, cli.tol, cli.seed)
        }
        Command::ConeDensity { curve, point } => cone_density(&CurveFile::load(curve)?, point),
        Command::HypDensity { curve, radii } => {
            hyp_density(&CurveFile::load(curve)?, radii, cli.tol)
        }
        Command::H2xrCheck { radii } => h2xr_check(radii, cli.budget.unwrap_or(1000), cli.seed),
        Command::KnotDet { curve } => {
            knot_det(&CurveFile::load(curve)?, cli.budget.unwrap_or(50), cli.seed)
        }
    }
}

fn totcurv(file: &CurveFile) -> Result<(Report, Value), CliError> {
    let c = file.polygonal()?;
    let tc = total_curvature(&c)?;
    let mut result = json!({
        "tc": tc.total,
        "tc_angle": angle(tc.total),
        "exterior_angles": tc.exterior_angles,
        "cusps": tc.cusps,
        "vertices": c.len(),
        "closed": c.closed(),
        "simple": validate(&c).simple,
    });
    if c.space().kind() == Kind::Euclidean && c.closed() {
        result["indicatrix_length"] = json!(spherical_length(&tangent_indicatrix(&c)?));
    }
    let report = Report {
        command: "totcurv",
        result,
        required: &["tc", "tc_angle", "exterior_angles", "cusps"],
        table: None,
        exit_code: 0,
    };
    Ok((report, json!({})))
}

fn default_variant(k: usize, closed: bool) -> Result<Variant, CliError> {
    if closed {
        return Ok(Variant::closed_for(k)?);
    }
    match k {
        3 => Ok(Variant::Chain1),
        4 => Ok(Variant::Chain2),
        k if k >= 5 && k % 2 == 1 => Ok(Variant::OpenOdd),
        _ => Err(CliError::Input(format!(
            "no bound for an open chain with {k} vertices"
        ))),
    }
}

fn bounds_check(
    file: &CurveFile,
    variant: Option<Variant>,
    tol: Option<f64>,
) -> Result<(Report, Value), CliError> {
    let points = file.sphere_points()?;
    let variant = match variant {
        Some(v) => v,
        None => default_variant(points.len(), file.closed)?,
    };
    if variant.is_closed() != file.closed {
        return Err(CliError::Input(
            "variant and the file's \"closed\" flag disagree".into(),
        ));
    }
    let check = check_bound(&points, variant)?;
    let tol = tol.unwrap_or(1e-9);
    let violated = check.slack < -tol;
    let mut result = to_value(&check)?;
    result["measured_angle"] = angle(check.measured);
    result["bound_angle"] = angle(check.bound);
    result["violated"] = json!(violated);
    let report = Report {
        command: "bounds-check",
        result,
        required: &[
            "variant",
            "measured",
            "bound",
            "slack",
            "equality_flags",
            "violated",
        ],
        table: None,
        exit_code: if violated { 2 } else { 0 },
    };
    Ok((report, json!({})))
}

fn extremal(
    k: usize,
    variant: Variant,
    ambient: usize,
    restarts: usize,
    iterations: usize,
    seed: u64,
) -> Result<(Report, Value), CliError> {
    let budget = Budget::new(restarts, iterations)?;
    let found = extremal_search(k, variant, ambient, budget, seed)?;
    let mut result = to_value(&found)?;
    result["sup_angle"] = angle(found.sup_estimate);
    result["gap"] = json!(found.bound - found.sup_estimate);
    result["k"] = json!(k);
    result["ambient"] = json!(ambient);
    let report = Report {
        command: "extremal-search",
        result,
        required: &["variant", "sup_estimate", "bound", "argmax", "exceeded"],
        table: None,
        exit_code: if found.exceeded { 2 } else { 0 },
    };
    Ok((report, to_value(&budget)?))
}

fn sharpness(m: usize, eps: f64, seed: u64) -> Result<(Report, Value), CliError> {
    let c = sharpness_family(m, eps, seed)?;
    let tc = total_curvature(&c)?;
    let target = 2.0 * m as f64 * PI;
    let coords: Vec<Vec<f64>> = c
        .vertices()
        .iter()
        .map(|p| p.coords().iter().copied().collect())
        .collect();
    let result = json!({
        "m": m,
        "eps": eps,
        "vertices": coords,
        "tc": tc.total,
        "tc_angle": angle(tc.total),
        "deficit": target - tc.total,
        "simple": validate(&c).simple,
    });
    let report = Report {
        command: "sharpness",
        result,
        required: &["vertices", "tc", "deficit", "simple"],
        table: None,
        exit_code: 0,
    };
    Ok((report, json!({ "attempts": 1000 })))
}

fn certify(file: &CurveFile, samples: usize, seed: u64) -> Result<(Report, Value), CliError> {
    let s = file.space()?;
    let c = file.polygonal()?;
    let cert = certify_embedded(&s, &c, samples, seed)?;
    let mut result = to_value(&cert)?;
    result["worst_density"] = json!(cert.worst.density);
    let report = Report {
        command: "certify",
        result,
        required: &[
            "verdict",
            "worst",
            "worst_margin",
            "max_density",
            "preconditions",
        ],
        table: None,
        exit_code: if cert.verdict == Verdict::Certified {
            0
        } else {
            2
        },
    };
    Ok((report, json!({ "samples": samples })))
}

fn mobius(
    file: &CurveFile,
    restarts: Option<usize>,
    tol: Option<f64>,
    seed: u64,
) -> Result<(Report, Value), CliError> {
    let c = file.sampled()?;
    let mut budget = MobiusBudget::default();
    if let Some(r) = restarts {
        budget.restarts = r;
    }
    if let Some(t) = tol {
        budget.tol = t;
    }
    let found = mobius_volume(&c, budget, seed)?;
    let mut result = to_value(&found)?;
    result["sup_angle"] = angle(found.sup_estimate);
    result["initial_angle"] = angle(found.initial_length);
    result["margin_to_4pi"] = json!(4.0 * PI - found.sup_estimate);
    let report = Report {
        command: "mobius-vol",
        result,
        required: &[
            "initial_length",
            "searched",
            "sup_estimate",
            "argmax_a",
            "lower_estimate",
        ],
        table: None,
        exit_code: 0,
    };
    Ok((report, to_value(&budget)?))
}

fn cone_density(file: &CurveFile, point: &[f64]) -> Result<(Report, Value), CliError> {
    let s = file.space()?;
    let c = file.polygonal()?;
    if point.is_empty() {
        return Err(CliError::Input("--point is required".into()));
    }
    let p = s.point(point.to_vec())?;
    let r = density_report(&s, &p, &c)?;
    let mut result = to_value(&r)?;
    result["angle_form"] = angle(r.angle);
    result["margin"] = json!(r.margin());
    let report = Report {
        command: "cone-density",
        result,
        required: &["angle", "density", "case", "bound_applied", "pass"],
        table: None,
        exit_code: if r.pass { 0 } else { 2 },
    };
    Ok((report, json!({})))
}

fn hyp_density(
    file: &CurveFile,
    radii: &[f64],
    tol: Option<f64>,
) -> Result<(Report, Value), CliError> {
    let cone = ConeSurface::new(file.sampled()?);
    let check = density_bound_check(&cone, 2)?;
    let mut table = Table::new(&["R", "integral"]);
    let mut values = Vec::new();
    for &r in radii {
        let v = cone_boundary_integral(&cone, 2, r)?;
        table.push(vec![num(r), num(v)]);
        values.push(json!({ "R": r, "integral": v }));
    }
    let spread = values
        .iter()
        .map(|v| v["integral"].as_f64().unwrap_or(f64::NAN))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
            (lo.min(x), hi.max(x))
        });
    let tol = tol.unwrap_or(1e-6);
    let violated = check.slack < -tol;
    let mut result = to_value(&check)?;
    result["radius_sweep"] = json!(values);
    result["radius_spread"] = json!(if values.is_empty() {
        0.0
    } else {
        spread.1 - spread.0
    });
    result["violated"] = json!(violated);
    let report = Report {
        command: "hyp-density",
        result,
        required: &[
            "measured",
            "bound",
            "slack",
            "theta",
            "radius_sweep",
            "violated",
        ],
        table: Some(table),
        exit_code: if violated { 2 } else { 0 },
    };
    Ok((report, json!({})))
}

fn h2xr_check(radii: &[f64], instances: usize, seed: u64) -> Result<(Report, Value), CliError> {
    let laplacian_samples = instances.saturating_mul(1000);
    let suite = calculus_suite(instances, laplacian_samples, seed)?;
    let graph = DecayingGraph::new(0.5, 1.0)?;
    let rows = end_curve_sweep(&graph, radii)?;
    let mut table = Table::new(&["r", "flat", "decaying", "gap"]);
    for row in &rows {
        table.push(vec![
            num(row.r),
            num(row.flat),
            num(row.decaying),
            num(row.gap),
        ]);
    }
    let flat_exact = rows.iter().all(|row| (row.flat - 2.0 * PI).abs() < 1e-12);
    let passed = suite.passed() && flat_exact;
    let result = json!({
        "suite": to_value(&suite)?,
        "graph": to_value(&graph)?,
        "end_curve": to_value(&rows)?,
        "flat_exact": flat_exact,
        "passed": passed,
    });
    let report = Report {
        command: "h2xr-check",
        result,
        required: &["suite", "end_curve", "passed"],
        table: Some(table),
        exit_code: if passed { 0 } else { 2 },
    };
    Ok((
        report,
        json!({ "instances": instances, "laplacian_samples": laplacian_samples }),
    ))
}

fn knot_det(file: &CurveFile, directions: usize, seed: u64) -> Result<(Report, Value), CliError> {
    let c = file.polygonal()?;
    let mut rng = seeded(seed);
    let mut table = Table::new(&[
        "direction_x",
        "direction_y",
        "direction_z",
        "crossings",
        "determinant",
    ]);
    let mut dets = Vec::with_capacity(directions);
    let mut first = None;
    for _ in 0..directions {
        let u = unit_vector(&mut rng, 3);
        let d = project(&c, [u[0], u[1], u[2]])?;
        let det = determinant(&d);
        table.push(vec![
            num(d.direction[0]),
            num(d.direction[1]),
            num(d.direction[2]),
            d.crossings.len().to_string(),
            det.to_string(),
        ]);
        if first.is_none() {
            first = Some(d);
        }
        dets.push(det);
    }
    let consistent = dets.windows(2).all(|w| w[0] == w[1]);
    let det = dets.first().copied().unwrap_or(1);
    let finding = match (consistent, det) {
        (false, _) => "determinants disagree across directions",
        (true, 1) => "no obstruction found",
        (true, _) => "knotted",
    };
    let result = json!({
        "determinant": det,
        "determinants": dets,
        "consistent": consistent,
        "finding": finding,
        "diagram": to_value(&first)?,
    });
    let report = Report {
        command: "knot-det",
        result,
        required: &["determinant", "determinants", "consistent", "finding"],
        table: Some(table),
        exit_code: if consistent { 0 } else { 2 },
    };
    Ok((report, json!({ "directions": directions })))
}
