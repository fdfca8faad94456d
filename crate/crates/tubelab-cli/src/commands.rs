//! Executors behind each subcommand. Every executor parses its parameters
//! up front, rejects the ones it does not use, and renders exactly one
//! document in the requested format.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use tubelab::concentration::{scan_concentration, ConcentrationFamily, EpsSchedule};
use tubelab::mmdist::{
    box_bound_via_tube, box_exact, implication_audit, w1_exact, AuditInstance, FiniteMMSpace,
};
use tubelab::sphere_lab::{empirical_complement, sample_sphere};
use tubelab::tube::{weyl_flat_volume, weyl_sphere_volume, Ambient, TubeSpec};

use crate::config::{parse_float_list, CliError, CommandKind, OutputFormat, Params, RunConfig};

/// Executes a validated configuration and returns the output document.
pub fn run(config: &RunConfig) -> Result<String, CliError> {
    let params = Params::new(config.params.clone());
    match config.command {
        CommandKind::Tube => tube(params, config.format),
        CommandKind::Scan => scan(params, config.format),
        CommandKind::Sample => sample(params, config.seed, config.format),
        CommandKind::Mmdist => mmdist(params, config.format),
        CommandKind::Audit => audit(params, config.format),
    }
}

#[derive(Serialize)]
struct TubeReport {
    ambient: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    radius: Option<f64>,
    n: u32,
    q: u32,
    eps: f64,
    vol_m: f64,
    kappa: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weyl_flat_volume: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weyl_sphere_volume: Option<f64>,
}

fn tube(mut params: Params, format: OutputFormat) -> Result<String, CliError> {
    let ambient_name = params.take("ambient")?;
    let radius = params.parse_opt::<f64>("radius")?;
    let n: u32 = params.parse("n")?;
    let q: u32 = params.parse("q")?;
    let eps: f64 = params.parse("eps")?;
    let vol_m: f64 = params.parse("vol_m")?;
    let kappa = match params.take_opt("kappa") {
        Some(raw) => parse_float_list("kappa", &raw)?,
        None => vec![0.0; (n / 2) as usize],
    };
    params.finish()?;

    let ambient = match ambient_name.as_str() {
        "flat" => {
            if radius.is_some() {
                return Err(CliError::invalid("--radius only applies to the sphere ambient"));
            }
            Ambient::Flat
        }
        "sphere" => Ambient::Sphere {
            radius: radius
                .ok_or_else(|| CliError::invalid("the sphere ambient requires --radius"))?,
        },
        other => {
            return Err(CliError::invalid(format!(
                "unknown ambient {other:?}; expected flat or sphere"
            )))
        }
    };

    let spec = TubeSpec::new(ambient, n, q, eps, vol_m, kappa.clone())?;
    let mut report = TubeReport {
        ambient: ambient_name,
        radius,
        n,
        q,
        eps,
        vol_m,
        kappa,
        weyl_flat_volume: None,
        weyl_sphere_volume: None,
    };
    let volume = match spec.ambient() {
        Ambient::Flat => {
            let v = weyl_flat_volume(&spec)?;
            report.weyl_flat_volume = Some(v);
            v
        }
        _ => {
            let v = weyl_sphere_volume(&spec)?;
            report.weyl_sphere_volume = Some(v);
            v
        }
    };

    match format {
        OutputFormat::Json => to_pretty_json(&report),
        OutputFormat::Csv => {
            let radius_cell = report.radius.map(|r| r.to_string()).unwrap_or_default();
            Ok(format!(
                "ambient,radius,n,q,eps,vol_m,volume\n{},{},{},{},{},{},{}\n",
                report.ambient, radius_cell, n, q, eps, vol_m, volume
            ))
        }
    }
}

fn scan(mut params: Params, format: OutputFormat) -> Result<String, CliError> {
    let family_name = params.take("family")?;
    let schedule_text = params.take("schedule")?;
    let range_text = params.take("n")?;
    let tol = params.parse_opt::<f64>("tol")?.unwrap_or(1e-3);
    params.finish()?;

    let family = match family_name.as_str() {
        "equator" => ConcentrationFamily::equators(),
        other => {
            return Err(CliError::invalid(format!(
                "unknown family {other:?}; expected equator"
            )))
        }
    };
    let schedule = parse_schedule(&schedule_text)?;
    let n_range = parse_dimension_range(&range_text)?;
    let result = scan_concentration(&family, &schedule, &n_range, tol)?;
    match format {
        OutputFormat::Json => Ok(result.to_json()?),
        OutputFormat::Csv => Ok(result.to_csv()),
    }
}

/// Schedules are written as "c*n^-k", "n^-k", or "const:eps0".
fn parse_schedule(text: &str) -> Result<EpsSchedule, CliError> {
    let usage = || {
        CliError::invalid(format!(
            "schedule {text:?} not understood; expected \"c*n^-k\", \"n^-k\", or \"const:eps0\""
        ))
    };
    if let Some(rest) = text.strip_prefix("const:") {
        let eps0: f64 = rest.parse().map_err(|_| usage())?;
        return Ok(EpsSchedule::constant(eps0)?);
    }
    let (c, power_part) = match text.split_once('*') {
        Some((head, tail)) => (head.parse::<f64>().map_err(|_| usage())?, tail),
        None => (1.0, text),
    };
    let k: f64 = power_part.strip_prefix("n^-").ok_or_else(usage)?.parse().map_err(|_| usage())?;
    Ok(EpsSchedule::power(c, k)?)
}

/// Dimension ranges are written "start:stop:step", inclusive of `stop` when
/// the step lands on it.
fn parse_dimension_range(text: &str) -> Result<Vec<u32>, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let [start, stop, step] = parts.as_slice() else {
        return Err(CliError::invalid(format!(
            "range {text:?} not understood; expected \"start:stop:step\""
        )));
    };
    let parse = |piece: &str| {
        piece
            .parse::<u32>()
            .map_err(|e| CliError::invalid(format!("invalid range entry {piece:?}: {e}")))
    };
    let (start, stop, step) = (parse(start)?, parse(stop)?, parse(step)?);
    if step == 0 {
        return Err(CliError::invalid("range step must be positive"));
    }
    if start > stop {
        return Err(CliError::invalid(format!("range start {start} exceeds stop {stop}")));
    }
    Ok((start..=stop).step_by(step as usize).collect())
}

#[derive(Serialize)]
struct SampleReport {
    n: u32,
    count: usize,
    seed: u64,
    mean_abs_colatitude: f64,
    mean_sq_colatitude: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    complement: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stderr: Option<f64>,
}

fn sample(mut params: Params, seed: u64, format: OutputFormat) -> Result<String, CliError> {
    let n: u32 = params.parse("n")?;
    let count: usize = params.parse("count")?;
    let eps = params.parse_opt::<f64>("eps")?;
    params.finish()?;

    let cloud = sample_sphere(n, count, seed)?;
    match format {
        OutputFormat::Csv => Ok(cloud.to_csv()),
        OutputFormat::Json => {
            let total = cloud.len() as f64;
            let mean_abs = cloud.colatitudes().iter().map(|c| c.abs()).sum::<f64>() / total;
            let mean_sq = cloud.colatitudes().iter().map(|c| c * c).sum::<f64>() / total;
            let mut report = SampleReport {
                n,
                count,
                seed,
                mean_abs_colatitude: mean_abs,
                mean_sq_colatitude: mean_sq,
                eps,
                complement: None,
                stderr: None,
            };
            if let Some(eps) = eps {
                let (p, se) = empirical_complement(&cloud, eps)?;
                report.complement = Some(p);
                report.stderr = Some(se);
            }
            to_pretty_json(&report)
        }
    }
}

#[derive(Serialize)]
struct MmdistReport {
    kind: String,
    cost: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    duality_gap: Option<f64>,
}

fn mmdist(mut params: Params, format: OutputFormat) -> Result<String, CliError> {
    let kind = params.take("kind")?;
    let report = match kind.as_str() {
        "w1" => {
            let space = load_space(&params.take("space")?)?;
            let nu = parse_float_list("nu", &params.take("nu")?)?;
            params.finish()?;
            let plan = w1_exact(&space, &nu)?;
            MmdistReport {
                kind,
                cost: plan.cost(),
                duality_gap: Some(plan.duality_gap()),
            }
        }
        "box" => {
            let space = load_space(&params.take("space")?)?;
            let other = load_space(&params.take("other")?)?;
            params.finish()?;
            MmdistReport { kind, cost: box_exact(&space, &other)?, duality_gap: None }
        }
        "bound" => {
            let mass: f64 = params.parse("mass")?;
            let eps: f64 = params.parse("eps")?;
            params.finish()?;
            MmdistReport { kind, cost: box_bound_via_tube(mass, eps)?, duality_gap: None }
        }
        other => {
            return Err(CliError::invalid(format!(
                "unknown kind {other:?}; expected w1, box, or bound"
            )))
        }
    };
    match format {
        OutputFormat::Json => to_pretty_json(&report),
        OutputFormat::Csv => {
            let gap_cell = report.duality_gap.map(|g| g.to_string()).unwrap_or_default();
            Ok(format!("kind,cost,duality_gap\n{},{},{}\n", report.kind, report.cost, gap_cell))
        }
    }
}

fn load_space(path: &str) -> Result<FiniteMMSpace, CliError> {
    let text = fs::read_to_string(Path::new(path))
        .map_err(|e| CliError::invalid(format!("cannot read {path}: {e}")))?;
    Ok(FiniteMMSpace::from_json(&text)?)
}

/// One audit entry on disk: a space plus the locus it should concentrate on.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDto {
    label: String,
    space: serde_json::Value,
    locus: Vec<usize>,
    eps: f64,
}

fn audit(mut params: Params, format: OutputFormat) -> Result<String, CliError> {
    let path = params.take("instances")?;
    params.finish()?;

    let text = fs::read_to_string(Path::new(&path))
        .map_err(|e| CliError::invalid(format!("cannot read {path}: {e}")))?;
    let dtos: Vec<InstanceDto> = serde_json::from_str(&text)
        .map_err(|e| CliError::invalid(format!("malformed instance file {path}: {e}")))?;
    let instances: Vec<AuditInstance> = dtos
        .into_iter()
        .map(|dto| {
            let space = FiniteMMSpace::from_json(&dto.space.to_string())?;
            Ok(AuditInstance::new(dto.label, space, dto.locus, dto.eps)?)
        })
        .collect::<Result<_, CliError>>()?;
    let report = implication_audit(&instances)?;
    match format {
        OutputFormat::Json => Ok(report.to_json()?),
        OutputFormat::Csv => Ok(report.to_csv()),
    }
}

fn to_pretty_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map_err(|e| CliError::invalid(format!("cannot serialize report: {e}")))
}
