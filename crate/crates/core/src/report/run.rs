use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::{
    parse_config, positioned, Experiment, ExperimentConfig, FieldError, SpaceSpec,
};
use crate::bounds::BoundCurve;
use crate::concentration::{
    estimate_isoperimetric_sphere, estimate_profile, estimate_waist, verify_chain, BandDistance,
    ConcentrationProfile, WaistEstimate,
};
use crate::error::{Error, Result};
use crate::homogeneous::sphere::unit_vector_angle;
use crate::homogeneous::{
    grassmann_distance, Grassmannian, Rotation, RotationGroup, SampleSpace, SeededSampler, Sphere,
    SpherePoint, Subspace,
};
use crate::io::{
    field_table, fmt_num, sidecar_paths, write_sample_dump, write_with_manifest, FieldManifest,
    SampleManifest, Table, VERSION,
};
use crate::metric::{gh_distance_small, FiniteMetricSpace};
use crate::par::Execution;
use crate::pinching::{
    classification_verdict, covering_characteristic, dimension_bound_n1, empirical_lipschitz,
    euler_characteristic, inequality_dimension_bound, pointwise_pinched, SpaceKind,
    WALLACH_CRITICAL_LOWER,
};

/// Command-line overrides applied on top of a parsed config.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<String>,
}

/// Files written by one experiment and its headline results.
#[derive(Debug, Clone, Serialize)]
pub struct RunOutcome {
    pub csv: PathBuf,
    pub manifest: PathBuf,
    pub verdict: Option<PathBuf>,
    pub results: Value,
}

struct Report {
    table: Table,
    results: Value,
    verdict: Option<Value>,
    field: Option<FieldManifest>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Manifest<'a> {
    config: &'a ExperimentConfig,
    version: &'static str,
    wall_time_seconds: f64,
    csv: String,
    results: &'a Value,
    #[serde(flatten)]
    field: Option<&'a FieldManifest>,
}

/// Parses `source`, applies the overrides and runs the experiment.
pub fn run_source(source: &str, overrides: &Overrides) -> Result<RunOutcome> {
    let mut cfg = parse_config(source)?;
    if let Some(seed) = overrides.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &overrides.out {
        cfg.out = out.clone();
    }
    cfg.validate().map_err(|e| positioned(source, &e))?;
    run(&cfg)
}

/// Runs one experiment and writes `<out>.csv` with `<out>.manifest.json`
/// (plus `<out>.verdict.json` for `pinch`).
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    cfg.validate().map_err(unpositioned)?;
    let start = Instant::now();
    let name = cfg.experiment.name();
    let report = match cfg.experiment {
        Experiment::Profile => profile(cfg),
        Experiment::Waist => waist(cfg),
        Experiment::Chain => chain(cfg),
        Experiment::Bounds => bounds(cfg),
        Experiment::Gh => gh(cfg),
        Experiment::Pinch => pinch(cfg),
        Experiment::N1 => n1(cfg),
        Experiment::Euler => euler(cfg),
    }
    .map_err(|e| match e {
        Error::Estimator(m) => Error::Estimator(format!("{name}: {m}")),
        Error::InvalidInput(m) => Error::InvalidInput(format!("{name}: {m}")),
        other => other,
    })?;
    let wall_time_seconds = start.elapsed().as_secs_f64();

    let prefix = Path::new(&cfg.out);
    let (csv, manifest_path) = sidecar_paths(prefix);
    let manifest = Manifest {
        config: cfg,
        version: VERSION,
        wall_time_seconds,
        csv: csv
            .file_name()
            .map(|f| f.to_string_lossy().into_owned())
            .unwrap_or_default(),
        results: &report.results,
        field: report.field.as_ref(),
    };
    write_with_manifest(prefix, &report.table, &manifest)?;
    let verdict = match &report.verdict {
        Some(v) => {
            let path = PathBuf::from(format!("{}.verdict.json", cfg.out));
            std::fs::write(&path, serde_json::to_string_pretty(v)? + "\n")?;
            Some(path)
        }
        None => None,
    };
    Ok(RunOutcome {
        csv,
        manifest: manifest_path,
        verdict,
        results: report.results,
    })
}

fn unpositioned(e: FieldError) -> Error {
    Error::InvalidInput(format!("{}: {}", e.key, e.message))
}

fn sampler(cfg: &ExperimentConfig) -> SeededSampler {
    SeededSampler::new(cfg.seed, 0)
}

fn bool_cell(b: bool) -> String {
    b.to_string()
}

fn coordinate_plane(n: usize, k: usize) -> Result<Subspace> {
    Subspace::coordinate(n, &(0..k).collect::<Vec<_>>())
}

/// Distance from a sphere point to the set where `f` lies within δ of `m`,
/// for the two sphere functions. Both depend only on the angle θ to the
/// pole, so the nearest band point lies on the same meridian.
fn sphere_band_distance(function: &str) -> impl Fn(&SpherePoint, f64, f64) -> f64 + Sync {
    let coordinate = function == "coordinate";
    move |p: &SpherePoint, m: f64, delta: f64| {
        let x0 = p.coords()[0].clamp(-1.0, 1.0);
        let theta = x0.acos();
        let (lo, hi) = if coordinate {
            ((m + delta).min(1.0).acos(), (m - delta).max(-1.0).acos())
        } else {
            (m - delta, m + delta)
        };
        (lo - theta).max(theta - hi).max(0.0)
    }
}

fn sphere_function(function: &str, n: usize) -> impl Fn(&SpherePoint) -> f64 + Sync + Send {
    let coordinate = function == "coordinate";
    let pole = SpherePoint::pole(n);
    move |p: &SpherePoint| {
        if coordinate {
            p.coords()[0]
        } else {
            unit_vector_angle(p.coords(), pole.coords())
        }
    }
}

fn grid_and_count(cfg: &ExperimentConfig) -> Result<(Vec<f64>, usize, &SpaceSpec)> {
    Ok((
        cfg.require_grid().map_err(unpositioned)?,
        cfg.require_samples().map_err(unpositioned)?,
        cfg.require_space().map_err(unpositioned)?,
    ))
}

fn profile(cfg: &ExperimentConfig) -> Result<Report> {
    let (eps, count, space) = grid_and_count(cfg)?;
    let function = cfg.function.as_deref().unwrap_or_default();
    let s = sampler(cfg);
    let n = space.n;
    let mut resampled = None;
    let (prof, bound): (ConcentrationProfile, BoundCurve) = match space.kind.as_str() {
        "sphere" => (
            estimate_profile(
                &Sphere::new(n)?,
                sphere_function(function, n),
                &s,
                &eps,
                count,
            )?,
            BoundCurve::by_name("levy-milman", n as f64)?,
        ),
        "grassmannian" => {
            let k = space.k.unwrap_or(2);
            let g = Grassmannian::new(k, n)?;
            let p0 = coordinate_plane(n, k)?;
            let prof = estimate_profile(
                &g,
                |p: &Subspace| grassmann_distance(p, &p0).unwrap_or(f64::NAN),
                &s,
                &eps,
                count,
            )?;
            resampled = Some(g.resampled());
            (prof, BoundCurve::by_name("grassmann-tail", n as f64)?)
        }
        _ => (
            estimate_profile(
                &RotationGroup::new(n)?,
                |r: &Rotation| r.matrix()[(0, 0)],
                &s,
                &eps,
                count,
            )?,
            BoundCurve::by_name("so-n", n as f64)?,
        ),
    };
    let mut table = Table::new(["epsilon", "tail", "stderr", "bound"]);
    let mut holds = true;
    for ((&e, &tail), &se) in eps.iter().zip(&prof.tail_fractions).zip(&prof.stderrs) {
        let b = bound.eval(e);
        holds &= tail <= b;
        table.push(vec![fmt_num(e), fmt_num(tail), fmt_num(se), fmt_num(b)]);
    }
    let mut results = json!({
        "median": prof.median,
        "samples": count,
        "bound": bound.name(),
        "boundHolds": holds,
    });
    if let Some(r) = resampled {
        results["resampled"] = json!(r);
    }
    Ok(Report {
        table,
        results,
        verdict: None,
        field: None,
    })
}

fn sphere_waist(cfg: &ExperimentConfig, function: &str) -> Result<WaistEstimate> {
    let (eps, count, space) = grid_and_count(cfg)?;
    let dist = sphere_band_distance(function);
    estimate_waist(
        &Sphere::new(space.n)?,
        sphere_function(function, space.n),
        BandDistance::Exact(&dist),
        &sampler(cfg),
        &eps,
        count,
        cfg.delta,
    )
}

fn waist(cfg: &ExperimentConfig) -> Result<Report> {
    let (eps, count, space) = grid_and_count(cfg)?;
    let function = cfg.function.as_deref().unwrap_or_default();
    let w = match space.kind.as_str() {
        "sphere" => sphere_waist(cfg, function)?,
        _ => {
            let k = space.k.unwrap_or(2);
            let g = Grassmannian::new(k, space.n)?;
            let p0 = coordinate_plane(space.n, k)?;
            let metric = |a: &Subspace, b: &Subspace| grassmann_distance(a, b).unwrap_or(f64::NAN);
            estimate_waist(
                &g,
                |p: &Subspace| grassmann_distance(p, &p0).unwrap_or(f64::NAN),
                BandDistance::PointCloud {
                    metric: &metric,
                    lipschitz_pruning: true,
                },
                &sampler(cfg),
                &eps,
                count,
                cfg.delta,
            )?
        }
    };
    let mut table = Table::new(["epsilon", "tube_measure", "stderr"]);
    for ((&e, &m), &se) in eps.iter().zip(&w.tube_measures).zip(&w.stderrs) {
        table.push(vec![fmt_num(e), fmt_num(m), fmt_num(se)]);
    }
    Ok(Report {
        table,
        results: json!({
            "median": w.median,
            "delta": w.level_band_delta,
            "bandSize": w.band_size,
            "bandMass": w.band_mass,
            "samples": w.samples,
        }),
        verdict: None,
        field: None,
    })
}

/// Default tolerance of the chain check, in standard errors.
pub const DEFAULT_SIGMAS: f64 = 3.0;

fn chain(cfg: &ExperimentConfig) -> Result<Report> {
    let (eps, count, space) = grid_and_count(cfg)?;
    let function = cfg.function.as_deref().unwrap_or("distance-to-pole");
    let prof = estimate_profile(
        &Sphere::new(space.n)?,
        sphere_function(function, space.n),
        &sampler(cfg),
        &eps,
        count,
    )?;
    let w = sphere_waist(cfg, function)?;
    let alpha = estimate_isoperimetric_sphere(space.n, &eps)?;
    let sigmas = cfg.sigmas.unwrap_or(DEFAULT_SIGMAS);
    let report = verify_chain(&prof, &w, &alpha, sigmas)?;
    let mut table = Table::new([
        "epsilon",
        "tail",
        "waist",
        "alpha",
        "tail_below_twice_alpha",
        "waist_above_isoperimetric",
        "waist_below_concentration",
    ]);
    for r in &report.rows {
        table.push(vec![
            fmt_num(r.epsilon),
            fmt_num(r.tail),
            fmt_num(r.waist),
            fmt_num(r.alpha),
            bool_cell(r.tail_below_twice_alpha),
            bool_cell(r.waist_above_isoperimetric),
            bool_cell(r.waist_below_concentration),
        ]);
    }
    Ok(Report {
        table,
        results: json!({
            "pass": report.pass,
            "sigmas": sigmas,
            "median": prof.median,
            "delta": w.level_band_delta,
            "bandMass": w.band_mass,
            "samples": count,
        }),
        verdict: None,
        field: None,
    })
}

fn bounds(cfg: &ExperimentConfig) -> Result<Report> {
    let eps = cfg.require_grid().map_err(unpositioned)?;
    let specs = cfg.curves.as_deref().unwrap_or_default();
    let mut labels = Vec::with_capacity(specs.len());
    let mut curves = Vec::with_capacity(specs.len());
    for c in specs {
        let param = c
            .param
            .unwrap_or_else(|| cfg.space.as_ref().map_or(0.0, |s| s.n as f64));
        let mut curve = BoundCurve::by_name(&c.name, param)?;
        let mut label = format!("{}({param})", c.name);
        if let Some(l) = c.lipschitz {
            curve = curve.pushforward(l)?;
            label = format!("{label}@L={l}");
        }
        labels.push(label);
        curves.push(curve);
    }
    let mut table =
        Table::new(std::iter::once("epsilon".to_string()).chain(labels.iter().cloned()));
    for &e in &eps {
        table.push(
            std::iter::once(fmt_num(e))
                .chain(curves.iter().map(|c| fmt_num(c.eval(e))))
                .collect(),
        );
    }
    Ok(Report {
        table,
        results: json!({ "curves": labels }),
        verdict: None,
        field: None,
    })
}

fn load_space(v: &Value) -> Result<FiniteMetricSpace> {
    match v {
        Value::String(path) => FiniteMetricSpace::from_json(&std::fs::read_to_string(path)?),
        other => FiniteMetricSpace::from_json(&other.to_string()),
    }
}

fn random_plane_space<R: Rng>(rng: &mut R, max_points: usize) -> Result<FiniteMetricSpace> {
    let size = rng.random_range(1..=max_points);
    let pts: Vec<[f64; 2]> = (0..size)
        .map(|_| [rng.random::<f64>(), rng.random::<f64>()])
        .collect();
    FiniteMetricSpace::from_points(&pts, |a, b| (a[0] - b[0]).hypot(a[1] - b[1]))
}

fn gh(cfg: &ExperimentConfig) -> Result<Report> {
    let pairs: Vec<(FiniteMetricSpace, FiniteMetricSpace)> = match &cfg.spaces {
        Some(spaces) => vec![(load_space(&spaces[0])?, load_space(&spaces[1])?)],
        None => {
            let s = sampler(cfg);
            let m = cfg.max_points.unwrap_or(5);
            let count = cfg.samples.unwrap_or(1);
            Execution::Parallel
                .map_chunks(count, |i| {
                    let mut rng = s.chunk_rng(i as u64);
                    Ok((
                        random_plane_space(&mut rng, m)?,
                        random_plane_space(&mut rng, m)?,
                    ))
                })
                .into_iter()
                .collect::<Result<_>>()?
        }
    };
    let distances = Execution::Parallel
        .map_chunks(pairs.len(), |i| gh_distance_small(&pairs[i].0, &pairs[i].1))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    let mut table = Table::new([
        "pair",
        "x_points",
        "y_points",
        "gh_distance",
        "half_max_diameter",
    ]);
    let mut within = true;
    for (i, ((x, y), d)) in pairs.iter().zip(&distances).enumerate() {
        let half = 0.5 * x.diameter().max(y.diameter());
        within &= *d <= half;
        table.push(vec![
            i.to_string(),
            x.len().to_string(),
            y.len().to_string(),
            fmt_num(*d),
            fmt_num(half),
        ]);
    }
    Ok(Report {
        table,
        results: json!({
            "pairs": pairs.len(),
            "maxDistance": distances.iter().copied().fold(0.0, f64::max),
            "withinHalfDiameter": within,
        }),
        verdict: None,
        field: None,
    })
}

/// Default pinching threshold.
pub const DEFAULT_PINCH_DELTA: f64 = 0.25;

fn pinch(cfg: &ExperimentConfig) -> Result<Report> {
    let space = cfg.require_space().map_err(unpositioned)?;
    let count = cfg.require_samples().map_err(unpositioned)?;
    let fixture = cfg
        .field
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("pinch needs a field fixture".into()))?;
    let s = sampler(cfg);
    let field = fixture.generate(space.n, count, &s)?;
    let delta = cfg.delta.unwrap_or(DEFAULT_PINCH_DELTA);
    let strict = cfg.strict.unwrap_or(false);
    let pinched = pointwise_pinched(&field, delta, strict)?;
    let verdict = classification_verdict(space.n, pinched, WALLACH_CRITICAL_LOWER)?;
    let trend = cfg
        .dims
        .as_deref()
        .unwrap_or_default()
        .iter()
        .map(|&n| {
            let f = fixture.generate(n, count, &s.fork(n as u64))?;
            Ok(json!({ "n": n, "lipschitz": empirical_lipschitz(&f)? }))
        })
        .collect::<Result<Vec<Value>>>()?;
    let record = json!({
        "n": space.n,
        "fixture": fixture,
        "delta": delta,
        "strict": strict,
        "pinched": pinched,
        "label": verdict.label,
        "annotation": verdict.annotation,
        "stats": field.stats(),
        "lipschitzTrend": trend,
        "lipschitzNote": "empirical Lipschitz constants are lower bounds from sampled pairs; no limit in n is asserted",
    });
    Ok(Report {
        table: field_table(&field)?,
        results: record.clone(),
        verdict: Some(record),
        field: Some(FieldManifest {
            n: space.n,
            count,
            generator: fixture.name().to_string(),
            seed: cfg.seed,
        }),
    })
}

fn n1(cfg: &ExperimentConfig) -> Result<Report> {
    let mut table = Table::new(["diameter", "n1", "n_exact_half_diameter"]);
    let mut values = Vec::new();
    for &d in cfg.diameters.as_deref().unwrap_or_default() {
        let n = dimension_bound_n1(d)?;
        values.push(n);
        table.push(vec![
            fmt_num(d),
            n.to_string(),
            inequality_dimension_bound(d / 2.0)?.to_string(),
        ]);
    }
    Ok(Report {
        table,
        results: json!({ "n1": values }),
        verdict: None,
        field: None,
    })
}

fn euler(cfg: &ExperimentConfig) -> Result<Report> {
    let space = cfg.require_space().map_err(unpositioned)?;
    let kind: SpaceKind = space.kind.parse()?;
    let dims = cfg.dims.clone().unwrap_or_else(|| vec![space.n]);
    let degree = cfg.degree.unwrap_or(1);
    let mut table = Table::new([
        "kind",
        "n",
        "euler_characteristic",
        "degree",
        "covering_characteristic",
    ]);
    let mut rows = Vec::new();
    for n in dims {
        let dim =
            u32::try_from(n).map_err(|_| Error::InvalidInput(format!("n = {n} is too large")))?;
        let chi = euler_characteristic(kind, dim)?;
        let cover = covering_characteristic(chi, degree)?;
        table.push(vec![
            kind.to_string(),
            n.to_string(),
            chi.to_string(),
            degree.to_string(),
            cover.to_string(),
        ]);
        rows.push(json!({ "n": n, "chi": chi, "coveringChi": cover }));
    }
    Ok(Report {
        table,
        results: json!({ "kind": kind, "degree": degree, "rows": rows }),
        verdict: None,
        field: None,
    })
}

fn flat_samples<S, F>(space: &S, s: &SeededSampler, count: usize, flatten: F) -> Vec<Vec<f64>>
where
    S: SampleSpace,
    F: Fn(S::Point) -> Vec<f64> + Sync + Send,
{
    s.map_samples(space, count, flatten)
}

/// Writes `count` samples of `space` as `<prefix>.csv` (one flattened point
/// per row; frames and matrices column-major) and `<prefix>.manifest.json`.
pub fn dump_samples(
    space: &SpaceSpec,
    count: usize,
    seed: u64,
    prefix: &Path,
) -> Result<(PathBuf, PathBuf)> {
    if count == 0 {
        return Err(Error::InvalidInput("sample count must be positive".into()));
    }
    let s = SeededSampler::new(seed, 0);
    let n = space.n;
    let (rows, dim, ambient) = match space.kind.as_str() {
        "sphere" => (
            flat_samples(&Sphere::new(n)?, &s, count, SpherePoint::into_coords),
            n,
            n + 1,
        ),
        "grassmannian" => {
            let k = space.k.unwrap_or(2);
            let g = Grassmannian::new(k, n)?;
            (
                flat_samples(&g, &s, count, |p| p.frame().as_slice().to_vec()),
                k * (n - k),
                n * k,
            )
        }
        "rotation" => (
            flat_samples(&RotationGroup::new(n)?, &s, count, |r| {
                r.matrix().as_slice().to_vec()
            }),
            n * (n - 1) / 2,
            n * n,
        ),
        other => {
            return Err(Error::InvalidInput(format!(
                "cannot sample space kind '{other}'"
            )))
        }
    };
    let manifest = SampleManifest::new(&space.kind, dim, ambient, count, &s);
    let (csv_path, manifest_path) = sidecar_paths(prefix);
    if let Some(dir) = csv_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(
        &manifest_path,
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    let mut buf = Vec::new();
    write_sample_dump(&mut buf, &rows, &manifest)?;
    std::fs::write(&csv_path, buf)?;
    Ok((csv_path, manifest_path))
}
