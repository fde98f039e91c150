use std::path::{Path, PathBuf};
use std::time::Instant;

use pat_core::acoustic::{AcousticOperator, Geometry, MemoryBudget, SensorArray, TimeAxis};
use pat_core::experiments::{
    available_sensors, bilinear_resample, condition_study, cross_section, layout_summary,
    make_phantom, relative_error, sensor_layout, simulate_for_reconstruction, write_condition_csv,
    NoiseModel, Phantom, Shape,
};
use pat_core::filters_check::run_filters_check;
use pat_core::io::{
    fmt_f64, read_field, read_sensor_data, write_csv, write_field, write_sensor_data,
};
use pat_core::smoothing::{Backend, MaternParams, SmoothingConfig};
use pat_core::solver::{map_to_tikhonov, reconstruct as solve, ReconConfig};
use pat_core::wavelet::WaveletSpec;
use pat_core::{Error, Field, GridSpec};

use crate::config::{Manifest, Settings};
use crate::error::CliError;
use crate::{
    ConditioningArgs, FiltersCheckArgs, GridArgs, PhantomArgs, ReconstructArgs, SensorArgs,
    SimulateArgs,
};

pub const DEFAULT_N: usize = 128;
pub const DEFAULT_SIZE: f64 = 0.02;
pub const DEFAULT_SOUND_SPEED: f64 = 1500.0;
pub const DEFAULT_SENSORS: usize = 80;
pub const DEFAULT_NT: usize = 1200;
pub const DEFAULT_DT: f64 = 4e-8;
pub const DEFAULT_NOISE: f64 = 0.05;
pub const DEFAULT_S: f64 = 1.5;

fn required(value: Option<PathBuf>, settings: &Settings, key: &str) -> Result<PathBuf, CliError> {
    settings
        .pick_opt(value, key)?
        .ok_or_else(|| CliError::Usage(format!("--{key} is required")))
}

fn input_error(path: &Path, e: Error) -> CliError {
    match e {
        Error::Io { source, .. } => {
            CliError::Usage(format!("cannot read input {}: {source}", path.display()))
        }
        other => CliError::Core(other),
    }
}

fn read_field_input(path: &Path) -> Result<Field, CliError> {
    read_field(path).map_err(|e| input_error(path, e))
}

fn grid_from(args: &GridArgs, settings: &Settings) -> Result<GridSpec, CliError> {
    Ok(GridSpec::new(
        settings.pick(args.n, "n", DEFAULT_N)?,
        settings.pick(args.size, "size", DEFAULT_SIZE)?,
        settings.pick(args.sound_speed, "sound-speed", DEFAULT_SOUND_SPEED)?,
        settings.pick(args.pad, "pad", pat_core::grid::DEFAULT_PAD_FACTOR)?,
    )?)
}

fn record_grid(m: &mut Manifest, g: &GridSpec) {
    m.set("n", g.n());
    m.set("size", g.physical_size());
    m.set("sound-speed", g.sound_speed());
    m.set("pad", g.pad_factor());
}

fn sensors_from(
    args: &SensorArgs,
    settings: &Settings,
    grid: &GridSpec,
) -> Result<SensorArray, CliError> {
    let geometry: Geometry = settings
        .pick_opt(args.geometry.clone(), "geometry")?
        .unwrap_or_else(|| "two".into())
        .parse()?;
    let count = settings.pick(args.sensors.clone(), "sensors", DEFAULT_SENSORS.to_string())?;
    let count = match count.as_str() {
        "full" | "all" => available_sensors(grid.n(), geometry),
        other => other.parse().map_err(|_| {
            CliError::Usage(format!(
                "--sensors expects a count or `full`, got `{other}`"
            ))
        })?,
    };
    Ok(sensor_layout(grid, geometry, count)?)
}

fn record_sensors(m: &mut Manifest, s: &SensorArray) {
    m.set("geometry", s.geometry());
    m.set("sensors", s.len());
    m.set("layout", layout_summary(s));
}

fn parse_numbers<const N: usize>(spec: &str, what: &str) -> Result<[f64; N], CliError> {
    let parts: Vec<f64> = spec
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("bad {what} `{spec}`")))?;
    parts
        .try_into()
        .map_err(|_| CliError::Usage(format!("{what} `{spec}` needs {N} comma-separated numbers")))
}

fn shape_list(flags: &[String], settings: &Settings, key: &str) -> Result<Vec<String>, CliError> {
    if !flags.is_empty() {
        return Ok(flags.to_vec());
    }
    Ok(settings
        .pick_opt::<String>(None, key)?
        .map(|v| {
            v.split(';')
                .filter(|s| !s.trim().is_empty())
                .map(str::to_string)
                .collect()
        })
        .unwrap_or_default())
}

pub fn phantom(args: &PhantomArgs, settings: &Settings) -> Result<(), CliError> {
    let start = Instant::now();
    let out = required(args.out.clone(), settings, "out")?;
    let grid = grid_from(&args.grid, settings)?;
    let circles = shape_list(&args.circle, settings, "circle")?;
    let rects = shape_list(&args.rect, settings, "rect")?;
    let default_preset = if circles.is_empty() && rects.is_empty() {
        "paper-like"
    } else {
        "none"
    };
    let preset = settings.pick(args.preset.clone(), "preset", default_preset.to_string())?;
    let background = settings.pick(args.background, "background", 0.0)?;
    let mut phantom = match preset.as_str() {
        "paper-like" => Phantom::standard(grid.physical_size()),
        "none" => Phantom::new(background),
        other => {
            return Err(CliError::Usage(format!(
                "unknown preset `{other}` (paper-like, none)"
            )))
        }
    };
    phantom.background = background;
    for c in &circles {
        let [x, y, radius, value] = parse_numbers::<4>(c, "circle")?;
        phantom.shapes.push(Shape::Circle {
            center: (x, y),
            radius,
            value,
        });
    }
    for r in &rects {
        let [x, y, width, height, value] = parse_numbers::<5>(r, "rect")?;
        phantom.shapes.push(Shape::Rectangle {
            corner: (x, y),
            width,
            height,
            value,
        });
    }
    let field = make_phantom(&grid, &phantom).map_err(|e| match e {
        Error::InvalidParameter {
            name: "shape",
            reason,
        } => CliError::Usage(reason),
        other => other.into(),
    })?;
    write_field(&field, &out)?;

    let mut m = Manifest::new("phantom");
    record_grid(&mut m, &grid);
    m.set("preset", &preset);
    m.set("background", background);
    m.set("circle", circles.join(";"));
    m.set("rect", rects.join(";"));
    m.set("outputs", out.display());
    m.set(
        "elapsed_seconds",
        format!("{:.3}", start.elapsed().as_secs_f64()),
    );
    m.write(&out)?;
    Ok(())
}

pub fn simulate(args: &SimulateArgs, settings: &Settings) -> Result<(), CliError> {
    let start = Instant::now();
    let phantom_path = required(args.phantom.clone(), settings, "phantom")?;
    let out = required(args.out.clone(), settings, "out")?;
    let raw = read_field_input(&phantom_path)?;
    let pad = settings.pick(args.pad, "pad", pat_core::grid::DEFAULT_PAD_FACTOR)?;
    let sim_grid = raw.grid().with_pad_factor(pad)?;
    let phantom = Field::new(sim_grid, raw.into_values())?;
    let n_sim = sim_grid.n();

    let same_grid = settings.switch(args.same_grid, "same-grid")?;
    let n = settings.pick(args.n, "n", if same_grid { n_sim } else { n_sim / 2 })?;
    if same_grid && n != n_sim {
        return Err(CliError::Usage(format!(
            "--same-grid with --n {n} on a {n_sim}x{n_sim} phantom"
        )));
    }
    if !same_grid && n_sim < 2 * n {
        return Err(Error::Unsupported(format!(
            "simulation grid {n_sim} must be at least twice the reconstruction grid {n} (or pass --same-grid)"
        ))
        .into());
    }
    let grid = sim_grid.with_n(n)?;
    let sensors = sensors_from(&args.sensors, settings, &grid)?;
    let nt = settings.pick(args.nt, "nt", DEFAULT_NT)?;
    let dt = settings.pick(args.dt, "dt", DEFAULT_DT)?;
    let times = TimeAxis::new(nt, dt)?;
    let sim_dt = settings.pick(args.sim_dt, "sim-dt", dt * n as f64 / n_sim as f64)?;
    let noise = NoiseModel::new(
        settings.pick(args.noise, "noise", DEFAULT_NOISE)?,
        settings.pick(args.seed, "seed", 1)?,
    )?;
    let data = simulate_for_reconstruction(&phantom, &sensors, &times, sim_dt, &noise)?;
    write_sensor_data(&data, &out)?;

    let mut m = Manifest::new("simulate");
    m.set("phantom", phantom_path.display());
    record_grid(&mut m, &grid);
    m.set("sim-n", n_sim);
    m.set("same-grid", same_grid);
    record_sensors(&mut m, &sensors);
    m.set("nt", nt);
    m.set("dt", dt);
    m.set("sim-dt", sim_dt);
    m.set("noise", noise.std_fraction);
    m.set("seed", noise.seed);
    m.set("outputs", out.display());
    m.set(
        "elapsed_seconds",
        format!("{:.3}", start.elapsed().as_secs_f64()),
    );
    m.write(&out)?;
    Ok(())
}

fn wavelet_for(
    name: Option<String>,
    s: f64,
    depth: usize,
    backend: Backend,
) -> Result<Option<WaveletSpec>, CliError> {
    if backend != Backend::Wavelet {
        return Ok(None);
    }
    Ok(Some(match name {
        Some(name) => WaveletSpec::parse(&name, depth)?,
        None => WaveletSpec::default_for_smoothness(s, depth)?,
    }))
}

fn recon_config(
    args: &ReconstructArgs,
    settings: &Settings,
) -> Result<(ReconConfig, Vec<(&'static str, String)>), CliError> {
    let backend: Backend = settings
        .pick(args.backend.clone(), "backend", "wavelet".to_string())?
        .parse()?;
    let depth = settings.pick(args.depth, "depth", WaveletSpec::DEFAULT_DEPTH)?;
    let wavelet_name = settings.pick_opt(args.wavelet.clone(), "wavelet")?;
    let nu = settings.pick_opt(args.prior_nu, "prior-nu")?;
    let rho = settings.pick_opt(args.prior_rho, "prior-rho")?;
    let beta = settings.pick_opt(args.beta, "beta")?;
    let mut extra = Vec::new();
    let mut cfg = match (nu, rho, beta) {
        (None, None, None) => {
            let s = settings.pick(args.s, "s", DEFAULT_S)?;
            let alpha = settings.pick(args.alpha, "alpha", ReconConfig::DEFAULT_ALPHA)?;
            let wavelet = wavelet_for(wavelet_name, s, depth, backend)?;
            ReconConfig::new(SmoothingConfig::new(s, backend, wavelet)?, alpha)?
        }
        (Some(nu), Some(rho), Some(beta)) => {
            if args.s.is_some() || args.alpha.is_some() {
                return Err(CliError::Usage(
                    "--s/--alpha conflict with a Matérn prior".into(),
                ));
            }
            let prior = MaternParams::new(nu, rho, 2)?;
            let wavelet = wavelet_for(wavelet_name, prior.smoothness(), depth, backend)?;
            extra.push(("prior-nu", nu.to_string()));
            extra.push(("prior-rho", rho.to_string()));
            extra.push(("beta", beta.to_string()));
            map_to_tikhonov(beta, &prior, backend, wavelet)?
        }
        _ => {
            return Err(CliError::Usage(
                "--prior-nu, --prior-rho and --beta go together".into(),
            ))
        }
    };
    cfg.max_iters = settings.pick(args.iters, "iters", cfg.max_iters)?;
    cfg.tol = settings.pick(args.tol, "tol", cfg.tol)?;
    cfg.noise_mean = settings.pick(args.noise_mean, "noise-mean", 0.0)?;
    cfg.prior_mean = settings.pick(args.prior_mean, "prior-mean", 0.0)?;
    cfg.validate()?;
    Ok((cfg, extra))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

pub fn reconstruct(args: &ReconstructArgs, settings: &Settings) -> Result<(), CliError> {
    let start = Instant::now();
    let data_path = required(args.data.clone(), settings, "data")?;
    let out = required(args.out.clone(), settings, "out")?;
    let data = read_sensor_data(&data_path).map_err(|e| input_error(&data_path, e))?;
    let grid = grid_from(&args.grid, settings)?;
    let sensors = sensors_from(&args.sensors, settings, &grid)?;
    let (cfg, extra) = recon_config(args, settings)?;
    let truth = settings
        .pick_opt(args.truth.clone(), "truth")?
        .map(|p| read_field_input(&p).map(|f| (p, f)))
        .transpose()?;
    let section_row = settings.pick_opt(args.section_row, "section-row")?;

    let mut m = Manifest::new("reconstruct");
    m.set("data", data_path.display());
    record_grid(&mut m, &grid);
    record_sensors(&mut m, &sensors);
    m.set("s", cfg.smoothing.s());
    m.set("alpha", cfg.alpha);
    m.set("backend", cfg.smoothing.backend());
    if let Some(w) = cfg.smoothing.wavelet() {
        m.set("wavelet", w.name());
        m.set("depth", w.depth());
    }
    for (k, v) in extra {
        m.set(k, v);
    }
    m.set("iters", cfg.max_iters);
    m.set("tol", cfg.tol);
    m.set("noise-mean", cfg.noise_mean);
    m.set("prior-mean", cfg.prior_mean);

    let op = AcousticOperator::new(sensors, *data.times());
    let result = solve(&op, &data, &cfg)?;
    write_field(&result.estimate, &out)?;
    let history = with_suffix(&out, ".history.csv");
    result.write_history(&history)?;
    let mut outputs = vec![out.display().to_string(), history.display().to_string()];

    if let Some((path, truth)) = &truth {
        m.set("truth", path.display());
        m.set(
            "relative_error",
            fmt_f64(relative_error(&result.estimate, truth)?),
        );
    }
    if let Some(row) = section_row {
        let section = with_suffix(&out, ".section.csv");
        let est = cross_section(&result.estimate, row)?;
        let truth_row = match &truth {
            Some((_, t)) => Some(cross_section(&bilinear_resample(t, &grid)?, row)?),
            None => None,
        };
        let header: &[&str] = if truth_row.is_some() {
            &["x", "estimate", "truth"]
        } else {
            &["x", "estimate"]
        };
        let rows = est.iter().enumerate().map(|(i, (x, v))| {
            let mut r = vec![fmt_f64(*x), fmt_f64(*v)];
            if let Some(t) = &truth_row {
                r.push(fmt_f64(t[i].1));
            }
            r
        });
        write_csv(&section, header, rows)?;
        m.set("section-row", row);
        outputs.push(section.display().to_string());
    }

    let nonincreasing = result.residual_history.windows(2).all(|w| w[1] <= w[0]);
    m.set("outputs", outputs.join(","));
    m.set("evaluations", result.evaluations);
    m.set("iterations", result.iterations);
    m.set("converged", result.converged);
    m.set("breakdown", result.breakdown);
    m.set(
        "final_residual",
        fmt_f64(*result.residual_history.last().unwrap_or(&f64::NAN)),
    );
    m.set("residual_nonincreasing", nonincreasing);
    m.set(
        "elapsed_seconds",
        format!("{:.3}", start.elapsed().as_secs_f64()),
    );
    m.write(&out)?;
    Ok(())
}

pub fn conditioning(args: &ConditioningArgs, settings: &Settings) -> Result<(), CliError> {
    let start = Instant::now();
    let out = required(args.out.clone(), settings, "out")?;
    let grid = GridSpec::any_size(
        settings.pick(args.n, "n", 24)?,
        settings.pick(args.size, "size", DEFAULT_SIZE)?,
        settings.pick(args.sound_speed, "sound-speed", DEFAULT_SOUND_SPEED)?,
        settings.pick(args.pad, "pad", pat_core::grid::DEFAULT_PAD_FACTOR)?,
    )?;
    let max = settings.pick(
        args.max_sensors,
        "max-sensors",
        available_sensors(grid.n(), Geometry::Incremental),
    )?;
    let nt = settings.pick(args.nt, "nt", 60)?;
    let dt = settings.pick(args.dt, "dt", grid.pixel_size() / grid.sound_speed())?;
    let times = TimeAxis::new(nt, dt)?;
    let budget_mib = settings.pick(args.budget_mib, "budget-mib", 2048)?;
    let budget = MemoryBudget(u128::from(budget_mib) << 20);
    let curve = condition_study(&grid, max, &times, budget)?;
    write_condition_csv(&out, &curve)?;

    let mut m = Manifest::new("conditioning");
    m.set("n", grid.n());
    m.set("size", grid.physical_size());
    m.set("sound-speed", grid.sound_speed());
    m.set("pad", grid.pad_factor());
    m.set("max-sensors", max);
    m.set("nt", nt);
    m.set("dt", dt);
    m.set("budget-mib", budget_mib);
    let (first, last) = (curve[0].1, curve[curve.len() - 1].1);
    m.set(
        "min_condition",
        fmt_f64(curve.iter().map(|c| c.1).fold(f64::INFINITY, f64::min)),
    );
    m.set(
        "max_condition",
        fmt_f64(curve.iter().map(|c| c.1).fold(0.0, f64::max)),
    );
    m.set("condition_ratio", fmt_f64(last / first));
    m.set("outputs", out.display());
    m.set(
        "elapsed_seconds",
        format!("{:.3}", start.elapsed().as_secs_f64()),
    );
    m.write(&out)?;
    Ok(())
}

pub fn filters_check(args: &FiltersCheckArgs) -> Result<(), CliError> {
    let report = run_filters_check(args.perturb_constant)?;
    print!("{report}");
    let failed = report.rows.iter().filter(|r| !r.passed()).count();
    if failed > 0 {
        return Err(CliError::Failure(format!(
            "filters-check: {failed} of {} identities failed",
            report.rows.len()
        )));
    }
    Ok(())
}
