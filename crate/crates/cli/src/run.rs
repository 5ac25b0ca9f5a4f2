//! The four subcommands: simulate, scan-band, trajectory, verify.

use std::time::Instant;

use rayon::prelude::*;

use cavity_billiard::billiard::BilliardMap;
use cavity_billiard::error::CavityError;
use cavity_billiard::field_classical::{ExtendedProfile, InitialProfile, PeakHints, SeedProfile};
use cavity_billiard::field_quantum::QuantumProfile;
use cavity_billiard::fit;
use cavity_billiard::peaks::Peak;
use cavity_billiard::resonance::{self, PeriodicScan, TrajectorySign};
use cavity_billiard::trajectory::MirrorTrajectory;
use cavity_billiard::verify;

use crate::config::{Mode, RunConfig, TrajKind};
use crate::output::{fmt_f, CsvFile, EnergyFit, FileEntry, Manifest, Summary};

pub enum CliError {
    Config(String),
    Compute(String),
    VerifyFailed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Compute(_) => 2,
            CliError::VerifyFailed => 3,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Config(m) => format!("config error: {m}"),
            CliError::Compute(m) => format!("compute error: {m}"),
            CliError::VerifyFailed => "verification failed".to_string(),
        }
    }
}

impl From<CavityError> for CliError {
    fn from(e: CavityError) -> Self {
        CliError::Compute(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Compute(format!("i/o: {e}"))
    }
}

type RunResult<T> = Result<T, CliError>;

const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

fn build_trajectory(cfg: &RunConfig) -> RunResult<MirrorTrajectory> {
    let tr = match &cfg.traj {
        TrajKind::Static => MirrorTrajectory::fixed(cfg.l0),
        TrajKind::Sin => MirrorTrajectory::sinusoidal(cfg.l0, cfg.dl, cfg.omega()),
        TrajKind::Lawwu => MirrorTrajectory::arcsine_exact(cfg.l0, cfg.dl, cfg.order),
        TrajKind::File(path) => MirrorTrajectory::tabulated_from_file(path),
    };
    // trajectory construction rejects bad parameters: a config-shaped error
    tr.map_err(|e| CliError::Config(e.to_string()))
}

fn build_map(cfg: &RunConfig) -> RunResult<BilliardMap> {
    let mut map = BilliardMap::new(build_trajectory(cfg)?);
    if let Some(tol) = cfg.root_tolerance {
        map = map.with_root_tolerance(tol);
    }
    Ok(map)
}

/// Two-column whitespace-separated table with '#' comments.
fn read_two_column(path: &std::path::Path) -> RunResult<(Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut cols = line.split_whitespace();
        let parse = |t: Option<&str>| t.and_then(|s| s.parse::<f64>().ok());
        match (parse(cols.next()), parse(cols.next())) {
            (Some(x), Some(y)) => {
                xs.push(x);
                ys.push(y);
            }
            _ => {
                return Err(CliError::Config(format!(
                    "{}: bad row {line:?}",
                    path.display()
                )))
            }
        }
    }
    Ok((xs, ys))
}

fn classical_seed(cfg: &RunConfig) -> RunResult<InitialProfile> {
    if let Some(path) = &cfg.seed_file {
        let (taus, vals) = read_two_column(path)?;
        InitialProfile::sampled(&taus, &vals, cfg.l0).map_err(|e| CliError::Config(e.to_string()))
    } else {
        InitialProfile::uniform(cfg.seed_value.unwrap_or(1.0), cfg.l0)
            .map_err(|e| CliError::Config(e.to_string()))
    }
}

/// Quantum seed: the static vacuum unless the config supplies one.
fn quantum_seed(cfg: &RunConfig) -> RunResult<Option<SeedProfile>> {
    if let Some(path) = &cfg.seed_file {
        let (taus, vals) = read_two_column(path)?;
        let interp = cavity_billiard::interp::MonotoneCubic::new(&taus, &vals)
            .map_err(|e| CliError::Config(e.to_string()))?;
        return Ok(Some(SeedProfile::Sampled(std::sync::Arc::new(interp))));
    }
    Ok(cfg.seed_value.map(SeedProfile::Uniform))
}

/// Peak hints for the quadratures: the periodic starting points (amplified
/// ones preferred) repeated with the bounce period.
fn peak_hints(map: &BilliardMap) -> Option<PeakHints> {
    let scan = resonance::find_periodic_trajectories(map).ok()?;
    let trajs = match scan {
        PeriodicScan::Degenerate => return None,
        PeriodicScan::Trajectories(t) => t,
    };
    if trajs.is_empty() {
        return None;
    }
    let positive: Vec<f64> = trajs
        .iter()
        .filter(|t| t.sign == TrajectorySign::Positive)
        .map(|t| t.tau0)
        .collect();
    let anchors = if positive.is_empty() {
        trajs.iter().map(|t| t.tau0).collect()
    } else {
        positive
    };
    Some(PeakHints {
        anchors,
        period: 2.0 * map.trajectory().l0(),
    })
}

/// Either field profile behind one evaluation surface.
enum Profile {
    Classical(ExtendedProfile),
    Quantum(QuantumProfile),
}

impl Profile {
    fn energy_density(&self, t: f64, x: f64) -> Result<f64, CavityError> {
        match self {
            Profile::Classical(p) => p.energy_density(t, x),
            Profile::Quantum(p) => p.energy_density(t, x),
        }
    }

    fn total_energy_recursive(&self, tau0: f64, n: usize) -> Result<f64, CavityError> {
        match self {
            Profile::Classical(p) => p.total_energy_recursive(tau0, n),
            Profile::Quantum(p) => p.total_energy_recursive(tau0, n),
        }
    }

    fn peak_metrics(&self, t: f64) -> Result<Vec<Peak>, CavityError> {
        match self {
            Profile::Classical(p) => p.peak_metrics(t),
            Profile::Quantum(p) => p.peak_metrics_with(t, Default::default()),
        }
    }

    fn map(&self) -> &BilliardMap {
        match self {
            Profile::Classical(p) => p.map(),
            Profile::Quantum(p) => p.map(),
        }
    }
}

/// Fit the energy curve over the bounce index with both growth models and
/// keep the better one. Only the tail half is fitted: quantum curves start
/// at the (negative) Casimir energy before the asymptotic law takes over.
fn fit_energy(es: &[f64]) -> Option<EnergyFit> {
    if es.len() < 6 {
        return None;
    }
    let skip = es.len() / 2;
    let ns: Vec<f64> = (skip + 1..=es.len()).map(|n| n as f64).collect();
    let tail = &es[skip..];
    let quad = fit::fit_quadratic_in_n(&ns, tail);
    let quad_fit = EnergyFit {
        model: "quadratic",
        params: [quad.a, quad.b],
        max_rel_residual: quad.max_rel_residual,
    };
    match fit::fit_exponential(&ns, tail) {
        Some(exp) if exp.max_rel_residual < quad.max_rel_residual => Some(EnergyFit {
            model: "exponential",
            params: [exp.a, exp.b],
            max_rel_residual: exp.max_rel_residual,
        }),
        _ => Some(quad_fit),
    }
}

pub fn cmd_simulate(cfg: &RunConfig) -> RunResult<()> {
    let started = Instant::now();
    std::fs::create_dir_all(&cfg.out_dir)?;
    let map = build_map(cfg)?;
    let hints = peak_hints(&map);
    let l0 = map.trajectory().l0();

    let profile = match cfg.mode {
        Mode::Classical => {
            let mut p = ExtendedProfile::new(map.clone(), classical_seed(cfg)?)?;
            if let Some(h) = hints.clone() {
                p = p.with_peak_hints(h);
            }
            Profile::Classical(p)
        }
        Mode::Quantum => {
            let mut p = match quantum_seed(cfg)? {
                Some(seed) => QuantumProfile::with_seed(map.clone(), seed)?,
                None => QuantumProfile::new(map.clone())?,
            };
            if let Some(h) = hints.clone() {
                p = p.with_peak_hints(h);
            }
            Profile::Quantum(p)
        }
    };

    let mut files: Vec<FileEntry> = Vec::new();

    // energy at the bounce midpoints of the path seeded at tau0 = L0 (the
    // recursion route needs f(tau0) inside the initial interval)
    let seq = map.iterate_bounces(l0, cfg.periods)?;
    let mut energies = Vec::with_capacity(cfg.periods);
    let mut energy_csv = CsvFile::new(
        &cfg.out_dir,
        "energy.csv",
        &[
            "total field energy at bounce midpoints (row k is bounce k)".into(),
            "columns: t [L0], E [1/L0]".into(),
        ],
        "t,E",
    );
    for n in 1..=cfg.periods {
        let e = profile.total_energy_recursive(l0, n)?;
        energies.push(e);
        energy_csv.row(&[fmt_f(seq.retarded()[n - 1]), fmt_f(e)]);
    }
    files.push(energy_csv.finish()?);

    // density snapshots, evaluated concurrently and merged by index; offset
    // by T/8 from the period lattice, where left- and right-moving packets
    // would superpose and undercount the peaks
    let t_final = 2.0 * l0 * cfg.periods as f64;
    let times: Vec<f64> = (0..cfg.snapshots)
        .map(|i| 0.25 * l0 + t_final * i as f64 / (cfg.snapshots - 1) as f64)
        .collect();
    type Snapshot = (usize, Vec<(f64, f64)>, Vec<Peak>);
    let snaps: Vec<Snapshot> = times
        .par_iter()
        .enumerate()
        .map(|(idx, &t)| -> Result<_, CavityError> {
            let l_t = profile.map().trajectory().position(t);
            let mut rows = Vec::with_capacity(cfg.grid + 1);
            for j in 0..=cfg.grid {
                let x = l_t * j as f64 / cfg.grid as f64;
                rows.push((x, profile.energy_density(t, x)?));
            }
            let peaks = profile.peak_metrics(t)?;
            Ok((idx, rows, peaks))
        })
        .collect::<Result<_, _>>()?;

    let mut peaks_csv = CsvFile::new(
        &cfg.out_dir,
        "peaks.csv",
        &[
            "travelling-packet metrics per snapshot".into(),
            "columns: t [L0], position [L0], height [1/L0^2], width [L0] (FWHM)".into(),
        ],
        "t,position,height,width",
    );
    let mut last_peak_count = 0;
    for (idx, rows, peaks) in &snaps {
        let t = times[*idx];
        let mut csv = CsvFile::new(
            &cfg.out_dir,
            &format!("density_{idx:04}.csv"),
            &[
                format!("energy density T00 at t = {}", fmt_f(t)),
                "columns: x [L0], T00 [1/L0^2]".into(),
            ],
            "x,T00",
        );
        for (x, v) in rows {
            csv.row(&[fmt_f(*x), fmt_f(*v)]);
        }
        files.push(csv.finish()?);
        for p in peaks {
            peaks_csv.row(&[fmt_f(t), fmt_f(p.position), fmt_f(p.height), fmt_f(p.width)]);
        }
        last_peak_count = peaks.len();
    }
    files.push(peaks_csv.finish()?);

    // quantum runs additionally report the density growth prefactor and its
    // accumulator table
    let mut growth_coefficient = None;
    if let Profile::Quantum(q) = &profile {
        if cfg.domega_rel == 0.0 {
            if let Ok(PeriodicScan::Trajectories(trajs)) =
                resonance::find_periodic_trajectories(&map)
            {
                if let Some(plus) = trajs
                    .iter()
                    .find(|t| t.sign == TrajectorySign::Positive)
                    .copied()
                {
                    let n_max = cfg.periods.max(120);
                    let acc = q.anomaly_accumulate(plus.tau0, n_max)?;
                    let rho0 = q.seed_rho(plus.tau0);
                    let mut growth_csv = CsvFile::new(
                        &cfg.out_dir,
                        "growth.csv",
                        &[
                            format!("anomaly accumulator on the amplified path tau0 = {}", fmt_f(plus.tau0)),
                            "columns: n, log_doppler, anomaly [1/L0^2], prefactor [1/L0^2]".into(),
                        ],
                        "n,log_doppler,anomaly,prefactor",
                    );
                    for n in 1..=n_max {
                        growth_csv.row(&[
                            n.to_string(),
                            fmt_f(acc.doppler(n).ln()),
                            fmt_f(acc.anomaly(n)),
                            fmt_f(rho0 + acc.anomaly(n)),
                        ]);
                    }
                    files.push(growth_csv.finish()?);
                    growth_coefficient = q.growth_coefficient(&plus, n_max).ok();
                }
            }
        }
    }

    let manifest = Manifest {
        command: "simulate",
        engine_version: ENGINE_VERSION,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        config: cfg,
        files,
        summary: Summary {
            order: cfg.order,
            dl: cfg.dl,
            l0: cfg.l0,
            n_max: cfg.periods,
            growth_coefficient,
            energy_fit: fit_energy(&energies),
            peak_count: Some(last_peak_count),
            measured_band_halfwidth: None,
            theoretical_band_halfwidth: None,
        },
    };
    manifest.write(&cfg.out_dir)?;
    Ok(())
}

pub fn cmd_scan_band(cfg: &RunConfig) -> RunResult<()> {
    let started = Instant::now();
    std::fs::create_dir_all(&cfg.out_dir)?;
    let omega_n = cfg.order as f64 * std::f64::consts::PI / cfg.l0;
    let samples = cfg.scan_samples;
    let hw = cfg.scan_halfwidth;

    let points: Vec<resonance::BandPoint> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let r = -hw + 2.0 * hw * i as f64 / (samples - 1) as f64;
            let omega = omega_n / (1.0 - r);
            resonance::scan_band_point(cfg.l0, cfg.dl, omega)
        })
        .collect::<Result<_, _>>()?;

    let mut csv = CsvFile::new(
        &cfg.out_dir,
        "band.csv",
        &[
            format!("resonance band scan around omega_{} = {}", cfg.order, fmt_f(omega_n)),
            "columns: omega [1/L0], delta_omega_over_omega, has_return_points (0/1), growth_exponent (per period)".into(),
        ],
        "omega,delta_omega_over_omega,has_return_points,growth_exponent",
    );
    let mut measured: f64 = 0.0;
    for p in &points {
        if p.has_return_points {
            measured = measured.max(p.detuning_rel.abs());
        }
        csv.row(&[
            fmt_f(p.omega),
            fmt_f(p.detuning_rel),
            (p.has_return_points as u8).to_string(),
            fmt_f(p.growth_exponent),
        ]);
    }
    let files = vec![csv.finish()?];

    let manifest = Manifest {
        command: "scan-band",
        engine_version: ENGINE_VERSION,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        config: cfg,
        files,
        summary: Summary {
            order: cfg.order,
            dl: cfg.dl,
            l0: cfg.l0,
            n_max: samples,
            growth_coefficient: None,
            energy_fit: None,
            peak_count: None,
            measured_band_halfwidth: Some(measured),
            theoretical_band_halfwidth: Some(cfg.dl / cfg.l0),
        },
    };
    manifest.write(&cfg.out_dir)?;
    Ok(())
}

pub fn cmd_trajectory(cfg: &RunConfig) -> RunResult<()> {
    let started = Instant::now();
    std::fs::create_dir_all(&cfg.out_dir)?;
    let map = build_map(cfg)?;
    let seq = map.iterate_bounces(cfg.tau0, cfg.bounces)?;

    let mut csv = CsvFile::new(
        &cfg.out_dir,
        "bounces.csv",
        &[
            format!("optical path from tau0 = {}", fmt_f(cfg.tau0)),
            "columns: k, T_k [L0], Tstar_k [L0], D_k, A_k [1/L0^2]".into(),
            "row k = 0 is the starting point (no bounce: Tstar = nan, D = 1, A = 0)".into(),
        ],
        "k,T,Tstar,D,A",
    );
    let inv_24pi = 1.0 / (24.0 * std::f64::consts::PI);
    let mut anomaly = 0.0;
    csv.row(&[
        "0".into(),
        fmt_f(seq.times()[0]),
        "nan".into(),
        fmt_f(1.0),
        fmt_f(0.0),
    ]);
    for k in 1..=seq.len() {
        anomaly -= (-2.0 * seq.log_doppler(k)).exp() * seq.schwarzian_at(k) * inv_24pi;
        csv.row(&[
            k.to_string(),
            fmt_f(seq.times()[k]),
            fmt_f(seq.retarded()[k - 1]),
            fmt_f(seq.doppler(k)),
            fmt_f(anomaly),
        ]);
    }
    let files = vec![csv.finish()?];

    let manifest = Manifest {
        command: "trajectory",
        engine_version: ENGINE_VERSION,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        config: cfg,
        files,
        summary: Summary {
            order: cfg.order,
            dl: cfg.dl,
            l0: cfg.l0,
            n_max: cfg.bounces,
            growth_coefficient: None,
            energy_fit: None,
            peak_count: None,
            measured_band_halfwidth: None,
            theoretical_band_halfwidth: None,
        },
    };
    manifest.write(&cfg.out_dir)?;
    Ok(())
}

pub fn cmd_verify(inject_error: f64) -> RunResult<()> {
    let checks = verify::run_all(inject_error)?;
    let mut all_ok = true;
    for c in &checks {
        println!(
            "{} {} — residual {:.3e} (tolerance {:.3e})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.residual,
            c.tolerance
        );
        all_ok &= c.passed;
    }
    if all_ok {
        println!("all {} checks passed", checks.len());
        Ok(())
    } else {
        Err(CliError::VerifyFailed)
    }
}
