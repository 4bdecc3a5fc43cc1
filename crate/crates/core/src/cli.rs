//! Command-line front end.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use crate::classify::classify;
use crate::dynamics::{
    exact_blowup_v, EvolveOptions, ExactBlowupParams, GridSpec, Propagator, RadialGrid, StepOptions,
};
use crate::error::{Error, Result};
use crate::ground_state::{sharp_constant_general, sharp_constant_mass_critical, solve, GroundState, ShootOptions};
use crate::io::{format_float, parse_config, parse_profile_csv, write_csv, Header};
use crate::params::{parse_coupling, parse_rational, ModelParams};
use crate::pohozaev::{verify_identity, Variant};
use crate::variational::{oracle, OracleOptions};
use crate::VERSION;

#[derive(Debug, Parser)]
#[command(name = "hardy-nls", version, about = "Ground states, sharp constants and radial dynamics for NLS with an inverse-square potential")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone)]
struct ModelArgs {
    /// Space dimension (>= 3).
    #[arg(long)]
    d: u32,
    /// Nonlinearity exponent, e.g. 10/3.
    #[arg(long)]
    p: String,
    /// Coupling constant or `critical`.
    #[arg(long, default_value = "critical")]
    c: String,
}

impl ModelArgs {
    fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.d, parse_rational(&self.p)?, parse_coupling(&self.c, self.d)?)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve for the ground state by shooting.
    GroundState {
        #[command(flatten)]
        model: ModelArgs,
        /// Bisection tolerance on v(0).
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Write the profile (r, Q, dQ, v, dv) to this CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sharp Hardy-Gagliardo-Nirenberg constant.
    Constant {
        #[command(flatten)]
        model: ModelArgs,
        /// Also run the variational-flow estimate.
        #[arg(long)]
        oracle: bool,
    },
    /// Evolve radial initial data described by a config file.
    Evolve {
        #[arg(long)]
        config: PathBuf,
        /// Directory for output files (default: the config file's directory).
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Classify initial data by the sufficient conditions for global
    /// existence or blow-up.
    Classify {
        /// CSV with columns r,re[,im].
        #[arg(long)]
        profile: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        /// Declare |x| u0 in L^2.
        #[arg(long)]
        finite_variance: bool,
    },
    /// Numerical verification of structural identities.
    Verify {
        /// Check dJ/dr = G v^2 along the ground state.
        #[arg(long)]
        pohozaev: bool,
        #[command(flatten)]
        model: ModelArgs,
        /// printed | consistent (default: both).
        #[arg(long)]
        variant: Option<String>,
        /// Write (r, J, Gv2, residual) to this CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Runs the command line `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    configure_threads();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("HARDY_NLS_THREADS").ok().and_then(|s| s.trim().parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

struct Summary<'a> {
    out: &'a mut dyn Write,
}

impl Summary<'_> {
    fn line(&mut self, key: &str, value: impl std::fmt::Display) -> Result<()> {
        writeln!(self.out, "{key}: {value}")?;
        Ok(())
    }

    fn num(&mut self, key: &str, value: f64) -> Result<()> {
        self.line(key, format_float(value))
    }
}

fn base_header(command: &str, params: &ModelParams) -> Header {
    vec![
        ("hardy-nls".into(), VERSION.into()),
        ("command".into(), command.into()),
        ("d".into(), params.d.to_string()),
        ("p".into(), format_float(params.p)),
        ("c".into(), format_float(params.c)),
    ]
}

fn shoot_header(h: &mut Header, opts: &ShootOptions) {
    h.push(("bisection_tol".into(), format_float(opts.tol)));
    h.push(("ode_tol".into(), format_float(opts.ode_tol)));
    h.push(("r_min".into(), format_float(opts.r_min)));
    h.push(("r_max".into(), format_float(opts.r_max)));
    h.push(("h_xi".into(), format_float(opts.h_xi)));
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<()> {
    let mut s = Summary { out };
    match command {
        Command::GroundState { model, tol, out: path } => {
            let params = model.params()?;
            let opts = ShootOptions { tol, ..Default::default() };
            let gs = solve(&params, &opts)?;
            ground_state_summary(&mut s, &gs)?;
            s.num("max_residual", gs.max_residual()?)?;
            if let Some(path) = path {
                let mut h = base_header("ground-state", &params);
                shoot_header(&mut h, &opts);
                h.push(("v0".into(), format_float(gs.v0)));
                let dv = gs.v_profile.derivs.as_ref().unwrap();
                let dq = gs.q_profile.derivs.as_ref().unwrap();
                let rows: Vec<Vec<f64>> = (0..gs.grid.len())
                    .map(|j| {
                        vec![gs.grid.r[j], gs.q_profile.values[j].re, dq[j].re, gs.v_profile.values[j].re, dv[j].re]
                    })
                    .collect();
                write_csv(&path, &h, &["r", "Q", "dQ", "v", "dv"], &rows)?;
            }
        }
        Command::Constant { model, oracle: run_oracle } => {
            let params = model.params()?;
            let gs = solve(&params, &ShootOptions::default())?;
            let k = &gs.constants;
            s.line("params", params)?;
            s.num("c_hgn", gs.c_hgn)?;
            s.num("mass", gs.mass)?;
            s.num("theta", k.theta)?;
            s.num("kappa", k.kappa)?;
            s.num("quotient_of_q", gs.quotient())?;
            let general = sharp_constant_general(gs.mass, &params);
            s.num("c_hgn_general", general)?;
            if k.mass_critical {
                let mc = sharp_constant_mass_critical(gs.mass, params.d);
                s.num("c_hgn_mass_critical", mc)?;
                s.num("cross_check_rel_diff", (mc - general).abs() / general)?;
            }
            if run_oracle {
                let est = oracle(&params, &OracleOptions::default())?;
                s.num("oracle_c_hgn", est.c_hgn)?;
                s.num("oracle_mass", est.mass)?;
                s.num("oracle_mass_rel_diff", (est.mass - gs.mass).abs() / gs.mass)?;
            }
        }
        Command::Evolve { config, out_dir } => evolve_command(&mut s, &config, out_dir)?,
        Command::Classify { profile, model, finite_variance } => {
            let params = model.params()?;
            let u0 = parse_profile_csv(&profile, params.d)?;
            let gs = solve(&params, &ShootOptions::default())?;
            let c = classify(&u0, &params, &gs, finite_variance)?;
            s.line("params", params)?;
            s.line("verdict", c.verdict)?;
            s.line("condition", c.fired.map(|f| f.to_string()).unwrap_or_else(|| "none".into()))?;
            s.num("energy", c.energy)?;
            s.num("mass", c.mass)?;
            s.num("ground_state_mass", c.ground_state_mass)?;
            s.num("form_norm_sq", c.form_norm_sq)?;
            s.num("lp_p", c.lp_p)?;
            s.num("variance", c.variance.value)?;
            if let Some(t) = c.thresholds {
                s.num("q", t.q)?;
                s.num("s0", t.s0)?;
                s.num("energy_threshold", t.energy_threshold)?;
                s.num("s", c.s.unwrap())?;
                s.num("scaled_energy", c.scaled_energy.unwrap())?;
                s.num("f_of_s", c.f_value.unwrap())?;
            }
            for n in &c.notes {
                s.line("note", n)?;
            }
        }
        Command::Verify { pohozaev, model, variant, out: path } => {
            if !pohozaev {
                return Err(Error::InvalidParams("nothing to verify: pass --pohozaev".into()));
            }
            let params = model.params()?;
            let variants: Vec<Variant> = match variant {
                Some(v) => vec![v.parse()?],
                None => Variant::ALL.to_vec(),
            };
            let gs = solve(&params, &ShootOptions::default())?;
            s.line("params", params)?;
            let mut columns = vec!["r".to_string()];
            let mut data: Vec<Vec<f64>> = gs.grid.r.iter().map(|&r| vec![r]).collect();
            for v in &variants {
                let rep = verify_identity(&gs, *v)?;
                let (j0, j1, jmax) = rep.endpoint_values();
                s.line(&format!("{v}.result"), if rep.pass { "Pass" } else { "Fail" })?;
                s.num(&format!("{v}.max_relative_residual"), rep.max_relative_residual)?;
                s.line(&format!("{v}.j_positive"), rep.j_positive())?;
                s.num(&format!("{v}.j_first"), j0)?;
                s.num(&format!("{v}.j_last"), j1)?;
                s.num(&format!("{v}.j_max"), jmax)?;
                s.num(&format!("{v}.j_inner_log_slope"), rep.inner_log_slope())?;
                let suffix = if variants.len() > 1 { format!("_{v}") } else { String::new() };
                for name in ["J", "Gv2", "residual"] {
                    columns.push(format!("{name}{suffix}"));
                }
                for (i, row) in data.iter_mut().enumerate() {
                    row.extend([rep.j[i], rep.g_v2[i], rep.residual[i]]);
                }
            }
            if let Some(path) = path {
                let mut h = base_header("verify --pohozaev", &params);
                shoot_header(&mut h, &gs.options);
                let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
                write_csv(&path, &h, &cols, &data)?;
            }
        }
    }
    Ok(())
}

fn ground_state_summary(s: &mut Summary, gs: &GroundState) -> Result<()> {
    s.line("params", gs.params)?;
    s.num("v0", gs.v0)?;
    s.num("bracket_width", gs.bracket.1 - gs.bracket.0)?;
    s.line("iterations", gs.iterations)?;
    s.num("mass", gs.mass)?;
    s.num("lp_norm_p", gs.lp_norm_p)?;
    s.num("form_norm_sq", gs.form_norm_sq)?;
    s.num("energy", gs.energy)?;
    s.num("c_hgn", gs.c_hgn)?;
    s.num("r_match", gs.r_match)?;
    Ok(())
}

/// Settings of `evolve`, read from a `key = value` file.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: ModelParams,
    pub grid: GridSpec,
    pub evolve: EvolveOptions,
    pub initial: InitialData,
    pub diagnostics: PathBuf,
    pub snapshot_prefix: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    /// `scale * Q`.
    Ground(f64),
    ExactBlowup(ExactBlowupParams),
    File(PathBuf),
}

const CONFIG_KEYS: &[&str] = &[
    "d",
    "p",
    "c",
    "dr_min",
    "r_max",
    "stretch",
    "dt",
    "t_end",
    "log_interval",
    "snapshots",
    "initial",
    "blowup_factor",
    "sponge_strength",
    "diagnostics",
    "snapshot_prefix",
];

impl RunConfig {
    /// Relative paths are resolved against `base`.
    pub fn from_map(map: &BTreeMap<String, String>, base: &Path) -> Result<Self> {
        if let Some(k) = map.keys().find(|k| !CONFIG_KEYS.contains(&k.as_str())) {
            return Err(Error::Config(format!("unknown key '{k}'")));
        }
        let get = |k: &str| map.get(k).map(String::as_str);
        let num = |k: &str, default: f64| -> Result<f64> {
            match get(k) {
                Some(v) => parse_rational(v).map_err(|_| Error::Config(format!("bad value for {k}: '{v}'"))),
                None => Ok(default),
            }
        };
        let d: u32 = get("d")
            .ok_or_else(|| Error::Config("missing key 'd'".into()))?
            .parse()
            .map_err(|_| Error::Config("bad value for d".into()))?;
        let p = parse_rational(get("p").ok_or_else(|| Error::Config("missing key 'p'".into()))?)?;
        let c = parse_coupling(get("c").unwrap_or("critical"), d)?;
        let params = ModelParams::new(d, p, c)?;
        let gdef = GridSpec::default();
        let grid = GridSpec {
            dr_min: num("dr_min", gdef.dr_min)?,
            r_max: num("r_max", gdef.r_max)?,
            stretch: num("stretch", gdef.stretch)?,
        };
        grid.validate()?;
        let edef = EvolveOptions::default();
        let snapshot_times = match get("snapshots") {
            Some(list) if !list.trim().is_empty() => {
                list.split(',').map(|t| parse_rational(t)).collect::<Result<Vec<f64>>>()?
            }
            _ => Vec::new(),
        };
        let evolve = EvolveOptions {
            dt: num("dt", edef.dt)?,
            t_end: num("t_end", edef.t_end)?,
            log_interval: num("log_interval", edef.log_interval)?,
            snapshot_times,
            blowup_factor: num("blowup_factor", edef.blowup_factor)?,
            step: StepOptions { sponge_strength: num("sponge_strength", edef.step.sponge_strength)?, ..edef.step },
        };
        if !(evolve.dt > 0.0 && evolve.t_end >= 0.0 && evolve.log_interval > 0.0) {
            return Err(Error::Config("dt, t_end and log_interval must be positive".into()));
        }
        let initial = parse_initial(get("initial").unwrap_or("ground"), base)?;
        let path = |k: &str, default: &str| base.join(get(k).unwrap_or(default));
        Ok(RunConfig {
            params,
            grid,
            evolve,
            initial,
            diagnostics: path("diagnostics", "diagnostics.csv"),
            snapshot_prefix: path("snapshot_prefix", "snapshot"),
        })
    }
}

fn parse_initial(text: &str, base: &Path) -> Result<InitialData> {
    let text = text.trim();
    let (kind, arg) = match text.split_once(':') {
        Some((k, a)) => (k.trim(), Some(a.trim())),
        None => (text, None),
    };
    match (kind, arg) {
        ("ground", None) => Ok(InitialData::Ground(1.0)),
        ("ground", Some(a)) => Ok(InitialData::Ground(parse_rational(a)?)),
        ("exact-blowup", Some(a)) => {
            let v: Vec<f64> = a.split(',').map(parse_rational).collect::<Result<_>>()?;
            if v.len() != 3 {
                return Err(Error::Config("exact-blowup needs T,lambda,gamma".into()));
            }
            Ok(InitialData::ExactBlowup(ExactBlowupParams::new(v[0], v[1], v[2])?))
        }
        ("file", Some(a)) => Ok(InitialData::File(base.join(a))),
        _ => Err(Error::Config(format!("unknown initial data '{text}'"))),
    }
}

fn evolve_command(s: &mut Summary, config: &Path, out_dir: Option<PathBuf>) -> Result<()> {
    let text = std::fs::read_to_string(config)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", config.display())))?;
    let map = parse_config(&text)?;
    let base = match out_dir {
        Some(d) => d,
        None => config.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    let cfg = RunConfig::from_map(&map, &base)?;
    let params = cfg.params;
    let grid = RadialGrid::new(&params, cfg.grid)?;
    let prop = Propagator::new(&params, grid, cfg.evolve.step);
    let needs_gs = !matches!(cfg.initial, InitialData::File(_));
    let gs = if needs_gs { Some(solve(&params, &ShootOptions::default())?) } else { None };
    let v0: Vec<Complex64> = match &cfg.initial {
        InitialData::Ground(scale) => {
            let gs = gs.as_ref().unwrap();
            let v: Result<Vec<Complex64>> =
                prop.grid.r.iter().map(|&r| gs.eval_v(r).map(|x| Complex64::new(scale * x, 0.0))).collect();
            v?
        }
        InitialData::ExactBlowup(ebp) => exact_blowup_v(gs.as_ref().unwrap(), ebp, 0.0, &prop.grid.r)?,
        InitialData::File(path) => prop.grid.from_profile(&parse_profile_csv(path, params.d)?),
    };
    let state = prop.evolve(v0, &cfg.evolve)?;

    let mut h = base_header("evolve", &params);
    h.push(("dr_min".into(), format_float(cfg.grid.dr_min)));
    h.push(("r_max".into(), format_float(cfg.grid.r_max)));
    h.push(("stretch".into(), format_float(cfg.grid.stretch)));
    h.push(("cells".into(), prop.grid.len().to_string()));
    h.push(("dt".into(), format_float(cfg.evolve.dt)));
    h.push(("t_end".into(), format_float(cfg.evolve.t_end)));
    h.push(("fp_tol".into(), format_float(cfg.evolve.step.fp_tol)));
    h.push(("initial".into(), map.get("initial").cloned().unwrap_or_else(|| "ground".into())));
    let rows: Vec<Vec<f64>> = state
        .log
        .iter()
        .map(|r| vec![r.t, r.mass, r.energy, r.form_norm_sq, r.lp_p, r.gamma, r.gamma_prime])
        .collect();
    write_csv(
        &cfg.diagnostics,
        &h,
        &["t", "mass", "energy", "form_norm_sq", "lp_p", "gamma", "gamma_prime"],
        &rows,
    )?;
    for (t, v) in &state.snapshots {
        let u = prop.grid.profile(params.d, v)?;
        let mut hs = h.clone();
        hs.push(("t".into(), format_float(*t)));
        let name = format!("{}_t{}.csv", cfg.snapshot_prefix.display(), format_float(*t));
        write_csv(Path::new(&name), &hs, &["r", "re", "im"], &crate::io::profile_rows(&u))?;
    }

    let first = state.log[0];
    let last = *state.log.last().unwrap();
    s.line("params", params)?;
    s.line("cells", prop.grid.len())?;
    s.line("steps", state.steps)?;
    s.num("t_final", state.t)?;
    s.line("blowup_detected", state.blowup.map(format_float).unwrap_or_else(|| "no".into()))?;
    s.num("mass_rel_drift", (last.mass - first.mass).abs() / first.mass.max(f64::MIN_POSITIVE))?;
    s.num("max_step_mass_drift", state.max_step_mass_drift)?;
    s.num("energy_initial", first.energy)?;
    s.num("energy_final", last.energy)?;
    s.line("max_fixed_point_sweeps", state.max_sweeps_used)?;
    if let (InitialData::ExactBlowup(ebp), Some(gs)) = (&cfg.initial, &gs) {
        if state.t < ebp.t_blowup {
            let exact = exact_blowup_v(gs, ebp, state.t, &prop.grid.r)?;
            s.num("exact_l2_error", prop.grid.relative_l2(&state.v, &exact))?;
        }
    }
    s.line("diagnostics", cfg.diagnostics.display())?;
    Ok(())
}
