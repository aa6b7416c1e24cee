//! Subcommand implementations.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use coherence_orders::coherence::summarize;
use coherence_orders::dephasing::{Kernel, MonteCarloConfig, NoiseModel};
use coherence_orders::metrology::{make_state, witness, BellState, PhaseEncoding, StateFamily};
use coherence_orders::operator_basis::qubit_count;
use coherence_orders::{ComplexMatrix, Error};
use serde::Serialize;

use crate::args::{Cli, Command, DecomposeArgs, DephaseArgs, DephaseFigure, MetrologyArgs, ReproduceArgs, StateArgs, TopologyArg};
use crate::config::{ConfigFile, Merge};
use crate::figures::{dephase_preset, dephase_table, grid, reproduction_sweeps, sweep_table, Sweep};
use crate::output::{write_file, Cell, Format, Table};
use crate::{golden, plots, state_file, CliError, Result};

pub const THREADS_ENV: &str = "COHERENCE_ORDERS_THREADS";

/// Directory holding the goldens shipped with the crate.
pub fn default_goldens() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("goldens")
}

/// Where a command writes and in which format.
#[derive(Debug, Clone)]
pub struct Sink {
    pub out: PathBuf,
    pub format: Format,
    pub threads: Option<usize>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Library range errors on user-supplied parameters are usage errors.
fn param_error(e: Error) -> CliError {
    match e {
        Error::ParamOutOfRange(m) => usage(m),
        Error::UnknownExample(_) | Error::TooManyQubits(_) => usage(e.to_string()),
        other => CliError::Numeric(other),
    }
}

fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

/// Runs a parsed command line.
pub fn run(cli: Cli) -> Result<()> {
    let file = match &cli.global.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let global = cli.global.clone().merge(file.global());
    let threads = match global.threads {
        Some(t) => Some(t),
        None => threads_from_env()?,
    };
    if threads == Some(0) {
        return Err(usage("thread count must be at least 1"));
    }
    let sink = Sink {
        out: global.out.unwrap_or_else(|| PathBuf::from("out")),
        format: global.format.unwrap_or(Format::Csv),
        threads,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| usage(format!("cannot start thread pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Decompose(a) => decompose(a.merge(file.decompose.unwrap_or_default()), &sink),
        Command::Dephase(a) => dephase(a.merge(file.dephase.unwrap_or_default()), &sink),
        Command::Metrology(a) => metrology(a.merge(file.metrology.unwrap_or_default()), &sink),
        Command::ReproduceAll(a) => reproduce_all(a.merge(file.reproduce_all.unwrap_or_default()), &sink),
    })
}

fn toml_table<T: Serialize>(value: &T) -> toml::Table {
    toml::Table::try_from(value).expect("resolved arguments serialize")
}

/// `key = value` lines for a table header, nested sections flattened.
fn header_pairs(command: &str, params: &toml::Table) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    out.insert("command".into(), command.into());
    for (k, v) in params {
        let text = match v {
            toml::Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        out.insert(k.clone(), text);
    }
    out
}

fn write_resolved(sink: &Sink, command: &str, params: &toml::Table) -> Result<()> {
    let mut root = toml::Table::new();
    root.insert("command".into(), command.into());
    root.insert("out".into(), sink.out.display().to_string().into());
    root.insert("format".into(), sink.format.extension().into());
    if let Some(t) = sink.threads {
        root.insert("threads".into(), (t as i64).into());
    }
    root.insert(command.into(), toml::Value::Table(params.clone()));
    let text = toml::to_string(&root).expect("config serializes");
    write_file(&sink.out.join("resolved_config.toml"), &text)
}

fn emit(sink: &Sink, command: &str, params: &toml::Table, tables: Vec<Table>) -> Result<()> {
    let header = header_pairs(command, params);
    for mut t in tables {
        t.header.extend(header.clone());
        let path = t.write(&sink.out, sink.format)?;
        println!("wrote {}", path.display());
    }
    write_resolved(sink, command, params)
}

/// Builds the state and returns the arguments that actually determine it.
pub fn resolve_state(s: &StateArgs, default: Option<&str>) -> Result<(ComplexMatrix, StateArgs)> {
    if let Some(path) = &s.input {
        if s.state.is_some() {
            return Err(usage("give either --state or --in, not both"));
        }
        let rho = state_file::read_state(path)?;
        let resolved = StateArgs {
            input: Some(path.clone()),
            n: Some(qubit_count(&rho)?),
            ..Default::default()
        };
        return Ok((rho, resolved));
    }
    let name = s
        .state
        .as_deref()
        .or(default)
        .ok_or_else(|| usage("no state given; use --state NAME or --in FILE"))?
        .to_ascii_lowercase();
    let n = s.n.unwrap_or(3);
    let p = s.p.unwrap_or(1.0);
    let phi = s.phi.unwrap_or(0.0);
    let mut r = StateArgs {
        state: Some(name.clone()),
        ..Default::default()
    };
    let family = match name.as_str() {
        "ghz" | "plus" | "w" | "mixed" => {
            r.n = Some(n);
            match name.as_str() {
                "ghz" => StateFamily::Ghz { n },
                "plus" => StateFamily::Plus { n },
                "w" => StateFamily::Dicke { n, k: 1 },
                _ => StateFamily::MaximallyMixed { n },
            }
        }
        "dicke" => {
            let k = s.k.unwrap_or(1);
            (r.n, r.k) = (Some(n), Some(k));
            StateFamily::Dicke { n, k }
        }
        "basis" => {
            let index = s.index.unwrap_or(0);
            (r.n, r.index) = (Some(n), Some(index));
            StateFamily::Basis { n, index }
        }
        "bell" | "bell-phi+" => StateFamily::Bell(BellState::PhiPlus),
        "bell-phi-" => StateFamily::Bell(BellState::PhiMinus),
        "bell-psi+" => StateFamily::Bell(BellState::PsiPlus),
        "bell-psi-" => StateFamily::Bell(BellState::PsiMinus),
        "phi" => StateFamily::Phi,
        "ex1" => {
            r.phi = Some(phi);
            StateFamily::Example1 { phi }
        }
        "ex2" => {
            r.phi = Some(phi);
            StateFamily::Example2 { phi }
        }
        "ex3" => {
            (r.p, r.phi) = (Some(p), Some(phi));
            StateFamily::Example3 { p, phi }
        }
        "ex4" => {
            r.p = Some(p);
            StateFamily::Example4 { p }
        }
        "ex5" => {
            r.p = Some(p);
            StateFamily::Example5 { p }
        }
        "mixed-ghz" => {
            (r.n, r.p, r.phi) = (Some(n), Some(p), Some(phi));
            StateFamily::MixedGhz { n, p, phi }
        }
        other => return Err(usage(format!("unknown state `{other}`"))),
    };
    let rho = make_state(&family).map_err(param_error)?;
    Ok((rho, r))
}

/// Per-order table of one state.
pub fn decompose_table(rho: &ComplexMatrix) -> Result<Table> {
    let mut t = Table::new("decompose", &["m", "n_m", "c_l1", "c_trace", "i_m"]);
    for row in summarize(rho)? {
        t.push(vec![
            Cell::Int(row.m as i64),
            Cell::Int(row.positions as i64),
            Cell::Float(row.c_l1),
            Cell::Float(row.c_trace),
            Cell::Float(row.mqi),
        ]);
    }
    Ok(t)
}

fn decompose(args: DecomposeArgs, sink: &Sink) -> Result<()> {
    let (rho, state) = resolve_state(&args.state, None)?;
    let params = toml_table(&DecomposeArgs { state });
    emit(sink, "decompose", &params, vec![decompose_table(&rho)?])
}

/// Dephasing run with every default filled in.
pub struct DephaseRun {
    pub args: DephaseArgs,
    pub rho: ComplexMatrix,
    pub model: NoiseModel,
    pub times: Vec<f64>,
    pub mc: Option<MonteCarloConfig>,
}

pub fn resolve_dephase(args: DephaseArgs) -> Result<DephaseRun> {
    let args = match args.figure {
        Some(fig) => args.merge(dephase_preset(fig)),
        None => args,
    };
    let (rho, state) = resolve_state(&args.state, Some("plus"))?;
    let n = qubit_count(&rho)?;
    let topology = args.topology.unwrap_or(TopologyArg::Common);
    let gamma = args.gamma.unwrap_or(10.0);
    let damping = args.damping.unwrap_or(100.0);
    let omega0 = args.omega0.unwrap_or(0.0);
    let couplings = args.couplings.clone().unwrap_or_else(|| vec![1.0; n]);
    if couplings.len() != n {
        return Err(usage(format!("expected {n} couplings, got {}", couplings.len())));
    }
    let t_max = args.t_max.unwrap_or(0.5);
    if !(t_max >= 0.0 && t_max.is_finite()) {
        return Err(usage(format!("--t-max must be a finite non-negative time, got {t_max}")));
    }
    let points = args.points.unwrap_or(100);
    if points == 0 {
        return Err(usage("--points must be at least 1"));
    }
    let kernel = Kernel::ornstein_uhlenbeck(gamma, damping)?;
    let model = match topology {
        TopologyArg::Common => NoiseModel::common(omega0, kernel, couplings.clone())?,
        TopologyArg::Independent => NoiseModel::independent_uniform(omega0, kernel, couplings.clone())?,
    };
    let mc = args.monte_carlo.map(|n_traj| MonteCarloConfig {
        n_traj,
        seed: args.seed.unwrap_or(7),
        max_step: args.max_step.unwrap_or(1e-3),
    });
    let resolved = DephaseArgs {
        state,
        figure: args.figure,
        topology: Some(topology),
        gamma: Some(gamma),
        damping: Some(damping),
        omega0: Some(omega0),
        couplings: Some(couplings),
        t_max: Some(t_max),
        points: Some(points),
        monte_carlo: mc.map(|c| c.n_traj),
        seed: mc.map(|c| c.seed),
        max_step: mc.map(|c| c.max_step),
    };
    Ok(DephaseRun {
        args: resolved,
        rho,
        model,
        times: grid(0.0, t_max, points),
        mc,
    })
}

fn dephase_name(fig: Option<DephaseFigure>) -> &'static str {
    match fig {
        Some(DephaseFigure::Fig3a) => "fig3a",
        Some(DephaseFigure::Fig3b) => "fig3b",
        None => "dephase",
    }
}

pub fn run_dephase(run: &DephaseRun) -> Result<Table> {
    dephase_table(dephase_name(run.args.figure), &run.rho, &run.model, &run.times, run.mc.as_ref())
}

fn dephase(args: DephaseArgs, sink: &Sink) -> Result<()> {
    let run = resolve_dephase(args)?;
    let table = run_dephase(&run)?;
    emit(sink, "dephase", &toml_table(&run.args), vec![table])
}

/// Single-state report: one summary row plus one row per order.
pub fn metrology_tables(rho: &ComplexMatrix, tau: f64) -> Result<Vec<Table>> {
    let n = qubit_count(rho)?;
    let report = witness(rho, &PhaseEncoding::collective_z(n, tau))?;
    let mut summary = Table::new(
        "metrology_report",
        &[
            "n", "tau", "f_q", "s_tau", "f_i", "m_max", "b_mmax", "f_i_mmax", "threshold", "witness_b", "witness_fi",
            "certified",
        ],
    );
    summary.push(vec![
        n.into(),
        tau.into(),
        report.f_q.into(),
        report.s_tau.into(),
        report.f_i.into(),
        report.m_max.into(),
        report.b_mmax().into(),
        report.f_i_mmax.into(),
        report.threshold.into(),
        report.witness_b.into(),
        report.witness_fi.into(),
        report.certified().into(),
    ]);
    let mut orders = Table::new("metrology_orders", &["m", "i_m", "b_tau_m", "f_i_m"]);
    for m in 0..=n {
        let i = report.i_m[m];
        orders.push(vec![m.into(), i.into(), report.b_tau_m[m].into(), ((m * m) as f64 * i).into()]);
    }
    Ok(vec![summary, orders])
}

fn metrology(args: MetrologyArgs, sink: &Sink) -> Result<()> {
    let tau = args.tau.unwrap_or(PI / 6.0);
    if let Some(fig) = args.figure {
        let phi = args.state.phi.unwrap_or(0.0);
        let points = args.points.unwrap_or(101);
        if points == 0 {
            return Err(usage("--points must be at least 1"));
        }
        let sweep = Sweep::for_figure(fig, phi, points, tau);
        let table = sweep_table(&sweep).map_err(|e| match e {
            CliError::Numeric(inner) => param_error(inner),
            other => other,
        })?;
        let resolved = MetrologyArgs {
            state: StateArgs {
                phi: (sweep.example == 3).then_some(phi),
                ..Default::default()
            },
            figure: Some(fig),
            tau: Some(tau),
            points: Some(points),
        };
        return emit(sink, "metrology", &toml_table(&resolved), vec![table]);
    }
    let (rho, state) = resolve_state(&args.state, None)?;
    let resolved = MetrologyArgs {
        state,
        figure: None,
        tau: Some(tau),
        points: None,
    };
    emit(sink, "metrology", &toml_table(&resolved), metrology_tables(&rho, tau)?)
}

/// Every figure table, in a fixed order, each with its header filled.
pub fn reproduction_tables(seed: u64, n_traj: usize) -> Result<Vec<Table>> {
    let mut tables = Vec::new();
    for fig in [DephaseFigure::Fig3a, DephaseFigure::Fig3b] {
        let run = resolve_dephase(DephaseArgs {
            figure: Some(fig),
            monte_carlo: (n_traj > 0).then_some(n_traj),
            seed: Some(seed),
            ..Default::default()
        })?;
        let mut t = run_dephase(&run)?;
        t.header = header_pairs("dephase", &toml_table(&run.args));
        tables.push(t);
    }
    for sweep in reproduction_sweeps() {
        let mut t = sweep_table(&sweep)?;
        let mut params = toml::Table::new();
        params.insert("example".into(), (sweep.example as i64).into());
        params.insert("sweep".into(), sweep.axis.name().into());
        if sweep.example == 3 {
            params.insert("phi".into(), sweep.fixed.into());
        }
        params.insert("points".into(), (sweep.points as i64).into());
        params.insert("tau".into(), sweep.tau.into());
        t.header = header_pairs("metrology", &params);
        tables.push(t);
    }
    Ok(tables)
}

fn plot_title(name: &str) -> String {
    match name {
        "fig3a" => "Normalized order coherences, common bath".into(),
        "fig3b" => "Normalized order coherences, independent baths".into(),
        n if n.starts_with("fig4") => format!("Example 3 bounds ({n})"),
        n => format!("Example {} bounds", &n[4..]),
    }
}

fn reproduce_all(args: ReproduceArgs, sink: &Sink) -> Result<()> {
    let seed = args.seed.unwrap_or(7);
    let n_traj = args.monte_carlo.unwrap_or(10_000);
    let goldens = args.goldens.clone().unwrap_or_else(default_goldens);
    let tables = reproduction_tables(seed, n_traj)?;
    let mut drift = Vec::new();
    for t in &tables {
        let csv = t.to_csv();
        write_file(&sink.out.join(format!("{}.csv", t.name)), &csv)?;
        if sink.format == Format::Json {
            t.write(&sink.out, Format::Json)?;
        }
        write_file(&sink.out.join("plots").join(format!("{}.py", t.name)), &plots::script(t, &plot_title(&t.name)))?;
        if args.bless {
            write_file(&goldens.join(format!("{}.csv", t.name)), &csv)?;
        } else {
            drift.extend(golden::check(&goldens, &t.name, &csv)?);
        }
    }
    let resolved = ReproduceArgs {
        goldens: Some(goldens.clone()),
        bless: args.bless,
        seed: Some(seed),
        monte_carlo: Some(n_traj),
    };
    write_resolved(sink, "reproduce-all", &toml_table(&resolved))?;
    println!(
        "{} {} tables in {}",
        if args.bless { "blessed" } else { "checked" },
        tables.len(),
        sink.out.display()
    );
    if drift.is_empty() {
        Ok(())
    } else {
        Err(CliError::GoldenMismatch(drift))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_names_resolve() {
        for name in ["ghz", "plus", "w", "dicke", "mixed", "basis", "bell-psi-", "phi", "ex1", "ex3", "ex5", "mixed-ghz"] {
            let s = StateArgs {
                state: Some(name.into()),
                p: Some(0.5),
                ..Default::default()
            };
            resolve_state(&s, None).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn resolved_state_keeps_only_relevant_fields() {
        let s = StateArgs {
            state: Some("ex4".into()),
            n: Some(5),
            phi: Some(0.3),
            ..Default::default()
        };
        let (_, r) = resolve_state(&s, None).unwrap();
        assert_eq!((r.n, r.p, r.phi), (None, Some(1.0), None));
    }

    #[test]
    fn bad_state_arguments_are_usage_errors() {
        let unknown = StateArgs {
            state: Some("cat".into()),
            ..Default::default()
        };
        assert_eq!(resolve_state(&unknown, None).unwrap_err().exit_code(), 1);
        let range = StateArgs {
            state: Some("ex4".into()),
            p: Some(2.0),
            ..Default::default()
        };
        assert_eq!(resolve_state(&range, None).unwrap_err().exit_code(), 1);
        assert!(resolve_state(&StateArgs::default(), None).is_err());
    }

    #[test]
    fn figure_preset_yields_to_flags() {
        let run = resolve_dephase(DephaseArgs {
            figure: Some(DephaseFigure::Fig3b),
            points: Some(5),
            ..Default::default()
        })
        .unwrap();
        assert_eq!(run.times.len(), 5);
        assert_eq!(run.args.couplings, Some(vec![1.0, 0.8, 0.2]));
        assert_eq!(run.args.topology, Some(TopologyArg::Independent));
        assert_eq!(run.args.seed, None);
    }

    #[test]
    fn ghz_decomposition_rows() {
        let (rho, _) = resolve_state(
            &StateArgs {
                state: Some("ghz".into()),
                ..Default::default()
            },
            None,
        )
        .unwrap();
        let t = decompose_table(&rho).unwrap();
        assert!((t.column("c_l1").unwrap()[3] - 0.5).abs() < 1e-15);
        assert!((t.column("i_m").unwrap()[3] - 0.25).abs() < 1e-15);
        assert_eq!(t.column("n_m").unwrap(), vec![20.0, 15.0, 6.0, 1.0]);
    }
}
