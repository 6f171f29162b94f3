use std::env;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use deception::{emit_csv, format_value, parse_game_spec, write_csv, Error, Model, Result};
use deception_core::design::{design_gmm, grid_range};
use deception_core::geometry::{
    belief_partition, concavify, optimal_manipulation, prior_utility_pwl, sample_partition, Cell,
};
use deception_core::insider::{
    figure_data, headline_stats, Figure, FigureConfig, InsiderParams, StatsConfig, Table,
};
use deception_core::lp::{design_capacity_bounds, optimal_generator, LpStatus};
use deception_core::{prior_utility, BasicGame, Generator};

/// Overrides the default output directory of `case-study`.
const OUT_DIR_VAR: &str = "DECEPTION_OUT_DIR";

/// Samples used by `partition` when the state space is too large for exact
/// cells.
const PARTITION_SAMPLES: usize = 10_000;

#[derive(Parser)]
#[command(name = "deception", version, about = "Optimal deception mechanisms for defender/user games")]
struct Cli {
    /// Probabilities at or below this are treated as zero in reports.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Seed for sampled outputs.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal credible generator for a game spec.
    Solve {
        spec: PathBuf,
        /// Allow user beliefs that differ from the true prior.
        #[arg(long)]
        covert: bool,
    },
    /// Prior utility and its concave closure over b(x1) (two states only).
    Concavify {
        spec: PathBuf,
        #[arg(long, default_value_t = 101)]
        samples: usize,
    },
    /// Best-response cells of every policy on the belief simplex.
    Partition { spec: PathBuf },
    /// Joint modulator, manipulator and generator design.
    Design {
        spec: PathBuf,
        /// Transfer grid per non-drop-out action, as `lo:step:hi`.
        #[arg(long, allow_hyphen_values = true)]
        c_grid: String,
    },
    /// Tables behind the honeypot case-study figures.
    CaseStudy {
        #[arg(long)]
        figure: String,
        /// Points per axis (surfaces) or along the curve.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lower and upper bounds on the optimal value.
    Bounds { spec: PathBuf },
    /// Headline gains of the honeypot case study.
    Stats {
        #[arg(long)]
        grid: Option<usize>,
    },
}

/// A command's result: labelled scalars and an optional table.
struct Report {
    lines: Vec<(String, String)>,
    table: Option<Table>,
}

impl Report {
    fn new() -> Self {
        Report {
            lines: Vec::new(),
            table: None,
        }
    }

    fn line(&mut self, key: &str, value: impl ToString) {
        self.lines.push((key.into(), value.to_string()));
    }

    fn print(&self, format: Format) -> Result<()> {
        let stdout = io::stdout();
        let mut out = stdout.lock();
        let io_err = |source| Error::Io {
            path: "<stdout>".into(),
            source,
        };
        match format {
            Format::Csv => match &self.table {
                Some(t) => write_csv(t, &mut out),
                None => {
                    let keys: Vec<&str> = self.lines.iter().map(|l| l.0.as_str()).collect();
                    let values: Vec<&str> = self.lines.iter().map(|l| l.1.as_str()).collect();
                    writeln!(out, "{}\n{}", keys.join(","), values.join(",")).map_err(io_err)
                }
            },
            Format::Text => {
                let width = self.lines.iter().map(|l| l.0.len()).max().unwrap_or(0);
                for (k, v) in &self.lines {
                    writeln!(out, "{k:<width$}  {v}").map_err(io_err)?;
                }
                if let Some(t) = &self.table {
                    if !self.lines.is_empty() {
                        writeln!(out).map_err(io_err)?;
                    }
                    write_aligned(t, &mut out).map_err(io_err)?;
                }
                Ok(())
            }
        }
    }
}

fn write_aligned(t: &Table, out: &mut impl Write) -> io::Result<()> {
    let cells: Vec<Vec<String>> = t
        .rows
        .iter()
        .map(|r| r.iter().map(|&v| format_value(v)).collect())
        .collect();
    let widths: Vec<usize> = (0..t.columns.len())
        .map(|j| {
            cells
                .iter()
                .map(|r| r[j].len())
                .chain([t.columns[j].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |items: &[String]| {
        items
            .iter()
            .zip(&widths)
            .map(|(s, w)| format!("{s:>w$}"))
            .collect::<Vec<_>>()
            .join("  ")
    };
    writeln!(out, "{}", line(&t.columns))?;
    for r in &cells {
        writeln!(out, "{}", line(r))?;
    }
    Ok(())
}

fn fmt_vec(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|&x| format_value(x)).collect();
    format!("[{}]", items.join(", "))
}

fn policy_label(game: &BasicGame, actions: &[usize]) -> String {
    actions
        .iter()
        .map(|&a| game.actions()[a].as_str())
        .collect::<Vec<_>>()
        .join("/")
}

/// Signals with positive probability: index, prescribed action per type,
/// then one probability per state.
fn generator_table(game: &BasicGame, generator: &Generator, tol: f64) -> Table {
    let space = generator.space();
    let mut columns = vec!["signal".to_string()];
    columns.extend(game.types().iter().map(|t| format!("a_{t}")));
    columns.extend(game.states().iter().map(|x| format!("pi_{x}")));
    let mut rows = Vec::new();
    for s in 0..generator.num_signals() {
        let probs: Vec<f64> = (0..generator.num_states()).map(|x| generator.prob(s, x)).collect();
        if probs.iter().all(|&p| p <= tol) {
            continue;
        }
        let mut row = vec![s as f64];
        row.extend((0..space.num_types()).map(|t| space.action_of(s, t) as f64));
        row.extend(probs);
        rows.push(row);
    }
    Table { columns, rows }
}

fn signal_lines(report: &mut Report, game: &BasicGame, generator: &Generator, tol: f64) {
    let space = generator.space();
    for s in 0..generator.num_signals() {
        let probs: Vec<f64> = (0..generator.num_states()).map(|x| generator.prob(s, x)).collect();
        if probs.iter().any(|&p| p > tol) {
            let actions: Vec<usize> = (0..space.num_types()).map(|t| space.action_of(s, t)).collect();
            report.line(
                &format!("signal {}", policy_label(game, &actions)),
                fmt_vec(&probs),
            );
        }
    }
}

fn load(spec: &Path) -> Result<Model> {
    parse_game_spec(spec)
}

fn solve(cli: &Cli, spec: &Path, covert: bool) -> Result<Report> {
    let m = load(spec)?;
    if !covert && !m.beliefs.is_overt() {
        return Err(Error::Validation {
            line: 0,
            field: "beliefs.b_U".into(),
            message: "user beliefs differ from b; pass --covert to solve the covert problem".into(),
        });
    }
    let report = optimal_generator(&m.game, &m.beliefs, &m.modulator)?;
    let mut r = Report::new();
    r.line("status", format!("{:?}", report.status));
    if report.status != LpStatus::Optimal {
        return Ok(r);
    }
    let prior = prior_utility(&m.game, &m.beliefs, &m.modulator);
    r.line("value", format_value(report.objective_value));
    r.line("prior_utility", format_value(prior));
    r.line("trust_margin", format_value(report.objective_value - prior));
    r.line("lower_bound", format_value(report.bounds.lower));
    r.line("upper_bound", format_value(report.bounds.upper));
    if let Some(g) = &report.generator {
        if cli.format == Format::Text {
            signal_lines(&mut r, &m.game, g, cli.tol);
        } else {
            r.table = Some(generator_table(&m.game, g, cli.tol));
        }
    }
    Ok(r)
}

fn concavify_cmd(cli: &Cli, spec: &Path, samples: usize) -> Result<Report> {
    let m = load(spec)?;
    let f = prior_utility_pwl(&m.game, m.beliefs.b_d(), &m.modulator)?;
    let v = concavify(&f);
    let man = optimal_manipulation(&m.game, m.beliefs.b_d(), &m.modulator)?;
    let mut r = Report::new();
    r.line("breakpoints", fmt_vec(f.breakpoints()));
    r.line("closure_breakpoints", fmt_vec(v.breakpoints()));
    r.line("best_prior", format_value(man.p));
    r.line("best_prior_value", format_value(man.value));
    if man.sup_gap > cli.tol {
        r.line("unattained_supremum", format_value(man.supremum));
    }
    let p = m.beliefs.b()[0];
    r.line("value_at_b", format_value(v.eval(p)));
    let n = samples.max(2);
    let rows = (0..n)
        .map(|i| {
            let p = i as f64 / (n - 1) as f64;
            vec![p, f.eval(p), v.eval(p)]
        })
        .collect();
    r.table = Some(Table {
        columns: vec!["p".into(), "prior".into(), "closure".into()],
        rows,
    });
    Ok(r)
}

fn describe_cell(cell: &Cell) -> String {
    match cell {
        Cell::Empty => "empty".into(),
        Cell::Interval { lo, hi } => format!("b(x1) in [{}, {}]", format_value(*lo), format_value(*hi)),
        Cell::Polygon(vs) => {
            let pts: Vec<String> = vs.iter().map(|v| fmt_vec(v)).collect();
            format!("polygon {}", pts.join(" "))
        }
    }
}

fn partition_cmd(cli: &Cli, spec: &Path) -> Result<Report> {
    let m = load(spec)?;
    let mut r = Report::new();
    let n = m.game.num_states();
    let types = m.game.num_types();
    let mut columns = vec!["policy".to_string()];
    columns.extend(m.game.types().iter().map(|t| format!("a_{t}")));
    let mut rows = Vec::new();
    if n == 2 || n == 3 {
        let part = belief_partition(&m.game, &m.modulator)?;
        columns.push("measure".into());
        for (s, cell) in part.joint.iter().enumerate() {
            if cell.is_empty() {
                continue;
            }
            let actions: Vec<usize> = (0..types).map(|t| part.space.action_of(s, t)).collect();
            r.line(&policy_label(&m.game, &actions), describe_cell(cell));
            let mut row = vec![s as f64];
            row.extend(actions.iter().map(|&a| a as f64));
            row.push(cell.measure());
            rows.push(row);
        }
    } else {
        let space = m.game.policy_space()?;
        let part = sample_partition(&m.game, &m.modulator, PARTITION_SAMPLES, cli.seed);
        columns.push("samples".into());
        for (label, &count) in part.labels.iter().zip(&part.counts) {
            r.line(&policy_label(&m.game, label), format!("{count} of {PARTITION_SAMPLES} samples"));
            let mut row = vec![space.index_of(label) as f64];
            row.extend(label.iter().map(|&a| a as f64));
            row.push(count as f64);
            rows.push(row);
        }
    }
    if cli.format == Format::Csv {
        r.table = Some(Table { columns, rows });
    }
    Ok(r)
}

fn parse_range(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::Validation {
        line: 0,
        field: "--c-grid".into(),
        message: format!("expected lo:step:hi, got {s:?}"),
    };
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad())?;
    match parts[..] {
        [lo, step, hi] => Ok(grid_range(lo, step, hi)?),
        _ => Err(bad()),
    }
}

fn design_cmd(cli: &Cli, spec: &Path, c_grid: &str) -> Result<Report> {
    let m = load(spec)?;
    let grid = parse_range(c_grid)?;
    let c_grid = vec![grid; m.game.num_actions() - 1];
    let d = design_gmm(&m.game, m.beliefs.b_d(), m.modulator.gamma(), &c_grid)?;
    let mut r = Report::new();
    r.line("value", format_value(d.value));
    r.line("c", fmt_vec(d.modulator.c()));
    r.line("gamma", format_value(d.modulator.gamma()));
    r.line("b", fmt_vec(d.manipulated_beliefs.b()));
    r.line("candidates_evaluated", d.stage_log.candidates_evaluated);
    if cli.format == Format::Text {
        signal_lines(&mut r, &m.game, &d.generator, cli.tol);
    } else {
        r.table = Some(generator_table(&m.game, &d.generator, cli.tol));
    }
    Ok(r)
}

fn case_study(figure: &str, grid: Option<usize>, out: Option<&Path>) -> Result<Report> {
    let figure: Figure = figure.parse()?;
    let mut config = FigureConfig::default();
    if let Some(n) = grid {
        config.surface_points = n;
        config.curve_points = n;
    }
    let table = figure_data(figure, &InsiderParams::benchmark(), &config)?;
    let dir = out.map(Path::to_path_buf).or_else(|| env::var_os(OUT_DIR_VAR).map(PathBuf::from));
    let mut r = Report::new();
    match dir {
        Some(dir) => {
            std::fs::create_dir_all(&dir).map_err(|source| Error::Io {
                path: dir.clone(),
                source,
            })?;
            let path = dir.join(format!("{figure}.csv"));
            emit_csv(&table, &path)?;
            r.line("wrote", path.display());
            r.line("rows", table.rows.len());
        }
        None => r.table = Some(table),
    }
    Ok(r)
}

fn bounds_cmd(spec: &Path) -> Result<Report> {
    let m = load(spec)?;
    let b = design_capacity_bounds(&m.game, m.beliefs.b_d(), &m.modulator);
    let mut r = Report::new();
    r.line("lower", format_value(b.lower));
    r.line("upper", format_value(b.upper));
    Ok(r)
}

fn stats(grid: Option<usize>) -> Result<Report> {
    let mut config = StatsConfig::default();
    if let Some(n) = grid {
        config.surface_points = n;
    }
    let s = headline_stats(&InsiderParams::benchmark(), &config)?;
    let mut r = Report::new();
    r.line("near_threshold_ratio", format_value(s.near_threshold_ratio));
    r.line("near_threshold_prior", format_value(s.near_threshold_prior));
    for (name, g) in [("fig5", s.avg_gain_fig5), ("fig8", s.avg_gain_fig8)] {
        r.line(&format!("{name}_ratio_of_means"), format_value(g.ratio_of_means));
        r.line(&format!("{name}_mean_of_ratios"), format_value(g.mean_of_ratios));
        r.line(&format!("{name}_included"), g.included);
        r.line(&format!("{name}_excluded"), g.excluded);
    }
    Ok(r)
}

fn run(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Solve { spec, covert } => solve(cli, spec, *covert),
        Command::Concavify { spec, samples } => concavify_cmd(cli, spec, *samples),
        Command::Partition { spec } => partition_cmd(cli, spec),
        Command::Design { spec, c_grid } => design_cmd(cli, spec, c_grid),
        Command::CaseStudy { figure, grid, out } => case_study(figure, *grid, out.as_deref()),
        Command::Bounds { spec } => bounds_cmd(spec),
        Command::Stats { grid } => stats(*grid),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|r| r.print(cli.format)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
