use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use pseudoheat::algebra::identity_report;
use pseudoheat::extrema::{dist_func_time, joint_cdf_time, lft_extrema, Extremum, LftQuery};
use pseudoheat::hitting::{hitting_profiles, hitting_place_weights, lft_hitting, multipole_lt, Direction, HittingQuery};
use pseudoheat::inversion::{talbot_invert, TalbotConfig};
use pseudoheat::kernel::{heat_kernel_detailed, potential_phi, potential_psi, KernelQuery};
use pseudoheat::lattice::{build_lattice, expect_max_functional, first_passage_transform, GridSpec};
use pseudoheat::verify::{verify_all, VerifyConfig};
use pseudoheat::{build_root_system, Error, Half, ParamSet};

#[derive(Parser)]
#[command(name = "pseudoheat", version, about = "Pseudo-process kernels, extrema and hitting laws", allow_negative_numbers = true)]
struct Cli {
    /// Order N of the equation.
    #[arg(long = "N", global = true)]
    order: Option<usize>,
    /// Sign κ; required for odd N, must equal the forced sign for even N.
    #[arg(long, global = true, allow_negative_numbers = true)]
    kappa: Option<i32>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 32)]
    talbot_nodes: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Max,
    Min,
}

#[derive(Clone, Copy, ValueEnum)]
enum Side {
    Up,
    Down,
}

#[derive(Clone, Copy, ValueEnum)]
enum Potential {
    Phi,
    Psi,
}

#[derive(Subcommand)]
enum Cmd {
    /// Roots θ_l with their half-plane and coefficient.
    Roots,
    /// Residuals of the exact algebraic identities.
    Identities,
    /// p(t;ξ) on a uniform ξ grid.
    Kernel(KernelArgs),
    /// Joint law of the process and its maximum or minimum, by Talbot inversion.
    Extrema(ExtremaArgs),
    /// Multipole law of the first hitting place.
    Hitting(HittingArgs),
    /// Talbot inversion of the potentials Φ or Ψ.
    Invert(InvertArgs),
    /// Signed-lattice oracle against the closed forms.
    LatticeCheck(LatticeArgs),
    /// Full invariant suite; exit 1 on any breach.
    VerifyAll(VerifyArgs),
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct KernelArgs {
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long, default_value_t = -5.0)]
    xi_min: f64,
    #[arg(long, default_value_t = 5.0)]
    xi_max: f64,
    #[arg(long, default_value_t = 101)]
    steps: usize,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct ExtremaArgs {
    #[arg(long, value_enum, default_value_t = Which::Max)]
    which: Which,
    #[arg(long, default_value_t = 0.0)]
    x: f64,
    #[arg(long)]
    y: f64,
    #[arg(long)]
    z: f64,
    /// Times, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    t: Vec<f64>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct HittingArgs {
    #[arg(long)]
    a: f64,
    #[arg(long, default_value_t = 0.0)]
    x: f64,
    #[arg(long, value_enum, default_value_t = Side::Up)]
    direction: Side,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// Times at which the profiles J_q / K_q are evaluated, comma separated.
    #[arg(long, value_delimiter = ',')]
    t: Vec<f64>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct InvertArgs {
    #[arg(long, value_enum, default_value_t = Potential::Phi)]
    what: Potential,
    #[arg(long, default_value_t = 0.0)]
    xi: f64,
    #[arg(long, value_delimiter = ',', required = true)]
    t: Vec<f64>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct LatticeArgs {
    /// Dyadic levels, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "4,6,8,10")]
    n: Vec<u32>,
    #[arg(long, default_value_t = -6.0)]
    grid_min: f64,
    #[arg(long, default_value_t = 5.97)]
    grid_max: f64,
    #[arg(long, default_value_t = 400)]
    grid_points: usize,
    #[arg(long, default_value_t = 0.0)]
    x: f64,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = 0.7)]
    mu: f64,
    #[arg(long, default_value_t = 0.3)]
    nu: f64,
    /// Compare the first passage above `a` instead of the maximum functional.
    #[arg(long)]
    a: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    samples: usize,
}

enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut s = self.columns.join(",");
                s.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row
                        .iter()
                        .map(|c| match c {
                            Cell::Num(v) => format!("{v:.16e}"),
                            Cell::Int(v) => v.to_string(),
                            Cell::Text(t) if t.contains(',') => format!("\"{t}\""),
                            Cell::Text(t) => t.clone(),
                        })
                        .collect();
                    s.push_str(&cells.join(","));
                    s.push('\n');
                }
                s
            }
            Format::Json => {
                let rows: Vec<Vec<serde_json::Value>> = self
                    .rows
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|c| match c {
                                Cell::Num(v) => serde_json::json!(v),
                                Cell::Int(v) => serde_json::json!(v),
                                Cell::Text(t) => serde_json::json!(t),
                            })
                            .collect()
                    })
                    .collect();
                let doc = serde_json::json!({ "columns": self.columns, "rows": rows });
                let mut s = serde_json::to_string_pretty(&doc).expect("plain values serialize");
                s.push('\n');
                s
            }
        }
    }
}

enum Failure {
    Usage(String),
    Compute(Error),
    Verification(Vec<String>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParams(_) | Error::Ordering(_) | Error::Side(_) | Error::OutOfRange(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Compute(other),
        }
    }
}

fn params(cli: &Cli) -> Result<ParamSet, Failure> {
    let n = cli.order.ok_or_else(|| Failure::Usage("--N is required".into()))?;
    let p = match (n % 2, cli.kappa) {
        (0, None) => ParamSet::even(n),
        (_, Some(k)) => ParamSet::new(n, k),
        (_, None) => return Err(Failure::Usage(format!("--kappa is required for odd N={n}"))),
    };
    Ok(p?)
}

fn regime(p: ParamSet) -> &'static str {
    if p.is_even() {
        "rigorous"
    } else {
        "formal"
    }
}

fn run(cli: &Cli) -> Result<Table, Failure> {
    let p = params(cli)?;
    let rs = build_root_system(p);
    let talbot = TalbotConfig::new(cli.talbot_nodes)?;
    match &cli.cmd {
        Cmd::Roots => {
            let mut t = Table::new(&["l", "theta_re", "theta_im", "angle_over_pi", "half", "coef_re", "coef_im"]);
            for l in 0..p.order() {
                let th = rs.theta()[l];
                let c = rs.coefficient(l);
                let half = match rs.side_of(l) {
                    Half::J => "J",
                    Half::K => "K",
                };
                t.rows.push(vec![
                    Cell::Int(l as i64),
                    Cell::Num(th.re),
                    Cell::Num(th.im),
                    Cell::Num(rs.angle(l) / std::f64::consts::PI),
                    Cell::Text(half.into()),
                    Cell::Num(c.re),
                    Cell::Num(c.im),
                ]);
            }
            Ok(t)
        }
        Cmd::Identities => {
            let mut t = Table::new(&["identity", "residual"]);
            for (name, r) in identity_report(&rs).entries {
                t.rows.push(vec![Cell::Text(name), Cell::Num(r)]);
            }
            Ok(t)
        }
        Cmd::Kernel(a) => {
            if a.steps == 0 || !(a.xi_max >= a.xi_min) {
                return Err(Failure::Usage("empty xi range".into()));
            }
            let mut t = Table::new(&["xi", "p", "error_estimate"]);
            for i in 0..a.steps {
                let xi = if a.steps == 1 {
                    a.xi_min
                } else {
                    a.xi_min + (a.xi_max - a.xi_min) * i as f64 / (a.steps - 1) as f64
                };
                let r = heat_kernel_detailed(&KernelQuery::new(p, a.t, xi))?;
                t.rows.push(vec![Cell::Num(xi), Cell::Num(r.value), Cell::Num(r.error_estimate)]);
            }
            Ok(t)
        }
        Cmd::Extrema(a) => {
            let which = match a.which {
                Which::Max => Extremum::Max,
                Which::Min => Extremum::Min,
            };
            let mut t = Table::new(&["t", "joint_cdf", "joint_cdf_error", "straddle", "straddle_error", "regime"]);
            for &time in &a.t {
                let f = joint_cdf_time(&rs, time, a.x, a.y, a.z, which, talbot)?;
                let s = dist_func_time(&rs, time, a.x, a.y, a.z, which, talbot)?;
                t.rows.push(vec![
                    Cell::Num(time),
                    Cell::Num(f.value),
                    Cell::Num(f.error_estimate),
                    Cell::Num(s.value),
                    Cell::Num(s.error_estimate),
                    Cell::Text(regime(p).into()),
                ]);
            }
            Ok(t)
        }
        Cmd::Hitting(a) => {
            let dir = match a.direction {
                Side::Up => Direction::Up,
                Side::Down => Direction::Down,
            };
            let q = HittingQuery::new(a.a, a.x, dir)?;
            let lambda = Complex64::new(a.lambda, 0.0);
            let weights = hitting_place_weights(&rs, &q).weights().expect("weight mode");
            let coefs = multipole_lt(&rs, &q, lambda);
            let profiles = hitting_profiles(&rs, &q);
            let mut cols = vec!["q".to_string(), "weight".into(), "lt_coef_re".into(), "lt_coef_im".into()];
            cols.extend(a.t.iter().map(|t| format!("profile_t={t:.16e}")));
            let mut t = Table { columns: cols, rows: Vec::new() };
            let at: Vec<Vec<(usize, f64)>> = a.t.iter().map(|&s| profiles.evaluate_at(s)).collect::<Result<_, _>>()?;
            for (i, (w, (qq, c))) in weights.iter().zip(&coefs).enumerate() {
                let mut row = vec![Cell::Int(*qq as i64), Cell::Num(*w), Cell::Num(c.re), Cell::Num(c.im)];
                row.extend(at.iter().map(|v| Cell::Num(v[i].1)));
                t.rows.push(row);
            }
            Ok(t)
        }
        Cmd::Invert(a) => {
            let mut t = Table::new(&["t", "value", "error_estimate"]);
            for &time in &a.t {
                let r = match a.what {
                    Potential::Phi => talbot_invert(&|l: Complex64| potential_phi(&rs, l, a.xi), time, talbot)?,
                    Potential::Psi => talbot_invert(&|l: Complex64| potential_psi(&rs, l, a.xi), time, talbot)?,
                };
                t.rows.push(vec![Cell::Num(time), Cell::Num(r.value.re), Cell::Num(r.error_estimate)]);
            }
            Ok(t)
        }
        Cmd::LatticeCheck(a) => {
            let grid = GridSpec::spanning(a.grid_min, a.grid_max, a.grid_points)?;
            let lambda = Complex64::new(a.lambda, 0.0);
            let closed = match a.a {
                Some(level) => lft_hitting(&rs, &HittingQuery::up(level, a.x)?, lambda, a.mu),
                None => lft_extrema(&rs, &LftQuery::new(lambda, a.mu, a.nu, a.x)?, Extremum::Max),
            };
            let mut t = Table::new(&["n", "oracle_re", "oracle_im", "closed_re", "closed_im", "abs_error"]);
            for &level in &a.n {
                let lat = build_lattice(p, level, grid)?;
                let v = match a.a {
                    Some(level) => first_passage_transform(&lat, a.x, level, lambda, a.mu)?,
                    None => expect_max_functional(&lat, a.x, lambda, a.mu, a.nu)?,
                };
                t.rows.push(vec![
                    Cell::Int(level as i64),
                    Cell::Num(v.re),
                    Cell::Num(v.im),
                    Cell::Num(closed.re),
                    Cell::Num(closed.im),
                    Cell::Num((v - closed).norm()),
                ]);
            }
            Ok(t)
        }
        Cmd::VerifyAll(a) => {
            let checks = verify_all(p, VerifyConfig { seed: a.seed, samples: a.samples, talbot });
            let mut t = Table::new(&["check", "residual", "tolerance", "status"]);
            let mut failed = Vec::new();
            for c in &checks {
                let ok = c.passed();
                if !ok {
                    failed.push(format!("{} residual {:e} > {:e}", c.name, c.residual, c.tolerance));
                }
                t.rows.push(vec![
                    Cell::Text(c.name.clone()),
                    Cell::Num(c.residual),
                    Cell::Num(c.tolerance),
                    Cell::Text(if ok { "pass" } else { "FAIL" }.into()),
                ]);
            }
            if failed.is_empty() {
                Ok(t)
            } else {
                emit(cli, &t).map_err(Failure::Usage)?;
                Err(Failure::Verification(failed))
            }
        }
    }
}

fn emit(cli: &Cli, table: &Table) -> Result<(), String> {
    let text = table.render(cli.format);
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli).and_then(|t| emit(&cli, &t).map_err(Failure::Usage));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(lines)) => {
            for l in lines {
                eprintln!("FAIL {l}");
            }
            ExitCode::from(1)
        }
    }
}
