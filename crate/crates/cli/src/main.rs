//! `baire`: run, duel, play by hand, verify and extract certificates.

mod config;
mod interactive;
mod verify;

use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use baire_game::functions::RealMap;
use baire_game::game::{run_match, Winner};
use baire_game::metric::{Ball, Region};
use baire_game::scheme::{build_scheme, DEFAULT_CELL_BUDGET};
use baire_game::strategies::{fsigma_certificate, phi_approx};

use config::{ConfigError, MatchConfig, Settings, PRECISION_ENV};
use interactive::{Opponent, Role};

const DUEL_SCHEMA: &str = "baire-duel/1";
const FSIGMA_SCHEMA: &str = "baire-fsigma/1";
const PHI_SCHEMA: &str = "baire-phi/1";

#[derive(Parser)]
#[command(name = "baire", version, about = "Exact play of the Baire class one game G(f)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug, Default)]
struct MatchArgs {
    /// `key = value` file; flags override its settings.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Catalog entry, e.g. `sign`, `step:0`, `dirichlet`.
    #[arg(long)]
    function: Option<String>,
    /// Player I strategy: tau, tau_prime, converge-to:x, repeat:x, random-legal.
    #[arg(long = "I")]
    player_i: Option<String>,
    /// Player II strategy: sigma_star, const:v, copycat, random, dense-index:i.
    #[arg(long = "II")]
    player_ii: Option<String>,
    #[arg(long)]
    horizon: Option<usize>,
    /// Rational `num/den`.
    #[arg(long)]
    shrink_tol: Option<String>,
    #[arg(long)]
    value_tol: Option<String>,
    #[arg(long)]
    tail_fraction: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Look-ahead window of sigma_star.
    #[arg(long)]
    window: Option<u64>,
    /// Bits used when rounding irrational quantities.
    #[arg(long, env = PRECISION_ENV)]
    precision: Option<u32>,
}

impl MatchArgs {
    fn settings(&self) -> Result<Settings, ConfigError> {
        let flags = Settings {
            function: self.function.clone(),
            player_i: self.player_i.clone(),
            player_ii: self.player_ii.clone(),
            horizon: self.horizon,
            shrink_tol: self.shrink_tol.clone(),
            value_tol: self.value_tol.clone(),
            tail_fraction: self.tail_fraction.clone(),
            seed: self.seed,
            window: self.window,
            precision: self.precision,
        };
        let file = match &self.config {
            Some(p) => Settings::load(p)?,
            None => Settings::default(),
        };
        let s = flags.over(file);
        s.apply_precision();
        Ok(s)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Play one match and print its transcript as JSON lines.
    Play {
        #[command(flatten)]
        m: MatchArgs,
        /// Also write the transcript to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Play every pairing of comma-separated strategy lists over several seeds.
    Duel {
        #[command(flatten)]
        m: MatchArgs,
        /// Seeds `seed, seed + 1, ...` to play.
        #[arg(long, default_value_t = 1)]
        seeds: u64,
    },
    /// Play by hand against a strategy.
    Interactive {
        #[command(flatten)]
        m: MatchArgs,
        /// The side the human plays; the configured strategy plays the other.
        #[arg(long, value_enum)]
        role: Role,
        /// Write the transcript here instead of standard output.
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Run an invariant suite; exits 1 if any check fails.
    Verify {
        #[arg(value_enum)]
        suite: verify::Suite,
    },
    /// Read an F_sigma description of a preimage off a Player II strategy.
    ExtractFsigma {
        #[command(flatten)]
        m: MatchArgs,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        /// Pieces of V as `center;radius`; repeatable.
        #[arg(long = "v", required = true)]
        v: Vec<String>,
        /// Space to build the scheme on, `center;radius`; defaults to the domain hull.
        #[arg(long)]
        space: Option<String>,
    },
    /// Feed a branch of the selection tree to a Player I strategy.
    Phi {
        #[command(flatten)]
        m: MatchArgs,
        /// Comma-separated branch `s(0),s(1),...` with `s(n) <= n`.
        #[arg(long, value_delimiter = ',')]
        branch: Vec<u64>,
    },
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Run(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

fn run_err<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Run(e.to_string())
}

fn config_err<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Config(e.to_string())
}

fn play(m: &MatchArgs, out_file: Option<&PathBuf>, out: &mut impl Write) -> Result<ExitCode, Failure> {
    let cfg = MatchConfig::resolve(&m.settings()?)?;
    let mut i = cfg.build_i(&cfg.player_i)?;
    let mut ii = cfg.build_ii(&cfg.player_ii)?;
    let t = run_match(&cfg.f, i.as_mut(), ii.as_mut(), &cfg.referee).map_err(run_err)?;
    let text = t.to_json_lines(Some(&cfg.referee));
    out.write_all(text.as_bytes())?;
    if let Some(p) = out_file {
        std::fs::write(p, &text)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn names(list: &str) -> Vec<String> {
    list.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

fn duel(m: &MatchArgs, seeds: u64, out: &mut impl Write) -> Result<ExitCode, Failure> {
    let s = m.settings()?;
    let is = names(s.player_i.as_deref().ok_or(ConfigError::Missing("I"))?);
    let iis = names(s.player_ii.as_deref().ok_or(ConfigError::Missing("II"))?);
    let base_seed = s.seed.unwrap_or(0);
    let mut tally = [0u64; 3];
    for pi in &is {
        for pii in &iis {
            for k in 0..seeds {
                let seed = base_seed + k;
                let one = Settings { player_i: Some(pi.clone()), player_ii: Some(pii.clone()), seed: Some(seed), ..s.clone() };
                let cfg = MatchConfig::resolve(&one)?;
                let mut i = cfg.build_i(pi)?;
                let mut ii = cfg.build_ii(pii)?;
                let t = run_match(&cfg.f, i.as_mut(), ii.as_mut(), &cfg.referee).map_err(run_err)?;
                let v = t.verdict.as_ref().ok_or_else(|| Failure::Run("match ended without a verdict".into()))?;
                tally[match v.winner {
                    Winner::I => 0,
                    Winner::II => 1,
                    Winner::Undecided => 2,
                }] += 1;
                let rec = serde_json::json!({
                    "schema": DUEL_SCHEMA,
                    "function": cfg.f.name(),
                    "I": pi,
                    "II": pii,
                    "seed": seed,
                    "rounds": t.round(),
                    "verdict": v,
                });
                writeln!(out, "{rec}")?;
            }
        }
    }
    let summary = serde_json::json!({
        "schema": DUEL_SCHEMA,
        "summary": { "I": tally[0], "II": tally[1], "undecided": tally[2] },
    });
    writeln!(out, "{summary}")?;
    Ok(ExitCode::SUCCESS)
}

fn interactive(m: &MatchArgs, role: Role, transcript: Option<&PathBuf>, out: &mut impl Write) -> Result<ExitCode, Failure> {
    let mut s = m.settings()?;
    // the human's own side needs no strategy
    match role {
        Role::I => s.player_i = Some(s.player_i.unwrap_or_else(|| "repeat:0".into())),
        Role::II => s.player_ii = Some(s.player_ii.unwrap_or_else(|| "dense-index:0".into())),
    }
    let cfg = MatchConfig::resolve(&s)?;
    let opponent = match role {
        Role::I => Opponent::II(cfg.build_ii(&cfg.player_ii)?),
        Role::II => Opponent::I(cfg.build_i(&cfg.player_i)?),
    };
    let stdin = io::stdin();
    let t = interactive::run(&mut stdin.lock(), out, &cfg, opponent)?;
    let text = t.to_json_lines(Some(&cfg.referee));
    match transcript {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(ExitCode::SUCCESS)
}

fn run_verify(suite: verify::Suite, out: &mut impl Write) -> Result<ExitCode, Failure> {
    let results = verify::run(suite);
    let failed = results.iter().filter(|r| !r.passed()).count();
    for r in &results {
        writeln!(out, "{}", r.to_json())?;
    }
    let summary = serde_json::json!({
        "schema": verify::REPORT_SCHEMA,
        "suite": suite.name(),
        "summary": { "passed": results.len() - failed, "failed": failed },
    });
    writeln!(out, "{summary}")?;
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn extract_fsigma(m: &MatchArgs, depth: usize, v: &[String], space: Option<&str>, out: &mut impl Write) -> Result<ExitCode, Failure> {
    let mut s = m.settings()?;
    s.player_i = Some(s.player_i.unwrap_or_else(|| "repeat:0".into()));
    s.player_ii = Some(s.player_ii.unwrap_or_else(|| "sigma_star".into()));
    let cfg = MatchConfig::resolve(&s)?;
    let pieces: Vec<Ball> = v.iter().map(|b| b.parse::<Ball>()).collect::<Result<_, _>>().map_err(config_err)?;
    let space = match space {
        Some(text) => Region::ball(text.parse::<Ball>().map_err(config_err)?),
        None => Region::ball(cfg.f.domain().hull_ball()),
    };
    let scheme = build_scheme(&space, depth, DEFAULT_CELL_BUDGET).map_err(config_err)?;
    let strategy = cfg.build_ii(&cfg.player_ii)?;
    let regions: Vec<Region> = pieces.iter().cloned().map(Region::ball).collect();
    let cert = fsigma_certificate(strategy.as_ref(), &scheme, &regions, depth).map_err(run_err)?;
    let header = serde_json::json!({
        "schema": FSIGMA_SCHEMA,
        "function": cfg.f.name(),
        "II": cfg.player_ii,
        "depth": cert.depth,
        "scheme_nodes": scheme.len(),
        "v": pieces,
        "pieces": cert.pieces.len(),
    });
    writeln!(out, "{header}")?;
    for p in &cert.pieces {
        writeln!(out, "{}", serde_json::json!({ "piece": p }))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn phi(m: &MatchArgs, branch: &[u64], out: &mut impl Write) -> Result<ExitCode, Failure> {
    let mut s = m.settings()?;
    s.player_i = Some(s.player_i.unwrap_or_else(|| "tau".into()));
    s.player_ii = Some(s.player_ii.unwrap_or_else(|| "dense-index:0".into()));
    let cfg = MatchConfig::resolve(&s)?;
    let mut strategy = cfg.build_i(&cfg.player_i)?;
    let res = phi_approx(strategy.as_mut(), cfg.f.dense_range(), branch, branch.len()).map_err(config_err)?;
    let rec = serde_json::json!({
        "schema": PHI_SCHEMA,
        "function": cfg.f.name(),
        "I": cfg.player_i,
        "branch": res.branch_prefix,
        "balls": res.balls,
        "final_ball": res.final_ball,
    });
    writeln!(out, "{rec}")?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = match &cli.command {
        Command::Play { m, out: file } => play(m, file.as_ref(), &mut out),
        Command::Duel { m, seeds } => duel(m, *seeds, &mut out),
        Command::Interactive { m, role, transcript } => interactive(m, *role, transcript.as_ref(), &mut out),
        Command::Verify { suite } => run_verify(*suite, &mut out),
        Command::ExtractFsigma { m, depth, v, space } => extract_fsigma(m, *depth, v, space.as_deref(), &mut out),
        Command::Phi { m, branch } => phi(m, branch, &mut out),
    };
    let flushed = out.flush();
    match result {
        Ok(code) if flushed.is_ok() => code,
        Ok(_) => ExitCode::FAILURE,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
