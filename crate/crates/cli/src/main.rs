use std::fs;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use storth::esdlift::x_lift;
use storth::exec::Exec;
use storth::pipeline::{parse_vector, run, InstanceConfig, Suite};
use storth::tc::{todd_coxeter, Presentation, Strategy, TcOptions};

#[derive(Parser)]
#[command(name = "storth", version, about = "Verification suites for orthogonal Steinberg groups over finite rings")]
struct Cli {
    /// Config file with `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Check this many seeded samples per family instead of sweeping.
    #[arg(long, global = true)]
    sample: Option<u64>,
    /// Also write the report to this file.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Run without the rayon pool.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct SpaceArg {
    /// Config file or inline `ring=Z/2,ell=3,r=0`.
    #[arg(long)]
    space: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Steinberg relation instances under the matrix map.
    VerifyRelations {
        #[command(flatten)]
        space: SpaceArg,
        /// Schemas to check, e.g. R1,R4.
        #[arg(long, value_delimiter = ',')]
        schema: Vec<String>,
    },
    /// Identities of the ESD transvections.
    VerifyLemma1 {
        #[command(flatten)]
        space: SpaceArg,
    },
    /// EO-orbit of a vector.
    Orbit {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long, default_value = "e1")]
        start: String,
        /// Emit the full orbit table with witnesses.
        #[arg(long)]
        dump: bool,
    },
    /// Word lifting `T(u, v)` and its matrix.
    EsdLift {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
    },
    /// Properties of the lifted transvections.
    VerifyEsd {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long)]
        with_tc: bool,
    },
    /// Coset enumeration of a presentation file.
    Tc {
        #[arg(long)]
        presentation: PathBuf,
        #[arg(long)]
        max_cosets: Option<usize>,
        #[arg(long, default_value = "hlt")]
        strategy: String,
        /// Write the table as row-major little-endian u32 coset indices.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// The star presentation against the Steinberg group.
    VerifyStar {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long)]
        with_tc: bool,
    },
    /// Homotope stages, transitions and relations.
    HomotopeSuite {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long, value_delimiter = ',')]
        levels: Vec<i64>,
    },
    /// Localized action and its conjugation formulas.
    ActionSuite {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long, value_delimiter = ',')]
        f: Vec<i64>,
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Odd form algebra of the space.
    OddformSuite {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long, value_delimiter = ',')]
        localize: Vec<u64>,
    },
    /// Every suite selected by the config, or all of them.
    All {
        #[command(flatten)]
        space: SpaceArg,
    },
}

enum Failure {
    Usage(String),
    Failed,
}

impl From<storth::Error> for Failure {
    fn from(e: storth::Error) -> Failure {
        Failure::Usage(e.to_string())
    }
}

fn base_config(cli: &Cli, space: &SpaceArg) -> Result<InstanceConfig, Failure> {
    let mut c = InstanceConfig::default();
    if let Some(path) = &cli.config {
        c.apply(&path.to_string_lossy())?;
    }
    if let Some(s) = &space.space {
        c.apply(s)?;
    }
    if let Some(seed) = cli.seed {
        c.seed = seed;
    }
    if let Some(n) = cli.sample {
        c.samples = n;
        c.cap = 0;
    }
    Ok(c)
}

fn emit(cli: &Cli, value: &Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("json serializes");
    // a closed pipe downstream is not an error
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    if let Some(path) = &cli.json {
        fs::write(path, text + "\n").map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn run_suites(cli: &Cli, mut c: InstanceConfig, suites: &[Suite], exec: Exec) -> Result<(), Failure> {
    if c.suites.is_empty() || !suites.is_empty() {
        c.suites = suites.iter().copied().collect();
    }
    let report = run(&c, exec)?;
    emit(cli, &serde_json::to_value(&report).expect("report serializes"))?;
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Failed)
    }
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    match &cli.command {
        Command::VerifyRelations { space, schema } => {
            let mut c = base_config(cli, space)?;
            if !schema.is_empty() {
                c.schemas = schema.clone();
            }
            run_suites(cli, c, &[Suite::Relations], exec)
        }
        Command::VerifyLemma1 { space } => run_suites(cli, base_config(cli, space)?, &[Suite::Lemma1], exec),
        Command::Orbit { space, start, dump } => {
            let mut c = base_config(cli, space)?;
            c.start = start.clone();
            if !*dump {
                return run_suites(cli, c, &[Suite::Orbit], exec);
            }
            let s = c.space()?;
            let table = s.orbit(&parse_vector(&s, start)?)?;
            emit(cli, &table.to_json(&s))
        }
        Command::EsdLift { space, u, v } => {
            let c = base_config(cli, space)?;
            let s = c.space()?;
            let (u, v) = (parse_vector(&s, u)?, parse_vector(&s, v)?);
            let table = s.orbit(&parse_vector(&s, &c.start)?)?;
            let lift = x_lift(&s, &u, &v, &table)?;
            let m = s.phi(&lift.word);
            let expected = s.esd(&u, &v)?;
            let matches = m == expected;
            emit(
                cli,
                &json!({
                    "u": s.vector_json(&u), "v": s.vector_json(&v),
                    "word": lift.word.to_json(&s), "word_text": lift.word.to_string(),
                    "matrix": m.mat().to_json(s.ring()), "matches_esd": matches,
                }),
            )?;
            if matches {
                Ok(())
            } else {
                Err(Failure::Failed)
            }
        }
        Command::VerifyEsd { space, with_tc } => {
            let mut c = base_config(cli, space)?;
            c.with_tc |= *with_tc;
            run_suites(cli, c, &[Suite::Esd], exec)
        }
        Command::Tc { presentation, max_cosets, strategy, dump } => {
            let text = fs::read_to_string(presentation)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", presentation.display())))?;
            let p = Presentation::parse(&text)?;
            let mut opts = TcOptions { strategy: strategy.parse::<Strategy>()?, ..TcOptions::default() };
            if let Some(m) = max_cosets {
                opts.max_cosets = *m;
            }
            let (table, stats) = todd_coxeter(&p, opts)?;
            if let Some(path) = dump {
                let f = fs::File::create(path).map_err(|e| Failure::Usage(format!("cannot create {}: {e}", path.display())))?;
                table.write_binary(BufWriter::new(f)).map_err(|e| Failure::Usage(e.to_string()))?;
            }
            emit(
                cli,
                &json!({"generators": p.ngens(), "relators": p.relators().len(), "order": table.len(), "stats": stats}),
            )
        }
        Command::VerifyStar { space, with_tc } => {
            let mut c = base_config(cli, space)?;
            c.with_tc |= *with_tc;
            run_suites(cli, c, &[Suite::Star], exec)
        }
        Command::HomotopeSuite { space, levels } => {
            let mut c = base_config(cli, space)?;
            if !levels.is_empty() {
                c.levels = levels.clone();
            }
            run_suites(cli, c, &[Suite::Homotope], exec)
        }
        Command::ActionSuite { space, f, samples } => {
            let mut c = base_config(cli, space)?;
            if !f.is_empty() {
                c.f = f.clone();
            }
            if let Some(n) = samples {
                c.action_samples = *n;
            }
            run_suites(cli, c, &[Suite::Action], exec)
        }
        Command::OddformSuite { space, localize } => {
            let mut c = base_config(cli, space)?;
            if !localize.is_empty() {
                c.localize = localize.clone();
            }
            run_suites(cli, c, &[Suite::Oddform], exec)
        }
        Command::All { space } => {
            let mut c = base_config(cli, space)?;
            if c.suites.is_empty() {
                c.suites = Suite::ALL.into_iter().filter(|s| c.ell >= 3 || !s.needs_rank_three()).collect();
            }
            run_suites(cli, c, &[], exec)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Failed) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
