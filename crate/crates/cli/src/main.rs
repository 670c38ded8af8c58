use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use monadcoh::cohomology::{chern, coh_table, spectrum};
use monadcoh::complex::{restrict, MonadSpec};
use monadcoh::graded::{format_form, LinearSubspace};
use monadcoh::io::{read_monad, write_monad};
use monadcoh::scanners::{self, Side, Universe};
use monadcoh::zoo::{self, FamilyParams};
use monadcoh::{p1split, verify, with_monad, Error, Field, FieldSpec, PrimeField, Rationals};

#[derive(Parser)]
#[command(name = "monadcoh", version, about = "Cohomology of monads of line bundles on projective space")]
struct Cli {
    /// Field to compute over: q or fp:<p>. Overrides the field of input files.
    #[arg(long, global = true)]
    field: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Monad file, or - for stdin.
    file: String,
}

#[derive(Args)]
struct Sampling {
    /// Visit every object over the (finite) field.
    #[arg(long, conflicts_with = "samples")]
    exhaustive: bool,
    #[arg(long, default_value_t = 50)]
    samples: usize,
    #[arg(long, env = "MONADCOH_SEED", default_value_t = 0)]
    seed: u64,
}

impl Sampling {
    fn universe(&self) -> Universe {
        if self.exhaustive {
            Universe::Exhaustive
        } else {
            Universe::Sample { count: self.samples, seed: self.seed }
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Table of h^i(E(l)) as TSV.
    Coh {
        #[command(flatten)]
        input: Input,
        /// Twist range l0:l1.
        #[arg(long, default_value = "-3:3", allow_hyphen_values = true)]
        window: String,
    },
    /// Prints "r c1 c2 c3".
    Chern {
        #[command(flatten)]
        input: Input,
    },
    /// Spectrum of a rank-3 bundle on P^3 with its validation verdict.
    Spectrum {
        #[command(flatten)]
        input: Input,
    },
    /// Splitting type of the restriction to a line through two points.
    Split {
        #[command(flatten)]
        input: Input,
        /// Two points, e.g. "1,0,0,0;0,1,0,0".
        #[arg(long, allow_hyphen_values = true)]
        line: String,
    },
    /// Restriction to a plane (given by its equation) or a line (two points).
    Restrict {
        #[command(flatten)]
        input: Input,
        #[arg(long, conflicts_with = "line", allow_hyphen_values = true)]
        plane: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        line: Option<String>,
    },
    /// Splitting of E_L^v over lines.
    ScanLines {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// h^0(E_H), h^0(E_H^v) and the unstable order over planes.
    ScanPlanes {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Multiplication matrices H^1(E'(-1)) x S_1 -> H^1(E') and their coranks.
    Mu {
        #[command(flatten)]
        input: Input,
        /// E or dual.
        #[arg(long, default_value = "E")]
        side: String,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Stability verdict for rank 2 or 3 with c1 = 0.
    Stability {
        #[command(flatten)]
        input: Input,
    },
    /// Named bundle families.
    Zoo {
        #[command(subcommand)]
        action: ZooAction,
    },
    /// Basis of the maps alpha with beta.alpha = 0, beta the last differential.
    SolveAlpha {
        #[command(flatten)]
        input: Input,
        /// Twists of the source of alpha, e.g. "3x-1" or "-1,-2".
        #[arg(long, allow_hyphen_values = true)]
        left_shape: String,
    },
    /// Runs the acceptance criteria.
    VerifyPaper {
        #[arg(long)]
        quick: bool,
        #[arg(long, env = "MONADCOH_SEED", default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum ZooAction {
    /// Writes the monad file of a family.
    Build {
        family: String,
        /// Comma-separated scalars, e.g. 1,0,0,1.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        params: Vec<String>,
        #[arg(long, env = "MONADCOH_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Lists the families.
    List,
}

enum Failure {
    Input(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Exhausted(_) => Failure::Verification(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type Outcome = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Verification(msg)) => {
            print!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn field_override(cli: &Cli) -> Result<Option<FieldSpec>, Error> {
    cli.field.as_deref().map(FieldSpec::parse).transpose()
}

fn read_input(path: &str) -> Result<String, Error> {
    let mut text = String::new();
    if path == "-" {
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Error::Parse(format!("stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
    }
    Ok(text)
}

fn parse_window(s: &str) -> Result<(i64, i64), Error> {
    let bad = || Error::Parse(format!("bad window `{s}`, expected l0:l1"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let (a, b): (i64, i64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn parse_vector<F: Field>(f: &F, s: &str, len: usize) -> Result<Vec<F::Elem>, Error> {
    let v: Vec<F::Elem> = s.split(',').map(|x| f.parse(x.trim())).collect::<Result<_, _>>()?;
    if v.len() != len || v.iter().all(|x| f.is_zero(x)) {
        return Err(Error::Parse(format!("`{s}` is not a nonzero vector of length {len}")));
    }
    Ok(v)
}

fn parse_line<F: Field>(f: &F, n: usize, s: &str) -> Result<LinearSubspace<F::Elem>, Error> {
    let pts: Vec<&str> = s.split(';').collect();
    if pts.len() != 2 {
        return Err(Error::Parse(format!("a line needs two points separated by `;`, got `{s}`")));
    }
    let p = parse_vector(f, pts[0], n + 1)?;
    let q = parse_vector(f, pts[1], n + 1)?;
    LinearSubspace::from_points(f, &[p, q]).ok_or_else(|| Error::Parse("the two points coincide".into()))
}

fn run(cli: &Cli) -> Outcome {
    let field = field_override(cli)?;
    let load = |input: &Input| -> Result<_, Error> { read_monad(&read_input(&input.file)?, field) };
    Ok(match &cli.command {
        Command::Coh { input, window } => {
            let (lo, hi) = parse_window(window)?;
            with_monad!(load(input)?, m => coh_table(&m, lo, hi)?.to_tsv())
        }
        Command::Chern { input } => with_monad!(load(input)?, m => format!("{}\n", chern(&m)?)),
        Command::Spectrum { input } => with_monad!(load(input)?, m => spectrum_line(&m)?),
        Command::Split { input, line } => with_monad!(load(input)?, m => {
            let l = parse_line(&m.field, m.n, line)?;
            format!("{}\n", p1split::splitting_type(&restrict(&m, &l))?)
        }),
        Command::Restrict { input, plane, line } => with_monad!(load(input)?, m => {
            let sub = match (plane, line) {
                (Some(h), None) => {
                    let h = parse_vector(&m.field, h, m.n + 1)?;
                    LinearSubspace::from_equations(&m.field, &[h]).ok_or_else(|| Error::Parse("zero plane".into()))?
                }
                (None, Some(l)) => parse_line(&m.field, m.n, l)?,
                _ => return Err(Error::Parse("give exactly one of --plane or --line".into()).into()),
            };
            write_monad(&restrict(&m, &sub))
        }),
        Command::ScanLines { input, sampling } => with_monad!(load(input)?, m => {
            scanners::jumping_line_scan(&m, sampling.universe())?.to_tsv()
        }),
        Command::ScanPlanes { input, sampling } => with_monad!(load(input)?, m => {
            scanners::plane_scan(&m, sampling.universe())?.to_tsv()
        }),
        Command::Mu { input, side, sampling } => {
            let side: Side = side.parse()?;
            with_monad!(load(input)?, m => {
                let mu = scanners::mu_build(&m, side)?;
                scanners::mu_report(&m.field, &mu, sampling.universe())?.to_tsv()
            })
        }
        Command::Stability { input } => {
            with_monad!(load(input)?, m => format!("{}\n", scanners::stability_check(&m)?))
        }
        Command::Zoo { action } => match action {
            ZooAction::List => zoo::FAMILIES.iter().map(|f| format!("{f}\n")).collect(),
            ZooAction::Build { family, params, seed } => {
                let p = FamilyParams { family: family.clone(), params: params.clone(), seed: *seed };
                zoo_build(&p, field)?
            }
        },
        Command::SolveAlpha { input, left_shape } => {
            let left = zoo::parse_twists(left_shape)?;
            with_monad!(load(input)?, m => solve_alpha(&m, &left)?)
        }
        Command::VerifyPaper { quick, seed } => {
            let report = verify::run(&verify::Options { seed: *seed, quick: *quick });
            let text = report.to_text();
            if report.passed() {
                text
            } else {
                return Err(Failure::Verification(text));
            }
        }
    })
}

fn spectrum_line<F: Field>(m: &MonadSpec<F>) -> Result<String, Error> {
    let c = chern(m)?;
    let table = coh_table(m, -c.c2 - 3, 1)?;
    Ok(format!("{}\n", spectrum(&table, &c)?))
}

/// Explicit families default to the rationals, random ones to F_101.
fn zoo_build(p: &FamilyParams, field: Option<FieldSpec>) -> Result<String, Error> {
    let random = matches!(p.family.as_str(), "c34" | "c30_max" | "c36");
    let spec = field.unwrap_or(if random { FieldSpec::PrimeField(101) } else { FieldSpec::Rationals });
    Ok(match spec {
        FieldSpec::Rationals => write_monad(&zoo::build(&Rationals, p)?.monad),
        FieldSpec::PrimeField(q) => write_monad(&zoo::build(&PrimeField::new(q)?, p)?.monad),
    })
}

fn solve_alpha<F: Field>(m: &MonadSpec<F>, left: &[i64]) -> Result<String, Error> {
    let beta = m
        .diffs
        .last()
        .ok_or_else(|| Error::Shape("the file has no differential to use as beta".into()))?;
    let basis = zoo::solve_left_differential(&m.field, beta, left)?;
    let mut out = format!("dimension\t{}\n", basis.len());
    for (k, a) in basis.iter().enumerate() {
        for i in 0..a.rows() {
            let row: Vec<String> = (0..a.cols()).map(|j| format_form(&m.field, a.get(i, j))).collect();
            out.push_str(&format!("alpha{k}\trow{i}\t{}\n", row.join("\t")));
        }
    }
    Ok(out)
}
