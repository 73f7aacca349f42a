//! The `equicerf` command line.
//!
//! Exit codes: 0 on success, 1 on domain errors, 2 on usage errors.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;
use serde_json::json;

use crate::bifgroup::{weight, BaseWeights, Projector, SphereData};
use crate::casson::{apply_bifurcation, lambda_w, su4_formula, su4_preset, DatasetMove, ModuliDataset};
use crate::error::{Error, Result};
use crate::morse::{
    bifurcation_family, find_critical_orbits, finite_total_of, sphere_datum_numeric, total_of, Constant,
    FunctionHandle, ModelSpace, PolyOf, Radial, SearchOptions, TracePower,
};
use crate::repcat::{format_total, total_from_json, total_to_json, Branching};
use crate::specflow::{equivariant_spectral_flow, spectral_flow, IsotypicAction, SymmetricPath};
use crate::strata::{bifurcation_arrows, enumerate_strata, reachability_order, IrrepLabel, Mode, Stratum};

const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Parser, Debug)]
#[command(name = "equicerf", version, about = "Equivariant Cerf theory toolkit for SU(n)")]
pub struct Cli {
    /// Seed for every randomized computation.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the strata of SU(n).
    Strata {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value = "raw")]
        mode: Mode,
    },
    /// Write the bifurcation graph as Graphviz text.
    Bifgraph {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value = "zhs")]
        mode: Mode,
        #[arg(long)]
        out: PathBuf,
    },
    /// Project a total index onto normal-form classes.
    Project {
        #[arg(long = "in")]
        input: PathBuf,
        /// Sphere data for non-transitive bifurcations.
        #[arg(long)]
        sphere_data: Option<PathBuf>,
    },
    /// Print a base-weight table, optionally evaluating a total index.
    Weights {
        #[arg(long)]
        n: u32,
        /// Named preset; only `su4` exists.
        #[arg(long)]
        preset: Option<String>,
        /// Base-weight file to use instead of a preset.
        #[arg(long)]
        base: Option<PathBuf>,
        /// Total index to evaluate.
        #[arg(long)]
        eval: Option<PathBuf>,
    },
    /// Spectral flow of a sampled path of symmetric matrices.
    Sf {
        #[arg(long)]
        path: PathBuf,
        /// Isotypic projectors `[{name, real_dim, matrix}]`.
        #[arg(long)]
        projectors: Option<PathBuf>,
    },
    /// Critical orbits and total index of an invariant function on a representation ball.
    Morse(MorseArgs),
    /// Weighted Casson sums over moduli datasets.
    Casson {
        #[command(subcommand)]
        action: CassonCommand,
    },
}

#[derive(Args, Debug)]
pub struct MorseArgs {
    /// `z2`, `adjoint:M`, `matrix:A:B`, or a stratum such as `((2,2))` with `--summands`.
    #[arg(long)]
    pub space: String,
    /// Comma-separated catalog labels when `--space` is a stratum.
    #[arg(long, value_delimiter = ',')]
    pub summands: Vec<String>,
    /// `radial:c0,c1,…`, `trace:K`, `neg-trace-squared:K`, `constant:C`, or `family[:s1,s2,…]`.
    #[arg(long)]
    pub function: String,
    /// Parameter of the bifurcation family.
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Treat the function as living on the unit sphere and print its sphere datum.
    #[arg(long)]
    pub sphere: bool,
}

#[derive(Subcommand, Debug)]
pub enum CassonCommand {
    /// Evaluate the weighted sum of a dataset.
    Eval {
        #[arg(long)]
        data: PathBuf,
        /// Also evaluate the SU(4) closed formula and use the SU(4) preset weights.
        #[arg(long)]
        su4: bool,
        #[arg(long)]
        base: Option<PathBuf>,
    },
    /// Apply one bifurcation move and print the new dataset.
    Move {
        #[arg(long)]
        data: PathBuf,
        #[arg(long = "move")]
        mv: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))
}

fn branching(seed: u64) -> Arc<Branching> {
    let mut b = Branching::default();
    b.seed = seed;
    Arc::new(b)
}

fn projector(seed: u64, sphere_data: Option<&Path>) -> Result<Projector> {
    let data = match sphere_data {
        Some(p) => SphereData::from_json(&read(p)?)?,
        None => SphereData::default(),
    };
    Ok(Projector::new(branching(seed), data))
}

fn print_json(out: &mut dyn Write, v: &serde_json::Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(v)?)?;
    Ok(())
}

/// Parses argv and runs; returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 {
                write!(out, "{e}")
            } else {
                write!(err, "{e}")
            };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Strata { n, mode } => {
            if *n == 0 {
                return Err(Error::Usage("n must be positive".into()));
            }
            let strata = enumerate_strata(*n, *mode);
            if cli.json {
                print_json(out, &serde_json::to_value(&strata)?)?;
            } else {
                for s in strata {
                    let g = s.group();
                    writeln!(out, "{s}\tdim {}\tπ0 {}", g.dim, g.pi0)?;
                }
            }
        }
        Command::Bifgraph { n, mode, out: path } => {
            let reach = reachability_order(*n, *mode);
            std::fs::write(path, reach.to_dot())?;
            let arrows = bifurcation_arrows(*n, *mode);
            if cli.json {
                let a: Vec<_> = arrows
                    .iter()
                    .map(|(a, b)| json!([a.to_string(), b.to_string()]))
                    .collect();
                print_json(out, &json!({ "arrows": a }))?;
            } else {
                for (a, b) in arrows {
                    writeln!(out, "{a} -> {b}")?;
                }
            }
        }
        Command::Project { input, sphere_data } => {
            let v: serde_json::Value = serde_json::from_str(&read(input)?)?;
            let x = total_from_json(&v)?;
            let p = projector(cli.seed, sphere_data.as_deref())?.project(&x)?;
            if cli.json {
                print_json(out, &total_to_json(&p))?;
            } else {
                writeln!(out, "{}", format_total(&p))?;
            }
        }
        Command::Weights { n, preset, base, eval } => {
            let table = match (preset.as_deref(), base) {
                (Some("su4"), None) => {
                    if *n != 4 {
                        return Err(Error::Usage("the su4 preset needs --n 4".into()));
                    }
                    su4_preset()?
                }
                (Some(other), None) => return Err(Error::Usage(format!("unknown preset `{other}`"))),
                (None, Some(path)) => BaseWeights::from_json(&read(path)?)?,
                (None, None) => BaseWeights::default(),
                (Some(_), Some(_)) => return Err(Error::Usage("--preset and --base are exclusive".into())),
            };
            match eval {
                Some(path) => {
                    let v: serde_json::Value = serde_json::from_str(&read(path)?)?;
                    let x = total_from_json(&v)?;
                    let w = weight(&x, &table, &projector(cli.seed, None)?)?;
                    if cli.json {
                        print_json(out, &json!({ "weight": w, "approx": [w.eval().re, w.eval().im] }))?;
                    } else {
                        writeln!(out, "{w}")?;
                    }
                }
                None => {
                    if cli.json {
                        print_json(out, &table.to_json())?;
                    } else {
                        let strata = enumerate_strata(*n, Mode::HomologySphere);
                        for s in strata.iter().filter(|s| !s.is_irreducible()) {
                            let c = crate::repcat::IndexClass::zero_rep(s);
                            match table.get(&c) {
                                Ok(w) => writeln!(out, "{c}\t{w}")?,
                                Err(_) => writeln!(out, "{c}\t(unset)")?,
                            }
                        }
                    }
                }
            }
        }
        Command::Sf { path, projectors } => {
            let p = SymmetricPath::from_csv(&read(path)?)?;
            match projectors {
                None => {
                    let sf = spectral_flow(&p)?;
                    if cli.json {
                        print_json(out, &json!({ "spectral_flow": sf }))?;
                    } else {
                        writeln!(out, "{sf}")?;
                    }
                }
                Some(pp) => {
                    let action = IsotypicAction::from_json(&read(pp)?)?;
                    let flows = equivariant_spectral_flow(&p, &action)?;
                    if cli.json {
                        let v: Vec<_> = flows
                            .iter()
                            .map(|(l, n)| json!({ "name": l.name, "real_dim": l.real_dim, "count": n }))
                            .collect();
                        print_json(out, &json!(v))?;
                    } else {
                        for (l, n) in flows {
                            writeln!(out, "{}\t{n}", l.name)?;
                        }
                    }
                }
            }
        }
        Command::Morse(args) => run_morse(cli, args, out)?,
        Command::Casson { action } => match action {
            CassonCommand::Eval { data, su4, base } => {
                let ds = ModuliDataset::from_json(&read(data)?)?;
                let table = match (su4, base) {
                    (true, None) => su4_preset()?,
                    (false, Some(p)) => BaseWeights::from_json(&read(p)?)?,
                    (false, None) => BaseWeights::default(),
                    (true, Some(_)) => return Err(Error::Usage("--su4 and --base are exclusive".into())),
                };
                let p = projector(cli.seed, None)?;
                let lw = lambda_w(&ds, &table, &p)?;
                let formula = if *su4 { Some(su4_formula(&ds)?) } else { None };
                if cli.json {
                    print_json(out, &json!({ "lambda_w": lw, "su4_formula": formula }))?;
                } else {
                    writeln!(out, "lambda_w\t{lw}")?;
                    if let Some(f) = formula {
                        writeln!(out, "su4_formula\t{f}")?;
                    }
                }
            }
            CassonCommand::Move { data, mv, out: path } => {
                let ds = ModuliDataset::from_json(&read(data)?)?;
                let m: DatasetMove = serde_json::from_str(&read(mv)?).map_err(|e| Error::Schema {
                    field: "move".into(),
                    msg: e.to_string(),
                })?;
                let next = apply_bifurcation(&ds, &m, &projector(cli.seed, None)?)?;
                let text = serde_json::to_string_pretty(&next.to_json())?;
                match path {
                    Some(p) => std::fs::write(p, text + "\n")?,
                    None => writeln!(out, "{text}")?,
                }
            }
        },
    }
    Ok(())
}

fn parse_space(args: &MorseArgs) -> Result<ModelSpace> {
    let r = args.radius;
    let parts: Vec<&str> = args.space.split(':').collect();
    match parts.as_slice() {
        ["z2"] => Ok(ModelSpace::z2_line(r)),
        ["adjoint", m] => ModelSpace::adjoint_ball(parse_num(m, "space")?, r),
        ["matrix", a, b] => ModelSpace::matrix_ball(parse_num(a, "space")?, parse_num(b, "space")?, r),
        _ => {
            let s: Stratum = args.space.parse()?;
            if args.summands.is_empty() {
                return Err(Error::Usage("a stratum space needs --summands".into()));
            }
            let labels = args
                .summands
                .iter()
                .map(|l| l.parse::<IrrepLabel>())
                .collect::<Result<Vec<_>>>()?;
            ModelSpace::rep_ball(&s, &labels, r)
        }
    }
}

fn parse_num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Usage(format!("cannot parse `{s}` in --{what}")))
}

fn parse_floats(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(|c| parse_num(c.trim(), "function")).collect()
}

fn parse_function(args: &MorseArgs, space: &ModelSpace) -> Result<FunctionHandle> {
    let (name, rest) = args.function.split_once(':').unwrap_or((&args.function, ""));
    let adjoint = |k: u32| -> Result<FunctionHandle> {
        if !matches!(space.labels().first(), Some(IrrepLabel::Adj(_))) {
            return Err(Error::Usage("trace invariants need an adjoint first summand".into()));
        }
        Ok(Arc::new(TracePower {
            summand: space.summand(0).clone(),
            range: space.range(0),
            k,
        }))
    };
    match name {
        "radial" => Ok(Arc::new(Radial::new(parse_floats(rest)?))),
        "constant" => Ok(Arc::new(Constant(parse_num(rest, "function")?))),
        "trace" => adjoint(parse_num(rest, "function")?),
        "neg-trace-squared" => Ok(Arc::new(PolyOf {
            inner: adjoint(parse_num(rest, "function")?)?,
            coeffs: vec![0.0, 0.0, -1.0],
        })),
        "family" => {
            let t = args.t.ok_or_else(|| Error::Usage("the family needs --t".into()))?;
            let signs = if rest.is_empty() {
                Vec::new()
            } else {
                parse_floats(rest)?
            };
            let v_prime: Vec<(usize, f64)> = signs.into_iter().enumerate().map(|(i, s)| (i + 1, s)).collect();
            bifurcation_family(space, 0, &v_prime, None, t)
        }
        other => Err(Error::Usage(format!("unknown function `{other}`"))),
    }
}

fn run_morse(cli: &Cli, args: &MorseArgs, out: &mut dyn Write) -> Result<()> {
    let space = parse_space(args)?;
    let f = parse_function(args, &space)?;
    let opts = SearchOptions {
        seed: cli.seed,
        ..SearchOptions::default()
    };
    if args.sphere {
        let s = space
            .stratum()
            .ok_or_else(|| Error::Usage("sphere data need a Lie group space".into()))?;
        if space.labels().len() != 1 {
            return Err(Error::Usage("sphere data need exactly one summand".into()));
        }
        let d = sphere_datum_numeric(s, space.labels()[0], f, &opts)?;
        let mut data = SphereData::default();
        data.insert(d.clone());
        if cli.json {
            print_json(out, &data.to_json())?;
        } else {
            writeln!(out, "{}", format_total(&d.index()))?;
        }
        return Ok(());
    }
    let orbits = find_critical_orbits(&space, f.as_ref(), &opts)?;
    let total: Result<(String, serde_json::Value)> = if space.stratum().is_some() {
        total_of(&orbits).map(|t| (format_total(&t), total_to_json(&t)))
    } else {
        finite_total_of(&space, &orbits).map(|t| {
            let terms: Vec<String> = t.iter().map(|(c, n)| format!("{n}·{c}")).collect();
            let j: Vec<_> = t
                .iter()
                .map(|(c, n)| json!({ "subgroup": c.subgroup, "character": c.character, "coeff": n }))
                .collect();
            (
                if terms.is_empty() {
                    "0".into()
                } else {
                    terms.join(" + ")
                },
                json!(j),
            )
        })
    };
    if cli.json {
        let t = match &total {
            Ok((_, j)) => j.clone(),
            Err(e) => json!({ "error": e.to_string() }),
        };
        let o: Vec<_> = orbits.iter().map(|o| o.to_json()).collect();
        print_json(out, &json!({ "orbits": o, "total_index": t }))?;
    } else {
        for o in &orbits {
            writeln!(out, "{o}")?;
        }
        match &total {
            Ok((t, _)) => writeln!(out, "total\t{t}")?,
            Err(e) => writeln!(out, "total\t{e}")?,
        }
    }
    // a degenerate orbit is still a domain error after the report
    total.map(|_| ())
}

/// Matrix helper for building paths in examples and tests.
pub fn matrix(rows: &[&[f64]]) -> DMatrix<f64> {
    let n = rows.len();
    DMatrix::from_fn(n, rows.first().map_or(0, |r| r.len()), |i, j| rows[i][j])
}
