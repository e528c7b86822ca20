use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use rauzy::export::{self, CloudJson, ExportError, Format, Layer, LayerKind, TilingJson};
use rauzy::parallel;
use rauzy::verify::{self, Level};
use rauzy_core::automaton::BoundaryAutomaton;
use rauzy_core::codec::{exponents, expand, psi, BoundaryParam, Radix};
use rauzy_core::render::{tiling, Lattice, PointCloud, DEFAULT_POINT_CAP};
use rauzy_core::{Embedding, FamilyParam};

#[derive(Parser)]
#[command(name = "rauzy", version, about = "Rauzy fractals of x³ − a·x² + x − 1 and their boundaries")]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for random sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Family {
    /// Family parameter (at least 2; boundary tools need at least 3).
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    a: u32,
}

#[derive(Args)]
struct Output {
    /// Output file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// File format (default: from the extension of --out).
    #[arg(long, value_parser = Format::from_str)]
    format: Option<Format>,
    /// Longest image side in pixels.
    #[arg(long, default_value_t = 1024)]
    size: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Build the boundary automaton and compare its states with the expected set.
    Automaton {
        #[command(flatten)]
        family: Family,
        #[command(flatten)]
        output: Output,
    },
    /// Point cloud of the fractal.
    Render {
        #[command(flatten)]
        family: Family,
        /// Number of digits per point.
        #[arg(long, default_value_t = 18)]
        depth: usize,
        /// Largest number of points; more words than this are sampled.
        #[arg(long, default_value_t = DEFAULT_POINT_CAP)]
        samples: usize,
        #[command(flatten)]
        output: Output,
    },
    /// The boundary as a closed curve.
    Boundary {
        #[command(flatten)]
        family: Family,
        /// Total number of points along the curve.
        #[arg(long, default_value_t = 4000)]
        samples: usize,
        #[arg(long, default_value_t = 30)]
        depth: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Lattice translates of the fractal.
    Tiling {
        #[command(flatten)]
        family: Family,
        /// Translates with |k1|, |k2| <= K.
        #[arg(long = "K", visible_alias = "k", default_value_t = 1)]
        range: i64,
        #[arg(long, default_value_t = 12)]
        depth: usize,
        #[arg(long, default_value_t = DEFAULT_POINT_CAP)]
        samples: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Mixed-radix digits of t in [0, 1] and the code they induce.
    Expand {
        #[command(flatten)]
        family: Family,
        /// A fraction such as 1/3, or a decimal.
        #[arg(long, value_parser = parse_rational)]
        t: BigRational,
        #[arg(long, default_value_t = 20)]
        depth: usize,
    },
    /// The boundary point f(t) with an error bound.
    Param {
        #[command(flatten)]
        family: Family,
        #[arg(long, value_parser = parse_rational)]
        t: BigRational,
        #[arg(long, default_value_t = 40)]
        depth: usize,
    },
    /// Run the verification checks.
    Verify {
        #[command(flatten)]
        family: Family,
        #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
        level: LevelArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

/// `println!` that reports a closed stdout as an error instead of panicking.
macro_rules! say {
    ($($arg:tt)*) => {
        writeln!(io::stdout().lock(), $($arg)*)?
    };
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    /// The reader of stdout went away; not an error for a CLI.
    #[error("broken pipe")]
    Closed,
    #[error("{0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Closed => 0,
            CliError::Usage(_) => 2,
            CliError::Verification(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<rauzy_core::Error> for CliError {
    fn from(e: rauzy_core::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ExportError> for CliError {
    fn from(e: ExportError) -> Self {
        match e {
            ExportError::Empty | ExportError::Unsupported(_) => CliError::Usage(e.to_string()),
            ExportError::Io(io) => io.into(),
            ExportError::Json(ref j) if j.io_error_kind() == Some(io::ErrorKind::BrokenPipe) => CliError::Closed,
            other => CliError::Io(other.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        if e.kind() == io::ErrorKind::BrokenPipe {
            return CliError::Closed;
        }
        CliError::Io(e.to_string())
    }
}

/// `p/q`, an integer, or a decimal such as `0.125` or `-1.5e-3`.
fn parse_rational(s: &str) -> Result<BigRational, String> {
    let bad = || format!("`{s}` is not a number");
    if s.contains('/') {
        return BigRational::from_str(s).map_err(|_| bad());
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let negative = int.starts_with('-');
    let int = int.trim_start_matches(['-', '+']);
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let mut value = BigRational::from_integer(BigInt::from_str(&digits).map_err(|_| bad())?);
    let shift = exp - frac.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    value *= num_traits::pow::Pow::pow(&ten, shift);
    Ok(if negative { -value } else { value })
}

fn family(f: Family) -> Result<(FamilyParam, Embedding), CliError> {
    let param = FamilyParam::new(i64::from(f.a))?;
    Ok((param, Embedding::new(param)?))
}

fn output_format(output: &Output, default: Format) -> Format {
    output
        .format
        .or_else(|| output.out.as_deref().and_then(Format::from_path))
        .unwrap_or(default)
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    export::write_json(value, io::stdout().lock())?;
    Ok(())
}

/// Writes a single cloud in any point format.
fn write_cloud(cloud: &PointCloud, kind: LayerKind, format: Format, size: usize, out: impl Write) -> Result<(), CliError> {
    let layer = Layer {
        points: &cloud.points,
        color: export::PALETTE[0],
        kind,
    };
    match format {
        Format::Ppm => export::write_ppm(&[layer], size, out)?,
        Format::Svg => export::write_svg(&[layer], size, out)?,
        Format::Csv => export::write_csv(&cloud.points, out)?,
        Format::Json => export::write_json(&CloudJson::new(cloud), out)?,
        Format::Dot => return Err(ExportError::Unsupported(format).into()),
    }
    Ok(())
}

#[derive(Serialize)]
struct CloudSummary {
    a: u32,
    depth: usize,
    points: usize,
    generator: &'static str,
    out: Option<String>,
}

fn summarize(cloud: &PointCloud, out: Option<&Path>) -> CloudSummary {
    let meta = export::MetaJson::new(&cloud.meta, cloud.points.len());
    CloudSummary {
        a: meta.a,
        depth: meta.depth,
        points: meta.count,
        generator: meta.generator,
        out: out.map(|p| p.display().to_string()),
    }
}

fn report_cloud(cloud: &PointCloud, output: &Output, kind: LayerKind, json: bool) -> Result<(), CliError> {
    match &output.out {
        Some(path) => {
            let format = output_format(output, Format::Ppm);
            let mut file = create(path)?;
            write_cloud(cloud, kind, format, output.size, &mut file)?;
            file.flush()?;
            let summary = summarize(cloud, Some(path));
            if json {
                print_json(&summary)?;
            } else {
                say!("points: {} ({}), written {}", summary.points, summary.generator, path.display());
            }
        }
        None if json => print_json(&CloudJson::new(cloud))?,
        None => match output.format {
            Some(format) => write_cloud(cloud, kind, format, output.size, io::stdout().lock())?,
            None => say!("points: {} ({})", cloud.points.len(), summarize(cloud, None).generator),
        },
    }
    Ok(())
}

#[derive(Serialize)]
struct AutomatonSummary {
    a: u32,
    states: usize,
    transitions: usize,
    matches_expected: bool,
}

fn automaton(f: Family, output: &Output, json: bool) -> Result<(), CliError> {
    let (param, e) = family(f)?;
    param.require_codec()?;
    let automaton = BoundaryAutomaton::build(param, &e)?;
    let verdict = verify::automaton_states(param, &e);
    let format = output_format(output, Format::Dot);
    let write = |out: &mut dyn Write| -> Result<(), CliError> {
        match format {
            Format::Dot => export::write_dot(&automaton, out)?,
            Format::Json => export::write_json(&export::AutomatonJson::new(&automaton), out)?,
            other => return Err(ExportError::Unsupported(other).into()),
        }
        Ok(())
    };
    if let Some(path) = &output.out {
        let mut file = create(path)?;
        write(&mut file)?;
        file.flush()?;
    } else if output.format.is_some() {
        return write(&mut io::stdout().lock());
    }
    let summary = AutomatonSummary {
        a: param.a(),
        states: automaton.states().len(),
        transitions: automaton.transitions().len(),
        matches_expected: verdict.is_ok(),
    };
    if json {
        print_json(&summary)?;
    } else {
        say!("states: {}, matches S: {}", summary.states, summary.matches_expected);
    }
    verdict.map(|_| ()).map_err(CliError::Verification)
}

fn tiling_cmd(f: Family, range: i64, depth: usize, samples: usize, seed: u64, output: &Output, json: bool) -> Result<(), CliError> {
    if range < 0 {
        return Err(CliError::Usage("K must be nonnegative".into()));
    }
    let (_, e) = family(f)?;
    let cloud = parallel::points_of_r(&e, depth, samples, seed)?;
    let lattice = Lattice::new(&e);
    let tiles = tiling(&cloud, &lattice, range);
    if let Some(path) = &output.out {
        let mut file = create(path)?;
        match output_format(output, Format::Ppm) {
            Format::Ppm => export::write_ppm(&export::tile_layers(&tiles), output.size, &mut file)?,
            Format::Svg => export::write_svg(&export::tile_layers(&tiles), output.size, &mut file)?,
            Format::Csv => export::write_csv(tiles.iter().flat_map(|t| &t.points), &mut file)?,
            Format::Json => export::write_json(&TilingJson::new(&cloud, &lattice, &tiles), &mut file)?,
            other => return Err(ExportError::Unsupported(other).into()),
        }
        file.flush()?;
    }
    #[derive(Serialize)]
    struct Summary {
        a: u32,
        translates: usize,
        points_per_translate: usize,
        covolume: f64,
    }
    let summary = Summary {
        a: f.a,
        translates: tiles.len(),
        points_per_translate: cloud.points.len(),
        covolume: lattice.covolume(),
    };
    if json {
        print_json(&summary)?;
    } else {
        say!(
            "translates: {}, points each: {}, covolume: {:.6}",
            summary.translates, summary.points_per_translate, summary.covolume
        );
    }
    Ok(())
}

fn expand_cmd(f: Family, t: &BigRational, depth: usize, json: bool) -> Result<(), CliError> {
    let (param, _) = family(f)?;
    let exp = expand(t, param, depth)?;
    let code = psi(param, &exp.digits)?;
    let exps = exponents(param, &exp.digits);
    let bases: Vec<u32> = exp.radices.iter().map(|r: &Radix| r.base(param)).collect();
    #[derive(Serialize)]
    struct Out {
        a: u32,
        t: String,
        digits: Vec<u32>,
        bases: Vec<u32>,
        exponents: Vec<(u32, u32)>,
        code: Vec<u32>,
        remainder: f64,
        remainder_bound: f64,
    }
    let out = Out {
        a: param.a(),
        t: t.to_string(),
        digits: exp.digits.clone(),
        bases,
        exponents: exps,
        code,
        remainder: exp.remainder.to_f64().unwrap_or(f64::NAN),
        remainder_bound: exp.remainder_bound.to_f64().unwrap_or(f64::NAN),
    };
    if json {
        return print_json(&out);
    }
    let join = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
    say!("digits: {}", join(&out.digits));
    say!("bases: {}", join(&out.bases));
    let pairs: Vec<String> = out.exponents.iter().map(|(n, m)| format!("({n},{m})")).collect();
    say!("(n, m): {}", pairs.join(" "));
    say!("code: {}", join(&out.code));
    say!("remainder: {:.3e} <= {:.3e}", out.remainder, out.remainder_bound);
    Ok(())
}

fn param_cmd(f: Family, t: &BigRational, depth: usize, json: bool) -> Result<(), CliError> {
    let (param, e) = family(f)?;
    param.require_codec()?;
    let curve = BoundaryParam::new(&e)?;
    let point = curve.f(t, depth)?;
    #[derive(Serialize)]
    struct Out {
        a: u32,
        t: String,
        depth: usize,
        re: f64,
        im: f64,
        error_bound: f64,
    }
    let out = Out {
        a: param.a(),
        t: t.to_string(),
        depth,
        re: point.point.re,
        im: point.point.im,
        error_bound: point.error_bound,
    };
    if json {
        print_json(&out)
    } else {
        say!("f({}) = {:.15} {:+.15}i ± {:.1e}", out.t, out.re, out.im, out.error_bound);
        Ok(())
    }
}

fn verify_cmd(f: Family, level: LevelArg, seed: u64, json: bool) -> Result<(), CliError> {
    let (param, _) = family(f)?;
    param.require_codec()?;
    let level = match level {
        LevelArg::Quick => Level::Quick,
        LevelArg::Full => Level::Full,
    };
    let report = verify::run(param, level, seed);
    if json {
        print_json(&report)?;
    } else {
        for c in &report.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            say!("{mark} {} ({:.2}s): {}", c.name, c.seconds, c.detail);
        }
    }
    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failed.join(", ")))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let json = cli.json;
    let seed = cli.seed;
    match cli.command {
        Command::Automaton { family, output } => automaton(family, &output, json),
        Command::Render { family: f, depth, samples, output } => {
            let (_, e) = family(f)?;
            let cloud = parallel::points_of_r(&e, depth, samples, seed)?;
            report_cloud(&cloud, &output, LayerKind::Dots, json)
        }
        Command::Boundary { family: f, samples, depth, output } => {
            let (param, e) = family(f)?;
            param.require_codec()?;
            let curve = BoundaryParam::new(&e)?;
            let cloud = parallel::boundary_points(&curve, samples.div_ceil(4), depth)?;
            report_cloud(&cloud, &output, LayerKind::Curve, json)
        }
        Command::Tiling { family, range, depth, samples, output } => {
            tiling_cmd(family, range, depth, samples, seed, &output, json)
        }
        Command::Expand { family, t, depth } => expand_cmd(family, &t, depth, json),
        Command::Param { family, t, depth } => param_cmd(family, &t, depth, json),
        Command::Verify { family, level } => verify_cmd(family, level, seed, json),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) | Err(CliError::Closed) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rational_arguments() {
        assert_eq!(parse_rational("1").unwrap(), q(1, 1));
        assert_eq!(parse_rational("3/7").unwrap(), q(3, 7));
        assert_eq!(parse_rational("0.125").unwrap(), q(1, 8));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        assert_eq!(parse_rational("-1.5e-3").unwrap(), q(-3, 2000));
        assert_eq!(parse_rational("2E2").unwrap(), q(200, 1));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1.2.3").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
