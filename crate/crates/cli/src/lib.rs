//! `orient` command-line frontend.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or parse error,
//! 3 numeric or degenerate-value error.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use orient_core::analysis::{
    fit_representation, simulate_noisy_predictions, sweep_landscape, uniform_grid, GridOracle,
    MIN_ORACLE_GRID,
};
use orient_core::kitti::{self, KittiLabel};
use orient_core::{
    alpha_to_roty, circular_diff, decode, encode, orientation_similarity, roty_to_alpha, Angle,
    EvalBatch, LossKind, OrientError, ReprScheme, ReprVector,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "orient", version, about = "Yaw representation codecs, losses and Orientation Similarity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encode angles (radians, one per line) into CSV representation vectors.
    Encode(CodecArgs),
    /// Decode CSV representation vectors into angles.
    Decode(DecodeArgs),
    /// Rewrite alpha from rotation_y or vice versa in a KITTI label file.
    Convert(ConvertArgs),
    /// Orientation Similarity between a prediction and a ground-truth label file.
    Eval(EvalArgs),
    /// Sweep loss(encode(θ), encode(gt)) over a uniform grid of θ.
    Landscape(LandscapeArgs),
    /// Gradient descent on the representation vector toward encode(gt).
    Fit(FitArgs),
    /// Orientation Similarity after adding Gaussian noise to encoded vectors.
    Simulate(SimulateArgs),
    /// Check that rotation_y = alpha + atan(x / z) on every row.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
pub struct CodecArgs {
    /// Scheme descriptor, e.g. `single_bin`, `multibin:bins=2,overlap=0.1`.
    #[arg(long)]
    pub scheme: String,
    /// Input file; stdin when absent or `-`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[command(flatten)]
    pub codec: CodecArgs,
    /// Decode with the brute-force grid oracle of this many points instead
    /// of the closed-form decoder.
    #[arg(long, value_name = "GRID_SIZE")]
    pub oracle: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Field {
    Alpha,
    Roty,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::Alpha => "alpha",
            Field::Roty => "roty",
        })
    }
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[arg(long)]
    pub from: Field,
    #[arg(long)]
    pub to: Field,
    /// KITTI label file; stdin when absent or `-`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub gt: PathBuf,
    /// Keep only rows of this object type.
    #[arg(long)]
    pub class: Option<String>,
    /// Orientation column to compare.
    #[arg(long, default_value_t = Field::Roty)]
    pub field: Field,
}

#[derive(Debug, Args)]
pub struct LandscapeArgs {
    #[arg(long)]
    pub scheme: String,
    /// Loss id: `l2`, `angular` or `multibin`.
    #[arg(long)]
    pub loss: String,
    /// Ground-truth angle in radians.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub gt: f64,
    #[arg(long, default_value_t = 1000)]
    pub points: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub scheme: String,
    #[arg(long)]
    pub loss: String,
    /// Initial angle in radians; the starting vector is its encoding.
    #[arg(long, allow_negative_numbers = true)]
    pub init: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub gt: f64,
    #[arg(long)]
    pub steps: usize,
    #[arg(long)]
    pub lr: f64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub scheme: String,
    /// Per-component noise standard deviation.
    #[arg(long)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of ground-truth angles, evenly spaced over [-π, π).
    #[arg(long, default_value_t = 10_000)]
    pub count: usize,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub labels: PathBuf,
    /// Tolerance in radians.
    #[arg(long, default_value_t = 0.02)]
    pub tol: f64,
}

/// An error together with the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: msg.into() }
    }

    fn data(msg: impl Into<String>) -> Self {
        Self { code: EXIT_DATA, message: msg.into() }
    }

    /// Maps a library error raised while processing `context`.
    fn from_core(context: &str, err: OrientError) -> Self {
        let code = match err {
            OrientError::DegenerateMean { .. } | OrientError::DegenerateVector(_) => EXIT_NUMERIC,
            _ => EXIT_DATA,
        };
        Self { code, message: format!("{context}: {err}") }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdin: &mut dyn BufRead, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(cli.command, stdin, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.code
        }
    }
}

fn execute(cmd: Command, stdin: &mut dyn BufRead, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<i32> {
    match cmd {
        Command::Encode(args) => cmd_encode(args, stdin, stdout),
        Command::Decode(args) => cmd_decode(args, stdin, stdout),
        Command::Convert(args) => cmd_convert(args, stdin, stdout),
        Command::Eval(args) => cmd_eval(args, stdout),
        Command::Landscape(args) => cmd_landscape(args, stdout),
        Command::Fit(args) => cmd_fit(args, stdout, stderr),
        Command::Simulate(args) => cmd_simulate(args, stdout),
        Command::Check(args) => cmd_check(args, stdout),
    }
}

fn parse_scheme(text: &str) -> CliResult<ReprScheme> {
    text.parse().map_err(|e| CliError::usage(format!("--scheme {text}: {e}")))
}

fn parse_loss(text: &str, scheme: &ReprScheme) -> CliResult<LossKind> {
    let loss: LossKind = text.parse().map_err(|e| CliError::usage(format!("--loss {text}: {e}")))?;
    loss.ensure_supports(scheme)
        .map_err(|e| CliError::usage(format!("--loss {text}: {e}")))?;
    Ok(loss)
}

fn flag_angle(flag: &str, raw: f64) -> CliResult<Angle> {
    Angle::wrap(raw).map_err(|e| CliError::usage(format!("{flag}: {e}")))
}

fn display_path(path: &Option<PathBuf>) -> String {
    match path {
        Some(p) if p != Path::new("-") => p.display().to_string(),
        _ => "<stdin>".into(),
    }
}

fn read_input(path: &Option<PathBuf>, stdin: &mut dyn BufRead) -> CliResult<String> {
    match path {
        Some(p) if p != Path::new("-") => read_file(p),
        _ => {
            let mut text = String::new();
            stdin
                .read_to_string(&mut text)
                .map_err(|e| CliError::data(format!("<stdin>: {e}")))?;
            Ok(text)
        }
    }
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

fn write_output(path: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::data(format!("{}: {e}", p.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::data(format!("<stdout>: {e}"))),
    }
}

fn read_labels(path: &Path) -> CliResult<Vec<(usize, KittiLabel)>> {
    let text = read_file(path)?;
    kitti::parse_numbered(&text).map_err(|e| CliError::from_core(&path.display().to_string(), e))
}

fn cmd_encode(args: CodecArgs, stdin: &mut dyn BufRead, stdout: &mut dyn Write) -> CliResult<i32> {
    let scheme = parse_scheme(&args.scheme)?;
    let name = display_path(&args.input);
    let text = read_input(&args.input, stdin)?;
    let mut out = String::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let raw: f64 = line
            .parse()
            .map_err(|_| CliError::data(format!("{name}: line {}: `{line}` is not a number", i + 1)))?;
        let theta = Angle::wrap(raw)
            .map_err(|e| CliError::from_core(&format!("{name}: line {}", i + 1), e))?;
        let v = encode(&scheme, theta);
        let row: Vec<String> = v.values().iter().map(|x| x.to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    write_output(&args.output, &out, stdout)?;
    Ok(EXIT_OK)
}

fn cmd_decode(args: DecodeArgs, stdin: &mut dyn BufRead, stdout: &mut dyn Write) -> CliResult<i32> {
    let scheme = parse_scheme(&args.codec.scheme)?;
    let oracle = match args.oracle {
        Some(n) if n < MIN_ORACLE_GRID => {
            return Err(CliError::usage(format!("--oracle must be at least {MIN_ORACLE_GRID}, got {n}")))
        }
        Some(n) => Some(GridOracle::new(scheme, n).map_err(|e| CliError::usage(format!("--oracle: {e}")))?),
        None => None,
    };
    let name = display_path(&args.codec.input);
    let text = read_input(&args.codec.input, stdin)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut out = String::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::data(format!("{name}: {e}")))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let context = format!("{name}: line {line}");
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let values = record
            .iter()
            .enumerate()
            .map(|(col, f)| {
                f.parse::<f64>()
                    .map_err(|_| CliError::data(format!("{context}: column {}: `{f}` is not a number", col + 1)))
            })
            .collect::<CliResult<Vec<f64>>>()?;
        let v = ReprVector::new(scheme, values).map_err(|e| CliError::from_core(&context, e))?;
        let theta = match &oracle {
            Some(o) => o.decode(&v),
            None => decode(&v),
        }
        .map_err(|e| CliError::from_core(&context, e))?;
        out.push_str(&theta.radians().to_string());
        out.push('\n');
    }
    write_output(&args.codec.output, &out, stdout)?;
    Ok(EXIT_OK)
}

fn cmd_convert(args: ConvertArgs, stdin: &mut dyn BufRead, stdout: &mut dyn Write) -> CliResult<i32> {
    if args.from == args.to {
        return Err(CliError::usage(format!("--from and --to are both `{}`", args.from)));
    }
    let name = display_path(&args.input);
    let text = read_input(&args.input, stdin)?;
    let mut labels =
        kitti::parse_numbered(&text).map_err(|e| CliError::from_core(&name, e))?;
    for (line, label) in labels.iter_mut() {
        if label.is_dont_care() {
            continue;
        }
        let context = format!("{name}: line {line}");
        let loc = label.ground_location();
        match args.to {
            Field::Roty => {
                let alpha = label.alpha_angle().map_err(|e| CliError::from_core(&context, e))?;
                label.rotation_y = alpha_to_roty(alpha, loc)
                    .map_err(|e| CliError::from_core(&context, e))?
                    .radians();
            }
            Field::Alpha => {
                let roty = label.rotation_y_angle().map_err(|e| CliError::from_core(&context, e))?;
                label.alpha = roty_to_alpha(roty, loc)
                    .map_err(|e| CliError::from_core(&context, e))?
                    .radians();
            }
        }
    }
    let labels: Vec<KittiLabel> = labels.into_iter().map(|(_, l)| l).collect();
    write_output(&args.output, &kitti::write_label_file(&labels), stdout)?;
    Ok(EXIT_OK)
}

fn orientation_of(label: &KittiLabel, field: Field) -> orient_core::Result<Angle> {
    match field {
        Field::Alpha => label.alpha_angle(),
        Field::Roty => label.rotation_y_angle(),
    }
}

fn cmd_eval(args: EvalArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let select = |path: &Path| -> CliResult<Vec<Angle>> {
        read_labels(path)?
            .into_iter()
            .filter(|(_, l)| !l.is_dont_care())
            .filter(|(_, l)| args.class.as_deref().map_or(true, |c| l.object_type == c))
            .map(|(line, l)| {
                orientation_of(&l, args.field)
                    .map_err(|e| CliError::from_core(&format!("{}: line {line}", path.display()), e))
            })
            .collect()
    };
    let preds = select(&args.pred)?;
    let gts = select(&args.gt)?;
    if preds.len() != gts.len() {
        return Err(CliError::data(format!(
            "{} has {} matching rows but {} has {}",
            args.pred.display(),
            preds.len(),
            args.gt.display(),
            gts.len()
        )));
    }
    let batch = EvalBatch::new(preds, gts)
        .map_err(|e| CliError::data(format!("{}: {e}", args.gt.display())))?;
    writeln!(stdout, "{:.6}", orientation_similarity(&batch)).map_err(|e| CliError::data(e.to_string()))?;
    Ok(EXIT_OK)
}

fn cmd_landscape(args: LandscapeArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let scheme = parse_scheme(&args.scheme)?;
    let loss = parse_loss(&args.loss, &scheme)?;
    let gt = flag_angle("--gt", args.gt)?;
    if args.points == 0 {
        return Err(CliError::usage("--points must be at least 1"));
    }
    let sweep = sweep_landscape(scheme, loss, gt, args.points).map_err(|e| CliError::from_core("landscape", e))?;
    write_output(&args.output, &sweep.to_csv(), stdout)?;
    Ok(EXIT_OK)
}

fn cmd_fit(args: FitArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<i32> {
    let scheme = parse_scheme(&args.scheme)?;
    let loss = parse_loss(&args.loss, &scheme)?;
    let init = flag_angle("--init", args.init)?;
    let gt = flag_angle("--gt", args.gt)?;
    if args.steps == 0 {
        return Err(CliError::usage("--steps must be at least 1"));
    }
    if !(args.lr > 0.0 && args.lr <= 1.0) {
        return Err(CliError::usage(format!("--lr must lie in (0, 1], got {}", args.lr)));
    }
    let trace = fit_representation(scheme, loss, gt, encode(&scheme, init), args.lr, args.steps)
        .map_err(|e| CliError::from_core("fit", e))?;
    write_output(&args.output, &trace.to_csv(), stdout)?;
    if let Some((step, err)) = &trace.halted {
        let _ = writeln!(stderr, "error: fit halted at step {step}: {err}");
        return Ok(EXIT_NUMERIC);
    }
    Ok(EXIT_OK)
}

fn cmd_simulate(args: SimulateArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let scheme = parse_scheme(&args.scheme)?;
    if !(args.sigma >= 0.0 && args.sigma.is_finite()) {
        return Err(CliError::usage(format!("--sigma must be finite and >= 0, got {}", args.sigma)));
    }
    if args.count == 0 {
        return Err(CliError::usage("--count must be at least 1"));
    }
    let angles = uniform_grid(args.count);
    let batch = simulate_noisy_predictions(scheme, &angles, args.sigma, args.seed)
        .map_err(|e| CliError::from_core("simulate", e))?;
    writeln!(stdout, "{:.6}", orientation_similarity(&batch)).map_err(|e| CliError::data(e.to_string()))?;
    Ok(EXIT_OK)
}

fn cmd_check(args: CheckArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    if !(args.tol >= 0.0 && args.tol.is_finite()) {
        return Err(CliError::usage(format!("--tol must be finite and >= 0, got {}", args.tol)));
    }
    let labels = read_labels(&args.labels)?;
    let name = args.labels.display().to_string();
    let mut failures = 0usize;
    let mut report = String::new();
    for (line, label) in &labels {
        if label.is_dont_care() {
            report.push_str(&format!("{name}:{line}: skip ({})\n", label.object_type));
            continue;
        }
        let context = format!("{name}: line {line}");
        let implied = label
            .alpha_angle()
            .and_then(|a| alpha_to_roty(a, label.ground_location()))
            .map_err(|e| CliError::from_core(&context, e))?;
        let roty = label.rotation_y_angle().map_err(|e| CliError::from_core(&context, e))?;
        let diff = circular_diff(roty, implied);
        let ok = kitti::check_label_consistency(label, args.tol).map_err(|e| CliError::from_core(&context, e))?;
        if !ok {
            failures += 1;
        }
        report.push_str(&format!(
            "{name}:{line}: {} diff={diff:.4}\n",
            if ok { "ok" } else { "FAIL" }
        ));
    }
    report.push_str(&format!(
        "{} rows checked, {failures} inconsistent (tol {})\n",
        labels.iter().filter(|(_, l)| !l.is_dont_care()).count(),
        args.tol
    ));
    stdout.write_all(report.as_bytes()).map_err(|e| CliError::data(e.to_string()))?;
    Ok(if failures == 0 { EXIT_OK } else { EXIT_DATA })
}
