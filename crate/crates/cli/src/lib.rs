//! `rfext` command-line front end.
//!
//! Exit codes: 0 success, 1 reject or failed property, 2 usage error,
//! infeasible parameters or malformed input.

pub mod helper_file;
pub mod verify;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rfext_core::adversary::{run_attack_experiment, AttackReport, FlatDistribution};
use rfext_core::extractor::parse_log2;
use rfext_core::{
    code_from_key, derive_fuzzy_params, derive_params, Basis, BitString, Error, Extractor, ExtractorParams,
    FuzzyExtractor, FuzzyParams, Variant,
};

use helper_file::HelperFile;

pub const EXIT_OK: u8 = 0;
pub const EXIT_REJECT: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "rfext", version, about = "Robust extractors and robust fuzzy extractors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve for the tag and key lengths and report them.
    Params(ParamsArgs),
    /// Extract a key from a secret and write the helper file.
    Gen(GenArgs),
    /// Reproduce a key from a secret and a helper file.
    Rep(RepArgs),
    /// Fuzzy variant of `gen`.
    FuzzyGen(FuzzyGenArgs),
    /// Fuzzy variant of `rep`; tolerates up to `t` flipped bits.
    FuzzyRep(RepArgs),
    /// Monte Carlo run of the split-basis forgery.
    Attack(AttackArgs),
    /// Run the exhaustive and statistical checks.
    Verify(verify::VerifyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ExtractorArgs {
    #[arg(long, default_value = "new", value_parser = parse_variant)]
    pub variant: Variant,
    #[arg(long)]
    pub n: usize,
    /// Min-entropy of the secret; defaults to n.
    #[arg(long)]
    pub m: Option<usize>,
    /// log2(1/delta), robustness.
    #[arg(long, default_value = "64", value_parser = parse_exponent)]
    pub logd: Rational64,
    /// log2(1/epsilon), uniformity.
    #[arg(long, default_value = "1", value_parser = parse_exponent)]
    pub loge: Rational64,
    /// Explicit tag length; with --ell, bypasses the solver.
    #[arg(long, requires = "ell")]
    pub v: Option<usize>,
    #[arg(long, requires = "v")]
    pub ell: Option<usize>,
}

impl ExtractorArgs {
    fn params(&self) -> rfext_core::Result<ExtractorParams> {
        let m = self.m.unwrap_or(self.n);
        match (self.v, self.ell) {
            (Some(v), Some(ell)) => ExtractorParams::with_layout(self.variant, self.n, m, v, ell),
            _ => derive_params(self.n, m, self.logd, self.loge, self.variant),
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct FuzzyArgs {
    /// Code key `family-n-t`, e.g. `bch-255-8` or `hamming-7-1`.
    #[arg(long)]
    pub code: String,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value = "64", value_parser = parse_exponent)]
    pub logd: Rational64,
    #[arg(long, default_value = "1", value_parser = parse_exponent)]
    pub loge: Rational64,
    /// Drop the last bit of c when n - k is odd, decrementing m.
    #[arg(long)]
    pub truncate: bool,
    #[arg(long, requires = "ell")]
    pub v: Option<usize>,
    #[arg(long, requires = "v")]
    pub ell: Option<usize>,
}

impl FuzzyArgs {
    fn params(&self) -> rfext_core::Result<FuzzyParams> {
        let code = Arc::new(code_from_key(&self.code)?);
        let m = self.m.unwrap_or(code.n());
        match (self.v, self.ell) {
            (Some(v), Some(ell)) => FuzzyParams::with_layout(code, m, v, ell, self.truncate),
            _ => derive_fuzzy_params(code, m, self.logd, self.loge, self.truncate),
        }
    }
}

#[derive(Args, Debug)]
pub struct ParamsArgs {
    #[arg(long, default_value = "new", value_parser = parse_variant)]
    pub variant: Variant,
    /// Required unless --code is given.
    #[arg(long, required_unless_present = "code")]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value = "64", value_parser = parse_exponent)]
    pub logd: Rational64,
    #[arg(long, default_value = "1", value_parser = parse_exponent)]
    pub loge: Rational64,
    /// Report fuzzy parameters for this code instead.
    #[arg(long)]
    pub code: Option<String>,
    #[arg(long)]
    pub truncate: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    /// `bits` if the file is n characters of 0/1, `hex` if it is n/4 hex
    /// digits, `raw` otherwise.
    Auto,
    Bits,
    Hex,
    Raw,
}

#[derive(Args, Debug, Clone)]
pub struct SecretArgs {
    /// File holding the secret.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
    pub format: InputFormat,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[command(flatten)]
    pub extractor: ExtractorArgs,
    #[command(flatten)]
    pub secret: SecretArgs,
    /// Where to write the helper file.
    #[arg(long)]
    pub helper: PathBuf,
    /// Deterministic seed for i. For experiments only.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct FuzzyGenArgs {
    #[command(flatten)]
    pub fuzzy: FuzzyArgs,
    #[command(flatten)]
    pub secret: SecretArgs,
    #[arg(long)]
    pub helper: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct RepArgs {
    #[command(flatten)]
    pub secret: SecretArgs,
    #[arg(long)]
    pub helper: PathBuf,
}

#[derive(Args, Debug)]
pub struct AttackArgs {
    #[arg(long, default_value = "dkrs-post", value_parser = parse_variant)]
    pub variant: Variant,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, value_parser = parse_exponent)]
    pub logd: Rational64,
    #[arg(long, default_value = "1", value_parser = parse_exponent)]
    pub loge: Rational64,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Also append the report as CSV to this file.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_exponent(s: &str) -> Result<Rational64, String> {
    parse_log2(s).map_err(|e| e.to_string())
}

/// A failure that maps to exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl From<Error> for UsageError {
    fn from(e: Error) -> Self {
        UsageError(e.to_string())
    }
}

impl From<std::io::Error> for UsageError {
    fn from(e: std::io::Error) -> Self {
        UsageError(e.to_string())
    }
}

type CmdResult = Result<u8, UsageError>;

fn read_file(path: &Path) -> Result<Vec<u8>, UsageError> {
    fs::read(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), UsageError> {
    fs::write(path, bytes).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

/// Decodes an `n`-bit secret from file contents.
pub fn parse_secret(bytes: &[u8], n: usize, format: InputFormat) -> rfext_core::Result<BitString> {
    let text = std::str::from_utf8(bytes).ok().map(|s| s.split_whitespace().collect::<String>());
    let format = match (format, &text) {
        (InputFormat::Auto, Some(t)) if t.len() == n && t.bytes().all(|c| c == b'0' || c == b'1') => InputFormat::Bits,
        (InputFormat::Auto, Some(t)) if t.len() == n.div_ceil(4) && t.bytes().all(|c| c.is_ascii_hexdigit()) => {
            InputFormat::Hex
        }
        (InputFormat::Auto, _) => InputFormat::Raw,
        (f, _) => f,
    };
    let text = || text.clone().ok_or_else(|| Error::InvalidInput("secret file is not text".into()));
    match format {
        InputFormat::Bits => {
            let t = text()?;
            if t.len() != n {
                return Err(Error::LengthMismatch { expected: n, actual: t.len() });
            }
            t.parse()
        }
        InputFormat::Hex => {
            let t = text()?;
            if t.len() != n.div_ceil(4) {
                return Err(Error::InvalidInput(format!("expected {} hex digits, got {}", n.div_ceil(4), t.len())));
            }
            BitString::from_hex(&t, n)
        }
        InputFormat::Raw => {
            if bytes.len() != n.div_ceil(8) {
                return Err(Error::InvalidInput(format!(
                    "expected {} raw bytes for n = {n}, got {}",
                    n.div_ceil(8),
                    bytes.len()
                )));
            }
            let w = BitString::from_bytes(bytes, n)?;
            if w.to_bytes() != bytes {
                return Err(Error::InvalidInput("nonzero padding bits in raw secret".into()));
            }
            Ok(w)
        }
        InputFormat::Auto => unreachable!(),
    }
}

fn seed_rng(seed: Option<u64>, err: &mut dyn Write) -> Box<dyn RngCore> {
    match seed {
        Some(s) => {
            let _ = writeln!(
                err,
                "note: --seed makes the helper deterministic; security claims assume a uniformly random seed"
            );
            Box::new(ChaCha8Rng::seed_from_u64(s))
        }
        None => Box::new(rand::rng()),
    }
}

fn cmd_params(a: &ParamsArgs, out: &mut dyn Write) -> CmdResult {
    let exp = |x: Rational64| x.to_string();
    if let Some(key) = &a.code {
        let fuzzy = FuzzyArgs {
            code: key.clone(),
            m: a.m,
            logd: a.logd,
            loge: a.loge,
            truncate: a.truncate,
            v: None,
            ell: None,
        };
        let p = fuzzy.params()?;
        let log_b = match p.ball.exact_log2() {
            Some(e) => e.to_string(),
            None => format!("{:.4}", p.ball.log2_f64()),
        };
        writeln!(out, "variant=fuzzy")?;
        writeln!(out, "code={key}")?;
        for (k, v) in [("n", p.n), ("k", p.k), ("t", p.t), ("n_prime", p.n_prime), ("m", p.m), ("L", p.l)] {
            writeln!(out, "{k}={v}")?;
        }
        writeln!(out, "log2_B={log_b}")?;
        writeln!(out, "log2_inv_delta={}\nlog2_inv_eps={}", exp(p.log2_inv_delta), exp(p.log2_inv_eps))?;
        writeln!(out, "v={}\nell={}\nbeta={}\ntruncated={}", p.v, p.ell, p.beta, p.truncated)?;
    } else {
        let n = a.n.ok_or_else(|| UsageError("--n is required".into()))?;
        let m = a.m.unwrap_or(n);
        let p = derive_params(n, m, a.logd, a.loge, a.variant)?;
        writeln!(out, "variant={}\nn={n}\nm={m}", a.variant)?;
        writeln!(out, "log2_inv_delta={}\nlog2_inv_eps={}", exp(p.log2_inv_delta), exp(p.log2_inv_eps))?;
        writeln!(out, "v={}\nell={}\nbeta={}", p.v, p.ell, p.beta)?;
    }
    writeln!(out, "feasible=true")?;
    Ok(EXIT_OK)
}

fn cmd_gen(a: &GenArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let params = a.extractor.params()?;
    let w = parse_secret(&read_file(&a.secret.input)?, params.n, a.secret.format)?;
    let ex = Extractor::new(params.clone())?;
    let mut rng = seed_rng(a.seed, err);
    let (key, helper) = ex.gen(&w, &mut *rng)?;
    write_file(&a.helper, &HelperFile::errorless(&params, &helper)?.to_bytes())?;
    writeln!(out, "{}", key.to_hex())?;
    Ok(EXIT_OK)
}

fn cmd_fuzzy_gen(a: &FuzzyGenArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let params = a.fuzzy.params()?;
    let w = parse_secret(&read_file(&a.secret.input)?, params.n, a.secret.format)?;
    let fx = FuzzyExtractor::new(params.clone())?;
    let mut rng = seed_rng(a.seed, err);
    let (key, helper) = fx.gen(&w, &mut *rng)?;
    write_file(&a.helper, &HelperFile::fuzzy(&params, &helper)?.to_bytes())?;
    writeln!(out, "{}", key.to_hex())?;
    Ok(EXIT_OK)
}

fn cmd_rep(a: &RepArgs, fuzzy: bool, out: &mut dyn Write) -> CmdResult {
    let file = HelperFile::from_bytes(&read_file(&a.helper)?)?;
    if file.is_fuzzy() != fuzzy {
        let want = if file.is_fuzzy() { "fuzzy-rep" } else { "rep" };
        return Err(UsageError(format!("helper file was written for {want}")));
    }
    let w = parse_secret(&read_file(&a.secret.input)?, file.n as usize, a.secret.format)?;
    let key = if fuzzy {
        let (params, helper) = file.to_fuzzy()?;
        FuzzyExtractor::new(params)?.rep(&w, &helper)?
    } else {
        let (params, helper) = file.to_errorless()?;
        Extractor::new(params)?.rep(&w, &helper)?
    };
    match key {
        Some(key) => {
            writeln!(out, "{}", key.to_hex())?;
            Ok(EXIT_OK)
        }
        None => {
            writeln!(out, "REJECT")?;
            Ok(EXIT_REJECT)
        }
    }
}

/// Parameters for the attack run. For the baseline family the attack needs
/// `n - v` even; when it is odd the last bit of `w` is dropped and `m`
/// decremented.
pub fn attack_params(a: &AttackArgs) -> rfext_core::Result<(ExtractorParams, Option<String>)> {
    let m = a.m.unwrap_or(a.n);
    let p = derive_params(a.n, m, a.logd, a.loge, a.variant)?;
    if a.variant.is_dkrs() && (p.n - p.v) % 2 == 1 {
        if m < 2 {
            return Err(Error::InvalidInput("cannot truncate: m would reach 0".into()));
        }
        let q = derive_params(a.n - 1, m - 1, a.logd, a.loge, a.variant)?;
        if (q.n - q.v) % 2 == 1 {
            return Err(Error::InvalidInput(format!("n - v is odd at n = {} and at n = {}", a.n, a.n - 1)));
        }
        let note = format!("n - v = {} is odd; dropped the last bit of w (n = {}, m = {})", p.n - p.v, q.n, q.m);
        return Ok((q.with_basis(Basis::ParitySplit), Some(note)));
    }
    Ok((p.with_basis(Basis::ParitySplit), None))
}

fn cmd_attack(a: &AttackArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    if a.trials == 0 {
        return Err(UsageError("--trials must be at least 1".into()));
    }
    let (params, note) = attack_params(a)?;
    if let Some(note) = &note {
        writeln!(err, "note: {note}")?;
    }
    let dist = FlatDistribution::top_of_b_zero(&params)?;
    let report = run_attack_experiment(&params, &dist, a.trials, a.seed)?;
    if let Some(note) = note {
        writeln!(out, "adjustment={note}")?;
    }
    writeln!(out, "source={}", dist.describe())?;
    write!(out, "{}", report.to_key_value())?;
    writeln!(out, "note=seeded ChaCha8 trials; rates are estimates")?;
    if let Some(path) = &a.csv {
        let fresh = !path.exists();
        let mut f = fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
        if fresh {
            writeln!(f, "{}", AttackReport::csv_header())?;
        }
        writeln!(f, "{}", report.csv_row())?;
    }
    Ok(if report.passed { EXIT_OK } else { EXIT_REJECT })
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Params(a) => cmd_params(a, out),
        Command::Gen(a) => cmd_gen(a, out, err),
        Command::Rep(a) => cmd_rep(a, false, out),
        Command::FuzzyGen(a) => cmd_fuzzy_gen(a, out, err),
        Command::FuzzyRep(a) => cmd_rep(a, true, out),
        Command::Attack(a) => cmd_attack(a, out, err),
        Command::Verify(a) => verify::run(a, out),
    };
    match result {
        Ok(code) => code,
        Err(UsageError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}
