//! `curvecomm`: constellation inspection, analytic pairwise errors, SER bounds,
//! Monte Carlo runs and CSV sweeps.
//!
//! Every command prints what the library returns; floating values on stdout use
//! shortest round-trip formatting, CSV files use 12 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use curvecomm::bounds::ser_bounds;
use curvecomm::channel::{DecoderKind, EuclideanMeans};
use curvecomm::geometry::{
    antipodal_geometry, offset_spectrum, pair_geometry, speed, Constellation, PairGeometry,
    DEFAULT_PHANTOM_TOL,
};
use curvecomm::montecarlo::{
    estimate_pairwise_pep_both, estimate_ser_both, run_sweep, with_workers, PepEstimate,
    QuantityKind, SweepRow,
};
use curvecomm::pairwise::{euclidean_pep, matched_phantom_pep, NoiseParams, DEFAULT_QUAD_ORDER};
use curvecomm::sweep::{
    format_sig12, to_csv_string, SweepConfig, DEFAULT_SEED, DEFAULT_TRIALS_PAIRWISE,
    DEFAULT_TRIALS_SER,
};
use curvecomm::{Error, Result};

const SEED_ENV: &str = "CURVECOMM_SEED";

#[derive(Parser, Debug)]
#[command(
    name = "curvecomm",
    version,
    about = "Fourier-curve constellations with tangent-space artificial noise"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Curve speed, antipodal closed forms and the offset table of a uniform codebook.
    Geometry(GeometryArgs),
    /// Analytic pairwise error probability.
    Pep(PepArgs),
    /// Euclidean SER bounds and the matched antipodal lower bound.
    SerBounds(SerBoundsArgs),
    /// Monte Carlo pairwise error rate for one ordered pair.
    McPep(McPepArgs),
    /// Monte Carlo symbol error rate of a uniform codebook.
    McSer(McSerArgs),
    /// Grid sweep written as CSV.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct CodebookArgs {
    /// Number of harmonics.
    #[arg(long)]
    k: usize,
    /// Codebook size.
    #[arg(long)]
    m: usize,
}

#[derive(Args, Debug)]
struct NoiseArgs {
    /// Artificial-noise power fraction, in [0, 1).
    #[arg(long)]
    beta: f64,
    /// Channel noise standard deviation per dimension.
    #[arg(long = "sigma-c")]
    sigma_c: f64,
}

impl NoiseArgs {
    fn params(&self) -> Result<NoiseParams> {
        NoiseParams::new(self.beta, self.sigma_c)
    }
}

#[derive(Args, Debug)]
struct McArgs {
    /// Master seed; falls back to CURVECOMM_SEED, then a fixed default.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 picks the machine default). Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Restrict output to one decoder; both are simulated on shared streams.
    #[arg(long)]
    decoder: Option<DecoderKind>,
    /// Means used by the Euclidean receiver: shrunken or unshrunken.
    #[arg(long = "euclidean-means", default_value = "shrunken")]
    euclidean_means: EuclideanMeans,
}

#[derive(Args, Debug)]
struct GeometryArgs {
    #[command(flatten)]
    codebook: CodebookArgs,
    /// Write the offset table as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PepArgs {
    #[command(flatten)]
    noise: NoiseArgs,
    #[arg(long, default_value = "euclidean")]
    decoder: DecoderKind,
    /// Ordered pair `i,j` of a uniform codebook given by --k and --m.
    #[arg(long, value_parser = parse_pair, requires_all = ["k", "m"], conflicts_with_all = ["delta", "antipodal"])]
    pair: Option<(usize, usize)>,
    /// Antipodal pair of order --k.
    #[arg(long, requires = "k", conflicts_with = "delta")]
    antipodal: bool,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Chord length, for a pair given by its scalars.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long = "cos-alpha", requires = "delta")]
    cos_alpha: Option<f64>,
    #[arg(long, requires = "delta")]
    gamma: Option<f64>,
    /// Accept raw scalars in matched mode without a geometric phantom check.
    #[arg(long = "assume-phantom")]
    assume_phantom: bool,
    #[arg(long = "quad-order", default_value_t = DEFAULT_QUAD_ORDER)]
    quad_order: usize,
    /// Write a one-row CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SerBoundsArgs {
    #[command(flatten)]
    codebook: CodebookArgs,
    #[command(flatten)]
    noise: NoiseArgs,
    #[arg(long = "quad-order", default_value_t = DEFAULT_QUAD_ORDER)]
    quad_order: usize,
    /// Write the bound rows in the sweep CSV schema.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct McPepArgs {
    #[command(flatten)]
    codebook: CodebookArgs,
    #[command(flatten)]
    noise: NoiseArgs,
    /// Ordered pair `i,j` with `i` transmitted; defaults to `0,M/2`.
    #[arg(long, value_parser = parse_pair)]
    pair: Option<(usize, usize)>,
    #[arg(long, default_value_t = DEFAULT_TRIALS_PAIRWISE, value_parser = parse_trials)]
    trials: u64,
    #[command(flatten)]
    mc: McArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct McSerArgs {
    #[command(flatten)]
    codebook: CodebookArgs,
    #[command(flatten)]
    noise: NoiseArgs,
    #[arg(long, default_value_t = DEFAULT_TRIALS_SER, value_parser = parse_trials)]
    trials: u64,
    #[command(flatten)]
    mc: McArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// `key = value` config file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named preset applied before the config file (`figure1`).
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Grid of beta values: `a,b,c` or `start:step:stop`.
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long = "sigma-c")]
    sigma_c: Option<String>,
    /// Comma-separated quantity kinds, `all`, or empty for none.
    #[arg(long)]
    quantities: Option<String>,
    /// Sets both trial counts.
    #[arg(long)]
    trials: Option<String>,
    #[arg(long = "trials-pairwise")]
    trials_pairwise: Option<String>,
    #[arg(long = "trials-ser")]
    trials_ser: Option<String>,
    #[arg(long = "quad-order")]
    quad_order: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long = "euclidean-means")]
    euclidean_means: Option<String>,
    /// Output CSV path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_pair(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected i,j")?;
    let i = a.trim().parse().map_err(|_| format!("bad index '{a}'"))?;
    let j = b.trim().parse().map_err(|_| format!("bad index '{b}'"))?;
    Ok((i, j))
}

fn parse_trials(s: &str) -> std::result::Result<u64, String> {
    curvecomm::sweep::parse_count(s).ok_or_else(|| format!("bad trial count '{s}'"))
}

fn env_seed() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| {
            Error::Config(format!("{SEED_ENV} must be an unsigned integer, got '{v}'"))
        }),
        Err(_) => Ok(None),
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    Ok(match flag {
        Some(s) => s,
        None => env_seed()?.unwrap_or(DEFAULT_SEED),
    })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text)
        .map_err(|e| Error::Config(format!("cannot write '{}': {e}", path.display())))
}

fn cmd_geometry(a: &GeometryArgs) -> Result<String> {
    let (k, m) = (a.codebook.k, a.codebook.m);
    Constellation::uniform(k, m)?;
    let g = antipodal_geometry(k)?;
    let mut out = String::new();
    writeln!(out, "k = {k}").unwrap();
    writeln!(out, "M = {m}").unwrap();
    writeln!(out, "v_k = {:?}", speed(k)).unwrap();
    writeln!(out, "delta_k = {:?}", g.delta).unwrap();
    writeln!(out, "gamma_k = {:?}", g.gamma).unwrap();
    writeln!(out, "rho_k = {:?}", g.rho).unwrap();
    let mut table = String::from("q,angle,delta,cos_alpha\n");
    let mut csv = table.clone();
    for q in 1..m {
        let s = offset_spectrum(k, m, q)?;
        writeln!(table, "{q},{:?},{:?},{:?}", s.angle, s.delta, s.cos_alpha).unwrap();
        writeln!(
            csv,
            "{q},{},{},{}",
            format_sig12(s.angle),
            format_sig12(s.delta),
            format_sig12(s.cos_alpha)
        )
        .unwrap();
    }
    out.push_str(&table);
    if let Some(path) = &a.out {
        write_file(path, &csv)?;
    }
    Ok(out)
}

fn cmd_pep(a: &PepArgs) -> Result<String> {
    let n = a.noise.params()?;
    let geom: PairGeometry = if let Some((i, j)) = a.pair {
        let c =
            Constellation::uniform(a.k.expect("clap requires k"), a.m.expect("clap requires m"))?;
        let g = pair_geometry(&c, i, j, DEFAULT_PHANTOM_TOL)?;
        if a.decoder == DecoderKind::Matched && !g.phantom {
            return Err(Error::NotPhantom {
                i,
                j,
                proj_i: g.proj_i.abs(),
                proj_j: g.proj_j.abs(),
            });
        }
        g
    } else if a.antipodal {
        let g = antipodal_geometry(a.k.expect("clap requires k"))?;
        PairGeometry::from_scalars(g.delta, 0.0, g.gamma)
    } else if let Some(delta) = a.delta {
        match a.decoder {
            DecoderKind::Euclidean => {
                let cos_alpha = a.cos_alpha.ok_or_else(|| {
                    Error::Config("Euclidean pairwise error needs --cos-alpha".into())
                })?;
                PairGeometry::from_scalars(delta, cos_alpha, a.gamma.unwrap_or(f64::NAN))
            }
            DecoderKind::Matched => {
                if !a.assume_phantom {
                    return Err(Error::Config(
                        "matched pairwise error from raw scalars holds only for phantom pairs \
                         (chord orthogonal to both tangents); pass --assume-phantom to accept"
                            .into(),
                    ));
                }
                if a.cos_alpha.is_some_and(|c| c != 0.0) {
                    return Err(Error::Config(
                        "a phantom pair has cos alpha = 0; drop --cos-alpha or set it to 0".into(),
                    ));
                }
                let gamma = a
                    .gamma
                    .ok_or_else(|| Error::Config("matched pairwise error needs --gamma".into()))?;
                PairGeometry::from_scalars(delta, 0.0, gamma)
            }
        }
    } else {
        return Err(Error::Config(
            "specify the pair with --pair i,j, --antipodal, or --delta".into(),
        ));
    };

    let value = match a.decoder {
        DecoderKind::Euclidean => euclidean_pep(&geom, n)?,
        DecoderKind::Matched => matched_phantom_pep(geom.delta, geom.gamma, n, a.quad_order)?,
    };
    if let Some(path) = &a.out {
        let csv = format!(
            "decoder,delta,cos_alpha,gamma,beta,sigma_c,pep\n{},{},{},{},{},{},{}\n",
            a.decoder,
            format_sig12(geom.delta),
            format_sig12(geom.cos_alpha),
            format_sig12(geom.gamma),
            format_sig12(n.beta()),
            format_sig12(n.sigma_c()),
            format_sig12(value)
        );
        write_file(path, &csv)?;
    }
    Ok(format!("{value:?}\n"))
}

fn bound_row(k: usize, m: usize, n: NoiseParams, kind: QuantityKind, value: f64) -> SweepRow {
    SweepRow {
        k,
        m,
        beta: n.beta(),
        sigma_c: n.sigma_c(),
        kind,
        value,
        ci_low: value,
        ci_high: value,
        trials: 0,
    }
}

fn cmd_ser_bounds(a: &SerBoundsArgs) -> Result<String> {
    let (k, m) = (a.codebook.k, a.codebook.m);
    let n = a.noise.params()?;
    let b = ser_bounds(k, m, n, a.quad_order)?;
    let matched_lower = b.matched_lower.expect("ser_bounds fills the matched bound");
    let mut out = String::new();
    writeln!(out, "lower = {:?}", b.lower).unwrap();
    writeln!(out, "upper_raw = {:?}", b.upper_raw).unwrap();
    writeln!(out, "upper = {:?}", b.upper).unwrap();
    writeln!(out, "matched_lower = {matched_lower:?}").unwrap();
    out.push_str("q,pep\n");
    for (q, p) in &b.per_offset {
        writeln!(out, "{q},{p:?}").unwrap();
    }
    if let Some(path) = &a.out {
        let rows = [
            bound_row(k, m, n, QuantityKind::BoundLower, b.lower),
            bound_row(k, m, n, QuantityKind::BoundUpper, b.upper_raw),
            bound_row(k, m, n, QuantityKind::BoundMatchedLower, matched_lower),
        ];
        write_file(path, &to_csv_string(&rows))?;
    }
    Ok(out)
}

/// Text and CSV tables of estimates; `lead` prefixes every data row and names
/// its columns in `lead_header`.
fn estimate_tables(
    lead_header: &str,
    lead: &str,
    estimates: &[PepEstimate],
    only: Option<DecoderKind>,
) -> (String, String) {
    let header = format!("{lead_header}decoder,value,errors,trials,ci_low,ci_high,seed\n");
    let (mut text, mut csv) = (header.clone(), header);
    for e in estimates
        .iter()
        .filter(|e| only.is_none_or(|d| d == e.decoder))
    {
        let row = |f: fn(f64) -> String| {
            format!(
                "{lead}{},{},{},{},{},{},{}\n",
                e.decoder,
                f(e.value),
                e.errors,
                e.trials,
                f(e.ci_low),
                f(e.ci_high),
                e.seed
            )
        };
        text.push_str(&row(|x| format!("{x:?}")));
        csv.push_str(&row(format_sig12));
    }
    (text, csv)
}

fn cmd_mc_pep(a: &McPepArgs) -> Result<String> {
    let (k, m) = (a.codebook.k, a.codebook.m);
    let n = a.noise.params()?;
    let c = Constellation::uniform(k, m)?;
    let (i, j) = match a.pair {
        Some(p) => p,
        None if m % 2 == 0 => (0, m / 2),
        None => {
            return Err(Error::Config(format!(
                "M = {m} is odd and has no antipodal partner; pass --pair i,j"
            )))
        }
    };
    let seed = resolve_seed(a.mc.seed)?;
    let (em, ee) = with_workers(a.mc.workers, || {
        estimate_pairwise_pep_both(&c, i, j, n, a.trials, seed, a.mc.euclidean_means)
    })??;
    let (text, csv) = estimate_tables("i,j,", &format!("{i},{j},"), &[em, ee], a.mc.decoder);
    if let Some(path) = &a.out {
        write_file(path, &csv)?;
    }
    Ok(text)
}

fn cmd_mc_ser(a: &McSerArgs) -> Result<String> {
    let (k, m) = (a.codebook.k, a.codebook.m);
    let n = a.noise.params()?;
    let c = Constellation::uniform(k, m)?;
    let seed = resolve_seed(a.mc.seed)?;
    let (em, ee) = with_workers(a.mc.workers, || {
        estimate_ser_both(&c, n, a.trials, seed, a.mc.euclidean_means)
    })??;
    let (text, csv) = estimate_tables("", "", &[em, ee], a.mc.decoder);
    if let Some(path) = &a.out {
        write_file(path, &csv)?;
    }
    Ok(text)
}

fn sweep_config(a: &SweepArgs) -> Result<SweepConfig> {
    let mut cfg = match &a.preset {
        Some(name) => SweepConfig::preset(name)?,
        None => SweepConfig::default(),
    };
    if let Some(seed) = env_seed()? {
        cfg.seed = seed;
    }
    if let Some(path) = &a.config {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read '{}': {e}", path.display())))?;
        cfg.apply_file_str(&text)
            .map_err(|e| Error::Config(format!("{}: {}", path.display(), strip_config(&e))))?;
    }
    let overrides: [(&str, Option<String>); 12] = [
        ("k", a.k.map(|v| v.to_string())),
        ("M", a.m.map(|v| v.to_string())),
        ("beta", a.beta.clone()),
        ("sigma_c", a.sigma_c.clone()),
        ("quantities", a.quantities.clone()),
        ("trials_pairwise", a.trials.clone()),
        ("trials_ser", a.trials.clone()),
        ("trials_pairwise", a.trials_pairwise.clone()),
        ("trials_ser", a.trials_ser.clone()),
        ("quad_order", a.quad_order.clone()),
        ("seed", a.seed.map(|v| v.to_string())),
        ("workers", a.workers.map(|v| v.to_string())),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            cfg.set(key, &v).map_err(|e| {
                Error::Config(format!(
                    "--{}: {}",
                    key.replace('_', "-").to_lowercase(),
                    strip_config(&e)
                ))
            })?;
        }
    }
    if let Some(v) = &a.euclidean_means {
        cfg.set("euclidean_means", v)?;
    }
    if let Some(p) = &a.out {
        cfg.out = Some(p.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn strip_config(e: &Error) -> String {
    match e {
        Error::Config(m) => m.clone(),
        other => other.to_string(),
    }
}

fn cmd_sweep(a: &SweepArgs) -> Result<String> {
    let cfg = sweep_config(a)?;
    let rows = run_sweep(&cfg)?;
    let csv = to_csv_string(&rows);
    match &cfg.out {
        Some(path) => {
            write_file(path, &csv)?;
            Ok(String::new())
        }
        None => Ok(csv),
    }
}

fn run(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Geometry(a) => cmd_geometry(a),
        Command::Pep(a) => cmd_pep(a),
        Command::SerBounds(a) => cmd_ser_bounds(a),
        Command::McPep(a) => cmd_mc_pep(a),
        Command::McSer(a) => cmd_mc_ser(a),
        Command::Sweep(a) => cmd_sweep(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
