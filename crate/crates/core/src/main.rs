use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use orbital_core::finite_decomp::{marginals_of, write_table, FactorizedPmf};
use orbital_core::group::frame::{check_frame, FrameDocument};
use orbital_core::linalg::Matrix;
use orbital_core::rankings::{
    finite_frame, fit, read_rankings, write_rankings, Metric, ModelDocument, Ranking, RankingFrame,
    VRule,
};
use orbital_core::rng::{stream, STREAM_RANKINGS, STREAM_STAR_RADIUS, STREAM_WISHART};
use orbital_core::starshaped::{Gauge, Radial, SignRule, StarShapedModel};
use orbital_core::stats::DEFAULT_ALPHA;
use orbital_core::verify::{verify_group, verify_rank, verify_star, verify_wishart, Manifest};
use orbital_core::wishart::{
    decompose, sample_pair, SymMatrix, WishartDecomposition, WishartParams,
};

#[derive(Parser)]
#[command(
    name = "orbital",
    version,
    about = "Hierarchical orbital decompositions and the distributions built on them"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Finite group frames.
    #[command(subcommand)]
    Group(GroupCommand),
    /// Three-part table of the ranking action `S_{2..m}` on `S_m`.
    Decompose(DecomposeArgs),
    /// Ranking models.
    #[command(subcommand)]
    Rank(RankCommand),
    /// Star-shaped distributions.
    #[command(subcommand)]
    Star(StarCommand),
    /// Two-sample Wishart pairs.
    #[command(subcommand)]
    Wishart(WishartCommand),
    /// Seeded statistical verification runs that write a JSON manifest.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Subcommand)]
enum GroupCommand {
    /// Check a JSON frame document and print the verdicts as JSON.
    CheckFrame {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct DecomposeArgs {
    #[arg(long)]
    m: usize,
    #[arg(long = "m-prime")]
    m_prime: usize,
    /// Ranking model JSON; the uniform law when absent.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Where to write the x,u,v,z,probability table (stdout when absent).
    #[arg(long)]
    table: Option<PathBuf>,
}

struct FrameArgs {
    m: usize,
    m_prime: Option<usize>,
    overrides: Vec<(usize, usize)>,
    v_rule: VRule,
}

impl FrameArgs {
    fn frame(&self) -> Result<RankingFrame> {
        let mut frame = RankingFrame::new(self.m)?.with_v_rule(self.v_rule);
        if let Some(mp) = self.m_prime {
            frame = frame.with_depth(mp)?;
        }
        for &(i0, j0) in &self.overrides {
            frame = frame.with_override(i0, j0)?;
        }
        Ok(frame)
    }
}

#[derive(Subcommand)]
enum RankCommand {
    /// Draw rankings from a model file.
    Sample {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Maximum-likelihood fit of θ and the top-object law.
    Fit {
        #[arg(long)]
        data: PathBuf,
        #[arg(long = "m-prime")]
        m_prime: Option<usize>,
        #[arg(long, default_value = "kendall")]
        metric: Metric,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Split each ranking into its parts.
    Decompose {
        #[arg(long)]
        data: PathBuf,
        #[arg(long = "m-prime")]
        m_prime: Option<usize>,
        #[arg(long = "override", value_parser = parse_override)]
        overrides: Vec<(usize, usize)>,
        #[arg(long = "v-rule", default_value = "increasing", value_parser = parse_v_rule)]
        v_rule: VRule,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct StarArgs {
    /// `l2`, `lq:<q>`, `ellipsoid:<matrix csv>` or `custom` (the mean of the l2 and l4 norms).
    #[arg(long, default_value = "l2")]
    gauge: String,
    /// `gaussian` or `exponential`.
    #[arg(long, default_value = "gaussian")]
    radial: String,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long)]
    p: usize,
    /// `last` (last nonzero coordinate positive) or `first`.
    #[arg(long = "sign-rule", default_value = "last")]
    sign_rule: String,
}

impl StarArgs {
    fn model(&self) -> Result<StarShapedModel> {
        let gauge = parse_gauge(&self.gauge, self.p)?;
        let radial: Radial = self.radial.parse()?;
        let rule = match self.sign_rule.as_str() {
            "last" => SignRule::LastNonzero,
            "first" => SignRule::FirstNonzero,
            other => bail!("--sign-rule: unknown rule {other:?}"),
        };
        Ok(StarShapedModel::new(gauge, rule, radial, self.c)?)
    }

    fn parameters(&self) -> serde_json::Value {
        json!({
            "gauge": self.gauge,
            "radial": self.radial,
            "c": self.c,
            "p": self.p,
            "sign_rule": self.sign_rule,
        })
    }
}

#[derive(Subcommand)]
enum StarCommand {
    /// Write `x_1..x_p, eps, h, z_1..z_p` rows.
    Sample {
        #[command(flatten)]
        model: StarArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print `c0` and the Lebesgue normalizer as JSON.
    Constant {
        #[command(flatten)]
        model: StarArgs,
    },
}

#[derive(Args, Clone)]
struct WishartArgs {
    #[arg(long)]
    p: usize,
    #[arg(long)]
    n1: f64,
    #[arg(long)]
    n2: f64,
    /// Row-major CSV of `Σ` without header; the identity when absent.
    #[arg(long)]
    sigma: Option<PathBuf>,
    #[arg(long = "N", default_value_t = 1000)]
    draws: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl WishartArgs {
    fn params(&self) -> Result<WishartParams> {
        let sigma = match &self.sigma {
            Some(path) => SymMatrix::from_matrix(&read_matrix(path)?)?,
            None => SymMatrix::identity(self.p),
        };
        Ok(WishartParams::from_df(self.p, self.n1, self.n2, sigma)?)
    }

    fn parameters(&self) -> serde_json::Value {
        json!({
            "p": self.p,
            "n1": self.n1,
            "n2": self.n2,
            "sigma": self.sigma.as_ref().map(|p| p.display().to_string()),
            "N": self.draws,
        })
    }
}

#[derive(Subcommand)]
enum WishartCommand {
    /// Write `w1_ij, w2_ij` (`i ≤ j`) rows of sampled pairs.
    Sample {
        #[command(flatten)]
        args: WishartArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write `t_ij, c_ij, lambda_i` rows, for sampled pairs or the pairs in `--input`.
    Decompose {
        #[command(flatten)]
        args: WishartArgs,
        /// CSV written by `wishart sample`.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Same as `verify wishart`.
    Verify {
        #[command(flatten)]
        args: WishartArgs,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum VerifyCommand {
    Star {
        #[command(flatten)]
        model: StarArgs,
        #[arg(long, default_value_t = 20_000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Wishart {
        #[command(flatten)]
        args: WishartArgs,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Rank {
        #[command(flatten)]
        model: RankModelArgs,
        #[arg(long, default_value_t = 20_000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact checks of the ranking action as a finite frame.
    Group {
        #[command(flatten)]
        model: RankModelArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct RankModelArgs {
    /// Model JSON; otherwise built from the flags below with a uniform top-object law.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, required_unless_present = "model")]
    m: Option<usize>,
    #[arg(long = "m-prime")]
    m_prime: Option<usize>,
    #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
    theta: f64,
    #[arg(long, default_value = "kendall")]
    metric: Metric,
}

impl RankModelArgs {
    fn document(&self) -> Result<ModelDocument> {
        if let Some(path) = &self.model {
            return read_model(path);
        }
        let m = self.m.context("--m is required without --model")?;
        Ok(ModelDocument {
            m,
            m_prime: self.m_prime,
            metric: self.metric,
            theta: self.theta,
            p_z: vec![1.0 / m as f64; m],
            rep_rule: "standings".into(),
            overrides: Vec::new(),
            v_rule: VRule::Increasing,
        })
    }
}

fn parse_override(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected i0,j0, got {s:?}"))?;
    let parse = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

fn parse_v_rule(s: &str) -> Result<VRule, String> {
    match s {
        "increasing" => Ok(VRule::Increasing),
        "decreasing" => Ok(VRule::Decreasing),
        other => Err(format!("unknown v-rule {other:?}")),
    }
}

fn parse_gauge(spec: &str, p: usize) -> Result<Gauge> {
    let (kind, arg) = match spec.split_once(':') {
        Some((k, a)) => (k, Some(a)),
        None => (spec, None),
    };
    let gauge = match (kind, arg) {
        ("l2", None) => Gauge::l2(p)?,
        ("lq", Some(q)) => Gauge::lq(
            p,
            q.parse()
                .with_context(|| format!("--gauge: bad exponent {q:?}"))?,
        )?,
        ("ellipsoid", Some(path)) => {
            let a = read_matrix(Path::new(path))?;
            if a.rows() != p {
                bail!(
                    "--gauge: ellipsoid matrix is {}x{}, expected {p}x{p}",
                    a.rows(),
                    a.cols()
                );
            }
            Gauge::ellipsoid(a)?
        }
        ("custom", None) => Gauge::mixed_l2_l4(p)?,
        _ => bail!("--gauge: expected l2, lq:<q>, ellipsoid:<file> or custom, got {spec:?}"),
    };
    Ok(gauge)
}

fn read_matrix(path: &Path) -> Result<Matrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let row = record
            .iter()
            .map(|v| {
                v.parse::<f64>()
                    .with_context(|| format!("{}: bad number {v:?}", path.display()))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(Matrix::from_rows(&rows)?)
}

fn read_model(path: &Path) -> Result<ModelDocument> {
    let file = File::open(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(serde_json::from_reader(io::BufReader::new(file))?)
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: serde::Serialize>(out: &Option<PathBuf>, value: &T) -> Result<()> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn one_line(images: &[usize]) -> String {
    images
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn emit_manifest(out: &Option<PathBuf>, manifest: &Manifest) -> Result<bool> {
    let mut w = sink(out)?;
    w.write_all(manifest.to_json().as_bytes())?;
    w.flush()?;
    for r in manifest.reports.iter().filter(|r| !r.pass) {
        eprintln!(
            "FAIL {}: statistic {} > critical {}",
            r.name, r.statistic, r.critical_value
        );
    }
    Ok(manifest.all_pass)
}

fn run_group(cmd: GroupCommand) -> Result<bool> {
    match cmd {
        GroupCommand::CheckFrame { file, out } => {
            let text = std::fs::read_to_string(&file)
                .with_context(|| format!("reading {}", file.display()))?;
            let doc: FrameDocument = serde_json::from_str(&text)?;
            let report = check_frame(&doc.resolve()?)?;
            write_json(&out, &report)?;
            Ok(report.consistent)
        }
    }
}

fn run_decompose(args: DecomposeArgs) -> Result<bool> {
    let doc = match &args.model {
        Some(path) => {
            let doc = read_model(path)?;
            if doc.m != args.m || doc.m_prime != Some(args.m_prime) {
                bail!(
                    "--model has m = {}, m_prime = {:?}; flags ask for {} and {}",
                    doc.m,
                    doc.m_prime,
                    args.m,
                    args.m_prime
                );
            }
            Some(doc)
        }
        None => None,
    };
    let frame = match &doc {
        Some(d) => d.frame()?,
        None => RankingFrame::new(args.m)?.with_depth(args.m_prime)?,
    };
    let hf = finite_frame(&frame)?;
    let probabilities: Vec<f64> = match &doc {
        Some(d) => {
            let model = d.to_model()?;
            hf.action()
                .labels()
                .iter()
                .map(|l| {
                    let ranks: Vec<usize> = l
                        .split(',')
                        .map(|x| x.parse().expect("numeric label"))
                        .collect();
                    model.pmf(&Ranking::new(&ranks)?)
                })
                .collect::<Result<_, _>>()?
        }
        None => FactorizedPmf::uniform(&hf).joint(&hf)?,
    };
    let residual = marginals_of(&hf, probabilities.clone())?.max_product_residual();
    let w = sink(&args.table)?;
    write_table(&hf, &probabilities, w)?;
    eprintln!("max |joint - product of marginals| = {residual:e}");
    Ok(true)
}

fn run_rank(cmd: RankCommand) -> Result<bool> {
    match cmd {
        RankCommand::Sample {
            model,
            n,
            seed,
            out,
        } => {
            let model = read_model(&model)?.to_model()?;
            let mut rng = stream(seed, STREAM_RANKINGS);
            let draws = model.sample(&mut rng, n)?;
            let mut w = sink(&out)?;
            write_rankings(&mut w, model.frame().m(), &draws)?;
            w.flush()?;
        }
        RankCommand::Fit {
            data,
            m_prime,
            metric,
            out,
        } => {
            let rankings = read_rankings(
                File::open(&data).with_context(|| format!("reading {}", data.display()))?,
            )?;
            let m = rankings
                .first()
                .map(Ranking::m)
                .context("no rankings in data file")?;
            let mut frame = RankingFrame::new(m)?;
            if let Some(mp) = m_prime {
                frame = frame.with_depth(mp)?;
            }
            let result = fit(&frame, metric, &rankings)?;
            if result.at_boundary {
                eprintln!("theta at the boundary of [-20, 0]");
            }
            if !result.bracket_unimodal {
                eprintln!("profile likelihood is not unimodal on the search grid");
            }
            write_json(
                &out,
                &json!({
                    "model": ModelDocument::from_model(&result.model),
                    "log_likelihood": result.log_likelihood,
                    "at_boundary": result.at_boundary,
                    "bracket_unimodal": result.bracket_unimodal,
                    "iterations": result.iterations,
                    "n": rankings.len(),
                }),
            )?;
        }
        RankCommand::Decompose {
            data,
            m_prime,
            overrides,
            v_rule,
            out,
        } => {
            let rankings = read_rankings(
                File::open(&data).with_context(|| format!("reading {}", data.display()))?,
            )?;
            let m = rankings
                .first()
                .map(Ranking::m)
                .context("no rankings in data file")?;
            let frame = FrameArgs {
                m,
                m_prime,
                overrides,
                v_rule,
            }
            .frame()?;
            let mut w = csv::Writer::from_writer(sink(&out)?);
            let mut header = vec!["ranking", "top_object", "representative", "tau"];
            if m_prime.is_some() {
                header.extend(["h", "t"]);
            }
            w.write_record(&header)?;
            for r in &rankings {
                let (tau, s) = frame.decompose2(r)?;
                let mut row = vec![
                    one_line(r.ranks()),
                    r.top_object().to_string(),
                    one_line(s.ranks()),
                    one_line(tau.images()),
                ];
                if m_prime.is_some() {
                    let (h, t, _) = frame.decompose3(r)?;
                    row.push(one_line(h.images()));
                    row.push(one_line(t.images()));
                }
                w.write_record(&row)?;
            }
            w.flush()?;
        }
    }
    Ok(true)
}

fn run_star(cmd: StarCommand) -> Result<bool> {
    match cmd {
        StarCommand::Sample {
            model,
            n,
            seed,
            out,
        } => {
            let p = model.p;
            let model = model.model()?;
            let mut rng = stream(seed, STREAM_STAR_RADIUS);
            let samples = model.sample(&mut rng, n)?;
            let mut w = csv::Writer::from_writer(sink(&out)?);
            let mut header: Vec<String> = (1..=p).map(|i| format!("x_{i}")).collect();
            header.extend(["eps".into(), "h".into()]);
            header.extend((1..=p).map(|i| format!("z_{i}")));
            w.write_record(&header)?;
            for s in &samples {
                let mut row: Vec<String> = s.x.iter().map(f64::to_string).collect();
                row.push(s.eps.to_string());
                row.push(s.h.to_string());
                row.extend(s.z.iter().map(f64::to_string));
                w.write_record(&row)?;
            }
            w.flush()?;
        }
        StarCommand::Constant { model } => {
            let c = model.model()?.normalizing_constant()?;
            write_json(&None, &c)?;
        }
    }
    Ok(true)
}

fn pair_header(p: usize) -> Vec<String> {
    let sep = if p > 9 { "_" } else { "" };
    let mut h = Vec::new();
    for w in ["w1", "w2"] {
        for i in 1..=p {
            for j in i..=p {
                h.push(format!("{w}_{i}{sep}{j}"));
            }
        }
    }
    h
}

fn read_pairs(path: &Path, p: usize) -> Result<Vec<(SymMatrix, SymMatrix)>> {
    let mut reader =
        csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    if reader.headers()?.iter().collect::<Vec<_>>() != pair_header(p) {
        bail!("{}: header does not match --p {p}", path.display());
    }
    let k = p * (p + 1) / 2;
    let mut out = Vec::new();
    for record in reader.records() {
        let values: Vec<f64> = record?
            .iter()
            .map(|v| v.parse::<f64>())
            .collect::<Result<_, _>>()?;
        let unpack = |vals: &[f64]| {
            let mut m = Matrix::zeros(p, p);
            let mut idx = 0;
            for i in 0..p {
                for j in i..p {
                    m[(i, j)] = vals[idx];
                    m[(j, i)] = vals[idx];
                    idx += 1;
                }
            }
            SymMatrix::from_matrix(&m)
        };
        out.push((unpack(&values[..k])?, unpack(&values[k..])?));
    }
    Ok(out)
}

fn run_wishart(cmd: WishartCommand) -> Result<bool> {
    match cmd {
        WishartCommand::Sample { args, out } => {
            let params = args.params()?;
            let p = args.p;
            let mut rng = stream(args.seed, STREAM_WISHART);
            let mut w = csv::Writer::from_writer(sink(&out)?);
            w.write_record(pair_header(p))?;
            for _ in 0..args.draws {
                let (w1, w2) = sample_pair(&params, &mut rng)?;
                let mut row = Vec::new();
                for m in [&w1, &w2] {
                    for i in 0..p {
                        for j in i..p {
                            row.push(m.get(i, j).to_string());
                        }
                    }
                }
                w.write_record(&row)?;
            }
            w.flush()?;
        }
        WishartCommand::Decompose { args, input, out } => {
            let pairs = match &input {
                Some(path) => read_pairs(path, args.p)?,
                None => {
                    let params = args.params()?;
                    let mut rng = stream(args.seed, STREAM_WISHART);
                    (0..args.draws)
                        .map(|_| sample_pair(&params, &mut rng))
                        .collect::<Result<_, _>>()?
                }
            };
            let mut w = csv::Writer::from_writer(sink(&out)?);
            w.write_record(WishartDecomposition::header(args.p))?;
            for (w1, w2) in &pairs {
                let d = decompose(w1, w2)?;
                w.write_record(d.row().iter().map(f64::to_string))?;
            }
            w.flush()?;
        }
        WishartCommand::Verify { args, alpha, out } => {
            return verify_wishart_cmd(&args, alpha, &out)
        }
    }
    Ok(true)
}

fn verify_wishart_cmd(args: &WishartArgs, alpha: f64, out: &Option<PathBuf>) -> Result<bool> {
    let params = args.params()?;
    let reports = verify_wishart(&params, args.draws, args.seed, alpha)?;
    let mut parameters = args.parameters();
    parameters["alpha"] = json!(alpha);
    emit_manifest(
        out,
        &Manifest::new("verify wishart", parameters, args.seed, reports),
    )
}

fn run_verify(cmd: VerifyCommand) -> Result<bool> {
    match cmd {
        VerifyCommand::Star {
            model,
            n,
            seed,
            alpha,
            out,
        } => {
            let reports = verify_star(&model.model()?, n, seed, alpha)?;
            let mut parameters = model.parameters();
            parameters["n"] = json!(n);
            parameters["alpha"] = json!(alpha);
            emit_manifest(
                &out,
                &Manifest::new("verify star", parameters, seed, reports),
            )
        }
        VerifyCommand::Wishart { args, alpha, out } => verify_wishart_cmd(&args, alpha, &out),
        VerifyCommand::Rank {
            model,
            n,
            seed,
            alpha,
            out,
        } => {
            let doc = model.document()?;
            let reports = verify_rank(&doc.to_model()?, n, seed, alpha)?;
            let parameters = json!({ "model": doc, "n": n, "alpha": alpha });
            emit_manifest(
                &out,
                &Manifest::new("verify rank", parameters, seed, reports),
            )
        }
        VerifyCommand::Group { model, seed, out } => {
            let doc = model.document()?;
            let reports = verify_group(&doc.to_model()?)?;
            let parameters = json!({ "model": doc });
            emit_manifest(
                &out,
                &Manifest::new("verify group", parameters, seed, reports),
            )
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Group(cmd) => run_group(cmd),
        Command::Decompose(args) => run_decompose(args),
        Command::Rank(cmd) => run_rank(cmd),
        Command::Star(cmd) => run_star(cmd),
        Command::Wishart(cmd) => run_wishart(cmd),
        Command::Verify(cmd) => run_verify(cmd),
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain()
        .filter_map(|c| c.downcast_ref::<io::Error>())
        .any(|io| io.kind() == io::ErrorKind::BrokenPipe)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
