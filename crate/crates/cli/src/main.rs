use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use lorentzcert::exactnum::{check_q, fmt_rational, parse_rational, Mode, Rational};
use lorentzcert::gen::{generate, GenParams};
use lorentzcert::io::{read_instance, to_canonical_string, to_pretty, Instance, InstanceFile};
use lorentzcert::poly::{is_lorentzian, LorentzianOptions};
use lorentzcert::setfn::{is_mnat_concave, is_valuated_matroid};
use lorentzcert::suite::{
    default_q_grid, load_corpus_dir, run_suite, RunConfig, SuiteSizes, CLAIMS,
};
use lorentzcert::symmat::is_psd;
use lorentzcert::trees::{
    a_matrix, c_t, certify_a_psd, classify, tree_psd_matrix, UltrametricTree, UpperSubtree,
};

#[derive(Parser)]
#[command(
    name = "lorentzcert",
    version,
    about = "Exact Lorentzian and PSD certificates"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Comma-separated values of q in (0, 1].
    #[arg(long, global = true, env = "LORENTZCERT_Q_GRID")]
    q_grid: Option<String>,
    /// exact or float.
    #[arg(long, global = true, env = "LORENTZCERT_MODE", default_value = "exact")]
    mode: String,
    #[arg(long, global = true, env = "LORENTZCERT_SEED", default_value_t = 0)]
    seed: u64,
    /// Bisection tolerance for c_T.
    #[arg(
        long,
        global = true,
        env = "LORENTZCERT_TOL",
        default_value = "1/1000000000"
    )]
    tol: String,
    /// Bound on the number of Hessians in a Lorentzian check.
    #[arg(long, global = true, env = "LORENTZCERT_CAP", default_value_t = lorentzcert::poly::DEFAULT_CAP)]
    cap: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an instance file and report its properties.
    Validate { path: PathBuf },
    /// Run one claim on generated instances, or on the given files.
    Check {
        claim: String,
        paths: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certificates for trees.
    Certify {
        #[command(subcommand)]
        what: CertifyCommand,
    },
    /// Bracket c_T for a radius-1 tree.
    Ct { path: PathBuf },
    /// Generate an instance.
    Gen {
        kind: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        vertices: Option<usize>,
        #[arg(long)]
        leaves: Option<usize>,
        #[arg(long)]
        span: Option<i64>,
        #[arg(long)]
        leaf_positive: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rewrite an instance file in canonical form.
    Convert {
        input: PathBuf,
        output: Option<PathBuf>,
    },
    /// Run the theorem suites.
    Suite {
        /// Comma-separated claims; all when omitted.
        #[arg(long)]
        claims: Option<String>,
        /// Directory holding instances/<kind>/*.json.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Fewer generated instances.
        #[arg(long)]
        small: bool,
    },
}

#[derive(Subcommand)]
enum CertifyCommand {
    /// PSD certificates for (1 - 1/n) 1 - D/2 and for A^{T,U}.
    TreePsd {
        path: PathBuf,
        /// Vertex ids of the upper subtree; the whole tree when omitted.
        #[arg(long, value_delimiter = ',')]
        upper: Option<Vec<u32>>,
        /// Rescale to radius 1 first.
        #[arg(long)]
        normalize: bool,
    },
}

/// Input problems exit with 2, failed verdicts with 1.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn config(g: &Global) -> Result<RunConfig, Failure> {
    let mode: Mode = g.mode.parse().map_err(Failure)?;
    let q_grid = match &g.q_grid {
        None => default_q_grid(),
        Some(list) => list
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| {
                let q = parse_rational(s)?;
                check_q(&q)?;
                Ok(q)
            })
            .collect::<Result<Vec<Rational>, Failure>>()?,
    };
    let tol = parse_rational(&g.tol)?;
    if tol <= Rational::from_integer(0.into()) {
        return Err(Failure("--tol must be positive".into()));
    }
    Ok(RunConfig {
        mode,
        q_grid,
        seed: g.seed,
        cap: g.cap,
        tol,
        ..RunConfig::default()
    })
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let cfg = config(&cli.global)?;
    match cli.command {
        Command::Validate { path } => validate(&read_instance(&path)?, &cfg),
        Command::Check { claim, paths, out } => {
            let mut cfg = RunConfig {
                claims: vec![claim],
                ..cfg
            };
            if !paths.is_empty() {
                cfg.sizes = SuiteSizes::none();
                cfg.pinned = false;
                for p in &paths {
                    cfg.corpus
                        .push((p.display().to_string(), read_instance(p)?));
                }
            }
            suite(&cfg, out.as_deref())
        }
        Command::Suite {
            claims,
            corpus,
            out,
            small,
        } => {
            let mut cfg = cfg;
            if let Some(list) = claims {
                cfg.claims = list
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(String::from)
                    .collect();
            }
            if small {
                cfg.sizes = SuiteSizes::small();
            }
            if let Some(dir) = corpus {
                cfg.corpus = load_corpus_dir(&dir)?;
            }
            suite(&cfg, out.as_deref())
        }
        Command::Certify {
            what:
                CertifyCommand::TreePsd {
                    path,
                    upper,
                    normalize,
                },
        } => {
            let mut t = tree(&read_instance(&path)?)?;
            if normalize {
                t = t.normalized()?;
            }
            certify_tree(&t, upper.as_deref())
        }
        Command::Ct { path } => {
            let t = tree(&read_instance(&path)?)?;
            let interval = c_t(&t, &cfg.tol)?;
            let out = json!({
                "n_leaves": t.n_leaves(),
                "bound": fmt_rational(&lorentzcert::trees::angle(t.n_leaves())),
                "interval": interval,
                "classification": classify(&t)?,
            });
            emit(&to_pretty(&out), None)?;
            Ok(0)
        }
        Command::Gen {
            kind,
            n,
            d,
            vertices,
            leaves,
            span,
            leaf_positive,
            out,
        } => {
            let params = GenParams {
                n,
                d,
                vertices,
                leaves,
                span,
                leaf_positive,
            };
            let file = generate(&kind, &params, cfg.seed)?;
            emit(&to_canonical_string(&file), out.as_deref())?;
            Ok(0)
        }
        Command::Convert { input, output } => {
            let file = read_instance(&input)?;
            emit(&to_canonical_string(&file), output.as_deref())?;
            Ok(0)
        }
    }
}

fn suite(cfg: &RunConfig, out: Option<&Path>) -> Result<u8, Failure> {
    for c in &cfg.claims {
        if !CLAIMS.contains(&c.as_str()) {
            return Err(Failure(format!(
                "unknown claim {c:?}; known claims: {}",
                CLAIMS.join(", ")
            )));
        }
    }
    let report = run_suite(cfg)?;
    emit(&report.to_json(), out)?;
    if report.cells.is_empty() {
        eprintln!("no cells: no instance applies to the selected claims");
    }
    for (claim, (ok, total)) in report.summary() {
        let tag = if ok == total { "ok" } else { "FAILED" };
        eprintln!("{claim}: {ok}/{total} {tag}");
    }
    for c in report.failures() {
        eprintln!(
            "failed: {} {} {} ({:?})",
            c.claim,
            c.instance,
            serde_json::to_string(&c.params).unwrap_or_default(),
            c.status
        );
    }
    Ok(report.exit_code() as u8)
}

fn tree(file: &InstanceFile) -> Result<UltrametricTree, Failure> {
    match &file.instance {
        Instance::Tree(t) => Ok(t.clone()),
        other => Err(Failure(format!(
            "expected a tree, got a {} instance",
            other.kind()
        ))),
    }
}

fn certify_tree(t: &UltrametricTree, upper: Option<&[u32]>) -> Result<u8, Failure> {
    let m = tree_psd_matrix(t);
    let cert = is_psd(&m);
    let u = match upper {
        Some(ids) => UpperSubtree::from_ids(t, ids)?,
        None => UpperSubtree::whole(t),
    };
    let a = a_matrix(t, &u)?;
    let labels: Vec<u32> = a.rows.iter().map(|&v| t.id(v)).collect();
    let reduction = certify_a_psd(t, &u)?;
    let replay = reduction.verify(&a.matrix, &labels);
    let a_psd = is_psd(&a.matrix);
    let ok = cert.is_psd() && cert.verify(&m) && a_psd.is_psd() && replay.is_ok();
    let rows: Vec<Vec<String>> = a
        .matrix
        .to_rows()
        .iter()
        .map(|r| r.iter().map(fmt_rational).collect())
        .collect();
    let out = json!({
        "n_leaves": t.n_leaves(),
        "tree_matrix": {"psd": cert.is_psd(), "certificate": cert},
        "a_matrix": {
            "labels": labels,
            "rows": rows,
            "psd": a_psd.is_psd(),
            "reduction": reduction,
            "replay": replay.err().map(|e| e.to_string()),
        },
    });
    emit(&to_pretty(&out), None)?;
    Ok(if ok { 0 } else { 1 })
}

fn validate(file: &InstanceFile, cfg: &RunConfig) -> Result<u8, Failure> {
    let mut out = serde_json::Map::new();
    out.insert("kind".into(), json!(file.instance.kind()));
    match &file.instance {
        Instance::SetFunction(f) => {
            let v = is_mnat_concave(f);
            out.insert("n".into(), json!(f.ground_size()));
            out.insert("domain_size".into(), json!(f.domain().count()));
            out.insert("integer_valued".into(), json!(f.is_integer_valued()));
            out.insert("mnat_concave".into(), json!(v.holds()));
            if let Some(w) = v.witness() {
                out.insert("witness".into(), serde_json::to_value(w)?);
            }
        }
        Instance::Valuated(v) => {
            let r = is_valuated_matroid(v);
            out.insert("n".into(), json!(v.ground_size()));
            out.insert("d".into(), json!(v.rank()));
            out.insert("valuated_matroid".into(), json!(r.holds()));
            if let Some(w) = r.witness() {
                out.insert("witness".into(), serde_json::to_value(w)?);
            }
        }
        Instance::Matroid(m) => {
            out.insert("n".into(), json!(m.ground_size()));
            out.insert("rank".into(), json!(m.matroid_rank()));
            out.insert("ik_counts".into(), json!(m.ik_counts()));
        }
        Instance::Tree(t) => {
            out.insert("n_leaves".into(), json!(t.n_leaves()));
            out.insert("radius".into(), json!(fmt_rational(t.radius())));
            if let Ok(c) = classify(t) {
                out.insert("classification".into(), serde_json::to_value(c)?);
            }
        }
        Instance::Poly(p) => {
            out.insert("nvars".into(), json!(p.nvars()));
            out.insert("degree".into(), json!(p.degree()));
            out.insert("terms".into(), json!(p.len()));
            let opts = LorentzianOptions {
                cap: cfg.cap,
                ..LorentzianOptions::default()
            };
            match is_lorentzian(p, &opts) {
                Ok(v) => {
                    out.insert("lorentzian".into(), json!(v.holds()));
                    if let Some(w) = v.witness() {
                        out.insert("witness".into(), serde_json::to_value(w)?);
                    }
                }
                Err(e) => {
                    out.insert("lorentzian".into(), Value::Null);
                    out.insert("lorentzian_error".into(), json!(e.to_string()));
                }
            }
        }
    }
    if let Some(p) = &file.provenance {
        out.insert("provenance".into(), p.clone());
    }
    emit(&to_pretty(&Value::Object(out)), None)?;
    Ok(0)
}
