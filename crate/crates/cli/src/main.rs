use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use tropwidth::acceptance::{self, CRITERIA};
use tropwidth::circuit::CircuitDoc;
use tropwidth::compat::{check_size_bound, randomized_cover_from_rectangle, Rectangle};
use tropwidth::dp::{compile_dst_pw_with_stats, compile_is_with_stats, compile_tsp_pw_with_stats};
use tropwidth::graph::{
    complete_digraph, count_formulas, decomposition_from_order, gen_dst_graph, gen_dtsp_graph, gen_is_graph,
    gen_tsp_graph, sample_nice_cycle, verify_path_decomposition, CountFamily, DecompositionDoc, GraphDoc,
};
use tropwidth::oracle::{enumerate_ham_cycles, enumerate_nice_cycles};
use tropwidth::rect::{check_rectangle_bound_dtsp, decompose_balanced, dtsp_designated, exhaustive_thin_check, sampled_thin_check};
use tropwidth::{
    build_matrix, compile_floyd_warshall, compile_held_karp, Circuit, CompileStats, Error, GraphInstance,
    PathDecomposition, Polynomial, Valuation, Variant, VariableId,
};

#[derive(Parser)]
#[command(name = "tropwidth", version, about = "Tropical circuits for pathwidth dynamic programs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Seed for every randomized step; required by randomized subcommands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Monomial-slot cap for polynomial extraction.
    #[arg(long, global = true, default_value_t = tropwidth::DEFAULT_CAP)]
    cap: usize,
    /// Time budget in seconds for exact searches.
    #[arg(long, global = true, default_value_t = 60.0)]
    budget: f64,
    /// Write the primary output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    /// G_k, the independent-set family.
    Is,
    /// G_{n,k}, directed.
    Dtsp,
    /// The undirected split of G_{n,k}.
    Tsp,
    /// H_{n,k}, directed.
    Dst,
    /// Complete digraph on n vertices.
    Complete,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Is,
    Tsp,
    Dtsp,
    Dst,
    HeldKarp,
    FloydWarshall,
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixKind {
    Bipartite,
    Clique,
}

impl MatrixKind {
    fn variant(self, k: usize) -> Variant {
        match self {
            MatrixKind::Bipartite => Variant::Bipartite(k),
            MatrixKind::Clique => Variant::Clique(k),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CoverMode {
    Exact,
    Greedy,
    Randomized,
}

#[derive(Clone, Copy, ValueEnum)]
enum CountArg {
    DtspCycles,
    DstSequences,
    DstNiceCycles,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a graph family with its path decomposition.
    Gen {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Compile a dynamic program into a circuit.
    Compile {
        #[arg(value_enum)]
        target: Target,
        /// Graph file (a `gen` bundle or a bare graph).
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        decomposition: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        /// 1-based source vertex for Floyd–Warshall.
        #[arg(long)]
        source: Option<usize>,
        /// 1-based target vertex for Floyd–Warshall.
        #[arg(long)]
        sink: Option<usize>,
        /// Print compilation statistics as JSON on standard error.
        #[arg(long)]
        stats: bool,
    },
    /// Evaluate a circuit on a valuation file or on random weights.
    Eval {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        valuation: Option<PathBuf>,
        #[arg(long)]
        random: bool,
        #[arg(long, default_value_t = -50, allow_hyphen_values = true)]
        lo: i64,
        #[arg(long, default_value_t = 50)]
        hi: i64,
    },
    /// Expand the polynomial a circuit computes.
    Extract {
        #[arg(long)]
        circuit: PathBuf,
    },
    /// Check whether two circuits compute the same polynomial.
    Equiv { left: PathBuf, right: PathBuf },
    /// Balanced rectangle decomposition of a homogeneous circuit.
    Decompose {
        #[arg(long)]
        circuit: PathBuf,
        /// Designated variables, comma separated.
        #[arg(long, value_delimiter = ',')]
        x: Vec<String>,
        /// Designate the whole support.
        #[arg(long)]
        x_all: bool,
    },
    /// Print a compatibility matrix.
    Matrix {
        #[arg(long, value_enum)]
        variant: MatrixKind,
        #[arg(long)]
        k: usize,
    },
    /// Rectangle cover of a compatibility matrix.
    Cover {
        #[arg(long, value_enum)]
        matrix: MatrixKind,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = CoverMode::Exact)]
        mode: CoverMode,
    },
    /// Closed-form structure counts, optionally checked by enumeration.
    Count {
        #[arg(long, value_enum)]
        family: CountArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        enumerate: bool,
    },
    /// Sample nice cycles of H_{n,k}.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        samples: usize,
    },
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Run the acceptance suite and print a pass/fail table.
    Repro {
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Check a path decomposition and report its width.
    Decomposition {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        decomposition: Option<PathBuf>,
    },
    /// Check that a file of rectangles covers a compatibility matrix.
    Cover {
        #[arg(long, value_enum)]
        matrix: MatrixKind,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        cover: PathBuf,
    },
    /// Thin-rectangle checks in G_k.
    Thinness {
        #[arg(long)]
        k: usize,
        /// Extra sampled rectangles; needs --seed.
        #[arg(long, default_value_t = 0)]
        samples: u64,
    },
    /// Rectangle size bounds for the matrices and, with --n, for DTSP on G_{n,k}.
    Bounds {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: Option<usize>,
    },
}

enum CliError {
    Usage(String),
    Verify(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Usage(format!("malformed JSON: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Verify(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_scale() {
                3
            } else if is_input_error(&e) {
                2
            } else {
                1
            })
        }
    }
}

fn is_input_error(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidParams(_)
            | Error::InvalidK(_)
            | Error::InvalidSpec(_)
            | Error::InvalidCircuit(_)
            | Error::InvalidPermutation(_)
            | Error::IndexOutOfRange { .. }
            | Error::MissingVariable(_)
            | Error::DomainMismatch(..)
            | Error::Json(_)
    )
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn emit(cli: &Cli, text: &str) -> CliResult<()> {
    match &cli.out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = io::stdout().lock();
            let res = out.write_all(text.as_bytes()).and_then(|_| if text.ends_with('\n') { Ok(()) } else { out.write_all(b"\n") });
            match res {
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(CliError::Usage(format!("cannot write output: {e}"))),
                _ => Ok(()),
            }
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(v)?)
}

fn need_seed(cli: &Cli, what: &str) -> CliResult<u64> {
    cli.seed.ok_or_else(|| CliError::Usage(format!("{what} is randomized and needs --seed")))
}

fn unsupported(format: Format, what: &str) -> CliError {
    let name = match format {
        Format::Json => "json",
        Format::Csv => "csv",
        Format::Dot => "dot",
    };
    CliError::Usage(format!("--format {name} is not available for {what}"))
}

fn need<T>(v: Option<T>, flag: &str, what: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::Usage(format!("{what} needs {flag}")))
}

/// Reads a graph from a `gen` bundle or a bare graph document; the
/// decomposition comes from the bundle, `--decomposition`, or the natural
/// vertex order, in that order of preference.
fn load_graph(path: &Path, decomposition: Option<&PathBuf>) -> CliResult<(GraphInstance, PathDecomposition)> {
    let v: Value = serde_json::from_str(&read(path)?)?;
    let (graph_doc, bundled) = match v.get("graph") {
        Some(g) => (g.clone(), v.get("decomposition").cloned()),
        None => (v, None),
    };
    let g = GraphInstance::from_doc(&serde_json::from_value::<GraphDoc>(graph_doc)?)?;
    let doc: Option<DecompositionDoc> = match (decomposition, bundled) {
        (Some(p), _) => Some(serde_json::from_str(&read(p)?)?),
        (None, Some(b)) => Some(serde_json::from_value(b)?),
        (None, None) => None,
    };
    let d = match doc {
        Some(doc) => PathDecomposition::from_doc(&g, &doc)?,
        None => decomposition_from_order(&g, &(0..g.vertex_count()).collect::<Vec<_>>())?,
    };
    Ok((g, d))
}

fn load_circuit(path: &Path) -> CliResult<Circuit> {
    let doc: CircuitDoc = serde_json::from_str(&read(path)?)?;
    Ok(Circuit::from_doc(&doc)?)
}

fn poly_csv(p: &Polynomial) -> String {
    let mut s = String::from("monomial\n");
    for m in p.iter() {
        let _ = writeln!(s, "{m}");
    }
    s
}

fn run(cli: &Cli) -> CliResult<()> {
    match &cli.cmd {
        Cmd::Gen { family, k, n } => gen(cli, *family, *k, *n),
        Cmd::Compile { target, graph, decomposition, n, source, sink, stats } => {
            let (circuit, st): (Circuit, Option<CompileStats>) = match target {
                Target::Is | Target::Tsp | Target::Dtsp | Target::Dst => {
                    let path = need(graph.as_ref(), "--graph", "this target")?;
                    let (g, d) = load_graph(path, decomposition.as_ref())?;
                    let (c, s) = match target {
                        Target::Is => compile_is_with_stats(&g, &d)?,
                        Target::Tsp => compile_tsp_pw_with_stats(&g, &d, false)?,
                        Target::Dtsp => compile_tsp_pw_with_stats(&g, &d, true)?,
                        _ => compile_dst_pw_with_stats(&g, &d)?,
                    };
                    (c, Some(s))
                }
                Target::HeldKarp => (compile_held_karp(need(*n, "--n", "held-karp")?)?, None),
                Target::FloydWarshall => {
                    let n = need(*n, "--n", "floyd-warshall")?;
                    let (s, t) = (need(*source, "--source", "floyd-warshall")?, need(*sink, "--sink", "floyd-warshall")?);
                    if s == 0 || t == 0 {
                        return Err(CliError::Usage("--source and --sink are 1-based".into()));
                    }
                    (compile_floyd_warshall(n, s - 1, t - 1)?, None)
                }
            };
            if *stats {
                let s = st.unwrap_or(CompileStats { gates: circuit.size(), ..Default::default() });
                eprintln!("{}", serde_json::to_string(&s)?);
            }
            match cli.format {
                Format::Json => emit(cli, &to_json(&circuit.to_doc())?),
                Format::Dot => emit(cli, &circuit.to_dot()),
                Format::Csv => Err(unsupported(cli.format, "circuits")),
            }
        }
        Cmd::Eval { circuit, valuation, random, lo, hi } => {
            let c = load_circuit(circuit)?;
            let v: Valuation = match (valuation, random) {
                (Some(p), false) => serde_json::from_str(&read(p)?)?,
                (None, true) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(need_seed(cli, "eval --random")?);
                    Valuation::random(c.universe().iter().cloned(), *lo, *hi, &mut rng)
                }
                _ => return Err(CliError::Usage("give exactly one of --valuation and --random".into())),
            };
            let value = c.evaluate(&v)?;
            match cli.format {
                Format::Json => emit(cli, &to_json(&json!({ "value": value }))?),
                Format::Csv => emit(cli, &format!("value\n{value}\n")),
                Format::Dot => Err(unsupported(cli.format, "eval")),
            }
        }
        Cmd::Extract { circuit } => {
            let p = load_circuit(circuit)?.extract_polynomial(cli.cap)?;
            match cli.format {
                Format::Json => emit(cli, &to_json(&p)?),
                Format::Csv => emit(cli, &poly_csv(&p)),
                Format::Dot => Err(unsupported(cli.format, "extract")),
            }
        }
        Cmd::Equiv { left, right } => {
            let (a, b) = (load_circuit(left)?, load_circuit(right)?);
            let equivalent = b.calculates(&a.extract_polynomial(cli.cap)?, cli.cap)?;
            emit(cli, &to_json(&json!({ "equivalent": equivalent }))?)?;
            if equivalent {
                Ok(())
            } else {
                Err(CliError::Verify("circuits compute different polynomials".into()))
            }
        }
        Cmd::Decompose { circuit, x, x_all } => {
            let c = load_circuit(circuit)?;
            let xs: Vec<VariableId> = if *x_all {
                c.extract_polynomial(cli.cap)?.support().into_iter().collect()
            } else if x.is_empty() {
                return Err(CliError::Usage("decompose needs --x or --x-all".into()));
            } else {
                x.iter().map(VariableId::new).collect()
            };
            let rects = decompose_balanced(&c, &xs, cli.cap).map_err(|e| match e {
                Error::NotBalanced(m) => CliError::Verify(m),
                other => CliError::Core(other),
            })?;
            match cli.format {
                Format::Json => emit(cli, &to_json(&json!({ "gates": c.size(), "designated": xs, "rectangles": rects }))?),
                Format::Csv => {
                    let mut s = String::from("gate,g_monomials,h_monomials,product\n");
                    for r in &rects {
                        let _ = writeln!(s, "{},{},{},{}", r.gate.unwrap_or_default(), r.g.len(), r.h.len(), r.product().len());
                    }
                    emit(cli, &s)
                }
                Format::Dot => Err(unsupported(cli.format, "decompose")),
            }
        }
        Cmd::Matrix { variant, k } => {
            let m = build_matrix(variant.variant(*k))?;
            let dense = m.to_dense();
            match cli.format {
                Format::Json => {
                    let indices: Vec<Vec<usize>> = m.indices().iter().map(|p| p.one_based()).collect();
                    emit(cli, &to_json(&json!({ "variant": m.variant(), "indices": indices, "matrix": dense }))?)
                }
                Format::Csv => {
                    let mut s = String::new();
                    for row in dense {
                        let cells: Vec<String> = row.iter().map(u8::to_string).collect();
                        let _ = writeln!(s, "{}", cells.join(","));
                    }
                    emit(cli, &s)
                }
                Format::Dot => Err(unsupported(cli.format, "matrix")),
            }
        }
        Cmd::Cover { matrix, k, mode } => cover(cli, *matrix, *k, *mode),
        Cmd::Count { family, n, k, enumerate } => {
            let fam = match family {
                CountArg::DtspCycles => CountFamily::DtspCycles,
                CountArg::DstSequences => CountFamily::DstSequences,
                CountArg::DstNiceCycles => CountFamily::DstNiceCycles,
            };
            let formula = count_formulas(fam, *n, *k)?;
            let enumerated = if *enumerate {
                Some(match fam {
                    CountFamily::DtspCycles => enumerate_ham_cycles(&gen_dtsp_graph(*n, *k)?.0)?.len() as u128,
                    CountFamily::DstNiceCycles => enumerate_nice_cycles(*n, *k)?.len() as u128,
                    CountFamily::DstSequences => enumerate_nice_cycles(*n, *k)?.len() as u128 / 2,
                })
            } else {
                None
            };
            match cli.format {
                Format::Json => emit(cli, &to_json(&json!({ "family": fam, "n": n, "k": k, "count": formula, "enumerated": enumerated }))?)?,
                Format::Csv => emit(
                    cli,
                    &format!("n,k,count,enumerated\n{n},{k},{formula},{}\n", enumerated.map_or(String::new(), |e| e.to_string())),
                )?,
                Format::Dot => return Err(unsupported(cli.format, "count")),
            }
            match enumerated {
                Some(e) if e != formula => Err(CliError::Verify(format!("enumeration found {e}, formula gives {formula}"))),
                _ => Ok(()),
            }
        }
        Cmd::Sample { n, k, samples } => {
            let mut rng = ChaCha8Rng::seed_from_u64(need_seed(cli, "sample")?);
            let (g, _) = gen_dst_graph(*n, *k)?;
            let cycles = (0..*samples)
                .map(|_| Ok(sample_nice_cycle(*n, *k, &mut rng)?.iter().map(|&v| g.name(v).to_string()).collect()))
                .collect::<CliResult<Vec<Vec<String>>>>()?;
            match cli.format {
                Format::Json => emit(cli, &to_json(&cycles)?),
                Format::Csv => emit(cli, &cycles.iter().map(|c| c.join(",")).collect::<Vec<_>>().join("\n")),
                Format::Dot => Err(unsupported(cli.format, "sample")),
            }
        }
        Cmd::Verify(v) => verify(cli, v),
        Cmd::Repro { only } => {
            let ids: Vec<u8> = if only.is_empty() { CRITERIA.iter().map(|c| c.0).collect() } else { only.clone() };
            let reports: Vec<_> = ids
                .iter()
                .map(|&id| {
                    let r = acceptance::run(id);
                    eprintln!("{r}");
                    r
                })
                .collect();
            match cli.format {
                Format::Json => emit(cli, &to_json(&reports)?)?,
                Format::Csv => {
                    let mut s = String::from("criterion,status,seconds,name\n");
                    for r in &reports {
                        let _ = writeln!(s, "{},{},{:.3},{}", r.id, if r.passed { "PASS" } else { "FAIL" }, r.seconds, r.name);
                    }
                    emit(cli, &s)?;
                }
                Format::Dot => return Err(unsupported(cli.format, "repro")),
            }
            let failed: Vec<u8> = reports.iter().filter(|r| !r.passed).map(|r| r.id).collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Verify(format!("criteria {failed:?} failed")))
            }
        }
    }
}

fn gen(cli: &Cli, family: Family, k: usize, n: Option<usize>) -> CliResult<()> {
    let (g, d) = match family {
        Family::Is => {
            let gk = gen_is_graph(k)?;
            (gk.graph, gk.decomposition)
        }
        Family::Dtsp => gen_dtsp_graph(need(n, "--n", "this family")?, k)?,
        Family::Tsp => gen_tsp_graph(need(n, "--n", "this family")?, k)?,
        Family::Dst => gen_dst_graph(need(n, "--n", "this family")?, k)?,
        Family::Complete => {
            let g = complete_digraph(need(n, "--n", "this family")?)?;
            let d = PathDecomposition::new(vec![(0..g.vertex_count()).collect()]);
            (g, d)
        }
    };
    match cli.format {
        Format::Json => emit(cli, &to_json(&json!({ "graph": g.to_doc(), "decomposition": d.to_doc(&g) }))?),
        Format::Dot => emit(cli, &g.to_dot()),
        Format::Csv => {
            let mut s = String::from("from,to\n");
            for &(u, v) in g.edges() {
                let _ = writeln!(s, "{},{}", g.name(u), g.name(v));
            }
            emit(cli, &s)
        }
    }
}

fn cover(cli: &Cli, matrix: MatrixKind, k: usize, mode: CoverMode) -> CliResult<()> {
    let m = build_matrix(matrix.variant(k))?;
    let (rects, optimal, covers) = match mode {
        CoverMode::Exact => {
            let r = m.min_cover(Duration::from_secs_f64(cli.budget))?;
            (r.rectangles, Some(r.optimal), true)
        }
        CoverMode::Greedy => (m.greedy_cover()?, None, true),
        CoverMode::Randomized => {
            let seed = need_seed(cli, "cover --mode randomized")?;
            let r = randomized_cover_from_rectangle(&m, &m.max_rectangle()?, seed)?;
            (r.rectangles, None, r.covers)
        }
    };
    match cli.format {
        Format::Json => emit(
            cli,
            &to_json(&json!({
                "variant": m.variant(),
                "size": rects.len(),
                "optimal": optimal,
                "covers": covers,
                "rectangles": rects,
            }))?,
        ),
        Format::Csv => {
            let mut s = String::from("rectangle,rows,cols\n");
            for (i, r) in rects.iter().enumerate() {
                let join = |xs: &[usize]| xs.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
                let _ = writeln!(s, "{i},{},{}", join(&r.rows), join(&r.cols));
            }
            emit(cli, &s)
        }
        Format::Dot => Err(unsupported(cli.format, "cover")),
    }
}

fn verify(cli: &Cli, v: &VerifyCmd) -> CliResult<()> {
    match v {
        VerifyCmd::Decomposition { graph, decomposition } => {
            let (g, d) = load_graph(graph, decomposition.as_ref())?;
            match verify_path_decomposition(&g, &d) {
                Ok(width) => emit(cli, &to_json(&json!({ "valid": true, "width": width, "bags": d.bags.len() }))?),
                Err(violations) => {
                    emit(cli, &to_json(&json!({ "valid": false, "violations": violations }))?)?;
                    Err(CliError::Verify(format!("{} violations", violations.len())))
                }
            }
        }
        VerifyCmd::Cover { matrix, k, cover } => {
            let m = build_matrix(matrix.variant(*k))?;
            let v: Value = serde_json::from_str(&read(cover)?)?;
            let rects: Vec<Rectangle> = serde_json::from_value(v.get("rectangles").cloned().unwrap_or(v))?;
            let ok = m.is_cover(&rects)?;
            emit(cli, &to_json(&json!({ "covers": ok, "size": rects.len() }))?)?;
            if ok {
                Ok(())
            } else {
                Err(CliError::Verify("rectangles do not cover every 1-entry".into()))
            }
        }
        VerifyCmd::Thinness { k, samples } => {
            let ex = exhaustive_thin_check(*k)?;
            let sampled = if *samples > 0 { Some(sampled_thin_check(*k, *samples, need_seed(cli, "sampled thinness")?)?) } else { None };
            let violations = ex.violations + sampled.as_ref().map_or(0, |s| s.violations);
            emit(cli, &to_json(&json!({ "exhaustive": ex, "sampled": sampled }))?)?;
            if violations == 0 {
                Ok(())
            } else {
                Err(CliError::Verify(format!("{violations} rectangles are not thin")))
            }
        }
        VerifyCmd::Bounds { k, n } => {
            let cover = build_matrix(Variant::Bipartite(*k))?.min_cover(Duration::from_secs_f64(cli.budget))?;
            let ck = cover.len();
            let mut ok = true;
            let mut reports = vec![];
            for variant in [Variant::Bipartite(*k), Variant::Clique(*k)] {
                let rep = check_size_bound(&build_matrix(variant)?, ck)?;
                ok &= rep.holds;
                reports.push(serde_json::to_value(rep)?);
            }
            let mut dtsp = vec![];
            if let Some(n) = n {
                let (g, d) = gen_dtsp_graph(*n, *k)?;
                let c = tropwidth::compile_tsp_pw(&g, &d, true)?;
                let rects = decompose_balanced(&c, &dtsp_designated(&g, *n, *k), cli.cap)?;
                for r in &rects {
                    let rep = check_rectangle_bound_dtsp(r, *n, *k, ck)?;
                    ok &= rep.ok();
                    dtsp.push(rep);
                }
            }
            emit(
                cli,
                &to_json(&json!({ "ck": ck, "ck_optimal": cover.optimal, "matrices": reports, "dtsp_rectangles": dtsp }))?,
            )?;
            if ok {
                Ok(())
            } else {
                Err(CliError::Verify("a rectangle bound is violated".into()))
            }
        }
    }
}
