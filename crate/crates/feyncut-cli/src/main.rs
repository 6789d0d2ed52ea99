//! Batch command-line front end for the feyncut library: parse graph files,
//! dispatch to the library modules and serialize JSON/text/DOT output
//! deterministically.  Exit codes: 0 success, 2 validation error, 3
//! identity-check failure.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use feyncut::algebra::{Gen, GenKind, GraphSum, Monomial, Rat, TensorSum};
use feyncut::coint;
use feyncut::cut::{GraphForestPair, PreCutGraph};
use feyncut::dse;
use feyncut::graph::EdgeSet;
use feyncut::hopf;
use feyncut::json as gjson;
use feyncut::necklace;
use feyncut::symanzik;
use feyncut::FeynError;

#[derive(Parser)]
#[command(
    name = "feyncut",
    about = "Hopf-algebraic and cointeraction structure of Feynman graphs \
             with Cutkosky cuts",
    version
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for property sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct GraphArg {
    /// Path to a graph file (JSON).
    #[arg(long)]
    graph: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algebra {
    Core,
    N,
    #[value(name = "pC", alias = "pc")]
    PC,
    #[value(name = "GF", alias = "gf")]
    GF,
    #[value(name = "GT", alias = "gt")]
    GT,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DseCheck {
    Graphins,
    Coprod,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and validate a graph file.
    Validate(GraphArg),
    /// Classify a (pre-)cut graph: core, cut, Cutkosky, pre-Cutkosky or pre-cut.
    Classify(GraphArg),
    /// A coproduct of the graph.
    Coprod {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long, value_enum, default_value_t = Algebra::Core)]
        algebra: Algebra,
        /// Drop the primitive part (reduced coproduct).
        #[arg(long)]
        reduced: bool,
        /// Project to normal vertex cuts (pC only).
        #[arg(long)]
        normal_cuts: bool,
        /// Allowed valences for the N algebra, e.g. 3,4.
        #[arg(long, value_delimiter = ',')]
        valences: Vec<usize>,
        /// Spanning tree (GT), e.g. e2,e3.
        #[arg(long)]
        tree: Option<String>,
        /// Forest (GF/GT), e.g. e2 (may be empty).
        #[arg(long)]
        forest: Option<String>,
    },
    /// The antipode of the graph.
    Antipode {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long, value_enum, default_value_t = Algebra::Core)]
        algebra: Algebra,
        /// Allowed valences for the N algebra, e.g. 3,4.
        #[arg(long, value_delimiter = ',')]
        valences: Vec<usize>,
    },
    /// Spanning-tree count spt (and spt·|Γ|!).
    Spt(GraphArg),
    /// Spanning forests with k components.
    Forests {
        #[command(flatten)]
        graph: GraphArg,
        /// Number of components (1 = spanning trees).
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// One-loop necklaces: core words for --ext, cut necklaces for --partition.
    Necklaces {
        /// Number of external legs (core necklaces).
        #[arg(long)]
        ext: Option<usize>,
        /// External leg partition, e.g. 1,1 (cut necklaces).
        #[arg(long, value_delimiter = ',')]
        partition: Vec<usize>,
    },
    /// Galois conjugates of (Γ, T).
    Galois {
        #[command(flatten)]
        graph: GraphArg,
        /// Spanning tree, e.g. e2,e3.
        #[arg(long)]
        tree: String,
    },
    /// Check the cointeraction identities on the incidence bialgebra of (Γ, T).
    CointCheck {
        #[command(flatten)]
        graph: GraphArg,
        /// Spanning tree, e.g. e2,e3.
        #[arg(long)]
        tree: String,
        /// Loop edges whose tadpoles are forbidden, e.g. e1.
        #[arg(long)]
        massless_edges: Option<String>,
    },
    /// The combinatorial Galois pairing (sum over spanning trees).
    Pairing {
        #[command(flatten)]
        graph: GraphArg,
        /// Forbid fully contracted (tadpole) terms.
        #[arg(long)]
        forbid_tadpoles: bool,
    },
    /// Combinatorial Green function series, or an identity check.
    Dse {
        /// Number of external legs (single-part target).
        #[arg(long)]
        target: Option<usize>,
        /// External leg partition for cut targets, e.g. 1,2.
        #[arg(long, value_delimiter = ',')]
        partition: Vec<usize>,
        /// Loop order.
        #[arg(long, default_value_t = 2)]
        loops: usize,
        /// Allowed vertex valences, e.g. 3,4.
        #[arg(long, value_delimiter = ',', default_value = "3,4")]
        degrees: Vec<usize>,
        /// Run a dual-route identity check instead of printing the series.
        #[arg(long, value_enum)]
        check: Option<DseCheck>,
    },
    /// The cut matrix of a graph, or of the Green function.
    Matrix {
        /// Path to a graph file (JSON).
        #[arg(long)]
        graph: Option<String>,
        /// Number of external legs (Green function matrix).
        #[arg(long)]
        ext: Option<usize>,
        #[arg(long, default_value_t = 2)]
        loops: usize,
        #[arg(long, value_delimiter = ',', default_value = "3,4")]
        degrees: Vec<usize>,
    },
    /// The first (and optionally second) Symanzik polynomial.
    Symanzik {
        #[command(flatten)]
        graph: GraphArg,
        /// Also print the second Symanzik polynomial.
        #[arg(long)]
        second: bool,
        /// Massive edges, e.g. e1,e3 (default: edges with `edge_masses`).
        #[arg(long)]
        masses: Option<String>,
    },
    /// Count renormalization-free sectors.
    Sectors(GraphArg),
    /// Graphviz DOT output (cut edges dashed).
    Dot(GraphArg),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(CliError::Invalid(msg)) => {
            println!("{msg}");
            ExitCode::from(2)
        }
        Err(CliError::CheckFailed(msg)) => {
            println!("{msg}");
            ExitCode::from(3)
        }
    }
}

enum CliError {
    Invalid(String),
    CheckFailed(String),
}

impl From<FeynError> for CliError {
    fn from(e: FeynError) -> Self {
        CliError::Invalid(error_line(&e))
    }
}

/// Renders an error as `VariantName: message`.
fn error_line(e: &FeynError) -> String {
    let dbg = format!("{e:?}");
    let name = dbg
        .split(|c: char| c == '(' || c == ' ' || c == '{')
        .next()
        .unwrap_or("Invalid");
    format!("{name}: {e}")
}

type Out = Result<String, CliError>;

fn run(cli: &Cli) -> Out {
    match &cli.cmd {
        Cmd::Validate(g) => validate(cli, g),
        Cmd::Classify(g) => classify(cli, g),
        Cmd::Coprod {
            graph,
            algebra,
            reduced,
            normal_cuts,
            valences,
            tree,
            forest,
        } => coprod(
            cli,
            graph,
            *algebra,
            *reduced,
            *normal_cuts,
            valences,
            tree.as_deref(),
            forest.as_deref(),
        ),
        Cmd::Antipode { graph, algebra, valences } => {
            antipode(cli, graph, *algebra, valences)
        }
        Cmd::Spt(g) => spt(cli, g),
        Cmd::Forests { graph, k } => forests(cli, graph, *k),
        Cmd::Necklaces { ext, partition } => necklaces(cli, *ext, partition),
        Cmd::Galois { graph, tree } => galois(cli, graph, tree),
        Cmd::CointCheck { graph, tree, massless_edges } => {
            coint_check(cli, graph, tree, massless_edges.as_deref())
        }
        Cmd::Pairing { graph, forbid_tadpoles } => {
            pairing(cli, graph, *forbid_tadpoles)
        }
        Cmd::Dse { target, partition, loops, degrees, check } => {
            dse_cmd(cli, *target, partition, *loops, degrees, *check)
        }
        Cmd::Matrix { graph, ext, loops, degrees } => {
            matrix(cli, graph.as_deref(), *ext, *loops, degrees)
        }
        Cmd::Symanzik { graph, second, masses } => {
            symanzik_cmd(cli, graph, *second, masses.as_deref())
        }
        Cmd::Sectors(g) => sectors(cli, g),
        Cmd::Dot(g) => dot(cli, g),
    }
}

// ---------------------------------------------------------------------------
// Input helpers
// ---------------------------------------------------------------------------

fn load(path: &str) -> Result<gjson::GraphFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Invalid(format!("Io: cannot read {path}: {e}")))?;
    Ok(gjson::parse(&text)?)
}

/// Parses an edge list such as `e2,e3` (1-based names) or `1,2` (0-based
/// indices) against a graph with `n` edges.
fn edge_list(s: &str, n: usize) -> Result<EdgeSet, CliError> {
    let mut out = EdgeSet::new();
    for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let ix = if let Some(num) = tok.strip_prefix('e') {
            let k: usize = num.parse().map_err(|_| bad_edge(tok))?;
            k.checked_sub(1).ok_or_else(|| bad_edge(tok))?
        } else {
            tok.parse().map_err(|_| bad_edge(tok))?
        };
        if ix >= n {
            return Err(CliError::Invalid(format!(
                "NoSuchEdge: edge {tok} is out of range (graph has {n} edges)"
            )));
        }
        out.insert(ix);
    }
    Ok(out)
}

fn bad_edge(tok: &str) -> CliError {
    CliError::Invalid(format!("Invalid: cannot parse edge name {tok:?}"))
}

fn ename(ix: usize) -> String {
    format!("e{}", ix + 1)
}

// ---------------------------------------------------------------------------
// Rendering helpers
// ---------------------------------------------------------------------------

fn gen_value(g: &Gen) -> Value {
    match &g.kind {
        GenKind::Core(gr) => gjson::to_value(&gjson::GraphFile {
            precut: PreCutGraph::core(gr.clone()),
            masses: BTreeMap::new(),
        }),
        GenKind::PreCut(p) => gjson::to_value(&gjson::GraphFile {
            precut: p.clone(),
            masses: BTreeMap::new(),
        }),
        GenKind::Pair(p) => json!({
            "graph": gjson::to_value(&gjson::GraphFile {
                precut: PreCutGraph::core(p.graph.clone()),
                masses: BTreeMap::new(),
            }),
            "forest": p.forest.iter().map(|&e| ename(e)).collect::<Vec<_>>(),
        }),
    }
}

fn gen_str(g: &Gen) -> String {
    serde_json::to_string(&gen_value(g)).expect("serialization succeeds")
}

fn mono_values(m: &Monomial) -> Vec<Value> {
    m.gens().iter().map(gen_value).collect()
}

fn mono_str(m: &Monomial) -> String {
    if m.gens().is_empty() {
        "I".into()
    } else {
        m.gens().iter().map(gen_str).collect::<Vec<_>>().join(" * ")
    }
}

fn rat_str(c: &Rat) -> String {
    c.to_string()
}

fn tensor_out(cli: &Cli, t: &TensorSum) -> String {
    match cli.format {
        Format::Json => {
            let terms: Vec<Value> = t
                .terms()
                .map(|(legs, c)| {
                    json!({
                        "left": mono_values(&legs[0]),
                        "right": mono_values(&legs[1]),
                        "coeff": rat_str(c),
                    })
                })
                .collect();
            pretty(&json!(terms))
        }
        Format::Text => t
            .terms()
            .map(|(legs, c)| {
                format!(
                    "{} · ({}) ⊗ ({})",
                    rat_str(c),
                    mono_str(&legs[0]),
                    mono_str(&legs[1])
                )
            })
            .collect::<Vec<_>>()
            .join("\n"),
    }
}

fn sum_out(cli: &Cli, s: &GraphSum) -> String {
    match cli.format {
        Format::Json => {
            let terms: Vec<Value> = s
                .terms()
                .map(|(m, c)| {
                    json!({"graphs": mono_values(m), "coeff": rat_str(c)})
                })
                .collect();
            pretty(&json!(terms))
        }
        Format::Text => s
            .terms()
            .map(|(m, c)| format!("{} · {}", rat_str(c), mono_str(m)))
            .collect::<Vec<_>>()
            .join("\n"),
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serialization succeeds")
}

fn report_out(cli: &Cli, what: &str, r: &dse::CheckReport) -> Out {
    let text = match cli.format {
        Format::Json => pretty(&json!({
            "check": what,
            "ok": r.ok,
            "lhs_terms": r.lhs_terms,
            "rhs_terms": r.rhs_terms,
            "details": r.details,
        })),
        Format::Text => {
            let mut lines = vec![format!(
                "{what}: {} (lhs {} terms, rhs {} terms)",
                if r.ok { "pass" } else { "FAIL" },
                r.lhs_terms,
                r.rhs_terms
            )];
            lines.extend(r.details.iter().cloned());
            lines.join("\n")
        }
    };
    if r.ok {
        Ok(text)
    } else {
        Err(CliError::CheckFailed(text))
    }
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn validate(cli: &Cli, g: &GraphArg) -> Out {
    let f = load(&g.graph)?;
    let gr = f.graph();
    Ok(match cli.format {
        Format::Json => pretty(&json!({
            "ok": true,
            "vertices": gr.v(),
            "edges": gr.e(),
            "legs": gr.externals.len(),
            "loops": gr.loops(),
            "connected": gr.is_connected(),
            "class": f.precut.classify().as_str(),
        })),
        Format::Text => format!(
            "ok: {} vertices, {} edges, {} legs, {} loops, {}",
            gr.v(),
            gr.e(),
            gr.externals.len(),
            gr.loops(),
            f.precut.classify().as_str()
        ),
    })
}

fn classify(cli: &Cli, g: &GraphArg) -> Out {
    let f = load(&g.graph)?;
    let p = &f.precut;
    let (parts, legless) = p.leg_partition();
    Ok(match cli.format {
        Format::Json => pretty(&json!({
            "class": p.classify().as_str(),
            "loops": p.loops(),
            "norm": p.norm(),
            "cut_edges": p.cuts.iter().map(|&e| ename(e)).collect::<Vec<_>>(),
            "split_vertices": p.splits.keys().collect::<Vec<_>>(),
            "leg_partition": parts,
            "legless_components": legless,
            "normal": p.is_normal(),
        })),
        Format::Text => format!(
            "{} (loops {}, norm {}, cuts {{{}}}, leg partition {:?}, {} \
             legless component(s))",
            p.classify().as_str(),
            p.loops(),
            p.norm(),
            p.cuts.iter().map(|&e| ename(e)).collect::<Vec<_>>().join(","),
            parts,
            legless
        ),
    })
}

#[allow(clippy::too_many_arguments)]
fn coprod(
    cli: &Cli,
    g: &GraphArg,
    algebra: Algebra,
    reduced: bool,
    normal_cuts: bool,
    valences: &[usize],
    tree: Option<&str>,
    forest: Option<&str>,
) -> Out {
    let f = load(&g.graph)?;
    let base = &f.precut.base;
    let t = match algebra {
        Algebra::Core => {
            if !f.precut.is_core() {
                return Err(CliError::Invalid(
                    "Invalid: the core coproduct takes an uncut graph \
                     (use --algebra pC)"
                        .into(),
                ));
            }
            hopf::delta_core(&GraphSum::from_term(
                Monomial::of_graph(base, true),
                Rat::from_integer(1.into()),
            ))
        }
        Algebra::N => {
            let n: BTreeSet<usize> = if valences.is_empty() {
                base.vertices.iter().map(Vec::len).collect()
            } else {
                valences.iter().copied().collect()
            };
            hopf::delta_n(
                &GraphSum::from_term(
                    Monomial::of_graph(base, true),
                    Rat::from_integer(1.into()),
                ),
                &n,
            )
        }
        Algebra::PC => hopf::delta_pc(
            &GraphSum::from_term(
                Monomial::of_precut(&f.precut, true),
                Rat::from_integer(1.into()),
            ),
            normal_cuts,
        ),
        Algebra::GF => {
            let forest = edge_list(forest.unwrap_or(""), base.e())?;
            let pair = GraphForestPair::new(base.clone(), forest)?;
            hopf::delta_gf(&GraphSum::from_term(
                Monomial::of_pair(&pair, true),
                Rat::from_integer(1.into()),
            ))
        }
        Algebra::GT => {
            let tree = tree.ok_or_else(|| {
                CliError::Invalid("Invalid: --algebra GT needs --tree".into())
            })?;
            let tree = edge_list(tree, base.e())?;
            let forest = edge_list(forest.unwrap_or(""), base.e())?;
            hopf::delta_gt(base, &tree, &forest, true)?
        }
    };
    let t = if reduced { hopf::reduced(&t) } else { t };
    Ok(tensor_out(cli, &t))
}

fn antipode(cli: &Cli, g: &GraphArg, algebra: Algebra, valences: &[usize]) -> Out {
    let f = load(&g.graph)?;
    if !f.precut.is_core() {
        return Err(CliError::Invalid(
            "Invalid: the antipode is computed in the core/N Hopf algebras \
             of uncut graphs"
                .into(),
        ));
    }
    let base = &f.precut.base;
    let s = GraphSum::from_term(
        Monomial::of_graph(base, true),
        Rat::from_integer(1.into()),
    );
    let out = match algebra {
        Algebra::N => {
            let n: BTreeSet<usize> = if valences.is_empty() {
                base.vertices.iter().map(Vec::len).collect()
            } else {
                valences.iter().copied().collect()
            };
            hopf::antipode_n(&s, &n)
        }
        _ => hopf::antipode_core(&s),
    };
    Ok(sum_out(cli, &out))
}

fn spt(cli: &Cli, g: &GraphArg) -> Out {
    let f = load(&g.graph)?;
    if !f.graph().is_connected() {
        return Err(FeynError::Disconnected.into());
    }
    let spt = f.graph().spt();
    let bold = f.graph().spt_bold();
    Ok(match cli.format {
        Format::Json => pretty(&json!({"spt": spt, "spt_bold": bold})),
        Format::Text => format!("{spt}"),
    })
}

fn forests(cli: &Cli, g: &GraphArg, k: usize) -> Out {
    let f = load(&g.graph)?;
    let fs = f.graph().spanning_forests(k);
    let named: Vec<Vec<String>> = fs
        .iter()
        .map(|s| s.iter().map(|&e| ename(e)).collect())
        .collect();
    Ok(match cli.format {
        Format::Json => pretty(&json!({"count": fs.len(), "forests": named})),
        Format::Text => {
            let mut lines = vec![format!("{} forest(s)", fs.len())];
            lines.extend(named.iter().map(|f| format!("{{{}}}", f.join(","))));
            lines.join("\n")
        }
    })
}

fn necklaces(cli: &Cli, ext: Option<usize>, partition: &[usize]) -> Out {
    let words: Vec<String> = if let Some(n) = ext {
        necklace::necklaces_core(n)
            .iter()
            .map(|w| w.to_string())
            .collect()
    } else if !partition.is_empty() {
        necklace::necklaces_cut(partition)
            .iter()
            .map(|w| w.to_string())
            .collect()
    } else {
        return Err(CliError::Invalid(
            "Invalid: necklaces needs --ext N or --partition p1,p2,...".into(),
        ));
    };
    Ok(match cli.format {
        Format::Json => pretty(&json!({"count": words.len(), "necklaces": words})),
        Format::Text => {
            let mut lines = vec![format!("{} necklace(s)", words.len())];
            lines.extend(words);
            lines.join("\n")
        }
    })
}

fn galois(cli: &Cli, g: &GraphArg, tree: &str) -> Out {
    let f = load(&g.graph)?;
    let tree = edge_list(tree, f.graph().e())?;
    let conj = coint::galois_conjugates(f.graph(), &tree)?;
    Ok(match cli.format {
        Format::Json => {
            let items: Vec<Value> = conj
                .iter()
                .map(|c| {
                    json!({
                        "gen": c.mono.to_string(),
                        "p": c.p.iter().map(|&e| ename(e)).collect::<Vec<_>>(),
                        "q": c.q.iter().map(|&e| ename(e)).collect::<Vec<_>>(),
                        "terms": json!({
                            "graph": gjson::to_value(&gjson::GraphFile {
                                precut: PreCutGraph::core(c.pair.graph.clone()),
                                masses: BTreeMap::new(),
                            }),
                            "forest": c
                                .pair
                                .forest
                                .iter()
                                .map(|&e| ename(e))
                                .collect::<Vec<_>>(),
                        }),
                    })
                })
                .collect();
            pretty(&json!(items))
        }
        Format::Text => conj
            .iter()
            .map(|c| {
                format!(
                    "p={{{}}} q={{{}}}  {}",
                    c.p.iter().map(|&e| ename(e)).collect::<Vec<_>>().join(","),
                    c.q.iter().map(|&e| ename(e)).collect::<Vec<_>>().join(","),
                    c.mono
                )
            })
            .collect::<Vec<_>>()
            .join("\n"),
    })
}

fn coint_check(
    cli: &Cli,
    g: &GraphArg,
    tree: &str,
    massless: Option<&str>,
) -> Out {
    let f = load(&g.graph)?;
    let tree = edge_list(tree, f.graph().e())?;
    let mut ctx = coint::Context::from_pair(f.graph(), &tree, false)?;
    if let Some(m) = massless {
        let m = edge_list(m, f.graph().e())?;
        for e in &m {
            if !ctx.e_l.contains(e) {
                return Err(CliError::Invalid(format!(
                    "Invalid: massless edge {} is not a loop edge of the \
                     chosen tree",
                    ename(*e)
                )));
            }
        }
        ctx.e_m = m.into_iter().collect();
    }
    let monos = ctx.monomials();
    // Deterministic sample of product pairs, seeded.
    let mut state = cli.seed.wrapping_mul(6364136223846793005).wrapping_add(1);
    let mut pairs = Vec::new();
    for _ in 0..64.min(monos.len() * monos.len()) {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let i = (state >> 33) as usize % monos.len();
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let j = (state >> 33) as usize % monos.len();
        pairs.push((monos[i].clone(), monos[j].clone()));
    }
    match coint::check_cointeraction(&ctx, &monos, &pairs) {
        Ok(()) => Ok(match cli.format {
            Format::Json => pretty(&json!({
                "ok": true,
                "monomials": monos.len(),
                "sampled_pairs": pairs.len(),
            })),
            Format::Text => format!(
                "all-pass: cointeraction, counit and multiplicativity \
                 identities on {} monomial(s), {} sampled pair(s)",
                monos.len(),
                pairs.len()
            ),
        }),
        Err(msg) => Err(CliError::CheckFailed(match cli.format {
            Format::Json => pretty(&json!({"ok": false, "detail": msg})),
            Format::Text => format!("FAIL: {msg}"),
        })),
    }
}

fn pairing(cli: &Cli, g: &GraphArg, forbid_tadpoles: bool) -> Out {
    let f = load(&g.graph)?;
    let terms = coint::galois_pairing(f.graph(), forbid_tadpoles)?;
    let pair_v = |p: &GraphForestPair| -> Value {
        json!({
            "graph": gjson::to_value(&gjson::GraphFile {
                precut: PreCutGraph::core(p.graph.clone()),
                masses: BTreeMap::new(),
            }),
            "forest": p.forest.iter().map(|&e| ename(e)).collect::<Vec<_>>(),
        })
    };
    Ok(match cli.format {
        Format::Json => {
            let items: Vec<Value> = terms
                .iter()
                .map(|t| {
                    json!({
                        "gen": pair_v(&t.right),
                        "terms": t.lefts.iter().map(&pair_v).collect::<Vec<_>>(),
                    })
                })
                .collect();
            pretty(&json!(items))
        }
        Format::Text => terms
            .iter()
            .map(|t| {
                format!(
                    "right (v={}, forest {{{}}}): {} left term(s)",
                    t.right.graph.v(),
                    t.right
                        .forest
                        .iter()
                        .map(|&e| ename(e))
                        .collect::<Vec<_>>()
                        .join(","),
                    t.lefts.len()
                )
            })
            .collect::<Vec<_>>()
            .join("\n"),
    })
}

fn dse_cmd(
    cli: &Cli,
    target: Option<usize>,
    partition: &[usize],
    loops: usize,
    degrees: &[usize],
    check: Option<DseCheck>,
) -> Out {
    let p: Vec<usize> = if let Some(n) = target {
        vec![n]
    } else if !partition.is_empty() {
        partition.to_vec()
    } else {
        return Err(CliError::Invalid(
            "Invalid: dse needs --target N or --partition p1,p2,...".into(),
        ));
    };
    let ds: BTreeSet<usize> = degrees.iter().copied().collect();
    match check {
        Some(DseCheck::Graphins) => {
            let r = dse::check_graphins(&p, loops, &ds);
            report_out(cli, "graphins", &r)
        }
        Some(DseCheck::Coprod) => {
            let r = dse::check_coprod_green(&p, loops, &ds);
            report_out(cli, "coprod", &r)
        }
        None => {
            let s = dse::green_series(&p, loops as isize, &ds, p.len() > 1);
            Ok(match cli.format {
                Format::Json => {
                    let items: Vec<Value> = s
                        .terms()
                        .map(|(k, c)| {
                            let coupling: serde_json::Map<String, Value> = k
                                .coupling
                                .entries()
                                .map(|(q, e)| {
                                    (
                                        format!(
                                            "({})",
                                            q.iter()
                                                .map(|x| x.to_string())
                                                .collect::<Vec<_>>()
                                                .join(",")
                                        ),
                                        json!(e),
                                    )
                                })
                                .collect();
                            json!({
                                "graph": mono_values(&k.mono),
                                "notsim": k.notsim,
                                "coupling": coupling,
                                "coeff": rat_str(c),
                            })
                        })
                        .collect();
                    pretty(&json!(items))
                }
                Format::Text => s
                    .terms()
                    .map(|(k, c)| {
                        format!(
                            "{} · [{}] {}{}",
                            rat_str(c),
                            k.coupling,
                            mono_str(&k.mono),
                            if k.notsim > 0 {
                                format!(" · ≁^{}", k.notsim)
                            } else {
                                String::new()
                            }
                        )
                    })
                    .collect::<Vec<_>>()
                    .join("\n"),
            })
        }
    }
}

fn matrix(
    cli: &Cli,
    graph: Option<&str>,
    ext: Option<usize>,
    loops: usize,
    degrees: &[usize],
) -> Out {
    if let Some(path) = graph {
        let f = load(path)?;
        let m = dse::cut_matrix(f.graph())?;
        return Ok(match cli.format {
            Format::Json => {
                let rows: Vec<Value> = m
                    .rows
                    .iter()
                    .map(|r| {
                        json!({
                            "blocks": r.blocks,
                            "forest": r
                                .forest
                                .iter()
                                .map(|&e| ename(e))
                                .collect::<Vec<_>>(),
                        })
                    })
                    .collect();
                let entries: Vec<Vec<Value>> = m
                    .entries
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|e| match e {
                                None => Value::Null,
                                Some(p) => json!(p
                                    .cuts
                                    .iter()
                                    .map(|&e| ename(e))
                                    .collect::<Vec<_>>()),
                            })
                            .collect()
                    })
                    .collect();
                pretty(&json!({
                    "rows": rows,
                    "zero_legs": m.zero_legs,
                    "entries": entries,
                }))
            }
            Format::Text => {
                let mut lines =
                    vec![format!("{} row(s), {} added zero-momentum leg(s)",
                        m.rows.len(), m.zero_legs)];
                for (i, r) in m.rows.iter().enumerate() {
                    let marks: Vec<String> = m.entries[i]
                        .iter()
                        .map(|e| match e {
                            None => "·".into(),
                            Some(p) => format!("{}", p.cuts.len()),
                        })
                        .collect();
                    lines.push(format!(
                        "row {i}: blocks {:?}  cuts per column [{}]",
                        r.blocks,
                        marks.join(" ")
                    ));
                }
                lines.join("\n")
            }
        });
    }
    let n = ext.ok_or_else(|| {
        CliError::Invalid("Invalid: matrix needs --graph FILE or --ext N".into())
    })?;
    let ds: BTreeSet<usize> = degrees.iter().copied().collect();
    let m = dse::cut_matrix_green(n, loops, &ds)?;
    Ok(match cli.format {
        Format::Json => {
            let rows: Vec<Value> = m
                .rows
                .iter()
                .map(|(g, aut)| {
                    json!({
                        "graph": gjson::to_value(&gjson::GraphFile {
                            precut: PreCutGraph::core(g.clone()),
                            masses: BTreeMap::new(),
                        }),
                        "aut": aut,
                    })
                })
                .collect();
            let entries: Vec<Vec<Value>> = m
                .entries
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|s| {
                            json!(s
                                .terms()
                                .map(|(mono, c)| json!({
                                    "graphs": mono_values(mono),
                                    "coeff": rat_str(c),
                                }))
                                .collect::<Vec<_>>())
                        })
                        .collect()
                })
                .collect();
            pretty(&json!({"rows": rows, "entries": entries}))
        }
        Format::Text => {
            let mut lines = vec![format!("{} row(s)", m.rows.len())];
            for (i, (g, aut)) in m.rows.iter().enumerate() {
                let marks: Vec<String> = m.entries[i]
                    .iter()
                    .map(|s| if s.is_zero() { "·".into() } else { "x".to_string() })
                    .collect();
                lines.push(format!(
                    "row {i}: loops {}, vertices {}, |Aut| {}  [{}]",
                    g.loops(),
                    g.v(),
                    aut,
                    marks.join(" ")
                ));
            }
            lines.join("\n")
        }
    })
}

fn symanzik_cmd(
    cli: &Cli,
    g: &GraphArg,
    second: bool,
    masses: Option<&str>,
) -> Out {
    let f = load(&g.graph)?;
    let base = f.graph();
    let psi = symanzik::psi(base)?;
    let massive = match masses {
        Some(m) => edge_list(m, base.e())?,
        None => f.massive_edges(),
    };
    let phi = if second {
        Some(symanzik::phi(base, &massive)?)
    } else {
        None
    };
    Ok(match cli.format {
        Format::Json => {
            let mut obj = serde_json::Map::new();
            obj.insert("psi".into(), json!(psi.to_string()));
            if let Some(phi) = &phi {
                obj.insert("phi".into(), json!(phi.to_string()));
            }
            pretty(&Value::Object(obj))
        }
        Format::Text => {
            let mut lines = vec![format!("psi = {psi}")];
            if let Some(phi) = &phi {
                lines.push(format!("phi = {phi}"));
            }
            lines.join("\n")
        }
    })
}

fn sectors(cli: &Cli, g: &GraphArg) -> Out {
    let f = load(&g.graph)?;
    let n = symanzik::count_renorm_free_sectors(f.graph())?;
    Ok(match cli.format {
        Format::Json => pretty(&json!({"renorm_free_sectors": n})),
        Format::Text => format!("{n}"),
    })
}

fn dot(cli: &Cli, g: &GraphArg) -> Out {
    let _ = cli;
    let f = load(&g.graph)?;
    let p = &f.precut;
    let base = &p.base;
    let vof = base.vertex_of();
    let mut lines = vec!["graph feyncut {".to_string()];
    lines.push("  node [shape=circle];".into());
    for v in 0..base.v() {
        lines.push(format!("  v{v};"));
    }
    for (i, &(a, b)) in base.edges.iter().enumerate() {
        let style = if p.cuts.contains(&i) {
            " [style=dashed]"
        } else {
            ""
        };
        lines.push(format!("  v{} -- v{}{style};", vof[&a], vof[&b]));
    }
    for (label, &h) in base.externals.iter().enumerate() {
        lines.push(format!(
            "  x{label} [shape=point,label=\"\"]; v{} -- x{label} [label=\"{}\"];",
            vof[&h],
            label + 1
        ));
    }
    lines.push("}".into());
    Ok(lines.join("\n"))
}
