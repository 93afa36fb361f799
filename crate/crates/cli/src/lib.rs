//! Batch front end: parses a graph-product description, runs one command and
//! renders the result as text or JSON.
//!
//! Exit codes: 0 success, 1 a check failed (or `classify --expect pp` did not
//! get `ProperlyProximal`), 2 invalid input, 3 a resource bound was hit.

pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use graphprod::amalgam::{
    coset_transversal, decompose_at_vertex, invariance_check, malnormality_scan, NormalForms, Side,
};
use graphprod::classify::{cartan_report, classify, Status};
use graphprod::error::{Error, Result};
use graphprod::spec::{load_spec, Spec};
use graphprod::tree::{build_ball, dynamics_experiment, CutSide, DynamicsConfig};
use graphprod::words::{verify_intersection_lemma, Word};

use report::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "graphprod", version, about = "Graph products of groups: words, classification, amalgams and trees")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct SpecArg {
    /// JSON description of the graph and its vertex groups.
    pub spec: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Expectation {
    Pp,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide proper proximality of the graph product.
    Classify {
        #[command(flatten)]
        spec: SpecArg,
        /// Print the rule applications.
        #[arg(long)]
        trace: bool,
        /// Exit with status 1 unless the verdict matches.
        #[arg(long, value_enum)]
        expect: Option<Expectation>,
    },
    /// Evaluate the hypotheses for absence of Cartan subalgebras.
    Cartan {
        #[command(flatten)]
        spec: SpecArg,
    },
    /// Word problem operations.
    #[command(subcommand)]
    Word(WordCommand),
    /// List the elements of syllable length at most `--len`.
    Ball {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        len: usize,
        /// Restrict to the parabolic subgroup on these vertices (comma separated).
        #[arg(long)]
        within: Option<String>,
    },
    /// Split as an amalgamated free product at a vertex.
    Decompose {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        vertex: String,
        /// Word-length budget for the coset transversals.
        #[arg(long, default_value_t = 4)]
        len: usize,
    },
    /// Normal word of an element relative to the decomposition at a vertex.
    Normalword {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        vertex: String,
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 4)]
        len: usize,
    },
    /// Bounded verification of structural claims.
    #[command(subcommand)]
    Check(CheckCommand),
    /// Bounded scans.
    #[command(subcommand)]
    Scan(ScanCommand),
    /// Ball in the Bass-Serre tree of the decomposition at a vertex.
    Tree {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        vertex: String,
        #[arg(long)]
        radius: usize,
        /// Word-length budget for coset representatives (default: 2 * radius + |V|).
        #[arg(long)]
        len: Option<usize>,
        /// Write the ball in Graphviz format.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Track ball vertices under a sequence of group elements.
    Dynamics {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        vertex: String,
        /// Semicolon-separated words.
        #[arg(long)]
        seq: String,
        #[arg(long)]
        radius: usize,
        #[arg(long, default_value_t = DynamicsConfig::default().escape_len)]
        escape_len: usize,
        #[arg(long, default_value_t = DynamicsConfig::default().neighbourhood_depth)]
        depth: usize,
        /// Put the edge of U(a, F) on the geodesic towards the attractor instead of the repeller.
        #[arg(long)]
        attractor_cut: bool,
    },
    /// Compare first-syllable types of `seq[n]` and `seq[n]·g`.
    Invariance {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        vertex: String,
        #[arg(long)]
        seq: String,
        #[arg(long)]
        g: String,
        #[arg(long, default_value_t = 3)]
        len: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum WordCommand {
    /// Shorten to a reduced word.
    Reduce {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        word: String,
    },
    /// The canonical representative.
    Canonical {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        word: String,
    },
    /// Whether two words represent the same element.
    Eq {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        w1: String,
        #[arg(long)]
        w2: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum CheckCommand {
    /// Cover of `Γ_T1 ∩ g Γ_T2 h` by translates of `Γ_{T1∩T2}` inside a ball.
    Intersection {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        t1: String,
        #[arg(long)]
        t2: String,
        #[arg(long, allow_hyphen_values = true)]
        g: String,
        #[arg(long, allow_hyphen_values = true)]
        h: String,
        #[arg(long)]
        len: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum ScanCommand {
    /// Largest `|gHg⁻¹ ∩ H|` over short `g` outside the amalgamated subgroup.
    Malnormal {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        vertex: String,
        #[arg(long)]
        lg: usize,
        #[arg(long)]
        lh: usize,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Rendered {
    code: i32,
    body: String,
}

fn render<T: Render>(format: Format, view: &T, code: i32) -> Result<Rendered> {
    let body = match format {
        Format::Text => view.text(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(view)
                .map_err(|e| Error::Internal(format!("serialization: {e}")))?;
            s.push('\n');
            s
        }
    };
    Ok(Rendered { code, body })
}

fn parse_seq(spec: &Spec, text: &str) -> Result<Vec<Word>> {
    let seq: Vec<Word> = text
        .split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|s| spec.product.parse_word(s))
        .collect::<Result<_>>()?;
    if seq.is_empty() {
        return Err(Error::input("--seq: empty sequence"));
    }
    Ok(seq)
}

fn vertex(spec: &Spec, name: &str) -> Result<usize> {
    spec.graph().vertex(name)
}

fn execute(format: Format, command: Command) -> Result<Rendered> {
    match command {
        Command::Classify { spec, trace, expect } => {
            let s = load_spec(&spec.spec)?;
            let verdict = classify(s.graph(), s.product.groups(), &s.conventions)?;
            let code = match expect {
                Some(Expectation::Pp) if verdict.status != Status::ProperlyProximal => 1,
                _ => 0,
            };
            if trace {
                render(format, &TracedVerdict(verdict), code)
            } else {
                render(format, &verdict, code)
            }
        }
        Command::Cartan { spec } => {
            let s = load_spec(&spec.spec)?;
            render(format, &cartan_report(s.graph(), s.product.groups(), &s.conventions)?, 0)
        }
        Command::Word(cmd) => match cmd {
            WordCommand::Reduce { spec, word } => {
                let s = load_spec(&spec.spec)?;
                let ctx = &s.product;
                let r = ctx.reduce(&ctx.parse_word(&word)?)?;
                render(format, &WordView::new(ctx, &r), 0)
            }
            WordCommand::Canonical { spec, word } => {
                let s = load_spec(&spec.spec)?;
                let ctx = &s.product;
                let c = ctx.canonical(&ctx.parse_word(&word)?)?;
                render(format, &WordView::new(ctx, &c), 0)
            }
            WordCommand::Eq { spec, w1, w2 } => {
                let s = load_spec(&spec.spec)?;
                let ctx = &s.product;
                let equal = ctx.equals(&ctx.parse_word(&w1)?, &ctx.parse_word(&w2)?)?;
                render(format, &EqualityView { equal }, 0)
            }
        },
        Command::Ball { spec, len, within } => {
            let s = load_spec(&spec.spec)?;
            let ctx = &s.product;
            let set = match within {
                Some(t) => s.graph().parse_set(&t)?,
                None => s.graph().vertices(),
            };
            let ball = ctx.enumerate_ball_in(set, len)?;
            let view = BallView {
                max_len: len,
                within: s.graph().set_names(set),
                count: ball.len(),
                elements: ball.iter().map(|g| ctx.format_word(g)).collect(),
            };
            render(format, &view, 0)
        }
        Command::Decompose { spec, vertex: v, len } => {
            let s = load_spec(&spec.spec)?;
            let ctx = &s.product;
            let dec = decompose_at_vertex(ctx, vertex(&s, &v)?)?;
            let ts = [
                coset_transversal(ctx, &dec, Side::One, len)?,
                coset_transversal(ctx, &dec, Side::Two, len)?,
            ];
            render(format, &DecompositionView::new(ctx, &dec, &ts), 0)
        }
        Command::Normalword { spec, vertex: v, word, len } => {
            let s = load_spec(&spec.spec)?;
            let ctx = &s.product;
            let dec = decompose_at_vertex(ctx, vertex(&s, &v)?)?;
            let forms = NormalForms::new(ctx, dec, len)?;
            let g = ctx.parse_word(&word)?;
            let nw = forms.normal_word(&g)?;
            render(format, &NormalWordView::new(ctx, &g, &nw), 0)
        }
        Command::Check(CheckCommand::Intersection { spec, t1, t2, g, h, len }) => {
            let s = load_spec(&spec.spec)?;
            let ctx = &s.product;
            let (t1, t2) = (s.graph().parse_set(&t1)?, s.graph().parse_set(&t2)?);
            let (g, h) = (ctx.parse_word(&g)?, ctx.parse_word(&h)?);
            let r = verify_intersection_lemma(ctx, t1, t2, &g, &h, len)?;
            let view = IntersectionView::new(ctx, &g, &h, &r);
            let code = if view.pass { 0 } else { 1 };
            render(format, &view, code)
        }
        Command::Scan(ScanCommand::Malnormal { spec, vertex: v, lg, lh }) => {
            let s = load_spec(&spec.spec)?;
            let ctx = &s.product;
            let x = vertex(&s, &v)?;
            let dec = decompose_at_vertex(ctx, x)?;
            let r = malnormality_scan(ctx, &dec, lg, lh)?;
            render(format, &MalnormalityView::new(ctx, x, &r), 0)
        }
        Command::Tree { spec, vertex: v, radius, len, dot } => {
            let s = load_spec(&spec.spec)?;
            let ctx = &s.product;
            let dec = decompose_at_vertex(ctx, vertex(&s, &v)?)?;
            let budget = len.unwrap_or(2 * radius + s.graph().len());
            let ball = build_ball(ctx, &dec, radius, budget)?;
            if let Some(path) = dot {
                std::fs::write(&path, ball.to_dot())
                    .map_err(|e| Error::input(format!("cannot write {}: {e}", path.display())))?;
            }
            render(format, &TreeView::new(&ball), 0)
        }
        Command::Dynamics { spec, vertex: v, seq, radius, escape_len, depth, attractor_cut } => {
            let s = load_spec(&spec.spec)?;
            let ctx = &s.product;
            let dec = decompose_at_vertex(ctx, vertex(&s, &v)?)?;
            let seq = parse_seq(&s, &seq)?;
            let cut = if attractor_cut { CutSide::Attractor } else { CutSide::Repeller };
            let config = DynamicsConfig { escape_len, neighbourhood_depth: depth, cut };
            let (ball, r) = dynamics_experiment(ctx, &dec, &seq, radius, config)?;
            let view = DynamicsView::new(&ball, &r);
            let code = if view.exceptions.is_empty() { 0 } else { 1 };
            render(format, &view, code)
        }
        Command::Invariance { spec, vertex: v, seq, g, len } => {
            let s = load_spec(&spec.spec)?;
            let ctx = &s.product;
            let dec = decompose_at_vertex(ctx, vertex(&s, &v)?)?;
            let forms = NormalForms::new(ctx, dec, len)?;
            let seq = parse_seq(&s, &seq)?;
            let g = ctx.parse_word(&g)?;
            let r = invariance_check(&forms, &seq, &g, len)?;
            let code = if r.escape.certified && r.agree_from.is_some() { 0 } else { 1 };
            render(format, &InvarianceView::new(ctx, &r), code)
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code: 2, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(cli.format, cli.command) {
        Ok(r) => Outcome { code: r.code, stdout: r.body, stderr: String::new() },
        Err(e) => Outcome { code: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}
