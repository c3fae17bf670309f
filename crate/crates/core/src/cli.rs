//! Command-line front end. [`run`] does all the work and returns the text,
//! JSON envelope, DOT output and exit code; `main` only writes them out.

use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::brauer::Brauer;
use crate::gf::FieldSpec;
use crate::jh::{conjectural_f2_grouping, hypercube_lambda, hypercube_vx, jh_factors_with, socle_layers, JhError};
use crate::report::{filtration_dot, Envelope, Report, DEFAULT_SEED};
use crate::rep::ModuleError;
use crate::theta::{principal_bound, theta_filtration, verify_cell, verify_intersection};
use crate::verify::{
    cg_suite, ses_suite, verify_cg_suite, verify_projective, verify_ses_and_split, CgCase, CgRule,
};
use crate::weights::{decompose_traced, Decomposition, Params, TensorTerm};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_PARTIAL: i32 = 2;
pub const EXIT_FAIL: i32 = 3;

/// Spot-checks per projective instance.
pub const PROJECTIVE_SAMPLES: usize = 20;

#[derive(Debug, Parser)]
#[command(name = "thetarep", version, about = "Weights, theta filtrations and principal series of GL2(F_q) in characteristic p")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true)]
    pub p: Option<u32>,
    #[arg(long, global = true, default_value_t = 1)]
    pub f: u32,
    /// Degree tuple, comma separated (a single integer for `jh`).
    #[arg(long, global = true, value_delimiter = ',')]
    pub r: Option<Vec<u64>>,
    /// Weight tuple for `decompose`/`verify`, or the filtration depth.
    #[arg(long, global = true, value_delimiter = ',')]
    pub m: Option<Vec<u32>>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub n: Option<Vec<u32>>,
    #[arg(long, global = true)]
    pub k: Option<u32>,
    /// Write the JSON envelope to this file.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,
    /// Write DOT diagrams to this file.
    #[arg(long, global = true)]
    pub dot: Option<std::path::PathBuf>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Print the JSON envelope instead of text.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decompose the tensor product `m ⊗ n` into weights.
    Decompose,
    /// Theta filtration of `V_r / V_r^{(m+1)}`.
    Filtration {
        #[arg(long)]
        force: bool,
    },
    /// Jordan-Hölder factors of `ind(d^r)`.
    Jh {
        /// Also emit the conjectural f = 2 grouping into principal series.
        #[arg(long)]
        conjectural: bool,
    },
    /// Principal-series labels on the hypercube of subsets.
    Hypercube,
    /// Exact verification suites.
    Verify {
        #[arg(long, value_enum, default_value_t = Target::All)]
        target: Target,
        #[arg(long)]
        force: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Cg,
    Ses,
    Projective,
    Iso1,
    Intersection,
    All,
}

pub struct Outcome {
    pub code: i32,
    pub text: Vec<String>,
    pub envelope: Envelope,
    pub dot: Option<String>,
}

struct ConfigError(String);

impl From<ModuleError> for ConfigError {
    fn from(e: ModuleError) -> Self {
        ConfigError(e.to_string())
    }
}

impl From<JhError> for ConfigError {
    fn from(e: JhError) -> Self {
        ConfigError(e.to_string())
    }
}

struct Ctx {
    text: Vec<String>,
    env: Envelope,
    dot: Option<String>,
    code: i32,
}

impl Ctx {
    fn say(&mut self, s: impl Into<String>) {
        self.text.push(s.into());
    }

    fn report(&mut self, r: Report) {
        self.say(r.line());
        self.env.reports.push(r);
    }

    fn add_dot(&mut self, d: String) {
        self.dot.get_or_insert_with(String::new).push_str(&d);
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let mut ctx = Ctx { text: Vec::new(), env: Envelope::new(cli.seed, None), dot: None, code: EXIT_OK };
    let result = match &cli.command {
        Command::Decompose => cmd_decompose(cli, &mut ctx),
        Command::Filtration { force } => cmd_filtration(cli, *force, &mut ctx),
        Command::Jh { conjectural } => cmd_jh(cli, *conjectural, &mut ctx),
        Command::Hypercube => cmd_hypercube(cli, &mut ctx),
        Command::Verify { target, force } => cmd_verify(cli, *target, *force, &mut ctx),
    };
    if let Err(ConfigError(msg)) = result {
        ctx.say(format!("error: {msg}"));
        ctx.code = EXIT_CONFIG;
    } else if ctx.code == EXIT_OK && !ctx.env.all_pass() {
        ctx.code = EXIT_FAIL;
    }
    Outcome { code: ctx.code, text: ctx.text, envelope: ctx.env, dot: ctx.dot }
}

/// Parses `args` (including the program name) and runs; clap errors map to
/// exit code 1.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => Outcome {
            code: if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK },
            text: vec![e.to_string()],
            envelope: Envelope::new(DEFAULT_SEED, None),
            dot: None,
        },
    }
}

fn field(cli: &Cli, ctx: &mut Ctx) -> Result<Arc<FieldSpec>, ConfigError> {
    let p = cli.p.ok_or_else(|| ConfigError("--p is required".into()))?;
    let field = FieldSpec::build(p, cli.f).map_err(|e| ConfigError(e.to_string()))?;
    ctx.env.field = Some(field.to_json());
    Ok(field)
}

fn tuple(name: &str, v: &Option<Vec<u32>>, f: usize) -> Result<Vec<u32>, ConfigError> {
    let v = v.clone().ok_or_else(|| ConfigError(format!("--{name} is required")))?;
    if v.len() != f {
        return Err(ConfigError(format!("--{name} needs {f} entries, got {}", v.len())));
    }
    Ok(v)
}

fn r_tuple(cli: &Cli, f: usize) -> Result<Vec<u32>, ConfigError> {
    let r = cli.r.clone().ok_or_else(|| ConfigError("--r is required".into()))?;
    if r.len() != f {
        return Err(ConfigError(format!("--r needs {f} entries, got {}", r.len())));
    }
    r.into_iter().map(|x| u32::try_from(x).map_err(|_| ConfigError(format!("r = {x} too large")))).collect()
}

fn depth(cli: &Cli) -> Result<u32, ConfigError> {
    match cli.m.as_deref() {
        Some([m]) => Ok(*m),
        Some(_) => Err(ConfigError("--m must be a single integer here".into())),
        None => Err(ConfigError("--m is required".into())),
    }
}

fn cmd_decompose(cli: &Cli, ctx: &mut Ctx) -> Result<(), ConfigError> {
    let field = field(cli, ctx)?;
    let f = field.f as usize;
    let m = tuple("m", &cli.m, f)?;
    let n = tuple("n", &cli.n, f)?;
    let params = Params::new(field.p, f);
    let (d, rules) = decompose_traced(&params, &m, &n);
    let lhs = TensorTerm { factors: vec![m.clone(), n.clone()], det: 0 };
    ctx.say(format!("{lhs} = {}", d.all_terms()));
    ctx.say(format!("rules: {rules:?}"));
    if let Decomposition::Partial(pr) = &d {
        for res in &pr.residual {
            ctx.say(format!("residual {} (p divides the binomial in blocks {:?})", res.term, res.blocks));
        }
        ctx.code = EXIT_PARTIAL;
    }
    ctx.env.data = json!({ "lhs": lhs.to_string(), "decomposition": d, "display": d.all_terms().to_string(), "rules": rules });
    ctx.report(Report::new(
        "decompose.dimension",
        "tensor product dimension is preserved",
        json!({ "p": field.p, "f": f, "m": m, "n": n }),
        lhs.dim(),
        d.all_terms().dim(),
    ));
    Ok(())
}

fn cmd_filtration(cli: &Cli, force: bool, ctx: &mut Ctx) -> Result<(), ConfigError> {
    let field = field(cli, ctx)?;
    let r = r_tuple(cli, field.f as usize)?;
    let m = depth(cli)?;
    let filt = theta_filtration(&field, &r, m, force)?;
    let q = field.q() as usize;
    for c in &filt.cells {
        let flag = if c.low_r_prime { "  [r'_i < q]" } else { "" };
        ctx.say(format!("level {} row {} j={:?}: dim {}  {}{flag}", c.level, c.row, c.theta.j, c.dim, c.series));
        ctx.report(Report::new(
            "filtration.cell-dim",
            "each cell is a principal series of dimension q+1",
            json!({ "p": field.p, "f": field.f, "r": r, "m": m, "j": c.theta.j }),
            q + 1,
            c.dim,
        ));
    }
    let total = filt.quotient_dim();
    let expected = filt.expected_quotient_dim();
    ctx.report(Report::new(
        "filtration.total-dim",
        "dim V_r/V_r^(m+1) = (m+1)^f (q+1)",
        json!({ "p": field.p, "f": field.f, "r": r, "m": m }),
        expected,
        total,
    ));
    ctx.say(format!("dim = (m+1)^f(q+1): {} ({total} vs {expected})", if total == expected { "PASS" } else { "FAIL" }));
    ctx.env.data = json!({ "cells": filt.cells, "levels_complete": filt.levels_complete });
    ctx.add_dot(filtration_dot(&filt, "filtration"));
    Ok(())
}

/// `r` as an integer: a single value, or a tuple read in base `p`.
fn r_integer(cli: &Cli, p: u32) -> Result<u64, ConfigError> {
    let r = cli.r.clone().ok_or_else(|| ConfigError("--r is required".into()))?;
    Ok(r.iter().enumerate().map(|(i, &x)| x * (p as u64).pow(i as u32)).sum())
}

fn cmd_jh(cli: &Cli, conjectural: bool, ctx: &mut Ctx) -> Result<(), ConfigError> {
    let field = field(cli, ctx)?;
    let r = r_integer(cli, field.p)?;
    let brauer = (field.f >= 3).then(|| Brauer::new(&field));
    let res = jh_factors_with(r, &field, brauer.as_ref())?;
    ctx.say(format!("r = {r}, a = {} = digits {:?}", res.a, res.digits));
    for note in &res.notes {
        ctx.say(format!("warning: {note}"));
    }
    for fac in &res.factors {
        ctx.say(format!(
            "{:?}  λ = {}  {}  dim {}  [{:?}]",
            fac.subset,
            fac.lambda,
            fac.term(),
            fac.dim(),
            fac.source
        ));
    }
    let q = field.q() as u64;
    ctx.say(format!("total dim {} (q+1 = {})", res.total_dim(), q + 1));
    if res.generic {
        ctx.report(Report::new(
            "jh.total-dim",
            "the factors exhaust a principal series",
            json!({ "p": field.p, "f": field.f, "r": r }),
            q + 1,
            res.total_dim(),
        ));
        let graph = hypercube_lambda(&res.digits, field.p);
        ctx.add_dot(graph.to_dot("jh_hypercube"));
        ctx.add_dot(socle_dot(&res));
    }
    let mut data = json!({ "jh": res });
    if conjectural {
        if field.f != 2 {
            return Err(ConfigError("--conjectural needs f = 2".into()));
        }
        let diamonds = conjectural_f2_grouping(res.digits[0], res.digits[1], field.p)?;
        ctx.say("CONJECTURAL grouping of V_r/V_r** into principal series:");
        for (i, d) in diamonds.iter().enumerate() {
            ctx.say(format!("  {i}: top {} | left {} | right {} | bottom {}", d.top, d.left, d.right, d.bottom));
        }
        ctx.add_dot(diamond_dot(&diamonds));
        data["conjectural"] = json!({ "watermark": "CONJECTURAL", "diamonds": diamonds });
    }
    ctx.env.data = data;
    Ok(())
}

fn socle_dot(res: &crate::jh::JhResult) -> String {
    let Some(top) = res.factors.iter().max_by_key(|f| f.subset.len()) else {
        return String::new();
    };
    let layers = socle_layers(&top.lambda, res.f);
    let mut s = "digraph jh_socle {\n".to_string();
    let label = |subset: &Vec<usize>| {
        res.factors.iter().find(|f| &f.subset == subset).map(|f| f.term().to_string()).unwrap_or_default()
    };
    for (l, layer) in layers.iter().enumerate() {
        for subset in layer {
            s += &format!("  \"{subset:?}\" [label=\"{}\\nlayer {l}\"];\n", label(subset));
        }
    }
    for w in layers.windows(2) {
        for a in &w[0] {
            for b in &w[1] {
                if a.iter().all(|x| b.contains(x)) {
                    s += &format!("  \"{a:?}\" -> \"{b:?}\";\n");
                }
            }
        }
    }
    s += "}\n";
    s
}

fn diamond_dot(diamonds: &[crate::jh::Diamond]) -> String {
    let mut s = "digraph conjectural_grouping {\n  label=\"CONJECTURAL\";\n".to_string();
    for (i, d) in diamonds.iter().enumerate() {
        for (name, t) in ["top", "left", "right", "bottom"].iter().zip(d.terms()) {
            s += &format!("  d{i}_{name} [label=\"{t}\"];\n");
        }
        for (a, b) in [("top", "left"), ("top", "right"), ("left", "bottom"), ("right", "bottom")] {
            s += &format!("  d{i}_{a} -> d{i}_{b};\n");
        }
    }
    s += "}\n";
    s
}

fn cmd_hypercube(cli: &Cli, ctx: &mut Ctx) -> Result<(), ConfigError> {
    let field = field(cli, ctx)?;
    let r = r_tuple(cli, field.f as usize)?;
    let m = cli.m.as_deref().map(|_| depth(cli)).transpose()?.unwrap_or(1);
    let g = hypercube_vx(&r, m, field.p)?;
    for v in &g.vertices {
        ctx.say(format!("{:?}: {}", v.subset, v.label));
    }
    let f = field.f as usize;
    ctx.report(Report::new(
        "hypercube.shape",
        "2^f vertices and f 2^(f-1) edges",
        json!({ "p": field.p, "f": f, "r": r }),
        json!({ "vertices": 1usize << f, "edges": f << (f - 1) }),
        json!({ "vertices": g.vertices.len(), "edges": g.edges.len() }),
    ));
    ctx.add_dot(g.to_dot("hypercube"));
    ctx.env.data = json!({ "graph": g });
    Ok(())
}

fn cmd_verify(cli: &Cli, target: Target, force: bool, ctx: &mut Ctx) -> Result<(), ConfigError> {
    let all = target == Target::All;
    if target == Target::Cg || all {
        verify_cg_target(cli, ctx)?;
    }
    if target == Target::Ses || all {
        verify_ses_target(cli, ctx)?;
    }
    if target == Target::Projective || all {
        verify_projective_target(cli, ctx)?;
    }
    if target == Target::Iso1 || all {
        for (field, r, m) in filtration_instances(cli, ctx)? {
            verify_iso1_instance(&field, &r, m, force, ctx)?;
        }
    }
    if target == Target::Intersection || all {
        for (field, r, m) in filtration_instances(cli, ctx)? {
            let rep = verify_intersection(&field, &r, m)?;
            ctx.report(Report::new(
                "intersection",
                "top theta power meets V^(m+1) in the span of its single-step multiples",
                json!({ "p": field.p, "f": field.f, "r": r, "m": m }),
                true,
                rep.equal,
            )
            .with_details(rep));
        }
    }
    Ok(())
}

fn verify_cg_target(cli: &Cli, ctx: &mut Ctx) -> Result<(), ConfigError> {
    let cases = match (cli.p, &cli.m, &cli.n) {
        (Some(p), Some(_), Some(_)) => {
            let f = cli.f as usize;
            vec![CgCase::new(p, &tuple("m", &cli.m, f)?, &tuple("n", &cli.n, f)?, CgRule::Decompose)]
        }
        _ => cg_suite(),
    };
    for rep in verify_cg_suite(&cases)? {
        ctx.report(Report::new(
            "cg",
            "both sides have the same dimension and Brauer character",
            json!({ "instance": rep.label }),
            json!({ "dim": rep.lhs_dim, "character": true, "module_character": rep.module_character_equal.map(|_| true) }),
            json!({ "dim": rep.rhs_dim, "character": rep.character_equal, "module_character": rep.module_character_equal }),
        )
        .with_details(rep));
    }
    Ok(())
}

fn ses_instances(cli: &Cli) -> Result<Vec<(u32, u32, Vec<u32>, usize, u32)>, ConfigError> {
    let (Some(p), Some(_), Some(n)) = (cli.p, &cli.m, &cli.n) else {
        return Ok(ses_suite());
    };
    let f = cli.f as usize;
    let m = tuple("m", &cli.m, f)?;
    let (i, n_i) = match n.as_slice() {
        [x] => (0, *x),
        _ => {
            let nz: Vec<usize> = (0..n.len()).filter(|&i| n[i] != 0).collect();
            if n.len() != f || nz.len() != 1 {
                return Err(ConfigError("--n must be n_i e_i: one nonzero entry".into()));
            }
            (nz[0], n[nz[0]])
        }
    };
    Ok(vec![(p, cli.f, m, i, n_i)])
}

fn verify_ses_target(cli: &Cli, ctx: &mut Ctx) -> Result<(), ConfigError> {
    for (p, f, m, i, n_i) in ses_instances(cli)? {
        let field = FieldSpec::build(p, f).map_err(|e| ConfigError(e.to_string()))?;
        let rep = verify_ses_and_split(&field, &m, i, n_i)?;
        let params = json!({ "p": p, "f": f, "m": m, "i": i, "n_i": n_i });
        ctx.report(Report::new(
            "ses.exact",
            "the sequence is exact and equivariant",
            params.clone(),
            json!({ "exact": true, "equivariant": true }),
            json!({ "exact": rep.exact, "equivariant": rep.equivariant }),
        ));
        ctx.say(format!(
            "  {} -> {} -> {}: {}",
            rep.source,
            rep.middle,
            rep.quotient,
            if rep.split { "SPLIT" } else { "NOT-SPLIT" }
        ));
        ctx.report(
            Report::new(
                "ses.split",
                "an equivariant section exists exactly when Lucas' criterion holds",
                params,
                json!({ "split": rep.lucas }),
                json!({ "split": rep.split }),
            )
            .with_details(rep),
        );
    }
    Ok(())
}

fn verify_projective_target(cli: &Cli, ctx: &mut Ctx) -> Result<(), ConfigError> {
    let instances: Vec<(u32, u32, Vec<u32>, u32)> = match (cli.p, &cli.m, cli.k) {
        (Some(p), Some(_), Some(k)) => vec![(p, cli.f, tuple("m", &cli.m, cli.f as usize)?, k)],
        _ => vec![(3, 2, vec![1, 2], 1), (3, 1, vec![1], 1)],
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    for (p, f, m, k) in instances {
        let field = FieldSpec::build(p, f).map_err(|e| ConfigError(e.to_string()))?;
        let rep = verify_projective(&field, &m, k, PROJECTIVE_SAMPLES, &mut rng)?;
        ctx.report(Report::new(
            "projective",
            "the multiplication map onto the predicted weight is an isomorphism",
            json!({ "p": p, "f": f, "m": m, "k": k, "target": rep.target }),
            json!({ "rank": rep.target_dim, "equivariant": true }),
            json!({ "rank": rep.rank, "equivariant": rep.equivariant }),
        )
        .with_details(rep));
    }
    Ok(())
}

fn filtration_instances(cli: &Cli, ctx: &mut Ctx) -> Result<Vec<(Arc<FieldSpec>, Vec<u32>, u32)>, ConfigError> {
    if cli.p.is_some() && cli.r.is_some() {
        let field = field(cli, ctx)?;
        let r = r_tuple(cli, field.f as usize)?;
        return Ok(vec![(field, r, depth(cli)?)]);
    }
    let mk = |p, f| FieldSpec::build(p, f).map_err(|e| ConfigError(e.to_string()));
    Ok(vec![(mk(3, 1)?, vec![9], 1), (mk(3, 2)?, vec![19, 19], 1)])
}

fn verify_iso1_instance(field: &Arc<FieldSpec>, r: &[u32], m: u32, force: bool, ctx: &mut Ctx) -> Result<(), ConfigError> {
    let bound = principal_bound(m, field.q());
    let filt = theta_filtration(field, r, m, force)?;
    let brauer = Brauer::new(field);
    for (i, cell) in filt.cells.iter().enumerate() {
        let params = json!({ "p": field.p, "f": field.f, "r": r, "m": m, "j": cell.theta.j, "bound": bound });
        match verify_cell(&filt, i, &brauer) {
            Ok(rep) => ctx.report(
                Report::new(
                    "iso1",
                    "the cell is ind(det^S ⊗ d^r') with kernel V_r'^*",
                    params,
                    json!({ "dim": rep.expected_dim, "kernel": true, "character": true }),
                    json!({ "dim": rep.subquotient_dim, "kernel": rep.kernel_matches, "character": rep.character_matches }),
                )
                .with_details(rep),
            ),
            Err(ModuleError::BoundViolated(msg)) => ctx.report(Report::new(
                "iso1",
                "the cell is ind(det^S ⊗ d^r') with kernel V_r'^*",
                params,
                "r'_i >= q",
                format!("bound violated: {msg}"),
            )),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(())
}
