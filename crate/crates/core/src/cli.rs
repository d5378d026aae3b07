//! Command-line harness: input generation or loading, algorithm dispatch,
//! optional oracle checks and CSV output.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::apsp::{apsp, oracle_apsp};
use crate::costmodel::{CostMeter, CostParams, MeterSnapshot, SlowArray, Word, CSV_HEADER};
use crate::error::AramError;
use crate::fftsched::{eval_fft, oracle_fft, P};
use crate::graph::{bfs, dfs, gen_grid, gen_random, oracle_bfs, oracle_dfs, parse_edge_list, Graph};
use crate::heaps::we_sort;
use crate::mst::{mst, oracle_mst, MstAlgo};
use crate::seqalign::{align, choose_tile, oracle_align, path_weight, Objective, Policy, TileParams};
use crate::sssp::{oracle_sssp, select_variant, sssp, SsspVariant};

/// Sizes up to which `--verify` defaults on.
const VERIFY_MAX_N: usize = 10_000;
const VERIFY_MAX_LEN: usize = 2_000;

#[derive(Parser, Debug)]
#[command(name = "aram", version, about = "Asymmetric-RAM cost measurements")]
pub struct Cli {
    /// Fast-memory capacity in words.
    #[arg(long = "M", global = true, default_value_t = 1024)]
    pub fast: usize,
    /// Cost of one slow-memory write.
    #[arg(long, global = true, default_value_t = 100)]
    pub omega: u64,
    #[arg(long, global = true, env = "ARAM_SEED", default_value_t = 1)]
    pub seed: u64,
    /// Compare against the unmetered oracle (default: on for small inputs).
    #[arg(long, global = true, overrides_with = "no_verify")]
    pub verify: bool,
    #[arg(long, global = true)]
    pub no_verify: bool,
    /// Write CSV here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    Sssp(SsspArgs),
    Mst(MstArgs),
    Align(AlignArgs),
    Apsp(ApspArgs),
    Fft(FftArgs),
    Sort(SortArgs),
    Bfs(BfsArgs),
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Random,
    Grid,
}

#[derive(Args, Debug, Clone)]
pub struct GraphArgs {
    /// Edge-list file (`n m` header, then `u v w` lines).
    #[arg(long, conflicts_with = "gen")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "random")]
    pub gen: GenKind,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 10_000)]
    pub m: usize,
    #[arg(long, default_value_t = 1000)]
    pub max_w: Word,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Fib,
    Bst,
    Phased,
    Auto,
    All,
}

#[derive(Args, Debug)]
pub struct SsspArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, value_enum, default_value = "auto")]
    pub variant: VariantArg,
    #[arg(long, default_value_t = 0)]
    pub source: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MstArg {
    PrimFib,
    PrimBst,
    PrimPhased,
    Kruskal,
    Boruvka,
    All,
}

#[derive(Args, Debug)]
pub struct MstArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, value_enum, default_value = "boruvka")]
    pub algo: MstArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Ed,
    Lcs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AutoArg {
    Work,
    Q,
}

#[derive(Args, Debug)]
pub struct AlignArgs {
    /// First string file; random strings are generated when absent.
    #[arg(long, requires = "b")]
    pub a: Option<PathBuf>,
    #[arg(long, requires = "a")]
    pub b: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    pub len: usize,
    #[arg(long, default_value_t = 4)]
    pub sigma: u8,
    #[arg(long, value_enum, default_value = "ed")]
    pub policy: PolicyArg,
    /// Tile as `HxK`.
    #[arg(long, conflicts_with = "auto")]
    pub tile: Option<String>,
    #[arg(long, value_enum)]
    pub auto: Option<AutoArg>,
    /// Also recover an optimal path.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Args, Debug)]
pub struct ApspArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Write the distance matrix as CSV here.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FftArgs {
    #[arg(long, default_value_t = 14)]
    pub log2n: u32,
}

#[derive(Args, Debug)]
pub struct SortArgs {
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
}

#[derive(Args, Debug)]
pub struct BfsArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, default_value_t = 0)]
    pub source: usize,
    /// Depth-first preorder instead.
    #[arg(long)]
    pub dfs: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SweepTarget {
    Sssp,
    Align,
    Fft,
}

/// Lists are comma separated; an empty list gives an empty grid.
#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(value_enum)]
    pub target: SweepTarget,
    #[arg(long, default_value = "1,10,100,1000")]
    pub omegas: String,
    #[arg(long = "Ms", default_value = "1024")]
    pub ms: String,
    /// Vertex counts, string lengths or log2 sizes.
    #[arg(long, default_value = "1000")]
    pub ns: String,
    /// SSSP variants or square tile sides.
    #[arg(long, default_value = "fib,bst,phased")]
    pub what: String,
    #[arg(long, default_value_t = 8)]
    pub degree: usize,
}

#[derive(Debug)]
pub enum CliError {
    Aram(AramError),
    Io(String),
    Verify(String),
}

impl From<AramError> for CliError {
    fn from(e: AramError) -> Self {
        CliError::Aram(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verify(_) => 1,
            CliError::Aram(_) | CliError::Io(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Aram(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Verify(e) => write!(f, "verification failed: {e}"),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

struct Ctx {
    params: CostParams,
    seed: u64,
    verify: Option<bool>,
}

impl Ctx {
    fn verify(&self, size: usize, limit: usize) -> bool {
        self.verify.unwrap_or(size <= limit)
    }

    fn extra(&self, kv: &str) -> String {
        if kv.is_empty() {
            format!("seed={};rng=chacha8", self.seed)
        } else {
            format!("seed={};rng=chacha8;{kv}", self.seed)
        }
    }
}

fn first_mismatch<T: PartialEq + std::fmt::Debug>(what: &str, got: &[T], want: &[T]) -> CliResult<()> {
    if got.len() != want.len() {
        return Err(CliError::Verify(format!(
            "{what}: length {} vs oracle {}",
            got.len(),
            want.len()
        )));
    }
    match got.iter().zip(want).position(|(a, b)| a != b) {
        None => Ok(()),
        Some(i) => Err(CliError::Verify(format!(
            "{what}: first mismatch at index {i}: got {:?}, oracle {:?}",
            got[i], want[i]
        ))),
    }
}

fn read_file(p: &PathBuf) -> CliResult<Vec<u8>> {
    fs::read(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
}

fn load_graph(g: &GraphArgs, seed: u64) -> CliResult<Graph> {
    if let Some(p) = &g.input {
        let bytes = read_file(p)?;
        let text = String::from_utf8(bytes).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
        return Ok(parse_edge_list(&text)?);
    }
    Ok(match g.gen {
        GenKind::Random => gen_random(g.n, g.m, g.max_w, seed)?,
        GenKind::Grid => {
            let side = (g.n as f64).sqrt().ceil() as usize;
            gen_grid(side.max(1), g.n.div_ceil(side.max(1)).max(1), g.max_w, seed)?
        }
    })
}

fn random_string(rng: &mut ChaCha8Rng, len: usize, sigma: u8) -> Vec<u8> {
    (0..len).map(|_| b'a' + rng.gen_range(0..sigma.max(1))).collect()
}

fn parse_tile(s: &str) -> CliResult<TileParams> {
    let bad = || AramError::Argument(format!("tile must look like HxK, got {s:?}"));
    let (h, k) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let h = h.trim().parse().map_err(|_| bad())?;
    let k = k.trim().parse().map_err(|_| bad())?;
    Ok(TileParams::new(h, k)?)
}

fn parse_list<T: std::str::FromStr>(what: &str, s: &str) -> CliResult<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| {
            x.parse()
                .map_err(|_| CliError::Aram(AramError::Argument(format!("bad {what} value {x:?}"))))
        })
        .collect()
}

fn variant_of(name: &str) -> CliResult<SsspVariant> {
    SsspVariant::ALL
        .into_iter()
        .find(|v| v.name() == name)
        .ok_or_else(|| CliError::Aram(AramError::Argument(format!("unknown variant {name:?}"))))
}

fn run_sssp(ctx: &Ctx, a: &SsspArgs) -> CliResult<Vec<String>> {
    let g = load_graph(&a.graph, ctx.seed)?;
    if a.source >= g.n() {
        return Err(AramError::Argument(format!("source {} out of range 0..{}", a.source, g.n())).into());
    }
    let variants: Vec<SsspVariant> = match a.variant {
        VariantArg::Fib => vec![SsspVariant::FibHeap],
        VariantArg::Bst => vec![SsspVariant::BstQueue],
        VariantArg::Phased => vec![SsspVariant::Phased],
        VariantArg::Auto => vec![select_variant(g.n(), g.m(), ctx.params)],
        VariantArg::All => SsspVariant::ALL.to_vec(),
    };
    let oracle = ctx.verify(g.n(), VERIFY_MAX_N).then(|| oracle_sssp(&g, a.source));
    let mut rows = vec![];
    for v in variants {
        let r = sssp(&g, a.source, v, ctx.params)?;
        if let Some(want) = &oracle {
            first_mismatch(&format!("sssp/{}", v.name()), &r.dist, want)?;
        }
        let phases = r
            .phases
            .as_ref()
            .map_or(String::new(), |p| format!(";phases={}", p.phases));
        rows.push(r.meter.csv_row(
            &format!("sssp-{}", v.name()),
            g.n(),
            g.m(),
            &ctx.extra(&format!("source={}{phases}", a.source)),
        ));
    }
    Ok(rows)
}

fn run_mst(ctx: &Ctx, a: &MstArgs) -> CliResult<Vec<String>> {
    let g = load_graph(&a.graph, ctx.seed)?.to_undirected();
    let algos: Vec<(&str, MstAlgo)> = {
        let all = [
            ("prim-fib", MstAlgo::Prim(SsspVariant::FibHeap)),
            ("prim-bst", MstAlgo::Prim(SsspVariant::BstQueue)),
            ("prim-phased", MstAlgo::Prim(SsspVariant::Phased)),
            ("kruskal", MstAlgo::Kruskal),
            ("boruvka", MstAlgo::Boruvka),
        ];
        match a.algo {
            MstArg::All => all.to_vec(),
            one => vec![all[one as usize]],
        }
    };
    let oracle = ctx.verify(g.n(), VERIFY_MAX_N).then(|| oracle_mst(&g));
    let mut rows = vec![];
    for (name, algo) in algos {
        let r = mst(&g, algo, ctx.params)?;
        if let Some((w, _)) = &oracle {
            if r.total_weight != *w {
                return Err(CliError::Verify(format!(
                    "mst/{name}: weight {} vs oracle {w}",
                    r.total_weight
                )));
            }
        }
        let rounds = r.rounds.map_or(String::new(), |x| format!(";rounds={x}"));
        let extra = ctx.extra(&format!("weight={}{rounds}", r.total_weight));
        rows.push(r.meter.csv_row(&format!("mst-{name}"), g.n(), g.m(), &extra));
    }
    Ok(rows)
}

fn run_align(ctx: &Ctx, a: &AlignArgs) -> CliResult<Vec<String>> {
    let (x, y) = match (&a.a, &a.b) {
        (Some(pa), Some(pb)) => {
            let trim = |mut v: Vec<u8>| {
                while v.last().is_some_and(|c| c.is_ascii_whitespace()) {
                    v.pop();
                }
                v
            };
            (trim(read_file(pa)?), trim(read_file(pb)?))
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
            (
                random_string(&mut rng, a.len, a.sigma),
                random_string(&mut rng, a.len, a.sigma),
            )
        }
    };
    let policy = match a.policy {
        PolicyArg::Ed => Policy::EditDistance,
        PolicyArg::Lcs => Policy::Lcs,
    };
    let tile = match (&a.tile, a.auto) {
        (Some(t), _) => parse_tile(t)?,
        (None, Some(AutoArg::Q)) => choose_tile(x.len(), y.len(), ctx.params, Objective::MinimizeQ),
        (None, _) => choose_tile(x.len(), y.len(), ctx.params, Objective::MinimizeWork),
    };
    let r = align(&x, &y, policy, tile, ctx.params, a.trace)?;
    if ctx.verify(x.len().max(y.len()), VERIFY_MAX_LEN) {
        let want = oracle_align(&x, &y, policy);
        if r.distance != want {
            return Err(CliError::Verify(format!(
                "align: distance {} vs oracle {want}",
                r.distance
            )));
        }
        if let Some(p) = &r.path {
            if path_weight(&x, &y, policy, p) != Some(want) {
                return Err(CliError::Verify("align: recovered path is not optimal".into()));
            }
        }
    }
    let name = match policy {
        Policy::EditDistance => "align-ed",
        Policy::Lcs => "align-lcs",
    };
    let extra = ctx.extra(&format!("distance={};tile={tile}", r.distance));
    Ok(vec![r.meter.csv_row(name, x.len(), y.len(), &extra)])
}

fn run_apsp(ctx: &Ctx, a: &ApspArgs) -> CliResult<Vec<String>> {
    let g = load_graph(&a.graph, ctx.seed)?;
    let (t, snap) = apsp(&g, ctx.params)?;
    if ctx.verify(g.n(), 256) {
        first_mismatch("apsp", &t.d, &oracle_apsp(&g))?;
    }
    if let Some(p) = &a.matrix {
        let mut s = String::new();
        for i in 0..t.n {
            let row: Vec<String> = (0..t.n)
                .map(|j| match t.dist(i, j) {
                    crate::INF => "inf".to_string(),
                    d => d.to_string(),
                })
                .collect();
            writeln!(s, "{}", row.join(",")).unwrap();
        }
        fs::write(p, s).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
    }
    Ok(vec![snap.csv_row("apsp", g.n(), g.m(), &ctx.extra(""))])
}

fn fft_point(params: CostParams, seed: u64, log2n: u32, verify: bool) -> CliResult<MeterSnapshot> {
    if log2n > 26 {
        return Err(AramError::Argument(format!("log2n={log2n} is too large")).into());
    }
    let n = 1usize << log2n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v: Vec<Word> = (0..n).map(|_| rng.gen_range(0..P)).collect();
    let (out, snap) = eval_fft(&v, params)?;
    if verify {
        first_mismatch("fft", &out, &oracle_fft(&v)?)?;
    }
    Ok(snap)
}

fn run_fft(ctx: &Ctx, a: &FftArgs) -> CliResult<Vec<String>> {
    let verify = ctx.verify.unwrap_or(a.log2n <= 16);
    let snap = fft_point(ctx.params, ctx.seed, a.log2n, verify)?;
    Ok(vec![snap.csv_row(
        "fft",
        1 << a.log2n,
        0,
        &ctx.extra(&format!("log2n={}", a.log2n)),
    )])
}

fn run_sort(ctx: &Ctx, a: &SortArgs) -> CliResult<Vec<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let keys: Vec<Word> = (0..a.n).map(|_| rng.gen_range(0..1u64 << 40)).collect();
    let meter = CostMeter::new(ctx.params);
    let input = SlowArray::from_setup(&meter, keys.clone());
    let out = we_sort(&meter, &input).into_inner();
    if ctx.verify(a.n, 1_000_000) {
        let mut want = keys;
        want.sort_unstable();
        first_mismatch("sort", &out, &want)?;
    }
    Ok(vec![meter.snapshot().csv_row("sort", a.n, 0, &ctx.extra(""))])
}

fn run_bfs(ctx: &Ctx, a: &BfsArgs) -> CliResult<Vec<String>> {
    let g = load_graph(&a.graph, ctx.seed)?;
    if a.source >= g.n() {
        return Err(AramError::Argument(format!("source {} out of range 0..{}", a.source, g.n())).into());
    }
    let meter = CostMeter::new(ctx.params);
    let (name, got, want) = if a.dfs {
        ("dfs", dfs(&g, a.source, &meter)?.into_inner(), oracle_dfs(&g, a.source))
    } else {
        ("bfs", bfs(&g, a.source, &meter)?.into_inner(), oracle_bfs(&g, a.source))
    };
    if ctx.verify(g.n(), VERIFY_MAX_N) {
        first_mismatch(name, &got, &want)?;
    }
    Ok(vec![meter.snapshot().csv_row(
        name,
        g.n(),
        g.m(),
        &ctx.extra(&format!("source={}", a.source)),
    )])
}

fn run_sweep(ctx: &Ctx, a: &SweepArgs) -> CliResult<Vec<String>> {
    let omegas: Vec<u64> = parse_list("omega", &a.omegas)?;
    let ms: Vec<usize> = parse_list("M", &a.ms)?;
    let ns: Vec<usize> = parse_list("n", &a.ns)?;
    let what: Vec<String> = parse_list("variant/tile", &a.what)?;
    let mut grid = vec![];
    for &n in &ns {
        for &m in &ms {
            for &w in &omegas {
                for x in &what {
                    grid.push((n, m, w, x.clone()));
                }
            }
        }
    }
    let seed = ctx.seed;
    let verify = ctx.verify;
    let degree = a.degree;
    let target = a.target;
    let rows: Vec<CliResult<String>> = grid
        .par_iter()
        .map(|(n, m, w, x)| -> CliResult<String> {
            let params = CostParams::new(*m, *w)?;
            let pctx = Ctx { params, seed, verify };
            match target {
                SweepTarget::Sssp => {
                    let g = gen_random(*n, n * degree, 1000, seed)?;
                    let v = variant_of(x)?;
                    let r = sssp(&g, 0, v, params)?;
                    if pctx.verify(*n, VERIFY_MAX_N) {
                        first_mismatch("sssp", &r.dist, &oracle_sssp(&g, 0))?;
                    }
                    let phases = r
                        .phases
                        .as_ref()
                        .map_or(String::new(), |p| format!(";phases={}", p.phases));
                    Ok(r.meter.csv_row(
                        &format!("sssp-{}", v.name()),
                        g.n(),
                        g.m(),
                        &pctx.extra(phases.trim_start_matches(';')),
                    ))
                }
                SweepTarget::Align => {
                    let side: usize = x
                        .parse()
                        .map_err(|_| CliError::Aram(AramError::Argument(format!("bad tile side {x:?}"))))?;
                    let tile = TileParams::new(side, side)?;
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let s1 = random_string(&mut rng, *n, 4);
                    let s2 = random_string(&mut rng, *n, 4);
                    let r = align(&s1, &s2, Policy::Lcs, tile, params, false)?;
                    if pctx.verify(*n, VERIFY_MAX_LEN) && r.distance != oracle_align(&s1, &s2, Policy::Lcs) {
                        return Err(CliError::Verify(format!("align n={n} tile={tile}")));
                    }
                    Ok(r.meter
                        .csv_row("align-lcs", *n, *n, &pctx.extra(&format!("tile={tile}"))))
                }
                SweepTarget::Fft => {
                    let log2n = *n as u32;
                    let snap = fft_point(params, seed, log2n, pctx.verify.unwrap_or(log2n <= 16))?;
                    Ok(snap.csv_row("fft", 1 << log2n, 0, &pctx.extra(&format!("log2n={log2n}"))))
                }
            }
        })
        .collect();
    rows.into_iter().collect()
}

/// Run a parsed command line; returns the CSV text (header included).
pub fn run(cli: &Cli) -> CliResult<String> {
    let params = CostParams::new(cli.fast, cli.omega)?;
    let verify = if cli.no_verify {
        Some(false)
    } else if cli.verify {
        Some(true)
    } else {
        None
    };
    let ctx = Ctx {
        params,
        seed: cli.seed,
        verify,
    };
    let rows = match &cli.cmd {
        Cmd::Sssp(a) => run_sssp(&ctx, a)?,
        Cmd::Mst(a) => run_mst(&ctx, a)?,
        Cmd::Align(a) => run_align(&ctx, a)?,
        Cmd::Apsp(a) => run_apsp(&ctx, a)?,
        Cmd::Fft(a) => run_fft(&ctx, a)?,
        Cmd::Sort(a) => run_sort(&ctx, a)?,
        Cmd::Bfs(a) => run_bfs(&ctx, a)?,
        Cmd::Sweep(a) => run_sweep(&ctx, a)?,
    };
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    Ok(out)
}

/// Full entry point: parse `argv`, run, print or save the CSV. Returns the
/// process exit code.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(csv) => match &cli.output {
            Some(p) => match fs::write(p, csv) {
                Ok(()) => 0,
                Err(e) => {
                    eprintln!("error: {}: {e}", p.display());
                    2
                }
            },
            None => {
                print!("{csv}");
                0
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
