//! The `quartic-census` command line: argument parsing, CSV/JSON rendering,
//! reference-table ingestion and exit codes.

use crate::analytic::{constant_c, main_term_constant, Hp, WORKING_DIGITS};
use crate::census::{self, CensusOptions, DiscRow};
use crate::counting::FieldEngine;
use crate::quadfield::QuadField;
use crate::selmer::GaloisType;
use crate::{Error, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;

/// Largest integer that survives a round trip through an IEEE double.
const MAX_EXACT_JSON: u64 = 1 << 53;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotFundamental(_) | Error::ImaginaryField(_) | Error::InvalidArgument(_) => EXIT_USAGE,
        Error::Data { .. } | Error::Io(_) => EXIT_DATA,
        Error::Invariant(_) | Error::NotASquareClass => EXIT_INVARIANT,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Direct,
    Characters,
    Both,
}

#[derive(Debug, Parser)]
#[command(name = "quartic-census", version, about = "Quadratic extensions of quadratic fields and the quartic census")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output format; census and count-relative default to csv, the rest to json.
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Significant digits for high-precision values (30 to 60).
    #[arg(long, global = true, default_value_t = 40)]
    pub precision_digits: u32,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count quadratic extensions K/k with N(disc K/k) <= Y.
    CountRelative {
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        #[arg(long)]
        bound: f64,
        #[arg(long, value_enum, default_value_t = Engine::Both)]
        engine: Engine,
    },
    /// Quartic fields with |disc| <= X by Galois type.
    Census {
        #[arg(long)]
        bound: u64,
        /// Per-quadratic-field rows at X instead of the summary grid.
        #[arg(long)]
        breakdown: bool,
        /// Reference table (abs_disc,galois_type,count) to diff against.
        #[arg(long)]
        compare: Option<PathBuf>,
    },
    /// Certified interval for the D4 constant from fields with |disc| <= B.
    ConstantC {
        #[arg(long)]
        truncation: u64,
    },
    /// E_k(Y) = N_k(Y) - c_k Y on a grid such as 1e2:1e5:log10.
    ErrorScan {
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        #[arg(long)]
        grid: String,
    },
    /// Error budget of the split at Z in {X^1/4, X^3/8, X^1/2}.
    Zsplit {
        #[arg(long)]
        bound: u64,
    },
    /// Least-squares fit of N(V4, X) = D X^1/2 (log X)^2.
    FitSecondary {
        #[arg(long)]
        grid: String,
    },
    /// Both counting engines for all |disc| <= max-disc and Y = 2^j.
    Engines {
        #[arg(long, default_value_t = 200)]
        max_disc: u64,
        #[arg(long, default_value_t = 12)]
        max_j: u32,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub precision_digits: u32,
    pub thread_count: usize,
    pub output_format: OutputFormat,
}

impl RunConfig {
    pub fn new(precision_digits: u32, thread_count: usize, output_format: OutputFormat) -> Result<Self> {
        if !(30..=WORKING_DIGITS).contains(&precision_digits) {
            return Err(Error::InvalidArgument(format!(
                "precision digits must lie in 30..={WORKING_DIGITS}, got {precision_digits}"
            )));
        }
        if thread_count == 0 {
            return Err(Error::InvalidArgument("thread count must be positive".into()));
        }
        Ok(RunConfig { precision_digits, thread_count, output_format })
    }
}

/// What a command produced: text for stdout, diagnostics for stderr and the
/// exit status.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Output { stdout, stderr: String::new(), code: EXIT_OK }
    }

    pub fn from_error(e: &Error) -> Self {
        Output { stdout: String::new(), stderr: format!("error: {e}\n"), code: exit_code(e) }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run_from<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                Output::ok(text)
            } else {
                Output { stdout: String::new(), stderr: text, code }
            }
        }
    }
}

pub fn run(cli: &Cli) -> Output {
    let default_format = match cli.command {
        Command::CountRelative { .. } | Command::Census { .. } | Command::Engines { .. } => OutputFormat::Csv,
        _ => OutputFormat::Json,
    };
    let threads = cli.threads.unwrap_or_else(rayon::current_num_threads);
    let cfg = match RunConfig::new(cli.precision_digits, threads, cli.format.unwrap_or(default_format)) {
        Ok(c) => c,
        Err(e) => return Output::from_error(&e),
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cfg.thread_count).build() {
        Ok(p) => p,
        Err(e) => return Output::from_error(&Error::InvalidArgument(format!("thread pool: {e}"))),
    };
    pool.install(|| execute(&cli.command, &cfg))
}

fn execute(cmd: &Command, cfg: &RunConfig) -> Output {
    let res = match cmd {
        Command::CountRelative { disc, bound, engine } => return count_relative(*disc, *bound, *engine, cfg),
        Command::Census { bound, breakdown, compare } => {
            return census_cmd(*bound, *breakdown, compare.as_deref(), cfg)
        }
        Command::ConstantC { truncation } => constant_c_cmd(*truncation, cfg),
        Command::ErrorScan { disc, grid } => error_scan_cmd(*disc, grid, cfg),
        Command::Zsplit { bound } => zsplit_cmd(*bound, cfg),
        Command::FitSecondary { grid } => fit_cmd(grid, cfg),
        Command::Engines { max_disc, max_j } => return engines_cmd(*max_disc, *max_j, cfg),
    };
    match res {
        Ok(s) => Output::ok(s),
        Err(e) => Output::from_error(&e),
    }
}

fn int(n: u64) -> Value {
    if n <= MAX_EXACT_JSON {
        json!(n)
    } else {
        json!(n.to_string())
    }
}

fn signed(n: i128) -> Value {
    if n.unsigned_abs() <= MAX_EXACT_JSON as u128 {
        json!(n as i64)
    } else {
        json!(n.to_string())
    }
}

fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

fn count_relative(disc: i64, bound: f64, engine: Engine, cfg: &RunConfig) -> Output {
    let run = || -> Result<(Option<u64>, Option<i128>, u64)> {
        let k = QuadField::new(disc)?;
        let eng = FieldEngine::new(&k)?;
        let y = crate::counting::floor_bound(bound)?;
        let table = eng.prime_table(y)?;
        let direct = match engine {
            Engine::Characters => None,
            _ => Some(eng.count_direct_with(&table, y, false)?.total),
        };
        let chars = match engine {
            Engine::Direct => None,
            _ => Some(eng.count_characters_with(&table, y)?),
        };
        Ok((direct, chars, y))
    };
    let (direct, chars, y) = match run() {
        Ok(v) => v,
        Err(e) => return Output::from_error(&e),
    };
    let verdict = match (direct, chars) {
        (Some(a), Some(b)) if a as i128 == b => "match",
        (Some(_), Some(_)) => "mismatch",
        _ => "",
    };
    let stdout = match cfg.output_format {
        OutputFormat::Csv => csv_table(
            &["disc", "bound", "direct", "characters", "verdict"],
            [vec![
                disc.to_string(),
                y.to_string(),
                direct.map(|v| v.to_string()).unwrap_or_default(),
                chars.map(|v| v.to_string()).unwrap_or_default(),
                verdict.to_string(),
            ]],
        ),
        OutputFormat::Json => render_json(&json!({
            "command": "count-relative",
            "disc": disc,
            "bound": int(y),
            "direct": direct.map(int),
            "characters": chars.map(signed),
            "verdict": verdict,
            "precision": {"counts": "exact"},
        })),
    };
    let mut out = Output::ok(stdout);
    if verdict == "mismatch" {
        out.stderr = format!("error: engines disagree for disc {disc} at Y = {y}\n");
        out.code = EXIT_INVARIANT;
    }
    out
}

/// Bounds reported by `census`: the powers of ten below `x`, then `x`.
pub fn census_grid(x: u64) -> Vec<u64> {
    let mut out: Vec<u64> = std::iter::successors(Some(10u64), |p| p.checked_mul(10)).take_while(|&p| p < x).collect();
    out.push(x);
    out
}

/// Summary rows `X,total,n_d4,n_c4,n_v4,identity_check`.
pub fn census_csv(bounds: &[u64]) -> Result<String> {
    let mut rows = Vec::new();
    for &x in bounds {
        let r = census::quad_over_quad_total(x)?;
        let ok = r.identity_holds() && r.n_v4 == census::v4_independent(x);
        rows.push(vec![
            x.to_string(),
            r.total.to_string(),
            r.n_d4.to_string(),
            r.n_c4.to_string(),
            r.n_v4.to_string(),
            if ok { "ok" } else { "FAIL" }.to_string(),
        ]);
    }
    Ok(csv_table(&["X", "total", "n_d4", "n_c4", "n_v4", "identity_check"], rows))
}

/// A reference census table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReferenceTable {
    pub rows: Vec<DiscRow>,
    pub provenance: String,
}

impl ReferenceTable {
    /// Reads `abs_disc,galois_type,count` rows; lines starting with `#` are
    /// provenance notes.
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut notes = vec![source.to_string()];
        let mut body = String::new();
        // line numbers below refer to the original file
        let mut line_of = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if let Some(note) = line.strip_prefix('#') {
                notes.push(note.trim().to_string());
            } else if !line.trim().is_empty() {
                body.push_str(line);
                body.push('\n');
                line_of.push(i + 1);
            }
        }
        let data = |idx: usize, msg: String| Error::Data { line: line_of.get(idx).copied().unwrap_or(0), msg };
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
        let header = rdr.headers().map_err(|e| data(0, e.to_string()))?.clone();
        if header.iter().map(str::trim).collect::<Vec<_>>() != ["abs_disc", "galois_type", "count"] {
            return Err(data(0, format!("expected header abs_disc,galois_type,count, found {:?}", header.as_slice())));
        }
        let mut rows: Vec<DiscRow> = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let idx = i + 1;
            let rec = rec.map_err(|e| data(idx, e.to_string()))?;
            if rec.len() != 3 {
                return Err(data(idx, format!("expected 3 fields, found {}", rec.len())));
            }
            let abs_disc: u64 = rec[0].trim().parse().map_err(|_| data(idx, format!("bad abs_disc {:?}", &rec[0])))?;
            let galois_type: GaloisType =
                rec[1].trim().parse().map_err(|_| data(idx, format!("bad galois_type {:?}", &rec[1])))?;
            let count: u64 = rec[2].trim().parse().map_err(|_| data(idx, format!("bad count {:?}", &rec[2])))?;
            let row = DiscRow { abs_disc, galois_type, count };
            if let Some(prev) = rows.last() {
                if prev.abs_disc > abs_disc {
                    return Err(data(idx, "rows not sorted by abs_disc".into()));
                }
                if rows.iter().rev().take_while(|r| r.abs_disc == abs_disc).any(|r| r.galois_type == galois_type) {
                    return Err(data(idx, format!("duplicate row for {abs_disc},{galois_type}")));
                }
            }
            rows.push(row);
        }
        Ok(ReferenceTable { rows, provenance: notes.join("; ") })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let mut text = String::new();
        std::fs::File::open(path)?.read_to_string(&mut text)?;
        Self::parse(&text, &path.display().to_string())
    }
}

/// Differences between computed and reference rows with `abs_disc <= x`.
pub fn diff_tables(ours: &[DiscRow], reference: &ReferenceTable, x: u64) -> Vec<String> {
    let key = |r: &DiscRow| (r.abs_disc, r.galois_type);
    let mut merged: BTreeMap<(u64, GaloisType), (u64, u64)> = BTreeMap::new();
    for r in ours.iter().filter(|r| r.abs_disc <= x) {
        merged.entry(key(r)).or_default().0 = r.count;
    }
    for r in reference.rows.iter().filter(|r| r.abs_disc <= x) {
        merged.entry(key(r)).or_default().1 = r.count;
    }
    merged
        .into_iter()
        .filter(|(_, (a, b))| a != b)
        .map(|((d, t), (a, b))| format!("{d},{t}: computed {a}, reference {b}"))
        .collect()
}

fn census_cmd(x: u64, breakdown: bool, compare: Option<&Path>, cfg: &RunConfig) -> Output {
    if x == 0 {
        return Output::from_error(&Error::InvalidArgument("--bound must be at least 1".into()));
    }
    let reference = match compare.map(ReferenceTable::read).transpose() {
        Ok(r) => r,
        Err(e) => return Output::from_error(&e),
    };
    let opts = CensusOptions { audit: true, disc_table: reference.is_some() };
    let body = || -> Result<(String, Option<census::CensusResult>)> {
        match (breakdown, cfg.output_format) {
            (false, OutputFormat::Csv) => {
                let last = reference.is_some().then(|| census::census(x, opts)).transpose()?;
                Ok((census_csv(&census_grid(x))?, last))
            }
            _ => {
                let r = census::census(x, opts)?;
                let text = match cfg.output_format {
                    OutputFormat::Csv => csv_table(
                        &["disc", "bound", "count", "n_c4", "n_v4", "n_d4"],
                        r.per_field.iter().map(|f| {
                            vec![
                                f.disc.to_string(),
                                f.bound.to_string(),
                                f.count.to_string(),
                                f.by_type.c4.to_string(),
                                f.by_type.v4.to_string(),
                                f.by_type.d4.to_string(),
                            ]
                        }),
                    ),
                    OutputFormat::Json => {
                        let grid = census_grid(x)
                            .into_iter()
                            .map(|b| {
                                let s = if b == x { r.clone() } else { census::quad_over_quad_total(b)? };
                                Ok(json!({
                                    "X": int(b),
                                    "total": int(s.total),
                                    "n_d4": int(s.n_d4),
                                    "n_c4": int(s.n_c4),
                                    "n_v4": int(s.n_v4),
                                    "identity_check": s.identity_holds() && s.n_v4 == census::v4_independent(b),
                                }))
                            })
                            .collect::<Result<Vec<_>>>()?;
                        let mut obj = json!({
                            "command": "census",
                            "X": int(x),
                            "rows": grid,
                            "d4_audit": r.audit.map(|a| json!({"descriptors": int(a.descriptors), "pairs": int(a.pairs)})),
                            "precision": {"counts": "exact"},
                        });
                        if breakdown {
                            obj["per_field"] = r
                                .per_field
                                .iter()
                                .map(|f| {
                                    json!({
                                        "disc": f.disc,
                                        "bound": int(f.bound),
                                        "count": int(f.count),
                                        "n_c4": int(f.by_type.c4),
                                        "n_v4": int(f.by_type.v4),
                                        "n_d4": int(f.by_type.d4),
                                    })
                                })
                                .collect();
                        }
                        render_json(&obj)
                    }
                };
                Ok((text, Some(r)))
            }
        }
    };
    let (stdout, last) = match body() {
        Ok(v) => v,
        Err(e) => return Output::from_error(&e),
    };
    let mut out = Output::ok(stdout);
    if let (Some(reference), Some(r)) = (reference, last) {
        let diffs = diff_tables(r.disc_table.as_deref().unwrap_or(&[]), &reference, x);
        if !diffs.is_empty() {
            out.stderr = format!(
                "error: {} rows differ from reference ({})\n{}\n",
                diffs.len(),
                reference.provenance,
                diffs.join("\n")
            );
            out.code = EXIT_DATA;
        }
    }
    out
}

fn constant_c_cmd(b: u64, cfg: &RunConfig) -> Result<String> {
    let c = constant_c(b)?;
    let (lo, hi) = c.value_interval();
    let fields = c.fields as u64;
    Ok(match cfg.output_format {
        OutputFormat::Json => render_json(&json!({
            "command": "constant-c",
            "truncation": int(b),
            "fields": int(fields),
            "partial_sum": c.partial_sum,
            "tail_bound": c.tail_bound,
            "rounding_bound": c.rounding_bound,
            "lo": lo,
            "hi": hi,
            "midpoint": c.midpoint(),
            "width": c.width(),
            "precision": {
                "arithmetic": "binary64",
                "interval": "certified: partial sum +- (tail bound + rounding bound)",
            },
        })),
        OutputFormat::Csv => csv_table(
            &["truncation", "fields", "lo", "hi", "midpoint", "width"],
            [vec![
                b.to_string(),
                fields.to_string(),
                lo.to_string(),
                hi.to_string(),
                c.midpoint().to_string(),
                c.width().to_string(),
            ]],
        ),
    })
}

fn error_scan_cmd(disc: i64, grid: &str, cfg: &RunConfig) -> Result<String> {
    let k = QuadField::new(disc)?;
    let ys = census::parse_grid(grid)?;
    let scan = census::error_scan(&k, &ys)?;
    Ok(match cfg.output_format {
        OutputFormat::Json => {
            let main = Hp::new().decimal(&main_term_constant(&k)?, cfg.precision_digits as usize);
            render_json(&json!({
                "command": "error-scan",
                "disc": disc,
                "main_term": main,
                "rows": scan.rows.iter().map(|r| json!({
                    "Y": int(r.y),
                    "count": int(r.count),
                    "main": r.main,
                    "error": r.error,
                    "ratio": r.ratio,
                })).collect::<Vec<_>>(),
                "sup_ratio": scan.sup_ratio,
                "precision": {
                    "counts": "exact",
                    "main_term_digits": cfg.precision_digits,
                    "main_error_ratio": "binary64",
                },
            }))
        }
        OutputFormat::Csv => csv_table(
            &["Y", "count", "main", "error", "ratio"],
            scan.rows.iter().map(|r| {
                vec![r.y.to_string(), r.count.to_string(), r.main.to_string(), r.error.to_string(), r.ratio.to_string()]
            }),
        ),
    })
}

fn zsplit_cmd(x: u64, cfg: &RunConfig) -> Result<String> {
    let r = census::z_split_experiment(x)?;
    Ok(match cfg.output_format {
        OutputFormat::Json => render_json(&json!({
            "command": "zsplit",
            "X": int(x),
            "rows": r.rows.iter().map(|row| json!({
                "Z": row.label,
                "z": row.z,
                "measured": row.measured,
                "crude": row.crude,
                "total": row.total,
            })).collect::<Vec<_>>(),
            "best": r.best,
            "tail_sum": r.tail_sum,
            "tail_shape": r.tail_shape,
            "precision": {"measured": "binary64", "tail_sum": "upper estimate"},
        })),
        OutputFormat::Csv => csv_table(
            &["Z", "z", "measured", "crude", "total"],
            r.rows.iter().map(|row| {
                vec![
                    row.label.to_string(),
                    row.z.to_string(),
                    row.measured.to_string(),
                    row.crude.to_string(),
                    row.total.to_string(),
                ]
            }),
        ),
    })
}

fn fit_cmd(grid: &str, cfg: &RunConfig) -> Result<String> {
    let xs = census::parse_grid(grid)?;
    let f = census::secondary_fit(&xs)?;
    Ok(match cfg.output_format {
        OutputFormat::Json => render_json(&json!({
            "command": "fit-secondary",
            "model": "N(V4, X) = D X^1/2 (log X)^2",
            "fitted_D": f.fitted_d,
            "rows": (0..f.grid.len()).map(|i| json!({
                "X": int(f.grid[i]),
                "n_v4": int(f.counts[i]),
                "residual": f.residuals[i],
                "relative_residual": f.relative_residuals[i],
                "secondary_prediction": f.secondary_prediction[i],
            })).collect::<Vec<_>>(),
            "precision": {"counts": "exact", "fit": "binary64"},
        })),
        OutputFormat::Csv => csv_table(
            &["X", "n_v4", "residual", "relative_residual", "secondary_prediction"],
            (0..f.grid.len()).map(|i| {
                vec![
                    f.grid[i].to_string(),
                    f.counts[i].to_string(),
                    f.residuals[i].to_string(),
                    f.relative_residuals[i].to_string(),
                    f.secondary_prediction[i].to_string(),
                ]
            }),
        ),
    })
}

fn engine_rows_csv(rows: &[census::EngineRow]) -> String {
    csv_table(
        &["disc", "Y", "direct", "characters"],
        rows.iter().map(|r| vec![r.disc.to_string(), r.y.to_string(), r.direct.to_string(), r.characters.to_string()]),
    )
}

/// Rows `disc,Y,direct,characters` of [`census::engine_table`].
pub fn engines_csv(max_disc: u64, max_j: u32) -> Result<String> {
    Ok(engine_rows_csv(&census::engine_table(max_disc, max_j)?))
}

fn engines_cmd(max_disc: u64, max_j: u32, cfg: &RunConfig) -> Output {
    if max_j > 40 {
        return Output::from_error(&Error::InvalidArgument("--max-j must be at most 40".into()));
    }
    let rows = match census::engine_table(max_disc, max_j) {
        Ok(r) => r,
        Err(e) => return Output::from_error(&e),
    };
    let bad = rows.iter().filter(|r| r.direct as i128 != r.characters).count();
    let stdout = match cfg.output_format {
        OutputFormat::Csv => engine_rows_csv(&rows),
        OutputFormat::Json => render_json(&json!({
            "command": "engines",
            "rows": rows.iter().map(|r| json!({
                "disc": r.disc,
                "Y": int(r.y),
                "direct": int(r.direct),
                "characters": signed(r.characters),
            })).collect::<Vec<_>>(),
            "mismatches": bad,
            "precision": {"counts": "exact"},
        })),
    };
    let mut out = Output::ok(stdout);
    if bad > 0 {
        out.stderr = format!("error: engines disagree on {bad} rows\n");
        out.code = EXIT_INVARIANT;
    }
    out
}
