//! `fidkit`: generate datasets, verify dictionaries against the oracle,
//! measure space and query cost, and merge measurements.

mod record;

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use fidkit::bits::ceil_log2;
use fidkit::dataset::{self, Dataset, Format, Kind};
use fidkit::recfid::{Params, RecursiveFid};
use fidkit::sbtree::{default_branching, DescentCache, PatriciaTrie};
use fidkit::verify::{self, Fault};
use fidkit::{batch, binom, probe};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use record::{BatchTimes, BenchRecord, Breakdown, CacheStats, Percentiles, Probes, CSV_HEADER};

const EXIT_VERIFY: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;
const CACHE_ENV: &str = "FIDKIT_TABLE_CACHE";

#[derive(Parser, Debug)]
#[command(name = "fidkit", version, about = "Succinct dictionary profiler")]
struct Cli {
    /// Seed for dataset generation and query sampling.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Dataset file format for output.
    #[arg(long, global = true, default_value = "text")]
    format: String,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Structure parameters, e.g. `s=2,v=4,w=64,complement=auto`.
    #[arg(long, global = true)]
    params: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a sorted dataset.
    Gen {
        /// uniform, clustered[:C], arithmetic or dense-runs.
        #[arg(long, default_value = "uniform")]
        kind: String,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u64,
        /// Output file; standard output when absent.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Check every operation against the reference oracle.
    Verify {
        dataset: PathBuf,
        /// Random queries per operation, on top of the boundary cases.
        #[arg(long, default_value_t = 10_000)]
        queries: usize,
        /// Where to write the reproducer dataset on failure.
        #[arg(long)]
        repro: Option<PathBuf>,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Build once, then report space, redundancy, timings and probes.
    Bench {
        dataset: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        queries: usize,
        #[arg(long, default_value_t = 5)]
        runs: usize,
        /// Also write the JSON record to this file.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Merge bench records (JSON files) into CSV, or a JSON array with --json.
    Report {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

/// A failure together with its exit code.
struct Fail {
    code: u8,
    err: anyhow::Error,
}

trait Classify<T> {
    fn usage(self) -> Result<T, Fail>;
    fn io(self) -> Result<T, Fail>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn usage(self) -> Result<T, Fail> {
        self.map_err(|e| Fail {
            code: EXIT_USAGE,
            err: e.into(),
        })
    }

    fn io(self) -> Result<T, Fail> {
        self.map_err(|e| Fail {
            code: EXIT_IO,
            err: e.into(),
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Fail> {
    let format: Format = cli.format.parse().usage()?;
    let params: Option<Params> = cli.params.as_deref().map(str::parse).transpose().usage()?;
    match cli.command {
        Command::Gen { kind, n, m, out } => {
            let kind: Kind = kind.parse().usage()?;
            let data = dataset::generate(kind, n, m, cli.seed).usage()?;
            write_dataset(&data, format, out.as_deref())?;
            if out.is_some() && !cli.json {
                emit(&format!("wrote {n} values over [0, {m})\n"));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            dataset,
            queries,
            repro,
            inject_fault,
        } => {
            let data = read_dataset(&dataset)?;
            let grid = params.map_or_else(verify::default_grid, |p| vec![p]);
            let fault = inject_fault.then_some(Fault::RankPastThird);
            let outcome = verify::verify(&data, &grid, queries, cli.seed, fault).usage()?;
            match outcome.failure {
                None => {
                    if cli.json {
                        let v = serde_json::json!({
                            "status": "pass",
                            "configs": outcome.configs,
                            "checks": outcome.checks,
                        });
                        emit(&format!("{}\n", serde_json::to_string_pretty(&v).unwrap()));
                    } else {
                        emit(&format!(
                            "pass: {} configurations, {} checks\n",
                            outcome.configs, outcome.checks
                        ));
                    }
                    Ok(ExitCode::SUCCESS)
                }
                Some(f) => {
                    let path = repro.unwrap_or_else(|| dataset.with_extension("repro"));
                    write_dataset(&f.reproducer, Format::Text, Some(&path))?;
                    let mm = &f.mismatch;
                    if cli.json {
                        let v = serde_json::json!({
                            "status": "fail",
                            "params": f.params.to_string(),
                            "op": mm.op,
                            "arg": mm.arg,
                            "expected": mm.expected,
                            "actual": mm.actual,
                            "reproducer": path.display().to_string(),
                            "reproducer_n": f.reproducer.n(),
                            "reproducer_m": f.reproducer.m,
                        });
                        emit(&format!("{}\n", serde_json::to_string_pretty(&v).unwrap()));
                    } else {
                        emit(&format!(
                            "FAIL params={}\n  {}({}) expected {} got {}\n  reproducer: {} values over [0, {}) written to {}\n",
                            f.params,
                            mm.op,
                            mm.arg,
                            mm.expected,
                            mm.actual,
                            f.reproducer.n(),
                            f.reproducer.m,
                            path.display()
                        ));
                    }
                    Ok(ExitCode::from(EXIT_VERIFY))
                }
            }
        }
        Command::Bench {
            dataset,
            queries,
            runs,
            out,
        } => {
            let data = read_dataset(&dataset)?;
            let cache_budget = match std::env::var(CACHE_ENV) {
                Ok(v) => v
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| anyhow!("{CACHE_ENV} must be a byte count, got `{v}`"))
                    .usage()?,
                Err(_) => 0,
            };
            let rec = bench(
                &data,
                &dataset.display().to_string(),
                params.unwrap_or_default(),
                queries.max(1),
                runs.max(1),
                cli.seed,
                cache_budget,
            )
            .usage()?;
            let text = serde_json::to_string_pretty(&rec).unwrap();
            if let Some(path) = &out {
                std::fs::write(path, format!("{text}\n"))
                    .with_context(|| format!("writing {}", path.display()))
                    .io()?;
            }
            if cli.json {
                emit(&format!("{text}\n"));
            } else {
                print_bench(&rec);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Report { inputs, out } => {
            let mut records = Vec::new();
            for path in &inputs {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))
                    .io()?;
                records.extend(
                    parse_records(&text)
                        .with_context(|| format!("parsing {}", path.display()))
                        .io()?,
                );
            }
            let body = if cli.json {
                format!("{}\n", serde_json::to_string_pretty(&records).unwrap())
            } else {
                csv_table(&records).io()?
            };
            match out {
                Some(path) => std::fs::write(&path, body)
                    .with_context(|| format!("writing {}", path.display()))
                    .io()?,
                None => emit(&body),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// Writes to standard output; a closed pipe is not an error.
fn emit(s: &str) {
    let _ = io::stdout().lock().write_all(s.as_bytes());
}

fn csv_table(records: &[BenchRecord]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(r.csv_fields())?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// A file holds one record or an array of records.
fn parse_records(text: &str) -> anyhow::Result<Vec<BenchRecord>> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    Ok(if value.is_array() {
        serde_json::from_value(value)?
    } else {
        vec![serde_json::from_value(value)?]
    })
}

fn read_dataset(path: &Path) -> Result<Dataset, Fail> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .with_context(|| format!("reading {}", path.display()))
        .io()?;
    dataset::read(bytes.as_slice())
        .with_context(|| format!("parsing {}", path.display()))
        .io()
}

fn write_dataset(data: &Dataset, format: Format, path: Option<&Path>) -> Result<(), Fail> {
    match path {
        Some(p) => {
            let f = File::create(p)
                .with_context(|| format!("creating {}", p.display()))
                .io()?;
            dataset::write(data, format, BufWriter::new(f))
                .with_context(|| format!("writing {}", p.display()))
                .io()
        }
        None => dataset::write(data, format, io::stdout().lock())
            .context("writing output")
            .io(),
    }
}

fn median(mut xs: Vec<u64>) -> u64 {
    xs.sort_unstable();
    xs[xs.len() / 2]
}

fn percentile(sorted: &[u64], p: f64) -> u64 {
    let idx = ((sorted.len() as f64 - 1.0) * p).round() as usize;
    sorted[idx]
}

fn time_ns(f: impl FnOnce()) -> u64 {
    let t = Instant::now();
    f();
    t.elapsed().as_nanos() as u64
}

fn bench(
    data: &Dataset,
    name: &str,
    params: Params,
    queries: usize,
    runs: usize,
    seed: u64,
    cache_budget: usize,
) -> anyhow::Result<BenchRecord> {
    let start = Instant::now();
    let fid = RecursiveFid::build(&data.values, data.m, params)?;
    let build_seconds = start.elapsed().as_secs_f64();

    let report = fid.space_report();
    let bits_b = binom::binom_bits(data.n(), data.m)?;
    let breakdown = Breakdown {
        high: report.high(),
        low: report.low(),
        trees: report.trees(),
        multirank: report.multirank(),
        base: report.base,
        dual: report.dual,
    };
    anyhow::ensure!(
        breakdown.sum() == report.total,
        "space breakdown does not add up"
    );
    let redundancy = report.total as i64 - bits_b as i64;
    anyhow::ensure!(
        redundancy >= -64,
        "redundancy {redundancy} below the information bound"
    );

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = data.m;
    let positions: Vec<u64> = (0..queries).map(|_| rng.gen_range(0..=m)).collect();
    let preds: Vec<u64> = (0..queries).map(|_| rng.gen_range(0..m)).collect();
    let ordinals = |count: u64, rng: &mut ChaCha8Rng| -> Vec<u64> {
        if count == 0 {
            Vec::new()
        } else {
            (0..queries).map(|_| rng.gen_range(1..=count)).collect()
        }
    };
    let ones = ordinals(fid.count(true), &mut rng);
    let zeros = ordinals(fid.count(false), &mut rng);

    let mut p50 = Vec::new();
    let mut p90 = Vec::new();
    let mut p99 = Vec::new();
    let mut pmax = Vec::new();
    let mut seq = Vec::new();
    let mut par = Vec::new();
    for _ in 0..runs {
        let mut each: Vec<u64> = positions
            .iter()
            .map(|&i| {
                time_ns(|| {
                    std::hint::black_box(fid.rank(true, i).ok());
                })
            })
            .collect();
        each.sort_unstable();
        p50.push(percentile(&each, 0.5));
        p90.push(percentile(&each, 0.9));
        p99.push(percentile(&each, 0.99));
        pmax.push(*each.last().unwrap());
        seq.push(time_ns(|| {
            std::hint::black_box(batch::rank1_seq(&fid, &positions));
        }));
        #[cfg(feature = "parallel")]
        par.push(time_ns(|| {
            std::hint::black_box(batch::rank1_par(&fid, &positions));
        }));
    }
    let max_of = |v: Vec<u64>| v.into_iter().max().unwrap_or(0);
    let max_probes = Probes {
        rank: max_of(batch::rank1_probes(&fid, &positions)),
        select1: max_of(batch::select_probes(&fid, true, &ones)),
        select0: max_of(batch::select_probes(&fid, false, &zeros)),
        pred: max_of(batch::map(&preds, |&q| probe::measure(|| fid.pred(q)).1)),
    };
    let descent_cache = (cache_budget > 0).then(|| descent_cache_run(data, cache_budget, &preds));

    Ok(BenchRecord {
        dataset: name.to_string(),
        n: data.n(),
        m: data.m,
        params: params.to_string(),
        levels: fid.depth(),
        complemented: fid.is_complemented(),
        base_kind: report.base_kind.map(str::to_string),
        bits_total: report.total,
        bits_b,
        redundancy,
        breakdown,
        build_seconds,
        query_ns: Percentiles {
            p50: median(p50),
            p90: median(p90),
            p99: median(p99),
            max: median(pmax),
        },
        batch_ns: BatchTimes {
            seq: median(seq),
            par: (!par.is_empty()).then(|| median(par)),
        },
        max_probes,
        descent_cache,
    })
}

/// Blind descents through tries over consecutive key groups, memoized by a
/// shared table of the given byte budget.
fn descent_cache_run(data: &Dataset, budget: usize, queries: &[u64]) -> CacheStats {
    let width = ceil_log2(data.m).max(1);
    let b = default_branching(width);
    let tries: Vec<PatriciaTrie> = data
        .values
        .chunks(b)
        .take(4096)
        .map(|keys| PatriciaTrie::build(keys, width).expect("dataset keys are sorted and distinct"))
        .collect();
    let mut cache = DescentCache::new(budget, DescentCache::chunk_for(width, 0.25));
    if !tries.is_empty() {
        for (i, &q) in queries.iter().enumerate() {
            tries[i % tries.len()].blind_descend_cached(q, &mut cache);
        }
    }
    CacheStats {
        budget_bytes: budget,
        entries: cache.len(),
        hits: cache.hits,
        misses: cache.misses,
    }
}

fn print_bench(r: &BenchRecord) {
    let b = &r.breakdown;
    let mut out = io::stdout().lock();
    let _ = writeln!(out, "dataset     {}  (n = {}, m = {})", r.dataset, r.n, r.m);
    let _ = writeln!(out, "params      {}", r.params);
    let _ = writeln!(
        out,
        "levels      {}  base {}  complemented {}",
        r.levels,
        r.base_kind.as_deref().unwrap_or("none"),
        r.complemented
    );
    let _ = writeln!(
        out,
        "bits        total {}  bound {}  redundancy {}",
        r.bits_total, r.bits_b, r.redundancy
    );
    let _ = writeln!(
        out,
        "breakdown   high {}  low {}  trees {}  multirank {}  base {}  dual {}",
        b.high, b.low, b.trees, b.multirank, b.base, b.dual
    );
    let _ = writeln!(out, "build       {:.3} s", r.build_seconds);
    let q = &r.query_ns;
    let _ = writeln!(
        out,
        "rank ns     p50 {}  p90 {}  p99 {}  max {}",
        q.p50, q.p90, q.p99, q.max
    );
    match r.batch_ns.par {
        Some(par) => {
            let _ = writeln!(out, "batch ns    seq {}  par {}", r.batch_ns.seq, par);
        }
        None => {
            let _ = writeln!(out, "batch ns    seq {}", r.batch_ns.seq);
        }
    }
    let p = &r.max_probes;
    let _ = writeln!(
        out,
        "max probes  rank {}  select1 {}  select0 {}  pred {}",
        p.rank, p.select1, p.select0, p.pred
    );
    if let Some(c) = &r.descent_cache {
        let _ = writeln!(
            out,
            "descent     budget {} B  entries {}  hits {}  misses {}",
            c.budget_bytes, c.entries, c.hits, c.misses
        );
    }
}
