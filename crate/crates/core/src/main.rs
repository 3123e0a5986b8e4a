use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use spiderweb::capacity::{approximate_capacity, DEFAULT_TOLERANCE};
use spiderweb::channel::{copy_rng, corrupt_with, ChannelSpec, ReadPool, ReadRecord, DEFAULT_SEED};
use spiderweb::codec::{Codec, Message};
use spiderweb::constraints::ConstraintSet;
use spiderweb::corrector::{repair, RepairLimits, DEFAULT_MAX_CANDIDATES};
use spiderweb::digraph::{self, generate, ArcBinding};
use spiderweb::experiment::{run_experiment, ExperimentConfig, EXPERIMENTS};
use spiderweb::retrieval::{retrieve, retrieve_nonblocking, RetrievalReport};
use spiderweb::{Error, Result};

const DATA_DIR_VAR: &str = "SPIDERWEB_DATA_DIR";

#[derive(Parser)]
#[command(name = "spiderweb", version, about = "Constrained DNA coding, edit repair and pool retrieval")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads; all cores when omitted.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Screen and trim a constraint set into a coding digraph.
    Generate {
        /// Built-in name (set01..set12, high-compatibility) or TOML file.
        #[arg(long)]
        constraints: String,
        #[arg(long, default_value_t = 1)]
        min_out_degree: usize,
        /// Key for a keyed arc binding.
        #[arg(long)]
        key: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Capacity of a digraph in bits per nucleotide.
    Capacity {
        #[arg(long)]
        digraph: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
    },
    /// Encode a binary file, one sequence per chunk.
    Encode {
        #[arg(long)]
        digraph: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 16)]
        chunk_bytes: usize,
    },
    /// Decode sequences back to the binary file.
    Decode {
        #[arg(long)]
        digraph: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw corrupted copies of encoded sequences.
    Corrupt {
        #[arg(long)]
        digraph: PathBuf,
        #[arg(long)]
        reads: PathBuf,
        #[arg(long)]
        error_rate: f64,
        #[arg(long, default_value_t = 1)]
        copies: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repair every read and list its candidates.
    Correct {
        #[arg(long)]
        digraph: PathBuf,
        #[arg(long)]
        reads: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_MAX_CANDIDATES)]
        max_candidates: usize,
    },
    /// Rank repaired reads by frequency and decode the top sequences.
    Retrieve {
        #[arg(long)]
        digraph: PathBuf,
        #[arg(long)]
        reads: PathBuf,
        #[arg(long)]
        expect: usize,
        #[arg(long)]
        nonblocking: bool,
        #[arg(long, requires = "nonblocking")]
        tau: Option<u64>,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Decoded messages as bit strings, one per line.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named experiment, or `all`.
    Experiment {
        name: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value = "high-compatibility")]
        constraints: String,
        #[arg(long, default_value_t = 1)]
        min_out_degree: usize,
        #[arg(long, value_delimiter = ',')]
        error_rates: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        diversities: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        reads: Vec<usize>,
        #[arg(long, default_value_t = 116)]
        message_bits: usize,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn data_dir() -> PathBuf {
    std::env::var_os(DATA_DIR_VAR).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."))
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p)?)),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    })
}

fn lines(path: &Path) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for line in BufReader::new(fs::File::open(path)?).lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(line);
        }
    }
    Ok(out)
}

fn open_codec(path: &Path) -> Result<Codec> {
    let (acc, binding) = digraph::load(path)?;
    Codec::with_default_start(acc, binding)
}

fn read_records(codec: &Codec, path: &Path) -> Result<Vec<ReadRecord>> {
    lines(path)?.iter().enumerate().map(|(i, l)| ReadRecord::parse(codec, l, i)).collect()
}

/// One structured record: `key = value` lines, or a header and one row.
fn emit<T: Serialize>(w: &mut dyn Write, format: Format, value: &T) -> Result<()> {
    match format {
        Format::Text => {
            let text = toml::to_string(value).map_err(|e| Error::Format(e.to_string()))?;
            w.write_all(text.as_bytes())?;
        }
        Format::Csv => {
            let mut c = csv::Writer::from_writer(w);
            c.serialize(value).map_err(|e| Error::Format(e.to_string()))?;
            c.flush()?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct GenerateSummary {
    screened: usize,
    vertices: usize,
    arcs: usize,
    rounds: Vec<usize>,
    out: String,
}

#[derive(Serialize)]
struct CorrectRow {
    id: usize,
    status: &'static str,
    candidates: String,
}

#[derive(Serialize)]
struct ReportRow {
    diversity: usize,
    reads: usize,
    records: usize,
    retrieved: usize,
    distinct: usize,
    undecodable: usize,
    vertex_accesses: u64,
    search_candidates: u64,
    sieved_candidates: u64,
}

impl From<&RetrievalReport> for ReportRow {
    fn from(r: &RetrievalReport) -> Self {
        ReportRow {
            diversity: r.diversity,
            reads: r.reads,
            records: r.records,
            retrieved: r.retrieved,
            distinct: r.distinct,
            undecodable: r.undecodable,
            vertex_accesses: r.counters.vertex_accesses,
            search_candidates: r.counters.search_candidates,
            sieved_candidates: r.counters.sieved_candidates,
        }
    }
}

fn bit_string(m: &Message) -> String {
    m.bits().iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn run(cli: Cli) -> Result<bool> {
    let Common { seed, threads, format } = cli.common;
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Error::Config(e.to_string()))?;
    }
    match cli.command {
        Command::Generate { constraints, min_out_degree, key, out } => {
            let cs = ConstraintSet::resolve(&constraints)?;
            let g = generate(&cs, min_out_degree)?;
            let binding = ArcBinding::new(key);
            let stem = Path::new(&constraints).file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or(constraints.clone());
            let out = out.unwrap_or_else(|| data_dir().join(format!("{stem}.swdg")));
            digraph::save(&out, &g.accessor, &binding)?;
            let summary = GenerateSummary {
                screened: g.screened_vertices(),
                vertices: g.final_vertices(),
                arcs: g.accessor.arc_count(),
                rounds: g.rounds.clone(),
                out: out.display().to_string(),
            };
            let mut w = sink(None)?;
            match format {
                Format::Text => emit(&mut w, format, &summary)?,
                Format::Csv => {
                    writeln!(w, "screened,vertices,arcs,out")?;
                    writeln!(w, "{},{},{},{}", summary.screened, summary.vertices, summary.arcs, summary.out)?;
                }
            }
        }
        Command::Capacity { digraph, tolerance } => {
            let (acc, _) = digraph::load(&digraph)?;
            let cap = approximate_capacity(&acc, tolerance, spiderweb::capacity::DEFAULT_MAX_ITERATIONS)?;
            emit(&mut sink(None)?, format, &cap)?;
        }
        Command::Encode { digraph, input, out, chunk_bytes } => {
            if chunk_bytes == 0 {
                return Err(Error::InvalidArgument("chunk size must be positive".into()));
            }
            let codec = open_codec(&digraph)?;
            let data = fs::read(&input)?;
            let mut w = sink(out.as_deref())?;
            for chunk in data.chunks(chunk_bytes) {
                writeln!(w, "{}", codec.format_record(&codec.encode(&Message::from_bytes(chunk))?))?;
            }
            w.flush()?;
        }
        Command::Decode { digraph, input, out } => {
            let codec = open_codec(&digraph)?;
            let mut bytes = Vec::new();
            for line in lines(&input)? {
                bytes.extend(codec.decode(&codec.parse_record(&line)?)?.to_bytes());
            }
            fs::write(out, bytes)?;
        }
        Command::Corrupt { digraph, reads, error_rate, copies, out } => {
            let codec = open_codec(&digraph)?;
            let spec = ChannelSpec::new(error_rate)?.with_seed(seed);
            let mut w = sink(out.as_deref())?;
            for (origin, line) in lines(&reads)?.iter().enumerate() {
                let cw = codec.parse_record(line)?;
                for c in 0..copies {
                    let (payload, _) = corrupt_with(&cw.payload, &spec, &mut copy_rng(seed, origin, c));
                    let rec = ReadRecord { origin, start: cw.start, payload, check: cw.check, expected_len: cw.payload.len() };
                    writeln!(w, "{}", rec.format(&codec))?;
                }
            }
            w.flush()?;
        }
        Command::Correct { digraph, reads, out, max_candidates } => {
            let codec = open_codec(&digraph)?;
            let limits = RepairLimits { max_candidates, ..RepairLimits::default() };
            let mut w = csv::WriterBuilder::new()
                .delimiter(if format == Format::Csv { b',' } else { b'\t' })
                .from_writer(sink(out.as_deref())?);
            for (id, rec) in read_records(&codec, &reads)?.into_iter().enumerate() {
                let start = codec.start_state(rec.start)?;
                let row = match repair(&codec, &rec.payload, start, &rec.check, rec.expected_len, &limits) {
                    Ok(c) => CorrectRow {
                        id,
                        status: match c.repaired.len() {
                            0 => "undecodable",
                            1 => "unique",
                            _ => "ambiguous",
                        },
                        candidates: c.repaired.iter().map(|y| spiderweb::nucleotide::seq_to_string(y)).collect::<Vec<_>>().join(";"),
                    },
                    Err(Error::CandidateOverflow { .. }) => CorrectRow { id, status: "undecodable", candidates: String::new() },
                    Err(e) => return Err(e),
                };
                w.serialize(row).map_err(|e| Error::Format(e.to_string()))?;
            }
            w.flush()?;
        }
        Command::Retrieve { digraph, reads, expect, nonblocking, tau, report, out } => {
            let codec = open_codec(&digraph)?;
            let records = read_records(&codec, &reads)?;
            let limits = RepairLimits::default();
            let (summary, messages) = if nonblocking {
                let tau = tau.ok_or_else(|| Error::InvalidArgument("--nonblocking needs --tau".into()))?;
                let s = retrieve_nonblocking(&records, &codec, tau, &limits)?;
                let summary = RetrievalReport {
                    diversity: expect,
                    records: records.len(),
                    retrieved: s.emissions.len(),
                    distinct: s.table.len(),
                    undecodable: s.undecodable,
                    counters: s.counters,
                    ..RetrievalReport::default()
                };
                (summary, s.emissions.into_iter().map(|e| e.message).collect::<Vec<_>>())
            } else {
                let copies = records.len().div_ceil(expect.max(1));
                let pool = ReadPool { records, diversity: expect, copies };
                let r = retrieve(&pool, &codec, expect, None, &limits)?;
                (r.report, r.ranked.into_iter().map(|x| x.message).collect())
            };
            let mut w = sink(report.as_deref())?;
            match format {
                Format::Text => emit(&mut w, format, &summary)?,
                Format::Csv => emit(&mut w, format, &ReportRow::from(&summary))?,
            }
            w.flush()?;
            if let Some(path) = out {
                let mut w = sink(Some(&path))?;
                for m in messages {
                    writeln!(w, "{}", m.as_ref().map(bit_string).unwrap_or_else(|| "-".into()))?;
                }
                w.flush()?;
            }
        }
        Command::Experiment { name, trials, constraints, min_out_degree, error_rates, diversities, reads, message_bits, out_dir } => {
            let cfg = ExperimentConfig {
                seed,
                trials,
                constraint_set: constraints,
                min_out_degree,
                error_rates,
                diversities,
                reads,
                message_bits,
                out_dir: out_dir.unwrap_or_else(data_dir),
            };
            let names: Vec<&str> = if name == "all" { EXPERIMENTS.to_vec() } else { vec![name.as_str()] };
            let mut all_passed = true;
            for n in names {
                let outcome = run_experiment(n, &cfg)?;
                for c in &outcome.checks {
                    println!("{} {n}: {} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                }
                println!("{n}: {} and {}", outcome.data_path.display(), outcome.summary_path.display());
                all_passed &= outcome.passed();
            }
            return Ok(all_passed);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
