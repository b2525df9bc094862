mod container;
mod selftest;

use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use container::{Container, Input, Role};
use kdel::{BlockBound, CodeLayout, Codec, Error};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

const EXIT_USAGE: u8 = 2;
const EXIT_FORMAT: u8 = 3;
const EXIT_DECODE: u8 = 4;
const EXIT_INTERNAL: u8 = 5;

#[derive(Parser)]
#[command(name = "kdel", version, about = "Encode, corrupt and decode bit strings with a k-deletion correcting code")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the code layout for one or more message lengths.
    Params {
        /// Message lengths, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value = "tight")]
        block_bound: BlockBound,
        /// Human-readable table instead of JSON.
        #[arg(long)]
        text: bool,
    },
    /// Encode a message given as a container or as 0/1 text.
    Encode {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value = "tight")]
        block_bound: BlockBound,
    },
    /// Delete bits from a codeword.
    Corrupt {
        #[command(flatten)]
        io: Io,
        /// Number of bits to delete; defaults to the container's k.
        #[arg(long)]
        k: Option<usize>,
        /// 1-indexed positions to delete, comma separated.
        #[arg(long, value_delimiter = ',', conflicts_with = "seed")]
        positions: Option<Vec<usize>>,
        /// Delete k positions chosen uniformly at random with this seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Recover the message from a received word.
    Decode {
        #[command(flatten)]
        io: Io,
        /// Message length; required for 0/1 text input.
        #[arg(long)]
        n: Option<usize>,
        /// Deletion budget; required for 0/1 text input.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value = "tight")]
        block_bound: BlockBound,
        /// Re-encode the result and check that the input is a subsequence of it.
        #[arg(long)]
        verify: bool,
    },
    /// Encode random messages and decode them after every or random deletion patterns.
    Selftest {
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, value_delimiter = ',', default_value = "8,16")]
        n_list: Vec<usize>,
        /// Try every k-subset of codeword positions.
        #[arg(long, conflicts_with = "trials")]
        exhaustive: bool,
        /// Random deletion patterns per message.
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random messages per message length.
        #[arg(long, default_value_t = 20)]
        messages: usize,
        #[arg(long, default_value = "tight")]
        block_bound: BlockBound,
    },
}

#[derive(Args)]
struct Io {
    /// Input file, or `-` for standard input.
    #[arg(short, long, default_value = "-")]
    input: PathBuf,
    /// Output file, or `-` for standard output.
    #[arg(short, long, default_value = "-")]
    output: PathBuf,
    /// Write 0/1 text instead of a container.
    #[arg(long)]
    text: bool,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Self::new(EXIT_USAGE, message)
    }

    fn format(message: impl Into<String>) -> Self {
        Self::new(EXIT_FORMAT, message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::InvalidArgument(_) | Error::CapacityExceeded(_) => EXIT_USAGE,
            Error::DecodeFailure(_) | Error::Phase { .. } => EXIT_DECODE,
            Error::Internal(_) => EXIT_INTERNAL,
        };
        Self::new(code, e.to_string())
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Params { n, k, block_bound, text } => params(&n, k, block_bound, text),
        Command::Encode { io, k, block_bound } => encode(&io, k, block_bound),
        Command::Corrupt { io, k, positions, seed } => corrupt(&io, k, positions, seed),
        Command::Decode {
            io,
            n,
            k,
            block_bound,
            verify,
        } => decode(&io, n, k, block_bound, verify),
        Command::Selftest {
            k,
            n_list,
            exhaustive,
            trials,
            seed,
            messages,
            block_bound,
        } => run_selftest(selftest::Plan {
            k,
            n_list,
            patterns: if exhaustive {
                selftest::Patterns::Exhaustive
            } else {
                selftest::Patterns::Random(trials)
            },
            seed,
            messages,
            bound: block_bound,
        }),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("kdel: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read_input(path: &PathBuf) -> CliResult<Input> {
    let mut bytes = Vec::new();
    let read = if path.as_os_str() == "-" {
        std::io::stdin().read_to_end(&mut bytes).map(|_| ())
    } else {
        fs::read(path).map(|b| bytes = b)
    };
    read.map_err(|e| Failure::format(format!("cannot read {}: {e}", path.display())))?;
    Input::parse(&bytes).map_err(Failure::format)
}

fn write_output(path: &PathBuf, bytes: &[u8]) -> CliResult {
    let written = if path.as_os_str() == "-" {
        let mut out = std::io::stdout().lock();
        out.write_all(bytes).and_then(|_| out.flush())
    } else {
        fs::write(path, bytes)
    };
    written.map_err(|e| Failure::format(format!("cannot write {}: {e}", path.display())))
}

fn emit(io: &Io, c: &Container) -> CliResult {
    if io.text {
        write_output(&io.output, container::to_text(&c.payload).as_bytes())
    } else {
        write_output(&io.output, &c.to_bytes())
    }
}

fn narrow<T: TryFrom<usize>>(value: usize, what: &str) -> CliResult<T> {
    T::try_from(value).map_err(|_| Failure::usage(format!("{what} = {value} does not fit the container header")))
}

fn layout_report(l: &CodeLayout) -> Value {
    json!({
        "n": l.n,
        "k": l.k,
        "block_bound": l.block_bound,
        "B": l.run_window,
        "R": l.quiet_window,
        "L": l.max_gap,
        "n_T": l.n_t,
        "W_p": l.w_p,
        "W_hashk": l.w_hashk,
        "N1": l.n1,
        "N2": l.n2,
        "N": l.total,
        "redundancy": l.redundancy,
        "field_width_sum": l.field_width_sum(),
        "block_len": l.block_len,
        "color_count": l.color_count,
        "color_width": l.color_width,
        "field_degree": l.field_degree,
        "max_block": l.max_block,
        "symbol_width": l.symbol_width,
        "W_hr": l.w_hr,
    })
}

fn params(ns: &[usize], k: usize, bound: BlockBound, text: bool) -> CliResult {
    let layouts = ns
        .iter()
        .map(|&n| CodeLayout::new(n, k, bound))
        .collect::<Result<Vec<_>, _>>()?;
    let out = if text {
        let mut s = format!(
            "{:>8} {:>3} {:>8} {:>6} {:>8} {:>8} {:>5} {:>8} {:>8} {:>8} {:>9} {:>10}\n",
            "n", "k", "B", "R", "L", "n_T", "W_p", "W_hashk", "N1", "N2", "N", "N-n"
        );
        for l in &layouts {
            s.push_str(&format!(
                "{:>8} {:>3} {:>8} {:>6} {:>8} {:>8} {:>5} {:>8} {:>8} {:>8} {:>9} {:>10}\n",
                l.n, l.k, l.run_window, l.quiet_window, l.max_gap, l.n_t, l.w_p, l.w_hashk, l.n1, l.n2, l.total, l.redundancy
            ));
        }
        s.push_str(
            "N-n equals the sum of the field widths; the asymptotic 8k log n redundancy constant is not reached at these lengths.\n",
        );
        s
    } else {
        let reports: Vec<Value> = layouts.iter().map(layout_report).collect();
        let value = match reports.as_slice() {
            [single] => single.clone(),
            _ => Value::Array(reports),
        };
        format!("{}\n", serde_json::to_string_pretty(&value).expect("JSON"))
    };
    write_output(&PathBuf::from("-"), out.as_bytes())
}

fn encode(io: &Io, k: usize, bound: BlockBound) -> CliResult {
    let message = match read_input(&io.input)? {
        Input::Bits(bits) => bits,
        Input::Container(c) if c.role() == Some(Role::Message) && c.payload.len() == c.n as usize => c.payload,
        Input::Container(_) => return Err(Failure::format("input container does not hold a message")),
    };
    let codec = Codec::with_bound(message.len(), k, bound)?;
    let codeword = codec.encode(&message)?;
    emit(
        io,
        &Container {
            k: narrow(k, "k")?,
            n: narrow(message.len(), "n")?,
            total: narrow(codec.layout().total, "N")?,
            payload: codeword.payload,
        },
    )
}

fn corrupt(io: &Io, k: Option<usize>, positions: Option<Vec<usize>>, seed: Option<u64>) -> CliResult {
    let (header, bits) = match read_input(&io.input)? {
        Input::Container(c) => (Some((c.k, c.n, c.total)), c.payload),
        Input::Bits(bits) => (None, bits),
    };
    let k = match (k, header) {
        (Some(k), _) => k,
        (None, Some((hk, _, _))) => hk as usize,
        (None, None) => return Err(Failure::usage("--k is required for 0/1 text input")),
    };
    let len = bits.len();
    let mut chosen = match (positions, seed) {
        (Some(p), _) => {
            if p.len() > k {
                return Err(Failure::usage(format!("{} positions given but k = {k}", p.len())));
            }
            if let Some(bad) = p.iter().find(|&&x| x == 0 || x > len) {
                return Err(Failure::usage(format!("position {bad} outside 1..={len}")));
            }
            p
        }
        (None, Some(seed)) => {
            if k > len {
                return Err(Failure::usage(format!("cannot delete {k} of {len} bits")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            sample(&mut rng, len, k).into_iter().map(|i| i + 1).collect()
        }
        (None, None) => return Err(Failure::usage("give --positions or --seed")),
    };
    chosen.sort_unstable();
    if chosen.windows(2).any(|w| w[0] == w[1]) {
        return Err(Failure::usage("positions must be distinct"));
    }
    let received = kdel::bitseq::delete_positions(&bits, &chosen)?;
    eprintln!(
        "deleted positions: {}",
        chosen.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
    );
    let (hk, n, total) = match header {
        Some(h) => h,
        None => (narrow(k, "k")?, 0, narrow(len, "N")?),
    };
    emit(
        io,
        &Container {
            k: hk,
            n,
            total,
            payload: received,
        },
    )
}

fn decode(io: &Io, n: Option<usize>, k: Option<usize>, bound: BlockBound, verify: bool) -> CliResult {
    let (n, k, received, declared_total) = match read_input(&io.input)? {
        Input::Container(c) => {
            let (hn, hk) = (c.n as usize, c.k as usize);
            if n.is_some_and(|n| n != hn) || k.is_some_and(|k| k != hk) {
                return Err(Failure::format(format!(
                    "layout mismatch: container holds n={hn}, k={hk}"
                )));
            }
            (hn, hk, c.payload, Some(c.total as usize))
        }
        Input::Bits(bits) => match (n, k) {
            (Some(n), Some(k)) => (n, k, bits, None),
            _ => return Err(Failure::usage("--n and --k are required for 0/1 text input")),
        },
    };
    let codec = Codec::with_bound(n, k, bound)?;
    let total = codec.layout().total;
    if declared_total.is_some_and(|t| t != total) {
        return Err(Failure::format(format!(
            "layout mismatch: container declares N={}, but n={n}, k={k} gives N={total}",
            declared_total.unwrap_or_default()
        )));
    }
    if received.len() > total || received.len() + k < total {
        return Err(Failure::format(format!(
            "layout mismatch: received {} bits, expected {}..={total}",
            received.len(),
            total - k
        )));
    }
    let message = if verify {
        codec.decode_verified(&received)?
    } else {
        codec.decode(&received)?
    };
    emit(
        io,
        &Container {
            k: narrow(k, "k")?,
            n: narrow(n, "n")?,
            total: narrow(total, "N")?,
            payload: message,
        },
    )
}

fn run_selftest(plan: selftest::Plan) -> CliResult {
    if plan.n_list.is_empty() {
        return Err(Failure::usage("--n-list is empty"));
    }
    let report = selftest::run(&plan)?;
    let text = format!("{}\n", serde_json::to_string_pretty(&report.summary).expect("JSON"));
    write_output(&PathBuf::from("-"), text.as_bytes())?;
    match report.counterexample {
        None if report.summary["pass"] == Value::Bool(true) => Ok(()),
        None => Err(Failure::new(EXIT_DECODE, "self-test failed")),
        Some(cx) => {
            eprintln!(
                "counterexample: n={} k={} message={} positions={} outcome: {}",
                cx.n,
                plan.k,
                cx.message,
                cx.positions.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(","),
                cx.outcome
            );
            Err(Failure::new(EXIT_DECODE, "self-test failed"))
        }
    }
}
