//! The `aloco` command-line front end.
//!
//! Exit status is 0 on success, 1 for usage or parameter errors, and 2 when
//! the data itself is bad (constraint violation, corrupted codeword, broken
//! framing).

pub mod io;

use std::cell::Cell;
use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::analysis::{self, TABLE_M_X1, TABLE_M_X2};
use crate::bits::{Finding, Scanner};
use crate::codec::{Code, Codeword, Message};
use crate::counts::{CodeParams, CountTable};
use crate::error::Error;
use crate::oracle;
use crate::stream::{self, FrameHeader, StreamEncoder, FRAME_HEADER_LEN};

use self::io::{AsciiSink, AsciiSource, BitSink, BitSource, ByteSource, PackedSink, Truncate};

/// Messages encoded per parallel batch.
const BATCH: usize = 4096;

#[derive(Debug, Parser)]
#[command(name = "aloco", version, about = "A-LOCO constrained codes for SLC Flash")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the code cardinality N(m, x).
    Count(CodeArgs),
    /// Encode message bits into a bridged codeword stream.
    Encode(EncodeArgs),
    /// Decode a bridged codeword stream back to message bits.
    Decode(DecodeArgs),
    /// Scan a bit stream for forbidden patterns and over-long runs.
    Verify(VerifyArgs),
    /// Print rates and adder sizes for a list of code lengths.
    Table(TableArgs),
    /// Print the capacity of the constraint.
    Capacity(CapacityArgs),
    /// Dump every codeword of a code, with its index.
    Enumerate(EnumerateArgs),
}

#[derive(Debug, Clone, Copy, Args)]
pub struct CodeArgs {
    /// Codeword length.
    #[arg(long)]
    pub m: usize,
    /// Longest forbidden run of zeros between two ones.
    #[arg(long)]
    pub x: usize,
}

#[derive(Debug, Clone, Args)]
pub struct IoArgs {
    /// Input file; standard input when omitted or "-".
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    /// Output file; standard output when omitted or "-".
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// One line of '0'/'1' characters.
    #[default]
    Ascii,
    /// Binary frame with a header, payload bits packed MSB-first.
    Packed,
}

#[derive(Debug, Clone, Args)]
pub struct EncodeArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    #[command(flatten)]
    pub io: IoArgs,
    /// Stream format to write.
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    /// Read the message as raw bytes (MSB first) instead of '0'/'1' text.
    #[arg(long)]
    pub raw: bool,
    /// Zero-pad the last message instead of rejecting a short input.
    #[arg(long)]
    pub pad_zero: bool,
}

#[derive(Debug, Clone, Args)]
pub struct DecodeArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    #[command(flatten)]
    pub io: IoArgs,
    /// Stream format to read.
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    /// Write the message as raw bytes instead of '0'/'1' text.
    #[arg(long)]
    pub raw: bool,
    /// Check every bridge against the bridging rule.
    #[arg(long)]
    pub strict: bool,
    /// Keep only the first N message bits (packed frames carry this).
    #[arg(long, value_name = "N")]
    pub trim: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// Input file; standard input when omitted or "-".
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    #[arg(long)]
    pub x: usize,
    /// Comma-separated code lengths; defaults to the standard list for x = 1, 2.
    #[arg(long, value_delimiter = ',')]
    pub m: Vec<usize>,
    /// Emit CSV instead of an aligned table.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CapacityArgs {
    #[arg(long)]
    pub x: usize,
    /// Bisection bracket width.
    #[arg(long, default_value_t = 1e-12)]
    pub tolerance: f64,
}

#[derive(Debug, Clone, Args)]
pub struct EnumerateArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// Refuse codes longer than this.
    #[arg(long, default_value_t = oracle::DEFAULT_LIMIT)]
    pub limit: usize,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(std::io::Error),
    Code(Error),
    /// The input was scanned and found to violate the constraint.
    Violations(usize),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Code(e) if e.is_data_error() => 2,
            CliError::Code(_) => 1,
            CliError::Violations(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Code(e) => write!(f, "{e}"),
            CliError::Violations(n) => write!(f, "{n} constraint violation(s)"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Code(e)
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parses `args` and runs the command, returning the exit status.
pub fn main_with_args<I, T, R, W, E>(args: I, stdin: R, mut stdout: W, mut stderr: E) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    R: Read,
    W: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                return 1;
            }
            let _ = write!(stdout, "{text}");
            return 0;
        }
    };
    run(&cli, stdin, stdout, &mut stderr)
}

/// Runs a parsed command. Diagnostics go to `stderr`.
pub fn run<R: Read, W: Write, E: Write>(cli: &Cli, stdin: R, stdout: W, stderr: &mut E) -> u8 {
    let result = match &cli.command {
        Command::Count(args) => count(args, stdout),
        Command::Encode(args) => encode(args, stdin, stdout),
        Command::Decode(args) => decode(args, stdin, stdout),
        Command::Verify(args) => verify(args, stdin, stdout),
        Command::Table(args) => table(args, stdout),
        Command::Capacity(args) => capacity(args, stdout),
        Command::Enumerate(args) => enumerate(args, stdout),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn params(args: &CodeArgs) -> CliResult<CodeParams> {
    Ok(CodeParams::new(args.m, args.x)?)
}

fn clocked(args: &CodeArgs) -> CliResult<CodeParams> {
    Ok(CodeParams::clocked(args.m, args.x)?)
}

fn is_std(path: &Option<PathBuf>) -> bool {
    path.as_ref().is_none_or(|p| p.as_os_str() == "-")
}

fn open_input<'a, R: Read + 'a>(path: &Option<PathBuf>, stdin: R) -> CliResult<Box<dyn Read + 'a>> {
    if is_std(path) {
        Ok(Box::new(stdin))
    } else {
        let path = path.as_ref().unwrap();
        let file = File::open(path)
            .map_err(|e| CliError::Usage(format!("cannot open {}: {e}", path.display())))?;
        Ok(Box::new(BufReader::new(file)))
    }
}

fn open_output<'a, W: Write + 'a>(
    path: &Option<PathBuf>,
    stdout: W,
) -> CliResult<Box<dyn Write + 'a>> {
    if is_std(path) {
        Ok(Box::new(stdout))
    } else {
        Ok(Box::new(BufWriter::new(create(path.as_ref().unwrap())?)))
    }
}

fn create(path: &PathBuf) -> CliResult<File> {
    File::options()
        .read(true)
        .write(true)
        .create(true)
        .truncate(true)
        .open(path)
        .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", path.display())))
}

fn count<W: Write>(args: &CodeArgs, mut out: W) -> CliResult<()> {
    let params = params(args)?;
    let table = CountTable::for_params(params);
    writeln!(out, "{}", table.cardinality(params.m())?)?;
    Ok(())
}

struct EncodeSummary {
    codewords: u64,
    message_bits: u64,
    padded: bool,
}

fn encode_into<S: BitSource + ?Sized, K: BitSink>(
    source: &mut S,
    code: &Code,
    sink: &mut K,
    pad_zero: bool,
) -> CliResult<EncodeSummary> {
    let s = code.message_bits();
    let mut enc = StreamEncoder::new(code);
    let mut pending: Vec<bool> = Vec::new();
    let mut out = Vec::new();
    let mut summary = EncodeSummary {
        codewords: 0,
        message_bits: 0,
        padded: false,
    };

    let mut flush = |pending: &mut Vec<bool>, summary: &mut EncodeSummary| -> CliResult<()> {
        let whole = pending.len() / s * s;
        let messages: Vec<Message> = pending[..whole]
            .chunks(s)
            .map(|c| Message::from_bits(c.to_vec()))
            .collect();
        let words: Vec<Codeword> = messages
            .par_iter()
            .map(|m| code.encode(m))
            .collect::<Result<_, _>>()?;
        out.clear();
        for w in &words {
            enc.push_codeword(w, &mut out);
        }
        sink.put(&out)?;
        summary.codewords += words.len() as u64;
        pending.drain(..whole);
        Ok(())
    };

    while source.fill(&mut pending)? {
        if pending.len() >= BATCH * s {
            flush(&mut pending, &mut summary)?;
        }
    }
    // count what came in before flushing consumes it
    let leftover = pending.len() % s;
    flush(&mut pending, &mut summary)?;
    summary.message_bits = summary.codewords * s as u64 + leftover as u64;
    if leftover > 0 {
        if !pad_zero {
            return Err(CliError::Usage(format!(
                "message input of {} bits is not a multiple of {s} bits (use --pad-zero)",
                summary.message_bits
            )));
        }
        pending.resize(s, false);
        summary.padded = true;
        flush(&mut pending, &mut summary)?;
    }
    sink.finish()?;
    Ok(summary)
}

fn encode<R: Read, W: Write>(args: &EncodeArgs, stdin: R, stdout: W) -> CliResult<()> {
    let code = Code::new(clocked(&args.code)?)?;
    let input = open_input(&args.io.input, stdin)?;
    let mut source: Box<dyn BitSource> = if args.raw {
        Box::new(ByteSource::new(input))
    } else {
        Box::new(AsciiSource::new(input))
    };

    let source = source.as_mut();

    let header = |summary: &EncodeSummary| FrameHeader {
        params: code.params(),
        codeword_count: summary.codewords,
        message_bits: if summary.padded {
            summary.message_bits
        } else {
            0
        },
    };

    match args.format {
        Format::Ascii => {
            let mut sink = AsciiSink::new(open_output(&args.io.output, stdout)?);
            encode_into(source, &code, &mut sink, args.pad_zero)?;
        }
        Format::Packed if is_std(&args.io.output) => {
            let mut sink = PackedSink::new(Vec::new());
            let summary = encode_into(source, &code, &mut sink, args.pad_zero)?;
            let mut out = stdout;
            out.write_all(&header(&summary).to_bytes())?;
            out.write_all(&sink.into_inner())?;
            out.flush()?;
        }
        Format::Packed => {
            // header is patched once the codeword count is known
            let mut file = BufWriter::new(create(args.io.output.as_ref().unwrap())?);
            file.write_all(&[0u8; FRAME_HEADER_LEN])?;
            let mut sink = PackedSink::new(file);
            let summary = encode_into(source, &code, &mut sink, args.pad_zero)?;
            let mut file = sink.into_inner();
            file.seek(SeekFrom::Start(0))?;
            file.write_all(&header(&summary).to_bytes())?;
            file.flush()?;
        }
    }
    Ok(())
}

/// Splits the incoming stream into codeword/bridge units and decodes them
/// in parallel batches. Returns the number of codewords.
fn decode_from<S: BitSource + ?Sized, K: BitSink>(
    source: &mut S,
    code: &Code,
    strict: bool,
    sink: &mut K,
) -> CliResult<usize> {
    let params = code.params();
    let (m, x) = (params.m(), params.x());
    let stride = m + x;
    let mut buf: Vec<bool> = Vec::new();
    let consumed = Cell::new(0usize);
    let decoded = Cell::new(0usize);

    let mut process = |buf: &mut Vec<bool>, units: usize, last: bool| -> CliResult<()> {
        let n = units + last as usize;
        let (first_ordinal, first_offset) = (decoded.get(), consumed.get());
        let results: Vec<Result<Message, Error>> = (0..n)
            .into_par_iter()
            .map(|k| {
                let start = k * stride;
                if strict && k < units {
                    let expected = stream::select_bridge(buf[start + m - 1], buf[start + stride], x);
                    if buf[start + m..start + stride] != expected[..] {
                        return Err(Error::BridgeMismatch {
                            ordinal: first_ordinal + k,
                            offset: first_offset + start + m,
                        });
                    }
                }
                let word = Codeword::from_bits(buf[start..start + m].to_vec());
                code.decode(&word).map_err(|e| Error::InCodeword {
                    ordinal: first_ordinal + k,
                    source: Box::new(match e {
                        Error::ConstraintViolation { offset, zeros } => {
                            Error::ConstraintViolation {
                                offset: first_offset + start + offset,
                                zeros,
                            }
                        }
                        e => e,
                    }),
                })
            })
            .collect();
        for r in results {
            sink.put(r?.bits())?;
        }
        let used = (units * stride).min(buf.len());
        buf.drain(..used);
        consumed.set(first_offset + used);
        decoded.set(first_ordinal + units);
        Ok(())
    };

    while source.fill(&mut buf)? {
        // a unit is only complete once the next codeword's first bit is seen
        if buf.len() > BATCH * stride {
            let units = (buf.len() - 1) / stride;
            process(&mut buf, units, false)?;
        }
    }
    let total_bits = consumed.get() + buf.len();
    if buf.len() < m || !(buf.len() - m).is_multiple_of(stride) {
        return Err(Error::Framing {
            bits: total_bits,
            m,
            x,
        }
        .into());
    }
    let units = (buf.len() - m) / stride;
    process(&mut buf, units, true)?;
    sink.finish()?;
    Ok(decoded.get() + 1)
}

fn read_header<R: Read>(input: &mut R) -> CliResult<FrameHeader> {
    let mut bytes = [0u8; FRAME_HEADER_LEN];
    input.read_exact(&mut bytes).map_err(|e| {
        if e.kind() == std::io::ErrorKind::UnexpectedEof {
            CliError::Code(Error::BadFrame("input shorter than a frame header".into()))
        } else {
            CliError::Io(e)
        }
    })?;
    Ok(FrameHeader::from_bytes(&bytes)?)
}

fn check_header(header: &FrameHeader, params: CodeParams) -> CliResult<()> {
    if header.params != params {
        return Err(CliError::Usage(format!(
            "frame was written with m = {}, x = {}; command line says m = {}, x = {}",
            header.params.m(),
            header.params.x(),
            params.m(),
            params.x()
        )));
    }
    Ok(())
}

fn decode<R: Read, W: Write>(args: &DecodeArgs, stdin: R, stdout: W) -> CliResult<()> {
    let code = Code::new(clocked(&args.code)?)?;
    let mut input = open_input(&args.io.input, stdin)?;
    let output = open_output(&args.io.output, stdout)?;
    let mut trim = args.trim;

    let run_with = |source: &mut dyn BitSource, trim: Option<usize>| -> CliResult<()> {
        if args.raw {
            let mut sink = Truncate::new(PackedSink::new(output), trim);
            decode_from(source, &code, args.strict, &mut sink)?;
        } else {
            let mut sink = Truncate::new(AsciiSink::new(output), trim);
            decode_from(source, &code, args.strict, &mut sink)?;
        }
        Ok(())
    };

    match args.format {
        Format::Ascii => run_with(&mut AsciiSource::new(input), trim),
        Format::Packed => {
            let header = read_header(&mut input)?;
            check_header(&header, code.params())?;
            if header.codeword_count == 0 {
                return Err(Error::Framing {
                    bits: 0,
                    m: code.params().m(),
                    x: code.params().x(),
                }
                .into());
            }
            if header.message_bits > 0 && trim.is_none() {
                trim = Some(header.message_bits as usize);
            }
            run_with(
                &mut ByteSource::with_limit(input, header.payload_bits()),
                trim,
            )
        }
    }
}

fn verify<R: Read, W: Write>(args: &VerifyArgs, stdin: R, mut stdout: W) -> CliResult<()> {
    let params = clocked(&args.code)?;
    let limit = stream::max_run_bound(params);
    let mut input = open_input(&args.input, stdin)?;
    let mut source: Box<dyn BitSource> = match args.format {
        Format::Ascii => Box::new(AsciiSource::new(input)),
        Format::Packed => {
            let header = read_header(&mut input)?;
            check_header(&header, params)?;
            Box::new(ByteSource::with_limit(input, header.payload_bits()))
        }
    };

    let mut scanner = Scanner::new(params.x(), Some(limit));
    let mut findings = Vec::new();
    let mut reported = 0usize;
    let mut chunk = Vec::new();
    let mut report = |findings: &mut Vec<Finding>, out: &mut W| -> std::io::Result<()> {
        for f in findings.drain(..) {
            reported += 1;
            match f {
                Finding::Forbidden { offset, zeros } => writeln!(
                    out,
                    "forbidden pattern 1{}1 at offset {offset}",
                    "0".repeat(zeros)
                )?,
                Finding::LongRun { offset, len, bit } => writeln!(
                    out,
                    "run of {len} '{}' bits at offset {offset} exceeds {limit}",
                    bit as u8
                )?,
            }
        }
        Ok(())
    };
    while source.fill(&mut chunk)? {
        for &b in &chunk {
            scanner.push(b, &mut findings);
        }
        chunk.clear();
        report(&mut findings, &mut stdout)?;
    }
    scanner.finish(&mut findings);
    report(&mut findings, &mut stdout)?;
    if reported > 0 {
        stdout.flush()?;
        return Err(CliError::Violations(reported));
    }
    writeln!(
        stdout,
        "ok: {} bits, longest run {}",
        scanner.bits_seen(),
        scanner.longest_run()
    )?;
    Ok(())
}

fn table<W: Write>(args: &TableArgs, mut out: W) -> CliResult<()> {
    let lengths: Vec<usize> = if !args.m.is_empty() {
        args.m.clone()
    } else {
        match args.x {
            1 => TABLE_M_X1.to_vec(),
            2 => TABLE_M_X2.to_vec(),
            x => {
                return Err(CliError::Usage(format!(
                    "no default length list for x = {x}; pass --m"
                )))
            }
        }
    };
    let max = *lengths.iter().max().unwrap();
    let counts = CountTable::new(args.x, max)?;
    let reports = analysis::rate_table(args.x, &lengths, &counts)?;
    if args.csv {
        write!(out, "{}", analysis::render_csv(&reports))?;
    } else {
        write!(out, "{}", analysis::render_table(&reports))?;
    }
    Ok(())
}

fn capacity<W: Write>(args: &CapacityArgs, mut out: W) -> CliResult<()> {
    if args.x < 1 {
        return Err(CliError::Usage("x must be at least 1".into()));
    }
    if args.tolerance.is_nan() || args.tolerance <= 0.0 {
        return Err(CliError::Usage("tolerance must be positive".into()));
    }
    writeln!(out, "{:.10}", analysis::capacity(args.x, args.tolerance))?;
    Ok(())
}

fn enumerate<W: Write>(args: &EnumerateArgs, stdout: W) -> CliResult<()> {
    let book = oracle::enumerate_with_limit(params(&args.code)?, args.limit)?;
    let mut out = open_output(&args.output, stdout)?;
    out.write_all(book.to_ascii().as_bytes())?;
    out.flush()?;
    Ok(())
}
