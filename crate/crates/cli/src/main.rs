use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use sstforge::congruences::{default_threshold, myhill_nerode_classes, syntactic_classes, BoundedPartition, Side};
use sstforge::conversions::{
    async_bimachine_to_asst, asst_iffo_to_bimachine, asst_to_async_bimachine, bimachine_to_asst_iffo, ConversionError,
};
use sstforge::guard::{Guard, ResourceError};
use sstforge::json::{self, JsonError, Kind, Machine};
use sstforge::minimization::{coloring_to_asst, fa_reg_min_with, Certificate, FaRegMinOptions, MinimizationError};
use sstforge::refinement::{find_refinement, minimal_refinement_guarded, RefinementError};
use sstforge::transducers::functionality_witness;
use sstforge::{dot, Alphabet, Word, WordFunction};

/// Writes to stdout; a closed pipe ends the process quietly.
macro_rules! out {
    ($($arg:tt)*) => {
        emit(format_args!("{}\n", format_args!($($arg)*)))
    };
}

macro_rules! out_raw {
    ($($arg:tt)*) => {
        emit(format_args!($($arg)*))
    };
}

fn emit(args: std::fmt::Arguments) {
    if let Err(e) = io::stdout().write_fmt(args) {
        if e.kind() == io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: stdout: {e}");
        std::process::exit(INPUT.into());
    }
}

const OK: u8 = 0;
const FALSE: u8 = 1;
const INPUT: u8 = 2;
const DOMAIN_MISS: u8 = 3;
const UNSUPPORTED: u8 = 4;
const RESOURCE: u8 = 5;

#[derive(Parser)]
#[command(name = "sstforge", version, about = "Streaming string transducers, bimachines and register minimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply a machine to a word of space-separated symbols.
    Eval { file: PathBuf, word: String },
    /// Convert between aSSTs, bimachines and asynchronous bimachines.
    Convert {
        file: PathBuf,
        #[arg(long)]
        to: Target,
    },
    /// Test a predicate; prints true or false plus a JSON witness.
    Check {
        file: PathBuf,
        /// iffo, total-domain, precongruence or functional:N
        #[arg(long)]
        predicate: String,
    },
    /// Smallest DFAs finer than a precongruence.
    Minrefine {
        file: PathBuf,
        /// Only look for a refinement with at most this many states.
        #[arg(long)]
        k: Option<usize>,
    },
    /// An aSST with the same underlying automaton and at most k registers.
    Faregmin {
        file: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 6)]
        sample_len: usize,
        #[arg(long, default_value_t = 8)]
        verify_len: usize,
    },
    /// The aSST built from a graph by the coloring reduction.
    Coloring { file: PathBuf },
    /// Bounded syntactic congruence classes of a machine's function.
    Congruence {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = SideArg::Left)]
        side: SideArg,
        #[arg(long = "W", default_value_t = 4)]
        horizon: usize,
        /// Distance threshold; defaults to 2W.
        #[arg(long = "D")]
        threshold: Option<usize>,
        /// Print the full report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Graphviz output for any machine file.
    Dot {
        file: PathBuf,
        #[arg(long, default_value = "M")]
        name: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Asst,
    Bimachine,
    AsyncBimachine,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Left,
    Right,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl ToString) -> Self {
        Failure { code: INPUT, message: message.to_string() }
    }

    fn unsupported(message: impl ToString) -> Self {
        Failure { code: UNSUPPORTED, message: message.to_string() }
    }
}

impl From<JsonError> for Failure {
    fn from(e: JsonError) -> Self {
        Failure::input(e)
    }
}

impl From<ResourceError> for Failure {
    fn from(e: ResourceError) -> Self {
        Failure { code: RESOURCE, message: e.to_string() }
    }
}

impl From<ConversionError> for Failure {
    fn from(e: ConversionError) -> Self {
        Failure::unsupported(e)
    }
}

impl From<RefinementError> for Failure {
    fn from(e: RefinementError) -> Self {
        match e {
            RefinementError::Resource(r) => r.into(),
            e => Failure::input(e),
        }
    }
}

impl From<MinimizationError> for Failure {
    fn from(e: MinimizationError) -> Self {
        match e {
            MinimizationError::Resource(r) => r.into(),
            MinimizationError::Refinement(r) => r.into(),
            MinimizationError::Conversion(c) => c.into(),
            e => Failure::input(e),
        }
    }
}

type CmdResult = Result<u8, Failure>;

fn read_input(path: &PathBuf) -> Result<Vec<u8>, Failure> {
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        io::stdin().read_to_end(&mut buf).map_err(|e| Failure::input(format!("stdin: {e}")))?;
        Ok(buf)
    } else {
        fs::read(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
    }
}

fn load(path: &PathBuf) -> Result<Machine, Failure> {
    Ok(json::from_slice(&read_input(path)?)?)
}

fn load_kind(path: &PathBuf, kind: Kind) -> Result<Machine, Failure> {
    Ok(json::expect_kind(load(path)?, kind)?)
}

fn guard() -> Result<Guard, Failure> {
    Guard::from_env().map_err(|e| Failure::input(format!("{}: {e}", sstforge::guard::ENV_VAR)))
}

fn spaced(w: &Word) -> String {
    w.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(" ")
}

fn parse_word(text: &str, sigma: &Alphabet) -> Result<Word, Failure> {
    let w = Word::parse(text).map_err(Failure::input)?;
    sigma.encode(&w).map_err(Failure::input)?;
    Ok(w)
}

fn print_output(out: Option<Word>) -> u8 {
    match out {
        Some(w) => {
            out!("{}", spaced(&w));
            OK
        }
        None => {
            out!("DOMAIN-MISS");
            DOMAIN_MISS
        }
    }
}

fn eval(file: &PathBuf, word: &str) -> CmdResult {
    let m = load(file)?;
    Ok(match &m {
        Machine::Asst(s) => print_output(s.apply(&parse_word(word, s.input_alphabet())?)),
        Machine::Bimachine(b) => print_output(b.apply(&parse_word(word, b.input_alphabet())?)),
        Machine::AsyncBimachine(b) => print_output(b.apply(&parse_word(word, b.input_alphabet())?)),
        Machine::Fst(t) => {
            let outs = t.eval_guarded(&parse_word(word, t.input_alphabet())?, &guard()?)?;
            if outs.is_empty() {
                return Ok(print_output(None));
            }
            for o in outs {
                out!("{}", spaced(&o));
            }
            OK
        }
        Machine::Dfa(a) => accept_line(a.accepts(&parse_word(word, a.alphabet())?).map_err(Failure::input)?),
        Machine::Nfa(a) => accept_line(a.accepts(&parse_word(word, a.alphabet())?).map_err(Failure::input)?),
        other => return Err(Failure::input(format!("a {} file cannot be evaluated", other.kind().as_str()))),
    })
}

fn accept_line(accepted: bool) -> u8 {
    if accepted {
        out!("accept");
        OK
    } else {
        out!("reject");
        FALSE
    }
}

fn size_report(from: &Machine, to: &Machine) {
    eprintln!("{} -> {}", sizes(from), sizes(to));
}

fn sizes(m: &Machine) -> String {
    match m {
        Machine::Asst(s) => format!("asst: {} states, {} registers", s.num_states(), s.num_registers()),
        Machine::Bimachine(b) => {
            format!("bimachine: {} left, {} right states", b.left().num_states(), b.right().num_states())
        }
        Machine::AsyncBimachine(b) => {
            format!("async-bimachine: {} left, {} right states", b.left().num_states(), b.right_states().len())
        }
        other => other.kind().as_str().to_string(),
    }
}

fn convert(file: &PathBuf, to: Target) -> CmdResult {
    let m = load(file)?;
    let out = match (&m, to) {
        (Machine::Asst(s), Target::Bimachine) => Machine::Bimachine(asst_iffo_to_bimachine(s)?),
        (Machine::Asst(s), Target::AsyncBimachine) => Machine::AsyncBimachine(asst_to_async_bimachine(s)?),
        (Machine::Bimachine(b), Target::Asst) => {
            let (s, report) = bimachine_to_asst_iffo(b)?;
            if !report.is_clean() {
                eprintln!("note: defaults used outside the domain: {report:?}");
            }
            Machine::Asst(s)
        }
        (Machine::AsyncBimachine(b), Target::Asst) => Machine::Asst(async_bimachine_to_asst(b)?),
        (Machine::Bimachine(b), Target::AsyncBimachine) => {
            let (s, _) = bimachine_to_asst_iffo(b)?;
            Machine::AsyncBimachine(asst_to_async_bimachine(&s)?)
        }
        (Machine::AsyncBimachine(b), Target::Bimachine) => {
            Machine::Bimachine(asst_iffo_to_bimachine(&async_bimachine_to_asst(b)?)?)
        }
        (m, _) if m.kind() == target_kind(to) => m.clone(),
        (m, _) => {
            return Err(Failure::unsupported(format!(
                "no conversion from {} to {}",
                m.kind().as_str(),
                target_kind(to).as_str()
            )))
        }
    };
    size_report(&m, &out);
    out!("{}", json::to_string(&out));
    Ok(OK)
}

fn target_kind(t: Target) -> Kind {
    match t {
        Target::Asst => Kind::Asst,
        Target::Bimachine => Kind::Bimachine,
        Target::AsyncBimachine => Kind::AsyncBimachine,
    }
}

fn verdict(holds: bool, witness: serde_json::Value) -> u8 {
    out!("{holds}");
    if !witness.is_null() {
        out!("{witness}");
    }
    if holds {
        OK
    } else {
        FALSE
    }
}

fn check(file: &PathBuf, predicate: &str) -> CmdResult {
    if predicate == "precongruence" {
        return match json::from_slice(&read_input(file)?) {
            Ok(m) => {
                json::expect_kind(m, Kind::Precongruence)?;
                Ok(verdict(true, serde_json::Value::Null))
            }
            Err(JsonError::Refinement(RefinementError::NotClosed { p, q, symbol })) => {
                Ok(verdict(false, json!({ "p": p, "q": q, "symbol": symbol.as_str() })))
            }
            Err(e) => Err(e.into()),
        };
    }
    if let Some(n) = predicate.strip_prefix("functional:") {
        let n: usize = n.parse().map_err(|_| Failure::input(format!("bad length in {predicate:?}")))?;
        let Machine::Fst(t) = load_kind(file, Kind::Fst)? else { unreachable!() };
        return Ok(match functionality_witness(&t, n)? {
            None => verdict(true, serde_json::Value::Null),
            Some((w, outs)) => verdict(
                false,
                json!({ "input": spaced(&w), "outputs": outs.iter().map(spaced).collect::<Vec<_>>() }),
            ),
        });
    }
    let Machine::Asst(s) = load_kind(file, Kind::Asst)? else { unreachable!() };
    let (st, regs, sigma) = (s.states(), s.registers(), s.input_alphabet());
    match predicate {
        "iffo" => Ok(match s.flow_dependency() {
            None => verdict(true, serde_json::Value::Null),
            Some((x, a, p, q)) => verdict(
                false,
                json!({ "register": regs.name(x), "symbol": sigma.symbol(a).as_str(), "states": [st.name(p), st.name(q)] }),
            ),
        }),
        "total-domain" => {
            let d = s.check_domain_is_underlying_language();
            let witness = match d.witness {
                Some((q, x)) => json!({ "state": st.name(q), "register": regs.name(x) }),
                None => serde_json::Value::Null,
            };
            Ok(verdict(d.equal, witness))
        }
        other => Err(Failure::input(format!("unknown predicate {other:?}"))),
    }
}

fn minrefine(file: &PathBuf, k: Option<usize>) -> CmdResult {
    let Machine::Precongruence(pc) = load_kind(file, Kind::Precongruence)? else { unreachable!() };
    let g = guard()?;
    match k {
        Some(k) => match find_refinement(&pc, k, &g)? {
            Some(b) => {
                out!("{}", json::to_string(&Machine::Dfa(b)));
                Ok(OK)
            }
            None => {
                out!("NONE");
                Ok(FALSE)
            }
        },
        None => {
            let r = minimal_refinement_guarded(&pc, &g)?;
            out!("k_min {}", r.k_min);
            for b in r.witnesses {
                out!("{}", serde_json::to_string(&json::to_file(&Machine::Dfa(b))).expect("serializable"));
            }
            Ok(OK)
        }
    }
}

fn faregmin(file: &PathBuf, k: usize, sample_len: usize, verify_len: usize) -> CmdResult {
    let Machine::Asst(s) = load_kind(file, Kind::Asst)? else { unreachable!() };
    let opts = FaRegMinOptions { sample_len, verify_len, guard: guard()?, ..FaRegMinOptions::default() };
    let outcome = fa_reg_min_with(&s, k, &opts)?;
    match &outcome.certificate {
        Certificate::Exact(class) => eprintln!("exact ({class:?})"),
        Certificate::Bounded { sample_len, max_append } => {
            eprintln!("bounded search (samples up to length {sample_len}, appends up to {max_append})")
        }
    }
    match outcome.solution {
        Some(sol) => {
            if !outcome.verified {
                eprintln!("warning: solution disagrees with the input within the verification bound");
            }
            out!("{}", json::to_string(&Machine::Asst(sol)));
            Ok(OK)
        }
        None => {
            out!("NONE");
            Ok(FALSE)
        }
    }
}

fn coloring(file: &PathBuf) -> CmdResult {
    let Machine::Graph(g) = load_kind(file, Kind::Graph)? else { unreachable!() };
    let s = coloring_to_asst(&g).map_err(Failure::input)?;
    out!("{}", json::to_string(&Machine::Asst(s)));
    Ok(OK)
}

fn congruence(file: &PathBuf, side: SideArg, horizon: usize, threshold: Option<usize>, as_json: bool) -> CmdResult {
    let m = load(file)?;
    let d = threshold.unwrap_or_else(|| default_threshold(horizon));
    let side = match side {
        SideArg::Left => Side::Left,
        SideArg::Right => Side::Right,
    };
    let part: BoundedPartition = match &m {
        Machine::Asst(s) => syntactic_classes(s, s.input_alphabet(), side, horizon, d),
        Machine::Bimachine(b) => syntactic_classes(b, b.input_alphabet(), side, horizon, d),
        Machine::AsyncBimachine(b) => syntactic_classes(b, b.input_alphabet(), side, horizon, d),
        Machine::Fst(t) => syntactic_classes(t, t.input_alphabet(), side, horizon, d),
        Machine::Dfa(a) => myhill_nerode_classes(&|w: &Word| a.accepts(w).unwrap_or(false), a.alphabet(), horizon),
        other => return Err(Failure::input(format!("a {} file has no word function", other.kind().as_str()))),
    };
    if as_json {
        out!("{}", serde_json::to_string_pretty(&part).expect("serializable"));
    } else {
        out!("classes {}", part.num_classes());
        for (i, class) in part.classes.iter().enumerate() {
            let shown: Vec<String> = class.iter().take(8).map(|w| format!("[{}]", spaced(w))).collect();
            let more = if class.len() > 8 { format!(" … ({} words)", class.len()) } else { String::new() };
            out!("{i}: {}{more}", shown.join(" "));
        }
        for div in &part.divergence {
            eprintln!("warning: [{}] and [{}] merged but diverging: {:?}", spaced(&div.u), spaced(&div.v), div.profile);
        }
    }
    Ok(OK)
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Eval { file, word } => eval(&file, &word),
        Command::Convert { file, to } => convert(&file, to),
        Command::Check { file, predicate } => check(&file, &predicate),
        Command::Minrefine { file, k } => minrefine(&file, k),
        Command::Faregmin { file, k, sample_len, verify_len } => faregmin(&file, k, sample_len, verify_len),
        Command::Coloring { file } => coloring(&file),
        Command::Congruence { file, side, horizon, threshold, json } => congruence(&file, side, horizon, threshold, json),
        Command::Dot { file, name } => {
            out_raw!("{}", dot::machine(&load(&file)?, &name));
            Ok(OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { INPUT } else { OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
