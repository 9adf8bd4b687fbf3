//! JSON machine files.
//!
//! A file is `{kind, version, payload}`; payloads refer to states, registers
//! and symbols by name, and words are lists of symbols.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::asst::{AppendExpr, Asst, AsstError, Step, Substitution};
use crate::automata::{AutomatonError, Dfa, Nfa, StateNames};
use crate::bimachines::{AsyncBimachine, Bimachine, BimachineError};
use crate::minimization::{Graph, GraphError};
use crate::refinement::{Precongruence, RefinementError};
use crate::transducers::{Fst, TransducerError};
use crate::words::{Alphabet, Symbol, Word, WordError};

pub const VERSION: &str = "1";

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("unsupported version {0:?}, expected \"1\"")]
    Version(String),
    #[error("expected a {expected} file, got {got}")]
    Kind { expected: &'static str, got: &'static str },
    #[error("unknown {what} {name:?}")]
    Unknown { what: &'static str, name: String },
    #[error("duplicate {what} {name:?}")]
    Duplicate { what: &'static str, name: String },
    #[error("a DFA has two transitions from {state} on {symbol}")]
    Nondeterministic { state: String, symbol: String },
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Transducer(#[from] TransducerError),
    #[error(transparent)]
    Asst(#[from] AsstError),
    #[error(transparent)]
    Bimachine(#[from] BimachineError),
    #[error(transparent)]
    Refinement(#[from] RefinementError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

type Result<T> = std::result::Result<T, JsonError>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionJson {
    pub from: String,
    pub symbol: String,
    pub to: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DfaJson {
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    pub initial: String,
    pub finals: Vec<String>,
    pub transitions: Vec<TransitionJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NfaJson {
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    pub initials: Vec<String>,
    pub finals: Vec<String>,
    pub transitions: Vec<TransitionJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FstTransitionJson {
    pub from: String,
    pub symbol: String,
    pub to: String,
    pub out: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FstJson {
    pub states: Vec<String>,
    pub input_alphabet: Vec<String>,
    pub output_alphabet: Vec<String>,
    pub init: BTreeMap<String, Vec<String>>,
    pub trans: Vec<FstTransitionJson>,
    #[serde(rename = "final")]
    pub fin: BTreeMap<String, Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExprJson {
    pub src: String,
    pub append: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsstTransitionJson {
    pub from: String,
    pub symbol: String,
    pub to: String,
    pub update: BTreeMap<String, ExprJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsstJson {
    pub states: Vec<String>,
    pub registers: Vec<String>,
    pub input_alphabet: Vec<String>,
    pub output_alphabet: Vec<String>,
    pub q0: String,
    pub v0: BTreeMap<String, Vec<String>>,
    pub delta: Vec<AsstTransitionJson>,
    pub gamma: BTreeMap<String, ExprJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaJson {
    pub l: String,
    pub symbol: String,
    pub r: String,
    pub out: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BimachineJson {
    pub left: DfaJson,
    pub right: NfaJson,
    pub output_alphabet: Vec<String>,
    pub lambda: BTreeMap<String, Vec<String>>,
    pub omega: Vec<OmegaJson>,
    pub rho: BTreeMap<String, Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairJson {
    pub l: String,
    pub sigma: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairTransitionJson {
    pub from: String,
    pub symbol: PairJson,
    pub to: String,
}

/// The right automaton of an asynchronous bimachine, read left to right.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsyncRightJson {
    pub states: Vec<String>,
    pub initials: Vec<String>,
    #[serde(rename = "final")]
    pub fin: String,
    pub transitions: Vec<PairTransitionJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsyncOmegaJson {
    pub symbol: PairJson,
    pub r: String,
    pub out: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsyncBimachineJson {
    pub left: DfaJson,
    pub right: AsyncRightJson,
    pub output_alphabet: Vec<String>,
    pub lambda: BTreeMap<String, Vec<String>>,
    pub omega: Vec<AsyncOmegaJson>,
    pub rho: BTreeMap<String, Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecongruenceJson {
    pub dfa: DfaJson,
    pub compatible_pairs: Vec<[String; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<String>,
    pub edges: Vec<[String; 2]>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Dfa,
    Nfa,
    Fst,
    Asst,
    Bimachine,
    AsyncBimachine,
    Precongruence,
    Graph,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Dfa => "dfa",
            Kind::Nfa => "nfa",
            Kind::Fst => "fst",
            Kind::Asst => "asst",
            Kind::Bimachine => "bimachine",
            Kind::AsyncBimachine => "async-bimachine",
            Kind::Precongruence => "precongruence",
            Kind::Graph => "graph",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MachineFile {
    pub kind: Kind,
    pub version: String,
    pub payload: serde_json::Value,
}

/// A parsed machine file.
#[derive(Clone, Debug)]
pub enum Machine {
    Dfa(Dfa),
    Nfa(Nfa),
    Fst(Fst),
    Asst(Asst),
    Bimachine(Bimachine),
    AsyncBimachine(AsyncBimachine),
    Precongruence(Precongruence),
    Graph(Graph),
}

impl Machine {
    pub fn kind(&self) -> Kind {
        match self {
            Machine::Dfa(_) => Kind::Dfa,
            Machine::Nfa(_) => Kind::Nfa,
            Machine::Fst(_) => Kind::Fst,
            Machine::Asst(_) => Kind::Asst,
            Machine::Bimachine(_) => Kind::Bimachine,
            Machine::AsyncBimachine(_) => Kind::AsyncBimachine,
            Machine::Precongruence(_) => Kind::Precongruence,
            Machine::Graph(_) => Kind::Graph,
        }
    }
}

fn names(s: &StateNames) -> Vec<String> {
    s.names().to_vec()
}

fn syms(a: &Alphabet) -> Vec<String> {
    a.symbols().iter().map(|s| s.to_string()).collect()
}

fn word_out(w: &Word) -> Vec<String> {
    w.iter().map(|s| s.to_string()).collect()
}

fn word_in(w: &[String]) -> Result<Word> {
    Ok(w.iter().map(|s| Symbol::new(s)).collect::<std::result::Result<Word, _>>()?)
}

fn alphabet_in(a: &[String]) -> Result<Alphabet> {
    let symbols = a.iter().map(|s| Symbol::new(s)).collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(Alphabet::new(symbols)?)
}

fn state_names(v: &[String]) -> Result<StateNames> {
    Ok(StateNames::new(v.iter().cloned())?)
}

fn lookup(n: &StateNames, what: &'static str, name: &str) -> Result<usize> {
    n.get(name).ok_or_else(|| JsonError::Unknown { what, name: name.to_string() })
}

fn symbol_idx(a: &Alphabet, name: &str) -> Result<usize> {
    Symbol::new(name)
        .ok()
        .and_then(|s| a.index_of(&s))
        .ok_or_else(|| JsonError::Unknown { what: "symbol", name: name.to_string() })
}

fn word_map_out(n: &StateNames, m: &BTreeMap<usize, Word>) -> BTreeMap<String, Vec<String>> {
    m.iter().map(|(q, w)| (n.name(*q).to_string(), word_out(w))).collect()
}

fn word_map_in(n: &StateNames, what: &'static str, m: &BTreeMap<String, Vec<String>>) -> Result<BTreeMap<usize, Word>> {
    m.iter().map(|(q, w)| Ok((lookup(n, what, q)?, word_in(w)?))).collect()
}

pub fn dfa_to_json(a: &Dfa) -> DfaJson {
    let st = a.states();
    let mut transitions = Vec::new();
    for (q, row) in a.table().iter().enumerate() {
        for (s, t) in row.iter().enumerate() {
            if let Some(t) = t {
                transitions.push(TransitionJson {
                    from: st.name(q).to_string(),
                    symbol: a.alphabet().symbol(s).to_string(),
                    to: st.name(*t).to_string(),
                });
            }
        }
    }
    DfaJson {
        states: names(st),
        alphabet: syms(a.alphabet()),
        initial: st.name(a.initial()).to_string(),
        finals: a.finals().iter().map(|&q| st.name(q).to_string()).collect(),
        transitions,
    }
}

pub fn dfa_from_json(j: &DfaJson) -> Result<Dfa> {
    let st = state_names(&j.states)?;
    let alphabet = alphabet_in(&j.alphabet)?;
    let mut delta = vec![vec![None; alphabet.len()]; st.len()];
    for t in &j.transitions {
        let (p, s, q) = (lookup(&st, "state", &t.from)?, symbol_idx(&alphabet, &t.symbol)?, lookup(&st, "state", &t.to)?);
        if delta[p][s].replace(q).is_some() {
            return Err(JsonError::Nondeterministic { state: t.from.clone(), symbol: t.symbol.clone() });
        }
    }
    let initial = lookup(&st, "state", &j.initial)?;
    let finals = j.finals.iter().map(|q| lookup(&st, "state", q)).collect::<Result<_>>()?;
    Ok(Dfa::new(st, alphabet, initial, finals, delta)?)
}

pub fn nfa_to_json(a: &Nfa) -> NfaJson {
    let st = a.states();
    NfaJson {
        states: names(st),
        alphabet: syms(a.alphabet()),
        initials: a.initials().iter().map(|&q| st.name(q).to_string()).collect(),
        finals: a.finals().iter().map(|&q| st.name(q).to_string()).collect(),
        transitions: a
            .transitions()
            .iter()
            .map(|&(p, s, q)| TransitionJson {
                from: st.name(p).to_string(),
                symbol: a.alphabet().symbol(s).to_string(),
                to: st.name(q).to_string(),
            })
            .collect(),
    }
}

pub fn nfa_from_json(j: &NfaJson) -> Result<Nfa> {
    let st = state_names(&j.states)?;
    let alphabet = alphabet_in(&j.alphabet)?;
    let set = |v: &[String]| v.iter().map(|q| lookup(&st, "state", q)).collect::<Result<BTreeSet<_>>>();
    let initials = set(&j.initials)?;
    let finals = set(&j.finals)?;
    let transitions = j
        .transitions
        .iter()
        .map(|t| Ok((lookup(&st, "state", &t.from)?, symbol_idx(&alphabet, &t.symbol)?, lookup(&st, "state", &t.to)?)))
        .collect::<Result<_>>()?;
    Ok(Nfa::new(st, alphabet, initials, finals, transitions)?)
}

pub fn fst_to_json(t: &Fst) -> FstJson {
    let st = t.states();
    FstJson {
        states: names(st),
        input_alphabet: syms(t.input_alphabet()),
        output_alphabet: syms(t.output_alphabet()),
        init: word_map_out(st, t.init_out()),
        trans: t
            .trans_out()
            .iter()
            .map(|(&(p, s, q), w)| FstTransitionJson {
                from: st.name(p).to_string(),
                symbol: t.input_alphabet().symbol(s).to_string(),
                to: st.name(q).to_string(),
                out: word_out(w),
            })
            .collect(),
        fin: word_map_out(st, t.final_out()),
    }
}

pub fn fst_from_json(j: &FstJson) -> Result<Fst> {
    let st = state_names(&j.states)?;
    let input = alphabet_in(&j.input_alphabet)?;
    let output = alphabet_in(&j.output_alphabet)?;
    let init = word_map_in(&st, "state", &j.init)?;
    let fin = word_map_in(&st, "state", &j.fin)?;
    let mut trans = BTreeMap::new();
    for t in &j.trans {
        let key = (lookup(&st, "state", &t.from)?, symbol_idx(&input, &t.symbol)?, lookup(&st, "state", &t.to)?);
        if trans.insert(key, word_in(&t.out)?).is_some() {
            return Err(JsonError::Duplicate { what: "transition", name: format!("{} {} {}", t.from, t.symbol, t.to) });
        }
    }
    Ok(Fst::new(st, input, output, init, trans, fin)?)
}

fn expr_out(regs: &StateNames, e: &AppendExpr) -> ExprJson {
    ExprJson { src: regs.name(e.src).to_string(), append: word_out(&e.append) }
}

fn expr_in(regs: &StateNames, e: &ExprJson) -> Result<AppendExpr> {
    Ok(AppendExpr::new(lookup(regs, "register", &e.src)?, word_in(&e.append)?))
}

pub fn asst_to_json(a: &Asst) -> AsstJson {
    let (st, regs) = (a.states(), a.registers());
    let mut delta = Vec::new();
    for (q, row) in a.table().iter().enumerate() {
        for (s, step) in row.iter().enumerate() {
            let Some(step) = step else { continue };
            let update = step
                .update
                .0
                .iter()
                .enumerate()
                .filter_map(|(x, e)| e.as_ref().map(|e| (regs.name(x).to_string(), expr_out(regs, e))))
                .collect();
            delta.push(AsstTransitionJson {
                from: st.name(q).to_string(),
                symbol: a.input_alphabet().symbol(s).to_string(),
                to: st.name(step.target).to_string(),
                update,
            });
        }
    }
    AsstJson {
        states: names(st),
        registers: names(regs),
        input_alphabet: syms(a.input_alphabet()),
        output_alphabet: syms(a.output_alphabet()),
        q0: st.name(a.initial()).to_string(),
        v0: a.v0().iter().enumerate().map(|(x, w)| (regs.name(x).to_string(), word_out(w))).collect(),
        delta,
        gamma: a
            .gammas()
            .iter()
            .enumerate()
            .filter_map(|(q, e)| e.as_ref().map(|e| (st.name(q).to_string(), expr_out(regs, e))))
            .collect(),
    }
}

/// Registers missing from `v0` start with ε.
pub fn asst_from_json(j: &AsstJson) -> Result<Asst> {
    let st = state_names(&j.states)?;
    let regs = state_names(&j.registers)?;
    let input = alphabet_in(&j.input_alphabet)?;
    let output = alphabet_in(&j.output_alphabet)?;
    let mut v0 = vec![Word::empty(); regs.len()];
    for (x, w) in &j.v0 {
        v0[lookup(&regs, "register", x)?] = word_in(w)?;
    }
    let mut delta: Vec<Vec<Option<Step>>> = vec![vec![None; input.len()]; st.len()];
    for t in &j.delta {
        let (p, s) = (lookup(&st, "state", &t.from)?, symbol_idx(&input, &t.symbol)?);
        let mut update = vec![None; regs.len()];
        for (x, e) in &t.update {
            update[lookup(&regs, "register", x)?] = Some(expr_in(&regs, e)?);
        }
        let step = Step { target: lookup(&st, "state", &t.to)?, update: Substitution(update) };
        if delta[p][s].replace(step).is_some() {
            return Err(JsonError::Nondeterministic { state: t.from.clone(), symbol: t.symbol.clone() });
        }
    }
    let mut gamma = vec![None; st.len()];
    for (q, e) in &j.gamma {
        gamma[lookup(&st, "state", q)?] = Some(expr_in(&regs, e)?);
    }
    let q0 = lookup(&st, "state", &j.q0)?;
    Ok(Asst::new(st, regs, input, output, q0, v0, delta, gamma)?)
}

pub fn bimachine_to_json(b: &Bimachine) -> BimachineJson {
    let (ls, rs) = (b.left().states(), b.right().states());
    BimachineJson {
        left: dfa_to_json(b.left()),
        right: nfa_to_json(b.right()),
        output_alphabet: syms(b.output_alphabet()),
        lambda: word_map_out(rs, b.lambda()),
        omega: b
            .omega()
            .iter()
            .map(|(&(l, s, r), w)| OmegaJson {
                l: ls.name(l).to_string(),
                symbol: b.input_alphabet().symbol(s).to_string(),
                r: rs.name(r).to_string(),
                out: word_out(w),
            })
            .collect(),
        rho: word_map_out(ls, b.rho()),
    }
}

pub fn bimachine_from_json(j: &BimachineJson) -> Result<Bimachine> {
    let left = dfa_from_json(&j.left)?;
    let right = nfa_from_json(&j.right)?;
    let output = alphabet_in(&j.output_alphabet)?;
    let lambda = word_map_in(right.states(), "right state", &j.lambda)?;
    let rho = word_map_in(left.states(), "left state", &j.rho)?;
    let mut omega = BTreeMap::new();
    for o in &j.omega {
        let key = (
            lookup(left.states(), "left state", &o.l)?,
            symbol_idx(left.alphabet(), &o.symbol)?,
            lookup(right.states(), "right state", &o.r)?,
        );
        omega.insert(key, word_in(&o.out)?);
    }
    Ok(Bimachine::new(left, right, output, lambda, omega, rho)?)
}

pub fn async_to_json(b: &AsyncBimachine) -> AsyncBimachineJson {
    let left = b.left();
    let (ls, rs) = (left.states(), b.right_states());
    let pair = |l: usize, s: usize| PairJson { l: ls.name(l).to_string(), sigma: left.alphabet().symbol(s).to_string() };
    let mut transitions = Vec::new();
    for l in 0..left.num_states() {
        for s in 0..left.alphabet().len() {
            for r in 0..rs.len() {
                if let Some(r1) = b.right_step(l, s, r) {
                    transitions.push(PairTransitionJson {
                        from: rs.name(r1).to_string(),
                        symbol: pair(l, s),
                        to: rs.name(r).to_string(),
                    });
                }
            }
        }
    }
    AsyncBimachineJson {
        left: dfa_to_json(left),
        right: AsyncRightJson {
            states: names(rs),
            initials: b.right_initials().iter().map(|&r| rs.name(r).to_string()).collect(),
            fin: rs.name(b.r_final()).to_string(),
            transitions,
        },
        output_alphabet: syms(b.output_alphabet()),
        lambda: word_map_out(rs, b.lambda()),
        omega: b
            .omega()
            .iter()
            .map(|(&(l, s, r), w)| AsyncOmegaJson { symbol: pair(l, s), r: rs.name(r).to_string(), out: word_out(w) })
            .collect(),
        rho: word_map_out(ls, b.rho()),
    }
}

pub fn async_from_json(j: &AsyncBimachineJson) -> Result<AsyncBimachine> {
    let left = dfa_from_json(&j.left)?;
    let rs = state_names(&j.right.states)?;
    let output = alphabet_in(&j.output_alphabet)?;
    let initials = j.right.initials.iter().map(|r| lookup(&rs, "right state", r)).collect::<Result<_>>()?;
    let r_final = lookup(&rs, "right state", &j.right.fin)?;
    let pair = |p: &PairJson| -> Result<(usize, usize)> {
        Ok((lookup(left.states(), "left state", &p.l)?, symbol_idx(left.alphabet(), &p.sigma)?))
    };
    let mut back = vec![vec![vec![None; rs.len()]; left.alphabet().len()]; left.num_states()];
    for t in &j.right.transitions {
        let (l, s) = pair(&t.symbol)?;
        let (r1, r) = (lookup(&rs, "right state", &t.from)?, lookup(&rs, "right state", &t.to)?);
        if back[l][s][r].replace(r1).is_some() {
            return Err(JsonError::Duplicate { what: "right transition into", name: t.to.clone() });
        }
    }
    let mut omega = BTreeMap::new();
    for o in &j.omega {
        let (l, s) = pair(&o.symbol)?;
        omega.insert((l, s, lookup(&rs, "right state", &o.r)?), word_in(&o.out)?);
    }
    let lambda = word_map_in(&rs, "right state", &j.lambda)?;
    let rho = word_map_in(left.states(), "left state", &j.rho)?;
    Ok(AsyncBimachine::new(left, rs, initials, r_final, back, output, lambda, omega, rho)?)
}

pub fn precongruence_to_json(pc: &Precongruence) -> PrecongruenceJson {
    let st = pc.dfa().states();
    PrecongruenceJson {
        dfa: dfa_to_json(pc.dfa()),
        compatible_pairs: pc
            .compatible_pairs()
            .into_iter()
            .filter(|(p, q)| p < q)
            .map(|(p, q)| [st.name(p).to_string(), st.name(q).to_string()])
            .collect(),
    }
}

pub fn precongruence_from_json(j: &PrecongruenceJson) -> Result<Precongruence> {
    let dfa = dfa_from_json(&j.dfa)?;
    let pairs = j
        .compatible_pairs
        .iter()
        .map(|[p, q]| Ok((lookup(dfa.states(), "state", p)?, lookup(dfa.states(), "state", q)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Precongruence::new(dfa, &pairs)?)
}

pub fn graph_to_json(g: &Graph) -> GraphJson {
    let v = |i: usize| g.vertices()[i].to_string();
    GraphJson {
        vertices: g.vertices().iter().map(|s| s.to_string()).collect(),
        edges: g.edges().iter().map(|&(a, b)| [v(a), v(b)]).collect(),
    }
}

pub fn graph_from_json(j: &GraphJson) -> Result<Graph> {
    let vs: Vec<&str> = j.vertices.iter().map(String::as_str).collect();
    let es: Vec<(&str, &str)> = j.edges.iter().map(|[a, b]| (a.as_str(), b.as_str())).collect();
    Ok(Graph::new(&vs, &es)?)
}

fn payload_of(m: &Machine) -> serde_json::Value {
    let v = match m {
        Machine::Dfa(a) => serde_json::to_value(dfa_to_json(a)),
        Machine::Nfa(a) => serde_json::to_value(nfa_to_json(a)),
        Machine::Fst(t) => serde_json::to_value(fst_to_json(t)),
        Machine::Asst(a) => serde_json::to_value(asst_to_json(a)),
        Machine::Bimachine(b) => serde_json::to_value(bimachine_to_json(b)),
        Machine::AsyncBimachine(b) => serde_json::to_value(async_to_json(b)),
        Machine::Precongruence(p) => serde_json::to_value(precongruence_to_json(p)),
        Machine::Graph(g) => serde_json::to_value(graph_to_json(g)),
    };
    v.expect("DTOs always serialize")
}

pub fn to_file(m: &Machine) -> MachineFile {
    MachineFile { kind: m.kind(), version: VERSION.to_string(), payload: payload_of(m) }
}

/// Pretty-printed machine file.
pub fn to_string(m: &Machine) -> String {
    serde_json::to_string_pretty(&to_file(m)).expect("values always serialize")
}

pub fn from_file(f: MachineFile) -> Result<Machine> {
    if f.version != VERSION {
        return Err(JsonError::Version(f.version));
    }
    let p = f.payload;
    Ok(match f.kind {
        Kind::Dfa => Machine::Dfa(dfa_from_json(&serde_json::from_value(p)?)?),
        Kind::Nfa => Machine::Nfa(nfa_from_json(&serde_json::from_value(p)?)?),
        Kind::Fst => Machine::Fst(fst_from_json(&serde_json::from_value(p)?)?),
        Kind::Asst => Machine::Asst(asst_from_json(&serde_json::from_value(p)?)?),
        Kind::Bimachine => Machine::Bimachine(bimachine_from_json(&serde_json::from_value(p)?)?),
        Kind::AsyncBimachine => Machine::AsyncBimachine(async_from_json(&serde_json::from_value(p)?)?),
        Kind::Precongruence => Machine::Precongruence(precongruence_from_json(&serde_json::from_value(p)?)?),
        Kind::Graph => Machine::Graph(graph_from_json(&serde_json::from_value(p)?)?),
    })
}

pub fn from_str(text: &str) -> Result<Machine> {
    from_file(serde_json::from_str(text)?)
}

pub fn from_slice(bytes: &[u8]) -> Result<Machine> {
    from_file(serde_json::from_slice(bytes)?)
}

/// Parses a file and insists on one kind.
pub fn expect_kind(m: Machine, kind: Kind) -> Result<Machine> {
    if m.kind() == kind {
        Ok(m)
    } else {
        Err(JsonError::Kind { expected: kind.as_str(), got: m.kind().as_str() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn round_trip(m: Machine) -> Machine {
        from_str(&to_string(&m)).unwrap()
    }

    #[test]
    fn asst_round_trip() {
        for a in [fixtures::last_letter_asst(), fixtures::last_letter_partial(), fixtures::last_letter_iffo()] {
            let Machine::Asst(b) = round_trip(Machine::Asst(a.clone())) else { panic!() };
            assert_eq!(a, b);
        }
    }

    #[test]
    fn other_round_trips() {
        let Machine::Fst(t) = round_trip(Machine::Fst(fixtures::last_letter_fst())) else { panic!() };
        assert_eq!(t, fixtures::last_letter_fst());
        let Machine::Bimachine(b) = round_trip(Machine::Bimachine(fixtures::swap_bimachine())) else { panic!() };
        assert_eq!(b, fixtures::swap_bimachine());
        let Machine::AsyncBimachine(b) = round_trip(Machine::AsyncBimachine(fixtures::swap_async())) else { panic!() };
        assert_eq!(b, fixtures::swap_async());
        let pc = fixtures::three_state_precongruence();
        let Machine::Precongruence(p) = round_trip(Machine::Precongruence(pc.clone())) else { panic!() };
        assert_eq!(p.compatible_pairs(), pc.compatible_pairs());
        let g = Graph::complete(3);
        let Machine::Graph(h) = round_trip(Machine::Graph(g.clone())) else { panic!() };
        assert_eq!(g, h);
        let dfa = fixtures::last_letter_asst().underlying();
        let Machine::Dfa(d) = round_trip(Machine::Dfa(dfa.clone())) else { panic!() };
        assert_eq!(d, dfa);
        let Machine::Nfa(n) = round_trip(Machine::Nfa(dfa.to_nfa())) else { panic!() };
        assert_eq!(n, dfa.to_nfa());
    }

    #[test]
    fn field_names_follow_the_schema() {
        let v = serde_json::to_value(to_file(&Machine::Asst(fixtures::last_letter_asst()))).unwrap();
        assert_eq!(v["kind"], "asst");
        assert_eq!(v["version"], "1");
        for key in ["states", "registers", "input_alphabet", "output_alphabet", "q0", "v0", "delta", "gamma"] {
            assert!(v["payload"].get(key).is_some(), "{key}");
        }
        let t = serde_json::to_value(fst_to_json(&fixtures::last_letter_fst())).unwrap();
        assert!(t.get("final").is_some() && t.get("init").is_some());
        let b = serde_json::to_value(to_file(&Machine::AsyncBimachine(fixtures::swap_async()))).unwrap();
        assert_eq!(b["kind"], "async-bimachine");
        assert!(b["payload"]["omega"][0]["symbol"].get("sigma").is_some());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(from_str("{"), Err(JsonError::Syntax(_))));
        assert!(matches!(
            from_str(r#"{"kind":"graph","version":"2","payload":{}}"#),
            Err(JsonError::Version(_))
        ));
        assert!(matches!(
            from_str(r#"{"kind":"graph","version":"1","payload":{"vertices":["a"],"edges":[["a","b"]]}}"#),
            Err(JsonError::Graph(GraphError::UnknownVertex(_)))
        ));
        let g = from_str(r#"{"kind":"graph","version":"1","payload":{"vertices":["a"],"edges":[]}}"#).unwrap();
        assert!(matches!(expect_kind(g, Kind::Asst), Err(JsonError::Kind { .. })));
    }
}
