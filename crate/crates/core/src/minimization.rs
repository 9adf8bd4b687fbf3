//! Register minimization with a fixed underlying automaton, the graph-coloring
//! hardness instances, and the state/register tradeoff family.
//!
//! A solution `S'` must agree with `S` on `dom(S)`; outside of it `S'` may be
//! defined.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::asst::{AppendExpr, Asst, AsstError, Step, Substitution};
use crate::automata::{AutomatonError, Dfa, StateNames};
use crate::bimachines::{pair_symbol, AsyncBimachine, END_MARKER};
use crate::conversions::{async_from_flows, ConversionError};
use crate::guard::{Guard, ResourceError};
use crate::refinement::{
    compatibility, extend_sequential, extension_class, find_refinement, ExtensionClass, OutputDefault,
    RefinementError,
};
use crate::transducers::SeqTransducer;
use crate::words::{Alphabet, Symbol, Word, WordError};
use crate::WordFunction;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex name {0:?} is not a valid symbol")]
    BadVertex(String),
    #[error("duplicate vertex {0}")]
    DuplicateVertex(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("self-loop on {0}")]
    SelfLoop(String),
    #[error("graph has no vertices")]
    Empty,
}

/// An undirected simple graph. Edges are stored as `(u, v)` with `u < v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    vertices: Vec<Symbol>,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new(vertices: &[&str], edges: &[(&str, &str)]) -> Result<Self, GraphError> {
        let mut vs: Vec<Symbol> = Vec::new();
        for v in vertices {
            let s = Symbol::new(v).map_err(|_| GraphError::BadVertex(v.to_string()))?;
            if vs.contains(&s) {
                return Err(GraphError::DuplicateVertex(v.to_string()));
            }
            vs.push(s);
        }
        let find = |v: &str| {
            vs.iter().position(|s| s.as_str() == v).ok_or_else(|| GraphError::UnknownVertex(v.to_string()))
        };
        let mut es = Vec::new();
        for (u, v) in edges {
            es.push((find(u)?, find(v)?));
        }
        Graph::from_indices(vs, es)
    }

    pub fn from_indices(vertices: Vec<Symbol>, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            for x in [u, v] {
                if x >= vertices.len() {
                    return Err(GraphError::UnknownVertex(x.to_string()));
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(vertices[u].to_string()));
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(Graph { vertices, edges: set })
    }

    fn numbered(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Graph {
        let vs = (0..n).map(|i| Symbol::new(&format!("v{i}")).expect("valid")).collect();
        Graph::from_indices(vs, edges).expect("valid")
    }

    pub fn complete(n: usize) -> Graph {
        Graph::numbered(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
    }

    pub fn cycle(n: usize) -> Graph {
        Graph::numbered(n, (0..n).map(|u| (u, (u + 1) % n)).filter(|(u, v)| u != v))
    }

    pub fn path(n: usize) -> Graph {
        Graph::numbered(n, (1..n).map(|v| (v - 1, v)))
    }

    pub fn edgeless(n: usize) -> Graph {
        Graph::numbered(n, [])
    }

    pub fn vertices(&self) -> &[Symbol] {
        &self.vertices
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    /// A proper coloring with at most `k` colors, by backtracking.
    pub fn coloring(&self, k: usize) -> Option<Vec<usize>> {
        fn go(g: &Graph, k: usize, colors: &mut Vec<usize>) -> bool {
            let v = colors.len();
            if v == g.num_vertices() {
                return true;
            }
            let used = colors.iter().copied().max().map_or(0, |m| m + 1);
            for c in 0..k.min(used + 1) {
                if (0..v).all(|u| colors[u] != c || !g.adjacent(u, v)) {
                    colors.push(c);
                    if go(g, k, colors) {
                        return true;
                    }
                    colors.pop();
                }
            }
            false
        }
        let mut colors = Vec::new();
        go(self, k, &mut colors).then_some(colors)
    }

    pub fn chromatic_number(&self) -> usize {
        (0..=self.num_vertices()).find(|&k| self.coloring(k).is_some()).expect("n colors always suffice")
    }
}

/// The hardness machine of a graph: one state, alphabet `V`, registers
/// `V ∪ {S0, SN, SF}`, output register `S0`.
///
/// On letter `x`: `S0 := x`, `x := SF·f`, and `v := SN·n` for every edge
/// `{x, v}`; other registers become undefined. As a right automaton this is
/// `x -x-> S0`, `SF -x-> x` and `SN -x-> v`.
pub fn coloring_to_asst(g: &Graph) -> Result<Asst, GraphError> {
    if g.num_vertices() == 0 {
        return Err(GraphError::Empty);
    }
    let n = g.num_vertices();
    let mut regs = StateNames::new(g.vertices.iter().map(|v| v.to_string())).expect("distinct symbols");
    let s0 = regs.push_fresh("S0");
    let sn = regs.push_fresh("SN");
    let sf = regs.push_fresh("SF");
    let input = Alphabet::new(g.vertices.clone()).expect("distinct");
    let output = Alphabet::letters("fn");
    let f = Word::letters("f");
    let nn = Word::letters("n");
    let row = (0..n)
        .map(|x| {
            let mut update = Substitution(vec![None; n + 3]);
            update.0[s0] = Some(AppendExpr::copy(x));
            update.0[x] = Some(AppendExpr::new(sf, f.clone()));
            for v in 0..n {
                if g.adjacent(x, v) {
                    update.0[v] = Some(AppendExpr::new(sn, nn.clone()));
                }
            }
            Some(Step { target: 0, update })
        })
        .collect();
    Ok(Asst::new(
        StateNames::new(["q"]).expect("valid"),
        regs,
        input,
        output,
        0,
        vec![Word::empty(); n + 3],
        vec![row],
        vec![Some(AppendExpr::copy(s0))],
    )
    .expect("consistent by construction"))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MinimizationError {
    #[error("k must be at least 1")]
    ZeroRegisters,
    #[error(transparent)]
    Conversion(#[from] ConversionError),
    #[error(transparent)]
    Refinement(#[from] RefinementError),
    #[error(transparent)]
    Resource(#[from] ResourceError),
    #[error(transparent)]
    Asst(#[from] AsstError),
}

/// How an FA-Reg-Min answer was obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// Through minimal refinement; both answers are exact.
    Exact(ExtensionClass),
    /// Through the bounded synthesis fallback; an absent answer only means
    /// that nothing was found within the bounds.
    Bounded { sample_len: usize, max_append: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaRegMinOutcome {
    pub solution: Option<Asst>,
    pub certificate: Certificate,
    /// The solution agrees with the input on its domain up to `verify_len`.
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaRegMinOptions {
    /// Append bound for the fallback; defaults to the longest append of the input.
    pub max_append: Option<usize>,
    /// Input words up to this length drive the fallback synthesis.
    pub sample_len: usize,
    pub verify_len: usize,
    pub guard: Guard,
}

impl Default for FaRegMinOptions {
    fn default() -> Self {
        FaRegMinOptions { max_append: None, sample_len: 6, verify_len: 8, guard: Guard::default() }
    }
}

/// The mirrored right transducer of the asynchronous bimachine, restricted
/// to reversed annotated runs of the left automaton.
///
/// It reads `(l_n,<end>) (l_{n-1},σ_n) … (l_0,σ_1)` and outputs the reversed
/// image. States pair a register with the left state expected next.
struct MirroredRight {
    seq: SeqTransducer,
    /// Annotated symbol index of `(l, σ)`, or of `(l,<end>)` for `σ = None`.
    symbol: BTreeMap<(usize, Option<usize>), usize>,
}

fn mirrored_right(b: &AsyncBimachine) -> MirroredRight {
    let left = b.left();
    let sigma = left.alphabet();
    let lnames = left.states();
    let mut syms = Vec::new();
    let mut symbol = BTreeMap::new();
    for l in 0..left.num_states() {
        for s in 0..sigma.len() {
            if left.step(l, s).is_some() {
                symbol.insert((l, Some(s)), syms.len());
                syms.push(pair_symbol(lnames.name(l), sigma.symbol(s).as_str()));
            }
        }
    }
    for l in 0..left.num_states() {
        if left.is_final(l) && b.rho().contains_key(&l) {
            symbol.insert((l, None), syms.len());
            syms.push(pair_symbol(lnames.name(l), END_MARKER));
        }
    }
    let annotated = Alphabet::new(syms).expect("distinct pairs");

    // `None` in the second component is the start, before the marker.
    let start = (b.r_final(), None::<usize>);
    let mut index = BTreeMap::from([(start, 0usize)]);
    let mut order = vec![start];
    let mut queue = VecDeque::from([start]);
    let mut edges: Vec<(usize, usize, usize, Word)> = Vec::new();
    while let Some((r, d)) = queue.pop_front() {
        let from = index[&(r, d)];
        let mut succ = Vec::new();
        match d {
            None => {
                for (&(l, s), &a) in &symbol {
                    if s.is_none() {
                        succ.push((a, (r, Some(l)), b.rho()[&l].reversed()));
                    }
                }
            }
            Some(l) => {
                for (&(l1, s), &a) in &symbol {
                    let Some(s) = s else { continue };
                    if left.step(l1, s) != Some(l) {
                        continue;
                    }
                    if let (Some(r1), Some(w)) = (b.right_step(l1, s, r), b.omega().get(&(l1, s, r))) {
                        succ.push((a, (r1, Some(l1)), w.reversed()));
                    }
                }
            }
        }
        for (a, next, w) in succ {
            let to = *index.entry(next).or_insert_with(|| {
                order.push(next);
                queue.push_back(next);
                order.len() - 1
            });
            edges.push((from, a, to, w));
        }
    }
    let n = order.len();
    let mut delta = vec![vec![None; annotated.len()]; n];
    let mut step_out = vec![vec![None; annotated.len()]; n];
    for (p, a, q, w) in edges {
        delta[p][a] = Some(q);
        step_out[p][a] = Some(w);
    }
    let rnames = b.right_states();
    let names = StateNames::new(order.iter().map(|&(r, d)| match d {
        None => format!("{}@start", rnames.name(r)),
        Some(l) => format!("{}@{}", rnames.name(r), lnames.name(l)),
    }))
    .expect("distinct pairs");
    let final_out: Vec<Option<Word>> = order
        .iter()
        .map(|&(r, d)| (d == Some(left.initial())).then(|| b.lambda().get(&r).map(Word::reversed)).flatten())
        .collect();
    let finals = (0..n).filter(|&p| final_out[p].is_some()).collect();
    let dfa = Dfa::new(names, annotated, 0, finals, delta).expect("consistent");
    MirroredRight { seq: SeqTransducer { dfa, output: b.output_alphabet().clone(), init_out: Word::empty(), step_out, final_out }, symbol }
}

/// Reads a total sequential transducer on the annotated alphabet back as an
/// aSST over the left automaton: its states become registers.
fn asst_from_mirrored(b: &AsyncBimachine, m: &MirroredRight, t: &SeqTransducer) -> Result<Asst, AsstError> {
    let left = b.left();
    let k = t.dfa.num_states();
    let p0 = t.dfa.initial();
    let rev = |w: &Option<Word>| w.as_ref().map(Word::reversed).unwrap_or_default();
    let v0 = (0..k).map(|p| rev(&t.final_out[p])).collect();
    let mut delta = vec![vec![None; left.alphabet().len()]; left.num_states()];
    for (&(l, s), &a) in &m.symbol {
        let Some(s) = s else { continue };
        let target = left.step(l, s).expect("pair of a transition");
        let update = (0..k)
            .map(|p| t.dfa.step(p, a).map(|p1| AppendExpr::new(p1, rev(&t.step_out[p][a]))))
            .collect();
        delta[l][s] = Some(Step { target, update: Substitution(update) });
    }
    let gamma = (0..left.num_states())
        .map(|l| {
            let a = *m.symbol.get(&(l, None))?;
            let p = t.dfa.step(p0, a)?;
            Some(AppendExpr::new(p, rev(&t.step_out[p0][a]).concat(&t.init_out.reversed())))
        })
        .collect();
    Asst::new(
        left.states().clone(),
        StateNames::numbered("X", k),
        left.alphabet().clone(),
        b.output_alphabet().clone(),
        left.initial(),
        v0,
        delta,
        gamma,
    )
}

/// Is there an aSST with `k` registers and the same underlying automaton
/// agreeing with `s` on its domain? Uses [`FaRegMinOptions::default`].
pub fn fa_reg_min(s: &Asst, k: usize) -> Result<FaRegMinOutcome, MinimizationError> {
    fa_reg_min_with(s, k, &FaRegMinOptions::default())
}

/// Converts to an asynchronous bimachine, mirrors its right transducer, and
/// solves the extension problem: exactly by minimal refinement when the
/// mirrored transducer is letter-to-letter or has a prefix-closed domain,
/// otherwise by bounded synthesis.
pub fn fa_reg_min_with(s: &Asst, k: usize, opts: &FaRegMinOptions) -> Result<FaRegMinOutcome, MinimizationError> {
    if k == 0 {
        return Err(MinimizationError::ZeroRegisters);
    }
    if s.num_registers() == 0 {
        let solution = Some(s.pad_registers(k));
        return Ok(FaRegMinOutcome { solution, certificate: Certificate::Exact(ExtensionClass::PrefixClosed), verified: true });
    }
    let norm = if s.fixed_output_register().is_some() { s.clone() } else { s.normalize_output_register() };
    let x_out = norm.fixed_output_register().unwrap_or(0);
    let b = async_from_flows(&norm, x_out)?;
    let m = mirrored_right(&b);
    let verify = |cand: &Asst| {
        crate::first_disagreement_on_domain(s.input_alphabet(), opts.verify_len, s, cand).is_none()
    };

    if let Some(class) = extension_class(&m.seq) {
        let pc = compatibility(&m.seq)?;
        let certificate = Certificate::Exact(class);
        let Some(refined) = find_refinement(&pc, k, &opts.guard)? else {
            return Ok(FaRegMinOutcome { solution: None, certificate, verified: true });
        };
        let ext = extend_sequential(&m.seq, &refined, OutputDefault::Epsilon)?;
        let cand = asst_from_mirrored(&b, &m, &ext)?.pad_registers(k);
        let verified = verify(&cand);
        return Ok(FaRegMinOutcome { solution: Some(cand), certificate, verified });
    }

    let max_append = opts.max_append.unwrap_or_else(|| longest_append(s));
    let max_final = longest_append(s).max(s.v0().iter().map(Word::len).max().unwrap_or(0)).max(max_append);
    let samples = annotated_samples(s, &b, &m, opts.sample_len);
    let synth = SeqSynthesis {
        letters: m.seq.dfa.alphabet().len(),
        k,
        max_append,
        max_final,
        samples,
        allow_partial: false,
        limit: opts.guard.search_nodes,
        nodes: 0,
    };
    let certificate = Certificate::Bounded { sample_len: opts.sample_len, max_append };
    let mut accept = |t: &SeqTransducer| {
        asst_from_mirrored(&b, &m, t).ok().map(|a| a.pad_registers(k)).filter(|a| verify(a)).is_some()
    };
    let found = synth.run(m.seq.dfa.alphabet(), m.seq.output.clone(), &mut accept)?;
    let solution = match found {
        Some(t) => Some(asst_from_mirrored(&b, &m, &t)?.pad_registers(k)),
        None => None,
    };
    Ok(FaRegMinOutcome { verified: solution.is_some(), solution, certificate })
}

fn longest_append(s: &Asst) -> usize {
    let updates = s.table().iter().flatten().flatten().flat_map(|st| st.update.0.iter().flatten());
    updates.chain(s.gammas().iter().flatten()).map(|e| e.append.len()).max().unwrap_or(0)
}

/// Reversed annotated words of the domain paired with reversed outputs.
fn annotated_samples(s: &Asst, b: &AsyncBimachine, m: &MirroredRight, max_len: usize) -> Vec<(Vec<usize>, Option<Word>)> {
    let left = b.left();
    let sigma = s.input_alphabet();
    let mut out = Vec::new();
    for w in sigma.words_up_to(max_len) {
        let Some(y) = s.eval(&w) else { continue };
        let idx = sigma.encode(&w).expect("own alphabet");
        let mut l = left.initial();
        let mut annotated = Vec::with_capacity(idx.len() + 1);
        for &a in &idx {
            annotated.push(m.symbol[&(l, Some(a))]);
            l = left.step(l, a).expect("in domain");
        }
        annotated.push(m.symbol[&(l, None)]);
        annotated.reverse();
        out.push((annotated, Some(y.reversed())));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot<T> {
    Free,
    Undefined,
    Set(T),
}

#[derive(Clone, Debug)]
struct Assignment {
    init: Option<Word>,
    trans: Vec<Vec<Slot<usize>>>,
    outs: Vec<Vec<Option<Word>>>,
    fin: Vec<Slot<Word>>,
}

enum Var {
    Init,
    Trans(usize, usize),
    Out(usize, usize),
    Fin(usize),
}

enum Val {
    Word(Word),
    Target(usize),
    Undefined,
}

enum Check {
    Done,
    Fail,
    Branch(Var, Vec<Val>),
}

/// Lazy synthesis of a sequential transducer with at most `k` states from
/// sample input/output pairs. Variables are assigned only when a sample run
/// needs them; candidate outputs are the prefixes of what is still missing.
struct SeqSynthesis {
    letters: usize,
    k: usize,
    max_append: usize,
    max_final: usize,
    /// `None` marks inputs that must be rejected.
    samples: Vec<(Vec<usize>, Option<Word>)>,
    allow_partial: bool,
    limit: usize,
    nodes: usize,
}

fn prefixes_up_to(w: &[Symbol], bound: usize) -> Vec<Val> {
    (0..=w.len().min(bound)).map(|i| Val::Word(Word::from_symbols(w[..i].to_vec()))).collect()
}

impl SeqSynthesis {
    fn check(&self, a: &Assignment) -> Check {
        for (input, target) in &self.samples {
            let Some(target) = target else { continue };
            let y = target.symbols();
            let Some(init) = &a.init else {
                return Check::Branch(Var::Init, prefixes_up_to(y, self.max_final));
            };
            if !y.starts_with(init.symbols()) {
                return Check::Fail;
            }
            let mut pos = init.len();
            let mut q = 0;
            for &c in input {
                let next = match a.trans[q][c] {
                    Slot::Free => {
                        let count = a.trans.len();
                        let mut cands: Vec<Val> = (0..count.min(self.k)).map(Val::Target).collect();
                        if count < self.k {
                            cands.push(Val::Target(count));
                        }
                        return Check::Branch(Var::Trans(q, c), cands);
                    }
                    Slot::Undefined => return Check::Fail,
                    Slot::Set(t) => t,
                };
                match &a.outs[q][c] {
                    None => return Check::Branch(Var::Out(q, c), prefixes_up_to(&y[pos..], self.max_append)),
                    Some(o) => {
                        if !y[pos..].starts_with(o.symbols()) {
                            return Check::Fail;
                        }
                        pos += o.len();
                    }
                }
                q = next;
            }
            match &a.fin[q] {
                Slot::Free => {
                    let rest = &y[pos..];
                    if rest.len() > self.max_final {
                        return Check::Fail;
                    }
                    return Check::Branch(Var::Fin(q), vec![Val::Word(Word::from_symbols(rest.to_vec()))]);
                }
                Slot::Undefined => return Check::Fail,
                Slot::Set(f) => {
                    if f.symbols() != &y[pos..] {
                        return Check::Fail;
                    }
                }
            }
        }
        // Rejected samples, with every free slot read as undefined.
        for (input, target) in &self.samples {
            if target.is_some() {
                continue;
            }
            let mut q = Some(0);
            for &c in input {
                q = q.and_then(|p| match a.trans[p][c] {
                    Slot::Set(t) => Some(t),
                    _ => None,
                });
            }
            if q.is_some_and(|q| matches!(a.fin[q], Slot::Set(_))) {
                return Check::Fail;
            }
        }
        Check::Done
    }

    fn assign(&self, a: &Assignment, var: &Var, val: Val) -> Assignment {
        let mut a = a.clone();
        match (var, val) {
            (Var::Init, Val::Word(w)) => a.init = Some(w),
            (Var::Trans(p, c), Val::Target(t)) => {
                if t == a.trans.len() {
                    a.trans.push(vec![Slot::Free; self.letters]);
                    a.outs.push(vec![None; self.letters]);
                    a.fin.push(Slot::Free);
                }
                a.trans[*p][*c] = Slot::Set(t);
            }
            (Var::Trans(p, c), Val::Undefined) => a.trans[*p][*c] = Slot::Undefined,
            (Var::Out(p, c), Val::Word(w)) => a.outs[*p][*c] = Some(w),
            (Var::Fin(q), Val::Word(w)) => a.fin[*q] = Slot::Set(w),
            (Var::Fin(q), Val::Undefined) => a.fin[*q] = Slot::Undefined,
            _ => unreachable!("candidate kinds match their variables"),
        }
        a
    }

    fn finish(&self, a: &Assignment, sigma: &Alphabet, output: &Alphabet) -> SeqTransducer {
        let n = a.trans.len();
        let delta: Vec<Vec<Option<usize>>> = a
            .trans
            .iter()
            .enumerate()
            .map(|(p, row)| {
                row.iter()
                    .map(|t| match t {
                        Slot::Set(t) => Some(*t),
                        Slot::Free if !self.allow_partial => Some(p),
                        _ => None,
                    })
                    .collect()
            })
            .collect();
        let step_out = delta
            .iter()
            .enumerate()
            .map(|(p, row)| {
                row.iter().enumerate().map(|(c, t)| t.map(|_| a.outs[p][c].clone().unwrap_or_default())).collect()
            })
            .collect();
        let final_out: Vec<Option<Word>> = a
            .fin
            .iter()
            .map(|f| match f {
                Slot::Set(w) => Some(w.clone()),
                Slot::Free if !self.allow_partial => Some(Word::empty()),
                _ => None,
            })
            .collect();
        let finals = (0..n).filter(|&q| final_out[q].is_some()).collect();
        let dfa = Dfa::new(StateNames::numbered("p", n), sigma.clone(), 0, finals, delta).expect("consistent");
        SeqTransducer { dfa, output: output.clone(), init_out: a.init.clone().unwrap_or_default(), step_out, final_out }
    }

    fn dfs(
        &mut self,
        a: Assignment,
        sigma: &Alphabet,
        output: &Alphabet,
        accept: &mut dyn FnMut(&SeqTransducer) -> bool,
    ) -> Result<Option<SeqTransducer>, ResourceError> {
        self.nodes += 1;
        if self.nodes > self.limit {
            return Err(ResourceError { what: "synthesis search nodes", limit: self.limit });
        }
        match self.check(&a) {
            Check::Fail => Ok(None),
            Check::Done => {
                let t = self.finish(&a, sigma, output);
                Ok(accept(&t).then_some(t))
            }
            Check::Branch(var, mut cands) => {
                if self.allow_partial && matches!(var, Var::Trans(..)) {
                    cands.push(Val::Undefined);
                }
                for val in cands {
                    let next = self.assign(&a, &var, val);
                    if let Some(t) = self.dfs(next, sigma, output, accept)? {
                        return Ok(Some(t));
                    }
                }
                Ok(None)
            }
        }
    }

    fn run(
        mut self,
        sigma: &Alphabet,
        output: Alphabet,
        accept: &mut dyn FnMut(&SeqTransducer) -> bool,
    ) -> Result<Option<SeqTransducer>, ResourceError> {
        if self.k == 0 {
            return Ok(None);
        }
        let start = Assignment {
            init: None,
            trans: vec![vec![Slot::Free; self.letters]],
            outs: vec![vec![None; self.letters]],
            fin: vec![Slot::Free],
        };
        self.dfs(start, sigma, &output, accept)
    }
}

/// The least number of states of a one-register aSST realizing `f` on all
/// inputs up to `max_len` (domain included), searching machines with at most
/// `max_states` states whose appends and initial value have length at most
/// `max_append`. A one-register aSST only appends to its register, so it is
/// a sequential transducer whose initial output is the initial value.
pub fn one_register_min_states(
    f: &dyn WordFunction,
    sigma: &Alphabet,
    output: &Alphabet,
    max_len: usize,
    max_states: usize,
    max_append: usize,
    guard: &Guard,
) -> Result<Option<usize>, ResourceError> {
    let samples: Vec<(Vec<usize>, Option<Word>)> =
        sigma.words_up_to(max_len).map(|w| (sigma.encode(&w).expect("own alphabet"), f.apply(&w))).collect();
    for k in 1..=max_states {
        let synth = SeqSynthesis {
            letters: sigma.len(),
            k,
            max_append,
            max_final: max_append,
            samples: samples.clone(),
            allow_partial: true,
            limit: guard.search_nodes,
            nodes: 0,
        };
        if synth.run(sigma, output.clone(), &mut |_| true)?.is_some() {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// The two-register machine for `uσ ↦ σu` on `Σ^{n+1}` over `{a, b}`.
///
/// The first transition writes `a·σ` to `Xa` and `b·σ` to `Xb`, the next ones
/// append the letter to both, and the last one moves to `Fσ`, which outputs `Xσ`.
#[derive(Clone, Debug)]
pub struct Tradeoff {
    pub n: usize,
    pub machine: Asst,
}

impl Tradeoff {
    pub fn spec(&self, w: &Word) -> Option<Word> {
        crate::fixtures::rotate_last_to_front(self.n, w)
    }
}

pub fn tradeoff_example(n: usize) -> Result<Tradeoff, WordError> {
    assert!(n >= 1, "n must be at least 1");
    let mut states: Vec<String> = (0..=n).map(|i| i.to_string()).collect();
    states.push("Fa".into());
    states.push("Fb".into());
    let names: Vec<&str> = states.iter().map(String::as_str).collect();
    let ab = Alphabet::letters("ab");
    let mut b = crate::asst::AsstBuilder::new(&names, &["Xa", "Xb"], ab.clone(), ab);
    for sym in ["a", "b"] {
        let first: &[(&str, &str)] = &[("Xa", &format!("Xa a {sym}")), ("Xb", &format!("Xb b {sym}"))];
        let middle: &[(&str, &str)] = &[("Xa", &format!("Xa {sym}")), ("Xb", &format!("Xb {sym}"))];
        b = b.trans("0", sym, "1", first);
        for i in 1..n {
            b = b.trans(&i.to_string(), sym, &(i + 1).to_string(), middle);
        }
        b = b.trans(&n.to_string(), sym, &format!("F{sym}"), &[("Xa", "Xa"), ("Xb", "Xb")]);
    }
    let machine = b.output("Fa", "Xa").output("Fb", "Xb").build().map_err(|e| match e {
        AsstError::Word(w) => w,
        other => panic!("tradeoff construction is well-formed: {other}"),
    })?;
    Ok(Tradeoff { n, machine })
}

impl From<AutomatonError> for MinimizationError {
    fn from(e: AutomatonError) -> Self {
        MinimizationError::Asst(AsstError::Automaton(e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn coloring_machine_shape() {
        let k3 = coloring_to_asst(&Graph::complete(3)).unwrap();
        assert_eq!(k3.num_registers(), 6);
        assert_eq!(k3.num_states(), 1);
        assert!(!k3.has_total_updates());
        let v = |s: &str| Word::parse(s).unwrap();
        assert_eq!(k3.eval(&v("v0")), Some(Word::empty()));
        assert_eq!(k3.eval(&v("v0 v0")), Some(Word::letters("f")));
        assert_eq!(k3.eval(&v("v0 v1")), Some(Word::letters("n")));
        assert_eq!(k3.eval(&v("v2 v0 v1")), None);
        assert_eq!(coloring_to_asst(&Graph::edgeless(1)).unwrap().num_registers(), 4);
        assert_eq!(coloring_to_asst(&Graph::edgeless(0)).unwrap_err(), GraphError::Empty);
    }

    #[test]
    fn chromatic_numbers() {
        assert_eq!(Graph::complete(3).chromatic_number(), 3);
        assert_eq!(Graph::cycle(5).chromatic_number(), 3);
        assert_eq!(Graph::path(3).chromatic_number(), 2);
        assert_eq!(Graph::edgeless(2).chromatic_number(), 1);
        assert!(matches!(Graph::new(&["a"], &[("a", "a")]), Err(GraphError::SelfLoop(_))));
    }

    #[test]
    fn fa_reg_min_on_triangle() {
        // Registers: the output one plus one per color class. SF and SN only
        // ever hold ε at the first step, so a color register can stand in.
        let s = coloring_to_asst(&Graph::complete(3)).unwrap();
        let yes = fa_reg_min(&s, 4).unwrap();
        assert!(matches!(yes.certificate, Certificate::Exact(_)));
        assert!(yes.verified);
        let sol = yes.solution.unwrap();
        assert_eq!(sol.num_registers(), 4);
        assert_eq!(sol.underlying(), s.underlying());
        assert_eq!(fa_reg_min(&s, 3).unwrap().solution, None);
    }

    #[test]
    fn fa_reg_min_on_single_edge_and_path() {
        let edge = coloring_to_asst(&Graph::path(2)).unwrap();
        assert!(fa_reg_min(&edge, 3).unwrap().solution.is_some());
        let p3 = coloring_to_asst(&Graph::path(3)).unwrap();
        assert!(fa_reg_min(&p3, 3).unwrap().solution.is_some());
        assert!(fa_reg_min(&p3, 2).unwrap().solution.is_none());
    }

    #[test]
    fn fa_reg_min_keeps_last_letter() {
        let s = fixtures::last_letter_asst();
        let out = fa_reg_min(&s, 2).unwrap();
        let sol = out.solution.expect("two registers suffice");
        assert!(out.verified);
        assert_eq!(sol.underlying(), s.underlying());
        for w in s.input_alphabet().words_up_to(8) {
            assert_eq!(sol.eval(&w), s.eval(&w));
        }
        assert_eq!(fa_reg_min(&s, 0).unwrap_err(), MinimizationError::ZeroRegisters);
    }

    #[test]
    fn last_letter_iffo_keeps_three_registers_with_one_state() {
        let s = fixtures::last_letter_iffo();
        let three = fa_reg_min(&s, 3).unwrap();
        assert!(three.solution.is_some() && three.verified);
        assert!(fa_reg_min(&s, 2).unwrap().solution.is_none());
    }

    #[test]
    fn tradeoff_values() {
        let t2 = tradeoff_example(2).unwrap();
        assert_eq!(t2.machine.num_registers(), 2);
        assert_eq!(t2.machine.eval(&Word::letters("aab")), Some(Word::letters("baa")));
        assert_eq!(t2.machine.eval(&Word::letters("ab")), None);
        let t1 = tradeoff_example(1).unwrap();
        assert_eq!(t1.machine.eval(&Word::letters("ba")), Some(Word::letters("ab")));
        assert_eq!(t1.machine.num_states(), 4);
    }

    #[test]
    fn one_register_minimum_for_n1() {
        let t1 = tradeoff_example(1).unwrap();
        let f = |w: &Word| t1.spec(w);
        let ab = Alphabet::letters("ab");
        let min = one_register_min_states(&f, &ab, &ab, 3, 4, 2, &Guard::default()).unwrap();
        assert_eq!(min, Some(4));
    }
}
