//! Graphviz output.

use std::fmt::Write;

use crate::asst::{AppendExpr, Asst};
use crate::automata::{Dfa, Nfa, StateNames};
use crate::bimachines::{AsyncBimachine, Bimachine};
use crate::json::Machine;
use crate::minimization::Graph;
use crate::refinement::Precongruence;
use crate::transducers::Fst;
use crate::words::Word;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn word(w: &Word) -> String {
    if w.is_empty() {
        "ε".into()
    } else {
        w.to_string()
    }
}

struct Digraph {
    out: String,
}

impl Digraph {
    fn new(name: &str) -> Self {
        let mut out = String::new();
        writeln!(out, "digraph {} {{\n  rankdir=LR;\n  node [shape=circle];", quote(name)).unwrap();
        Digraph { out }
    }

    fn node(&mut self, name: &str, fin: bool, initial: bool, init_label: Option<&str>) {
        let shape = if fin { "doublecircle" } else { "circle" };
        writeln!(self.out, "  {} [shape={shape}];", quote(name)).unwrap();
        if initial {
            let start = format!("__start_{name}");
            writeln!(self.out, "  {} [shape=point];", quote(&start)).unwrap();
            match init_label {
                Some(l) => writeln!(self.out, "  {} -> {} [label={}];", quote(&start), quote(name), quote(l)),
                None => writeln!(self.out, "  {} -> {};", quote(&start), quote(name)),
            }
            .unwrap();
        }
    }

    fn edge(&mut self, from: &str, to: &str, label: &str) {
        writeln!(self.out, "  {} -> {} [label={}];", quote(from), quote(to), quote(label)).unwrap();
    }

    fn final_output(&mut self, name: &str, label: &str) {
        let end = format!("__end_{name}");
        writeln!(self.out, "  {} [shape=point];", quote(&end)).unwrap();
        writeln!(self.out, "  {} -> {} [label={}];", quote(name), quote(&end), quote(label)).unwrap();
    }

    fn finish(mut self) -> String {
        self.out.push_str("}\n");
        self.out
    }
}

pub fn dfa(a: &Dfa, name: &str) -> String {
    let st = a.states();
    let mut g = Digraph::new(name);
    for q in 0..a.num_states() {
        g.node(st.name(q), a.is_final(q), q == a.initial(), None);
    }
    for (q, row) in a.table().iter().enumerate() {
        for (s, t) in row.iter().enumerate() {
            if let Some(t) = t {
                g.edge(st.name(q), st.name(*t), a.alphabet().symbol(s).as_str());
            }
        }
    }
    g.finish()
}

pub fn nfa(a: &Nfa, name: &str) -> String {
    let st = a.states();
    let mut g = Digraph::new(name);
    for q in 0..a.num_states() {
        g.node(st.name(q), a.finals().contains(&q), a.initials().contains(&q), None);
    }
    for &(p, s, q) in a.transitions() {
        g.edge(st.name(p), st.name(q), a.alphabet().symbol(s).as_str());
    }
    g.finish()
}

pub fn fst(t: &Fst, name: &str) -> String {
    let st = t.states();
    let mut g = Digraph::new(name);
    for q in 0..t.num_states() {
        let init = t.init_out().get(&q).map(word);
        g.node(st.name(q), t.final_out().contains_key(&q), init.is_some(), init.as_deref());
    }
    for (&(p, s, q), w) in t.trans_out() {
        g.edge(st.name(p), st.name(q), &format!("{} / {}", t.input_alphabet().symbol(s), word(w)));
    }
    for (&q, w) in t.final_out() {
        g.final_output(st.name(q), &word(w));
    }
    g.finish()
}

fn expr(regs: &StateNames, e: &AppendExpr) -> String {
    if e.append.is_empty() {
        regs.name(e.src).to_string()
    } else {
        format!("{} {}", regs.name(e.src), e.append)
    }
}

pub fn asst(a: &Asst, name: &str) -> String {
    let (st, regs) = (a.states(), a.registers());
    let mut g = Digraph::new(name);
    let v0: Vec<String> = a.v0().iter().enumerate().map(|(x, w)| format!("{}={}", regs.name(x), word(w))).collect();
    for q in 0..a.num_states() {
        let init = (q == a.initial()).then(|| v0.join(", "));
        g.node(st.name(q), a.gamma(q).is_some(), q == a.initial(), init.as_deref());
    }
    for (q, row) in a.table().iter().enumerate() {
        for (s, step) in row.iter().enumerate() {
            let Some(step) = step else { continue };
            let updates: Vec<String> = step
                .update
                .0
                .iter()
                .enumerate()
                .filter_map(|(x, e)| e.as_ref().map(|e| format!("{} := {}", regs.name(x), expr(regs, e))))
                .collect();
            g.edge(st.name(q), st.name(step.target), &format!("{} | {}", a.input_alphabet().symbol(s), updates.join("; ")));
        }
    }
    for (q, e) in a.gammas().iter().enumerate() {
        if let Some(e) = e {
            g.final_output(st.name(q), &expr(regs, e));
        }
    }
    g.finish()
}

/// Two digraphs: the left automaton and the right one with its outputs.
pub fn bimachine(b: &Bimachine, name: &str) -> String {
    let mut out = dfa(b.left(), &format!("{name}_left"));
    let right = b.right();
    let rs = right.states();
    let mut g = Digraph::new(&format!("{name}_right"));
    for r in 0..right.num_states() {
        let lam = b.lambda().get(&r).map(word);
        g.node(rs.name(r), right.finals().contains(&r), right.initials().contains(&r), lam.as_deref());
    }
    for &(p, s, q) in right.transitions() {
        g.edge(rs.name(p), rs.name(q), right.alphabet().symbol(s).as_str());
    }
    out.push_str(&g.finish());
    out
}

pub fn async_bimachine(b: &AsyncBimachine, name: &str) -> String {
    let mut out = dfa(b.left(), &format!("{name}_left"));
    let right = b.right_nfa();
    let rs = right.states();
    let mut g = Digraph::new(&format!("{name}_right"));
    for r in 0..right.num_states() {
        let lam = b.lambda().get(&r).map(word);
        g.node(rs.name(r), right.finals().contains(&r), right.initials().contains(&r), lam.as_deref());
    }
    for &(p, s, q) in right.transitions() {
        g.edge(rs.name(p), rs.name(q), right.alphabet().symbol(s).as_str());
    }
    out.push_str(&g.finish());
    out
}

/// The DFA plus undirected dashed edges between compatible states.
pub fn precongruence(pc: &Precongruence, name: &str) -> String {
    let mut out = dfa(pc.dfa(), name);
    out.truncate(out.len() - 2);
    let st = pc.dfa().states();
    for (p, q) in pc.compatible_pairs() {
        if p < q {
            writeln!(out, "  {} -> {} [dir=none, style=dashed, constraint=false];", quote(st.name(p)), quote(st.name(q)))
                .unwrap();
        }
    }
    out.push_str("}\n");
    out
}

pub fn graph(g: &Graph, name: &str) -> String {
    let mut out = format!("graph {} {{\n", quote(name));
    for v in g.vertices() {
        writeln!(out, "  {};", quote(v.as_str())).unwrap();
    }
    for &(a, b) in g.edges() {
        writeln!(out, "  {} -- {};", quote(g.vertices()[a].as_str()), quote(g.vertices()[b].as_str())).unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn machine(m: &Machine, name: &str) -> String {
    match m {
        Machine::Dfa(a) => dfa(a, name),
        Machine::Nfa(a) => nfa(a, name),
        Machine::Fst(t) => fst(t, name),
        Machine::Asst(a) => asst(a, name),
        Machine::Bimachine(b) => bimachine(b, name),
        Machine::AsyncBimachine(b) => async_bimachine(b, name),
        Machine::Precongruence(p) => precongruence(p, name),
        Machine::Graph(g) => graph(g, name),
    }
}
