//! Structural analyses of aSSTs: flows, output normalization and the
//! definedness of partial updates.

use std::collections::BTreeSet;

use super::{AppendExpr, Asst, Step, Substitution};

/// `(q, X) → (q', Y)` on `symbol` whenever `δʳ(q, symbol)(Y) = X·w` and `q' = δˢ(q, symbol)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FlowEdge {
    pub from: (usize, usize),
    pub symbol: usize,
    pub to: (usize, usize),
}

/// Vertices are `(state, register)` pairs; edges follow register flows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowGraph {
    pub states: usize,
    pub registers: usize,
    pub edges: BTreeSet<FlowEdge>,
}

impl FlowGraph {
    fn vertex(&self, (q, x): (usize, usize)) -> usize {
        q * self.registers + x
    }

    fn adjacency(&self, backwards: bool) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.states * self.registers];
        for e in &self.edges {
            let (a, b) = (self.vertex(e.from), self.vertex(e.to));
            if backwards {
                adj[b].push(a);
            } else {
                adj[a].push(b);
            }
        }
        adj
    }

    /// Vertices reachable from `seeds`, as a flat `q * registers + x` mask.
    fn closure(&self, seeds: impl IntoIterator<Item = (usize, usize)>, backwards: bool) -> Vec<bool> {
        let adj = self.adjacency(backwards);
        let mut mark = vec![false; self.states * self.registers];
        let mut work: Vec<usize> = Vec::new();
        for v in seeds {
            let v = self.vertex(v);
            if !mark[v] {
                mark[v] = true;
                work.push(v);
            }
        }
        while let Some(v) = work.pop() {
            for &u in &adj[v] {
                if !mark[u] {
                    mark[u] = true;
                    work.push(u);
                }
            }
        }
        mark
    }
}

/// Outcome of the definedness analysis for partial updates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainCheck {
    /// Whether the domain equals the language of the underlying automaton.
    pub equal: bool,
    /// The least live `(state, register)` pair, by name, where a reachable
    /// partial update drops a register. Every undefined live pair descends
    /// from such an origin.
    pub witness: Option<(usize, usize)>,
    pub live: BTreeSet<(usize, usize)>,
    pub undefined: BTreeSet<(usize, usize)>,
}

impl Asst {
    /// For every register `X` and letter `σ`, the source of `X` on `σ` is the same in all states.
    pub fn has_independent_flows(&self) -> bool {
        self.flow_dependency().is_none()
    }

    /// A flow disagreement `(X, σ, q, q')`: `X` reads different registers on `σ` in `q` and `q'`.
    pub fn flow_dependency(&self) -> Option<(usize, usize, usize, usize)> {
        for x in 0..self.num_registers() {
            for s in 0..self.input.len() {
                let mut seen: Option<(usize, usize)> = None;
                for q in 0..self.num_states() {
                    let Some(e) = self.delta[q][s].as_ref().and_then(|st| st.update.get(x)) else {
                        continue;
                    };
                    match seen {
                        None => seen = Some((q, e.src)),
                        Some((q0, src)) if src != e.src => return Some((x, s, q0, q)),
                        Some(_) => {}
                    }
                }
            }
        }
        None
    }

    pub fn flow_graph(&self) -> FlowGraph {
        let mut edges = BTreeSet::new();
        for (q, row) in self.delta.iter().enumerate() {
            for (s, step) in row.iter().enumerate() {
                let Some(step) = step else { continue };
                for (y, e) in step.update.0.iter().enumerate() {
                    if let Some(e) = e {
                        edges.insert(FlowEdge { from: (q, e.src), symbol: s, to: (step.target, y) });
                    }
                }
            }
        }
        FlowGraph { states: self.num_states(), registers: self.num_registers(), edges }
    }

    /// Decides whether every word of the underlying language has a defined output.
    ///
    /// A pair `(q, X)` is live when `X` flows from `q` into some output
    /// expression, and may be undefined when a reachable partial update drops a
    /// register that later flows into `X` at `q`. The domain is strictly
    /// smaller than the underlying language exactly when some pair is both.
    pub fn check_domain_is_underlying_language(&self) -> DomainCheck {
        let g = self.flow_graph();
        let outputs = self.gamma.iter().enumerate().filter_map(|(q, e)| e.as_ref().map(|e| (q, e.src)));
        let live_mask = g.closure(outputs, true);

        let reachable = self.underlying().reachable();
        let mut seeds = Vec::new();
        for &q in &reachable {
            for step in self.delta[q].iter().flatten() {
                for (y, e) in step.update.0.iter().enumerate() {
                    if e.is_none() {
                        seeds.push((step.target, y));
                    }
                }
            }
        }
        let undef_mask = g.closure(seeds.iter().copied(), false);

        let k = self.num_registers();
        let pairs = |mask: &[bool]| -> BTreeSet<(usize, usize)> {
            mask.iter().enumerate().filter(|(_, m)| **m).map(|(v, _)| (v / k, v % k)).collect()
        };
        let live = pairs(&live_mask);
        let undefined = pairs(&undef_mask);
        let witness = seeds
            .iter()
            .filter(|p| live.contains(p))
            .min_by(|a, b| {
                let key = |p: &(usize, usize)| (self.states.name(p.0).to_string(), self.registers.name(p.1).to_string());
                key(a).cmp(&key(b))
            })
            .copied();
        DomainCheck { equal: witness.is_none(), witness, live, undefined }
    }

    /// An equivalent machine whose output expressions all read the same register.
    ///
    /// The chosen register is the most frequent output source, ties broken by
    /// the least name. Each final state reading another register gets the
    /// transposition exchanging the two; updates are rewritten so that in
    /// state `q` register `π_q(X)` holds what `X` held before. State and
    /// register counts are unchanged.
    pub fn normalize_output_register(&self) -> Asst {
        let k = self.num_registers();
        let mut counts = vec![0usize; k];
        for e in self.gamma.iter().flatten() {
            counts[e.src] += 1;
        }
        let Some(x_out) = (0..k).max_by(|&a, &b| {
            counts[a].cmp(&counts[b]).then_with(|| self.registers.name(b).cmp(self.registers.name(a)))
        }) else {
            return self.clone();
        };
        let perms: Vec<Vec<usize>> = (0..self.num_states())
            .map(|q| {
                let mut p: Vec<usize> = (0..k).collect();
                if let Some(e) = &self.gamma[q] {
                    p.swap(e.src, x_out);
                }
                p
            })
            .collect();
        let rename = |q: usize, e: &AppendExpr| AppendExpr::new(perms[q][e.src], e.append.clone());

        let mut v0 = vec![Default::default(); k];
        for x in 0..k {
            v0[perms[self.initial][x]] = self.v0[x].clone();
        }
        let delta = self
            .delta
            .iter()
            .enumerate()
            .map(|(q, row)| {
                row.iter()
                    .map(|step| {
                        step.as_ref().map(|step| {
                            let mut update = Substitution(vec![None; k]);
                            for (x, e) in step.update.0.iter().enumerate() {
                                update.0[perms[step.target][x]] = e.as_ref().map(|e| rename(q, e));
                            }
                            Step { target: step.target, update }
                        })
                    })
                    .collect()
            })
            .collect();
        let gamma = self
            .gamma
            .iter()
            .enumerate()
            .map(|(q, e)| e.as_ref().map(|e| rename(q, e)))
            .collect();
        Asst {
            states: self.states.clone(),
            registers: self.registers.clone(),
            input: self.input.clone(),
            output: self.output.clone(),
            initial: self.initial,
            v0,
            delta,
            gamma,
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::asst::AsstBuilder;
    use crate::fixtures;
    use crate::words::{Alphabet, Word};

    #[test]
    fn flows_of_last_letter() {
        let s = fixtures::last_letter_asst();
        assert!(!s.has_independent_flows());
        let g = s.flow_graph();
        let a = 0;
        let b = 1;
        let (x, y) = (0, 1);
        assert!(g.edges.contains(&super::FlowEdge { from: (0, x), symbol: a, to: (0, x) }));
        assert!(g.edges.contains(&super::FlowEdge { from: (0, y), symbol: b, to: (1, x) }));
        assert!(fixtures::last_letter_split_output().has_independent_flows());
        assert!(fixtures::last_letter_iffo().has_independent_flows());
    }

    #[test]
    fn dependent_flow_witness() {
        let s = AsstBuilder::new(&["p", "q"], &["X", "Y"], Alphabet::letters("a"), Alphabet::letters("a"))
            .trans("p", "a", "q", &[("X", "X"), ("Y", "Y")])
            .trans("q", "a", "p", &[("X", "Y"), ("Y", "X")])
            .output("p", "X")
            .build()
            .unwrap();
        assert_eq!(s.flow_dependency(), Some((0, 0, 0, 1)));
    }

    #[test]
    fn identity_updates_give_self_loops() {
        let s = AsstBuilder::new(&["q"], &["X", "Y"], Alphabet::letters("a"), Alphabet::letters("a"))
            .trans("q", "a", "q", &[("X", "X"), ("Y", "Y")])
            .output("q", "X")
            .build()
            .unwrap();
        let g = s.flow_graph();
        assert_eq!(g.edges.len(), 2);
        assert!(g.edges.iter().all(|e| e.from == e.to));
    }

    #[test]
    fn domain_check_on_last_letter_with_deleted_update() {
        assert!(fixtures::last_letter_asst().check_domain_is_underlying_language().equal);
        let s = fixtures::last_letter_partial();
        let check = s.check_domain_is_underlying_language();
        assert!(!check.equal);
        let (q, x) = check.witness.unwrap();
        assert_eq!((s.states().name(q), s.registers().name(x)), ("1", "Y"));
        assert!(check.undefined.contains(&(0, 0)) && check.live.contains(&(0, 0)));
        assert_eq!(s.eval(&Word::letters("ba")), None);
        assert!(s.underlying().accepts(&Word::letters("ba")).unwrap());
        assert_eq!(s.eval(&Word::letters("bab")), Some(Word::letters("bbb")));
    }

    #[test]
    fn dropped_dead_register_is_harmless() {
        let s = AsstBuilder::new(&["q"], &["X", "Y"], Alphabet::letters("ab"), Alphabet::letters("ab"))
            .trans("q", "a", "q", &[("X", "X a")])
            .trans("q", "b", "q", &[("X", "X b"), ("Y", "X")])
            .output("q", "X")
            .build()
            .unwrap();
        assert!(s.check_domain_is_underlying_language().equal);
        for w in Alphabet::letters("ab").words_up_to(8) {
            assert!(s.eval(&w).is_some());
        }
    }

    #[test]
    fn normalization_fixes_output_register() {
        let s = fixtures::last_letter_split_output();
        assert_eq!(s.fixed_output_register(), None);
        let n = s.normalize_output_register();
        assert!(n.fixed_output_register().is_some());
        assert_eq!((n.num_states(), n.num_registers()), (s.num_states(), s.num_registers()));
        for w in Alphabet::letters("ab").words_up_to(6) {
            assert_eq!(n.eval(&w), s.eval(&w), "{w:?}");
        }
        let f2 = fixtures::last_letter_asst();
        assert_eq!(f2.normalize_output_register(), f2);
    }
}
