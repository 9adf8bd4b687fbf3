//! Size-preserving translations between aSSTs and (asynchronous) bimachines.
//!
//! aSST states become left states and registers become right states in both
//! directions, so `(|Q|, |𝒳|) = (|L|, |R|)` always holds.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::asst::{AppendExpr, Asst, AsstError, Step, Substitution};
use crate::automata::Nfa;
use crate::bimachines::{AsyncBimachine, Bimachine, BimachineError, DomainSides};
use crate::words::{Symbol, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConversionError {
    #[error("update on {state:?}/{symbol} is partial")]
    PartialUpdates { state: String, symbol: Symbol },
    #[error("flows depend on the state: register {register} on {symbol} reads different registers in {states:?}")]
    DependentFlows { register: String, symbol: Symbol, states: (String, String) },
    #[error("output expressions read different registers; normalize the output register first")]
    NoFixedOutputRegister,
    #[error("machine has no registers")]
    NoRegisters,
    #[error("{0} is undefined; the target model needs it")]
    MissingOutput(String),
    #[error(transparent)]
    Bimachine(#[from] BimachineError),
    #[error(transparent)]
    Asst(#[from] AsstError),
}

fn require_total_updates(s: &Asst) -> Result<(), ConversionError> {
    for (q, row) in s.table().iter().enumerate() {
        for (sym, step) in row.iter().enumerate() {
            if step.as_ref().is_some_and(|st| !st.update.is_total()) {
                return Err(ConversionError::PartialUpdates {
                    state: s.states().name(q).to_string(),
                    symbol: s.input_alphabet().symbol(sym).clone(),
                });
            }
        }
    }
    Ok(())
}

/// The register read by every output expression; any register if none is final.
fn output_register(s: &Asst) -> Result<usize, ConversionError> {
    if s.num_registers() == 0 {
        return Err(ConversionError::NoRegisters);
    }
    if s.gammas().iter().all(Option::is_none) {
        return Ok(0);
    }
    s.fixed_output_register().ok_or(ConversionError::NoFixedOutputRegister)
}

/// aSST_iffo → bimachine: the right automaton is the flow automaton on registers.
pub fn asst_iffo_to_bimachine(s: &Asst) -> Result<Bimachine, ConversionError> {
    require_total_updates(s)?;
    if let Some((x, sym, q1, q2)) = s.flow_dependency() {
        return Err(ConversionError::DependentFlows {
            register: s.registers().name(x).to_string(),
            symbol: s.input_alphabet().symbol(sym).clone(),
            states: (s.states().name(q1).to_string(), s.states().name(q2).to_string()),
        });
    }
    let x_out = output_register(s)?;
    let left = s.underlying();
    let mut transitions = BTreeSet::new();
    let mut omega = BTreeMap::new();
    for (q, row) in s.table().iter().enumerate() {
        for (sym, step) in row.iter().enumerate() {
            let Some(step) = step else { continue };
            for (x, e) in step.update.0.iter().enumerate() {
                let e = e.as_ref().expect("total updates");
                transitions.insert((e.src, sym, x));
                omega.insert((q, sym, x), e.append.clone());
            }
        }
    }
    let all: BTreeSet<usize> = (0..s.num_registers()).collect();
    let right = Nfa::new(
        s.registers().clone(),
        s.input_alphabet().clone(),
        all,
        BTreeSet::from([x_out]),
        transitions,
    )
    .expect("consistent by construction");
    let lambda = s.v0().iter().cloned().enumerate().collect();
    let rho = s
        .gammas()
        .iter()
        .enumerate()
        .filter_map(|(q, e)| e.as_ref().map(|e| (q, e.append.clone())))
        .collect();
    Ok(Bimachine::new(left, right, s.output_alphabet().clone(), lambda, omega, rho)?)
}

/// Where [`bimachine_to_asst_iffo`] had to fill in arbitrary values.
///
/// Each entry only matters outside the domain of the bimachine; together they
/// explain why the aSST may have a larger domain.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DomainReport {
    /// Registers whose initial value defaulted to ε because `λ` is undefined.
    pub defaulted_v0: Vec<String>,
    /// Final left states whose `ρ` defaulted to ε.
    pub defaulted_rho: Vec<String>,
    /// `(l, σ, r)` where `σ·r` is undefined and `r := r` was used.
    pub identity_fallbacks: Vec<(String, Symbol, String)>,
    /// Whether each side of the source bimachine recognizes its domain.
    pub source_sides: Option<DomainSides>,
}

impl DomainReport {
    /// No defaults were needed, so the domains coincide whenever the left
    /// automaton recognizes the bimachine's domain.
    pub fn is_clean(&self) -> bool {
        self.defaulted_v0.is_empty() && self.defaulted_rho.is_empty() && self.identity_fallbacks.is_empty()
    }
}

/// Bimachine → aSST_iffo with output register `r_f`.
///
/// The result agrees with the bimachine on its domain and may be defined on
/// more words; see [`DomainReport`].
pub fn bimachine_to_asst_iffo(b: &Bimachine) -> Result<(Asst, DomainReport), ConversionError> {
    let left = b.left();
    let rnames = b.right().states();
    let sigma = b.input_alphabet();
    let nr = rnames.len();
    let mut report = DomainReport { source_sides: Some(b.domain_sides()), ..Default::default() };
    let v0 = (0..nr)
        .map(|r| match b.lambda().get(&r) {
            Some(w) => w.clone(),
            None => {
                report.defaulted_v0.push(rnames.name(r).to_string());
                Word::empty()
            }
        })
        .collect();
    let mut delta = vec![vec![None; sigma.len()]; left.num_states()];
    for (l, row) in delta.iter_mut().enumerate() {
        for (s, slot) in row.iter_mut().enumerate() {
            let Some(target) = left.step(l, s) else { continue };
            let update = (0..nr)
                .map(|r| {
                    Some(match b.right_step(s, r) {
                        Some(r1) => AppendExpr::new(r1, b.omega()[&(l, s, r)].clone()),
                        None => {
                            report.identity_fallbacks.push((
                                left.states().name(l).to_string(),
                                sigma.symbol(s).clone(),
                                rnames.name(r).to_string(),
                            ));
                            AppendExpr::copy(r)
                        }
                    })
                })
                .collect();
            *slot = Some(Step { target, update: Substitution(update) });
        }
    }
    let gamma = (0..left.num_states())
        .map(|l| {
            left.is_final(l).then(|| {
                let rho = b.rho().get(&l).cloned().unwrap_or_else(|| {
                    report.defaulted_rho.push(left.states().name(l).to_string());
                    Word::empty()
                });
                AppendExpr::new(b.r_final(), rho)
            })
        })
        .collect();
    let s = Asst::new(
        left.states().clone(),
        rnames.clone(),
        sigma.clone(),
        b.output_alphabet().clone(),
        left.initial(),
        v0,
        delta,
        gamma,
    )?;
    Ok((s, report))
}

/// aSST → asynchronous bimachine. Updates must be total and the output
/// register fixed.
pub fn asst_to_async_bimachine(s: &Asst) -> Result<AsyncBimachine, ConversionError> {
    require_total_updates(s)?;
    let x_out = output_register(s)?;
    async_from_flows(s, x_out)
}

/// The same construction for machines with partial updates: a dropped
/// register has no right-automaton predecessor.
pub(crate) fn async_from_flows(s: &Asst, x_out: usize) -> Result<AsyncBimachine, ConversionError> {
    let nq = s.num_states();
    let nx = s.num_registers();
    let sigma = s.input_alphabet().len();
    let mut back = vec![vec![vec![None; nx]; sigma]; nq];
    let mut omega = BTreeMap::new();
    for (q, row) in s.table().iter().enumerate() {
        for (sym, step) in row.iter().enumerate() {
            let Some(step) = step else { continue };
            for (x, e) in step.update.0.iter().enumerate() {
                if let Some(e) = e {
                    back[q][sym][x] = Some(e.src);
                    omega.insert((q, sym, x), e.append.clone());
                }
            }
        }
    }
    let lambda = s.v0().iter().cloned().enumerate().collect();
    let rho = s
        .gammas()
        .iter()
        .enumerate()
        .filter_map(|(q, e)| e.as_ref().map(|e| (q, e.append.clone())))
        .collect();
    Ok(AsyncBimachine::new(
        s.underlying(),
        s.registers().clone(),
        (0..nx).collect(),
        x_out,
        back,
        s.output_alphabet().clone(),
        lambda,
        omega,
        rho,
    )?)
}

/// Asynchronous bimachine → aSST with output register `r_f`; the inverse of
/// [`asst_to_async_bimachine`] up to renaming.
pub fn async_bimachine_to_asst(b: &AsyncBimachine) -> Result<Asst, ConversionError> {
    b.check_convention()?;
    let left = b.left();
    let rnames = b.right_states();
    let sigma = b.input_alphabet();
    let nr = rnames.len();
    let v0 = (0..nr)
        .map(|r| {
            b.lambda()
                .get(&r)
                .cloned()
                .ok_or_else(|| ConversionError::MissingOutput(format!("λ({})", rnames.name(r))))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut delta = vec![vec![None; sigma.len()]; left.num_states()];
    for (l, row) in delta.iter_mut().enumerate() {
        for (s, slot) in row.iter_mut().enumerate() {
            let Some(target) = left.step(l, s) else { continue };
            let update = (0..nr)
                .map(|r| {
                    let r1 = b.right_step(l, s, r).expect("convention checked");
                    let w = b.omega().get(&(l, s, r)).cloned().ok_or_else(|| {
                        ConversionError::MissingOutput(format!(
                            "ω(({},{}), {})",
                            left.states().name(l),
                            sigma.symbol(s),
                            rnames.name(r)
                        ))
                    })?;
                    Ok(Some(AppendExpr::new(r1, w)))
                })
                .collect::<Result<Vec<_>, ConversionError>>()?;
            *slot = Some(Step { target, update: Substitution(update) });
        }
    }
    let gamma = (0..left.num_states())
        .map(|l| {
            if !left.is_final(l) {
                return Ok(None);
            }
            let rho = b
                .rho()
                .get(&l)
                .cloned()
                .ok_or_else(|| ConversionError::MissingOutput(format!("ρ({})", left.states().name(l))))?;
            Ok(Some(AppendExpr::new(b.r_final(), rho)))
        })
        .collect::<Result<Vec<_>, ConversionError>>()?;
    Ok(Asst::new(
        left.states().clone(),
        rnames.clone(),
        sigma.clone(),
        b.output_alphabet().clone(),
        left.initial(),
        v0,
        delta,
        gamma,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::words::Alphabet;

    fn agree(f: &dyn crate::WordFunction, g: &dyn crate::WordFunction, len: usize) {
        assert_eq!(crate::first_disagreement(&Alphabet::letters("ab"), len, f, g), None);
    }

    #[test]
    fn iffo_to_bimachine_sizes() {
        let s = fixtures::last_letter_iffo();
        let b = asst_iffo_to_bimachine(&s).unwrap();
        assert_eq!((b.left().num_states(), b.right().num_states()), (1, 3));
        agree(&s, &b, 7);
        let id = fixtures::identity_asst(&Alphabet::letters("ab"));
        let b = asst_iffo_to_bimachine(&id).unwrap();
        assert_eq!((b.left().num_states(), b.right().num_states()), (1, 1));
    }

    #[test]
    fn last_letter_has_dependent_flows() {
        let err = asst_iffo_to_bimachine(&fixtures::last_letter_asst()).unwrap_err();
        assert!(matches!(err, ConversionError::DependentFlows { .. }), "{err}");
        let err = asst_iffo_to_bimachine(&fixtures::last_letter_split_output()).unwrap_err();
        assert_eq!(err, ConversionError::NoFixedOutputRegister);
    }

    #[test]
    fn swap_bimachine_to_asst() {
        let b = fixtures::swap_bimachine();
        let (s, report) = bimachine_to_asst_iffo(&b).unwrap();
        assert!(report.is_clean());
        assert_eq!((s.num_states(), s.num_registers()), (3, 3));
        assert!(s.has_independent_flows());
        assert_eq!(s.fixed_output_register(), Some(b.r_final()));
        agree(&s, &b, 8);
        let back = asst_iffo_to_bimachine(&s).unwrap();
        agree(&back, &b, 8);
    }

    #[test]
    fn async_round_trip_last_letter() {
        let s = fixtures::last_letter_asst();
        let b = asst_to_async_bimachine(&s).unwrap();
        assert_eq!((b.left().num_states(), b.right_states().len()), (2, 2));
        assert_eq!(b.eval(&Word::letters("aab")), Some(Word::letters("bbb")));
        let s2 = async_bimachine_to_asst(&b).unwrap();
        assert!(s.is_isomorphic(&s2));
    }

    #[test]
    fn async_swap_matches_iffo_construction() {
        let from_async = async_bimachine_to_asst(&fixtures::swap_async()).unwrap();
        let (from_sync, _) = bimachine_to_asst_iffo(&fixtures::swap_bimachine()).unwrap();
        assert!(from_async.is_isomorphic(&from_sync));
    }

    #[test]
    fn iffo_async_ignores_state_component() {
        let s = fixtures::last_letter_iffo();
        let b = asst_to_async_bimachine(&s).unwrap();
        for sym in 0..2 {
            for r in 0..3 {
                let targets: BTreeSet<_> = (0..b.left().num_states()).map(|l| b.right_step(l, sym, r)).collect();
                assert_eq!(targets.len(), 1);
            }
        }
    }

    #[test]
    fn partial_updates_rejected() {
        let err = asst_to_async_bimachine(&fixtures::last_letter_partial()).unwrap_err();
        assert!(matches!(err, ConversionError::PartialUpdates { .. }));
    }
}
