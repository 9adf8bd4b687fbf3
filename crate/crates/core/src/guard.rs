//! Resource limits for the exhaustive procedures.
//!
//! Defaults can be overridden with the `SSTFORGE_GUARD` environment variable,
//! either `off` or a comma-separated list such as `runs=100000,brute_states=5`.

use thiserror::Error;

pub const ENV_VAR: &str = "SSTFORGE_GUARD";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("resource guard exceeded: {what} (limit {limit}); raise it via {ENV_VAR}")]
pub struct ResourceError {
    pub what: &'static str,
    pub limit: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Guard {
    /// Live configurations during transducer evaluation.
    pub runs: usize,
    /// State bound for brute-force DFA enumeration.
    pub brute_states: usize,
    /// Alphabet bound for brute-force DFA enumeration.
    pub brute_letters: usize,
    /// Search nodes for backtracking solvers.
    pub search_nodes: usize,
}

impl Default for Guard {
    fn default() -> Self {
        Guard { runs: 100_000, brute_states: 4, brute_letters: 3, search_nodes: 50_000_000 }
    }
}

impl Guard {
    pub fn unlimited() -> Self {
        Guard {
            runs: usize::MAX,
            brute_states: usize::MAX,
            brute_letters: usize::MAX,
            search_nodes: usize::MAX,
        }
    }

    /// Defaults patched with the environment override, if any.
    pub fn from_env() -> Result<Self, String> {
        match std::env::var(ENV_VAR) {
            Ok(spec) => Guard::parse(&spec),
            Err(_) => Ok(Guard::default()),
        }
    }

    pub fn parse(spec: &str) -> Result<Self, String> {
        let spec = spec.trim();
        if spec.eq_ignore_ascii_case("off") {
            return Ok(Guard::unlimited());
        }
        let mut g = Guard::default();
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got {item:?}"))?;
            let value: usize = value
                .trim()
                .parse()
                .map_err(|_| format!("bad number in {item:?}"))?;
            match key.trim() {
                "runs" => g.runs = value,
                "brute_states" => g.brute_states = value,
                "brute_letters" => g.brute_letters = value,
                "search_nodes" => g.search_nodes = value,
                other => return Err(format!("unknown guard key {other:?}")),
            }
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_overrides() {
        let g = Guard::parse("runs=5, brute_states=6").unwrap();
        assert_eq!(g.runs, 5);
        assert_eq!(g.brute_states, 6);
        assert_eq!(g.brute_letters, Guard::default().brute_letters);
        assert_eq!(Guard::parse("off").unwrap(), Guard::unlimited());
        assert!(Guard::parse("bogus=1").is_err());
        assert!(Guard::parse("runs").is_err());
    }
}
