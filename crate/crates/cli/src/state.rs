//! Construction state files: everything a resumed run needs, with big
//! integers as decimal strings. Serialization is deterministic (sorted
//! map keys, fixed pretty-printing), so split runs can be compared
//! byte-for-byte against single runs.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigUint;
use psiperm_core::forge::{ConstructionState, GrowthSchedule};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthSpec {
    pub base: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub k: u32,
    pub round: u64,
    /// Scaffold entries keyed by their decimal index.
    pub t: BTreeMap<String, String>,
    /// Singleton quotient rows keyed by the singleton number.
    pub a_singleton: BTreeMap<String, Vec<String>>,
    /// Pair quotient rows keyed by `"i,j"`.
    pub a_pair: BTreeMap<String, Vec<String>>,
    pub growth: GrowthSpec,
}

fn parse_big(s: &str, what: &str) -> Result<BigUint, CliError> {
    BigUint::from_str(s).map_err(|_| CliError::Config(format!("{what}: bad integer '{s}'")))
}

impl StateFile {
    pub fn from_state(state: &ConstructionState) -> StateFile {
        let t = state
            .scaffold()
            .iter()
            .enumerate()
            .map(|(s, v)| (s.to_string(), v.to_string()))
            .collect();
        let a_singleton = state
            .singleton_quotients()
            .iter()
            .enumerate()
            .map(|(i, row)| {
                (
                    (i + 1).to_string(),
                    row.iter().map(|x| x.to_string()).collect(),
                )
            })
            .collect();
        let a_pair = state
            .pair_quotients()
            .iter()
            .map(|(&(i, j), row)| {
                (
                    format!("{i},{j}"),
                    row.iter().map(|x| x.to_string()).collect(),
                )
            })
            .collect();
        StateFile {
            k: state.k(),
            round: state.rounds(),
            t,
            a_singleton,
            a_pair,
            growth: GrowthSpec {
                base: state.growth().base,
            },
        }
    }

    pub fn into_state(self) -> Result<ConstructionState, CliError> {
        let mut t = vec![BigUint::default(); self.t.len()];
        for (key, value) in &self.t {
            let idx: usize = key
                .parse()
                .map_err(|_| CliError::Config(format!("bad t index '{key}'")))?;
            if idx >= t.len() {
                return Err(CliError::Config(format!("t index '{key}' out of range")));
            }
            t[idx] = parse_big(value, "t")?;
        }
        let mut a_single = vec![Vec::new(); self.k as usize];
        for (key, row) in &self.a_singleton {
            let i: usize = key
                .parse()
                .map_err(|_| CliError::Config(format!("bad singleton key '{key}'")))?;
            if i == 0 || i > self.k as usize {
                return Err(CliError::Config(format!(
                    "singleton key '{key}' out of range"
                )));
            }
            a_single[i - 1] = row
                .iter()
                .map(|x| parse_big(x, "a_singleton"))
                .collect::<Result<_, _>>()?;
        }
        let mut a_pair = BTreeMap::new();
        for (key, row) in &self.a_pair {
            let (i, j) = key
                .split_once(',')
                .and_then(|(a, b)| Some((a.parse::<u32>().ok()?, b.parse::<u32>().ok()?)))
                .ok_or_else(|| CliError::Config(format!("bad pair key '{key}'")))?;
            let quotients = row
                .iter()
                .map(|x| parse_big(x, "a_pair"))
                .collect::<Result<_, _>>()?;
            a_pair.insert((i, j), quotients);
        }
        ConstructionState::from_parts(
            self.k,
            self.round,
            GrowthSchedule {
                base: self.growth.base,
            },
            t,
            a_single,
            a_pair,
        )
        .map_err(CliError::from)
    }

    pub fn render(&self) -> Result<String, CliError> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }
}

pub fn load_state(path: &Path) -> Result<ConstructionState, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let file: StateFile = serde_json::from_str(&text)?;
    file.into_state()
}

pub fn save_state(path: &Path, state: &ConstructionState) -> Result<(), CliError> {
    crate::write_atomic(path, &StateFile::from_state(state).render()?)
}
