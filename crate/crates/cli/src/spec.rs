//! Number-spec files: one JSON object per number, or an array for tuples.
//! Unknown fields are rejected, as are fields that do not belong to the
//! declared kind.

use std::path::Path;

use num_bigint::BigUint;
use psiperm_core::cf::ContinuedFraction;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpecKind {
    Periodic,
    Prefix,
    Random,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumberSpec {
    pub label: String,
    pub kind: SpecKind,
    #[serde(default)]
    pub a0: i64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub preperiod: Vec<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub period: Vec<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub prefix: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<u64>,
}

fn quots(v: &[u64]) -> Vec<BigUint> {
    v.iter().map(|&x| BigUint::from(x)).collect()
}

impl NumberSpec {
    fn reject_foreign_fields(&self) -> Result<(), CliError> {
        let complain = |field: &str| {
            Err(CliError::Config(format!(
                "'{}': field '{field}' does not belong to kind {:?}",
                self.label, self.kind
            )))
        };
        match self.kind {
            SpecKind::Periodic => {
                if !self.prefix.is_empty() {
                    return complain("prefix");
                }
                if self.seed.is_some() {
                    return complain("seed");
                }
                if self.bound.is_some() {
                    return complain("bound");
                }
            }
            SpecKind::Prefix => {
                if !self.preperiod.is_empty() {
                    return complain("preperiod");
                }
                if !self.period.is_empty() {
                    return complain("period");
                }
                if self.seed.is_some() {
                    return complain("seed");
                }
                if self.bound.is_some() {
                    return complain("bound");
                }
            }
            SpecKind::Random => {
                if !self.preperiod.is_empty() {
                    return complain("preperiod");
                }
                if !self.period.is_empty() {
                    return complain("period");
                }
                if !self.prefix.is_empty() {
                    return complain("prefix");
                }
            }
        }
        Ok(())
    }

    pub fn to_cf(&self) -> Result<ContinuedFraction, CliError> {
        self.reject_foreign_fields()?;
        let cf = match self.kind {
            SpecKind::Periodic => ContinuedFraction::periodic(
                self.a0,
                quots(&self.preperiod),
                quots(&self.period),
                self.label.clone(),
            )?,
            SpecKind::Prefix => {
                if self.prefix.is_empty() {
                    return Err(CliError::Config(format!(
                        "'{}': prefix kind needs a nonempty prefix",
                        self.label
                    )));
                }
                ContinuedFraction::prefix(self.a0, quots(&self.prefix), self.label.clone())?
            }
            SpecKind::Random => {
                let seed = self.seed.ok_or_else(|| {
                    CliError::Config(format!("'{}': random kind needs a seed", self.label))
                })?;
                let bound = self.bound.ok_or_else(|| {
                    CliError::Config(format!("'{}': random kind needs a bound", self.label))
                })?;
                ContinuedFraction::random(self.a0, seed, bound, self.label.clone())?
            }
        };
        Ok(cf)
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

/// A file holding exactly one number spec.
pub fn load_number(path: &Path) -> Result<ContinuedFraction, CliError> {
    let spec: NumberSpec = serde_json::from_str(&read(path)?)?;
    spec.to_cf()
}

/// A file holding an array of number specs.
pub fn load_tuple(path: &Path) -> Result<Vec<(String, ContinuedFraction)>, CliError> {
    let specs: Vec<NumberSpec> = serde_json::from_str(&read(path)?)?;
    specs
        .into_iter()
        .map(|s| {
            let label = s.label.clone();
            Ok((label, s.to_cf()?))
        })
        .collect()
}

/// A file holding exactly two number specs.
pub fn load_pair(path: &Path) -> Result<(ContinuedFraction, ContinuedFraction), CliError> {
    let mut members = load_tuple(path)?;
    if members.len() != 2 {
        return Err(CliError::Config(format!(
            "{} must contain exactly 2 number specs, found {}",
            path.display(),
            members.len()
        )));
    }
    let b = members.pop().unwrap().1;
    let a = members.pop().unwrap().1;
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_kind() {
        let golden: NumberSpec = serde_json::from_str(
            r#"{"label": "golden", "kind": "periodic", "a0": 0, "period": [1]}"#,
        )
        .unwrap();
        assert!(golden.to_cf().is_ok());

        let p: NumberSpec =
            serde_json::from_str(r#"{"label": "p", "kind": "prefix", "prefix": [1, 2, 3]}"#)
                .unwrap();
        assert!(p.to_cf().is_ok());

        let r: NumberSpec =
            serde_json::from_str(r#"{"label": "r", "kind": "random", "seed": 7, "bound": 9}"#)
                .unwrap();
        assert!(r.to_cf().is_ok());
    }

    #[test]
    fn unknown_fields_rejected() {
        let res: Result<NumberSpec, _> = serde_json::from_str(
            r#"{"label": "x", "kind": "periodic", "period": [1], "extra": 3}"#,
        );
        assert!(res.is_err());
    }

    #[test]
    fn foreign_fields_rejected() {
        let spec: NumberSpec =
            serde_json::from_str(r#"{"label": "x", "kind": "prefix", "prefix": [1], "seed": 3}"#)
                .unwrap();
        assert!(spec.to_cf().is_err());
    }

    #[test]
    fn missing_required_fields_rejected() {
        let spec: NumberSpec =
            serde_json::from_str(r#"{"label": "x", "kind": "random", "seed": 3}"#).unwrap();
        assert!(spec.to_cf().is_err());
        let spec: NumberSpec = serde_json::from_str(r#"{"label": "x", "kind": "prefix"}"#).unwrap();
        assert!(spec.to_cf().is_err());
    }
}
