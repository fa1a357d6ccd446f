// SPDX-License-Identifier: Apache-2.0

//! Native JSON election files.
//!
//! ```json
//! {
//!   "budget": "15",
//!   "projects": [{"id": "p12", "cost": "8"}, {"id": "s1", "cost": "1/2"}],
//!   "voters": [{"id": "1", "approves": ["p12", "s1"]}]
//! }
//! ```
//!
//! Amounts are strings holding an integer, `p/q`, or an exact decimal. They
//! are written back in canonical `p/q` form.

use serde::{Deserialize, Serialize};

use super::{Election, RawElection, RawProject, RawVoter};
use crate::error::FormatError;
use crate::rational::{format_rational, parse_rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NativeElection {
    pub budget: String,
    pub projects: Vec<NativeProject>,
    pub voters: Vec<NativeVoter>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NativeProject {
    pub id: String,
    pub cost: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NativeVoter {
    pub id: String,
    #[serde(default)]
    pub approves: Vec<String>,
}

impl NativeElection {
    pub fn to_raw(&self) -> Result<RawElection, FormatError> {
        Ok(RawElection {
            budget: parse_rational(&self.budget)?,
            projects: self
                .projects
                .iter()
                .map(|p| {
                    Ok(RawProject {
                        id: p.id.clone(),
                        cost: parse_rational(&p.cost)?,
                    })
                })
                .collect::<Result<_, FormatError>>()?,
            voters: self
                .voters
                .iter()
                .map(|v| RawVoter {
                    id: v.id.clone(),
                    approves: v.approves.clone(),
                })
                .collect(),
        })
    }

    pub fn from_raw(raw: &RawElection) -> NativeElection {
        NativeElection {
            budget: format_rational(&raw.budget),
            projects: raw
                .projects
                .iter()
                .map(|p| NativeProject {
                    id: p.id.clone(),
                    cost: format_rational(&p.cost),
                })
                .collect(),
            voters: raw
                .voters
                .iter()
                .map(|v| NativeVoter {
                    id: v.id.clone(),
                    approves: v.approves.clone(),
                })
                .collect(),
        }
    }
}

impl Election {
    pub fn from_native(native: &NativeElection) -> Result<Election, FormatError> {
        Ok(Election::validate(native.to_raw()?)?)
    }

    pub fn from_json(text: &str) -> Result<Election, FormatError> {
        let native: NativeElection = serde_json::from_str(text)?;
        Election::from_native(&native)
    }

    pub fn from_file(path: impl AsRef<std::path::Path>) -> Result<Election, FormatError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| FormatError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Election::from_json(&text)
    }

    pub fn to_native(&self) -> NativeElection {
        NativeElection::from_raw(&self.to_raw())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_native()).expect("native election serializes")
    }
}
