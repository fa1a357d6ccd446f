// SPDX-License-Identifier: Apache-2.0

//! Reader for the semicolon-separated Pabulib format.
//!
//! A file has three sections, each introduced by a line holding only its
//! name and followed by a header row:
//!
//! ```text
//! META
//! key;value
//! budget;1000
//! vote_type;approval
//! PROJECTS
//! project_id;cost;name
//! 1;300;Park
//! VOTES
//! voter_id;vote
//! 17;1,4
//! ```
//!
//! Only `vote_type` `approval` is accepted.

use std::collections::HashMap;

use super::{RawElection, RawProject, RawVoter};
use crate::rational::{parse_rational, ParseRationalError};

#[derive(Debug, thiserror::Error)]
pub enum PabulibError {
    #[error("missing {0} section")]
    MissingSection(&'static str),
    #[error("line {line}: content outside of any section")]
    OutsideSection { line: usize },
    #[error("{section} section has no {column:?} column")]
    MissingColumn {
        section: &'static str,
        column: &'static str,
    },
    #[error("META has no {0:?} entry")]
    MissingMeta(&'static str),
    #[error("unsupported vote_type {0:?}: only approval ballots can be read")]
    UnsupportedVoteType(String),
    #[error("{section} row {row}: {source}")]
    Csv {
        section: &'static str,
        row: usize,
        source: csv::Error,
    },
    #[error("{section} row {row}: {source}")]
    Amount {
        section: &'static str,
        row: usize,
        source: ParseRationalError,
    },
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Meta,
    Projects,
    Votes,
}

impl Section {
    fn name(self) -> &'static str {
        match self {
            Section::Meta => "META",
            Section::Projects => "PROJECTS",
            Section::Votes => "VOTES",
        }
    }
}

fn rows(section: Section, text: &str) -> Result<(Vec<String>, Vec<Vec<String>>), PabulibError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(b';')
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|source| PabulibError::Csv {
            section: section.name(),
            row: 0,
            source,
        })?
        .iter()
        .map(|h| h.to_ascii_lowercase())
        .collect();
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|source| PabulibError::Csv {
            section: section.name(),
            row: i + 1,
            source,
        })?;
        out.push(record.iter().map(str::to_string).collect());
    }
    Ok((header, out))
}

fn column(header: &[String], section: Section, name: &'static str) -> Result<usize, PabulibError> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or(PabulibError::MissingColumn {
            section: section.name(),
            column: name,
        })
}

fn cell(row: &[String], index: usize) -> &str {
    row.get(index).map(String::as_str).unwrap_or("")
}

/// Parses a Pabulib file into unvalidated election data.
pub fn parse_pabulib(text: &str) -> Result<RawElection, PabulibError> {
    let mut sections: HashMap<&'static str, String> = HashMap::new();
    let mut current: Option<Section> = None;
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim().trim_start_matches('\u{feff}');
        let marker = match trimmed.to_ascii_uppercase().as_str() {
            "META" => Some(Section::Meta),
            "PROJECTS" => Some(Section::Projects),
            "VOTES" => Some(Section::Votes),
            _ => None,
        };
        if let Some(section) = marker {
            current = Some(section);
            sections.entry(section.name()).or_default();
            continue;
        }
        if trimmed.is_empty() {
            continue;
        }
        let Some(section) = current else {
            return Err(PabulibError::OutsideSection { line: lineno + 1 });
        };
        let buf = sections.get_mut(section.name()).expect("section started");
        buf.push_str(line);
        buf.push('\n');
    }
    let section_text = |s: Section| {
        sections
            .get(s.name())
            .map(String::as_str)
            .ok_or(PabulibError::MissingSection(s.name()))
    };

    let (meta_header, meta_rows) = rows(Section::Meta, section_text(Section::Meta)?)?;
    let mut meta: HashMap<String, String> = HashMap::new();
    // the META header row is itself usually "key;value"
    if meta_header.len() >= 2 && meta_header[0] != "key" {
        meta.insert(meta_header[0].clone(), meta_header[1].clone());
    }
    for row in meta_rows {
        if row.len() >= 2 {
            meta.insert(row[0].to_ascii_lowercase(), row[1].clone());
        }
    }
    let vote_type = meta
        .get("vote_type")
        .ok_or(PabulibError::MissingMeta("vote_type"))?;
    if !vote_type.eq_ignore_ascii_case("approval") {
        return Err(PabulibError::UnsupportedVoteType(vote_type.clone()));
    }
    let budget_text = meta.get("budget").ok_or(PabulibError::MissingMeta("budget"))?;
    let budget = parse_rational(budget_text).map_err(|source| PabulibError::Amount {
        section: "META",
        row: 0,
        source,
    })?;

    let (header, project_rows) = rows(Section::Projects, section_text(Section::Projects)?)?;
    let id_col = column(&header, Section::Projects, "project_id")?;
    let cost_col = column(&header, Section::Projects, "cost")?;
    let projects = project_rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            Ok(RawProject {
                id: cell(row, id_col).to_string(),
                cost: parse_rational(cell(row, cost_col)).map_err(|source| {
                    PabulibError::Amount {
                        section: "PROJECTS",
                        row: i + 1,
                        source,
                    }
                })?,
            })
        })
        .collect::<Result<Vec<_>, PabulibError>>()?;

    let (header, vote_rows) = rows(Section::Votes, section_text(Section::Votes)?)?;
    let voter_col = column(&header, Section::Votes, "voter_id")?;
    let vote_col = column(&header, Section::Votes, "vote")?;
    let voters = vote_rows
        .iter()
        .map(|row| RawVoter {
            id: cell(row, voter_col).to_string(),
            approves: cell(row, vote_col)
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect(),
        })
        .collect();

    Ok(RawElection {
        budget,
        projects,
        voters,
    })
}
