// SPDX-License-Identifier: Apache-2.0

//! Stable JSON forms of satisfaction values, certificates and verdicts.
//!
//! Rationals are written as `"n"` or `"p/q"` strings; enclosures as
//! `{"lo", "hi", "precision_bits"}`. Id arrays follow the election's
//! project or voter order.

use serde_json::{json, Value};

use crate::core_check::{BlockingCertificate, CoreVerdict};
use crate::instance::{Allocation, Election};
use crate::rational::format_rational;
use crate::satisfaction::{SatKind, SatValue};

pub fn sat_value(value: &SatValue) -> Value {
    match value {
        SatValue::Exact(r) => Value::String(format_rational(r)),
        SatValue::Interval(enc) => json!({
            "lo": format_rational(enc.lo()),
            "hi": format_rational(enc.hi()),
            "precision_bits": enc.precision_bits(),
        }),
    }
}

pub fn certificate(election: &Election, cert: &BlockingCertificate) -> Value {
    let members: Vec<Value> = cert
        .members
        .iter()
        .map(|m| {
            json!({
                "voter": election.voter_id(m.voter),
                "before": sat_value(&m.before),
                "after": sat_value(&m.after),
            })
        })
        .collect();
    json!({
        "coalition": election.voter_ids_of(cert.coalition),
        "deviation": election.project_ids(cert.deviation),
        "deviation_cost": format_rational(election.total_cost(cert.deviation).as_rational()),
        "budget_share": format_rational(election.budget_share(cert.coalition.len()).as_rational()),
        "members": members,
    })
}

pub fn allocation(election: &Election, allocation: &Allocation) -> Value {
    json!(election.project_ids(allocation.projects()))
}

/// `{"sat", "verdict": "in_core" | "empty", ...}`. An in-core verdict
/// carries `allocation`; an empty one carries `witnesses` in allocation
/// bitmask order.
pub fn verdict(kind: SatKind, election: &Election, verdict: &CoreVerdict) -> Value {
    match verdict {
        CoreVerdict::InCore(a) => json!({
            "sat": kind.name(),
            "verdict": "in_core",
            "allocation": allocation(election, a),
        }),
        CoreVerdict::Empty(witnesses) => {
            let list: Vec<Value> = witnesses
                .iter()
                .map(|(a, cert)| {
                    json!({
                        "allocation": allocation(election, a),
                        "certificate": certificate(election, cert),
                    })
                })
                .collect();
            json!({
                "sat": kind.name(),
                "verdict": "empty",
                "allocations_checked": witnesses.len(),
                "witnesses": list,
            })
        }
    }
}
