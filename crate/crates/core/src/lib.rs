// SPDX-License-Identifier: Apache-2.0

//! Exact core-stability checking for approval-based participatory budgeting.
//!
//! * [`instance`]: elections, validation, allocation enumeration, file formats.
//! * [`satisfaction`]: the satisfaction functions, sound comparison, and the
//!   sufficient conditions for a gadget-style counterexample.
//! * [`core_check`]: blocking certificates, core membership and emptiness.
//! * [`theorems`]: the known counterexample instances and their verification.
//! * [`search`]: enumeration and sampling of candidate counterexamples.

pub mod core_check;
pub mod error;
pub mod instance;
pub mod json;
pub mod rational;
pub mod satisfaction;
pub mod search;
pub mod theorems;

pub use core_check::{
    core_empty, find_blocking, find_blocking_with, in_core, verify_certificate, verify_verdict,
    BlockingCertificate, CheckMode, CoreError, CoreOptions, CoreVerdict, MemberRecord, Rejection,
};
pub use error::FormatError;
pub use instance::{
    Allocation, Cost, Election, InstanceError, Project, ProjectSet, RawElection, RawProject,
    RawVoter, ValidationErrors, Violation, VoterSet,
};
pub use rational::{format_rational, parse_rational, ParseRationalError};
pub use satisfaction::{
    sat_compare, sat_set, sat_voter, PrecisionPolicy, SatError, SatEvaluator, SatKind, SatValue,
};
pub use search::{canonical_key, gadget, run_search, SearchError, SearchReport, SearchSpace};
pub use theorems::{build_thm1, build_thm2, build_thm3, verify_theorem, TheoremError, TheoremReport};

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
