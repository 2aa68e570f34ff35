//! Versioned report envelope and the analyses behind each command.
//!
//! Reports are plain serde structures; exact values are strings and complex
//! numbers are `[re, im]` pairs of decimal strings. Everything except the
//! optional `timestamp` and `timings_ms` fields is a deterministic function
//! of the family, its parameters and the seed.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cohomology::{prediction_table, CountPrediction};
use crate::error::{Error, Result};
use crate::families::{expected_degrees, FamilySpec, FamilyTag};
use crate::proj_map::{
    critical_curves, degree_sequence, exceptional_orbit_check, homogenize, indeterminacy_locus, topological_degree, CriticalCurve,
    ProjPoint, StabilityReport,
};
use crate::solver::{census, PeriodicReport, SolverOptions, Verdict};

/// Bumped on any incompatible change to the report layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub generator: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    pub family: FamilyTag,
    pub params: BTreeMap<String, String>,
    pub seed: u64,
    /// Wall-clock milliseconds per stage; only present when requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, u64>>,
    pub body: ReportBody,
}

impl Report {
    pub fn new(spec: &FamilySpec, seed: u64, body: ReportBody) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            generator: format!("orbitcount {}", env!("CARGO_PKG_VERSION")),
            timestamp: None,
            family: spec.tag,
            params: spec.params.to_strings(),
            seed,
            timings_ms: None,
            body,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Internal(format!("report serialization: {e}")))
    }

    /// Parses a report, rejecting other schema versions.
    pub fn from_json(s: &str) -> Result<Self> {
        let r: Report = serde_json::from_str(s).map_err(|e| Error::Parse { pos: 0, msg: format!("line {} column {}: {e}", e.line(), e.column()) })?;
        if r.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse { pos: 0, msg: format!("schema version {} is not {SCHEMA_VERSION}", r.schema_version) });
        }
        Ok(r)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", content = "result", rename_all = "lowercase")]
pub enum ReportBody {
    Degrees(DegreesReport),
    Analyze(AnalysisReport),
    Predict(PredictReport),
    Census(CensusReport),
    Verify(VerifyReport),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreesReport {
    /// Canonical text of the homogenized map.
    pub map: String,
    /// `deg F^k` for `k = 1..=degrees.len()`.
    pub degrees: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub map: String,
    pub algebraic_degree: u32,
    pub expected_algebraic_degree: u32,
    pub indeterminacy: Vec<ProjPoint>,
    pub critical_curves: Vec<CriticalCurve>,
    pub topological_degree: u32,
    pub expected_topological_degree: u32,
    pub stability: StabilityReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictReport {
    pub predictions: Vec<CountPrediction>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusReport {
    pub reports: Vec<PeriodicReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyRow {
    pub n: u32,
    pub predicted: Option<i128>,
    pub found_distinct: usize,
    pub found_with_multiplicity: u32,
    pub rejected: usize,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub rows: Vec<VerifyRow>,
    pub reports: Vec<PeriodicReport>,
}

pub fn degrees(spec: &FamilySpec, count: u32, budget: u32) -> Result<DegreesReport> {
    let f = homogenize(&spec.planar)?;
    Ok(DegreesReport { map: f.to_text(), degrees: degree_sequence(&f, count, budget)? })
}

pub fn analyze(spec: &FamilySpec, seed: u64, horizon: u32) -> Result<AnalysisReport> {
    let f = homogenize(&spec.planar)?;
    let ind = indeterminacy_locus(&f)?;
    let curves = critical_curves(&f, seed)?;
    let stability = exceptional_orbit_check(&f, &curves, &ind, horizon)?;
    let (alg, top) = expected_degrees(spec);
    Ok(AnalysisReport {
        map: f.to_text(),
        algebraic_degree: f.degree(),
        expected_algebraic_degree: alg,
        indeterminacy: ind,
        critical_curves: curves,
        topological_degree: topological_degree(&f, seed)?,
        expected_topological_degree: top,
        stability,
    })
}

pub fn predict(spec: &FamilySpec, lo: u32, hi: u32) -> Result<PredictReport> {
    Ok(PredictReport { predictions: prediction_table(spec, lo, hi)? })
}

pub fn census_range(spec: &FamilySpec, lo: u32, hi: u32, opts: &SolverOptions) -> Result<CensusReport> {
    Ok(CensusReport { reports: (lo..=hi).map(|n| census(spec, n, opts)).collect::<Result<_>>()? })
}

pub fn verify(spec: &FamilySpec, lo: u32, hi: u32, opts: &SolverOptions) -> Result<VerifyReport> {
    let reports = census_range(spec, lo, hi, opts)?.reports;
    let rows = reports
        .iter()
        .map(|r| VerifyRow {
            n: r.n,
            predicted: r.predicted.as_ref().map(|p| p.predicted),
            found_distinct: r.found_distinct,
            found_with_multiplicity: r.found_with_multiplicity,
            rejected: r.rejected.len(),
            verdict: r.verdict,
        })
        .collect();
    Ok(VerifyReport { rows, reports })
}
