//! JSON documents: instances, partitions, results, traces and oracle
//! reports. Exact values are written as `"p/q"` strings; input coordinates
//! may also be JSON integers, decimals or decimal strings.

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use tverberg::{
    parse_rat, Certificate, EventRecord, Instance, OracleReport, Partition, Point, Rat, SolveResult,
};

#[derive(Debug, Deserialize)]
struct RawInstance {
    d: usize,
    r: Option<usize>,
    points: Vec<Vec<Value>>,
}

fn parse_coordinate(v: &Value) -> Result<Rat> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => bail!("coordinate must be a number or string, got {other}"),
    };
    Ok(parse_rat(&text)?)
}

/// Parses an instance document. `r_override` replaces (or supplies) `r`.
pub fn parse_instance(text: &str, r_override: Option<usize>) -> Result<Instance> {
    let raw: RawInstance = serde_json::from_str(text).context("malformed instance document")?;
    let r = r_override
        .or(raw.r)
        .ok_or_else(|| anyhow!("instance has no \"r\" and none was given on the command line"))?;
    let points = raw
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            p.iter()
                .map(parse_coordinate)
                .collect::<Result<Point>>()
                .with_context(|| format!("point {i}"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Instance::new(raw.d, r, points)?)
}

fn coordinate_value(x: &Rat) -> Value {
    if x.is_integer() {
        // Arbitrary-precision numbers keep big integers exact.
        serde_json::from_str(&x.to_string()).expect("integer literal")
    } else {
        Value::String(x.to_string())
    }
}

#[derive(Serialize)]
struct InstanceOut {
    d: usize,
    r: usize,
    points: Vec<Vec<Value>>,
}

pub fn instance_json(inst: &Instance) -> String {
    let doc = InstanceOut {
        d: inst.d(),
        r: inst.r(),
        points: inst
            .points()
            .iter()
            .map(|p| p.iter().map(coordinate_value).collect())
            .collect(),
    };
    to_pretty(&doc)
}

fn strings(values: &[Rat]) -> Vec<String> {
    values.iter().map(ToString::to_string).collect()
}

#[derive(Debug, Deserialize)]
struct RawPartition {
    partition: Vec<Vec<usize>>,
}

/// Reads the `partition` field of a partition or result document.
pub fn parse_partition(text: &str, n: usize) -> Result<Partition> {
    let raw: RawPartition = serde_json::from_str(text).context("malformed partition document")?;
    Ok(Partition::new(raw.partition, n)?)
}

#[derive(Serialize)]
struct Stats {
    pivots_per_stage: Vec<usize>,
    total_pivots: usize,
    restarts: usize,
    restart_reasons: Vec<String>,
}

#[derive(Serialize)]
struct ResultOut {
    d: usize,
    r: usize,
    seed: u64,
    partition: Vec<Vec<usize>>,
    z: Vec<String>,
    alpha: Vec<String>,
    certified_for: String,
    perturbation_used: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    perturbed_points: Option<Vec<Vec<String>>>,
    stats: Stats,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<String>,
}

pub fn result_json(inst: &Instance, res: &SolveResult, seed: u64, trace: Option<&str>) -> String {
    let perturbed = res.certified_for == tverberg::CertifiedFor::Perturbed;
    let doc = ResultOut {
        d: inst.d(),
        r: inst.r(),
        seed,
        partition: res.partition.blocks().to_vec(),
        z: strings(&res.certificate.z),
        alpha: strings(&res.certificate.alpha),
        certified_for: res.certified_for.to_string(),
        perturbation_used: res.perturbation_used.to_string(),
        perturbed_points: perturbed
            .then(|| res.perturbed_points.iter().map(|p| strings(p)).collect()),
        stats: Stats {
            pivots_per_stage: res.stats.pivots_per_stage.clone(),
            total_pivots: res.stats.total_pivots(),
            restarts: res.stats.restarts,
            restart_reasons: res.stats.restart_reasons.clone(),
        },
        trace: trace.map(str::to_string),
    };
    to_pretty(&doc)
}

#[derive(Serialize)]
struct TraceLine {
    stage: usize,
    t1: String,
    h: usize,
    q: usize,
    j: usize,
    pivot_count: usize,
}

/// One JSON object per line, one line per singular event.
pub fn trace_jsonl(events: &[EventRecord]) -> String {
    events
        .iter()
        .map(|e| {
            let line = TraceLine {
                stage: e.stage,
                t1: e.t1.to_string(),
                h: e.h,
                q: e.q,
                j: e.j,
                pivot_count: e.pivot_count,
            };
            serde_json::to_string(&line).expect("trace line serializes") + "\n"
        })
        .collect()
}

#[derive(Serialize)]
struct CertificateOut {
    partition: Vec<Vec<usize>>,
    z: Vec<String>,
    alpha: Vec<String>,
    strict: bool,
}

impl CertificateOut {
    fn new(part: &Partition, cert: &Certificate) -> Self {
        Self {
            partition: part.blocks().to_vec(),
            z: strings(&cert.z),
            alpha: strings(&cert.alpha),
            strict: cert.strict,
        }
    }
}

#[derive(Serialize)]
struct VerifyOut {
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    certificate: Option<CertificateOut>,
}

pub fn verify_json(
    status: &'static str,
    reason: Option<String>,
    certificate: Option<(&Partition, &Certificate)>,
) -> String {
    to_pretty(&VerifyOut {
        status,
        reason,
        certificate: certificate.map(|(p, c)| CertificateOut::new(p, c)),
    })
}

#[derive(Serialize)]
struct OracleOut {
    total_proper_partitions: String,
    singular: usize,
    valid: Vec<CertificateOut>,
}

pub fn oracle_json(report: &OracleReport) -> String {
    to_pretty(&OracleOut {
        total_proper_partitions: report.total_proper_partitions.to_string(),
        singular: report.singular,
        valid: report
            .valid_partitions
            .iter()
            .map(|(p, c)| CertificateOut::new(p, c))
            .collect(),
    })
}

fn to_pretty<T: Serialize>(doc: &T) -> String {
    serde_json::to_string_pretty(doc).expect("documents serialize") + "\n"
}
