//! Canonical JSON files for instances and solutions.
//!
//! Both formats are written on a single line with sorted keys and integral
//! times, so reading and re-writing a canonical file reproduces it byte for
//! byte.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use super::{Capacity, FirstStageSolution, Instance, InstanceParts, ModelError, PotentialRequest, Time};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{0}")]
    Invalid(String),
}

/// Field order is the serialized key order (ASCII sorted).
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    #[serde(rename = "K")]
    fleet: usize,
    #[serde(rename = "Q")]
    capacity: CapacityField,
    d: Vec<Time>,
    h: Time,
    m: usize,
    n: usize,
    requests: Vec<RequestFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RequestFile {
    c: usize,
    e: Time,
    gamma: Time,
    l: Time,
    p: f64,
    q: u32,
    s: Time,
}

struct CapacityField(Capacity);

impl Serialize for CapacityField {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            Capacity::Bounded(q) => serializer.serialize_u32(q),
            Capacity::Unbounded => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for CapacityField {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u32),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Int(q) => Ok(CapacityField(Capacity::Bounded(q))),
            Raw::Text(s) if s == "inf" => Ok(CapacityField(Capacity::Unbounded)),
            Raw::Text(s) => Err(serde::de::Error::custom(format!("invalid capacity '{s}'"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolutionFile {
    routes: Vec<Vec<usize>>,
    wait: BTreeMap<String, Time>,
}

/// Serializes an instance to its canonical single-line form (with a
/// trailing newline).
pub fn instance_to_string(instance: &Instance) -> String {
    let file = InstanceFile {
        fleet: instance.fleet(),
        capacity: CapacityField(instance.capacity()),
        d: instance.travel_matrix().to_vec(),
        h: instance.horizon(),
        m: instance.waiting_count(),
        n: instance.customer_count(),
        requests: instance
            .requests()
            .iter()
            .map(|r| RequestFile {
                c: r.customer,
                e: r.tw_start,
                gamma: r.reveal,
                l: r.tw_end,
                p: r.probability,
                q: r.demand,
                s: r.service,
            })
            .collect(),
    };
    let mut out = serde_json::to_string(&file).expect("instance serialization");
    out.push('\n');
    out
}

pub fn instance_from_str(text: &str) -> Result<Instance, FormatError> {
    let file: InstanceFile = serde_json::from_str(text.trim())?;
    let requests = file
        .requests
        .into_iter()
        .enumerate()
        .map(|(id, r)| PotentialRequest {
            id,
            customer: r.c,
            reveal: r.gamma,
            probability: r.p,
            demand: r.q,
            service: r.s,
            tw_start: r.e,
            tw_end: r.l,
        })
        .collect();
    Ok(Instance::new(InstanceParts {
        waiting_count: file.m,
        customer_count: file.n,
        horizon: file.h,
        fleet: file.fleet,
        capacity: file.capacity.0,
        travel: file.d,
        requests,
    })?)
}

pub fn solution_to_string(solution: &FirstStageSolution) -> String {
    let file = SolutionFile {
        routes: solution.routes.clone(),
        wait: solution.wait.iter().map(|(w, t)| (w.to_string(), *t)).collect(),
    };
    let mut out = serde_json::to_string(&file).expect("solution serialization");
    out.push('\n');
    out
}

pub fn solution_from_str(text: &str) -> Result<FirstStageSolution, FormatError> {
    let file: SolutionFile = serde_json::from_str(text.trim())?;
    let mut wait = BTreeMap::new();
    for (key, tau) in file.wait {
        let w: usize = key
            .parse()
            .map_err(|_| FormatError::Invalid(format!("wait key '{key}' is not a vertex id")))?;
        wait.insert(w, tau);
    }
    Ok(FirstStageSolution {
        routes: file.routes,
        wait,
    })
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance, FormatError> {
    instance_from_str(&std::fs::read_to_string(path)?)
}

pub fn write_instance(path: impl AsRef<Path>, instance: &Instance) -> Result<(), FormatError> {
    Ok(std::fs::write(path, instance_to_string(instance))?)
}

pub fn read_solution(path: impl AsRef<Path>) -> Result<FirstStageSolution, FormatError> {
    solution_from_str(&std::fs::read_to_string(path)?)
}

pub fn write_solution(path: impl AsRef<Path>, solution: &FirstStageSolution) -> Result<(), FormatError> {
    Ok(std::fs::write(path, solution_to_string(solution))?)
}
