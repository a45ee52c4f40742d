//! JSON documents for instances, models and results.
//!
//! Every document carries `schema_version`; instance documents also carry
//! `kind` (`"swp"` or `"qrobot"`). Unknown fields are rejected.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{DistanceMatrix, QRobotInstance, SwpInstance};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Swp,
    Qrobot,
}

impl std::fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ProblemKind::Swp => "swp",
            ProblemKind::Qrobot => "qrobot",
        })
    }
}

/// A loaded problem instance.
#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Swp {
        instance: SwpInstance,
        distances: DistanceMatrix,
    },
    QRobot(QRobotInstance),
}

impl Instance {
    pub fn kind(&self) -> ProblemKind {
        match self {
            Instance::Swp { .. } => ProblemKind::Swp,
            Instance::QRobot(_) => ProblemKind::Qrobot,
        }
    }
}

/// On-disk instance layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub schema_version: u32,
    pub kind: ProblemKind,
    pub n: usize,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coordinates: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slot_start: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slot_duration: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_workload: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distances: Option<Vec<Vec<f64>>>,
}

impl InstanceDoc {
    pub fn from_instance(instance: &Instance) -> Self {
        match instance {
            Instance::Swp {
                instance,
                distances,
            } => InstanceDoc {
                schema_version: SCHEMA_VERSION,
                kind: ProblemKind::Swp,
                n: instance.n_patients(),
                k: instance.k_workers(),
                coordinates: Some(instance.coordinates().to_vec()),
                slot_start: Some(instance.slot_start().to_vec()),
                slot_duration: Some(instance.slot_duration().to_vec()),
                max_workload: instance.max_workload(),
                capacity: None,
                weights: None,
                distances: Some(distances.rows()),
            },
            Instance::QRobot(inst) => InstanceDoc {
                schema_version: SCHEMA_VERSION,
                kind: ProblemKind::Qrobot,
                n: inst.n_items(),
                k: inst.k_robots(),
                coordinates: inst.coordinates().map(<[_]>::to_vec),
                slot_start: None,
                slot_duration: None,
                max_workload: None,
                capacity: Some(inst.capacity()),
                weights: Some(inst.weights().to_vec()),
                distances: Some(inst.distances().rows()),
            },
        }
    }

    /// Validates the document and builds the instance it describes.
    pub fn to_instance(&self) -> Result<Instance> {
        check_version(self.schema_version)?;
        let distances_from = |coords: Option<&Vec<[f64; 2]>>| -> Result<DistanceMatrix> {
            match (&self.distances, coords) {
                (Some(rows), _) => DistanceMatrix::from_rows(rows),
                (None, Some(c)) => DistanceMatrix::from_points(c),
                (None, None) => Err(Error::validation(
                    "distances",
                    "either distances or coordinates must be present",
                )),
            }
        };
        match self.kind {
            ProblemKind::Swp => {
                let coords = require(&self.coordinates, "coordinates")?;
                if coords.len() != self.n + 1 {
                    return Err(Error::validation(
                        "coordinates",
                        format!("expected {} points for n = {}", self.n + 1, self.n),
                    ));
                }
                reject(&self.capacity, "capacity", "swp")?;
                reject(&self.weights, "weights", "swp")?;
                let instance = SwpInstance::new(
                    self.k,
                    coords.clone(),
                    require(&self.slot_start, "slot_start")?.clone(),
                    require(&self.slot_duration, "slot_duration")?.clone(),
                    self.max_workload,
                )?;
                let distances = distances_from(Some(coords))?;
                if distances.n_nodes() != self.n + 1 {
                    return Err(Error::validation(
                        "distances",
                        format!("expected {} rows for n = {}", self.n + 1, self.n),
                    ));
                }
                Ok(Instance::Swp {
                    instance,
                    distances,
                })
            }
            ProblemKind::Qrobot => {
                reject(&self.slot_start, "slot_start", "qrobot")?;
                reject(&self.slot_duration, "slot_duration", "qrobot")?;
                reject(&self.max_workload, "max_workload", "qrobot")?;
                let weights = require(&self.weights, "weights")?.clone();
                if weights.len() != self.n {
                    return Err(Error::validation(
                        "weights",
                        format!("expected {} entries for n = {}", self.n, self.n),
                    ));
                }
                let capacity = *require(&self.capacity, "capacity")?;
                let distances = distances_from(self.coordinates.as_ref())?;
                Ok(Instance::QRobot(QRobotInstance::new(
                    self.k,
                    capacity,
                    weights,
                    self.coordinates.clone(),
                    distances,
                )?))
            }
        }
    }
}

fn require<'a, T>(v: &'a Option<T>, field: &str) -> Result<&'a T> {
    v.as_ref()
        .ok_or_else(|| Error::validation(field, "required field is missing"))
}

fn reject<T>(v: &Option<T>, field: &str, kind: &str) -> Result<()> {
    match v {
        Some(_) => Err(Error::validation(field, format!("not allowed for kind `{kind}`"))),
        None => Ok(()),
    }
}

pub(crate) fn check_version(found: u32) -> Result<()> {
    if found == SCHEMA_VERSION {
        Ok(())
    } else {
        Err(Error::Version {
            found,
            expected: SCHEMA_VERSION,
        })
    }
}

#[derive(Deserialize)]
struct VersionProbe {
    schema_version: Option<u32>,
}

/// Parses a versioned document: syntax errors carry a location, a missing or
/// wrong `schema_version` is reported before any structural error.
pub fn from_json_str<T: DeserializeOwned>(text: &str) -> Result<T> {
    let probe: VersionProbe = serde_json::from_str(text)?;
    match probe.schema_version {
        None => return Err(Error::validation("schema_version", "required field is missing")),
        Some(v) => check_version(v)?,
    }
    Ok(serde_json::from_str(text)?)
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    from_json_str(&fs::read_to_string(path)?)
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    fs::write(path, to_json_string(value)?)?;
    Ok(())
}

pub fn instance_to_json(instance: &Instance) -> Result<String> {
    to_json_string(&InstanceDoc::from_instance(instance))
}

pub fn instance_from_json(text: &str) -> Result<Instance> {
    from_json_str::<InstanceDoc>(text)?.to_instance()
}

pub fn write_instance(path: impl AsRef<Path>, instance: &Instance) -> Result<()> {
    fs::write(path, instance_to_json(instance)?)?;
    Ok(())
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance> {
    instance_from_json(&fs::read_to_string(path)?)
}
