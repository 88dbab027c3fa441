//! Published capacity values and large-width asymptotes.
//!
//! The records live in `data/reference.json`, which is embedded at compile
//! time and can also be read by external tooling.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::activation::{Activation, Method};
use crate::error::{Error, Result};

/// Raw contents of the shipped reference file.
pub const REFERENCE_JSON: &str = include_str!("../data/reference.json");

/// Supported reference file version.
pub const FORMAT_VERSION: u32 = 1;

/// Hidden-layer width of a record; `"inf"` in the file for asymptotes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Width {
    Finite(usize),
    Infinite,
}

impl fmt::Display for Width {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Width::Finite(d) => write!(f, "{d}"),
            Width::Infinite => f.write_str("inf"),
        }
    }
}

impl From<usize> for Width {
    fn from(d: usize) -> Self {
        Width::Finite(d)
    }
}

impl Serialize for Width {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Width::Finite(d) => s.serialize_u64(*d as u64),
            Width::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Width {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(usize),
            Text(String),
        }
        match Raw::deserialize(de)? {
            Raw::Num(d) => Ok(Width::Finite(d)),
            Raw::Text(s) if s == "inf" => Ok(Width::Infinite),
            Raw::Text(s) => Err(serde::de::Error::custom(format!("invalid width '{s}'"))),
        }
    }
}

/// Where a reference number comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RefMethod {
    Rdt,
    Plrdt,
    ReplicaRs,
    #[serde(rename = "replica-1rsb")]
    Replica1rsb,
}

impl From<Method> for RefMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Rdt => RefMethod::Rdt,
            Method::Plrdt => RefMethod::Plrdt,
        }
    }
}

impl fmt::Display for RefMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RefMethod::Rdt => "rdt",
            RefMethod::Plrdt => "plrdt",
            RefMethod::ReplicaRs => "replica-rs",
            RefMethod::Replica1rsb => "replica-1rsb",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceValue {
    pub activation: Activation,
    pub d: Width,
    pub method: RefMethod,
    pub value: f64,
    pub tolerance: f64,
    pub source: String,
}

impl ReferenceValue {
    /// `|x - value| <= tolerance`, with a little slack for rounding.
    pub fn accepts(&self, x: f64) -> bool {
        (x - self.value).abs() <= self.tolerance + 1e-12 * self.value.abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSet {
    pub version: u32,
    pub records: Vec<ReferenceValue>,
}

impl ReferenceSet {
    pub fn parse(json: &str) -> Result<Self> {
        let set: ReferenceSet = serde_json::from_str(json)
            .map_err(|e| Error::Domain(format!("malformed reference data: {e}")))?;
        if set.version != FORMAT_VERSION {
            return Err(Error::Unsupported(format!(
                "reference data version {} (expected {FORMAT_VERSION})",
                set.version
            )));
        }
        for r in &set.records {
            if !(r.value > 0.0 && r.tolerance >= 0.0) {
                return Err(Error::Domain(format!(
                    "reference record ({}, {}, {}) has invalid value or tolerance",
                    r.activation, r.d, r.method
                )));
            }
        }
        for (i, r) in set.records.iter().enumerate() {
            let dup = set.records[..i]
                .iter()
                .any(|o| (o.activation, o.d, o.method) == (r.activation, r.d, r.method));
            if dup {
                return Err(Error::Domain(format!(
                    "duplicate reference record ({}, {}, {})",
                    r.activation, r.d, r.method
                )));
            }
        }
        Ok(set)
    }

    pub fn lookup(&self, activation: Activation, d: Width, method: RefMethod) -> Option<&ReferenceValue> {
        self.records
            .iter()
            .find(|r| r.activation == activation && r.d == d && r.method == method)
    }

    /// Finite-width records computed by `rdt` or `plrdt`, in file order.
    pub fn table(&self) -> impl Iterator<Item = &ReferenceValue> {
        self.records
            .iter()
            .filter(|r| matches!(r.method, RefMethod::Rdt | RefMethod::Plrdt))
    }
}

/// The embedded reference set.
pub fn embedded() -> &'static ReferenceSet {
    static SET: OnceLock<ReferenceSet> = OnceLock::new();
    SET.get_or_init(|| ReferenceSet::parse(REFERENCE_JSON).expect("embedded reference data is valid"))
}

/// Record for `(activation, d, method)` from the embedded set.
pub fn lookup(
    activation: Activation,
    d: impl Into<Width>,
    method: impl Into<RefMethod>,
) -> Option<&'static ReferenceValue> {
    embedded().lookup(activation, d.into(), method.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_lookups() {
        let q = lookup(Activation::Quadratic, 2, Method::Rdt).unwrap();
        assert_eq!((q.value, q.tolerance), (5.498, 0.006));
        let r = lookup(Activation::Relu, 4, Method::Plrdt).unwrap();
        assert_eq!((r.value, r.tolerance), (3.066, 0.06));
        let l = lookup(Activation::Linear, 1, Method::Rdt).unwrap();
        assert_eq!((l.value, l.tolerance), (2.0, 0.0));
        assert!(lookup(Activation::Quadratic, 1, Method::Rdt).is_none());
        let inf = lookup(Activation::Relu, Width::Infinite, RefMethod::ReplicaRs).unwrap();
        assert_eq!(inf.value, 2.93);
    }

    #[test]
    fn table_is_complete() {
        let set = embedded();
        assert_eq!(set.table().count(), 16);
        for a in Activation::ALL {
            for m in [Method::Rdt, Method::Plrdt] {
                for d in [1, 2, 4] {
                    let present = set.lookup(a, Width::Finite(d), m.into()).is_some();
                    assert_eq!(present, !(a == Activation::Quadratic && d == 1));
                }
            }
        }
    }

    #[test]
    fn round_trip_and_validation() {
        let set = embedded();
        let json = serde_json::to_string(set).unwrap();
        assert_eq!(&ReferenceSet::parse(&json).unwrap(), set);
        let bad = json.replace("\"version\":1", "\"version\":7");
        assert!(matches!(ReferenceSet::parse(&bad), Err(Error::Unsupported(_))));
        assert!(ReferenceSet::parse("{").is_err());
        let dup = r#"{"version":1,"records":[
            {"activation":"linear","d":1,"method":"rdt","value":2,"tolerance":0,"source":""},
            {"activation":"linear","d":1,"method":"rdt","value":2,"tolerance":0,"source":""}]}"#;
        assert!(ReferenceSet::parse(dup).is_err());
    }
}
