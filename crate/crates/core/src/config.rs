//! JSON configuration and partition files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::{Instance, Partition};
use crate::popularity::{from_weights, PopularitySpec};

/// `{"K": int, "N": int, "M": real, "popularity": {...}}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(rename = "K")]
    pub users: usize,
    #[serde(rename = "N")]
    pub files: usize,
    #[serde(rename = "M")]
    pub cache: f64,
    pub popularity: PopularitySpec,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("{e}; expected {}", SCHEMA)))
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Build the instance; explicit weights are sorted, renumbering files
    /// by popularity rank.
    pub fn instance(&self) -> Result<Instance> {
        let pop = self.popularity.build(self.files).map_err(to_config)?;
        Instance::new(self.users, self.files, self.cache, pop).map_err(to_config)
    }

    /// `rank[i]`: 1-based popularity rank of the `i`-th file as listed.
    pub fn file_ranks(&self) -> Result<Vec<usize>> {
        match &self.popularity {
            PopularitySpec::Zipf { .. } => Ok((1..=self.files).collect()),
            PopularitySpec::Explicit { weights } => {
                let (_, perm) = from_weights(weights).map_err(to_config)?;
                Ok(perm.into_iter().map(|r| r + 1).collect())
            }
        }
    }
}

const SCHEMA: &str = r#"{"K": int, "N": int, "M": real, "popularity": {"type": "zipf", "gamma": real} | {"type": "explicit", "weights": [real]}}"#;

fn to_config(e: Error) -> Error {
    match e {
        Error::InvalidInstance(m) | Error::InvalidPopularity(m) | Error::Shape(m) => Error::Config(m),
        other => other,
    }
}

pub fn parse_partition(text: &str) -> Result<Partition> {
    serde_json::from_str(text).map_err(|e| Error::Config(format!("partition: {e}")))
}

pub fn read_partition(path: impl AsRef<Path>) -> Result<Partition> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    parse_partition(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_zipf() {
        let c = Config::from_json(r#"{"K":4,"N":10,"M":2.5,"popularity":{"type":"zipf","gamma":1.3}}"#).unwrap();
        let inst = c.instance().unwrap();
        assert_eq!((inst.k(), inst.n(), inst.m()), (4, 10, 2.5));
        assert!((inst.pop().p(1) - 0.43747551936214198819).abs() < 1e-15);
    }

    #[test]
    fn explicit_weights_are_ranked() {
        let c = Config::from_json(r#"{"K":2,"N":3,"M":1,"popularity":{"type":"explicit","weights":[1,3,2]}}"#).unwrap();
        assert_eq!(c.instance().unwrap().pop().probs(), &[0.5, 1.0 / 3.0, 1.0 / 6.0]);
        assert_eq!(c.file_ranks().unwrap(), vec![3, 1, 2]);
    }

    #[test]
    fn schema_errors() {
        for bad in [
            r#"{"K":4,"N":10}"#,
            r#"{"K":4,"N":10,"M":1,"popularity":{"type":"pareto"}}"#,
            r#"{"K":4,"N":10,"M":1,"popularity":{"type":"zipf","gamma":1},"extra":0}"#,
            "not json",
        ] {
            assert!(matches!(Config::from_json(bad), Err(Error::Config(_))), "{bad}");
        }
        let c = Config::from_json(r#"{"K":4,"N":10,"M":11,"popularity":{"type":"zipf","gamma":1}}"#).unwrap();
        assert!(matches!(c.instance(), Err(Error::Config(_))));
        let c = Config::from_json(r#"{"K":2,"N":3,"M":1,"popularity":{"type":"explicit","weights":[1,2]}}"#).unwrap();
        assert!(matches!(c.instance(), Err(Error::Config(_))));
    }

    #[test]
    fn partition_round_trip() {
        let p = parse_partition(r#"{"type":"uniform","z":[0,0.5,0]}"#).unwrap();
        let again = parse_partition(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(p, again);
        assert!(parse_partition(r#"{"type":"full","K":2,"N":1,"entries":[[2,0,1.0]]}"#).is_err());
    }
}
