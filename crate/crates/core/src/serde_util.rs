//! JSON-friendly encodings for maps keyed by structured references.

/// `BTreeMap<NodeRef, f64>` as a list of `{dimension, id, value}` objects.
pub mod node_values {
    use alloc::collections::BTreeMap;
    use alloc::string::String;
    use alloc::vec::Vec;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::ontology::{DimensionId, NodeRef};

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Entry {
        dimension: DimensionId,
        id: String,
        value: f64,
    }

    pub fn serialize<S: Serializer>(map: &BTreeMap<NodeRef, f64>, s: S) -> Result<S::Ok, S::Error> {
        map.iter()
            .map(|(r, &value)| Entry {
                dimension: r.dimension.clone(),
                id: r.id.clone(),
                value,
            })
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<NodeRef, f64>, D::Error> {
        let entries = Vec::<Entry>::deserialize(d)?;
        let mut map = BTreeMap::new();
        for e in entries {
            let key = NodeRef::new(e.dimension, e.id);
            if map.insert(key, e.value).is_some() {
                return Err(serde::de::Error::custom("duplicate node entry"));
            }
        }
        Ok(map)
    }
}

/// `BTreeMap<EdgeRef, f64>` as a list of `{dimension, source, target, value}` objects.
pub mod edge_values {
    use alloc::collections::BTreeMap;
    use alloc::string::String;
    use alloc::vec::Vec;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::ontology::{DimensionId, EdgeRef};

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Entry {
        dimension: DimensionId,
        source: String,
        target: String,
        value: f64,
    }

    pub fn serialize<S: Serializer>(map: &BTreeMap<EdgeRef, f64>, s: S) -> Result<S::Ok, S::Error> {
        map.iter()
            .map(|(r, &value)| Entry {
                dimension: r.dimension.clone(),
                source: r.source.clone(),
                target: r.target.clone(),
                value,
            })
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<EdgeRef, f64>, D::Error> {
        let entries = Vec::<Entry>::deserialize(d)?;
        let mut map = BTreeMap::new();
        for e in entries {
            let key = EdgeRef::new(e.dimension, e.source, e.target);
            if map.insert(key, e.value).is_some() {
                return Err(serde::de::Error::custom("duplicate edge entry"));
            }
        }
        Ok(map)
    }
}
