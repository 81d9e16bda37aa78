//! JSON model artifact.
//!
//! ```json
//! {"version":1,"variant":"full","threshold":0.24,"seed":7,
//!  "train_config":{...},"class_weights":{...},
//!  "trees":[{"feature_index":3,"threshold":1.5,"left":{"leaf":0.0},"right":{"leaf":1.0}}]}
//! ```

use serde::{Deserialize, Serialize};

use super::config::TrainConfig;
use super::model::{check_threshold, ClassWeights, ForestModel};
use super::tree::{DecisionTree, Node};
use crate::error::{Error, Result};
use crate::variant::AgeVariant;

pub const ARTIFACT_VERSION: u64 = 1;

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TreeJson {
    Leaf {
        leaf: f64,
    },
    Split {
        feature_index: u32,
        threshold: f64,
        left: Box<TreeJson>,
        right: Box<TreeJson>,
    },
}

#[derive(Serialize, Deserialize)]
struct ArtifactJson {
    version: u64,
    variant: AgeVariant,
    threshold: f64,
    seed: u64,
    train_config: TrainConfig,
    class_weights: ClassWeights,
    trees: Vec<TreeJson>,
}

#[derive(Deserialize)]
struct VersionProbe {
    version: u64,
}

fn to_json(tree: &DecisionTree, id: u32) -> TreeJson {
    match *tree.node(id) {
        Node::Leaf { positive_fraction } => TreeJson::Leaf {
            leaf: positive_fraction,
        },
        Node::Split {
            feature,
            threshold,
            left,
            right,
        } => TreeJson::Split {
            feature_index: feature,
            threshold,
            left: Box::new(to_json(tree, left)),
            right: Box::new(to_json(tree, right)),
        },
    }
}

fn from_json(json: &TreeJson, nodes: &mut Vec<Node>) -> u32 {
    let id = nodes.len();
    match json {
        TreeJson::Leaf { leaf } => nodes.push(Node::Leaf {
            positive_fraction: *leaf,
        }),
        TreeJson::Split {
            feature_index,
            threshold,
            left,
            right,
        } => {
            nodes.push(Node::Leaf {
                positive_fraction: 0.0,
            });
            let l = from_json(left, nodes);
            let r = from_json(right, nodes);
            nodes[id] = Node::Split {
                feature: *feature_index,
                threshold: *threshold,
                left: l,
                right: r,
            };
        }
    }
    id as u32
}

pub fn serialize_model(model: &ForestModel) -> Vec<u8> {
    let artifact = ArtifactJson {
        version: ARTIFACT_VERSION,
        variant: model.variant,
        threshold: model.threshold,
        seed: model.config.seed,
        train_config: model.config.clone(),
        class_weights: model.class_weights,
        trees: model.trees.iter().map(|t| to_json(t, 0)).collect(),
    };
    serde_json::to_vec(&artifact).expect("artifact serialization cannot fail")
}

fn parse<'a, T: Deserialize<'a>>(bytes: &'a [u8]) -> serde_json::Result<T> {
    let mut de = serde_json::Deserializer::from_slice(bytes);
    // unlimited-depth trees nest deeper than serde_json's default limit
    de.disable_recursion_limit();
    let value = T::deserialize(&mut de)?;
    de.end()?;
    Ok(value)
}

pub fn deserialize_model(bytes: &[u8]) -> Result<ForestModel> {
    let probe: VersionProbe = parse(bytes).map_err(|e| Error::MalformedArtifact(e.to_string()))?;
    if probe.version != ARTIFACT_VERSION {
        return Err(Error::ArtifactVersion {
            found: probe.version,
            expected: ARTIFACT_VERSION,
        });
    }
    let artifact: ArtifactJson =
        parse(bytes).map_err(|e| Error::MalformedArtifact(e.to_string()))?;
    check_threshold(artifact.threshold).map_err(|e| Error::MalformedArtifact(e.to_string()))?;
    if artifact.trees.is_empty() {
        return Err(Error::MalformedArtifact("model has no trees".into()));
    }
    if artifact.seed != artifact.train_config.seed {
        return Err(Error::MalformedArtifact(
            "seed disagrees with train_config.seed".into(),
        ));
    }
    let n_features = artifact.variant.feature_count();
    let mut trees = Vec::with_capacity(artifact.trees.len());
    for json in &artifact.trees {
        let mut nodes = Vec::new();
        from_json(json, &mut nodes);
        let tree = DecisionTree::from_nodes(nodes)?;
        if tree.max_feature_index().is_some_and(|f| f >= n_features) {
            return Err(Error::MalformedArtifact(format!(
                "tree splits on a feature outside the {} layout",
                artifact.variant
            )));
        }
        trees.push(tree);
    }
    Ok(ForestModel {
        variant: artifact.variant,
        trees,
        threshold: artifact.threshold,
        config: artifact.train_config,
        class_weights: artifact.class_weights,
    })
}

impl ForestModel {
    pub fn to_bytes(&self) -> Vec<u8> {
        serialize_model(self)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<ForestModel> {
        deserialize_model(bytes)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<ForestModel> {
        deserialize_model(&std::fs::read(path)?)
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stump() -> ForestModel {
        let tree = DecisionTree::from_nodes(vec![
            Node::Split {
                feature: 3,
                threshold: 9.5,
                left: 1,
                right: 2,
            },
            Node::Leaf {
                positive_fraction: 0.125,
            },
            Node::Leaf {
                positive_fraction: 0.9,
            },
        ])
        .unwrap();
        ForestModel {
            variant: AgeVariant::Full,
            trees: vec![tree],
            threshold: 0.24,
            config: TrainConfig {
                n_trees: 1,
                ..TrainConfig::default()
            },
            class_weights: ClassWeights {
                dyslexia: 4.648,
                no_dyslexia: 0.56,
            },
        }
    }

    #[test]
    fn stump_roundtrips_byte_identically() {
        let bytes = serialize_model(&stump());
        let back = deserialize_model(&bytes).unwrap();
        assert_eq!(back, stump());
        assert_eq!(serialize_model(&back), bytes);
        let text = String::from_utf8(bytes).unwrap();
        assert!(text.contains(r#""feature_index":3"#), "{text}");
        assert!(text.contains(r#"{"leaf":0.125}"#), "{text}");
    }

    #[test]
    fn version_mismatch() {
        let text = String::from_utf8(serialize_model(&stump())).unwrap();
        let flipped = text.replacen("\"version\":1", "\"version\":3", 1);
        assert!(matches!(
            deserialize_model(flipped.as_bytes()),
            Err(Error::ArtifactVersion {
                found: 3,
                expected: 1
            })
        ));
    }

    #[test]
    fn truncated_payload() {
        let bytes = serialize_model(&stump());
        assert!(matches!(
            deserialize_model(&bytes[..bytes.len() - 5]),
            Err(Error::MalformedArtifact(_))
        ));
    }

    #[test]
    fn rejects_out_of_layout_feature() {
        let mut m = stump();
        m.variant = AgeVariant::Full;
        let text = String::from_utf8(serialize_model(&m)).unwrap();
        let bad = text.replace("\"feature_index\":3", "\"feature_index\":196");
        assert!(matches!(
            deserialize_model(bad.as_bytes()),
            Err(Error::MalformedArtifact(_))
        ));
    }
}
