//! Class-weighted random forest.

mod artifact;
mod config;
mod model;
pub(crate) mod tree;

pub use artifact::{deserialize_model, serialize_model, ARTIFACT_VERSION};
pub use config::{default_mtry, TrainConfig, DEFAULT_SEED, DEFAULT_TREES};
pub use model::{
    bootstrap, check_threshold, class_weights, fit_trees, train, train_with, tree_rng,
    ClassWeights, Execution, ForestModel, TreeEnsemble,
};
pub use tree::{best_split, build_tree, gini, DecisionTree, Node, Split, TreeParams};
