//! Evolutionary molecular network: layer molecules by heavy-atom count, link
//! consecutive layers by a two-stage similarity filter, and propagate known
//! properties along the links.
//!
//! Stage 1 scores every (parent, child) pair across consecutive layers with a
//! fingerprint or edit similarity and keeps, per child, the maximal-scoring
//! candidates above `theta1`. Stage 2 re-screens the survivors with the
//! Weisfeiler-Lehman kernel against `theta2`. The result is a directed acyclic
//! graph whose edges always step one heavy atom up.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chem::{write_smiles, Molecule};
use crate::similarity::{
    default_fingerprint, edit_similarity, tanimoto, wl_similarity, SimilarityMetric,
    DEFAULT_WL_ITERATIONS,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub theta1: f64,
    pub theta2: f64,
    pub stage1_metric: SimilarityMetric,
    pub wl_iterations: usize,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            theta1: 0.5,
            theta2: 0.5,
            stage1_metric: SimilarityMetric::Fingerprint,
            wl_iterations: DEFAULT_WL_ITERATIONS,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum EvolutionError {
    #[error("molecule list is empty")]
    EmptyInput,
    #[error("thresholds must lie in [0, 1]: theta1={theta1}, theta2={theta2}")]
    BadThreshold { theta1: f64, theta2: f64 },
    #[error("no parent found for the query molecule")]
    NoParentFound,
    #[error("labels length {labels} does not match node count {nodes}")]
    LabelCountMismatch { labels: usize, nodes: usize },
}

/// Molecules grouped by heavy-atom count, ascending; within a group the
/// original input order is preserved.
#[derive(Debug, Clone)]
pub struct Hierarchy {
    pub molecules: Vec<Molecule>,
    pub layers: BTreeMap<usize, Vec<usize>>,
}

pub fn build_hierarchy(molecules: Vec<Molecule>) -> Result<Hierarchy, EvolutionError> {
    if molecules.is_empty() {
        return Err(EvolutionError::EmptyInput);
    }
    let mut layers: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, mol) in molecules.iter().enumerate() {
        layers.entry(mol.heavy_atom_count()).or_default().push(i);
    }
    Ok(Hierarchy { molecules, layers })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionEdge {
    pub parent: usize,
    pub child: usize,
    pub stage1: f64,
    pub stage2: f64,
    /// label(child) - label(parent), present when labels are attached.
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvolutionNode {
    pub id: usize,
    pub smiles: String,
    pub name: Option<String>,
    pub heavy_atoms: usize,
    pub label: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct BuildStats {
    /// Children in layers above the bottom with no surviving parent.
    pub isolated_children: Vec<usize>,
    pub stage1_candidates: usize,
    pub stage2_survivors: usize,
}

/// The linked evolutionary network. Nodes keep their hierarchy indices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvolutionGraph {
    pub config: EvolutionConfig,
    pub nodes: Vec<EvolutionNode>,
    pub layers: BTreeMap<usize, Vec<usize>>,
    pub edges: Vec<EvolutionEdge>,
    pub stats: BuildStats,
    #[serde(skip)]
    molecules: Vec<Molecule>,
}

impl EvolutionGraph {
    pub fn molecules(&self) -> &[Molecule] {
        &self.molecules
    }

    /// Attach per-node labels, filling edge deltas.
    pub fn set_labels(&mut self, labels: &[f64]) -> Result<(), EvolutionError> {
        if labels.len() != self.nodes.len() {
            return Err(EvolutionError::LabelCountMismatch {
                labels: labels.len(),
                nodes: self.nodes.len(),
            });
        }
        for (node, &label) in self.nodes.iter_mut().zip(labels) {
            node.label = Some(label);
        }
        for edge in &mut self.edges {
            edge.delta = Some(labels[edge.child] - labels[edge.parent]);
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("graph serializes")
    }
}

fn stage1_score(cfg: &EvolutionConfig, a: &Molecule, a_smiles: &str, b: &Molecule, b_smiles: &str) -> f64 {
    match cfg.stage1_metric {
        SimilarityMetric::Fingerprint => {
            tanimoto(&default_fingerprint(a), &default_fingerprint(b)).expect("equal widths")
        }
        SimilarityMetric::Edit => edit_similarity(a_smiles, b_smiles),
        // WL as a stage-1 metric collapses the two stages; still allowed.
        SimilarityMetric::Wl => wl_similarity(a, b, cfg.wl_iterations),
    }
}

/// Link consecutive layers: per child, stage-1 candidates above `theta1` are
/// reduced to the argmax set, then stage 2 keeps those with WL similarity at
/// least `theta2`. Children with no surviving parent are reported in stats.
pub fn link_pairs(
    hierarchy: &Hierarchy,
    cfg: &EvolutionConfig,
) -> Result<EvolutionGraph, EvolutionError> {
    if !(0.0..=1.0).contains(&cfg.theta1) || !(0.0..=1.0).contains(&cfg.theta2) {
        return Err(EvolutionError::BadThreshold {
            theta1: cfg.theta1,
            theta2: cfg.theta2,
        });
    }
    let smiles: Vec<String> = hierarchy.molecules.iter().map(write_smiles).collect();
    let mut edges = Vec::new();
    let mut stats = BuildStats::default();

    for (&count, children) in &hierarchy.layers {
        let parents = match count.checked_sub(1).and_then(|c| hierarchy.layers.get(&c)) {
            Some(p) => p,
            None => continue,
        };
        for &child in children {
            let child_mol = &hierarchy.molecules[child];
            let mut candidates: Vec<(usize, f64)> = Vec::new();
            for &parent in parents {
                let score = stage1_score(
                    cfg,
                    &hierarchy.molecules[parent],
                    &smiles[parent],
                    child_mol,
                    &smiles[child],
                );
                if score >= cfg.theta1 {
                    candidates.push((parent, score));
                }
            }
            stats.stage1_candidates += candidates.len();
            let best = candidates
                .iter()
                .map(|&(_, s)| s)
                .fold(f64::NEG_INFINITY, f64::max);
            let mut survived = false;
            for (parent, stage1) in candidates
                .into_iter()
                .filter(|&(_, s)| s == best)
            {
                let stage2 =
                    wl_similarity(&hierarchy.molecules[parent], child_mol, cfg.wl_iterations);
                if stage2 >= cfg.theta2 {
                    edges.push(EvolutionEdge {
                        parent,
                        child,
                        stage1,
                        stage2,
                        delta: None,
                    });
                    survived = true;
                }
            }
            if !survived {
                stats.isolated_children.push(child);
            }
        }
    }
    stats.stage2_survivors = edges.len();

    let nodes = hierarchy
        .molecules
        .iter()
        .enumerate()
        .map(|(id, mol)| EvolutionNode {
            id,
            smiles: smiles[id].clone(),
            name: mol.name().map(str::to_string),
            heavy_atoms: mol.heavy_atom_count(),
            label: None,
        })
        .collect();

    Ok(EvolutionGraph {
        config: cfg.clone(),
        nodes,
        layers: hierarchy.layers.clone(),
        edges,
        stats,
        molecules: hierarchy.molecules.clone(),
    })
}

/// Parents a query molecule would attach to, under the graph's thresholds.
/// Returns `(node index, stage1 score)` pairs.
pub fn attach_query(graph: &EvolutionGraph, query: &Molecule) -> Vec<(usize, f64)> {
    let cfg = &graph.config;
    let heavy = query.heavy_atom_count();
    let parents = match heavy.checked_sub(1).and_then(|c| graph.layers.get(&c)) {
        Some(p) => p,
        None => return Vec::new(),
    };
    let query_smiles = write_smiles(query);
    let mut candidates: Vec<(usize, f64)> = Vec::new();
    for &parent in parents {
        let score = stage1_score(
            cfg,
            &graph.molecules[parent],
            &graph.nodes[parent].smiles,
            query,
            &query_smiles,
        );
        if score >= cfg.theta1 {
            candidates.push((parent, score));
        }
    }
    let best = candidates
        .iter()
        .map(|&(_, s)| s)
        .fold(f64::NEG_INFINITY, f64::max);
    candidates
        .into_iter()
        .filter(|&(_, s)| s == best)
        .filter(|&(parent, _)| {
            wl_similarity(&graph.molecules[parent], query, cfg.wl_iterations) >= cfg.theta2
        })
        .collect()
}

/// Deterministic propagation baseline: attach the query, weight surviving
/// parents by normalized stage-1 scores, and extrapolate each parent's label
/// by its mean incoming delta.
pub fn evo_predict(
    graph: &EvolutionGraph,
    query: &Molecule,
    labels: &[f64],
) -> Result<f64, EvolutionError> {
    if labels.len() != graph.nodes.len() {
        return Err(EvolutionError::LabelCountMismatch {
            labels: labels.len(),
            nodes: graph.nodes.len(),
        });
    }
    let parents = attach_query(graph, query);
    if parents.is_empty() {
        return Err(EvolutionError::NoParentFound);
    }
    let total: f64 = parents.iter().map(|&(_, s)| s).sum();
    let mut prediction = 0.0;
    for &(parent, score) in &parents {
        let weight = if total > 0.0 {
            score / total
        } else {
            1.0 / parents.len() as f64
        };
        let incoming: Vec<f64> = graph
            .edges
            .iter()
            .filter(|e| e.child == parent)
            .map(|e| labels[e.child] - labels[e.parent])
            .collect();
        let mean_delta = if incoming.is_empty() {
            0.0
        } else {
            incoming.iter().sum::<f64>() / incoming.len() as f64
        };
        prediction += weight * (labels[parent] + mean_delta);
    }
    Ok(prediction)
}
