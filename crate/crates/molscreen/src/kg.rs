//! Numeric knowledge-graph embedding.
//!
//! A numeric KG is a chain of grid values linked by a single `successor`
//! relation. Entities and the relation are embedded so that `h + l` lands
//! close to `t` while `t + l` stays away from `h`, via the hinge objective
//!
//! ```text
//! L = sum over (h, l, t) of [ gamma + d(h+l, t) - d(t+l, h) ]+
//! ```
//!
//! with d either the L1 or L2 norm. The directional form is implemented
//! exactly as written — there is no corrupted-triplet negative sampling; the
//! reversed-direction term plays that role. Entity rows are projected onto the
//! unit ball after each epoch, which rules out the blow-up minimizer of the
//! second term.
//!
//! Trained tables bridge continuous labels to entity coordinates through
//! [`embed_value`], which interpolates between the bracketing grid entities.

use std::io::{Read, Write};

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Mat;

/// Upper bound on grid size; keeps the full-batch trainer desk-scale.
pub const MAX_GRID_POINTS: f64 = 1e4;

#[derive(Debug, Error, PartialEq)]
pub enum KgError {
    #[error("bad grid range: min={min}, max={max}, step={step}")]
    BadRange { min: f64, max: f64, step: f64 },
    #[error("dimension mismatch: table has {table} columns, config expects {expected}")]
    DimensionMismatch { table: usize, expected: usize },
    #[error("value {value} outside the grid range [{min}, {max}]")]
    OutOfRange { value: f64, min: f64, max: f64 },
    #[error("malformed table file: {0}")]
    BadTable(String),
    #[error("io error: {0}")]
    Io(String),
}

/// Distance metric for the margin objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    L2,
}

impl std::str::FromStr for Norm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(Norm::L1),
            "l2" => Ok(Norm::L2),
            other => Err(format!("unknown norm '{other}' (expected l1 or l2)")),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MarginConfig {
    pub gamma: f64,
    pub metric: Norm,
    pub dim: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for MarginConfig {
    fn default() -> Self {
        MarginConfig {
            gamma: 1.0,
            metric: Norm::L1,
            dim: 8,
            learning_rate: 0.01,
            epochs: 500,
            seed: 42,
        }
    }
}

/// Chain-structured KG over an arithmetic value grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericKG {
    /// Grid values, ascending.
    pub values: Vec<f64>,
    /// Relation names; index 0 is `successor`.
    pub relations: Vec<String>,
    /// (head entity, relation, tail entity) index triples.
    pub triplets: Vec<(usize, usize, usize)>,
}

impl NumericKG {
    pub fn entity_count(&self) -> usize {
        self.values.len()
    }

    pub fn grid_min(&self) -> f64 {
        self.values[0]
    }

    pub fn grid_max(&self) -> f64 {
        *self.values.last().unwrap()
    }
}

/// Build the value chain: entities are `min, min+step, ...` up to `max`, and
/// each consecutive pair is linked by the successor relation.
pub fn build_numeric_kg(min: f64, max: f64, step: f64) -> Result<NumericKG, KgError> {
    if !(min < max) || !(step > 0.0) || (max - min) / step > MAX_GRID_POINTS {
        return Err(KgError::BadRange { min, max, step });
    }
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    let values: Vec<f64> = (0..count).map(|i| min + i as f64 * step).collect();
    let triplets = (0..count - 1).map(|i| (i, 0, i + 1)).collect();
    Ok(NumericKG {
        values,
        relations: vec!["successor".to_string()],
        triplets,
    })
}

/// Learned coordinates for entities and relations.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    pub entities: Mat,
    pub relations: Mat,
}

impl EmbeddingTable {
    pub fn dim(&self) -> usize {
        self.entities.cols()
    }
}

fn distance(metric: Norm, x: &[f64], y: &[f64]) -> f64 {
    match metric {
        Norm::L1 => x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum(),
        Norm::L2 => x
            .iter()
            .zip(y)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt(),
    }
}

/// Exact margin loss over all triplets.
pub fn kg_loss(kg: &NumericKG, emb: &EmbeddingTable, cfg: &MarginConfig) -> Result<f64, KgError> {
    if emb.entities.cols() != cfg.dim || emb.relations.cols() != cfg.dim {
        return Err(KgError::DimensionMismatch {
            table: emb.entities.cols(),
            expected: cfg.dim,
        });
    }
    let dim = cfg.dim;
    let mut sum_h_l = vec![0.0; dim];
    let mut sum_t_l = vec![0.0; dim];
    let mut loss = 0.0;
    for &(h, l, t) in &kg.triplets {
        let eh = emb.entities.row(h);
        let el = emb.relations.row(l);
        let et = emb.entities.row(t);
        for i in 0..dim {
            sum_h_l[i] = eh[i] + el[i];
            sum_t_l[i] = et[i] + el[i];
        }
        let m = cfg.gamma + distance(cfg.metric, &sum_h_l, et) - distance(cfg.metric, &sum_t_l, eh);
        if m > 0.0 {
            loss += m;
        }
    }
    Ok(loss)
}

fn seeded_init(rows: usize, dim: usize, rng: &mut ChaCha8Rng) -> Mat {
    let bound = 6.0 / (dim as f64).sqrt();
    let dist = Uniform::new_inclusive(-bound, bound);
    let mut m = Mat::zeros(rows, dim);
    for v in m.data_mut() {
        *v = dist.sample(rng);
    }
    m
}

/// Full-batch subgradient descent on [`kg_loss`] with per-epoch projection of
/// entity rows onto the unit ball. Deterministic for a fixed seed; returns the
/// per-epoch loss trace alongside the table.
pub fn train_kg(kg: &NumericKG, cfg: &MarginConfig) -> (EmbeddingTable, Vec<f64>) {
    let dim = cfg.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut entities = seeded_init(kg.entity_count(), dim, &mut rng);
    let mut relations = seeded_init(kg.relations.len(), dim, &mut rng);
    let mut trace = Vec::with_capacity(cfg.epochs);

    let mut grad_e = Mat::zeros(kg.entity_count(), dim);
    let mut grad_r = Mat::zeros(kg.relations.len(), dim);

    for _ in 0..cfg.epochs {
        for v in grad_e.data_mut() {
            *v = 0.0;
        }
        for v in grad_r.data_mut() {
            *v = 0.0;
        }
        let mut epoch_loss = 0.0;

        for &(h, l, t) in &kg.triplets {
            let mut u = vec![0.0; dim]; // h + l - t
            let mut v = vec![0.0; dim]; // t + l - h
            for i in 0..dim {
                u[i] = entities.get(h, i) + relations.get(l, i) - entities.get(t, i);
                v[i] = entities.get(t, i) + relations.get(l, i) - entities.get(h, i);
            }
            let (du, dv) = match cfg.metric {
                Norm::L1 => (
                    u.iter().map(|x| x.abs()).sum::<f64>(),
                    v.iter().map(|x| x.abs()).sum::<f64>(),
                ),
                Norm::L2 => (
                    u.iter().map(|x| x * x).sum::<f64>().sqrt(),
                    v.iter().map(|x| x * x).sum::<f64>().sqrt(),
                ),
            };
            let margin = cfg.gamma + du - dv;
            if margin <= 0.0 {
                continue;
            }
            epoch_loss += margin;
            // Subgradients of the active hinge.
            let gu: Vec<f64> = match cfg.metric {
                Norm::L1 => u.iter().map(|&x| sign(x)).collect(),
                Norm::L2 => u
                    .iter()
                    .map(|&x| if du > 0.0 { x / du } else { 0.0 })
                    .collect(),
            };
            let gv: Vec<f64> = match cfg.metric {
                Norm::L1 => v.iter().map(|&x| sign(x)).collect(),
                Norm::L2 => v
                    .iter()
                    .map(|&x| if dv > 0.0 { x / dv } else { 0.0 })
                    .collect(),
            };
            for i in 0..dim {
                // d(h+l,t) term.
                grad_e.set(h, i, grad_e.get(h, i) + gu[i]);
                grad_r.set(l, i, grad_r.get(l, i) + gu[i]);
                grad_e.set(t, i, grad_e.get(t, i) - gu[i]);
                // -d(t+l,h) term.
                grad_e.set(t, i, grad_e.get(t, i) - gv[i]);
                grad_r.set(l, i, grad_r.get(l, i) - gv[i]);
                grad_e.set(h, i, grad_e.get(h, i) + gv[i]);
            }
        }
        trace.push(epoch_loss);

        for (p, g) in entities.data_mut().iter_mut().zip(grad_e.data()) {
            *p -= cfg.learning_rate * g;
        }
        for (p, g) in relations.data_mut().iter_mut().zip(grad_r.data()) {
            *p -= cfg.learning_rate * g;
        }
        // Project entity rows onto the unit ball.
        for r in 0..kg.entity_count() {
            let row = entities.row_mut(r);
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1.0 {
                for x in row {
                    *x /= norm;
                }
            }
        }
    }

    (
        EmbeddingTable {
            entities,
            relations,
        },
        trace,
    )
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Coordinates for an arbitrary value in the grid range: linear interpolation
/// between the two bracketing grid entities.
pub fn embed_value(emb: &EmbeddingTable, kg: &NumericKG, value: f64) -> Result<Vec<f64>, KgError> {
    let min = kg.grid_min();
    let max = kg.grid_max();
    if value < min - 1e-12 || value > max + 1e-12 {
        return Err(KgError::OutOfRange { value, min, max });
    }
    let n = kg.values.len();
    if n == 1 {
        return Ok(emb.entities.row(0).to_vec());
    }
    let step = kg.values[1] - kg.values[0];
    let raw = (value - min) / step;
    let lo = (raw.floor() as usize).min(n - 2);
    let w = (raw - lo as f64).clamp(0.0, 1.0);
    let a = emb.entities.row(lo);
    let b = emb.entities.row(lo + 1);
    Ok(a.iter().zip(b).map(|(x, y)| (1.0 - w) * x + w * y).collect())
}

/// Fraction of triplets whose forward distance beats the reversed one —
/// the directionality the training objective is after.
pub fn directionality(kg: &NumericKG, emb: &EmbeddingTable, metric: Norm) -> f64 {
    if kg.triplets.is_empty() {
        return 1.0;
    }
    let dim = emb.dim();
    let mut satisfied = 0usize;
    for &(h, l, t) in &kg.triplets {
        let mut hl = vec![0.0; dim];
        let mut tl = vec![0.0; dim];
        for i in 0..dim {
            hl[i] = emb.entities.get(h, i) + emb.relations.get(l, i);
            tl[i] = emb.entities.get(t, i) + emb.relations.get(l, i);
        }
        if distance(metric, &hl, emb.entities.row(t)) < distance(metric, &tl, emb.entities.row(h))
        {
            satisfied += 1;
        }
    }
    satisfied as f64 / kg.triplets.len() as f64
}

/// Projection of each entity onto the (normalized) relation direction;
/// the learned scalar ordering of the grid.
pub fn relation_projections(emb: &EmbeddingTable) -> Vec<f64> {
    let l = emb.relations.row(0);
    let norm = l.iter().map(|x| x * x).sum::<f64>().sqrt();
    (0..emb.entities.rows())
        .map(|i| {
            emb.entities
                .row(i)
                .iter()
                .zip(l)
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / norm.max(1e-12)
        })
        .collect()
}

const TABLE_MAGIC: &[u8; 4] = b"NKGT";
const TABLE_VERSION: u32 = 1;

/// Serialize a trained table: magic, version, JSON meta block, dims/counts,
/// grid parameters, then entity and relation rows as little-endian f32.
pub fn write_table(
    w: &mut impl Write,
    kg: &NumericKG,
    emb: &EmbeddingTable,
    meta: &serde_json::Value,
) -> Result<(), KgError> {
    let io_err = |e: std::io::Error| KgError::Io(e.to_string());
    w.write_all(TABLE_MAGIC).map_err(io_err)?;
    w.write_all(&TABLE_VERSION.to_le_bytes()).map_err(io_err)?;
    let meta_bytes = serde_json::to_vec(meta).expect("meta serializes");
    w.write_all(&(meta_bytes.len() as u32).to_le_bytes())
        .map_err(io_err)?;
    w.write_all(&meta_bytes).map_err(io_err)?;
    let dim = emb.dim() as u32;
    w.write_all(&dim.to_le_bytes()).map_err(io_err)?;
    w.write_all(&(kg.entity_count() as u32).to_le_bytes())
        .map_err(io_err)?;
    w.write_all(&(kg.relations.len() as u32).to_le_bytes())
        .map_err(io_err)?;
    w.write_all(&kg.grid_min().to_le_bytes()).map_err(io_err)?;
    let step = if kg.values.len() > 1 {
        kg.values[1] - kg.values[0]
    } else {
        0.0
    };
    w.write_all(&step.to_le_bytes()).map_err(io_err)?;
    for &v in emb.entities.data().iter().chain(emb.relations.data()) {
        w.write_all(&(v as f32).to_le_bytes()).map_err(io_err)?;
    }
    Ok(())
}

/// Read a table written by [`write_table`]. Returns the reconstructed grid,
/// the table (f32 precision), and the stored meta block.
pub fn read_table(
    r: &mut impl Read,
) -> Result<(NumericKG, EmbeddingTable, serde_json::Value), KgError> {
    let io_err = |e: std::io::Error| KgError::Io(e.to_string());
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(io_err)?;
    if &magic != TABLE_MAGIC {
        return Err(KgError::BadTable("wrong magic".into()));
    }
    let mut buf4 = [0u8; 4];
    r.read_exact(&mut buf4).map_err(io_err)?;
    if u32::from_le_bytes(buf4) != TABLE_VERSION {
        return Err(KgError::BadTable("unsupported version".into()));
    }
    r.read_exact(&mut buf4).map_err(io_err)?;
    let meta_len = u32::from_le_bytes(buf4) as usize;
    let mut meta_bytes = vec![0u8; meta_len];
    r.read_exact(&mut meta_bytes).map_err(io_err)?;
    let meta = serde_json::from_slice(&meta_bytes)
        .map_err(|e| KgError::BadTable(format!("meta block: {e}")))?;
    r.read_exact(&mut buf4).map_err(io_err)?;
    let dim = u32::from_le_bytes(buf4) as usize;
    r.read_exact(&mut buf4).map_err(io_err)?;
    let n_ent = u32::from_le_bytes(buf4) as usize;
    r.read_exact(&mut buf4).map_err(io_err)?;
    let n_rel = u32::from_le_bytes(buf4) as usize;
    let mut buf8 = [0u8; 8];
    r.read_exact(&mut buf8).map_err(io_err)?;
    let min = f64::from_le_bytes(buf8);
    r.read_exact(&mut buf8).map_err(io_err)?;
    let step = f64::from_le_bytes(buf8);

    let mut read_mat = |rows: usize| -> Result<Mat, KgError> {
        let mut m = Mat::zeros(rows, dim);
        let mut b = [0u8; 4];
        for v in m.data_mut() {
            r.read_exact(&mut b).map_err(|e| KgError::Io(e.to_string()))?;
            *v = f32::from_le_bytes(b) as f64;
        }
        Ok(m)
    };
    let entities = read_mat(n_ent)?;
    let relations = read_mat(n_rel)?;

    let values = (0..n_ent).map(|i| min + i as f64 * step).collect();
    let triplets = (0..n_ent.saturating_sub(1)).map(|i| (i, 0, i + 1)).collect();
    Ok((
        NumericKG {
            values,
            relations: vec!["successor".to_string()],
            triplets,
        },
        EmbeddingTable {
            entities,
            relations,
        },
        meta,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_counting() {
        let kg = build_numeric_kg(0.0, 0.3, 0.1).unwrap();
        assert_eq!(kg.entity_count(), 4);
        assert_eq!(kg.triplets.len(), 3);

        let kg = build_numeric_kg(0.0, 1.0, 1.0).unwrap();
        assert_eq!(kg.entity_count(), 2);
        assert_eq!(kg.triplets.len(), 1);

        assert!(build_numeric_kg(0.0, 1.0, 0.0001).is_ok());
        assert_eq!(
            build_numeric_kg(0.0, 10.0, 0.0001).unwrap_err(),
            KgError::BadRange {
                min: 0.0,
                max: 10.0,
                step: 0.0001
            }
        );
        assert!(build_numeric_kg(1.0, 0.0, 0.1).is_err());
    }

    fn one_d_table(h: f64, l: f64, t: f64) -> (NumericKG, EmbeddingTable) {
        let kg = NumericKG {
            values: vec![0.0, 1.0],
            relations: vec!["successor".into()],
            triplets: vec![(0, 0, 1)],
        };
        let emb = EmbeddingTable {
            entities: Mat::from_vec(2, 1, vec![h, t]),
            relations: Mat::from_vec(1, 1, vec![l]),
        };
        (kg, emb)
    }

    #[test]
    fn loss_hand_cases() {
        let cfg = MarginConfig {
            gamma: 1.0,
            dim: 1,
            ..Default::default()
        };
        let (kg, emb) = one_d_table(0.0, 1.0, 1.0);
        assert_eq!(kg_loss(&kg, &emb, &cfg).unwrap(), 0.0);

        let cfg = MarginConfig {
            gamma: 0.5,
            dim: 1,
            ..Default::default()
        };
        let (kg, emb) = one_d_table(0.0, 0.0, 0.0);
        assert_eq!(kg_loss(&kg, &emb, &cfg).unwrap(), 0.5);
    }

    #[test]
    fn loss_matches_per_term_recomputation() {
        // Independent scalar oracle over a random 3-triplet instance.
        let kg = NumericKG {
            values: vec![0.0, 1.0, 2.0, 3.0],
            relations: vec!["successor".into()],
            triplets: vec![(0, 0, 1), (1, 0, 2), (2, 0, 3)],
        };
        let entities = Mat::from_vec(
            4,
            2,
            vec![0.3, -0.7, 0.11, 0.42, -0.9, 0.05, 0.6, 0.6],
        );
        let relations = Mat::from_vec(1, 2, vec![0.25, -0.4]);
        let emb = EmbeddingTable {
            entities: entities.clone(),
            relations: relations.clone(),
        };
        for metric in [Norm::L1, Norm::L2] {
            let cfg = MarginConfig {
                gamma: 0.75,
                metric,
                dim: 2,
                ..Default::default()
            };
            let mut expected = 0.0;
            for &(h, _, t) in &kg.triplets {
                let d = |x: &[f64], y: &[f64]| match metric {
                    Norm::L1 => (x[0] - y[0]).abs() + (x[1] - y[1]).abs(),
                    Norm::L2 => ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt(),
                };
                let hl = [
                    entities.get(h, 0) + relations.get(0, 0),
                    entities.get(h, 1) + relations.get(0, 1),
                ];
                let tl = [
                    entities.get(t, 0) + relations.get(0, 0),
                    entities.get(t, 1) + relations.get(0, 1),
                ];
                let m = 0.75 + d(&hl, entities.row(t)) - d(&tl, entities.row(h));
                if m > 0.0 {
                    expected += m;
                }
            }
            let got = kg_loss(&kg, &emb, &cfg).unwrap();
            assert!((got - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn loss_invariant_under_entity_translation() {
        let kg = build_numeric_kg(0.0, 0.5, 0.1).unwrap();
        let cfg = MarginConfig::default();
        let (emb, _) = train_kg(
            &kg,
            &MarginConfig {
                epochs: 5,
                ..cfg.clone()
            },
        );
        let base = kg_loss(&kg, &emb, &cfg).unwrap();
        let mut shifted = emb.clone();
        for r in 0..shifted.entities.rows() {
            for c in 0..shifted.entities.cols() {
                shifted
                    .entities
                    .set(r, c, shifted.entities.get(r, c) + 3.17);
            }
        }
        let moved = kg_loss(&kg, &shifted, &cfg).unwrap();
        assert!((base - moved).abs() < 1e-10);
    }

    #[test]
    fn empty_triplets_leave_initialization_untouched() {
        let kg = NumericKG {
            values: vec![0.0],
            relations: vec!["successor".into()],
            triplets: vec![],
        };
        let cfg = MarginConfig::default();
        let (trained, trace) = train_kg(&kg, &cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let expected_e = seeded_init(1, cfg.dim, &mut rng);
        let expected_r = seeded_init(1, cfg.dim, &mut rng);
        // No gradient ever flows; only the unit-ball projection could change
        // rows, and the init bound keeps norms under control for dim 8... but
        // not below 1, so compare against the projected initialization.
        let mut proj = expected_e.clone();
        for r in 0..proj.rows() {
            let row = proj.row_mut(r);
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1.0 {
                for x in row {
                    *x /= norm;
                }
            }
        }
        // Projection is idempotent, so repeated epochs change nothing more.
        assert_eq!(trained.entities.row(0), proj.row(0));
        assert_eq!(trained.relations.row(0), expected_r.row(0));
        assert!(trace.iter().all(|&l| l == 0.0));
    }

    #[test]
    fn inactive_hinge_means_no_update() {
        let kg = NumericKG {
            values: vec![0.0, 1.0],
            relations: vec!["successor".into()],
            triplets: vec![(0, 0, 1)],
        };
        // h=0, l=1, t=1 in 1-D with gamma 1: margin = 1 + 0 - 2 <= 0.
        let emb = EmbeddingTable {
            entities: Mat::from_vec(2, 1, vec![0.0, 1.0]),
            relations: Mat::from_vec(1, 1, vec![1.0]),
        };
        let cfg = MarginConfig {
            gamma: 1.0,
            dim: 1,
            ..Default::default()
        };
        assert_eq!(kg_loss(&kg, &emb, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn training_is_bit_reproducible() {
        let kg = build_numeric_kg(0.0, 9.0, 1.0).unwrap();
        let cfg = MarginConfig {
            epochs: 50,
            ..Default::default()
        };
        let (a, trace_a) = train_kg(&kg, &cfg);
        let (b, trace_b) = train_kg(&kg, &cfg);
        assert_eq!(a.entities.data(), b.entities.data());
        assert_eq!(a.relations.data(), b.relations.data());
        assert_eq!(trace_a, trace_b);
    }

    #[test]
    fn chain_learns_direction_and_order() {
        let kg = build_numeric_kg(0.0, 9.0, 1.0).unwrap();
        let cfg = MarginConfig::default();
        let (emb, _) = train_kg(&kg, &cfg);
        assert!(directionality(&kg, &emb, cfg.metric) >= 0.9);
        let projections = relation_projections(&emb);
        let spearman = crate::linalg::spearman(&kg.values, &projections);
        assert!(
            (spearman - 1.0).abs() < 1e-12,
            "spearman {spearman}, projections {projections:?}"
        );
    }

    #[test]
    fn embed_value_interpolates() {
        let kg = build_numeric_kg(0.0, 0.3, 0.1).unwrap();
        let emb = EmbeddingTable {
            entities: Mat::from_vec(4, 2, vec![0.0, 0.0, 1.0, 2.0, 2.0, 4.0, 3.0, 6.0]),
            relations: Mat::from_vec(1, 2, vec![0.0, 0.0]),
        };
        // Exactly on a grid point.
        assert_eq!(embed_value(&emb, &kg, 0.1).unwrap(), vec![1.0, 2.0]);
        // Midpoint.
        assert_eq!(embed_value(&emb, &kg, 0.15).unwrap(), vec![1.5, 3.0]);
        // 0.27 on a 0.1 grid: 0.7 * row(0.2) + 0.3 * row(0.3).
        let v = embed_value(&emb, &kg, 0.27).unwrap();
        assert!((v[0] - (0.7 * 2.0 + 0.3 * 3.0)).abs() < 1e-12);
        assert!((v[1] - (0.7 * 4.0 + 0.3 * 6.0)).abs() < 1e-12);
        assert!(matches!(
            embed_value(&emb, &kg, 0.5),
            Err(KgError::OutOfRange { .. })
        ));
    }

    #[test]
    fn table_roundtrip_through_bytes() {
        let kg = build_numeric_kg(0.0, 1.0, 0.25).unwrap();
        let (emb, _) = train_kg(
            &kg,
            &MarginConfig {
                epochs: 10,
                ..Default::default()
            },
        );
        let meta = serde_json::json!({"seed": 42});
        let mut bytes = Vec::new();
        write_table(&mut bytes, &kg, &emb, &meta).unwrap();
        let (kg2, emb2, meta2) = read_table(&mut bytes.as_slice()).unwrap();
        assert_eq!(kg2.entity_count(), kg.entity_count());
        assert_eq!(kg2.triplets, kg.triplets);
        assert_eq!(meta2, meta);
        for (a, b) in emb.entities.data().iter().zip(emb2.entities.data()) {
            assert!((a - b).abs() < 1e-6, "f32 storage should be close");
        }
    }
}
