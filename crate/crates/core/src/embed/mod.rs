//! Fixed-width functional embeddings of property cones and their PCA
//! reduction.
//!
//! The built-in provider simulates the one-frame inductive unfolding of a
//! property cone under random stimulus and records, per node, the fraction of
//! patterns on which it evaluates to 1. Node ratios are pooled to a fixed
//! width by averaging contiguous buckets of the topological node order.
//! Externally produced tensors can be imported instead.

mod pca;
mod tensor;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netlist::{Netlist, NetlistError, UnfoldMode};
use crate::par::{self, Workers};

pub use pca::{fit_pca, symmetric_eigen, PcaModel};
pub use tensor::{export_tensor, import_tensor, parse_tensor, render_tensor};

pub const DEFAULT_WIDTH: usize = 128;
pub const DEFAULT_PATTERNS: usize = 1024;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmbedError {
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error("malformed tensor file: {0}")]
    MalformedTensorFile(String),
    #[error("width mismatch: expected {expected}, found {found}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("PCA needs at least 2 tensors, got {0}")]
    TooFewTensors(usize),
    #[error("threshold {0} is outside (0, 1]")]
    InvalidThreshold(f64),
    #[error("{0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provider {
    #[serde(rename = "simulation")]
    Simulation,
    #[serde(rename = "imported")]
    Imported,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingTensor {
    pub design: String,
    pub property: usize,
    pub values: Vec<f64>,
    pub provider: Provider,
}

impl EmbeddingTensor {
    pub fn width(&self) -> usize {
        self.values.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignatureOptions {
    pub patterns: usize,
    pub seed: u64,
    pub width: usize,
}

impl Default for SignatureOptions {
    fn default() -> Self {
        SignatureOptions {
            patterns: DEFAULT_PATTERNS,
            seed: 0,
            width: DEFAULT_WIDTH,
        }
    }
}

/// Logic-1 ratio of every node of the one-frame inductive unfolding of
/// property 0 of `coi`: free variables first, then gates, then the bad
/// signal itself.
pub fn node_ratios(coi: &Netlist, patterns: usize, seed: u64) -> Result<Vec<f64>, NetlistError> {
    coi.property(0)?;
    let patterns = patterns.max(1);
    let unfolded = coi.unfold(1, UnfoldMode::Inductive)?;
    let words = patterns.div_ceil(64);
    let tail_mask = match patterns % 64 {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // stimulus[w][v]: word w of free variable v
    let stimulus: Vec<Vec<u64>> = (0..words)
        .map(|_| unfolded.free_vars.iter().map(|_| rng.next_u64()).collect())
        .collect();

    let bad = unfolded.bads[0][0];
    let mut ones = vec![0u64; unfolded.free_vars.len() + unfolded.ands.len() + 1];
    for (w, free) in stimulus.iter().enumerate() {
        let mask = if w + 1 == words { tail_mask } else { u64::MAX };
        let values = unfolded.simulate_words(free);
        let nodes = unfolded
            .free_vars
            .iter()
            .chain(unfolded.ands.iter().map(|g| &g.lhs))
            .map(|lit| values[lit.var() as usize])
            .chain(std::iter::once(crate::netlist::word_value(&values, bad)));
        for (slot, word) in ones.iter_mut().zip(nodes) {
            *slot += (word & mask).count_ones() as u64;
        }
    }
    Ok(ones.into_iter().map(|c| c as f64 / patterns as f64).collect())
}

/// Averages `values` into `width` contiguous buckets. Shorter inputs are
/// stretched by repeating entries.
pub fn pool(values: &[f64], width: usize) -> Vec<f64> {
    let g = values.len();
    assert!(g > 0, "nothing to pool");
    (0..width)
        .map(|j| {
            let start = j * g / width;
            let end = ((j + 1) * g / width).max(start + 1);
            values[start..end].iter().sum::<f64>() / (end - start) as f64
        })
        .collect()
}

/// Signature of a single-property cone netlist.
pub fn simulate_signature(coi: &Netlist, opts: &SignatureOptions) -> Result<EmbeddingTensor, NetlistError> {
    let ratios = node_ratios(coi, opts.patterns, opts.seed)?;
    Ok(EmbeddingTensor {
        design: coi.name.clone(),
        property: 0,
        values: pool(&ratios, opts.width),
        provider: Provider::Simulation,
    })
}

/// Signature of property `p` of a design, computed on its cone.
pub fn property_signature(n: &Netlist, p: usize, opts: &SignatureOptions) -> Result<EmbeddingTensor, NetlistError> {
    let coi = n.restrict_to_coi(p)?;
    let mut t = simulate_signature(&coi, opts)?;
    t.design = n.name.clone();
    t.property = p;
    Ok(t)
}

pub fn design_signatures(
    n: &Netlist,
    opts: &SignatureOptions,
    workers: Workers,
) -> Result<Vec<EmbeddingTensor>, NetlistError> {
    let props: Vec<usize> = (0..n.num_properties()).collect();
    par::map(&props, workers, |&p| property_signature(n, p, opts))
        .into_iter()
        .collect()
}
