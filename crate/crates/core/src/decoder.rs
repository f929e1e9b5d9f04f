//! Multistage min-sum decoding of Construction-D lattices.
//!
//! Levels are decoded from the finest (`l = a`) to the coarsest. At level `l`
//! the residual's coordinates are compared against the two label cosets
//! `b·2^(1-l) + 2^(2-l)·Z`, the resulting cost differences drive a binary
//! min-sum decoder on the parity-check graph of `C_l`, and the decoded layer
//! is subtracted. What is left is rounded to `2Z^n`.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::gf2::{BinaryCode, BitVector};
use crate::lattice::{ConstructionDLattice, DyadicVector};
use crate::peg::TannerGraph;

/// Settings of the iterative decoder.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecoderConfig {
    /// Iteration cap per level.
    pub max_iterations: usize,
    /// Stop a level as soon as every check is satisfied.
    pub early_stop: bool,
    /// Magnitude limit on every message.
    pub clip: f64,
    /// Normalization of check-to-symbol messages; 1.0 is plain min-sum.
    pub scaling: f64,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig {
            max_iterations: 10,
            early_stop: true,
            clip: 100.0,
            scaling: 1.0,
        }
    }
}

impl DecoderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(invalid("max_iterations must be >= 1"));
        }
        if !(self.clip > 0.0) {
            return Err(invalid("clip must be positive"));
        }
        if !(self.scaling > 0.0 && self.scaling <= 1.0) {
            return Err(invalid("scaling must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// Edge-indexed parity-check graph of one code.
#[derive(Clone, Debug)]
pub struct CheckGraph {
    n: usize,
    /// Edges of check `c` are `check_start[c]..check_start[c + 1]`.
    check_start: Vec<usize>,
    edge_symbol: Vec<usize>,
    symbol_edges: Vec<Vec<usize>>,
}

impl CheckGraph {
    pub fn from_checks(n: usize, checks: &[BitVector]) -> Self {
        let mut check_start = Vec::with_capacity(checks.len() + 1);
        let mut edge_symbol = Vec::new();
        let mut symbol_edges = vec![Vec::new(); n];
        check_start.push(0);
        for row in checks {
            for s in row.iter_ones() {
                symbol_edges[s].push(edge_symbol.len());
                edge_symbol.push(s);
            }
            check_start.push(edge_symbol.len());
        }
        CheckGraph {
            n,
            check_start,
            edge_symbol,
            symbol_edges,
        }
    }

    pub fn symbol_count(&self) -> usize {
        self.n
    }

    pub fn check_count(&self) -> usize {
        self.check_start.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edge_symbol.len()
    }

    fn check_edges(&self, c: usize) -> std::ops::Range<usize> {
        self.check_start[c]..self.check_start[c + 1]
    }

    pub fn max_symbol_degree(&self) -> usize {
        self.symbol_edges.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn max_check_degree(&self) -> usize {
        (0..self.check_count())
            .map(|c| self.check_edges(c).len())
            .max()
            .unwrap_or(0)
    }

    pub fn to_tanner_graph(&self) -> TannerGraph {
        let mut adj = vec![Vec::new(); self.n];
        for c in 0..self.check_count() {
            for e in self.check_edges(c) {
                adj[self.edge_symbol[e]].push(c);
            }
        }
        TannerGraph::from_symbol_adjacency(self.check_count(), adj).expect("edges are distinct")
    }

    /// Whether `bits` satisfies every check.
    pub fn syndrome_is_zero(&self, bits: &[bool]) -> bool {
        (0..self.check_count()).all(|c| {
            self.check_edges(c)
                .filter(|&e| bits[self.edge_symbol[e]])
                .count()
                % 2
                == 0
        })
    }
}

/// Result of one binary min-sum run.
#[derive(Clone, Debug, PartialEq)]
pub struct MinSumOutcome {
    pub bits: BitVector,
    pub iterations: usize,
    pub converged: bool,
    /// Elementary message operations over all iterations.
    pub operations: u64,
    pub max_operations_per_iteration: u64,
}

/// Flooding min-sum on a parity-check graph.
///
/// `metrics[i]` is the cost of label 1 minus the cost of label 0, so positive
/// values favor 0. A symbol whose posterior is exactly zero decides 0 but
/// counts as undetermined, and blocks convergence.
pub fn minsum_binary(graph: &CheckGraph, metrics: &[f64], config: &DecoderConfig) -> MinSumOutcome {
    assert_eq!(metrics.len(), graph.n, "one metric per symbol");
    let clip = config.clip;
    let clamp = |x: f64| x.clamp(-clip, clip);
    let edges = graph.edge_count();
    let mut v2c: Vec<f64> = graph.edge_symbol.iter().map(|&s| clamp(metrics[s])).collect();
    let mut c2v = vec![0.0f64; edges];
    let mut hard = vec![false; graph.n];
    let mut undetermined = vec![false; graph.n];

    let mut operations = 0u64;
    let mut max_ops = 0u64;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.max_iterations {
        iterations += 1;
        let mut ops = 0u64;

        for c in 0..graph.check_count() {
            let range = graph.check_edges(c);
            let (mut min1, mut min2, mut arg) = (clip, clip, usize::MAX);
            let mut negative = false;
            for e in range.clone() {
                let m = v2c[e];
                negative ^= m < 0.0;
                let a = m.abs();
                if a < min1 {
                    min2 = min1;
                    min1 = a;
                    arg = e;
                } else if a < min2 {
                    min2 = a;
                }
            }
            for e in range.clone() {
                let mag = if e == arg { min2 } else { min1 };
                let sign_neg = negative ^ (v2c[e] < 0.0);
                let out = config.scaling * mag;
                c2v[e] = if sign_neg { -out } else { out };
            }
            ops += 2 * range.len() as u64;
        }

        for s in 0..graph.n {
            let incident = &graph.symbol_edges[s];
            let total = metrics[s] + incident.iter().map(|&e| c2v[e]).sum::<f64>();
            for &e in incident {
                v2c[e] = clamp(total - c2v[e]);
            }
            hard[s] = total < 0.0;
            undetermined[s] = total == 0.0;
            ops += 2 * incident.len() as u64 + 1;
        }

        operations += ops;
        max_ops = max_ops.max(ops);
        converged = !undetermined.contains(&true) && graph.syndrome_is_zero(&hard);
        if converged && config.early_stop {
            break;
        }
    }

    MinSumOutcome {
        bits: BitVector::from_bools(&hard),
        iterations,
        converged,
        operations,
        max_operations_per_iteration: max_ops,
    }
}

/// Per-coordinate cost differences `cost(1) - cost(0)` for level `level`,
/// where `cost(b)` is the squared distance from the residual to the nearest
/// point of `b·2^(1-level) + 2^(2-level)·Z`.
pub fn level_metrics(residual: &[f64], level: usize) -> Vec<f64> {
    assert!(level >= 1, "levels are 1-based");
    let step = 2f64.powi(1 - level as i32);
    let period = 2.0 * step;
    let dist = |r: f64| {
        let d = r.rem_euclid(period);
        d.min(period - d)
    };
    residual
        .iter()
        .map(|&r| {
            let c0 = dist(r);
            let c1 = dist(r - step);
            c1 * c1 - c0 * c0
        })
        .collect()
}

/// `n·(g·d_s(d_s−1) + g^{d_ch}·d_ch(d_ch−1) + g − 1)`, the per-iteration
/// decoding cost bound, in arbitrary precision.
pub fn complexity_bound(n: u64, g: u64, d_s: u64, d_ch: u64) -> Result<BigUint> {
    if n == 0 || g == 0 || d_s == 0 || d_ch == 0 {
        return Err(invalid("complexity bound arguments must be >= 1"));
    }
    let g_big = BigUint::from(g);
    let symbol = &g_big * BigUint::from(d_s * (d_s - 1));
    let check = num_traits::pow(g_big.clone(), d_ch as usize) * BigUint::from(d_ch * (d_ch - 1));
    Ok(BigUint::from(n) * (symbol + check + g_big - BigUint::one()))
}

/// Outcome of decoding one received vector.
#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult {
    pub point: DyadicVector,
    /// Iterations spent on each level, index `l - 1`.
    pub iterations: Vec<usize>,
    pub converged: Vec<bool>,
    pub operations: u64,
    pub max_operations_per_iteration: u64,
}

impl DecodeResult {
    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|&c| c)
    }

    pub fn total_iterations(&self) -> usize {
        self.iterations.iter().sum()
    }
}

#[derive(Clone, Debug)]
struct LevelDecoder {
    code: BinaryCode,
    graph: CheckGraph,
}

/// Multistage decoder bound to one lattice. Construction precomputes the
/// check graph of every level; decoding is read-only and can run on many
/// threads at once.
#[derive(Clone, Debug)]
pub struct MultistageDecoder {
    lattice: ConstructionDLattice,
    levels: Vec<LevelDecoder>,
    config: DecoderConfig,
}

impl MultistageDecoder {
    pub fn new(lattice: &ConstructionDLattice, config: DecoderConfig) -> Result<Self> {
        config.validate()?;
        let n = lattice.dimension();
        let levels = lattice
            .family()
            .codes()
            .iter()
            .map(|code| LevelDecoder {
                code: code.clone(),
                graph: CheckGraph::from_checks(n, code.parity_checks()),
            })
            .collect();
        Ok(MultistageDecoder {
            lattice: lattice.clone(),
            levels,
            config,
        })
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.config
    }

    pub fn lattice(&self) -> &ConstructionDLattice {
        &self.lattice
    }

    /// Check graph of `C_level`.
    pub fn level_graph(&self, level: usize) -> &CheckGraph {
        &self.levels[level - 1].graph
    }

    pub fn max_symbol_degree(&self) -> usize {
        self.levels.iter().map(|l| l.graph.max_symbol_degree()).max().unwrap_or(0)
    }

    pub fn max_check_degree(&self) -> usize {
        self.levels.iter().map(|l| l.graph.max_check_degree()).max().unwrap_or(0)
    }

    /// Largest label group order, `2^a`.
    pub fn max_label_group(&self) -> u64 {
        1u64 << self.lattice.levels()
    }

    /// Per-iteration cost bound for this lattice's graphs. Degenerate graphs
    /// (no edges) are evaluated with degree 1.
    pub fn per_iteration_bound(&self) -> BigUint {
        complexity_bound(
            self.lattice.dimension() as u64,
            self.max_label_group(),
            self.max_symbol_degree().max(1) as u64,
            self.max_check_degree().max(1) as u64,
        )
        .expect("arguments are positive")
    }

    pub fn decode(&self, y: &[f64]) -> DecodeResult {
        let lat = &self.lattice;
        let n = lat.dimension();
        assert_eq!(y.len(), n, "received vector length");
        let a = lat.levels();
        let s = 1i64 << lat.denominator_exp();
        let g = lat.family().code(1).generator();

        let mut residual = y.to_vec();
        let mut point = vec![0i64; n];
        let mut iterations = vec![0; a];
        let mut converged = vec![false; a];
        let mut operations = 0;
        let mut max_ops = 0;

        for level in (1..=a).rev() {
            let dec = &self.levels[level - 1];
            let metrics = level_metrics(&residual, level);
            let out = minsum_binary(&dec.graph, &metrics, &self.config);
            iterations[level - 1] = out.iterations;
            converged[level - 1] = out.converged;
            operations += out.operations;
            max_ops = max_ops.max(out.max_operations_per_iteration);

            let message = dec.code.message_of(&out.bits);
            let unit = 1i64 << (a - level);
            let step = unit as f64 / s as f64;
            for j in message.iter_ones() {
                for i in g[j].iter_ones() {
                    point[i] += unit;
                    residual[i] -= step;
                }
            }
        }
        for (p, &r) in point.iter_mut().zip(&residual) {
            *p += 2 * s * round_half_toward_zero(r / 2.0);
        }

        DecodeResult {
            point: DyadicVector::new(point, lat.denominator_exp()),
            iterations,
            converged,
            operations,
            max_operations_per_iteration: max_ops,
        }
    }
}

fn round_half_toward_zero(x: f64) -> i64 {
    let t = x.trunc();
    if (x - t).abs() == 0.5 {
        t as i64
    } else {
        x.round() as i64
    }
}

/// Converts a bound to `u128` when it fits.
pub fn bound_as_u128(b: &BigUint) -> Option<u128> {
    if b.is_zero() {
        return Some(0);
    }
    b.to_u128()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::{hamming_7_4, NestedCodeFamily};
    use crate::lattice::construction_d;
    use crate::oracle::ml_decode;

    fn hamming_lattice() -> ConstructionDLattice {
        construction_d(&NestedCodeFamily::new(2, vec![hamming_7_4()]).unwrap()).unwrap()
    }

    #[test]
    fn metric_examples() {
        assert_eq!(level_metrics(&[0.0, 1.0, 0.5], 1), [1.0, -1.0, 0.0]);
        // Level 2: labels {0, 1/2} mod 1.
        let m = level_metrics(&[0.0, 0.5, 0.25], 2);
        assert_eq!(m, [0.25, -0.25, 0.0]);
    }

    #[test]
    fn complexity_examples() {
        assert_eq!(complexity_bound(7, 2, 3, 4).unwrap(), BigUint::from(1435u32));
        assert_eq!(complexity_bound(5, 1, 1, 1).unwrap(), BigUint::zero());
        assert_eq!(complexity_bound(256, 2, 3, 4).unwrap(), BigUint::from(52480u32));
        assert!(complexity_bound(0, 2, 3, 4).is_err());
        // Far past u128.
        let big = complexity_bound(256, 1 << 20, 3, 40).unwrap();
        assert!(bound_as_u128(&big).is_none());
    }

    #[test]
    fn hamming_graph_degrees() {
        let dec = MultistageDecoder::new(&hamming_lattice(), DecoderConfig::default()).unwrap();
        assert_eq!(dec.max_symbol_degree(), 3);
        assert_eq!(dec.max_check_degree(), 4);
        assert_eq!(dec.per_iteration_bound(), BigUint::from(1435u32));
    }

    #[test]
    fn clean_codeword_takes_one_iteration() {
        let code = hamming_7_4();
        let graph = CheckGraph::from_checks(7, code.parity_checks());
        let c = code.encode(&BitVector::parse("1011").unwrap());
        let metrics: Vec<f64> = c.to_bools().iter().map(|&b| if b { -1.0 } else { 1.0 }).collect();
        let out = minsum_binary(&graph, &metrics, &DecoderConfig::default());
        assert_eq!(out.bits, c);
        assert_eq!(out.iterations, 1);
        assert!(out.converged);
    }

    #[test]
    fn erasure_does_not_converge() {
        let graph = CheckGraph::from_checks(7, hamming_7_4().parity_checks());
        let cfg = DecoderConfig {
            max_iterations: 6,
            ..DecoderConfig::default()
        };
        let out = minsum_binary(&graph, &[0.0; 7], &cfg);
        assert!(!out.converged);
        assert_eq!(out.iterations, 6);
    }

    fn perturbed(c: &BitVector, at: usize) -> Vec<f64> {
        let mut y: Vec<f64> = c.to_bools().iter().map(|&b| b as u8 as f64).collect();
        y[at] += if c.get(at) { -0.8 } else { 0.8 };
        y
    }

    fn hamming_codewords() -> Vec<BitVector> {
        let code = hamming_7_4();
        (0u8..16)
            .map(|m| code.encode(&BitVector::from_bits(&[m & 1, (m >> 1) & 1, (m >> 2) & 1, (m >> 3) & 1])))
            .collect()
    }

    #[test]
    fn single_perturbation_is_corrected() {
        let lat = hamming_lattice();
        let cfg = DecoderConfig {
            max_iterations: 10,
            scaling: 0.75,
            ..DecoderConfig::default()
        };
        let dec = MultistageDecoder::new(&lat, cfg).unwrap();
        for c in hamming_codewords() {
            let expect: Vec<i64> = c.to_bools().iter().map(|&b| b as i64).collect();
            for at in 0..7 {
                let y = perturbed(&c, at);
                let out = dec.decode(&y);
                assert!(out.all_converged());
                assert_eq!(out.point, ml_decode(&lat, &y).unwrap());
                assert_eq!(out.point.numerators(), expect);
            }
        }
    }

    #[test]
    fn plain_minsum_traps_on_the_shared_symbol() {
        // Symbol 2 sits in all three checks; with unscaled messages its three
        // degree-2 neighbours flip together onto another codeword.
        let lat = hamming_lattice();
        let dec = MultistageDecoder::new(&lat, DecoderConfig::default()).unwrap();
        for c in hamming_codewords() {
            for at in 0..7 {
                let y = perturbed(&c, at);
                let out = dec.decode(&y);
                let ml = ml_decode(&lat, &y).unwrap();
                assert!(out.all_converged());
                assert_eq!(out.point == ml, at != 2, "codeword {c}, position {at}");
            }
        }
    }

    #[test]
    fn rounding_ties_go_toward_zero() {
        assert_eq!(round_half_toward_zero(0.5), 0);
        assert_eq!(round_half_toward_zero(-0.5), 0);
        assert_eq!(round_half_toward_zero(1.5), 1);
        assert_eq!(round_half_toward_zero(-1.5), -1);
        assert_eq!(round_half_toward_zero(0.6), 1);
    }

    #[test]
    fn config_validation() {
        let c = DecoderConfig { max_iterations: 0, ..DecoderConfig::default() };
        assert!(c.validate().is_err());
        let c = DecoderConfig { scaling: 1.5, ..DecoderConfig::default() };
        assert!(c.validate().is_err());
        let c = DecoderConfig { clip: 0.0, ..DecoderConfig::default() };
        assert!(c.validate().is_err());
    }
}
