//! Transition matrices of multicurves and their spectral radius.
//!
//! Convention: `a_{βγ} = Σ 1/deg(f: δ → γ)` over the components `δ` of
//! `f^{-1}(γ)` isotopic to `β`. Rows are indexed by the isotopy class `β`,
//! columns by the target curve `γ`.

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};
use thiserror::Error;

/// Verdicts within this distance of `λ = 1` are reported as boundary cases.
pub const BOUNDARY_TOL: f64 = 1e-9;
/// Iteration budget for the Perron root.
pub const MAX_POWER_ITERATIONS: usize = 1_000_000;
const BRACKET_TOL: f64 = 1e-13;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MulticurveError {
    #[error("unknown curve label {0:?}")]
    UnknownLabel(String),
    #[error("curve label {0:?} listed twice")]
    DuplicateCurve(String),
    #[error("lift ({target}, {component}) listed twice")]
    DuplicateLift { target: String, component: usize },
    #[error("lift ({target}, {component}) has degree 0")]
    ZeroDegree { target: String, component: usize },
    #[error("matrix must be square with {labels} rows and columns")]
    NotSquare { labels: usize },
    #[error("matrix entries must be finite and nonnegative")]
    NegativeEntry,
    #[error("Perron root did not converge in {iterations} iterations")]
    NoConvergence { iterations: usize },
}

/// One component of the preimage of a curve of the multicurve.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lift {
    pub target_curve: String,
    pub preimage_component_id: usize,
    /// Curve of the multicurve this component is isotopic to (rel the
    /// postcritical set); `None` for peripheral, null-homotopic or
    /// non-multicurve components.
    #[serde(default)]
    pub isotopic_to: Option<String>,
    pub degree: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverData {
    pub curves: Vec<String>,
    pub lifts: Vec<Lift>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionMatrix {
    labels: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl TransitionMatrix {
    pub fn new(labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self, MulticurveError> {
        let n = labels.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(MulticurveError::NotSquare { labels: n });
        }
        if rows.iter().flatten().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(MulticurveError::NegativeEntry);
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l) {
                return Err(MulticurveError::DuplicateCurve(l.clone()));
            }
        }
        Ok(TransitionMatrix { labels, rows })
    }

    /// Matrix with labels `0, 1, ...`.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, MulticurveError> {
        let labels = (0..rows.len()).map(|i| i.to_string()).collect();
        TransitionMatrix::new(labels, rows)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i][j]
    }

    /// `a_{βγ}` by label.
    pub fn entry(&self, beta: &str, gamma: &str) -> Result<f64, MulticurveError> {
        let idx = |l: &str| {
            self.labels.iter().position(|x| x == l).ok_or_else(|| MulticurveError::UnknownLabel(l.to_string()))
        };
        Ok(self.rows[idx(beta)?][idx(gamma)?])
    }

    pub fn transpose(&self) -> TransitionMatrix {
        let n = self.dim();
        let rows = (0..n).map(|i| (0..n).map(|j| self.rows[j][i]).collect()).collect();
        TransitionMatrix { labels: self.labels.clone(), rows }
    }

    pub fn scaled(&self, s: f64) -> Result<TransitionMatrix, MulticurveError> {
        let rows = self.rows.iter().map(|r| r.iter().map(|x| x * s).collect()).collect();
        TransitionMatrix::new(self.labels.clone(), rows)
    }

    /// Principal submatrix on the given indices.
    pub fn submatrix(&self, idx: &[usize]) -> TransitionMatrix {
        TransitionMatrix {
            labels: idx.iter().map(|&i| self.labels[i].clone()).collect(),
            rows: idx.iter().map(|&i| idx.iter().map(|&j| self.rows[i][j]).collect()).collect(),
        }
    }
}

pub fn build_matrix(data: &CoverData) -> Result<TransitionMatrix, MulticurveError> {
    let mut index = HashMap::new();
    for (i, c) in data.curves.iter().enumerate() {
        if index.insert(c.as_str(), i).is_some() {
            return Err(MulticurveError::DuplicateCurve(c.clone()));
        }
    }
    let n = data.curves.len();
    let mut rows = vec![vec![0.0; n]; n];
    let mut seen = HashSet::new();
    for lift in &data.lifts {
        let key = (lift.target_curve.clone(), lift.preimage_component_id);
        if !seen.insert(key) {
            return Err(MulticurveError::DuplicateLift {
                target: lift.target_curve.clone(),
                component: lift.preimage_component_id,
            });
        }
        if lift.degree == 0 {
            return Err(MulticurveError::ZeroDegree {
                target: lift.target_curve.clone(),
                component: lift.preimage_component_id,
            });
        }
        let gamma = *index
            .get(lift.target_curve.as_str())
            .ok_or_else(|| MulticurveError::UnknownLabel(lift.target_curve.clone()))?;
        if let Some(b) = &lift.isotopic_to {
            let beta = *index.get(b.as_str()).ok_or_else(|| MulticurveError::UnknownLabel(b.clone()))?;
            rows[beta][gamma] += 1.0 / lift.degree as f64;
        }
    }
    TransitionMatrix::new(data.curves.clone(), rows)
}

/// Strongly connected components of the support digraph (edge `i → j` when
/// `a_ij > 0`), as principal submatrices.
pub fn irreducible_blocks(m: &TransitionMatrix) -> Vec<TransitionMatrix> {
    block_indices(m).iter().map(|idx| m.submatrix(idx)).collect()
}

fn block_indices(m: &TransitionMatrix) -> Vec<Vec<usize>> {
    let n = m.dim();
    let mut g = DiGraph::<usize, ()>::new();
    let nodes: Vec<_> = (0..n).map(|i| g.add_node(i)).collect();
    for i in 0..n {
        for j in 0..n {
            if m.get(i, j) > 0.0 {
                g.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut v: Vec<usize> = c.into_iter().map(|x| g[x]).collect();
            v.sort_unstable();
            v
        })
        .collect();
    blocks.sort();
    blocks
}

/// Perron root of an irreducible block by power iteration on `A + sI`
/// (`s` the largest row sum, which makes the iteration aperiodic), stopped
/// by the Collatz–Wielandt bracket.
fn block_radius(m: &TransitionMatrix) -> Result<f64, MulticurveError> {
    let n = m.dim();
    if n == 1 {
        return Ok(m.get(0, 0));
    }
    let shift = m.rows().iter().map(|r| r.iter().sum::<f64>()).fold(0.0, f64::max);
    let mut x = vec![1.0; n];
    let mut y = vec![0.0; n];
    for _ in 0..MAX_POWER_ITERATIONS {
        for i in 0..n {
            y[i] = shift * x[i] + (0..n).map(|j| m.get(i, j) * x[j]).sum::<f64>();
        }
        let ratios = (0..n).map(|i| y[i] / x[i]);
        let (lo, hi) = ratios.fold((f64::INFINITY, 0.0f64), |(lo, hi), q| (lo.min(q), hi.max(q)));
        if hi - lo <= BRACKET_TOL * hi {
            return Ok((0.5 * (lo + hi) - shift).max(0.0));
        }
        let norm = y.iter().cloned().fold(0.0, f64::max);
        for i in 0..n {
            x[i] = y[i] / norm;
        }
    }
    Err(MulticurveError::NoConvergence { iterations: MAX_POWER_ITERATIONS })
}

/// `λ(Γ)`: the largest Perron root over the irreducible blocks.
pub fn spectral_radius(m: &TransitionMatrix) -> Result<f64, MulticurveError> {
    let mut best = 0.0f64;
    for b in irreducible_blocks(m) {
        best = best.max(block_radius(&b)?);
    }
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Context {
    /// The data come from a geometrically finite rational map whose
    /// postcritical set has accumulation points.
    GeometricallyFiniteWithAccumulation,
    General,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    NoObstruction,
    Obstruction,
    BoundaryCase,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    pub labels: Vec<String>,
    pub lambda: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub lambda: f64,
    pub verdict: Verdict,
    pub context: Context,
    pub blocks: Vec<BlockReport>,
    pub notes: Vec<String>,
}

pub fn classify_lambda(lambda: f64) -> Verdict {
    if lambda < 1.0 - BOUNDARY_TOL {
        Verdict::NoObstruction
    } else if lambda > 1.0 + BOUNDARY_TOL {
        Verdict::Obstruction
    } else {
        Verdict::BoundaryCase
    }
}

pub fn verdict(m: &TransitionMatrix, context: Context) -> Result<VerdictReport, MulticurveError> {
    let mut blocks = Vec::new();
    let mut lambda = 0.0f64;
    for b in irreducible_blocks(m) {
        let l = block_radius(&b)?;
        lambda = lambda.max(l);
        blocks.push(BlockReport { labels: b.labels().to_vec(), lambda: l });
    }
    let v = classify_lambda(lambda);
    let mut notes = Vec::new();
    if v == Verdict::BoundaryCase {
        notes.push(
            "lambda = 1 within tolerance: matrix data alone cannot tell a Levy-type obstruction from \
             annuli lying in Siegel discs or Herman rings; geometric input is needed"
                .to_string(),
        );
    }
    if context == Context::GeometricallyFiniteWithAccumulation {
        match v {
            Verdict::Obstruction => notes.push(
                "McMullen's bound gives lambda <= 1 for rational maps whose postcritical set accumulates; \
                 lambda > 1 means these data cannot come from such a map"
                    .to_string(),
            ),
            Verdict::BoundaryCase => notes.push(
                "equality case of McMullen's bound: for a geometrically finite map this is not an obstruction, \
                 but the curve is suspect of crossing a connecting arc between parabolic points"
                    .to_string(),
            ),
            Verdict::NoObstruction => {}
        }
    }
    Ok(VerdictReport { lambda, verdict: v, context, blocks, notes })
}
