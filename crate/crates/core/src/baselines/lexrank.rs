//! Continuous LexRank over embedding cosine similarities.

use std::sync::Arc;

use super::similarity::{cosine, norm, SimilarityBackend};
use super::{Document, KChoice, Summarizer, Summary};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerIteration {
    pub damping: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for PowerIteration {
    fn default() -> Self {
        PowerIteration {
            damping: 0.85,
            tolerance: 1e-6,
            max_iterations: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Centrality {
    pub scores: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Pairwise cosine similarities with negatives clamped to zero. A
/// zero vector carries no information, so its row is uniform.
pub fn similarity_matrix(vectors: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let dim = vectors.first().map_or(0, Vec::len);
    for (i, v) in vectors.iter().enumerate() {
        if v.len() != dim {
            return Err(Error::Embedding(format!(
                "sentence {i} has dimension {}, expected {dim}",
                v.len()
            )));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Embedding(format!("non-finite value in sentence {i}")));
        }
    }
    let zero: Vec<bool> = vectors.iter().map(|v| norm(v) == 0.0).collect();
    Ok((0..vectors.len())
        .map(|i| {
            (0..vectors.len())
                .map(|j| match (zero[i], zero[j]) {
                    (true, _) => 1.0,
                    (false, true) => 0.0,
                    _ if i == j => 1.0,
                    _ => cosine(&vectors[i], &vectors[j]).clamp(0.0, 1.0),
                })
                .collect()
        })
        .collect())
}

/// Stationary distribution of the damped random walk over the
/// row-normalised similarity matrix, by power iteration from uniform.
pub fn centrality(similarity: &[Vec<f64>], params: &PowerIteration) -> Centrality {
    let n = similarity.len();
    if n == 0 {
        return Centrality {
            scores: Vec::new(),
            iterations: 0,
            converged: true,
        };
    }
    let uniform = 1.0 / n as f64;
    let transition: Vec<Vec<f64>> = similarity
        .iter()
        .map(|row| {
            let sum: f64 = row.iter().sum();
            if sum > 0.0 {
                row.iter().map(|x| x / sum).collect()
            } else {
                vec![uniform; n]
            }
        })
        .collect();

    let d = params.damping;
    let mut scores = vec![uniform; n];
    for iteration in 1..=params.max_iterations {
        let mut next = vec![(1.0 - d) * uniform; n];
        for (row, &weight) in transition.iter().zip(&scores) {
            for (slot, &p) in next.iter_mut().zip(row) {
                *slot += d * p * weight;
            }
        }
        let delta = next
            .iter()
            .zip(&scores)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        scores = next;
        if delta < params.tolerance {
            return Centrality {
                scores,
                iterations: iteration,
                converged: true,
            };
        }
    }
    Centrality {
        scores,
        iterations: params.max_iterations,
        converged: false,
    }
}

/// Indices of the `k` most central sentences, in document order. Scores
/// equal to within 1e-12 count as ties and go to the earlier sentence.
pub fn select_top_k(scores: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse((scores[i] * 1e12).round() as i64), i));
    let mut picked: Vec<usize> = order.into_iter().take(k).collect();
    picked.sort_unstable();
    picked
}

pub struct LexRankSt {
    backend: Arc<dyn SimilarityBackend>,
    k: KChoice,
    params: PowerIteration,
}

impl LexRankSt {
    pub fn new(backend: Arc<dyn SimilarityBackend>, k: KChoice, params: PowerIteration) -> Self {
        LexRankSt { backend, k, params }
    }

    pub fn centrality(&self, doc: &Document<'_>) -> Result<Centrality> {
        let vectors = self.backend.embed(doc.id, doc.sentences)?;
        if vectors.len() != doc.sentences.len() {
            return Err(Error::Embedding(format!(
                "backend {} returned {} vectors for {} sentences",
                self.backend.name(),
                vectors.len(),
                doc.sentences.len()
            )));
        }
        Ok(centrality(&similarity_matrix(&vectors)?, &self.params))
    }
}

impl Summarizer for LexRankSt {
    fn name(&self) -> &str {
        "lexrank-st"
    }

    fn summarize(&self, doc: &Document<'_>) -> Result<Summary> {
        if doc.sentences.is_empty() {
            return Ok(Summary::from_indices(doc, Vec::new(), true));
        }
        let k = self.k.resolve(doc.sentences.len())?;
        let c = self.centrality(doc)?;
        Ok(Summary::from_indices(doc, select_top_k(&c.scores, k), c.converged))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Solves `x = (1-d)/n + d * Mᵀ x` with `sum(x) = 1` by Gaussian
    /// elimination, independently of the power iteration.
    fn stationary(similarity: &[Vec<f64>], d: f64) -> Vec<f64> {
        let n = similarity.len();
        let m: Vec<Vec<f64>> = similarity
            .iter()
            .map(|r| {
                let s: f64 = r.iter().sum();
                r.iter().map(|x| x / s).collect()
            })
            .collect();
        // (I - d Mᵀ) x = (1-d)/n
        let mut a: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut row: Vec<f64> = (0..n)
                    .map(|j| f64::from(u8::from(i == j)) - d * m[j][i])
                    .collect();
                row.push((1.0 - d) / n as f64);
                row
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap();
            a.swap(col, pivot);
            for r in 0..n {
                if r != col {
                    let f = a[r][col] / a[col][col];
                    for c in col..=n {
                        a[r][c] -= f * a[col][c];
                    }
                }
            }
        }
        (0..n).map(|i| a[i][n] / a[i][i]).collect()
    }

    #[test]
    fn hub_sentence_wins() {
        // sim(A,B) = sim(A,C) = 1, sim(B,C) = 0
        let sim = vec![vec![1.0, 1.0, 1.0], vec![1.0, 1.0, 0.0], vec![1.0, 0.0, 1.0]];
        let params = PowerIteration {
            tolerance: 1e-13,
            max_iterations: 1000,
            ..Default::default()
        };
        let c = centrality(&sim, &params);
        assert!(c.converged);
        let oracle = stationary(&sim, 0.85);
        // by hand: b = 1/3.425, a = 1.425/3.425
        assert!((oracle[0] - 1.425 / 3.425).abs() < 1e-12);
        assert!((oracle[1] - 1.0 / 3.425).abs() < 1e-12);
        for (got, want) in c.scores.iter().zip(&oracle) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
        assert_eq!(select_top_k(&c.scores, 1), [0]);
    }

    #[test]
    fn uniform_matrix_ties_go_to_first() {
        let sim = vec![vec![1.0; 3]; 3];
        let c = centrality(&sim, &PowerIteration::default());
        assert_eq!(select_top_k(&c.scores, 1), [0]);
        assert_eq!(select_top_k(&c.scores, 2), [0, 1]);
    }

    #[test]
    fn zero_rows_are_uniform() {
        let m = similarity_matrix(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![-1.0, 0.0]]).unwrap();
        assert_eq!(m[0], [1.0, 1.0, 1.0]);
        assert_eq!(m[1], [0.0, 1.0, 0.0]);
        assert_eq!(m[2], [0.0, 0.0, 1.0]);
    }

    #[test]
    fn rejects_bad_vectors() {
        assert!(similarity_matrix(&[vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(similarity_matrix(&[vec![f64::NAN]]).is_err());
    }

    #[test]
    fn reports_non_convergence() {
        let sim = vec![vec![1.0, 1.0, 1.0], vec![1.0, 1.0, 0.0], vec![1.0, 0.0, 1.0]];
        let c = centrality(
            &sim,
            &PowerIteration {
                tolerance: 1e-15,
                max_iterations: 2,
                ..Default::default()
            },
        );
        assert!(!c.converged);
        assert_eq!(c.iterations, 2);
    }
}
