//! Seeded synthetic graph generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Attempts made by the random sensor generator to draw a connected graph.
pub const SENSOR_MAX_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    /// Points uniform in the unit square, symmetrized k-nearest-neighbor
    /// graph with Gaussian weights `exp(-d² / (2σ²))`, `σ` the mean k-NN
    /// distance. Redrawn until connected.
    RandomSensor { n: usize, k_neighbors: usize },
    /// Consecutive blocks of the given sizes; each pair is joined with
    /// probability `p_in` inside a block and `p_out` across blocks.
    Community {
        cluster_sizes: Vec<usize>,
        p_in: f64,
        p_out: f64,
    },
    Path { n: usize },
    Cycle { n: usize },
    Complete { n: usize },
}

impl GeneratorSpec {
    pub fn node_count(&self) -> usize {
        match self {
            Self::RandomSensor { n, .. } | Self::Path { n } | Self::Cycle { n } | Self::Complete { n } => *n,
            Self::Community { cluster_sizes, .. } => cluster_sizes.iter().sum(),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        match self {
            Self::RandomSensor { n, k_neighbors } => {
                if *n < 2 || *k_neighbors == 0 || k_neighbors >= n {
                    return bad(format!("random sensor needs n >= 2 and 1 <= k < n (n={n}, k={k_neighbors})"));
                }
            }
            Self::Community {
                cluster_sizes,
                p_in,
                p_out,
            } => {
                if cluster_sizes.is_empty() || cluster_sizes.contains(&0) {
                    return bad("cluster sizes must be positive".into());
                }
                for p in [p_in, p_out] {
                    if !(0.0..=1.0).contains(p) {
                        return bad(format!("probability {p} outside [0, 1]"));
                    }
                }
            }
            Self::Path { n } | Self::Complete { n } => {
                if *n == 0 {
                    return bad("n must be positive".into());
                }
            }
            Self::Cycle { n } => {
                if *n < 3 {
                    return bad("a cycle needs at least 3 nodes".into());
                }
            }
        }
        Ok(())
    }

    /// Block label of every node for community graphs.
    pub fn cluster_labels(&self) -> Option<Vec<usize>> {
        match self {
            Self::Community { cluster_sizes, .. } => Some(
                cluster_sizes
                    .iter()
                    .enumerate()
                    .flat_map(|(c, &s)| std::iter::repeat_n(c, s))
                    .collect(),
            ),
            _ => None,
        }
    }
}

/// Generates a graph; random kinds are fully determined by `seed`.
pub fn gen_graph(spec: &GeneratorSpec, seed: u64) -> Result<Graph> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match spec {
        GeneratorSpec::Path { n } => Graph::new(*n, (1..*n).map(|i| (i - 1, i, 1.0))),
        GeneratorSpec::Cycle { n } => Graph::new(*n, (0..*n).map(|i| (i, (i + 1) % n, 1.0))),
        GeneratorSpec::Complete { n } => {
            Graph::new(*n, (0..*n).flat_map(|i| (i + 1..*n).map(move |j| (i, j, 1.0))))
        }
        GeneratorSpec::Community {
            cluster_sizes,
            p_in,
            p_out,
        } => {
            let labels = spec.cluster_labels().expect("community spec");
            let n: usize = cluster_sizes.iter().sum();
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    let p = if labels[i] == labels[j] { *p_in } else { *p_out };
                    if rng.random::<f64>() < p {
                        edges.push((i, j, 1.0));
                    }
                }
            }
            Graph::new(n, edges)
        }
        GeneratorSpec::RandomSensor { n, k_neighbors } => {
            for _ in 0..SENSOR_MAX_ATTEMPTS {
                let g = random_sensor(*n, *k_neighbors, &mut rng)?;
                if g.is_connected() {
                    return Ok(g);
                }
            }
            Err(Error::InvalidSpec(format!(
                "no connected random sensor graph in {SENSOR_MAX_ATTEMPTS} draws"
            )))
        }
    }
}

fn random_sensor(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Result<Graph> {
    let points: Vec<(f64, f64)> = (0..n).map(|_| (rng.random::<f64>(), rng.random::<f64>())).collect();
    let dist = |a: usize, b: usize| {
        let (dx, dy) = (points[a].0 - points[b].0, points[a].1 - points[b].1);
        (dx * dx + dy * dy).sqrt()
    };
    let mut knn: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut others: Vec<(usize, f64)> = (0..n).filter(|&j| j != i).map(|j| (j, dist(i, j))).collect();
        others.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        others.truncate(k);
        knn.push(others);
    }
    let sigma = knn.iter().flatten().map(|(_, d)| d).sum::<f64>() / (n * k) as f64;
    let mut pairs: Vec<(usize, usize, f64)> = knn
        .iter()
        .enumerate()
        .flat_map(|(i, nb)| nb.iter().map(move |&(j, d)| (i.min(j), i.max(j), d)))
        .collect();
    pairs.sort_by_key(|p| (p.0, p.1));
    pairs.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);
    Graph::new(
        n,
        pairs
            .into_iter()
            .map(|(i, j, d)| (i, j, (-d * d / (2.0 * sigma * sigma)).exp())),
    )
}
