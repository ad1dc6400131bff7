//! Synthetic benchmark instances: clustered waiting locations, bimodal
//! reveal-time profiles and short time windows.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Capacity, Instance, InstanceParts, ModelError, PotentialRequest, Time};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeneratorError {
    #[error("need {needed} points, the point set has {available}")]
    InsufficientPoints { needed: usize, available: usize },
    #[error("invalid generator configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Where the travel times between candidate locations come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PointSource {
    /// `count` points uniform in a `side`×`side` square; travel time is the
    /// rounded Euclidean distance times a factor drawn per ordered pair
    /// from `[1 − jitter, 1 + jitter]`, at least 1 between distinct points.
    Uniform {
        count: usize,
        side: f64,
        jitter: f64,
        seed: u64,
    },
    /// A user-supplied row-major `size`×`size` travel matrix.
    Matrix { size: usize, travel: Vec<Time> },
}

impl Default for PointSource {
    fn default() -> Self {
        PointSource::Uniform {
            count: 255,
            side: 20.0,
            jitter: 0.1,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorConfig {
    pub customers: usize,
    /// Number of separated waiting vertices; `None` waits at the customers
    /// themselves (W = C).
    pub waiting: Option<usize>,
    pub seed: u64,
    pub points: PointSource,
    pub fleet: usize,
    /// `None` is unbounded.
    pub capacity: Option<u32>,
    pub slots: usize,
    pub slot_len: Time,
    /// Window lengths to draw from, in minutes.
    pub deltas: Vec<Time>,
    pub tw_multiplier: Time,
    pub max_demand: u32,
    pub service: Time,
    /// Standard deviation of the reveal-slot normals, in slots.
    pub sigma: f64,
    pub draws_per_mode: usize,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            customers: 10,
            waiting: Some(5),
            seed: 1,
            points: PointSource::default(),
            fleet: 2,
            capacity: None,
            slots: 96,
            slot_len: 5,
            deltas: vec![5, 10, 15, 20],
            tw_multiplier: 1,
            max_demand: 2,
            service: 5,
            sigma: 8.0,
            draws_per_mode: 100,
        }
    }
}

impl GeneratorConfig {
    pub fn horizon(&self) -> Time {
        self.slots as Time * self.slot_len
    }

    fn validate(&self) -> Result<(), GeneratorError> {
        let bad = |m: &str| Err(GeneratorError::InvalidConfig(m.to_string()));
        if self.customers == 0 {
            return bad("at least one customer is needed");
        }
        if self.waiting == Some(0) {
            return bad("at least one waiting vertex is needed");
        }
        if self.fleet == 0 {
            return bad("fleet must be positive");
        }
        if self.slots == 0 || self.slot_len < 1 {
            return bad("slots and slot length must be positive");
        }
        if self.deltas.is_empty() || self.deltas.iter().any(|&d| d < 1) || self.tw_multiplier < 1 {
            return bad("window lengths must be positive");
        }
        if self.capacity.is_some_and(|q| q < self.max_demand) {
            return bad("capacity below the largest demand");
        }
        if !(self.sigma > 0.0) || self.service < 0 {
            return bad("sigma must be positive and service non-negative");
        }
        Ok(())
    }
}

/// Travel-time matrix of the candidate locations.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    pub size: usize,
    pub travel: Vec<Time>,
}

impl PointSet {
    pub fn build(source: &PointSource) -> Result<Self, GeneratorError> {
        match source {
            PointSource::Uniform {
                count,
                side,
                jitter,
                seed,
            } => {
                if !(*side > 0.0) || !(0.0..1.0).contains(jitter) {
                    return Err(GeneratorError::InvalidConfig(
                        "side must be positive, jitter in [0, 1)".into(),
                    ));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let xy: Vec<(f64, f64)> = (0..*count)
                    .map(|_| (rng.random::<f64>() * side, rng.random::<f64>() * side))
                    .collect();
                let mut travel = vec![0; count * count];
                for i in 0..*count {
                    for j in 0..*count {
                        if i == j {
                            continue;
                        }
                        let e = ((xy[i].0 - xy[j].0).powi(2) + (xy[i].1 - xy[j].1).powi(2)).sqrt();
                        let factor = 1.0 + jitter * (2.0 * rng.random::<f64>() - 1.0);
                        travel[i * count + j] = ((e * factor).round() as Time).max(1);
                    }
                }
                Ok(Self { size: *count, travel })
            }
            PointSource::Matrix { size, travel } => {
                if travel.len() != size * size || travel.iter().any(|&t| t < 0) {
                    return Err(GeneratorError::InvalidConfig(
                        "travel matrix must be size² non-negative entries".into(),
                    ));
                }
                Ok(Self {
                    size: *size,
                    travel: travel.clone(),
                })
            }
        }
    }

    pub fn travel(&self, i: usize, j: usize) -> Time {
        self.travel[i * self.size + j]
    }

    fn symmetric(&self, i: usize, j: usize) -> Time {
        self.travel(i, j).min(self.travel(j, i))
    }
}

/// Member of `cluster` with the smallest total symmetric distance to the
/// other members (lowest index on ties).
fn median(points: &PointSet, cluster: &[usize]) -> usize {
    *cluster
        .iter()
        .min_by_key(|&&i| (cluster.iter().map(|&j| points.symmetric(i, j)).sum::<Time>(), i))
        .expect("non-empty cluster")
}

/// Partitions `candidates` into `k` clusters by alternating nearest-center
/// assignment and median update (k-means on the symmetric distance, with
/// centers restricted to points), and returns the cluster medians.
pub fn cluster_medians<R: Rng>(points: &PointSet, candidates: &[usize], k: usize, rng: &mut R) -> Vec<usize> {
    let mut centers: Vec<usize> = candidates.choose_multiple(rng, k).copied().collect();
    centers.sort_unstable();
    for _ in 0..100 {
        let mut clusters = vec![Vec::new(); centers.len()];
        for &p in candidates {
            let nearest = (0..centers.len())
                .min_by_key(|&c| (points.symmetric(p, centers[c]), c))
                .expect("k >= 1");
            clusters[nearest].push(p);
        }
        let mut next: Vec<usize> = clusters
            .iter()
            .zip(&centers)
            .map(|(members, &c)| if members.is_empty() { c } else { median(points, members) })
            .collect();
        next.sort_unstable();
        next.dedup();
        if next == centers {
            break;
        }
        centers = next;
    }
    centers
}

/// Reveal probability per slot (index 0 is slot 1): two integer modes
/// uniform in the slot range, `draws` rounded normal draws around each,
/// `p = min(1, count/draws)`.
pub fn slot_probabilities<R: Rng>(rng: &mut R, slots: usize, sigma: f64, draws: usize) -> Vec<f64> {
    let mut nb = vec![0usize; slots];
    let modes = [rng.random_range(1..=slots), rng.random_range(1..=slots)];
    for mu in modes {
        let normal = Normal::new(mu as f64, sigma).expect("positive sigma");
        for _ in 0..draws {
            let v = normal.sample(rng).round();
            if v >= 1.0 && v <= slots as f64 {
                nb[v as usize - 1] += 1;
            }
        }
    }
    nb.iter().map(|&c| (c as f64 / draws as f64).min(1.0)).collect()
}

/// Builds an instance. The depot and the customers are the first `1 + n`
/// points of a seeded permutation, so instances with the same seed share
/// their customers whatever the waiting-vertex mode. Separated waiting
/// vertices are the cluster medians of the remaining points.
pub fn generate_instance(cfg: &GeneratorConfig) -> Result<Instance, GeneratorError> {
    cfg.validate()?;
    let points = PointSet::build(&cfg.points)?;
    let n = cfg.customers;
    let needed = 1 + n + cfg.waiting.unwrap_or(0);
    if needed > points.size {
        return Err(GeneratorError::InsufficientPoints {
            needed,
            available: points.size,
        });
    }
    // independent streams keep the customers and their requests identical
    // across waiting-vertex modes
    let stream = |k| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(k);
        rng
    };
    let mut order: Vec<usize> = (0..points.size).collect();
    order.shuffle(&mut stream(0));
    let depot = order[0];
    let customers = &order[1..=n];
    let waiting: Vec<usize> = match cfg.waiting {
        Some(m) => {
            let mut rest = order[n + 1..].to_vec();
            rest.sort_unstable();
            cluster_medians(&points, &rest, m, &mut stream(1))
        }
        None => customers.to_vec(),
    };
    let m = waiting.len();

    let located: Vec<usize> = std::iter::once(depot)
        .chain(waiting.iter().copied())
        .chain(customers.iter().copied())
        .collect();
    let nv = located.len();
    let mut travel = vec![0; nv * nv];
    for i in 0..nv {
        for j in 0..nv {
            if i != j {
                travel[i * nv + j] = points.travel(located[i], located[j]);
            }
        }
    }

    let h = cfg.horizon();
    let mut rng = stream(2);
    let mut requests = Vec::new();
    for c in 0..n {
        let probs = slot_probabilities(&mut rng, cfg.slots, cfg.sigma, cfg.draws_per_mode);
        for (slot, &p) in probs.iter().enumerate() {
            if p <= 0.0 {
                continue;
            }
            let reveal = (slot as Time + 1) * cfg.slot_len;
            let delta = *cfg.deltas.choose(&mut rng).expect("non-empty");
            let demand = rng.random_range(0..=cfg.max_demand);
            requests.push(PotentialRequest {
                id: requests.len(),
                customer: 1 + m + c,
                reveal,
                probability: p,
                demand,
                service: cfg.service,
                tw_start: reveal,
                tw_end: (reveal + delta * cfg.tw_multiplier - 1).min(h),
            });
        }
    }

    Ok(Instance::new(InstanceParts {
        waiting_count: m,
        customer_count: n,
        horizon: h,
        fleet: cfg.fleet,
        capacity: cfg.capacity.map_or(Capacity::Unbounded, Capacity::Bounded),
        travel,
        requests,
    })?)
}
