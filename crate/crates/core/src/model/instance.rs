use serde::{Deserialize, Serialize};

use super::ModelError;

/// Discrete time unit. All temporal data is integral at every scale.
pub type Time = i64;
/// Vertex index: `0` is the depot, `1..=m` waiting vertices, `m+1..=m+n` customers.
pub type Vertex = usize;
/// Dense request index, equal to the position in [`Instance::requests`].
pub type RequestId = usize;

pub const DEPOT: Vertex = 0;

/// Vehicle capacity. Unbounded fleets collapse the load dimension to a
/// single bucket in the expectation engines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Capacity {
    Bounded(u32),
    Unbounded,
}

impl Capacity {
    /// Number of distinct load values tracked by the engines.
    pub fn load_levels(self) -> usize {
        match self {
            Capacity::Bounded(q) => q as usize + 1,
            Capacity::Unbounded => 1,
        }
    }

    /// Load increment charged for `demand` (zero when unbounded).
    #[inline]
    pub fn charge(self, demand: u32) -> usize {
        match self {
            Capacity::Bounded(_) => demand as usize,
            Capacity::Unbounded => 0,
        }
    }

    #[inline]
    pub fn admits(self, load: usize, demand: u32) -> bool {
        match self {
            Capacity::Bounded(q) => load + demand as usize <= q as usize,
            Capacity::Unbounded => true,
        }
    }

    pub fn is_bounded(self) -> bool {
        matches!(self, Capacity::Bounded(_))
    }
}

/// A customer/reveal-time pair with its deterministic attributes.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialRequest {
    pub id: RequestId,
    pub customer: Vertex,
    pub reveal: Time,
    pub probability: f64,
    pub demand: u32,
    pub service: Time,
    pub tw_start: Time,
    pub tw_end: Time,
}

/// Immutable problem data.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    waiting_count: usize,
    customer_count: usize,
    horizon: Time,
    fleet: usize,
    capacity: Capacity,
    travel: Vec<Time>,
    requests: Vec<PotentialRequest>,
    order: Vec<RequestId>,
    rank: Vec<usize>,
}

/// Raw fields of an instance before validation.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceParts {
    pub waiting_count: usize,
    pub customer_count: usize,
    pub horizon: Time,
    pub fleet: usize,
    pub capacity: Capacity,
    /// Row-major `(1+m+n)^2` travel-time matrix.
    pub travel: Vec<Time>,
    pub requests: Vec<PotentialRequest>,
}

impl Instance {
    /// Builds an instance and checks every data invariant.
    pub fn new(parts: InstanceParts) -> Result<Self, ModelError> {
        let instance = Self::new_relaxed(parts)?;
        for r in &instance.requests {
            if !(r.reveal <= r.tw_start && r.tw_start <= r.tw_end && r.tw_end <= instance.horizon) {
                return Err(ModelError::InvalidRequest {
                    request: r.id,
                    reason: "requires reveal <= tw_start <= tw_end <= horizon".into(),
                });
            }
            if let Capacity::Bounded(q) = instance.capacity {
                if r.demand > q {
                    return Err(ModelError::InvalidRequest {
                        request: r.id,
                        reason: format!("demand {} exceeds capacity {q}", r.demand),
                    });
                }
            }
        }
        let mut seen = std::collections::HashSet::new();
        for r in &instance.requests {
            if !seen.insert((r.customer, r.reveal)) {
                return Err(ModelError::InvalidRequest {
                    request: r.id,
                    reason: "duplicate (customer, reveal) pair".into(),
                });
            }
        }
        Ok(instance)
    }

    /// Structural checks only. Rescaled problems may contain requests whose
    /// window became empty, which is legal there.
    pub fn new_relaxed(parts: InstanceParts) -> Result<Self, ModelError> {
        let InstanceParts {
            waiting_count,
            customer_count,
            horizon,
            fleet,
            capacity,
            travel,
            requests,
        } = parts;
        let nv = 1 + waiting_count + customer_count;
        if travel.len() != nv * nv {
            return Err(ModelError::TravelMatrixSize {
                expected: nv * nv,
                found: travel.len(),
            });
        }
        if horizon < 1 {
            return Err(ModelError::InvalidParameter("horizon must be >= 1".into()));
        }
        if fleet < 1 {
            return Err(ModelError::InvalidParameter("fleet size must be >= 1".into()));
        }
        for i in 0..nv {
            if travel[i * nv + i] != 0 {
                return Err(ModelError::InvalidTravel {
                    from: i,
                    to: i,
                    value: travel[i * nv + i],
                });
            }
            for j in 0..nv {
                if travel[i * nv + j] < 0 {
                    return Err(ModelError::InvalidTravel {
                        from: i,
                        to: j,
                        value: travel[i * nv + j],
                    });
                }
            }
        }
        for (idx, r) in requests.iter().enumerate() {
            if r.id != idx {
                return Err(ModelError::InvalidRequest {
                    request: idx,
                    reason: format!("id {} is not its index", r.id),
                });
            }
            if r.customer <= waiting_count || r.customer > waiting_count + customer_count {
                return Err(ModelError::InvalidRequest {
                    request: idx,
                    reason: format!("customer vertex {} out of range", r.customer),
                });
            }
            if !(0.0..=1.0).contains(&r.probability) {
                return Err(ModelError::InvalidRequest {
                    request: idx,
                    reason: format!("probability {} outside [0,1]", r.probability),
                });
            }
            if r.reveal < 1 || r.service < 0 {
                return Err(ModelError::InvalidRequest {
                    request: idx,
                    reason: "reveal must be >= 1 and service >= 0".into(),
                });
            }
        }
        let order = super::order::order_requests(&requests);
        let mut rank = vec![0; requests.len()];
        for (pos, &id) in order.iter().enumerate() {
            rank[id] = pos;
        }
        Ok(Self {
            waiting_count,
            customer_count,
            horizon,
            fleet,
            capacity,
            travel,
            requests,
            order,
            rank,
        })
    }

    pub fn parts(&self) -> InstanceParts {
        InstanceParts {
            waiting_count: self.waiting_count,
            customer_count: self.customer_count,
            horizon: self.horizon,
            fleet: self.fleet,
            capacity: self.capacity,
            travel: self.travel.clone(),
            requests: self.requests.clone(),
        }
    }

    #[inline]
    pub fn waiting_count(&self) -> usize {
        self.waiting_count
    }

    #[inline]
    pub fn customer_count(&self) -> usize {
        self.customer_count
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        1 + self.waiting_count + self.customer_count
    }

    #[inline]
    pub fn horizon(&self) -> Time {
        self.horizon
    }

    #[inline]
    pub fn fleet(&self) -> usize {
        self.fleet
    }

    #[inline]
    pub fn capacity(&self) -> Capacity {
        self.capacity
    }

    pub fn waiting_vertices(&self) -> std::ops::RangeInclusive<Vertex> {
        1..=self.waiting_count
    }

    pub fn is_waiting_vertex(&self, v: Vertex) -> bool {
        v >= 1 && v <= self.waiting_count
    }

    #[inline]
    pub fn travel(&self, from: Vertex, to: Vertex) -> Time {
        self.travel[from * self.vertex_count() + to]
    }

    pub fn travel_matrix(&self) -> &[Time] {
        &self.travel
    }

    #[inline]
    pub fn requests(&self) -> &[PotentialRequest] {
        &self.requests
    }

    #[inline]
    pub fn request(&self, id: RequestId) -> &PotentialRequest {
        &self.requests[id]
    }

    /// Request ids sorted by the request order.
    #[inline]
    pub fn order(&self) -> &[RequestId] {
        &self.order
    }

    /// Position of a request in the request order.
    #[inline]
    pub fn rank(&self, id: RequestId) -> usize {
        self.rank[id]
    }

    /// Expected number of revealed requests.
    pub fn expected_requests(&self) -> f64 {
        self.requests.iter().map(|r| r.probability).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parts() -> InstanceParts {
        InstanceParts {
            waiting_count: 1,
            customer_count: 1,
            horizon: 20,
            fleet: 1,
            capacity: Capacity::Bounded(2),
            travel: vec![0, 2, 3, 2, 0, 1, 3, 1, 0],
            requests: vec![PotentialRequest {
                id: 0,
                customer: 2,
                reveal: 3,
                probability: 0.5,
                demand: 1,
                service: 1,
                tw_start: 3,
                tw_end: 8,
            }],
        }
    }

    #[test]
    fn accepts_valid_instance() {
        let inst = Instance::new(parts()).unwrap();
        assert_eq!(inst.vertex_count(), 3);
        assert_eq!(inst.travel(0, 2), 3);
        assert_eq!(inst.order(), &[0]);
    }

    #[test]
    fn rejects_window_before_reveal() {
        let mut p = parts();
        p.requests[0].tw_start = 2;
        assert!(matches!(Instance::new(p), Err(ModelError::InvalidRequest { .. })));
    }

    #[test]
    fn rejects_nonzero_diagonal_and_customer_out_of_range() {
        let mut p = parts();
        p.travel[4] = 1;
        assert!(matches!(Instance::new(p), Err(ModelError::InvalidTravel { .. })));
        let mut p = parts();
        p.requests[0].customer = 1;
        assert!(Instance::new(p).is_err());
    }

    #[test]
    fn rejects_demand_above_capacity_but_relaxed_keeps_empty_windows() {
        let mut p = parts();
        p.requests[0].demand = 3;
        assert!(Instance::new(p).is_err());
        let mut p = parts();
        p.requests[0].tw_start = 9;
        p.requests[0].tw_end = 8;
        assert!(Instance::new(p.clone()).is_err());
        assert!(Instance::new_relaxed(p).is_ok());
    }

    #[test]
    fn rejects_duplicate_customer_reveal_pairs() {
        let mut p = parts();
        let mut dup = p.requests[0].clone();
        dup.id = 1;
        p.requests.push(dup);
        assert!(Instance::new(p).is_err());
    }
}
