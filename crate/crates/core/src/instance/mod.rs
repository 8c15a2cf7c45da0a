//! Problem data: clients, facilities, metric, capacities, opening costs, k.

mod gen;
mod io;
mod solution;

pub use gen::{gen_instance, gen_random, gen_ring, CapacityMode, CostMode, Layout};
pub use io::{load_instance, save_instance};
pub use solution::{eval_solution, IntegralSolution, SolutionStats};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use std::cmp::Ordering;

pub const TRIANGLE_TOLERANCE: f64 = 1e-9;

/// An instance of capacitated k-facility location (k-median when every
/// opening cost is zero).
///
/// Points are indexed clients first: client `j` is point `j`, facility `i` is
/// point `n_clients + i`. Client and facility indices follow ascending file id,
/// so "lower index" and "lower id" coincide in every tie-break.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub client_ids: Vec<u64>,
    pub facility_ids: Vec<u64>,
    pub capacities: Vec<u64>,
    pub opening_costs: Vec<Rational>,
    pub k: usize,
    /// Planar coordinates when the metric is Euclidean.
    pub coords: Option<Vec<(f64, f64)>>,
    dist: Vec<f64>,
    dist_q: Vec<Rational>,
}

impl Instance {
    /// Builds and validates an instance from an explicit point-to-point matrix
    /// (row-major over `n_clients + n_facilities` points).
    pub fn from_matrix(
        client_ids: Vec<u64>,
        facility_ids: Vec<u64>,
        capacities: Vec<u64>,
        opening_costs: Vec<Rational>,
        k: usize,
        dist: Vec<f64>,
    ) -> Result<Self> {
        let inst = Self::assemble(client_ids, facility_ids, capacities, opening_costs, k, None, dist)?;
        inst.check_metric()?;
        Ok(inst)
    }

    /// Builds an instance from planar points with the Euclidean metric.
    pub fn from_points(
        client_ids: Vec<u64>,
        facility_ids: Vec<u64>,
        capacities: Vec<u64>,
        opening_costs: Vec<Rational>,
        k: usize,
        coords: Vec<(f64, f64)>,
    ) -> Result<Self> {
        let p = coords.len();
        let mut dist = vec![0.0; p * p];
        for a in 0..p {
            for b in 0..p {
                let (dx, dy) = (coords[a].0 - coords[b].0, coords[a].1 - coords[b].1);
                dist[a * p + b] = dx.hypot(dy);
            }
        }
        Self::assemble(client_ids, facility_ids, capacities, opening_costs, k, Some(coords), dist)
    }

    fn assemble(
        client_ids: Vec<u64>,
        facility_ids: Vec<u64>,
        capacities: Vec<u64>,
        opening_costs: Vec<Rational>,
        k: usize,
        coords: Option<Vec<(f64, f64)>>,
        dist: Vec<f64>,
    ) -> Result<Self> {
        let (n, m) = (client_ids.len(), facility_ids.len());
        let p = n + m;
        if capacities.len() != m || opening_costs.len() != m {
            return Err(Error::Dimension(format!(
                "{m} facilities but {} capacities and {} opening costs",
                capacities.len(),
                opening_costs.len()
            )));
        }
        if dist.len() != p * p {
            return Err(Error::Dimension(format!("distance matrix has {} entries, expected {}", dist.len(), p * p)));
        }
        if coords.as_ref().is_some_and(|c| c.len() != p) {
            return Err(Error::Dimension("coordinate count differs from point count".into()));
        }
        if n == 0 {
            return Err(Error::Validation("no clients".into()));
        }
        if m == 0 {
            return Err(Error::Validation("no facilities".into()));
        }
        if k == 0 {
            return Err(Error::Validation("k must be positive".into()));
        }
        if k > m {
            return Err(Error::Validation(format!("k = {k} exceeds the {m} facilities")));
        }
        if let Some(i) = capacities.iter().position(|&u| u < 1) {
            return Err(Error::Validation(format!("facility {} has capacity < 1", facility_ids[i])));
        }
        if let Some(i) = opening_costs.iter().position(|f| *f < rational::zero()) {
            return Err(Error::Validation(format!("facility {} has a negative opening cost", facility_ids[i])));
        }
        for ids in [&client_ids, &facility_ids] {
            if ids.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Validation("ids must be distinct".into()));
            }
        }
        if dist.iter().any(|d| !d.is_finite() || *d < 0.0) {
            return Err(Error::Validation("distances must be finite and nonnegative".into()));
        }
        let dist_q = dist.iter().map(|&d| rational::from_f64(d)).collect();
        Ok(Self { client_ids, facility_ids, capacities, opening_costs, k, coords, dist, dist_q })
    }

    fn check_metric(&self) -> Result<()> {
        let p = self.n_points();
        for a in 0..p {
            if self.dist[a * p + a] != 0.0 {
                return Err(Error::Validation(format!("nonzero self-distance at point {a}")));
            }
            for b in 0..p {
                if self.dist[a * p + b] != self.dist[b * p + a] {
                    return Err(Error::Validation(format!("asymmetric distance between points {a} and {b}")));
                }
            }
        }
        for a in 0..p {
            for b in 0..p {
                let ab = self.dist[a * p + b];
                for c in 0..p {
                    let slack = ab + self.dist[b * p + c] - self.dist[a * p + c];
                    if slack < -TRIANGLE_TOLERANCE {
                        return Err(Error::Validation(format!(
                            "triangle inequality violated by {:.3e} on points ({a}, {b}, {c})",
                            -slack
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n_clients(&self) -> usize {
        self.client_ids.len()
    }

    pub fn n_facilities(&self) -> usize {
        self.facility_ids.len()
    }

    pub fn n_points(&self) -> usize {
        self.client_ids.len() + self.facility_ids.len()
    }

    pub fn client_point(&self, j: usize) -> usize {
        j
    }

    pub fn facility_point(&self, i: usize) -> usize {
        self.n_clients() + i
    }

    pub fn point_dist(&self, a: usize, b: usize) -> f64 {
        self.dist[a * self.n_points() + b]
    }

    pub fn point_dist_q(&self, a: usize, b: usize) -> &Rational {
        &self.dist_q[a * self.n_points() + b]
    }

    /// Facility-to-client distance.
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.point_dist(self.facility_point(i), j)
    }

    pub fn dq(&self, i: usize, j: usize) -> &Rational {
        self.point_dist_q(self.facility_point(i), j)
    }

    pub fn d_cc(&self, a: usize, b: usize) -> f64 {
        self.point_dist(a, b)
    }

    pub fn dq_cc(&self, a: usize, b: usize) -> &Rational {
        self.point_dist_q(a, b)
    }

    pub fn d_ff(&self, a: usize, b: usize) -> f64 {
        self.point_dist(self.facility_point(a), self.facility_point(b))
    }

    pub fn dq_ff(&self, a: usize, b: usize) -> &Rational {
        self.point_dist_q(self.facility_point(a), self.facility_point(b))
    }

    pub fn capacity_q(&self, i: usize) -> Rational {
        rational::int(self.capacities[i] as i64)
    }

    /// `Some(u)` when every facility has capacity `u`.
    pub fn uniform_capacity(&self) -> Option<u64> {
        let u = self.capacities[0];
        self.capacities.iter().all(|&c| c == u).then_some(u)
    }

    pub fn is_k_median(&self) -> bool {
        self.opening_costs.iter().all(|f| *f == rational::zero())
    }

    /// Largest total capacity of any k facilities.
    pub fn top_k_capacity(&self) -> u64 {
        let mut caps = self.capacities.clone();
        caps.sort_unstable_by(|a, b| b.cmp(a));
        caps.iter().take(self.k).sum()
    }

    /// Facilities ordered by distance to client `j`, ties to the lower index.
    pub fn facilities_by_distance(&self, j: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.n_facilities()).collect();
        order.sort_by(|&a, &b| cmp_dist(self.d(a, j), a, self.d(b, j), b));
        order
    }
}

/// Orders `(distance, index)` pairs: nearer first, then lower index.
pub fn cmp_dist(da: f64, a: usize, db: f64, b: usize) -> Ordering {
    da.total_cmp(&db).then(a.cmp(&b))
}

/// Key for an undirected pair `{a, b}` at distance `d`, so that nearest
/// neighbor choices over pairs are totally ordered.
pub fn pair_key(d: f64, a: usize, b: usize) -> (f64, usize, usize) {
    (d, a.min(b), a.max(b))
}

pub fn cmp_pair_key(x: (f64, usize, usize), y: (f64, usize, usize)) -> Ordering {
    x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zeros(m: usize) -> Vec<Rational> {
        vec![rational::zero(); m]
    }

    #[test]
    fn rejects_broken_triangle() {
        // Points a, b, c with d(a,c) = 3 > d(a,b) + d(b,c) = 2.
        let d = vec![
            0.0, 1.0, 3.0, //
            1.0, 0.0, 1.0, //
            3.0, 1.0, 0.0,
        ];
        let err = Instance::from_matrix(vec![0, 1], vec![0], vec![1], zeros(1), 1, d).unwrap_err();
        assert!(matches!(err, Error::Validation(msg) if msg.contains("triangle")));
    }

    #[test]
    fn rejects_zero_capacity_and_large_k() {
        let pts = vec![(0.0, 0.0), (1.0, 0.0)];
        assert!(Instance::from_points(vec![0], vec![0], vec![0], zeros(1), 1, pts.clone()).is_err());
        assert!(Instance::from_points(vec![0], vec![0], vec![1], zeros(1), 2, pts).is_err());
    }

    #[test]
    fn nearest_order_breaks_ties_by_index() {
        let pts = vec![(0.0, 0.0), (1.0, 0.0), (-1.0, 0.0), (0.5, 0.0)];
        let inst = Instance::from_points(vec![0], vec![0, 1, 2], vec![1; 3], zeros(3), 1, pts).unwrap();
        assert_eq!(inst.facilities_by_distance(0), vec![2, 0, 1]);
    }
}
