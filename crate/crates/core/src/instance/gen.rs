use super::Instance;
use crate::error::{Error, Result};
use crate::lp::FractionalSolution;
use crate::rational::{self, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapacityMode {
    Uniform(u64),
    /// Each capacity drawn uniformly from `lo..=hi`.
    Nonuniform { lo: u64, hi: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostMode {
    Zero,
    /// Opening costs drawn in whole cents from `[lo, hi]`.
    Range { lo: u64, hi: u64 },
}

/// Where points are placed in the unit square.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Layout {
    Uniform,
    /// `clusters` centers drawn uniformly; facility `i` sits near center
    /// `i mod clusters`, each client near a random center, offsets uniform in
    /// a square of side `spread`.
    Clustered { clusters: usize, spread: f64 },
}

const MAX_RESAMPLES: usize = 10_000;

/// Random Euclidean instance with uniformly placed points.
pub fn gen_random(
    n_clients: usize,
    n_facilities: usize,
    k: usize,
    capacity: CapacityMode,
    cost: CostMode,
    seed: u64,
) -> Result<Instance> {
    gen_instance(n_clients, n_facilities, k, Layout::Uniform, capacity, cost, seed)
}

/// Random Euclidean instance.
///
/// Capacities are resampled until some k facilities can serve every client.
pub fn gen_instance(
    n_clients: usize,
    n_facilities: usize,
    k: usize,
    layout: Layout,
    capacity: CapacityMode,
    cost: CostMode,
    seed: u64,
) -> Result<Instance> {
    if n_clients == 0 || n_facilities == 0 {
        return Err(Error::Validation("need at least one client and one facility".into()));
    }
    if k == 0 || k > n_facilities {
        return Err(Error::Validation(format!("k = {k} must lie in 1..={n_facilities}")));
    }
    let reach = match capacity {
        CapacityMode::Uniform(u) => {
            if u == 0 {
                return Err(Error::Validation("capacity must be positive".into()));
            }
            u
        }
        CapacityMode::Nonuniform { lo, hi } => {
            if lo == 0 || lo > hi {
                return Err(Error::Validation(format!("bad capacity range {lo}:{hi}")));
            }
            hi
        }
    };
    if (k as u64).saturating_mul(reach) < n_clients as u64 {
        return Err(Error::Validation(format!(
            "{k} facilities of capacity at most {reach} cannot serve {n_clients} clients"
        )));
    }
    if let CostMode::Range { lo, hi } = cost {
        if lo > hi {
            return Err(Error::Validation(format!("bad cost range {lo}:{hi}")));
        }
    }

    if let Layout::Clustered { clusters, spread } = layout {
        if clusters == 0 || !(spread.is_finite() && spread >= 0.0) {
            return Err(Error::Validation(format!("bad cluster layout {clusters}:{spread}")));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords: Vec<(f64, f64)> = match layout {
        Layout::Uniform => (0..n_clients + n_facilities)
            .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
            .collect(),
        Layout::Clustered { clusters, spread } => {
            let centers: Vec<(f64, f64)> =
                (0..clusters).map(|_| (rng.random::<f64>(), rng.random::<f64>())).collect();
            let near = |c: usize, rng: &mut ChaCha8Rng| {
                let (x, y) = centers[c];
                (x + spread * (rng.random::<f64>() - 0.5), y + spread * (rng.random::<f64>() - 0.5))
            };
            let mut coords = Vec::with_capacity(n_clients + n_facilities);
            for _ in 0..n_clients {
                let c = rng.random_range(0..clusters);
                coords.push(near(c, &mut rng));
            }
            for i in 0..n_facilities {
                coords.push(near(i % clusters, &mut rng));
            }
            coords
        }
    };
    let costs: Vec<Rational> = (0..n_facilities)
        .map(|_| match cost {
            CostMode::Zero => rational::zero(),
            CostMode::Range { lo, hi } => {
                let cents = rng.random_range(lo * 100..=hi * 100);
                rational::ratio(cents as i64, 100)
            }
        })
        .collect();
    let mut capacities = vec![0; n_facilities];
    for attempt in 0.. {
        for c in capacities.iter_mut() {
            *c = match capacity {
                CapacityMode::Uniform(u) => u,
                CapacityMode::Nonuniform { lo, hi } => rng.random_range(lo..=hi),
            };
        }
        let mut sorted = capacities.clone();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        if sorted.iter().take(k).sum::<u64>() >= n_clients as u64 {
            break;
        }
        if attempt == MAX_RESAMPLES {
            return Err(Error::Validation("capacity resampling did not reach a feasible instance".into()));
        }
    }
    Instance::from_points(
        (0..n_clients as u64).collect(),
        (0..n_facilities as u64).collect(),
        capacities,
        costs,
        k,
        coords,
    )
}

/// Ring of `k + 1` tight clusters with `k·t` clients and `per_cluster`
/// facilities each, uniform capacity `(k + 1)·t`, together with a feasible
/// fractional solution that opens volume `k/(k+1)` in every cluster. Clients
/// take `y_i` from each facility of their own cluster and `y_i/k` from each
/// facility of the next cluster on the ring.
pub fn gen_ring(k: usize, t: usize, per_cluster: usize, cost: CostMode, seed: u64) -> Result<(Instance, FractionalSolution)> {
    if k < 1 || t < 1 || per_cluster < 1 {
        return Err(Error::Validation("ring needs k, t and per_cluster at least 1".into()));
    }
    let clusters = k + 1;
    let (q, m) = (k * t, clusters * per_cluster);
    let n = clusters * q;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let step = std::f64::consts::TAU / clusters as f64;
    let centers: Vec<(f64, f64)> = (0..clusters)
        .map(|c| {
            let a = step * (c as f64 + 0.3 * (rng.random::<f64>() - 0.5));
            let r = 0.35 + 0.1 * rng.random::<f64>();
            (0.5 + r * a.cos(), 0.5 + r * a.sin())
        })
        .collect();
    let mut near = |c: usize| {
        let (x, y) = centers[c];
        (x + 0.02 * (rng.random::<f64>() - 0.5), y + 0.02 * (rng.random::<f64>() - 0.5))
    };
    let mut coords: Vec<(f64, f64)> = (0..n).map(|j| near(j / q)).collect();
    coords.extend((0..m).map(|i| near(i / per_cluster)));
    let costs: Vec<Rational> = (0..m)
        .map(|_| match cost {
            CostMode::Zero => rational::zero(),
            CostMode::Range { lo, hi } => rational::ratio(rng.random_range(lo * 100..=hi * 100) as i64, 100),
        })
        .collect();
    let vol = rational::ratio(k as i64, clusters as i64);
    let mut y = Vec::with_capacity(m);
    for _ in 0..clusters {
        let w: Vec<i64> = (0..per_cluster).map(|_| rng.random_range(1..=4)).collect();
        let total: i64 = w.iter().sum();
        y.extend(w.iter().map(|&wi| &vol * rational::ratio(wi, total)));
    }
    let kq = rational::int(k as i64);
    let x: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            let c = i / per_cluster;
            (0..n)
                .map(|j| {
                    let own = j / q;
                    if own == c {
                        y[i].clone()
                    } else if (own + 1) % clusters == c {
                        &y[i] / &kq
                    } else {
                        rational::zero()
                    }
                })
                .collect()
        })
        .collect();
    let inst = Instance::from_points(
        (0..n as u64).collect(),
        (0..m as u64).collect(),
        vec![(clusters * t) as u64; m],
        costs,
        k,
        coords,
    )?;
    let mut frac = FractionalSolution { x, y, value: rational::zero() };
    frac.value = frac.connection_cost(&inst) + frac.opening_cost(&inst);
    Ok((inst, frac))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton() {
        let inst = gen_random(1, 1, 1, CapacityMode::Uniform(1), CostMode::Zero, 42).unwrap();
        assert!(inst.d(0, 0) >= 0.0);
    }

    #[test]
    fn same_seed_same_instance() {
        let a = gen_random(10, 5, 2, CapacityMode::Uniform(6), CostMode::Zero, 7).unwrap();
        let b = gen_random(10, 5, 2, CapacityMode::Uniform(6), CostMode::Zero, 7).unwrap();
        assert_eq!(a, b);
        let c = gen_random(10, 5, 2, CapacityMode::Uniform(6), CostMode::Zero, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn nonuniform_capacities_stay_in_range_and_are_feasible() {
        for seed in 0..20 {
            let inst = gen_random(20, 8, 3, CapacityMode::Nonuniform { lo: 1, hi: 10 }, CostMode::Range { lo: 0, hi: 5 }, seed)
                .unwrap();
            assert!(inst.capacities.iter().all(|&u| (1..=10).contains(&u)));
            assert!(inst.top_k_capacity() >= 20);
            assert!(inst.opening_costs.iter().all(|f| *f >= rational::zero() && *f <= rational::int(5)));
        }
    }

    #[test]
    fn clustered_points_stay_near_their_centers() {
        let layout = Layout::Clustered { clusters: 3, spread: 0.0 };
        let inst = gen_instance(12, 6, 2, layout, CapacityMode::Uniform(8), CostMode::Zero, 3).unwrap();
        for i in 0..3 {
            assert_eq!(inst.d_ff(i, i + 3), 0.0);
        }
        for j in 0..12 {
            assert!((0..3).any(|i| inst.d(i, j) == 0.0));
        }
    }

    #[test]
    fn unsatisfiable_parameters_are_rejected() {
        assert!(gen_random(10, 5, 2, CapacityMode::Uniform(4), CostMode::Zero, 1).is_err());
        assert!(gen_random(10, 5, 6, CapacityMode::Uniform(4), CostMode::Zero, 1).is_err());
    }

    #[test]
    fn ring_witness_satisfies_every_row() {
        use crate::lp::{build_ckfl_lp, simplex::first_violated_row, x_var, y_var};
        for (k, t, per) in [(1, 1, 1), (4, 1, 2), (5, 1, 2), (3, 2, 3)] {
            let (inst, frac) = gen_ring(k, t, per, CostMode::Range { lo: 0, hi: 2 }, 9).unwrap();
            let lp = build_ckfl_lp(&inst);
            let mut v = vec![rational::zero(); lp.n_vars()];
            for i in 0..inst.n_facilities() {
                v[y_var(&inst, i)] = frac.y[i].clone();
                for j in 0..inst.n_clients() {
                    v[x_var(&inst, i, j)] = frac.x[i][j].clone();
                }
            }
            assert_eq!(first_violated_row(&lp, &v), None, "k {k} t {t} per {per}");
            assert_eq!(frac.volume(), rational::int(k as i64));
        }
    }
}
