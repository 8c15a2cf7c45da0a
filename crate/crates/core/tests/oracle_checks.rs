use capkm_core::lp::solve_ckfl;
use capkm_core::oracle::{exact_opt, min_cost_assignment, verify_solution};
use capkm_core::rational::{self, int, ratio, Rational};
use capkm_core::{eval_solution, gen_random, CapacityMode, CostMode, Instance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Cheapest way to send every client whole to one open facility with at most
/// `caps[p]` clients on `open[p]`, by trying all |open|^n maps.
fn enumerate_assignments(inst: &Instance, open: &[usize], caps: &[usize]) -> Option<Rational> {
    let n = inst.n_clients();
    let mut choice = vec![0usize; n];
    let mut best: Option<Rational> = None;
    loop {
        let mut load = vec![0usize; open.len()];
        for &c in &choice {
            load[c] += 1;
        }
        if load.iter().zip(caps).all(|(l, c)| l <= c) {
            let cost = (0..n).fold(rational::zero(), |a, j| a + inst.dq(open[choice[j]], j));
            if best.as_ref().is_none_or(|b| cost < *b) {
                best = Some(cost);
            }
        }
        let mut pos = 0;
        while pos < n {
            choice[pos] += 1;
            if choice[pos] < open.len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
        if pos == n {
            return best;
        }
    }
}

/// Minimum over open sets of size ≤ k of opening cost plus the enumerated
/// assignment cost at integral scale `gamma`.
fn brute_force_opt(inst: &Instance, gamma: usize) -> Option<Rational> {
    let m = inst.n_facilities();
    let mut best: Option<Rational> = None;
    for mask in 1u32..(1 << m) {
        if mask.count_ones() as usize > inst.k {
            continue;
        }
        let open: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
        let caps: Vec<usize> = open.iter().map(|&i| gamma * inst.capacities[i] as usize).collect();
        if let Some(c) = enumerate_assignments(inst, &open, &caps) {
            let total = c + open.iter().fold(rational::zero(), |a, &i| a + &inst.opening_costs[i]);
            if best.as_ref().is_none_or(|b| total < *b) {
                best = Some(total);
            }
        }
    }
    best
}

fn tiny(seed: u64, n: usize, m: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.random_range(1..=m.min(3));
    let cap = if rng.random_bool(0.5) {
        CapacityMode::Uniform(rng.random_range(n.div_ceil(k) as u64..=n as u64))
    } else {
        CapacityMode::Nonuniform { lo: 1, hi: n as u64 }
    };
    let cost = if rng.random_bool(0.5) { CostMode::Zero } else { CostMode::Range { lo: 0, hi: 2 } };
    gen_random(n, m, k, cap, cost, seed).unwrap()
}

#[test]
fn flow_matches_assignment_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut infeasible = 0;
    for seed in 0..40 {
        let inst = tiny(seed, 6, 5);
        let open: Vec<usize> = loop {
            let pick: Vec<usize> = (0..5).filter(|_| rng.random_bool(0.5)).collect();
            if !pick.is_empty() {
                break pick;
            }
        };
        for gamma in [1usize, 2] {
            let caps: Vec<usize> = open.iter().map(|&i| gamma * inst.capacities[i] as usize).collect();
            let expect = enumerate_assignments(&inst, &open, &caps);
            let got = min_cost_assignment(&inst, &open, &int(gamma as i64)).unwrap();
            match (expect, got) {
                (None, None) => infeasible += 1,
                (Some(e), Some(a)) => {
                    assert_eq!(a.cost, e, "seed {seed} gamma {gamma}");
                    for row in &a.assign {
                        assert!(row.iter().all(|(_, x)| rational::is_integral(x)));
                    }
                }
                (e, a) => panic!("seed {seed}: enumeration {e:?} vs flow {:?}", a.map(|a| a.cost)),
            }
        }
    }
    assert!(infeasible < 80);
}

#[test]
fn exact_optimum_matches_brute_force_and_bounds_the_lp() {
    for seed in 100..150 {
        let inst = tiny(seed, 6, 4);
        let exact = exact_opt(&inst, &int(1)).unwrap().expect("generator keeps the oracle feasible");
        assert_eq!(Some(exact.cost.clone()), brute_force_opt(&inst, 1), "seed {seed}");
        let lp = solve_ckfl(&inst).unwrap();
        assert!(lp.value <= exact.cost, "seed {seed}");

        let report = verify_solution(&inst, &exact.solution, inst.k, &int(1), Some(&exact.cost));
        assert!(report.passed(), "{:?}", report.findings);
        assert_eq!(eval_solution(&inst, &exact.solution).unwrap().total_cost(), exact.cost);
    }
}

#[test]
fn exact_optimum_is_monotone_in_scale_and_k() {
    for seed in 200..220 {
        let inst = tiny(seed, 6, 4);
        let at = |inst: &Instance, g: Rational| exact_opt(inst, &g).unwrap().map(|o| o.cost);
        let one = at(&inst, int(1)).unwrap();
        let half = at(&inst, ratio(3, 2)).unwrap();
        let two = at(&inst, int(2)).unwrap();
        assert!(half <= one && two <= half);
        if inst.k < inst.n_facilities() {
            let mut more = inst.clone();
            more.k += 1;
            assert!(at(&more, int(1)).unwrap() <= one);
        }
    }
}

#[test]
fn one_misrouted_unit_fails_exactly_one_check() {
    let mut hits = 0;
    for seed in 300..330 {
        let inst = tiny(seed, 6, 4);
        let exact = exact_opt(&inst, &int(1)).unwrap().unwrap();
        let mut sol = exact.solution.clone();
        let load = sol.load(inst.n_facilities());
        let full = sol.open.iter().copied().find(|&i| load[i] == int(inst.capacities[i] as i64));
        let Some(full) = full else { continue };
        let Some(j) = (0..inst.n_clients()).find(|&j| sol.assign[j].iter().all(|(i, _)| *i != full)) else { continue };
        sol.assign[j] = vec![(full, int(1))];
        let report = verify_solution(&inst, &sol, inst.k, &int(1), None);
        assert_eq!(report.failed_checks(), vec!["capacity"], "seed {seed}");
        hits += 1;
    }
    assert!(hits > 0);
}
