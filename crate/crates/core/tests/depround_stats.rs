use capkm_core::depround::{dependent_round, Schedule};
use capkm_core::rational::{self, ratio, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TRIALS: usize = 20_000;

fn stats(v: &[Rational], schedule: &Schedule, seed: u64) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = v.len();
    let mut ones = vec![0usize; n];
    let mut both = vec![vec![0usize; n]; n];
    let total = rational::sum(v);
    for _ in 0..TRIALS {
        let out = dependent_round(v, schedule, &mut rng).unwrap().open;
        let count = out.iter().filter(|b| **b).count();
        assert!(count == rational::floor_usize(&total) || count == rational::ceil_usize(&total));
        for a in 0..n {
            ones[a] += out[a] as usize;
            for b in 0..n {
                both[a][b] += (out[a] && out[b]) as usize;
            }
        }
    }
    let t = TRIALS as f64;
    (ones.iter().map(|&c| c as f64 / t).collect(), both.iter().map(|r| r.iter().map(|&c| c as f64 / t).collect()).collect())
}

fn check_marginals_and_correlation(v: &[Rational], schedule: &Schedule, seed: u64) {
    let p: Vec<f64> = v.iter().map(rational::to_f64).collect();
    let (marg, joint) = stats(v, schedule, seed);
    for a in 0..v.len() {
        let sigma = (p[a] * (1.0 - p[a]) / TRIALS as f64).sqrt();
        assert!((marg[a] - p[a]).abs() <= 4.0 * sigma + 1e-12, "entry {a}: {} vs {}", marg[a], p[a]);
        for b in a + 1..v.len() {
            assert!(joint[a][b] <= p[a] * p[b] + 0.01, "pair ({a},{b}): {} > {}", joint[a][b], p[a] * p[b]);
        }
    }
}

#[test]
fn reference_vector_under_every_schedule() {
    let v = vec![ratio(3, 10), ratio(7, 10), ratio(1, 2), ratio(1, 2)];
    check_marginals_and_correlation(&v, &Schedule::Arbitrary, 1);
    check_marginals_and_correlation(&v, &Schedule::MatchedPairsFirst(vec![(2, 3), (0, 1)]), 2);
    check_marginals_and_correlation(&v, &Schedule::GroupChains(vec![vec![1, 2], vec![0, 3]]), 3);
}

#[test]
fn random_vectors_keep_marginals() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for round in 0..3 {
        let v: Vec<Rational> = (0..6).map(|_| ratio(rng.random_range(0..=12), 12)).collect();
        check_marginals_and_correlation(&v, &Schedule::Arbitrary, 10 + round);
    }
}

#[test]
fn heavy_matched_pairs_always_keep_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..2000 {
        let a = rng.random_range(1..20);
        let b = rng.random_range((20 - a).max(1)..20);
        let c = rng.random_range(1..20);
        let d = rng.random_range(1..20);
        let v = vec![ratio(a, 20), ratio(b, 20), ratio(c, 20), ratio(d, 20)];
        let out = dependent_round(&v, &Schedule::MatchedPairsFirst(vec![(0, 1), (2, 3)]), &mut rng).unwrap().open;
        assert!(out[0] || out[1], "{a}/20 + {b}/20");
        if c + d >= 20 {
            assert!(out[2] || out[3]);
        }
    }
}

#[test]
fn chain_sums_move_by_less_than_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..500 {
        let v: Vec<Rational> = (0..9).map(|_| ratio(rng.random_range(1..10), 10)).collect();
        let chains = vec![vec![0, 1, 2, 3], vec![4, 5], vec![6, 7, 8]];
        let r = dependent_round(&v, &Schedule::GroupChains(chains.clone()), &mut rng).unwrap();
        for chain in &chains {
            let before = rational::sum(chain.iter().map(|&i| &v[i]));
            let open = chain.iter().filter(|&&i| r.open[i]).count() as i64;
            let drift = Rational::from_integer(open.into()) - before;
            assert!(drift < ratio(1, 1) && drift > ratio(-1, 1));
        }
    }
}
