//! Dependent randomized rounding: pairwise steps that keep the sum fixed,
//! preserve every marginal and correlate entries negatively.

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::Rng;

/// Which fractional entries get paired next.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Schedule {
    /// Always the two lowest fractional indices.
    Arbitrary,
    /// Each listed pair is rounded once, in order, if both entries are still
    /// fractional; leftovers are then rounded arbitrarily.
    MatchedPairsFirst(Vec<(usize, usize)>),
    /// Chains are listed top to bottom. Inside every chain the two topmost
    /// fractional entries are rounded until at most one is left; leftovers are
    /// then paired in chain order.
    GroupChains(Vec<Vec<usize>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rounded {
    pub open: Vec<bool>,
    /// The vector after the schedule-specific phase, before the leftover
    /// entries are rounded.
    pub after_schedule: Vec<Rational>,
}

/// Exact Bernoulli(p) for rational `p`: compares uniform random bits with the
/// binary expansion of `p`, 64 bits at a time, until they differ.
pub fn bernoulli<R: Rng + ?Sized>(p: &Rational, rng: &mut R) -> bool {
    if *p <= rational::zero() {
        return false;
    }
    if *p >= rational::one() {
        return true;
    }
    let shift = Rational::from_integer(BigInt::from(1u128 << 64));
    let mut rest = p.clone();
    loop {
        let scaled = rest * &shift;
        let chunk = scaled.floor();
        let digits = chunk.to_integer().to_u64().expect("chunk below 2^64");
        let r: u64 = rng.random();
        if r != digits {
            return r < digits;
        }
        rest = scaled - chunk;
        if rest == rational::zero() {
            return false;
        }
    }
}

/// One pairwise step on `(v_i, v_j) ∈ (0,1)²`. With ε = min(1−v_i, v_j) and
/// δ = min(v_i, 1−v_j), returns `(v_i+ε, v_j−ε)` with probability δ/(ε+δ),
/// otherwise `(v_i−δ, v_j+δ)`.
pub fn round_pair<R: Rng + ?Sized>(vi: &Rational, vj: &Rational, rng: &mut R) -> Result<(Rational, Rational)> {
    if !rational::is_fractional(vi) || !rational::is_fractional(vj) {
        return Err(Error::Rounding(format!(
            "pair step needs fractional inputs, got ({}, {})",
            rational::format(vi),
            rational::format(vj)
        )));
    }
    let one = rational::one();
    let eps = rational::min(&(&one - vi), vj);
    let delta = rational::min(vi, &(&one - vj));
    let total = &eps + &delta;
    if total == rational::zero() {
        return Err(Error::Rounding("degenerate pair step".into()));
    }
    if bernoulli(&(&delta / &total), rng) {
        Ok((vi + &eps, vj - &eps))
    } else {
        Ok((vi - &delta, vj + &delta))
    }
}

fn check_indices(n: usize, schedule: &Schedule) -> Result<()> {
    let listed: Vec<usize> = match schedule {
        Schedule::Arbitrary => Vec::new(),
        Schedule::MatchedPairsFirst(pairs) => pairs.iter().flat_map(|&(a, b)| [a, b]).collect(),
        Schedule::GroupChains(chains) => chains.iter().flatten().copied().collect(),
    };
    if let Some(&i) = listed.iter().find(|&&i| i >= n) {
        return Err(Error::Rounding(format!("schedule references index {i} of a length-{n} vector")));
    }
    let mut seen = vec![false; n];
    for &i in &listed {
        if seen[i] {
            return Err(Error::Rounding(format!("schedule lists index {i} twice")));
        }
        seen[i] = true;
    }
    Ok(())
}

fn step<R: Rng + ?Sized>(v: &mut [Rational], a: usize, b: usize, rng: &mut R) -> Result<()> {
    let (x, y) = round_pair(&v[a], &v[b], rng)?;
    v[a] = x;
    v[b] = y;
    Ok(())
}

/// Rounds `v` to a 0/1 vector following `schedule`. The number of ones is
/// ⌊Σv⌋ or ⌈Σv⌉ and `P[open_i] = v_i`.
pub fn dependent_round<R: Rng + ?Sized>(v: &[Rational], schedule: &Schedule, rng: &mut R) -> Result<Rounded> {
    let n = v.len();
    if let Some(x) = v.iter().find(|x| **x < rational::zero() || **x > rational::one()) {
        return Err(Error::Rounding(format!("entry {} outside [0, 1]", rational::format(x))));
    }
    check_indices(n, schedule)?;
    let mut v = v.to_vec();
    let frac = |v: &[Rational], i: usize| rational::is_fractional(&v[i]);

    let mut order: Vec<usize> = Vec::with_capacity(n);
    match schedule {
        Schedule::Arbitrary => {}
        Schedule::MatchedPairsFirst(pairs) => {
            for &(a, b) in pairs {
                if frac(&v, a) && frac(&v, b) {
                    step(&mut v, a, b, rng)?;
                }
            }
        }
        Schedule::GroupChains(chains) => {
            for chain in chains {
                loop {
                    let mut top = chain.iter().copied().filter(|&i| frac(&v, i));
                    let (Some(a), Some(b)) = (top.next(), top.next()) else { break };
                    step(&mut v, a, b, rng)?;
                }
            }
            order.extend(chains.iter().flatten().copied());
        }
    }
    let after_schedule = v.clone();

    let mut listed = vec![false; n];
    for &i in &order {
        listed[i] = true;
    }
    order.extend((0..n).filter(|&i| !listed[i]));
    loop {
        let mut left = order.iter().copied().filter(|&i| frac(&v, i));
        match (left.next(), left.next()) {
            (Some(a), Some(b)) => step(&mut v, a, b, rng)?,
            (Some(a), None) => {
                let hit = bernoulli(&v[a], rng);
                v[a] = if hit { rational::one() } else { rational::zero() };
            }
            _ => break,
        }
    }
    Ok(Rounded { open: v.iter().map(|x| *x == rational::one()).collect(), after_schedule })
}
