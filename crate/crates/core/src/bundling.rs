//! Bundle centers, bundles, star instances and the demand transport to
//! bundle centers.

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::lp::FractionalSolution;
use crate::rational::{self, Rational};
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub struct BundleSet {
    pub ell: usize,
    /// Centers (client indices) in selection order.
    pub centers: Vec<usize>,
    /// `bundles[p]` holds the facilities of `centers[p]`, sorted.
    pub bundles: Vec<Vec<usize>>,
    /// Per-client fractional connection cost.
    pub d_av: Vec<Rational>,
    /// Facility to bundle position.
    pub owner: Vec<usize>,
}

/// One single-demand-node subproblem: the center, its bundle, the demand the
/// bundle serves and the budget that pays for serving it.
#[derive(Debug, Clone, PartialEq)]
pub struct StarInstance {
    pub center: usize,
    pub facilities: Vec<usize>,
    /// Σ_j x*_ij per member facility.
    pub served: Vec<Rational>,
    pub demand: Rational,
    pub budget_f: Rational,
    pub budget_c: Rational,
    /// Σ y*_i over the bundle.
    pub volume: Rational,
}

impl StarInstance {
    pub fn budget(&self) -> Rational {
        &self.budget_f + &self.budget_c
    }

    pub fn is_small(&self) -> bool {
        self.volume < rational::one()
    }
}

/// Greedy selection of far-apart centers by increasing fractional
/// connection cost.
pub fn select_centers(inst: &Instance, frac: &FractionalSolution, ell: usize) -> BundleSet {
    let n = inst.n_clients();
    let d_av: Vec<Rational> = (0..n).map(|j| frac.d_av(inst, j)).collect();
    let radius = rational::int(2 * ell as i64);
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut centers = Vec::new();
    while !remaining.is_empty() {
        let &j = remaining
            .iter()
            .min_by(|&&a, &&b| d_av[a].cmp(&d_av[b]).then(a.cmp(&b)))
            .expect("nonempty");
        centers.push(j);
        remaining.retain(|&jp| *inst.dq_cc(j, jp) > &radius * &d_av[jp]);
    }
    BundleSet { ell, centers, bundles: Vec::new(), d_av, owner: Vec::new() }
}

/// Assigns each facility to its nearest center and checks that every bundle
/// has volume at least 1 − 1/ℓ.
pub fn build_bundles(inst: &Instance, frac: &FractionalSolution, mut set: BundleSet) -> Result<BundleSet> {
    if set.centers.is_empty() {
        return Err(Error::Contract("no bundle centers".into()));
    }
    let m = inst.n_facilities();
    let mut bundles = vec![Vec::new(); set.centers.len()];
    let mut owner = vec![0; m];
    for i in 0..m {
        let p = (0..set.centers.len())
            .min_by(|&a, &b| {
                let (ca, cb) = (set.centers[a], set.centers[b]);
                inst.d(i, ca).total_cmp(&inst.d(i, cb)).then(ca.cmp(&cb))
            })
            .expect("nonempty");
        bundles[p].push(i);
        owner[i] = p;
    }
    let floor = rational::one() - rational::ratio(1, set.ell as i64);
    for (p, b) in bundles.iter().enumerate() {
        let vol = rational::sum(b.iter().map(|&i| &frac.y[i]));
        if vol < floor {
            return Err(Error::Invariant(format!(
                "bundle of center {} has volume {} < 1 - 1/{}",
                inst.client_ids[set.centers[p]],
                rational::format(&vol),
                set.ell
            )));
        }
    }
    set.bundles = bundles;
    set.owner = owner;
    Ok(set)
}

/// Center selection followed by bundle construction.
pub fn bundle(inst: &Instance, frac: &FractionalSolution, ell: usize) -> Result<BundleSet> {
    if ell < 2 {
        return Err(Error::Contract(format!("ell = {ell} must be at least 2")));
    }
    build_bundles(inst, frac, select_centers(inst, frac, ell))
}

impl BundleSet {
    /// Center pairs closer than 2ℓ times the larger of their connection costs.
    pub fn separation_violations(&self, inst: &Instance) -> Vec<(usize, usize)> {
        let radius = rational::int(2 * self.ell as i64);
        let mut bad = Vec::new();
        for (a, &ja) in self.centers.iter().enumerate() {
            for &jb in &self.centers[a + 1..] {
                let far = rational::max(&self.d_av[ja], &self.d_av[jb]);
                if *inst.dq_cc(ja, jb) <= &radius * far {
                    bad.push((ja, jb));
                }
            }
        }
        bad
    }

    /// Non-center clients with no center within 2ℓ times their own cost.
    pub fn coverage_violations(&self, inst: &Instance) -> Vec<usize> {
        let radius = rational::int(2 * self.ell as i64);
        (0..inst.n_clients())
            .filter(|j| !self.centers.contains(j))
            .filter(|&j| !self.centers.iter().any(|&c| *inst.dq_cc(c, j) <= &radius * &self.d_av[j]))
            .collect()
    }
}

pub fn build_stars(inst: &Instance, frac: &FractionalSolution, set: &BundleSet) -> Vec<StarInstance> {
    let n = inst.n_clients();
    let two_ell = rational::int(2 * set.ell as i64);
    set.centers
        .iter()
        .zip(&set.bundles)
        .map(|(&center, facilities)| {
            let served: Vec<Rational> = facilities.iter().map(|&i| frac.served(i)).collect();
            let demand = rational::sum(&served);
            let budget_f = facilities
                .iter()
                .fold(rational::zero(), |acc, &i| acc + &frac.y[i] * &inst.opening_costs[i]);
            let mut budget_c = rational::zero();
            for &i in facilities {
                for jp in 0..n {
                    let x = &frac.x[i][jp];
                    if *x != rational::zero() {
                        budget_c += x * (inst.dq(i, jp) + &two_ell * &set.d_av[jp]);
                    }
                }
            }
            let volume = rational::sum(facilities.iter().map(|&i| &frac.y[i]));
            StarInstance { center, facilities: facilities.clone(), served, demand, budget_f, budget_c, volume }
        })
        .collect()
}

pub fn total_budget(stars: &[StarInstance]) -> Rational {
    stars.iter().fold(rational::zero(), |acc, s| acc + s.budget())
}

/// Demand shipped from clients to bundle centers: client `j'` sends
/// Σ_{i∈F_j} x*_ij' to center `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    /// `(client, star position, amount)`, nonzero amounts only.
    pub flows: Vec<(usize, usize, Rational)>,
    pub total_cost: Rational,
}

impl TransportPlan {
    pub fn inflow(&self, n_stars: usize) -> Vec<Rational> {
        let mut v = vec![rational::zero(); n_stars];
        for (_, p, a) in &self.flows {
            v[*p] += a;
        }
        v
    }

    pub fn outflow(&self, n_clients: usize) -> Vec<Rational> {
        let mut v = vec![rational::zero(); n_clients];
        for (j, _, a) in &self.flows {
            v[*j] += a;
        }
        v
    }
}

pub fn transport_to_centers(inst: &Instance, frac: &FractionalSolution, stars: &[StarInstance]) -> TransportPlan {
    let mut flows = Vec::new();
    let mut total_cost = rational::zero();
    for jp in 0..inst.n_clients() {
        for (p, star) in stars.iter().enumerate() {
            let amount = rational::sum(star.facilities.iter().map(|&i| &frac.x[i][jp]));
            if amount != rational::zero() {
                total_cost += &amount * inst.dq_cc(jp, star.center);
                flows.push((jp, p, amount));
            }
        }
    }
    TransportPlan { flows, total_cost }
}

/// Per-star text report: center, members, demand, budgets, volume.
pub fn dump_stars(inst: &Instance, stars: &[StarInstance]) -> String {
    let mut out = String::from("center\tfacilities\tw\tb_f\tb_c\tvol\tsmall\n");
    for s in stars {
        let members: Vec<String> = s.facilities.iter().map(|&i| inst.facility_ids[i].to_string()).collect();
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            inst.client_ids[s.center],
            members.join(","),
            rational::format(&s.demand),
            rational::format(&s.budget_f),
            rational::format(&s.budget_c),
            rational::format(&s.volume),
            s.is_small()
        );
    }
    out
}

/// LP solution, bundles, star instances and transport plan shared by all
/// rounding pipelines.
#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    pub frac: FractionalSolution,
    pub bundles: BundleSet,
    pub stars: Vec<StarInstance>,
    pub transport: TransportPlan,
}

impl Prepared {
    pub fn ell(&self) -> usize {
        self.bundles.ell
    }
}

pub fn prepare(inst: &Instance, frac: FractionalSolution, ell: usize) -> Result<Prepared> {
    let bundles = bundle(inst, &frac, ell)?;
    let stars = build_stars(inst, &frac, &bundles);
    let transport = transport_to_centers(inst, &frac, &stars);
    Ok(Prepared { frac, bundles, stars, transport })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::load_instance;
    use crate::lp::solve_ckfl;
    use crate::rational::int;

    #[test]
    fn single_client_is_the_only_center() {
        let inst = load_instance("CKFL 1 2 1\nC 0 0 0\nF 0 1 0 1 0\nF 1 2 0 1 0\n").unwrap();
        let frac = solve_ckfl(&inst).unwrap();
        let set = bundle(&inst, &frac, 2).unwrap();
        assert_eq!(set.centers, vec![0]);
        assert_eq!(set.bundles, vec![vec![0, 1]]);
    }

    #[test]
    fn zero_cost_clients_far_apart_are_both_centers() {
        let inst = load_instance("CKFL 2 2 2\nC 0 0 0\nC 1 5 0\nF 0 0 0 1 0\nF 1 5 0 1 0\n").unwrap();
        let frac = solve_ckfl(&inst).unwrap();
        let set = select_centers(&inst, &frac, 2);
        assert_eq!(set.d_av, vec![int(0), int(0)]);
        assert_eq!(set.centers, vec![0, 1]);
    }

    #[test]
    fn equidistant_facility_goes_to_lower_center() {
        let inst = load_instance("CKFL 2 3 2\nC 0 0 0\nC 1 4 0\nF 0 0 0 1 0\nF 1 4 0 1 0\nF 2 2 0 1 0\n").unwrap();
        let frac = solve_ckfl(&inst).unwrap();
        let set = bundle(&inst, &frac, 2).unwrap();
        assert_eq!(set.bundles, vec![vec![0, 2], vec![1]]);
    }

    #[test]
    fn k_median_stars_have_zero_opening_budget_and_center_ships_to_itself() {
        let inst = load_instance("CKFL 1 1 1\nC 0 0 0\nF 0 0 0 1 0\n").unwrap();
        let frac = solve_ckfl(&inst).unwrap();
        let set = bundle(&inst, &frac, 2).unwrap();
        let stars = build_stars(&inst, &frac, &set);
        assert_eq!(stars[0].budget_f, int(0));
        let plan = transport_to_centers(&inst, &frac, &stars);
        assert_eq!(plan.flows, vec![(0, 0, int(1))]);
        assert_eq!(plan.total_cost, int(0));
        assert!(dump_stars(&inst, &stars).contains("0\t0\t1\t0\t0\t1\tfalse"));
    }

    #[test]
    fn ell_below_two_is_refused() {
        let inst = load_instance("CKFL 1 1 1\nC 0 0 0\nF 0 0 0 1 0\n").unwrap();
        let frac = solve_ckfl(&inst).unwrap();
        assert!(matches!(bundle(&inst, &frac, 1), Err(Error::Contract(_))));
    }
}
