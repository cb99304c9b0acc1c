//! Base sizes of permutation groups: the logarithmic lower bound, a greedy
//! upper bound and an exact search.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::chain::{orbits, ChainOptions, StabilizerChain};
use crate::error::{Error, Result};
use crate::perm::Permutation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Exact,
    Greedy,
    Log,
}

impl std::str::FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Strategy::Exact),
            "greedy" => Ok(Strategy::Greedy),
            "log" => Ok(Strategy::Log),
            _ => Err(Error::invalid(format!("unknown base strategy {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LowerEvidence {
    /// Every shorter tuple was ruled out by the search.
    ExhaustedSmaller,
    /// `n^b >= |G|` only.
    LogBound,
}

#[derive(Clone, Debug, Serialize)]
pub struct BaseCertificate {
    pub degree: usize,
    /// The base size, when lower and upper bounds meet.
    pub b: Option<usize>,
    pub lower: usize,
    pub upper: Option<usize>,
    /// A base of length `upper`, 0-based.
    pub witness: Vec<u32>,
    pub lower_evidence: LowerEvidence,
    /// Stabilizer computations performed.
    pub nodes: u64,
    pub strategy: Strategy,
}

impl BaseCertificate {
    pub fn is_exact(&self) -> bool {
        self.b.is_some()
    }

    /// Witness in 1-based points for reports.
    pub fn witness_one_based(&self) -> Vec<u32> {
        self.witness.iter().map(|p| p + 1).collect()
    }
}

/// A permutation group given by generators and its known order.
#[derive(Clone, Debug)]
pub struct PermGroup {
    pub degree: usize,
    pub generators: Vec<Permutation>,
    pub order: BigUint,
}

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Permutation>, order: BigUint) -> Self {
        PermGroup {
            degree,
            generators,
            order,
        }
    }
}

/// Least `b` with `n^b >= |G|`, i.e. `ceil(log|G| / log n)`.
pub fn log_bound(order: &BigUint, degree: usize) -> usize {
    if order.is_one() {
        return 0;
    }
    if degree < 2 {
        return usize::MAX;
    }
    let n = BigUint::from(degree);
    let mut power = BigUint::one();
    let mut b = 0;
    while &power < order {
        power *= &n;
        b += 1;
    }
    b
}

/// A group with known order and its stabilizer evaluations.
struct Stab {
    gens: Vec<Permutation>,
    order: BigUint,
}

struct Search {
    degree: usize,
    seed: u64,
    nodes: u64,
    budget: u64,
}

#[derive(Debug)]
struct OutOfBudget;

impl Search {
    /// Point stabilizer `K_p`, of order `|K| / |p^K|`.
    fn stabilizer(&mut self, k: &Stab, p: u32, orbit_len: usize) -> std::result::Result<Stab, OutOfBudget> {
        if self.nodes >= self.budget {
            return Err(OutOfBudget);
        }
        self.nodes += 1;
        let opts = ChainOptions::seeded(self.seed)
            .with_base(vec![p])
            .with_bound(k.order.clone());
        let chain = StabilizerChain::build_with(self.degree, &k.gens, &opts).expect("degrees agree");
        debug_assert_eq!(chain.order(), &k.order);
        let order = &k.order / BigUint::from(orbit_len);
        let gens = if chain.base_len() > 1 {
            chain.stabilizer_generators(1).to_vec()
        } else {
            Vec::new()
        };
        Ok(Stab { gens, order })
    }

    /// Orbits of `K` with at least two points, longest first, ties to the
    /// least point.
    fn branches(&self, k: &Stab) -> Vec<Vec<u32>> {
        let mut orbs: Vec<Vec<u32>> = orbits(&k.gens, self.degree).into_iter().filter(|o| o.len() > 1).collect();
        orbs.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
        orbs
    }

    /// Is there a base of `K` of length at most `r`? Tuples are taken up to
    /// the action of `K` on the next point, which permutes the stabilizers
    /// by conjugation.
    fn exists(&mut self, k: &Stab, r: usize, prefix: &mut Vec<u32>) -> std::result::Result<bool, OutOfBudget> {
        if k.order.is_one() {
            return Ok(true);
        }
        if r == 0 {
            return Ok(false);
        }
        let branches = self.branches(k);
        let longest = branches.first().map(|o| o.len()).unwrap_or(1);
        if k.order > BigUint::from(longest).pow(r as u32) {
            return Ok(false);
        }
        if r == 1 {
            // a regular orbit
            return Ok(match branches.iter().find(|o| BigUint::from(o.len()) == k.order) {
                Some(o) => {
                    prefix.push(o[0]);
                    true
                }
                None => false,
            });
        }
        for orb in branches {
            let p = orb[0];
            let next = self.stabilizer(k, p, orb.len())?;
            prefix.push(p);
            if self.exists(&next, r - 1, prefix)? {
                return Ok(true);
            }
            prefix.pop();
        }
        Ok(false)
    }
}

/// Greedy base: each point taken from a longest orbit of the current
/// stabilizer, least point first.
pub fn greedy_base(group: &PermGroup, seed: u64) -> Vec<u32> {
    let mut search = Search {
        degree: group.degree,
        seed,
        nodes: 0,
        budget: u64::MAX,
    };
    let mut k = Stab {
        gens: group.generators.clone(),
        order: group.order.clone(),
    };
    let mut base = Vec::new();
    while !k.order.is_one() {
        let orb = search.branches(&k).into_iter().next().expect("nontrivial group moves a point");
        let p = orb[0];
        k = search.stabilizer(&k, p, orb.len()).expect("unlimited budget");
        base.push(p);
    }
    base
}

/// Does the pointwise stabilizer of `points` vanish?
pub fn is_base(group: &PermGroup, points: &[u32], seed: u64) -> bool {
    let mut distinct: Vec<u32> = Vec::new();
    for &p in points {
        if !distinct.contains(&p) {
            distinct.push(p);
        }
    }
    let opts = ChainOptions::seeded(seed)
        .with_base(distinct.clone())
        .with_bound(group.order.clone());
    let chain = StabilizerChain::build_with(group.degree, &group.generators, &opts).expect("degrees agree");
    if chain.order() != &group.order {
        return false;
    }
    // the product of the orbit lengths along the prefix is the index of the
    // pointwise stabilizer
    let mut index = BigUint::one();
    for level in 0..distinct.len() {
        index *= BigUint::from(chain.orbit(level).len());
    }
    index == group.order
}

/// Base size of `group` by the chosen strategy. The exact search runs
/// iterative deepening from the logarithmic bound up to the greedy value and
/// stops after `node_budget` stabilizer computations.
pub fn base_size(group: &PermGroup, strategy: Strategy, node_budget: u64, seed: u64) -> Result<BaseCertificate> {
    let log = log_bound(&group.order, group.degree);
    let mut cert = BaseCertificate {
        degree: group.degree,
        b: None,
        lower: log,
        upper: None,
        witness: Vec::new(),
        lower_evidence: LowerEvidence::LogBound,
        nodes: 0,
        strategy,
    };
    if group.order.is_one() {
        cert.b = Some(0);
        cert.upper = Some(0);
        cert.lower_evidence = LowerEvidence::ExhaustedSmaller;
        return Ok(cert);
    }
    if strategy == Strategy::Log {
        return Ok(cert);
    }
    let greedy = greedy_base(group, seed);
    cert.upper = Some(greedy.len());
    cert.witness = greedy;
    if strategy == Strategy::Greedy {
        if cert.lower == greedy_len(&cert) {
            cert.b = cert.upper;
        }
        return Ok(cert);
    }
    let mut search = Search {
        degree: group.degree,
        seed,
        nodes: 0,
        budget: node_budget,
    };
    let top = Stab {
        gens: group.generators.clone(),
        order: group.order.clone(),
    };
    let upper = greedy_len(&cert);
    let mut depth = cert.lower.max(1);
    while depth < upper {
        let mut prefix = Vec::new();
        match search.exists(&top, depth, &mut prefix) {
            Ok(true) => {
                cert.upper = Some(prefix.len());
                cert.witness = prefix;
                break;
            }
            Ok(false) => {
                cert.lower = depth + 1;
                cert.lower_evidence = LowerEvidence::ExhaustedSmaller;
                depth += 1;
            }
            Err(OutOfBudget) => break,
        }
    }
    cert.nodes = search.nodes;
    if cert.upper == Some(cert.lower) {
        cert.b = Some(cert.lower);
    }
    Ok(cert)
}

fn greedy_len(cert: &BaseCertificate) -> usize {
    cert.upper.expect("greedy ran")
}

/// Does some `b`-subset family have distinct point signatures? For `S_n` on
/// `k`-subsets, a tuple of `b` subsets is a base exactly when the `n` points
/// receive distinct membership vectors in `{0,1}^b`, each coordinate summing
/// to `k`. Returns the least such `b`.
pub fn symmetric_kset_base_size(n: usize, k: usize) -> usize {
    assert!(1 <= k && 2 * k <= n, "need 1 <= k <= n/2");
    (1..=n).find(|&b| distinct_vectors_exist(n, k, b)).expect("b = n - 1 always works")
}

/// `n` distinct vectors in `{0,1}^b` with every column sum equal to `k`,
/// by a depth-first choice of vectors in increasing order with column-sum
/// pruning.
fn distinct_vectors_exist(n: usize, k: usize, b: usize) -> bool {
    if b >= 63 || (n as u128) > (1u128 << b) {
        return false;
    }
    // the n distinct vectors of least (most) total weight bracket b*k
    let mut weights: Vec<usize> = (0..1u64 << b).map(|v| v.count_ones() as usize).collect();
    weights.sort_unstable();
    let least: usize = weights[..n].iter().sum();
    let most: usize = weights[weights.len() - n..].iter().sum();
    if b * k < least || b * k > most {
        return false;
    }
    fn rec(next: u64, total: u64, left: usize, k: usize, sums: &mut [usize]) -> bool {
        if left == 0 {
            return sums.iter().all(|&s| s == k);
        }
        let missing: usize = sums.iter().map(|&s| k - s).sum();
        if sums.iter().any(|&s| s + left < k) || missing > left * sums.len() || total - next < left as u64 {
            return false;
        }
        for v in next..total {
            if sums.iter().enumerate().any(|(c, &s)| v >> c & 1 == 1 && s == k) {
                continue;
            }
            for (c, s) in sums.iter_mut().enumerate() {
                *s += (v >> c & 1) as usize;
            }
            let found = rec(v + 1, total, left - 1, k, sums);
            for (c, s) in sums.iter_mut().enumerate() {
                *s -= (v >> c & 1) as usize;
            }
            if found {
                return true;
            }
        }
        false
    }
    rec(0, 1u64 << b, n, k, &mut vec![0usize; b])
}

/// `ceil(log_{ceil(n/k)} n) * (ceil(n/k) - 1)`, the upper end of the bracket
/// for `S_n` on `k`-subsets; the lower end is `ceil(log2 n)`.
pub fn kset_bracket(n: usize, k: usize) -> (usize, usize) {
    let lower = ceil_log(n, 2);
    let m = n.div_ceil(k);
    (lower, ceil_log(n, m) * (m - 1))
}

/// Least `e` with `base^e >= n`.
pub fn ceil_log(n: usize, base: usize) -> usize {
    assert!(base >= 2);
    let mut e = 0;
    let mut p = 1u128;
    while p < n as u128 {
        p *= base as u128;
        e += 1;
    }
    e
}

impl PermGroup {
    pub fn order_u64(&self) -> Option<u64> {
        self.order.to_u64()
    }
}
