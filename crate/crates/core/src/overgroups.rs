//! Maximal overgroups of an element and the minimum of their number over
//! the group.
//!
//! Certified mode explores the lattice of subgroups containing `<s>`: each
//! node `K` is joined with one element of every double coset `KgK`, and the
//! nodes without a proper child are exactly the maximal overgroups.
//! Estimated mode climbs from random joins and is flagged as such.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::action::CosetAction;
use crate::atlas::Family;
use crate::chain::orbits;
use crate::classes::{centralizer, cycle_conjugator, enumerate_class};
use crate::error::{Error, Result};
use crate::group::Group;
use crate::perm::Permutation;
use crate::rng::{self, Rng};
use crate::subgroup::{subgroup_equal, Fingerprint, Subgroup};

/// Random elements drawn per sampler in estimated mode.
pub const DEFAULT_BUDGET: u64 = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Certified,
    Estimated,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Certified => "certified",
            Mode::Estimated => "estimated",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "certified" => Ok(Mode::Certified),
            "estimated" => Ok(Mode::Estimated),
            _ => Err(Error::invalid(format!("unknown mode {s:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ClimbOptions {
    pub mode: Mode,
    /// Estimated mode: random elements per sampler at the root.
    pub budget: u64,
    pub seed: u64,
    /// Stop once this many maximal overgroups are known; the result is then
    /// marked incomplete.
    pub stop_at: Option<usize>,
}

impl ClimbOptions {
    pub fn new(mode: Mode, budget: u64, seed: u64) -> Self {
        ClimbOptions {
            mode,
            budget,
            seed,
            stop_at: None,
        }
    }

    pub fn certified() -> Self {
        Self::new(Mode::Certified, DEFAULT_BUDGET, 0)
    }

    pub fn estimated(budget: u64, seed: u64) -> Self {
        Self::new(Mode::Estimated, budget, seed)
    }
}

#[derive(Clone, Debug)]
pub struct OvergroupSet {
    pub element: Permutation,
    pub subgroups: Vec<Subgroup>,
    pub mode: Mode,
    /// Joins computed.
    pub budget_used: u64,
    /// False when the search stopped early at `stop_at`.
    pub complete: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SubgroupExport {
    pub order: String,
    pub index: String,
    pub generators: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OvergroupExport {
    pub element: String,
    pub mode: Mode,
    pub complete: bool,
    pub subgroups: Vec<SubgroupExport>,
}

impl OvergroupSet {
    pub fn len(&self) -> usize {
        self.subgroups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subgroups.is_empty()
    }

    pub fn is_certified(&self) -> bool {
        self.mode == Mode::Certified && self.complete
    }

    /// Subgroup orders, ascending.
    pub fn orders(&self) -> Vec<BigUint> {
        let mut v: Vec<BigUint> = self.subgroups.iter().map(|h| h.order().clone()).collect();
        v.sort();
        v
    }

    /// The overgroups of `s^g`: conjugation permutes maximal subgroups.
    pub fn conjugate(&self, g: &Permutation) -> OvergroupSet {
        OvergroupSet {
            element: self.element.conjugate_by(g),
            subgroups: self.subgroups.iter().map(|h| h.conjugate(g)).collect(),
            mode: self.mode,
            budget_used: 0,
            complete: self.complete,
        }
    }

    pub fn export(&self, group_order: &BigUint) -> OvergroupExport {
        OvergroupExport {
            element: self.element.to_string(),
            mode: self.mode,
            complete: self.complete,
            subgroups: self
                .subgroups
                .iter()
                .map(|h| SubgroupExport {
                    order: h.order().to_string(),
                    index: h.index_in(group_order).to_string(),
                    generators: h.generators().iter().map(|g| g.to_string()).collect(),
                })
                .collect(),
        }
    }
}

/// `M(G, s)`.
pub fn maximal_overgroups(group: &Group, s: &Permutation, opts: &ClimbOptions) -> Result<OvergroupSet> {
    group.check_member(s)?;
    if s.is_identity() {
        return Err(Error::invalid("the identity has no maximal overgroups worth listing"));
    }
    match opts.mode {
        Mode::Certified => certified(group, s, opts.stop_at),
        Mode::Estimated => estimated(group, s, opts),
    }
}

fn sort_subgroups(v: &mut [Subgroup]) {
    v.sort_by(|a, b| {
        b.order()
            .cmp(a.order())
            .then_with(|| a.generators().cmp(b.generators()))
    });
}

struct Lattice<'a> {
    group: &'a Group,
    order: u64,
    words: usize,
    nodes: Vec<Subgroup>,
    index: HashMap<Fingerprint, Vec<usize>>,
    maximal: Vec<usize>,
    stop_at: Option<usize>,
    joins: u64,
}

impl Lattice<'_> {
    fn insert(&mut self, h: Subgroup) -> (usize, bool) {
        let bucket = self.index.entry(h.fingerprint().clone()).or_default();
        for &i in bucket.iter() {
            if subgroup_equal(&self.nodes[i], &h) {
                return (i, false);
            }
        }
        let i = self.nodes.len();
        bucket.push(i);
        self.nodes.push(h);
        (i, true)
    }

    /// Marks the double coset `KgK` by closing `{g}` under multiplication by
    /// generators of `K` on both sides.
    fn mark(&self, seen: &mut [u64], gens: &[Permutation], g: &Permutation) {
        let chain = self.group.chain();
        let r = chain.rank(g) as usize;
        if seen[r / 64] >> (r % 64) & 1 == 1 {
            return;
        }
        seen[r / 64] |= 1 << (r % 64);
        let mut stack = vec![g.clone()];
        while let Some(x) = stack.pop() {
            for k in gens {
                for y in [x.mul(k), k.mul(&x)] {
                    let r = chain.rank(&y) as usize;
                    if seen[r / 64] >> (r % 64) & 1 == 0 {
                        seen[r / 64] |= 1 << (r % 64);
                        stack.push(y);
                    }
                }
            }
        }
    }

    /// Returns true when the search should stop.
    fn visit(&mut self, k: usize) -> Result<bool> {
        let node = self.nodes[k].clone();
        let gens: Vec<Permutation> = node.generators().to_vec();
        let mut seen = vec![0u64; self.words];
        self.mark(&mut seen, &gens, &self.group.identity());
        let mut has_child = false;
        for r in 0..self.order {
            let ru = r as usize;
            if seen[ru / 64] >> (ru % 64) & 1 == 1 {
                continue;
            }
            let g = self.group.chain().unrank(r);
            self.mark(&mut seen, &gens, &g);
            let child = node.join(self.group, &g)?;
            self.joins += 1;
            if child.order() == self.group.order() {
                continue;
            }
            has_child = true;
            let (c, new) = self.insert(child);
            if new && self.visit(c)? {
                return Ok(true);
            }
        }
        if !has_child {
            self.maximal.push(k);
            if self.stop_at.is_some_and(|m| self.maximal.len() >= m) {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

fn certified(group: &Group, s: &Permutation, stop_at: Option<usize>) -> Result<OvergroupSet> {
    let order = group.enumerable_order()?;
    let mut lattice = Lattice {
        group,
        order,
        words: (order as usize).div_ceil(64),
        nodes: Vec::new(),
        index: HashMap::new(),
        maximal: Vec::new(),
        stop_at,
        joins: 0,
    };
    let root = Subgroup::cyclic(group, s)?;
    let stopped = if root.order() == group.order() {
        false
    } else {
        let (r, _) = lattice.insert(root);
        lattice.visit(r)?
    };
    let mut subgroups: Vec<Subgroup> = lattice.maximal.iter().map(|&i| lattice.nodes[i].clone()).collect();
    sort_subgroups(&mut subgroups);
    Ok(OvergroupSet {
        element: s.clone(),
        subgroups,
        mode: Mode::Certified,
        budget_used: lattice.joins,
        complete: !stopped,
    })
}

/// Random elements: uniform, and uniform conjugates of prime-order class
/// representatives, in rotation. Small classes meet a maximal subgroup far
/// more often than uniform elements do.
struct Sampler {
    reps: Vec<Permutation>,
    rng: Rng,
    turn: usize,
}

impl Sampler {
    fn new(group: &Group, seed: u64) -> Self {
        let reps = match group.classes() {
            Ok(t) => t.prime_order_classes().into_iter().map(|c| t.class(c).rep.clone()).collect(),
            Err(_) => Vec::new(),
        };
        Sampler {
            reps,
            rng: rng::stream(seed, 0x6f76),
            turn: 0,
        }
    }

    fn streams(&self) -> u64 {
        self.reps.len() as u64 + 1
    }

    fn next(&mut self, group: &Group) -> Permutation {
        let t = self.turn % (self.reps.len() + 1);
        self.turn += 1;
        let g = group.random_element(&mut self.rng);
        if t == 0 {
            g
        } else {
            self.reps[t - 1].conjugate_by(&g)
        }
    }
}

/// Elements of `N_G(<s>)` mapping `s` to its generating powers, together
/// with subgroups known to contain `s`.
fn seeds(group: &Group, s: &Permutation) -> (Vec<Permutation>, Vec<Vec<Permutation>>) {
    let ord = s.order();
    let mut normalizing = Vec::new();
    let mut subgroups = Vec::new();
    match group.family() {
        Family::Alternating(n) | Family::Symmetric(n) if group.degree() == n => {
            let alternating = matches!(group.family(), Family::Alternating(_));
            let odd_fix = odd_centralizing(s);
            for k in 2..ord {
                if k.gcd(&ord) != 1 {
                    continue;
                }
                let mut t = cycle_conjugator(s, &s.pow(k as i64));
                if alternating && !t.is_even() {
                    match &odd_fix {
                        Some(c) => t = c.mul(&t),
                        None => continue,
                    }
                }
                normalizing.push(t);
            }
            for u in orbit_unions(s) {
                subgroups.push(set_stabilizer(n, &u, alternating));
            }
        }
        _ => {
            let cap = group.limits().enum_cap;
            if let Ok(cls) = enumerate_class(group, s, cap) {
                for (m, c) in cls.members.iter().zip(&cls.conjugators) {
                    for k in 2..ord {
                        if k.gcd(&ord) == 1 && *m == s.pow(k as i64) {
                            normalizing.push(c.clone());
                        }
                    }
                }
                if let Ok(cent) = centralizer(group, s, cap) {
                    let mut gens = vec![s.clone()];
                    gens.extend(cent.generators().iter().cloned());
                    subgroups.push(gens);
                }
            }
        }
    }
    if !normalizing.is_empty() {
        let mut gens = vec![s.clone()];
        gens.extend(normalizing.iter().cloned());
        subgroups.push(gens);
    }
    (normalizing, subgroups)
}

/// An odd permutation commuting with `s`, if one exists: an even-length
/// cycle, a transposition of fixed points, or a swap of two equal odd cycles.
fn odd_centralizing(s: &Permutation) -> Option<Permutation> {
    let n = s.degree();
    let cycles = s.cycles();
    if let Some(c) = cycles.iter().find(|c| c.len() % 2 == 0) {
        return Some(Permutation::from_cycles(n, std::slice::from_ref(c)).expect("cycle"));
    }
    let fixed: Vec<u32> = (0..n as u32).filter(|&p| s.image(p) == p).collect();
    if fixed.len() >= 2 {
        return Some(Permutation::from_cycles(n, &[vec![fixed[0], fixed[1]]]).expect("transposition"));
    }
    for (i, a) in cycles.iter().enumerate() {
        if let Some(b) = cycles[i + 1..].iter().find(|b| b.len() == a.len()) {
            let swaps: Vec<Vec<u32>> = a.iter().zip(b).map(|(&x, &y)| vec![x, y]).collect();
            return Some(Permutation::from_cycles(n, &swaps).expect("swap"));
        }
    }
    None
}

/// Unions `U` of orbits of `<s>` (fixed points included) with
/// `0 < |U| < n/2`, or `|U| = n/2` with the first orbit inside, so that each
/// pair `{U, U^c}` appears once.
fn orbit_unions(s: &Permutation) -> Vec<Vec<u32>> {
    let n = s.degree();
    let orbs = orbits(&[s.clone()], n);
    if orbs.len() > 16 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for mask in 1u32..(1 << orbs.len()) - 1 {
        let size: usize = (0..orbs.len()).filter(|i| mask >> i & 1 == 1).map(|i| orbs[i].len()).sum();
        if 2 * size < n || (2 * size == n && mask & 1 == 1) {
            let mut u: Vec<u32> = (0..orbs.len())
                .filter(|i| mask >> i & 1 == 1)
                .flat_map(|i| orbs[i].iter().cloned())
                .collect();
            u.sort_unstable();
            out.push(u);
        }
    }
    out
}

/// Generators of the setwise stabilizer of `u` in `S_n`, or in `A_n`.
pub fn set_stabilizer(n: usize, u: &[u32], alternating: bool) -> Vec<Permutation> {
    let inside: Vec<u32> = u.to_vec();
    let outside: Vec<u32> = (0..n as u32).filter(|p| !u.contains(p)).collect();
    let mut gens = Vec::new();
    for part in [&inside, &outside] {
        if part.len() >= 2 {
            gens.push(Permutation::from_cycles(n, &[vec![part[0], part[1]]]).expect("transposition"));
            gens.push(Permutation::from_cycles(n, &[part.clone()]).expect("cycle"));
        }
    }
    if !alternating {
        return gens;
    }
    // Schreier generators of the even part, with coset representatives 1, tau
    let Some(tau) = gens.iter().find(|g| !g.is_even()).cloned() else {
        return gens;
    };
    let mut even = Vec::new();
    for x in &gens {
        for y in [x.clone(), tau.mul(x)] {
            let z = if y.is_even() { y } else { y.mul(&tau) };
            if !z.is_identity() {
                even.push(z);
            }
        }
    }
    even.sort();
    even.dedup();
    even
}

/// Number of maximal intransitive subgroups of `A_n` or `S_n` containing
/// `s`: the pairs `{U, U^c}` of unions of `s`-orbits with `|U| != n/2`.
pub fn intransitive_count(s: &Permutation) -> usize {
    let n = s.degree();
    let lengths: Vec<usize> = orbits(&[s.clone()], n).iter().map(|o| o.len()).collect();
    // ways[t]: number of unions of orbits of total size t
    let mut ways = vec![0u128; n + 1];
    ways[0] = 1;
    for &l in &lengths {
        for t in (l..=n).rev() {
            ways[t] += ways[t - l];
        }
    }
    let total: u128 = (1..n).filter(|&t| 2 * t != n).map(|t| ways[t]).sum();
    (total / 2).min(usize::MAX as u128) as usize
}

fn estimated(group: &Group, s: &Permutation, opts: &ClimbOptions) -> Result<OvergroupSet> {
    let mut sampler = Sampler::new(group, rng::derive(opts.seed, 0x65_7374));
    let mut joins = 0u64;
    let root = Subgroup::cyclic(group, s)?;
    let whole = group.order();
    let mut found: Vec<Subgroup> = Vec::new();
    let push = |found: &mut Vec<Subgroup>, h: Subgroup| {
        if h.order() != whole && !found.iter().any(|k| subgroup_equal(k, &h)) {
            found.push(h);
        }
    };
    let (normalizing, seed_sets) = seeds(group, s);
    for gens in seed_sets {
        if let Ok(h) = Subgroup::new(group, gens) {
            push(&mut found, h);
        }
    }
    let root_samples = opts.budget.saturating_mul(sampler.streams());
    for _ in 0..root_samples {
        let g = sampler.next(group);
        if root.contains(&g) {
            continue;
        }
        joins += 1;
        let h = root.join(group, &g)?;
        push(&mut found, h);
    }
    // climb every candidate until random joins stop producing proper overgroups
    let s_order = s.order_big();
    let mut climbed: Vec<Subgroup> = Vec::new();
    for mut h in found {
        loop {
            let ratio = (BigUint::from(opts.budget) * &s_order / h.order()).to_u64().unwrap_or(u64::MAX);
            let tries = ratio.clamp(64, opts.budget.max(64));
            let mut grew = false;
            for _ in 0..tries {
                let g = sampler.next(group);
                if h.contains(&g) {
                    continue;
                }
                joins += 1;
                let k = h.join(group, &g)?;
                if k.order() != whole {
                    h = k;
                    grew = true;
                    break;
                }
            }
            if !grew {
                break;
            }
        }
        if !climbed.iter().any(|k| subgroup_equal(k, &h)) {
            climbed.push(h);
        }
    }
    // conjugation by N_G(<s>) permutes M(G, s)
    let mut i = 0;
    while i < climbed.len() {
        for t in &normalizing {
            let c = climbed[i].conjugate(t);
            if !climbed.iter().any(|k| subgroup_equal(k, &c)) {
                climbed.push(c);
            }
        }
        i += 1;
    }
    let mut maximal: Vec<Subgroup> = Vec::new();
    for (i, h) in climbed.iter().enumerate() {
        let inside_other = climbed
            .iter()
            .enumerate()
            .any(|(j, k)| j != i && k.order() > h.order() && k.contains_subgroup(h));
        if !inside_other {
            maximal.push(h.clone());
        }
    }
    sort_subgroups(&mut maximal);
    Ok(OvergroupSet {
        element: s.clone(),
        subgroups: maximal,
        mode: Mode::Estimated,
        budget_used: joins,
        complete: true,
    })
}

/// Replays maximality: `<H, g>` must be `H` or `G` for random `g`.
pub fn check_maximality(group: &Group, set: &OvergroupSet, samples: u64, seed: u64) -> Result<bool> {
    let mut rng = rng::stream(seed, 0x6d6178);
    for h in &set.subgroups {
        if !h.contains(&set.element) || h.order() == group.order() {
            return Ok(false);
        }
        for _ in 0..samples {
            let g = group.random_element(&mut rng);
            if h.contains(&g) {
                continue;
            }
            if h.join(group, &g)?.order() != group.order() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassStatus {
    /// `M(G, s)` computed in full.
    Computed,
    /// Skipped: the intransitive lower bound already reaches the best value.
    Bounded,
    /// Abandoned once as many overgroups as the best value were found.
    Stopped,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassRecord {
    pub class: usize,
    pub element_order: u64,
    pub fixed_points: usize,
    pub lower_bound: usize,
    /// Exact count when computed; otherwise a lower bound.
    pub count: usize,
    pub status: ClassStatus,
}

#[derive(Clone, Debug)]
pub struct MuResult {
    pub value: usize,
    pub witness_class: usize,
    pub witness: Permutation,
    pub overgroups: OvergroupSet,
    pub mode: Mode,
    pub records: Vec<ClassRecord>,
}

/// `mu(G)`, the least `|M(G, s)|`.
///
/// Only power-covering classes are examined, since `M(G, s)` is contained in
/// `M(G, s^l)`. They are taken in order of fewest fixed points, then larger
/// element order, then class index; a later class must be strictly better to
/// become the witness. In `A_n` and `S_n` a class whose intransitive count
/// already reaches the best value is skipped.
pub fn mu(group: &Group, opts: &ClimbOptions) -> Result<MuResult> {
    if opts.mode == Mode::Certified {
        group.enumerable_order()?;
    }
    let table = group.classes()?;
    let natural = matches!(group.family(), Family::Alternating(n) | Family::Symmetric(n) if n == group.degree());
    let mut reps = table.power_covering();
    if reps.is_empty() {
        return Err(Error::invalid("the trivial group has no nonidentity elements"));
    }
    reps.sort_by_key(|&c| {
        let ci = table.class(c);
        (ci.rep.fixed_points(), std::cmp::Reverse(ci.order), c)
    });
    let mut best: Option<(usize, OvergroupSet)> = None;
    let mut records = Vec::new();
    for c in reps {
        let ci = table.class(c);
        let lower_bound = if natural { intransitive_count(&ci.rep) } else { 0 };
        let best_value = best.as_ref().map(|(_, set)| set.len());
        let mut record = ClassRecord {
            class: c,
            element_order: ci.order,
            fixed_points: ci.rep.fixed_points(),
            lower_bound,
            count: lower_bound,
            status: ClassStatus::Bounded,
        };
        if best_value.is_some_and(|b| lower_bound >= b) {
            records.push(record);
            continue;
        }
        let climb = ClimbOptions {
            stop_at: best_value,
            ..opts.clone()
        };
        let set = maximal_overgroups(group, &ci.rep, &climb)?;
        record.count = set.len();
        record.status = if set.complete {
            ClassStatus::Computed
        } else {
            ClassStatus::Stopped
        };
        records.push(record);
        if set.complete && best_value.is_none_or(|b| set.len() < b) {
            best = Some((c, set));
        }
        if best.as_ref().is_some_and(|(_, set)| set.len() == 1) {
            break;
        }
    }
    let (witness_class, overgroups) = best.expect("some class was computed");
    Ok(MuResult {
        value: overgroups.len(),
        witness_class,
        witness: overgroups.element.clone(),
        overgroups,
        mode: opts.mode,
        records,
    })
}

#[derive(Clone, Debug)]
pub struct CountIdentity {
    /// Conjugates of `H` containing `s`, counted over the conjugacy orbit.
    pub count: usize,
    /// `fpr(s, G/H) * |G:H|`.
    pub fpr_times_index: BigRational,
    /// Number of conjugates, `|G : N_G(H)|`.
    pub conjugates: usize,
    pub self_normalizing: bool,
}

impl CountIdentity {
    /// `fpr * index = count * |N_G(H) : H|`, which is the count itself when
    /// `H` is self-normalizing.
    pub fn holds(&self, index: &BigUint) -> bool {
        let norm_over_h = BigRational::new(index.clone().into(), BigUint::from(self.conjugates).into());
        self.fpr_times_index == BigRational::from_integer(self.count.into()) * norm_over_h
    }
}

/// Counts the conjugates of `H` containing `s` directly, and compares with
/// the fixed point ratio of `s` on `G/H`.
pub fn overgroup_count_identity(group: &Group, s: &Permutation, h: &Subgroup) -> Result<CountIdentity> {
    if h.order() == group.order() {
        return Err(Error::invalid("H must be a proper subgroup"));
    }
    group.enumerable_order()?;
    let action = CosetAction::new(group, h)?;
    let index = action.degree();
    let fpr_times_index = action.fpr(s) * BigRational::from_integer(index.into());
    // conjugacy orbit of H, keyed by membership of a fixed random sample
    let mut rng = rng::stream(group.seed(), 0x636f6e6a);
    let probe: Vec<Permutation> = (0..64).map(|_| group.random_element(&mut rng)).collect();
    let signature = |k: &Subgroup| -> Vec<bool> { probe.iter().map(|x| k.contains(x)).collect() };
    let mut orbit = vec![h.clone()];
    let mut keys: HashMap<Vec<bool>, Vec<usize>> = HashMap::new();
    keys.entry(signature(h)).or_default().push(0);
    let mut i = 0;
    while i < orbit.len() {
        for g in group.generators() {
            let c = orbit[i].conjugate(g);
            let sig = signature(&c);
            let bucket = keys.entry(sig).or_default();
            if bucket.iter().any(|&j| subgroup_equal(&orbit[j], &c)) {
                continue;
            }
            bucket.push(orbit.len());
            orbit.push(c);
            if orbit.len() > index {
                return Err(Error::invalid("conjugacy orbit exceeds the index"));
            }
        }
        i += 1;
    }
    let count = orbit.iter().filter(|k| k.contains(s)).count();
    Ok(CountIdentity {
        count,
        fpr_times_index,
        conjugates: orbit.len(),
        self_normalizing: orbit.len() == index,
    })
}
