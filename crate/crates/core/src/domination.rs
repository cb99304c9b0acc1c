//! Total dominating sets of the generating graph made of conjugates of one
//! element: verification, search, refutation and the assembled bracket for
//! the uniform domination number.

use std::collections::{HashMap, HashSet};

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::action::{binomial, CosetAction};
use crate::base::{base_size, Strategy};
use crate::classes::{centralizer, enumerate_class};
use crate::error::{Error, Result};
use crate::group::Group;
use crate::overgroups::{maximal_overgroups, ClimbOptions, Mode, OvergroupSet};
use crate::perm::Permutation;
use crate::prob::{min_c, profile, BoundMethod, MinC};
use crate::rng;
use crate::subgroup::Subgroup;

/// Does `<x, y>` equal `G`?
pub fn generates(group: &Group, x: &Permutation, y: &Permutation) -> bool {
    group.generates(&[x.clone(), y.clone()])
}

fn is_prime(n: u64) -> bool {
    crate::field::is_prime(n)
}

/// Direct domination test against every prime-order element. An element `x`
/// is dominated once a prime-order power of it is, since that power
/// generates a subgroup of `<x, s>`.
pub struct DirectChecker<'a> {
    group: &'a Group,
    primes: Vec<Permutation>,
    memo: HashMap<(usize, u64), bool>,
}

impl<'a> DirectChecker<'a> {
    pub fn new(group: &'a Group) -> Result<Self> {
        let primes = group.elements()?.filter(|x| is_prime(x.order())).collect();
        Ok(DirectChecker {
            group,
            primes,
            memo: HashMap::new(),
        })
    }

    pub fn prime_elements(&self) -> &[Permutation] {
        &self.primes
    }

    pub fn is_tds(&mut self, set: &[Permutation]) -> bool {
        let ranks: Vec<u64> = set.iter().map(|s| self.group.chain().rank(s)).collect();
        for i in 0..self.primes.len() {
            let mut dominated = false;
            for (s, &r) in set.iter().zip(&ranks) {
                let key = (i, r);
                let ok = match self.memo.get(&key) {
                    Some(&v) => v,
                    None => {
                        let v = generates(self.group, &self.primes[i], s);
                        self.memo.insert(key, v);
                        v
                    }
                };
                if ok {
                    dominated = true;
                    break;
                }
            }
            if !dominated {
                return false;
            }
        }
        true
    }
}

/// Direct test, enumerating the group.
pub fn is_tds_direct(group: &Group, set: &[Permutation]) -> Result<bool> {
    for s in set {
        group.check_member(s)?;
    }
    Ok(DirectChecker::new(group)?.is_tds(set))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CriterionVerdict {
    pub is_tds: bool,
    /// True only when every overgroup set is certified and complete.
    pub certified: bool,
}

/// Criterion test: the set is total dominating iff every choice of one
/// maximal overgroup per member intersects trivially.
pub fn is_tds_criterion(sets: &[OvergroupSet], cap: u64) -> Result<CriterionVerdict> {
    let certified = sets.iter().all(|s| s.is_certified());
    let lists: Vec<Vec<&Subgroup>> = sets.iter().map(|s| s.subgroups.iter().collect()).collect();
    let is_tds = if lists.iter().any(|l| l.is_empty()) {
        // some member generates G on its own, which no nonidentity element
        // of a noncyclic group does; treat it as dominating everything
        true
    } else {
        all_tuples_trivial(&lists, cap)?
    };
    Ok(CriterionVerdict { is_tds, certified })
}

fn all_tuples_trivial(lists: &[Vec<&Subgroup>], cap: u64) -> Result<bool> {
    fn rec(lists: &[Vec<&Subgroup>], i: usize, current: &[Permutation]) -> bool {
        if current.is_empty() {
            return true;
        }
        if i == lists.len() {
            return false;
        }
        lists[i].iter().all(|h| {
            let next: Vec<Permutation> = current.iter().filter(|x| h.contains(x)).cloned().collect();
            rec(lists, i + 1, &next)
        })
    }
    for h in &lists[0] {
        let elems: Vec<Permutation> = h.elements(cap)?.filter(|x| !x.is_identity()).collect();
        if !rec(lists, 1, &elems) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Criterion test for sets of conjugates `s^g` of one element, with
/// `M(G, s^g) = M(G, s)^g`. Elements of each `H` are enumerated once.
pub struct ConjugateCriterion {
    subgroups: Vec<Subgroup>,
    elements: Vec<Vec<Permutation>>,
    certified: bool,
}

impl ConjugateCriterion {
    pub fn new(set: &OvergroupSet, cap: u64) -> Result<Self> {
        let mut subgroups = set.subgroups.clone();
        subgroups.sort_by(|a, b| a.order().cmp(b.order()));
        let elements = subgroups
            .iter()
            .map(|h| Ok(h.elements(cap)?.filter(|x| !x.is_identity()).collect()))
            .collect::<Result<Vec<Vec<Permutation>>>>()?;
        Ok(ConjugateCriterion {
            subgroups,
            elements,
            certified: set.is_certified(),
        })
    }

    pub fn certified(&self) -> bool {
        self.certified
    }

    /// Is `{s^g : g in conjugators}` total dominating?
    pub fn is_tds(&self, conjugators: &[Permutation]) -> bool {
        if self.subgroups.is_empty() {
            return true;
        }
        let inverses: Vec<Permutation> = conjugators.iter().map(|g| g.inverse()).collect();
        // x in H^g iff x^(g^-1) in H
        let member = |h: usize, i: usize, x: &Permutation| self.subgroups[h].contains(&x.conjugate_by(&inverses[i]));
        fn rec(
            this: &ConjugateCriterion,
            member: &dyn Fn(usize, usize, &Permutation) -> bool,
            i: usize,
            c: usize,
            current: &[Permutation],
        ) -> bool {
            if current.is_empty() {
                return true;
            }
            if i == c {
                return false;
            }
            (0..this.subgroups.len()).all(|h| {
                let next: Vec<Permutation> = current.iter().filter(|x| member(h, i, x)).cloned().collect();
                rec(this, member, i + 1, c, &next)
            })
        }
        (0..self.subgroups.len()).all(|h| {
            let first: Vec<Permutation> = self.elements[h].iter().map(|x| x.conjugate_by(&conjugators[0])).collect();
            rec(self, &member, 1, conjugators.len(), &first)
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verification {
    Direct,
    Criterion,
}

/// A total dominating set `{s^g_1, ..., s^g_c}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TdsCertificate {
    pub group: String,
    pub degree: usize,
    pub element: String,
    pub conjugators: Vec<String>,
    pub verification: Verification,
    pub seed: u64,
    pub budget: u64,
}

impl TdsCertificate {
    pub fn size(&self) -> usize {
        self.conjugators.len()
    }

    pub fn element(&self) -> Result<Permutation> {
        Permutation::parse(&self.element, self.degree)
    }

    pub fn conjugator_perms(&self) -> Result<Vec<Permutation>> {
        self.conjugators.iter().map(|c| Permutation::parse(c, self.degree)).collect()
    }

    /// The members `s^g_i`.
    pub fn members(&self) -> Result<Vec<Permutation>> {
        let s = self.element()?;
        Ok(self.conjugator_perms()?.iter().map(|g| s.conjugate_by(g)).collect())
    }

    /// Re-verifies against `group`: membership, distinct members, at least
    /// two of them, and domination by the recorded method.
    /// Checks the certificate. Criterion verification against an estimated
    /// `M(G, s)` can only reject with certainty; acceptance is then
    /// reported uncertified.
    pub fn verify(&self, group: &Group, overgroups: Option<&OvergroupSet>) -> Result<CriterionVerdict> {
        let reject = CriterionVerdict {
            is_tds: false,
            certified: true,
        };
        if self.degree != group.degree() {
            return Ok(reject);
        }
        let s = self.element()?;
        let gs = self.conjugator_perms()?;
        if !group.contains(&s) || gs.iter().any(|g| !group.contains(g)) {
            return Ok(reject);
        }
        let members: Vec<Permutation> = gs.iter().map(|g| s.conjugate_by(g)).collect();
        let distinct: HashSet<&Permutation> = members.iter().collect();
        if distinct.len() != members.len() || members.len() < 2 || s.is_identity() {
            return Ok(reject);
        }
        match self.verification {
            Verification::Direct => Ok(CriterionVerdict {
                is_tds: is_tds_direct(group, &members)?,
                certified: true,
            }),
            Verification::Criterion => {
                let Some(set) = overgroups else {
                    return Err(Error::invalid("criterion verification needs M(G, s)"));
                };
                if set.element != s {
                    return Err(Error::invalid("overgroups are for a different element"));
                }
                let is_tds = ConjugateCriterion::new(set, group.limits().enum_cap)?.is_tds(&gs);
                Ok(CriterionVerdict {
                    is_tds,
                    certified: !is_tds || set.is_certified(),
                })
            }
        }
    }
}

/// Either verifier, chosen once per class.
pub enum Verifier<'a> {
    Direct(Box<DirectChecker<'a>>),
    Criterion(ConjugateCriterion),
}

impl<'a> Verifier<'a> {
    /// Criterion when certified overgroups are given, direct otherwise.
    pub fn new(group: &'a Group, overgroups: Option<&OvergroupSet>) -> Result<Self> {
        match overgroups {
            Some(set) if set.is_certified() => Ok(Verifier::Criterion(ConjugateCriterion::new(
                set,
                group.limits().enum_cap,
            )?)),
            _ => Ok(Verifier::Direct(Box::new(DirectChecker::new(group)?))),
        }
    }

    pub fn kind(&self) -> Verification {
        match self {
            Verifier::Direct(_) => Verification::Direct,
            Verifier::Criterion(_) => Verification::Criterion,
        }
    }

    pub fn is_tds(&mut self, s: &Permutation, conjugators: &[Permutation]) -> bool {
        match self {
            Verifier::Direct(d) => {
                let members: Vec<Permutation> = conjugators.iter().map(|g| s.conjugate_by(g)).collect();
                d.is_tds(&members)
            }
            Verifier::Criterion(c) => c.is_tds(conjugators),
        }
    }
}

/// Random search for a total dominating set of `c` conjugates of `s`, with
/// `s` itself always the first member.
pub fn gamma_u_upper_random(
    group: &Group,
    s: &Permutation,
    c: usize,
    trials: u64,
    seed: u64,
    overgroups: Option<&OvergroupSet>,
) -> Result<Option<TdsCertificate>> {
    if c < 2 {
        return Ok(None);
    }
    let mut verifier = Verifier::new(group, overgroups)?;
    let mut rng = rng::stream(seed, 0x746473);
    for _ in 0..trials {
        let mut gs = vec![group.identity()];
        let mut members: HashSet<Permutation> = HashSet::from([s.clone()]);
        while gs.len() < c {
            let g = group.random_element(&mut rng);
            if members.insert(s.conjugate_by(&g)) {
                gs.push(g);
            }
        }
        if verifier.is_tds(s, &gs) {
            return Ok(Some(TdsCertificate {
                group: group.name().to_string(),
                degree: group.degree(),
                element: s.to_string(),
                conjugators: gs.iter().map(|g| g.to_string()).collect(),
                verification: verifier.kind(),
                seed,
                budget: trials,
            }));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "lowercase")]
pub enum Refutation {
    /// No `c`-set of the class containing `s` dominates.
    Refuted {
        class_size: u64,
        c: usize,
        /// Subsets tested, one per centralizer orbit.
        tuples_checked: u64,
        /// Subsets accounted for by the orbits; equals `C(|class| - 1, c - 1)`.
        tuples_covered: u64,
    },
    Found(TdsCertificate),
    Inconclusive {
        c: usize,
        tuples_checked: u64,
    },
}

/// A refutation tagged with the class it covers.
#[derive(Clone, Debug, Serialize)]
pub struct ClassRefutation {
    pub class: usize,
    #[serde(flatten)]
    pub result: Refutation,
}

impl Refutation {
    pub fn is_refuted(&self) -> bool {
        matches!(self, Refutation::Refuted { .. })
    }
}

/// Exhaustive search over `c`-sets of conjugates of `s` containing `s`.
/// The `(c-1)`-subsets of the other class members are taken up to the
/// action of `C_G(s)`, which fixes `s` and permutes total dominating sets.
pub fn gamma_u_exhaustive_refute(
    group: &Group,
    s: &Permutation,
    c: usize,
    budget: u64,
    overgroups: Option<&OvergroupSet>,
) -> Result<Refutation> {
    let cap = group.limits().enum_cap;
    let cls = enumerate_class(group, s, cap)?;
    let m = cls.members.len();
    let class_size = m as u64;
    if c == 0 || c > m {
        return Ok(Refutation::Refuted {
            class_size,
            c,
            tuples_checked: 0,
            tuples_covered: 0,
        });
    }
    let index: HashMap<&Permutation, usize> = cls.members.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let cent = centralizer(group, s, cap)?;
    let cent_elems: Vec<Permutation> = cent.elements(cap)?.filter(|z| !z.is_identity()).collect();
    // action of each centralizer element on member indices
    let perms: Vec<Vec<u32>> = cent_elems
        .iter()
        .map(|z| cls.members.iter().map(|x| index[&x.conjugate_by(z)] as u32).collect())
        .collect();
    let mut verifier = Verifier::new(group, overgroups)?;
    let k = c - 1;
    let mut checked = 0u64;
    let mut covered = 0u64;
    let mut subset: Vec<u32> = (1..=k as u32).collect();
    let mut image = vec![0u32; k];
    loop {
        // canonical iff lexicographically least among its images
        let mut canonical = true;
        let mut images: HashSet<Vec<u32>> = HashSet::new();
        images.insert(subset.clone());
        for p in &perms {
            for (j, &i) in subset.iter().enumerate() {
                image[j] = p[i as usize];
            }
            image.sort_unstable();
            if image < subset {
                canonical = false;
                break;
            }
            images.insert(image.clone());
        }
        if canonical {
            if checked >= budget {
                return Ok(Refutation::Inconclusive {
                    c,
                    tuples_checked: checked,
                });
            }
            checked += 1;
            covered += images.len() as u64;
            let mut gs = vec![group.identity()];
            gs.extend(subset.iter().map(|&i| cls.conjugators[i as usize].clone()));
            if verifier.is_tds(s, &gs) {
                return Ok(Refutation::Found(TdsCertificate {
                    group: group.name().to_string(),
                    degree: group.degree(),
                    element: s.to_string(),
                    conjugators: gs.iter().map(|g| g.to_string()).collect(),
                    verification: verifier.kind(),
                    seed: group.seed(),
                    budget,
                }));
            }
        }
        if !next_subset(&mut subset, m as u32) {
            break;
        }
    }
    Ok(Refutation::Refuted {
        class_size,
        c,
        tuples_checked: checked,
        tuples_covered: covered,
    })
}

/// Next `k`-subset of `{1, ..., m-1}` in lexicographic order.
fn next_subset(subset: &mut [u32], m: u32) -> bool {
    let k = subset.len();
    if k == 0 {
        return false;
    }
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] < m - (k - i) as u32 {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[derive(Clone, Debug, Serialize)]
pub struct LowerClassRecord {
    pub class: usize,
    pub overgroup_orders: Vec<String>,
    /// `None` for an overgroup with a nontrivial core, whose coset action
    /// has no base.
    pub base_sizes: Vec<Option<usize>>,
    /// `None` when no set of conjugates of the class dominates: every
    /// conjugate lies in a subgroup containing the same normal subgroup.
    pub max_base: Option<usize>,
}

/// Orders bounds with `None`, no dominating set at all, above every size.
fn bound_key(b: Option<usize>) -> usize {
    b.unwrap_or(usize::MAX)
}

#[derive(Clone, Debug, Serialize)]
pub struct LowerBound {
    /// Always a valid lower bound.
    pub value: usize,
    /// Every overgroup set was complete and every base size exact, so no
    /// better bound of this kind exists.
    pub certified: bool,
    pub classes: Vec<LowerClassRecord>,
}

/// Least over power-covering classes of the largest `b(G, G/H)` with `H` in
/// `M(G, s)`: a set of `c` conjugates of `s` dominates only if the points
/// `H^g_i` form a base for every proper `H` containing `s`, and powers
/// inherit overgroups.
pub fn gamma_u_lower(group: &Group, mode: Mode, seed: u64) -> Result<LowerBound> {
    let table = group.classes()?;
    let climb = ClimbOptions::new(mode, crate::overgroups::DEFAULT_BUDGET, seed);
    let mut classes = Vec::new();
    let mut certified = true;
    for c in table.power_covering() {
        let set = maximal_overgroups(group, &table.class(c).rep, &climb)?;
        let (record, exact) = class_lower(group, c, &set, seed)?;
        certified &= exact && set.is_certified();
        classes.push(record);
    }
    Ok(LowerBound {
        value: lower_value(&classes),
        certified,
        classes,
    })
}

fn lower_value(classes: &[LowerClassRecord]) -> usize {
    // a single element never dominates a noncyclic group
    classes.iter().filter_map(|r| r.max_base).min().unwrap_or(2).max(2)
}

/// Base sizes of the coset actions on a set of proper overgroups of a class
/// representative. Completeness of the set only matters for optimality.
fn class_lower(group: &Group, class: usize, set: &OvergroupSet, seed: u64) -> Result<(LowerClassRecord, bool)> {
    let mut exact = true;
    let mut bases = Vec::new();
    for h in &set.subgroups {
        let action = CosetAction::new(group, h)?;
        match action.faithful_image(seed)? {
            Some(pg) => {
                let cert = base_size(&pg, Strategy::Exact, group.limits().node_budget, seed)?;
                exact &= cert.is_exact();
                bases.push(Some(cert.lower));
            }
            None => bases.push(None),
        }
    }
    let max_base = if bases.contains(&None) {
        None
    } else {
        Some(bases.iter().flatten().copied().max().unwrap_or(0))
    };
    let record = LowerClassRecord {
        class,
        overgroup_orders: set.subgroups.iter().map(|h| h.order().to_string()).collect(),
        base_sizes: bases,
        max_base,
    };
    Ok((record, exact))
}

#[derive(Clone, Debug)]
pub struct BracketConfig {
    pub mode: Mode,
    pub climb_budget: u64,
    pub trials: u64,
    /// Canonical subsets allowed per refutation.
    pub refute_budget: u64,
    pub c_max: usize,
    pub seed: u64,
}

impl Default for BracketConfig {
    fn default() -> Self {
        BracketConfig {
            mode: Mode::Certified,
            climb_budget: crate::overgroups::DEFAULT_BUDGET,
            trials: 2000,
            refute_budget: 200_000,
            c_max: 8,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassBounds {
    pub class: usize,
    pub element_order: u64,
    /// Lower bound for this class from base sizes.
    pub base_bound: Option<usize>,
    /// Unset when the base bound already meets the upper bound and the
    /// full climb was skipped.
    pub overgroup_mode: Option<Mode>,
    pub overgroups: Option<usize>,
    pub q_hat_c: Option<usize>,
    pub search_c: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub group: String,
    pub order: String,
    pub lower: usize,
    pub upper: Option<usize>,
    pub lower_source: String,
    pub upper_source: String,
    /// The upper bound rests on a certificate or on complete overgroup sets.
    pub certified: bool,
    pub classes: Vec<ClassBounds>,
    pub certificate: Option<TdsCertificate>,
    pub refutations: Vec<ClassRefutation>,
    pub lower_detail: LowerBound,
}

/// Random elements per sampler for the cheap overgroup probe.
const PROBE_BUDGET: u64 = 200;

/// The bracket for `gamma_u(G)`.
///
/// Only power-covering classes are searched: if `s^l = t` then
/// `M(G, s) <= M(G, t)`, so conjugators that make a dominating set from the
/// class of `t` make one from the class of `s` too. Classes go largest
/// element order first.
///
/// Each class first gets a cheap estimated climb. Any proper overgroup `H`
/// of `s` forces `b(G, G/H)` conjugates, so the probe gives a sound lower
/// bound for the class, and a class whose bound meets the current upper
/// bound is not climbed in full.
///
/// Upper bounds: the least `c` with `Q^(G, s, c) < 1`, and random search for
/// certificates up to it. Lower bounds: 2, the base-size bound, then
/// exhaustive refutation of `upper - 1` in the classes the base sizes leave
/// open. Adding conjugates to a dominating set keeps it dominating, so
/// refuting `c` refutes every smaller size.
pub fn gamma_u_bracket(group: &Group, config: &BracketConfig) -> Result<BoundReport> {
    let table = group.classes()?;
    let mut order = table.power_covering();
    order.sort_by(|&a, &b| table.class(b).order.cmp(&table.class(a).order).then(a.cmp(&b)));
    let probe = ClimbOptions::estimated(PROBE_BUDGET.min(config.climb_budget), config.seed);
    let climb = ClimbOptions::new(config.mode, config.climb_budget, config.seed);
    let mut upper: Option<usize> = None;
    let mut upper_source = String::from("none");
    let mut certificate: Option<TdsCertificate> = None;
    let mut certified_upper = true;
    let mut classes = Vec::new();
    let mut lower_records = Vec::new();
    let mut lower_exact = true;
    // classes that were climbed in full, for refutation
    let mut open: Vec<(usize, OvergroupSet)> = Vec::new();
    for &c in &order {
        let s = table.class(c).rep.clone();
        let quick = maximal_overgroups(group, &s, &probe)?;
        let (mut low, _) = class_lower(group, c, &quick, config.seed)?;
        let mut record = ClassBounds {
            class: c,
            element_order: table.class(c).order,
            base_bound: low.max_base,
            overgroup_mode: None,
            overgroups: None,
            q_hat_c: None,
            search_c: None,
        };
        if upper.is_some_and(|u| bound_key(low.max_base) >= u) || low.max_base.is_none() {
            lower_exact = false;
            classes.push(record);
            lower_records.push(low);
            continue;
        }
        let set = maximal_overgroups(group, &s, &climb)?;
        let (full, exact) = class_lower(group, c, &set, config.seed)?;
        lower_exact &= exact && set.is_certified();
        if bound_key(full.max_base) >= bound_key(low.max_base) {
            low = full;
        }
        record.base_bound = low.max_base;
        record.overgroup_mode = Some(set.mode);
        record.overgroups = Some(set.len());
        let prof = profile(group, &set, false)?;
        record.q_hat_c = match min_c(&prof, BoundMethod::QHat, config.c_max) {
            MinC::Found(k) => Some(k),
            _ => None,
        };
        if let Some(k) = record.q_hat_c {
            if upper.is_none_or(|u| k < u) {
                upper = Some(k);
                upper_source = format!("q_hat < 1 for class {c} at c = {k}");
                certified_upper = set.is_certified();
            }
        }
        // search up to the current upper bound, so that a bound from Q^
        // also gets an explicit certificate
        let ceiling = upper.unwrap_or(config.c_max).min(config.c_max);
        let verify = if set.is_certified() { Some(&set) } else { None };
        for k in low.max_base.unwrap_or(2).max(2)..=ceiling {
            if certificate.is_some() && upper.is_some_and(|u| k >= u) {
                break;
            }
            if let Some(cert) = gamma_u_upper_random(group, &s, k, config.trials, config.seed, verify)? {
                record.search_c = Some(k);
                if upper.is_none_or(|u| k < u) {
                    upper = Some(k);
                    upper_source = format!("certificate in class {c} of size {k}");
                    certified_upper = true;
                }
                certificate = Some(cert);
                break;
            }
        }
        classes.push(record);
        lower_records.push(low);
        open.push((c, set));
    }
    let lower_detail = LowerBound {
        value: lower_value(&lower_records),
        certified: lower_exact,
        classes: lower_records,
    };
    let mut lower = 2;
    let mut lower_source = String::from("a single element never dominates");
    if lower_detail.value > lower {
        lower = lower_detail.value;
        lower_source = "base sizes of proper overgroups".into();
    }
    let mut refutations = Vec::new();
    if let Some(u) = upper {
        if lower < u {
            let c = u - 1;
            let mut all = true;
            for (cl, set) in &open {
                if lower_detail.classes.iter().any(|r| r.class == *cl && bound_key(r.max_base) > c) {
                    continue;
                }
                let s = &table.class(*cl).rep;
                // criterion only on certified sets; direct otherwise
                let verify = if set.is_certified() { Some(set) } else { None };
                let r = gamma_u_exhaustive_refute(group, s, c, config.refute_budget, verify)?;
                let refuted = r.is_refuted();
                refutations.push(ClassRefutation { class: *cl, result: r });
                if !refuted {
                    all = false;
                    break;
                }
            }
            if all {
                lower = u;
                lower_source = format!("base sizes and exhaustive refutation of c = {c}");
            }
        }
    }
    Ok(BoundReport {
        group: group.name().to_string(),
        order: group.order().to_string(),
        lower,
        upper,
        lower_source,
        upper_source,
        certified: certified_upper,
        classes,
        certificate,
        refutations,
        lower_detail,
    })
}

/// `C(|class| - 1, c - 1)`, the number of `c`-sets containing `s`.
pub fn expected_tuples(class_size: u64, c: usize) -> u64 {
    binomial(class_size.saturating_sub(1), c.saturating_sub(1) as u64)
        .to_u64()
        .unwrap_or(u64::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::GroupSpec;
    use crate::group::Limits;
    use crate::overgroups::ClimbOptions;
    use crate::rng::Rng;

    fn group(name: &str) -> Group {
        Group::new(&name.parse::<GroupSpec>().unwrap(), Limits::default(), 0).unwrap()
    }

    fn perm(text: &str, n: usize) -> Permutation {
        Permutation::parse(text, n).unwrap()
    }

    /// Order of `<xs>` by closing the generated set under products.
    fn closure_order(xs: &[Permutation]) -> usize {
        let mut seen: HashSet<Permutation> = HashSet::from([xs[0].mul(&xs[0].inverse())]);
        let mut frontier: Vec<Permutation> = seen.iter().cloned().collect();
        while let Some(y) = frontier.pop() {
            for x in xs {
                let z = y.mul(x);
                if seen.insert(z.clone()) {
                    frontier.push(z);
                }
            }
        }
        seen.len()
    }

    #[test]
    fn generation() {
        let g = group("A5");
        let s = perm("(1,2,3,4,5)", 5);
        let t = perm("(1,2)(3,4)", 5);
        assert!(!generates(&g, &s, &s));
        assert!(!generates(&g, &g.identity(), &t));
        assert_eq!(closure_order(&[s.clone(), t.clone()]), 60);
        assert!(generates(&g, &s, &t));
    }

    #[test]
    fn a5_five_cycles() {
        let g = group("A5");
        let s = perm("(1,2,3,4,5)", 5);
        let set = maximal_overgroups(&g, &s, &ClimbOptions::certified()).unwrap();
        assert!(!is_tds_direct(&g, &[s.clone()]).unwrap());
        assert!(!is_tds_criterion(&[set.clone()], 1000).unwrap().is_tds);
        // s and s^2 share their D10
        let pair = [set.clone(), maximal_overgroups(&g, &s.pow(2), &ClimbOptions::certified()).unwrap()];
        assert!(!is_tds_criterion(&pair, 1000).unwrap().is_tds);
        for seed in 0..3 {
            assert!(gamma_u_upper_random(&g, &s, 2, 500, seed, Some(&set)).unwrap().is_none());
        }
        let cert = gamma_u_upper_random(&g, &s, 3, 500, 0, Some(&set)).unwrap().unwrap();
        assert_eq!(cert.size(), 3);
        assert!(cert.verify(&g, Some(&set)).unwrap().is_tds);
        let members = cert.members().unwrap();
        assert!(is_tds_direct(&g, &members).unwrap());
        // every nonidentity element is adjacent to a member
        for x in g.elements().unwrap().filter(|x| !x.is_identity()) {
            assert!(members.iter().any(|m| closure_order(&[x.clone(), m.clone()]) == 60));
        }
        let r = gamma_u_exhaustive_refute(&g, &s, 2, u64::MAX, Some(&set)).unwrap();
        match r {
            Refutation::Refuted { tuples_covered, .. } => assert_eq!(tuples_covered, expected_tuples(12, 2)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            gamma_u_exhaustive_refute(&g, &s, 3, u64::MAX, Some(&set)).unwrap(),
            Refutation::Found(_)
        ));
        assert!(gamma_u_exhaustive_refute(&g, &s, 1, u64::MAX, None).unwrap().is_refuted());
    }

    #[test]
    fn certificate_round_trip() {
        let g = group("A6");
        let s = perm("(1,2,3,4,5)", 6);
        let cert = gamma_u_upper_random(&g, &s, 4, 2000, 1, None).unwrap().unwrap();
        assert_eq!(cert.verification, Verification::Direct);
        let text = serde_json::to_string(&cert).unwrap();
        let back: TdsCertificate = serde_json::from_str(&text).unwrap();
        assert!(back.verify(&g, None).unwrap().is_tds);
        let mut bad = back.clone();
        bad.conjugators[1] = bad.conjugators[0].clone();
        assert!(!bad.verify(&g, None).unwrap().is_tds);
    }

    fn random_sets(g: &Group, rng: &mut Rng, count: usize) -> Vec<(Permutation, Vec<Permutation>)> {
        let table = g.classes().unwrap();
        let nontrivial: Vec<usize> = (0..table.len()).filter(|&c| table.class(c).order > 1).collect();
        (0..count)
            .map(|i| {
                let c = nontrivial[i % nontrivial.len()];
                let size = 2 + i % 3;
                let gs = (0..size).map(|_| g.random_element(rng)).collect();
                (table.class(c).rep.clone(), gs)
            })
            .collect()
    }

    #[test]
    fn criterion_matches_direct() {
        for name in ["A5", "S5", "L2(7)", "A6", "L2(8)", "L2(11)"] {
            let g = group(name);
            let mut direct = DirectChecker::new(&g).unwrap();
            let mut rng = rng::stream(7, 1);
            let mut cache: HashMap<Permutation, OvergroupSet> = HashMap::new();
            for (s, gs) in random_sets(&g, &mut rng, 200) {
                let set = cache
                    .entry(s.clone())
                    .or_insert_with(|| maximal_overgroups(&g, &s, &ClimbOptions::certified()).unwrap());
                let members: Vec<Permutation> = gs.iter().map(|x| s.conjugate_by(x)).collect();
                let expected = direct.is_tds(&members);
                assert_eq!(ConjugateCriterion::new(set, 100_000).unwrap().is_tds(&gs), expected, "{name}");
                let sets: Vec<OvergroupSet> = gs.iter().map(|x| set.conjugate(x)).collect();
                let verdict = is_tds_criterion(&sets, 100_000).unwrap();
                assert!(verdict.certified);
                assert_eq!(verdict.is_tds, expected, "{name}");
                // conjugation invariance
                let h = g.random_element(&mut rng);
                let moved: Vec<Permutation> = members.iter().map(|m| m.conjugate_by(&h)).collect();
                assert_eq!(direct.is_tds(&moved), expected);
            }
        }
    }

    #[test]
    fn lower_bounds() {
        let a5 = group("A5");
        let lb = gamma_u_lower(&a5, Mode::Certified, 0).unwrap();
        assert_eq!(lb.value, 3);
        assert!(lb.certified);
        let m11 = group("M11");
        let lb = gamma_u_lower(&m11, Mode::Certified, 0).unwrap();
        assert_eq!(lb.value, 4);
    }

    #[test]
    fn single_overgroup_certificates_match_base_size() {
        // minimal certificate size within the class equals b(G, G/H)
        for (name, s, degree) in [("A5", "(1,2,3,4,5)", 5), ("M11", "", 11)] {
            let g = group(name);
            let s = if s.is_empty() {
                let t = g.classes().unwrap();
                (0..t.len()).map(|c| t.class(c).rep.clone()).find(|x| x.order() == 11).unwrap()
            } else {
                perm(s, degree)
            };
            let set = maximal_overgroups(&g, &s, &ClimbOptions::certified()).unwrap();
            assert_eq!(set.len(), 1);
            let action = CosetAction::new(&g, &set.subgroups[0]).unwrap();
            let pg = action.faithful_image(0).unwrap().unwrap();
            let b = base_size(&pg, Strategy::Exact, 1_000_000, 0).unwrap();
            assert!(b.is_exact());
            let b = b.lower;
            assert!(gamma_u_exhaustive_refute(&g, &s, b - 1, u64::MAX, Some(&set)).unwrap().is_refuted());
            let cert = gamma_u_upper_random(&g, &s, b, 5000, 0, Some(&set)).unwrap().unwrap();
            assert!(cert.verify(&g, Some(&set)).unwrap().is_tds);
        }
    }

    #[test]
    fn psl2_9_bracket() {
        let g = group("L2(9)");
        let r = gamma_u_bracket(&g, &BracketConfig::default()).unwrap();
        assert_eq!((r.lower, r.upper), (4, Some(4)));
        assert!(r.certified);
        for rec in &r.refutations {
            match &rec.result {
                Refutation::Refuted { class_size, c, tuples_covered, .. } => {
                    assert_eq!(*tuples_covered, expected_tuples(*class_size, *c))
                }
                other => panic!("{other:?}"),
            }
        }
        let cert = r.certificate.unwrap();
        assert!(cert.size() >= r.lower);
    }
}
