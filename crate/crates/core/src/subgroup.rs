//! Subgroups of a fixed parent group.

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::chain::{orbits, ChainOptions, StabilizerChain};
use crate::classes::order_census;
use crate::error::{Error, Result};
use crate::group::Group;
use crate::perm::Permutation;

/// Subgroups up to this order carry an element-order census.
const CENSUS_LIMIT: u64 = 512;

/// Cheap invariants. Different fingerprints prove inequality; equal
/// fingerprints prove nothing.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    pub order: BigUint,
    pub orbit_lengths: Vec<usize>,
    pub census: Option<Vec<(u64, u64)>>,
}

#[derive(Clone, Debug)]
pub struct Subgroup {
    generators: Vec<Permutation>,
    chain: Arc<StabilizerChain>,
    fingerprint: Fingerprint,
}

impl Subgroup {
    /// `<gens>` inside `parent`. Fails if a generator lies outside.
    pub fn new(parent: &Group, gens: Vec<Permutation>) -> Result<Self> {
        for g in &gens {
            parent.check_member(g)?;
        }
        let opts = ChainOptions::seeded(parent.seed()).with_bound(parent.order().clone());
        let chain = StabilizerChain::build_with(parent.degree(), &gens, &opts)?;
        Ok(Self::from_chain(parent, gens, chain))
    }

    /// `<gens>` with a known order, which makes construction fast.
    pub fn with_order(parent: &Group, gens: Vec<Permutation>, order: &BigUint) -> Result<Self> {
        let opts = ChainOptions::seeded(parent.seed()).with_bound(order.clone());
        let chain = StabilizerChain::build_with(parent.degree(), &gens, &opts)?;
        if chain.order() != order {
            return Err(Error::OrderMismatch {
                name: "subgroup".into(),
                expected: order.clone(),
                computed: chain.order().clone(),
            });
        }
        Ok(Self::from_chain(parent, gens, chain))
    }

    pub(crate) fn from_chain(parent: &Group, generators: Vec<Permutation>, chain: StabilizerChain) -> Self {
        debug_assert!((parent.order() % chain.order()).is_zero(), "Lagrange");
        let degree = parent.degree();
        let mut orbit_lengths: Vec<usize> = orbits(&generators, degree).iter().map(|o| o.len()).collect();
        orbit_lengths.sort_unstable();
        let census = match chain.order_u64() {
            Some(n) if n <= CENSUS_LIMIT => Some(order_census(chain.elements(n).expect("within cap"))),
            _ => None,
        };
        Subgroup {
            fingerprint: Fingerprint {
                order: chain.order().clone(),
                orbit_lengths,
                census,
            },
            generators,
            chain: Arc::new(chain),
        }
    }

    /// The whole parent group.
    pub fn whole(parent: &Group) -> Self {
        Self::from_chain(parent, parent.generators().to_vec(), parent.chain().clone())
    }

    /// The cyclic subgroup `<s>`.
    pub fn cyclic(parent: &Group, s: &Permutation) -> Result<Self> {
        let order = s.order_big();
        Self::with_order(parent, vec![s.clone()], &order)
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn chain(&self) -> &StabilizerChain {
        &self.chain
    }

    pub fn order(&self) -> &BigUint {
        self.chain.order()
    }

    pub fn order_u64(&self) -> Option<u64> {
        self.chain.order().to_u64()
    }

    pub fn fingerprint(&self) -> &Fingerprint {
        &self.fingerprint
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        self.chain.contains(g)
    }

    /// Is `other` a subgroup of `self`?
    pub fn contains_subgroup(&self, other: &Subgroup) -> bool {
        other.order() <= self.order()
            && (self.order() % other.order()).is_zero()
            && other.generators.iter().all(|g| self.contains(g))
    }

    /// `<self, g>`.
    pub fn join(&self, parent: &Group, g: &Permutation) -> Result<Subgroup> {
        self.join_many(parent, std::slice::from_ref(g))
    }

    pub fn join_many(&self, parent: &Group, extra: &[Permutation]) -> Result<Subgroup> {
        let opts = ChainOptions::seeded(parent.seed()).with_bound(parent.order().clone());
        let chain = self.chain.extend(extra, &opts)?;
        let mut gens = self.generators.clone();
        gens.extend(extra.iter().filter(|g| !self.contains(g)).cloned());
        Ok(Self::from_chain(parent, gens, chain))
    }

    /// `g^-1 H g`.
    pub fn conjugate(&self, g: &Permutation) -> Subgroup {
        let chain = self.chain.conjugate(g);
        let generators: Vec<Permutation> = self.generators.iter().map(|x| x.conjugate_by(g)).collect();
        Subgroup {
            fingerprint: Fingerprint {
                order: chain.order().clone(),
                orbit_lengths: self.fingerprint.orbit_lengths.clone(),
                census: self.fingerprint.census.clone(),
            },
            generators,
            chain: Arc::new(chain),
        }
    }

    /// All elements, refusing when the order exceeds `cap`.
    pub fn elements(&self, cap: u64) -> Result<crate::chain::Elements<'_>> {
        self.chain.elements(cap)
    }

    /// Index in a group of order `parent_order`.
    pub fn index_in(&self, parent_order: &BigUint) -> BigUint {
        parent_order / self.order()
    }
}

/// Equality: same fingerprint, then mutual generator membership.
pub fn subgroup_equal(h: &Subgroup, k: &Subgroup) -> bool {
    h.fingerprint == k.fingerprint
        && k.generators.iter().all(|g| h.contains(g))
        && h.generators.iter().all(|g| k.contains(g))
}

/// Is `H_1 ∩ ... ∩ H_m` trivial? Enumerates the smallest subgroup and sifts
/// through the others, stopping at the first common nonidentity element.
pub fn intersection_is_trivial(subgroups: &[&Subgroup], cap: u64) -> Result<bool> {
    let Some(smallest) = subgroups.iter().min_by(|a, b| a.order().cmp(b.order())) else {
        return Ok(true);
    };
    if smallest.order() == &BigUint::from(1u32) {
        return Ok(true);
    }
    for x in smallest.elements(cap)? {
        if x.is_identity() {
            continue;
        }
        if subgroups.iter().all(|h| std::ptr::eq(*h, *smallest) || h.contains(&x)) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas;
    use crate::group::Limits;
    use crate::perm::parse_cycles;

    fn a5() -> Group {
        Group::new(&atlas::alternating(5).unwrap(), Limits::default(), 0).unwrap()
    }

    #[test]
    fn join_gives_d10() {
        let g = a5();
        let s = parse_cycles("(1,2,3,4,5)", 5).unwrap();
        let h = Subgroup::cyclic(&g, &s).unwrap();
        assert_eq!(h.order_u64(), Some(5));
        let t = parse_cycles("(1,2)(3,4)", 5).unwrap();
        // closure oracle: <s, t> has 60 elements since t is no reflection of s
        assert_eq!(h.join(&g, &t).unwrap().order_u64(), Some(60));
        let r = parse_cycles("(2,5)(3,4)", 5).unwrap();
        let d10 = h.join(&g, &r).unwrap();
        assert_eq!(d10.order_u64(), Some(10));
        assert!(d10.contains_subgroup(&h));
        assert!(!h.contains_subgroup(&d10));
    }

    #[test]
    fn equality_and_intersections() {
        let g = a5();
        let s = parse_cycles("(1,2,3,4,5)", 5).unwrap();
        let h = Subgroup::cyclic(&g, &s).unwrap();
        let h2 = Subgroup::new(&g, vec![s.pow(2)]).unwrap();
        assert!(subgroup_equal(&h, &h));
        assert!(subgroup_equal(&h, &h2));
        assert!(!intersection_is_trivial(&[&h, &h], 100).unwrap());
        let k = Subgroup::cyclic(&g, &parse_cycles("(1,2,3)", 5).unwrap()).unwrap();
        assert!(!subgroup_equal(&h, &k));
        assert!(intersection_is_trivial(&[&h, &k], 100).unwrap());
        let c = h.conjugate(&parse_cycles("(1,2,3)", 5).unwrap());
        assert_eq!(c.order_u64(), Some(5));
        assert!(Subgroup::new(&g, vec![parse_cycles("(1,2)", 5).unwrap()]).is_err());
    }

    #[test]
    fn intersection_cap() {
        let g = a5();
        let w = Subgroup::whole(&g);
        assert!(intersection_is_trivial(&[&w, &w], 10).is_err());
    }
}
