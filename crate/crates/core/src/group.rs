//! A permutation group together with its chain, limits and lazily built
//! class table.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::atlas::{Family, GroupSpec, Provenance};
use crate::chain::{orbit_of, ChainOptions, StabilizerChain};
use crate::classes::ConjugacyTable;
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::rng::Rng;

pub const DEFAULT_ENUM_CAP: u64 = 2_000_000;
pub const DEFAULT_DEGREE_CAP: u64 = 100_000;
pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Limits {
    /// Largest group order that may be enumerated.
    pub enum_cap: u64,
    /// Largest permutation degree of a constructed action.
    pub degree_cap: u64,
    /// Stabilizer evaluations allowed in an exact base search.
    pub node_budget: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            enum_cap: DEFAULT_ENUM_CAP,
            degree_cap: DEFAULT_DEGREE_CAP,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

pub struct Group {
    name: String,
    family: Family,
    provenance: Provenance,
    chain: StabilizerChain,
    limits: Limits,
    seed: u64,
    transitive: bool,
    classes: OnceLock<ConjugacyTable>,
}

impl std::fmt::Debug for Group {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Group")
            .field("name", &self.name)
            .field("degree", &self.degree())
            .field("order", self.order())
            .finish()
    }
}

impl Group {
    /// Builds the group, enforcing the declared order.
    pub fn new(spec: &GroupSpec, limits: Limits, seed: u64) -> Result<Self> {
        let chain = spec.chain(seed)?;
        let transitive = spec.degree == 0 || chain.orbit_of(0).len() == spec.degree;
        Ok(Group {
            name: spec.name.clone(),
            family: spec.family,
            provenance: spec.provenance.clone(),
            chain,
            limits,
            seed,
            transitive,
            classes: OnceLock::new(),
        })
    }

    /// Group from bare generators, with no structural knowledge.
    pub fn from_generators(
        name: &str,
        degree: usize,
        generators: Vec<Permutation>,
        limits: Limits,
        seed: u64,
    ) -> Result<Self> {
        let spec = GroupSpec {
            name: name.to_string(),
            degree,
            generators,
            expected_order: None,
            provenance: Provenance::Builtin,
            family: Family::Other,
        };
        Group::new(&spec, limits, seed)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn chain(&self) -> &StabilizerChain {
        &self.chain
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn degree(&self) -> usize {
        self.chain.degree()
    }

    pub fn generators(&self) -> &[Permutation] {
        self.chain.generators()
    }

    pub fn order(&self) -> &BigUint {
        self.chain.order()
    }

    pub fn order_u64(&self) -> Option<u64> {
        self.chain.order().to_u64()
    }

    pub fn identity(&self) -> Permutation {
        Permutation::identity(self.degree())
    }

    pub fn is_transitive(&self) -> bool {
        self.transitive
    }

    /// Order as `u64` when within the enumeration cap.
    pub fn enumerable_order(&self) -> Result<u64> {
        self.chain.check_cap(self.limits.enum_cap)
    }

    pub fn is_enumerable(&self) -> bool {
        self.enumerable_order().is_ok()
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        self.chain.contains(g)
    }

    pub fn check_member(&self, g: &Permutation) -> Result<()> {
        if g.degree() != self.degree() {
            return Err(Error::DegreeMismatch {
                expected: self.degree(),
                found: g.degree(),
            });
        }
        if !self.contains(g) {
            return Err(Error::invalid(format!("{g} is not an element of {}", self.name)));
        }
        Ok(())
    }

    pub fn random_element(&self, rng: &mut Rng) -> Permutation {
        self.chain.random_element(rng)
    }

    /// Every element, in rank order.
    pub fn elements(&self) -> Result<crate::chain::Elements<'_>> {
        self.chain.elements(self.limits.enum_cap)
    }

    /// The class table (cycle-type mode for alternating and symmetric groups,
    /// enumerated otherwise).
    pub fn classes(&self) -> Result<&ConjugacyTable> {
        if let Some(t) = self.classes.get() {
            return Ok(t);
        }
        let table = ConjugacyTable::build(self)?;
        Ok(self.classes.get_or_init(|| table))
    }

    /// Is `<xs>` the whole group?
    pub fn generates(&self, xs: &[Permutation]) -> bool {
        self.generates_seeded(xs, self.seed)
    }

    pub fn generates_seeded(&self, xs: &[Permutation], seed: u64) -> bool {
        if xs.iter().all(|x| x.is_identity()) {
            return self.chain.is_trivial();
        }
        if self.transitive && orbit_of(xs, self.degree(), 0).len() != self.degree() {
            return false;
        }
        let opts = ChainOptions::seeded(seed).with_bound(self.order().clone());
        let c = StabilizerChain::build_with(self.degree(), xs, &opts).expect("degrees agree");
        c.order() == self.order()
    }

    /// Order of `<xs>`.
    pub fn subgroup_order(&self, xs: &[Permutation]) -> BigUint {
        let opts = ChainOptions::seeded(self.seed).with_bound(self.order().clone());
        StabilizerChain::build_with(self.degree(), xs, &opts)
            .expect("degrees agree")
            .order()
            .clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas;
    use crate::perm::parse_cycles;

    #[test]
    fn generation_in_a5() {
        let g = Group::new(&atlas::alternating(5).unwrap(), Limits::default(), 0).unwrap();
        let s = parse_cycles("(1,2,3,4,5)", 5).unwrap();
        let t = parse_cycles("(1,2)(3,4)", 5).unwrap();
        assert!(!g.generates(&[s.clone(), s.clone()]));
        for y in g.elements().unwrap() {
            assert!(!g.generates(&[g.identity(), y]));
        }
        assert!(g.generates(&[s, t]));
    }

    #[test]
    fn caps() {
        let limits = Limits {
            enum_cap: 1_000_000,
            ..Limits::default()
        };
        let g = Group::new(&atlas::alternating(13).unwrap(), limits, 0).unwrap();
        assert!(matches!(g.elements(), Err(Error::CapExceeded { .. })));
        assert!(g.enumerable_order().is_err());
    }
}
