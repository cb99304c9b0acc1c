//! Conjugacy classes, power maps and class enumeration.
//!
//! Two modes. Enumerated mode indexes every element by its chain rank and
//! finds classes as conjugation orbits. Cycle-type mode serves alternating
//! and symmetric groups of any size: classes are cycle shapes, and a shape of
//! distinct odd parts splits in `A_n`. For a split class the centralizer in
//! `S_n` lies in `A_n`, so the parity of any conjugator from the class
//! representative decides which half an element belongs to.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::atlas::{element_of_shape, Family};
use crate::chain::{ChainOptions, StabilizerChain};
use crate::error::{Error, Result};
use crate::field::is_prime;
use crate::group::Group;
use crate::perm::Permutation;

const UNSET: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassMode {
    Enumerated,
    CycleType,
}

#[derive(Clone, Debug)]
pub struct ClassInfo {
    pub rep: Permutation,
    pub size: BigUint,
    pub order: u64,
    pub centralizer_order: BigUint,
}

impl ClassInfo {
    pub fn size_u64(&self) -> u64 {
        self.size.to_u64().expect("class size fits in u64")
    }
}

#[derive(Clone, Debug)]
enum Lookup {
    /// Class index per chain rank.
    Ranks { chain: StabilizerChain, index: Vec<u32> },
    /// Shape to class indices; the second index is the other half of a
    /// split class.
    Shapes {
        degree: usize,
        map: HashMap<Vec<usize>, (u32, Option<u32>)>,
    },
}

#[derive(Clone, Debug)]
pub struct ConjugacyTable {
    mode: ClassMode,
    classes: Vec<ClassInfo>,
    /// `power_map[c][k]` is the class of `rep_c^k`, `0 <= k < order_c`.
    power_map: Vec<Vec<u32>>,
    lookup: Lookup,
}

#[derive(Serialize)]
pub struct ClassExport {
    pub order: u64,
    pub size: String,
    pub rep: String,
}

impl ConjugacyTable {
    pub fn build(group: &Group) -> Result<Self> {
        match group.family() {
            Family::Alternating(n) => Ok(Self::cycle_type(n, true)),
            Family::Symmetric(n) => Ok(Self::cycle_type(n, false)),
            _ => Self::enumerated(group),
        }
    }

    /// Enumerated mode: conjugation orbits over element ranks.
    pub fn enumerated(group: &Group) -> Result<Self> {
        let total = group.enumerable_order()?;
        let chain = group.chain().clone();
        let gens: Vec<Permutation> = group
            .generators()
            .iter()
            .filter(|g| !g.is_identity())
            .cloned()
            .collect();
        let mut index = vec![UNSET; total as usize];
        let mut raw: Vec<(Permutation, u64)> = Vec::new();
        let mut queue = VecDeque::new();
        for (r, x) in chain.elements(total)?.enumerate() {
            if index[r] != UNSET {
                continue;
            }
            let id = raw.len() as u32;
            index[r] = id;
            let mut best = x.clone();
            let mut size = 1u64;
            queue.push_back(x);
            while let Some(y) = queue.pop_front() {
                for g in &gens {
                    let z = y.conjugate_by(g);
                    let rz = chain.rank(&z) as usize;
                    if index[rz] == UNSET {
                        index[rz] = id;
                        size += 1;
                        if z.images() < best.images() {
                            best = z.clone();
                        }
                        queue.push_back(z);
                    }
                }
            }
            raw.push((best, size));
        }
        let group_order = BigUint::from(total);
        let infos: Vec<ClassInfo> = raw
            .into_iter()
            .map(|(rep, size)| ClassInfo {
                order: rep.order(),
                centralizer_order: &group_order / size,
                size: BigUint::from(size),
                rep,
            })
            .collect();
        let (infos, relabel) = sort_classes(infos);
        for v in index.iter_mut() {
            *v = relabel[*v as usize];
        }
        let mut table = ConjugacyTable {
            mode: ClassMode::Enumerated,
            classes: infos,
            power_map: Vec::new(),
            lookup: Lookup::Ranks { chain, index },
        };
        table.fill_power_map();
        Ok(table)
    }

    /// Cycle-type mode for `A_n` (`alternating`) or `S_n`.
    pub fn cycle_type(n: usize, alternating: bool) -> Self {
        let group_order = if alternating && n >= 2 {
            factorial(n) / 2u32
        } else {
            factorial(n)
        };
        let mut infos = Vec::new();
        let mut keys: Vec<(Vec<usize>, bool)> = Vec::new();
        for shape in partitions(n) {
            let rep = element_of_shape(n, &shape, false).expect("partition of n");
            if alternating && !rep.is_even() {
                continue;
            }
            let z = centralizer_in_symmetric(&shape);
            let sym_size = factorial(n) / &z;
            let split = alternating && n > 1 && splits_in_alternating(&shape);
            if split {
                let half = &sym_size / 2u32;
                let swap = Permutation::from_cycles(n, &[vec![0, 1]]).expect("n >= 2");
                let partner = rep.conjugate_by(&swap);
                for (r, is_partner) in [(rep.clone(), false), (partner, true)] {
                    infos.push(ClassInfo {
                        order: r.order(),
                        centralizer_order: &group_order / &half,
                        size: half.clone(),
                        rep: r,
                    });
                    keys.push((shape.clone(), is_partner));
                }
            } else {
                infos.push(ClassInfo {
                    order: rep.order(),
                    centralizer_order: &group_order / &sym_size,
                    size: sym_size,
                    rep,
                });
                keys.push((shape, false));
            }
        }
        let (infos, relabel) = sort_classes(infos);
        let mut map: HashMap<Vec<usize>, (u32, Option<u32>)> = HashMap::new();
        for (old, (shape, is_partner)) in keys.into_iter().enumerate() {
            let new = relabel[old];
            let entry = map.entry(shape).or_insert((UNSET, None));
            if is_partner {
                entry.1 = Some(new);
            } else {
                entry.0 = new;
            }
        }
        let mut table = ConjugacyTable {
            mode: ClassMode::CycleType,
            classes: infos,
            power_map: Vec::new(),
            lookup: Lookup::Shapes { degree: n, map },
        };
        table.fill_power_map();
        table
    }

    fn fill_power_map(&mut self) {
        let mut pm = Vec::with_capacity(self.classes.len());
        for c in &self.classes {
            let mut row = Vec::with_capacity(c.order as usize);
            let mut x = Permutation::identity(c.rep.degree());
            for _ in 0..c.order {
                row.push(self.class_of(&x) as u32);
                x.mul_assign(&c.rep);
            }
            pm.push(row);
        }
        self.power_map = pm;
    }

    pub fn mode(&self) -> ClassMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn classes(&self) -> &[ClassInfo] {
        &self.classes
    }

    pub fn class(&self, c: usize) -> &ClassInfo {
        &self.classes[c]
    }

    pub fn has_element_index(&self) -> bool {
        matches!(self.lookup, Lookup::Ranks { .. })
    }

    /// Class index of a group element.
    pub fn class_of(&self, x: &Permutation) -> usize {
        match &self.lookup {
            Lookup::Ranks { chain, index } => index[chain.rank(x) as usize] as usize,
            Lookup::Shapes { degree, map } => {
                debug_assert_eq!(x.degree(), *degree);
                let shape = x.cycle_type();
                let (first, partner) = map[&shape];
                match partner {
                    None => first as usize,
                    Some(other) => {
                        let rep = &self.classes[first as usize].rep;
                        if cycle_conjugator(rep, x).is_even() {
                            first as usize
                        } else {
                            other as usize
                        }
                    }
                }
            }
        }
    }

    /// Class of `rep_c^k`.
    pub fn power(&self, c: usize, k: i64) -> usize {
        let ord = self.classes[c].order as i64;
        self.power_map[c][k.rem_euclid(ord) as usize] as usize
    }

    pub fn identity_class(&self) -> usize {
        self.classes
            .iter()
            .position(|c| c.order == 1)
            .expect("identity class exists")
    }

    /// Indices of the classes of prime-order elements.
    pub fn prime_order_classes(&self) -> Vec<usize> {
        (0..self.classes.len())
            .filter(|&c| is_prime(self.classes[c].order))
            .collect()
    }

    /// Greedy power-covering set: by decreasing element order, take an
    /// uncovered class and cover all classes of its nontrivial powers.
    pub fn power_covering(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.classes.len())
            .filter(|&c| self.classes[c].order > 1)
            .collect();
        order.sort_by(|&a, &b| self.classes[b].order.cmp(&self.classes[a].order).then(a.cmp(&b)));
        let mut covered = vec![false; self.classes.len()];
        let mut out = Vec::new();
        for c in order {
            if covered[c] {
                continue;
            }
            out.push(c);
            for k in 1..self.classes[c].order {
                covered[self.power_map[c][k as usize] as usize] = true;
            }
        }
        out
    }

    pub fn export(&self) -> Vec<ClassExport> {
        self.classes
            .iter()
            .map(|c| ClassExport {
                order: c.order,
                size: c.size.to_string(),
                rep: c.rep.to_string(),
            })
            .collect()
    }
}

/// Sorts by (element order, size, representative) and returns the map from
/// old to new indices.
fn sort_classes(infos: Vec<ClassInfo>) -> (Vec<ClassInfo>, Vec<u32>) {
    let mut idx: Vec<usize> = (0..infos.len()).collect();
    idx.sort_by(|&a, &b| {
        let (x, y) = (&infos[a], &infos[b]);
        x.order
            .cmp(&y.order)
            .then_with(|| x.size.cmp(&y.size))
            .then_with(|| x.rep.images().cmp(y.rep.images()))
    });
    let mut relabel = vec![0u32; infos.len()];
    for (new, &old) in idx.iter().enumerate() {
        relabel[old] = new as u32;
    }
    let mut slots: Vec<Option<ClassInfo>> = infos.into_iter().map(Some).collect();
    let sorted = idx.iter().map(|&i| slots[i].take().unwrap()).collect();
    (sorted, relabel)
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// Partitions of `n`, parts nonincreasing, in reverse lexicographic order.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(rem: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=rem.min(max)).rev() {
            cur.push(p);
            rec(rem - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// `z_lambda = prod_i i^{m_i} m_i!`, the centralizer order in `S_n`.
pub fn centralizer_in_symmetric(shape: &[usize]) -> BigUint {
    let mut counts: HashMap<usize, usize> = HashMap::new();
    for &l in shape {
        *counts.entry(l).or_default() += 1;
    }
    let mut z = BigUint::one();
    for (l, m) in counts {
        z *= BigUint::from(l).pow(m as u32) * factorial(m);
    }
    z
}

/// Does the `S_n`-class of this even shape split in `A_n`?
pub fn splits_in_alternating(shape: &[usize]) -> bool {
    let mut parts = shape.to_vec();
    parts.sort_unstable();
    parts.iter().all(|l| l % 2 == 1) && parts.windows(2).all(|w| w[0] != w[1])
}

/// A conjugator `g` with `a^g = b`, for permutations of equal cycle type,
/// matching cycles of equal length in order of their least points.
pub fn cycle_conjugator(a: &Permutation, b: &Permutation) -> Permutation {
    let n = a.degree();
    let by_length = |p: &Permutation| {
        let mut cs = all_cycles(p);
        cs.sort_by(|x, y| y.len().cmp(&x.len()).then(x[0].cmp(&y[0])));
        cs
    };
    let (ca, cb) = (by_length(a), by_length(b));
    let mut images = vec![0u32; n];
    for (x, y) in ca.iter().zip(&cb) {
        debug_assert_eq!(x.len(), y.len());
        for (&p, &q) in x.iter().zip(y) {
            images[p as usize] = q;
        }
    }
    Permutation::from_images(images).expect("cycle types agree")
}

/// All cycles including fixed points, each from its least point.
fn all_cycles(p: &Permutation) -> Vec<Vec<u32>> {
    let n = p.degree();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut c = Vec::new();
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            c.push(x as u32);
            x = p.image(x as u32) as usize;
        }
        out.push(c);
    }
    out
}

/// The conjugacy class of `s` with a conjugator for each member
/// (`rep^conj = member`), found by orbit search under the group generators.
pub struct ClassEnumeration {
    pub members: Vec<Permutation>,
    pub conjugators: Vec<Permutation>,
}

pub fn enumerate_class(group: &Group, s: &Permutation, cap: u64) -> Result<ClassEnumeration> {
    let mut members = vec![s.clone()];
    let mut conjugators = vec![group.identity()];
    let mut seen: HashMap<Permutation, u32> = HashMap::new();
    seen.insert(s.clone(), 0);
    let gens: Vec<Permutation> = group
        .generators()
        .iter()
        .filter(|g| !g.is_identity())
        .cloned()
        .collect();
    let mut i = 0;
    while i < members.len() {
        for g in &gens {
            let y = members[i].conjugate_by(g);
            if !seen.contains_key(&y) {
                if members.len() as u64 >= cap {
                    return Err(Error::CapExceeded {
                        order: BigUint::from(cap) + 1u32,
                        cap,
                    });
                }
                seen.insert(y.clone(), members.len() as u32);
                conjugators.push(conjugators[i].mul(g));
                members.push(y);
            }
        }
        i += 1;
    }
    Ok(ClassEnumeration {
        members,
        conjugators,
    })
}

/// Centralizer of `s` from Schreier generators of the class orbit. The
/// order is known from the class size, so the chain is exact.
pub fn centralizer(group: &Group, s: &Permutation, cap: u64) -> Result<StabilizerChain> {
    let cls = enumerate_class(group, s, cap)?;
    let index: HashMap<&Permutation, usize> =
        cls.members.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let expected = group.order() / BigUint::from(cls.members.len());
    let gens: Vec<Permutation> = group
        .generators()
        .iter()
        .filter(|g| !g.is_identity())
        .cloned()
        .collect();
    let mut schreier = Vec::new();
    for (i, m) in cls.members.iter().enumerate() {
        for g in &gens {
            let j = index[&m.conjugate_by(g)];
            let h = cls.conjugators[i].mul(g).mul(&cls.conjugators[j].inverse());
            if !h.is_identity() {
                schreier.push(h);
            }
        }
    }
    schreier.sort();
    schreier.dedup();
    let opts = ChainOptions::seeded(group.seed()).with_bound(expected.clone());
    let mut chain = StabilizerChain::build_with(group.degree(), &[s.clone()], &opts)?;
    // add Schreier generators until the known order is reached
    for batch in schreier.chunks(8) {
        if chain.order() >= &expected {
            break;
        }
        chain = chain.extend(batch, &opts)?;
    }
    debug_assert_eq!(chain.order(), &expected);
    Ok(chain)
}

/// Number of elements of each order in `H`, for fingerprints.
pub fn order_census(elements: impl Iterator<Item = Permutation>) -> Vec<(u64, u64)> {
    let mut m: HashMap<u64, u64> = HashMap::new();
    for x in elements {
        *m.entry(x.order()).or_default() += 1;
    }
    let mut v: Vec<(u64, u64)> = m.into_iter().collect();
    v.sort_unstable();
    v
}

/// `lcm` helper for shapes.
pub fn shape_order(shape: &[usize]) -> u64 {
    shape.iter().fold(1u64, |acc, &l| acc.lcm(&(l as u64)))
}
