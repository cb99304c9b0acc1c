//! Base and strong generating sets.
//!
//! Construction runs a seeded random Schreier-Sims phase and then either
//! stops because the order reached a caller-supplied upper bound, or runs the
//! deterministic Schreier generator check. Either way the finished chain is
//! exact: the product of basic orbit lengths is a lower bound for the order
//! of any partial chain, so reaching a true upper bound proves completeness.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::rng::{self, Rng};

/// Degrees up to this size store explicit coset representatives; larger
/// degrees use Schreier trees.
const EXPLICIT_DEGREE: usize = 600;
/// Consecutive trivial sifts that end the random phase.
const MISS_LIMIT: usize = 12;
const ABSENT: u32 = u32::MAX;

#[derive(Clone, Debug, Default)]
pub struct ChainOptions {
    pub seed: u64,
    /// Points that must start the base, in order.
    pub base_prefix: Vec<u32>,
    /// A known upper bound for the group order. Reaching it ends construction.
    pub order_bound: Option<BigUint>,
}

impl ChainOptions {
    pub fn seeded(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn with_bound(mut self, bound: BigUint) -> Self {
        self.order_bound = Some(bound);
        self
    }

    pub fn with_base(mut self, prefix: Vec<u32>) -> Self {
        self.base_prefix = prefix;
        self
    }
}

#[derive(Clone, Debug)]
enum Transversal {
    /// `reps[i]` maps the base point to `orbit[i]`; `inv[i]` is its inverse.
    Explicit {
        reps: Vec<Permutation>,
        inv: Vec<Permutation>,
    },
    /// `edge[i]` indexes the generator labelling the tree edge into `orbit[i]`
    /// (unused at the root).
    Tree { edge: Vec<u32> },
}

#[derive(Clone, Debug)]
struct Level {
    base_point: u32,
    gens: Vec<Permutation>,
    inv_gens: Vec<Permutation>,
    orbit: Vec<u32>,
    pos: Vec<u32>,
    trans: Transversal,
}

impl Level {
    fn new(base_point: u32, degree: usize) -> Self {
        let mut pos = vec![ABSENT; degree];
        pos[base_point as usize] = 0;
        let trans = if degree <= EXPLICIT_DEGREE {
            Transversal::Explicit {
                reps: vec![Permutation::identity(degree)],
                inv: vec![Permutation::identity(degree)],
            }
        } else {
            Transversal::Tree { edge: vec![ABSENT] }
        };
        Level {
            base_point,
            gens: Vec::new(),
            inv_gens: Vec::new(),
            orbit: vec![base_point],
            pos,
            trans,
        }
    }

    fn add_gen(&mut self, g: Permutation) {
        self.inv_gens.push(g.inverse());
        self.gens.push(g);
        let new = self.gens.len() - 1;
        // The new generator applies to every old point; fresh points need all.
        let old_len = self.orbit.len();
        for i in 0..old_len {
            let p = self.orbit[i];
            self.try_extend(p, new);
        }
        let mut i = old_len;
        while i < self.orbit.len() {
            let p = self.orbit[i];
            for gi in 0..self.gens.len() {
                self.try_extend(p, gi);
            }
            i += 1;
        }
    }

    #[inline]
    fn try_extend(&mut self, p: u32, gi: usize) {
        let q = self.gens[gi].image(p);
        if self.pos[q as usize] != ABSENT {
            return;
        }
        self.pos[q as usize] = self.orbit.len() as u32;
        self.orbit.push(q);
        match &mut self.trans {
            Transversal::Explicit { reps, inv } => {
                let r = reps[self.pos[p as usize] as usize].mul(&self.gens[gi]);
                inv.push(r.inverse());
                reps.push(r);
            }
            Transversal::Tree { edge } => edge.push(gi as u32),
        }
    }

    /// Image of `q` under the inverse of the representative for `p`.
    #[inline]
    fn inv_rep_point(&self, p: u32, q: u32) -> u32 {
        match &self.trans {
            Transversal::Explicit { inv, .. } => inv[self.pos[p as usize] as usize].image(q),
            Transversal::Tree { edge } => {
                let mut p = p;
                let mut q = q;
                while p != self.base_point {
                    let gi = edge[self.pos[p as usize] as usize] as usize;
                    let ig = &self.inv_gens[gi];
                    q = ig.image(q);
                    p = ig.image(p);
                }
                q
            }
        }
    }

    /// `x <- x * rep(p)^-1`.
    fn strip(&self, x: &mut Permutation, p: u32) {
        match &self.trans {
            Transversal::Explicit { inv, .. } => {
                x.mul_assign(&inv[self.pos[p as usize] as usize]);
            }
            Transversal::Tree { edge } => {
                let mut p = p;
                while p != self.base_point {
                    let gi = edge[self.pos[p as usize] as usize] as usize;
                    let ig = &self.inv_gens[gi];
                    x.mul_assign(ig);
                    p = ig.image(p);
                }
            }
        }
    }

    /// The representative mapping the base point to `p`.
    fn rep(&self, p: u32) -> Permutation {
        match &self.trans {
            Transversal::Explicit { reps, .. } => reps[self.pos[p as usize] as usize].clone(),
            Transversal::Tree { edge } => {
                let degree = self.pos.len();
                let mut path = Vec::new();
                let mut p = p;
                while p != self.base_point {
                    let gi = edge[self.pos[p as usize] as usize] as usize;
                    path.push(gi);
                    p = self.inv_gens[gi].image(p);
                }
                let mut r = Permutation::identity(degree);
                for &gi in path.iter().rev() {
                    r.mul_assign(&self.gens[gi]);
                }
                r
            }
        }
    }

    /// `x <- x * rep(p)`.
    fn apply_rep(&self, x: &mut Permutation, p: u32) {
        match &self.trans {
            Transversal::Explicit { reps, .. } => x.mul_assign(&reps[self.pos[p as usize] as usize]),
            Transversal::Tree { .. } => x.mul_assign(&self.rep(p)),
        }
    }
}

/// A base and strong generating set for a permutation group.
#[derive(Clone, Debug)]
pub struct StabilizerChain {
    degree: usize,
    generators: Vec<Permutation>,
    levels: Vec<Level>,
    order: BigUint,
}

impl StabilizerChain {
    /// Builds the chain of `<gens>` on `degree` points.
    pub fn build(degree: usize, gens: &[Permutation], seed: u64) -> Result<Self> {
        Self::build_with(degree, gens, &ChainOptions::seeded(seed))
    }

    pub fn build_with(degree: usize, gens: &[Permutation], opts: &ChainOptions) -> Result<Self> {
        for g in gens {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch {
                    expected: degree,
                    found: g.degree(),
                });
            }
        }
        for &b in &opts.base_prefix {
            if b as usize >= degree {
                return Err(Error::PointOutOfRange {
                    point: b as u64 + 1,
                    degree,
                });
            }
        }
        let mut chain = StabilizerChain {
            degree,
            generators: gens.to_vec(),
            levels: Vec::new(),
            order: BigUint::one(),
        };
        for &b in &opts.base_prefix {
            if chain.levels.iter().all(|l| l.base_point != b) {
                chain.levels.push(Level::new(b, degree));
            }
        }
        let nontrivial: Vec<Permutation> =
            gens.iter().filter(|g| !g.is_identity()).cloned().collect();
        for g in &nontrivial {
            chain.insert_generator(g.clone());
        }
        chain.complete(&nontrivial, opts);
        Ok(chain)
    }

    /// The chain of `<self, extra>`.
    pub fn extend(&self, extra: &[Permutation], opts: &ChainOptions) -> Result<Self> {
        for g in extra {
            if g.degree() != self.degree {
                return Err(Error::DegreeMismatch {
                    expected: self.degree,
                    found: g.degree(),
                });
            }
        }
        let mut chain = self.clone();
        let fresh: Vec<Permutation> = extra
            .iter()
            .filter(|g| !chain.contains(g))
            .cloned()
            .collect();
        if fresh.is_empty() {
            return Ok(chain);
        }
        chain.generators.extend(fresh.iter().cloned());
        for g in &fresh {
            if let Some((h, j)) = chain.sift_residue(g) {
                chain.add_strong(h, j);
            }
        }
        let gens = chain.generators.clone();
        chain.complete(&gens, opts);
        Ok(chain)
    }

    /// Adds `g` so that every generator moves some base point and lies in the
    /// level-0 generating set.
    fn insert_generator(&mut self, g: Permutation) {
        let j = self
            .levels
            .iter()
            .position(|l| g.image(l.base_point) != l.base_point)
            .unwrap_or(self.levels.len());
        if j == self.levels.len() {
            let b = g.first_moved().expect("nontrivial generator");
            self.levels.push(Level::new(b, self.degree));
        }
        for k in 0..=j {
            self.levels[k].add_gen(g.clone());
        }
        self.refresh_order();
    }

    fn add_strong(&mut self, h: Permutation, j: usize) {
        if j == self.levels.len() {
            let b = h.first_moved().expect("nontrivial residue");
            self.levels.push(Level::new(b, self.degree));
        }
        for k in 0..=j {
            self.levels[k].add_gen(h.clone());
        }
        self.refresh_order();
    }

    fn refresh_order(&mut self) {
        let mut small: u128 = 1;
        let mut big: Option<BigUint> = None;
        for l in &self.levels {
            let len = l.orbit.len() as u128;
            match &mut big {
                Some(b) => *b *= BigUint::from(len),
                None => match small.checked_mul(len) {
                    Some(v) => small = v,
                    None => big = Some(BigUint::from(small) * BigUint::from(len)),
                },
            }
        }
        self.order = big.unwrap_or_else(|| BigUint::from(small));
    }

    fn reached(&self, bound: &Option<BigUint>) -> bool {
        matches!(bound, Some(b) if &self.order >= b)
    }

    fn complete(&mut self, gens: &[Permutation], opts: &ChainOptions) {
        if gens.is_empty() || self.reached(&opts.order_bound) {
            return;
        }
        let mut pr = ProductReplacement::new(gens, rng::stream(opts.seed, 0x5c4e));
        let mut misses = 0;
        while misses < MISS_LIMIT {
            let g = pr.next();
            match self.sift_residue(&g) {
                None => misses += 1,
                Some((h, j)) => {
                    misses = 0;
                    self.add_strong(h, j);
                    if self.reached(&opts.order_bound) {
                        return;
                    }
                }
            }
        }
        self.verify_schreier(&opts.order_bound);
    }

    /// Deterministic Schreier-Sims check: every Schreier generator of every
    /// level sifts through the levels below it.
    fn verify_schreier(&mut self, bound: &Option<BigUint>) {
        if self.levels.is_empty() {
            return;
        }
        let mut i = self.levels.len() as isize - 1;
        while i >= 0 {
            let iu = i as usize;
            match self.failing_schreier_generator(iu) {
                Some((h, j)) => {
                    self.add_strong(h, j);
                    if self.reached(bound) {
                        return;
                    }
                    i = j as isize;
                }
                None => i -= 1,
            }
        }
    }

    fn failing_schreier_generator(&self, i: usize) -> Option<(Permutation, usize)> {
        let level = &self.levels[i];
        let mut x = Permutation::identity(self.degree);
        for &p in &level.orbit {
            for g in &level.gens {
                let q = g.image(p);
                // u_p g u_q^-1
                x.clone_from(&level.rep(p));
                x.mul_assign(g);
                level.strip(&mut x, q);
                if x.is_identity() {
                    continue;
                }
                if let Some((h, j)) = self.sift_from(x.clone(), i + 1) {
                    return Some((h, j));
                }
            }
        }
        None
    }

    /// Sifts `g`; returns the nontrivial residue and its drop level, or
    /// `None` when `g` is a member.
    fn sift_residue(&self, g: &Permutation) -> Option<(Permutation, usize)> {
        self.sift_from(g.clone(), 0)
    }

    fn sift_from(&self, mut x: Permutation, start: usize) -> Option<(Permutation, usize)> {
        for (k, level) in self.levels.iter().enumerate().skip(start) {
            let p = x.image(level.base_point);
            if level.pos[p as usize] == ABSENT {
                return Some((x, k));
            }
            level.strip(&mut x, p);
        }
        if x.is_identity() {
            None
        } else {
            Some((x, self.levels.len()))
        }
    }

    /// Sift residue and the number of levels passed.
    pub fn sift(&self, g: &Permutation) -> (Permutation, usize) {
        let mut x = g.clone();
        for (k, level) in self.levels.iter().enumerate() {
            let p = x.image(level.base_point);
            if level.pos[p as usize] == ABSENT {
                return (x, k);
            }
            level.strip(&mut x, p);
        }
        (x, self.levels.len())
    }

    /// Exact membership test.
    pub fn contains(&self, g: &Permutation) -> bool {
        if g.degree() != self.degree {
            return false;
        }
        self.sift_residue(g).is_none()
    }

    /// Membership with a degree check that reports mismatches.
    pub fn try_contains(&self, g: &Permutation) -> Result<bool> {
        if g.degree() != self.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: g.degree(),
            });
        }
        Ok(self.contains(g))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    pub fn order_u64(&self) -> Option<u64> {
        self.order.to_u64()
    }

    pub fn is_trivial(&self) -> bool {
        self.order.is_one()
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.base_point).collect()
    }

    pub fn base_len(&self) -> usize {
        self.levels.len()
    }

    pub fn orbit(&self, level: usize) -> &[u32] {
        &self.levels[level].orbit
    }

    pub fn orbit_lengths(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    /// Strong generators of the stabilizer of the first `level` base points.
    pub fn stabilizer_generators(&self, level: usize) -> &[Permutation] {
        self.levels.get(level).map(|l| &l.gens[..]).unwrap_or(&[])
    }

    /// All strong generators (level 0 holds every one of them).
    pub fn strong_generators(&self) -> &[Permutation] {
        self.stabilizer_generators(0)
    }

    /// Representative mapping base point `level` to `point`, if in the orbit.
    pub fn transversal_rep(&self, level: usize, point: u32) -> Option<Permutation> {
        let l = &self.levels[level];
        (l.pos[point as usize] != ABSENT).then(|| l.rep(point))
    }

    /// Rank of a member: mixed radix of its transversal indices, level 0
    /// least significant. Requires `g` in the group.
    pub fn rank(&self, g: &Permutation) -> u64 {
        self.rank_images(g.images())
    }

    pub fn rank_images(&self, images: &[u32]) -> u64 {
        let k = self.levels.len();
        let mut imgs: smallbuf::Buf = smallbuf::Buf::new(k);
        for (j, l) in self.levels.iter().enumerate() {
            imgs[j] = images[l.base_point as usize];
        }
        let mut rank = 0u64;
        let mut radix = 1u64;
        for i in 0..k {
            let level = &self.levels[i];
            let p = imgs[i];
            let idx = level.pos[p as usize];
            debug_assert_ne!(idx, ABSENT, "rank of a non-member");
            rank += idx as u64 * radix;
            radix *= level.orbit.len() as u64;
            for imj in imgs.iter_mut().take(k).skip(i + 1) {
                *imj = level.inv_rep_point(p, *imj);
            }
        }
        rank
    }

    /// Rank if `images` is a member, `None` otherwise. Cheaper than a full
    /// sift when membership is likely, but still exact.
    pub fn try_rank_images(&self, images: &[u32]) -> Option<u64> {
        let x = Permutation::from_images_unchecked(images.to_vec());
        self.contains(&x).then(|| self.rank_images(images))
    }

    /// Inverse of [`rank`](Self::rank).
    pub fn unrank(&self, mut r: u64) -> Permutation {
        let mut digits = Vec::with_capacity(self.levels.len());
        for l in &self.levels {
            let len = l.orbit.len() as u64;
            digits.push((r % len) as usize);
            r /= len;
        }
        let mut x = Permutation::identity(self.degree);
        for (l, &d) in self.levels.iter().zip(&digits).rev() {
            l.apply_rep(&mut x, l.orbit[d]);
        }
        x
    }

    /// Uniformly random element: one random representative per level.
    pub fn random_element(&self, rng: &mut Rng) -> Permutation {
        let mut x = Permutation::identity(self.degree);
        for l in self.levels.iter().rev() {
            let d = rng.gen_range(0..l.orbit.len());
            l.apply_rep(&mut x, l.orbit[d]);
        }
        x
    }

    /// Order as `u64` if it is at most `cap`, else the refusal error.
    pub fn check_cap(&self, cap: u64) -> Result<u64> {
        match self.order.to_u64() {
            Some(n) if n <= cap => Ok(n),
            _ => Err(Error::CapExceeded {
                order: self.order.clone(),
                cap,
            }),
        }
    }

    /// Every element exactly once, in rank order.
    pub fn elements(&self, cap: u64) -> Result<Elements<'_>> {
        let total = self.check_cap(cap)?;
        Ok(Elements::new(self, total))
    }

    /// Chain of `g^-1 H g` without recomputation.
    pub fn conjugate(&self, g: &Permutation) -> StabilizerChain {
        let n = self.degree;
        let levels = self
            .levels
            .iter()
            .map(|l| {
                let mut pos = vec![ABSENT; n];
                let orbit: Vec<u32> = l.orbit.iter().map(|&p| g.image(p)).collect();
                for (i, &p) in orbit.iter().enumerate() {
                    pos[p as usize] = i as u32;
                }
                let trans = match &l.trans {
                    Transversal::Explicit { reps, inv } => Transversal::Explicit {
                        reps: reps.iter().map(|r| r.conjugate_by(g)).collect(),
                        inv: inv.iter().map(|r| r.conjugate_by(g)).collect(),
                    },
                    Transversal::Tree { edge } => Transversal::Tree { edge: edge.clone() },
                };
                Level {
                    base_point: g.image(l.base_point),
                    gens: l.gens.iter().map(|x| x.conjugate_by(g)).collect(),
                    inv_gens: l.inv_gens.iter().map(|x| x.conjugate_by(g)).collect(),
                    orbit,
                    pos,
                    trans,
                }
            })
            .collect();
        StabilizerChain {
            degree: n,
            generators: self.generators.iter().map(|x| x.conjugate_by(g)).collect(),
            levels,
            order: self.order.clone(),
        }
    }

    /// Orbit of `point` under the group.
    pub fn orbit_of(&self, point: u32) -> Vec<u32> {
        orbit_of(self.strong_generators(), self.degree, point)
    }
}

/// Orbit of `point` under `<gens>`, in discovery order.
pub fn orbit_of(gens: &[Permutation], degree: usize, point: u32) -> Vec<u32> {
    let mut seen = vec![false; degree];
    seen[point as usize] = true;
    let mut orbit = vec![point];
    let mut i = 0;
    while i < orbit.len() {
        let p = orbit[i];
        for g in gens {
            let q = g.image(p);
            if !seen[q as usize] {
                seen[q as usize] = true;
                orbit.push(q);
            }
        }
        i += 1;
    }
    orbit
}

/// All orbits of `<gens>`, each sorted, ordered by least point.
pub fn orbits(gens: &[Permutation], degree: usize) -> Vec<Vec<u32>> {
    let mut seen = vec![false; degree];
    let mut out = Vec::new();
    for p in 0..degree as u32 {
        if seen[p as usize] {
            continue;
        }
        let mut o = orbit_of(gens, degree, p);
        for &q in &o {
            seen[q as usize] = true;
        }
        o.sort_unstable();
        out.push(o);
    }
    out
}

/// Iterator over the elements of a chain in rank order.
pub struct Elements<'a> {
    chain: &'a StabilizerChain,
    digits: Vec<usize>,
    /// `prefix[i]` is the product of the representatives of levels
    /// `k-1, ..., i`; `prefix[k]` is the identity.
    prefix: Vec<Permutation>,
    remaining: u64,
}

impl<'a> Elements<'a> {
    fn new(chain: &'a StabilizerChain, total: u64) -> Self {
        let k = chain.levels.len();
        let mut prefix = vec![Permutation::identity(chain.degree); k + 1];
        for i in (0..k).rev() {
            let mut p = prefix[i + 1].clone();
            chain.levels[i].apply_rep(&mut p, chain.levels[i].orbit[0]);
            prefix[i] = p;
        }
        Elements {
            chain,
            digits: vec![0; k],
            prefix,
            remaining: total,
        }
    }
}

impl Iterator for Elements<'_> {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let out = self.prefix[0].clone();
        if self.remaining > 0 {
            // odometer increment, level 0 fastest
            let levels = &self.chain.levels;
            let mut i = 0;
            while i < levels.len() {
                self.digits[i] += 1;
                if self.digits[i] < levels[i].orbit.len() {
                    break;
                }
                self.digits[i] = 0;
                i += 1;
            }
            for j in (0..=i.min(levels.len() - 1)).rev() {
                let mut p = self.prefix[j + 1].clone();
                levels[j].apply_rep(&mut p, levels[j].orbit[self.digits[j]]);
                self.prefix[j] = p;
            }
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = self.remaining as usize;
        (r, Some(r))
    }
}

/// Product replacement with an accumulator.
struct ProductReplacement {
    state: Vec<Permutation>,
    acc: Permutation,
    rng: Rng,
}

impl ProductReplacement {
    fn new(gens: &[Permutation], rng: Rng) -> Self {
        let degree = gens[0].degree();
        let len = gens.len().max(10);
        let state: Vec<Permutation> = (0..len).map(|i| gens[i % gens.len()].clone()).collect();
        let mut pr = ProductReplacement {
            state,
            acc: Permutation::identity(degree),
            rng,
        };
        for _ in 0..50 {
            pr.next();
        }
        pr
    }

    fn next(&mut self) -> Permutation {
        let n = self.state.len();
        let i = self.rng.gen_range(0..n);
        let mut j = self.rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let rhs = if self.rng.gen::<bool>() {
            self.state[j].clone()
        } else {
            self.state[j].inverse()
        };
        if self.rng.gen::<bool>() {
            self.state[i].mul_assign(&rhs);
        } else {
            self.state[i] = rhs.mul(&self.state[i]);
        }
        self.acc.mul_assign(&self.state[i]);
        self.acc.clone()
    }
}

mod smallbuf {
    use std::ops::{Deref, DerefMut};

    /// Stack buffer for base images; base lengths are short in practice.
    pub struct Buf {
        inline: [u32; 32],
        heap: Vec<u32>,
        len: usize,
    }

    impl Buf {
        pub fn new(len: usize) -> Self {
            Buf {
                inline: [0; 32],
                heap: if len > 32 { vec![0; len] } else { Vec::new() },
                len,
            }
        }
    }

    impl Deref for Buf {
        type Target = [u32];
        fn deref(&self) -> &[u32] {
            if self.len > 32 {
                &self.heap
            } else {
                &self.inline[..self.len]
            }
        }
    }

    impl DerefMut for Buf {
        fn deref_mut(&mut self) -> &mut [u32] {
            if self.len > 32 {
                &mut self.heap
            } else {
                &mut self.inline[..self.len]
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::parse_cycles;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn p(s: &str, n: usize) -> Permutation {
        parse_cycles(s, n).unwrap()
    }

    /// Brute-force closure of `<gens>`.
    fn closure(gens: &[Permutation], degree: usize) -> HashSet<Permutation> {
        let mut seen = HashSet::new();
        let id = Permutation::identity(degree);
        seen.insert(id.clone());
        let mut queue = vec![id];
        while let Some(x) = queue.pop() {
            for g in gens {
                let y = x.mul(g);
                if seen.insert(y.clone()) {
                    queue.push(y);
                }
            }
        }
        seen
    }

    fn a5() -> StabilizerChain {
        StabilizerChain::build(5, &[p("(1,2,3,4,5)", 5), p("(3,4,5)", 5)], 1).unwrap()
    }

    #[test]
    fn empty_generating_set() {
        let c = StabilizerChain::build(5, &[], 0).unwrap();
        assert!(c.is_trivial());
        assert!(c.contains(&Permutation::identity(5)));
        assert_eq!(c.elements(10).unwrap().count(), 1);
    }

    #[test]
    fn a5_order_matches_closure() {
        let gens = [p("(1,2,3,4,5)", 5), p("(3,4,5)", 5)];
        assert_eq!(closure(&gens, 5).len(), 60);
        assert_eq!(a5().order(), &BigUint::from(60u32));
    }

    #[test]
    fn membership_in_a5() {
        let c = a5();
        assert!(c.contains(&Permutation::identity(5)));
        assert!(!c.contains(&p("(1,2)", 5)));
        assert!(c.contains(&p("(1,2,3)", 5)));
        assert!(c.try_contains(&p("(1,2)", 6)).is_err());
    }

    #[test]
    fn degree_mismatch_is_an_error() {
        let r = StabilizerChain::build(5, &[p("(1,2)", 6)], 0);
        assert!(matches!(r, Err(Error::DegreeMismatch { .. })));
    }

    #[test]
    fn enumeration_is_exact() {
        let c = a5();
        let all: Vec<_> = c.elements(1000).unwrap().collect();
        assert_eq!(all.len(), 60);
        let set: HashSet<_> = all.iter().cloned().collect();
        assert_eq!(set.len(), 60);
        for (r, x) in all.iter().enumerate() {
            assert_eq!(c.rank(x), r as u64);
            assert_eq!(&c.unrank(r as u64), x);
        }
        assert!(matches!(c.elements(59), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn large_degree_uses_trees() {
        // S_3 acting diagonally on many copies of three points
        let n = 3 * 300;
        let mut a = Vec::new();
        let mut b = Vec::new();
        for k in 0..300u32 {
            a.push(vec![3 * k, 3 * k + 1]);
            b.push(vec![3 * k, 3 * k + 1, 3 * k + 2]);
        }
        let a = Permutation::from_cycles(n, &a).unwrap();
        let b = Permutation::from_cycles(n, &b).unwrap();
        let c = StabilizerChain::build(n, &[a.clone(), b.clone()], 3).unwrap();
        assert_eq!(c.order_u64(), Some(6));
        let all: HashSet<_> = c.elements(10).unwrap().collect();
        assert_eq!(all, closure(&[a, b], n));
    }

    #[test]
    fn bound_and_prefix() {
        let gens = [p("(1,2,3,4,5)", 5), p("(3,4,5)", 5)];
        let opts = ChainOptions::seeded(9)
            .with_base(vec![4, 2])
            .with_bound(BigUint::from(60u32));
        let c = StabilizerChain::build_with(5, &gens, &opts).unwrap();
        assert_eq!(&c.base()[..2], &[4, 2]);
        assert_eq!(c.order_u64(), Some(60));
        // stabilizer of point 5 is A4
        let st = StabilizerChain::build(5, c.stabilizer_generators(1), 0).unwrap();
        assert_eq!(st.order_u64(), Some(12));
        assert!(st.strong_generators().iter().all(|g| g.image(4) == 4));
    }

    #[test]
    fn extend_and_conjugate() {
        let c = StabilizerChain::build(5, &[p("(1,2,3,4,5)", 5)], 0).unwrap();
        let d = c.extend(&[p("(2,5)(3,4)", 5)], &ChainOptions::seeded(1)).unwrap();
        assert_eq!(d.order_u64(), Some(10));
        let g = p("(1,2)", 5);
        let e = d.conjugate(&g);
        assert_eq!(e.order_u64(), Some(10));
        for x in d.elements(100).unwrap() {
            assert!(e.contains(&x.conjugate_by(&g)));
        }
    }

    #[test]
    fn orbits_and_structure() {
        let c = a5();
        let product: usize = c.orbit_lengths().iter().product();
        assert_eq!(product, 60);
        for (i, _) in c.base().iter().enumerate() {
            for g in c.stabilizer_generators(i) {
                for &b in &c.base()[..i] {
                    assert_eq!(g.image(b), b);
                }
            }
        }
        assert_eq!(orbits(&[p("(1,2)(4,5)", 6)], 6).len(), 4);
    }

    #[test]
    fn random_elements_are_uniform_on_a4() {
        let gens = [p("(1,2,3)", 4), p("(1,2)(3,4)", 4)];
        let c = StabilizerChain::build(4, &gens, 5).unwrap();
        assert_eq!(c.order_u64(), Some(12));
        let mut rng = rng::stream(42, 0);
        let mut counts = vec![0u32; 12];
        for _ in 0..12000 {
            counts[c.rank(&c.random_element(&mut rng)) as usize] += 1;
        }
        for &k in &counts {
            assert!((850..=1150).contains(&k), "{counts:?}");
        }
        // chi-square with 11 dof; 10^-6 upper quantile is about 49.3
        let chi: f64 = counts
            .iter()
            .map(|&k| (k as f64 - 1000.0).powi(2) / 1000.0)
            .sum();
        assert!(chi < 49.3, "chi-square {chi}");
    }

    #[test]
    fn random_streams_are_reproducible() {
        let c = a5();
        let mut r1 = rng::stream(11, 2);
        let mut r2 = rng::stream(11, 2);
        for _ in 0..50 {
            assert_eq!(c.random_element(&mut r1), c.random_element(&mut r2));
        }
        let t = StabilizerChain::build(5, &[], 0).unwrap();
        assert!(t.random_element(&mut r1).is_identity());
    }

    fn arb_gens() -> impl Strategy<Value = (usize, Vec<Permutation>)> {
        (2usize..9).prop_flat_map(|n| {
            let perm = Just((0..n as u32).collect::<Vec<_>>())
                .prop_shuffle()
                .prop_map(|v| Permutation::from_images(v).unwrap());
            (Just(n), proptest::collection::vec(perm, 0..4))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(60))]
        #[test]
        fn chain_matches_closure((n, gens) in arb_gens(), seed in 0u64..1000) {
            let c = StabilizerChain::build(n, &gens, seed).unwrap();
            let set = closure(&gens, n);
            prop_assert_eq!(c.order_u64(), Some(set.len() as u64));
            let product: usize = c.orbit_lengths().iter().product();
            prop_assert_eq!(product, set.len());
            for g in &gens {
                prop_assert!(c.contains(g));
            }
            // 100 random words in the generators sift to the identity
            let mut rng = rng::stream(seed, 1);
            for _ in 0..100 {
                if gens.is_empty() { break; }
                let mut w = Permutation::identity(n);
                for _ in 0..rng.gen_range(1..8) {
                    w.mul_assign(&gens[rng.gen_range(0..gens.len())]);
                }
                prop_assert!(c.sift(&w).0.is_identity());
            }
        }
    }
}
