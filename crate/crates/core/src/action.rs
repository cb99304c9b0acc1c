//! Transitive actions: right cosets of a subgroup and `k`-subsets, with
//! fixed point ratios.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::base::PermGroup;
use crate::chain::{ChainOptions, StabilizerChain};
use crate::error::{Error, Result};
use crate::group::Group;
use crate::perm::Permutation;
use crate::subgroup::Subgroup;

/// `G` acting on the right cosets `Hx` by right multiplication.
pub struct CosetAction {
    /// `H` with a chain whose base starts with the base of `G`.
    stabilizer: Subgroup,
    h_chain: StabilizerChain,
    g_base: Vec<u32>,
    /// Canonical representative of each coset; coset 0 is `H`.
    reps: Vec<Permutation>,
    index: HashMap<Vec<u32>, u32>,
    /// Images of the parent generators.
    gen_images: Vec<Permutation>,
    group_order: BigUint,
}

impl CosetAction {
    /// Builds the action of `G` on `G/H` by an orbit search from `H`.
    pub fn new(group: &Group, h: &Subgroup) -> Result<Self> {
        let degree_big = group.order() / h.order();
        let cap = group.limits().degree_cap;
        let degree = match degree_big.to_u64() {
            Some(d) if d <= cap => d as usize,
            _ => {
                return Err(Error::DegreeCapExceeded {
                    degree: degree_big,
                    cap,
                })
            }
        };
        let g_base = group.chain().base();
        let opts = ChainOptions::seeded(group.seed())
            .with_base(g_base.clone())
            .with_bound(h.order().clone());
        let h_chain = StabilizerChain::build_with(group.degree(), h.generators(), &opts)?;
        debug_assert_eq!(h_chain.order(), h.order());
        let mut action = CosetAction {
            stabilizer: h.clone(),
            h_chain,
            g_base,
            reps: Vec::with_capacity(degree),
            index: HashMap::with_capacity(degree),
            gen_images: Vec::new(),
            group_order: group.order().clone(),
        };
        let (key, rep) = action.canonical(&group.identity());
        action.index.insert(key, 0);
        action.reps.push(rep);
        let gens = group.generators();
        let mut images: Vec<Vec<u32>> = vec![Vec::with_capacity(degree); gens.len()];
        let mut i = 0;
        while i < action.reps.len() {
            for (gi, g) in gens.iter().enumerate() {
                let y = action.reps[i].mul(g);
                let (key, rep) = action.canonical(&y);
                let next = action.reps.len() as u32;
                let j = *action.index.entry(key).or_insert(next);
                if j == next {
                    action.reps.push(rep);
                }
                images[gi].push(j);
            }
            i += 1;
        }
        if action.reps.len() != degree {
            return Err(Error::invalid(format!(
                "coset search found {} cosets, expected {degree}",
                action.reps.len()
            )));
        }
        action.gen_images = images
            .into_iter()
            .map(Permutation::from_images)
            .collect::<Result<Vec<_>>>()?;
        Ok(action)
    }

    /// Lexicographically least base image tuple over the coset `Hx`, with the
    /// element attaining it.
    fn canonical(&self, x: &Permutation) -> (Vec<u32>, Permutation) {
        let mut y = x.clone();
        for level in 0..self.h_chain.base_len() {
            let orbit = self.h_chain.orbit(level);
            if orbit.len() > 1 {
                let best = *orbit.iter().min_by_key(|&&p| y.image(p)).expect("orbit nonempty");
                let u = self.h_chain.transversal_rep(level, best).expect("orbit point");
                y = u.mul(&y);
            }
        }
        let key = self.g_base.iter().map(|&b| y.image(b)).collect();
        (key, y)
    }

    pub fn degree(&self) -> usize {
        self.reps.len()
    }

    pub fn stabilizer(&self) -> &Subgroup {
        &self.stabilizer
    }

    pub fn generator_images(&self) -> &[Permutation] {
        &self.gen_images
    }

    pub fn group_order(&self) -> &BigUint {
        &self.group_order
    }

    /// Representative of coset `i`.
    pub fn coset_rep(&self, i: usize) -> &Permutation {
        &self.reps[i]
    }

    /// Coset containing `x`.
    pub fn coset_of(&self, x: &Permutation) -> usize {
        let (key, _) = self.canonical(x);
        self.index[&key] as usize
    }

    /// Image of a parent element in the action.
    pub fn act(&self, x: &Permutation) -> Permutation {
        let images = self
            .reps
            .iter()
            .map(|r| self.coset_of(&r.mul(x)) as u32)
            .collect();
        Permutation::from_images(images).expect("action is a bijection")
    }

    /// Number of cosets fixed by `x`: `Hr x = Hr` iff `r x r^-1` lies in `H`.
    pub fn fixed_points(&self, x: &Permutation) -> usize {
        self.reps
            .iter()
            .filter(|r| self.h_chain.contains(&r.mul(x).mul(&r.inverse())))
            .count()
    }

    /// Fixed point ratio by counting fixed cosets.
    pub fn fpr(&self, x: &Permutation) -> BigRational {
        BigRational::new(self.fixed_points(x).into(), self.degree().into())
    }

    /// Chain of the image group on the cosets. The order is known, so
    /// construction stops as soon as it is reached.
    pub fn image_chain(&self, seed: u64) -> Result<StabilizerChain> {
        image_chain(&self.gen_images, &self.group_order, seed)
    }

    /// The image on the cosets, or `None` when `H` contains a nontrivial
    /// normal subgroup and the action has a kernel.
    pub fn faithful_image(&self, seed: u64) -> Result<Option<PermGroup>> {
        let opts = ChainOptions::seeded(seed).with_bound(self.group_order.clone());
        let chain = StabilizerChain::build_with(self.degree(), &self.gen_images, &opts)?;
        Ok((chain.order() == &self.group_order)
            .then(|| PermGroup::new(self.degree(), self.gen_images.clone(), self.group_order.clone())))
    }
}

pub(crate) fn image_chain(gens: &[Permutation], order: &BigUint, seed: u64) -> Result<StabilizerChain> {
    let degree = gens.first().map(|g| g.degree()).unwrap_or(1);
    let opts = ChainOptions::seeded(seed).with_bound(order.clone());
    let chain = StabilizerChain::build_with(degree, gens, &opts)?;
    if chain.order() != order {
        return Err(Error::invalid("action is not faithful"));
    }
    Ok(chain)
}

/// `|x^G ∩ H| / |x^G|`, by sweeping `H` and classifying each element.
pub fn fpr_by_class(group: &Group, h: &Subgroup, x: &Permutation) -> Result<BigRational> {
    let table = group.classes()?;
    let c = table.class_of(x);
    let cap = group.limits().enum_cap;
    let hits = h.elements(cap)?.filter(|y| table.class_of(y) == c).count();
    let size = &table.class(c).size;
    Ok(BigRational::new(hits.into(), size.clone().into()))
}

/// `S_n` or `A_n` (any group of degree `n`) acting on `k`-subsets.
pub struct SubsetAction {
    n: usize,
    k: usize,
    subsets: Vec<u64>,
    index: HashMap<u64, u32>,
    gen_images: Vec<Permutation>,
    group_order: BigUint,
}

impl SubsetAction {
    pub fn new(group: &Group, k: usize) -> Result<Self> {
        let n = group.degree();
        if k == 0 || k > n || n > 64 {
            return Err(Error::invalid(format!("k-subset action needs 1 <= k <= n <= 64, got n={n} k={k}")));
        }
        let count = binomial(n as u64, k as u64);
        if count > BigUint::from(group.limits().degree_cap) {
            return Err(Error::DegreeCapExceeded {
                degree: count,
                cap: group.limits().degree_cap,
            });
        }
        let subsets = k_subsets(n, k);
        let index: HashMap<u64, u32> = subsets.iter().enumerate().map(|(i, &s)| (s, i as u32)).collect();
        let mut action = SubsetAction {
            n,
            k,
            subsets,
            index,
            gen_images: Vec::new(),
            group_order: group.order().clone(),
        };
        action.gen_images = group.generators().iter().map(|g| action.act(g)).collect();
        Ok(action)
    }

    pub fn degree(&self) -> usize {
        self.subsets.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generator_images(&self) -> &[Permutation] {
        &self.gen_images
    }

    pub fn group_order(&self) -> &BigUint {
        &self.group_order
    }

    pub fn act(&self, x: &Permutation) -> Permutation {
        let images = self
            .subsets
            .iter()
            .map(|&s| {
                let mut t = 0u64;
                let mut bits = s;
                while bits != 0 {
                    let p = bits.trailing_zeros();
                    t |= 1 << x.image(p);
                    bits &= bits - 1;
                }
                self.index[&t]
            })
            .collect();
        Permutation::from_images(images).expect("action is a bijection")
    }

    pub fn fpr(&self, x: &Permutation) -> BigRational {
        let fixed = self.act(x).fixed_points();
        BigRational::new(fixed.into(), self.degree().into())
    }
}

fn k_subsets(n: usize, k: usize) -> Vec<u64> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.iter().fold(0u64, |acc, &p| acc | 1 << p));
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - k + i {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Fixed point ratio of an element with cycle type `shape` (fixed points
/// included) on `k`-subsets of `n` points.
///
/// A subset is fixed iff it is a union of cycles. For shape `[d^r, 1^(n-dr)]`
/// this is `sum_i C(r,i) C(n-dr, k-di) / C(n,k)`; other shapes use the
/// coefficient of `t^k` in `prod (1 + t^len)`.
pub fn fpr_ksets(shape: &[usize], n: usize, k: usize) -> Result<BigRational> {
    if shape.iter().sum::<usize>() != n || shape.contains(&0) {
        return Err(Error::invalid(format!("shape {shape:?} does not partition {n}")));
    }
    if k == 0 || 2 * k > n {
        return Err(Error::invalid(format!("need 1 <= k <= n/2, got k={k}, n={n}")));
    }
    let total = binomial(n as u64, k as u64);
    let moved: Vec<usize> = shape.iter().cloned().filter(|&l| l > 1).collect();
    let fixed = n - moved.iter().sum::<usize>();
    let uniform = moved.windows(2).all(|w| w[0] == w[1]);
    let count = if uniform {
        let d = moved.first().cloned().unwrap_or(1);
        let r = moved.len();
        let mut acc = BigUint::zero();
        for i in 0..=r {
            if d * i > k {
                break;
            }
            acc += binomial(r as u64, i as u64) * binomial(fixed as u64, (k - d * i) as u64);
        }
        acc
    } else {
        let mut coeff = vec![BigUint::zero(); k + 1];
        coeff[0] = BigUint::from(1u32);
        for &l in shape {
            for j in (l..=k).rev() {
                let add = coeff[j - l].clone();
                coeff[j] += add;
            }
        }
        coeff[k].clone()
    };
    Ok(BigRational::new(count.into(), total.into()))
}
