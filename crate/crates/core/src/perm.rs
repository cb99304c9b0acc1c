//! Permutations on `0..n` with cycle-notation I/O.
//!
//! Points are 0-based internally. Cycle notation is 1-based, so the printed
//! form of the transposition swapping points 0 and 1 is `(1,2)`.
//!
//! Products act on the right: `p.mul(&q)` sends `i` to `q[p[i]]`, and
//! conjugation `x.conjugate_by(g)` is `g^-1 x g`.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Self {
            images: (0..degree as u32).collect(),
        }
    }

    /// Builds a permutation from its image array, checking bijectivity.
    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            let i = i as usize;
            if i >= n || seen[i] {
                return Err(Error::NotBijection { degree: n });
            }
            seen[i] = true;
        }
        Ok(Self { images })
    }

    pub(crate) fn from_images_unchecked(images: Vec<u32>) -> Self {
        debug_assert!(Self::from_images(images.clone()).is_ok());
        Self { images }
    }

    /// The permutation with the given cycles (0-based points).
    pub fn from_cycles(degree: usize, cycles: &[Vec<u32>]) -> Result<Self> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut used = vec![false; degree];
        for cycle in cycles {
            for (k, &p) in cycle.iter().enumerate() {
                if p as usize >= degree {
                    return Err(Error::PointOutOfRange {
                        point: p as u64 + 1,
                        degree,
                    });
                }
                if used[p as usize] {
                    return Err(Error::RepeatedPoint { point: p + 1 });
                }
                used[p as usize] = true;
                images[p as usize] = cycle[(k + 1) % cycle.len()];
            }
        }
        Ok(Self { images })
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn images(&self) -> &[u32] {
        &self.images
    }

    #[inline]
    pub fn image(&self, point: u32) -> u32 {
        self.images[point as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &p)| i as u32 == p)
    }

    /// `self` followed by `other`.
    pub fn mul(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation {
            images: self.images.iter().map(|&p| other.images[p as usize]).collect(),
        }
    }

    /// Writes `self * other` into `out`, reusing its allocation.
    #[inline]
    pub fn mul_into(&self, other: &Permutation, out: &mut Permutation) {
        out.images.clear();
        out.images
            .extend(self.images.iter().map(|&p| other.images[p as usize]));
    }

    /// Replaces `self` by `self * other`.
    #[inline]
    pub fn mul_assign(&mut self, other: &Permutation) {
        for p in self.images.iter_mut() {
            *p = other.images[*p as usize];
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.degree()];
        for (i, &p) in self.images.iter().enumerate() {
            inv[p as usize] = i as u32;
        }
        Permutation { images: inv }
    }

    pub fn pow(&self, exp: i64) -> Permutation {
        let base = if exp < 0 { self.inverse() } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = Permutation::identity(self.degree());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc.mul_assign(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        acc
    }

    /// `g^-1 * self * g`.
    pub fn conjugate_by(&self, g: &Permutation) -> Permutation {
        // (p^g)^(g^-1 x g) = (p^x)^g
        let mut images = vec![0u32; self.degree()];
        for (p, &q) in self.images.iter().enumerate() {
            images[g.images[p] as usize] = g.images[q as usize];
        }
        Permutation { images }
    }

    /// Nontrivial cycles, each starting at its least point, ordered by
    /// least point.
    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.images[start] as usize == start {
                seen[start] = true;
                continue;
            }
            let mut cycle = Vec::new();
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                cycle.push(p as u32);
                p = self.images[p] as usize;
            }
            out.push(cycle);
        }
        out
    }

    /// All cycle lengths, fixed points included, in decreasing order.
    pub fn cycle_type(&self) -> Vec<usize> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                len += 1;
                p = self.images[p] as usize;
            }
            out.push(len);
        }
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }

    /// Element order as a big integer (lcm of the cycle lengths).
    pub fn order_big(&self) -> BigUint {
        self.cycle_type()
            .into_iter()
            .fold(BigUint::from(1u32), |acc, l| acc.lcm(&BigUint::from(l)))
    }

    /// Element order.
    ///
    /// Panics if the order does not fit in `u64`, which cannot happen below
    /// degree 100.
    pub fn order(&self) -> u64 {
        let mut acc: u64 = 1;
        for l in self.cycle_type() {
            let l = l as u64;
            acc = (acc / acc.gcd(&l))
                .checked_mul(l)
                .expect("element order overflows u64");
        }
        acc
    }

    /// True for even permutations.
    pub fn is_even(&self) -> bool {
        let ct = self.cycle_type();
        ct.iter().filter(|&&l| l % 2 == 0).count() % 2 == 0
    }

    pub fn fixed_points(&self) -> usize {
        self.images
            .iter()
            .enumerate()
            .filter(|(i, &p)| *i as u32 == p)
            .count()
    }

    /// Smallest moved point, if any.
    pub fn first_moved(&self) -> Option<u32> {
        self.images
            .iter()
            .enumerate()
            .find(|(i, &p)| *i as u32 != p)
            .map(|(i, _)| i as u32)
    }

    /// Parses cycle notation over 1-based points.
    pub fn parse(text: &str, degree: usize) -> Result<Self> {
        parse_cycles(text, degree)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            f.write_str("(")?;
            for (k, p) in c.iter().enumerate() {
                if k > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", p + 1)?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation[{}]{}", self.degree(), self)
    }
}

impl Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Parses a product of disjoint cycles such as `(1,2,3)(4,5)`.
///
/// Whitespace is ignored. `()` is the identity. A repeated point is an error
/// even across different cycles.
pub fn parse_cycles(text: &str, degree: usize) -> Result<Permutation> {
    let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut cycles: Vec<Vec<u32>> = Vec::new();
    let mut used = vec![false; degree];
    let mut i = 0;
    let token_at = |i: usize| -> String {
        chars[i..]
            .iter()
            .take(8)
            .collect::<String>()
    };
    if chars.is_empty() {
        return Err(Error::Parse {
            token: String::new(),
            reason: "empty input".into(),
        });
    }
    while i < chars.len() {
        if chars[i] != '(' {
            return Err(Error::Parse {
                token: token_at(i),
                reason: "expected `(`".into(),
            });
        }
        i += 1;
        let mut cycle = Vec::new();
        if i < chars.len() && chars[i] == ')' {
            i += 1;
            continue;
        }
        loop {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if start == i {
                return Err(Error::Parse {
                    token: if i < chars.len() { token_at(i) } else { "<end>".into() },
                    reason: "expected a point".into(),
                });
            }
            let digits: String = chars[start..i].iter().collect();
            let point: u64 = digits.parse().map_err(|_| Error::Parse {
                token: digits.clone(),
                reason: "point does not fit in an integer".into(),
            })?;
            if point == 0 || point > degree as u64 {
                return Err(Error::PointOutOfRange { point, degree });
            }
            let p = (point - 1) as u32;
            if used[p as usize] {
                return Err(Error::RepeatedPoint { point: point as u32 });
            }
            used[p as usize] = true;
            cycle.push(p);
            match chars.get(i) {
                Some(',') => i += 1,
                Some(')') => {
                    i += 1;
                    break;
                }
                Some(_) => {
                    return Err(Error::Parse {
                        token: token_at(i),
                        reason: "expected `,` or `)`".into(),
                    })
                }
                None => {
                    return Err(Error::Parse {
                        token: "<end>".into(),
                        reason: "unterminated cycle".into(),
                    })
                }
            }
        }
        cycles.push(cycle);
    }
    Permutation::from_cycles(degree, &cycles)
}

/// Least common multiple of a list of cycle lengths.
pub fn lcm_of(lengths: &[usize]) -> u64 {
    lengths
        .iter()
        .fold(1u64, |acc, &l| acc.lcm(&(l.max(1) as u64)))
}
