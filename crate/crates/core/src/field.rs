//! Arithmetic in small finite fields `F_q`, `q = p^a`.
//!
//! Elements are the integers `0..q`, read as base-`p` digit vectors of
//! polynomial residues modulo a monic irreducible of degree `a`. Multiplication
//! goes through discrete-log tables built from a primitive element.

use crate::error::{Error, Result};

/// Least monic irreducible per `(p, a)`, coefficients low to high. "Least"
/// means the smallest value of `c_0 + c_1 p + ... + c_{a-1} p^{a-1}`.
const MODULI: &[(u32, u32, &[u32])] = &[
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (3, 2, &[1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (5, 2, &[2, 0, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (2, 5, &[1, 0, 1, 0, 0, 1]),
    (7, 2, &[1, 0, 1]),
    (2, 6, &[1, 1, 0, 0, 0, 0, 1]),
    (3, 4, &[2, 1, 0, 0, 1]),
];

/// Largest field order supported (tables are `O(q)`).
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

#[derive(Clone, Debug)]
pub struct SmallField {
    p: u32,
    a: u32,
    q: u32,
    modulus: Vec<u32>,
    primitive: u32,
    /// `exp[i] = primitive^i` for `0 <= i < q-1`.
    exp: Vec<u32>,
    /// `log[x]` for nonzero `x`.
    log: Vec<u32>,
}

impl SmallField {
    /// The field of order `q`, or an error when `q` is not a prime power.
    pub fn new(q: u64) -> Result<Self> {
        let (p, a) = prime_power(q)
            .ok_or_else(|| Error::invalid(format!("{q} is not a prime power")))?;
        if q > MAX_FIELD_ORDER {
            return Err(Error::Unsupported(format!("field order {q} too large")));
        }
        let (p, a) = (p as u32, a);
        let modulus = match MODULI.iter().find(|(mp, ma, _)| *mp == p && *ma == a) {
            Some((_, _, m)) => m.to_vec(),
            None => least_irreducible(p, a),
        };
        let mut f = SmallField {
            p,
            a,
            q: q as u32,
            modulus,
            primitive: 0,
            exp: Vec::new(),
            log: Vec::new(),
        };
        f.build_tables();
        Ok(f)
    }

    fn build_tables(&mut self) {
        let q = self.q;
        for g in 1..q {
            let mut exp = Vec::with_capacity(q as usize - 1);
            let mut x = 1;
            loop {
                exp.push(x);
                x = self.mul_slow(x, g);
                if x == 1 {
                    break;
                }
            }
            if exp.len() == q as usize - 1 {
                let mut log = vec![0; q as usize];
                for (i, &e) in exp.iter().enumerate() {
                    log[e as usize] = i as u32;
                }
                self.primitive = g;
                self.exp = exp;
                self.log = log;
                return;
            }
        }
        // q = 2: the only nonzero element is primitive
        self.primitive = 1;
        self.exp = vec![1];
        self.log = vec![0, 0];
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.a
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// A generator of the multiplicative group.
    pub fn primitive_element(&self) -> u32 {
        self.primitive
    }

    /// The residue class of the indeterminate. It generates `F_q` over `F_p`;
    /// for prime fields this returns 1.
    pub fn generator_over_prime_field(&self) -> u32 {
        if self.a == 1 {
            1
        } else {
            self.p
        }
    }

    fn digits(&self, x: u32) -> Vec<u32> {
        let mut d = Vec::with_capacity(self.a as usize);
        let mut x = x;
        for _ in 0..self.a {
            d.push(x % self.p);
            x /= self.p;
        }
        d
    }

    fn from_digits(&self, d: &[u32]) -> u32 {
        d.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    pub fn add(&self, x: u32, y: u32) -> u32 {
        if self.a == 1 {
            return (x + y) % self.p;
        }
        let (dx, dy) = (self.digits(x), self.digits(y));
        let s: Vec<u32> = dx.iter().zip(&dy).map(|(a, b)| (a + b) % self.p).collect();
        self.from_digits(&s)
    }

    pub fn neg(&self, x: u32) -> u32 {
        if self.a == 1 {
            return (self.p - x) % self.p;
        }
        let d: Vec<u32> = self.digits(x).iter().map(|c| (self.p - c) % self.p).collect();
        self.from_digits(&d)
    }

    pub fn sub(&self, x: u32, y: u32) -> u32 {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: u32, y: u32) -> u32 {
        if x == 0 || y == 0 {
            return 0;
        }
        let n = self.q - 1;
        let l = (self.log[x as usize] + self.log[y as usize]) % n;
        self.exp[l as usize]
    }

    /// Multiplicative inverse of a nonzero element.
    pub fn inv(&self, x: u32) -> u32 {
        assert_ne!(x, 0, "inverse of zero");
        let n = self.q - 1;
        self.exp[((n - self.log[x as usize]) % n) as usize]
    }

    pub fn pow(&self, x: u32, e: u64) -> u32 {
        if x == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let n = (self.q - 1) as u64;
        self.exp[((self.log[x as usize] as u64 * (e % n)) % n) as usize]
    }

    /// Schoolbook product reduced by the modulus; used to build the tables.
    fn mul_slow(&self, x: u32, y: u32) -> u32 {
        let p = self.p as u64;
        let a = self.a as usize;
        let dx = self.digits(x);
        let dy = self.digits(y);
        let mut prod = vec![0u64; 2 * a];
        for i in 0..a {
            for j in 0..a {
                prod[i + j] = (prod[i + j] + dx[i] as u64 * dy[j] as u64) % p;
            }
        }
        for k in (a..2 * a).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            for (i, &m) in self.modulus.iter().enumerate() {
                let idx = k - a + i;
                prod[idx] = (prod[idx] + (p - c) * m as u64) % p;
            }
        }
        let d: Vec<u32> = prod[..a].iter().map(|&c| c as u32).collect();
        self.from_digits(&d)
    }
}

/// `(p, a)` with `q = p^a`, or `None`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = smallest_prime_factor(q);
    let mut r = q;
    let mut a = 0;
    while r % p == 0 {
        r /= p;
        a += 1;
    }
    (r == 1).then_some((p, a))
}

pub fn smallest_prime_factor(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return d;
        }
        d += 2;
    }
    n
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && smallest_prime_factor(n) == n
}

/// Is the monic `f` (low to high) irreducible over `F_p`? Trial division by
/// every monic polynomial of degree at most `deg f / 2`.
pub fn is_irreducible(f: &[u32], p: u32) -> bool {
    let a = f.len() - 1;
    for d in 1..=a / 2 {
        let count = (p as u64).pow(d as u32);
        for enc in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            let mut e = enc;
            for _ in 0..d {
                g.push((e % p as u64) as u32);
                e /= p as u64;
            }
            g.push(1);
            if divides(&g, f, p) {
                return false;
            }
        }
    }
    true
}

fn divides(g: &[u32], f: &[u32], p: u32) -> bool {
    let p = p as u64;
    let mut r: Vec<u64> = f.iter().map(|&c| c as u64).collect();
    while r.len() >= g.len() {
        let c = *r.last().unwrap() % p;
        if c != 0 {
            let sh = r.len() - g.len();
            for (i, &gc) in g.iter().enumerate() {
                r[sh + i] = (r[sh + i] + (p - c) * gc as u64) % p;
            }
        }
        r.pop();
    }
    r.iter().all(|&c| c % p == 0)
}

/// Least monic irreducible of degree `a` over `F_p` in the order used by
/// the shipped table.
pub fn least_irreducible(p: u32, a: u32) -> Vec<u32> {
    let count = (p as u64).pow(a);
    for enc in 0..count {
        let mut f = Vec::with_capacity(a as usize + 1);
        let mut e = enc;
        for _ in 0..a {
            f.push((e % p as u64) as u32);
            e /= p as u64;
        }
        f.push(1);
        if is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_matches_search() {
        for &(p, a, m) in MODULI {
            assert!(is_irreducible(m, p));
            assert_eq!(least_irreducible(p, a), m.to_vec(), "p={p} a={a}");
        }
    }

    #[test]
    fn field_axioms_small() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 16, 25, 27, 32, 49, 64, 81, 121] {
            let f = SmallField::new(q).unwrap();
            let q = q as u32;
            // multiplicative group is cyclic of order q-1
            let g = f.primitive_element();
            let mut seen = std::collections::HashSet::new();
            let mut x = 1;
            for _ in 0..q - 1 {
                seen.insert(x);
                x = f.mul(x, g);
            }
            assert_eq!(seen.len() as u32, q - 1);
            for x in 0..q.min(30) {
                assert_eq!(f.add(x, f.neg(x)), 0);
                if x != 0 {
                    assert_eq!(f.mul(x, f.inv(x)), 1);
                }
                for y in 0..q.min(30) {
                    assert_eq!(f.mul(x, y), f.mul_slow(x, y));
                    for z in [1, q - 1] {
                        // distributivity
                        assert_eq!(f.mul(x, f.add(y, z)), f.add(f.mul(x, y), f.mul(x, z)));
                    }
                }
            }
        }
    }

    #[test]
    fn non_prime_powers() {
        assert!(SmallField::new(6).is_err());
        assert!(SmallField::new(1).is_err());
        assert_eq!(prime_power(81), Some((3, 4)));
        assert_eq!(prime_power(12), None);
    }
}
