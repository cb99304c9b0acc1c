//! Arithmetic and cycle-shape predicates for alternating groups: the set of
//! projective point counts, the overgroup bounds for long cycles, the
//! imprimitivity test for shapes with at most three cycles, and the
//! predicted value of `mu(A_n)`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::action::binomial;
use crate::error::{Error, Result};
use crate::field::{is_prime, prime_power};

/// Every `(q, d)` with `q` a prime power, `d >= 2` and `n = (q^d - 1)/(q - 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HWitness {
    pub n: u64,
    pub witnesses: Vec<(u64, u32)>,
}

impl HWitness {
    pub fn contains(&self) -> bool {
        !self.witnesses.is_empty()
    }

    pub fn verify(&self) -> bool {
        self.witnesses
            .iter()
            .all(|&(q, d)| d >= 2 && prime_power(q).is_some() && projective_count(q, d) == Some(self.n))
    }
}

/// `(q^d - 1)/(q - 1)`, or `None` on overflow.
pub fn projective_count(q: u64, d: u32) -> Option<u64> {
    let mut total: u64 = 0;
    let mut term: u64 = 1;
    for _ in 0..d {
        total = total.checked_add(term)?;
        term = term.checked_mul(q)?;
    }
    Some(total)
}

/// The witnesses for `n`, listed by increasing `d`.
pub fn script_h(n: u64) -> HWitness {
    let mut witnesses = Vec::new();
    if n >= 3 {
        // n > q^(d-1) >= 2^(d-1)
        let d_max = 64 - n.leading_zeros();
        for d in 2..=d_max {
            // the count is increasing in q
            let (mut lo, mut hi) = (2u64, n);
            while lo <= hi {
                let q = lo + (hi - lo) / 2;
                match projective_count(q, d) {
                    Some(v) if v == n => {
                        if prime_power(q).is_some() {
                            witnesses.push((q, d));
                        }
                        break;
                    }
                    Some(v) if v < n => lo = q + 1,
                    _ => hi = q - 1,
                }
            }
        }
    }
    HWitness { n, witnesses }
}

pub fn in_script_h(n: u64) -> bool {
    script_h(n).contains()
}

/// `1 + sum over (q, d) of (r - 1)/d`, the bound on the number of maximal
/// overgroups of an `r`-cycle in `A_r` for a prime `r` in the set.
pub fn ell_bound(r: u64) -> Result<u64> {
    if !is_prime(r) {
        return Err(Error::invalid(format!("{r} is not prime")));
    }
    let h = script_h(r);
    if !h.contains() {
        return Err(Error::invalid(format!("{r} is not a projective point count")));
    }
    let ell = 1 + h.witnesses.iter().map(|&(_, d)| (r - 1) / d as u64).sum::<u64>();
    debug_assert!((ell as f64) < r as f64 * (r as f64).log2());
    Ok(ell)
}

/// Cycle shape of an element with few maximal overgroups in `A_n`: three
/// nearly equal cycles for odd `n`, and `[k, n - k]` with
/// `k = m - gcd(m - 1, 2)` for `n = 2m`.
pub fn shape_for(n: usize) -> Result<Vec<usize>> {
    if n < 5 {
        return Err(Error::invalid("need n >= 5"));
    }
    if n % 2 == 0 {
        let m = n / 2;
        let k = m - (m - 1).gcd(&2);
        return Ok(vec![k, n - k]);
    }
    let m = n / 3;
    Ok(match n % 3 {
        0 => vec![m + 2, m, m - 2],
        1 => vec![m + 1, m + 1, m - 1],
        _ => vec![m + 2, m, m],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Clause {
    /// One cycle: contained iff `n` is composite.
    I,
    /// Two cycles: contained iff the lengths share a factor.
    II,
    /// Three cycles.
    III,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Containment {
    pub contained: bool,
    pub clause: Clause,
    pub reason: String,
}

/// Whether an element of `S_n` with this shape lies in an imprimitive
/// subgroup. Fixed points count as cycles of length 1.
pub fn imprimitive_containment(shape: &[usize], n: usize) -> Result<Containment> {
    if shape.iter().sum::<usize>() != n || shape.contains(&0) {
        return Err(Error::invalid(format!("shape {shape:?} is not a partition of {n}")));
    }
    if n < 5 {
        return Err(Error::invalid("need n >= 5"));
    }
    match *shape {
        [_] => {
            let composite = !is_prime(n as u64);
            Ok(Containment {
                contained: composite,
                clause: Clause::I,
                reason: if composite {
                    format!("{n} is composite")
                } else {
                    format!("{n} is prime")
                },
            })
        }
        [a, b] => {
            let g = a.gcd(&b);
            Ok(Containment {
                contained: g > 1,
                clause: Clause::II,
                reason: format!("gcd({a}, {b}) = {g}"),
            })
        }
        [a, b, c] => {
            let g = a.gcd(&b).gcd(&c);
            if g > 1 {
                return Ok(Containment {
                    contained: true,
                    clause: Clause::III,
                    reason: format!("gcd({a}, {b}, {c}) = {g}"),
                });
            }
            let l = [a, b, c];
            for (i, j, k) in [(0, 1, 2), (0, 2, 1), (1, 2, 0)] {
                let gij = l[i].gcd(&l[j]);
                for d in (1..=gij).filter(|d| gij % d == 0) {
                    let blocks = (l[i] + l[j]) / d;
                    if l[k] % blocks == 0 {
                        return Ok(Containment {
                            contained: true,
                            clause: Clause::III,
                            reason: format!("({} + {})/{d} = {blocks} divides {}", l[i], l[j], l[k]),
                        });
                    }
                }
            }
            Ok(Containment {
                contained: false,
                clause: Clause::III,
                reason: "coprime, and no pair sum over a common divisor divides the third length".into(),
            })
        }
        _ => Err(Error::invalid("imprimitivity test covers shapes with at most three cycles")),
    }
}

/// `f(l, m) = sum_j C(l, j) C(4l, 2m - 4j)` for `0 <= j <= min(l, m/2)`.
pub fn binom_f(l: u64, m: u64) -> Result<BigUint> {
    if l < 2 || m > 4 * l {
        return Err(Error::invalid("need l >= 2 and 0 <= m <= 4l"));
    }
    let mut total = BigUint::zero();
    for j in 0..=l.min(m / 2) {
        total += binomial(l, j) * binomial(4 * l, 2 * m - 4 * j);
    }
    Ok(total)
}

/// Does `f(l, m) >= C(4l, m)` hold?
pub fn binom_inequality(l: u64, m: u64) -> Result<bool> {
    Ok(binom_f(l, m)? >= binomial(4 * l, m))
}

pub fn totient(n: u64) -> u64 {
    let mut result = n;
    let mut rest = n;
    let mut p = 2;
    while p * p <= rest {
        if rest % p == 0 {
            while rest % p == 0 {
                rest /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if rest > 1 {
        result -= result / rest;
    }
    result
}

/// Bracket `phi(n)/2df <= N <= phi(n)/d` for the number of `PGammaL_d(q)`
/// subgroups of `A_n` containing a given `n`-cycle, `q = p^f`.
pub fn pgam_bracket(n: u64, q: u64, d: u32, f: u32) -> Result<(BigRational, BigRational)> {
    match prime_power(q) {
        Some((_, e)) if e == f => {}
        _ => return Err(Error::invalid(format!("{q} is not a prime to the power {f}"))),
    }
    if d < 2 || projective_count(q, d) != Some(n) {
        return Err(Error::invalid(format!("{n} != ({q}^{d} - 1)/({q} - 1)")));
    }
    let phi = num_bigint::BigInt::from(totient(n));
    let lower = BigRational::new(phi.clone(), (2 * d as u64 * f as u64).into());
    let upper = BigRational::new(phi, (d as u64).into());
    Ok((lower, upper))
}

/// Factorization by trial division, as (prime, exponent) pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// The predicted `mu(A_n)`.
pub fn mu_alt_predicted(n: u64) -> Result<u32> {
    if n < 5 {
        return Err(Error::invalid("need n >= 5"));
    }
    if n == 5 || (n >= 8 && n % 2 == 0) {
        return Ok(1);
    }
    if [6, 7, 11, 17, 23].contains(&n) {
        return Ok(2);
    }
    let in_h = in_script_h(n);
    let f = factorize(n);
    let prime_or_square = f.len() == 1 && f[0].1 <= 2;
    if prime_or_square && !in_h {
        return Ok(1);
    }
    let odd = n % 2 == 1;
    let rs_or_cube = (f.len() == 2 && f[0].1 == 1 && f[1].1 == 1) || (f.len() == 1 && f[0].1 == 3);
    if odd && rs_or_cube && !in_h {
        return Ok(2);
    }
    Ok(3)
}
