//! Probabilistic upper bounds for total domination by conjugates.
//!
//! For `s` in `G` and a prime-order class representative `x`,
//! `P(x, s)` is the probability that a uniform conjugate of `s` fails to
//! generate with `x`, and `F(x, s) = sum over H in M(G, s) of fpr(x, G/H)`
//! bounds it. A random `c`-tuple of conjugates fails to dominate with
//! probability at most `sum_i |x_i^G| P(x_i, s)^c`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::action::{fpr_by_class, CosetAction};
use crate::classes::enumerate_class;
use crate::domination::{generates, Verifier};
use crate::error::{Error, Result};
use crate::group::Group;
use crate::overgroups::OvergroupSet;
use crate::perm::Permutation;
use crate::rng;

/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.5758293035489;

#[derive(Clone, Debug, Serialize)]
pub struct ClassTerm {
    pub class: usize,
    pub order: u64,
    #[serde(serialize_with = "ser_big")]
    pub size: BigUint,
    #[serde(serialize_with = "ser_ratio")]
    pub f: BigRational,
    #[serde(serialize_with = "ser_opt_ratio")]
    pub p: Option<BigRational>,
}

fn ser_big<S: serde::Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn ser_ratio<S: serde::Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn ser_opt_ratio<S: serde::Serializer>(x: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

/// Per prime-order class data for one `s`.
#[derive(Clone, Debug, Serialize)]
pub struct ProbProfile {
    pub element: Permutation,
    pub certified: bool,
    pub terms: Vec<ClassTerm>,
}

/// Builds the profile. Fixed-point ratios come from the coset action when
/// its degree is within the cap, and from a class sweep of `H` otherwise.
/// `with_exact_p` adds `P(x, s)` by sweeping the class of `s`.
pub fn profile(group: &Group, overgroups: &OvergroupSet, with_exact_p: bool) -> Result<ProbProfile> {
    let table = group.classes()?;
    let s = &overgroups.element;
    let actions: Vec<Option<CosetAction>> = overgroups
        .subgroups
        .iter()
        .map(|h| {
            let index = h.index_in(group.order());
            if index <= BigUint::from(group.limits().degree_cap) {
                CosetAction::new(group, h).map(Some)
            } else {
                Ok(None)
            }
        })
        .collect::<Result<_>>()?;
    let members = if with_exact_p {
        Some(enumerate_class(group, s, group.limits().enum_cap)?.members)
    } else {
        None
    };
    let mut terms = Vec::new();
    for c in table.prime_order_classes() {
        let info = table.class(c);
        let x = &info.rep;
        let mut f = BigRational::zero();
        for (h, action) in overgroups.subgroups.iter().zip(&actions) {
            f += match action {
                Some(a) => a.fpr(x),
                None => fpr_by_class(group, h, x)?,
            };
        }
        let p = members.as_ref().map(|m| p_from_members(group, x, m));
        terms.push(ClassTerm {
            class: c,
            order: info.order,
            size: info.size.clone(),
            f,
            p,
        });
    }
    Ok(ProbProfile {
        element: s.clone(),
        certified: overgroups.is_certified(),
        terms,
    })
}

fn p_from_members(group: &Group, x: &Permutation, members: &[Permutation]) -> BigRational {
    let fails = members.iter().filter(|z| !generates(group, x, z)).count();
    ratio(fails as u64, members.len() as u64)
}

fn ratio(a: u64, b: u64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

/// `P(x, s)`: fraction of the class of `s` not generating `G` with `x`.
pub fn p_exact(group: &Group, x: &Permutation, s: &Permutation) -> Result<BigRational> {
    group.check_member(x)?;
    let cls = enumerate_class(group, s, group.limits().enum_cap)?;
    Ok(p_from_members(group, x, &cls.members))
}

fn pow(x: &BigRational, c: usize) -> BigRational {
    num_traits::pow(x.clone(), c)
}

fn sum_with(profile: &ProbProfile, c: usize, pick: impl Fn(&ClassTerm) -> BigRational) -> BigRational {
    profile
        .terms
        .iter()
        .map(|t| BigRational::from_integer(BigInt::from(t.size.clone())) * pow(&pick(t), c))
        .fold(BigRational::zero(), |a, b| a + b)
}

/// `Q^(G, s, c) = sum_i |x_i^G| F(x_i, s)^c`.
pub fn q_hat(profile: &ProbProfile, c: usize) -> BigRational {
    sum_with(profile, c, |t| t.f.clone())
}

/// `sum_i |x_i^G| P(x_i, s)^c`, an upper bound for the failure probability.
pub fn q_exact_bound(profile: &ProbProfile, c: usize) -> Result<BigRational> {
    if profile.terms.iter().any(|t| t.p.is_none()) {
        return Err(Error::invalid("profile has no exact P values"));
    }
    Ok(sum_with(profile, c, |t| t.p.clone().unwrap()))
}

/// `F` capped at `P` where known, and at 1 otherwise.
pub fn q_hybrid(profile: &ProbProfile, c: usize) -> BigRational {
    let one = BigRational::one();
    sum_with(profile, c, |t| {
        let capped = match &t.p {
            Some(p) if *p < t.f => p.clone(),
            _ => t.f.clone(),
        };
        if capped > one {
            one.clone()
        } else {
            capped
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMethod {
    QHat,
    Exact,
    Hybrid,
}

impl std::str::FromStr for BoundMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qhat" | "q_hat" => Ok(BoundMethod::QHat),
            "exact" => Ok(BoundMethod::Exact),
            "hybrid" => Ok(BoundMethod::Hybrid),
            _ => Err(Error::invalid(format!("unknown bound method {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MinC {
    Found(usize),
    /// Some class term is at least 1, so no `c` works.
    NoConclusion { class: usize },
    /// Every `c` up to the limit leaves the sum at least 1.
    Exceeded { c_max: usize },
}

/// Least `c <= c_max` with the chosen sum below 1.
pub fn min_c(profile: &ProbProfile, method: BoundMethod, c_max: usize) -> MinC {
    let one = BigRational::one();
    let value = |t: &ClassTerm| -> Option<BigRational> {
        match method {
            BoundMethod::QHat => Some(t.f.clone()),
            BoundMethod::Exact => t.p.clone(),
            BoundMethod::Hybrid => Some(match &t.p {
                Some(p) if *p < t.f => p.clone(),
                _ => t.f.clone(),
            }),
        }
    };
    for t in &profile.terms {
        match value(t) {
            Some(v) if v < one => {}
            _ => return MinC::NoConclusion { class: t.class },
        }
    }
    for c in 1..=c_max {
        let q = match method {
            BoundMethod::QHat => q_hat(profile, c),
            BoundMethod::Exact => q_exact_bound(profile, c).expect("checked above"),
            BoundMethod::Hybrid => q_hybrid(profile, c),
        };
        if q < one {
            return MinC::Found(c);
        }
    }
    MinC::Exceeded { c_max }
}

/// `B^(1-c) (sum A_j)^c`. Bounds `sum_i |x_i^G| (sum_j fpr(x_i, G/H_j))^c`
/// when `sum_i |x_i^G cap H_j| <= A_j` and every `|x_i^G| >= B`.
pub fn lemma_bd(a: &[BigRational], b: &BigRational, c: usize) -> Result<BigRational> {
    if c == 0 || b.is_zero() {
        return Err(Error::invalid("need c >= 1 and B > 0"));
    }
    let total = a.iter().fold(BigRational::zero(), |acc, x| acc + x);
    Ok(pow(&total, c) / pow(b, c - 1))
}

#[derive(Clone, Debug, Serialize)]
pub struct MonteCarlo {
    pub c: usize,
    pub trials: u64,
    pub failures: u64,
    pub estimate: f64,
    pub low: f64,
    pub high: f64,
    pub seed: u64,
}

/// Wilson score interval for `k` successes out of `n`.
pub fn wilson(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n_f = n as f64;
    let p = k as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let centre = (p + z2 / (2.0 * n_f)) / denom;
    let half = z * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Monte Carlo estimate of `Q(G, s, c)`, the probability that `c`
/// independent uniform conjugates of `s` do not dominate.
pub fn q_monte_carlo(
    group: &Group,
    s: &Permutation,
    c: usize,
    trials: u64,
    seed: u64,
    overgroups: Option<&OvergroupSet>,
) -> Result<MonteCarlo> {
    if c == 0 || trials == 0 {
        return Err(Error::invalid("need c >= 1 and trials >= 1"));
    }
    let mut verifier = Verifier::new(group, overgroups)?;
    let mut rng = rng::stream(seed, 0x716d63);
    let mut failures = 0u64;
    for _ in 0..trials {
        let gs: Vec<Permutation> = (0..c).map(|_| group.random_element(&mut rng)).collect();
        if !verifier.is_tds(s, &gs) {
            failures += 1;
        }
    }
    let (low, high) = wilson(failures, trials, Z99);
    Ok(MonteCarlo {
        c,
        trials,
        failures,
        estimate: failures as f64 / trials as f64,
        low,
        high,
        seed,
    })
}

/// Floating value of a rational, for reports.
pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
