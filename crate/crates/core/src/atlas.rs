//! Constructors for concrete groups and generator-file ingestion.

use std::path::Path;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::chain::StabilizerChain;
use crate::error::{Error, Result};
use crate::field::{prime_power, SmallField};
use crate::perm::{parse_cycles, Permutation};

/// Where a group came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "source", rename_all = "lowercase")]
pub enum Provenance {
    Builtin,
    File(String),
}

/// Structural knowledge the algorithms may exploit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Family {
    Alternating(usize),
    Symmetric(usize),
    Psl2(u64),
    Other,
}

#[derive(Clone, Debug)]
pub struct GroupSpec {
    pub name: String,
    pub degree: usize,
    pub generators: Vec<Permutation>,
    pub expected_order: Option<BigUint>,
    pub provenance: Provenance,
    pub family: Family,
}

impl GroupSpec {
    /// Builds the chain and enforces `expected_order`.
    pub fn chain(&self, seed: u64) -> Result<StabilizerChain> {
        let chain = StabilizerChain::build(self.degree, &self.generators, seed)?;
        if let Some(expected) = &self.expected_order {
            if chain.order() != expected {
                return Err(Error::OrderMismatch {
                    name: self.name.clone(),
                    expected: expected.clone(),
                    computed: chain.order().clone(),
                });
            }
        }
        Ok(chain)
    }

    /// Parses specifications such as `alt 7`, `sym 5`, `psl2 9`,
    /// `file path/to.gens` or a bundled name like `m11`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let words: Vec<&str> = spec.split_whitespace().collect();
        let num = |w: &str| -> Result<u64> {
            w.parse()
                .map_err(|_| Error::Parse {
                    token: w.to_string(),
                    reason: "expected a positive integer".into(),
                })
        };
        match words.as_slice() {
            ["alt" | "A", n] => alternating(num(n)? as usize),
            ["sym" | "S", n] => symmetric(num(n)? as usize),
            ["psl2" | "L2", q] => psl2(num(q)?),
            ["file", path] => load_generators(path),
            [word] if compact(word).is_some() => {
                let (family, k) = compact(word).unwrap();
                match family {
                    'A' => alternating(k as usize),
                    'S' => symmetric(k as usize),
                    _ => psl2(k),
                }
            }
            [name] => bundled(name).ok_or_else(|| Error::Parse {
                token: name.to_string(),
                reason: format!("unknown group; bundled groups are {}", BUNDLED_NAMES.join(", ")),
            }),
            _ => Err(Error::Parse {
                token: spec.to_string(),
                reason: "expected `alt n`, `sym n`, `psl2 q`, `file PATH` or a bundled name".into(),
            }),
        }
    }
}

impl std::str::FromStr for GroupSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        GroupSpec::from_spec(s)
    }
}

/// `A7`, `S5` and `L2(9)` as shorthand.
fn compact(word: &str) -> Option<(char, u64)> {
    if let Some(q) = word.strip_prefix("L2(").and_then(|w| w.strip_suffix(')')) {
        return q.parse().ok().map(|q| ('L', q));
    }
    let mut chars = word.chars();
    let family = chars.next()?;
    let rest = chars.as_str();
    if (family == 'A' || family == 'S') && !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
        return rest.parse().ok().map(|n| (family, n));
    }
    None
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

fn cycle(points: impl IntoIterator<Item = u32>) -> Vec<u32> {
    points.into_iter().collect()
}

/// `A_n` from a 3-cycle and an `n`- or `(n-1)`-cycle.
pub fn alternating(n: usize) -> Result<GroupSpec> {
    if n < 3 {
        return Err(Error::invalid(format!("alternating group needs n >= 3, got {n}")));
    }
    let three = Permutation::from_cycles(n, &[vec![0, 1, 2]])?;
    let long = if n % 2 == 1 {
        Permutation::from_cycles(n, &[cycle(0..n as u32)])?
    } else {
        Permutation::from_cycles(n, &[cycle(1..n as u32)])?
    };
    let mut generators = vec![three];
    if !long.is_identity() && n > 3 {
        generators.push(long);
    }
    Ok(GroupSpec {
        name: format!("A{n}"),
        degree: n,
        generators,
        expected_order: Some(factorial(n) / 2u32),
        provenance: Provenance::Builtin,
        family: Family::Alternating(n),
    })
}

/// `S_n` from a transposition and an `n`-cycle.
pub fn symmetric(n: usize) -> Result<GroupSpec> {
    if n < 3 {
        return Err(Error::invalid(format!("symmetric group needs n >= 3, got {n}")));
    }
    Ok(GroupSpec {
        name: format!("S{n}"),
        degree: n,
        generators: vec![
            Permutation::from_cycles(n, &[vec![0, 1]])?,
            Permutation::from_cycles(n, &[cycle(0..n as u32)])?,
        ],
        expected_order: Some(factorial(n)),
        provenance: Provenance::Builtin,
        family: Family::Symmetric(n),
    })
}

/// `L_2(q)` on the projective line: points `0..q` are field elements and
/// point `q` is infinity.
pub fn psl2(q: u64) -> Result<GroupSpec> {
    if prime_power(q).is_none() {
        return Err(Error::invalid(format!("{q} is not a prime power")));
    }
    if q < 4 {
        return Err(Error::invalid(format!("psl2 needs q >= 4, got {q}")));
    }
    let f = SmallField::new(q)?;
    let qq = q as u32;
    let inf = qq;
    let degree = q as usize + 1;
    let affine = |a: u32, b: u32| -> Permutation {
        // x -> a x + b fixes infinity
        let mut images: Vec<u32> = (0..qq).map(|x| f.add(f.mul(a, x), b)).collect();
        images.push(inf);
        Permutation::from_images(images).expect("affine maps are bijections")
    };
    let mut generators = vec![affine(1, 1)];
    if f.degree() > 1 {
        generators.push(affine(1, f.generator_over_prime_field()));
    }
    let lambda = f.primitive_element();
    let square = f.mul(lambda, lambda);
    if square != 1 {
        generators.push(affine(square, 0));
    }
    // x -> -1/x swaps 0 and infinity
    let mut images: Vec<u32> = (0..qq)
        .map(|x| if x == 0 { inf } else { f.neg(f.inv(x)) })
        .collect();
    images.push(0);
    generators.push(Permutation::from_images(images)?);
    let order = psl2_order(q);
    Ok(GroupSpec {
        name: format!("L2({q})"),
        degree,
        generators,
        expected_order: Some(order),
        provenance: Provenance::Builtin,
        family: Family::Psl2(q),
    })
}

/// Order of `L_2(q)`: `q(q^2-1)/gcd(2, q-1)`.
pub fn psl2_order(q: u64) -> BigUint {
    BigUint::from(q) * BigUint::from(q * q - 1) / BigUint::from((q - 1).gcd(&2))
}

/// Cycles of the given lengths on consecutive points, longest first.
///
/// With `within_alternating`, odd permutations are rejected.
pub fn element_of_shape(n: usize, shape: &[usize], within_alternating: bool) -> Result<Permutation> {
    let total: usize = shape.iter().sum();
    if total != n || shape.contains(&0) {
        return Err(Error::invalid(format!(
            "shape {shape:?} does not partition {n}"
        )));
    }
    let mut parts = shape.to_vec();
    parts.sort_unstable_by(|a, b| b.cmp(a));
    let mut cycles = Vec::new();
    let mut next = 0u32;
    for &l in &parts {
        cycles.push((next..next + l as u32).collect::<Vec<_>>());
        next += l as u32;
    }
    let p = Permutation::from_cycles(n, &cycles)?;
    if within_alternating && !p.is_even() {
        return Err(Error::invalid(format!("shape {shape:?} is an odd permutation")));
    }
    Ok(p)
}

#[derive(Deserialize)]
struct JsonGroupFile {
    name: String,
    degree: usize,
    #[serde(default)]
    order: Option<serde_json::Value>,
    generators: Vec<String>,
}

/// Reads a generator file (text or JSON) and checks its declared order.
pub fn load_generators(path: impl AsRef<Path>) -> Result<GroupSpec> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut spec = parse_generators(&text)?;
    spec.provenance = Provenance::File(path.display().to_string());
    spec.chain(0)?;
    Ok(spec)
}

/// Parses generator-file contents without the order check.
pub fn parse_generators(text: &str) -> Result<GroupSpec> {
    if text.trim_start().starts_with('{') {
        return parse_json(text);
    }
    let mut name = None;
    let mut degree = None;
    let mut order = None;
    let mut generators = Vec::new();
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("name") {
            name = Some(rest.trim().to_string());
        } else if let Some(rest) = line.strip_prefix("degree") {
            degree = Some(rest.trim().parse::<usize>().map_err(|_| Error::Parse {
                token: rest.trim().into(),
                reason: "degree must be a positive integer".into(),
            })?);
        } else if let Some(rest) = line.strip_prefix("order") {
            order = Some(rest.trim().parse::<BigUint>().map_err(|_| Error::Parse {
                token: rest.trim().into(),
                reason: "order must be a positive integer".into(),
            })?);
        } else {
            let n = degree.ok_or_else(|| Error::Parse {
                token: line.chars().take(16).collect(),
                reason: "generator before `degree` line".into(),
            })?;
            generators.push(parse_cycles(line, n)?);
        }
    }
    let degree = degree.ok_or_else(|| Error::Parse {
        token: "<end>".into(),
        reason: "missing `degree` line".into(),
    })?;
    Ok(GroupSpec {
        name: name.unwrap_or_else(|| "unnamed".into()),
        degree,
        generators,
        expected_order: order,
        provenance: Provenance::Builtin,
        family: Family::Other,
    })
}

fn parse_json(text: &str) -> Result<GroupSpec> {
    let file: JsonGroupFile = serde_json::from_str(text)?;
    let order = match file.order {
        None | Some(serde_json::Value::Null) => None,
        Some(serde_json::Value::Number(n)) => Some(n.to_string().parse::<BigUint>().map_err(|_| {
            Error::Parse {
                token: n.to_string(),
                reason: "order must be a positive integer".into(),
            }
        })?),
        Some(serde_json::Value::String(s)) => Some(s.parse::<BigUint>().map_err(|_| Error::Parse {
            token: s.clone(),
            reason: "order must be a positive integer".into(),
        })?),
        Some(other) => {
            return Err(Error::Parse {
                token: other.to_string(),
                reason: "order must be a number or string".into(),
            })
        }
    };
    let generators = file
        .generators
        .iter()
        .map(|g| parse_cycles(g, file.degree))
        .collect::<Result<Vec<_>>>()?;
    Ok(GroupSpec {
        name: file.name,
        degree: file.degree,
        generators,
        expected_order: order,
        provenance: Provenance::Builtin,
        family: Family::Other,
    })
}

pub const BUNDLED_NAMES: &[&str] = &["m11", "m12", "m22", "m23", "j1"];

/// Generator data shipped with the library.
pub fn bundled_text(name: &str) -> Option<&'static str> {
    match name.to_ascii_lowercase().as_str() {
        "m11" => Some(include_str!("../data/m11.gens")),
        "m12" => Some(include_str!("../data/m12.gens")),
        "m22" => Some(include_str!("../data/m22.gens")),
        "m23" => Some(include_str!("../data/m23.gens")),
        "j1" => Some(include_str!("../data/j1.gens")),
        _ => None,
    }
}

/// A bundled group. The order declared in its data file is checked when the
/// chain is built.
pub fn bundled(name: &str) -> Option<GroupSpec> {
    let text = bundled_text(name)?;
    let spec = parse_generators(text).expect("bundled data parses");
    Some(spec)
}
