//! Command implementations. Each returns an `Outcome` whose `result` is the
//! JSON payload; rendering happens elsewhere and reads only that payload, so
//! cached and fresh runs print the same report.

use std::fs;
use std::path::Path;

use num_bigint::BigUint;
use serde_json::{json, Value};
use udn_core::action::{fpr_by_class, fpr_ksets, CosetAction, SubsetAction};
use udn_core::alt_theory;
use udn_core::base::{base_size, BaseCertificate, PermGroup, Strategy};
use udn_core::domination::{gamma_u_bracket, gamma_u_upper_random, BracketConfig, TdsCertificate, Verification};
use udn_core::field::prime_power;
use udn_core::overgroups::{maximal_overgroups, mu, ClimbOptions, Mode, OvergroupSet};
use udn_core::prob::{min_c, profile, q_exact_bound, q_hat, q_hybrid, BoundMethod};
use udn_core::{Error, Group, GroupSpec, Permutation};

use crate::cache::{Cache, Outcome};
use crate::config::{sha256_hex, RunConfig};

pub type CmdResult<T> = Result<T, Error>;

/// A loaded group with the identity used for cache keys.
pub struct Loaded {
    pub group: Group,
    pub generator_digest: String,
}

impl Loaded {
    pub fn load(text: &str, config: &RunConfig) -> CmdResult<Self> {
        let spec: GroupSpec = GroupSpec::from_spec(text)?;
        let gens: Vec<String> = spec.generators.iter().map(|g| g.to_string()).collect();
        let generator_digest = sha256_hex(format!("{}|{}", spec.degree, gens.join(";")).as_bytes());
        let group = Group::new(&spec, config.limits(), config.seed)?;
        Ok(Loaded {
            group,
            generator_digest,
        })
    }

    pub fn header(&self) -> Value {
        json!({
            "name": self.group.name(),
            "degree": self.group.degree(),
            "order": self.group.order().to_string(),
            "generator_digest": self.generator_digest,
        })
    }

    fn key(&self, op: &str, params: &Value, config: &RunConfig) -> String {
        let params = json!({ "params": params, "config": config });
        Cache::key(self.group.name(), &self.generator_digest, op, &params)
    }
}

fn climb(config: &RunConfig) -> ClimbOptions {
    ClimbOptions::new(config.mode, config.climb_budget, config.seed)
}

/// `--element` in cycle notation, or `--class` as an index into the class
/// table.
pub fn pick_element(group: &Group, element: Option<&str>, class: Option<usize>) -> CmdResult<Permutation> {
    match (element, class) {
        (Some(text), None) => {
            let x = Permutation::parse(text, group.degree())?;
            group.check_member(&x)?;
            Ok(x)
        }
        (None, Some(c)) => {
            let table = group.classes()?;
            if c >= table.len() {
                return Err(Error::Invalid(format!("class index {c} out of range 0..{}", table.len())));
            }
            Ok(table.class(c).rep.clone())
        }
        _ => Err(Error::Invalid("give exactly one of --element and --class".into())),
    }
}

fn overgroups(loaded: &Loaded, s: &Permutation, config: &RunConfig) -> CmdResult<OvergroupSet> {
    maximal_overgroups(&loaded.group, s, &climb(config))
}

fn ratio_str(x: &num_rational::BigRational) -> String {
    x.to_string()
}

pub fn info(loaded: &Loaded, cache: &Cache, config: &RunConfig) -> CmdResult<Outcome> {
    let key = loaded.key("info", &Value::Null, config);
    cache.get_or(&key, || {
        let g = &loaded.group;
        let table = g.classes()?;
        let classes: Vec<Value> = table
            .classes()
            .iter()
            .enumerate()
            .map(|(i, c)| {
                json!({
                    "index": i,
                    "order": c.order,
                    "size": c.size.to_string(),
                    "shape": c.rep.cycle_type(),
                    "rep": c.rep.to_string(),
                })
            })
            .collect();
        Ok(Outcome {
            result: json!({
                "name": g.name(),
                "degree": g.degree(),
                "order": g.order().to_string(),
                "transitive": g.is_transitive(),
                "family": format!("{:?}", g.family()),
                "provenance": g.provenance(),
                "class_mode": table.mode(),
                "class_count": table.len(),
                "classes": classes,
            }),
            certified: true,
            inconclusive: false,
        })
    })
}

pub fn mu_cmd(loaded: &Loaded, cache: &Cache, config: &RunConfig) -> CmdResult<Outcome> {
    let key = loaded.key("mu", &Value::Null, config);
    cache.get_or(&key, || {
        let g = &loaded.group;
        let r = mu(g, &climb(config))?;
        let certified = r.mode == Mode::Certified && r.overgroups.is_certified();
        Ok(Outcome {
            result: json!({
                "mu": r.value,
                "mode": r.mode,
                "witness_class": r.witness_class,
                "witness": r.witness.to_string(),
                "witness_shape": r.witness.cycle_type(),
                "overgroups": r.overgroups.export(g.order()),
                "records": r.records,
            }),
            certified,
            inconclusive: false,
        })
    })
}

pub fn overgroups_cmd(loaded: &Loaded, cache: &Cache, config: &RunConfig, s: &Permutation) -> CmdResult<Outcome> {
    let key = loaded.key("overgroups", &json!({ "element": s.to_string() }), config);
    cache.get_or(&key, || {
        let set = overgroups(loaded, s, config)?;
        Ok(Outcome {
            result: json!({
                "count": set.len(),
                "orders": set.orders().iter().map(|o| o.to_string()).collect::<Vec<_>>(),
                "joins": set.budget_used,
                "overgroups": set.export(loaded.group.order()),
            }),
            certified: set.is_certified(),
            inconclusive: !set.complete,
        })
    })
}

fn base_record(label: String, cert: &BaseCertificate) -> Value {
    json!({
        "action": label,
        "degree": cert.degree,
        "b": cert.b,
        "lower": cert.lower,
        "upper": cert.upper,
        "witness": cert.witness_one_based(),
        "lower_evidence": cert.lower_evidence,
        "nodes": cert.nodes,
        "strategy": cert.strategy,
    })
}

pub enum BaseTarget<'a> {
    Natural,
    Ksets(usize),
    CosetsOfOvergroups(&'a Permutation),
}

pub fn base_cmd(
    loaded: &Loaded,
    cache: &Cache,
    config: &RunConfig,
    target: BaseTarget<'_>,
    strategy: Strategy,
) -> CmdResult<Outcome> {
    let target_json = match &target {
        BaseTarget::Natural => json!("natural"),
        BaseTarget::Ksets(k) => json!({ "ksets": k }),
        BaseTarget::CosetsOfOvergroups(s) => json!({ "overgroups_of": s.to_string() }),
    };
    let key = loaded.key("base", &json!({ "target": target_json, "strategy": strategy }), config);
    cache.get_or(&key, || {
        let g = &loaded.group;
        let mut records = Vec::new();
        let mut certified = true;
        let run = |records: &mut Vec<Value>, label: String, pg: PermGroup| -> CmdResult<bool> {
            let cert = base_size(&pg, strategy, config.node_budget, config.seed)?;
            records.push(base_record(label, &cert));
            Ok(cert.is_exact())
        };
        match target {
            BaseTarget::Natural => {
                let pg = PermGroup::new(g.degree(), g.generators().to_vec(), g.order().clone());
                certified &= run(&mut records, "natural".into(), pg)?;
            }
            BaseTarget::Ksets(k) => {
                let action = SubsetAction::new(g, k)?;
                let pg = PermGroup::new(action.degree(), action.generator_images().to_vec(), g.order().clone());
                certified &= run(&mut records, format!("{k}-subsets"), pg)?;
            }
            BaseTarget::CosetsOfOvergroups(s) => {
                let set = overgroups(loaded, s, config)?;
                certified &= set.is_certified();
                for h in &set.subgroups {
                    let action = CosetAction::new(g, h)?;
                    let label = format!("cosets of a subgroup of order {}", h.order());
                    match action.faithful_image(config.seed)? {
                        Some(pg) => certified &= run(&mut records, label, pg)?,
                        // a kernel fixes every tuple of points, so no base exists
                        None => records.push(json!({ "action": label, "degree": action.degree(), "b": null, "kernel": true })),
                    }
                }
            }
        }
        let exact = records.iter().all(|r| !r["b"].is_null() || r["kernel"] == json!(true));
        Ok(Outcome {
            result: json!({ "actions": records }),
            certified: certified && strategy == Strategy::Exact,
            inconclusive: strategy == Strategy::Exact && !exact,
        })
    })
}

pub fn fpr_cmd(
    loaded: &Loaded,
    cache: &Cache,
    config: &RunConfig,
    s: Option<&Permutation>,
    kset: Option<usize>,
) -> CmdResult<Outcome> {
    let params = json!({ "element": s.map(|x| x.to_string()), "kset": kset });
    let key = loaded.key("fpr", &params, config);
    cache.get_or(&key, || {
        let g = &loaded.group;
        let table = g.classes()?;
        let nontrivial: Vec<usize> = (0..table.len()).filter(|&c| table.class(c).order > 1).collect();
        if let Some(k) = kset {
            let n = g.degree();
            let rows = nontrivial
                .iter()
                .map(|&c| {
                    let rep = &table.class(c).rep;
                    let shape = rep.cycle_type();
                    Ok(json!({
                        "class": c,
                        "order": table.class(c).order,
                        "shape": shape,
                        "fpr": ratio_str(&fpr_ksets(&shape, n, k)?),
                    }))
                })
                .collect::<CmdResult<Vec<Value>>>()?;
            return Ok(Outcome {
                result: json!({ "action": format!("{k}-subsets"), "rows": rows }),
                certified: true,
                inconclusive: false,
            });
        }
        let s = s.ok_or_else(|| Error::Invalid("fpr needs --element, --class or --kset".into()))?;
        let set = overgroups(loaded, s, config)?;
        let mut subgroups = Vec::new();
        for h in &set.subgroups {
            let index = h.index_in(g.order());
            let action = if index <= BigUint::from(config.degree_cap) {
                Some(CosetAction::new(g, h)?)
            } else {
                None
            };
            let rows = nontrivial
                .iter()
                .map(|&c| {
                    let x = &table.class(c).rep;
                    let f = match &action {
                        Some(a) => a.fpr(x),
                        None => fpr_by_class(g, h, x)?,
                    };
                    Ok(json!({ "class": c, "order": table.class(c).order, "fpr": ratio_str(&f) }))
                })
                .collect::<CmdResult<Vec<Value>>>()?;
            subgroups.push(json!({
                "order": h.order().to_string(),
                "index": index.to_string(),
                "rows": rows,
            }));
        }
        Ok(Outcome {
            result: json!({ "element": s.to_string(), "overgroups": subgroups }),
            certified: set.is_certified(),
            inconclusive: false,
        })
    })
}

pub fn qhat_cmd(
    loaded: &Loaded,
    cache: &Cache,
    config: &RunConfig,
    s: &Permutation,
    c_max: usize,
    exact: bool,
) -> CmdResult<Outcome> {
    let params = json!({ "element": s.to_string(), "c_max": c_max, "exact": exact });
    let key = loaded.key("qhat", &params, config);
    cache.get_or(&key, || {
        let g = &loaded.group;
        let set = overgroups(loaded, s, config)?;
        let prof = profile(g, &set, exact)?;
        let bounds: Vec<Value> = (1..=c_max)
            .map(|c| {
                json!({
                    "c": c,
                    "q_hat": ratio_str(&q_hat(&prof, c)),
                    "hybrid": ratio_str(&q_hybrid(&prof, c)),
                    "exact": q_exact_bound(&prof, c).ok().map(|q| ratio_str(&q)),
                })
            })
            .collect();
        let q_hat_min = min_c(&prof, BoundMethod::QHat, c_max);
        let exact_min = exact.then(|| min_c(&prof, BoundMethod::Exact, c_max));
        let inconclusive = !matches!(q_hat_min, udn_core::MinC::Found(_));
        Ok(Outcome {
            result: json!({
                "element": s.to_string(),
                "overgroup_orders": set.orders().iter().map(|o| o.to_string()).collect::<Vec<_>>(),
                "profile": prof,
                "bounds": bounds,
                "min_c_q_hat": q_hat_min,
                "min_c_exact": exact_min,
            }),
            certified: set.is_certified(),
            inconclusive,
        })
    })
}

pub fn gamma_cmd(loaded: &Loaded, cache: &Cache, config: &RunConfig, c_max: usize) -> CmdResult<Outcome> {
    let key = loaded.key("gamma", &json!({ "c_max": c_max }), config);
    cache.get_or(&key, || {
        let bracket = BracketConfig {
            mode: config.mode,
            climb_budget: config.climb_budget,
            trials: config.trials,
            refute_budget: config.node_budget,
            c_max,
            seed: config.seed,
        };
        let report = gamma_u_bracket(&loaded.group, &bracket)?;
        let settled = report.upper == Some(report.lower);
        Ok(Outcome {
            certified: report.certified && settled,
            inconclusive: !settled,
            result: serde_json::to_value(&report)?,
        })
    })
}

pub fn tds_search(loaded: &Loaded, config: &RunConfig, s: &Permutation, size: usize) -> CmdResult<Outcome> {
    let g = &loaded.group;
    let set = if config.mode == Mode::Certified {
        match overgroups(loaded, s, config) {
            Ok(set) => Some(set),
            Err(Error::CapExceeded { .. }) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let verify = set.as_ref().filter(|s| s.is_certified());
    let cert = gamma_u_upper_random(g, s, size, config.trials, config.seed, verify)?;
    Ok(Outcome {
        inconclusive: cert.is_none(),
        certified: cert.is_some(),
        result: json!({ "element": s.to_string(), "size": size, "certificate": cert }),
    })
}

pub fn tds_verify(loaded: &Loaded, path: &Path, config: &RunConfig) -> CmdResult<Outcome> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let value: Value = serde_json::from_str(&text)?;
    // accept either a bare certificate or a tds-search report
    let body = value
        .get("result")
        .and_then(|r| r.get("certificate"))
        .cloned()
        .unwrap_or(value);
    let cert: TdsCertificate = serde_json::from_value(body)?;
    let g = &loaded.group;
    let mut reasons = Vec::new();
    if cert.group != g.name() {
        reasons.push(format!("certificate is for {}, not {}", cert.group, g.name()));
    }
    let mut overgroup_mode = None;
    let mut certified = true;
    let valid = if reasons.is_empty() {
        let set = match cert.verification {
            Verification::Criterion => {
                let s = cert.element()?;
                let opts = ClimbOptions::new(config.mode, config.climb_budget, config.seed);
                let set = maximal_overgroups(g, &s, &opts)?;
                overgroup_mode = Some(set.mode);
                Some(set)
            }
            Verification::Direct => None,
        };
        match cert.verify(g, set.as_ref()) {
            Ok(v) => {
                certified = v.certified;
                v.is_tds
            }
            Err(e) => {
                reasons.push(e.to_string());
                false
            }
        }
    } else {
        false
    };
    if !valid && reasons.is_empty() {
        reasons.push("not a total dominating set of distinct conjugates".into());
    }
    Ok(Outcome {
        result: json!({
            "valid": valid,
            "size": cert.size(),
            "verification": cert.verification,
            "overgroup_mode": overgroup_mode,
            "reasons": reasons,
        }),
        certified,
        inconclusive: false,
    })
}

pub fn alt_theory_cmd(n: u64) -> CmdResult<Outcome> {
    let h = alt_theory::script_h(n);
    let mut result = json!({
        "n": n,
        "in_h": h.contains(),
        "witnesses": h.witnesses,
    });
    if n >= 5 {
        let shape = alt_theory::shape_for(n as usize)?;
        let containment = alt_theory::imprimitive_containment(&shape, n as usize).ok();
        result["shape"] = json!(shape);
        result["shape_imprimitive"] = json!(containment);
        result["mu_predicted"] = json!(alt_theory::mu_alt_predicted(n)?);
        result["n_cycle_imprimitive"] = json!(alt_theory::imprimitive_containment(&[n as usize], n as usize)?);
    }
    if let Ok(ell) = alt_theory::ell_bound(n) {
        result["ell"] = json!(ell);
    }
    if n >= 7 && n % 2 == 1 {
        let brackets: Vec<Value> = h
            .witnesses
            .iter()
            .filter_map(|&(q, d)| {
                let (_, f) = prime_power(q)?;
                let (lo, hi) = alt_theory::pgam_bracket(n, q, d, f).ok()?;
                Some(json!({ "q": q, "d": d, "f": f, "lower": lo.to_string(), "upper": hi.to_string() }))
            })
            .collect();
        result["pgam_brackets"] = json!(brackets);
    }
    Ok(Outcome {
        result,
        certified: true,
        inconclusive: false,
    })
}
