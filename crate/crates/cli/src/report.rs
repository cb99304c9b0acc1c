//! Report envelope and the json, csv and text renderings.

use serde::Serialize;
use serde_json::Value;

use crate::cache::Outcome;
use crate::config::Format;

#[derive(Serialize)]
pub struct Report<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub group: Option<Value>,
    pub config_digest: String,
    pub seed: u64,
    pub mode: String,
    pub certified: bool,
    pub status: &'static str,
    pub result: &'a Value,
}

impl<'a> Report<'a> {
    pub fn new(
        command: &'a str,
        group: Option<Value>,
        config_digest: String,
        seed: u64,
        mode: String,
        outcome: &'a Outcome,
    ) -> Self {
        Report {
            tool: "udn",
            version: udn_core::VERSION,
            command,
            group,
            config_digest,
            seed,
            mode,
            certified: outcome.certified,
            status: if outcome.inconclusive { "inconclusive" } else { "ok" },
            result: &outcome.result,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("report serializes") + "\n",
            Format::Csv => to_csv(&table(self.command, self.result)),
            Format::Text => self.text(),
        }
    }

    fn text(&self) -> String {
        let mut out = String::new();
        if let Some(g) = &self.group {
            out += &format!(
                "group {}  degree {}  order {}\n",
                plain(&g["name"]),
                plain(&g["degree"]),
                plain(&g["order"])
            );
        }
        for (k, v) in summary(self.command, self.result) {
            out += &format!("{k}: {v}\n");
        }
        out += &format!(
            "certified: {}  status: {}  seed: {}  mode: {}\n",
            self.certified, self.status, self.seed, self.mode
        );
        let t = table(self.command, self.result);
        if !t.rows.is_empty() {
            out.push('\n');
            out += &aligned(&t);
        }
        out
    }
}

pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

/// A JSON scalar without quotes; arrays joined by commas.
fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        Value::Array(a) => a.iter().map(plain).collect::<Vec<_>>().join(","),
        Value::Object(o) => o
            .iter()
            .map(|(k, v)| format!("{k} {}", plain(v)))
            .collect::<Vec<_>>()
            .join(", "),
        other => other.to_string(),
    }
}

fn rows_of(v: &Value, fields: &[&str]) -> Vec<Vec<String>> {
    v.as_array()
        .map(|a| {
            a.iter()
                .map(|r| fields.iter().map(|f| plain(&r[*f])).collect())
                .collect()
        })
        .unwrap_or_default()
}

fn summary(command: &str, r: &Value) -> Vec<(&'static str, String)> {
    match command {
        "info" => vec![
            ("classes", plain(&r["class_count"])),
            ("transitive", plain(&r["transitive"])),
            ("class mode", plain(&r["class_mode"])),
        ],
        "mu" => vec![
            ("mu", plain(&r["mu"])),
            ("witness class", plain(&r["witness_class"])),
            ("witness shape", format!("[{}]", plain(&r["witness_shape"]))),
            ("witness", plain(&r["witness"])),
            (
                "overgroup orders",
                plain(&Value::Array(
                    r["overgroups"]["subgroups"]
                        .as_array()
                        .map(|a| a.iter().map(|h| h["order"].clone()).collect())
                        .unwrap_or_default(),
                )),
            ),
        ],
        "overgroups" => vec![
            ("element", plain(&r["overgroups"]["element"])),
            ("count", plain(&r["count"])),
            ("orders", plain(&r["orders"])),
        ],
        "qhat" => vec![
            ("element", plain(&r["element"])),
            ("overgroup orders", plain(&r["overgroup_orders"])),
            ("min c (q_hat)", plain(&r["min_c_q_hat"])),
            ("min c (exact)", plain(&r["min_c_exact"])),
        ],
        "gamma" => vec![
            ("gamma_u lower", plain(&r["lower"])),
            ("gamma_u upper", plain(&r["upper"])),
            ("lower from", plain(&r["lower_source"])),
            ("upper from", plain(&r["upper_source"])),
        ],
        "tds-search" => vec![
            ("element", plain(&r["element"])),
            ("size", plain(&r["size"])),
            (
                "conjugators",
                if r["certificate"].is_null() {
                    "none found".into()
                } else {
                    plain(&r["certificate"]["conjugators"])
                },
            ),
        ],
        "tds-verify" => vec![
            ("valid", plain(&r["valid"])),
            ("size", plain(&r["size"])),
            ("verification", plain(&r["verification"])),
            ("reasons", plain(&r["reasons"])),
        ],
        "alt-theory" => {
            let mut v = vec![
                ("n", plain(&r["n"])),
                ("in H", plain(&r["in_h"])),
                (
                    "witnesses (q,d)",
                    r["witnesses"]
                        .as_array()
                        .map(|a| a.iter().map(|w| format!("({},{})", w[0], w[1])).collect::<Vec<_>>().join(" "))
                        .unwrap_or_default(),
                ),
            ];
            if !r["mu_predicted"].is_null() {
                v.push(("predicted mu(A_n)", plain(&r["mu_predicted"])));
                v.push(("shape", format!("[{}]", plain(&r["shape"]))));
                v.push(("shape imprimitive", plain(&r["shape_imprimitive"]["contained"])));
            }
            if !r["ell"].is_null() {
                v.push(("ell", plain(&r["ell"])));
            }
            v
        }
        _ => vec![],
    }
}

pub fn table(command: &str, r: &Value) -> Table {
    match command {
        "info" => Table {
            headers: vec!["class", "order", "size", "shape", "rep"],
            rows: rows_of(&r["classes"], &["index", "order", "size", "shape", "rep"]),
        },
        "mu" => Table {
            headers: vec!["class", "element_order", "fixed_points", "lower_bound", "count", "status"],
            rows: rows_of(
                &r["records"],
                &["class", "element_order", "fixed_points", "lower_bound", "count", "status"],
            ),
        },
        "overgroups" => Table {
            headers: vec!["order", "index", "generators"],
            rows: rows_of(&r["overgroups"]["subgroups"], &["order", "index", "generators"]),
        },
        "base" => Table {
            headers: vec!["action", "degree", "b", "lower", "upper", "witness", "nodes"],
            rows: rows_of(&r["actions"], &["action", "degree", "b", "lower", "upper", "witness", "nodes"]),
        },
        "fpr" => {
            let mut rows = Vec::new();
            if let Some(subs) = r["overgroups"].as_array() {
                for (i, h) in subs.iter().enumerate() {
                    for row in rows_of(&h["rows"], &["class", "order", "fpr"]) {
                        let mut line = vec![i.to_string(), plain(&h["order"]), plain(&h["index"])];
                        line.extend(row);
                        rows.push(line);
                    }
                }
                Table {
                    headers: vec!["overgroup", "overgroup_order", "index", "class", "order", "fpr"],
                    rows,
                }
            } else {
                Table {
                    headers: vec!["class", "order", "shape", "fpr"],
                    rows: rows_of(&r["rows"], &["class", "order", "shape", "fpr"]),
                }
            }
        }
        "qhat" => Table {
            headers: vec!["c", "q_hat", "hybrid", "exact"],
            rows: rows_of(&r["bounds"], &["c", "q_hat", "hybrid", "exact"]),
        },
        "gamma" => Table {
            headers: vec!["class", "element_order", "base_bound", "overgroup_mode", "overgroups", "q_hat_c", "search_c"],
            rows: rows_of(
                &r["classes"],
                &["class", "element_order", "base_bound", "overgroup_mode", "overgroups", "q_hat_c", "search_c"],
            ),
        },
        "tds-search" => Table {
            headers: vec!["conjugator"],
            rows: r["certificate"]["conjugators"]
                .as_array()
                .map(|a| a.iter().map(|g| vec![plain(g)]).collect())
                .unwrap_or_default(),
        },
        "alt-theory" => Table {
            headers: vec!["q", "d", "f", "lower", "upper"],
            rows: rows_of(&r["pgam_brackets"], &["q", "d", "f", "lower", "upper"]),
        },
        _ => Table {
            headers: vec![],
            rows: vec![],
        },
    }
}

fn to_csv(t: &Table) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    if !t.headers.is_empty() {
        w.write_record(&t.headers).expect("in-memory csv");
    }
    for row in &t.rows {
        w.write_record(row).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8")
}

fn aligned(t: &Table) -> String {
    let mut widths: Vec<usize> = t.headers.iter().map(|h| h.len()).collect();
    for row in &t.rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}", w = *w))
            .collect();
        parts.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(t.headers.clone());
    for row in &t.rows {
        out += &line(row.iter().map(|s| s.as_str()).collect());
    }
    out
}
