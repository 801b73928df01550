//! Tabular (CSV, 6 decimals) and structured (JSON) renderings of pipeline results.

use std::io::Read;

use crate::aggregate::{CompositeResult, MembershipComposite};
use crate::cub::{CubModel, ShelterParams};
use crate::error::{Error, Result};
use crate::fuzzy::{FuzzyProfile, IfsTriple};
use crate::pipeline::{Aggregate, ItemFit, Outcome, RunReport, SystemAggregate, SystemProfiles};

pub fn fmt(x: f64) -> String {
    format!("{x:.6}")
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt).unwrap_or_default()
}

fn csv_line(fields: &[String]) -> String {
    let mut line = fields
        .iter()
        .map(|f| {
            if f.contains([',', '"', '\n']) {
                format!("\"{}\"", f.replace('"', "\"\""))
            } else {
                f.clone()
            }
        })
        .collect::<Vec<_>>()
        .join(",");
    line.push('\n');
    line
}

pub const FIT_COLUMNS: &[&str] = &[
    "item",
    "n",
    "model",
    "pi",
    "xi",
    "pi_star",
    "delta",
    "shelter",
    "pi1",
    "pi2",
    "se_pi",
    "se_xi",
    "se_pi_star",
    "se_delta",
    "se_pi1",
    "se_pi2",
    "loglik",
    "bic",
    "lrt_statistic",
    "lrt_p_value",
    "retention_p_value",
    "shelter_retained",
    "converged",
    "boundary",
    "error",
];

/// One row per item describing the selected model (shelter when retained).
pub fn fit_table(fits: &[Outcome<ItemFit>]) -> String {
    let mut out = csv_line(&FIT_COLUMNS.iter().map(|s| s.to_string()).collect::<Vec<_>>());
    for o in fits {
        let mut row = vec![String::new(); FIT_COLUMNS.len()];
        row[0] = o.item.clone();
        match (&o.value, &o.error) {
            (Some(f), _) => {
                let sel = f.selected();
                let se = |name: &str| sel.std_errors.as_ref().and_then(|s| s.get(name));
                row[1] = f.n.to_string();
                match sel.model {
                    CubModel::Baseline(p) => {
                        row[2] = "cub".into();
                        row[3] = fmt(p.pi);
                        row[4] = fmt(p.xi);
                        row[10] = opt(se("pi"));
                        row[11] = opt(se("xi"));
                    }
                    CubModel::Shelter(p) => {
                        row[2] = "cub_shelter".into();
                        row[4] = fmt(p.xi);
                        row[5] = fmt(p.pi_star);
                        row[6] = fmt(p.delta);
                        row[7] = p.shelter.to_string();
                        row[8] = fmt(p.pi1());
                        row[9] = fmt(p.pi2());
                        row[11] = opt(se("xi"));
                        row[12] = opt(se("pi_star"));
                        row[13] = opt(se("delta"));
                        if let Some((s1, s2)) = sel.std_errors.as_ref().and_then(|s| s.mixture_weights(&p)) {
                            row[14] = fmt(s1);
                            row[15] = fmt(s2);
                        }
                    }
                }
                row[16] = fmt(sel.loglik);
                row[17] = fmt(sel.bic);
                if let Some(t) = f.lrt {
                    row[18] = fmt(t.statistic);
                    row[19] = fmt(t.p_value);
                }
                row[20] = opt(f.retention_p_value);
                row[21] = f.shelter_retained.to_string();
                row[22] = sel.converged.to_string();
                row[23] = sel.boundary.to_string();
            }
            (None, e) => row[24] = e.clone().unwrap_or_default(),
        }
        out.push_str(&csv_line(&row));
    }
    out
}

pub const PROFILE_COLUMNS: &[&str] = &["item", "system", "category", "mu", "nu", "u", "score", "accuracy"];

fn profile_rows(item: &str, p: &FuzzyProfile, out: &mut String) {
    for r in 1..=p.m() {
        let t = p.triple(r);
        out.push_str(&csv_line(&[
            item.to_owned(),
            p.system.name().to_owned(),
            r.to_string(),
            fmt(p.mu(r)),
            opt(p.nu(r)),
            opt(p.u(r)),
            opt(t.map(|t| t.score())),
            opt(t.map(|t| t.accuracy())),
        ]));
    }
}

/// Long format: one row per (item, system, category); blank `nu`, `u`, score
/// and accuracy for membership-only systems. Also serves as plot data.
pub fn profile_table(systems: &[SystemProfiles]) -> String {
    let mut out = csv_line(&PROFILE_COLUMNS.iter().map(|s| s.to_string()).collect::<Vec<_>>());
    for s in systems {
        for o in &s.items {
            if let Some(p) = &o.value {
                profile_rows(&o.item, p, &mut out);
            }
        }
    }
    out
}

pub const AGGREGATE_COLUMNS: &[&str] = &[
    "system", "scheme", "item", "weight", "mu", "nu", "u", "score", "accuracy",
];

/// Per-item aggregates and weights, followed by a `composite` row per system.
pub fn aggregate_table(aggs: &[SystemAggregate]) -> String {
    let mut out = csv_line(&AGGREGATE_COLUMNS.iter().map(|s| s.to_string()).collect::<Vec<_>>());
    for a in aggs {
        let head = |item: &str| vec![a.system.name().to_owned(), a.scheme.clone(), item.to_owned()];
        match &a.result {
            Some(Aggregate::Intuitionistic(c)) => {
                for (k, name) in a.item_names.iter().enumerate() {
                    let it = c.items[k];
                    let mut row = head(name);
                    row.extend([it.mu, it.nu, it.u, it.score, it.accuracy].iter().map(|v| fmt(*v)));
                    row.insert(3, fmt(c.weights.as_slice()[k]));
                    out.push_str(&csv_line(&row));
                }
                let o = c.overall;
                let mut row = head("composite");
                row.push(fmt(c.weights.as_slice().iter().sum()));
                row.extend([o.mu, o.nu, o.u, o.score, o.accuracy].iter().map(|v| fmt(*v)));
                out.push_str(&csv_line(&row));
            }
            Some(Aggregate::Membership(c)) => {
                for (k, name) in a.item_names.iter().enumerate() {
                    let mut row = head(name);
                    row.push(fmt(c.weights.as_slice()[k]));
                    row.push(fmt(c.item_mu[k]));
                    row.extend(std::iter::repeat_n(String::new(), 4));
                    out.push_str(&csv_line(&row));
                }
                let mut row = head("composite");
                row.push(fmt(c.weights.as_slice().iter().sum()));
                row.push(fmt(c.mu_bar));
                row.extend(std::iter::repeat_n(String::new(), 4));
                out.push_str(&csv_line(&row));
            }
            None => {}
        }
    }
    out
}

/// Per-respondent IWAM values in the `mu,nu,u` format read by [`read_ifs_csv`].
pub fn respondent_table(c: &CompositeResult) -> String {
    let mut out = String::from("respondent,mu,nu,u\n");
    for (j, a) in c.per_respondent.iter().enumerate() {
        let t = a.triple();
        out.push_str(&csv_line(&[(j + 1).to_string(), fmt(t.mu), fmt(t.nu), fmt(t.u)]));
    }
    out
}

pub fn respondent_membership_table(c: &MembershipComposite) -> String {
    let mut out = String::from("respondent,mu\n");
    for (j, mu) in c.per_respondent.iter().enumerate() {
        out.push_str(&csv_line(&[(j + 1).to_string(), fmt(*mu)]));
    }
    out
}

/// Reads IFS triples from a CSV with `mu`, `nu` and `u` columns (others ignored).
/// A missing `u` column is filled with `1 - mu - nu`.
pub fn read_ifs_csv<R: Read>(reader: R) -> Result<Vec<IfsTriple>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (mu_i, nu_i) = match (col("mu"), col("nu")) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::Config("IFS file needs mu and nu columns".into())),
    };
    let u_i = col("u");
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let num = |j: usize| -> Result<f64> {
            let cell = rec.get(j).unwrap_or("");
            cell.parse().map_err(|_| Error::MalformedCell {
                row: i + 1,
                column: j + 1,
                value: cell.to_owned(),
            })
        };
        let (mu, nu) = (num(mu_i)?, num(nu_i)?);
        let u = match u_i {
            Some(j) => num(j)?,
            None => 1.0 - mu - nu,
        };
        out.push(IfsTriple { mu, nu, u });
    }
    if out.is_empty() {
        return Err(Error::NoDataRows);
    }
    Ok(out)
}

pub fn to_json(report: &RunReport) -> String {
    serde_json::to_string_pretty(report).expect("report is serializable")
}

/// Shelter parameters in both parameterizations, for display.
pub fn describe_shelter(p: &ShelterParams) -> String {
    format!(
        "pi*={} xi={} delta={} c={} (pi1={} pi2={})",
        fmt(p.pi_star),
        fmt(p.xi),
        fmt(p.delta),
        p.shelter,
        fmt(p.pi1()),
        fmt(p.pi2())
    )
}
