//! Shipped reference configurations and the expected values they are checked against.

use std::fmt;

use num_integer::Integer;
use serde::Deserialize;

use crate::catalog::Catalog;
use crate::config::{parse_rat, ConfigDocument, ConfigError, Configuration, PushoutDocument};
use crate::invariants::{full_report, pure_angle_torsion, InvariantReport};
use crate::lattice::{DiscriminantForm, FiniteAbelianGroup};
use crate::matrix::{Int, RationalMatrix};
use crate::search::rank1_pi4_search;

pub const EXAMPLES: &str = include_str!("../data/examples.toml");
pub const TABLE4: &str = include_str!("../data/table4.toml");

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expect {
    pub b2: Option<usize>,
    pub b3: Option<i64>,
    pub d: Option<u64>,
    pub d_full: Option<u64>,
    pub torsion: Option<Vec<i64>>,
    pub linking: Option<Vec<Vec<String>>>,
    pub nu_bar: Option<i64>,
    pub p_class: Option<Vec<i64>>,
    pub p_free_class: Option<Vec<i64>>,
    pub delta: Option<Vec<i64>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Example {
    pub id: String,
    pub plus: String,
    pub minus: String,
    pub theta: String,
    #[serde(default)]
    pub cross: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    pub base: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    pub glue: Vec<Vec<String>>,
    #[serde(default)]
    pub plus_basis: Vec<Vec<String>>,
    #[serde(default)]
    pub minus_basis: Vec<Vec<String>>,
    pub table: Option<Expect>,
    pub text: Option<Expect>,
}

#[derive(Deserialize)]
struct ExampleFile {
    example: Vec<Example>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table4Row {
    pub plus: String,
    pub minus: String,
    pub b3: i64,
    pub d: u64,
    pub torsion: i64,
    pub linking: Option<String>,
}

#[derive(Deserialize)]
struct Table4File {
    row: Vec<Table4Row>,
}

pub fn examples() -> Vec<Example> {
    toml::from_str::<ExampleFile>(EXAMPLES).expect("shipped examples parse").example
}

pub fn table4() -> Vec<Table4Row> {
    toml::from_str::<Table4File>(TABLE4).expect("shipped table parses").row
}

impl Example {
    /// The configuration document this example describes.
    pub fn document(&self, catalog: &Catalog) -> ConfigDocument {
        let pushout = match (&self.cross, &self.base) {
            (Some(c), _) => {
                let (p, m) = (catalog.get(&self.plus), catalog.get(&self.minus));
                let gram = match (p, m) {
                    (Some(p), Some(m)) => Some(
                        crate::matrix::IntMatrix::symmetric_blocks(p.n.gram(), &crate::matrix::IntMatrix::from_vecs(c), m.n.gram())
                            .to_i64_rows(),
                    ),
                    _ => None,
                };
                PushoutDocument { gram, base: None, glue: vec![], plus_basis: vec![], minus_basis: vec![] }
            }
            (None, b) => PushoutDocument {
                gram: None,
                base: b.clone(),
                glue: self.glue.clone(),
                plus_basis: self.plus_basis.clone(),
                minus_basis: self.minus_basis.clone(),
            },
        };
        ConfigDocument {
            plus: self.plus.clone(),
            minus: self.minus.clone(),
            theta: self.theta.clone(),
            family: None,
            b_plus: None,
            b_minus: None,
            pushout,
        }
    }

    pub fn configuration(&self, catalog: &Catalog) -> Result<Configuration, ConfigError> {
        self.document(catalog).resolve(catalog)
    }
}

/// One disagreement between a computed and an expected value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub row: String,
    pub field: String,
    pub expected: String,
    pub actual: String,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} expected {} got {}", self.row, self.field, self.expected, self.actual)
    }
}

/// Linking form with the given values on generators of the listed cyclic orders.
pub fn linking_from_strings(orders: &[i64], values: &[Vec<String>]) -> Result<DiscriminantForm, ConfigError> {
    let rows: Vec<Vec<crate::matrix::Rat>> =
        values.iter().map(|r| r.iter().map(|s| parse_rat(s)).collect::<Result<_, _>>()).collect::<Result<_, _>>()?;
    let group = FiniteAbelianGroup { invariant_factors: orders.iter().map(|&d| Int::from(d)).collect(), free_rank: 0 };
    Ok(DiscriminantForm::new(group, RationalMatrix::from_rows(rows)))
}

struct Checker<'a> {
    row: &'a str,
    out: Vec<Mismatch>,
}

impl Checker<'_> {
    fn eq<T: PartialEq + fmt::Debug>(&mut self, field: &str, expected: Option<T>, actual: T) {
        if let Some(e) = expected {
            if e != actual {
                self.out.push(Mismatch {
                    row: self.row.to_string(),
                    field: field.into(),
                    expected: format!("{e:?}"),
                    actual: format!("{actual:?}"),
                });
            }
        }
    }

    fn fail(&mut self, field: &str, expected: String, actual: String) {
        self.out.push(Mismatch { row: self.row.to_string(), field: field.into(), expected, actual });
    }
}

/// Compares a report with expected values; linking forms are compared up to automorphism of the group.
pub fn check_report(row: &str, r: &InvariantReport, e: &Expect) -> Vec<Mismatch> {
    let mut c = Checker { row, out: Vec::new() };
    c.eq("b2", e.b2, r.b2);
    c.eq("b3", e.b3, r.b3);
    c.eq("d", e.d.map(Some), r.d_free);
    c.eq("d_full", e.d_full.map(Some), r.d_full);
    c.eq("nu_bar", e.nu_bar, r.nu_bar);
    if let Some(t) = &e.torsion {
        let want = FiniteAbelianGroup::from_cyclic(t, 0);
        c.eq("torsion", Some(Some(want)), r.torsion.clone());
    }
    if let (Some(t), Some(l)) = (&e.torsion, &e.linking) {
        let want = linking_from_strings(t, l).expect("fixture linking parses");
        match &r.linking {
            Some(got) if want.group == got.group => match want.is_isometric(got) {
                Some(true) => {}
                _ => c.fail("linking", want.to_string(), got.to_string()),
            },
            Some(got) => c.fail("linking", want.to_string(), got.to_string()),
            None => c.fail("linking", want.to_string(), "unsupported".into()),
        }
    }
    c.out
}

/// In-text values that need more than the report: boundary class, pure-angle data.
pub fn check_text(ex: &Example, cfg: &Configuration, r: &InvariantReport, e: &Expect) -> Vec<Mismatch> {
    let mut out = check_report(&ex.id, r, e);
    let mut c = Checker { row: &ex.id, out: Vec::new() };
    if let Some(pc) = &e.p_class {
        let got = crate::invariants::boundary_data(cfg).map(|b| b.p_class.iter().map(|x| x.to_string()).collect::<Vec<_>>());
        c.eq("p_class", Some(Ok(pc.iter().map(|x| x.to_string()).collect())), got.map_err(|e| e.to_string()));
    }
    if e.p_free_class.is_some() || e.delta.is_some() {
        match pure_angle_torsion(cfg) {
            Ok(s) => {
                // only p(M) mod 24 is seen by the free part
                let m24 = |v: Vec<Int>| v.into_iter().map(|x| x.mod_floor(&Int::from(24))).collect::<Vec<_>>();
                c.eq(
                    "p_free_class mod 24",
                    e.p_free_class.as_ref().map(|v| m24(v.iter().map(|&x| Int::from(x)).collect())),
                    m24(s.p_free_class),
                );
                c.eq("delta", e.delta.as_ref().map(|d| FiniteAbelianGroup::from_cyclic(d, 0)), s.delta.group);
            }
            Err(err) => c.fail("pure-angle data", "available".into(), err.to_string()),
        }
    }
    out.extend(c.out);
    out
}

#[derive(Clone, Debug, Default)]
pub struct Reproduction {
    pub rows: usize,
    pub reports: Vec<(String, Option<InvariantReport>)>,
    pub mismatches: Vec<Mismatch>,
}

impl Reproduction {
    pub fn matched_rows(&self) -> usize {
        let bad: std::collections::BTreeSet<&str> = self.mismatches.iter().map(|m| m.row.as_str()).collect();
        self.rows - bad.len()
    }
}

pub fn reproduce_table4(catalog: &Catalog) -> Reproduction {
    let mut rep = Reproduction::default();
    let found = match rank1_pi4_search(catalog) {
        Ok(f) => f.matches,
        Err(e) => {
            rep.mismatches.push(Mismatch { row: "search".into(), field: "run".into(), expected: "ok".into(), actual: e.to_string() });
            return rep;
        }
    };
    let rows = table4();
    rep.rows = rows.len();
    for row in &rows {
        let name = format!("{} x {}", row.plus, row.minus);
        let Some(m) = found.iter().find(|m| m.plus_id == row.plus && m.minus_id == row.minus) else {
            rep.mismatches.push(Mismatch { row: name.clone(), field: "match".into(), expected: "present".into(), actual: "absent".into() });
            rep.reports.push((name, None));
            continue;
        };
        let e = Expect {
            b3: Some(row.b3),
            d: Some(row.d),
            torsion: Some(if row.torsion > 1 { vec![row.torsion] } else { vec![] }),
            linking: row.linking.as_ref().map(|l| vec![vec![l.clone()]]),
            ..Expect::default()
        };
        rep.mismatches.extend(check_report(&name, &m.report, &e));
        rep.reports.push((name, Some(m.report.clone())));
    }
    for m in &found {
        if !rows.iter().any(|r| r.plus == m.plus_id && r.minus == m.minus_id) {
            let name = format!("{} x {}", m.plus_id, m.minus_id);
            rep.mismatches.push(Mismatch { row: name, field: "match".into(), expected: "absent".into(), actual: "present".into() });
        }
    }
    rep
}

fn reproduce_with(catalog: &Catalog, pick: impl Fn(&Example) -> Option<&Expect>, text: bool) -> Reproduction {
    let mut rep = Reproduction::default();
    for ex in examples() {
        let Some(e) = pick(&ex) else { continue };
        rep.rows += 1;
        let result = ex.configuration(catalog).map_err(|e| e.to_string()).and_then(|cfg| {
            full_report(&cfg).map(|r| (cfg, r)).map_err(|e| e.to_string())
        });
        match result {
            Ok((cfg, r)) => {
                let mm = if text { check_text(&ex, &cfg, &r, e) } else { check_report(&ex.id, &r, e) };
                rep.mismatches.extend(mm);
                rep.reports.push((ex.id.clone(), Some(r)));
            }
            Err(err) => {
                rep.mismatches.push(Mismatch { row: ex.id.clone(), field: "report".into(), expected: "ok".into(), actual: err });
                rep.reports.push((ex.id.clone(), None));
            }
        }
    }
    rep
}

pub fn reproduce_table5(catalog: &Catalog) -> Reproduction {
    reproduce_with(catalog, |e| e.table.as_ref(), false)
}

pub fn reproduce_examples(catalog: &Catalog) -> Reproduction {
    reproduce_with(catalog, |e| e.text.as_ref(), true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_parse() {
        assert_eq!(table4().len(), 25);
        let ex = examples();
        assert_eq!(ex.iter().filter(|e| e.table.is_some()).count(), 23);
        let cat = Catalog::shipped();
        for e in &ex {
            e.configuration(&cat).unwrap_or_else(|err| panic!("{}: {err}", e.id));
        }
    }
}
