//! Enumeration of matchings over the catalog.

use std::collections::BTreeSet;

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::catalog::{BlockKind, BuildingBlock, Catalog};
use crate::config::{admissible_angle, rank1_pushout, Admissibility, ConfigError, Configuration, GluingAngle};
use crate::invariants::{full_report, InvariantError, InvariantReport};
use crate::matrix::{rat, IntMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("both blocks must have rank 1")]
    NotRank1,
    #[error("blocks of rank at most 3 are supported")]
    RankTooLarge,
    #[error("search space of {0} cross blocks is too large without the pure-angle filter")]
    TooLarge(u128),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
}

#[derive(Clone, Debug)]
pub struct MatchCandidate {
    pub plus_id: String,
    pub minus_id: String,
    pub theta: String,
    pub cross: IntMatrix,
    pub pushout: IntMatrix,
    pub rank1_decomposition: Option<(i64, i64, i64)>,
    pub report: InvariantReport,
    pub config: Configuration,
}

#[derive(Clone, Debug, Default)]
pub struct SearchOutcome {
    /// Number of block pairs (or cross blocks) examined.
    pub examined: usize,
    pub matches: Vec<MatchCandidate>,
}

fn candidate(cfg: &Configuration, decomposition: Option<(i64, i64, i64)>) -> Result<MatchCandidate, SearchError> {
    Ok(MatchCandidate {
        plus_id: cfg.plus.id.clone(),
        minus_id: cfg.minus.id.clone(),
        theta: cfg.angle.label(),
        cross: cfg.cross(),
        pushout: cfg.raw().gram().clone(),
        rank1_decomposition: decomposition,
        report: full_report(cfg)?,
        config: cfg.clone(),
    })
}

fn sort_matches(v: &mut [MatchCandidate]) {
    v.sort_by(|a, b| {
        (a.report.b3, &a.plus_id, &a.minus_id, a.cross.to_i64_rows()).cmp(&(b.report.b3, &b.plus_id, &b.minus_id, b.cross.to_i64_rows()))
    });
}

fn gen1(b: &BuildingBlock) -> i64 {
    b.n.gram().get(0, 0).to_i64().expect("small lattice")
}

fn rank1_search(plus: &[&BuildingBlock], minus: &[&BuildingBlock], angle: &GluingAngle) -> Result<SearchOutcome, SearchError> {
    let mut out = SearchOutcome::default();
    for p in plus {
        for m in minus {
            out.examined += 1;
            let Some(r) = rank1_pushout(gen1(p), gen1(m), &angle.theta) else { continue };
            let cross = IntMatrix::from_i64(&[&[r.w]]);
            let cfg = Configuration::from_cross(p, m, angle.clone(), &cross)?;
            if !cfg.validate().is_valid() || !cfg.feasibility().feasible {
                continue;
            }
            out.matches.push(candidate(&cfg, r.decomposition)?);
        }
    }
    sort_matches(&mut out.matches);
    Ok(out)
}

fn rank1_involutions(catalog: &Catalog) -> Vec<&BuildingBlock> {
    catalog.blocks().iter().filter(|b| b.rank() == 1 && b.kind == BlockKind::Involution).collect()
}

/// Rank-one involution blocks against rank-one ordinary blocks at angle pi/4.
pub fn rank1_pi4_search(catalog: &Catalog) -> Result<SearchOutcome, SearchError> {
    rank1_search(&rank1_involutions(catalog), &catalog.rank1_ordinary_pool(), &GluingAngle::parse("1/4pi")?)
}

/// Ordered pairs of rank-one involution blocks at angle pi/6.
pub fn rank1_pi6_search(catalog: &Catalog) -> Result<SearchOutcome, SearchError> {
    let inv = rank1_involutions(catalog);
    rank1_search(&inv, &inv, &GluingAngle::parse("1/6pi")?)
}

/// The single rank-one pair at the given angle; at most one match.
pub fn rank1_pair(plus: &BuildingBlock, minus: &BuildingBlock, angle: &GluingAngle) -> Result<SearchOutcome, SearchError> {
    if plus.rank() != 1 || minus.rank() != 1 {
        return Err(SearchError::NotRank1);
    }
    if let Admissibility::Inadmissible(r) = admissible_angle(plus.kind, minus.kind, angle) {
        return Err(ConfigError::Inadmissible(r).into());
    }
    rank1_search(&[plus], &[minus], angle)
}

/// Integer cross blocks with entries in `[-bound, bound]` giving valid, feasible configurations at the angle,
/// one per class under permutations of each basis that fix its Gram matrix and `c2bar`.
pub fn cross_term_search(
    plus: &BuildingBlock,
    minus: &BuildingBlock,
    angle: &GluingAngle,
    bound: u32,
    pure: bool,
) -> Result<SearchOutcome, SearchError> {
    let (p, m) = (plus.rank(), minus.rank());
    if p > 3 || m > 3 {
        return Err(SearchError::RankTooLarge);
    }
    if let Admissibility::Inadmissible(r) = admissible_angle(plus.kind, minus.kind, angle) {
        return Err(ConfigError::Inadmissible(r).into());
    }
    let b = i64::from(bound);
    let width = (2 * b + 1) as u128;
    let total = width.pow((p * m) as u32);
    if !pure && total > 1_000_000 {
        return Err(SearchError::TooLarge(total));
    }
    if pure && p != m {
        // pi+ pi- and pi- pi+ cannot both be scalar
        return Ok(SearchOutcome::default());
    }
    let gp = plus.n.gram().to_i64_rows();
    let gm = minus.n.gram().to_i64_rows();
    let filter = PureFilter::new(&gp, &gm, angle);
    let aut_p = automorphisms(&gp, &plus.c2bar);
    let aut_m = automorphisms(&gm, &minus.c2bar);
    let mut seen = BTreeSet::new();
    let mut out = SearchOutcome::default();
    let mut rows: Vec<Vec<i64>> = Vec::new();
    let row_choices: Vec<Vec<i64>> = cartesian(m, b);
    let mut accept = |rows: &[Vec<i64>], out: &mut SearchOutcome| -> Result<(), SearchError> {
        out.examined += 1;
        let key = canonical(rows, &aut_p, &aut_m);
        if seen.contains(&key) {
            return Ok(());
        }
        let cross = IntMatrix::from_vecs(rows);
        let cfg = Configuration::from_cross(plus, minus, angle.clone(), &cross)?;
        if !cfg.validate().is_valid() || (pure && !cfg.is_pure_angle()) || !cfg.feasibility().feasible {
            return Ok(());
        }
        seen.insert(key);
        out.matches.push(candidate(&cfg, None)?);
        Ok(())
    };
    // depth-first over rows, pruning with the pure-angle identity on the leading rows
    fn walk(
        rows: &mut Vec<Vec<i64>>,
        p: usize,
        choices: &[Vec<i64>],
        filter: Option<&PureFilter>,
        out: &mut SearchOutcome,
        accept: &mut dyn FnMut(&[Vec<i64>], &mut SearchOutcome) -> Result<(), SearchError>,
    ) -> Result<(), SearchError> {
        if rows.len() == p {
            return accept(rows, out);
        }
        for r in choices {
            rows.push(r.clone());
            if filter.is_none_or(|f| f.row_ok(rows)) {
                walk(rows, p, choices, filter, out, accept)?;
            }
            rows.pop();
        }
        Ok(())
    }
    walk(&mut rows, p, &row_choices, if pure { Some(&filter) } else { None }, &mut out, &mut accept)?;
    sort_matches(&mut out.matches);
    Ok(out)
}

fn cartesian(len: usize, b: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out.into_iter().flat_map(|v| (-b..=b).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    out
}

/// Checks `C adj(G-) C^T = cos^2 det(G-) G+` row by row in machine integers.
struct PureFilter {
    adj: Vec<Vec<i128>>,
    gp: Vec<Vec<i128>>,
    num: i128,
    den: i128,
}

impl PureFilter {
    fn new(gp: &[Vec<i64>], gm: &[Vec<i64>], angle: &GluingAngle) -> Self {
        let gm_r = IntMatrix::from_vecs(gm).to_rational();
        let det = gm_r.det();
        let inv = gm_r.inverse().expect("nondegenerate block");
        let adj = inv.scale(&det).to_integer().expect("adjugate is integral");
        let c2 = angle.cos_squared() * det;
        let num = c2.numer().to_i128().unwrap();
        let den = c2.denom().to_i128().unwrap();
        let big = |rows: Vec<Vec<i64>>| rows.into_iter().map(|r| r.into_iter().map(i128::from).collect()).collect();
        PureFilter { adj: big(adj.to_i64_rows()), gp: big(gp.to_vec()), num, den }
    }

    fn row_ok(&self, rows: &[Vec<i64>]) -> bool {
        let i = rows.len() - 1;
        let ri: Vec<i128> = rows[i].iter().map(|&x| i128::from(x)).collect();
        let t: Vec<i128> = (0..self.adj.len()).map(|k| ri.iter().zip(&self.adj).map(|(a, row)| a * row[k]).sum()).collect();
        (0..=i).all(|j| {
            let v: i128 = rows[j].iter().zip(&t).map(|(&a, b)| i128::from(a) * b).sum();
            v * self.den == self.num * self.gp[i][j]
        })
    }
}

/// Coordinate permutations fixing the Gram matrix and `c2bar`; these also fix the positive quadrant.
fn automorphisms(g: &[Vec<i64>], c2: &[i64]) -> Vec<Vec<usize>> {
    let n = g.len();
    permutations(n)
        .into_iter()
        .filter(|s| (0..n).all(|i| c2[s[i]] == c2[i] && (0..n).all(|j| g[s[i]][s[j]] == g[i][j])))
        .collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..n {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

fn canonical(rows: &[Vec<i64>], aut_p: &[Vec<usize>], aut_m: &[Vec<usize>]) -> Vec<i64> {
    let mut best: Option<Vec<i64>> = None;
    for sp in aut_p {
        for sm in aut_m {
            let v: Vec<i64> = sp.iter().flat_map(|&i| sm.iter().map(move |&j| rows[i][j])).collect();
            if best.as_ref().is_none_or(|b| v < *b) {
                best = Some(v);
            }
        }
    }
    best.unwrap_or_default()
}

/// Cross term of a rank-one pushout at `theta`, for callers that want the matrix without a catalog.
pub fn rank1_cross(n_plus: i64, n_minus: i64, theta: &str) -> Option<IntMatrix> {
    let t = crate::config::parse_theta(theta).ok()?;
    let t = if t > rat(1, 2) { rat(1, 1) - t } else { t };
    rank1_pushout(n_plus, n_minus, &t).map(|r| IntMatrix::from_i64(&[&[r.w]]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::FiniteAbelianGroup;

    #[test]
    fn rank1_pi4_counts() {
        let cat = Catalog::shipped();
        let out = rank1_pi4_search(&cat).unwrap();
        assert_eq!(out.examined, 126);
        assert_eq!(out.matches.len(), 25);
        let first = &out.matches[0];
        assert_eq!((first.plus_id.as_str(), first.minus_id.as_str(), first.report.b3), ("3.22_4", "3.8_1_16", 60));
        assert!(rank1_pi4_search(&Catalog::from_blocks(vec![]).unwrap()).unwrap().matches.is_empty());
    }

    #[test]
    fn restricted_pi4() {
        let cat = Catalog::shipped().restrict(&["3.21", "3.8_1_18"]);
        let out = rank1_pi4_search(&cat).unwrap();
        assert_eq!(out.matches.len(), 1);
        let r = &out.matches[0].report;
        assert_eq!((r.b3, r.d_free), (64, Some(24)));
        assert_eq!(r.torsion, Some(FiniteAbelianGroup::from_cyclic(&[2], 0)));
        assert_eq!(out.matches[0].rank1_decomposition, Some((2, 1, 3)));
    }

    #[test]
    fn single_pair() {
        let cat = Catalog::shipped();
        let b = |id: &str| cat.get(id).unwrap();
        let a = GluingAngle::parse("1/4pi").unwrap();
        let out = rank1_pair(b("3.21"), b("3.8_1_18"), &a).unwrap();
        assert_eq!((out.matches.len(), out.matches[0].report.nu_bar), (1, -39));
        assert!(matches!(rank1_pair(b("3.8_1_2"), b("3.8_1_4"), &a), Err(SearchError::Config(ConfigError::Inadmissible(_)))));
        assert_eq!(rank1_pair(b("3.28"), b("3.8_1_4"), &a).unwrap_err(), SearchError::NotRank1);
    }

    #[test]
    fn rank1_pi6_pairs() {
        let out = rank1_pi6_search(&Catalog::shipped()).unwrap();
        assert_eq!(out.matches.len(), 6);
        let find = |p: &str, m: &str| out.matches.iter().find(|c| c.plus_id == p && c.minus_id == m).unwrap();
        assert_eq!((find("3.22_1", "3.22_3").report.b3, find("3.22_1", "3.22_3").report.d_free), (86, Some(6)));
        assert_eq!(find("3.22_3", "3.22_1").report.d_free, Some(4));
        assert_eq!(find("3.22_4", "3.22_3").report.b3, 54);
        assert!(out.matches.iter().all(|c| !(c.plus_id == "3.21" && c.minus_id == "3.22_1")));
    }

    #[test]
    fn cross_search_examples() {
        let cat = Catalog::shipped();
        let b = |id: &str| cat.get(id).unwrap();
        let q = GluingAngle::parse("1/4pi").unwrap();
        let out = cross_term_search(b("3.22_1"), b("3.8_1_4"), &q, 2, true).unwrap();
        assert_eq!(out.matches.len(), 1);
        assert_eq!(out.matches[0].pushout, IntMatrix::from_i64(&[&[2, 2], &[2, 4]]));
        assert!(cross_term_search(b("3.22_1"), b("3.8_1_4"), &q, 0, false).unwrap().matches.is_empty());
        let s = GluingAngle::parse("1/6pi").unwrap();
        let out = cross_term_search(b("3.28"), b("3.28"), &s, 3, true).unwrap();
        let ds: BTreeSet<u64> = out.matches.iter().filter_map(|c| c.report.d_free).collect();
        assert!(ds.contains(&2) && ds.contains(&8), "{ds:?}");
        let ordinary = cross_term_search(b("3.8_1_2"), b("3.8_1_4"), &q, 2, true);
        assert!(matches!(ordinary, Err(SearchError::Config(ConfigError::Inadmissible(_)))));
    }

    #[test]
    fn dedup_is_by_symmetry() {
        let aut = automorphisms(&[vec![0, 2, 2], vec![2, 0, 2], vec![2, 2, 0]], &[12, 12, 12]);
        assert_eq!(aut.len(), 6);
        let aut = automorphisms(&[vec![2, 2], vec![2, 0]], &[26, 24]);
        assert_eq!(aut.len(), 1);
    }
}
