//! Building-block catalog: records, validation, closed-form derivations and the consistency report.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{GramLattice, Signature};
use crate::matrix::IntMatrix;

pub const DEFAULT_CATALOG: &str = include_str!("../data/catalog.toml");
pub const CATALOG_SCHEMA: &str = include_str!("../data/catalog.schema.toml");

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("cannot read catalog {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed catalog: {0}")]
    Parse(String),
    #[error("block {id}: field {field}: {reason}")]
    Invalid { id: String, field: String, reason: String },
    #[error("duplicate block id {0}")]
    Duplicate(String),
    #[error("inconsistent Fano data")]
    InconsistentFano,
    #[error("smoothing rank {0} outside 1..=9")]
    RankOutOfRange(i64),
    #[error("invalid non-symplectic type (r, a) = ({0}, {1})")]
    BadType(i64, i64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockKind {
    Ordinary,
    Involution,
}

impl fmt::Display for BlockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BlockKind::Ordinary => "ordinary",
            BlockKind::Involution => "involution",
        })
    }
}

/// Inputs from which some table entries can be recomputed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case", deny_unknown_fields)]
pub enum Derivation {
    Rank1Fano { r: i64, minus_k3: i64, b3_y: i64 },
    Blowup { minus_k3: i64, b3_y: i64 },
    DoubleCover { b3_x: i64, b1_c: i64, rho: i64, c2bar_x: Vec<i64>, k_dual: Vec<i64> },
    Smoothed { r: i64 },
}

/// On-disk shape of a block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockRecord {
    pub id: String,
    pub kind: BlockKind,
    pub rank: usize,
    pub gram: Vec<Vec<i64>>,
    pub c2bar: Vec<i64>,
    pub b3: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b3plus: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minus_chi_c: Option<i64>,
    pub pleasant: bool,
    pub k_trivial: bool,
    pub provenance: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derivation: Option<Derivation>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuildingBlock {
    pub id: String,
    pub kind: BlockKind,
    pub n: GramLattice,
    pub c2bar: Vec<i64>,
    pub b3: i64,
    pub b3plus: Option<i64>,
    pub minus_chi_c: Option<i64>,
    pub pleasant: bool,
    pub k_trivial: bool,
    pub provenance: String,
    pub derivation: Option<Derivation>,
}

impl BuildingBlock {
    pub fn rank(&self) -> usize {
        self.n.rank()
    }

    pub fn is_involution(&self) -> bool {
        self.kind == BlockKind::Involution
    }

    /// `b3plus` for involution blocks, `b3` otherwise.
    pub fn b3plus_or_b3(&self) -> i64 {
        self.b3plus.unwrap_or(self.b3)
    }

    pub fn from_record(r: BlockRecord) -> Result<Self, CatalogError> {
        let bad = |field: &str, reason: String| CatalogError::Invalid { id: r.id.clone(), field: field.into(), reason };
        if r.rank == 0 || r.gram.len() != r.rank || r.gram.iter().any(|row| row.len() != r.rank) {
            return Err(bad("gram", format!("expected a {0}x{0} matrix", r.rank)));
        }
        if r.c2bar.len() != r.rank {
            return Err(bad("c2bar", format!("expected {} entries", r.rank)));
        }
        let n = GramLattice::new(IntMatrix::from_vecs(&r.gram)).map_err(|e| bad("gram", e.to_string()))?;
        let sig = n.signature();
        if sig != (Signature { pos: 1, neg: r.rank - 1, zero: 0 }) {
            return Err(bad("gram", format!("signature {sig} is not (1, {}, 0)", r.rank - 1)));
        }
        if r.c2bar.iter().any(|c| c % 2 != 0) {
            return Err(bad("c2bar", "entries must be even".into()));
        }
        match r.kind {
            BlockKind::Involution => {
                if r.gram.iter().flatten().any(|x| x % 2 != 0) {
                    return Err(bad("gram", "involution blocks need an even-valued form".into()));
                }
                let Some(bp) = r.b3plus else {
                    return Err(bad("b3plus", "required for involution blocks".into()));
                };
                if bp > r.b3 || bp < 0 || bp % 2 != 0 {
                    return Err(bad("b3plus", format!("{bp} must be even and at most b3 = {}", r.b3)));
                }
            }
            BlockKind::Ordinary => {
                if r.b3plus.is_some() {
                    return Err(bad("b3plus", "only involution blocks carry b3plus".into()));
                }
            }
        }
        if r.b3 < 0 {
            return Err(bad("b3", "negative".into()));
        }
        Ok(BuildingBlock {
            id: r.id,
            kind: r.kind,
            n,
            c2bar: r.c2bar,
            b3: r.b3,
            b3plus: r.b3plus,
            minus_chi_c: r.minus_chi_c,
            pleasant: r.pleasant,
            k_trivial: r.k_trivial,
            provenance: r.provenance,
            derivation: r.derivation,
        })
    }

    pub fn to_record(&self) -> BlockRecord {
        BlockRecord {
            id: self.id.clone(),
            kind: self.kind,
            rank: self.rank(),
            gram: self.n.gram().to_i64_rows(),
            c2bar: self.c2bar.clone(),
            b3: self.b3,
            b3plus: self.b3plus,
            minus_chi_c: self.minus_chi_c,
            pleasant: self.pleasant,
            k_trivial: self.k_trivial,
            provenance: self.provenance.clone(),
            derivation: self.derivation.clone(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Document {
    #[serde(default)]
    block: Vec<BlockRecord>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Catalog {
    blocks: Vec<BuildingBlock>,
}

impl Catalog {
    pub fn from_blocks(blocks: Vec<BuildingBlock>) -> Result<Self, CatalogError> {
        let mut seen = std::collections::HashSet::new();
        for b in &blocks {
            if !seen.insert(b.id.clone()) {
                return Err(CatalogError::Duplicate(b.id.clone()));
            }
        }
        Ok(Catalog { blocks })
    }

    pub fn parse(src: &str) -> Result<Self, CatalogError> {
        let value: toml::Value = src.parse().map_err(|e: toml::de::Error| CatalogError::Parse(e.to_string()))?;
        check_schema(&value)?;
        let doc: Document = toml::from_str(src).map_err(|e| CatalogError::Parse(e.to_string()))?;
        let blocks = doc.block.into_iter().map(BuildingBlock::from_record).collect::<Result<Vec<_>, _>>()?;
        Self::from_blocks(blocks)
    }

    pub fn load(path: &Path) -> Result<Self, CatalogError> {
        let src = std::fs::read_to_string(path)
            .map_err(|source| CatalogError::Io { path: path.display().to_string(), source })?;
        Self::parse(&src)
    }

    pub fn shipped() -> Self {
        Self::parse(DEFAULT_CATALOG).expect("shipped catalog is valid")
    }

    pub fn to_toml(&self) -> String {
        let doc = Document { block: self.blocks.iter().map(BuildingBlock::to_record).collect() };
        toml::to_string(&doc).expect("catalog serializes")
    }

    pub fn blocks(&self) -> &[BuildingBlock] {
        &self.blocks
    }

    pub fn get(&self, id: &str) -> Option<&BuildingBlock> {
        self.blocks.iter().find(|b| b.id == id)
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Keeps only the listed ids, in catalog order.
    pub fn restrict(&self, ids: &[&str]) -> Catalog {
        Catalog { blocks: self.blocks.iter().filter(|b| ids.contains(&b.id.as_str())).cloned().collect() }
    }

    /// Rank-one blocks usable as the ordinary side of a matching. An involution block counts only when no
    /// ordinary block already carries the same lattice, `c2bar` and `b3`.
    pub fn rank1_ordinary_pool(&self) -> Vec<&BuildingBlock> {
        let ordinary: Vec<&BuildingBlock> =
            self.blocks.iter().filter(|b| b.rank() == 1 && b.kind == BlockKind::Ordinary).collect();
        let extra = self.blocks.iter().filter(|b| {
            b.rank() == 1
                && b.is_involution()
                && !ordinary.iter().any(|o| o.n == b.n && o.c2bar == b.c2bar && o.b3 == b.b3)
        });
        ordinary.iter().copied().chain(extra).collect()
    }
}

fn check_schema(doc: &toml::Value) -> Result<(), CatalogError> {
    let schema: toml::Value = CATALOG_SCHEMA.parse().expect("schema parses");
    let fields = schema["block"].as_table().unwrap();
    let derivations = schema["derivation"].as_table().unwrap();
    let empty = Vec::new();
    let blocks = match doc.get("block") {
        None => &empty,
        Some(v) => v.as_array().ok_or_else(|| CatalogError::Parse("`block` must be an array of tables".into()))?,
    };
    for (i, b) in blocks.iter().enumerate() {
        let t = b.as_table().ok_or_else(|| CatalogError::Parse(format!("block #{i} is not a table")))?;
        let id = t.get("id").and_then(|v| v.as_str()).map_or_else(|| format!("#{i}"), str::to_string);
        let bad = |field: &str, reason: &str| CatalogError::Invalid { id: id.clone(), field: field.into(), reason: reason.into() };
        for (name, spec) in fields {
            let required = spec["required"].as_bool().unwrap_or(false);
            match t.get(name) {
                None if required => return Err(bad(name, "missing")),
                None => {}
                Some(v) => {
                    if !has_type(v, spec["type"].as_str().unwrap()) {
                        return Err(bad(name, "wrong type"));
                    }
                    if let Some(vals) = spec.get("values").and_then(|x| x.as_array()) {
                        if !vals.contains(v) {
                            return Err(bad(name, "value not allowed"));
                        }
                    }
                }
            }
        }
        if let Some(k) = t.keys().find(|k| !fields.contains_key(*k)) {
            return Err(bad(k, "unknown field"));
        }
        if let Some(d) = t.get("derivation").and_then(|v| v.as_table()) {
            let method = d.get("method").and_then(|m| m.as_str()).ok_or_else(|| bad("derivation", "missing method"))?;
            let spec = derivations.get(method).and_then(|s| s.as_table()).ok_or_else(|| bad("derivation", "unknown method"))?;
            for (name, ty) in spec {
                match d.get(name) {
                    Some(v) if has_type(v, ty.as_str().unwrap()) => {}
                    _ => return Err(bad(&format!("derivation.{name}"), "missing or wrong type")),
                }
            }
            if d.keys().any(|k| k != "method" && !spec.contains_key(k)) {
                return Err(bad("derivation", "unknown field"));
            }
        }
    }
    Ok(())
}

fn has_type(v: &toml::Value, ty: &str) -> bool {
    let ints = |a: &toml::Value| a.as_array().is_some_and(|xs| xs.iter().all(|x| x.is_integer()));
    match ty {
        "string" => v.is_str(),
        "integer" => v.is_integer(),
        "boolean" => v.is_bool(),
        "table" => v.is_table(),
        "integer_array" => ints(v),
        "integer_matrix" => v.as_array().is_some_and(|rows| rows.iter().all(ints)),
        _ => false,
    }
}

/// `(b3(Z), c2bar, generator square)` of the block built from a rank-one Fano of index `r`.
pub fn derive_rank1_fano(r: i64, minus_k3: i64, b3_y: i64) -> Result<(i64, i64, i64), CatalogError> {
    if !(1..=4).contains(&r) || (24 + minus_k3) % r != 0 || minus_k3 % (r * r) != 0 {
        return Err(CatalogError::InconsistentFano);
    }
    Ok((derive_blowup_b3(minus_k3, b3_y), (24 + minus_k3) / r, minus_k3 / (r * r)))
}

/// `b3(Z)` of the blow-up of a (semi-)Fano in a smooth anticanonical curve.
pub fn derive_blowup_b3(minus_k3: i64, b3_y: i64) -> i64 {
    b3_y + minus_k3 + 2
}

/// `(b3(Z), b3plus(Z))` for the double-cover construction.
pub fn derive_double_cover(b3_x: i64, b1_c: i64, rho: i64) -> (i64, i64) {
    (b1_c + 2 * b3_x + 22 - 2 * rho, b1_c + b3_x)
}

pub fn derive_c2bar_cover(c2bar_x: &[i64], k_dual: &[i64]) -> Vec<i64> {
    assert_eq!(c2bar_x.len(), k_dual.len());
    c2bar_x.iter().zip(k_dual).map(|(c, k)| 2 * c - 3 * k).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NonSymplecticType {
    pub r: i64,
    pub a: i64,
    pub delta: u8,
}

impl NonSymplecticType {
    pub fn new(r: i64, a: i64, delta: u8) -> Result<Self, CatalogError> {
        let t = NonSymplecticType { r, a, delta };
        if delta > 1 || r < a || (r - a) % 2 != 0 || r + a > 22 || (22 - r - a) % 2 != 0 {
            return Err(CatalogError::BadType(r, a));
        }
        Ok(t)
    }

    pub fn k(&self) -> i64 {
        (self.r - self.a) / 2
    }

    pub fn g(&self) -> i64 {
        (22 - self.r - self.a) / 2
    }
}

/// `(b2(Z), b3(Z), rk K)` for blocks from a K3 with non-symplectic involution.
pub fn derive_kovalev_lee(t: &NonSymplecticType) -> (i64, i64, i64) {
    let b2 = t.r + 2 * t.k() + 3;
    debug_assert_eq!(b2, 2 * t.r - t.a + 3);
    let b3 = 4 * t.g();
    debug_assert_eq!(b3, 44 - 2 * t.r - 2 * t.a);
    (b2, b3, 2 * t.k() + 2)
}

/// `(b3(Z), b3plus(Z))` for the smoothed-quotient blocks.
pub fn derive_smoothed(r: i64) -> Result<(i64, i64), CatalogError> {
    if !(1..=9).contains(&r) {
        return Err(CatalogError::RankOutOfRange(r));
    }
    Ok((12 * (10 - r), 40 - 4 * r))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FieldCheck {
    pub id: String,
    pub field: String,
    pub stored: String,
    pub derived: String,
}

impl FieldCheck {
    pub fn ok(&self) -> bool {
        self.stored == self.derived
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ConsistencyReport {
    pub checks: Vec<FieldCheck>,
}

impl ConsistencyReport {
    pub fn mismatches(&self) -> Vec<&FieldCheck> {
        self.checks.iter().filter(|c| !c.ok()).collect()
    }

    pub fn is_clean(&self) -> bool {
        self.checks.iter().all(FieldCheck::ok)
    }

    /// Number of blocks that were cross-checked.
    pub fn blocks_checked(&self) -> usize {
        self.checks.iter().map(|c| &c.id).collect::<std::collections::BTreeSet<_>>().len()
    }
}

pub fn verify_catalog(cat: &Catalog) -> ConsistencyReport {
    let mut checks = Vec::new();
    for b in cat.blocks() {
        let Some(d) = &b.derivation else { continue };
        let mut push = |field: &str, stored: String, derived: String| {
            checks.push(FieldCheck { id: b.id.clone(), field: field.into(), stored, derived });
        };
        match d {
            Derivation::Rank1Fano { r, minus_k3, b3_y } => match derive_rank1_fano(*r, *minus_k3, *b3_y) {
                Ok((b3, c2, n)) => {
                    push("b3", b.b3.to_string(), b3.to_string());
                    push("c2bar", format!("{:?}", b.c2bar), format!("{:?}", vec![c2]));
                    push("gram", format!("{:?}", b.n.gram().to_i64_rows()), format!("{:?}", vec![vec![n]]));
                }
                Err(e) => push("derivation", "consistent".into(), e.to_string()),
            },
            Derivation::Blowup { minus_k3, b3_y } => {
                push("b3", b.b3.to_string(), derive_blowup_b3(*minus_k3, *b3_y).to_string());
            }
            Derivation::DoubleCover { b3_x, b1_c, rho, c2bar_x, k_dual } => {
                let (b3, b3p) = derive_double_cover(*b3_x, *b1_c, *rho);
                push("b3", b.b3.to_string(), b3.to_string());
                push("b3plus", format!("{:?}", b.b3plus), format!("{:?}", Some(b3p)));
                push("rank", b.rank().to_string(), rho.to_string());
                if c2bar_x.len() == k_dual.len() {
                    push("c2bar", format!("{:?}", b.c2bar), format!("{:?}", derive_c2bar_cover(c2bar_x, k_dual)));
                } else {
                    push("c2bar", format!("{:?}", b.c2bar), "length mismatch in inputs".into());
                }
                if let Some(m) = b.minus_chi_c {
                    push("minus_chi_c", m.to_string(), (b1_c - 2).to_string());
                }
            }
            Derivation::Smoothed { r } => match derive_smoothed(*r) {
                Ok((b3, b3p)) => {
                    push("b3", b.b3.to_string(), b3.to_string());
                    push("b3plus", format!("{:?}", b.b3plus), format!("{:?}", Some(b3p)));
                }
                Err(e) => push("derivation", "consistent".into(), e.to_string()),
            },
        }
    }
    ConsistencyReport { checks }
}

/// Summary counts per kind and rank.
pub fn census(cat: &Catalog) -> BTreeMap<(String, usize), usize> {
    let mut out = BTreeMap::new();
    for b in cat.blocks() {
        *out.entry((b.kind.to_string(), b.rank())).or_insert(0) += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank1_fano_rows() {
        assert_eq!(derive_rank1_fano(4, 64, 0).unwrap(), (66, 22, 4));
        assert_eq!(derive_rank1_fano(2, 40, 0).unwrap(), (42, 32, 10));
        assert_eq!(derive_rank1_fano(1, 2, 104).unwrap(), (108, 26, 2));
        assert!(matches!(derive_rank1_fano(3, 10, 0), Err(CatalogError::InconsistentFano)));
    }

    #[test]
    fn double_cover_rows() {
        assert_eq!(derive_double_cover(10, 8, 1), (48, 18));
        assert_eq!(derive_double_cover(42, 4, 1), (108, 46));
        assert_eq!(derive_double_cover(0, 18, 1), (38, 18));
    }

    #[test]
    fn c2bar_cover_rows() {
        for d in 2..=5 {
            assert_eq!(derive_c2bar_cover(&[12 + 4 * d, 8 + 4 * d], &[2 * d, 2 * d - 2]), vec![24 + 2 * d, 22 + 2 * d]);
        }
        assert_eq!(derive_c2bar_cover(&[0, 0], &[0, 0]), vec![0, 0]);
        for d in 1..=5 {
            assert_eq!(derive_c2bar_cover(&[12 + 4 * d, 12], &[2 * d, 4]), vec![24 + 2 * d, 12]);
        }
    }

    #[test]
    fn kovalev_lee_rows() {
        let t = |r, a| derive_kovalev_lee(&NonSymplecticType::new(r, a, 0).unwrap());
        assert_eq!(t(2, 2), (5, 36, 2));
        assert_eq!(t(10, 10).1, 4);
        assert_eq!(t(1, 1), (4, 40, 2));
        assert!(NonSymplecticType::new(3, 2, 0).is_err());
    }

    #[test]
    fn smoothed_rows() {
        assert_eq!(derive_smoothed(2).unwrap(), (96, 32));
        assert_eq!(derive_smoothed(1).unwrap(), (108, 36));
        assert_eq!(derive_smoothed(3).unwrap(), (84, 28));
        assert!(derive_smoothed(10).is_err());
    }

    #[test]
    fn shipped_catalog_loads() {
        let c = Catalog::shipped();
        let b = c.get("3.8_1_22").unwrap();
        assert_eq!((b.n.gram().to_i64_rows(), b.c2bar.clone(), b.b3), (vec![vec![22]], vec![46], 24));
        let b = c.get("3.28").unwrap();
        assert_eq!(b.n.gram().to_i64_rows(), vec![vec![2, 2], vec![2, 0]]);
        assert_eq!((b.c2bar.clone(), b.b3, b.b3plus), (vec![26, 24], 104, Some(44)));
    }

    #[test]
    fn odd_c2bar_rejected() {
        let src = DEFAULT_CATALOG.replacen("c2bar = [22]", "c2bar = [23]", 1);
        let err = Catalog::parse(&src).unwrap_err().to_string();
        assert!(err.contains("3.8_4_1") && err.contains("c2bar"), "{err}");
    }

    #[test]
    fn unknown_field_rejected() {
        let src = DEFAULT_CATALOG.replacen("b3 = 66", "b3 = 66\ncolour = \"red\"", 1);
        assert!(Catalog::parse(&src).unwrap_err().to_string().contains("colour"));
    }

    #[test]
    fn empty_catalog() {
        let c = Catalog::parse("").unwrap();
        assert!(c.is_empty());
        assert!(verify_catalog(&c).checks.is_empty());
    }

    #[test]
    fn perturbed_b3_flags_one_mismatch() {
        let src = DEFAULT_CATALOG.replacen("b3 = 66", "b3 = 67", 1);
        let r = verify_catalog(&Catalog::parse(&src).unwrap());
        assert_eq!(r.mismatches().len(), 1);
        assert_eq!(r.mismatches()[0].id, "3.8_4_1");
    }
}
