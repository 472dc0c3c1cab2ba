//! Topological invariants of the glued manifold: Betti numbers, torsion linking form, p divisibility, eta invariants.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::config::{admissible_angle, Admissibility, AngleSpectrum, ConfigError, Configuration, GluingAngle};
use crate::lattice::{
    cokernel_presentation, discriminant_form, even_dual_kernel, quotient_by_2torsion, saturated_sum, DiscriminantForm,
    FiniteAbelianGroup, LatticeError,
};
use crate::matrix::{dot, fmt_rat, int, rat, rat_from_int, Int, IntMatrix, Rat, RationalMatrix};
use crate::snf::{integer_kernel, lattice_basis};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvariantError {
    #[error("configuration is not simply connected ({0}); check admissible_angle")]
    NotSimplyConnected(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("angle is not pure")]
    NotPure,
    #[error("not 2-connected: {0}")]
    Not2Connected(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pi1 {
    Trivial,
    Z2,
    Z3,
}

impl fmt::Display for Pi1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pi1::Trivial => "trivial",
            Pi1::Z2 => "Z2",
            Pi1::Z3 => "Z3",
        })
    }
}

pub fn fundamental_group(cfg: &Configuration) -> Result<Pi1, InvariantError> {
    match admissible_angle(cfg.plus.kind, cfg.minus.kind, &cfg.angle) {
        Admissibility::SimplyConnected => Ok(Pi1::Trivial),
        Admissibility::Pi1Z2 => Ok(Pi1::Z2),
        Admissibility::Pi1Z3 => Ok(Pi1::Z3),
        Admissibility::Inadmissible(r) => Err(ConfigError::Inadmissible(r).into()),
    }
}

fn require_simply_connected(cfg: &Configuration) -> Result<(), InvariantError> {
    match fundamental_group(cfg)? {
        Pi1::Trivial => Ok(()),
        p => Err(InvariantError::NotSimplyConnected(format!("fundamental group {p}"))),
    }
}

/// `(b2, b3)` of the glued manifold.
pub fn betti(cfg: &Configuration) -> Result<(usize, i64), InvariantError> {
    require_simply_connected(cfg)?;
    let b2 = cfg.radical().radical.len();
    let a = &cfg.angle;
    let side = |b: u8, block: &crate::catalog::BuildingBlock| {
        if b == 1 || a.family == crate::config::Family::Hexagonal {
            block.b3plus_or_b3()
        } else {
            block.b3
        }
    };
    let b3 = 23 - cfg.rho_plus() as i64 - cfg.rho_minus() as i64
        + b2 as i64
        + side(a.b_plus, &cfg.plus)
        + side(a.b_minus, &cfg.minus)
        + cfg.d_theta() as i64;
    Ok((b2, b3))
}

/// The boundary map and the class of p in its codomain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryData {
    pub what: IntMatrix,
    pub p_class: Vec<Int>,
    /// Domain basis vectors in N+ ⊕ N- coordinates.
    pub domain_basis: Vec<Vec<Int>>,
    pub domain_labels: Vec<String>,
    pub codomain_labels: Vec<String>,
}

fn require_torsion_setting(cfg: &Configuration) -> Result<bool, InvariantError> {
    let t = &cfg.angle.theta;
    let hex = if *t == rat(1, 4) {
        false
    } else if *t == rat(1, 6) {
        true
    } else {
        return Err(InvariantError::Unsupported(format!("torsion at angle {}", cfg.angle.label())));
    };
    let pleasant = |b: &crate::catalog::BuildingBlock| b.is_involution() && b.pleasant;
    if !pleasant(&cfg.plus) || (hex && !pleasant(&cfg.minus)) {
        return Err(InvariantError::Unsupported("torsion needs pleasant involution blocks".into()));
    }
    Ok(hex)
}

pub fn boundary_data(cfg: &Configuration) -> Result<BoundaryData, InvariantError> {
    let hex = require_torsion_setting(cfg)?;
    let (p, m) = (cfg.rho_plus(), cfg.rho_minus());
    let gp = cfg.plus.n.gram();
    let gm = cfg.minus.n.gram();
    let c = cfg.cross();
    let plus_dom = even_dual_kernel(&cfg.plus.n);
    let minus_dom: Vec<Vec<Int>> = if hex {
        even_dual_kernel(&cfg.minus.n)
    } else {
        (0..m).map(|j| (0..m).map(|i| Int::from(u8::from(i == j))).collect()).collect()
    };
    let halve = |v: Vec<Int>, num: i64| -> Result<Vec<Int>, InvariantError> {
        v.into_iter()
            .map(|x| {
                let y = x * num;
                if y.is_even() {
                    Ok(y / 2)
                } else {
                    Err(InvariantError::Internal("non-integral boundary map entry".into()))
                }
            })
            .collect()
    };
    let mut cols = Vec::new();
    let mut domain_basis = Vec::new();
    for x in &plus_dom {
        let mut col = halve(gp.mul_vec(x), 1)?;
        col.extend(c.transpose().mul_vec(x));
        cols.push(col);
        domain_basis.push(x.iter().cloned().chain(std::iter::repeat_n(Int::zero(), m)).collect());
    }
    for y in &minus_dom {
        let mut col = c.mul_vec(y);
        col.extend(halve(gm.mul_vec(y), if hex { 3 } else { 2 })?);
        cols.push(col);
        domain_basis.push(std::iter::repeat_n(Int::zero(), p).chain(y.iter().cloned()).collect());
    }
    let what = IntMatrix::from_cols(&cols, p + m);
    let half = |v: &[i64], sign: i64| -> Result<Vec<Int>, InvariantError> {
        v.iter().map(|&x| if x % 2 == 0 { Ok(int(sign * x / 2)) } else { Err(InvariantError::Internal("odd c2".into())) }).collect()
    };
    let mut p_class = half(&cfg.plus.c2bar, 1)?;
    if hex {
        p_class.extend(half(&cfg.minus.c2bar, -1)?);
    } else {
        p_class.extend(cfg.minus.c2bar.iter().map(|&x| int(-x)));
    }
    let bar_m = if hex { "N̄-" } else { "N-" };
    let domain_labels = (0..plus_dom.len())
        .map(|i| format!("N̄+[{i}]"))
        .chain((0..minus_dom.len()).map(|i| format!("{bar_m}[{i}]")))
        .collect();
    let codomain_labels = (0..p).map(|i| format!("N+*[{i}]")).chain((0..m).map(|i| format!("N-*[{i}]"))).collect();
    Ok(BoundaryData { what, p_class, domain_basis, domain_labels, codomain_labels })
}

/// Torsion of H^4 and its linking form, both computed from the cokernel of the boundary map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionData {
    pub torsion: FiniteAbelianGroup,
    pub linking: DiscriminantForm,
    pub d_free: u64,
    pub d_full: u64,
    pub free_rank: usize,
}

pub fn torsion_report(cfg: &Configuration) -> Result<TorsionData, InvariantError> {
    let bd = boundary_data(cfg)?;
    let coker = cokernel_presentation(&bd.what);
    let gens = coker.torsion_generators();
    let k = gens.len();
    let mut xs: Vec<(Int, Vec<Int>)> = Vec::new();
    for t in &gens {
        let (mm, z) = coker.preimage(t).ok_or_else(|| InvariantError::Internal("torsion generator of infinite order".into()))?;
        let mut x = vec![Int::zero(); bd.what.rows()];
        for (zk, b) in z.iter().zip(&bd.domain_basis) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += zk * bi;
            }
        }
        xs.push((mm, x));
    }
    let mut pairing = RationalMatrix::zeros(k, k);
    for (i, (mi, xi)) in xs.iter().enumerate() {
        for (j, tj) in gens.iter().enumerate() {
            pairing.set(i, j, Rat::new(dot(tj, xi), mi.clone()));
        }
    }
    let mut linking = DiscriminantForm::new(coker.group.torsion_part(), pairing);
    if cfg.angle.orientation < 0 {
        linking = linking.negated();
    }
    Ok(TorsionData {
        torsion: coker.group.torsion_part(),
        linking,
        d_free: coker.free_divisibility(&bd.p_class, 24),
        d_full: coker.divisibility(&bd.p_class, 24),
        free_rank: coker.group.free_rank,
    })
}

/// Result of the pure-angle shortcut.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PureTorsion {
    pub delta: DiscriminantForm,
    pub torsion: FiniteAbelianGroup,
    pub linking: DiscriminantForm,
    /// Basis of the lattice carrying the free part, in N- coordinates.
    pub free_basis: Vec<Vec<Int>>,
    /// Values of the p class on that basis.
    pub p_free_class: Vec<Int>,
    pub d_free: u64,
    /// Equal to `d_free` when the torsion component of p is forced into `d_free` times the torsion;
    /// `None` when these data do not decide it.
    pub d_full: Option<u64>,
}

pub fn pure_angle_torsion(cfg: &Configuration) -> Result<PureTorsion, InvariantError> {
    let hex = require_torsion_setting(cfg)?;
    if !cfg.is_pure_angle() {
        return Err(InvariantError::NotPure);
    }
    let (pm, qm) = cfg.projections();
    let p = cfg.rho_plus();
    let mut gens: Vec<Vec<Rat>> = (0..p).map(|i| (0..p).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect()).collect();
    gens.extend(pm.scale(&rat(2, 1)).to_cols());
    let (lat, _) = saturated_sum(&cfg.plus.n.gram().to_rational(), &gens)?;
    let delta = discriminant_form(&lat)?;
    let mut linking = quotient_by_2torsion(&delta);
    if cfg.angle.orientation < 0 {
        linking = linking.negated();
    }
    let j_gen = if hex { qm.scale(&rat(2, 3)) } else { qm };
    let free_basis = integral_points(&j_gen);
    let scale_minus = if hex { rat(1, 2) } else { Rat::one() };
    let cp: Vec<Rat> = cfg.plus.c2bar.iter().map(|&x| rat(x, 1)).collect();
    let cm: Vec<Rat> = cfg.minus.c2bar.iter().map(|&x| rat(x, 1) * &scale_minus).collect();
    let mut p_free_class = Vec::new();
    for j in &free_basis {
        let jr: Vec<Rat> = j.iter().map(rat_from_int).collect();
        let v = dot(&cp, &pm.mul_vec(&jr)) + dot(&cm, &jr);
        if !v.is_integer() {
            return Err(InvariantError::Internal("non-integral p class".into()));
        }
        p_free_class.push(v.to_integer());
    }
    let g = p_free_class.iter().fold(Int::zero(), |a, b| a.gcd(b));
    let d_free = g.gcd(&int(24)).to_u64().unwrap();
    let d_full = pure_full_divisor(cfg, hex, &linking.group, d_free);
    Ok(PureTorsion { torsion: linking.group.clone(), delta, linking, free_basis, p_free_class, d_free, d_full })
}

/// p is even, and divisible by the content `c` of (c+/2, c-) (or (c+/2, c-/2)), so it lies in lcm(2, c) H^4.
/// On a factor Z/m that already puts the torsion part in d Z/m once gcd(d, m) divides lcm(2, c).
fn pure_full_divisor(cfg: &Configuration, hex: bool, torsion: &FiniteAbelianGroup, d_free: u64) -> Option<u64> {
    let half = |v: &[i64]| -> Option<Vec<i64>> { v.iter().map(|&x| (x % 2 == 0).then_some(x / 2)).collect() };
    let plus = half(&cfg.plus.c2bar)?;
    let minus = if hex { half(&cfg.minus.c2bar)? } else { cfg.minus.c2bar.clone() };
    let content = plus.iter().chain(&minus).fold(0i64, |a, &b| a.gcd(&b));
    let g = Int::from(content.lcm(&2));
    let d = Int::from(d_free);
    torsion.invariant_factors.iter().all(|m| (&g % d.gcd(m)).is_zero()).then_some(d_free)
}

/// Basis of `{M a : a integral} ∩ Z^n` for a rational `n x k` matrix `M`.
fn integral_points(m: &RationalMatrix) -> Vec<Vec<Int>> {
    let (n, k) = (m.rows(), m.cols());
    let d = m.denominator_lcm();
    let mi = m.scale(&rat_from_int(&d)).to_integer().expect("cleared denominators");
    let neg_d = IntMatrix::identity(n).map(|x| -(x * &d));
    let ker = integer_kernel(&mi.hstack(&neg_d));
    let bs: Vec<Vec<Int>> = ker.iter().map(|v| v[k..].to_vec()).collect();
    lattice_basis(&bs, n)
}

/// `(d_free, d_full, p_torsion_clean)`.
pub fn p_divisor(cfg: &Configuration) -> Result<(u64, u64, bool), InvariantError> {
    let t = torsion_report(cfg)?;
    Ok((t.d_free, t.d_full, t.d_free == t.d_full))
}

/// The eta-invariant refinement from the gluing angle and the configuration angles.
pub fn nu_bar(angles: &AngleSpectrum, angle: &GluingAngle) -> i64 {
    let theta = &angle.theta;
    // rho / pi = 1 - 2 theta
    let rho = Rat::one() - theta * rat(2, 1);
    let main = (rho.clone() * rat(72, 1)).to_integer().to_i64().expect("integral for admissible angles");
    let sign = if rho.is_positive() { 1 } else { 0 };
    // cos(pi - rho) = 2 cos^2(theta) - 1
    let edge = angle.cos_squared() * rat(2, 1) - Rat::one();
    let neg_one = -Rat::one();
    let closed = angles
        .alpha_minus
        .iter()
        .filter(|a| a.is_pi() || (a.sign > 0 && a.cos == edge))
        .count() as i64;
    let open = angles.alpha_minus.iter().filter(|a| a.sign > 0 && a.cos > neg_one && a.cos < edge).count() as i64;
    let v = -main + 3 * sign * (closed - 1 + 2 * open);
    v * i64::from(angle.orientation)
}

/// `nu = nu_bar + 24 mod 48`, as a representative of `(-24, 24]` and a residue in `[0, 48)`.
pub fn nu_from_bar(nu_bar: i64) -> (i64, i64) {
    let r = (nu_bar + 24).rem_euclid(48);
    (if r > 24 { r - 48 } else { r }, r)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantReport {
    pub plus_id: String,
    pub minus_id: String,
    pub theta: String,
    pub pi1: Pi1,
    pub b2: usize,
    pub b3: i64,
    /// `None` when torsion is not computed for this angle or these blocks.
    pub torsion: Option<FiniteAbelianGroup>,
    pub linking: Option<DiscriminantForm>,
    pub d_free: Option<u64>,
    pub d_full: Option<u64>,
    pub p_torsion_clean: Option<bool>,
    pub angles: AngleSpectrum,
    pub d_theta: usize,
    pub pure: bool,
    pub nu_bar: i64,
    pub nu: i64,
    pub nu_residue: i64,
    pub notes: Vec<String>,
}

pub fn full_report(cfg: &Configuration) -> Result<InvariantReport, InvariantError> {
    let pi1 = fundamental_group(cfg)?;
    let (b2, b3) = betti(cfg)?;
    let angles = cfg.configuration_angles()?;
    let nb = nu_bar(&angles, &cfg.angle);
    let (nu, nu_residue) = nu_from_bar(nb);
    if (nb + 24 - 1 - b2 as i64 - b3).rem_euclid(2) != 0 {
        return Err(InvariantError::Internal(format!("parity check failed: nu_bar {nb}, b2 {b2}, b3 {b3}")));
    }
    let pure = cfg.is_pure_angle();
    let mut notes = Vec::new();
    let tors = match torsion_report(cfg) {
        Ok(t) => Some(t),
        Err(InvariantError::Unsupported(r)) => {
            notes.push(format!("torsion unsupported: {r}"));
            None
        }
        Err(e) => return Err(e),
    };
    if let Some(t) = &tors {
        if pure {
            let s = pure_angle_torsion(cfg)?;
            if s.torsion != t.torsion || s.d_free != t.d_free || s.d_full.is_some_and(|d| d != t.d_full) {
                return Err(InvariantError::Internal("pure-angle shortcut disagrees with the boundary map".into()));
            }
            match s.linking.is_isometric(&t.linking) {
                Some(false) => return Err(InvariantError::Internal("pure-angle linking form disagrees".into())),
                None => notes.push("linking cross-check skipped: group too large".into()),
                Some(true) => {}
            }
        }
        if b2 > 0 {
            notes.push("not 2-connected: N+ and N- meet".into());
        }
    }
    Ok(InvariantReport {
        plus_id: cfg.plus.id.clone(),
        minus_id: cfg.minus.id.clone(),
        theta: cfg.angle.label(),
        pi1,
        b2,
        b3,
        torsion: tors.as_ref().map(|t| t.torsion.clone()),
        linking: tors.as_ref().map(|t| t.linking.clone()),
        d_free: tors.as_ref().map(|t| t.d_free),
        d_full: tors.as_ref().map(|t| t.d_full),
        p_torsion_clean: tors.as_ref().map(|t| t.d_free == t.d_full),
        angles,
        d_theta: cfg.d_theta(),
        pure,
        nu_bar: nb,
        nu,
        nu_residue,
        notes,
    })
}

fn rat_str(x: &Rat) -> String {
    fmt_rat(x)
}

impl InvariantReport {
    pub fn torsion_order(&self) -> Option<Int> {
        self.torsion.as_ref().map(|t| t.torsion_order())
    }

    /// JSON document with sorted keys and rationals as "p/q".
    pub fn to_json(&self) -> Value {
        let angles = |v: &[crate::config::Angle]| -> Value {
            v.iter().map(|a| json!({"cos": rat_str(&a.cos), "sign": a.sign, "label": a.to_string()})).collect()
        };
        let linking = self.linking.as_ref().map(|l| {
            l.pairing.to_rows().iter().map(|r| r.iter().map(rat_str).collect::<Vec<_>>()).collect::<Vec<_>>()
        });
        json!({
            "plus": self.plus_id,
            "minus": self.minus_id,
            "theta": self.theta,
            "pi1": self.pi1.to_string(),
            "b2": self.b2,
            "b3": self.b3,
            "torsion": self.torsion.as_ref().map(|t| t.invariant_factors.iter().map(|d| d.to_string()).collect::<Vec<_>>()),
            "linking": linking,
            "d_free": self.d_free,
            "d_full": self.d_full,
            "p_torsion_clean": self.p_torsion_clean,
            "alpha_plus": angles(&self.angles.alpha_plus),
            "alpha_minus": angles(&self.angles.alpha_minus),
            "d_theta": self.d_theta,
            "pure": self.pure,
            "nu_bar": self.nu_bar,
            "nu": self.nu,
            "nu_mod_48": self.nu_residue,
            "notes": self.notes,
        })
    }

    pub fn torsion_label(&self) -> String {
        match &self.torsion {
            None => "?".into(),
            Some(t) if t.is_torsion_free() => "-".into(),
            Some(t) => t.to_string(),
        }
    }

    pub fn linking_label(&self) -> String {
        match &self.linking {
            None => "?".into(),
            Some(l) if l.group.is_torsion_free() => "-".into(),
            Some(l) => l.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Distinct(String),
    HomeoCandidate,
    DiffeoCandidate,
    Inconclusive(String),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Distinct(r) => write!(f, "distinct ({r})"),
            Verdict::HomeoCandidate => write!(f, "homeo_candidate"),
            Verdict::DiffeoCandidate => write!(f, "diffeo_candidate"),
            Verdict::Inconclusive(r) => write!(f, "inconclusive({r})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comparison {
    /// Matching by an orientation-preserving map.
    pub oriented: Verdict,
    /// Matching after reversing the orientation of the second manifold.
    pub reversed: Verdict,
    pub nu_equal: bool,
    /// Whether the G2-structure invariant xi is determined by the others (divisor of p divides 112).
    pub xi_determined: bool,
}

pub fn compare_2connected(r1: &InvariantReport, r2: &InvariantReport) -> Result<Comparison, InvariantError> {
    for r in [r1, r2] {
        if r.b2 != 0 || r.pi1 != Pi1::Trivial {
            return Err(InvariantError::Not2Connected(format!("{} x {}", r.plus_id, r.minus_id)));
        }
    }
    let need = |r: &InvariantReport| -> Result<(FiniteAbelianGroup, DiscriminantForm, u64, u64), InvariantError> {
        match (&r.torsion, &r.linking, r.d_free, r.d_full) {
            (Some(t), Some(l), Some(a), Some(b)) => Ok((t.clone(), l.clone(), a, b)),
            _ => Err(InvariantError::Unsupported("comparison needs torsion data".into())),
        }
    };
    let (t1, l1, f1, g1) = need(r1)?;
    let (t2, l2, f2, g2) = need(r2)?;
    let verdict = |l2: &DiscriminantForm| -> Verdict {
        if r1.b3 != r2.b3 {
            return Verdict::Distinct(format!("b3 {} vs {}", r1.b3, r2.b3));
        }
        if t1 != t2 {
            return Verdict::Distinct(format!("torsion {t1} vs {t2}"));
        }
        if f1 != f2 || g1 != g2 {
            return Verdict::Distinct(format!("divisor of p {f1}/{g1} vs {f2}/{g2}"));
        }
        match l1.is_isometric(l2) {
            Some(false) => return Verdict::Distinct("linking forms differ".into()),
            None => return Verdict::Inconclusive("linking form too large to compare".into()),
            Some(true) => {}
        }
        if t1.has_two_torsion() {
            Verdict::Inconclusive("q".into())
        } else if f1 % 8 == 0 {
            Verdict::HomeoCandidate
        } else {
            Verdict::DiffeoCandidate
        }
    };
    Ok(Comparison {
        oriented: verdict(&l2),
        reversed: verdict(&l2.negated()),
        nu_equal: r1.nu_residue == r2.nu_residue,
        xi_determined: 112 % f1 == 0 && 112 % f2 == 0,
    })
}
