//! Gluing configurations: angles, pushout lattices, projections, configuration angles, feasibility.

use std::fmt;
use std::str::FromStr;

use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{BlockKind, BuildingBlock, Catalog};
use crate::lattice::{overlattice_from_glue, radical_and_quotient, signature, GramLattice, LatticeError, RadicalQuotient, Signature};
use crate::matrix::{fmt_rat, int, rat, rat_from_int, Int, IntMatrix, Rat, RationalMatrix};
use crate::poly::{rational_eigenstructure, Eigenstructure, Poly};
use crate::snf::saturate;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("theta must be a rational multiple of pi such as 1/4pi, got {0:?}")]
    BadTheta(String),
    #[error("inadmissible angle: {0}")]
    Inadmissible(String),
    #[error("unknown block id {0}")]
    UnknownBlock(String),
    #[error("pushout: {0}")]
    Pushout(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("algebraic angles unsupported")]
    AlgebraicAngles,
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("malformed configuration: {0}")]
    Parse(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Square,
    Hexagonal,
}

/// Gluing angle, canonicalized to `theta` in `(0, 1/2]` (units of pi), with `epsilon` the sign of the cosine of
/// the angle as given and `orientation = -1` for negative input angles.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GluingAngle {
    pub family: Family,
    pub theta: Rat,
    pub epsilon: i8,
    pub orientation: i8,
    pub b_plus: u8,
    pub b_minus: u8,
    /// Angle as supplied, in units of pi.
    pub given: Rat,
}

const ANGLES: [(i64, i64); 7] = [(1, 6), (1, 4), (1, 3), (1, 2), (2, 3), (3, 4), (5, 6)];

impl GluingAngle {
    /// Angle with the default torus data for its value: square (1,0) at pi/4, hexagonal (1,0) at pi/6,
    /// hexagonal (1,1) at pi/3 and square (0,0) at pi/2.
    pub fn new(given: Rat) -> Result<Self, ConfigError> {
        let (t, _, _) = canonical(&given)?;
        let (family, bp, bm) = if t == rat(1, 4) {
            (Family::Square, 1, 0)
        } else if t == rat(1, 6) {
            (Family::Hexagonal, 1, 0)
        } else if t == rat(1, 3) {
            (Family::Hexagonal, 1, 1)
        } else {
            (Family::Square, 0, 0)
        };
        Self::with_torus(given, family, bp, bm)
    }

    pub fn with_torus(given: Rat, family: Family, b_plus: u8, b_minus: u8) -> Result<Self, ConfigError> {
        let (theta, epsilon, orientation) = canonical(&given)?;
        if b_plus > 1 || b_minus > 1 {
            return Err(ConfigError::Inadmissible("b must be 0 or 1".into()));
        }
        // theta = k pi/2 or k pi/3 with 2k odd exactly when b+ + b- is odd
        let k = match family {
            Family::Square => given.abs() * rat(2, 1),
            Family::Hexagonal => given.abs() * rat(3, 1),
        };
        let twice = &k * rat(2, 1);
        if !twice.is_integer() {
            return Err(ConfigError::Inadmissible(format!("{} is not a multiple of the {family:?} step", fmt_pi(&given))));
        }
        if twice.to_integer().is_odd() != ((b_plus + b_minus) % 2 == 1) {
            return Err(ConfigError::Inadmissible(format!(
                "angle {} is incompatible with b+ = {b_plus}, b- = {b_minus} for the {} family",
                fmt_pi(&given),
                family.name()
            )));
        }
        Ok(GluingAngle { family, theta, epsilon, orientation, b_plus, b_minus, given })
    }

    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        Self::new(parse_theta(s)?)
    }

    pub fn cos_squared(&self) -> Rat {
        cos2_of(&self.theta)
    }

    pub fn is_right(&self) -> bool {
        self.theta == rat(1, 2)
    }

    pub fn label(&self) -> String {
        fmt_pi(&self.given)
    }
}

impl Family {
    fn name(&self) -> &'static str {
        match self {
            Family::Square => "square",
            Family::Hexagonal => "hexagonal",
        }
    }
}

fn canonical(given: &Rat) -> Result<(Rat, i8, i8), ConfigError> {
    let a = given.abs();
    if !ANGLES.iter().any(|&(n, d)| a == rat(n, d)) {
        return Err(ConfigError::BadTheta(fmt_pi(given)));
    }
    let orientation = if given.is_negative() { -1 } else { 1 };
    let half = rat(1, 2);
    let (theta, epsilon) = if a > half {
        (Rat::one() - &a, -1)
    } else if a == half {
        (a, 0)
    } else {
        (a, 1)
    };
    Ok((theta, epsilon, orientation))
}

fn cos2_of(theta: &Rat) -> Rat {
    if *theta == rat(1, 6) {
        rat(3, 4)
    } else if *theta == rat(1, 4) {
        rat(1, 2)
    } else if *theta == rat(1, 3) {
        rat(1, 4)
    } else {
        Rat::zero()
    }
}

pub fn parse_theta(s: &str) -> Result<Rat, ConfigError> {
    let t = s.trim();
    let body = t.strip_suffix("pi").or_else(|| t.strip_suffix('π')).ok_or_else(|| ConfigError::BadTheta(s.into()))?;
    let body = body.trim().trim_end_matches('*').trim();
    let body = match body {
        "" => "1",
        "-" => "-1",
        b => b,
    };
    parse_rat(body).map_err(|_| ConfigError::BadTheta(s.into()))
}

pub fn parse_rat(s: &str) -> Result<Rat, ConfigError> {
    Rat::from_str(s.trim()).map_err(|_| ConfigError::Parse(format!("not a rational number: {s:?}")))
}

pub fn fmt_pi(x: &Rat) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let (n, d) = (x.numer(), x.denom());
    let num = if n == &int(1) {
        "π".to_string()
    } else if n == &int(-1) {
        "-π".to_string()
    } else {
        format!("{n}π")
    };
    if d == &Int::one() {
        num
    } else {
        format!("{num}/{d}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Admissibility {
    SimplyConnected,
    Pi1Z2,
    Pi1Z3,
    Inadmissible(String),
}

impl fmt::Display for Admissibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Admissibility::SimplyConnected => write!(f, "simply connected"),
            Admissibility::Pi1Z2 => write!(f, "fundamental group Z/2"),
            Admissibility::Pi1Z3 => write!(f, "fundamental group Z/3"),
            Admissibility::Inadmissible(r) => write!(f, "inadmissible: {r}"),
        }
    }
}

/// Fundamental group of the glued manifold from the block kinds and torus data.
///
/// An involution block may always be used as an ordinary block by forgetting the involution.
pub fn admissible_angle(kind_plus: BlockKind, kind_minus: BlockKind, angle: &GluingAngle) -> Admissibility {
    let needs = |side: &str, kind: BlockKind, b: u8| -> Option<String> {
        let inv = kind == BlockKind::Involution;
        match (b, angle.family) {
            (1, _) if !inv => Some(format!("b{side} = 1 needs an involution block on the {side} side")),
            (0, Family::Hexagonal) if !inv => {
                Some(format!("the hexagonal family needs an involution block on the {side} side"))
            }
            _ => None,
        }
    };
    if let Some(r) = needs("+", kind_plus, angle.b_plus).or_else(|| needs("-", kind_minus, angle.b_minus)) {
        return Admissibility::Inadmissible(r);
    }
    let t = &angle.theta;
    match (angle.family, angle.b_plus, angle.b_minus) {
        (Family::Square, 1, 0) | (Family::Square, 0, 1) if *t == rat(1, 4) => Admissibility::SimplyConnected,
        (Family::Hexagonal, 1, 1) if *t == rat(1, 3) => Admissibility::SimplyConnected,
        (Family::Hexagonal, 1, 0) | (Family::Hexagonal, 0, 1) if *t == rat(1, 6) => Admissibility::SimplyConnected,
        (Family::Square, 0, 0) if *t == rat(1, 2) => Admissibility::SimplyConnected,
        (Family::Square, 1, 1) if *t == rat(1, 2) => Admissibility::Pi1Z2,
        (Family::Hexagonal, 1, 0) | (Family::Hexagonal, 0, 1) if *t == rat(1, 2) => Admissibility::Pi1Z2,
        (Family::Hexagonal, 0, 0) if *t == rat(1, 3) => Admissibility::Pi1Z3,
        _ => Admissibility::Inadmissible(format!(
            "no gluing with angle {} in the {} family with b = ({}, {})",
            angle.label(),
            angle.family.name(),
            angle.b_plus,
            angle.b_minus
        )),
    }
}

/// How the pushout lattice is presented.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pushout {
    /// Gram matrix on the N+ basis followed by the N- basis; may be degenerate.
    Full(IntMatrix),
    /// A base lattice extended by glue vectors, with the N+ and N- bases in base coordinates.
    Glue { base: IntMatrix, glue: Vec<Vec<Rat>>, plus_basis: Vec<Vec<Rat>>, minus_basis: Vec<Vec<Rat>> },
}

#[derive(Clone, Debug)]
pub struct Configuration {
    pub plus: BuildingBlock,
    pub minus: BuildingBlock,
    pub angle: GluingAngle,
    pub pushout: Pushout,
    raw: GramLattice,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A signed configuration angle: `sign` is `+1`/`-1` for angles in `(0, pi)`/`(-pi, 0)` and `0` for `0` and `pi`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Angle {
    pub cos: Rat,
    pub sign: i8,
}

impl Angle {
    pub fn zero() -> Self {
        Angle { cos: Rat::one(), sign: 0 }
    }

    pub fn pi() -> Self {
        Angle { cos: -Rat::one(), sign: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.cos.is_one()
    }

    pub fn is_pi(&self) -> bool {
        self.cos == -Rat::one()
    }

    pub fn negated(&self) -> Self {
        Angle { cos: self.cos.clone(), sign: -self.sign }
    }

    /// Radians, for display only.
    pub fn radians(&self) -> f64 {
        let a = self.cos.to_f64().unwrap_or(0.0).clamp(-1.0, 1.0).acos();
        if self.sign < 0 {
            -a
        } else {
            a
        }
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        if self.is_pi() {
            return write!(f, "π");
        }
        let known = [(rat(1, 2), "π/3"), (rat(0, 1), "π/2"), (rat(-1, 2), "2π/3")];
        let sign = if self.sign < 0 { "-" } else { "" };
        match known.iter().find(|(c, _)| *c == self.cos) {
            Some((_, s)) => write!(f, "{sign}{s}"),
            None => write!(f, "{sign}acos({})", fmt_rat(&self.cos)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AngleSpectrum {
    pub alpha_plus: Vec<Angle>,
    pub alpha_minus: Vec<Angle>,
}

impl AngleSpectrum {
    fn sorted(mut v: Vec<Angle>) -> Vec<Angle> {
        v.sort_by(|a, b| b.cos.cmp(&a.cos).then(b.sign.cmp(&a.sign)));
        v
    }

    pub fn nonzero_minus(&self) -> Vec<&Angle> {
        self.alpha_minus.iter().filter(|a| !a.is_zero()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AngleEigenspaces {
    pub plus: Vec<Vec<Rat>>,
    pub minus: Vec<Vec<Rat>>,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Feasibility {
    pub feasible: bool,
    /// Interior points of the two ample cones (in N+ and N- coordinates) matched by the projection.
    pub witness: Option<(Vec<Rat>, Vec<Rat>)>,
}

impl Configuration {
    pub fn new(plus: BuildingBlock, minus: BuildingBlock, angle: GluingAngle, pushout: Pushout) -> Result<Self, ConfigError> {
        let raw = match &pushout {
            Pushout::Full(g) => g.clone(),
            Pushout::Glue { base, glue, plus_basis, minus_basis } => glue_to_raw(base, glue, plus_basis, minus_basis)?,
        };
        let (p, m) = (plus.rank(), minus.rank());
        if raw.rows() != p + m || !raw.is_square() {
            return Err(ConfigError::Pushout(format!("expected a {0}x{0} Gram matrix", p + m)));
        }
        if raw.submatrix(0..p, 0..p) != *plus.n.gram() {
            return Err(ConfigError::Pushout(format!("leading block does not equal the lattice of {}", plus.id)));
        }
        if raw.submatrix(p..p + m, p..p + m) != *minus.n.gram() {
            return Err(ConfigError::Pushout(format!("trailing block does not equal the lattice of {}", minus.id)));
        }
        let raw = GramLattice::new(raw)?;
        Ok(Configuration { plus, minus, angle, pushout, raw })
    }

    /// Configuration with the given cross block (rows: N+ basis, columns: N- basis).
    pub fn from_cross(plus: &BuildingBlock, minus: &BuildingBlock, angle: GluingAngle, cross: &IntMatrix) -> Result<Self, ConfigError> {
        let w = IntMatrix::symmetric_blocks(plus.n.gram(), cross, minus.n.gram());
        Self::new(plus.clone(), minus.clone(), angle, Pushout::Full(w))
    }

    pub fn raw(&self) -> &GramLattice {
        &self.raw
    }

    pub fn rho_plus(&self) -> usize {
        self.plus.rank()
    }

    pub fn rho_minus(&self) -> usize {
        self.minus.rank()
    }

    pub fn cross(&self) -> IntMatrix {
        let p = self.rho_plus();
        self.raw.gram().submatrix(0..p, p..p + self.rho_minus())
    }

    /// `(P, Q)`: `P` sends N- coordinates to the N+ coordinates of their projection, `Q` the reverse.
    pub fn projections(&self) -> (RationalMatrix, RationalMatrix) {
        let gpi = self.plus.n.gram().to_rational().inverse().expect("nondegenerate block");
        let gmi = self.minus.n.gram().to_rational().inverse().expect("nondegenerate block");
        let c = self.cross().to_rational();
        (gpi.mul(&c), gmi.mul(&c.transpose()))
    }

    /// `pi_+ pi_-` on N+ and `pi_- pi_+` on N-.
    pub fn compositions(&self) -> (RationalMatrix, RationalMatrix) {
        let (p, q) = self.projections();
        (p.mul(&q), q.mul(&p))
    }

    pub fn radical(&self) -> RadicalQuotient {
        radical_and_quotient(&self.raw)
    }

    pub fn eigenstructures(&self) -> (Eigenstructure, Eigenstructure) {
        let (pq, qp) = self.compositions();
        (rational_eigenstructure(&pq), rational_eigenstructure(&qp))
    }

    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport::default();
        let rq = self.radical();
        let rk = rq.reduced.rank();
        let sig = rq.reduced.signature();
        if rk < 2 || sig != (Signature { pos: 2, neg: rk - 2, zero: 0 }) {
            rep.violations.push(format!("signature must be (2, rk-2); W has rank {rk} and signature {sig}"));
        }
        let (pq, _) = self.compositions();
        if !eigenvalues_in_unit_interval(&pq) {
            rep.violations.push("eigenvalues of pi+ pi- must lie in [0, 1]".into());
        }
        if !self.angle.is_right() {
            let c2 = self.angle.cos_squared();
            if nullity(&pq, &c2) == 0 {
                rep.violations.push(format!(
                    "cos^2 of the gluing angle ({}) is not an eigenvalue of pi+ pi-",
                    fmt_rat(&c2)
                ));
            }
        }
        if sig.pos > 3 || sig.neg > 19 {
            rep.violations.push(format!("W of signature {sig} does not fit in the K3 lattice"));
        } else if 2 * rk > 22 {
            rep.warnings.push("embedding existence not guaranteed: 2 rk W > 22".into());
        }
        rep
    }

    pub fn angle_eigenspaces(&self, cos2: &Rat) -> AngleEigenspaces {
        let (pq, qp) = self.compositions();
        let plus = shifted(&pq, cos2).nullspace();
        let minus = shifted(&qp, cos2).nullspace();
        AngleEigenspaces { multiplicity: plus.len(), plus, minus }
    }

    pub fn is_pure_angle(&self) -> bool {
        let c2 = self.angle.cos_squared();
        let (pq, qp) = self.compositions();
        pq == RationalMatrix::identity(pq.rows()).scale(&c2) && qp == RationalMatrix::identity(qp.rows()).scale(&c2)
    }

    /// Multiplicity term of the Betti formula.
    pub fn d_theta(&self) -> usize {
        if self.angle.is_right() {
            let (p, q) = self.projections();
            q.nullspace().len() + p.nullspace().len()
        } else {
            self.angle_eigenspaces(&self.angle.cos_squared()).multiplicity
        }
    }

    pub fn configuration_angles(&self) -> Result<AngleSpectrum, ConfigError> {
        let rq = self.radical();
        let r = rq.reduced.rank();
        let gw = rq.reduced.gram().to_rational();
        let e = rq.projection.to_rational();
        let (p, m) = (self.rho_plus(), self.rho_minus());
        let ep = e.submatrix(0..r, 0..p);
        let em = e.submatrix(0..r, p..p + m);
        let proj = |eb: &RationalMatrix, g: &GramLattice| -> RationalMatrix {
            let gi = g.gram().to_rational().inverse().expect("nondegenerate block");
            eb.mul(&gi).mul(&eb.transpose()).mul(&gw)
        };
        let id = RationalMatrix::identity(r);
        let two = rat(2, 1);
        let ap = proj(&ep, &self.plus.n).scale(&two).sub(&id);
        let am = proj(&em, &self.minus.n).scale(&two).sub(&id);
        let mm = ap.mul(&am);
        let (ep_s, em_s) = self.eigenstructures();
        if !ep_s.splits() || !em_s.splits() {
            return Err(ConfigError::AlgebraicAngles);
        }
        let mut lambdas: Vec<Rat> = ep_s.rational.iter().chain(&em_s.rational).map(|(l, _)| l.clone()).collect();
        lambdas.sort();
        lambdas.dedup();
        let (mut plus, mut minus) = (Vec::new(), Vec::new());
        let mut covered = 0;
        for l in lambdas {
            if l.is_negative() || l > Rat::one() {
                return Err(ConfigError::Internal(format!("eigenvalue {} outside [0, 1]", fmt_rat(&l))));
            }
            let c = &l * &two - Rat::one();
            let kernel = if c.is_one() {
                mm.sub(&id).nullspace()
            } else if c == -Rat::one() {
                mm.add(&id).nullspace()
            } else {
                mm.mul(&mm).sub(&mm.scale(&(&c * &two))).add(&id).nullspace()
            };
            if kernel.is_empty() {
                continue;
            }
            covered += kernel.len();
            let k = RationalMatrix::from_cols(&kernel, r);
            let s = signature(&k.transpose().mul(&gw).mul(&k));
            if s.zero != 0 {
                return Err(ConfigError::Internal("degenerate invariant subspace".into()));
            }
            if c.is_one() || c == -Rat::one() {
                let a = if c.is_one() { Angle::zero() } else { Angle::pi() };
                plus.extend(std::iter::repeat_n(a.clone(), s.pos));
                minus.extend(std::iter::repeat_n(a, s.neg));
            } else {
                if !s.pos.is_multiple_of(2) || !s.neg.is_multiple_of(2) {
                    return Err(ConfigError::Internal("indefinite invariant 2-plane".into()));
                }
                let a = Angle { cos: c.clone(), sign: 1 };
                for _ in 0..s.pos / 2 {
                    plus.push(a.clone());
                    plus.push(a.negated());
                }
                for _ in 0..s.neg / 2 {
                    minus.push(a.clone());
                    minus.push(a.negated());
                }
            }
        }
        if covered != r {
            return Err(ConfigError::AlgebraicAngles);
        }
        if plus.len() > 3 || minus.len() > 19 {
            return Err(ConfigError::Internal("too many configuration angles".into()));
        }
        plus.resize(3, Angle::zero());
        minus.resize(19, Angle::zero());
        Ok(AngleSpectrum { alpha_plus: AngleSpectrum::sorted(plus), alpha_minus: AngleSpectrum::sorted(minus) })
    }

    /// Whether some point of the N+ ample cone at the gluing angle projects into the N- ample cone.
    pub fn feasibility(&self) -> Feasibility {
        let (_, q) = self.projections();
        if self.angle.is_right() {
            // each side separately: the part orthogonal to the other lattice must meet the ample cone
            let (p, q) = self.projections();
            let a = cone_point(&q.nullspace(), self.rho_plus(), None);
            let b = cone_point(&p.nullspace(), self.rho_minus(), None);
            return match (a, b) {
                (Some(x), Some(y)) => Feasibility { feasible: true, witness: Some((x, y)) },
                _ => Feasibility { feasible: false, witness: None },
            };
        }
        let basis = self.angle_eigenspaces(&self.angle.cos_squared()).plus;
        let eps = Rat::from_integer(Int::from(self.angle.epsilon));
        let image = q.scale(&eps);
        match cone_point(&basis, self.rho_plus(), Some(&image)) {
            Some(x) => {
                let y = image.mul_vec(&x);
                Feasibility { feasible: true, witness: Some((x, y)) }
            }
            None => Feasibility { feasible: false, witness: None },
        }
    }

    /// `Lambda_+` and `Lambda_-`: saturations in W of each lattice plus the part of the other away from the angle.
    pub fn lambda_lattices(&self) -> Result<(GramLattice, GramLattice), ConfigError> {
        let rq = self.radical();
        let r = rq.reduced.rank();
        let (p, m) = (self.rho_plus(), self.rho_minus());
        let e = &rq.projection;
        let c2 = self.angle.cos_squared();
        let eig = self.angle_eigenspaces(&c2);
        let build = |own: std::ops::Range<usize>, other: std::ops::Range<usize>, other_g: &GramLattice, at_angle: &[Vec<Rat>]| {
            let mut gens: Vec<Vec<Int>> = own.map(|j| e.col(j)).collect();
            let og = other_g.gram().to_rational();
            // orthogonal complement of the angle eigenspace inside the other lattice
            let complement = if at_angle.is_empty() {
                (0..other_g.rank()).map(|i| unit_rat(other_g.rank(), i)).collect()
            } else {
                let a = RationalMatrix::from_cols(at_angle, other_g.rank());
                a.transpose().mul(&og).nullspace()
            };
            let eo = e.submatrix(0..r, other).to_rational();
            for v in complement {
                let w = eo.mul_vec(&v);
                let l = w.iter().fold(Int::one(), |acc, x| acc.lcm(x.denom()));
                gens.push(w.iter().map(|x| (x * rat_from_int(&l)).to_integer()).collect());
            }
            let basis = saturate(&gens, r);
            let b = IntMatrix::from_cols(&basis, r);
            GramLattice::new(b.transpose().mul(rq.reduced.gram()).mul(&b))
        };
        let lp = build(0..p, p..p + m, &self.minus.n, &eig.minus)?;
        let lm = build(p..p + m, 0..p, &self.plus.n, &eig.plus)?;
        Ok((lp, lm))
    }
}

fn unit_rat(n: usize, i: usize) -> Vec<Rat> {
    (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect()
}

fn shifted(m: &RationalMatrix, c: &Rat) -> RationalMatrix {
    m.sub(&RationalMatrix::identity(m.rows()).scale(c))
}

fn nullity(m: &RationalMatrix, c: &Rat) -> usize {
    shifted(m, c).nullspace().len()
}

fn eigenvalues_in_unit_interval(m: &RationalMatrix) -> bool {
    let e = rational_eigenstructure(m);
    if e.rational.iter().any(|(l, _)| l.is_negative() || *l > Rat::one()) {
        return false;
    }
    match e.irrational_factor {
        None => true,
        Some(c) => {
            let f = Poly::new(c);
            let sqf = f.div_rem(&f.gcd(&f.derivative())).0;
            sqf.count_real_roots(&Rat::zero(), &Rat::one()) == sqf.degree().unwrap_or(0)
        }
    }
}

fn glue_to_raw(base: &IntMatrix, glue: &[Vec<Rat>], plus: &[Vec<Rat>], minus: &[Vec<Rat>]) -> Result<IntMatrix, ConfigError> {
    let n = base.rows();
    let lat = GramLattice::new(base.clone()).map_err(|e| ConfigError::Pushout(e.to_string()))?;
    let (_, over_basis) = overlattice_from_glue(&lat, glue)?;
    if plus.iter().chain(minus).any(|v| v.len() != n) || glue.iter().any(|v| v.len() != n) {
        return Err(ConfigError::Pushout(format!("vectors must have {n} coordinates")));
    }
    // every basis vector must lie in the glued lattice
    let ob = RationalMatrix::from_cols(&over_basis, n);
    for v in plus.iter().chain(minus) {
        match ob.solve(v) {
            Some(c) if c.iter().all(|x| x.is_integer()) => {}
            _ => return Err(ConfigError::Pushout("basis vector outside the glued lattice".into())),
        }
    }
    let all: Vec<Vec<Rat>> = plus.iter().chain(minus).cloned().collect();
    let b = RationalMatrix::from_cols(&all, n);
    b.transpose().mul(&base.to_rational()).mul(&b).to_integer().ok_or_else(|| ConfigError::Pushout("non-integral pairings".into()))
}

/// Point `x = B t` with all coordinates positive and, if given, `image x` positive too.
fn cone_point(basis: &[Vec<Rat>], dim: usize, image: Option<&RationalMatrix>) -> Option<Vec<Rat>> {
    if basis.is_empty() {
        return None;
    }
    let b = RationalMatrix::from_cols(basis, dim);
    let mut rows: Vec<Vec<Rat>> = b.to_rows();
    if let Some(img) = image {
        rows.extend(img.mul(&b).to_rows());
    }
    let t = strict_cone_witness(&rows, basis.len())?;
    Some(b.mul_vec(&t))
}

/// Fourier-Motzkin elimination for the strict homogeneous system `a_i . t > 0`; returns a solution if one exists.
pub fn strict_cone_witness(rows: &[Vec<Rat>], n: usize) -> Option<Vec<Rat>> {
    // systems[k] holds the inequalities in the variables 0..n-k
    if rows.iter().any(|r| r.iter().all(|x| x.is_zero())) {
        return None;
    }
    let mut systems: Vec<Vec<Vec<Rat>>> = vec![rows.to_vec()];
    for k in (0..n).rev() {
        let cur = systems.last().unwrap();
        let mut next = Vec::new();
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        for r in cur {
            if r[k].is_positive() {
                pos.push(r);
            } else if r[k].is_negative() {
                neg.push(r);
            } else {
                next.push(r[..k].to_vec());
            }
        }
        for p in &pos {
            for q in &neg {
                // eliminate t_k with positive multipliers
                let (a, b) = (-q[k].clone(), p[k].clone());
                next.push((0..k).map(|j| &a * &p[j] + &b * &q[j]).collect());
            }
        }
        // a row with every coefficient eliminated reads 0 > 0
        if next.iter().any(|r| r.iter().all(|x| x.is_zero())) {
            return None;
        }
        systems.push(dedup_rows(next));
    }
    // back-substitute, choosing each variable strictly inside its interval
    let mut t: Vec<Rat> = Vec::new();
    for k in 0..n {
        let sys = &systems[n - 1 - k];
        let (mut lo, mut hi): (Option<Rat>, Option<Rat>) = (None, None);
        for r in sys {
            let rest: Rat = (0..k).map(|j| &r[j] * &t[j]).fold(Rat::zero(), |a, b| a + b);
            if r[k].is_zero() {
                if !rest.is_positive() {
                    return None;
                }
                continue;
            }
            let bound = -rest / &r[k];
            if r[k].is_positive() {
                lo = Some(lo.map_or(bound.clone(), |l| l.max(bound)));
            } else {
                hi = Some(hi.map_or(bound.clone(), |h| h.min(bound)));
            }
        }
        let v = match (lo, hi) {
            (Some(l), Some(h)) if l < h => (l + h) / rat(2, 1),
            (Some(_), Some(_)) => return None,
            (Some(l), None) => l.floor() + Rat::one(),
            (None, Some(h)) => h.ceil() - Rat::one(),
            (None, None) => Rat::zero(),
        };
        t.push(v);
    }
    rows.iter()
        .all(|r| r.iter().zip(&t).map(|(a, b)| a * b).fold(Rat::zero(), |a, b| a + b).is_positive())
        .then_some(t)
}

fn dedup_rows(rows: Vec<Vec<Rat>>) -> Vec<Vec<Rat>> {
    // normalize by the first nonzero magnitude so repeated constraints collapse
    let mut out: Vec<Vec<Rat>> = Vec::new();
    for r in rows {
        let s = r.iter().find(|x| !x.is_zero()).map(|x| x.abs());
        let r = match s {
            Some(s) => r.iter().map(|x| x / &s).collect(),
            None => r,
        };
        if !out.contains(&r) {
            out.push(r);
        }
    }
    out
}

/// Cross term for a pair of rank-one lattices at pi/4 or pi/6.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rank1Pushout {
    pub w: i64,
    /// `(m, q+, q-)` with `n+ = 2 m q+^2`, `n- = m q-^2`, coprime `q+, q-` (pi/4 only).
    pub decomposition: Option<(i64, i64, i64)>,
}

pub fn rank1_pushout(n_plus: i64, n_minus: i64, theta: &Rat) -> Option<Rank1Pushout> {
    let is_square = |x: i64| x >= 0 && x.sqrt() * x.sqrt() == x;
    if *theta == rat(1, 4) {
        let prod = 2 * n_plus * n_minus;
        if !is_square(prod) || prod % 4 != 0 {
            return None;
        }
        let w = (n_plus * n_minus / 2).sqrt();
        let half = n_plus / 2;
        let m = half.gcd(&n_minus);
        let (a, b) = (half / m, n_minus / m);
        let decomposition = (is_square(a) && is_square(b)).then(|| (m, a.sqrt(), b.sqrt()));
        Some(Rank1Pushout { w, decomposition })
    } else if *theta == rat(1, 6) {
        let prod = 3 * n_plus * n_minus;
        if !is_square(prod) || prod.sqrt() % 2 != 0 {
            return None;
        }
        Some(Rank1Pushout { w: prod.sqrt() / 2, decomposition: None })
    } else {
        None
    }
}

/// On-disk configuration document.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub plus: String,
    pub minus: String,
    pub theta: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_plus: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_minus: Option<u8>,
    pub pushout: PushoutDocument,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PushoutDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub glue: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub plus_basis: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub minus_basis: Vec<Vec<String>>,
}

impl ConfigDocument {
    pub fn parse(src: &str) -> Result<Self, ConfigError> {
        toml::from_str(src).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn angle(&self) -> Result<GluingAngle, ConfigError> {
        let theta = parse_theta(&self.theta)?;
        match self.family {
            None => GluingAngle::new(theta),
            Some(f) => {
                let d = GluingAngle::new(theta.clone())?;
                GluingAngle::with_torus(theta, f, self.b_plus.unwrap_or(d.b_plus), self.b_minus.unwrap_or(d.b_minus))
            }
        }
    }

    pub fn resolve(&self, catalog: &Catalog) -> Result<Configuration, ConfigError> {
        let get = |id: &str| catalog.get(id).cloned().ok_or_else(|| ConfigError::UnknownBlock(id.to_string()));
        let (plus, minus) = (get(&self.plus)?, get(&self.minus)?);
        let angle = self.angle()?;
        let rats = |vs: &[Vec<String>]| -> Result<Vec<Vec<Rat>>, ConfigError> {
            vs.iter().map(|v| v.iter().map(|s| parse_rat(s)).collect()).collect()
        };
        let pushout = match (&self.pushout.gram, &self.pushout.base) {
            (Some(g), None) => Pushout::Full(IntMatrix::from_vecs(g)),
            (None, Some(b)) => Pushout::Glue {
                base: IntMatrix::from_vecs(b),
                glue: rats(&self.pushout.glue)?,
                plus_basis: rats(&self.pushout.plus_basis)?,
                minus_basis: rats(&self.pushout.minus_basis)?,
            },
            _ => return Err(ConfigError::Parse("pushout needs exactly one of `gram` or `base`".into())),
        };
        Configuration::new(plus, minus, angle, pushout)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat() -> Catalog {
        Catalog::shipped()
    }

    fn cfg(plus: &str, minus: &str, theta: &str, cross: &[&[i64]]) -> Configuration {
        let c = cat();
        Configuration::from_cross(
            c.get(plus).unwrap(),
            c.get(minus).unwrap(),
            GluingAngle::parse(theta).unwrap(),
            &IntMatrix::from_i64(cross),
        )
        .unwrap()
    }

    fn ex87() -> Configuration {
        cfg("3.22_1", "3.9_10", "1/4pi", &[&[3, 1]])
    }

    #[test]
    fn theta_parsing() {
        assert_eq!(parse_theta("1/4pi").unwrap(), rat(1, 4));
        assert_eq!(parse_theta("-1/4pi").unwrap(), rat(-1, 4));
        assert_eq!(parse_theta("pi").unwrap(), rat(1, 1));
        assert!(parse_theta("0.785").is_err());
        let a = GluingAngle::parse("3/4pi").unwrap();
        assert_eq!((a.theta.clone(), a.epsilon, a.orientation), (rat(1, 4), -1, 1));
        let a = GluingAngle::parse("-1/6pi").unwrap();
        assert_eq!((a.theta.clone(), a.epsilon, a.orientation, a.family), (rat(1, 6), 1, -1, Family::Hexagonal));
        assert!(GluingAngle::parse("1/5pi").is_err());
    }

    #[test]
    fn admissibility_cases() {
        use BlockKind::*;
        let a = GluingAngle::parse("1/4pi").unwrap();
        assert_eq!(admissible_angle(Involution, Ordinary, &a), Admissibility::SimplyConnected);
        assert!(matches!(admissible_angle(Ordinary, Ordinary, &a), Admissibility::Inadmissible(_)));
        let a = GluingAngle::with_torus(rat(1, 2), Family::Square, 1, 1).unwrap();
        assert_eq!(admissible_angle(Involution, Involution, &a), Admissibility::Pi1Z2);
        let a = GluingAngle::with_torus(rat(1, 3), Family::Hexagonal, 0, 0).unwrap();
        assert_eq!(admissible_angle(Involution, Involution, &a), Admissibility::Pi1Z3);
        assert!(GluingAngle::with_torus(rat(1, 4), Family::Square, 1, 1).is_err());
    }

    #[test]
    fn validation_examples() {
        let c = cat();
        let v = cfg("3.22_1", "3.22_3", "1/6pi", &[&[3]]).validate();
        assert!(v.is_valid(), "{v:?}");
        let bad = Configuration::from_cross(
            c.get("3.22_1").unwrap(),
            c.get("3.22_2").unwrap(),
            GluingAngle::parse("1/4pi").unwrap(),
            &IntMatrix::from_i64(&[&[3]]),
        )
        .unwrap();
        assert!(!bad.validate().is_valid());
        let w = IntMatrix::from_i64(&[&[4, 4, 5, 3], &[4, 2, 2, 4], &[5, 2, 4, 9], &[3, 4, 9, 8]]);
        let deg = Configuration::new(
            c.get("3.23_8").unwrap().clone(),
            c.get("3.11").unwrap().clone(),
            GluingAngle::parse("1/4pi").unwrap(),
            Pushout::Full(w),
        )
        .unwrap();
        assert!(deg.validate().is_valid(), "{:?}", deg.validate());
        assert_eq!(deg.radical().reduced.rank(), 3);
    }

    #[test]
    fn eigenspaces_and_purity() {
        let pure = cfg("3.28", "3.9_3", "1/4pi", &[&[2, 1], &[2, 0]]);
        assert!(pure.is_pure_angle());
        assert_eq!(pure.angle_eigenspaces(&rat(1, 2)).multiplicity, 2);
        assert!(!ex87().is_pure_angle());
        assert!(cfg("3.22_1", "3.22_3", "1/6pi", &[&[3]]).is_pure_angle());
        let e820 = cfg("3.26_2", "3.8_1_6", "1/6pi", &[&[5], &[4]]);
        let sp = e820.angle_eigenspaces(&rat(3, 4));
        assert_eq!(sp.multiplicity, 1);
        let v = &sp.plus[0];
        assert_eq!(v[0], v[1]);
    }

    #[test]
    fn eigenvalues_of_examples() {
        let e88 = cfg("5.15_2", "3.9_27", "1/4pi", &[&[2, 3], &[1, 1]]);
        let (e, _) = e88.eigenstructures();
        assert_eq!(e.rational, vec![(rat(1, 34), 1), (rat(1, 2), 1)]);
        let e810 = cfg("3.25_4", "3.9_17", "1/4pi", &[&[4, 6], &[5, 4]]);
        let (e, _) = e810.eigenstructures();
        assert!(e.multiplicity(&rat(49, 50)) == 1);
    }

    #[test]
    fn configuration_angle_examples() {
        let pure = cfg("3.28", "3.9_3", "1/4pi", &[&[2, 1], &[2, 0]]);
        let a = pure.configuration_angles().unwrap();
        let nz: Vec<String> = a.nonzero_minus().iter().map(|x| x.to_string()).collect();
        assert_eq!(nz, vec!["π/2", "-π/2"]);
        let a = ex87().configuration_angles().unwrap();
        assert_eq!(a.nonzero_minus(), vec![&Angle::pi()]);
        let e88 = cfg("5.15_2", "3.9_27", "1/4pi", &[&[2, 3], &[1, 1]]);
        let a = e88.configuration_angles().unwrap();
        let cosines: Vec<Rat> = a.nonzero_minus().iter().map(|x| x.cos.clone()).collect();
        assert_eq!(cosines, vec![rat(-16, 17), rat(-16, 17)]);
        let r1 = cfg("3.21", "3.8_1_18", "1/4pi", &[&[6]]);
        let a = r1.configuration_angles().unwrap();
        assert!(a.alpha_minus.iter().all(Angle::is_zero));
        assert_eq!(a.alpha_plus.iter().filter(|x| !x.is_zero()).count(), 2);
    }

    #[test]
    fn rank1_pushouts() {
        assert_eq!(rank1_pushout(4, 18, &rat(1, 4)), Some(Rank1Pushout { w: 6, decomposition: Some((2, 1, 3)) }));
        assert_eq!(rank1_pushout(2, 4, &rat(1, 4)).unwrap().w, 2);
        assert_eq!(rank1_pushout(2, 6, &rat(1, 6)).unwrap().w, 3);
        assert_eq!(rank1_pushout(2, 10, &rat(1, 4)), None);
    }

    #[test]
    fn feasibility_examples() {
        let f = ex87().feasibility();
        assert!(f.feasible);
        let (x, y) = f.witness.unwrap();
        assert!(x[0].is_positive() && y.iter().all(|v| v.is_positive()));
        assert_eq!(y[0], y[1]);
        assert!(cfg("3.21", "3.8_1_18", "1/4pi", &[&[6]]).feasibility().feasible);
        assert!(!cfg("3.22_1", "3.9_10", "1/4pi", &[&[-3, -1]]).feasibility().feasible);
    }

    #[test]
    fn fourier_motzkin_small_systems() {
        let r = |v: &[i64]| v.iter().map(|&x| rat(x, 1)).collect::<Vec<_>>();
        assert!(strict_cone_witness(&[r(&[1, 0]), r(&[0, 1]), r(&[-1, -1])], 2).is_none());
        let t = strict_cone_witness(&[r(&[1, -1]), r(&[0, 1]), r(&[-1, 3])], 2).unwrap();
        assert!(t[0] > t[1] && t[1].is_positive() && rat(3, 1) * &t[1] > t[0]);
        assert!(strict_cone_witness(&[r(&[0, 0])], 2).is_none());
    }

    #[test]
    fn lambda_examples() {
        let (lp, _) = ex87().lambda_lattices().unwrap();
        assert_eq!(lp.det(), int(-32));
        assert!(lp.signature() == Signature { pos: 1, neg: 1, zero: 0 });
        let pure = cfg("3.28", "3.9_3", "1/4pi", &[&[2, 1], &[2, 0]]);
        let (lp, lm) = pure.lambda_lattices().unwrap();
        assert_eq!(lp.det(), pure.plus.n.det());
        assert_eq!(lm.det(), pure.minus.n.det());
    }
}
