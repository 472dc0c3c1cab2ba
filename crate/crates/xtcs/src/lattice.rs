//! Integral lattices given by Gram matrices: cokernels, discriminant forms, radicals, glue,
//! projections and signatures.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::matrix::{clear_denominators, dot, frac, int, rat_from_int, Int, IntMatrix, Rat, RationalMatrix};
use crate::snf::{hermite_rows, saturate, smith, Smith};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("Gram matrix is not square")]
    NotSquare,
    #[error("Gram matrix is not symmetric")]
    NotSymmetric,
    #[error("Gram matrix has an odd diagonal entry")]
    OddDiagonal,
    #[error("singular lattice")]
    Singular,
    #[error("glue vectors do not define an even integral overlattice")]
    BadGlue,
    #[error("sum is not an integral lattice")]
    NotIntegral,
    #[error("sum is not an even lattice")]
    NotEven,
    #[error("degenerate diagonal block")]
    DegenerateBlock,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramLattice {
    gram: IntMatrix,
    labels: Vec<String>,
}

impl GramLattice {
    pub fn new(gram: IntMatrix) -> Result<Self, LatticeError> {
        let labels = (0..gram.rows()).map(|i| format!("e{}", i + 1)).collect();
        Self::with_labels(gram, labels)
    }

    pub fn with_labels(gram: IntMatrix, labels: Vec<String>) -> Result<Self, LatticeError> {
        if !gram.is_square() || labels.len() != gram.rows() {
            return Err(LatticeError::NotSquare);
        }
        if !gram.is_symmetric() {
            return Err(LatticeError::NotSymmetric);
        }
        if (0..gram.rows()).any(|i| gram.get(i, i).is_odd()) {
            return Err(LatticeError::OddDiagonal);
        }
        Ok(GramLattice { gram, labels })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self, LatticeError> {
        Self::new(IntMatrix::from_i64(rows))
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn det(&self) -> Int {
        self.gram.det()
    }

    pub fn signature(&self) -> Signature {
        signature(&self.gram.to_rational())
    }

    pub fn pair(&self, x: &[Rat], y: &[Rat]) -> Rat {
        dot(x, &self.gram.to_rational().mul_vec(y))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteAbelianGroup {
    pub invariant_factors: Vec<Int>,
    pub free_rank: usize,
}

impl FiniteAbelianGroup {
    pub fn trivial() -> Self {
        FiniteAbelianGroup { invariant_factors: Vec::new(), free_rank: 0 }
    }

    /// Normalizes an arbitrary list of cyclic orders to invariant-factor form.
    pub fn from_cyclic(orders: &[i64], free_rank: usize) -> Self {
        let s = smith(&IntMatrix::diagonal(orders));
        let invariant_factors = s.d.into_iter().filter(|d| d > &Int::one()).collect();
        FiniteAbelianGroup { invariant_factors, free_rank }
    }

    pub fn torsion_order(&self) -> Int {
        self.invariant_factors.iter().product()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    pub fn has_two_torsion(&self) -> bool {
        self.invariant_factors.iter().any(|d| d.is_even())
    }

    pub fn torsion_part(&self) -> FiniteAbelianGroup {
        FiniteAbelianGroup { invariant_factors: self.invariant_factors.clone(), free_rank: 0 }
    }

    /// Coefficient vectors of every torsion element.
    pub fn torsion_elements(&self) -> Vec<Vec<Int>> {
        let mut out = vec![Vec::new()];
        for d in &self.invariant_factors {
            let d = d.to_i64().expect("small invariant factor");
            out = out
                .into_iter()
                .flat_map(|v| {
                    (0..d).map(move |k| {
                        let mut w = v.clone();
                        w.push(int(k));
                        w
                    })
                })
                .collect();
        }
        out
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            k => parts.push(format!("Z^{k}")),
        }
        parts.extend(self.invariant_factors.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Presentation of `Z^m / A Z^n`.
#[derive(Clone, Debug)]
pub struct Cokernel {
    smith: Smith,
    torsion_idx: Vec<usize>,
    free_idx: Vec<usize>,
    pub group: FiniteAbelianGroup,
}

/// Image of a vector in the cokernel: torsion coordinates reduced mod the invariant factors, then free coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CokernelElement {
    pub torsion: Vec<Int>,
    pub free: Vec<Int>,
}

impl CokernelElement {
    pub fn is_zero(&self) -> bool {
        self.torsion.iter().chain(&self.free).all(|x| x.is_zero())
    }
}

pub fn cokernel_presentation(a: &IntMatrix) -> Cokernel {
    let smith = smith(a);
    let m = a.rows();
    let torsion_idx: Vec<usize> = (0..smith.rank).filter(|&i| smith.d[i] > Int::one()).collect();
    let free_idx: Vec<usize> = (smith.rank..m).collect();
    let group = FiniteAbelianGroup {
        invariant_factors: torsion_idx.iter().map(|&i| smith.d[i].clone()).collect(),
        free_rank: free_idx.len(),
    };
    Cokernel { smith, torsion_idx, free_idx, group }
}

impl Cokernel {
    pub fn project(&self, t: &[Int]) -> CokernelElement {
        let y = self.smith.u.mul_vec(t);
        CokernelElement {
            torsion: self.torsion_idx.iter().map(|&i| y[i].mod_floor(&self.smith.d[i])).collect(),
            free: self.free_idx.iter().map(|&i| y[i].clone()).collect(),
        }
    }

    /// Minimal `m >= 1` with `m t` in the image, and `x` with `A x = m t`; `None` for elements of infinite order.
    pub fn preimage(&self, t: &[Int]) -> Option<(Int, Vec<Int>)> {
        let y = self.smith.u.mul_vec(t);
        if self.free_idx.iter().any(|&i| !y[i].is_zero()) {
            return None;
        }
        let mut m = Int::one();
        for i in 0..self.smith.rank {
            let d = &self.smith.d[i];
            m = m.lcm(&(d / d.gcd(&y[i])));
        }
        let ncols = self.smith.v.rows();
        let mut z = vec![Int::zero(); ncols];
        for i in 0..self.smith.rank {
            z[i] = &m * &y[i] / &self.smith.d[i];
        }
        Some((m, self.smith.v.mul_vec(&z)))
    }

    /// Representatives in `Z^m` of the invariant-factor generators of the torsion.
    pub fn torsion_generators(&self) -> Vec<Vec<Int>> {
        self.torsion_idx.iter().map(|&i| self.smith.u_inv.col(i)).collect()
    }

    pub fn free_generators(&self) -> Vec<Vec<Int>> {
        self.free_idx.iter().map(|&i| self.smith.u_inv.col(i)).collect()
    }

    /// Largest divisor `k` of `bound` such that `t` is divisible by `k` in the cokernel.
    pub fn divisibility(&self, t: &[Int], bound: u64) -> u64 {
        let e = self.project(t);
        let free_gcd = e.free.iter().fold(Int::zero(), |acc, x| acc.gcd(x));
        (1..=bound)
            .rev()
            .filter(|k| bound.is_multiple_of(*k))
            .find(|&k| {
                let kk = Int::from(k);
                free_gcd.is_multiple_of(&kk)
                    && e.torsion
                        .iter()
                        .zip(&self.group.invariant_factors)
                        .all(|(x, d)| x.is_multiple_of(&kk.gcd(d)))
            })
            .unwrap_or(1)
    }

    /// gcd(bound, divisor of the image in the free quotient).
    pub fn free_divisibility(&self, t: &[Int], bound: u64) -> u64 {
        let g = self.project(t).free.iter().fold(Int::zero(), |acc, x| acc.gcd(x));
        g.gcd(&Int::from(bound)).to_u64().unwrap()
    }
}

/// Finite abelian group with a symmetric Q/Z-valued pairing on its invariant-factor generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscriminantForm {
    pub group: FiniteAbelianGroup,
    /// Entries reduced to `[0, 1)`.
    pub pairing: RationalMatrix,
}

impl DiscriminantForm {
    pub fn new(group: FiniteAbelianGroup, pairing: RationalMatrix) -> Self {
        DiscriminantForm { group, pairing: pairing.map(frac) }
    }

    pub fn trivial() -> Self {
        DiscriminantForm { group: FiniteAbelianGroup::trivial(), pairing: RationalMatrix::zeros(0, 0) }
    }

    pub fn order(&self) -> Int {
        self.group.torsion_order()
    }

    pub fn value(&self, x: &[Int], y: &[Int]) -> Rat {
        let xr: Vec<Rat> = x.iter().map(rat_from_int).collect();
        let yr: Vec<Rat> = y.iter().map(rat_from_int).collect();
        frac(&dot(&xr, &self.pairing.mul_vec(&yr)))
    }

    pub fn negated(&self) -> Self {
        DiscriminantForm::new(self.group.clone(), -&self.pairing)
    }

    /// Whether some group automorphism carries one pairing to the other; `None` when the group is too
    /// large for exhaustive search.
    pub fn is_isometric(&self, other: &DiscriminantForm) -> Option<bool> {
        if self.group != other.group {
            return Some(false);
        }
        if self.order() > Int::from(4096) {
            return None;
        }
        let elems = other.group.torsion_elements();
        let k = self.group.invariant_factors.len();
        let gens: Vec<Vec<Int>> = (0..k)
            .map(|i| (0..k).map(|j| if i == j { Int::one() } else { Int::zero() }).collect())
            .collect();
        // candidate images for each generator: same order-killing and same self-pairing
        let cands: Vec<Vec<&Vec<Int>>> = (0..k)
            .map(|i| {
                let d = &self.group.invariant_factors[i];
                elems
                    .iter()
                    .filter(|h| {
                        let scaled: Vec<Int> = h.iter().map(|x| x * d).collect();
                        other.reduce(&scaled).iter().all(|x| x.is_zero())
                            && other.value(h, h) == self.value(&gens[i], &gens[i])
                    })
                    .collect()
            })
            .collect();
        let mut chosen: Vec<&Vec<Int>> = Vec::new();
        Some(self.search(&cands, &mut chosen, other, &gens, &elems))
    }

    fn reduce(&self, x: &[Int]) -> Vec<Int> {
        x.iter().zip(&self.group.invariant_factors).map(|(a, d)| a.mod_floor(d)).collect()
    }

    fn search<'a>(
        &self,
        cands: &[Vec<&'a Vec<Int>>],
        chosen: &mut Vec<&'a Vec<Int>>,
        other: &DiscriminantForm,
        gens: &[Vec<Int>],
        elems: &[Vec<Int>],
    ) -> bool {
        let i = chosen.len();
        if i == cands.len() {
            // bijective iff the images generate, i.e. the induced map hits every element
            let mut seen = std::collections::HashSet::new();
            for x in self.group.torsion_elements() {
                let mut img = vec![Int::zero(); x.len()];
                for (c, h) in x.iter().zip(chosen.iter()) {
                    for (a, b) in img.iter_mut().zip(h.iter()) {
                        *a += c * b;
                    }
                }
                seen.insert(other.reduce(&img));
            }
            return seen.len() == elems.len();
        }
        for h in &cands[i] {
            let ok = (0..i).all(|j| other.value(h, chosen[j]) == self.value(&gens[i], &gens[j]));
            if ok {
                chosen.push(h);
                if self.search(cands, chosen, other, gens, elems) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
}

impl fmt::Display for DiscriminantForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ", self.group)?;
        let rows: Vec<String> = self
            .pairing
            .to_rows()
            .iter()
            .map(|r| r.iter().map(crate::matrix::fmt_rat).collect::<Vec<_>>().join(" "))
            .collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

/// Discriminant form of a nondegenerate lattice, with the generators as vectors of `L ⊗ Q`.
pub fn discriminant_form(g: &GramLattice) -> Result<DiscriminantForm, LatticeError> {
    discriminant_form_with_generators(g).map(|(d, _)| d)
}

pub fn discriminant_form_with_generators(
    g: &GramLattice,
) -> Result<(DiscriminantForm, Vec<Vec<Rat>>), LatticeError> {
    let gr = g.gram().to_rational();
    let inv = gr.inverse().ok_or(LatticeError::Singular)?;
    let coker = cokernel_presentation(g.gram());
    let gens: Vec<Vec<Rat>> = coker
        .torsion_generators()
        .iter()
        .map(|v| inv.mul_vec(&v.iter().map(rat_from_int).collect::<Vec<_>>()))
        .collect();
    let k = gens.len();
    let mut pairing = RationalMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            pairing.set(i, j, frac(&dot(&gens[i], &gr.mul_vec(&gens[j]))));
        }
    }
    Ok((DiscriminantForm::new(coker.group, pairing), gens))
}

/// Quotient by the subgroup `{x : 2x = 0}`, carrying the doubled pairing.
pub fn quotient_by_2torsion(d: &DiscriminantForm) -> DiscriminantForm {
    let mut keep = Vec::new();
    let mut factors = Vec::new();
    for (i, f) in d.group.invariant_factors.iter().enumerate() {
        let nf = if f.is_even() { f / 2 } else { f.clone() };
        if nf > Int::one() {
            keep.push(i);
            factors.push(nf);
        }
    }
    let two = Rat::from_integer(int(2));
    let mut pairing = RationalMatrix::zeros(keep.len(), keep.len());
    for (a, &i) in keep.iter().enumerate() {
        for (b, &j) in keep.iter().enumerate() {
            pairing.set(a, b, d.pairing.get(i, j) * &two);
        }
    }
    DiscriminantForm::new(FiniteAbelianGroup { invariant_factors: factors, free_rank: 0 }, pairing)
}

#[derive(Clone, Debug)]
pub struct RadicalQuotient {
    /// Saturated basis of `{v : G v = 0}`.
    pub radical: Vec<Vec<Int>>,
    /// Basis of a complement, as vectors of the original lattice.
    pub complement: Vec<Vec<Int>>,
    /// Integer matrix sending original coordinates to coordinates on the complement (kills the radical).
    pub projection: IntMatrix,
    pub reduced: GramLattice,
}

pub fn radical_and_quotient(g: &GramLattice) -> RadicalQuotient {
    let n = g.rank();
    let radical = crate::snf::integer_kernel(g.gram());
    let k = radical.len();
    let (complement, projection) = if k == 0 {
        ((0..n).map(|i| unit(n, i)).collect(), IntMatrix::identity(n))
    } else {
        let s = smith(&IntMatrix::from_cols(&radical, n));
        let comp: Vec<Vec<Int>> = (k..n).map(|j| s.u_inv.col(j)).collect();
        (comp, s.u.submatrix(k..n, 0..n))
    };
    let c = IntMatrix::from_cols(&complement, n);
    let reduced = GramLattice::new(c.transpose().mul(g.gram()).mul(&c)).expect("reduced Gram of an even lattice");
    RadicalQuotient { radical, complement, projection, reduced }
}

fn unit(n: usize, i: usize) -> Vec<Int> {
    (0..n).map(|j| if i == j { Int::one() } else { Int::zero() }).collect()
}

/// Lattice generated by `Z^n` and the glue vectors, on its Hermite basis (columns in old coordinates).
pub fn overlattice_from_glue(g: &GramLattice, glue: &[Vec<Rat>]) -> Result<(GramLattice, Vec<Vec<Rat>>), LatticeError> {
    let n = g.rank();
    let mut gens: Vec<Vec<Rat>> = (0..n).map(|i| unit(n, i).iter().map(rat_from_int).collect()).collect();
    gens.extend(glue.iter().cloned());
    let (basis, gram) = span_with_gram(&g.gram().to_rational(), &gens);
    let gram = gram.to_integer().ok_or(LatticeError::BadGlue)?;
    let lat = GramLattice::new(gram).map_err(|_| LatticeError::BadGlue)?;
    Ok((lat, basis))
}

/// Canonical basis of the group generated by rational vectors, and its Gram matrix.
fn span_with_gram(ambient: &RationalMatrix, gens: &[Vec<Rat>]) -> (Vec<Vec<Rat>>, RationalMatrix) {
    let n = ambient.rows();
    let (ints, l) = clear_denominators(gens);
    let lr = rat_from_int(&l);
    let basis: Vec<Vec<Rat>> = hermite_rows(&ints, n)
        .into_iter()
        .map(|v| v.iter().map(|x| rat_from_int(x) / &lr).collect())
        .collect();
    let b = RationalMatrix::from_cols(&basis, n);
    let gram = b.transpose().mul(ambient).mul(&b);
    (basis, gram)
}

/// Lattice generated by rational vectors in the span of an ambient form.
pub fn saturated_sum(ambient: &RationalMatrix, gens: &[Vec<Rat>]) -> Result<(GramLattice, Vec<Vec<Rat>>), LatticeError> {
    let (basis, gram) = span_with_gram(ambient, gens);
    let gram = gram.to_integer().ok_or(LatticeError::NotIntegral)?;
    let lat = GramLattice::new(gram).map_err(|_| LatticeError::NotEven)?;
    Ok((lat, basis))
}

/// Saturation of the span of integer vectors inside `Z^n`, with its Gram matrix.
pub fn saturation_in(g: &GramLattice, gens: &[Vec<Int>]) -> (GramLattice, Vec<Vec<Int>>) {
    let n = g.rank();
    let basis = saturate(gens, n);
    let b = IntMatrix::from_cols(&basis, n);
    let lat = GramLattice::new(b.transpose().mul(g.gram()).mul(&b)).expect("sublattice of an even lattice");
    (lat, basis)
}

/// Basis of `{x : G x ∈ 2 Z^n}`.
pub fn even_dual_kernel(g: &GramLattice) -> Vec<Vec<Int>> {
    let n = g.rank();
    let mut rows: Vec<Vec<u8>> = (0..n)
        .map(|i| (0..n).map(|j| u8::from(g.gram().get(i, j).is_odd())).collect())
        .collect();
    // reduced row echelon form over F_2
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..n).find(|&i| rows[i][c] == 1) else { continue };
        rows.swap(r, p);
        for i in 0..n {
            if i != r && rows[i][c] == 1 {
                let pr = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(&pr) {
                    *x ^= y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let mut gens: Vec<Vec<Int>> = (0..n).map(|i| unit(n, i).into_iter().map(|x| x * 2).collect()).collect();
    for f in (0..n).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Int::zero(); n];
        v[f] = Int::one();
        for (i, &p) in pivots.iter().enumerate() {
            if rows[i][f] == 1 {
                v[p] = Int::one();
            }
        }
        gens.push(v);
    }
    hermite_rows(&gens, n)
}

/// Orthogonal projections between the two diagonal blocks of a split Gram matrix.
///
/// Returns `(pi_plus, pi_minus)`: column `j` of `pi_plus` is the image of the `j`-th trailing basis vector in
/// leading coordinates, and symmetrically for `pi_minus`.
pub fn block_projections(w: &IntMatrix, split: usize) -> Result<(RationalMatrix, RationalMatrix), LatticeError> {
    let n = w.rows();
    let wr = w.to_rational();
    let gp = wr.submatrix(0..split, 0..split);
    let gm = wr.submatrix(split..n, split..n);
    let c = wr.submatrix(0..split, split..n);
    let gpi = gp.inverse().ok_or(LatticeError::DegenerateBlock)?;
    let gmi = gm.inverse().ok_or(LatticeError::DegenerateBlock)?;
    Ok((gpi.mul(&c), gmi.mul(&c.transpose())))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    pub pos: usize,
    pub neg: usize,
    pub zero: usize,
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.pos, self.neg, self.zero)
    }
}

/// Signature of a symmetric rational matrix by congruence diagonalization.
pub fn signature(g: &RationalMatrix) -> Signature {
    let mut a = g.clone();
    let n = a.rows();
    let mut sig = Signature { pos: 0, neg: 0, zero: 0 };
    let mut k = 0;
    while k < n {
        if a.get(k, k).is_zero() {
            if let Some(p) = (k + 1..n).find(|&i| !a.get(i, i).is_zero()) {
                sym_swap(&mut a, k, p);
            } else if let Some(j) = (k + 1..n).find(|&j| !a.get(k, j).is_zero()) {
                // e_k += e_j makes the pivot 2 a_kj
                sym_add(&mut a, j, k);
            } else if let Some((i, j)) =
                (k + 1..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).find(|&(i, j)| !a.get(i, j).is_zero())
            {
                sym_add(&mut a, j, i);
                sym_swap(&mut a, k, i);
            } else {
                sig.zero += n - k;
                break;
            }
            continue;
        }
        let p = a.get(k, k).clone();
        if p.is_positive() {
            sig.pos += 1;
        } else {
            sig.neg += 1;
        }
        for i in k + 1..n {
            let f = a.get(i, k) / &p;
            if f.is_zero() {
                continue;
            }
            for j in k..n {
                let v = a.get(i, j) - &(&f * a.get(k, j));
                a.set(i, j, v);
            }
            for j in k..n {
                let v = a.get(j, i) - &(&f * a.get(j, k));
                a.set(j, i, v);
            }
        }
        k += 1;
    }
    sig
}

fn sym_swap(a: &mut RationalMatrix, i: usize, j: usize) {
    a.swap_rows(i, j);
    let n = a.rows();
    for r in 0..n {
        let x = a.get(r, i).clone();
        let y = a.get(r, j).clone();
        a.set(r, i, y);
        a.set(r, j, x);
    }
}

// basis vector e_dst += e_src
fn sym_add(a: &mut RationalMatrix, src: usize, dst: usize) {
    let n = a.rows();
    for c in 0..n {
        let v = a.get(dst, c) + a.get(src, c);
        a.set(dst, c, v);
    }
    for r in 0..n {
        let v = a.get(r, dst) + a.get(r, src);
        a.set(r, dst, v);
    }
}

/// Absolute value of the index of an integer sublattice given by a full-rank basis.
pub fn index_of(basis: &[Vec<Int>]) -> Int {
    let n = basis.len();
    IntMatrix::from_cols(basis, n).det().abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::rat;

    fn lat(rows: &[&[i64]]) -> GramLattice {
        GramLattice::from_i64(rows).unwrap()
    }

    fn factors(g: &FiniteAbelianGroup) -> Vec<i64> {
        g.invariant_factors.iter().map(|d| d.to_i64().unwrap()).collect()
    }

    #[test]
    fn cokernel_examples() {
        let c = cokernel_presentation(&IntMatrix::from_i64(&[&[1, 1, 3], &[1, 0, 4], &[3, 4, 8]]));
        assert_eq!(c.group.free_rank, 1);
        assert!(c.group.is_torsion_free());
        let c = cokernel_presentation(&IntMatrix::identity(2));
        assert_eq!(c.group, FiniteAbelianGroup::trivial());
        let c = cokernel_presentation(&IntMatrix::from_i64(&[&[3, 3, 3], &[3, 2, 4], &[3, 4, 2]]));
        assert_eq!((c.group.free_rank, factors(&c.group)), (1, vec![3]));
        let c = cokernel_presentation(&IntMatrix::diagonal(&[2, 3]));
        assert_eq!((c.group.free_rank, factors(&c.group)), (0, vec![6]));
    }

    #[test]
    fn preimage_is_minimal() {
        let a = IntMatrix::diagonal(&[2, 3]);
        let c = cokernel_presentation(&a);
        let (m, x) = c.preimage(&[int(1), int(1)]).unwrap();
        assert_eq!(m, int(6));
        assert_eq!(a.mul_vec(&x), vec![int(6), int(6)]);
        let (m, _) = c.preimage(&[int(0), int(1)]).unwrap();
        assert_eq!(m, int(3));
        let c = cokernel_presentation(&IntMatrix::from_i64(&[&[1], &[1]]));
        assert!(c.preimage(&[int(1), int(0)]).is_none());
    }

    #[test]
    fn discriminant_examples() {
        let d = discriminant_form(&lat(&[&[4, 6], &[6, 2]])).unwrap();
        assert_eq!(factors(&d.group), vec![2, 14]);
        let d = discriminant_form(&lat(&[&[0, 1], &[1, 0]])).unwrap();
        assert_eq!(d, DiscriminantForm::trivial());
        let d = discriminant_form(&lat(&[&[8]])).unwrap();
        assert_eq!(factors(&d.group), vec![8]);
        assert_eq!(d.pairing.get(0, 0), &rat(1, 8));
        assert_eq!(discriminant_form(&lat(&[&[2, 2], &[2, 2]])), Err(LatticeError::Singular));
    }

    #[test]
    fn two_torsion_quotients() {
        let d = quotient_by_2torsion(&discriminant_form(&lat(&[&[4, 6], &[6, 2]])).unwrap());
        assert_eq!(factors(&d.group), vec![7]);
        let d = quotient_by_2torsion(&discriminant_form(&lat(&[&[8]])).unwrap());
        assert_eq!(factors(&d.group), vec![4]);
        assert_eq!(d.pairing.get(0, 0), &rat(1, 4));
        assert_eq!(quotient_by_2torsion(&DiscriminantForm::trivial()), DiscriminantForm::trivial());
    }

    #[test]
    fn radical_examples() {
        let rq = radical_and_quotient(&lat(&[&[4, 4, 5, 3], &[4, 2, 2, 4], &[5, 2, 4, 9], &[3, 4, 9, 8]]));
        assert_eq!(rq.radical.len(), 1);
        assert_eq!(rq.reduced.rank(), 3);
        assert!(!rq.reduced.det().is_zero());
        let g = lat(&[&[2, 3], &[3, 6]]);
        let rq = radical_and_quotient(&g);
        assert!(rq.radical.is_empty());
        assert_eq!(rq.reduced, g);
        let rq = radical_and_quotient(&lat(&[&[0, 0], &[0, 0]]));
        assert_eq!(rq.radical.len(), 2);
    }

    #[test]
    fn glue_examples() {
        let base = GramLattice::new(IntMatrix::diagonal(&[4, 4, -2])).unwrap();
        let glue = vec![vec![rat(1, 2), rat(1, 2), rat(0, 1)]];
        let (w, _) = overlattice_from_glue(&base, &glue).unwrap();
        assert_eq!(w.rank(), 3);
        assert_eq!(w.det(), int(-8));
        let bad = vec![vec![rat(1, 2), rat(1, 2), rat(1, 2)]];
        assert_eq!(overlattice_from_glue(&base, &bad), Err(LatticeError::BadGlue));
        let (same, _) = overlattice_from_glue(&base, &[]).unwrap();
        assert_eq!(same, base);
        let two = lat(&[&[2]]);
        assert_eq!(overlattice_from_glue(&two, &[vec![rat(1, 2)]]), Err(LatticeError::BadGlue));
    }

    #[test]
    fn even_dual_kernel_examples() {
        assert_eq!(index_of(&even_dual_kernel(&lat(&[&[2, 2], &[2, 0]]))), int(1));
        let k = even_dual_kernel(&lat(&[&[4, 7], &[7, 6]]));
        assert_eq!(k, vec![vec![int(2), int(0)], vec![int(0), int(2)]]);
        assert_eq!(index_of(&even_dual_kernel(&lat(&[&[2]]))), int(1));
    }

    #[test]
    fn projection_examples() {
        let (_, pm) = block_projections(&IntMatrix::from_i64(&[&[2, 3, 1], &[3, 8, 4], &[1, 4, 0]]), 1).unwrap();
        assert_eq!(pm.col(0), vec![rat(1, 4), rat(1, 4)]);
        let (pp, _) = block_projections(&IntMatrix::from_i64(&[&[2, 3], &[3, 6]]), 1).unwrap();
        assert_eq!(pp.get(0, 0), &rat(3, 2));
        let (pp, pm) = block_projections(&IntMatrix::diagonal(&[2, 4]), 1).unwrap();
        assert!(pp.is_zero() && pm.is_zero());
    }

    #[test]
    fn signature_examples() {
        let s = |rows: &[&[i64]]| signature(&IntMatrix::from_i64(rows).to_rational());
        assert_eq!(s(&[&[2, 3], &[3, 6]]), Signature { pos: 2, neg: 0, zero: 0 });
        assert_eq!(s(&[&[4, 6], &[6, 2]]), Signature { pos: 1, neg: 1, zero: 0 });
        assert_eq!(s(&[&[0, 0, 0], &[0, 0, 0], &[0, 0, 0]]), Signature { pos: 0, neg: 0, zero: 3 });
        assert_eq!(s(&[&[0, 2, 2], &[2, 0, 2], &[2, 2, 0]]), Signature { pos: 1, neg: 2, zero: 0 });
        assert_eq!(s(&[&[0, 1], &[1, 0]]), Signature { pos: 1, neg: 1, zero: 0 });
    }

    #[test]
    fn saturated_sum_examples() {
        let amb = IntMatrix::from_i64(&[&[8]]).to_rational();
        let (s, _) = saturated_sum(&amb, &[vec![rat(1, 1)], vec![rat(1, 1)]]).unwrap();
        assert_eq!(s.gram(), &IntMatrix::from_i64(&[&[8]]));
        let amb = IntMatrix::from_i64(&[&[4, 4], &[4, 0]]).to_rational();
        let gens = vec![vec![rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 1)], vec![rat(1, 1), rat(-1, 1)]];
        let (s, _) = saturated_sum(&amb, &gens).unwrap();
        assert_eq!(s.gram(), &IntMatrix::from_i64(&[&[4, 4], &[4, 0]]));
        assert_eq!(saturated_sum(&amb, &[vec![rat(1, 4), rat(0, 1)]]), Err(LatticeError::NotIntegral));
        assert_eq!(saturated_sum(&amb, &[vec![rat(1, 2), rat(0, 1)]]), Err(LatticeError::NotEven));
    }

    #[test]
    fn linking_isometry_up_to_automorphism() {
        let z7 = FiniteAbelianGroup::from_cyclic(&[7], 0);
        let a = DiscriminantForm::new(z7.clone(), RationalMatrix::from_rows(vec![vec![rat(3, 7)]]));
        let b = DiscriminantForm::new(z7.clone(), RationalMatrix::from_rows(vec![vec![rat(6, 7)]]));
        let c = DiscriminantForm::new(z7, RationalMatrix::from_rows(vec![vec![rat(1, 7)]]));
        assert_eq!(a.is_isometric(&b), Some(true));
        assert_eq!(a.is_isometric(&c), Some(false));
        let v = FiniteAbelianGroup::from_cyclic(&[2, 2], 0);
        let diag = DiscriminantForm::new(
            v.clone(),
            RationalMatrix::from_rows(vec![vec![rat(1, 2), rat(0, 1)], vec![rat(0, 1), rat(1, 2)]]),
        );
        let hyp =
            DiscriminantForm::new(v, RationalMatrix::from_rows(vec![vec![rat(0, 1), rat(1, 2)], vec![rat(1, 2), rat(0, 1)]]));
        assert_eq!(diag.is_isometric(&hyp), Some(false));
        assert_eq!(diag.is_isometric(&diag), Some(true));
    }
}
