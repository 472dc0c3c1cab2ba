//! Univariate polynomials over Q: characteristic polynomials, rational roots, Sturm counts.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::matrix::{rat_from_int, Int, Rat, RationalMatrix};

/// Coefficients in increasing degree; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly(pub Vec<Rat>);

impl Poly {
    pub fn new(mut c: Vec<Rat>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly(c)
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        self.0.iter().rev().fold(Rat::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(self.0.iter().enumerate().skip(1).map(|(i, c)| c * Rat::from_integer(Int::from(i))).collect())
    }

    fn lead(&self) -> &Rat {
        self.0.last().expect("zero polynomial has no leading coefficient")
    }

    pub fn monic(&self) -> Poly {
        let l = self.lead().clone();
        Poly(self.0.iter().map(|c| c / &l).collect())
    }

    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by zero polynomial");
        let mut r = self.0.clone();
        let mut q = vec![Rat::zero(); r.len().saturating_sub(dd)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let f = r.last().unwrap() / d.lead();
            for (i, c) in d.0.iter().enumerate() {
                r[k + i] -= &f * c;
            }
            q[k] = f;
            r.pop();
            while r.last().is_some_and(|x| x.is_zero()) {
                r.pop();
            }
        }
        (Poly::new(q), Poly::new(r))
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    /// Integer polynomial with coprime coefficients and the same roots.
    fn primitive_integer(&self) -> Vec<Int> {
        let l = self.0.iter().fold(Int::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<Int> = self.0.iter().map(|c| (c * rat_from_int(&l)).to_integer()).collect();
        let g = ints.iter().fold(Int::zero(), |acc, x| acc.gcd(x));
        ints.into_iter().map(|x| x / &g).collect()
    }

    /// Rational roots with multiplicity, plus the remaining factor without rational roots.
    pub fn rational_roots(&self) -> (Vec<(Rat, usize)>, Poly) {
        let mut p = self.clone();
        let mut roots = Vec::new();
        let mut zero_mult = 0;
        while p.0.first().is_some_and(|c| c.is_zero()) {
            p = Poly::new(p.0[1..].to_vec());
            zero_mult += 1;
        }
        if zero_mult > 0 {
            roots.push((Rat::zero(), zero_mult));
        }
        if p.degree().unwrap_or(0) == 0 {
            return (roots, p);
        }
        let ints = p.primitive_integer();
        let a0 = ints[0].abs();
        let an = ints.last().unwrap().abs();
        let mut cands: Vec<Rat> = Vec::new();
        for num in divisors(&a0) {
            for den in divisors(&an) {
                let r = Rat::new(num.clone(), den.clone());
                if !cands.contains(&r) {
                    cands.push(r.clone());
                    cands.push(-r);
                }
            }
        }
        cands.sort();
        for c in cands {
            let mut mult = 0;
            let lin = Poly::new(vec![-c.clone(), Rat::one()]);
            loop {
                let (q, r) = p.div_rem(&lin);
                if !r.is_zero() {
                    break;
                }
                p = q;
                mult += 1;
            }
            if mult > 0 {
                roots.push((c, mult));
            }
        }
        roots.sort_by(|a, b| a.0.cmp(&b.0));
        (roots, p.monic())
    }

    /// Number of distinct real roots in the half-open interval `(a, b]`.
    pub fn count_real_roots(&self, a: &Rat, b: &Rat) -> usize {
        if self.degree().unwrap_or(0) == 0 {
            return 0;
        }
        let mut seq = vec![self.clone(), self.derivative()];
        while !seq.last().unwrap().is_zero() {
            let n = seq.len();
            let r = seq[n - 2].div_rem(&seq[n - 1]).1;
            seq.push(Poly(r.0.iter().map(|c| -c.clone()).collect()));
        }
        seq.pop();
        let changes = |x: &Rat| {
            let signs: Vec<bool> =
                seq.iter().map(|p| p.eval(x)).filter(|v| !v.is_zero()).map(|v| v.is_positive()).collect();
            signs.windows(2).filter(|w| w[0] != w[1]).count()
        };
        changes(a) - changes(b)
    }
}

fn divisors(n: &Int) -> Vec<Int> {
    let mut out = Vec::new();
    if n.is_zero() {
        return out;
    }
    let mut i = Int::one();
    while &i * &i <= *n {
        if n.is_multiple_of(&i) {
            out.push(i.clone());
            let j = n / &i;
            if j != i {
                out.push(j);
            }
        }
        i += 1;
    }
    out
}

/// Characteristic polynomial `det(x I - m)` by the Faddeev-LeVerrier recursion.
pub fn char_poly(m: &RationalMatrix) -> Poly {
    assert!(m.is_square());
    let n = m.rows();
    let mut c = vec![Rat::zero(); n + 1];
    c[n] = Rat::one();
    let mut mk = RationalMatrix::zeros(n, n);
    for k in 1..=n {
        let mut next = m.mul(&mk);
        for i in 0..n {
            let v = next.get(i, i) + &c[n + 1 - k];
            next.set(i, i, v);
        }
        mk = next;
        let am = m.mul(&mk);
        c[n - k] = -am.trace() / Rat::from_integer(Int::from(k));
    }
    Poly::new(c)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Eigenstructure {
    /// Rational eigenvalues in increasing order, with algebraic multiplicity.
    pub rational: Vec<(Rat, usize)>,
    /// Monic factor of the characteristic polynomial with no rational roots (coefficients in increasing degree).
    pub irrational_factor: Option<Vec<Rat>>,
}

impl Eigenstructure {
    pub fn splits(&self) -> bool {
        self.irrational_factor.is_none()
    }

    pub fn multiplicity(&self, x: &Rat) -> usize {
        self.rational.iter().find(|(v, _)| v == x).map_or(0, |(_, k)| *k)
    }
}

pub fn rational_eigenstructure(m: &RationalMatrix) -> Eigenstructure {
    let (rational, rest) = char_poly(m).rational_roots();
    let irrational_factor = (rest.degree().unwrap_or(0) > 0).then(|| rest.0.clone());
    Eigenstructure { rational, irrational_factor }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{rat, IntMatrix};

    #[test]
    fn char_poly_of_small_matrix() {
        let m = IntMatrix::from_i64(&[&[2, 1], &[1, 2]]).to_rational();
        // x^2 - 4x + 3
        assert_eq!(char_poly(&m), Poly::new(vec![rat(3, 1), rat(-4, 1), rat(1, 1)]));
        let e = rational_eigenstructure(&m);
        assert_eq!(e.rational, vec![(rat(1, 1), 1), (rat(3, 1), 1)]);
        assert!(e.splits());
    }

    #[test]
    fn identity_has_full_multiplicity() {
        let e = rational_eigenstructure(&RationalMatrix::identity(4));
        assert_eq!(e.rational, vec![(rat(1, 1), 4)]);
    }

    #[test]
    fn irrational_part_is_reported() {
        let m = IntMatrix::from_i64(&[&[0, 2], &[1, 0]]).to_rational();
        let e = rational_eigenstructure(&m);
        assert!(e.rational.is_empty());
        assert_eq!(e.irrational_factor, Some(vec![rat(-2, 1), rat(0, 1), rat(1, 1)]));
    }

    #[test]
    fn sturm_counts() {
        // (x - 1/2)(x^2 - 2): roots 1/2, ±1.414..
        let p = Poly::new(vec![rat(1, 1), rat(-2, 1), rat(-1, 2), rat(1, 1)]);
        assert_eq!(p.count_real_roots(&rat(0, 1), &rat(1, 1)), 1);
        assert_eq!(p.count_real_roots(&rat(-2, 1), &rat(2, 1)), 3);
    }
}
