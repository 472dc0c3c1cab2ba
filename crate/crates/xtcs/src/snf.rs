//! Smith and Hermite normal forms over the integers, with transforms.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::matrix::{Int, IntMatrix};

/// `u * a * v = diag(d)` with `u`, `v` unimodular and `d[i] | d[i+1]`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub v: IntMatrix,
    /// Diagonal entries, length `min(rows, cols)`; nonzero ones come first.
    pub d: Vec<Int>,
    pub rank: usize,
}

struct Work {
    a: Vec<Vec<Int>>,
    u: Vec<Vec<Int>>,
    u_inv: Vec<Vec<Int>>,
    v: Vec<Vec<Int>>,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        self.u.swap(i, j);
        for r in self.u_inv.iter_mut() {
            r.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in self.a.iter_mut().chain(self.v.iter_mut()) {
            r.swap(i, j);
        }
    }

    // row dst += k * row src
    fn add_row(&mut self, src: usize, dst: usize, k: &Int) {
        for m in [&mut self.a, &mut self.u] {
            let s = m[src].clone();
            for (x, y) in m[dst].iter_mut().zip(&s) {
                *x += k * y;
            }
        }
        for r in self.u_inv.iter_mut() {
            let t = k * &r[dst];
            r[src] -= t;
        }
    }

    // col dst += k * col src
    fn add_col(&mut self, src: usize, dst: usize, k: &Int) {
        for r in self.a.iter_mut().chain(self.v.iter_mut()) {
            let t = k * &r[src];
            r[dst] += t;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut().chain(self.u[i].iter_mut()) {
            *x = -x.clone();
        }
        for r in self.u_inv.iter_mut() {
            r[i] = -r[i].clone();
        }
    }
}

fn ident(n: usize) -> Vec<Vec<Int>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { Int::one() } else { Int::zero() }).collect()).collect()
}

pub fn smith(a: &IntMatrix) -> Smith {
    let (m, n) = (a.rows(), a.cols());
    let mut w = Work { a: a.to_rows(), u: ident(m), u_inv: ident(m), v: ident(n) };
    let mut t = 0;
    while t < m.min(n) {
        let mut piv: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                let x = &w.a[i][j];
                if !x.is_zero() && piv.is_none_or(|(pi, pj)| x.abs() < w.a[pi][pj].abs()) {
                    piv = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = piv else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            let mut clean = true;
            for i in t + 1..m {
                let q = w.a[i][t].div_floor(&w.a[t][t]);
                if !q.is_zero() {
                    w.add_row(t, i, &-q);
                }
                if !w.a[i][t].is_zero() {
                    w.swap_rows(t, i);
                    clean = false;
                }
            }
            for j in t + 1..n {
                let q = w.a[t][j].div_floor(&w.a[t][t]);
                if !q.is_zero() {
                    w.add_col(t, j, &-q);
                }
                if !w.a[t][j].is_zero() {
                    w.swap_cols(t, j);
                    clean = false;
                }
            }
            if clean {
                // enforce divisibility of the remaining block
                let bad = (t + 1..m)
                    .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                    .find(|&(i, j)| !w.a[i][j].is_multiple_of(&w.a[t][t]));
                match bad {
                    Some((i, _)) => w.add_row(i, t, &Int::one()),
                    None => break,
                }
            }
        }
        if w.a[t][t].is_negative() {
            w.negate_row(t);
        }
        t += 1;
    }
    let d: Vec<Int> = (0..m.min(n)).map(|i| w.a[i][i].clone()).collect();
    let rank = d.iter().filter(|x| !x.is_zero()).count();
    Smith {
        u: IntMatrix::from_rows(w.u),
        u_inv: IntMatrix::from_rows(w.u_inv),
        v: IntMatrix::from_rows(w.v),
        d,
        rank,
    }
}

/// Row-style Hermite normal form of the lattice spanned by `rows`; returns the nonzero rows.
///
/// Pivots are positive and entries above a pivot lie in `[0, pivot)`, so the basis is canonical.
pub fn hermite_rows(rows: &[Vec<Int>], dim: usize) -> Vec<Vec<Int>> {
    let mut a: Vec<Vec<Int>> = rows.to_vec();
    let mut r = 0;
    for c in 0..dim {
        if r == a.len() {
            break;
        }
        loop {
            let nz: Vec<usize> = (r..a.len()).filter(|&i| !a[i][c].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| a[i][c].abs()).unwrap();
            a.swap(r, p);
            let mut done = true;
            for i in r + 1..a.len() {
                if a[i][c].is_zero() {
                    continue;
                }
                let q = a[i][c].div_floor(&a[r][c]);
                let pr = a[r].clone();
                for (x, y) in a[i].iter_mut().zip(&pr) {
                    *x -= &q * y;
                }
                if !a[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if a[r][c].is_zero() {
            continue;
        }
        if a[r][c].is_negative() {
            for x in a[r].iter_mut() {
                *x = -x.clone();
            }
        }
        for i in 0..r {
            let q = a[i][c].div_floor(&a[r][c]);
            if !q.is_zero() {
                let pr = a[r].clone();
                for (x, y) in a[i].iter_mut().zip(&pr) {
                    *x -= &q * y;
                }
            }
        }
        r += 1;
    }
    a.truncate(r);
    a
}

/// Canonical basis of the lattice spanned by integer vectors of length `dim`.
pub fn lattice_basis(gens: &[Vec<Int>], dim: usize) -> Vec<Vec<Int>> {
    hermite_rows(gens, dim)
}

/// Canonical basis of `span_Q(gens) ∩ Z^dim`.
pub fn saturate(gens: &[Vec<Int>], dim: usize) -> Vec<Vec<Int>> {
    if gens.is_empty() {
        return Vec::new();
    }
    let s = smith(&IntMatrix::from_cols(gens, dim));
    let cols: Vec<Vec<Int>> = (0..s.rank).map(|j| s.u_inv.col(j)).collect();
    hermite_rows(&cols, dim)
}

/// Canonical basis of `{x ∈ Z^n : a x = 0}`.
pub fn integer_kernel(a: &IntMatrix) -> Vec<Vec<Int>> {
    let s = smith(a);
    let cols: Vec<Vec<Int>> = (s.rank..a.cols()).map(|j| s.v.col(j)).collect();
    hermite_rows(&cols, a.cols())
}

/// One integer solution of `a x = b`, if any.
pub fn solve_integer(a: &IntMatrix, b: &[Int]) -> Option<Vec<Int>> {
    let s = smith(a);
    let y = s.u.mul_vec(b);
    let mut z = vec![Int::zero(); a.cols()];
    for (i, yi) in y.iter().enumerate() {
        if i < s.rank {
            let (q, r) = yi.div_rem(&s.d[i]);
            if !r.is_zero() {
                return None;
            }
            z[i] = q;
        } else if !yi.is_zero() {
            return None;
        }
    }
    Some(s.v.mul_vec(&z))
}
