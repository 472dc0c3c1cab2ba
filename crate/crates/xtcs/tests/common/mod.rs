//! Brute-force oracles shared by the property tests and the acceptance run.
#![allow(dead_code)]

pub fn det(a: &[Vec<i64>]) -> i64 {
    match a.len() {
        0 => 1,
        1 => a[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> =
                    a[1..].iter().map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect()).collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * a[0][j] * det(&minor)
            })
            .sum(),
    }
}

pub fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    (0..n)
        .flat_map(|last| {
            subsets(last, k - 1).into_iter().map(move |mut s| {
                s.push(last);
                s
            })
        })
        .collect()
}

/// Rank and invariant factors from gcds of minors.
pub fn determinantal(a: &[Vec<i64>]) -> (usize, Vec<i64>) {
    let (n, m) = (a.len(), a[0].len());
    let mut divisors = vec![1i64];
    for k in 1..=n.min(m) {
        let mut g = 0;
        for rs in subsets(n, k) {
            for cs in subsets(m, k) {
                let minor: Vec<Vec<i64>> = rs.iter().map(|&i| cs.iter().map(|&j| a[i][j]).collect()).collect();
                g = gcd(g, det(&minor));
            }
        }
        if g == 0 {
            break;
        }
        divisors.push(g);
    }
    let rank = divisors.len() - 1;
    let factors = divisors.windows(2).map(|w| w[1] / w[0]).filter(|&d| d != 1).collect();
    (rank, factors)
}

pub fn adjugate(a: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    if n == 1 {
        return vec![vec![1]];
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let minor: Vec<Vec<i64>> = a
                        .iter()
                        .enumerate()
                        .filter(|&(r, _)| r != j)
                        .map(|(_, row)| row.iter().enumerate().filter(|&(c, _)| c != i).map(|(_, &x)| x).collect())
                        .collect();
                    if (i + j) % 2 == 0 { det(&minor) } else { -det(&minor) }
                })
                .collect()
        })
        .collect()
}

/// Elements of `Z^n / A Z^n` enumerated from the unit vectors; `adj(A) x mod det` identifies the class of `x`.
pub fn enumerate_quotient(a: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    let d = det(a).abs();
    let adj = adjugate(a);
    let key = |x: &[i64]| -> Vec<i64> { adj.iter().map(|r| r.iter().zip(x).map(|(p, q)| p * q).sum::<i64>().rem_euclid(d)).collect() };
    let mut seen = std::collections::BTreeSet::new();
    let mut frontier = vec![vec![0i64; n]];
    seen.insert(key(&frontier[0]));
    while let Some(x) = frontier.pop() {
        for i in 0..n {
            let mut y = x.clone();
            y[i] += 1;
            if seen.insert(key(&y)) {
                frontier.push(y);
            }
        }
    }
    seen.into_iter().collect()
}

/// Whether `x` lies in `A Z^n` for square nonsingular `A`.
pub fn in_image(a: &[Vec<i64>], x: &[i64]) -> bool {
    let d = det(a).abs();
    adjugate(a).iter().all(|r| r.iter().zip(x).map(|(p, q)| p * q).sum::<i64>().rem_euclid(d) == 0)
}

/// Index of `{x : G x = 0 mod 2}` in `Z^n`, by enumerating `{0, 1}^n`.
pub fn even_kernel_index(g: &[Vec<i64>]) -> i64 {
    let n = g.len();
    let solutions = (0u32..1 << n)
        .filter(|mask| g.iter().all(|row| (0..n).filter(|&j| mask >> j & 1 == 1).map(|j| row[j]).sum::<i64>() % 2 == 0))
        .count() as i64;
    (1i64 << n) / solutions
}

/// Number of elements `x` with `k x = 0`, for each `k` up to the group order, from an element list.
pub fn torsion_counts(elems: &[Vec<i64>], d: i64) -> Vec<i64> {
    (1..=d).map(|k| elems.iter().filter(|x| x.iter().all(|v| (v * k) % d == 0)).count() as i64).collect()
}

/// The same counts from invariant factors.
pub fn torsion_counts_of(factors: &[i64], d: i64) -> Vec<i64> {
    (1..=d).map(|k| factors.iter().map(|&f| gcd(f, k)).product()).collect()
}
