use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;

use xtcs::catalog::Catalog;
use xtcs::lattice::{cokernel_presentation, discriminant_form, even_dual_kernel, index_of, signature, GramLattice};
use xtcs::matrix::{Int, IntMatrix};

mod common;
use common::*;

fn to_i64(v: &[Int]) -> Vec<i64> {
    v.iter().map(|x| x.to_i64().unwrap()).collect()
}

fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=3, 1usize..=3).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-6i64..=6, c), r))
}

fn even_gram() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=4).prop_flat_map(|n| {
        (prop::collection::vec(-4i64..=4, n), prop::collection::vec(-3i64..=3, n * (n - 1) / 2)).prop_map(move |(d, off)| {
            let mut g = vec![vec![0; n]; n];
            let mut k = 0;
            for i in 0..n {
                g[i][i] = 2 * d[i];
                for j in i + 1..n {
                    g[i][j] = off[k];
                    g[j][i] = off[k];
                    k += 1;
                }
            }
            g
        })
    })
}

fn unimodular(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec((0..n, 0..n, -2i64..=2, any::<bool>()), 0..8).prop_map(move |ops| {
        let mut u: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        for (i, j, c, neg) in ops {
            if i != j {
                let src = u[j].clone();
                for (x, y) in u[i].iter_mut().zip(&src) {
                    *x += c * y;
                }
            } else if neg {
                u[i].iter_mut().for_each(|x| *x = -*x);
            }
        }
        u
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cokernel_matches_minors(a in small_matrix()) {
        let c = cokernel_presentation(&IntMatrix::from_vecs(&a));
        let (rank, factors) = determinantal(&a);
        prop_assert_eq!(c.group.free_rank, a.len() - rank);
        prop_assert_eq!(to_i64(&c.group.invariant_factors), factors);
    }

    #[test]
    fn cokernel_matches_enumeration(a in (1usize..=3).prop_flat_map(|n| prop::collection::vec(prop::collection::vec(-6i64..=6, n), n))) {
        let d = det(&a).abs();
        prop_assume!(d != 0 && d <= 200);
        let c = cokernel_presentation(&IntMatrix::from_vecs(&a));
        prop_assert_eq!(c.group.free_rank, 0);
        let elems = enumerate_quotient(&a);
        prop_assert_eq!(elems.len() as i64, d);
        // the k-torsion counts pin down a finite abelian group
        let factors: Vec<i64> = c.group.invariant_factors.iter().map(|f| f.to_i64().unwrap()).collect();
        prop_assert_eq!(torsion_counts(&elems, d), torsion_counts_of(&factors, d));
        // projections of the unit vectors have the orders they have in the quotient
        for i in 0..a.len() {
            let mut e = vec![Int::zero(); a.len()];
            e[i] = Int::from(1);
            let order = (1..=d).find(|&k| {
                let mut x = vec![0i64; a.len()];
                x[i] = k;
                in_image(&a, &x)
            }).unwrap();
            let (m, _) = c.preimage(&e).unwrap();
            prop_assert_eq!(m.to_i64().unwrap(), order);
        }
    }

    #[test]
    fn discriminant_order_is_det(g in even_gram()) {
        let d = det(&g);
        prop_assume!(d != 0);
        let lat = GramLattice::new(IntMatrix::from_vecs(&g)).unwrap();
        let form = discriminant_form(&lat).unwrap();
        prop_assert_eq!(form.order().to_i64().unwrap(), d.abs());
        // b(x, x) has denominator dividing the order of x
        for i in 0..form.group.invariant_factors.len() {
            let v = form.pairing.get(i, i);
            let order = &form.group.invariant_factors[i];
            prop_assert!((v * xtcs::matrix::rat_from_int(order)).is_integer());
        }
    }

    #[test]
    fn signature_is_a_congruence_invariant((g, u) in even_gram().prop_flat_map(|g| { let n = g.len(); (Just(g), unimodular(n)) })) {
        let n = g.len();
        prop_assert_eq!(det(&u).abs(), 1);
        let gm = IntMatrix::from_vecs(&g);
        let um = IntMatrix::from_vecs(&u);
        let h = um.transpose().mul(&gm).mul(&um);
        let (s, t) = (signature(&gm.to_rational()), signature(&h.to_rational()));
        prop_assert_eq!(s, t);
        prop_assert_eq!(s.pos + s.neg + s.zero, n);
        prop_assert_eq!(s.zero, n - gm.to_rational().rank());
    }

    #[test]
    fn even_dual_kernel_index(g in even_gram()) {
        let n = g.len();
        let lat = GramLattice::new(IntMatrix::from_vecs(&g)).unwrap();
        let basis = even_dual_kernel(&lat);
        prop_assert_eq!(basis.len(), n);
        for v in &basis {
            for row in &g {
                let s: i64 = row.iter().zip(to_i64(v)).map(|(a, b)| a * b).sum();
                prop_assert!(s % 2 == 0);
            }
        }
        prop_assert_eq!(index_of(&basis).to_i64().unwrap(), even_kernel_index(&g));
    }
}

#[test]
fn shipped_catalog_round_trips() {
    let cat = Catalog::shipped();
    let again = Catalog::parse(&cat.to_toml()).unwrap();
    assert_eq!(cat.blocks(), again.blocks());
}

#[test]
fn reports_satisfy_parity() {
    let cat = Catalog::shipped();
    let mut seen = 0;
    for m in xtcs::search::rank1_pi4_search(&cat).unwrap().matches.iter().chain(&xtcs::search::rank1_pi6_search(&cat).unwrap().matches) {
        let r = &m.report;
        assert_eq!((r.nu_bar + 24 - 1 - r.b2 as i64 - r.b3).rem_euclid(2), 0, "{} x {}", r.plus_id, r.minus_id);
        seen += 1;
    }
    assert_eq!(seen, 31);
}
