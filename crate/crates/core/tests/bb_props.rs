use crjet_core::bb::{self, BBSystem};
use crjet_core::linalg::{self, Matrix};
use crjet_core::{GaussRational, Monomial, Series};
use proptest::prelude::*;

/// Slot 0 is `t`, slots `1..=n` are `y`.
fn linear_system(a: &Matrix, extra: &[Series], order: u32) -> BBSystem {
    let n = a.len();
    let nv = n + 1;
    let trunc = order as i32;
    let f = (0..n)
        .map(|j| {
            let mut acc = extra.get(j).cloned().unwrap_or_else(|| Series::zero(nv, trunc));
            for k in 0..n {
                acc = &acc + &Series::var(nv, k + 1, trunc).scale(&a[j][k]);
            }
            acc
        })
        .collect();
    BBSystem::new(f, order).unwrap()
}

fn int_matrix(n: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(prop::collection::vec(-3i64..=3, n), n)
        .prop_map(|rows| rows.into_iter().map(|r| r.into_iter().map(GaussRational::from_int).collect()).collect())
}

fn invertible(n: usize) -> impl Strategy<Value = Matrix> {
    int_matrix(n).prop_filter("invertible", |p| !linalg::det(p).is_zero())
}

/// Nonlinear terms of total degree ≥ 2 or pure `t` forcing.
fn forcing(n: usize, order: u32) -> impl Strategy<Value = Vec<Series>> {
    let nv = n + 1;
    let term = (prop::collection::vec(0u16..=2, nv), -2i64..=2, 1i64..=2);
    prop::collection::vec(prop::collection::vec(term, 0..4), n).prop_map(move |fs| {
        fs.into_iter()
            .map(|terms| {
                let keep = terms.into_iter().filter(|(e, ..)| {
                    let deg: u16 = e.iter().sum();
                    let ydeg: u16 = e[1..].iter().sum();
                    deg >= 2 || (ydeg == 0 && deg >= 1)
                });
                Series::from_terms(
                    nv,
                    order as i32,
                    keep.map(|(e, a, d)| (Monomial::from_slice(&e), GaussRational::ratio(a, d))),
                )
            })
            .collect()
    })
}

/// Diagonal entries that are never positive integers.
fn non_resonant_diag(n: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(prop_oneof![Just((1, 2)), Just((-1, 1)), Just((-3, 2)), Just((5, 3)), Just((0, 1))], n)
        .prop_map(move |ls| {
            let mut a = linalg::zeros(n, n);
            for (j, (p, q)) in ls.into_iter().enumerate() {
                a[j][j] = GaussRational::ratio(p, q);
            }
            a
        })
}

fn system_size() -> impl Strategy<Value = usize> {
    1usize..=2
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dulac_count_is_similarity_invariant((a, p) in system_size().prop_flat_map(|n| (int_matrix(n), invertible(n)))) {
        let pinv = linalg::inverse(&p).unwrap();
        let b = linalg::mat_mul(&linalg::mat_mul(&p, &a), &pinv);
        let da = bb::dulac_classify(&bb::linear_part(&linear_system(&a, &[], 3)));
        let db = bb::dulac_classify(&bb::linear_part(&linear_system(&b, &[], 3)));
        prop_assert_eq!(da, db);
    }

    #[test]
    fn non_resonant_solution_is_unique_and_stable((a, g) in system_size().prop_flat_map(|n| (non_resonant_diag(n), forcing(n, 8)))) {
        let sys = linear_system(&a, &g, 6);
        let sol = bb::formal_solve(&sys).unwrap();
        prop_assert_eq!(sol.family_dim, 0);
        prop_assert!(sol.resonances.is_empty());
        prop_assert!(!sol.has_logs());
        prop_assert!(sys.residual(&sol).is_empty());
        let longer = bb::formal_solve(&linear_system(&a, &g, 8)).unwrap();
        for k in 0..=6 {
            prop_assert_eq!(sol.coeff(k, 0), longer.coeff(k, 0));
        }
    }

    #[test]
    fn scaling_y_scales_the_solution(
        (a, g) in system_size().prop_flat_map(|n| (non_resonant_diag(n), forcing(n, 6))),
        num in prop_oneof![Just(2i64), Just(-3), Just(1)],
        den in 1i64..=3,
    ) {
        let c = GaussRational::ratio(num, den);
        let cinv = c.inv().unwrap();
        let sys = linear_system(&a, &g, 6);
        let n = sys.n;
        let nv = n + 1;
        let mut imgs = vec![Series::var(nv, 0, 6)];
        imgs.extend((1..nv).map(|j| Series::var(nv, j, 6).scale(&cinv)));
        let f2 = sys.f.iter().map(|fj| fj.substitute(&imgs).unwrap().scale(&c)).collect();
        let scaled = BBSystem::new(f2, 6).unwrap();
        let s1 = bb::formal_solve(&sys).unwrap();
        let s2 = bb::formal_solve(&scaled).unwrap();
        for k in 0..=6 {
            let want: Vec<GaussRational> = s1.coeff(k, 0).iter().map(|x| x * &c).collect();
            prop_assert_eq!(s2.coeff(k, 0), want);
        }
    }

    #[test]
    fn resonant_solutions_satisfy_the_system(g in forcing(1, 6), lam in 1i64..=3) {
        let a = vec![vec![GaussRational::from_int(lam)]];
        let sys = linear_system(&a, &g, 6);
        let sol = bb::formal_solve(&sys).unwrap();
        prop_assert!(sys.residual(&sol).is_empty());
        prop_assert_eq!(sol.family_dim, 1);
    }
}

#[test]
fn rotation_has_no_nonpositive_real_eigenvalues() {
    let a = vec![
        vec![GaussRational::zero(), GaussRational::from_int(-1)],
        vec![GaussRational::one(), GaussRational::zero()],
    ];
    let d = bb::dulac_classify(&bb::linear_part(&linear_system(&a, &[], 2)));
    assert_eq!((d.p, d.nonpositive_real), (2, 0));
}
