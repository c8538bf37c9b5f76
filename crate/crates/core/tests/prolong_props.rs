use crjet_core::prolong::{self, JetSpace, ProlongedSystem, Rhs, SlotPolicy};
use crjet_core::{parse_series, GaussRational, Monomial, Series};
use proptest::prelude::*;

/// `(s∂_s)^p ∂_x^α u` for `u` in variables `(x_1..x_{2n}, s)`.
fn jet_value(u: &Series, alpha: &[u16], p: u32) -> Series {
    let s = alpha.len();
    let mut out = u.clone();
    for (dir, &a) in alpha.iter().enumerate() {
        for _ in 0..a {
            out = out.partial(dir);
        }
    }
    for _ in 0..p {
        out = out.partial(s).shift_var(s, 1);
    }
    out
}

fn values(js: &JetSpace, us: &[Series]) -> Vec<Series> {
    (0..js.num_vars())
        .map(|v| {
            let (i, slot) = js.split_index(v);
            let sl = &js.slots[slot];
            jet_value(&us[i], &sl.alpha, sl.p)
        })
        .collect()
}

fn polynomial(nvars: usize) -> impl Strategy<Value = Series> {
    prop::collection::vec((prop::collection::vec(0u16..=3, nvars), -5i64..=5), 1..6).prop_map(move |terms| {
        Series::from_terms(
            nvars,
            64,
            terms.into_iter().map(|(e, c)| (Monomial::from_slice(&e), GaussRational::from_int(c))),
        )
    })
}

fn jets_and_functions() -> impl Strategy<Value = (usize, u32, bool, Vec<Series>)> {
    (1usize..=2, 0u32..=3, any::<bool>())
        .prop_flat_map(|(n, k, all)| (Just(n), Just(k), Just(all), prop::collection::vec(polynomial(2 * n + 1), 2 * n + 1)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn contact_chain_matches_direct_derivatives((n, k, all, us) in jets_and_functions()) {
        let policy = if all { SlotPolicy::AllTopOrder } else { SlotPolicy::TransverseOnly };
        let js = prolong::contact_prolong_with(n, k, policy);
        let vals = values(&js, &us);
        let s = 2 * n;
        for eq in &js.contact {
            let lhs = vals[eq.lhs].partial(s).shift_var(s, 1);
            let rhs = match eq.rhs {
                Rhs::Var(v) => vals[v].clone(),
                Rhs::XDerivative { var, dir } => vals[var].partial(dir),
            };
            prop_assert_eq!(lhs.terms().collect::<Vec<_>>(), rhs.terms().collect::<Vec<_>>());
        }
    }

    #[test]
    fn system_is_square(n in 1usize..=2, k in 0u32..=4, all in any::<bool>()) {
        let policy = if all { SlotPolicy::AllTopOrder } else { SlotPolicy::TransverseOnly };
        let js = prolong::contact_prolong_with(n, k, policy);
        let mut lhs: Vec<usize> = js.contact.iter().map(|e| e.lhs).chain(js.closure_slots.iter().copied()).collect();
        prop_assert_eq!(lhs.len(), js.num_vars());
        lhs.sort();
        lhs.dedup();
        prop_assert_eq!(lhs.len(), js.num_vars());
    }

    /// `(s∂_s)u = λu + c·s` at every sample gives `u = c/(1 − λ)·s`.
    #[test]
    fn sampled_linear_closure(lam in prop_oneof![Just(2i64), Just(-1), Just(3)], cs in prop::collection::vec(-4i64..=4, 1..4)) {
        let jets = prolong::contact_prolong_with(1, 0, SlotPolicy::AllTopOrder);
        let names = jets.closure_names();
        let order = 5;
        let closure = [format!("{lam}*u1 + s + x1*s"), "0".into(), "0".into()]
            .iter()
            .map(|c| parse_series(c, &names, order))
            .collect::<Result<Vec<_>, _>>()
            .unwrap();
        let samples: Vec<Vec<GaussRational>> = cs.iter().map(|&c| vec![GaussRational::from_int(c), GaussRational::zero()]).collect();
        let ps = ProlongedSystem { jets, closure, center: Default::default(), samples, order: order as u32 };
        let sols = prolong::assemble_and_solve(&ps).unwrap();
        prop_assert_eq!(sols.len(), cs.len());
        for (sol, &c) in sols.iter().zip(&cs) {
            prop_assert!(sol.residual_zero);
            let want = GaussRational::ratio(1 + c, 1 - lam);
            prop_assert_eq!(sol.solution.coeff(1, 0)[0].clone(), want);
            for kk in 2..=order as u32 {
                prop_assert!(sol.solution.coeff(kk, 0)[0].is_zero());
            }
        }
    }
}
