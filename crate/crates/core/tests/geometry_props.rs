use crjet_core::corpus;
use crjet_core::crmap::HoloMap;
use crjet_core::frame::Frame;
use crjet_core::hypersurface::Hypersurface;
use crjet_core::levi::LeviData;
use crjet_core::report;
use crjet_core::{CrSpace, GaussRational, Monomial, Series};
use proptest::prelude::*;

const TRUNC: i32 = 8;

/// `s^k z^α c^β` with `α, β ≠ 0`, as raw exponent data.
fn mixed_term(n: usize) -> impl Strategy<Value = (Vec<u16>, Vec<u16>, u16, i64, i64)> {
    (
        prop::collection::vec(0u16..=2, n),
        prop::collection::vec(0u16..=2, n),
        1u16..=2,
        -3i64..=3,
        -2i64..=2,
    )
        .prop_filter("mixed", |(a, b, ..)| a.iter().any(|&x| x > 0) && b.iter().any(|&x| x > 0))
}

/// A real normal `φ` containing `s·|z|²`, so the Levi form is nondegenerate
/// at first order.
fn normal_hypersurface(n: usize) -> impl Strategy<Value = Hypersurface> {
    prop::collection::vec(mixed_term(n), 0..4).prop_map(move |terms| {
        let sp = CrSpace::new(n);
        let nv = sp.nvars();
        let mut a = Series::zero(nv, TRUNC);
        for (al, be, k, re, im) in terms {
            let mut e = vec![0u16; nv];
            e[..n].copy_from_slice(&al);
            e[n..2 * n].copy_from_slice(&be);
            e[2 * n] = k;
            let c = &GaussRational::from_int(re) + &(&GaussRational::from_int(im) * &GaussRational::i());
            a = &a + &Series::monomial(Monomial::from_slice(&e), c, TRUNC);
        }
        let mut phi = &a + &a.conjugate().unwrap();
        for j in 0..n {
            phi = &phi + &(&(&sp.var(sp.z(j), TRUNC) * &sp.var(sp.c(j), TRUNC)) * &sp.var(sp.s(), TRUNC));
        }
        Hypersurface::new(n, TRUNC, phi).unwrap()
    })
}

/// `(a + bi)/d`.
fn gauss(a: i64, b: i64, d: i64) -> GaussRational {
    &GaussRational::ratio(a, d) + &(&GaussRational::ratio(b, d) * &GaussRational::i())
}

fn unitary(n: usize) -> impl Strategy<Value = Vec<Vec<GaussRational>>> {
    let phases = || {
        prop_oneof![
            Just(GaussRational::one()),
            Just(GaussRational::i()),
            Just(-&GaussRational::one()),
            Just(gauss(3, 4, 5)),
            Just(gauss(5, -12, 13)),
        ]
    };
    (prop::collection::vec(phases(), n), any::<bool>()).prop_map(move |(ph, rotate)| {
        let mut u = vec![vec![GaussRational::zero(); n]; n];
        for j in 0..n {
            u[j][j] = ph[j].clone();
        }
        if n == 2 && rotate {
            // Real rotation with cos = 3/5, sin = 4/5, then the phases.
            let (c, s) = (GaussRational::ratio(3, 5), GaussRational::ratio(4, 5));
            let r = [[c.clone(), -&s], [s, c]];
            u = (0..2).map(|i| (0..2).map(|j| &ph[i] * &r[i][j]).collect()).collect();
        }
        u
    })
}

/// `φ(Uz, Ū c, s)`.
fn rotate(hs: &Hypersurface, u: &[Vec<GaussRational>]) -> Hypersurface {
    let n = hs.n;
    let sp = hs.space();
    let mut imgs = Vec::new();
    for a in 0..n {
        let mut acc = sp.zero(TRUNC);
        for b in 0..n {
            acc = &acc + &sp.var(sp.z(b), TRUNC).scale(&u[a][b]);
        }
        imgs.push(acc);
    }
    for a in 0..n {
        let mut acc = sp.zero(TRUNC);
        for b in 0..n {
            acc = &acc + &sp.var(sp.c(b), TRUNC).scale(&u[a][b].conj());
        }
        imgs.push(acc);
    }
    imgs.push(sp.var(sp.s(), TRUNC));
    Hypersurface::new(n, TRUNC, hs.phi.substitute(&imgs).unwrap()).unwrap()
}

fn hypersurface_and_unitary() -> impl Strategy<Value = (Hypersurface, Vec<Vec<GaussRational>>)> {
    (1usize..=2).prop_flat_map(|n| (normal_hypersurface(n), unitary(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn invariants_are_unitarily_invariant((hs, u) in hypersurface_and_unitary()) {
        let moved = rotate(&hs, &u);
        prop_assert!(moved.phi.is_real().unwrap());
        let a = report::analyze(&hs);
        let b = report::analyze(&moved);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(a.m, b.m);
                prop_assert_eq!(a.r, b.r);
                prop_assert_eq!(a.ell(), b.ell());
                prop_assert_eq!(a.filtration_ranks(), b.filtration_ranks());
                prop_assert_eq!(a.type_two(), b.type_two());
            }
            (Err(x), Err(y)) => prop_assert_eq!(x.kind(), y.kind()),
            (x, y) => prop_assert!(false, "{:?} vs {:?}", x.map(|r| r.m), y.map(|r| r.m)),
        }
    }

    #[test]
    fn frame_and_coframe_are_dual(hs in (1usize..=2).prop_flat_map(normal_hypersurface)) {
        let frame = Frame::build(&hs).unwrap();
        prop_assert!(frame.duality_defects().is_empty());
    }

    #[test]
    fn levi_recursion_holds(hs in (1usize..=2).prop_flat_map(normal_hypersurface)) {
        let frame = Frame::build(&hs).unwrap();
        let ld = LeviData::compute(&frame, 3);
        for (w, d, res) in ld.recursion_residuals(&frame) {
            prop_assert!(res.is_zero(), "word {:?}, D = {}: {}", w, d, res);
        }
    }

    #[test]
    fn levi_matrix_is_divisible_by_s(hs in (1usize..=2).prop_flat_map(normal_hypersurface)) {
        let rep = report::analyze(&hs).unwrap();
        prop_assert_eq!(rep.m, Some(1));
        prop_assert_eq!(rep.leading_term_ok, Some(true));
    }
}

fn power_map_between(src: u32, k: u32, trunc: i32) -> HoloMap {
    let source = if src == 1 { corpus::m0(trunc) } else { corpus::power_target(src, trunc).unwrap() };
    let target = corpus::power_target(src * k, trunc).unwrap();
    corpus::holo_map(&source, &target, &["z1", &format!("w^{k}")]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn composition_is_functorial(a in 1u32..=2, b in 1u32..=2) {
        let trunc = 10;
        let inner = power_map_between(1, a, trunc);
        let outer = power_map_between(a, b, trunc);
        let comp = outer.compose(&inner).unwrap();
        let direct = power_map_between(1, a * b, trunc);
        let d = comp.components[1].trunc().min(direct.components[1].trunc());
        prop_assert!(comp.components[1].agrees_through(&direct.components[1], d));
        prop_assert!(comp.maps_into().unwrap().is_zero());
        let xi_in = inner.frame_data().unwrap().xi;
        let xi_out = outer.frame_data().unwrap().xi;
        let xi_comp = comp.frame_data().unwrap().xi;
        let t = xi_comp.trunc().min(xi_in.trunc()).min(xi_out.trunc());
        prop_assert!(t >= 0);
        prop_assert!(xi_comp.agrees_through(&(&xi_in * &xi_out), t));
        prop_assert_eq!(xi_comp.constant_term(), GaussRational::from_int((a * b) as i64));
    }
}
