//! Jet variables `u_i^{α,p} = (s∂_s)^p ∂_x^α u_i`, their contact equations,
//! and assembly of the singular system `(s∂_s)U = R(U)` at frozen base points.

use std::collections::BTreeMap;

use crate::bb::{self, BBSystem, FormalLogSolution};
use crate::coeff::GaussRational;
use crate::error::{Error, Result};
use crate::hypersurface::monomials_up_to;
use crate::literal::VarNames;
use crate::series::Series;

/// A derivative slot `(α, p)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Slot {
    pub alpha: Vec<u16>,
    pub p: u32,
}

impl Slot {
    pub fn order(&self) -> u32 {
        self.alpha.iter().map(|&a| a as u32).sum::<u32>() + self.p
    }
}

/// Which top-order slots receive a supplied closure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SlotPolicy {
    /// Only `(0, k)` is closed; the other top-order slots are tied to lower
    /// slots through an `x`-derivative.
    #[default]
    TransverseOnly,
    /// Every slot with `|α| + p = k` is closed.
    AllTopOrder,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rhs {
    Var(usize),
    /// `∂_{x_dir}` of another jet variable.
    XDerivative { var: usize, dir: usize },
}

/// `(s∂_s) lhs = rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContactEquation {
    pub lhs: usize,
    pub rhs: Rhs,
}

#[derive(Clone, Debug)]
pub struct JetSpace {
    pub n: usize,
    pub order: u32,
    pub policy: SlotPolicy,
    pub slots: Vec<Slot>,
    pub contact: Vec<ContactEquation>,
    /// Variables whose `(s∂_s)` is supplied by the closure.
    pub closure_slots: Vec<usize>,
}

impl JetSpace {
    pub fn base_dim(&self) -> usize {
        2 * self.n
    }

    pub fn fiber_dim(&self) -> usize {
        2 * self.n + 1
    }

    pub fn num_vars(&self) -> usize {
        self.slots.len() * self.fiber_dim()
    }

    /// Variables are ordered by slot, then component.
    pub fn index(&self, component: usize, slot: usize) -> usize {
        slot * self.fiber_dim() + component
    }

    pub fn split_index(&self, var: usize) -> (usize, usize) {
        (var % self.fiber_dim(), var / self.fiber_dim())
    }

    pub fn slot_index(&self, slot: &Slot) -> Option<usize> {
        self.slots.iter().position(|s| s == slot)
    }

    /// `u{i}_{α_1}_…_{α_2n}_{p}`, components counted from 1.
    pub fn var_name(&self, var: usize) -> String {
        let (i, slot) = self.split_index(var);
        let s = &self.slots[slot];
        let mut out = format!("u{}", i + 1);
        for a in &s.alpha {
            out.push_str(&format!("_{a}"));
        }
        out.push_str(&format!("_{}", s.p));
        out
    }

    /// Closure variable layout: `s`, the jet variables, then `x1..x2n`.
    /// `u{i}` abbreviates the order-zero slot.
    pub fn closure_names(&self) -> VarNames {
        let mut names = vec!["s".to_string()];
        names.extend((0..self.num_vars()).map(|v| self.var_name(v)));
        names.extend((1..=self.base_dim()).map(|j| format!("x{j}")));
        let mut vn = VarNames::new(names);
        for i in 0..self.fiber_dim() {
            vn = vn.with_alias(&format!("u{}", i + 1), 1 + self.index(i, 0));
        }
        vn
    }

    pub fn base_names(&self) -> VarNames {
        VarNames::new((1..=self.base_dim()).map(|j| format!("x{j}")).collect())
    }
}

pub fn contact_prolong(n: usize, k: u32) -> JetSpace {
    contact_prolong_with(n, k, SlotPolicy::default())
}

pub fn contact_prolong_with(n: usize, k: u32, policy: SlotPolicy) -> JetSpace {
    let base = 2 * n;
    let slots: Vec<Slot> = monomials_up_to(base + 1, k)
        .into_iter()
        .map(|e| Slot { alpha: e[..base].to_vec(), p: e[base] as u32 })
        .collect();
    let mut js = JetSpace { n, order: k, policy, slots, contact: Vec::new(), closure_slots: Vec::new() };
    let fiber = js.fiber_dim();
    for (si, slot) in js.slots.iter().enumerate() {
        let up = Slot { alpha: slot.alpha.clone(), p: slot.p + 1 };
        for i in 0..fiber {
            let lhs = si * fiber + i;
            if slot.order() < k {
                let target = js.slots.iter().position(|s| *s == up).expect("slot below top order");
                js.contact.push(ContactEquation { lhs, rhs: Rhs::Var(target * fiber + i) });
                continue;
            }
            let dir = slot.alpha.iter().position(|&a| a > 0);
            match (policy, dir) {
                (SlotPolicy::TransverseOnly, Some(dir)) => {
                    let mut alpha = slot.alpha.clone();
                    alpha[dir] -= 1;
                    let lower = Slot { alpha, p: slot.p + 1 };
                    let target = js.slots.iter().position(|s| *s == lower).expect("lower slot");
                    js.contact.push(ContactEquation { lhs, rhs: Rhs::XDerivative { var: target * fiber + i, dir } });
                }
                _ => js.closure_slots.push(lhs),
            }
        }
    }
    js
}

#[derive(Clone, Debug)]
pub struct ProlongedSystem {
    pub jets: JetSpace,
    /// Indexed like `jets.closure_slots`; variables laid out as
    /// [`JetSpace::closure_names`].
    pub closure: Vec<Series>,
    /// Values of `U(x, 0)` as series in `x`, one per jet variable; missing
    /// entries are zero.
    pub center: BTreeMap<usize, Series>,
    pub samples: Vec<Vec<GaussRational>>,
    pub order: u32,
}

#[derive(Clone, Debug)]
pub struct SampleSolution {
    pub x: Vec<GaussRational>,
    pub center: Vec<GaussRational>,
    /// Deviation `U − U(x, 0)` in the jet variable order.
    pub solution: FormalLogSolution,
    pub coefficient_norms: Vec<(u32, f64)>,
    pub residual_zero: bool,
}

impl ProlongedSystem {
    /// The frozen, centered system at one base point.
    pub fn frozen(&self, x: &[GaussRational]) -> Result<(BBSystem, Vec<GaussRational>)> {
        let js = &self.jets;
        let nv = js.num_vars();
        let base = js.base_dim();
        if x.len() != base {
            return Err(Error::Arity(format!("sample has {} coordinates, expected {base}", x.len())));
        }
        if let Some(eq) = js.contact.iter().find(|e| matches!(e.rhs, Rhs::XDerivative { .. })) {
            return Err(Error::NotClosed(format!(
                "{} is tied to an x-derivative; use the all-top-order slot policy",
                js.var_name(eq.lhs)
            )));
        }
        if self.closure.len() != js.closure_slots.len() {
            return Err(Error::NotClosed(format!(
                "{} closure series for {} slots",
                self.closure.len(),
                js.closure_slots.len()
            )));
        }
        let center: Vec<GaussRational> = (0..nv)
            .map(|v| match self.center.get(&v) {
                Some(c) => x
                    .iter()
                    .enumerate()
                    .fold(c.clone(), |acc, (j, v)| acc.specialize_exact(j, v, c.trunc()))
                    .constant_term(),
                None => GaussRational::zero(),
            })
            .collect();
        let trunc = self.order as i32;
        let mut f = vec![Series::zero(nv + 1, trunc); nv];
        for eq in &js.contact {
            if let Rhs::Var(v) = eq.rhs {
                // (s∂_s)(U0 + Y) = U0_v + Y_v
                f[eq.lhs] = &Series::var(nv + 1, v + 1, trunc) + &Series::constant(nv + 1, trunc, center[v].clone());
            }
        }
        for (slot, r) in js.closure_slots.iter().zip(&self.closure) {
            let mut shifts = vec![GaussRational::zero()];
            shifts.extend(center.iter().cloned());
            f[*slot] = freeze_x(r, x, 1 + nv).translate_exact(&shifts);
        }
        for (v, fv) in f.iter().enumerate() {
            let c = fv.constant_term();
            if !c.is_zero() {
                return Err(Error::Centering(format!(
                    "right-hand side of {} is {} at s = 0, U = U(x, 0)",
                    js.var_name(v),
                    c
                )));
            }
        }
        Ok((BBSystem::new(f, self.order)?, center))
    }
}

/// Substitute `x = sample` into the trailing variables starting at `from`,
/// dropping them.
fn freeze_x(r: &Series, x: &[GaussRational], from: usize) -> Series {
    let mut out = r.clone();
    for (j, v) in x.iter().enumerate() {
        out = out.specialize_exact(from + j, v, r.trunc());
    }
    let map: Vec<usize> = (0..r.nvars()).map(|v| if v < from { v } else { 0 }).collect();
    out.remap(from, &map)
}

pub fn assemble_and_solve(ps: &ProlongedSystem) -> Result<Vec<SampleSolution>> {
    ps.samples
        .iter()
        .map(|x| {
            let (sys, center) = ps.frozen(x)?;
            let solution = bb::formal_solve(&sys)?;
            let residual_zero = sys.residual(&solution).is_empty();
            let coefficient_norms = solution.coefficient_norms();
            Ok(SampleSolution { x: x.clone(), center, solution, coefficient_norms, residual_zero })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::literal::parse_series;

    #[test]
    fn counts() {
        let js = contact_prolong(1, 3);
        assert_eq!(js.slots.len(), 20);
        assert_eq!(js.num_vars(), 60);
        assert_eq!(js.contact.len(), 57);
        assert_eq!(js.closure_slots.len(), 3);
        let all = contact_prolong_with(1, 3, SlotPolicy::AllTopOrder);
        assert_eq!(all.contact.len(), 30);
        assert_eq!(all.closure_slots.len(), 30);
        let js = contact_prolong(1, 1);
        assert_eq!(js.num_vars(), 12);
        assert_eq!(js.var_name(js.index(0, 0)), "u1_0_0_0");
        let k0 = contact_prolong(2, 0);
        assert!(k0.contact.is_empty());
        assert_eq!(k0.num_vars(), 5);
    }

    #[test]
    fn order_one_contact() {
        let js = contact_prolong(1, 1);
        // u_i^{0,0} → u_i^{0,1}
        let up = js.slot_index(&Slot { alpha: vec![0, 0], p: 1 }).unwrap();
        for i in 0..3 {
            assert!(js.contact.contains(&ContactEquation { lhs: js.index(i, 0), rhs: Rhs::Var(js.index(i, up)) }));
        }
    }

    fn toy(closure: &[&str], samples: Vec<Vec<GaussRational>>) -> ProlongedSystem {
        let jets = contact_prolong_with(1, 0, SlotPolicy::AllTopOrder);
        let names = jets.closure_names();
        let closure = closure.iter().map(|c| parse_series(c, &names, 6).unwrap()).collect();
        ProlongedSystem { jets, closure, center: BTreeMap::new(), samples, order: 6 }
    }

    #[test]
    fn toy_closure() {
        let zero = GaussRational::zero();
        let ps = toy(&["2*u1 + s", "0", "0"], vec![vec![zero.clone(), zero]]);
        let out = assemble_and_solve(&ps).unwrap();
        assert_eq!(out.len(), 1);
        let sol = &out[0].solution;
        assert!(out[0].residual_zero);
        assert_eq!(sol.coeffs.len(), 1);
        assert_eq!(sol.coeff(1, 0)[0], GaussRational::from_int(-1));
    }

    #[test]
    fn sample_dependent() {
        let q = |a| GaussRational::from_int(a);
        let ps = toy(&["2*u1 + x1*s", "0", "x2*u2"], vec![vec![q(1), q(0)], vec![q(3), q(5)]]);
        let out = assemble_and_solve(&ps).unwrap();
        assert_eq!(out[0].solution.coeff(1, 0)[0], q(-1));
        assert_eq!(out[1].solution.coeff(1, 0)[0], q(-3));
    }

    #[test]
    fn centering() {
        let jets = contact_prolong_with(1, 0, SlotPolicy::AllTopOrder);
        let names = jets.closure_names();
        let closure: Vec<Series> =
            ["u1 - 1", "0", "0"].iter().map(|c| parse_series(c, &names, 6).unwrap()).collect();
        let zero = vec![GaussRational::zero(); 2];
        let mut ps = ProlongedSystem { jets, closure, center: BTreeMap::new(), samples: vec![zero], order: 6 };
        assert!(matches!(assemble_and_solve(&ps), Err(Error::Centering(_))));
        ps.center.insert(0, parse_series("1", &ps.jets.base_names(), 6).unwrap());
        let out = assemble_and_solve(&ps).unwrap();
        assert!(out[0].solution.coeffs.is_empty());
        assert!(out[0].center[0].is_one());
    }

    #[test]
    fn transverse_policy_is_not_closed() {
        let jets = contact_prolong(1, 1);
        let names = jets.closure_names();
        let closure = (0..3).map(|_| parse_series("0", &names, 4).unwrap()).collect();
        let ps = ProlongedSystem {
            jets,
            closure,
            center: BTreeMap::new(),
            samples: vec![vec![GaussRational::zero(); 2]],
            order: 4,
        };
        assert!(matches!(assemble_and_solve(&ps), Err(Error::NotClosed(_))));
    }
}
