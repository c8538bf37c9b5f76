//! Holomorphic maps between hypersurfaces in normal form: restriction to the
//! source, target containment, the pushforward data `(γ, η, ξ)`, and exact
//! residuals of the transformation identities they satisfy.
//!
//! For a source frame `(L_A, L_Ā, S = s^m T)` and target frame
//! `(L̂_A, L̂_Ā, Ŝ = ŝ^{m̂} T̂)`:
//!
//! ```text
//! f_* L_B = γ^A_B L̂_A
//! f_* S   = η^A L̂_A + conj(η^A) L̂_Ā + ξ Ŝ
//! ```
//!
//! with `γ^A_B = L_B ẑ_A` and `η^A = S ẑ_A`.

use crate::coeff::GaussRational;
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::hypersurface::Hypersurface;
use crate::levi::{Desingularized, LeviData};
use crate::literal::VarNames;
use crate::series::Series;

#[derive(Clone, Debug)]
pub struct HoloMap {
    pub source: Hypersurface,
    pub target: Hypersurface,
    /// `F_1..F_{n+1}` in `z_1..z_n, w`.
    pub components: Vec<Series>,
}

/// Map components pulled back to the source coordinates `(z, χ, s)`.
#[derive(Clone, Debug)]
pub struct Restriction {
    pub z_hat: Vec<Series>,
    pub c_hat: Vec<Series>,
    pub w_hat: Series,
    /// `Re F_w` on the source.
    pub s_hat: Series,
    /// `Im F_w` on the source.
    pub im_w_hat: Series,
}

impl Restriction {
    /// Compose a target function of `(ẑ, ĉ, ŝ)` with the map.
    pub fn pull(&self, f: &Series) -> Result<Series> {
        let mut images: Vec<Series> = self.z_hat.clone();
        images.extend(self.c_hat.iter().cloned());
        images.push(self.s_hat.clone());
        f.substitute(&images)
    }
}

#[derive(Clone, Debug)]
pub struct MapFrameData {
    /// `γ[A][B] = γ^A_B`.
    pub gamma: Vec<Vec<Series>>,
    pub eta: Vec<Series>,
    pub xi: Series,
    pub s_hat: Series,
    pub m: u32,
    pub m_hat: u32,
}

#[derive(Clone, Debug)]
pub struct Residual {
    pub label: String,
    pub value: Series,
}

#[derive(Clone, Debug)]
pub struct ResidualReport {
    pub map_residual: Series,
    pub identities: Vec<Residual>,
    pub xi_smooth: bool,
    pub xi: Series,
    pub gamma: Vec<Vec<Series>>,
    pub eta: Vec<Series>,
}

impl ResidualReport {
    pub fn all_zero(&self) -> bool {
        self.map_residual.is_zero() && self.identities.iter().all(|r| r.value.is_zero())
    }
}

impl HoloMap {
    pub fn new(source: Hypersurface, target: Hypersurface, components: Vec<Series>) -> Result<HoloMap> {
        let n = source.n;
        if target.n != n {
            return Err(Error::InvalidMap(format!("source has n = {n}, target has n = {}", target.n)));
        }
        if components.len() != n + 1 {
            return Err(Error::Arity(format!("expected {} map components, got {}", n + 1, components.len())));
        }
        for (j, c) in components.iter().enumerate() {
            if c.nvars() != n + 1 {
                return Err(Error::Arity(format!("component F{} has {} variables", j + 1, c.nvars())));
            }
            if !c.constant_term().is_zero() {
                return Err(Error::InvalidMap(format!("F{} does not vanish at the origin", j + 1)));
            }
        }
        Ok(HoloMap { source, target, components })
    }

    pub fn n(&self) -> usize {
        self.source.n
    }

    pub fn names(&self) -> VarNames {
        VarNames::ambient(self.n())
    }

    /// Substitute `w = s + iφ(z, χ, s)`.
    pub fn restrict(&self) -> Result<Restriction> {
        let sp = self.source.space();
        let n = sp.n;
        let nv = sp.nvars();
        let phi = &self.source.phi;
        let w = &Series::var(nv, sp.s(), phi.trunc()) + &phi.scale(&GaussRational::i());
        let mut images: Vec<Series> = (0..n).map(|a| Series::var(nv, sp.z(a), phi.trunc())).collect();
        images.push(w);
        let pulled: Vec<Series> = self.components.iter().map(|f| f.substitute(&images)).collect::<Result<_>>()?;
        let z_hat: Vec<Series> = pulled[..n].to_vec();
        let c_hat: Vec<Series> = z_hat.iter().map(Series::conjugate).collect::<Result<_>>()?;
        let w_hat = pulled[n].clone();
        let wc = w_hat.conjugate()?;
        let half = GaussRational::ratio(1, 2);
        let s_hat = (&w_hat + &wc).scale(&half);
        let im_w_hat = (&w_hat - &wc).scale(&(&half * &-GaussRational::i()));
        Ok(Restriction { z_hat, c_hat, w_hat, s_hat, im_w_hat })
    }

    /// `Im F_w − φ̂(F', conj F', Re F_w)` on the source.
    pub fn maps_into(&self) -> Result<Series> {
        let r = self.restrict()?;
        Ok(&r.im_w_hat - &r.pull(&self.target.phi)?)
    }

    pub fn frame_data(&self) -> Result<MapFrameData> {
        let src_frame = Frame::build(&self.source)?;
        let tgt_frame = Frame::build(&self.target)?;
        self.frame_data_with(&src_frame, &tgt_frame, &self.restrict()?)
    }

    fn frame_data_with(&self, src: &Frame, tgt: &Frame, r: &Restriction) -> Result<MapFrameData> {
        let n = self.n();
        let sp = src.space;
        let m = self
            .source
            .desingularization_order()
            .map_err(|_| Error::XiSingular("source is Levi-flat".into()))?;
        let m_hat = self
            .target
            .infinite_type()?
            .m()
            .ok_or_else(|| Error::XiSingular("target is Levi-flat".into()))?;
        let gamma: Vec<Vec<Series>> = (0..n)
            .map(|a| (0..n).map(|b| src.field(src.l(b)).apply(&r.z_hat[a])).collect())
            .collect();
        let sm = Series::var(sp.nvars(), sp.s(), src.trunc).pow(m);
        let s_field = src.field(src.t()).scaled(&sm);
        let eta: Vec<Series> = r.z_hat.iter().map(|z| s_field.apply(z)).collect();
        // Pushforward of L_B has no T̂ part.
        let a_hat: Vec<Series> = tgt.a.iter().map(|x| r.pull(x)).collect::<Result<_>>()?;
        let b_hat: Vec<Series> = tgt.b.iter().map(|x| r.pull(x)).collect::<Result<_>>()?;
        for bidx in 0..n {
            let mut t_part = src.field(src.l(bidx)).apply(&r.s_hat);
            for a in 0..n {
                t_part = &t_part - &(&gamma[a][bidx] * &a_hat[a]);
            }
            if !t_part.is_zero() {
                return Err(Error::IdentityFailed(format!(
                    "pushforward of L_{} has a T̂ component",
                    bidx + 1
                )));
            }
        }
        let mut num = s_field.apply(&r.s_hat);
        for a in 0..n {
            num = &num - &(&eta[a] * &a_hat[a]);
            num = &num - &(&eta[a].conjugate()? * &b_hat[a]);
        }
        let xi = divide_by_power(&num, &r.s_hat, m_hat, sp.s())?;
        Ok(MapFrameData { gamma, eta, xi, s_hat: r.s_hat.clone(), m, m_hat })
    }

    pub fn check_identities(&self) -> Result<ResidualReport> {
        let n = self.n();
        let r = self.restrict()?;
        let map_residual = &r.im_w_hat - &r.pull(&self.target.phi)?;
        let src = Frame::build(&self.source)?;
        let tgt = Frame::build(&self.target)?;
        let fd = self.frame_data_with(&src, &tgt, &r)?;
        let d = LeviData::compute(&src, 1).desingularize(&src, fd.m)?;
        let dh = LeviData::compute(&tgt, 1).desingularize(&tgt, fd.m_hat)?;
        let pulled = PulledTarget::new(&dh, &r, n)?;
        let gbar: Vec<Vec<Series>> = fd
            .gamma
            .iter()
            .map(|row| row.iter().map(Series::conjugate).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let sp = src.space;
        let sm = Series::var(sp.nvars(), sp.s(), src.trunc).pow(fd.m);
        let s_field = src.field(src.t()).scaled(&sm);
        let mut ids = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let mut v = &fd.xi * d.h0_lie(a, b);
                for c in 0..n {
                    for dd in 0..n {
                        v = &v - &(&(&fd.gamma[dd][b] * &gbar[c][a]) * &pulled.h0[c][dd]);
                    }
                }
                ids.push(Residual { label: format!("levi_transform[{},{}]", a + 1, b + 1), value: v });
            }
        }
        for a in 0..n {
            let la = src.field(src.lbar(a));
            let mut v = &la.apply(&fd.xi) + &(&fd.xi * &d.h0_bar[a]);
            for c in 0..n {
                v = &v - &(&(&fd.xi * &gbar[c][a]) * &pulled.h0_bar[c]);
                for dd in 0..n {
                    v = &v - &(&(&gbar[c][a] * &fd.eta[dd]) * &pulled.h0[c][dd]);
                }
            }
            ids.push(Residual { label: format!("xi_transport[{}]", a + 1), value: v });
        }
        for a in 0..n {
            let la = src.field(src.lbar(a));
            for e in 0..n {
                for b in 0..n {
                    let v = &la.apply(&fd.gamma[e][b]) + &(&fd.eta[e] * d.h0_lie(a, b));
                    ids.push(Residual { label: format!("gamma_cr[{},{},{}]", a + 1, e + 1, b + 1), value: v });
                }
            }
        }
        for a in 0..n {
            let la = src.field(src.lbar(a));
            for e in 0..n {
                let v = &la.apply(&fd.eta[e]) + &(&fd.eta[e] * &d.h0_bar[a]);
                ids.push(Residual { label: format!("eta_cr[{},{}]", a + 1, e + 1), value: v });
            }
        }
        for a in 0..n {
            let l_a = src.field(src.l(a));
            let h0c = d.h0_bar[a].conjugate()?;
            for e in 0..n {
                let v = &(&s_field.apply(&fd.gamma[e][a]) - &l_a.apply(&fd.eta[e])) - &(&fd.eta[e] * &h0c);
                ids.push(Residual { label: format!("gamma_s[{},{}]", e + 1, a + 1), value: v });
            }
        }
        Ok(ResidualReport {
            map_residual,
            identities: ids,
            xi_smooth: true,
            xi: fd.xi,
            gamma: fd.gamma,
            eta: fd.eta,
        })
    }

    /// `self ∘ inner`: `inner` maps into `self.source`.
    pub fn compose(&self, inner: &HoloMap) -> Result<HoloMap> {
        let comps = self
            .components
            .iter()
            .map(|f| f.substitute(&inner.components))
            .collect::<Result<Vec<_>>>()?;
        HoloMap::new(inner.source.clone(), self.target.clone(), comps)
    }
}

/// Target desingularized data composed with the map.
struct PulledTarget {
    h0: Vec<Vec<Series>>,
    h0_bar: Vec<Series>,
}

impl PulledTarget {
    fn new(dh: &Desingularized, r: &Restriction, n: usize) -> Result<Self> {
        let h0 = (0..n)
            .map(|c| (0..n).map(|d| r.pull(dh.h0_lie(c, d))).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let h0_bar = dh.h0_bar.iter().map(|x| r.pull(x)).collect::<Result<_>>()?;
        Ok(Self { h0, h0_bar })
    }
}

/// `num / ŝ^{m̂}`: write `ŝ = s^p·U`, require `U` to be a unit and `num` to be
/// divisible by `s^{p m̂}`.
fn divide_by_power(num: &Series, s_hat: &Series, m_hat: u32, s_slot: usize) -> Result<Series> {
    let p = s_hat
        .terms()
        .map(|(mono, _)| mono.exp(s_slot))
        .min()
        .ok_or_else(|| Error::XiSingular("Re F_w vanishes identically on the source".into()))?;
    let u = s_hat
        .divide_by_var_power(s_slot, p as u32, "s")
        .map_err(|e| Error::XiSingular(e.to_string()))?;
    let u_inv = u
        .reciprocal()
        .map_err(|_| Error::XiSingular("Re F_w / s^p is not a unit".into()))?
        .pow(m_hat);
    let q = num
        .divide_by_var_power(s_slot, p as u32 * m_hat, "s")
        .map_err(|e| Error::XiSingular(e.to_string()))?;
    Ok(&q * &u_inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::literal::parse_series;

    fn hs(src: &str, trunc: i32) -> Hypersurface {
        Hypersurface::new(1, trunc, parse_series(src, &VarNames::cr(1), trunc).unwrap()).unwrap()
    }

    fn m_prime(k: u32, trunc: i32) -> Hypersurface {
        crate::corpus::power_target(k, trunc).unwrap()
    }

    fn map(src: &Hypersurface, tgt: &Hypersurface, comps: &[&str]) -> HoloMap {
        let names = VarNames::ambient(1);
        let c = comps.iter().map(|x| parse_series(x, &names, src.trunc).unwrap()).collect();
        HoloMap::new(src.clone(), tgt.clone(), c).unwrap()
    }

    #[test]
    fn h2_closed_form() {
        // 2u/(1 − u²)
        let h = crate::corpus::h_k_series(2, 7).unwrap();
        let expect = parse_series("2*u + 2*u^3 + 2*u^5 + 2*u^7", &VarNames::univariate("u"), 7).unwrap();
        assert!(h.agrees_through(&expect, 7));
    }

    #[test]
    fn identity_restriction() {
        let m0 = hs("s*z1*c1", 8);
        let f = map(&m0, &m0, &["z1", "w"]);
        let r = f.restrict().unwrap();
        assert_eq!(r.w_hat, parse_series("s + i*z1*c1*s", &VarNames::cr(1), 8).unwrap());
        assert!(f.maps_into().unwrap().is_zero());
        let rep = f.check_identities().unwrap();
        assert!(rep.all_zero());
        assert!(rep.xi.constant_term().is_one() && rep.xi.len() == 1);
        assert!(rep.gamma[0][0].constant_term().is_one() && rep.gamma[0][0].len() == 1);
        assert!(rep.eta[0].is_zero());
    }

    #[test]
    fn squaring_map() {
        let m0 = hs("s*z1*c1", 8);
        let tgt = m_prime(2, 8);
        let f = map(&m0, &tgt, &["z1", "w^2"]);
        let r = f.restrict().unwrap();
        let expect = parse_series("s^2 - z1^2*c1^2*s^2", &VarNames::cr(1), 8).unwrap();
        assert!(r.s_hat.agrees_through(&expect, 8));
        assert!(f.maps_into().unwrap().is_zero());
        let bad = map(&m0, &m0, &["z1", "w^2"]);
        assert!(!bad.maps_into().unwrap().is_zero());
        let rep = f.check_identities().unwrap();
        for id in &rep.identities {
            assert!(id.value.is_zero(), "{} = {}", id.label, id.value);
        }
        assert_eq!(rep.xi.constant_term(), GaussRational::from_int(2));
        assert_eq!(rep.xi.len(), 1);
    }

    #[test]
    fn zero_w_component_is_singular() {
        let m0 = hs("s*z1*c1", 8);
        let f = map(&m0, &m0, &["z1", "0"]);
        assert!(f.restrict().unwrap().w_hat.is_zero());
        assert!(f.maps_into().unwrap().is_zero());
        assert!(matches!(f.frame_data(), Err(Error::XiSingular(_))));
    }

    #[test]
    fn levi_flat_source_is_singular() {
        let flat = hs("0", 6);
        let f = map(&flat, &flat, &["z1", "w"]);
        assert!(f.maps_into().unwrap().is_zero());
        assert!(matches!(f.frame_data(), Err(Error::XiSingular(_))));
    }

    #[test]
    fn composition_is_functorial() {
        let m0 = hs("s*z1*c1", 8);
        let m2 = m_prime(2, 8);
        let m6 = m_prime(6, 8);
        let g = map(&m0, &m2, &["z1", "w^2"]);
        let f = map(&m2, &m6, &["z1", "w^3"]);
        let rot = map(&m2, &m2, &["(3/5+4/5*i)*z1", "w"]);
        let fg = f.compose(&g).unwrap();
        assert!(fg.maps_into().unwrap().is_zero());
        let r = g.restrict().unwrap();
        let (dg, df, dfg) = (g.frame_data().unwrap(), f.frame_data().unwrap(), fg.frame_data().unwrap());
        let prod = &r.pull(&df.xi).unwrap() * &dg.xi;
        assert!(dfg.xi.trunc() >= 2 && prod.agrees_through(&dfg.xi, dfg.xi.trunc()));
        assert_eq!(dfg.xi.constant_term(), GaussRational::from_int(6));

        let rg = rot.compose(&g).unwrap();
        assert!(rg.maps_into().unwrap().is_zero());
        let (dr, drg) = (rot.frame_data().unwrap(), rg.frame_data().unwrap());
        let gamma = &r.pull(&dr.gamma[0][0]).unwrap() * &dg.gamma[0][0];
        assert!(gamma.agrees_through(&drg.gamma[0][0], 6));
        assert_eq!(drg.gamma[0][0].constant_term(), GaussRational::ratio(3, 5) + GaussRational::ratio(4, 5) * GaussRational::i());
    }
}
