//! Built-in hypersurfaces, maps and singular systems with known answers, and
//! the runner that checks all of them.

use serde_json::{json, Map, Value};

use crate::bb::{self, BBSystem};
use crate::coeff::GaussRational;
use crate::crmap::HoloMap;
use crate::error::{ErrorKind, Result};
use crate::hypersurface::{Essentiality, Hypersurface};
use crate::literal::{parse_series, VarNames};
use crate::prolong::{self, contact_prolong, ProlongedSystem, SlotPolicy};
use crate::report::{self, Outcome};
use crate::series::{arctan_series, CrSpace, Series};

/// `Im w = (Re w)|z|²`.
pub fn m0(trunc: i32) -> Hypersurface {
    let phi = parse_series("s*z1*c1", &VarNames::cr(1), trunc).expect("fixed literal");
    Hypersurface::new(1, trunc, phi).expect("n = 1")
}

/// `h_k(u) = Im(1 + iu)^k / Re(1 + iu)^k` as a univariate series.
pub fn h_k_series(k: u32, trunc: i32) -> Result<Series> {
    let i = GaussRational::i();
    let half = GaussRational::ratio(1, 2);
    let one = Series::one(1, trunc);
    let u = Series::var(1, 0, trunc);
    let p = (&one + &u.scale(&i)).pow(k);
    let pc = p.conj_coeffs();
    let re = (&p + &pc).scale(&half);
    let im = (&p - &pc).scale(&(&half * &-&i));
    Ok(&im * &re.reciprocal()?)
}

/// `Im w = (Re w)·h_k(|z|²)`, the image of `M₀` under `(z, w^k)`.
pub fn power_target(k: u32, trunc: i32) -> Result<Hypersurface> {
    let sp = CrSpace::new(1);
    let zc = &sp.var(sp.z(0), trunc) * &sp.var(sp.c(0), trunc);
    let h = Series::compose(&h_k_series(k, trunc)?, &zc)?;
    Hypersurface::new(1, trunc, &sp.var(sp.s(), trunc) * &h)
}

/// `θ(ξ, s)` solving `t = ξ(s² + t²)`, in slots `(ξ, s)` of a
/// three-variable space `(ξ, s, t)`.
pub fn theta_series(trunc: i32) -> Result<Series> {
    let names = VarNames::new(vec!["xi".into(), "s".into(), "t".into()]);
    let g = parse_series("xi*s^2 + xi*t^2", &names, trunc)?;
    Series::implicit_solve(&g, 2)
}

/// `Im w = θ(arctan |z|², Re w)`.
pub fn arctan_hypersurface(trunc: i32) -> Result<Hypersurface> {
    let sp = CrSpace::new(1);
    let theta = theta_series(trunc)?;
    let zc = &sp.var(sp.z(0), trunc) * &sp.var(sp.c(0), trunc);
    let at = Series::compose(&arctan_series(trunc), &zc)?;
    let phi = theta.substitute(&[at, sp.var(sp.s(), trunc), sp.zero(trunc)])?;
    Hypersurface::new(1, trunc, phi)
}

pub fn holo_map(source: &Hypersurface, target: &Hypersurface, comps: &[&str]) -> Result<HoloMap> {
    let names = VarNames::ambient(source.n);
    let c = comps.iter().map(|x| parse_series(x, &names, source.trunc)).collect::<Result<Vec<_>>>()?;
    HoloMap::new(source.clone(), target.clone(), c)
}

/// `(z, w^k)` from `M₀` into the `k`-th power target, at truncation `2k + 4`.
pub fn power_map(k: u32) -> Result<HoloMap> {
    let trunc = 2 * k as i32 + 4;
    holo_map(&m0(trunc), &power_target(k, trunc)?, &["z1", &format!("w^{k}")])
}

pub fn bb_system(fs: &[&str], order: u32) -> Result<BBSystem> {
    let names = VarNames::briot_bouquet(fs.len());
    let f = fs.iter().map(|x| parse_series(x, &names, order as i32)).collect::<Result<Vec<_>>>()?;
    BBSystem::new(f, order)
}

/// `(s∂_s)u1 = 2u1 + s`, the other fiber components at rest, one sample.
pub fn toy_prolonged() -> Result<ProlongedSystem> {
    let jets = prolong::contact_prolong_with(1, 0, SlotPolicy::AllTopOrder);
    let names = jets.closure_names();
    let closure = ["2*u1 + s", "0", "0"].iter().map(|c| parse_series(c, &names, 6)).collect::<Result<Vec<_>>>()?;
    Ok(ProlongedSystem {
        jets,
        closure,
        center: Default::default(),
        samples: vec![vec![GaussRational::zero(); 2]],
        order: 6,
    })
}

struct Checks {
    name: String,
    items: Vec<(String, Value, Value)>,
    error: Option<String>,
}

impl Checks {
    fn new(name: &str) -> Self {
        Checks { name: name.into(), items: Vec::new(), error: None }
    }

    fn eq(&mut self, what: &str, expected: Value, got: Value) {
        self.items.push((what.into(), expected, got));
    }

    fn pass(&self) -> bool {
        self.error.is_none() && self.items.iter().all(|(_, e, g)| e == g)
    }

    fn json(&self) -> Value {
        let checks: Vec<Value> = self
            .items
            .iter()
            .map(|(w, e, g)| json!({ "check": w, "expected": e, "got": g, "pass": e == g }))
            .collect();
        json!({ "name": self.name, "checks": checks, "error": self.error, "pass": self.pass() })
    }
}

fn run<F>(name: &str, f: F) -> Checks
where
    F: FnOnce(&mut Checks) -> Result<()>,
{
    let mut c = Checks::new(name);
    if let Err(e) = f(&mut c) {
        c.error = Some(e.to_string());
    }
    c
}

fn invariants(c: &mut Checks, hs: &Hypersurface, m: u32, r: u32, more: bool) -> Result<()> {
    let rep = report::analyze(hs)?;
    c.eq("m", json!(m), json!(rep.m));
    c.eq("r", json!(r), json!(rep.r));
    c.eq("h0 leading term", json!(true), json!(rep.leading_term_ok));
    if more {
        c.eq("ell", json!(1), json!(rep.ell()));
        c.eq("essential", json!(Essentiality::Certified(1).to_string()), json!(rep.essential.as_ref().map(|e| e.to_string())));
        c.eq("filtration_ranks", json!([0, 1]), json!(rep.filtration_ranks()));
        c.eq("type_two", json!(true), json!(rep.type_two()));
    }
    Ok(())
}

fn identities(c: &mut Checks, map: &HoloMap, xi: i64) -> Result<()> {
    let rep = map.check_identities()?;
    c.eq("map residual", json!("0"), json!(rep.map_residual.to_string()));
    c.eq("identity residuals zero", json!(true), json!(rep.all_zero()));
    c.eq("xi", json!(xi.to_string()), json!(rep.xi.display_with(&map.source.names()).to_string()));
    Ok(())
}

pub fn run_examples() -> Outcome {
    let mut all: Vec<Checks> = Vec::new();
    all.push(run("m0", |c| invariants(c, &m0(8), 1, 2, true)));
    all.push(run("arctan-theta", |c| invariants(c, &arctan_hypersurface(8)?, 2, 2, false)));
    for k in 2..=4u32 {
        all.push(run(&format!("power-target-{k}"), |c| invariants(c, &power_target(k, 2 * k as i32 + 4)?, 1, 2, false)));
        all.push(run(&format!("map-z-w{k}"), |c| {
            let f = power_map(k)?;
            c.eq("map residual", json!("0"), json!(f.maps_into()?.to_string()));
            Ok(())
        }));
    }
    all.push(run("identity-map", |c| {
        let m = m0(8);
        identities(c, &holo_map(&m, &m, &["z1", "w"])?, 1)
    }));
    all.push(run("squaring-map", |c| identities(c, &holo_map(&m0(8), &power_target(2, 8)?, &["z1", "w^2"])?, 2)));
    all.push(run("rotation", |c| {
        let m = m0(8);
        let f = holo_map(&m, &m, &["(3/5+4/5*i)*z1", "w"])?;
        let rep = f.check_identities()?;
        c.eq("identity residuals zero", json!(true), json!(rep.all_zero()));
        c.eq("gamma", json!("(3/5+4/5*i)"), json!(rep.gamma[0][0].to_string()));
        Ok(())
    }));
    all.push(run("bb-half", |c| {
        let sys = bb_system(&["1/2*y1 + t"], 10)?;
        let sol = bb::formal_solve(&sys)?;
        c.eq("c_1", json!(["2"]), json!(sol.coeff(1, 0).iter().map(|x| x.to_string()).collect::<Vec<_>>()));
        c.eq("coefficients", json!(1), json!(sol.coeffs.len()));
        let (pos, neg) = report::oracle_deviations(&sys, &sol, 0.01)?;
        c.eq("oracle within tolerance", json!(true), json!(pos < report::ORACLE_TOLERANCE && neg < report::ORACLE_TOLERANCE));
        Ok(())
    }));
    all.push(run("bb-log", |c| {
        let sys = bb_system(&["y1 + t"], 6)?;
        let sol = bb::formal_solve(&sys)?;
        c.eq("t ln t", json!(["1"]), json!(sol.coeff(1, 1).iter().map(|x| x.to_string()).collect::<Vec<_>>()));
        c.eq("coefficients", json!(1), json!(sol.coeffs.len()));
        c.eq("family_dim", json!(1), json!(sol.family_dim));
        c.eq("resonances", json!([1]), json!(sol.resonances.iter().map(|r| r.k).collect::<Vec<_>>()));
        c.eq("residual zero", json!(true), json!(sys.residual(&sol).is_empty()));
        Ok(())
    }));
    all.push(run("dulac", |c| {
        let p = |fs: &[&str]| -> Result<usize> { Ok(bb::dulac_classify(&bb::linear_part(&bb_system(fs, 2)?)).p) };
        c.eq("A = [1]", json!(1), json!(p(&["y1"])?));
        c.eq("A = [-2]", json!(0), json!(p(&["-2*y1"])?));
        c.eq("rotation", json!(2), json!(p(&["y2", "-y1"])?));
        Ok(())
    }));
    all.push(run("prolongation", |c| {
        let js = contact_prolong(1, 3);
        c.eq("variables", json!(60), json!(js.num_vars()));
        c.eq("contact", json!(57), json!(js.contact.len()));
        c.eq("closure", json!(3), json!(js.closure_slots.len()));
        let out = prolong::assemble_and_solve(&toy_prolonged()?)?;
        let sol = &out[0].solution;
        c.eq("u1 = -s", json!(["-1", "0", "0"]), json!(sol.coeff(1, 0).iter().map(|x| x.to_string()).collect::<Vec<_>>()));
        c.eq("coefficients", json!(1), json!(sol.coeffs.len()));
        Ok(())
    }));

    let pass = all.iter().all(Checks::pass);
    let mut text = String::new();
    for c in &all {
        let detail = match &c.error {
            Some(e) => format!("  error: {e}"),
            None => format!("  {} checks", c.items.len()),
        };
        text.push_str(&format!("{:<18} {}{}\n", c.name, if c.pass() { "PASS" } else { "FAIL" }, detail));
    }
    let mut m = Map::new();
    m.insert("schema_version".into(), json!(report::SCHEMA_VERSION));
    m.insert("command".into(), json!("examples"));
    m.insert("examples".into(), Value::Array(all.iter().map(Checks::json).collect()));
    m.insert("all_pass".into(), json!(pass));
    Outcome { json: Value::Object(m), text, failure: if pass { None } else { Some(ErrorKind::Invariant) } }
}
