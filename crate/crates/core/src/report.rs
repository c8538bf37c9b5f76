//! Pipelines behind the command-line tool, each producing a canonical JSON
//! document (keys sorted, series as literals) and an exit status.

use serde_json::{json, Map, Value};

use crate::bb::{self, BBSystem, FormalLogSolution};
use crate::coeff::GaussRational;
use crate::crmap::HoloMap;
use crate::error::{Error, ErrorKind, Result};
use crate::frame::Frame;
use crate::hypersurface::{Essentiality, Hypersurface, InfiniteType, Nondegeneracy};
use crate::levi::{self, Desingularized, Filtration, LeviData};
use crate::linalg::Matrix;
use crate::literal::VarNames;
use crate::prolong::{self, ProlongedSystem};
use crate::series::Series;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug)]
pub struct Outcome {
    pub json: Value,
    pub text: String,
    /// `None` on success.
    pub failure: Option<ErrorKind>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        exit_code(self.failure)
    }

    /// Pretty JSON with a trailing newline.
    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.json).expect("JSON values serialize");
        s.push('\n');
        s
    }
}

pub fn exit_code(kind: Option<ErrorKind>) -> i32 {
    match kind {
        None => 0,
        Some(ErrorKind::Validation) => 1,
        Some(ErrorKind::Invariant) => 2,
        Some(ErrorKind::Parse) => 3,
    }
}

pub fn kind_name(kind: ErrorKind) -> &'static str {
    match kind {
        ErrorKind::Validation => "validation",
        ErrorKind::Invariant => "invariant",
        ErrorKind::Parse => "parse",
    }
}

fn envelope(command: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    m.insert("command".into(), json!(command));
    m
}

pub fn error_outcome(command: &str, err: &Error) -> Outcome {
    let kind = err.kind();
    let mut m = envelope(command);
    m.insert("error".into(), json!({ "kind": kind_name(kind), "message": err.to_string() }));
    Outcome { json: Value::Object(m), text: format!("error ({}): {err}\n", kind_name(kind)), failure: Some(kind) }
}

fn lit(s: &Series, names: &VarNames) -> Value {
    json!(s.display_with(names).to_string())
}

fn coeff_json(c: &GaussRational) -> Value {
    json!(c.to_string())
}

fn matrix_json(m: &Matrix) -> Value {
    Value::Array(m.iter().map(|r| Value::Array(r.iter().map(coeff_json).collect())).collect())
}

/// Everything computed for one hypersurface.
#[derive(Clone, Debug)]
pub struct InvariantReport {
    pub n: usize,
    pub trunc: i32,
    /// `None` when Levi-flat at this truncation.
    pub m: Option<u32>,
    pub r: Option<u32>,
    pub m_used: Option<u32>,
    pub essential: Option<Essentiality>,
    pub nondegeneracy: Option<Nondegeneracy>,
    pub filtration: Option<Filtration>,
    pub levi: Option<LeviData>,
    pub desingularized: Option<Desingularized>,
    pub leading_term_ok: Option<bool>,
}

impl InvariantReport {
    pub fn ell(&self) -> Option<u32> {
        match self.nondegeneracy {
            Some(Nondegeneracy::Ell(l)) => Some(l),
            _ => None,
        }
    }

    pub fn type_two(&self) -> bool {
        self.filtration.as_ref().is_some_and(|f| f.type_two)
    }

    pub fn filtration_ranks(&self) -> Vec<usize> {
        self.filtration.as_ref().map(|f| f.ranks.clone()).unwrap_or_default()
    }
}

/// Largest word length and nondegeneracy order examined.
pub fn ell_bound(hs: &Hypersurface, m: u32) -> u32 {
    let psi_trunc = hs.trunc - m as i32;
    (hs.n as u32 + 1).min((psi_trunc - 1).max(1) as u32)
}

pub const ESSENTIALITY_DEGREE: u32 = 4;

pub fn analyze(hs: &Hypersurface) -> Result<InvariantReport> {
    hs.validate()?;
    let mut rep = InvariantReport {
        n: hs.n,
        trunc: hs.trunc,
        m: None,
        r: None,
        m_used: None,
        essential: None,
        nondegeneracy: None,
        filtration: None,
        levi: None,
        desingularized: None,
        leading_term_ok: None,
    };
    let InfiniteType::Finite { m, r, .. } = hs.infinite_type()? else {
        return Ok(rep);
    };
    rep.m = Some(m);
    rep.r = Some(r);
    let m_used = hs.desingularization_order()?;
    rep.m_used = Some(m_used);
    let ell_max = ell_bound(hs, m);
    let frame = Frame::build(hs)?;
    let ld = LeviData::compute(&frame, ell_max as usize);
    let d = ld.desingularize(&frame, m_used)?;
    let filt = levi::filtration(hs.n, &d, ell_max)?;
    filt.check_block_vanishing()?;
    filt.check_block_kernels()?;
    rep.leading_term_ok = Some(levi::leading_term_defects(hs, &d)?.is_empty());
    rep.essential = Some(hs.essentiality(ESSENTIALITY_DEGREE.min(hs.trunc.max(1) as u32))?);
    rep.nondegeneracy = Some(hs.nondegeneracy(ell_max)?);
    rep.filtration = Some(filt);
    rep.levi = Some(ld);
    rep.desingularized = Some(d);
    Ok(rep)
}

fn series_matrix_json(m: &[Vec<Series>], names: &VarNames) -> Value {
    Value::Array(m.iter().map(|r| Value::Array(r.iter().map(|s| lit(s, names)).collect())).collect())
}

pub fn invariants_json(rep: &InvariantReport, names: &VarNames) -> Map<String, Value> {
    let mut out = Map::new();
    let ell = match &rep.nondegeneracy {
        Some(Nondegeneracy::Ell(l)) => json!(l),
        Some(other) => json!(other.to_string()),
        None => Value::Null,
    };
    out.insert(
        "invariants".into(),
        json!({
            "n": rep.n,
            "trunc": rep.trunc,
            "levi_flat": rep.m.is_none(),
            "m": rep.m,
            "r": rep.r,
            "ell": ell,
            "essential": rep.essential.as_ref().map(|e| e.to_string()),
            "filtration_ranks": rep.filtration_ranks(),
            "filtration_ell": rep.filtration.as_ref().map(|f| f.ell),
            "type_two": rep.type_two(),
        }),
    );
    if let (Some(ld), Some(d)) = (&rep.levi, &rep.desingularized) {
        let h0_origin: Vec<Vec<Value>> = d
            .h0
            .iter()
            .map(|row| row.iter().map(|x| coeff_json(&x.constant_term())).collect())
            .collect();
        out.insert(
            "levi".into(),
            json!({
                "m_used": d.m,
                "h": series_matrix_json(&ld.h, names),
                "h0": series_matrix_json(&d.h0, names),
                "h0_at_origin": h0_origin,
                "h0_bar": d.h0_bar.iter().map(|s| lit(s, names)).collect::<Vec<_>>(),
                "leading_term_matches_hessian": rep.leading_term_ok,
            }),
        );
    }
    out
}

pub fn report_hypersurface(hs: &Hypersurface) -> Outcome {
    match analyze(hs) {
        Err(e) => error_outcome("report", &e),
        Ok(rep) => {
            let mut m = envelope("report");
            m.extend(invariants_json(&rep, &hs.names()));
            let mut failure = None;
            let mut diag = Vec::new();
            if rep.leading_term_ok == Some(false) {
                diag.push("h0 leading term differs from the mixed Hessian of the lowest-order part of φ_m".to_string());
                failure = Some(ErrorKind::Invariant);
            }
            m.insert("diagnostics".into(), json!(diag));
            let text = invariant_text(&rep);
            Outcome { json: Value::Object(m), text, failure }
        }
    }
}

fn invariant_text(rep: &InvariantReport) -> String {
    match rep.m {
        None => format!("n = {}, trunc = {}: Levi-flat at this truncation\n", rep.n, rep.trunc),
        Some(m) => format!(
            "n = {}, trunc = {}: m = {m}, r = {}, ell = {}, essential = {}, filtration ranks = {:?}, type two = {}\n",
            rep.n,
            rep.trunc,
            rep.r.unwrap_or(0),
            rep.nondegeneracy.as_ref().map(|x| x.to_string()).unwrap_or_default(),
            rep.essential.as_ref().map(|x| x.to_string()).unwrap_or_default(),
            rep.filtration_ranks(),
            rep.type_two()
        ),
    }
}

pub fn check_map(map: &HoloMap) -> Outcome {
    let ambient = map.names();
    let names = map.source.names();
    let mut m = envelope("check-map");
    m.insert(
        "map".into(),
        json!({ "components": map.components.iter().map(|c| lit(c, &ambient)).collect::<Vec<_>>() }),
    );
    let fail = |mut m: Map<String, Value>, e: &Error| {
        let kind = e.kind();
        m.insert("error".into(), json!({ "kind": kind_name(kind), "message": e.to_string() }));
        Outcome { json: Value::Object(m), text: format!("error ({}): {e}\n", kind_name(kind)), failure: Some(kind) }
    };
    if let Err(e) = map.source.validate().and_then(|_| map.target.validate()) {
        return fail(m, &e);
    }
    let residual = match map.maps_into() {
        Ok(r) => r,
        Err(e) => return fail(m, &e),
    };
    m.insert("map_residual".into(), lit(&residual, &names));
    if !residual.is_zero() {
        let e = Error::InvalidMap("the map does not send the source into the target".into());
        return fail(m, &e);
    }
    let rep = match map.check_identities() {
        Ok(r) => r,
        Err(e) => {
            m.insert("xi_smooth".into(), json!(false));
            return fail(m, &e);
        }
    };
    let mut ids = Map::new();
    for r in &rep.identities {
        ids.insert(r.label.clone(), lit(&r.value, &names));
    }
    let all_zero = rep.all_zero();
    m.insert("identity_residuals".into(), Value::Object(ids));
    m.insert("all_zero".into(), json!(all_zero));
    m.insert("xi_smooth".into(), json!(rep.xi_smooth));
    m.insert("xi".into(), lit(&rep.xi, &names));
    m.insert("gamma".into(), series_matrix_json(&rep.gamma, &names));
    m.insert("eta".into(), Value::Array(rep.eta.iter().map(|s| lit(s, &names)).collect()));
    let text = format!(
        "map residual = 0, identity residuals {}, xi = {}\n",
        if all_zero { "all zero" } else { "NONZERO" },
        rep.xi.display_with(&names)
    );
    let failure = if all_zero { None } else { Some(ErrorKind::Invariant) };
    Outcome { json: Value::Object(m), text, failure }
}

pub fn solution_json(sol: &FormalLogSolution) -> Value {
    Value::Array(
        sol.coeffs
            .iter()
            .map(|((k, r), v)| json!({ "k": k, "r": r, "vector": v.iter().map(coeff_json).collect::<Vec<_>>() }))
            .collect(),
    )
}

fn resonances_json(res: &[bb::Resonance]) -> Value {
    Value::Array(
        res.iter()
            .map(|r| json!({ "k": r.k, "kernel_dim": r.kernel_dim, "multiplicity": r.multiplicity }))
            .collect(),
    )
}

/// Two-sided comparison against numeric integration from `±t0` out to
/// `10·|t0|`.
pub fn oracle_deviations(sys: &BBSystem, sol: &FormalLogSolution, t0: f64) -> Result<(f64, f64)> {
    let a = t0.abs();
    let steps = 400;
    Ok((bb::numeric_oracle(sys, sol, a, 10.0 * a, steps)?, bb::numeric_oracle(sys, sol, -a, 10.0 * a, steps)?))
}

pub const ORACLE_TOLERANCE: f64 = 1e-8;

pub fn bb_solve(sys: &BBSystem, oracle: Option<f64>) -> Outcome {
    let lp = bb::linear_part(sys);
    let sol = match bb::formal_solve(sys) {
        Ok(s) => s,
        Err(e) => return error_outcome("bb-solve", &e),
    };
    let dulac = bb::dulac_classify(&lp);
    let residual_zero = sys.residual(&sol).is_empty();
    let mut bbm = Map::new();
    bbm.insert("N".into(), json!(sys.n));
    bbm.insert("order".into(), json!(sys.order));
    bbm.insert(
        "linear_part".into(),
        json!({
            "p": lp.p.iter().map(coeff_json).collect::<Vec<_>>(),
            "A": matrix_json(&lp.a),
            "char_poly": lp.char_poly.iter().map(coeff_json).collect::<Vec<_>>(),
        }),
    );
    bbm.insert("resonances".into(), resonances_json(&sol.resonances));
    bbm.insert("family_dim".into(), json!(sol.family_dim));
    bbm.insert("dulac_p".into(), json!(dulac.p));
    bbm.insert("nonpositive_real_eigenvalues".into(), json!(dulac.nonpositive_real));
    bbm.insert("coefficients".into(), solution_json(&sol));
    bbm.insert("residual_zero".into(), json!(residual_zero));
    let mut failure = if residual_zero { None } else { Some(ErrorKind::Invariant) };
    let mut text = format!(
        "order {}: {} nonzero coefficient vectors, resonances {:?}, family_dim {}, dulac p = {}\n",
        sys.order,
        sol.coeffs.len(),
        sol.resonances.iter().map(|r| r.k).collect::<Vec<_>>(),
        sol.family_dim,
        dulac.p
    );
    if let Some(t0) = oracle {
        match oracle_deviations(sys, &sol, t0) {
            Ok((pos, neg)) => {
                let pass = pos < ORACLE_TOLERANCE && neg < ORACLE_TOLERANCE;
                bbm.insert(
                    "oracle".into(),
                    json!({ "t0": t0.abs(), "t_max": 10.0 * t0.abs(), "max_deviation_positive": pos,
                            "max_deviation_negative": neg, "tolerance": ORACLE_TOLERANCE, "pass": pass }),
                );
                text.push_str(&format!("oracle: deviation {pos:.3e} (t > 0), {neg:.3e} (t < 0)\n"));
                if !pass {
                    failure = failure.or(Some(ErrorKind::Invariant));
                }
            }
            Err(e) => {
                bbm.insert("oracle".into(), json!({ "error": e.to_string() }));
                text.push_str(&format!("oracle: {e}\n"));
                failure = failure.or(Some(e.kind()));
            }
        }
    }
    let mut m = envelope("bb-solve");
    m.insert("bb".into(), Value::Object(bbm));
    Outcome { json: Value::Object(m), text, failure }
}

pub fn prolong(ps: &ProlongedSystem) -> Outcome {
    let js = &ps.jets;
    let mut pm = Map::new();
    pm.insert("base_dim".into(), json!(js.base_dim()));
    pm.insert("jet_order".into(), json!(js.order));
    pm.insert("variables".into(), json!(js.num_vars()));
    pm.insert("contact_equations".into(), json!(js.contact.len()));
    pm.insert("closure_slots".into(), json!(js.closure_slots.len()));
    let mut m = envelope("prolong");
    let samples = match prolong::assemble_and_solve(ps) {
        Ok(s) => s,
        Err(e) => {
            m.insert("prolong".into(), Value::Object(pm));
            let kind = e.kind();
            m.insert("error".into(), json!({ "kind": kind_name(kind), "message": e.to_string() }));
            return Outcome {
                json: Value::Object(m),
                text: format!("error ({}): {e}\n", kind_name(kind)),
                failure: Some(kind),
            };
        }
    };
    let mut all_ok = true;
    let mut text = format!(
        "{} variables, {} contact equations, {} closure slots\n",
        js.num_vars(),
        js.contact.len(),
        js.closure_slots.len()
    );
    let out: Vec<Value> = samples
        .iter()
        .map(|s| {
            all_ok &= s.residual_zero;
            let x: Vec<String> = s.x.iter().map(|c| c.to_string()).collect();
            text.push_str(&format!(
                "x = ({}): {} nonzero coefficient vectors, residual {}\n",
                x.join(", "),
                s.solution.coeffs.len(),
                if s.residual_zero { "zero" } else { "NONZERO" }
            ));
            let named: Vec<Value> = s
                .solution
                .coeffs
                .iter()
                .flat_map(|((k, r), v)| {
                    v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(j, c)| {
                        json!({ "var": js.var_name(j), "k": k, "r": r, "value": coeff_json(c) })
                    })
                })
                .collect();
            json!({
                "x": x,
                "center": s.center.iter().map(coeff_json).collect::<Vec<_>>(),
                "solution": named,
                "resonances": resonances_json(&s.solution.resonances),
                "family_dim": s.solution.family_dim,
                "coefficient_norms": s.coefficient_norms.iter().map(|(k, v)| json!([k, v])).collect::<Vec<_>>(),
                "residual_zero": s.residual_zero,
            })
        })
        .collect();
    pm.insert("samples".into(), Value::Array(out));
    m.insert("prolong".into(), Value::Object(pm));
    let failure = if all_ok { None } else { Some(ErrorKind::Invariant) };
    Outcome { json: Value::Object(m), text, failure }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::literal::parse_series;

    fn hs(src: &str, trunc: i32) -> Hypersurface {
        Hypersurface::new(1, trunc, parse_series(src, &VarNames::cr(1), trunc).unwrap()).unwrap()
    }

    #[test]
    fn m0_report() {
        let out = report_hypersurface(&hs("s*z1*c1", 8));
        assert_eq!(out.exit_code(), 0);
        let inv = &out.json["invariants"];
        assert_eq!(inv["m"], 1);
        assert_eq!(inv["r"], 2);
        assert_eq!(inv["ell"], 1);
        assert_eq!(inv["essential"], "certified-essential(1)");
        assert_eq!(inv["filtration_ranks"], json!([0, 1]));
        assert_eq!(inv["type_two"], true);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(report_hypersurface(&hs("s*z1", 6)).exit_code(), 1);
        let mut wrong = hs("s*z1*c1", 6);
        wrong.m_override = Some(2);
        assert_eq!(report_hypersurface(&wrong).exit_code(), 2);
        let flat = report_hypersurface(&hs("0", 6));
        assert_eq!(flat.exit_code(), 0);
        assert_eq!(flat.json["invariants"]["levi_flat"], true);
    }
}
