//! Singular systems `t·y′ = f(t, y)` with `f(0, 0) = 0`: formal solutions in
//! `t^k (ln t)^r`, resonances, eigenvalue location counts and a floating-point
//! integration cross-check.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::coeff::GaussRational;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::literal::VarNames;
use crate::poly::{self, CPoly};
use crate::series::Series;

/// `f_1..f_N` in slots `t, y1..yN`.
#[derive(Clone, Debug)]
pub struct BBSystem {
    pub n: usize,
    pub f: Vec<Series>,
    pub order: u32,
}

#[derive(Clone, Debug)]
pub struct LinearPart {
    pub p: Vec<GaussRational>,
    pub a: Matrix,
    /// `det(x·I − A)`, constant term first.
    pub char_poly: CPoly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Resonance {
    pub k: u32,
    /// `dim ker(kI − A)`.
    pub kernel_dim: usize,
    /// Multiplicity of `k` as a root of the characteristic polynomial.
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dulac {
    /// Eigenvalues off the closed negative real axis.
    pub p: usize,
    pub nonpositive_real: usize,
    pub n: usize,
}

/// `y = Σ c_{k,r} t^k (ln t)^r` with `1 ≤ k ≤ order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalLogSolution {
    pub n: usize,
    pub order: u32,
    /// Only nonzero vectors are stored.
    pub coeffs: BTreeMap<(u32, u32), Vec<GaussRational>>,
    pub resonances: Vec<Resonance>,
    pub family_dim: usize,
}

/// Coefficients of `t^k (ln t)^r` for a single component.
type LogSeries = BTreeMap<(u32, u32), GaussRational>;

fn log_mul(a: &LogSeries, b: &LogSeries, max_k: u32) -> LogSeries {
    let mut out = LogSeries::new();
    for ((ka, ra), ca) in a {
        for ((kb, rb), cb) in b {
            if ka + kb > max_k {
                break;
            }
            *out.entry((ka + kb, ra + rb)).or_default() += &(ca * cb);
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn add_into(acc: &mut LogSeries, x: &LogSeries, scale: &GaussRational, shift: u32, max_k: u32) {
    for ((k, r), c) in x {
        if k + shift > max_k {
            continue;
        }
        *acc.entry((k + shift, *r)).or_default() += &(c * scale);
    }
}

impl BBSystem {
    pub fn new(f: Vec<Series>, order: u32) -> Result<BBSystem> {
        let n = f.len();
        if n == 0 {
            return Err(Error::InvalidSystem("empty system".into()));
        }
        for (j, fj) in f.iter().enumerate() {
            if fj.nvars() != n + 1 {
                return Err(Error::Arity(format!("f{} has {} variables, expected {}", j + 1, fj.nvars(), n + 1)));
            }
            if !fj.constant_term().is_zero() {
                return Err(Error::InvalidSystem(format!(
                    "f{} has constant term {}",
                    j + 1,
                    fj.constant_term()
                )));
            }
        }
        Ok(BBSystem { n, f, order })
    }

    pub fn names(&self) -> VarNames {
        VarNames::briot_bouquet(self.n)
    }

    /// `f(t, y)` for a log series `y`, keeping orders `≤ max_k`.
    fn evaluate(&self, y: &[LogSeries], max_k: u32) -> Vec<LogSeries> {
        let mut powers: Vec<Vec<LogSeries>> = y
            .iter()
            .map(|yj| {
                let mut one = LogSeries::new();
                one.insert((0, 0), GaussRational::one());
                vec![one, yj.clone()]
            })
            .collect();
        self.f
            .iter()
            .map(|fj| {
                let mut acc = LogSeries::new();
                for (mono, c) in fj.terms() {
                    let a = mono.exp(0) as u32;
                    if a > max_k {
                        continue;
                    }
                    let mut term = LogSeries::new();
                    term.insert((0, 0), GaussRational::one());
                    for j in 0..self.n {
                        let e = mono.exp(j + 1) as usize;
                        if e == 0 {
                            continue;
                        }
                        while powers[j].len() <= e {
                            let next = log_mul(powers[j].last().unwrap(), &y[j], max_k);
                            powers[j].push(next);
                        }
                        term = log_mul(&term, &powers[j][e], max_k);
                    }
                    add_into(&mut acc, &term, c, a, max_k);
                }
                acc.retain(|_, c| !c.is_zero());
                acc
            })
            .collect()
    }

    /// Nonzero entries of `t·y′ − f(t, y)` through order `self.order`.
    pub fn residual(&self, sol: &FormalLogSolution) -> BTreeMap<(u32, u32), Vec<GaussRational>> {
        let k_max = self.order;
        let y = sol.components();
        let fy = self.evaluate(&y, k_max);
        let mut out = BTreeMap::new();
        for j in 0..self.n {
            let mut d = LogSeries::new();
            for ((k, r), c) in &y[j] {
                *d.entry((*k, *r)).or_default() += &(c * &GaussRational::from_int(*k as i64));
                if *r > 0 {
                    *d.entry((*k, r - 1)).or_default() += &(c * &GaussRational::from_int(*r as i64));
                }
            }
            for (key, c) in &fy[j] {
                *d.entry(*key).or_default() -= c;
            }
            for (key, c) in d {
                if !c.is_zero() && key.0 <= k_max {
                    out.entry(key).or_insert_with(|| vec![GaussRational::zero(); self.n])[j] = c;
                }
            }
        }
        out
    }
}

pub fn linear_part(sys: &BBSystem) -> LinearPart {
    let n = sys.n;
    let mut p = vec![GaussRational::zero(); n];
    let mut a = linalg::zeros(n, n);
    let mut e = vec![0u16; n + 1];
    for (j, fj) in sys.f.iter().enumerate() {
        e[0] = 1;
        p[j] = fj.coeff(&e);
        e[0] = 0;
        for i in 0..n {
            e[i + 1] = 1;
            a[j][i] = fj.coeff(&e);
            e[i + 1] = 0;
        }
    }
    let char_poly = poly::char_poly(&a);
    LinearPart { p, a, char_poly }
}

fn shifted(a: &Matrix, k: u32) -> Matrix {
    let kk = GaussRational::from_int(k as i64);
    a.iter()
        .enumerate()
        .map(|(i, row)| row.iter().enumerate().map(|(j, x)| if i == j { &kk - x } else { -x }).collect())
        .collect()
}

fn root_multiplicity(p: &CPoly, root: &GaussRational) -> usize {
    let mut q = p.clone();
    let mut m = 0;
    while q.len() > 1 && poly::eval_c(&q, root).is_zero() {
        // synthetic division by (x − root)
        let mut out = vec![GaussRational::zero(); q.len() - 1];
        let mut carry = GaussRational::zero();
        for i in (1..q.len()).rev() {
            carry = &q[i] + &(&carry * root);
            out[i - 1] = carry.clone();
        }
        q = out;
        m += 1;
    }
    m
}

/// Positive integers `k ≤ max_k` that are eigenvalues of `A`.
pub fn resonances(lp: &LinearPart, max_k: u32) -> Vec<Resonance> {
    let n = lp.a.len();
    (1..=max_k)
        .filter_map(|k| {
            let kk = GaussRational::from_int(k as i64);
            if !poly::eval_c(&lp.char_poly, &kk).is_zero() {
                return None;
            }
            Some(Resonance {
                k,
                kernel_dim: n - linalg::rank(&shifted(&lp.a, k)),
                multiplicity: root_multiplicity(&lp.char_poly, &kk),
            })
        })
        .collect()
}

pub fn dulac_classify(lp: &LinearPart) -> Dulac {
    let n = poly::degree_c(&lp.char_poly);
    let nonpositive_real = poly::count_nonpositive_real_roots(&lp.char_poly);
    Dulac { p: n - nonpositive_real, nonpositive_real, n }
}

/// Solve order by order. At a resonant order the log-graded block system is
/// solved with free parameters set to zero.
pub fn formal_solve(sys: &BBSystem) -> Result<FormalLogSolution> {
    let n = sys.n;
    let k_max = sys.order;
    let lp = linear_part(sys);
    let res = resonances(&lp, k_max);
    let mut y: Vec<LogSeries> = vec![LogSeries::new(); n];
    for k in 1..=k_max {
        let g = sys.evaluate(&y, k);
        let top = g.iter().flat_map(|gj| gj.keys()).filter(|(kk, _)| *kk == k).map(|(_, r)| *r).max();
        let resonant = res.iter().any(|r| r.k == k);
        let Some(top) = top.or(if resonant { Some(0) } else { None }) else { continue };
        let g_at = |r: u32, j: usize| g[j].get(&(k, r)).cloned().unwrap_or_default();
        let m = shifted(&lp.a, k);
        let levels = if resonant { top as usize + n + 1 } else { top as usize + 1 };
        let sol: Vec<GaussRational> = if !resonant {
            let inv = linalg::inverse(&m).expect("kI − A invertible off resonance");
            let mut out = vec![GaussRational::zero(); levels * n];
            for r in (0..levels).rev() {
                let mut rhs: Vec<GaussRational> = (0..n).map(|j| g_at(r as u32, j)).collect();
                if r + 1 < levels {
                    let f = GaussRational::from_int(r as i64 + 1);
                    for j in 0..n {
                        rhs[j] -= &(&f * &out[(r + 1) * n + j]);
                    }
                }
                let c = linalg::mat_vec(&inv, &rhs);
                out[r * n..(r + 1) * n].clone_from_slice(&c);
            }
            out
        } else {
            let cols = levels * n;
            let mut big = linalg::zeros(cols, cols);
            let mut rhs = vec![GaussRational::zero(); cols];
            for r in 0..levels {
                for i in 0..n {
                    for j in 0..n {
                        big[r * n + i][r * n + j] = m[i][j].clone();
                    }
                    if r + 1 < levels {
                        big[r * n + i][(r + 1) * n + i] = GaussRational::from_int(r as i64 + 1);
                    }
                    rhs[r * n + i] = g_at(r as u32, i);
                }
            }
            linalg::solve(&big, &rhs)
                .ok_or_else(|| Error::IdentityFailed(format!("log-graded system at order {k} is inconsistent")))?
        };
        for r in 0..levels {
            for j in 0..n {
                let c = &sol[r * n + j];
                if !c.is_zero() {
                    y[j].insert((k, r as u32), c.clone());
                }
            }
        }
    }
    let mut coeffs: BTreeMap<(u32, u32), Vec<GaussRational>> = BTreeMap::new();
    for (j, yj) in y.iter().enumerate() {
        for (key, c) in yj {
            coeffs.entry(*key).or_insert_with(|| vec![GaussRational::zero(); n])[j] = c.clone();
        }
    }
    let family_dim = res.iter().map(|r| r.multiplicity).sum();
    Ok(FormalLogSolution { n, order: k_max, coeffs, resonances: res, family_dim })
}

impl FormalLogSolution {
    pub fn coeff(&self, k: u32, r: u32) -> Vec<GaussRational> {
        self.coeffs.get(&(k, r)).cloned().unwrap_or_else(|| vec![GaussRational::zero(); self.n])
    }

    pub fn has_logs(&self) -> bool {
        self.coeffs.keys().any(|(_, r)| *r > 0)
    }

    fn components(&self) -> Vec<LogSeries> {
        let mut y = vec![LogSeries::new(); self.n];
        for (key, v) in &self.coeffs {
            for (j, c) in v.iter().enumerate() {
                if !c.is_zero() {
                    y[j].insert(*key, c.clone());
                }
            }
        }
        y
    }

    /// Pure power part evaluated in floating point.
    pub fn eval(&self, t: f64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.n];
        for ((k, r), v) in &self.coeffs {
            if *r != 0 {
                continue;
            }
            let tk = t.powi(*k as i32);
            for (j, c) in v.iter().enumerate() {
                let (re, im) = c.to_f64_pair();
                out[j] += Complex64::new(re, im) * tk;
            }
        }
        out
    }

    /// Largest coefficient size at each order `k`, as a floating-point
    /// growth indicator.
    pub fn coefficient_norms(&self) -> Vec<(u32, f64)> {
        let mut out: BTreeMap<u32, f64> = BTreeMap::new();
        for ((k, _), v) in &self.coeffs {
            let m = v
                .iter()
                .map(|c| {
                    let (re, im) = c.to_f64_pair();
                    re.hypot(im)
                })
                .fold(0.0, f64::max);
            let e = out.entry(*k).or_insert(0.0);
            *e = e.max(m);
        }
        out.into_iter().collect()
    }
}

fn eval_f(f: &[Vec<(Vec<u16>, Complex64)>], t: f64, y: &[Complex64]) -> Vec<Complex64> {
    f.iter()
        .map(|terms| {
            terms
                .iter()
                .map(|(e, c)| {
                    let mut v = *c * t.powi(e[0] as i32);
                    for (j, yj) in y.iter().enumerate() {
                        v *= yj.powu(e[j + 1] as u32);
                    }
                    v
                })
                .sum()
        })
        .collect()
}

/// Integrate `dy/dτ = f(t, y)` in `τ = ln|t|` with classical RK4 from `t0`
/// (initial value taken from the series) out to `|t| = t_max`, and return the
/// largest componentwise distance to the series at the step points.
pub fn numeric_oracle(sys: &BBSystem, sol: &FormalLogSolution, t0: f64, t_max: f64, steps: usize) -> Result<f64> {
    if sol.has_logs() {
        return Err(Error::StepFailure("solution has logarithmic terms".into()));
    }
    if t0 == 0.0 || !t0.is_finite() || t_max <= t0.abs() || steps == 0 {
        return Err(Error::StepFailure(format!("bad interval t0 = {t0}, t_max = {t_max}")));
    }
    let f: Vec<Vec<(Vec<u16>, Complex64)>> = sys
        .f
        .iter()
        .map(|fj| {
            fj.terms()
                .map(|(m, c)| {
                    let (re, im) = c.to_f64_pair();
                    (m.exps().to_vec(), Complex64::new(re, im))
                })
                .collect()
        })
        .collect();
    let sign = t0.signum();
    let tau0 = t0.abs().ln();
    let h = (t_max.ln() - tau0) / steps as f64;
    let rhs = |tau: f64, y: &[Complex64]| eval_f(&f, sign * tau.exp(), y);
    let axpy = |y: &[Complex64], k: &[Complex64], a: f64| -> Vec<Complex64> {
        y.iter().zip(k).map(|(u, v)| u + v * a).collect()
    };
    let mut y = sol.eval(t0);
    let mut dev: f64 = 0.0;
    for i in 0..steps {
        let tau = tau0 + h * i as f64;
        let k1 = rhs(tau, &y);
        let k2 = rhs(tau + h / 2.0, &axpy(&y, &k1, h / 2.0));
        let k3 = rhs(tau + h / 2.0, &axpy(&y, &k2, h / 2.0));
        let k4 = rhs(tau + h, &axpy(&y, &k3, h));
        for j in 0..y.len() {
            y[j] += (k1[j] + k2[j] * 2.0 + k3[j] * 2.0 + k4[j]) * (h / 6.0);
        }
        if y.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::StepFailure(format!("non-finite state at step {}", i + 1)));
        }
        let t = sign * (tau + h).exp();
        for (a, b) in y.iter().zip(sol.eval(t)) {
            dev = dev.max((a - b).norm());
        }
    }
    Ok(dev)
}
