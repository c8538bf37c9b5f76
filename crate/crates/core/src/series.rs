//! Sparse multivariate formal power series over ℚ(i), truncated by total
//! degree.
//!
//! A [`Series`] with truncation `N` knows every coefficient of total degree
//! `≤ N` and nothing above. Binary operations track how far the result is
//! known: a product is exact through `min(N_a + v_b, N_b + v_a)` where `v` is
//! the valuation (lowest occupied degree), which never undercuts
//! `min(N_a, N_b)`.
//!
//! Variables are anonymous slots `0..nvars`; naming lives in
//! [`crate::literal::VarNames`]. The CR layout used throughout the crate is
//! `z_1..z_n, c_1..c_n, s` (see [`CrSpace`]), where `c_A` stands for the
//! formal conjugate `χ_A = z̄_A`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use smallvec::SmallVec;

use crate::coeff::GaussRational;
use crate::error::{Error, Result};

pub type Exps = SmallVec<[u16; 8]>;

/// Exponent vector with its cached total degree.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    deg: u32,
    exps: Exps,
}

impl Monomial {
    pub fn new(exps: Exps) -> Self {
        let deg = exps.iter().map(|&e| e as u32).sum();
        Self { deg, exps }
    }

    pub fn from_slice(exps: &[u16]) -> Self {
        Self::new(exps.iter().copied().collect())
    }

    pub fn one(nvars: usize) -> Self {
        Self { deg: 0, exps: SmallVec::from_elem(0, nvars) }
    }

    pub fn degree(&self) -> u32 {
        self.deg
    }

    pub fn exps(&self) -> &[u16] {
        &self.exps
    }

    pub fn exp(&self, var: usize) -> u16 {
        self.exps[var]
    }

    fn times(&self, other: &Monomial) -> Monomial {
        let exps = self.exps.iter().zip(other.exps.iter()).map(|(a, b)| a + b).collect();
        Monomial { deg: self.deg + other.deg, exps }
    }

    fn with_exp(&self, var: usize, e: u16) -> Monomial {
        let mut exps = self.exps.clone();
        exps[var] = e;
        Monomial::new(exps)
    }
}

/// Graded order: total degree first, then larger exponents of earlier
/// variables first.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.deg.cmp(&other.deg).then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

type Terms = BTreeMap<Monomial, GaussRational>;

/// Truncation used for exact scratch values that carry no tail.
pub(crate) const UNBOUNDED: i32 = i32::MAX / 4;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Series {
    nvars: usize,
    trunc: i32,
    terms: Terms,
}

fn mul_terms(a: &Terms, b: &Terms, cap: i32) -> Terms {
    let mut acc: HashMap<Monomial, GaussRational> = HashMap::new();
    for (ma, ca) in a {
        if ma.deg as i32 > cap {
            break;
        }
        for (mb, cb) in b {
            if (ma.deg + mb.deg) as i32 > cap {
                break;
            }
            let prod = ca * cb;
            acc.entry(ma.times(mb))
                .and_modify(|c| *c += &prod)
                .or_insert(prod);
        }
    }
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

impl Series {
    pub fn zero(nvars: usize, trunc: i32) -> Self {
        Self { nvars, trunc, terms: Terms::new() }
    }

    pub fn constant(nvars: usize, trunc: i32, c: GaussRational) -> Self {
        let mut s = Self::zero(nvars, trunc);
        s.insert(Monomial::one(nvars), c);
        s
    }

    pub fn one(nvars: usize, trunc: i32) -> Self {
        Self::constant(nvars, trunc, GaussRational::one())
    }

    /// The coordinate function of slot `var`.
    pub fn var(nvars: usize, var: usize, trunc: i32) -> Self {
        let mut exps: Exps = SmallVec::from_elem(0, nvars);
        exps[var] = 1;
        Self::monomial(Monomial::new(exps), GaussRational::one(), trunc)
    }

    pub fn monomial(m: Monomial, c: GaussRational, trunc: i32) -> Self {
        let mut s = Self::zero(m.exps.len(), trunc);
        s.insert(m, c);
        s
    }

    /// Build from raw terms; zero coefficients and terms above `trunc` are
    /// dropped, repeated monomials are summed.
    pub fn from_terms<I>(nvars: usize, trunc: i32, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, GaussRational)>,
    {
        let mut s = Self::zero(nvars, trunc);
        for (m, c) in terms {
            assert_eq!(m.exps.len(), nvars, "monomial arity");
            s.add_term(m, c);
        }
        s
    }

    fn insert(&mut self, m: Monomial, c: GaussRational) {
        if !c.is_zero() && (m.deg as i32) <= self.trunc {
            self.terms.insert(m, c);
        }
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: GaussRational) {
        if c.is_zero() || (m.deg as i32) > self.trunc {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Highest total degree whose coefficients are known.
    pub fn trunc(&self) -> i32 {
        self.trunc
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Zero through the known truncation.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u16]) -> GaussRational {
        self.terms.get(&Monomial::from_slice(exps)).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> GaussRational {
        self.coeff(&vec![0; self.nvars])
    }

    /// Lowest degree carrying a nonzero coefficient; for a series that is zero
    /// through its truncation this is `trunc + 1`.
    pub fn valuation(&self) -> i32 {
        self.terms.keys().next().map(|m| m.deg as i32).unwrap_or(self.trunc + 1)
    }

    fn check_vars(&self, other: &Series) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::VarMismatch { left: self.nvars, right: other.nvars });
        }
        Ok(())
    }

    /// Drop everything above `trunc` (never raises the truncation).
    pub fn truncate(&self, trunc: i32) -> Series {
        let trunc = trunc.min(self.trunc);
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.deg as i32 <= trunc)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        Series { nvars: self.nvars, trunc, terms }
    }

    /// Reinterpret the stored terms as exact through `trunc`. Only sound when
    /// the caller knows the series is a polynomial with no hidden tail (e.g. a
    /// parsed literal).
    pub fn with_trunc(&self, trunc: i32) -> Series {
        let mut s = self.clone();
        s.trunc = trunc;
        s.terms.retain(|m, _| m.deg as i32 <= trunc);
        s
    }

    /// Both series are known through degree `d` and agree there.
    pub fn agrees_through(&self, other: &Series, d: i32) -> bool {
        self.nvars == other.nvars
            && self.trunc >= d
            && other.trunc >= d
            && self.terms.iter().filter(|(m, _)| m.deg as i32 <= d).eq(other.terms.iter().filter(|(m, _)| m.deg as i32 <= d))
    }

    pub fn try_add(&self, other: &Series) -> Result<Series> {
        self.check_vars(other)?;
        let mut out = self.truncate(self.trunc.min(other.trunc));
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Series) -> Result<Series> {
        self.check_vars(other)?;
        let mut out = self.truncate(self.trunc.min(other.trunc));
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn multiply(&self, other: &Series) -> Result<Series> {
        self.check_vars(other)?;
        let trunc = (self.trunc + other.valuation())
            .min(other.trunc + self.valuation())
            .min(UNBOUNDED);
        let terms = mul_terms(&self.terms, &other.terms, trunc);
        Ok(Series { nvars: self.nvars, trunc, terms })
    }

    pub fn scale(&self, c: &GaussRational) -> Series {
        if c.is_zero() {
            return Series::zero(self.nvars, self.trunc);
        }
        let terms = self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect();
        Series { nvars: self.nvars, trunc: self.trunc, terms }
    }

    pub fn scale_int(&self, k: i64) -> Series {
        self.scale(&GaussRational::from_int(k))
    }

    pub fn pow(&self, e: u32) -> Series {
        let mut acc = Series::one(self.nvars, UNBOUNDED);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        if acc.trunc == UNBOUNDED {
            acc.trunc = self.trunc.max(0);
        }
        acc
    }

    /// Multiplicative inverse of a series with nonzero constant term.
    pub fn reciprocal(&self) -> Result<Series> {
        let c0 = self.constant_term();
        let inv0 = c0.inv().ok_or(Error::NotAUnit)?;
        let n = self.trunc;
        if n < 0 {
            return Err(Error::NotAUnit);
        }
        // Homogeneous recursion R_d = -c0⁻¹ Σ_{j=1..d} A_j R_{d-j}.
        let mut parts: Vec<Terms> = vec![Terms::new(); n as usize + 1];
        for (m, c) in &self.terms {
            parts[m.deg as usize].insert(m.clone(), c.clone());
        }
        let mut out: Vec<Terms> = Vec::with_capacity(n as usize + 1);
        let mut r0 = Terms::new();
        r0.insert(Monomial::one(self.nvars), inv0.clone());
        out.push(r0);
        let minus_inv0 = -&inv0;
        for d in 1..=n as usize {
            let mut acc: HashMap<Monomial, GaussRational> = HashMap::new();
            for j in 1..=d {
                if parts[j].is_empty() || out[d - j].is_empty() {
                    continue;
                }
                for (ma, ca) in &parts[j] {
                    for (mb, cb) in &out[d - j] {
                        let prod = ca * cb;
                        acc.entry(ma.times(mb)).and_modify(|c| *c += &prod).or_insert(prod);
                    }
                }
            }
            let rd = acc
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(m, c)| (m, &c * &minus_inv0))
                .collect();
            out.push(rd);
        }
        let terms = out.into_iter().flatten().collect();
        Ok(Series { nvars: self.nvars, trunc: n, terms })
    }

    /// Exact partial derivative in slot `var`; the truncation drops by one.
    pub fn partial(&self, var: usize) -> Series {
        let mut out = Series::zero(self.nvars, self.trunc - 1);
        for (m, c) in &self.terms {
            let e = m.exps[var];
            if e == 0 {
                continue;
            }
            out.add_term(m.with_exp(var, e - 1), c.scale(&BigRational::from_integer(e.into())));
        }
        out
    }

    /// Divide by `x_var^power`, failing on the first monomial whose exponent
    /// is too small.
    pub fn divide_by_var_power(&self, var: usize, power: u32, var_name: &str) -> Result<Series> {
        let mut out = Series::zero(self.nvars, self.trunc - power as i32);
        for (m, c) in &self.terms {
            let e = m.exps[var] as u32;
            if e < power {
                let mono = Series::monomial(m.clone(), GaussRational::one(), self.trunc);
                let monomial = if self.nvars % 2 == 1 {
                    mono.display_with(&crate::literal::VarNames::cr(self.nvars / 2)).to_string()
                } else {
                    mono.to_string()
                };
                return Err(Error::Divisibility {
                    var: var_name.to_string(),
                    power,
                    monomial,
                });
            }
            out.add_term(m.with_exp(var, (e - power) as u16), c.clone());
        }
        Ok(out)
    }

    /// Multiply by `x_var^power`.
    pub fn shift_var(&self, var: usize, power: u32) -> Series {
        let mut out = Series::zero(self.nvars, (self.trunc + power as i32).min(UNBOUNDED));
        for (m, c) in &self.terms {
            out.add_term(m.with_exp(var, m.exps[var] + power as u16), c.clone());
        }
        out
    }

    /// Coefficient of `x_var^power`, as a series with that slot zeroed.
    /// Known through `trunc - power`.
    pub fn coefficient_of(&self, var: usize, power: u16) -> Series {
        let mut out = Series::zero(self.nvars, self.trunc - power as i32);
        for (m, c) in &self.terms {
            if m.exps[var] == power {
                out.add_term(m.with_exp(var, 0), c.clone());
            }
        }
        out
    }

    /// Set slot `var` to zero.
    pub fn at_zero(&self, var: usize) -> Series {
        self.coefficient_of(var, 0).with_trunc(self.trunc)
    }

    /// Terms of exactly total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Series {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.deg == d)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        Series { nvars: self.nvars, trunc: self.trunc, terms }
    }

    /// Largest exponent of slot `var` among stored terms.
    pub fn max_exp(&self, var: usize) -> u16 {
        self.terms.keys().map(|m| m.exps[var]).max().unwrap_or(0)
    }

    pub fn conj_coeffs(&self) -> Series {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), c.conj())).collect();
        Series { nvars: self.nvars, trunc: self.trunc, terms }
    }

    /// Complex conjugation in the CR layout: swaps the `z` and `c` blocks and
    /// conjugates every coefficient.
    pub fn conjugate(&self) -> Result<Series> {
        let space = CrSpace::of(self)?;
        let n = space.n;
        let mut out = Series::zero(self.nvars, self.trunc);
        for (m, c) in &self.terms {
            let mut exps = m.exps.clone();
            for a in 0..n {
                exps.swap(a, n + a);
            }
            out.add_term(Monomial::new(exps), c.conj());
        }
        Ok(out)
    }

    /// Real in the CR sense: equal to its own conjugate.
    pub fn is_real(&self) -> Result<bool> {
        Ok(self.conjugate()? == *self)
    }

    /// Substitute `x_i ↦ images[i]`. Images must share one variable space and
    /// have no constant term (so every truncated tail stays high-order).
    pub fn substitute(&self, images: &[Series]) -> Result<Series> {
        if images.len() != self.nvars {
            return Err(Error::VarMismatch { left: self.nvars, right: images.len() });
        }
        let target_vars = images.first().map(|s| s.nvars).unwrap_or(0);
        for im in images {
            if im.nvars != target_vars {
                return Err(Error::VarMismatch { left: target_vars, right: im.nvars });
            }
        }
        let used: Vec<bool> = (0..self.nvars).map(|v| self.max_exp(v) > 0).collect();
        for (v, im) in images.iter().enumerate() {
            if used[v] && !im.constant_term().is_zero() {
                return Err(Error::NonzeroConstant);
            }
        }
        // Unknown outer terms have degree > trunc; each factor has valuation
        // at least `vmin`.
        let vmin = images.iter().map(|s| s.valuation().max(1)).min().unwrap_or(1);
        let tail = ((self.trunc as i64 + 1) * vmin as i64 - 1).min(UNBOUNDED as i64) as i32;
        let mut out_trunc = tail;
        let mut powers: Vec<Vec<Series>> = images
            .iter()
            .map(|im| vec![Series::one(target_vars, tail.max(im.trunc))])
            .collect();
        let mut acc = Series::zero(target_vars, UNBOUNDED);
        for (m, c) in &self.terms {
            let mut term = Series::constant(target_vars, UNBOUNDED, c.clone());
            for (v, &e) in m.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[v].len() <= e as usize {
                    let next = &powers[v][powers[v].len() - 1] * &images[v];
                    powers[v].push(next);
                }
                term = &term * &powers[v][e as usize];
            }
            out_trunc = out_trunc.min(term.trunc);
            acc.trunc = acc.trunc.min(term.trunc);
            for (tm, tc) in term.terms {
                acc.add_term(tm, tc);
            }
        }
        Ok(acc.truncate(out_trunc))
    }

    /// Treat the series as an exact polynomial and set slot `var` to the
    /// constant `value`. The result is declared exact through `trunc`.
    pub fn specialize_exact(&self, var: usize, value: &GaussRational, trunc: i32) -> Series {
        let mut out = Series::zero(self.nvars, trunc);
        for (m, c) in &self.terms {
            let e = m.exps[var];
            out.add_term(m.with_exp(var, 0), c * &value.pow(e as u32));
        }
        out
    }

    /// Treat the series as an exact polynomial and replace each slot `v` by
    /// `v + shifts[v]`. The result is declared exact through the original
    /// truncation.
    pub fn translate_exact(&self, shifts: &[GaussRational]) -> Series {
        let nv = self.nvars;
        let images: Vec<Series> = (0..nv)
            .map(|v| {
                let mut x = Series::var(nv, v, UNBOUNDED);
                if let Some(a) = shifts.get(v).filter(|a| !a.is_zero()) {
                    x.add_term(Monomial::one(nv), a.clone());
                }
                x
            })
            .collect();
        let mut acc = Series::zero(nv, UNBOUNDED);
        for (m, c) in &self.terms {
            let mut term = Series::constant(nv, UNBOUNDED, c.clone());
            for (v, &e) in m.exps.iter().enumerate() {
                if e > 0 {
                    term = &term * &images[v].pow(e as u32);
                }
            }
            for (tm, tc) in term.terms {
                acc.add_term(tm, tc);
            }
        }
        acc.truncate(self.trunc)
    }

    /// Re-embed into a space of `nvars` slots via `map[old] = new`.
    pub fn remap(&self, nvars: usize, map: &[usize]) -> Series {
        let mut out = Series::zero(nvars, self.trunc);
        for (m, c) in &self.terms {
            let mut exps: Exps = SmallVec::from_elem(0, nvars);
            for (old, &e) in m.exps.iter().enumerate() {
                exps[map[old]] += e;
            }
            out.add_term(Monomial::new(exps), c.clone());
        }
        out
    }

    /// Compose a univariate `outer(u)` with `inner` (no constant term).
    pub fn compose(outer: &Series, inner: &Series) -> Result<Series> {
        if outer.nvars != 1 {
            return Err(Error::VarMismatch { left: 1, right: outer.nvars });
        }
        outer.substitute(std::slice::from_ref(inner))
    }

    /// Solve `t = G(params, t)` for `t(params)` with `t(0) = 0`, where `t` is
    /// slot `t_var` of `g`. The result lives in the same space with no `t`
    /// dependence.
    pub fn implicit_solve(g: &Series, t_var: usize) -> Result<Series> {
        if !g.constant_term().is_zero() {
            return Err(Error::NonzeroConstant);
        }
        let mut lin = vec![0u16; g.nvars];
        lin[t_var] = 1;
        let dt0 = g.coeff(&lin);
        if !dt0.is_zero() {
            return Err(Error::NotAContraction(dt0.to_string()));
        }
        let nv = g.nvars;
        let mut images: Vec<Series> = (0..nv).map(|v| Series::var(nv, v, g.trunc)).collect();
        let mut t = Series::zero(nv, g.trunc);
        let max_iter = g.trunc.max(0) as usize + 2;
        for _ in 0..max_iter {
            images[t_var] = t.clone();
            let next = g.substitute(&images)?;
            if next.terms == t.terms {
                return Ok(next.truncate(g.trunc));
            }
            t = next;
        }
        Err(Error::Divergence(max_iter))
    }

    pub fn display_with<'a>(&'a self, names: &'a crate::literal::VarNames) -> crate::literal::SeriesDisplay<'a> {
        crate::literal::SeriesDisplay { series: self, names }
    }
}

/// Debug-oriented rendering with anonymous variable names `x0, x1, ...`;
/// use [`Series::display_with`] for the DSL syntax.
impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = crate::literal::VarNames::anonymous(self.nvars);
        write!(f, "{}", self.display_with(&names))
    }
}

impl<'a> Add<&'a Series> for &'a Series {
    type Output = Series;
    /// Panics on mismatched variable spaces; see [`Series::try_add`].
    fn add(self, o: &Series) -> Series {
        self.try_add(o).expect("series variable mismatch")
    }
}

impl<'a> Sub<&'a Series> for &'a Series {
    type Output = Series;
    fn sub(self, o: &Series) -> Series {
        self.try_sub(o).expect("series variable mismatch")
    }
}

impl<'a> Mul<&'a Series> for &'a Series {
    type Output = Series;
    fn mul(self, o: &Series) -> Series {
        self.multiply(o).expect("series variable mismatch")
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        self.scale(&GaussRational::from_int(-1))
    }
}

/// Slot bookkeeping for the CR layout `z_1..z_n, c_1..c_n, s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CrSpace {
    pub n: usize,
}

impl CrSpace {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn of(series: &Series) -> Result<Self> {
        if series.nvars % 2 == 0 {
            return Err(Error::NotCrLayout(series.nvars));
        }
        Ok(Self { n: (series.nvars - 1) / 2 })
    }

    pub fn nvars(&self) -> usize {
        2 * self.n + 1
    }

    pub fn z(&self, a: usize) -> usize {
        a
    }

    pub fn c(&self, a: usize) -> usize {
        self.n + a
    }

    pub fn s(&self) -> usize {
        2 * self.n
    }

    pub fn var(&self, slot: usize, trunc: i32) -> Series {
        Series::var(self.nvars(), slot, trunc)
    }

    pub fn constant(&self, trunc: i32, c: GaussRational) -> Series {
        Series::constant(self.nvars(), trunc, c)
    }

    pub fn zero(&self, trunc: i32) -> Series {
        Series::zero(self.nvars(), trunc)
    }

    pub fn one(&self, trunc: i32) -> Series {
        Series::one(self.nvars(), trunc)
    }
}

/// `arctan(u) = Σ (-1)^j u^{2j+1}/(2j+1)` through degree `trunc`.
pub fn arctan_series(trunc: i32) -> Series {
    let mut s = Series::zero(1, trunc);
    let mut k = 1;
    while k <= trunc {
        let j = (k - 1) / 2;
        let sign = if j % 2 == 0 { 1 } else { -1 };
        s.add_term(Monomial::from_slice(&[k as u16]), GaussRational::ratio(sign, k as i64));
        k += 2;
    }
    s
}

/// `exp(u) = Σ u^k/k!` through degree `trunc`.
pub fn exp_series(trunc: i32) -> Series {
    let mut s = Series::zero(1, trunc);
    let mut fact = BigRational::from_integer(1.into());
    for k in 0..=trunc.max(0) {
        if k > 0 {
            fact *= BigRational::from_integer(k.into());
        }
        let c = GaussRational::from_real(BigRational::from_integer(1.into()) / &fact);
        s.add_term(Monomial::from_slice(&[k as u16]), c);
    }
    s
}

/// Helper for tests and callers that only hold real rationals.
pub fn rational(num: i64, den: i64) -> GaussRational {
    GaussRational::ratio(num, den)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::literal::{parse_series, VarNames};

    fn cr1(src: &str, trunc: i32) -> Series {
        parse_series(src, &VarNames::cr(1), trunc).unwrap()
    }

    fn uni(src: &str, trunc: i32) -> Series {
        parse_series(src, &VarNames::univariate("u"), trunc).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        let p = &cr1("1+z1", 8) * &cr1("1-z1", 8);
        assert_eq!(p, cr1("1 - z1^2", 8));
    }

    #[test]
    fn monomial_product() {
        let p = &cr1("s*z1*c1", 8) * &cr1("s", 8);
        assert_eq!(p, cr1("s^2*z1*c1", 9));
    }

    #[test]
    fn product_respects_truncation() {
        let a = cr1("1+s", 1);
        let p = &a * &a;
        assert_eq!(p.trunc(), 1);
        assert_eq!(p, cr1("1 + 2*s", 1));
    }

    #[test]
    fn product_gains_precision_from_valuation() {
        let a = cr1("s", 3);
        let p = &a * &a;
        assert_eq!(p.trunc(), 4);
    }

    #[test]
    fn mismatched_spaces_error() {
        let a = Series::one(3, 4);
        let b = Series::one(5, 4);
        assert_eq!(a.multiply(&b), Err(Error::VarMismatch { left: 3, right: 5 }));
    }

    #[test]
    fn arctan_of_zc() {
        let inner = cr1("z1*c1", 8);
        let got = Series::compose(&arctan_series(8), &inner).unwrap();
        assert!(got.agrees_through(&cr1("z1*c1 - 1/3*z1^3*c1^3", 8), 8));
        // (1 + u²)·arctan'(u) = 1
        let a = arctan_series(12);
        let check = &uni("1 + u^2", 12) * &a.partial(0);
        assert_eq!(check, Series::one(1, 11));
    }

    #[test]
    fn exp_at_zero_and_square() {
        let zero = Series::zero(3, 6);
        assert_eq!(Series::compose(&exp_series(6), &zero).unwrap().constant_term(), GaussRational::one());
        let got = Series::compose(&uni("u^2", 6), &cr1("s + s^2", 6)).unwrap();
        assert!(got.agrees_through(&cr1("s^2 + 2*s^3 + s^4", 6), 6));
    }

    #[test]
    fn compose_rejects_constant_inner() {
        assert_eq!(Series::compose(&uni("u", 4), &cr1("1 + s", 4)), Err(Error::NonzeroConstant));
    }

    #[test]
    fn geometric_reciprocal() {
        let r = uni("1 + u", 5).reciprocal().unwrap();
        assert_eq!(r, uni("1 - u + u^2 - u^3 + u^4 - u^5", 5));
        let a = cr1("1 + i*s*z1*c1", 9);
        let r = a.reciprocal().unwrap();
        assert_eq!(r, cr1("1 - i*s*z1*c1 - s^2*z1^2*c1^2 + i*s^3*z1^3*c1^3", 9));
        assert!((&a * &r).truncate(9) == Series::one(3, 9));
        assert_eq!(cr1("s", 4).reciprocal(), Err(Error::NotAUnit));
    }

    #[test]
    fn partials() {
        assert_eq!(cr1("s^2*z1*c1", 8).partial(2), cr1("2*s*z1*c1", 7));
        assert_eq!(cr1("z1*c1 + z1^3", 8).partial(0), cr1("c1 + 3*z1^2", 7));
        let two = parse_series("z1*c1", &VarNames::cr(2), 8).unwrap();
        assert!(two.partial(3).is_zero());
    }

    #[test]
    fn conjugation() {
        assert_eq!(cr1("i*z1", 4).conjugate().unwrap(), cr1("-i*c1", 4));
        assert!(cr1("s*z1*c1", 4).is_real().unwrap());
        let a = cr1("i*s*z1", 4);
        assert_eq!(a.conjugate().unwrap(), cr1("-i*s*c1", 4));
        assert!(!a.is_real().unwrap());
        assert_eq!(Series::one(2, 3).conjugate(), Err(Error::NotCrLayout(2)));
    }

    #[test]
    fn s_division() {
        let got = cr1("s^2*z1*c1 + s^3", 8).divide_by_var_power(2, 2, "s").unwrap();
        assert_eq!(got, cr1("z1*c1 + s", 6));
        let err = cr1("s*z1", 8).divide_by_var_power(2, 2, "s").unwrap_err();
        assert_eq!(err, Error::Divisibility { var: "s".into(), power: 2, monomial: "z1*s".into() });
        assert!(Series::zero(3, 8).divide_by_var_power(2, 3, "s").unwrap().is_zero());
    }

    /// t = ξ(s² + t²) by direct power matching: t = Σ a_j ξ^{2j-1} s^{2j}
    /// with a_1 = 1, a_j = Σ_{p+q=j} a_p a_q (shifted Catalan numbers).
    #[test]
    fn implicit_quadratic_in_three_vars() {
        let names = VarNames::new(vec!["x".into(), "s".into(), "t".into()]);
        let g = parse_series("x*(s^2 + t^2)", &names, 12).unwrap();
        let t = Series::implicit_solve(&g, 2).unwrap();
        let mut a = vec![0i64, 1];
        for j in 2..4 {
            a.push((1..j).map(|p| a[p] * a[j - p]).sum());
        }
        let mut expect = Series::zero(3, 12);
        for j in 1..4usize {
            expect.add_term(Monomial::from_slice(&[(2 * j - 1) as u16, (2 * j) as u16, 0]), GaussRational::from_int(a[j]));
        }
        assert_eq!(t.trunc(), 12, "{t:?}");
        assert_eq!(t, expect);
        assert_eq!(t.truncate(11), parse_series("x*s^2 + x^3*s^4 + 2*x^5*s^6", &names, 11).unwrap());
        // back substitution
        let back = g.substitute(&[Series::var(3, 0, 12), Series::var(3, 1, 12), t.clone()]).unwrap();
        assert_eq!(back.truncate(12), t);
    }

    #[test]
    fn implicit_catalan() {
        let names = VarNames::new(vec!["s".into(), "t".into()]);
        let g = parse_series("s + t^2", &names, 10).unwrap();
        let t = Series::implicit_solve(&g, 1).unwrap();
        let mut cat = vec![1i64];
        for n in 1..10 {
            cat.push(cat[n - 1] * 2 * (2 * n as i64 - 1) / (n as i64 + 1));
        }
        for d in 1..=10u16 {
            assert_eq!(t.coeff(&[d, 0]), GaussRational::from_int(cat[d as usize - 1]));
        }
        let zero = parse_series("0", &names, 10).unwrap();
        assert!(Series::implicit_solve(&zero, 1).unwrap().is_zero());
        let bad = parse_series("s + 1/2*t", &names, 10).unwrap();
        assert!(matches!(Series::implicit_solve(&bad, 1), Err(Error::NotAContraction(_))));
    }

    #[test]
    fn graded_order() {
        let s = cr1("s + z1 + c1 + z1*c1 + 1", 4);
        let order: Vec<Vec<u16>> = s.terms().map(|(m, _)| m.exps().to_vec()).collect();
        assert_eq!(order, vec![vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, 0]]);
    }
}
