//! Hypersurfaces `Im w = φ(z, z̄, Re w)` in normal coordinates and their
//! biholomorphic invariants at the origin.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::coeff::GaussRational;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::literal::VarNames;
use crate::series::{CrSpace, Monomial, Series};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypersurface {
    pub n: usize,
    pub trunc: i32,
    /// Series in `z_1..z_n, c_1..c_n, s`.
    pub phi: Series,
    /// Forces the vanishing order used when desingularizing; normally the
    /// computed `m` is used.
    pub m_override: Option<u32>,
}

/// The vanishing order in `s` and what it determines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InfiniteType {
    LeviFlat,
    Finite {
        m: u32,
        /// Coefficient of `s^m` (no `s` dependence).
        phi_m: Series,
        /// Lowest total degree of `phi_m`.
        r: u32,
        /// `φ / s^m`.
        psi: Series,
    },
}

impl InfiniteType {
    pub fn m(&self) -> Option<u32> {
        match self {
            InfiniteType::LeviFlat => None,
            InfiniteType::Finite { m, .. } => Some(*m),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Essentiality {
    Certified(u32),
    NotEssentialUpTo(u32),
    Inconclusive,
}

impl fmt::Display for Essentiality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Essentiality::Certified(d) => write!(f, "certified-essential({d})"),
            Essentiality::NotEssentialUpTo(d) => write!(f, "not-essential-up-to({d})"),
            Essentiality::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Nondegeneracy {
    Ell(u32),
    DegenerateUpTo(u32),
}

impl fmt::Display for Nondegeneracy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nondegeneracy::Ell(l) => write!(f, "{l}"),
            Nondegeneracy::DegenerateUpTo(l) => write!(f, "degenerate-up-to({l})"),
        }
    }
}

fn factorial(k: u16) -> BigRational {
    let mut acc = BigInt::from(1);
    for j in 2..=k as u64 {
        acc *= j;
    }
    BigRational::from_integer(acc)
}

impl Hypersurface {
    pub fn new(n: usize, trunc: i32, phi: Series) -> Result<Self> {
        if phi.nvars() != 2 * n + 1 {
            return Err(Error::Arity(format!("φ has {} variables, expected {}", phi.nvars(), 2 * n + 1)));
        }
        Ok(Self { n, trunc, phi: phi.truncate(trunc), m_override: None })
    }

    pub fn space(&self) -> CrSpace {
        CrSpace::new(self.n)
    }

    pub fn names(&self) -> VarNames {
        VarNames::cr(self.n)
    }

    pub fn show(&self, s: &Series) -> String {
        s.display_with(&self.names()).to_string()
    }

    fn mono_text(&self, m: &Monomial) -> String {
        self.show(&Series::monomial(m.clone(), GaussRational::one(), self.trunc))
    }

    /// Normality `φ(z,0,s) = φ(0,χ,s) = 0` and reality `φ = conj(φ)`.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        for (m, _) in self.phi.terms() {
            let e = m.exps();
            if e[..n].iter().all(|&x| x == 0) || e[n..2 * n].iter().all(|&x| x == 0) {
                return Err(Error::NotNormal(self.mono_text(m)));
            }
        }
        let conj = self.phi.conjugate()?;
        for (m, c) in self.phi.terms() {
            let mut mirror: Vec<u16> = m.exps().to_vec();
            for a in 0..n {
                mirror.swap(a, n + a);
            }
            let mc = self.phi.coeff(&mirror);
            if conj.coeff(m.exps()) != *c {
                let mm = Monomial::from_slice(&mirror);
                return Err(Error::NotReal {
                    monomial: self.mono_text(m),
                    coeff: c.to_string(),
                    mirror: self.mono_text(&mm),
                    mirror_coeff: mc.to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn infinite_type(&self) -> Result<InfiniteType> {
        let s = self.space().s();
        let m = match self.phi.terms().map(|(mono, _)| mono.exp(s)).min() {
            None => return Ok(InfiniteType::LeviFlat),
            Some(m) => m,
        };
        let phi_m = self.phi.coefficient_of(s, m);
        let r = phi_m.valuation() as u32;
        let psi = self.phi.divide_by_var_power(s, m as u32, "s")?;
        Ok(InfiniteType::Finite { m: m as u32, phi_m, r, psi })
    }

    /// The `m` used for desingularization.
    pub fn desingularization_order(&self) -> Result<u32> {
        if let Some(m) = self.m_override {
            return Ok(m);
        }
        self.infinite_type()?.m().ok_or(Error::LeviFlat)
    }

    /// Coefficients `a_α(z)` of `χ^α` in `ψ(z, χ, 0)`, keyed by `α`, each
    /// with the degree through which it is known.
    pub fn chi_coefficients(&self) -> Result<BTreeMap<Vec<u16>, (Series, i32)>> {
        let (psi, _) = self.psi()?;
        let sp = self.space();
        let n = self.n;
        let psi0 = psi.coefficient_of(sp.s(), 0);
        let mut out: BTreeMap<Vec<u16>, Series> = BTreeMap::new();
        for (mono, c) in psi0.terms() {
            let e = mono.exps();
            let alpha = e[n..2 * n].to_vec();
            let mut z: Vec<u16> = e[..n].to_vec();
            z.resize(n, 0);
            let entry = out.entry(alpha).or_insert_with(|| Series::zero(n, psi0.trunc()));
            entry.add_term(Monomial::from_slice(&z), c.clone());
        }
        Ok(out
            .into_iter()
            .map(|(alpha, a)| {
                let known = psi0.trunc() - alpha.iter().map(|&x| x as i32).sum::<i32>();
                (alpha, (a, known))
            })
            .collect())
    }

    fn psi(&self) -> Result<(Series, u32)> {
        match self.infinite_type()? {
            InfiniteType::LeviFlat => Err(Error::LeviFlat),
            InfiniteType::Finite { m, psi, .. } => Ok((psi, m)),
        }
    }

    /// Search `d = 1..=max_degree` for a certificate that the ideal of the
    /// `a_α` contains every monomial of degree `d` modulo degree `d + 1`
    /// (hence, by Nakayama, the `d`-th power of the maximal ideal).
    pub fn essentiality(&self, max_degree: u32) -> Result<Essentiality> {
        let coeffs = self.chi_coefficients()?;
        let n = self.n;
        for d in 1..=max_degree {
            let usable: Vec<&Series> =
                coeffs.values().filter(|(_, known)| *known >= d as i32).map(|(a, _)| a).collect();
            if usable.is_empty() {
                continue;
            }
            let basis = monomials_up_to(n, d);
            let index: BTreeMap<&Vec<u16>, usize> = basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
            let mut cols: Vec<Vec<GaussRational>> = Vec::new();
            for a in &usable {
                for delta in &basis {
                    let ddeg: u32 = delta.iter().map(|&x| x as u32).sum();
                    let mut col = vec![GaussRational::zero(); basis.len()];
                    let mut any = false;
                    for (mono, c) in a.terms() {
                        if mono.degree() + ddeg > d {
                            continue;
                        }
                        let prod: Vec<u16> = mono.exps().iter().zip(delta).map(|(x, y)| x + y).collect();
                        col[index[&prod]] = c.clone();
                        any = true;
                    }
                    if any {
                        cols.push(col);
                    }
                }
            }
            let span_rank = linalg::rank(&cols);
            let top: Vec<&Vec<u16>> = basis.iter().filter(|m| m.iter().map(|&x| x as u32).sum::<u32>() == d).collect();
            let all_in = top.iter().all(|gamma| {
                let mut with = cols.clone();
                let mut v = vec![GaussRational::zero(); basis.len()];
                v[index[*gamma]] = GaussRational::one();
                with.push(v);
                linalg::rank(&with) == span_rank
            });
            if all_in {
                return Ok(Essentiality::Certified(d));
            }
        }
        // Axis obstruction: no a_α has a pure power of z_j among its known
        // terms, so z_j^d never enters the ideal at this truncation.
        for j in 0..n {
            let hits_axis = coeffs.values().any(|(a, _)| {
                a.terms().any(|(mono, _)| {
                    let e = mono.exps();
                    e[j] > 0 && e.iter().enumerate().all(|(k, &x)| k == j || x == 0)
                })
            });
            if !hits_axis {
                return Ok(Essentiality::NotEssentialUpTo(max_degree));
            }
        }
        Ok(Essentiality::Inconclusive)
    }

    /// The vectors `∂_χ^α ∂_z ψ (0)` for `1 ≤ |α| ≤ order`, grouped by `|α|`.
    pub fn derivative_vectors(&self, order: u32) -> Result<Vec<Vec<Vec<GaussRational>>>> {
        let (psi, _) = self.psi()?;
        if order as i32 + 1 > psi.trunc() {
            return Err(Error::TruncationExhausted(format!(
                "χ-derivatives of order {order} need ψ through degree {}, known through {}",
                order + 1,
                psi.trunc()
            )));
        }
        let n = self.n;
        let mut out = vec![Vec::new(); order as usize + 1];
        for k in 1..=order {
            for alpha in multi_indices(n, k) {
                let mut fact = BigRational::from_integer(1.into());
                for &a in &alpha {
                    fact *= factorial(a);
                }
                let v: Vec<GaussRational> = (0..n)
                    .map(|j| {
                        let mut e = vec![0u16; 2 * n + 1];
                        e[j] = 1;
                        e[n..2 * n].copy_from_slice(&alpha);
                        psi.coeff(&e).scale(&fact)
                    })
                    .collect();
                out[k as usize].push(v);
            }
        }
        Ok(out)
    }

    /// Least `ℓ ≤ ell_max` for which the vectors `∂_χ^α ∂_z ψ (0)`,
    /// `|α| ≤ ℓ`, span `ℂⁿ`.
    pub fn nondegeneracy(&self, ell_max: u32) -> Result<Nondegeneracy> {
        let vecs = self.derivative_vectors(ell_max)?;
        let mut rows: Matrix = Vec::new();
        for (k, group) in vecs.iter().enumerate().skip(1) {
            rows.extend(group.iter().cloned());
            if linalg::rank(&rows) == self.n {
                return Ok(Nondegeneracy::Ell(k as u32));
            }
        }
        Ok(Nondegeneracy::DegenerateUpTo(ell_max))
    }
}

/// All exponent vectors in `n` variables of total degree exactly `k`, in
/// lexicographically descending order.
pub fn multi_indices(n: usize, k: u32) -> Vec<Vec<u16>> {
    if n == 0 {
        return if k == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in (0..=k).rev() {
        for mut rest in multi_indices(n - 1, k - first) {
            rest.insert(0, first as u16);
            out.push(rest);
        }
    }
    out
}

/// All exponent vectors of total degree `≤ d`, graded.
pub fn monomials_up_to(n: usize, d: u32) -> Vec<Vec<u16>> {
    (0..=d).flat_map(|k| multi_indices(n, k)).collect()
}
