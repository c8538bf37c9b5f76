//! Levi matrix, iterated Lie-derivative functions, their desingularization
//! along `s = 0`, and the kernel filtration at the origin.
//!
//! Two normalizations appear. The hermitian Levi matrix is
//! `h_{ĀB} = (1/2i)⟨θ, [L_Ā, L_B]⟩`, whose leading term is the mixed Hessian
//! of the lowest-order part of `φ_m`. The iterated functions use the Lie
//! normalization `h_{Ā₁…Ā_k D} = ⟨𝓛_{Ā_k}⋯𝓛_{Ā₁}θ, L_D⟩` and
//! `h_{Ā₁…Ā_k} = ⟨𝓛_{Ā_k}⋯𝓛_{Ā₁}θ, T⟩`; for a single letter the two differ by
//! the factor `−2i`. Recursions and transformation laws that mix `h_{ĀB}`
//! with `h_Ā` hold in the Lie normalization.

use std::collections::BTreeMap;

use crate::coeff::GaussRational;
use crate::error::{Error, Result};
use crate::frame::{CoFrameForm, Frame};
use crate::hypersurface::{Hypersurface, InfiniteType};
use crate::linalg::{self, Matrix};
use crate::series::Series;

/// Barred indices `Ā₁…Ā_k`, each in `0..n`.
pub type Word = Vec<usize>;

#[derive(Clone, Debug)]
pub struct LeviData {
    pub n: usize,
    /// Hermitian Levi matrix, indexed `[A][B]` for `h_{ĀB}`.
    pub h: Vec<Vec<Series>>,
    /// Iterated forms `𝓛_w θ`, for every word up to the requested length.
    pub forms: BTreeMap<Word, CoFrameForm>,
    frame_t: usize,
}

/// Quantities divided by `s^m`.
#[derive(Clone, Debug)]
pub struct Desingularized {
    pub m: u32,
    /// Hermitian `h⁰_{ĀB}`.
    pub h0: Vec<Vec<Series>>,
    /// Lie-normalized `h⁰_{wD}` for every nonempty stored word.
    pub h0_words: BTreeMap<Word, Vec<Series>>,
    /// `h⁰_Ā`, defined by `[L_Ā, s^m T] = −s^m h⁰_Ā T`.
    pub h0_bar: Vec<Series>,
    /// `a_C̄ = m (L_C̄ s)/s`.
    pub a_bar: Vec<Series>,
}

impl Desingularized {
    /// Lie-normalized `h⁰_{ĀB}`.
    pub fn h0_lie(&self, a: usize, b: usize) -> &Series {
        &self.h0_words[&vec![a]][b]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filtration {
    /// `r_k = n − dim F_k(0)` for `k = 0, 1, …`.
    pub ranks: Vec<usize>,
    /// Least `k` at which the filtration reaches its final value.
    pub ell: u32,
    /// `F_ℓ(0) = {0}`.
    pub nondegenerate: bool,
    /// `h⁰_{ĀB}(0) ≠ 0`.
    pub type_two: bool,
    /// Columns: a basis adapted to the filtration, with `F_k(0)` spanned by
    /// the last `n − r_k` columns.
    pub basis_change: Matrix,
    /// Value matrices at the origin, one per word length `k ≥ 1`: rows are
    /// words, columns `D`.
    pub value_matrices: Vec<Matrix>,
}

pub fn words(n: usize, len: usize) -> Vec<Word> {
    let mut out: Vec<Word> = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..n).map(move |c| {
                    let mut v = w.clone();
                    v.push(c);
                    v
                })
            })
            .collect();
    }
    out
}

fn divide_s(x: &Series, s_slot: usize, m: u32) -> Result<Series> {
    x.divide_by_var_power(s_slot, m, "s")
}

impl LeviData {
    /// Levi matrix plus iterated forms for words of length `≤ max_word`.
    pub fn compute(frame: &Frame, max_word: usize) -> LeviData {
        let n = frame.n();
        let half_i = GaussRational::i().scale(&num_rational::BigRational::new(2.into(), 1.into()));
        let inv = half_i.inv().expect("2i is invertible");
        let h = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| frame.bracket_components(frame.lbar(a), frame.l(b))[frame.t()].scale(&inv))
                    .collect()
            })
            .collect();
        let mut forms = BTreeMap::new();
        forms.insert(Vec::new(), frame.theta());
        for len in 1..=max_word {
            for w in words(n, len) {
                let (last, prefix) = w.split_last().expect("nonempty");
                let prev = &forms[prefix];
                let next = frame.lie_derivative_frame(prev, frame.lbar(*last));
                forms.insert(w.clone(), next);
            }
        }
        LeviData { n, h, forms, frame_t: frame.t() }
    }

    pub fn max_word(&self) -> usize {
        self.forms.keys().map(Vec::len).max().unwrap_or(0)
    }

    /// `h_{wD}` (Lie normalization).
    pub fn h_word(&self, w: &[usize], d: usize) -> &Series {
        self.forms[w].pairing(d)
    }

    /// `h_w = ⟨𝓛_w θ, T⟩`.
    pub fn h_scalar(&self, w: &[usize]) -> &Series {
        self.forms[w].pairing(self.frame_t)
    }

    /// Residuals of `h_{wC̄D} − L_C̄ h_{wD} − h_w·h_{C̄D}` for every stored
    /// word `wC̄`, computed from the iterated forms and from the recursion
    /// independently.
    pub fn recursion_residuals(&self, frame: &Frame) -> Vec<(Word, usize, Series)> {
        let mut out = Vec::new();
        for (wc, form) in &self.forms {
            let Some((c, w)) = wc.split_last() else { continue };
            let lc = frame.field(frame.lbar(*c));
            for d in 0..self.n {
                let lhs = form.pairing(d);
                let rhs = &lc.apply(self.h_word(w, d)) + &(self.h_scalar(w) * self.h_word(&[*c], d));
                out.push((wc.clone(), d, lhs - &rhs));
            }
        }
        out
    }

    pub fn desingularize(&self, frame: &Frame, m: u32) -> Result<Desingularized> {
        let sp = frame.space;
        let s = sp.s();
        let nv = sp.nvars();
        let n = self.n;
        let h0 = self
            .h
            .iter()
            .map(|row| row.iter().map(|x| divide_s(x, s, m)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let mut h0_words = BTreeMap::new();
        for (w, form) in &self.forms {
            if w.is_empty() {
                continue;
            }
            let row = (0..n).map(|d| divide_s(form.pairing(d), s, m)).collect::<Result<Vec<_>>>()?;
            h0_words.insert(w.clone(), row);
        }
        let sm = Series::var(nv, s, frame.trunc).pow(m);
        let st = frame.field(frame.t()).scaled(&sm);
        let h0_bar = (0..n)
            .map(|a| {
                let br = frame.decompose(&frame.field(frame.lbar(a)).bracket(&st));
                divide_s(&-&br[frame.t()], s, m)
            })
            .collect::<Result<Vec<_>>>()?;
        let mq = GaussRational::from_int(m as i64);
        let a_bar = (0..n)
            .map(|c| divide_s(&frame.b[c], s, 1).map(|q| q.scale(&mq)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Desingularized { m, h0, h0_words, h0_bar, a_bar })
    }
}

fn value_at_origin(x: &Series) -> Result<GaussRational> {
    if x.trunc() < 0 {
        return Err(Error::TruncationExhausted("iterated Levi function unknown at the origin".into()));
    }
    Ok(x.constant_term())
}

/// The filtration `F_k(0)` for `k ≤ ell_max`.
pub fn filtration(n: usize, d: &Desingularized, ell_max: u32) -> Result<Filtration> {
    let mut value_matrices = Vec::new();
    for k in 1..=ell_max as usize {
        let mut rows: Matrix = Vec::new();
        for w in words(n, k) {
            let row = d.h0_words.get(&w).ok_or_else(|| {
                Error::TruncationExhausted(format!("iterated Levi functions of length {k} were not computed"))
            })?;
            rows.push(row.iter().map(value_at_origin).collect::<Result<Vec<_>>>()?);
        }
        value_matrices.push(rows);
    }
    let mut ranks = vec![0usize];
    let mut stacked: Matrix = Vec::new();
    let mut kernels = vec![linalg::kernel(&stacked, n)];
    for v in &value_matrices {
        stacked.extend(v.iter().cloned());
        let ker = linalg::kernel(&stacked, n);
        ranks.push(n - ker.len());
        kernels.push(ker);
    }
    let last = *ranks.last().expect("nonempty");
    let ell = ranks.iter().position(|&r| r == last).expect("present") as u32;
    if last == n {
        ranks.truncate(ell as usize + 1);
    }
    let nondegenerate = last == n;
    let type_two = value_matrices
        .first()
        .map(|v| v.iter().flatten().any(|x| !x.is_zero()))
        .unwrap_or(false);
    let basis_change = adapted_basis(n, &kernels[..=ell as usize]);
    Ok(Filtration { ranks, ell, nondegenerate, type_two, basis_change, value_matrices })
}

/// Columns ordered so that the innermost kernel occupies the last columns.
fn adapted_basis(n: usize, kernels: &[Vec<Vec<GaussRational>>]) -> Matrix {
    let mut cols: Vec<Vec<GaussRational>> = Vec::new();
    for ker in kernels.iter().rev() {
        for v in ker {
            let mut trial: Matrix = cols.clone();
            trial.push(v.clone());
            if linalg::rank(&trial) > cols.len() {
                cols = trial;
            }
        }
    }
    cols.reverse();
    (0..n).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect()
}

impl Filtration {
    /// The vanishing pattern forced by the construction: in the adapted
    /// basis, `h⁰_{w a}(0) = 0` whenever `|w| < k` and `a` lies in the block
    /// `r_{k−1} < a ≤ r_k`.
    pub fn check_block_vanishing(&self) -> Result<()> {
        for (j, v) in self.value_matrices.iter().enumerate().take(self.ell as usize) {
            let vp = linalg::mat_mul(v, &self.basis_change);
            let len = j + 1;
            for k in len + 1..self.ranks.len() {
                for col in self.ranks[k - 1]..self.ranks[k] {
                    if vp.iter().any(|row| !row[col].is_zero()) {
                        return Err(Error::IdentityFailed(format!(
                            "adapted column {} pairs nontrivially with a word of length {len}",
                            col + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// For each `k ≤ ℓ`: among vectors supported on the last `n − r_{k−1}`
    /// adapted columns, those annihilated by all words of length `k` are
    /// exactly the ones with vanishing block `r_{k−1} < a ≤ r_k`.
    pub fn check_block_kernels(&self) -> Result<()> {
        let n = self.basis_change.len();
        for k in 1..self.ranks.len() {
            let v = &self.value_matrices[k - 1];
            let vp = linalg::mat_mul(v, &self.basis_change);
            let lo = self.ranks[k - 1];
            let sub: Matrix = vp.iter().map(|row| row[lo..].to_vec()).collect();
            let ker = linalg::kernel(&sub, n - lo);
            let block = self.ranks[k] - lo;
            let ok = ker.len() == n - self.ranks[k]
                && ker.iter().all(|x| x[..block].iter().all(GaussRational::is_zero));
            if !ok {
                return Err(Error::IdentityFailed(format!("kernel of length-{k} words misses the adapted block")));
            }
        }
        Ok(())
    }
}

/// Leading-term check: with `α` the lowest-order part of `φ_m` (degree
/// `r`), the degree-`(r − 2)` part of `h⁰_{ĀB}|_{s=0}` equals `α_{χ_A z_B}`,
/// and nothing of lower degree survives.
pub fn leading_term_defects(hs: &Hypersurface, d: &Desingularized) -> Result<Vec<(usize, usize)>> {
    let InfiniteType::Finite { phi_m, r, .. } = hs.infinite_type()? else {
        return Err(Error::LeviFlat);
    };
    let sp = hs.space();
    let alpha = phi_m.homogeneous_part(r);
    let mut bad = Vec::new();
    for a in 0..hs.n {
        for b in 0..hs.n {
            let h0s = d.h0[a][b].at_zero(sp.s());
            let expect = alpha.partial(sp.c(a)).partial(sp.z(b));
            let top = r as i32 - 2;
            if h0s.trunc() < top {
                return Err(Error::TruncationExhausted("h⁰ unknown at the leading degree".into()));
            }
            let low_ok = h0s.terms().all(|(m, _)| m.degree() as i32 >= top);
            let lead = h0s.homogeneous_part(top.max(0) as u32);
            let lead_ok = lead.terms().eq(expect.homogeneous_part(top.max(0) as u32).terms());
            if !(low_ok && lead_ok) {
                bad.push((a, b));
            }
        }
    }
    Ok(bad)
}
