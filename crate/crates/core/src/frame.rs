//! CR frame `(L_A, L_Ā, T)` and its dual coframe on a hypersurface
//! parametrized by `(z, χ, s)` with `w = s + iφ`.
//!
//! Frame slots follow the coordinate order: `L_1..L_n` at `0..n`,
//! `L_1̄..L_n̄` at `n..2n`, `T` at `2n`. The frame matrix is then the identity
//! at the origin.

use crate::coeff::GaussRational;
use crate::error::{Error, Result};
use crate::hypersurface::Hypersurface;
use crate::linalg::{invert_series_matrix, SeriesMatrix};
use crate::series::{CrSpace, Series};

/// A vector field `Σ coeffs[k] ∂_k` in the coordinate basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    pub coeffs: Vec<Series>,
}

impl VectorField {
    pub fn coordinate(nvars: usize, slot: usize, trunc: i32) -> Self {
        let coeffs = (0..nvars)
            .map(|k| if k == slot { Series::one(nvars, trunc) } else { Series::zero(nvars, trunc) })
            .collect();
        Self { coeffs }
    }

    /// `X(f) = Σ X^k ∂_k f`.
    pub fn apply(&self, f: &Series) -> Series {
        let mut acc = Series::zero(f.nvars(), f.trunc());
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                acc = acc.truncate(c.trunc() + f.trunc() - 1);
                continue;
            }
            acc = &acc + &(c * &f.partial(k));
        }
        acc
    }

    /// Coordinate bracket `[X, Y]^k = X(Y^k) − Y(X^k)`.
    pub fn bracket(&self, other: &VectorField) -> VectorField {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(xk, yk)| &self.apply(yk) - &other.apply(xk))
            .collect();
        VectorField { coeffs }
    }

    /// `f·X`.
    pub fn scaled(&self, f: &Series) -> VectorField {
        VectorField { coeffs: self.coeffs.iter().map(|c| c * f).collect() }
    }
}

/// A 1-form stored by its pairings with the frame vectors, in frame order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoFrameForm {
    pub pairings: Vec<Series>,
}

impl CoFrameForm {
    pub fn pairing(&self, slot: usize) -> &Series {
        &self.pairings[slot]
    }
}

#[derive(Clone, Debug)]
pub struct Frame {
    pub space: CrSpace,
    pub trunc: i32,
    /// `∂_s`-coefficient of `L_A`: `iφ_{z_A}/(1 − iφ_s)`.
    pub a: Vec<Series>,
    /// `∂_s`-coefficient of `L_Ā`: `−iφ_{χ_A}/(1 + iφ_s)`.
    pub b: Vec<Series>,
    pub fields: Vec<VectorField>,
    /// Frame matrix: row `k` holds the coordinate coefficients of field `k`.
    pub matrix: SeriesMatrix,
    /// Inverse frame matrix; column `j` holds the coordinate coefficients of
    /// the dual form `ω^j`.
    pub coframe: SeriesMatrix,
    brackets: Vec<Vec<Vec<Series>>>,
}

impl Frame {
    pub fn build(h: &Hypersurface) -> Result<Frame> {
        let sp = h.space();
        let n = sp.n;
        let nv = sp.nvars();
        let phi = &h.phi;
        let i = GaussRational::i();
        let phi_s = phi.partial(sp.s());
        let one = Series::one(nv, phi.trunc());
        let den_b = (&one + &phi_s.scale(&i)).reciprocal()?;
        let den_a = (&one - &phi_s.scale(&i)).reciprocal()?;
        let b: Vec<Series> = (0..n).map(|a| &phi.partial(sp.c(a)).scale(&-&i) * &den_b).collect();
        let a: Vec<Series> = (0..n).map(|c| &phi.partial(sp.z(c)).scale(&i) * &den_a).collect();
        let trunc = a.iter().chain(&b).map(Series::trunc).min().unwrap_or(phi.trunc());
        let mut fields = Vec::with_capacity(nv);
        for (slot, coef) in (0..n).map(|k| (sp.z(k), &a[k])).chain((0..n).map(|k| (sp.c(k), &b[k]))) {
            let mut f = VectorField::coordinate(nv, slot, trunc);
            f.coeffs[sp.s()] = coef.clone();
            fields.push(f);
        }
        fields.push(VectorField::coordinate(nv, sp.s(), trunc));
        let matrix: SeriesMatrix = fields.iter().map(|f| f.coeffs.clone()).collect();
        let coframe = invert_series_matrix(&matrix)?;
        let mut frame = Frame { space: sp, trunc, a, b, fields, matrix, coframe, brackets: Vec::new() };
        frame.brackets = (0..nv)
            .map(|x| (0..nv).map(|y| frame.decompose(&frame.fields[x].bracket(&frame.fields[y]))).collect())
            .collect();
        Ok(frame)
    }

    pub fn n(&self) -> usize {
        self.space.n
    }

    pub fn l(&self, a: usize) -> usize {
        a
    }

    pub fn lbar(&self, a: usize) -> usize {
        self.space.n + a
    }

    pub fn t(&self) -> usize {
        2 * self.space.n
    }

    pub fn field(&self, slot: usize) -> &VectorField {
        &self.fields[slot]
    }

    /// Frame components of a coordinate vector field: `v · M⁻¹`.
    pub fn decompose(&self, v: &VectorField) -> Vec<Series> {
        let nv = self.space.nvars();
        (0..nv)
            .map(|j| {
                let mut acc = &v.coeffs[0] * &self.coframe[0][j];
                for l in 1..nv {
                    acc = &acc + &(&v.coeffs[l] * &self.coframe[l][j]);
                }
                acc
            })
            .collect()
    }

    /// Frame components of `[F_x, F_y]` for frame slots `x`, `y`.
    pub fn bracket_components(&self, x: usize, y: usize) -> &[Series] {
        &self.brackets[x][y]
    }

    /// The dual form `ω^j` (`θ` for `j = 2n`).
    pub fn dual_form(&self, j: usize) -> CoFrameForm {
        let nv = self.space.nvars();
        let pairings = (0..nv)
            .map(|k| if k == j { Series::one(nv, self.trunc) } else { Series::zero(nv, self.trunc) })
            .collect();
        CoFrameForm { pairings }
    }

    pub fn theta(&self) -> CoFrameForm {
        self.dual_form(self.t())
    }

    /// Coordinate coefficients `(dz.., dχ.., ds)` of `ω^j`.
    pub fn dual_form_coordinates(&self, j: usize) -> Vec<Series> {
        self.coframe.iter().map(|row| row[j].clone()).collect()
    }

    /// Pair a coordinate 1-form with a coordinate vector field.
    pub fn pair_coordinates(form: &[Series], v: &VectorField) -> Series {
        let mut acc = &form[0] * &v.coeffs[0];
        for k in 1..form.len() {
            acc = &acc + &(&form[k] * &v.coeffs[k]);
        }
        acc
    }

    /// `⟨𝓛_X ω, F_k⟩ = X⟨ω, F_k⟩ − ⟨ω, [X, F_k]⟩` for an arbitrary field `X`.
    pub fn lie_derivative(&self, omega: &CoFrameForm, x: &VectorField) -> CoFrameForm {
        let nv = self.space.nvars();
        let pairings = (0..nv)
            .map(|k| {
                let br = self.decompose(&x.bracket(&self.fields[k]));
                let mut acc = x.apply(&omega.pairings[k]);
                for (j, c) in br.iter().enumerate() {
                    acc = &acc - &(&omega.pairings[j] * c);
                }
                acc
            })
            .collect();
        CoFrameForm { pairings }
    }

    /// Same as [`Frame::lie_derivative`] along the frame vector in slot `x`,
    /// using cached brackets.
    pub fn lie_derivative_frame(&self, omega: &CoFrameForm, x: usize) -> CoFrameForm {
        let nv = self.space.nvars();
        let field = &self.fields[x];
        let pairings = (0..nv)
            .map(|k| {
                let mut acc = field.apply(&omega.pairings[k]);
                for (j, c) in self.brackets[x][k].iter().enumerate() {
                    if c.is_zero() || omega.pairings[j].is_zero() {
                        acc = acc.truncate(c.trunc().min(omega.pairings[j].trunc()));
                        continue;
                    }
                    acc = &acc - &(&omega.pairings[j] * c);
                }
                acc
            })
            .collect();
        CoFrameForm { pairings }
    }

    /// Largest violation of `⟨ω^j, F_k⟩ = δ_jk`, as the list of offending
    /// `(j, k)` pairs.
    pub fn duality_defects(&self) -> Vec<(usize, usize)> {
        let nv = self.space.nvars();
        let mut out = Vec::new();
        for j in 0..nv {
            let form = self.dual_form_coordinates(j);
            for k in 0..nv {
                let p = Self::pair_coordinates(&form, &self.fields[k]);
                let expect = if j == k { Series::one(nv, p.trunc()) } else { Series::zero(nv, p.trunc()) };
                if p != expect {
                    out.push((j, k));
                }
            }
        }
        out
    }

    pub fn check_duality(&self) -> Result<()> {
        match self.duality_defects().first() {
            None => Ok(()),
            Some((j, k)) => Err(Error::IdentityFailed(format!("coframe pairing ⟨ω^{j}, F_{k}⟩"))),
        }
    }
}
