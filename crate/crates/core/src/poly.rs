//! Dense univariate polynomials: characteristic polynomials over ℚ(i) and
//! exact real-root counting over ℚ.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::coeff::GaussRational;
use crate::linalg::Matrix;

/// Coefficients from the constant term upward; no trailing zeros.
pub type QPoly = Vec<BigRational>;
pub type CPoly = Vec<GaussRational>;

fn trim_q(mut p: QPoly) -> QPoly {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn trim_c(mut p: CPoly) -> CPoly {
    while p.last().is_some_and(GaussRational::is_zero) {
        p.pop();
    }
    p
}

/// `det(x·I − A)` by the Faddeev-LeVerrier recursion (exact in
/// characteristic zero). Monic of degree `n`.
pub fn char_poly(a: &Matrix) -> CPoly {
    let n = a.len();
    let mut coeffs = vec![GaussRational::zero(); n + 1];
    coeffs[n] = GaussRational::one();
    let mut m: Matrix = crate::linalg::zeros(n, n);
    for k in 1..=n {
        // M_k = A·M_{k-1} + c_{n-k+1} I
        let mut next = crate::linalg::mat_mul(a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &coeffs[n - k + 1];
        }
        m = next;
        let am = crate::linalg::mat_mul(a, &m);
        let mut tr = GaussRational::zero();
        for (i, row) in am.iter().enumerate() {
            tr += &row[i];
        }
        let c = tr.scale(&BigRational::new(BigInt::from(-1), BigInt::from(k as i64)));
        coeffs[n - k] = c;
    }
    coeffs
}

pub fn eval_c(p: &CPoly, x: &GaussRational) -> GaussRational {
    let mut acc = GaussRational::zero();
    for c in p.iter().rev() {
        acc = &(&acc * x) + c;
    }
    acc
}

pub fn eval_q(p: &QPoly, x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Split into real and imaginary coefficient polynomials.
pub fn split(p: &CPoly) -> (QPoly, QPoly) {
    let re = trim_q(p.iter().map(|c| c.re.clone()).collect());
    let im = trim_q(p.iter().map(|c| c.im.clone()).collect());
    (re, im)
}

pub fn derivative(p: &QPoly) -> QPoly {
    trim_q(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k as u64)))
            .collect(),
    )
}

/// Quotient and remainder of `a / b` with `b ≠ 0`.
pub fn div_rem(a: &QPoly, b: &QPoly) -> (QPoly, QPoly) {
    let b = trim_q(b.clone());
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut r = trim_q(a.clone());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![BigRational::zero(); r.len() - b.len() + 1];
    let lead = b.last().unwrap().clone();
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let f = r.last().unwrap() / &lead;
        for (j, bc) in b.iter().enumerate() {
            r[shift + j] -= &f * bc;
        }
        q[shift] = f;
        r.pop();
        r = trim_q(r);
    }
    (trim_q(q), r)
}

fn monic(p: QPoly) -> QPoly {
    match p.last() {
        Some(l) if !l.is_one() => {
            let l = l.clone();
            p.into_iter().map(|c| c / &l).collect()
        }
        _ => p,
    }
}

/// Monic gcd; `gcd(0, 0) = 0`.
pub fn gcd(a: &QPoly, b: &QPoly) -> QPoly {
    let mut x = trim_q(a.clone());
    let mut y = trim_q(b.clone());
    while !y.is_empty() {
        let (_, r) = div_rem(&x, &y);
        x = y;
        y = r;
    }
    monic(x)
}

/// Yun's square-free decomposition: `f = c·Π g_j^j`, returned as
/// `(g_j, j)` for the non-constant factors.
pub fn square_free(f: &QPoly) -> Vec<(QPoly, usize)> {
    let f = monic(trim_q(f.clone()));
    if f.len() <= 1 {
        return Vec::new();
    }
    let df = derivative(&f);
    let a0 = gcd(&f, &df);
    let mut b = div_rem(&f, &a0).0;
    let mut c = div_rem(&df, &a0).0;
    let mut d = sub(&c, &derivative(&b));
    let mut out = Vec::new();
    let mut j = 1;
    loop {
        let a = gcd(&b, &d);
        if a.len() > 1 {
            out.push((a.clone(), j));
        }
        b = div_rem(&b, &a).0;
        if b.len() <= 1 {
            break;
        }
        c = div_rem(&d, &a).0;
        d = sub(&c, &derivative(&b));
        j += 1;
    }
    out
}

fn sub(a: &QPoly, b: &QPoly) -> QPoly {
    let n = a.len().max(b.len());
    trim_q(
        (0..n)
            .map(|k| {
                let x = a.get(k).cloned().unwrap_or_else(BigRational::zero);
                let y = b.get(k).cloned().unwrap_or_else(BigRational::zero);
                x - y
            })
            .collect(),
    )
}

fn sturm_chain(p: &QPoly) -> Vec<QPoly> {
    let mut chain = vec![trim_q(p.clone()), derivative(p)];
    while chain.last().is_some_and(|q| !q.is_empty()) {
        let k = chain.len();
        let (_, r) = div_rem(&chain[k - 2], &chain[k - 1]);
        chain.push(r.into_iter().map(|c| -c).collect());
    }
    chain.pop();
    chain
}

fn sign_changes(signs: impl Iterator<Item = i8>) -> usize {
    let mut last = 0i8;
    let mut n = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            n += 1;
        }
        last = s;
    }
    n
}

fn sign(r: &BigRational) -> i8 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

/// Distinct real roots of a square-free `p` in `(−∞, 0]`.
pub fn count_nonpositive_distinct(p: &QPoly) -> usize {
    let p = trim_q(p.clone());
    if p.len() <= 1 {
        return 0;
    }
    let chain = sturm_chain(&p);
    let at_minus_inf = chain.iter().map(|q| {
        let deg = q.len() - 1;
        let s = sign(q.last().unwrap());
        if deg % 2 == 1 {
            -s
        } else {
            s
        }
    });
    let at_zero = chain.iter().map(|q| sign(&q[0]));
    sign_changes(at_minus_inf) - sign_changes(at_zero)
}

/// Roots of a complex polynomial lying on the closed negative real axis,
/// counted with multiplicity.
pub fn count_nonpositive_real_roots(p: &CPoly) -> usize {
    let p = trim_c(p.clone());
    let (re, im) = split(&p);
    let common = if im.is_empty() { monic(re) } else { gcd(&re, &im) };
    square_free(&common)
        .iter()
        .map(|(g, j)| j * count_nonpositive_distinct(g))
        .sum()
}

pub fn degree_c(p: &CPoly) -> usize {
    trim_c(p.clone()).len().saturating_sub(1)
}
