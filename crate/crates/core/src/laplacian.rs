//! The scalar Laplacian: the tangent-space quadratic element
//!
//!     box = { alpha (X- X+ + q^6 X+ X-) + gamma Xz Xz } |>
//!
//! acting from the left, its matrices on degree-filtered subspaces
//! (optionally one charge sector, which is how the sphere Laplacian
//! arises), and exact or floating-point spectra.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use once_cell::sync::Lazy;

use crate::algebra::{monomials_up_to_degree, AlgebraElement, Monomial};
use crate::linalg::Matrix;
use crate::roots::{rat_to_f64, RatPoly, RootError, RootInterval};
use crate::scalar::{rat_ratio, Coeff, NumericError, QRat, Rat};
use crate::uea::{act_left, lift_uea, tangent, Tangent, UEAElement};

/// X- X+, X+ X-, Xz Xz; the q^6 weighting of the middle piece and the
/// alpha/gamma coefficients are applied at evaluation time.
static PIECES: Lazy<[UEAElement<QRat>; 3]> = Lazy::new(|| {
    let xm = tangent(Tangent::Minus);
    let xp = tangent(Tangent::Plus);
    let xz = tangent(Tangent::Z);
    [xm.mul(&xp), xp.mul(&xm), xz.mul(&xz)]
});

/// Apply box with the given coefficients; linear, charge-preserving.
pub fn box_apply<R: Coeff>(
    alpha: &R,
    gamma: &R,
    x: &AlgebraElement<R>,
) -> AlgebraElement<R> {
    let mp = act_left(&lift_uea::<R>(&PIECES[0]), x).scale(alpha);
    let pm =
        act_left(&lift_uea::<R>(&PIECES[1]), x).scale(&(alpha.clone() * R::q_pow(6)));
    let zz = act_left(&lift_uea::<R>(&PIECES[2]), x).scale(gamma);
    mp.add(&pm).add(&zz)
}

/// Numeric parameter point: exact rationals with alpha gamma != 0 and
/// 0 < q0 < 1.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceParams {
    pub alpha: Rat,
    pub gamma: Rat,
    pub q0: Rat,
}

impl LaplaceParams {
    pub fn new(alpha: Rat, gamma: Rat, q0: Rat) -> Self {
        assert!(!alpha.is_zero() && !gamma.is_zero(), "need alpha gamma != 0");
        assert!(q0 > Rat::zero() && q0 < Rat::one(), "need 0 < q0 < 1");
        LaplaceParams { alpha, gamma, q0 }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LaplaceError {
    #[error("operator left the filtered span at {0}")]
    NonClosure(String),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Roots(#[from] RootError),
}

/// PBW monomials of total degree <= d, optionally one charge sector,
/// ordered degree-major then by the monomial ordering.
pub fn filtered_basis(d: u32, charge: Option<i64>) -> Vec<Monomial> {
    monomials_up_to_degree(d)
        .into_iter()
        .filter(|m| charge.map_or(true, |n| m.charge() == n))
        .collect()
}

/// box on a filtered span, evaluated at the parameter point.
#[derive(Debug, Clone)]
pub struct FilteredMatrix {
    pub params: LaplaceParams,
    pub basis: Vec<Monomial>,
    pub matrix: Matrix<Rat>,
}

/// Assemble the matrix of box on the degree-<= d span. The action never
/// raises PBW degree (rewriting only trades degree-n words for degree
/// <= n normal forms) and preserves charge, so the span closes; the
/// assembly still checks rather than assumes.
pub fn box_matrix(
    p: &LaplaceParams,
    d: u32,
    charge: Option<i64>,
) -> Result<FilteredMatrix, LaplaceError> {
    let basis = filtered_basis(d, charge);
    let index: BTreeMap<Monomial, usize> =
        basis.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let alpha = QRat::from_rat(p.alpha.clone());
    let gamma = QRat::from_rat(p.gamma.clone());
    let n = basis.len();
    let mut matrix = Matrix::<Rat>::zeros(n, n);
    for (j, b) in basis.iter().enumerate() {
        let img = box_apply(&alpha, &gamma, &AlgebraElement::monomial(*b, QRat::one()));
        for (mono, coeff) in img.terms() {
            let i = *index
                .get(mono)
                .ok_or_else(|| LaplaceError::NonClosure(mono.to_string()))?;
            matrix[(i, j)] = coeff.evaluate_q(&p.q0)?;
        }
    }
    Ok(FilteredMatrix { params: p.clone(), basis, matrix })
}

/// Exact (negative, zero, positive) eigenvalue counts of the full
/// degree-<= d block, obtained through its charge-block decomposition:
/// box never mixes charge sectors, and each sector block is small
/// enough for the Sturm path even when the full block is not.
pub fn sector_sign_counts(
    p: &LaplaceParams,
    d: u32,
) -> Result<(usize, usize, usize), LaplaceError> {
    let full = filtered_basis(d, None);
    let mut charges: Vec<i64> = full.iter().map(|m| m.charge()).collect();
    charges.sort_unstable();
    charges.dedup();
    let mut counts = (0, 0, 0);
    let mut covered = 0;
    for n in charges {
        let fm = box_matrix(p, d, Some(n))?;
        covered += fm.basis.len();
        let (neg, zero, pos) = fm.sign_counts()?;
        counts = (counts.0 + neg, counts.1 + zero, counts.2 + pos);
    }
    assert_eq!(covered, full.len(), "charge blocks must partition the basis");
    Ok(counts)
}

/// Largest block handled by the exact characteristic-polynomial path.
pub const EXACT_LIMIT: usize = 12;

#[derive(Debug, Clone)]
pub enum Spectrum {
    /// Isolated real eigenvalues with multiplicities; signs are exact.
    Exact(Vec<RootInterval>),
    /// Floating-point eigenvalues (ascending real parts) with the Schur
    /// reconstruction residual and the largest imaginary part seen.
    Float { eigenvalues: Vec<f64>, residual: f64, max_imaginary: f64 },
}

impl Spectrum {
    /// Eigenvalues as f64 midpoints, ascending, with multiplicity.
    pub fn approximate(&self) -> Vec<f64> {
        match self {
            Spectrum::Exact(roots) => {
                let mut out = Vec::new();
                for r in roots {
                    for _ in 0..r.multiplicity {
                        out.push(r.midpoint_f64());
                    }
                }
                out
            }
            Spectrum::Float { eigenvalues, .. } => eigenvalues.clone(),
        }
    }
}

impl FilteredMatrix {
    /// Exact on small blocks, floating point beyond EXACT_LIMIT.
    pub fn spectrum(&self) -> Result<Spectrum, LaplaceError> {
        if self.basis.len() <= EXACT_LIMIT {
            self.spectrum_exact()
        } else {
            Ok(self.spectrum_float())
        }
    }

    /// Characteristic polynomial over the rationals, Sturm isolation.
    pub fn spectrum_exact(&self) -> Result<Spectrum, LaplaceError> {
        let cp = RatPoly::new(self.matrix.charpoly());
        let width = rat_ratio(1, 1i64 << 40);
        Ok(Spectrum::Exact(cp.real_roots(&width)?))
    }

    /// (negative, zero, positive) eigenvalue counts, exactly.
    pub fn sign_counts(&self) -> Result<(usize, usize, usize), LaplaceError> {
        let cp = RatPoly::new(self.matrix.charpoly());
        Ok(cp.signature()?)
    }

    /// Schur decomposition in f64.
    pub fn spectrum_float(&self) -> Spectrum {
        let n = self.basis.len();
        let m =
            nalgebra::DMatrix::from_fn(n, n, |i, j| rat_to_f64(&self.matrix[(i, j)]));
        let (q, t) = m.clone().schur().unpack();
        let denom = m.norm().max(1.0);
        let residual = (&q * &t * q.transpose() - &m).norm() / denom;
        let eig = m.complex_eigenvalues();
        let max_imaginary = eig.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        let mut eigenvalues: Vec<f64> = eig.iter().map(|z| z.re).collect();
        eigenvalues.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Spectrum::Float { eigenvalues, residual, max_imaginary }
    }
}
