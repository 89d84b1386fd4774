//! Hodge operator family on the invariant exterior algebra.
//!
//! The metric on 1-forms is the general coinvariant one: g(w-, w+) =
//! alpha, g(w+, w-) = beta, g(wz, wz) = gamma, zero when frame charges
//! do not cancel. Degree-k Gram matrices come from the antisymmetriser
//! expansion G_k[i, j] = g^{(x)k}(A_k rep_i, A_k rep_j) with slotwise
//! contraction. The Hodge map in degree k is pinned by
//!
//!     beta_i* ^ T(beta_j) = (m / lambda_k) g_k(beta_i*, beta_j) theta
//!
//! where lambda_k is the eigenvalue of A_k on its image and m scales
//! the volume T(1) = m theta. Everything is exact over the parameter
//! ring; numeric questions (signature, the normalisation of m^2) are
//! answered by exact evaluation at rational q.

use num_traits::{One, Zero};
use once_cell::sync::Lazy;

use crate::algebra::{haar, AlgebraElement, Monomial};
use crate::forms::{
    antisym2, antisym3, commute_past, lambda2, lambda3, weights, BraidChoice,
    KForm, DIM, REP2,
};
use crate::linalg::Matrix;
use crate::params::{Param, ParamEnv, ParamExpr};
use crate::scalar::{GaussQ, NumericError, QRat, Rat};

/// Everything derived from one braiding choice.
pub struct HodgeData {
    choice: BraidChoice,
    lambda: [QRat; 4],
    gram: Vec<Matrix<ParamExpr>>,
    duality: Vec<Matrix<QRat>>,
    t: Vec<Matrix<ParamExpr>>,
}

/// The scalar part of an algebra element that must carry no generators.
fn scalar_part(x: &AlgebraElement<QRat>) -> QRat {
    assert!(x.num_terms() <= 1, "expected an invariant coefficient");
    x.coeff(&Monomial::unit())
}

/// Solve A^2 = lambda A and return lambda.
fn eigen_scale(a: &Matrix<QRat>) -> QRat {
    let sq = a.matmul(a);
    let mut lambda = None;
    'outer: for i in 0..a.rows() {
        for j in 0..a.cols() {
            if !a[(i, j)].is_zero() {
                lambda = Some(&sq[(i, j)] * &a[(i, j)].inv());
                break 'outer;
            }
        }
    }
    let lambda = lambda.expect("antisymmetriser is nonzero");
    assert_eq!(sq, a.scale(&lambda), "A^2 is not a multiple of A");
    lambda
}

/// (target, scale) of the star on each basis form of the given degree.
fn star_scaling(degree: usize) -> Vec<(usize, QRat)> {
    (0..DIM[degree])
        .map(|i| {
            let s = KForm::<QRat>::basis(degree, i).star();
            let mut found = None;
            for t in 0..DIM[degree] {
                if !s.coeff(t).is_zero() {
                    assert!(found.is_none(), "star of a basis form is a monomial");
                    found = Some((t, scalar_part(s.coeff(t))));
                }
            }
            found.expect("star of a basis form is nonzero")
        })
        .collect()
}

impl HodgeData {
    pub fn new(choice: BraidChoice) -> Self {
        let l2 = eigen_scale(antisym2(choice));
        assert_eq!(l2, lambda2(choice), "degree-2 eigenvalue drifted");
        let l3 = eigen_scale(antisym3(choice));
        assert_eq!(l3, lambda3(choice), "degree-3 eigenvalue drifted");
        let lambda = [QRat::one(), QRat::one(), l2, l3];

        // g on 1-forms: only charge-cancelling pairs survive.
        let mut g1 = Matrix::<ParamExpr>::zeros(3, 3);
        g1[(0, 1)] = ParamExpr::alpha();
        g1[(1, 0)] = ParamExpr::beta();
        g1[(2, 2)] = ParamExpr::gamma();

        let g0 = Matrix::from_fn(1, 1, |_, _| ParamExpr::one());

        let a2 = antisym2(choice);
        let pair2 = |u: usize, v: usize| -> ParamExpr {
            let mut acc = ParamExpr::zero();
            for p in 0..9 {
                if a2[(p, u)].is_zero() {
                    continue;
                }
                for r in 0..9 {
                    if a2[(r, v)].is_zero() {
                        continue;
                    }
                    let gg = &g1[(p / 3, r / 3)] * &g1[(p % 3, r % 3)];
                    if !gg.is_zero() {
                        acc = &acc + &(&gg * &ParamExpr::scalar(&a2[(p, u)] * &a2[(r, v)]));
                    }
                }
            }
            acc
        };
        let g2 = Matrix::from_fn(3, 3, |i, j| {
            let (i0, i1) = REP2[i];
            let (j0, j1) = REP2[j];
            pair2(3 * i0 + i1, 3 * j0 + j1)
        });

        let a3 = antisym3(choice);
        let mut g3_entry = ParamExpr::zero();
        for p in 0..27 {
            if a3[(p, 5)].is_zero() {
                continue;
            }
            for r in 0..27 {
                if a3[(r, 5)].is_zero() {
                    continue;
                }
                let gg = &(&g1[(p / 9, r / 9)] * &g1[(p / 3 % 3, r / 3 % 3)])
                    * &g1[(p % 3, r % 3)];
                if !gg.is_zero() {
                    g3_entry =
                        &g3_entry + &(&gg * &ParamExpr::scalar(&a3[(p, 5)] * &a3[(r, 5)]));
                }
            }
        }
        let g3 = Matrix::from_fn(1, 1, |_, _| g3_entry.clone());
        let gram = vec![g0, g1, g2, g3];

        // Duality pairing with the top form: W_k[i, l] is the top
        // coefficient of basis(k, i)* ^ basis(3-k, l).
        let duality: Vec<Matrix<QRat>> = (0..=3)
            .map(|k| {
                let n = DIM[k];
                Matrix::from_fn(n, n, |i, l| {
                    let phi = KForm::<QRat>::basis(k, i).star();
                    let top = phi.wedge(&KForm::basis(3 - k, l)).unwrap();
                    scalar_part(top.coeff(0))
                })
            })
            .collect();

        // T_k = (m / lambda_k) W_k^{-1} G~_k with G~_k[i, j] the Gram
        // pairing of basis(k, i)* against basis(k, j).
        let t: Vec<Matrix<ParamExpr>> = (0..=3)
            .map(|k| {
                let n = DIM[k];
                let star = star_scaling(k);
                let gtilde = Matrix::from_fn(n, n, |i, j| {
                    let (ti, si) = &star[i];
                    &gram[k][(*ti, j)] * &ParamExpr::scalar(si.clone())
                });
                let winv = duality[k].inverse().expect("duality pairing degenerate");
                let winv_p = winv.map(|c| ParamExpr::scalar(c.clone()));
                let scale = &ParamExpr::m() * &ParamExpr::scalar(lambda[k].inv());
                winv_p.matmul(&gtilde).scale(&scale)
            })
            .collect();

        HodgeData { choice, lambda, gram, duality, t }
    }

    pub fn choice(&self) -> BraidChoice {
        self.choice
    }

    pub fn lambda(&self, k: usize) -> &QRat {
        &self.lambda[k]
    }

    pub fn gram(&self, k: usize) -> &Matrix<ParamExpr> {
        &self.gram[k]
    }

    pub fn duality(&self, k: usize) -> &Matrix<QRat> {
        &self.duality[k]
    }

    /// Matrix of T on degree k (columns are images of basis forms).
    pub fn t_matrix(&self, k: usize) -> &Matrix<ParamExpr> {
        &self.t[k]
    }

    /// Apply T; a left module map, so coefficients ride along.
    pub fn apply(&self, phi: &KForm<ParamExpr>) -> KForm<ParamExpr> {
        let k = phi.degree();
        let tk = &self.t[k];
        let mut coeffs = vec![AlgebraElement::<ParamExpr>::zero(); DIM[3 - k]];
        for j in 0..DIM[k] {
            if phi.coeff(j).is_zero() {
                continue;
            }
            for (l, acc) in coeffs.iter_mut().enumerate() {
                let entry = &tk[(l, j)];
                if !entry.is_zero() {
                    *acc = acc.add(&phi.coeff(j).scale(entry));
                }
            }
        }
        KForm::from_coeffs(3 - k, coeffs)
    }

    /// The volume form T(1) = m theta.
    pub fn volume(&self) -> KForm<ParamExpr> {
        self.apply(&KForm::scalar(AlgebraElement::unit()))
    }

    /// T^2 on degree k as a matrix.
    pub fn t_square_matrix(&self, k: usize) -> Matrix<ParamExpr> {
        self.t[3 - k].matmul(&self.t[k])
    }

    /// T^2(1), the volume-squared scalar of the metric.
    pub fn det_g(&self) -> ParamExpr {
        &self.t[0][(0, 0)] * &self.t[3][(0, 0)]
    }

    /// Integral of a top form against the Haar state, normalised by the
    /// volume scale: xi theta integrates to h(xi) / m.
    pub fn integral_top(&self, phi: &KForm<ParamExpr>) -> ParamExpr {
        assert_eq!(phi.degree(), 3, "integrating a non-top form");
        &haar::<ParamExpr>(phi.coeff(0)) * &ParamExpr::m_pow(-1)
    }

    /// <phi, psi> = integral of phi* ^ T psi.
    pub fn scalar_product(
        &self,
        phi: &KForm<ParamExpr>,
        psi: &KForm<ParamExpr>,
    ) -> ParamExpr {
        assert_eq!(phi.degree(), psi.degree(), "pairing forms of equal degree");
        let w = phi.star().wedge(&self.apply(psi)).expect("pairing lands in top degree");
        self.integral_top(&w)
    }

    /// Gram pairing of equal-degree forms with coefficients: the
    /// coefficients of phi* and psi are multiplied through the frame
    /// weights exactly as the wedge moves them.
    pub fn gram_pairing(
        &self,
        phi: &KForm<ParamExpr>,
        psi: &KForm<ParamExpr>,
    ) -> AlgebraElement<ParamExpr> {
        let k = phi.degree();
        assert_eq!(psi.degree(), k);
        let sphi = phi.star();
        let w = weights(k);
        let g = &self.gram[k];
        let mut acc = AlgebraElement::zero();
        for l in 0..DIM[k] {
            if sphi.coeff(l).is_zero() {
                continue;
            }
            for j in 0..DIM[k] {
                if psi.coeff(j).is_zero() || g[(l, j)].is_zero() {
                    continue;
                }
                let moved = commute_past(w[l], psi.coeff(j));
                acc = acc.add(&sphi.coeff(l).mul(&moved).scale(&g[(l, j)]));
            }
        }
        acc
    }

    /// phi* ^ T(psi) - (m / lambda_k) <phi, psi>_g theta. Identically
    /// zero; computed from both sides independently.
    pub fn defining_residual(
        &self,
        phi: &KForm<ParamExpr>,
        psi: &KForm<ParamExpr>,
    ) -> KForm<ParamExpr> {
        let k = phi.degree();
        let lhs = phi.star().wedge(&self.apply(psi)).expect("residual lands on top");
        let scale = &ParamExpr::m() * &ParamExpr::scalar(self.lambda[k].inv());
        let mut rhs = KForm::zero(3);
        rhs.set_coeff(0, self.gram_pairing(phi, psi).scale(&scale));
        lhs.sub(&rhs)
    }

    /// The m^2 making T^2(1) = +-1 at the given real parameter point:
    /// lambda_3 / |G_3|.
    pub fn solve_m_square(&self, env: &ParamEnv) -> Result<Rat, NumericError> {
        let g3 = self.gram[3][(0, 0)].eval_numeric(env)?;
        assert!(g3.im.is_zero(), "volume pairing must be real");
        if g3.re.is_zero() {
            return Err(NumericError::Pole("degenerate metric volume".into()));
        }
        let l3 = self.lambda[3].evaluate_q(&env.q0)?;
        let abs = if g3.re < Rat::zero() { -g3.re } else { g3.re };
        Ok(l3 / abs)
    }

    /// Whether T^2 acts on 1-forms by a single scalar at the given
    /// parameter point. The overall m^2 factor is irrelevant and dropped.
    pub fn is_symmetric_at(&self, env: &ParamEnv) -> Result<bool, NumericError> {
        let probe = self.t_square_matrix(1).map(|e| e.set_m_one());
        let first = probe[(0, 0)].eval_numeric(env)?;
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { first.clone() } else { GaussQ::zero() };
                if probe[(i, j)].eval_numeric(env)? != want {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Whether every T matrix entry is real at the given parameter point
    /// (the normalisation m is a positive real scale and is dropped).
    pub fn is_real_at(&self, env: &ParamEnv) -> Result<bool, NumericError> {
        for tk in &self.t {
            for i in 0..tk.rows() {
                for j in 0..tk.cols() {
                    let v = tk[(i, j)].set_m_one().eval_numeric(env)?;
                    if !v.im.is_zero() {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// T(phi^*) = (T phi)^* on every basis form once beta = q^6 alpha is
    /// imposed and the parameters are treated as real.
    pub fn star_commutes_on_family(&self) -> bool {
        let q6a = &ParamExpr::alpha() * &ParamExpr::scalar(QRat::q_pow(6));
        let lock = |f: &KForm<ParamExpr>| {
            f.map_coeffs(|x| x.map_coeffs(|e| e.substitute(Param::Beta, &q6a)))
        };
        for k in 0..=3 {
            for i in 0..DIM[k] {
                let phi = KForm::<ParamExpr>::basis(k, i);
                let lhs = self.apply(&phi.star());
                let rhs = self.apply(&phi).star();
                if lock(&lhs) != lock(&rhs) {
                    return false;
                }
            }
        }
        true
    }
}

static HODGE_STD: Lazy<HodgeData> = Lazy::new(|| HodgeData::new(BraidChoice::Standard));
static HODGE_INV: Lazy<HodgeData> = Lazy::new(|| HodgeData::new(BraidChoice::Inverse));

/// Shared instance per braiding choice.
pub fn hodge(choice: BraidChoice) -> &'static HodgeData {
    match choice {
        BraidChoice::Standard => &HODGE_STD,
        BraidChoice::Inverse => &HODGE_INV,
    }
}
