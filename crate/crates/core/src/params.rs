//! Coefficients carrying the metric parameters.
//!
//! The Hodge family is parametrised by three real symbols alpha, beta,
//! gamma, a volume normalisation m (and its counterpart mc on the sphere),
//! and the imaginary unit. The engine keeps all of these symbolic with
//! rational-function-of-q coefficients; m and mc enter Hodge coefficients
//! linearly and only their squares ever get numeric values, so odd powers
//! survive symbolically until they cancel.

use crate::scalar::{Coeff, GaussQ, NumericError, QRat, Rat};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Monomial in the parameter symbols. `i` is the imaginary unit (square -1,
/// so the exponent is a single bit); alpha, beta, gamma are commuting real
/// symbols; m and mc are real symbols allowed negative (Laurent) exponents
/// because the volume integral divides by them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default, Hash)]
pub struct ParamMono {
    pub i: bool,
    pub alpha: u32,
    pub beta: u32,
    pub gamma: u32,
    pub m: i64,
    pub mc: i64,
}

impl ParamMono {
    pub fn is_unit(&self) -> bool {
        *self == ParamMono::default()
    }
}

/// Polynomial in the parameter symbols over rational functions of q^(1/2).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParamExpr {
    terms: BTreeMap<ParamMono, QRat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Param {
    Alpha,
    Beta,
    Gamma,
}

impl ParamExpr {
    pub fn add_term(&mut self, mono: ParamMono, c: QRat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(mono) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn term(mono: ParamMono, c: QRat) -> Self {
        let mut e = ParamExpr::default();
        e.add_term(mono, c);
        e
    }

    pub fn scalar(c: QRat) -> Self {
        Self::term(ParamMono::default(), c)
    }

    pub fn alpha() -> Self {
        Self::term(ParamMono { alpha: 1, ..Default::default() }, QRat::one())
    }

    pub fn beta() -> Self {
        Self::term(ParamMono { beta: 1, ..Default::default() }, QRat::one())
    }

    pub fn gamma() -> Self {
        Self::term(ParamMono { gamma: 1, ..Default::default() }, QRat::one())
    }

    pub fn m() -> Self {
        Self::term(ParamMono { m: 1, ..Default::default() }, QRat::one())
    }

    pub fn m_pow(k: i64) -> Self {
        Self::term(ParamMono { m: k, ..Default::default() }, QRat::one())
    }

    pub fn mc() -> Self {
        Self::term(ParamMono { mc: 1, ..Default::default() }, QRat::one())
    }

    pub fn mc_pow(k: i64) -> Self {
        Self::term(ParamMono { mc: k, ..Default::default() }, QRat::one())
    }

    pub fn imag() -> Self {
        Self::term(ParamMono { i: true, ..Default::default() }, QRat::one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ParamMono, &QRat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The value as a plain q-scalar, if it involves no symbols.
    pub fn as_scalar(&self) -> Option<QRat> {
        if self.terms.is_empty() {
            return Some(QRat::zero());
        }
        if self.terms.len() == 1 {
            let (mono, c) = self.terms.iter().next().unwrap();
            if mono.is_unit() {
                return Some(c.clone());
            }
        }
        None
    }

    /// The value as (mono, coefficient) if it is a single term.
    pub fn as_single_term(&self) -> Option<(ParamMono, QRat)> {
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            Some((*m, c.clone()))
        } else {
            None
        }
    }

    /// Inverse of a single-term expression; None for sums or zero.
    pub fn monomial_inverse(&self) -> Option<ParamExpr> {
        let (mono, c) = self.as_single_term()?;
        // 1/i = -i.
        let inv_mono = ParamMono {
            i: mono.i,
            alpha: 0,
            beta: 0,
            gamma: 0,
            m: -mono.m,
            mc: -mono.mc,
        };
        if mono.alpha != 0 || mono.beta != 0 || mono.gamma != 0 {
            return None;
        }
        let coeff = if mono.i { -c.inv() } else { c.inv() };
        Some(ParamExpr::term(inv_mono, coeff))
    }

    /// Complex conjugate: alpha, beta, gamma, m, mc are real; q is real;
    /// i flips sign.
    pub fn conjugate(&self) -> Self {
        let mut out = ParamExpr::default();
        for (mono, c) in &self.terms {
            let coeff = if mono.i { -c.clone() } else { c.clone() };
            out.add_term(*mono, coeff);
        }
        out
    }

    /// Substitute a polynomial value for one of alpha, beta, gamma.
    pub fn substitute(&self, which: Param, value: &ParamExpr) -> Self {
        let mut out = ParamExpr::default();
        for (mono, c) in &self.terms {
            let (e, stripped) = match which {
                Param::Alpha => (mono.alpha, ParamMono { alpha: 0, ..*mono }),
                Param::Beta => (mono.beta, ParamMono { beta: 0, ..*mono }),
                Param::Gamma => (mono.gamma, ParamMono { gamma: 0, ..*mono }),
            };
            let mut term = ParamExpr::term(stripped, c.clone());
            for _ in 0..e {
                term = &term * value;
            }
            out = &out + &term;
        }
        out
    }

    /// Set m to 1 (used when comparing operators that are each linear in
    /// their own volume normalisation).
    pub fn set_m_one(&self) -> Self {
        let mut out = ParamExpr::default();
        for (mono, c) in &self.terms {
            out.add_term(ParamMono { m: 0, ..*mono }, c.clone());
        }
        out
    }

    /// Coefficient of m^k: terms with that exact m-exponent, m stripped.
    pub fn m_coefficient(&self, k: i64) -> Self {
        let mut out = ParamExpr::default();
        for (mono, c) in &self.terms {
            if mono.m == k {
                out.add_term(ParamMono { m: 0, ..*mono }, c.clone());
            }
        }
        out
    }

    /// Coefficient of mc^k.
    pub fn mc_coefficient(&self, k: i64) -> Self {
        let mut out = ParamExpr::default();
        for (mono, c) in &self.terms {
            if mono.mc == k {
                out.add_term(ParamMono { mc: 0, ..*mono }, c.clone());
            }
        }
        out
    }

    /// Largest |exponent| of m appearing.
    pub fn m_degree(&self) -> i64 {
        self.terms.keys().map(|m| m.m.abs()).max().unwrap_or(0)
    }

    /// Replace even powers of mc by powers of the given square. Odd powers
    /// keep one mc factor. Negative exponents are rejected.
    pub fn reduce_mc_square(&self, mc_square: &ParamExpr) -> Self {
        let mut out = ParamExpr::default();
        for (mono, c) in &self.terms {
            assert!(mono.mc >= 0, "cannot reduce negative mc power");
            let halves = mono.mc / 2;
            let rest = mono.mc % 2;
            let mut term = ParamExpr::term(ParamMono { mc: rest, ..*mono }, c.clone());
            for _ in 0..halves {
                term = &term * mc_square;
            }
            out = &out + &term;
        }
        out
    }

    /// Same reduction for m.
    pub fn reduce_m_square(&self, m_square: &ParamExpr) -> Self {
        let mut out = ParamExpr::default();
        for (mono, c) in &self.terms {
            assert!(mono.m >= 0, "cannot reduce negative m power");
            let halves = mono.m / 2;
            let rest = mono.m % 2;
            let mut term = ParamExpr::term(ParamMono { m: rest, ..*mono }, c.clone());
            for _ in 0..halves {
                term = &term * m_square;
            }
            out = &out + &term;
        }
        out
    }

    /// Exact numeric value. Alpha, beta, gamma take Gaussian-rational
    /// values; even powers of m and mc are filled from the supplied squares
    /// and odd residual powers are an error.
    pub fn eval_numeric(&self, env: &ParamEnv) -> Result<GaussQ, NumericError> {
        let mut acc = GaussQ::zero();
        for (mono, c) in &self.terms {
            let mut v = GaussQ::from_rat(c.evaluate_q(&env.q0)?);
            if mono.i {
                v = &v * &GaussQ::i();
            }
            v = &v * &env.alpha.pow(mono.alpha as i64);
            v = &v * &env.beta.pow(mono.beta as i64);
            v = &v * &env.gamma.pow(mono.gamma as i64);
            for (sym, expo, square) in
                [("m", mono.m, &env.m_square), ("mc", mono.mc, &env.mc_square)]
            {
                if expo != 0 {
                    if expo % 2 != 0 {
                        return Err(NumericError::OddSymbolPower(if sym == "m" {
                            "m"
                        } else {
                            "mc"
                        }));
                    }
                    let sq = square.as_ref().ok_or(NumericError::MissingValue(
                        if sym == "m" { "m^2" } else { "mc^2" },
                    ))?;
                    v = &v * &sq.pow(expo / 2);
                }
            }
            acc = acc + v;
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::json;
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|(m, c)| {
                    json!({
                        "coeff": c.to_json(),
                        "i": m.i,
                        "alpha": m.alpha,
                        "beta": m.beta,
                        "gamma": m.gamma,
                        "m": m.m,
                        "mc": m.mc,
                    })
                })
                .collect(),
        )
    }
}

/// Numeric assignment for the parameter symbols.
#[derive(Debug, Clone)]
pub struct ParamEnv {
    pub q0: Rat,
    pub alpha: GaussQ,
    pub beta: GaussQ,
    pub gamma: GaussQ,
    pub m_square: Option<GaussQ>,
    pub mc_square: Option<GaussQ>,
}

impl ParamEnv {
    pub fn real(q0: Rat, alpha: Rat, beta: Rat, gamma: Rat) -> Self {
        ParamEnv {
            q0,
            alpha: GaussQ::from_rat(alpha),
            beta: GaussQ::from_rat(beta),
            gamma: GaussQ::from_rat(gamma),
            m_square: None,
            mc_square: None,
        }
    }
}

impl Zero for ParamExpr {
    fn zero() -> Self {
        ParamExpr::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for ParamExpr {
    fn one() -> Self {
        ParamExpr::scalar(QRat::one())
    }
    fn is_one(&self) -> bool {
        self.as_scalar().map(|c| c.is_one()).unwrap_or(false)
    }
}

impl Add for ParamExpr {
    type Output = ParamExpr;
    fn add(self, rhs: Self) -> ParamExpr {
        &self + &rhs
    }
}

impl<'a> Add<&'a ParamExpr> for &'a ParamExpr {
    type Output = ParamExpr;
    fn add(self, rhs: &ParamExpr) -> ParamExpr {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub for ParamExpr {
    type Output = ParamExpr;
    fn sub(self, rhs: Self) -> ParamExpr {
        &self - &rhs
    }
}

impl<'a> Sub<&'a ParamExpr> for &'a ParamExpr {
    type Output = ParamExpr;
    fn sub(self, rhs: &ParamExpr) -> ParamExpr {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl Mul for ParamExpr {
    type Output = ParamExpr;
    fn mul(self, rhs: Self) -> ParamExpr {
        &self * &rhs
    }
}

impl<'a> Mul<&'a ParamExpr> for &'a ParamExpr {
    type Output = ParamExpr;
    fn mul(self, rhs: &ParamExpr) -> ParamExpr {
        let mut out = ParamExpr::default();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                let mut c = c1 * c2;
                if m1.i && m2.i {
                    c = -c;
                }
                let mono = ParamMono {
                    i: m1.i ^ m2.i,
                    alpha: m1.alpha + m2.alpha,
                    beta: m1.beta + m2.beta,
                    gamma: m1.gamma + m2.gamma,
                    m: m1.m + m2.m,
                    mc: m1.mc + m2.mc,
                };
                out.add_term(mono, c);
            }
        }
        out
    }
}

impl Neg for ParamExpr {
    type Output = ParamExpr;
    fn neg(self) -> ParamExpr {
        let mut out = ParamExpr::default();
        for (m, c) in &self.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl Coeff for ParamExpr {
    fn from_qrat(x: &QRat) -> Self {
        ParamExpr::scalar(x.clone())
    }
    fn conj(&self) -> Self {
        self.conjugate()
    }
}

impl fmt::Display for ParamExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (mono, c)) in self.terms.iter().enumerate() {
            let (neg, mag) = c.display_sign_split();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut parts: Vec<String> = Vec::new();
            if !mag.is_one() || mono.is_unit() {
                if mag.needs_parens() {
                    parts.push(format!("({})", mag));
                } else {
                    parts.push(mag.to_string());
                }
            }
            if mono.i {
                parts.push("i".into());
            }
            for (name, e) in [
                ("alpha", mono.alpha as i64),
                ("beta", mono.beta as i64),
                ("gamma", mono.gamma as i64),
                ("m", mono.m),
                ("mc", mono.mc),
            ] {
                if e == 1 {
                    parts.push(name.into());
                } else if e != 0 {
                    parts.push(format!("{}^{}", name, e));
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat_int, rat_ratio};

    #[test]
    fn imaginary_unit_squares_to_minus_one() {
        let i = ParamExpr::imag();
        let sq = &i * &i;
        assert_eq!(sq, -ParamExpr::one());
        assert_eq!(i.conjugate(), -ParamExpr::imag());
    }

    #[test]
    fn substitution() {
        // beta -> q^6 alpha inside alpha*beta gives q^6 alpha^2.
        let ab = &ParamExpr::alpha() * &ParamExpr::beta();
        let sub = ab.substitute(
            Param::Beta,
            &(&ParamExpr::scalar(QRat::q_pow(6)) * &ParamExpr::alpha()),
        );
        let expect = ParamExpr::term(
            ParamMono { alpha: 2, ..Default::default() },
            QRat::q_pow(6),
        );
        assert_eq!(sub, expect);
    }

    #[test]
    fn mc_square_reduction() {
        // mc^3 -> (s)^1 * mc with s the square.
        let e = ParamExpr::mc_pow(3);
        let sq = &ParamExpr::alpha() * &ParamExpr::beta();
        let red = e.reduce_mc_square(&sq);
        let expect = &(&ParamExpr::mc() * &ParamExpr::alpha()) * &ParamExpr::beta();
        assert_eq!(red, expect);
    }

    #[test]
    fn numeric_evaluation() {
        // i*alpha*m^2 at alpha = 2, m^2 = 3/4 is (3/2) i.
        let e = &(&ParamExpr::imag() * &ParamExpr::alpha()) * &ParamExpr::m_pow(2);
        let mut env = ParamEnv::real(rat_ratio(1, 2), rat_int(2), rat_int(1), rat_int(1));
        env.m_square = Some(GaussQ::from_rat(rat_ratio(3, 4)));
        let v = e.eval_numeric(&env).unwrap();
        assert_eq!(v, GaussQ::new(rat_int(0), rat_ratio(3, 2)));
        // Odd m power fails.
        let odd = ParamExpr::m();
        assert!(matches!(
            odd.eval_numeric(&env),
            Err(NumericError::OddSymbolPower("m"))
        ));
    }

    #[test]
    fn monomial_inverse() {
        let e = ParamExpr::term(
            ParamMono { i: true, mc: 1, ..Default::default() },
            QRat::from_int(2),
        );
        let inv = e.monomial_inverse().unwrap();
        assert!((&e * &inv).is_one());
    }
}
