//! Exact scalar arithmetic: Laurent polynomials and rational functions in
//! q^(1/2) over arbitrary-precision rationals.
//!
//! The engine works internally in the half-power variable s = q^(1/2)
//! because the dual pairing takes values like q^(-1/2). Module-level data
//! (braiding entries, Gram matrices, Hodge coefficients, Haar values) always
//! lands back in integer powers of q, and the numeric evaluation path
//! insists on that.

use num::{BigInt, BigRational};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Arbitrary-precision rational number.
pub type Rat = BigRational;

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_ratio(p: i64, q: i64) -> Rat {
    assert!(q != 0, "zero denominator");
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// x^k for integer k (x != 0 when k < 0).
pub fn rat_pow(x: &Rat, k: i64) -> Rat {
    if k == 0 {
        return Rat::one();
    }
    let base = if k < 0 {
        assert!(!x.is_zero(), "inverting zero");
        x.recip()
    } else {
        x.clone()
    };
    let mut acc = Rat::one();
    for _ in 0..k.unsigned_abs() {
        acc *= &base;
    }
    acc
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum NumericError {
    #[error("value has q^(1/2) powers; not a rational function of integer q powers")]
    HalfPower,
    #[error("pole at q = {0}")]
    Pole(String),
    #[error("odd power of {0}; only its square has a numeric value")]
    OddSymbolPower(&'static str),
    #[error("no numeric value supplied for {0}")]
    MissingValue(&'static str),
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
#[error("malformed {0}")]
pub struct DecodeError(pub &'static str);

// ---------------------------------------------------------------------------
// Laurent polynomials in s = q^(1/2)

/// Laurent polynomial in s = q^(1/2): map from s-power to coefficient,
/// zero coefficients never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, Rat>,
}

impl LaurentPoly {
    pub fn zero_poly() -> Self {
        LaurentPoly { terms: BTreeMap::new() }
    }

    pub fn constant(c: Rat) -> Self {
        let mut p = Self::zero_poly();
        p.add_term(0, c);
        p
    }

    pub fn monomial(pow: i64, c: Rat) -> Self {
        let mut p = Self::zero_poly();
        p.add_term(pow, c);
        p
    }

    pub fn add_term(&mut self, pow: i64, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(pow) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn min_pow(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_pow(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn leading_coeff(&self) -> Option<&Rat> {
        self.terms.values().next_back()
    }

    pub fn coeff(&self, pow: i64) -> Rat {
        self.terms.get(&pow).cloned().unwrap_or_else(Rat::zero)
    }

    /// Multiply by s^k.
    pub fn shifted(&self, k: i64) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(p, c)| (p + k, c.clone())).collect(),
        }
    }

    pub fn scaled(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero_poly();
        }
        LaurentPoly {
            terms: self.terms.iter().map(|(p, v)| (*p, v * c)).collect(),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() <= 1 && self.terms.keys().all(|p| *p == 0)
    }

    /// True when every stored power of s is even, i.e. the polynomial is a
    /// Laurent polynomial in q itself.
    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|p| p % 2 == 0)
    }

    /// Evaluate at s^2 = q0 assuming `is_even`.
    fn eval_q(&self, q0: &Rat) -> Result<Rat, NumericError> {
        let mut acc = Rat::zero();
        for (p, c) in &self.terms {
            if p % 2 != 0 {
                return Err(NumericError::HalfPower);
            }
            acc += c * rat_pow(q0, p / 2);
        }
        Ok(acc)
    }

    /// Polynomial division for genuine polynomials (min power >= 0).
    fn divrem(&self, d: &LaurentPoly) -> (LaurentPoly, LaurentPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        assert!(self.min_pow().unwrap_or(0) >= 0 && d.min_pow().unwrap_or(0) >= 0);
        let dd = d.max_pow().unwrap();
        let dl = d.leading_coeff().unwrap().clone();
        let mut rem = self.clone();
        let mut quo = LaurentPoly::zero_poly();
        while !rem.is_zero() && rem.max_pow().unwrap() >= dd {
            let shift = rem.max_pow().unwrap() - dd;
            let factor = rem.leading_coeff().unwrap() / &dl;
            quo.add_term(shift, factor.clone());
            let sub = d.shifted(shift).scaled(&factor);
            rem = &rem - &sub;
        }
        (quo, rem)
    }

    /// Monic gcd of two genuine polynomials (Euclid over the rationals).
    fn gcd_monic(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
        let mut x = a.clone();
        let mut y = b.clone();
        while !y.is_zero() {
            let (_, r) = x.divrem(&y);
            x = y;
            y = r;
        }
        if x.is_zero() {
            return x;
        }
        let lc = x.leading_coeff().unwrap().clone();
        x.scaled(&lc.recip())
    }
}

impl Zero for LaurentPoly {
    fn zero() -> Self {
        Self::zero_poly()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for LaurentPoly {
    fn one() -> Self {
        Self::constant(Rat::one())
    }
    fn is_one(&self) -> bool {
        self.is_constant() && self.coeff(0).is_one()
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: Self) -> Self {
        &self + &rhs
    }
}

impl<'a> Add<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (p, c) in &rhs.terms {
            out.add_term(*p, c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (p, c) in &rhs.terms {
            out.add_term(*p, -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero_poly();
        for (p1, c1) in &self.terms {
            for (p2, c2) in &rhs.terms {
                out.add_term(p1 + p2, c1 * c2);
            }
        }
        out
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: Self) -> LaurentPoly {
        &self * &rhs
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: Self) -> LaurentPoly {
        &self - &rhs
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> Self {
        LaurentPoly {
            terms: self.terms.into_iter().map(|(p, c)| (p, -c)).collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Rational functions of q^(1/2)

/// Rational function in s = q^(1/2), kept in canonical form:
/// gcd-reduced, denominator a genuine polynomial with nonzero constant term
/// and leading coefficient 1, numerator carrying any overall Laurent shift.
/// Structural equality is field equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QRat {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl Default for QRat {
    fn default() -> Self {
        QRat::zero()
    }
}

impl QRat {
    /// Canonicalize num/den. This is the `normalize` entry point for
    /// anything constructing a rational function by hand.
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return QRat { num: LaurentPoly::zero_poly(), den: LaurentPoly::one() };
        }
        let u = num.min_pow().unwrap();
        let v = den.min_pow().unwrap();
        let n0 = num.shifted(-u);
        let d0 = den.shifted(-v);
        let g = LaurentPoly::gcd_monic(&n0, &d0);
        let (mut n1, r1) = n0.divrem(&g);
        debug_assert!(r1.is_zero());
        let (mut d1, r2) = d0.divrem(&g);
        debug_assert!(r2.is_zero());
        let lc = d1.leading_coeff().unwrap().clone().recip();
        n1 = n1.scaled(&lc);
        d1 = d1.scaled(&lc);
        QRat { num: n1.shifted(u - v), den: d1 }
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        QRat { num: p, den: LaurentPoly::one() }
    }

    pub fn from_rat(c: Rat) -> Self {
        Self::from_poly(LaurentPoly::constant(c))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rat(rat_int(n))
    }

    pub fn from_ratio(p: i64, q: i64) -> Self {
        Self::from_rat(rat_ratio(p, q))
    }

    /// q^k
    pub fn q_pow(k: i64) -> Self {
        Self::half_pow(2 * k)
    }

    pub fn q() -> Self {
        Self::q_pow(1)
    }

    /// q^(k/2), i.e. s^k.
    pub fn half_pow(k: i64) -> Self {
        Self::from_poly(LaurentPoly::monomial(k, Rat::one()))
    }

    pub fn num(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn den(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverting zero scalar");
        QRat::new(self.den.clone(), self.num.clone())
    }

    /// True when the value lies in the field of rational functions of q
    /// (only even s-powers in canonical form).
    pub fn is_q_rational(&self) -> bool {
        self.num.is_even() && self.den.is_even()
    }

    /// Exact value at q = q0 (a positive rational). Fails on half powers
    /// and on poles.
    pub fn evaluate_q(&self, q0: &Rat) -> Result<Rat, NumericError> {
        let n = self.num.eval_q(q0)?;
        let d = self.den.eval_q(q0)?;
        if d.is_zero() {
            return Err(NumericError::Pole(q0.to_string()));
        }
        Ok(n / d)
    }

    /// Exact sign at q = q0: -1, 0, or 1.
    pub fn sign_at(&self, q0: &Rat) -> Result<i8, NumericError> {
        let v = self.evaluate_q(q0)?;
        Ok(if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        })
    }

    pub fn pow(&self, k: i64) -> Self {
        if k < 0 {
            return self.inv().pow(-k);
        }
        let mut acc = QRat::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// JSON encoding. Powers are integer q-powers when the value is a
    /// rational function of q; otherwise the powers are in units of q^(1/2)
    /// and the object carries `"half": true`.
    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::json;
        let half = !self.is_q_rational();
        let enc = |p: &LaurentPoly| -> serde_json::Value {
            serde_json::Value::Array(
                p.terms()
                    .map(|(pow, c)| {
                        let shown = if half { *pow } else { *pow / 2 };
                        json!([shown, c.to_string()])
                    })
                    .collect(),
            )
        };
        let mut obj = serde_json::Map::new();
        obj.insert("num".into(), enc(&self.num));
        obj.insert("den".into(), enc(&self.den));
        if half {
            obj.insert("half".into(), serde_json::Value::Bool(true));
        }
        serde_json::Value::Object(obj)
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, DecodeError> {
        let obj = v.as_object().ok_or(DecodeError("scalar: not an object"))?;
        let half = obj.get("half").and_then(|h| h.as_bool()).unwrap_or(false);
        let dec = |key: &'static str| -> Result<LaurentPoly, DecodeError> {
            let arr = obj
                .get(key)
                .and_then(|x| x.as_array())
                .ok_or(DecodeError("scalar: missing term list"))?;
            let mut p = LaurentPoly::zero_poly();
            for item in arr {
                let pair = item.as_array().ok_or(DecodeError("scalar: term"))?;
                if pair.len() != 2 {
                    return Err(DecodeError("scalar: term arity"));
                }
                let pow = pair[0].as_i64().ok_or(DecodeError("scalar: power"))?;
                let c: Rat = pair[1]
                    .as_str()
                    .ok_or(DecodeError("scalar: coefficient"))?
                    .parse()
                    .map_err(|_| DecodeError("scalar: coefficient"))?;
                p.add_term(if half { pow } else { 2 * pow }, c);
            }
            Ok(p)
        };
        let num = dec("num")?;
        let den = dec("den")?;
        if den.is_zero() {
            return Err(DecodeError("scalar: zero denominator"));
        }
        Ok(QRat::new(num, den))
    }
}

impl Zero for QRat {
    fn zero() -> Self {
        QRat { num: LaurentPoly::zero_poly(), den: LaurentPoly::one() }
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for QRat {
    fn one() -> Self {
        QRat { num: LaurentPoly::one(), den: LaurentPoly::one() }
    }
    fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }
}

impl Add for QRat {
    type Output = QRat;
    fn add(self, rhs: Self) -> QRat {
        &self + &rhs
    }
}

impl<'a> Add<&'a QRat> for &'a QRat {
    type Output = QRat;
    fn add(self, rhs: &QRat) -> QRat {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        QRat::new(num, &self.den * &rhs.den)
    }
}

impl Sub for QRat {
    type Output = QRat;
    fn sub(self, rhs: Self) -> QRat {
        &self + &(-rhs)
    }
}

impl<'a> Sub<&'a QRat> for &'a QRat {
    type Output = QRat;
    fn sub(self, rhs: &QRat) -> QRat {
        self + &(-rhs.clone())
    }
}

impl Mul for QRat {
    type Output = QRat;
    fn mul(self, rhs: Self) -> QRat {
        &self * &rhs
    }
}

impl<'a> Mul<&'a QRat> for &'a QRat {
    type Output = QRat;
    fn mul(self, rhs: &QRat) -> QRat {
        if self.is_zero() || rhs.is_zero() {
            return QRat::zero();
        }
        QRat::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Neg for QRat {
    type Output = QRat;
    fn neg(self) -> QRat {
        QRat { num: -self.num, den: self.den }
    }
}

// ---------------------------------------------------------------------------
// Display

fn fmt_power(pow: i64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    // pow is in s-units.
    if pow == 2 {
        write!(f, "q")
    } else if pow % 2 == 0 {
        write!(f, "q^{}", pow / 2)
    } else {
        write!(f, "q^({}/2)", pow)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (pow, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = if neg { -c.clone() } else { c.clone() };
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if *pow == 0 {
                write!(f, "{}", mag)?;
            } else if mag.is_one() {
                fmt_power(*pow, f)?;
            } else {
                write!(f, "{}*", mag)?;
                fmt_power(*pow, f)?;
            }
        }
        Ok(())
    }
}

impl QRat {
    /// True when the canonical form is a single Laurent term with a
    /// nonnegative rational coefficient.
    pub fn is_simple_positive(&self) -> bool {
        self.den.is_one()
            && self.num.num_terms() == 1
            && !self.num.leading_coeff().unwrap().is_negative()
    }

    /// Splits a single-term value into (negative?, magnitude). Compound
    /// values come back as (false, self).
    pub fn display_sign_split(&self) -> (bool, QRat) {
        if self.den.is_one() && self.num.num_terms() == 1 {
            let c = self.num.leading_coeff().unwrap();
            if c.is_negative() {
                return (true, -self.clone());
            }
        }
        (false, self.clone())
    }

    /// True when the printed form needs parentheses inside a product.
    pub fn needs_parens(&self) -> bool {
        !(self.den.is_one() && self.num.num_terms() == 1)
    }
}

impl fmt::Display for QRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        if self.num.num_terms() == 1 {
            write!(f, "{}", self.num)?;
        } else {
            write!(f, "({})", self.num)?;
        }
        if self.den.num_terms() == 1 {
            write!(f, "/{}", self.den)
        } else {
            write!(f, "/({})", self.den)
        }
    }
}

// ---------------------------------------------------------------------------
// Complex rationals for numeric instantiation

/// Gaussian rational: exact complex number with rational real and
/// imaginary parts.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GaussQ {
    pub re: Rat,
    pub im: Rat,
}

impl GaussQ {
    pub fn new(re: Rat, im: Rat) -> Self {
        GaussQ { re, im }
    }

    pub fn from_rat(re: Rat) -> Self {
        GaussQ { re, im: Rat::zero() }
    }

    pub fn i() -> Self {
        GaussQ { re: Rat::zero(), im: Rat::one() }
    }

    pub fn conj(&self) -> Self {
        GaussQ { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn inv(&self) -> Self {
        let n = &self.re * &self.re + &self.im * &self.im;
        assert!(!n.is_zero(), "inverting zero");
        GaussQ { re: &self.re / &n, im: -&self.im / &n }
    }

    pub fn pow(&self, k: i64) -> Self {
        if k < 0 {
            return self.inv().pow(-k);
        }
        let mut acc = GaussQ::from_rat(Rat::one());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }
}

impl Zero for GaussQ {
    fn zero() -> Self {
        GaussQ::from_rat(Rat::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussQ {
    fn one() -> Self {
        GaussQ::from_rat(Rat::one())
    }
}

impl Add for GaussQ {
    type Output = GaussQ;
    fn add(self, rhs: Self) -> GaussQ {
        GaussQ { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl Sub for GaussQ {
    type Output = GaussQ;
    fn sub(self, rhs: Self) -> GaussQ {
        GaussQ { re: self.re - rhs.re, im: self.im - rhs.im }
    }
}

impl Mul for GaussQ {
    type Output = GaussQ;
    fn mul(self, rhs: Self) -> GaussQ {
        &self * &rhs
    }
}

impl<'a> Mul<&'a GaussQ> for &'a GaussQ {
    type Output = GaussQ;
    fn mul(self, rhs: &GaussQ) -> GaussQ {
        GaussQ {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for GaussQ {
    type Output = GaussQ;
    fn neg(self) -> GaussQ {
        GaussQ { re: -self.re, im: -self.im }
    }
}

impl fmt::Display for GaussQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}*i", self.im)
        } else if self.im.is_negative() {
            write!(f, "{} - {}*i", self.re, -self.im.clone())
        } else {
            write!(f, "{} + {}*i", self.re, self.im)
        }
    }
}

// ---------------------------------------------------------------------------
// Coefficient-ring abstraction

/// Commutative ring the container types are generic over.
pub trait Ring:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
{
}

impl<T> Ring for T where
    T: Clone
        + PartialEq
        + fmt::Debug
        + fmt::Display
        + Zero
        + One
        + Neg<Output = T>
        + Sub<Output = T>
{
}

/// Ring with exact division by nonzero elements.
pub trait Field: Ring {
    fn inv(&self) -> Self;
    fn div(&self, rhs: &Self) -> Self {
        self.clone() * rhs.inv()
    }
}

impl Field for QRat {
    fn inv(&self) -> Self {
        QRat::inv(self)
    }
}

impl Field for Rat {
    fn inv(&self) -> Self {
        self.recip()
    }
}

impl Field for GaussQ {
    fn inv(&self) -> Self {
        GaussQ::inv(self)
    }
}

impl Field for f64 {
    fn inv(&self) -> Self {
        1.0 / self
    }
}

/// Coefficient rings the symbolic engine runs over: they contain the
/// rational functions of q^(1/2) and carry a conjugation fixing q.
pub trait Coeff: Ring {
    fn from_qrat(x: &QRat) -> Self;
    fn conj(&self) -> Self;
    fn half_q_pow(k: i64) -> Self {
        Self::from_qrat(&QRat::half_pow(k))
    }
    fn q_pow(k: i64) -> Self {
        Self::half_q_pow(2 * k)
    }
}

impl Coeff for QRat {
    fn from_qrat(x: &QRat) -> Self {
        x.clone()
    }
    fn conj(&self) -> Self {
        self.clone()
    }
}


impl QRat {
    pub fn scale_int(&self, k: i64) -> Self {
        self * &QRat::from_int(k)
    }
}
