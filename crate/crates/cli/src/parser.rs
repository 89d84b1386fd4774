//! Expression grammar over the coordinate algebra, the enveloping
//! algebra, and the frame calculus.
//!
//!   expr   := ['-'] term (('+' | '-') term)*
//!   term   := factor (('*' | '^' | '∧' | 'wedge' | '⊗' | 'tensor') factor)*
//!   factor := NUMBER | 'q' ['^' INT] | SYMBOL ['^' NAT] | '(' expr ')'
//!             with any number of postfix '†'
//!
//! NUMBER is an integer or a ratio like 17/12; SYMBOL is one of
//! a, as, c, cs, E, F, K, Kinv, wm, wp, wz. Evaluation is typed:
//! sums need matching kinds, '*' covers scalar scaling, algebra
//! products and module products on forms, '∧' is the exterior
//! product, '⊗' builds frame tensors (rank 2 and 3), '†' is the star.

use num::BigInt;
use num_traits::{One, Zero};
use qhodge_core::algebra::AlgebraElement;
use qhodge_core::forms::{basis_display, commute_past, weights, KForm, Tensor2, DIM};
use qhodge_core::linalg::Matrix;
use qhodge_core::scalar::{Coeff, QRat, Rat};
use qhodge_core::uea::{UEAElement, UGen, UMono};
use qhodge_core::Element;

/// Position-carrying parse or type diagnostic.
#[derive(Debug, Clone)]
pub struct ExprError {
    pub pos: usize,
    pub msg: String,
}

impl std::fmt::Display for ExprError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "at byte {}: {}", self.pos, self.msg)
    }
}

impl std::error::Error for ExprError {}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T, ExprError> {
    Err(ExprError { pos, msg: msg.into() })
}

/// Frame tensor of rank 2 or 3 with left algebra coefficients,
/// indexed by the multi-index in base 3.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub rank: usize,
    pub comps: Vec<Element>,
}

impl Tensor {
    fn zero(rank: usize) -> Self {
        Tensor { rank, comps: vec![AlgebraElement::zero(); 3usize.pow(rank as u32)] }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    fn add(&self, rhs: &Self) -> Self {
        Tensor {
            rank: self.rank,
            comps: self.comps.iter().zip(&rhs.comps).map(|(a, b)| a.add(b)).collect(),
        }
    }

    fn neg(&self) -> Self {
        Tensor { rank: self.rank, comps: self.comps.iter().map(|c| c.neg()).collect() }
    }

    fn scale(&self, c: &QRat) -> Self {
        Tensor { rank: self.rank, comps: self.comps.iter().map(|x| x.scale(c)).collect() }
    }

    fn scale_left(&self, x: &Element) -> Self {
        Tensor { rank: self.rank, comps: self.comps.iter().map(|y| x.mul(y)).collect() }
    }

    /// Frame weight of a multi-index: commuting an algebra element
    /// through the slot multiplies charges by q^(sum of slot weights).
    fn weight(&self, idx: usize) -> i64 {
        let mut w = 0;
        let mut rest = idx;
        for _ in 0..self.rank {
            w += weights(1)[rest % 3];
            rest /= 3;
        }
        w
    }

    /// Tensor product over the algebra: right coefficients commute
    /// through the left factor's frame slots.
    fn tensor(&self, rhs: &Self) -> Self {
        let mut out = Tensor::zero(self.rank + rhs.rank);
        let stride = 3usize.pow(rhs.rank as u32);
        for (i, x) in self.comps.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            // The slot weight is read off the digits of i in this
            // tensor's own indexing (most significant digit first),
            // which matches weight() up to digit order; weights sum,
            // so the order is irrelevant.
            let w = self.weight_msb(i);
            for (j, y) in rhs.comps.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let moved = x.mul(&commute_past(w, y));
                out.comps[i * stride + j] = out.comps[i * stride + j].add(&moved);
            }
        }
        out
    }

    fn weight_msb(&self, idx: usize) -> i64 {
        // Digits in either order sum to the same weight.
        self.weight(idx)
    }

    /// Apply a scalar matrix (braiding, antisymmetriser) on the frame
    /// part; left coefficients ride along.
    pub fn apply_matrix(&self, m: &Matrix<QRat>) -> Self {
        let n = self.comps.len();
        assert_eq!((m.rows(), m.cols()), (n, n), "matrix size matches tensor rank");
        let mut out = Tensor::zero(self.rank);
        for (k, x) in self.comps.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for r in 0..n {
                let entry = &m[(r, k)];
                if !entry.is_zero() {
                    out.comps[r] = out.comps[r].add(&x.scale(entry));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        if self.rank == 2 {
            return Tensor2::from_coeffs(self.comps.clone()).to_json();
        }
        let names = qhodge_core::forms::json_keys(1);
        let mut map = serde_json::Map::new();
        for (idx, c) in self.comps.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (i, j, k) = (idx / 9, (idx / 3) % 3, idx % 3);
            map.insert(format!("{}.{}.{}", names[i], names[j], names[k]), c.to_json());
        }
        serde_json::json!({ "tensor": map })
    }
}

impl std::fmt::Display for Tensor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.rank == 2 {
            return write!(f, "{}", Tensor2::from_coeffs(self.comps.clone()));
        }
        if self.is_zero() {
            return write!(f, "0");
        }
        let names = basis_display(1);
        let mut first = true;
        for (idx, c) in self.comps.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (i, j, k) = (idx / 9, (idx / 3) % 3, idx % 3);
            let body = format!("{}⊗{}⊗{}", names[i], names[j], names[k]);
            let t = qhodge_core::algebra::format_term(&c.to_string(), &body, false);
            if first {
                write!(f, "{}", t.display_first())?;
                first = false;
            } else {
                write!(f, " {}", t.display_follow())?;
            }
        }
        Ok(())
    }
}

/// A typed expression value.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Scalar(QRat),
    Algebra(Element),
    Uea(UEAElement<QRat>),
    Form(KForm<QRat>),
    Tensor(Tensor),
}

impl Value {
    pub fn kind(&self) -> &'static str {
        match self {
            Value::Scalar(_) => "scalar",
            Value::Algebra(_) => "algebra element",
            Value::Uea(_) => "enveloping-algebra element",
            Value::Form(f) => match f.degree() {
                0 => "0-form",
                1 => "1-form",
                2 => "2-form",
                _ => "3-form",
            },
            Value::Tensor(t) => {
                if t.rank == 2 {
                    "rank-2 tensor"
                } else {
                    "rank-3 tensor"
                }
            }
        }
    }

    /// Algebra view of scalar-like values.
    pub fn into_algebra(self, pos: usize) -> Result<Element, ExprError> {
        match self {
            Value::Scalar(c) => Ok(AlgebraElement::monomial(
                qhodge_core::algebra::Monomial::unit(),
                c,
            )),
            Value::Algebra(x) => Ok(x),
            Value::Form(f) if f.degree() == 0 => Ok(f.coeff(0).clone()),
            other => err(pos, format!("expected an algebra element, found a {}", other.kind())),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Scalar(c) => c.to_json(),
            Value::Algebra(x) => x.to_json(),
            Value::Uea(h) => h.to_json(),
            Value::Form(f) => f.to_json(),
            Value::Tensor(t) => t.to_json(),
        }
    }
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Scalar(c) => write!(f, "{}", c),
            Value::Algebra(x) => write!(f, "{}", x),
            Value::Uea(h) => write!(f, "{}", h),
            Value::Form(k) => write!(f, "{}", k),
            Value::Tensor(t) => write!(f, "{}", t),
        }
    }
}

// ---------------------------------------------------------------------------
// Tokens

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rat),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Wedge,
    TensorOp,
    Dagger,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let mut out = Vec::new();
    let bytes: Vec<char> = src.chars().collect();
    let mut byte_pos = 0usize;
    let mut i = 0usize;
    while i < bytes.len() {
        let ch = bytes[i];
        let pos = byte_pos;
        let advance = |c: char| c.len_utf8();
        match ch {
            ' ' | '\t' | '\n' | '\r' => {
                byte_pos += advance(ch);
                i += 1;
            }
            '+' => {
                out.push((Tok::Plus, pos));
                byte_pos += 1;
                i += 1;
            }
            '-' => {
                out.push((Tok::Minus, pos));
                byte_pos += 1;
                i += 1;
            }
            '*' => {
                out.push((Tok::Star, pos));
                byte_pos += 1;
                i += 1;
            }
            '^' => {
                out.push((Tok::Caret, pos));
                byte_pos += 1;
                i += 1;
            }
            '(' => {
                out.push((Tok::LParen, pos));
                byte_pos += 1;
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, pos));
                byte_pos += 1;
                i += 1;
            }
            '∧' => {
                out.push((Tok::Wedge, pos));
                byte_pos += advance(ch);
                i += 1;
            }
            '⊗' => {
                out.push((Tok::TensorOp, pos));
                byte_pos += advance(ch);
                i += 1;
            }
            '†' => {
                out.push((Tok::Dagger, pos));
                byte_pos += advance(ch);
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let mut text: String = bytes[start..i].iter().collect();
                // A ratio like 3/4 is one numeric token.
                if i + 1 < bytes.len() && bytes[i] == '/' && bytes[i + 1].is_ascii_digit() {
                    i += 1;
                    let dstart = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    text.push('/');
                    text.extend(&bytes[dstart..i]);
                }
                let rat = parse_rat_token(&text, pos)?;
                byte_pos += text.len();
                out.push((Tok::Num(rat), pos));
            }
            'a'..='z' | 'A'..='Z' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                    i += 1;
                }
                let word: String = bytes[start..i].iter().collect();
                byte_pos += word.len();
                match word.as_str() {
                    "wedge" => out.push((Tok::Wedge, pos)),
                    "tensor" => out.push((Tok::TensorOp, pos)),
                    _ => out.push((Tok::Ident(word), pos)),
                }
            }
            other => {
                return err(pos, format!("unexpected character '{}'", other));
            }
        }
    }
    Ok(out)
}

fn parse_rat_token(text: &str, pos: usize) -> Result<Rat, ExprError> {
    let make_int = |s: &str| -> Result<BigInt, ExprError> {
        s.parse::<BigInt>().map_err(|_| ExprError {
            pos,
            msg: format!("bad number '{}'", s),
        })
    };
    if let Some((n, d)) = text.split_once('/') {
        let den = make_int(d)?;
        if den == BigInt::from(0) {
            return err(pos, "zero denominator");
        }
        Ok(Rat::new(make_int(n)?, den))
    } else {
        Ok(Rat::from(make_int(text)?))
    }
}

/// Parse an exact rational flag value like "1/2" or "-3".
pub fn parse_rational(text: &str) -> Result<Rat, ExprError> {
    let t = text.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    if body.is_empty() || !body.chars().all(|c| c.is_ascii_digit() || c == '/') {
        return err(0, format!("expected an exact rational, found '{}'", text));
    }
    let v = parse_rat_token(body, 0)?;
    Ok(if neg { -v } else { v })
}

// ---------------------------------------------------------------------------
// Parser / evaluator

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    end: usize,
}

/// Parse and evaluate an expression.
pub fn parse(src: &str) -> Result<Value, ExprError> {
    let toks = tokenize(src)?;
    let end = src.len();
    let mut p = Parser { toks, at: 0, end };
    let v = p.expr()?;
    if let Some((_, pos)) = p.peek_pos() {
        return err(pos, "trailing input after a complete expression");
    }
    Ok(canonical(v))
}

/// Demote values that print as bare scalars, so the canonical printer
/// round-trips: zero anything and scalar multiples of the unit all
/// reparse as scalars.
fn canonical(v: Value) -> Value {
    match v {
        Value::Algebra(x) => {
            if x.is_zero() {
                return Value::Scalar(QRat::zero());
            }
            {
                let mut terms = x.terms();
                if let Some((m, c)) = terms.next() {
                    if terms.next().is_none() && *m == qhodge_core::algebra::Monomial::unit() {
                        return Value::Scalar(c.clone());
                    }
                }
            }
            Value::Algebra(x)
        }
        Value::Uea(h) => {
            if h.is_zero() {
                return Value::Scalar(QRat::zero());
            }
            {
                let mut terms = h.terms();
                if let Some((m, c)) = terms.next() {
                    if terms.next().is_none() && *m == UMono::unit() {
                        return Value::Scalar(c.clone());
                    }
                }
            }
            Value::Uea(h)
        }
        Value::Form(f) => {
            if f.is_zero() {
                return Value::Scalar(QRat::zero());
            }
            if f.degree() == 0 {
                return canonical(Value::Algebra(f.coeff(0).clone()));
            }
            Value::Form(f)
        }
        Value::Tensor(t) => {
            if t.is_zero() {
                return Value::Scalar(QRat::zero());
            }
            Value::Tensor(t)
        }
        s => s,
    }
}

/// Parse a flag that accepts a scalar expression like "q^6" or "1/2".
pub fn parse_scalar(src: &str) -> Result<QRat, ExprError> {
    match parse(src)? {
        Value::Scalar(c) => Ok(c),
        other => err(0, format!("expected a scalar, found a {}", other.kind())),
    }
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn peek_pos(&self) -> Option<(&Tok, usize)> {
        self.toks.get(self.at).map(|(t, p)| (t, *p))
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<(Tok, usize)> {
        let t = self.toks.get(self.at).cloned();
        self.at += 1;
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Value, ExprError> {
        let negate = self.eat(&Tok::Minus);
        let mut acc = self.term()?;
        if negate {
            acc = neg_value(acc);
        }
        loop {
            if self.eat(&Tok::Plus) {
                let pos = self.pos();
                let rhs = self.term()?;
                acc = add_values(acc, rhs, pos)?;
            } else if self.eat(&Tok::Minus) {
                let pos = self.pos();
                let rhs = self.term()?;
                acc = add_values(acc, neg_value(rhs), pos)?;
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Value, ExprError> {
        let mut acc = self.factor()?;
        loop {
            let op_pos = self.pos();
            if self.eat(&Tok::Star) {
                let rhs = self.factor()?;
                acc = mul_values(acc, rhs, op_pos)?;
            } else if self.eat(&Tok::Caret) {
                let k = self.exponent()?;
                acc = pow_value(acc, k, op_pos)?;
            } else if self.eat(&Tok::Wedge) {
                let rhs = self.factor()?;
                acc = wedge_values(acc, rhs, op_pos)?;
            } else if self.eat(&Tok::TensorOp) {
                let rhs = self.factor()?;
                acc = tensor_values(acc, rhs, op_pos)?;
            } else {
                break;
            }
        }
        Ok(acc)
    }

    /// A signed integer exponent after '^'.
    fn exponent(&mut self) -> Result<i64, ExprError> {
        let neg = self.eat(&Tok::Minus);
        let pos = self.pos();
        match self.bump() {
            Some((Tok::Num(r), _)) if r.is_integer() => {
                let n: i64 = num::ToPrimitive::to_i64(&r.to_integer())
                    .ok_or(ExprError { pos, msg: "exponent out of range".into() })?;
                Ok(if neg { -n } else { n })
            }
            _ => err(pos, "expected an integer exponent"),
        }
    }

    fn factor(&mut self) -> Result<Value, ExprError> {
        let (tok, pos) = match self.bump() {
            Some(t) => t,
            None => return err(self.end, "expected a factor, found end of input"),
        };
        let mut v = match tok {
            Tok::Num(r) => Value::Scalar(QRat::from_rat(r)),
            Tok::LParen => {
                let inner = self.expr()?;
                if !self.eat(&Tok::RParen) {
                    return err(self.pos(), "expected ')'");
                }
                inner
            }
            Tok::Ident(name) => self.symbol(&name, pos)?,
            other => {
                return err(pos, format!("expected a factor, found {:?}", other));
            }
        };
        while self.eat(&Tok::Dagger) {
            v = star_value(v, pos)?;
        }
        Ok(v)
    }

    fn symbol(&mut self, name: &str, pos: usize) -> Result<Value, ExprError> {
        use qhodge_core::algebra::Gen;
        if name == "q" {
            let k = if self.eat(&Tok::Caret) { self.exponent()? } else { 1 };
            return Ok(Value::Scalar(QRat::q_pow(k)));
        }
        let base = match name {
            "a" => Value::Algebra(AlgebraElement::generator(Gen::A)),
            "as" => Value::Algebra(AlgebraElement::generator(Gen::AStar)),
            "c" => Value::Algebra(AlgebraElement::generator(Gen::C)),
            "cs" => Value::Algebra(AlgebraElement::generator(Gen::CStar)),
            "E" => Value::Uea(UEAElement::generator(UGen::E)),
            "F" => Value::Uea(UEAElement::generator(UGen::F)),
            "K" => Value::Uea(UEAElement::generator(UGen::K)),
            "Kinv" => Value::Uea(UEAElement::generator(UGen::KInv)),
            "wm" => Value::Form(KForm::frame(0)),
            "wp" => Value::Form(KForm::frame(1)),
            "wz" => Value::Form(KForm::frame(2)),
            other => {
                return err(pos, format!("unknown symbol '{}'", other));
            }
        };
        if self.eat(&Tok::Caret) {
            let k = self.exponent()?;
            if k < 0 {
                return err(pos, "negative powers are only defined for q");
            }
            return pow_value(base, k, pos);
        }
        Ok(base)
    }
}

// ---------------------------------------------------------------------------
// Typed operations

fn neg_value(v: Value) -> Value {
    match v {
        Value::Scalar(c) => Value::Scalar(-c),
        Value::Algebra(x) => Value::Algebra(x.neg()),
        Value::Uea(h) => Value::Uea(h.scale(&-QRat::one())),
        Value::Form(f) => Value::Form(f.neg()),
        Value::Tensor(t) => Value::Tensor(t.neg()),
    }
}

fn add_values(lhs: Value, rhs: Value, pos: usize) -> Result<Value, ExprError> {
    use Value::*;
    Ok(match (lhs, rhs) {
        (Scalar(a), Scalar(b)) => Scalar(&a + &b),
        (Scalar(a), Algebra(b)) | (Algebra(b), Scalar(a)) => {
            Algebra(scalar_elem(a).add(&b))
        }
        (Algebra(a), Algebra(b)) => Algebra(a.add(&b)),
        (Scalar(a), Uea(b)) | (Uea(b), Scalar(a)) => {
            Uea(UEAElement::monomial(UMono::unit(), a).add(&b))
        }
        (Uea(a), Uea(b)) => Uea(a.add(&b)),
        (Scalar(a), Form(b)) | (Form(b), Scalar(a)) if b.degree() == 0 => {
            Form(KForm::scalar(scalar_elem(a)).add(&b))
        }
        (Algebra(a), Form(b)) | (Form(b), Algebra(a)) if b.degree() == 0 => {
            Form(KForm::scalar(a).add(&b))
        }
        (Form(a), Form(b)) if a.degree() == b.degree() => Form(a.add(&b)),
        (Form(a), Form(b)) => {
            return err(
                pos,
                format!("cannot add a {}-form and a {}-form", a.degree(), b.degree()),
            );
        }
        (Tensor(a), Tensor(b)) if a.rank == b.rank => Tensor(a.add(&b)),
        (l, r) => {
            return err(pos, format!("cannot add a {} and a {}", l.kind(), r.kind()));
        }
    })
}

fn scalar_elem(c: QRat) -> Element {
    AlgebraElement::monomial(qhodge_core::algebra::Monomial::unit(), c)
}

fn mul_values(lhs: Value, rhs: Value, pos: usize) -> Result<Value, ExprError> {
    use Value::*;
    Ok(match (lhs, rhs) {
        (Scalar(a), Scalar(b)) => Scalar(&a * &b),
        (Scalar(a), Algebra(b)) | (Algebra(b), Scalar(a)) => Algebra(b.scale(&a)),
        (Algebra(a), Algebra(b)) => Algebra(a.mul(&b)),
        (Scalar(a), Uea(b)) | (Uea(b), Scalar(a)) => Uea(b.scale(&a)),
        (Uea(a), Uea(b)) => Uea(a.mul(&b)),
        (Scalar(a), Form(b)) | (Form(b), Scalar(a)) => Form(b.scale(&a)),
        (Algebra(a), Form(b)) => Form(b.scale_left(&a)),
        (Form(a), Algebra(b)) => {
            // Right module structure: coefficients commute through the
            // frame with the slot weight.
            let d = a.degree();
            let mut out = KForm::zero(d);
            for i in 0..DIM[d] {
                if !a.coeff(i).is_zero() {
                    out.set_coeff(i, a.coeff(i).mul(&commute_past(weights(d)[i], &b)));
                }
            }
            Form(out)
        }
        (Form(a), Form(b)) if a.degree() == 0 => Form(b.scale_left(a.coeff(0))),
        (Form(a), Form(b)) if b.degree() == 0 => {
            return mul_values(Form(a), Algebra(b.coeff(0).clone()), pos);
        }
        (Scalar(a), Tensor(b)) | (Tensor(b), Scalar(a)) => Tensor(b.scale(&a)),
        (Algebra(a), Tensor(b)) => Tensor(b.scale_left(&a)),
        (Form(_), Form(_)) => {
            return err(pos, "products of positive-degree forms use '∧', not '*'");
        }
        (l, r) => {
            return err(pos, format!("cannot multiply a {} by a {}", l.kind(), r.kind()));
        }
    })
}

fn pow_value(base: Value, k: i64, pos: usize) -> Result<Value, ExprError> {
    use Value::*;
    match base {
        Scalar(c) => {
            if k < 0 && c.is_zero() {
                return err(pos, "zero has no negative powers");
            }
            Ok(Scalar(c.pow(k)))
        }
        Algebra(x) => {
            if k < 0 {
                return err(pos, "algebra elements have no negative powers");
            }
            Ok(Algebra(x.pow(k as u32)))
        }
        Uea(h) => {
            if k < 0 {
                return err(pos, "use Kinv for the inverse group-like generator");
            }
            let mut acc = UEAElement::unit();
            for _ in 0..k {
                acc = acc.mul(&h);
            }
            Ok(Uea(acc))
        }
        Form(f) if f.degree() == 0 => pow_value(Algebra(f.coeff(0).clone()), k, pos)
            .map(|v| match v {
                Algebra(x) => Form(KForm::scalar(x)),
                other => other,
            }),
        other => err(pos, format!("a {} has no scalar power", other.kind())),
    }
}

fn wedge_values(lhs: Value, rhs: Value, pos: usize) -> Result<Value, ExprError> {
    use Value::*;
    let as_form = |v: Value| -> Result<KForm<QRat>, ExprError> {
        match v {
            Form(f) => Ok(f),
            Scalar(c) => Ok(KForm::scalar(scalar_elem(c))),
            Algebra(x) => Ok(KForm::scalar(x)),
            other => err(pos, format!("'∧' applies to forms, not a {}", other.kind())),
        }
    };
    let a = as_form(lhs)?;
    let b = as_form(rhs)?;
    match a.wedge(&b) {
        Some(w) => Ok(Form(w)),
        None => err(
            pos,
            format!("no {}-forms exist: the calculus stops at degree 3", a.degree() + b.degree()),
        ),
    }
}

fn tensor_values(lhs: Value, rhs: Value, pos: usize) -> Result<Value, ExprError> {
    use Value::*;
    let as_tensor = |v: Value| -> Result<self::Tensor, ExprError> {
        match v {
            Tensor(t) => Ok(t),
            Form(f) if f.degree() == 1 => {
                let mut t = self::Tensor::zero(1);
                for i in 0..3 {
                    t.comps[i] = f.coeff(i).clone();
                }
                Ok(t)
            }
            other => err(
                pos,
                format!("'⊗' applies to 1-forms and frame tensors, not a {}", other.kind()),
            ),
        }
    };
    let a = as_tensor(lhs)?;
    let b = as_tensor(rhs)?;
    if a.rank + b.rank > 3 {
        return err(pos, "frame tensors stop at rank 3");
    }
    let t = a.tensor(&b);
    if t.rank == 1 {
        let mut f = KForm::zero(1);
        for i in 0..3 {
            f.set_coeff(i, t.comps[i].clone());
        }
        return Ok(Form(f));
    }
    Ok(Tensor(t))
}

fn star_value(v: Value, pos: usize) -> Result<Value, ExprError> {
    use Value::*;
    Ok(match v {
        Scalar(c) => Scalar(Coeff::conj(&c)),
        Algebra(x) => Algebra(x.star()),
        Uea(h) => Uea(h.star()),
        Form(f) => Form(f.star()),
        Tensor(_) => {
            return err(pos, "frame tensors have no star; apply '†' before '⊗'");
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use qhodge_core::algebra::Gen;

    #[test]
    fn the_unitarity_relation_collapses_to_one() {
        let v = parse("as*a + cs*c").unwrap();
        assert_eq!(v, Value::Scalar(QRat::one()));
        assert_eq!(v.to_string(), "1");
    }

    #[test]
    fn normal_form_of_a_reversed_product() {
        let v = parse("c*a").unwrap();
        let mut want = AlgebraElement::<QRat>::zero();
        want.add_term(
            qhodge_core::algebra::Monomial::new(false, 1, 1, 0),
            QRat::q_pow(-1),
        );
        assert_eq!(v, Value::Algebra(want));
        assert_eq!(v.to_string(), "q^-1 * a*c");
    }

    #[test]
    fn wedge_of_a_frame_with_itself_vanishes() {
        let v = parse("wm ∧ wm").unwrap();
        assert_eq!(v, Value::Scalar(QRat::zero()));
        assert_eq!(v.to_string(), "0");
        assert_eq!(parse("wm wedge wm").unwrap().to_string(), "0");
    }

    #[test]
    fn left_coefficients_and_q_powers() {
        let v = parse("q^-2 * a * wz").unwrap();
        match v {
            Value::Form(f) => {
                assert_eq!(f.degree(), 1);
                assert_eq!(
                    f.coeff(2),
                    &AlgebraElement::generator(Gen::A).scale(&QRat::q_pow(-2))
                );
            }
            other => panic!("unexpected value {:?}", other),
        }
    }

    #[test]
    fn daggers_and_powers() {
        assert_eq!(
            parse("a†").unwrap(),
            Value::Algebra(AlgebraElement::generator(Gen::AStar))
        );
        assert_eq!(parse("c^2").unwrap(), parse("c*c").unwrap());
        assert_eq!(parse("(c*cs)^2").unwrap(), parse("c*cs*c*cs").unwrap());
        assert_eq!(parse("K*Kinv").unwrap(), Value::Scalar(QRat::one()));
    }

    #[test]
    fn typed_mistakes_are_reported_with_positions() {
        let e = parse("wm ∧ E").unwrap_err();
        assert!(e.msg.contains("'∧'"), "unexpected message {}", e.msg);
        assert!(parse("a + E").is_err());
        assert!(parse("wm * wp").is_err());
        let e = parse("c*a)").unwrap_err();
        assert!(e.msg.contains("trailing"), "unexpected message {}", e.msg);
    }

    #[test]
    fn print_parse_round_trip() {
        let samples = [
            "as*a + cs*c",
            "c*a",
            "q^-2 * a * wz",
            "a*c - 3/4 * cs^2",
            "(1 + q^2) * wm ∧ wp",
            "wm ⊗ wp - q^2 * wp ⊗ wm",
            "F*E*K - Kinv",
            "a ∧ wm + wz ∧ c",
        ];
        for s in samples {
            let v = parse(s).unwrap();
            let printed = v.to_string();
            let reparsed = parse(&printed)
                .unwrap_or_else(|e| panic!("unparseable print '{}' of '{}': {}", printed, s, e));
            assert_eq!(reparsed, v, "round trip of '{}' via '{}'", s, printed);
        }
    }

    #[test]
    fn rational_flags() {
        assert_eq!(parse_rational("1/2").unwrap(), qhodge_core::scalar::rat_ratio(1, 2));
        assert_eq!(parse_rational("-3").unwrap(), qhodge_core::scalar::rat_int(-3));
        assert!(parse_rational("0.5").is_err());
        assert_eq!(parse_scalar("q^6").unwrap(), QRat::q_pow(6));
    }
}
