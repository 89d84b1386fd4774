//! The coordinate algebra of quantum SU(2).
//!
//! Generators a, a*, c, c* with the standard relations; every element is
//! held in the PBW normal form spanned by a^k c^l c*^m and a*^k c^l c*^m.
//! The module carries the full Hopf structure (coproduct, counit, antipode),
//! the *-structure, the charge grading that feeds the calculus, and the
//! invariant integral, solved degree by degree from invariance and cached.

use crate::linalg::Matrix;
use crate::scalar::{Coeff, QRat, Ring};
use num_traits::{One, Zero};
use once_cell::sync::Lazy;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Mutex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gen {
    A,
    AStar,
    C,
    CStar,
}

impl Gen {
    pub fn name(&self) -> &'static str {
        match self {
            Gen::A => "a",
            Gen::AStar => "as",
            Gen::C => "c",
            Gen::CStar => "cs",
        }
    }

    /// Charge: +1 on starred generators, -1 on unstarred.
    pub fn charge(&self) -> i64 {
        match self {
            Gen::A | Gen::C => -1,
            Gen::AStar | Gen::CStar => 1,
        }
    }

    pub fn star(&self) -> Gen {
        match self {
            Gen::A => Gen::AStar,
            Gen::AStar => Gen::A,
            Gen::C => Gen::CStar,
            Gen::CStar => Gen::C,
        }
    }
}

pub type Word = Vec<Gen>;

/// PBW basis monomial: a^k c^l c*^m when `astar` is false, a*^k c^l c*^m
/// when true (then k >= 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub astar: bool,
    pub k: u32,
    pub l: u32,
    pub m: u32,
}

impl Monomial {
    pub fn unit() -> Self {
        Monomial { astar: false, k: 0, l: 0, m: 0 }
    }

    pub fn new(astar: bool, k: u32, l: u32, m: u32) -> Self {
        assert!(!(astar && k == 0), "a* branch needs k >= 1");
        Monomial { astar, k, l, m }
    }

    pub fn gen(g: Gen) -> Self {
        match g {
            Gen::A => Monomial::new(false, 1, 0, 0),
            Gen::AStar => Monomial::new(true, 1, 0, 0),
            Gen::C => Monomial::new(false, 0, 1, 0),
            Gen::CStar => Monomial::new(false, 0, 0, 1),
        }
    }

    pub fn is_unit(&self) -> bool {
        self.k == 0 && self.l == 0 && self.m == 0
    }

    pub fn degree(&self) -> u32 {
        self.k + self.l + self.m
    }

    /// Charge n: +1 per starred letter, -1 per unstarred.
    pub fn charge(&self) -> i64 {
        let a_part = if self.astar { self.k as i64 } else { -(self.k as i64) };
        a_part - self.l as i64 + self.m as i64
    }

    pub fn word(&self) -> Word {
        let mut w = Word::new();
        let a = if self.astar { Gen::AStar } else { Gen::A };
        w.extend(std::iter::repeat(a).take(self.k as usize));
        w.extend(std::iter::repeat(Gen::C).take(self.l as usize));
        w.extend(std::iter::repeat(Gen::CStar).take(self.m as usize));
        w
    }

    fn from_normal_word(w: &[Gen]) -> Self {
        let mut k = 0u32;
        let mut l = 0u32;
        let mut m = 0u32;
        let mut astar = false;
        for g in w {
            match g {
                Gen::A => k += 1,
                Gen::AStar => {
                    astar = true;
                    k += 1;
                }
                Gen::C => l += 1,
                Gen::CStar => m += 1,
            }
        }
        debug_assert!(is_normal_word(w), "word not in normal order");
        Monomial { astar, k, l, m }
    }
}

fn is_normal_word(w: &[Gen]) -> bool {
    w.windows(2).all(|p| !reducible(p[0], p[1])) && {
        let has_a = w.contains(&Gen::A);
        let has_astar = w.contains(&Gen::AStar);
        !(has_a && has_astar)
    }
}

/// Linear combination of PBW monomials over a coefficient ring.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement<R> {
    terms: BTreeMap<Monomial, R>,
}

impl<R> Default for AlgebraElement<R> {
    fn default() -> Self {
        AlgebraElement { terms: BTreeMap::new() }
    }
}

impl<R: Ring> AlgebraElement<R> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn unit() -> Self {
        Self::monomial(Monomial::unit(), R::one())
    }

    pub fn monomial(m: Monomial, c: R) -> Self {
        let mut e = Self::default();
        e.add_term(m, c);
        e
    }

    pub fn generator(g: Gen) -> Self {
        Self::monomial(Monomial::gen(g), R::one())
    }

    pub fn add_term(&mut self, m: Monomial, c: R) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &R)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> R {
        self.terms.get(m).cloned().unwrap_or_else(R::zero)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, R::zero() - c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::default();
        for (m, c) in &self.terms {
            out.add_term(*m, R::zero() - c.clone());
        }
        out
    }

    pub fn scale(&self, c: &R) -> Self {
        let mut out = Self::default();
        for (m, v) in &self.terms {
            out.add_term(*m, v.clone() * c.clone());
        }
        out
    }

    pub fn map_coeffs<S: Ring>(&self, f: impl Fn(&R) -> S) -> AlgebraElement<S> {
        let mut out = AlgebraElement::default();
        for (m, c) in &self.terms {
            out.add_term(*m, f(c));
        }
        out
    }

    /// Split into charge-homogeneous components.
    pub fn charge_components(&self) -> BTreeMap<i64, Self> {
        let mut out: BTreeMap<i64, Self> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.charge()).or_default().add_term(*m, c.clone());
        }
        out
    }

    /// The common charge when the element is homogeneous (zero counts as
    /// any charge; returns None for mixed elements).
    pub fn homogeneous_charge(&self) -> Option<i64> {
        let mut it = self.terms.keys().map(|m| m.charge());
        let first = it.next()?;
        if it.all(|n| n == first) {
            Some(first)
        } else {
            None
        }
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }
}

pub fn lift<R: Coeff>(x: &AlgebraElement<QRat>) -> AlgebraElement<R> {
    x.map_coeffs(|c| R::from_qrat(c))
}

// ---------------------------------------------------------------------------
// Rewriting

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Leftmost,
    Rightmost,
}

fn reducible(x: Gen, y: Gen) -> bool {
    matches!(
        (x, y),
        (Gen::C, Gen::A)
            | (Gen::CStar, Gen::A)
            | (Gen::C, Gen::AStar)
            | (Gen::CStar, Gen::AStar)
            | (Gen::CStar, Gen::C)
            | (Gen::AStar, Gen::A)
            | (Gen::A, Gen::AStar)
    )
}

/// One rewriting step at position i: each (replacement, factor) pair.
fn reduce_at(word: &[Gen], i: usize) -> Vec<(Word, QRat)> {
    let splice = |mid: &[Gen]| -> Word {
        let mut w = Word::with_capacity(word.len() - 2 + mid.len());
        w.extend_from_slice(&word[..i]);
        w.extend_from_slice(mid);
        w.extend_from_slice(&word[i + 2..]);
        w
    };
    match (word[i], word[i + 1]) {
        // c a = q^-1 a c and the star versions.
        (Gen::C, Gen::A) => vec![(splice(&[Gen::A, Gen::C]), QRat::q_pow(-1))],
        (Gen::CStar, Gen::A) => vec![(splice(&[Gen::A, Gen::CStar]), QRat::q_pow(-1))],
        (Gen::C, Gen::AStar) => vec![(splice(&[Gen::AStar, Gen::C]), QRat::q_pow(1))],
        (Gen::CStar, Gen::AStar) => {
            vec![(splice(&[Gen::AStar, Gen::CStar]), QRat::q_pow(1))]
        }
        // c and c* commute.
        (Gen::CStar, Gen::C) => vec![(splice(&[Gen::C, Gen::CStar]), QRat::one())],
        // a* a = 1 - c c*, a a* = 1 - q^2 c c*.
        (Gen::AStar, Gen::A) => vec![
            (splice(&[]), QRat::one()),
            (splice(&[Gen::C, Gen::CStar]), -QRat::one()),
        ],
        (Gen::A, Gen::AStar) => vec![
            (splice(&[]), QRat::one()),
            (splice(&[Gen::C, Gen::CStar]), -QRat::q_pow(2)),
        ],
        _ => unreachable!("not a redex"),
    }
}

fn find_redex(word: &[Gen], strategy: Strategy) -> Option<usize> {
    match strategy {
        Strategy::Leftmost => (0..word.len().saturating_sub(1))
            .find(|&i| reducible(word[i], word[i + 1])),
        Strategy::Rightmost => (0..word.len().saturating_sub(1))
            .rev()
            .find(|&i| reducible(word[i], word[i + 1])),
    }
}

/// Normal form of an arbitrary word in the generators.
pub fn normal_form_word(word: &[Gen], strategy: Strategy) -> AlgebraElement<QRat> {
    let mut out = AlgebraElement::default();
    let mut stack: Vec<(Word, QRat)> = vec![(word.to_vec(), QRat::one())];
    while let Some((w, c)) = stack.pop() {
        match find_redex(&w, strategy) {
            None => out.add_term(Monomial::from_normal_word(&w), c),
            Some(i) => {
                for (nw, factor) in reduce_at(&w, i) {
                    stack.push((nw, &c * &factor));
                }
            }
        }
    }
    out
}

static MUL_CACHE: Lazy<Mutex<HashMap<(Monomial, Monomial), AlgebraElement<QRat>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Product of two basis monomials, in normal form.
pub fn multiply_monomials(x: &Monomial, y: &Monomial) -> AlgebraElement<QRat> {
    if x.is_unit() {
        return AlgebraElement::monomial(*y, QRat::one());
    }
    if y.is_unit() {
        return AlgebraElement::monomial(*x, QRat::one());
    }
    if let Some(hit) = MUL_CACHE.lock().unwrap().get(&(*x, *y)) {
        return hit.clone();
    }
    let mut w = x.word();
    w.extend(y.word());
    let nf = normal_form_word(&w, Strategy::Leftmost);
    MUL_CACHE.lock().unwrap().insert((*x, *y), nf.clone());
    nf
}

impl<R: Coeff> AlgebraElement<R> {
    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::default();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                let prod = multiply_monomials(m1, m2);
                let c = c1.clone() * c2.clone();
                for (m, v) in prod.terms() {
                    out.add_term(*m, c.clone() * R::from_qrat(v));
                }
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::unit();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Conjugate-linear antihomomorphism with a <-> a*, c <-> c*.
    pub fn star(&self) -> Self {
        let mut out = Self::default();
        for (m, c) in &self.terms {
            let w: Word = m.word().iter().rev().map(|g| g.star()).collect();
            let nf = normal_form_word(&w, Strategy::Leftmost);
            for (nm, v) in nf.terms() {
                out.add_term(*nm, c.conj() * R::from_qrat(v));
            }
        }
        out
    }

    /// Antipode: algebra antihomomorphism with S(a) = a*, S(a*) = a,
    /// S(c) = -q c, S(c*) = -q^-1 c*.
    pub fn antipode(&self) -> Self {
        let mut out = Self::default();
        for (m, c) in &self.terms {
            let mut factor = QRat::one();
            let w: Word = m
                .word()
                .iter()
                .rev()
                .map(|g| match g {
                    Gen::A => Gen::AStar,
                    Gen::AStar => Gen::A,
                    Gen::C => {
                        factor = &factor * &(-QRat::q_pow(1));
                        Gen::C
                    }
                    Gen::CStar => {
                        factor = &factor * &(-QRat::q_pow(-1));
                        Gen::CStar
                    }
                })
                .collect();
            let nf = normal_form_word(&w, Strategy::Leftmost);
            for (nm, v) in nf.terms() {
                out.add_term(*nm, c.clone() * R::from_qrat(&(&factor * v)));
            }
        }
        out
    }

    pub fn counit(&self) -> R {
        let mut acc = R::zero();
        for (m, c) in &self.terms {
            if m.l == 0 && m.m == 0 {
                acc = acc + c.clone();
            }
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// Coproduct

/// Element of the two-fold tensor product of the coordinate algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorSquare<R> {
    terms: BTreeMap<(Monomial, Monomial), R>,
}

impl<R> Default for TensorSquare<R> {
    fn default() -> Self {
        TensorSquare { terms: BTreeMap::new() }
    }
}

impl<R: Ring> TensorSquare<R> {
    pub fn add_term(&mut self, u: Monomial, v: Monomial, c: R) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((u, v)) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Monomial, Monomial), &R)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for ((u, v), c) in &rhs.terms {
            out.add_term(*u, *v, c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for ((u, v), c) in &rhs.terms {
            out.add_term(*u, *v, R::zero() - c.clone());
        }
        out
    }
}

impl<R: Coeff> TensorSquare<R> {
    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::default();
        for ((u1, v1), c1) in &self.terms {
            for ((u2, v2), c2) in &rhs.terms {
                let pu = multiply_monomials(u1, u2);
                let pv = multiply_monomials(v1, v2);
                let c = c1.clone() * c2.clone();
                for (mu, cu) in pu.terms() {
                    for (mv, cv) in pv.terms() {
                        out.add_term(
                            *mu,
                            *mv,
                            c.clone() * R::from_qrat(cu) * R::from_qrat(cv),
                        );
                    }
                }
            }
        }
        out
    }
}

/// Coproduct on a single generator: list of (left, right, coefficient).
fn coproduct_gen(g: Gen) -> Vec<(Gen, Gen, QRat)> {
    match g {
        // D(a) = a (x) a - q c* (x) c
        Gen::A => vec![
            (Gen::A, Gen::A, QRat::one()),
            (Gen::CStar, Gen::C, -QRat::q_pow(1)),
        ],
        // D(c) = c (x) a + a* (x) c
        Gen::C => vec![
            (Gen::C, Gen::A, QRat::one()),
            (Gen::AStar, Gen::C, QRat::one()),
        ],
        // D(a*) = a* (x) a* - q c (x) c*
        Gen::AStar => vec![
            (Gen::AStar, Gen::AStar, QRat::one()),
            (Gen::C, Gen::CStar, -QRat::q_pow(1)),
        ],
        // D(c*) = a (x) c* + c* (x) a*
        Gen::CStar => vec![
            (Gen::A, Gen::CStar, QRat::one()),
            (Gen::CStar, Gen::AStar, QRat::one()),
        ],
    }
}

static COPRODUCT_CACHE: Lazy<Mutex<HashMap<Monomial, TensorSquare<QRat>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

pub fn coproduct_monomial(m: &Monomial) -> TensorSquare<QRat> {
    if let Some(hit) = COPRODUCT_CACHE.lock().unwrap().get(m) {
        return hit.clone();
    }
    // Expand generator by generator, normalising both legs as words.
    let mut acc: Vec<(Word, Word, QRat)> = vec![(Word::new(), Word::new(), QRat::one())];
    for g in m.word() {
        let delta = coproduct_gen(g);
        let mut next = Vec::with_capacity(acc.len() * delta.len());
        for (wl, wr, c) in &acc {
            for (gl, gr, dc) in &delta {
                let mut nl = wl.clone();
                nl.push(*gl);
                let mut nr = wr.clone();
                nr.push(*gr);
                next.push((nl, nr, c * dc));
            }
        }
        acc = next;
    }
    let mut out = TensorSquare::default();
    for (wl, wr, c) in acc {
        let nl = normal_form_word(&wl, Strategy::Leftmost);
        let nr = normal_form_word(&wr, Strategy::Leftmost);
        for (ml, cl) in nl.terms() {
            for (mr, cr) in nr.terms() {
                out.add_term(*ml, *mr, &(&c * cl) * cr);
            }
        }
    }
    COPRODUCT_CACHE.lock().unwrap().insert(*m, out.clone());
    out
}

pub fn coproduct<R: Coeff>(x: &AlgebraElement<R>) -> TensorSquare<R> {
    let mut out = TensorSquare::default();
    for (m, c) in x.terms() {
        for ((u, v), k) in coproduct_monomial(m).terms() {
            out.add_term(*u, *v, c.clone() * R::from_qrat(k));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Basis enumeration

/// All PBW monomials of exact degree d.
pub fn monomials_of_degree(d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for k in 0..=d {
        for l in 0..=(d - k) {
            let m = d - k - l;
            out.push(Monomial::new(false, k, l, m));
            if k >= 1 {
                out.push(Monomial::new(true, k, l, m));
            }
        }
    }
    out.sort();
    out
}

pub fn monomials_up_to_degree(d: u32) -> Vec<Monomial> {
    (0..=d).flat_map(monomials_of_degree).collect()
}

// ---------------------------------------------------------------------------
// Invariant integral

struct HaarCache {
    values: HashMap<Monomial, QRat>,
    solved_degree: i64,
}

static HAAR: Lazy<Mutex<HaarCache>> = Lazy::new(|| {
    let mut values = HashMap::new();
    values.insert(Monomial::unit(), QRat::one());
    Mutex::new(HaarCache { values, solved_degree: 0 })
});

/// Invariant integral of a basis monomial, solving new degree blocks on
/// demand from two-sided invariance of the integral.
pub fn haar_monomial(m: &Monomial) -> QRat {
    let d = m.degree();
    ensure_haar_degree(d);
    HAAR.lock()
        .unwrap()
        .values
        .get(m)
        .cloned()
        .unwrap_or_else(QRat::zero)
}

pub fn haar<R: Coeff>(x: &AlgebraElement<R>) -> R {
    let mut acc = R::zero();
    for (m, c) in x.terms() {
        let h = haar_monomial(m);
        if !h.is_zero() {
            acc = acc + c.clone() * R::from_qrat(&h);
        }
    }
    acc
}

fn ensure_haar_degree(d: u32) {
    loop {
        let solved = HAAR.lock().unwrap().solved_degree;
        if solved >= d as i64 {
            return;
        }
        solve_haar_block((solved + 1) as u32);
    }
}

/// Solve the degree-d block: unknowns h(w) for deg w = d, equations from
/// (id (x) h) D(x) = h(x) 1 and (h (x) id) D(x) = h(x) 1 for every basis
/// monomial x of degree d. Lower-degree values are already known. The
/// system must determine the block uniquely; every equation is verified
/// against the solution.
fn solve_haar_block(d: u32) {
    let unknowns = monomials_of_degree(d);
    let index: HashMap<Monomial, usize> =
        unknowns.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let n = unknowns.len();
    let known = |m: &Monomial| -> QRat {
        HAAR.lock()
            .unwrap()
            .values
            .get(m)
            .cloned()
            .unwrap_or_else(QRat::zero)
    };

    // Rows: (coefficients, rhs).
    let mut rows: Vec<(Vec<QRat>, QRat)> = Vec::new();
    for x in &unknowns {
        let delta = coproduct_monomial(x);
        // Group by the surviving leg.
        let mut by_left: HashMap<Monomial, Vec<(Monomial, QRat)>> = HashMap::new();
        let mut by_right: HashMap<Monomial, Vec<(Monomial, QRat)>> = HashMap::new();
        for ((u, v), c) in delta.terms() {
            by_left.entry(*u).or_default().push((*v, c.clone()));
            by_right.entry(*v).or_default().push((*u, c.clone()));
        }
        for (survivor, partners, xi) in [(&by_left, true, index[x]), (&by_right, false, index[x])]
        {
            let _ = partners;
            for (s, terms) in survivor {
                // sum_t kappa_t h(t) = h(x) [s == 1]
                let mut coeffs = vec![QRat::zero(); n];
                let mut rhs = QRat::zero();
                for (t, kappa) in terms {
                    if t.degree() == d {
                        let j = index[t];
                        coeffs[j] = &coeffs[j] + kappa;
                    } else {
                        rhs = &rhs - &(kappa * &known(t));
                    }
                }
                if s.is_unit() {
                    coeffs[xi] = &coeffs[xi] - &QRat::one();
                }
                if coeffs.iter().all(|c| c.is_zero()) {
                    assert!(rhs.is_zero(), "inconsistent invariance equation");
                    continue;
                }
                rows.push((coeffs, rhs));
            }
        }
    }

    // Pick an independent subset by incremental elimination, solve it,
    // then verify every remaining equation.
    let mut basis_rows: Vec<(Vec<QRat>, QRat)> = Vec::new();
    let mut echelon: Vec<(usize, Vec<QRat>, QRat)> = Vec::new();
    for (coeffs, rhs) in &rows {
        let mut c = coeffs.clone();
        let mut r = rhs.clone();
        for (piv, prow, prhs) in &echelon {
            if !c[*piv].is_zero() {
                let f = c[*piv].clone();
                for j in 0..n {
                    c[j] = &c[j] - &(&f * &prow[j]);
                }
                r = &r - &(&f * prhs);
            }
        }
        if let Some(piv) = (0..n).find(|&j| !c[j].is_zero()) {
            let inv = c[piv].inv();
            for j in 0..n {
                c[j] = &c[j] * &inv;
            }
            r = &r * &inv;
            echelon.push((piv, c, r));
            basis_rows.push((coeffs.clone(), rhs.clone()));
            if echelon.len() == n {
                break;
            }
        }
    }
    assert_eq!(
        echelon.len(),
        n,
        "invariance equations do not determine the degree-{} integral block",
        d
    );
    let a = Matrix::from_rows(basis_rows.iter().map(|(c, _)| c.clone()).collect());
    let b = Matrix::from_rows(basis_rows.iter().map(|(_, r)| vec![r.clone()]).collect());
    let sol = a.solve_unique(&b).expect("integral block solve failed");
    // Verify all equations.
    for (coeffs, rhs) in &rows {
        let mut acc = QRat::zero();
        for (j, cj) in coeffs.iter().enumerate() {
            if !cj.is_zero() {
                acc = &acc + &(cj * &sol[(j, 0)]);
            }
        }
        assert_eq!(&acc, rhs, "invariance equation violated by solved integral");
    }

    let mut cache = HAAR.lock().unwrap();
    for (i, m) in unknowns.iter().enumerate() {
        let v = sol[(i, 0)].clone();
        if !v.is_zero() {
            cache.values.insert(*m, v);
        }
    }
    cache.solved_degree = d as i64;
}

// ---------------------------------------------------------------------------
// JSON and display

impl AlgebraElement<QRat> {
    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::json;
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|(m, c)| {
                    json!({
                        "coeff": c.to_json(),
                        "mono": {
                            "branch": if m.astar { "astar" } else { "a" },
                            "k": m.k,
                            "l": m.l,
                            "m": m.m,
                        }
                    })
                })
                .collect(),
        )
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, crate::scalar::DecodeError> {
        use crate::scalar::DecodeError;
        let arr = v.as_array().ok_or(DecodeError("element: not an array"))?;
        let mut out = Self::default();
        for item in arr {
            let coeff = QRat::from_json(
                item.get("coeff").ok_or(DecodeError("element: missing coeff"))?,
            )?;
            let mono = item
                .get("mono")
                .and_then(|m| m.as_object())
                .ok_or(DecodeError("element: missing mono"))?;
            let branch = mono
                .get("branch")
                .and_then(|b| b.as_str())
                .ok_or(DecodeError("element: branch"))?;
            let get = |key: &'static str| -> Result<u32, DecodeError> {
                mono.get(key)
                    .and_then(|x| x.as_u64())
                    .map(|x| x as u32)
                    .ok_or(DecodeError("element: power"))
            };
            let (k, l, m) = (get("k")?, get("l")?, get("m")?);
            let astar = match branch {
                "a" => false,
                "astar" => true,
                _ => return Err(DecodeError("element: branch")),
            };
            if astar && k == 0 {
                return Err(DecodeError("element: astar branch with k = 0"));
            }
            out.add_term(Monomial { astar, k, l, m }, coeff);
        }
        Ok(out)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            return write!(f, "1");
        }
        let mut parts = Vec::new();
        if self.k > 0 {
            let name = if self.astar { "as" } else { "a" };
            if self.k == 1 {
                parts.push(name.to_string());
            } else {
                parts.push(format!("{}^{}", name, self.k));
            }
        }
        if self.l > 0 {
            if self.l == 1 {
                parts.push("c".into());
            } else {
                parts.push(format!("c^{}", self.l));
            }
        }
        if self.m > 0 {
            if self.m == 1 {
                parts.push("cs".into());
            } else {
                parts.push(format!("cs^{}", self.m));
            }
        }
        write!(f, "{}", parts.join("*"))
    }
}

impl<R: Ring> fmt::Display for AlgebraElement<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let body = format_term(&c.to_string(), &m.to_string(), m.is_unit());
            if idx == 0 {
                write!(f, "{}", body.display_first())?;
            } else {
                write!(f, " {}", body.display_follow())?;
            }
        }
        Ok(())
    }
}

/// Shared term formatting: coefficient string (possibly "-"-prefixed single
/// term) next to a monomial body.
pub struct TermDisplay {
    pub negative: bool,
    pub text: String,
}

impl TermDisplay {
    pub fn display_first(&self) -> String {
        if self.negative {
            format!("-{}", self.text)
        } else {
            self.text.clone()
        }
    }

    pub fn display_follow(&self) -> String {
        if self.negative {
            format!("- {}", self.text)
        } else {
            format!("+ {}", self.text)
        }
    }
}

/// Whether a string is one fully parenthesised group, i.e. already
/// bound tighter than any infix operator around it.
fn is_grouped(s: &str) -> bool {
    if !(s.starts_with('(') && s.ends_with(')')) {
        return false;
    }
    let mut depth = 0usize;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 && i + 1 < s.len() {
                    return false;
                }
            }
            _ => {}
        }
    }
    depth == 0
}

/// Renders `coeff * body`, hiding a unit coefficient, pulling a leading
/// minus out of a single-term coefficient, and parenthesising compound
/// coefficients (unless the coefficient string arrives pre-grouped).
pub fn format_term(coeff: &str, body: &str, body_is_unit: bool) -> TermDisplay {
    let (negative, mag) = if let Some(rest) = coeff.strip_prefix('-') {
        if rest.contains(" + ") || rest.contains(" - ") {
            (false, coeff.to_string())
        } else {
            (true, rest.to_string())
        }
    } else {
        (false, coeff.to_string())
    };
    let compound = (mag.contains(" + ") || mag.contains(" - ")) && !is_grouped(&mag);
    let text = if body_is_unit {
        if compound {
            format!("({})", mag)
        } else {
            mag
        }
    } else if mag == "1" {
        body.to_string()
    } else if compound {
        format!("({}) * {}", mag, body)
    } else {
        format!("{} * {}", mag, body)
    };
    TermDisplay { negative, text }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat_ratio;

    fn gen_el(g: Gen) -> AlgebraElement<QRat> {
        AlgebraElement::generator(g)
    }

    #[test]
    fn basic_relations() {
        let a = gen_el(Gen::A);
        let astar = gen_el(Gen::AStar);
        let c = gen_el(Gen::C);
        let cstar = gen_el(Gen::CStar);

        // c a = q^-1 a c
        let ca = c.mul(&a);
        let ac = a.mul(&c);
        assert_eq!(ca, ac.scale(&QRat::q_pow(-1)));

        // a* a + c c* = 1
        let lhs = astar.mul(&a).add(&c.mul(&cstar));
        assert_eq!(lhs, AlgebraElement::unit());

        // a a* + q^2 c c* = 1
        let lhs2 = a.mul(&astar).add(&c.mul(&cstar).scale(&QRat::q_pow(2)));
        assert_eq!(lhs2, AlgebraElement::unit());

        // c* a* = q a* c*
        let csas = cstar.mul(&astar);
        assert_eq!(csas, astar.mul(&cstar).scale(&QRat::q_pow(1)));
    }

    #[test]
    fn rewriting_is_confluent_on_short_words() {
        let gens = [Gen::A, Gen::AStar, Gen::C, Gen::CStar];
        for g1 in gens {
            for g2 in gens {
                for g3 in gens {
                    let w = vec![g1, g2, g3];
                    let left = normal_form_word(&w, Strategy::Leftmost);
                    let right = normal_form_word(&w, Strategy::Rightmost);
                    assert_eq!(left, right, "strategies disagree on {:?}", w);
                }
            }
        }
    }

    #[test]
    fn rewriting_agrees_on_longer_words() {
        // A fixed handful of length-5 words mixing all generator kinds.
        let words: Vec<Vec<Gen>> = vec![
            vec![Gen::A, Gen::CStar, Gen::AStar, Gen::C, Gen::A],
            vec![Gen::CStar, Gen::C, Gen::A, Gen::AStar, Gen::CStar],
            vec![Gen::AStar, Gen::A, Gen::AStar, Gen::A, Gen::C],
            vec![Gen::C, Gen::AStar, Gen::CStar, Gen::A, Gen::AStar],
        ];
        for w in words {
            let left = normal_form_word(&w, Strategy::Leftmost);
            let right = normal_form_word(&w, Strategy::Rightmost);
            assert_eq!(left, right, "strategies disagree on {:?}", w);
        }
    }

    #[test]
    fn associativity_spot_checks() {
        let xs: [AlgebraElement<QRat>; 3] = [
            AlgebraElement::generator(Gen::A),
            AlgebraElement::generator(Gen::CStar)
                .mul(&AlgebraElement::generator(Gen::AStar)),
            AlgebraElement::generator(Gen::C).add(&AlgebraElement::unit()),
        ];
        for x in &xs {
            for y in &xs {
                for z in &xs {
                    assert_eq!(x.mul(y).mul(z), x.mul(&y.mul(z)));
                }
            }
        }
    }

    #[test]
    fn charge_grading_is_multiplicative() {
        let m1 = Monomial::new(false, 1, 2, 0); // a c^2: charge -3
        let m2 = Monomial::new(true, 2, 0, 1); // a*^2 c*: charge 3
        assert_eq!(m1.charge(), -3);
        assert_eq!(m2.charge(), 3);
        let prod = multiply_monomials(&m1, &m2);
        for (m, _) in prod.terms() {
            assert_eq!(m.charge(), 0);
        }
    }

    #[test]
    fn coproduct_is_an_algebra_map() {
        // D(xy) = D(x) D(y) for a sampling of monomials.
        let samples = [
            Monomial::gen(Gen::A),
            Monomial::gen(Gen::CStar),
            Monomial::new(false, 1, 1, 0),
            Monomial::new(true, 1, 0, 1),
        ];
        for x in &samples {
            for y in &samples {
                let dx = coproduct_monomial(x);
                let dy = coproduct_monomial(y);
                let lhs = dx.mul(&dy);
                let mut rhs = TensorSquare::default();
                for (m, c) in multiply_monomials(x, y).terms() {
                    for ((u, v), k) in coproduct_monomial(m).terms() {
                        rhs.add_term(*u, *v, c * k);
                    }
                }
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn counit_and_antipode_axioms() {
        for m in monomials_up_to_degree(2) {
            let x: AlgebraElement<QRat> = AlgebraElement::monomial(m, QRat::one());
            let delta = coproduct_monomial(&m);
            // (eps (x) id) D = id
            let mut left = AlgebraElement::default();
            for ((u, v), c) in delta.terms() {
                let e: QRat = AlgebraElement::monomial(*u, QRat::one()).counit();
                left.add_term(*v, c * &e);
            }
            assert_eq!(left, x, "counit axiom fails on {}", m);
            // m (S (x) id) D = eps(x) 1
            let mut folded = AlgebraElement::<QRat>::default();
            for ((u, v), c) in delta.terms() {
                let su = AlgebraElement::monomial(*u, QRat::one()).antipode();
                let prod = su.mul(&AlgebraElement::monomial(*v, QRat::one()));
                folded = folded.add(&prod.scale(c));
            }
            let expect = AlgebraElement::monomial(Monomial::unit(), x.counit());
            assert_eq!(folded, expect, "antipode axiom fails on {}", m);
        }
    }

    #[test]
    fn star_is_an_antihomomorphic_involution() {
        let x = AlgebraElement::<QRat>::generator(Gen::A)
            .mul(&AlgebraElement::generator(Gen::C))
            .add(&AlgebraElement::generator(Gen::CStar).scale(&QRat::q_pow(3)));
        let y = AlgebraElement::<QRat>::generator(Gen::AStar)
            .sub(&AlgebraElement::generator(Gen::C).scale(&QRat::q_pow(-2)));
        assert_eq!(x.star().star(), x);
        assert_eq!(x.mul(&y).star(), y.star().mul(&x.star()));
    }

    #[test]
    fn integral_closed_forms() {
        // h(1) = 1, h((c c*)^l) = (1 - q^2) / (1 - q^(2l+2)), h = 0 on
        // anything with a or a* factors or unbalanced c powers.
        assert!(haar_monomial(&Monomial::unit()).is_one());
        for l in 1..=3u32 {
            let m = Monomial::new(false, 0, l, l);
            let num = QRat::one() - QRat::q_pow(2);
            let den = QRat::one() - QRat::q_pow(2 * l as i64 + 2);
            assert_eq!(haar_monomial(&m), &num * &den.inv(), "l = {}", l);
        }
        assert!(haar_monomial(&Monomial::new(false, 1, 0, 0)).is_zero());
        assert!(haar_monomial(&Monomial::new(false, 1, 1, 1)).is_zero());
        assert!(haar_monomial(&Monomial::new(true, 2, 0, 2)).is_zero());
        assert!(haar_monomial(&Monomial::new(false, 0, 2, 1)).is_zero());
    }

    #[test]
    fn integral_invariance_spot_check() {
        // (id (x) h) D(x) = h(x) 1 for all monomials of degree <= 3.
        for m in monomials_up_to_degree(3) {
            let mut collapsed = AlgebraElement::<QRat>::default();
            for ((u, v), c) in coproduct_monomial(&m).terms() {
                collapsed.add_term(*u, c * &haar_monomial(v));
            }
            let expect =
                AlgebraElement::monomial(Monomial::unit(), haar_monomial(&m));
            assert_eq!(collapsed, expect, "right invariance fails on {}", m);
        }
    }

    #[test]
    fn integral_positivity_sample() {
        // h(x* x) > 0 at q = 1/2 for a few nonzero x.
        let q0 = rat_ratio(1, 2);
        let xs = [
            AlgebraElement::<QRat>::generator(Gen::A),
            AlgebraElement::generator(Gen::C)
                .add(&AlgebraElement::generator(Gen::AStar)),
        ];
        for x in &xs {
            let v = haar(&x.star().mul(x));
            assert_eq!(v.sign_at(&q0).unwrap(), 1);
        }
    }

    #[test]
    fn display_and_json_round_trip() {
        let x = AlgebraElement::<QRat>::generator(Gen::C)
            .mul(&AlgebraElement::generator(Gen::A));
        assert_eq!(x.to_string(), "q^-1 * a*c");
        let json = x.to_json();
        assert_eq!(AlgebraElement::from_json(&json).unwrap(), x);
    }
}
