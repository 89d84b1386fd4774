//! Exact real-root isolation for rational-coefficient polynomials:
//! Yun square-free decomposition, Sturm chains, bisection refinement.
//! Used for the exact spectra of small operator blocks.

use crate::scalar::{rat_int, rat_ratio, Rat};
use num_traits::{One, Signed, Zero};

/// Dense polynomial over the rationals, ascending coefficients, no trailing
/// zeros (the zero polynomial is an empty vector).
#[derive(Debug, Clone, PartialEq)]
pub struct RatPoly {
    coeffs: Vec<Rat>,
}

/// An isolated real root of some polynomial: `factor` is the square-free
/// factor it is a simple root of, (lo, hi] contains exactly that one root,
/// and lo == hi pins a rational root exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct RootInterval {
    factor: RatPoly,
    pub lo: Rat,
    pub hi: Rat,
    pub multiplicity: usize,
}

impl RootInterval {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn midpoint_f64(&self) -> f64 {
        let mid = (&self.lo + &self.hi) / rat_int(2);
        rat_to_f64(&mid)
    }

    /// Exact sign of the root: refines the interval off zero when needed.
    pub fn sign(&self) -> i8 {
        if self.is_exact() {
            return rat_sign(&self.lo);
        }
        let zero = Rat::zero();
        if !(self.lo < zero && zero <= self.hi) {
            return if self.lo >= zero { 1 } else { -1 };
        }
        if self.factor.eval(&zero).is_zero() {
            return 0;
        }
        // Zero is not the root; shrink until the interval is on one side.
        let mut lo = self.lo.clone();
        let mut hi = self.hi.clone();
        while lo < zero && zero <= hi {
            let width = (&hi - &lo) / rat_int(4);
            let (nlo, nhi) = self.factor.refine_root(&lo, &hi, &width);
            lo = nlo.clone();
            hi = nhi.clone();
            if lo == hi {
                return rat_sign(&lo);
            }
        }
        if lo >= zero {
            1
        } else {
            -1
        }
    }

    /// Shrink in place until hi - lo <= width.
    pub fn refine(&mut self, width: &Rat) {
        let (lo, hi) = self.factor.refine_root(&self.lo, &self.hi, width);
        self.lo = lo;
        self.hi = hi;
    }

    /// Collapse the bracket onto the root when the root is rational with
    /// modest height: the simplest rational in the bracket is the root
    /// once the bracket is narrow enough, so try, shrink, retry. The
    /// bracket is (lo, hi], hence the strict lower test. Irrational or
    /// very tall roots keep their bracket; callers lose nothing.
    pub fn pin_rational(&mut self) {
        if self.is_exact() {
            return;
        }
        for _ in 0..4 {
            let cand = simplest_in(&self.lo, &self.hi);
            if self.lo < cand && cand <= self.hi && self.factor.eval(&cand).is_zero() {
                self.lo = cand.clone();
                self.hi = cand;
                return;
            }
            let width = (&self.hi - &self.lo) / rat_int(65536);
            self.refine(&width);
            if self.is_exact() {
                return;
            }
        }
    }
}

/// Simplest rational (smallest denominator) in the closed interval
/// [lo, hi], by the continued-fraction walk.
fn simplest_in(lo: &Rat, hi: &Rat) -> Rat {
    debug_assert!(lo <= hi);
    if !lo.is_positive() && !hi.is_negative() {
        return Rat::zero();
    }
    if hi.is_negative() {
        return -simplest_in(&-hi.clone(), &-lo.clone());
    }
    simplest_pos(lo, hi)
}

fn simplest_pos(lo: &Rat, hi: &Rat) -> Rat {
    let ceil_lo = lo.ceil();
    if &ceil_lo <= hi {
        return ceil_lo;
    }
    // Both endpoints sit strictly inside one integer step (n, n+1).
    let n = lo.floor();
    let inv = simplest_pos(&(Rat::one() / (hi - &n)), &(Rat::one() / (lo - &n)));
    n + Rat::one() / inv
}

fn rat_sign(x: &Rat) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

pub fn rat_to_f64(x: &Rat) -> f64 {
    use num::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum RootError {
    #[error("polynomial has non-real roots ({found} real roots counted with multiplicity, degree {degree})")]
    NonRealRoots { degree: usize, found: usize },
    #[error("zero polynomial has no root set")]
    ZeroPolynomial,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn zero_poly() -> Self {
        RatPoly { coeffs: vec![] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        assert!(!self.is_zero(), "degree of zero polynomial");
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn leading(&self) -> &Rat {
        self.coeffs.last().expect("zero polynomial")
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero_poly();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * rat_int(k as i64))
                .collect(),
        )
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::new(
            (0..n)
                .map(|k| {
                    let a = self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero);
                    let b = rhs.coeffs.get(k).cloned().unwrap_or_else(Rat::zero);
                    a - b
                })
                .collect(),
        )
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn monic(&self) -> Self {
        assert!(!self.is_zero());
        self.scale(&self.leading().recip())
    }

    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() || self.coeffs.len() < d.coeffs.len() {
            return (Self::zero_poly(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let dd = d.degree();
        let dl = d.leading().clone();
        let mut quo = vec![Rat::zero(); rem.len() - dd];
        while rem.len() > dd {
            let shift = rem.len() - 1 - dd;
            let factor = rem.last().unwrap() / &dl;
            quo[shift] = factor.clone();
            for (k, c) in d.coeffs.iter().enumerate() {
                let idx = shift + k;
                rem[idx] = &rem[idx] - &(c * &factor);
            }
            while rem.last().map(|c| c.is_zero()).unwrap_or(false) {
                rem.pop();
            }
        }
        (Self::new(quo), Self::new(rem))
    }

    pub fn gcd_monic(a: &Self, b: &Self) -> Self {
        let mut x = a.clone();
        let mut y = b.clone();
        while !y.is_zero() {
            let (_, r) = x.divrem(&y);
            x = y;
            y = r;
        }
        if x.is_zero() {
            x
        } else {
            x.monic()
        }
    }

    /// Yun's algorithm: factors (p_i, i) with p = lc * prod p_i^i, each p_i
    /// monic square-free, pairwise coprime (constant factors dropped).
    pub fn squarefree_decomposition(&self) -> Vec<(RatPoly, usize)> {
        assert!(!self.is_zero());
        if self.degree() == 0 {
            return vec![];
        }
        let p = self.monic();
        let dp = p.derivative();
        let a0 = Self::gcd_monic(&p, &dp);
        let mut b = p.divrem(&a0).0;
        let mut c = dp.divrem(&a0).0;
        let mut out = Vec::new();
        let mut mult = 1usize;
        while !b.is_zero() && b.degree() > 0 {
            let d = c.sub(&b.derivative());
            let g = Self::gcd_monic(&b, &d);
            let g = if g.is_zero() { Self::new(vec![Rat::one()]) } else { g };
            if g.degree() > 0 {
                out.push((g.clone(), mult));
            }
            b = b.divrem(&g).0;
            c = d.divrem(&g).0;
            mult += 1;
        }
        out
    }

    fn sign_at(&self, x: &Rat) -> i8 {
        rat_sign(&self.eval(x))
    }

    /// Sturm chain (self should be square-free for exact counts).
    pub fn sturm_chain(&self) -> Vec<RatPoly> {
        let mut chain = vec![self.clone(), self.derivative()];
        while !chain.last().unwrap().is_zero() {
            let n = chain.len();
            let (_, r) = chain[n - 2].divrem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(Self::new(r.coeffs.iter().map(|c| -c).collect()));
        }
        chain
    }

    fn sign_variations(signs: impl Iterator<Item = i8>) -> usize {
        let mut last = 0i8;
        let mut count = 0;
        for s in signs {
            if s == 0 {
                continue;
            }
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    /// Number of roots of a square-free polynomial in (a, b].
    pub fn count_roots_in(chain: &[RatPoly], a: &Rat, b: &Rat) -> usize {
        let va = Self::sign_variations(chain.iter().map(|p| p.sign_at(a)));
        let vb = Self::sign_variations(chain.iter().map(|p| p.sign_at(b)));
        va.saturating_sub(vb)
    }

    /// Bound B with all real roots in (-B, B] (Cauchy).
    pub fn root_bound(&self) -> Rat {
        assert!(!self.is_zero());
        let lead = self.leading().abs();
        let max_ratio = self
            .coeffs
            .iter()
            .take(self.coeffs.len() - 1)
            .map(|c| c.abs() / &lead)
            .fold(Rat::zero(), |m, x| if x > m { x } else { m });
        Rat::one() + max_ratio
    }

    /// Isolating intervals (lo, hi] for every real root of a square-free
    /// polynomial, in increasing order.
    pub fn isolate_real_roots(&self) -> Vec<(Rat, Rat)> {
        assert!(!self.is_zero());
        if self.degree() == 0 {
            return vec![];
        }
        let chain = self.sturm_chain();
        let bound = self.root_bound();
        let mut work = vec![(-bound.clone(), bound)];
        let mut found = Vec::new();
        while let Some((lo, hi)) = work.pop() {
            let n = Self::count_roots_in(&chain, &lo, &hi);
            if n == 0 {
                continue;
            }
            if n == 1 {
                found.push((lo, hi));
                continue;
            }
            let mid = (&lo + &hi) / rat_int(2);
            work.push((lo, mid.clone()));
            work.push((mid, hi));
        }
        found.sort_by(|a, b| a.0.cmp(&b.0));
        found
    }

    /// Shrink an isolating interval (lo, hi] of a square-free polynomial
    /// until its width is at most `width`. Returns a point interval when a
    /// bisection midpoint or the right endpoint hits the root exactly.
    pub fn refine_root(&self, lo: &Rat, hi: &Rat, width: &Rat) -> (Rat, Rat) {
        let mut lo = lo.clone();
        let mut hi = hi.clone();
        if self.sign_at(&hi) == 0 {
            return (hi.clone(), hi);
        }
        while &(&hi - &lo) > width {
            let mid = (&lo + &hi) / rat_int(2);
            let sm = self.sign_at(&mid);
            if sm == 0 {
                return (mid.clone(), mid);
            }
            if sm == self.sign_at(&lo) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo, hi)
    }

    /// All real roots with multiplicities, refined to the given width,
    /// failing when the count (with multiplicity) falls short of the
    /// degree, i.e. when complex roots exist.
    pub fn real_roots(&self, width: &Rat) -> Result<Vec<RootInterval>, RootError> {
        if self.is_zero() {
            return Err(RootError::ZeroPolynomial);
        }
        let mut out: Vec<RootInterval> = Vec::new();
        let mut total = 0usize;
        for (factor, mult) in self.squarefree_decomposition() {
            for (lo, hi) in factor.isolate_real_roots() {
                let (rlo, rhi) = factor.refine_root(&lo, &hi, width);
                total += mult;
                let mut root = RootInterval {
                    factor: factor.clone(),
                    lo: rlo,
                    hi: rhi,
                    multiplicity: mult,
                };
                root.pin_rational();
                out.push(root);
            }
        }
        if total != self.degree() {
            return Err(RootError::NonRealRoots { degree: self.degree(), found: total });
        }
        out.sort_by(|a, b| a.lo.cmp(&b.lo));
        Ok(out)
    }

    /// Exact count of roots (with multiplicity) with negative / zero /
    /// positive value.
    pub fn signature(&self) -> Result<(usize, usize, usize), RootError> {
        let roots = self.real_roots(&rat_ratio(1, 1_000_000))?;
        let mut neg = 0;
        let mut zero = 0;
        let mut pos = 0;
        for r in &roots {
            match r.sign() {
                -1 => neg += r.multiplicity,
                0 => zero += r.multiplicity,
                _ => pos += r.multiplicity,
            }
        }
        Ok((neg, zero, pos))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(cs: &[i64]) -> RatPoly {
        RatPoly::new(cs.iter().map(|&c| rat_int(c)).collect())
    }

    #[test]
    fn squarefree_splits_multiplicity() {
        // (x - 1)^2 (x + 2) = x^3 - 3x + 2.
        let p = poly(&[2, -3, 0, 1]);
        let sf = p.squarefree_decomposition();
        assert_eq!(sf.len(), 2);
        assert_eq!(sf[0].1, 1);
        assert_eq!(sf[0].0, poly(&[2, 1])); // x + 2
        assert_eq!(sf[1].1, 2);
        assert_eq!(sf[1].0, poly(&[-1, 1])); // x - 1
    }

    #[test]
    fn isolates_and_refines() {
        // x^2 - 2: roots +-sqrt(2).
        let p = poly(&[-2, 0, 1]);
        let iso = p.isolate_real_roots();
        assert_eq!(iso.len(), 2);
        let (lo, hi) = p.refine_root(&iso[1].0, &iso[1].1, &rat_ratio(1, 1 << 20));
        let s = std::f64::consts::SQRT_2;
        assert!(rat_to_f64(&lo) < s && rat_to_f64(&hi) > s);
    }

    #[test]
    fn full_root_listing_and_signature() {
        // x (x - 1)^2 (x + 3) = x^4 + x^3 - 5x^2 + 3x.
        let p = poly(&[0, 3, -5, 1, 1]);
        let roots = p.real_roots(&rat_ratio(1, 1_000_000)).unwrap();
        assert_eq!(roots.len(), 3);
        assert_eq!(p.signature().unwrap(), (1, 1, 2));
    }

    #[test]
    fn complex_roots_detected() {
        // x^2 + 1 has no real roots.
        let p = poly(&[1, 0, 1]);
        assert!(matches!(
            p.real_roots(&rat_ratio(1, 1024)),
            Err(RootError::NonRealRoots { degree: 2, found: 0 })
        ));
    }

    #[test]
    fn rational_root_pinned_or_tight() {
        // (2x - 1)(x + 1) = 2x^2 + x - 1.
        let p = poly(&[-1, 1, 2]);
        let roots = p.real_roots(&rat_ratio(1, 1 << 30)).unwrap();
        assert_eq!(roots.len(), 2);
        for r in &roots {
            assert!((&r.hi - &r.lo) <= rat_ratio(1, 1 << 30));
        }
        assert_eq!(roots[0].sign(), -1);
        assert_eq!(roots[1].sign(), 1);
    }

    #[test]
    fn rational_roots_collapse_to_exact_values() {
        // (x - 1/3)(x - 2) = x^2 - 7/3 x + 2/3.
        let p = RatPoly::new(vec![rat_ratio(2, 3), rat_ratio(-7, 3), rat_int(1)]);
        let roots = p.real_roots(&rat_ratio(1, 8)).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots.iter().all(|r| r.is_exact()));
        assert_eq!(roots[0].lo, rat_ratio(1, 3));
        assert_eq!(roots[1].lo, rat_int(2));
        // Irrational roots keep a genuine bracket.
        let p = poly(&[-2, 0, 1]);
        let roots = p.real_roots(&rat_ratio(1, 1024)).unwrap();
        assert!(roots.iter().all(|r| !r.is_exact()));
    }

    #[test]
    fn simplest_rational_walk() {
        let cases = [
            ((1, 3), (1, 2), (1, 2)),
            ((5, 64), (6, 64), (1, 11)),
            ((-1, 2), (-1, 3), (-1, 2)),
            ((-1, 4), (1, 8), (0, 1)),
            ((7, 3), (8, 3), (5, 2)),
        ];
        for ((la, lb), (ha, hb), (wa, wb)) in cases {
            let got = simplest_in(&rat_ratio(la, lb), &rat_ratio(ha, hb));
            assert_eq!(got, rat_ratio(wa, wb), "simplest in [{}/{}, {}/{}]", la, lb, ha, hb);
        }
    }
}
