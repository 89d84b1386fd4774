//! Named verification suites behind the `verify` subcommand.
//!
//! Each suite re-derives one slice of the calculus and reports a line
//! per check. Quantities that are measured rather than asserted (the
//! adjudicated sign conventions, residuals that happen to vanish
//! identically, eigenvalue growth) go into `findings` so the caller
//! can print them without gating the exit status on them.
//!
//! Randomised checks use a fixed ChaCha seed: reruns are bit-stable.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{
    coproduct, haar, monomials_up_to_degree, normal_form_word, AlgebraElement, Gen, Monomial,
    Strategy,
};
use crate::forms::{
    antisym2, antisym3, braiding_for, d_basis2, lambda2, lambda3, maurer_cartan, BraidChoice,
    KForm, DIM,
};
use crate::hodge::hodge;
use crate::laplacian::{
    box_apply, box_matrix, filtered_basis, sector_sign_counts, LaplaceParams, Spectrum,
};
use crate::linalg::Matrix;
use crate::params::{Param, ParamEnv, ParamExpr, ParamMono};
use crate::scalar::{rat_int, rat_ratio, Field, GaussQ, QRat, Rat};
use crate::sphere::{sphere_form_check, sphere_hodge, sphere_membership, SphereForm, Verdict};
use crate::uea::{act_left, pairing, tangent, u_coproduct, Tangent, UEAElement, UGen};

/// One named pass/fail line.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Everything one suite produced.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub checks: Vec<CheckResult>,
    pub findings: Vec<String>,
}

impl SuiteReport {
    fn new(suite: &'static str) -> Self {
        SuiteReport { suite, checks: Vec::new(), findings: Vec::new() }
    }

    fn check(&mut self, name: &'static str, passed: bool, detail: impl Into<String>) {
        self.checks.push(CheckResult { name, passed, detail: detail.into() });
    }

    fn finding(&mut self, text: impl Into<String>) {
        self.findings.push(text.into());
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Suite names in report order.
pub const SUITE_NAMES: [&str; 6] =
    ["calculus", "classical", "hodge", "hopf", "laplacian", "sphere"];

/// Run one suite by name.
pub fn run_suite(name: &str) -> Option<SuiteReport> {
    match name {
        "calculus" => Some(calculus_suite()),
        "classical" => Some(classical_suite()),
        "hodge" => Some(hodge_suite()),
        "hopf" => Some(hopf_suite()),
        "laplacian" => Some(laplacian_suite()),
        "sphere" => Some(sphere_suite()),
        _ => None,
    }
}

/// Run "all" or a single named suite; None for an unknown name.
pub fn run_requested(which: &str) -> Option<Vec<SuiteReport>> {
    if which == "all" {
        Some(SUITE_NAMES.iter().map(|n| run_suite(n).unwrap()).collect())
    } else {
        run_suite(which).map(|r| vec![r])
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_monomial(r: &mut ChaCha8Rng, max: u32) -> Monomial {
    let k = r.gen_range(0..=max);
    let astar = k > 0 && r.gen_bool(0.5);
    Monomial::new(astar, k, r.gen_range(0..=max), r.gen_range(0..=max))
}

fn random_coeff(r: &mut ChaCha8Rng) -> QRat {
    let n = loop {
        let n = r.gen_range(-3i64..=3);
        if n != 0 {
            break n;
        }
    };
    let e = r.gen_range(-2i64..=2);
    &QRat::from_int(n) * &QRat::q_pow(e)
}

fn random_element(r: &mut ChaCha8Rng, terms: usize, max: u32) -> AlgebraElement<QRat> {
    let mut x = AlgebraElement::zero();
    for _ in 0..terms {
        x.add_term(random_monomial(r, max), random_coeff(r));
    }
    x
}

fn q(k: i64) -> QRat {
    QRat::q_pow(k)
}

fn mono(alpha: u32, beta: u32, gamma: u32, m: i64, c: QRat) -> ParamExpr {
    ParamExpr::term(ParamMono { i: false, alpha, beta, gamma, m, mc: 0 }, c)
}

fn imono(mc: i64, alpha: u32, beta: u32, c: QRat) -> ParamExpr {
    ParamExpr::term(ParamMono { i: true, alpha, beta, gamma: 0, m: 0, mc }, c)
}

/// Ascending-coefficient product of two rational polynomials.
fn poly_mul(a: &[QRat], b: &[QRat]) -> Vec<QRat> {
    let mut out = vec![QRat::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(ai * bj);
        }
    }
    out
}

fn eval_at_one(x: &QRat) -> Rat {
    x.evaluate_q(&rat_int(1)).expect("no pole at q = 1")
}

fn fmt_gauss(v: &GaussQ) -> String {
    if v.im.is_zero() {
        format!("{}", v.re)
    } else {
        format!("{} + {} i", v.re, v.im)
    }
}

// ---------------------------------------------------------------- hopf

fn hopf_suite() -> SuiteReport {
    let mut rep = SuiteReport::new("hopf");
    let mut r = rng(0x5171);

    // Rewriting is confluent: leftmost and rightmost strategies agree.
    let gens = [Gen::A, Gen::AStar, Gen::C, Gen::CStar];
    let mut confluent = true;
    for _ in 0..12 {
        let len = r.gen_range(2..=5);
        let word: Vec<Gen> = (0..len).map(|_| gens[r.gen_range(0..4)]).collect();
        if normal_form_word(&word, Strategy::Leftmost)
            != normal_form_word(&word, Strategy::Rightmost)
        {
            confluent = false;
        }
    }
    rep.check("normal-form-confluence", confluent, "leftmost = rightmost on 12 random words");

    // The defining matrix is unitary: u u* = u* u = 1.
    let u = [
        [
            AlgebraElement::<QRat>::generator(Gen::A),
            AlgebraElement::generator(Gen::CStar).scale(&-q(1)),
        ],
        [AlgebraElement::generator(Gen::C), AlgebraElement::generator(Gen::AStar)],
    ];
    let mut unitary = true;
    for i in 0..2 {
        for j in 0..2 {
            // (u u*)_{ij} and (u* u)_{ij}
            let mut left = AlgebraElement::zero();
            let mut right = AlgebraElement::zero();
            for k in 0..2 {
                left = left.add(&u[i][k].mul(&u[j][k].star()));
                right = right.add(&u[k][i].star().mul(&u[k][j]));
            }
            let want = if i == j { AlgebraElement::unit() } else { AlgebraElement::zero() };
            unitary &= left == want && right == want;
        }
    }
    rep.check("matrix-unitarity", unitary, "u u* = u* u = 1 entrywise");

    // Coproduct is an algebra map.
    let mut hom = true;
    for _ in 0..8 {
        let x = random_element(&mut r, 2, 2);
        let y = random_element(&mut r, 2, 2);
        hom &= coproduct(&x.mul(&y)) == coproduct(&x).mul(&coproduct(&y));
    }
    rep.check(
        "coproduct-homomorphism",
        hom,
        "coproduct(xy) = coproduct(x) coproduct(y), 8 random pairs",
    );

    // Counit and antipode laws on the whole degree <= 2 span.
    let mut counit_ok = true;
    let mut antipode_ok = true;
    for m in monomials_up_to_degree(2) {
        let x = AlgebraElement::monomial(m, QRat::one());
        let cp = coproduct(&x);
        let mut left = AlgebraElement::zero();
        let mut right = AlgebraElement::zero();
        let mut s_left = AlgebraElement::zero();
        let mut s_right = AlgebraElement::zero();
        for ((a, b), c) in cp.terms() {
            let ea = AlgebraElement::monomial(*a, QRat::one()).counit();
            let eb = AlgebraElement::monomial(*b, QRat::one()).counit();
            left.add_term(*b, &ea * c);
            right.add_term(*a, &eb * c);
            let sa = AlgebraElement::monomial(*a, c.clone()).antipode();
            s_left = s_left.add(&sa.mul(&AlgebraElement::monomial(*b, QRat::one())));
            let sb = AlgebraElement::monomial(*b, c.clone()).antipode();
            s_right = s_right.add(&AlgebraElement::monomial(*a, QRat::one()).mul(&sb));
        }
        counit_ok &= left == x && right == x;
        let unit_scaled = AlgebraElement::monomial(Monomial::unit(), x.counit());
        antipode_ok &= s_left == unit_scaled && s_right == unit_scaled;
    }
    rep.check("counit-law", counit_ok, "(counit x id) and (id x counit) recover x, degree <= 2");
    rep.check("antipode-law", antipode_ok, "m(S x id) coproduct = counit, both sides, degree <= 2");

    // The pairing respects products on both sides.
    let usamples: Vec<UEAElement<QRat>> = vec![
        UEAElement::generator(UGen::E),
        UEAElement::generator(UGen::F),
        UEAElement::generator(UGen::K),
        tangent(Tangent::Minus),
        tangent(Tangent::Plus),
        tangent(Tangent::Z),
    ];
    let mut pair_prod = true;
    for _ in 0..10 {
        let g = &usamples[r.gen_range(0..usamples.len())];
        let h = &usamples[r.gen_range(0..usamples.len())];
        let x = random_element(&mut r, 2, 2);
        // <gh, x> = sum <g, x1><h, x2>
        let lhs = pairing(&g.mul(h), &x);
        let mut rhs = QRat::zero();
        for ((x1, x2), c) in coproduct(&x).terms() {
            let p1 = pairing(g, &AlgebraElement::monomial(*x1, QRat::one()));
            let p2 = pairing(h, &AlgebraElement::monomial(*x2, QRat::one()));
            rhs = &rhs + &(&(&p1 * &p2) * c);
        }
        pair_prod &= lhs == rhs;
        // <g, xy> = sum <g1, x><g2, y>
        let y = random_element(&mut r, 2, 1);
        let lhs2 = pairing(g, &x.mul(&y));
        let mut rhs2 = QRat::zero();
        for ((g1, g2), c) in u_coproduct(g).terms() {
            let p1 = pairing(&UEAElement::monomial(*g1, QRat::one()), &x);
            let p2 = pairing(&UEAElement::monomial(*g2, QRat::one()), &y);
            rhs2 = &rhs2 + &(&(&p1 * &p2) * c);
        }
        pair_prod &= lhs2 == rhs2;
    }
    rep.check(
        "pairing-product-laws",
        pair_prod,
        "products split through coproducts on both sides, 10 random triples",
    );

    // Left action is a module action.
    let mut module = true;
    for _ in 0..10 {
        let g = &usamples[r.gen_range(0..usamples.len())];
        let h = &usamples[r.gen_range(0..usamples.len())];
        let x = random_element(&mut r, 2, 2);
        module &= act_left(&g.mul(h), &x) == act_left(g, &act_left(h, &x));
    }
    rep.check("action-module-law", module, "(gh) acts as g after h, 10 random triples");

    // Haar state: two-sided invariance on the degree <= 4 span.
    let mut invariant = true;
    for m in monomials_up_to_degree(4) {
        let x = AlgebraElement::monomial(m, QRat::one());
        let hx = haar::<QRat>(&x);
        let cp = coproduct(&x);
        let mut left = AlgebraElement::zero();
        let mut right = AlgebraElement::zero();
        for ((a, b), c) in cp.terms() {
            let ha = haar::<QRat>(&AlgebraElement::monomial(*a, QRat::one()));
            let hb = haar::<QRat>(&AlgebraElement::monomial(*b, QRat::one()));
            left.add_term(*b, &ha * c);
            right.add_term(*a, &hb * c);
        }
        let want = AlgebraElement::monomial(Monomial::unit(), hx);
        invariant &= left == want && right == want;
    }
    rep.check(
        "haar-invariance",
        invariant,
        "(h x id) and (id x h) of the coproduct collapse to h, degree <= 4",
    );

    // Haar closed form on the central tower.
    let mut closed = true;
    let c = AlgebraElement::<QRat>::generator(Gen::C);
    let cs = AlgebraElement::<QRat>::generator(Gen::CStar);
    let ccs = c.mul(&cs);
    for l in 0u32..=4 {
        let v = haar::<QRat>(&ccs.pow(l));
        let num = &QRat::one() - &q(2);
        let den = &QRat::one() - &q(2 * i64::from(l) + 2);
        closed &= v == num.div(&den);
    }
    rep.check("haar-tower", closed, "h((c c*)^l) = (1 - q^2)/(1 - q^(2l+2)) for l <= 4");

    rep
}

// ------------------------------------------------------------ calculus

fn calculus_suite() -> SuiteReport {
    let mut rep = SuiteReport::new("calculus");
    let mut r = rng(0xCA1C);

    for choice in [BraidChoice::Standard, BraidChoice::Inverse] {
        let sigma = braiding_for(choice);
        let id3 = Matrix::<QRat>::identity(3);
        let s1 = sigma.kron(&id3);
        let s2 = id3.kron(sigma);
        let braid = s1.matmul(&s2).matmul(&s1) == s2.matmul(&s1).matmul(&s2);
        let id9 = Matrix::<QRat>::identity(9);
        let shift = match choice {
            BraidChoice::Standard => q(2),
            BraidChoice::Inverse => q(-2),
        };
        let hecke =
            sigma.sub(&id9).matmul(&sigma.add(&id9.scale(&shift))) == Matrix::zeros(9, 9);
        let name = match choice {
            BraidChoice::Standard => "braid-and-hecke",
            BraidChoice::Inverse => "braid-and-hecke-inverse",
        };
        rep.check(name, braid && hecke, "Yang-Baxter on 27 dims; (sigma - 1)(sigma + q^{+-2}) = 0");
    }

    // q = 1 collapses the braiding to the flip.
    let sigma = braiding_for(BraidChoice::Standard);
    let mut flip_ok = true;
    for a in 0..3 {
        for b in 0..3 {
            for cc in 0..3 {
                for dd in 0..3 {
                    let v = eval_at_one(&sigma[(3 * a + b, 3 * cc + dd)]);
                    let want = if a == dd && b == cc { rat_int(1) } else { rat_int(0) };
                    flip_ok &= v == want;
                }
            }
        }
    }
    rep.check("classical-flip", flip_ok, "sigma at q = 1 is the tensor flip");

    // Antisymmetriser spectral identities and ranks.
    let a2 = antisym2(BraidChoice::Standard);
    let a3 = antisym3(BraidChoice::Standard);
    let l2 = lambda2(BraidChoice::Standard);
    let l3 = lambda3(BraidChoice::Standard);
    let spectral = a2.matmul(a2) == a2.scale(&l2) && a3.matmul(a3) == a3.scale(&l3);
    let ranks = a2.rank() == 3 && a3.rank() == 1;
    rep.check(
        "antisymmetriser-identities",
        spectral && ranks,
        format!("A2^2 = (1+q^2) A2, A3^2 = lambda3 A3; ranks {} and {}", a2.rank(), a3.rank()),
    );
    let kernel = a2.kernel_basis();
    rep.check(
        "antisymmetriser-kernel",
        kernel.len() == 6,
        format!("ker A2 has dimension {}", kernel.len()),
    );
    let factorials = eval_at_one(&l2) == rat_int(2) && eval_at_one(&l3) == rat_int(6);
    rep.check("eigenvalues-at-one", factorials, "lambda2, lambda3 evaluate to 2! and 3! at q = 1");

    // Frame reconstruction from the differentials of the generators.
    let d0 = |x: &AlgebraElement<QRat>| KForm::scalar(x.clone()).d().unwrap();
    let a = AlgebraElement::<QRat>::generator(Gen::A);
    let astar = AlgebraElement::<QRat>::generator(Gen::AStar);
    let c = AlgebraElement::<QRat>::generator(Gen::C);
    let cstar = AlgebraElement::<QRat>::generator(Gen::CStar);
    let wz = d0(&a).scale_left(&astar).add(&d0(&c).scale_left(&cstar));
    let wm = d0(&astar).scale_left(&cstar).sub(&d0(&cstar).scale_left(&astar.scale(&q(1))));
    let wp = d0(&c).scale_left(&a).sub(&d0(&a).scale_left(&c.scale(&q(1))));
    let frames = wm == KForm::frame(0) && wp == KForm::frame(1) && wz == KForm::frame(2);
    rep.check(
        "frame-reconstruction",
        frames,
        "w- = c* da* - q a* dc*, w+ = a dc - q c da, wz = a* da + c* dc",
    );

    // Leibniz rule on random products against random forms.
    let mut leibniz = true;
    for _ in 0..25 {
        let x = random_element(&mut r, 2, 2);
        let deg = r.gen_range(0..=2usize);
        let mut phi = KForm::zero(deg);
        for i in 0..DIM[deg] {
            if r.gen_bool(0.6) {
                phi.set_coeff(i, random_element(&mut r, 1, 1));
            }
        }
        let lhs = phi.scale_left(&x).d().unwrap();
        let rhs = d0(&x).wedge(&phi).unwrap().add(&phi.d().unwrap().scale_left(&x));
        leibniz &= lhs == rhs;
    }
    rep.check("leibniz", leibniz, "d(x phi) = dx ^ phi + x d(phi), 25 random pairs, degrees 0..2");

    // Maurer-Cartan values and closedness of the 2-form basis.
    let mc = maurer_cartan();
    let mut dwm = KForm::zero(2);
    dwm.set_coeff(1, AlgebraElement::monomial(Monomial::unit(), &q(2) + &q(4)));
    let mut dwp = KForm::zero(2);
    dwp.set_coeff(2, AlgebraElement::monomial(Monomial::unit(), -(&QRat::one() + &q(-2))));
    let mut dwz = KForm::zero(2);
    dwz.set_coeff(0, AlgebraElement::monomial(Monomial::unit(), -QRat::one()));
    let mc_ok = mc[0] == dwm && mc[1] == dwp && mc[2] == dwz;
    let closed = d_basis2().iter().all(|f| f.is_zero());
    rep.check(
        "maurer-cartan",
        mc_ok && closed,
        "d w- = (q^2+q^4) w-^wz, d w+ = -(1+q^-2) w+^wz, d wz = -w-^w+; basis 2-forms closed",
    );

    // d squares to zero through degree 2.
    let mut dd = true;
    for m in monomials_up_to_degree(2) {
        let x = AlgebraElement::monomial(m, QRat::one());
        dd &= d0(&x).d().unwrap().is_zero();
        for i in 0..3 {
            let mut f = KForm::zero(1);
            f.set_coeff(i, x.clone());
            dd &= f.d().unwrap().d().unwrap().is_zero();
        }
    }
    rep.check("d-squared", dd, "d^2 = 0 on all degree <= 2 coefficients in degrees 0 and 1");

    // The star structure: involutive, and compatible with d.
    let mut star_ok = true;
    for _ in 0..10 {
        let deg = r.gen_range(1..=3usize);
        let mut phi = KForm::zero(deg);
        for i in 0..DIM[deg] {
            phi.set_coeff(i, random_element(&mut r, 1, 1));
        }
        star_ok &= phi.star().star() == phi;
    }
    let mut d_star = true;
    for m in monomials_up_to_degree(2) {
        let x = AlgebraElement::monomial(m, QRat::one());
        d_star &= d0(&x).star() == d0(&x.star());
    }
    rep.check(
        "star-structure",
        star_ok && d_star,
        "star is involutive on forms and (dx)* = d(x*) through degree 2",
    );

    rep
}

// --------------------------------------------------------------- hodge

fn hodge_suite() -> SuiteReport {
    let mut rep = SuiteReport::new("hodge");
    let mut r = rng(0xA111);
    let h = hodge(BraidChoice::Standard);
    let hi = hodge(BraidChoice::Inverse);

    // The solved operator against its closed forms.
    let l2inv = lambda2(BraidChoice::Standard).inv();
    let l3inv = lambda3(BraidChoice::Standard).inv();
    let two = QRat::from_int(2);
    let six = QRat::from_int(6);
    let mut expect1 = Matrix::<ParamExpr>::zeros(3, 3);
    expect1[(1, 0)] = mono(0, 1, 0, 1, -q(-2));
    expect1[(2, 1)] = mono(1, 0, 0, 1, QRat::one());
    expect1[(0, 2)] = mono(0, 0, 1, 1, QRat::one());
    let mut expect2 = Matrix::<ParamExpr>::zeros(3, 3);
    expect2[(2, 0)] = mono(1, 1, 0, 1, -(&two * &l2inv));
    expect2[(0, 1)] = mono(0, 1, 1, 1, &(&two * &q(-4)) * &l2inv);
    expect2[(1, 2)] = mono(1, 0, 1, 1, -(&(&two * &q(6)) * &l2inv));
    let table = h.t_matrix(0)[(0, 0)] == ParamExpr::m()
        && h.t_matrix(1) == &expect1
        && h.t_matrix(2) == &expect2
        && h.t_matrix(3)[(0, 0)] == mono(1, 1, 1, 1, -(&(&six * &q(4)) * &l3inv));
    rep.check("frozen-operator-table", table, "all eight matrix entries match their closed forms");

    // Defining equation: zero residual on basis pairs and random samples.
    let mut residual = true;
    for k in 0..=3usize {
        for i in 0..DIM[k] {
            for j in 0..DIM[k] {
                let phi = KForm::<ParamExpr>::basis(k, i);
                let psi = KForm::<ParamExpr>::basis(k, j);
                residual &= h.defining_residual(&phi, &psi).is_zero();
                residual &= hi.defining_residual(&phi, &psi).is_zero();
            }
        }
    }
    rep.check(
        "defining-equation-basis",
        residual,
        "phi* ^ T psi = (m/lambda) g(phi, psi) theta on all basis pairs, both braidings",
    );

    let lift = |x: &AlgebraElement<QRat>| x.map_coeffs(|c| ParamExpr::scalar(c.clone()));
    let mut sampled = true;
    for _ in 0..6 {
        let k = r.gen_range(1..=2usize);
        let mut phi = KForm::<ParamExpr>::zero(k);
        let mut psi = KForm::<ParamExpr>::zero(k);
        phi.set_coeff(r.gen_range(0..DIM[k]), lift(&random_element(&mut r, 1, 2)));
        psi.set_coeff(r.gen_range(0..DIM[k]), lift(&random_element(&mut r, 1, 2)));
        sampled &= h.defining_residual(&phi, &psi).is_zero();
    }
    rep.check("defining-equation-samples", sampled, "zero residual on 6 random one-component pairs");

    // Doubly non-invariant residual: measured, not presumed.
    {
        let mut phi = KForm::<ParamExpr>::zero(1);
        phi.set_coeff(0, lift(&AlgebraElement::generator(Gen::A)));
        let mut psi = KForm::<ParamExpr>::zero(1);
        psi.set_coeff(1, lift(&AlgebraElement::generator(Gen::C)));
        let res = h.defining_residual(&phi, &psi);
        rep.finding(format!(
            "doubly non-invariant defining residual (a w-, c w+): {}",
            if res.is_zero() { "exactly zero" } else { "NONZERO" }
        ));
    }

    // T^2 is scalar exactly on the beta = q^6 alpha locus.
    let q0 = rat_ratio(1, 2);
    let q6v = q(6).evaluate_q(&q0).unwrap();
    let mut classify = true;
    for _ in 0..20 {
        let alpha = rat_ratio(r.gen_range(1..=5), r.gen_range(1..=3));
        let gamma = rat_int(r.gen_range(1..=4));
        let on_locus = r.gen_bool(0.5);
        let beta = if on_locus {
            &alpha * &q6v
        } else {
            &(&alpha * &q6v) + &rat_ratio(r.gen_range(1..=3), 7)
        };
        let env = ParamEnv::real(q0.clone(), alpha, beta, gamma);
        classify &= h.is_symmetric_at(&env).unwrap() == on_locus;
    }
    rep.check(
        "symmetry-classification",
        classify,
        "T^2 scalar on 1-forms iff beta = q^6 alpha, 20 random parameter points",
    );

    // Reality of the matrices tracks reality of the parameters.
    let env_real = ParamEnv::real(q0.clone(), rat_int(1), rat_int(2), rat_int(1));
    let mut env_complex = env_real.clone();
    env_complex.alpha = GaussQ::new(rat_int(1), rat_int(1));
    let reality = h.is_real_at(&env_real).unwrap() && !h.is_real_at(&env_complex).unwrap();
    rep.check(
        "reality-classification",
        reality,
        "real parameters give a real operator; alpha = 1 + i does not",
    );

    // Star commutes with T on the symmetric family.
    rep.check(
        "star-commutation",
        h.star_commutes_on_family(),
        "T(phi*) = (T phi)* on all basis forms once beta = q^6 alpha",
    );
    rep.finding(format!(
        "inverse-braiding family also commutes with star: {}",
        hi.star_commutes_on_family()
    ));

    // Volume normalisation: m^2 = lambda3 / |G3| makes T^2(1) = sgn(g).
    let mut norm = true;
    for (p, qd) in [(1i64, 4i64), (1, 2), (3, 4)] {
        let q0 = rat_ratio(p, qd);
        let q6n = q(6).evaluate_q(&q0).unwrap();
        for gamma in [rat_int(2), rat_int(-2)] {
            let mut env = ParamEnv::real(q0.clone(), rat_int(1), q6n.clone(), gamma.clone());
            let m2 = h.solve_m_square(&env).unwrap();
            env.m_square = Some(GaussQ::from_rat(m2));
            let det = h.det_g().eval_numeric(&env).unwrap();
            let sgn = if gamma > Rat::zero() { rat_int(-1) } else { rat_int(1) };
            norm &= det == GaussQ::from_rat(sgn.clone());
            // T^2 on 1-forms: sgn(g) 2 lambda3 / (6 q^4 lambda2).
            let l2v = lambda2(BraidChoice::Standard).evaluate_q(&q0).unwrap();
            let l3v = lambda3(BraidChoice::Standard).evaluate_q(&q0).unwrap();
            let q4 = q(4).evaluate_q(&q0).unwrap();
            let scalar = &(&sgn * &(&rat_int(2) * &l3v)) / &(&(&rat_int(6) * &q4) * &l2v);
            let ts = h.t_square_matrix(1);
            for i in 0..3 {
                for j in 0..3 {
                    let v = ts[(i, j)].eval_numeric(&env).unwrap();
                    let want =
                        if i == j { GaussQ::from_rat(scalar.clone()) } else { GaussQ::zero() };
                    norm &= v == want;
                }
            }
        }
    }
    rep.check(
        "volume-normalisation",
        norm,
        "T^2(1) = sgn(g) and T^2 = sgn(g) 2 lambda3/(6 q^4 lambda2) on 1-forms at q0 in {1/4, 1/2, 3/4}",
    );

    // The inverse-braiding family: same constraint, different operator.
    let q6a = &ParamExpr::alpha() * &ParamExpr::scalar(q(6));
    let lock = |e: &ParamExpr| e.substitute(Param::Beta, &q6a);
    let tsq = hi.t_square_matrix(1).map(|e| lock(e));
    let mut inv_scalar = true;
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                inv_scalar &= tsq[(i, j)] == tsq[(0, 0)];
            } else {
                inv_scalar &= tsq[(i, j)].is_zero();
            }
        }
    }
    let fix = |e: &ParamExpr| {
        lock(e)
            .set_m_one()
            .substitute(Param::Alpha, &ParamExpr::one())
            .substitute(Param::Gamma, &ParamExpr::one())
    };
    let comm_ab = hi.t_matrix(2).map(|e| fix(e)).matmul(&h.t_matrix(1).map(|e| fix(e)));
    let comm_ba = h.t_matrix(2).map(|e| fix(e)).matmul(&hi.t_matrix(1).map(|e| fix(e)));
    rep.check(
        "inverse-family",
        inv_scalar && comm_ab != comm_ba,
        "same symmetry locus; the two operators do not commute at alpha = gamma = 1, beta = q^6",
    );

    // Braiding spectra: (t-1)^6 (t+q^{+-2})^3 for the two choices.
    let mut spectra = true;
    for (choice, shift) in [(BraidChoice::Standard, q(2)), (BraidChoice::Inverse, q(-2))] {
        let cp = braiding_for(choice).charpoly();
        let mut want = vec![QRat::one()];
        for _ in 0..6 {
            want = poly_mul(&want, &[-QRat::one(), QRat::one()]);
        }
        for _ in 0..3 {
            want = poly_mul(&want, &[shift.clone(), QRat::one()]);
        }
        spectra &= cp == want;
    }
    rep.check(
        "braiding-spectra",
        spectra,
        "charpoly(sigma) = (t-1)^6 (t+q^2)^3; the inverse swaps q^2 for q^-2",
    );

    rep
}

// -------------------------------------------------------------- sphere

fn sphere_suite() -> SuiteReport {
    let mut rep = SuiteReport::new("sphere");
    let h = sphere_hodge();
    let l2 = lambda2(BraidChoice::Standard);

    // Membership is the charge grading.
    let one = AlgebraElement::<QRat>::unit();
    let c = AlgebraElement::<QRat>::generator(Gen::C);
    let cs = AlgebraElement::<QRat>::generator(Gen::CStar);
    let a = AlgebraElement::<QRat>::generator(Gen::A);
    let member = sphere_membership(&one)
        && sphere_membership(&c.mul(&cs))
        && !sphere_membership(&a)
        && !sphere_membership(&c);
    let mut vm = KForm::<QRat>::zero(1);
    vm.set_coeff(0, c.mul(&c));
    let mut bad = KForm::<QRat>::zero(1);
    bad.set_coeff(2, one.clone());
    let forms_ok = sphere_form_check(&vm).is_ok() && sphere_form_check(&bad).is_err();
    rep.check(
        "charge-grading",
        member && forms_ok,
        "functions sit in charge 0; 1-forms in charge -2 w- + charge +2 w+",
    );

    // The restricted operator against its closed forms.
    let closed = *h.component(0) == imono(1, 0, 0, QRat::one())
        && *h.component(1) == imono(1, 0, 1, -q(-2))
        && *h.component(2) == imono(1, 1, 0, QRat::one())
        && *h.component(3) == imono(1, 1, 1, -(&QRat::from_int(2) * &l2.inv()));
    rep.check(
        "restricted-operator",
        closed,
        "T(1), T on both 1-form sectors, and T(w-^w+) match their closed forms",
    );

    // The restricted normalisation.
    let want_mc2 = mono(1, 1, 0, 0, &l2 * &QRat::from_int(2).inv());
    rep.check(
        "volume-normalisation",
        *h.mc_square() == want_mc2,
        "m^2 = lambda2 alpha beta / 2 on the sphere",
    );

    // T^2 is a scalar on each sector but not on all of degree 1.
    let sq = h.square_scalars();
    let reduced: Vec<ParamExpr> = sq.iter().map(|e| e.reduce_mc_square(h.mc_square())).collect();
    let ab2 = mono(2, 2, 0, 0, QRat::one());
    let raw_m = ParamExpr::term(ParamMono { beta: 2, mc: 2, ..Default::default() }, -q(-4));
    let raw_p = ParamExpr::term(ParamMono { alpha: 2, mc: 2, ..Default::default() }, -QRat::one());
    let sectors = reduced[0] == ab2 && reduced[3] == ab2 && sq[1] == raw_m && sq[2] == raw_p;
    // Even on the symmetric locus the two 1-form scalars differ by q^8.
    let q6a = &ParamExpr::alpha() * &ParamExpr::scalar(q(6));
    let lm = reduced[1].substitute(Param::Beta, &q6a);
    let lp = reduced[2].substitute(Param::Beta, &q6a);
    let split = lm != lp && lm == lp.clone() * ParamExpr::scalar(q(8));
    rep.check(
        "square-scalars",
        sectors && split,
        "T^2 sector scalars match; the two 1-form scalars differ by q^8 even at beta = q^6 alpha",
    );
    let q0 = rat_ratio(1, 2);
    let env_half = ParamEnv::real(
        q0.clone(),
        rat_int(1),
        q(6).evaluate_q(&q0).unwrap(),
        rat_int(1),
    );
    rep.finding(format!(
        "T^2 on the two 1-form sectors at q = 1/2, alpha = 1, beta = q^6: {} and {}",
        fmt_gauss(&lm.eval_numeric(&env_half).unwrap()),
        fmt_gauss(&lp.eval_numeric(&env_half).unwrap()),
    ));

    // The adjudicated top-degree coefficient.
    let adj = h.adjudicate();
    rep.check(
        "two-form-adjudication",
        adj.verdict == Verdict::NeitherConsistent,
        "both candidate T(w-^w+) coefficients fail the defining equation",
    );
    rep.finding(format!("engine value for the T(w-^w+) coefficient: {}", adj.engine));

    // d and wedge stay on the sphere.
    let lift = |x: &AlgebraElement<QRat>| x.map_coeffs(|c| ParamExpr::scalar(c.clone()));
    let mut f = KForm::<ParamExpr>::zero(1);
    f.set_coeff(0, lift(&c.mul(&c)));
    let sf = sphere_form_check(&f).unwrap();
    let mut g2 = KForm::<ParamExpr>::zero(1);
    g2.set_coeff(1, lift(&cs.mul(&cs)));
    let sg = sphere_form_check(&g2).unwrap();
    let x0 = SphereForm::scalar(lift(&c.mul(&cs)));
    let closure = x0.d().is_some() && sf.d().is_some() && x0.wedge(&sf).is_some();
    let embedded_d = sf.wedge(&sg).unwrap().into_form().d().unwrap().is_zero();
    rep.check(
        "closure",
        closure && embedded_d,
        "d and wedge of sphere forms stay on the sphere; embedded 2-forms are closed upstairs",
    );

    // Scalar products: unit norm, the adjudicated sign, positivity on
    // the alpha, gamma < 0 branch.
    let one_s = SphereForm::scalar(AlgebraElement::<ParamExpr>::unit());
    let unit_norm = h.scalar_product(&one_s, &one_s) == ParamExpr::one();
    let c_pe = AlgebraElement::<ParamExpr>::generator(Gen::C);
    let cs_pe = AlgebraElement::<ParamExpr>::generator(Gen::CStar);
    let hv = haar::<ParamExpr>(&cs_pe.mul(&cs_pe).mul(&c_pe).mul(&c_pe));
    let engine_sign =
        h.scalar_product(&sf, &sf) == ParamExpr::zero() - (&ParamExpr::beta() * &hv);
    rep.check(
        "scalar-products",
        unit_norm && engine_sign,
        "<1,1> = 1 and <c^2 w-, c^2 w-> = -beta h(c*^2 c^2)",
    );
    rep.finding(
        "the 1-form norm carries -beta, not +beta; positivity selects the alpha, gamma < 0 branch of alpha gamma > 0"
            .to_string(),
    );

    let beta0 = -q(6).evaluate_q(&q0).unwrap();
    let mut env = ParamEnv::real(q0.clone(), rat_int(-1), beta0, rat_int(-1));
    env.mc_square = Some(
        h.mc_square().eval_numeric(&ParamEnv { mc_square: None, ..env.clone() }).unwrap(),
    );
    let norms = [
        h.scalar_product(&one_s, &one_s),
        h.scalar_product(&sf, &sf),
        h.scalar_product(&sg, &sg),
        {
            let vol = h.volume();
            h.scalar_product(&vol, &vol)
        },
    ];
    let mut positive = true;
    let mut vals = Vec::new();
    for n in &norms {
        let v = n.reduce_mc_square(h.mc_square()).eval_numeric(&env).unwrap();
        positive &= v.im.is_zero() && v.re > Rat::zero();
        vals.push(fmt_gauss(&v));
    }
    rep.check(
        "positivity-branch",
        positive,
        format!(
            "all four sample norms positive at q = 1/2, alpha = gamma = -1: {}",
            vals.join(", ")
        ),
    );

    rep
}

// ----------------------------------------------------------- laplacian

fn laplacian_suite() -> SuiteReport {
    let mut rep = SuiteReport::new("laplacian");

    // Generator values.
    let alpha = ParamExpr::alpha();
    let gamma = ParamExpr::gamma();
    let lift = |g: Gen| AlgebraElement::<ParamExpr>::generator(g);
    let box_of = |g: Gen| box_apply(&alpha, &gamma, &lift(g));
    let scale_a = &alpha + &gamma;
    let scale_as =
        &(&alpha * &ParamExpr::scalar(q(6))) + &(&gamma * &ParamExpr::scalar(q(4)));
    let gen_ok = box_apply(&alpha, &gamma, &AlgebraElement::unit()).is_zero()
        && box_of(Gen::A) == lift(Gen::A).scale(&scale_a)
        && box_of(Gen::C) == lift(Gen::C).scale(&scale_a)
        && box_of(Gen::AStar) == lift(Gen::AStar).scale(&scale_as)
        && box_of(Gen::CStar) == lift(Gen::CStar).scale(&scale_as);
    rep.check(
        "generator-values",
        gen_ok,
        "box 1 = 0, box a = (alpha + gamma) a, box a* = (q^6 alpha + q^4 gamma) a*, same on c, c*",
    );

    let env = ParamEnv::real(rat_ratio(1, 2), rat_int(1), rat_int(0), rat_int(-1));
    let num = box_of(Gen::AStar).coeff(&Monomial::gen(Gen::AStar)).eval_numeric(&env).unwrap();
    rep.check(
        "mixed-sign-sample",
        num == GaussQ::from_rat(rat_ratio(-3, 64)),
        "box a* at q = 1/2, alpha = 1, gamma = -1 is -3/64",
    );

    // Filtration: charge and degree are preserved.
    let mut r = rng(0x1A91);
    let mut filtered = true;
    for _ in 0..10 {
        let x = random_element(&mut r, 2, 2);
        let bx = box_apply(&QRat::one(), &QRat::from_int(2), &x);
        filtered &= bx.max_degree() <= x.max_degree();
        for (n, comp) in x.charge_components() {
            let b = box_apply(&QRat::one(), &QRat::from_int(2), &comp);
            filtered &= b.is_zero() || b.homogeneous_charge() == Some(n);
        }
    }
    rep.check(
        "filtration",
        filtered,
        "box never raises degree and preserves charge, 10 random elements",
    );

    // Exact spectrum of the degree <= 1 block at unit parameters.
    let p = LaplaceParams::new(rat_int(1), rat_int(1), rat_ratio(1, 2));
    let fm = box_matrix(&p, 1, None).unwrap();
    let spec = fm.spectrum_exact().unwrap();
    let mut d1 = fm.basis.len() == 5;
    if let Spectrum::Exact(roots) = &spec {
        let want = [(rat_int(0), 1usize), (rat_ratio(5, 64), 2), (rat_int(2), 2)];
        d1 &= roots.len() == want.len();
        for (root, (v, mult)) in roots.iter().zip(want.iter()) {
            d1 &= root.lo <= *v && *v <= root.hi && root.multiplicity == *mult;
        }
    }
    let sig = fm.sign_counts().unwrap();
    rep.check(
        "unit-spectrum",
        d1 && sig == (0, 1, 4),
        "degree <= 1 block at alpha = gamma = 1, q = 1/2: {0, 5/64 x2, 2 x2}, signature (0, 1, 4)",
    );

    // Charge-zero block: gamma-independent and positive semidefinite.
    let p_neg = LaplaceParams::new(rat_int(1), rat_int(-1), rat_ratio(1, 2));
    let fm0_pos = box_matrix(&p, 3, Some(0)).unwrap();
    let fm0_neg = box_matrix(&p_neg, 3, Some(0)).unwrap();
    let gamma_free = fm0_pos.matrix == fm0_neg.matrix;
    let signs0 = fm0_pos.sign_counts().unwrap();
    rep.check(
        "charge-zero-block",
        gamma_free && signs0 == (0, 1, 3),
        "degree <= 3 charge-0 block is gamma-independent with signs (0, 1, 3)",
    );
    rep.finding(
        "the vertical generator annihilates every charge-0 function, so no gamma makes the charge-0 block indefinite; indefiniteness lives in the charged sectors"
            .to_string(),
    );

    // Full block signatures, exactly, through the charge decomposition.
    let mixed = sector_sign_counts(&p_neg, 3).unwrap();
    let unit = sector_sign_counts(&p, 3).unwrap();
    rep.check(
        "full-block-signature",
        mixed.0 > 0 && mixed.2 > 0 && unit.0 == 0 && unit.1 + unit.2 == 30,
        format!("degree <= 3: signs {:?} at gamma = -1 (indefinite), {:?} at gamma = 1", mixed, unit),
    );

    // The floating path agrees with the exact one and stays real.
    let exact = fm.spectrum_exact().unwrap().approximate();
    let float = match fm.spectrum_float() {
        Spectrum::Float { eigenvalues, .. } => eigenvalues,
        Spectrum::Exact(_) => unreachable!(),
    };
    let mut agree = exact.len() == float.len();
    for (e, f) in exact.iter().zip(float.iter()) {
        agree &= (e - f).abs() < 1e-9;
    }
    let mut tops = Vec::new();
    for d in 1..=3 {
        let fmd = box_matrix(&p, d, None).unwrap();
        match fmd.spectrum_float() {
            Spectrum::Float { eigenvalues, residual, max_imaginary } => {
                agree &= residual < 1e-8 && max_imaginary < 1e-8;
                tops.push(*eigenvalues.last().unwrap());
            }
            Spectrum::Exact(_) => unreachable!(),
        }
    }
    agree &= tops[0] < tops[1] && tops[1] < tops[2];
    rep.check(
        "float-path",
        agree,
        "Schur eigenvalues track the exact ones to 1e-9; residuals below 1e-8",
    );
    rep.finding(format!(
        "largest eigenvalue grows with the filtration degree: {:.6}, {:.6}, {:.6} for degrees 1, 2, 3",
        tops[0], tops[1], tops[2]
    ));

    // Self-adjointness for the Haar inner product, symbolically.
    let basis0 = filtered_basis(3, Some(0));
    let mut sym = true;
    for x in &basis0 {
        for y in &basis0 {
            let xe = AlgebraElement::<ParamExpr>::monomial(*x, ParamExpr::one());
            let ye = AlgebraElement::<ParamExpr>::monomial(*y, ParamExpr::one());
            let lhs = haar::<ParamExpr>(&box_apply(&alpha, &gamma, &xe).star().mul(&ye));
            let rhs = haar::<ParamExpr>(&xe.star().mul(&box_apply(&alpha, &gamma, &ye)));
            sym &= lhs == rhs;
        }
    }
    rep.check(
        "haar-self-adjointness",
        sym,
        "h((box x)* y) = h(x* box y) symbolically in alpha, gamma on the charge-0 degree <= 3 span",
    );
    rep.finding(
        "self-adjointness residuals vanish identically in alpha and gamma, not only numerically"
            .to_string(),
    );

    rep
}

// ----------------------------------------------------------- classical

fn classical_suite() -> SuiteReport {
    let mut rep = SuiteReport::new("classical");
    let one = rat_int(1);

    // The braiding collapses to the flip.
    let sigma = braiding_for(BraidChoice::Standard);
    let mut flip_ok = true;
    for a in 0..3 {
        for b in 0..3 {
            for cc in 0..3 {
                for dd in 0..3 {
                    let v = eval_at_one(&sigma[(3 * a + b, 3 * cc + dd)]);
                    let want = if a == dd && b == cc { rat_int(1) } else { rat_int(0) };
                    flip_ok &= v == want;
                }
            }
        }
    }
    rep.check("flip", flip_ok, "sigma at q = 1 is the tensor flip");

    // Antisymmetriser eigenvalues become factorials.
    let facts = eval_at_one(&lambda2(BraidChoice::Standard)) == rat_int(2)
        && eval_at_one(&lambda3(BraidChoice::Standard)) == rat_int(6);
    rep.check("factorials", facts, "lambda2 = 2!, lambda3 = 3! at q = 1");

    // The wedge anticommutes.
    let mut anti = true;
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                anti &= KForm::<QRat>::frame(i).wedge(&KForm::frame(j)).unwrap().is_zero();
                continue;
            }
            let ij = KForm::<QRat>::frame(i).wedge(&KForm::frame(j)).unwrap();
            let ji = KForm::<QRat>::frame(j).wedge(&KForm::frame(i)).unwrap();
            for k in 0..DIM[2] {
                let u = ij.coeff(k).coeff(&Monomial::unit());
                let v = ji.coeff(k).coeff(&Monomial::unit());
                anti &= &eval_at_one(&u) + &eval_at_one(&v) == rat_int(0);
            }
        }
    }
    rep.check("wedge-anticommutes", anti, "frame wedges anticommute once q = 1");

    // The symmetry locus collapses to beta = alpha.
    let h = hodge(BraidChoice::Standard);
    let collapse = h
        .is_symmetric_at(&ParamEnv::real(one.clone(), rat_int(1), rat_int(1), rat_int(2)))
        .unwrap()
        && !h
            .is_symmetric_at(&ParamEnv::real(one.clone(), rat_int(1), rat_int(2), rat_int(2)))
            .unwrap();
    rep.check("family-collapse", collapse, "at q = 1 the locus beta = q^6 alpha reads beta = alpha");

    // T^2 = sgn(g) (-1)^{k(3-k)} = sgn(g) on every degree at q = 1.
    let mut squares = true;
    for gamma in [rat_int(1), rat_int(-1)] {
        let mut env = ParamEnv::real(one.clone(), rat_int(1), rat_int(1), gamma.clone());
        let m2 = h.solve_m_square(&env).unwrap();
        squares &= m2 == rat_int(1);
        env.m_square = Some(GaussQ::from_rat(m2));
        let sgn = if gamma > Rat::zero() { rat_int(-1) } else { rat_int(1) };
        for k in 0..=3usize {
            let ts = h.t_square_matrix(k);
            for i in 0..DIM[k] {
                for j in 0..DIM[k] {
                    let v = ts[(i, j)].eval_numeric(&env).unwrap();
                    let want =
                        if i == j { GaussQ::from_rat(sgn.clone()) } else { GaussQ::zero() };
                    squares &= v == want;
                }
            }
        }
    }
    rep.check(
        "square-sign",
        squares,
        "normalised T^2 = sgn(g) on every degree at q = 1 ((-1)^{k(3-k)} = 1 for all k)",
    );

    // Reality at the classical point.
    let real = h
        .is_real_at(&ParamEnv::real(one.clone(), rat_int(1), rat_int(1), rat_int(-1)))
        .unwrap();
    rep.check("reality", real, "real parameters give a real operator at q = 1");

    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes() {
        for name in SUITE_NAMES {
            let rep = run_suite(name).unwrap();
            for c in &rep.checks {
                assert!(c.passed, "suite {} check {} failed: {}", name, c.name, c.detail);
            }
            assert!(rep.passed());
        }
    }

    #[test]
    fn unknown_suites_are_rejected() {
        assert!(run_suite("spectral").is_none());
        assert_eq!(run_requested("all").unwrap().len(), SUITE_NAMES.len());
        assert_eq!(run_requested("hopf").unwrap().len(), 1);
    }
}
