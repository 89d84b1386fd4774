//! qhodge: exact computations in the 3d left-covariant calculus on
//! quantum SU(2) and on the standard Podleś sphere.

mod cache;
mod parser;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser as ClapParser, Subcommand, ValueEnum};
use num_traits::Zero;
use qhodge_core::algebra::haar;
use qhodge_core::checks;
use qhodge_core::forms::{
    antisym2, antisym3, basis_display, braiding_for, frame_charges, BraidChoice, KForm, DIM,
};
use qhodge_core::hodge::{hodge, HodgeData};
use qhodge_core::laplacian::{box_matrix, LaplaceParams, Spectrum};
use qhodge_core::params::{Param, ParamEnv, ParamExpr};
use qhodge_core::scalar::{QRat, Rat};
use qhodge_core::sphere::{sphere_hodge, Verdict};
use qhodge_core::uea::{act_left, act_right, tangent, Tangent, UEAElement};

use cache::Cache;
use parser::{parse, parse_rational, parse_scalar, Value};

#[derive(ClapParser)]
#[command(
    name = "qhodge",
    about = "Exact 3d left-covariant differential calculus on quantum SU(2)",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Output rendering.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideFlag {
    Left,
    Right,
}

#[derive(Subcommand)]
enum Cmd {
    /// Rewrite an expression to its ordered normal form.
    NormalForm {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Apply an enveloping-algebra element to a coordinate-algebra element.
    Act {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        /// Xm, Xp, Xz, or any enveloping-algebra expression like "E*K".
        #[arg(long)]
        vector: String,
        #[arg(long, value_enum, default_value_t = SideFlag::Left)]
        side: SideFlag,
    },
    /// Exterior derivative.
    D {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Exterior product of two forms.
    Wedge {
        #[arg(allow_hyphen_values = true)]
        lhs: String,
        #[arg(allow_hyphen_values = true)]
        rhs: String,
    },
    /// Apply the braiding to a rank-2 frame tensor.
    Sigma {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long)]
        inverse: bool,
    },
    /// Apply the rank-2 or rank-3 antisymmetriser to a frame tensor.
    Antisym {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long)]
        k: usize,
    },
    /// The Hodge operator family at given parameters (exact in q unless --q pins a value).
    Hodge {
        /// Scalar expression, e.g. "1" or "-3/2" or "q^2".
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        /// Scalar expression; "q^6 * <alpha>" gives the symmetric family.
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
        /// Exact rational value for q, e.g. "1/2"; enables the normalisation report.
        #[arg(long)]
        q: Option<String>,
        /// Use the inverse braiding's antisymmetrisers.
        #[arg(long)]
        sigma_inverse: bool,
    },
    /// The induced Hodge operator on the standard Podleś sphere (symbolic).
    SphereHodge,
    /// Matrix and spectrum of the scalar Laplacian on a filtered block.
    Laplacian {
        /// Exact rational in (0, 1), e.g. "1/2".
        #[arg(long)]
        q: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
        /// Filtration bound: PBW monomials of total degree <= this.
        #[arg(long)]
        degree: u32,
        /// Restrict to one charge sector.
        #[arg(long, allow_negative_numbers = true)]
        charge: Option<i64>,
    },
    /// Run named verification suites; exit code 0 iff every check passes.
    Verify {
        /// calculus, classical, hodge, hopf, laplacian, sphere, or all.
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Haar state of a coordinate-algebra element.
    Haar {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Degree and charge decomposition of an element or form.
    Grade {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {:#}", e);
            std::process::exit(1);
        }
    }
}

fn parse_expr(src: &str) -> Result<Value> {
    parse(src).map_err(|e| anyhow!("{}", e)).with_context(|| format!("in '{}'", src))
}

/// All command output funnels through here so a closed pipe (e.g.
/// `qhodge ... | head`) ends the process quietly instead of panicking.
fn out(text: &str) {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    if writeln!(stdout, "{}", text).and_then(|_| stdout.flush()).is_err() {
        std::process::exit(141);
    }
}

fn emit(format: Format, text: String, json: serde_json::Value) {
    out(&render(format, text, json));
}

fn run(cli: Cli) -> Result<i32> {
    let format = cli.format;
    match cli.cmd {
        Cmd::NormalForm { expr } => {
            let v = parse_expr(&expr)?;
            emit(format, v.to_string(), v.to_json());
        }
        Cmd::Act { expr, vector, side } => {
            let x = parse_expr(&expr)?.into_algebra(0).map_err(|e| anyhow!("{}", e))?;
            let h = parse_vector(&vector)?;
            let cache = Cache::from_env();
            let side_name = match side {
                SideFlag::Left => "left",
                SideFlag::Right => "right",
            };
            let key = format!("act|{}|{}|{}|{}", side_name, h, x, format as u8);
            if let Some(hit) = cache.get(&key) {
                out(&hit);
                return Ok(0);
            }
            let acted = match side {
                SideFlag::Left => act_left(&h, &x),
                SideFlag::Right => act_right(&x, &h),
            };
            let rendered = render(format, acted.to_string(), acted.to_json());
            cache.put(&key, &rendered);
            out(&rendered);
        }
        Cmd::D { expr } => match parse_expr(&expr)? {
            // d kills scalars.
            Value::Scalar(_) => emit(format, "0".into(), QRat::zero().to_json()),
            Value::Algebra(x) => {
                let f = KForm::scalar(x).d().expect("0-forms differentiate");
                emit(format, f.to_string(), f.to_json());
            }
            Value::Form(f) => match f.d() {
                Some(df) => emit(format, df.to_string(), df.to_json()),
                // Nothing lives above the top degree.
                None => emit(format, "0".into(), QRat::zero().to_json()),
            },
            other => bail!("d applies to algebra elements and forms, not a {}", other.kind()),
        },
        Cmd::Wedge { lhs, rhs } => {
            let to_form = |v: Value, side: &str| -> Result<KForm<QRat>> {
                match v {
                    Value::Form(f) => Ok(f),
                    Value::Scalar(_) | Value::Algebra(_) => {
                        Ok(KForm::scalar(v.into_algebra(0).unwrap()))
                    }
                    other => bail!("{} of wedge is a {}, not a form", side, other.kind()),
                }
            };
            let a = to_form(parse_expr(&lhs)?, "left side")?;
            let b = to_form(parse_expr(&rhs)?, "right side")?;
            match a.wedge(&b) {
                Some(w) => emit(format, w.to_string(), w.to_json()),
                // The target space is zero above the top degree.
                None => emit(format, "0".into(), QRat::zero().to_json()),
            }
        }
        Cmd::Sigma { expr, inverse } => {
            let t = match parse_expr(&expr)? {
                Value::Tensor(t) if t.rank == 2 => t,
                other => bail!("the braiding acts on rank-2 frame tensors, not a {}", other.kind()),
            };
            let choice = if inverse { BraidChoice::Inverse } else { BraidChoice::Standard };
            let out = t.apply_matrix(braiding_for(choice));
            emit(format, out.to_string(), out.to_json());
        }
        Cmd::Antisym { expr, k } => {
            let t = match parse_expr(&expr)? {
                Value::Tensor(t) => t,
                other => bail!("antisymmetrisers act on frame tensors, not a {}", other.kind()),
            };
            if !(k == 2 || k == 3) {
                bail!("--k must be 2 or 3");
            }
            if t.rank != k {
                bail!("--k {} needs a rank-{} tensor, got rank {}", k, k, t.rank);
            }
            let m = if k == 2 {
                antisym2(BraidChoice::Standard)
            } else {
                antisym3(BraidChoice::Standard)
            };
            let out = t.apply_matrix(m);
            emit(format, out.to_string(), out.to_json());
        }
        Cmd::Hodge { alpha, beta, gamma, q, sigma_inverse } => {
            let a = parse_scalar(&alpha).map_err(|e| anyhow!("--alpha: {}", e))?;
            let b = parse_scalar(&beta).map_err(|e| anyhow!("--beta: {}", e))?;
            let g = parse_scalar(&gamma).map_err(|e| anyhow!("--gamma: {}", e))?;
            let q0 = q.map(|s| parse_rational(&s).map_err(|e| anyhow!("--q: {}", e))).transpose()?;
            let choice = if sigma_inverse { BraidChoice::Inverse } else { BraidChoice::Standard };
            hodge_report(format, choice, &a, &b, &g, q0)?;
        }
        Cmd::SphereHodge => sphere_report(format),
        Cmd::Laplacian { q, alpha, gamma, degree, charge } => {
            let q0 = parse_rational(&q).map_err(|e| anyhow!("--q: {}", e))?;
            let a = parse_rational(&alpha).map_err(|e| anyhow!("--alpha: {}", e))?;
            let g = parse_rational(&gamma).map_err(|e| anyhow!("--gamma: {}", e))?;
            if a.is_zero() || g.is_zero() {
                bail!("--alpha and --gamma must be nonzero");
            }
            if q0 <= Rat::zero() || q0 >= Rat::from_integer(1.into()) {
                bail!("--q must lie strictly between 0 and 1");
            }
            let cache = Cache::from_env();
            let key = format!(
                "laplacian|q={}|alpha={}|gamma={}|degree={}|charge={:?}|{}",
                q0, a, g, degree, charge, format as u8
            );
            if let Some(hit) = cache.get(&key) {
                out(&hit);
                return Ok(0);
            }
            let rendered = laplacian_report(format, q0, a, g, degree, charge)?;
            cache.put(&key, &rendered);
            out(&rendered);
        }
        Cmd::Verify { suite } => {
            return verify(format, &suite);
        }
        Cmd::Haar { expr } => {
            let x = parse_expr(&expr)?.into_algebra(0).map_err(|e| anyhow!("{}", e))?;
            let cache = Cache::from_env();
            let key = format!("haar|{}|{}", x, format as u8);
            if let Some(hit) = cache.get(&key) {
                out(&hit);
                return Ok(0);
            }
            let h = haar::<QRat>(&x);
            let rendered = render(format, h.to_string(), h.to_json());
            cache.put(&key, &rendered);
            out(&rendered);
        }
        Cmd::Grade { expr } => grade_report(format, parse_expr(&expr)?)?,
    }
    Ok(0)
}

fn render(format: Format, text: String, json: serde_json::Value) -> String {
    match format {
        Format::Text => text,
        Format::Json => serde_json::to_string_pretty(&json).unwrap(),
    }
}

fn parse_vector(spec: &str) -> Result<UEAElement<QRat>> {
    match spec {
        "Xm" => Ok(tangent(Tangent::Minus)),
        "Xp" => Ok(tangent(Tangent::Plus)),
        "Xz" => Ok(tangent(Tangent::Z)),
        other => match parse_expr(other)? {
            Value::Uea(h) => Ok(h),
            Value::Scalar(c) => Ok(UEAElement::unit().scale(&c)),
            v => bail!("--vector needs Xm, Xp, Xz, or an enveloping-algebra expression, got a {}", v.kind()),
        },
    }
}

// ---------------------------------------------------------------------------
// hodge

/// Substitute numeric-in-q parameter values; m stays symbolic.
fn pin_params(e: &ParamExpr, a: &QRat, b: &QRat, g: &QRat) -> ParamExpr {
    e.substitute(Param::Alpha, &ParamExpr::scalar(a.clone()))
        .substitute(Param::Beta, &ParamExpr::scalar(b.clone()))
        .substitute(Param::Gamma, &ParamExpr::scalar(g.clone()))
}

fn entry_is_real(e: &ParamExpr) -> bool {
    e.terms().all(|(m, _)| !m.i)
}

fn hodge_report(
    format: Format,
    choice: BraidChoice,
    a: &QRat,
    b: &QRat,
    g: &QRat,
    q0: Option<Rat>,
) -> Result<()> {
    let data: &HodgeData = hodge(choice);

    // T^2 on 1-forms with the parameters pinned, m dropped: symmetric
    // means scalar, and the comparison is exact over rational functions
    // of q.
    let probe = data.t_square_matrix(1).map(|e| pin_params(e, a, b, g).set_m_one());
    let scalar_of = |e: &ParamExpr| e.as_scalar().expect("pinned entries are scalars");
    let first = scalar_of(&probe[(0, 0)]);
    let mut symmetric = true;
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { first.clone() } else { QRat::zero() };
            if scalar_of(&probe[(i, j)]) != want {
                symmetric = false;
            }
        }
    }

    // Rational parameter values are real, so realness reduces to no
    // imaginary-unit terms surviving in the pinned table.
    let mut real = true;
    for k in 0..=3 {
        let tk = data.t_matrix(k);
        for i in 0..DIM[3 - k] {
            for j in 0..DIM[k] {
                if !entry_is_real(&pin_params(&tk[(i, j)], a, b, g)) {
                    real = false;
                }
            }
        }
    }

    let star_family = data.star_commutes_on_family();

    let mut tables_text = String::new();
    let mut tables_json = Vec::new();
    for k in 0..=3 {
        let tk = data.t_matrix(k);
        let out_names = basis_display(3 - k);
        let in_names = basis_display(k);
        tables_text.push_str(&format!("T on {}-forms (columns are inputs):\n", k));
        let mut rows_json = Vec::new();
        for i in 0..DIM[3 - k] {
            let mut row_json = Vec::new();
            let mut cells = Vec::new();
            for j in 0..DIM[k] {
                let e = pin_params(&tk[(i, j)], a, b, g);
                cells.push(format!("{} <- {}: {}", out_names[i], in_names[j], e));
                row_json.push(e.to_json());
            }
            tables_text.push_str(&format!("  {}\n", cells.join(" | ")));
            rows_json.push(serde_json::Value::Array(row_json));
        }
        tables_json.push(serde_json::Value::Array(rows_json));
    }

    let mut text = format!(
        "braiding: {}\nalpha = {}, beta = {}, gamma = {}\nsymmetric (T^2 scalar on 1-forms): {}\nreal (operator entries real): {}\nstar-compatible on the beta = q^6 alpha family: {}\n{}",
        match choice {
            BraidChoice::Standard => "standard",
            BraidChoice::Inverse => "inverse",
        },
        a,
        b,
        g,
        symmetric,
        real,
        star_family,
        tables_text
    );

    let mut json = serde_json::json!({
        "braiding": match choice { BraidChoice::Standard => "standard", BraidChoice::Inverse => "inverse" },
        "alpha": a.to_json(),
        "beta": b.to_json(),
        "gamma": g.to_json(),
        "symmetric": symmetric,
        "real": real,
        "star_compatible_family": star_family,
        "t": tables_json,
    });

    if let Some(q0) = q0 {
        let at = |v: &QRat| -> Result<Rat> {
            v.evaluate_q(&q0).map_err(|e| anyhow!("evaluating a parameter at q = {}: {}", q0, e))
        };
        let env = ParamEnv::real(q0.clone(), at(a)?, at(b)?, at(g)?);
        let m2 = data
            .solve_m_square(&env)
            .map_err(|e| anyhow!("normalising at q = {}: {}", q0, e))?;
        let mut env2 = env.clone();
        env2.m_square = Some(qhodge_core::scalar::GaussQ::from_rat(m2.clone()));
        let sym_at = data.is_symmetric_at(&env).map_err(|e| anyhow!("{}", e))?;
        let real_at = data.is_real_at(&env).map_err(|e| anyhow!("{}", e))?;
        // T^2 on functions is the metric sign once m^2 is pinned.
        let t2_fun = data
            .t_square_matrix(0)
            .map(|e| pin_params(e, a, b, g))[(0, 0)]
            .eval_numeric(&env2)
            .map_err(|e| anyhow!("{}", e))?;
        anyhow::ensure!(t2_fun.im.is_zero(), "T^2 on functions must be real");
        let t2_one = data
            .t_square_matrix(1)
            .map(|e| pin_params(e, a, b, g))[(0, 0)]
            .eval_numeric(&env2)
            .map_err(|e| anyhow!("{}", e))?;
        text.push_str(&format!(
            "at q = {}:\n  m^2 = {}\n  T^2 on functions = {}\n  T^2 on 1-forms (first diagonal entry) = {}\n  symmetric: {}\n  real: {}\n",
            q0,
            m2,
            t2_fun.re,
            fmt_gauss(&t2_one),
            sym_at,
            real_at
        ));
        json["at_q"] = serde_json::json!({
            "q": q0.to_string(),
            "m_square": m2.to_string(),
            "t_square_functions": t2_fun.re.to_string(),
            "t_square_one_forms": fmt_gauss(&t2_one),
            "symmetric": sym_at,
            "real": real_at,
        });
    }

    emit(format, text.trim_end().to_string(), json);
    Ok(())
}

fn fmt_gauss(v: &qhodge_core::scalar::GaussQ) -> String {
    if v.im.is_zero() {
        format!("{}", v.re)
    } else if v.re.is_zero() {
        format!("{}*i", v.im)
    } else {
        format!("{} + {}*i", v.re, v.im)
    }
}

// ---------------------------------------------------------------------------
// sphere-hodge

fn sphere_report(format: Format) {
    let s = sphere_hodge();
    let names = ["1 -> w-^w+", "w- -> w-", "w+ -> w+", "w-^w+ -> 1"];
    let mut text = String::from("restricted Hodge operator on the standard Podles sphere\n");
    let mut comp_json = serde_json::Map::new();
    for (idx, label) in names.iter().enumerate() {
        let c = s.component(idx);
        text.push_str(&format!("  T: {} scaled by {}\n", label, c));
        comp_json.insert(label.to_string(), c.to_json());
    }
    text.push_str(&format!("  normalisation: mc^2 = {}\n", s.mc_square()));
    let sq = s.square_scalars();
    text.push_str("  T^2 scalars by degree (0, w-, w+, 2):\n");
    let mut sq_json = Vec::new();
    for e in &sq {
        text.push_str(&format!("    {}\n", e));
        sq_json.push(e.to_json());
    }
    let adj = s.adjudicate();
    let verdict = match adj.verdict {
        Verdict::PrintedConsistent => "printed closed form matches the engine",
        Verdict::AlternativeConsistent => "alternative closed form matches the engine",
        Verdict::NeitherConsistent => "neither closed form matches the engine value",
    };
    text.push_str(&format!(
        "  2-form component adjudication:\n    printed candidate:     {}\n    alternative candidate: {}\n    engine value:          {}\n    verdict: {}",
        adj.printed, adj.alternative, adj.engine, verdict
    ));
    let json = serde_json::json!({
        "components": comp_json,
        "mc_square": s.mc_square().to_json(),
        "t_square_scalars": sq_json,
        "adjudication": {
            "printed": adj.printed.to_json(),
            "alternative": adj.alternative.to_json(),
            "engine": adj.engine.to_json(),
            "verdict": format!("{:?}", adj.verdict),
        },
    });
    emit(format, text, json);
}

// ---------------------------------------------------------------------------
// laplacian

fn laplacian_report(
    format: Format,
    q0: Rat,
    alpha: Rat,
    gamma: Rat,
    degree: u32,
    charge: Option<i64>,
) -> Result<String> {
    let params = LaplaceParams::new(alpha.clone(), gamma.clone(), q0.clone());
    let fm = box_matrix(&params, degree, charge)?;
    let spec = fm.spectrum()?;
    let n = fm.basis.len();

    let basis_text: Vec<String> = fm.basis.iter().map(|m| m.to_string()).collect();
    let mut matrix_rows = Vec::new();
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| fm.matrix[(i, j)].to_string()).collect();
        matrix_rows.push(row);
    }

    let (eig_text, eig_json) = match &spec {
        Spectrum::Exact(roots) => {
            let mut lines = Vec::new();
            let mut arr = Vec::new();
            for r in roots {
                let shown = if r.lo == r.hi {
                    format!("{}", r.lo)
                } else {
                    format!("[{}, {}] ~ {:.6}", r.lo, r.hi, r.midpoint_f64())
                };
                lines.push(format!("  {} (multiplicity {})", shown, r.multiplicity));
                arr.push(serde_json::json!({
                    "lo": r.lo.to_string(),
                    "hi": r.hi.to_string(),
                    "approx": r.midpoint_f64(),
                    "multiplicity": r.multiplicity,
                }));
            }
            (
                format!("eigenvalues (exact):\n{}", lines.join("\n")),
                serde_json::json!({ "kind": "exact", "roots": arr }),
            )
        }
        Spectrum::Float { eigenvalues, residual, max_imaginary } => {
            let lines: Vec<String> = eigenvalues.iter().map(|v| format!("  {:.12}", v)).collect();
            (
                format!(
                    "eigenvalues (floating point; residual {:.3e}, max imaginary {:.3e}):\n{}",
                    residual,
                    max_imaginary,
                    lines.join("\n")
                ),
                serde_json::json!({
                    "kind": "float",
                    "values": eigenvalues,
                    "residual": residual,
                    "max_imaginary": max_imaginary,
                }),
            )
        }
    };

    let charge_text =
        charge.map_or_else(|| "all".to_string(), |c| c.to_string());
    let mut text = format!(
        "q = {}, alpha = {}, gamma = {}, degree <= {}, charge: {}\nbasis ({}):\n",
        q0, alpha, gamma, degree, charge_text, n
    );
    for b in &basis_text {
        text.push_str(&format!("  {}\n", b));
    }
    text.push_str("matrix (rows are outputs):\n");
    for row in &matrix_rows {
        text.push_str(&format!("  [{}]\n", row.join(", ")));
    }
    text.push_str(&eig_text);

    let json = serde_json::json!({
        "q": q0.to_string(),
        "alpha": alpha.to_string(),
        "gamma": gamma.to_string(),
        "degree": degree,
        "charge": charge,
        "basis": basis_text,
        "matrix": matrix_rows,
        "eigenvalues": eig_json,
    });

    Ok(render(format, text.trim_end().to_string(), json))
}

// ---------------------------------------------------------------------------
// verify

fn verify(format: Format, suite: &str) -> Result<i32> {
    let reports = if suite == "all" {
        // Independent suites; run them in parallel, print in name order.
        let handles: Vec<_> = checks::SUITE_NAMES
            .iter()
            .map(|&name| std::thread::spawn(move || checks::run_suite(name).unwrap()))
            .collect();
        handles.into_iter().map(|h| h.join().expect("suite thread")).collect()
    } else {
        match checks::run_suite(suite) {
            Some(r) => vec![r],
            None => bail!(
                "unknown suite '{}': expected one of {} or all",
                suite,
                checks::SUITE_NAMES.join(", ")
            ),
        }
    };

    let all_passed = reports.iter().all(|r| r.passed());

    match format {
        Format::Text => {
            let mut text = String::new();
            for r in &reports {
                text.push_str(&format!(
                    "suite {}: {}\n",
                    r.suite,
                    if r.passed() { "PASS" } else { "FAIL" }
                ));
                for c in &r.checks {
                    text.push_str(&format!(
                        "  [{}] {}: {}\n",
                        if c.passed { "PASS" } else { "FAIL" },
                        c.name,
                        c.detail
                    ));
                }
                for f in &r.findings {
                    text.push_str(&format!("  finding: {}\n", f));
                }
            }
            let checks_run: usize = reports.iter().map(|r| r.checks.len()).sum();
            text.push_str(&format!(
                "overall: {} ({} suite{}, {} checks)",
                if all_passed { "PASS" } else { "FAIL" },
                reports.len(),
                if reports.len() == 1 { "" } else { "s" },
                checks_run
            ));
            out(&text);
        }
        Format::Json => {
            let suites: Vec<_> = reports
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "suite": r.suite,
                        "passed": r.passed(),
                        "checks": r.checks.iter().map(|c| serde_json::json!({
                            "name": c.name,
                            "passed": c.passed,
                            "detail": c.detail,
                        })).collect::<Vec<_>>(),
                        "findings": r.findings,
                    })
                })
                .collect();
            out(&serde_json::to_string_pretty(&serde_json::json!({
                "suites": suites,
                "passed": all_passed,
            }))
            .unwrap());
        }
    }
    Ok(if all_passed { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// grade

fn grade_report(format: Format, v: Value) -> Result<()> {
    match v {
        Value::Scalar(c) => {
            emit(
                format,
                format!("degree: 0\ncharge 0: {}", c),
                serde_json::json!({ "degree": 0, "charges": { "0": c.to_json() } }),
            );
        }
        Value::Algebra(x) => {
            let mut text = format!("PBW degree: {}\n", x.max_degree());
            let mut charges = serde_json::Map::new();
            for (n, part) in x.charge_components() {
                text.push_str(&format!("charge {}: {}\n", n, part));
                charges.insert(n.to_string(), part.to_json());
            }
            if let Some(n) = x.homogeneous_charge() {
                text.push_str(&format!("homogeneous of charge {}\n", n));
            }
            emit(
                format,
                text.trim_end().to_string(),
                serde_json::json!({
                    "degree": x.max_degree(),
                    "homogeneous_charge": x.homogeneous_charge(),
                    "charges": charges,
                }),
            );
        }
        Value::Form(f) => {
            // Total charge of x * frame is the coefficient charge plus
            // the frame charge; collect components as forms.
            let d = f.degree();
            let mut by_charge: std::collections::BTreeMap<i64, KForm<QRat>> =
                std::collections::BTreeMap::new();
            for i in 0..DIM[d] {
                for (n, part) in f.coeff(i).charge_components() {
                    let total = n + frame_charges(d)[i];
                    let slot = by_charge.entry(total).or_insert_with(|| KForm::zero(d));
                    let mut merged = slot.coeff(i).clone();
                    merged = merged.add(&part);
                    slot.set_coeff(i, merged);
                }
            }
            let mut text = format!("form degree: {}\n", d);
            let mut charges = serde_json::Map::new();
            for (n, part) in &by_charge {
                text.push_str(&format!("charge {}: {}\n", n, part));
                charges.insert(n.to_string(), part.to_json());
            }
            if f.is_zero() {
                text.push_str("zero form\n");
            }
            emit(
                format,
                text.trim_end().to_string(),
                serde_json::json!({ "degree": d, "charges": charges }),
            );
        }
        other => bail!("grade applies to algebra elements and forms, not a {}", other.kind()),
    }
    Ok(())
}
