use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;

use cone_exit::laplace::{
    factorize, laplace_of_law, phi, phi_tilde, pq_coefficients, pq_polynomial, spectral_scales,
    LawVariant,
};
use cone_exit::levy::{
    asymptotic_check, asymptotic_limit, laplace_exponent_integral, laplace_exponent_series,
    levy_density, thorin_exponent, thorin_exponent_closed_form,
};
use cone_exit::mc::{
    draw_samples, estimate_gauss_laplace, estimate_law_laplace, sample_exit_m1, sample_exit_m2,
    simulate_exit_times, ExitMethod, MCEstimate, PathConfig, MIN_LAW_SAMPLES,
};
use cone_exit::Error;
use serde_json::{Map, Value};

use crate::args::{Command, Method, Order, Variant};
use crate::table::{num_json, Cell, Report};

/// Largest |z-score| accepted by the statistical checks.
pub const Z_LIMIT: f64 = 4.0;

/// x grid for the closed-form residual of `factor`.
const FACTOR_GRID: [f64; 6] = [0.0, 0.5, 1.0, 2.0, 5.0, 10.0];

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Lib(Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Lib(e) => match e {
                Error::Domain(_) | Error::DegreeCap { .. } => 2,
                Error::NotACompletelyMonotoneQuadratic { .. } => 2,
                Error::NonConvergence(_)
                | Error::ToleranceNotReached { .. }
                | Error::NonDecayingIntegrand { .. } => 3,
                Error::MaxStepsExceeded { .. } | Error::OriginTooClose { .. } => 4,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

/// `m = π / (2c)`.
pub fn m_from_c(c: f64) -> CliResult<f64> {
    if !(c > 0.0 && c.is_finite()) {
        return usage(format!("--c must be finite and > 0, got {c}"));
    }
    Ok(FRAC_PI_2 / c)
}

/// `(m, c)` with `m = π / (2c)`, from whichever flag was given.
fn order_real(o: &Order) -> CliResult<(f64, f64)> {
    match (o.m, o.c) {
        (Some(m), None) => {
            if !(m > 0.0 && m.is_finite()) {
                return usage(format!("--m must be finite and > 0, got {m}"));
            }
            Ok((m, FRAC_PI_2 / m))
        }
        (None, Some(c)) => Ok((m_from_c(c)?, c)),
        _ => usage("exactly one of --m or --c is required"),
    }
}

/// Integer `m`; a `--c` value must give `π / (2c)` within 1e-6 of an integer.
fn order_int(o: &Order) -> CliResult<u32> {
    let (m, _) = order_real(o)?;
    let r = m.round();
    let slack = if o.c.is_some() {
        1e-6 * r.max(1.0)
    } else {
        0.0
    };
    if (m - r).abs() > slack || r < 1.0 || r > u32::MAX as f64 {
        return usage(format!("this command needs a positive integer m, got {m}"));
    }
    Ok(r as u32)
}

fn config(command: &str) -> Map<String, Value> {
    let mut map = Map::new();
    map.insert("command".into(), command.into());
    map
}

fn put_f(map: &mut Map<String, Value>, key: &str, v: f64) {
    map.insert(key.into(), num_json(v));
}

fn put_list(map: &mut Map<String, Value>, key: &str, v: &[f64]) {
    map.insert(
        key.into(),
        Value::Array(v.iter().map(|&x| num_json(x)).collect()),
    );
}

fn require_paths(n: usize) -> CliResult<()> {
    if n < MIN_LAW_SAMPLES {
        return usage(format!("--n must be at least {MIN_LAW_SAMPLES}, got {n}"));
    }
    Ok(())
}

pub fn run(cmd: &Command) -> CliResult<Report> {
    match cmd {
        Command::Eval { order, x } => cmd_eval(order, x),
        Command::Factor { order, tol } => cmd_factor(order, *tol),
        Command::Levy {
            order,
            z,
            variant,
            x,
            tol,
        } => cmd_levy(order, z, *variant, x, *tol),
        Command::Thorin { x, tol } => cmd_thorin(x, *tol),
        Command::Asym { order, x, eps } => cmd_asym(order, x, eps),
        Command::McVerify { order, x, n, seed } => cmd_mc_verify(order, x, *n, *seed),
        Command::Sim {
            order,
            x,
            n,
            seed,
            step,
            method,
            allowance,
            max_steps,
            min_radius,
        } => {
            let opts = SimOptions {
                n: *n,
                seed: *seed,
                step: *step,
                method: *method,
                allowance: *allowance,
                max_steps: *max_steps,
                min_radius: *min_radius,
            };
            cmd_sim(order, x, &opts)
        }
    }
}

pub fn cmd_eval(order: &Order, xs: &[f64]) -> CliResult<Report> {
    let (m, c) = order_real(order)?;
    let mut cfg = config("eval");
    put_f(&mut cfg, "m", m);
    put_f(&mut cfg, "c", c);
    put_list(&mut cfg, "x", xs);
    let mut report = Report::new(cfg, vec!["x", "phi", "phi_tilde"]);
    for &x in xs {
        report.push(vec![x.into(), phi(m, x)?.into(), phi_tilde(m, x)?.into()]);
    }
    Ok(report)
}

pub fn cmd_factor(order: &Order, tol: f64) -> CliResult<Report> {
    let m = order_int(order)?;
    let coeffs = pq_coefficients(m)?;
    let mut cfg = config("factor");
    cfg.insert("m".into(), m.into());
    put_f(&mut cfg, "tol", tol);
    let mut report = Report::new(cfg, vec!["quantity", "index", "value"]);

    for (k, c) in coeffs.iter().enumerate() {
        report.push(vec![
            "coefficient".into(),
            k.into(),
            Cell::Digits(c.to_string()),
        ]);
    }
    let scales = spectral_scales(m);
    for (k, s) in scales.iter().enumerate() {
        report.push(vec!["scale".into(), (k + 1).into(), (*s).into()]);
    }

    let k = factorize(m, LawVariant::K)?;
    let kt = factorize(m, LawVariant::KTilde)?;
    report.push(vec![
        "k_half_gaussian".into(),
        0usize.into(),
        k.has_half_gaussian().into(),
    ]);
    for (i, s) in k.exp_scales().iter().enumerate() {
        report.push(vec!["k_scale".into(), (i + 1).into(), (*s).into()]);
    }
    report.push(vec![
        "k_tilde_half_gaussian".into(),
        0usize.into(),
        kt.has_half_gaussian().into(),
    ]);
    for (i, s) in kt.exp_scales().iter().enumerate() {
        report.push(vec!["k_tilde_scale".into(), (i + 1).into(), (*s).into()]);
    }

    // Roots of P_n / Q_n against −1 / scale, both in increasing order.
    let mut roots = pq_polynomial(m)?.real_roots(tol)?;
    roots.sort_by(f64::total_cmp);
    let mut expected: Vec<f64> = scales.iter().map(|s| -s.recip()).collect();
    expected.sort_by(f64::total_cmp);
    report.reject_unless(roots.len() == expected.len());
    let mut max_root_err = 0.0f64;
    for (i, (r, e)) in roots.iter().zip(&expected).enumerate() {
        let err = (r - e).abs();
        max_root_err = max_root_err.max(err);
        report.push(vec!["root".into(), (i + 1).into(), (*r).into()]);
        report.push(vec!["root_residual".into(), (i + 1).into(), err.into()]);
    }

    let mut max_cf = 0.0f64;
    for &x in &FACTOR_GRID {
        let rk = (laplace_of_law(&k, x)? / phi(m as f64, x)? - 1.0).abs();
        let rkt = (laplace_of_law(&kt, x)? / phi_tilde(m as f64, x)? - 1.0).abs();
        max_cf = max_cf.max(rk).max(rkt);
    }
    report.push(vec![
        "closed_form_residual".into(),
        0usize.into(),
        max_cf.into(),
    ]);
    report.reject_unless(max_cf <= 1e-10);
    report.summarize("max_root_residual", max_root_err);
    report.summarize("max_closed_form_residual", max_cf);
    Ok(report)
}

fn law_variant(v: Variant) -> LawVariant {
    match v {
        Variant::K => LawVariant::K,
        Variant::KTilde => LawVariant::KTilde,
    }
}

pub fn cmd_levy(
    order: &Order,
    zs: &[f64],
    variant: Variant,
    xs: &[f64],
    tol: f64,
) -> CliResult<Report> {
    let m = order_int(order)?;
    let law = factorize(m, law_variant(variant))?;
    let mut cfg = config("levy");
    cfg.insert("m".into(), m.into());
    cfg.insert(
        "variant".into(),
        match variant {
            Variant::K => "k",
            Variant::KTilde => "k-tilde",
        }
        .into(),
    );
    put_list(&mut cfg, "z", zs);
    put_list(&mut cfg, "x", xs);
    put_f(&mut cfg, "tol", tol);
    let mut report = Report::new(cfg, vec!["z", "density"]);
    for &z in zs {
        report.push(vec![z.into(), levy_density(&law, z)?.into()]);
    }
    let mut max_res = 0.0f64;
    for &x in xs {
        let integral = laplace_exponent_integral(&law, x, tol)?.value;
        max_res = max_res.max((integral - laplace_exponent_series(&law, x)?).abs());
    }
    report.summarize("max_frullani_residual", max_res);
    Ok(report)
}

pub fn cmd_thorin(xs: &[f64], tol: f64) -> CliResult<Report> {
    let mut cfg = config("thorin");
    put_list(&mut cfg, "x", xs);
    put_f(&mut cfg, "tol", tol);
    let mut report = Report::new(cfg, vec!["x", "thorin_exponent", "closed_form", "residual"]);
    let mut max_res = 0.0f64;
    for &x in xs {
        let value = thorin_exponent(x, tol)?;
        let exact = thorin_exponent_closed_form(x)?;
        let res = (value - exact).abs();
        max_res = max_res.max(res);
        report.push(vec![x.into(), value.into(), exact.into(), res.into()]);
    }
    report.reject_unless(max_res <= tol);
    report.summarize("max_residual", max_res);
    Ok(report)
}

pub fn cmd_asym(order: &Order, xs: &[f64], eps: &[f64]) -> CliResult<Report> {
    let (m, c) = order_real(order)?;
    let mut cfg = config("asym");
    put_f(&mut cfg, "m", m);
    put_f(&mut cfg, "c", c);
    put_list(&mut cfg, "x", xs);
    put_list(&mut cfg, "eps", eps);
    let mut report = Report::new(
        cfg,
        vec![
            "eps",
            "x",
            "check",
            "limit",
            "residual",
            "residual_over_eps",
        ],
    );
    let mut worst = 0.0f64;
    for &e in eps {
        for &x in xs {
            let check = asymptotic_check(x, c, e)?;
            let limit = asymptotic_limit(x, c)?;
            let res = check - limit;
            worst = worst.max(res.abs() / e);
            report.push(vec![
                e.into(),
                x.into(),
                check.into(),
                limit.into(),
                res.into(),
                (res / e).into(),
            ]);
        }
    }
    report.summarize("max_abs_residual_over_eps", worst);
    Ok(report)
}

const MC_COLUMNS: [&str; 7] = [
    "check",
    "x",
    "closed_form",
    "mean",
    "stderr",
    "z_score",
    "pass",
];

pub fn cmd_mc_verify(order: &Order, xs: &[f64], n: usize, seed: u64) -> CliResult<Report> {
    let m = order_int(order)?;
    require_paths(n)?;
    let mut cfg = config("mc-verify");
    cfg.insert("m".into(), m.into());
    put_list(&mut cfg, "x", xs);
    cfg.insert("n".into(), n.into());
    cfg.insert("seed".into(), seed.into());
    let mut report = Report::new(cfg, MC_COLUMNS.to_vec());
    let mut worst = 0.0f64;

    let mut record = |report: &mut Report, name: &str, x: f64, exact: f64, e: MCEstimate| {
        let z = e.z_score(exact);
        let pass = z.abs() <= Z_LIMIT;
        worst = worst.max(z.abs());
        report.reject_unless(pass);
        report.push(vec![
            name.into(),
            x.into(),
            exact.into(),
            e.mean.into(),
            e.stderr.into(),
            z.into(),
            pass.into(),
        ]);
    };

    let law = factorize(m, LawVariant::KTilde)?;
    for &x in xs {
        let exact = phi_tilde(m as f64, x)?;
        let e = estimate_law_laplace(&law, x, n, seed)?;
        record(&mut report, "law_k_tilde", x, exact, e);
    }

    let exact_samples = match m {
        1 => Some(("exact_m1", FRAC_PI_2, draw_samples(n, seed, sample_exit_m1))),
        2 => Some(("exact_m2", FRAC_PI_4, draw_samples(n, seed, sample_exit_m2))),
        _ => None,
    };
    if let Some((name, c, samples)) = exact_samples {
        for &x in xs {
            let exact = phi_tilde(m as f64, x)?;
            let e = estimate_gauss_laplace(&samples, c, x)?;
            record(&mut report, name, x, exact, e);
        }
    }
    report.summarize("max_abs_z_score", worst);
    Ok(report)
}

pub struct SimOptions {
    pub n: usize,
    pub seed: u64,
    pub step: f64,
    pub method: Method,
    pub allowance: f64,
    pub max_steps: Option<u64>,
    pub min_radius: Option<f64>,
}

/// z-score after the absolute allowance is taken off the deviation.
fn adjusted_z(e: &MCEstimate, exact: f64, allowance: f64) -> f64 {
    let d = e.mean - exact;
    let excess = (d.abs() - allowance).max(0.0);
    if excess == 0.0 {
        0.0
    } else if e.stderr == 0.0 {
        d.signum() * f64::INFINITY
    } else {
        d.signum() * excess / e.stderr
    }
}

pub fn cmd_sim(order: &Order, xs: &[f64], opts: &SimOptions) -> CliResult<Report> {
    let (m, c) = order_real(order)?;
    require_paths(opts.n)?;
    if !(c <= PI) {
        return usage(format!("cone half-angle must be at most π, got {c}"));
    }
    if !(opts.allowance >= 0.0) {
        return usage(format!("--allowance must be >= 0, got {}", opts.allowance));
    }
    let mut path = PathConfig::new(c, opts.step)?;
    if let Some(s) = opts.max_steps {
        path = path.with_max_steps(s)?;
    }
    if let Some(r) = opts.min_radius {
        path = path.with_min_radius(r)?;
    }
    let methods: &[ExitMethod] = match opts.method {
        Method::Skew => &[ExitMethod::Skew],
        Method::Planar => &[ExitMethod::Planar],
        Method::Both => &[ExitMethod::Skew, ExitMethod::Planar],
    };

    let mut cfg = config("sim");
    put_f(&mut cfg, "m", m);
    put_f(&mut cfg, "c", c);
    put_list(&mut cfg, "x", xs);
    cfg.insert("n".into(), opts.n.into());
    cfg.insert("seed".into(), opts.seed.into());
    put_f(&mut cfg, "step", path.step);
    cfg.insert("max_steps".into(), path.max_steps.into());
    put_f(&mut cfg, "min_radius", path.min_radius);
    cfg.insert(
        "methods".into(),
        Value::Array(methods.iter().map(|m| m.name().into()).collect()),
    );
    put_f(&mut cfg, "allowance", opts.allowance);

    let mut report = Report::new(
        cfg,
        vec![
            "method",
            "x",
            "closed_form",
            "mean",
            "stderr",
            "z_score",
            "adjusted_z",
            "pass",
        ],
    );
    let mut worst = 0.0f64;
    for &method in methods {
        let samples = simulate_exit_times(&path, method, opts.n, opts.seed)?;
        for &x in xs {
            let exact = phi_tilde(m, x)?;
            let e = estimate_gauss_laplace(&samples, c, x)?;
            let adj = adjusted_z(&e, exact, opts.allowance);
            let pass = adj.abs() <= Z_LIMIT;
            worst = worst.max(adj.abs());
            report.reject_unless(pass);
            report.push(vec![
                method.name().into(),
                x.into(),
                exact.into(),
                e.mean.into(),
                e.stderr.into(),
                e.z_score(exact).into(),
                adj.into(),
                pass.into(),
            ]);
        }
    }
    report.summarize("max_abs_adjusted_z", worst);
    Ok(report)
}
