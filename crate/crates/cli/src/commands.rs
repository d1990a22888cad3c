use std::path::Path;

use fischer_core::apolar::{inner_product, ln_norm, norm, norm_sq};
use fischer_core::entire::{
    blambda_norm, check_lambda_condition, check_main_condition, decompose_entire, order_estimate, reconstruction_errors,
    AnyStream, LambdaSeq, TaylorStream,
};
use fischer_core::fischer::{
    decompose_direct, decompose_homogeneous, decompose_linear, decompose_series, decompose_univariate, DecompositionResult,
};
use fischer_core::json::AnyPoly;
use fischer_core::spectral::{classify_quadratic_2d, kernel_basis, ks_exponent_fit, sigma_sweep};
use fischer_core::sphere::SphereSampler;
use fischer_core::{MultiIndex, Poly, C64};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::input::{self, Backend, Polys, Scalar};
use crate::report::{self, JsonScalar};
use crate::{
    BlambdaArgs, ClassifyArgs, Cli, DecomposeArgs, InnerArgs, KernelArgs, KsFitArgs, MethodArg, OrderArgs, SpectrumArgs, Verb,
};

pub fn run(cli: &Cli) -> CliResult<()> {
    let out = cli.out.as_deref();
    match &cli.verb {
        Verb::Inner(a) => report::emit(out, "inner", inner(a)?),
        Verb::Decompose(a) => decompose(a, out),
        Verb::Spectrum(a) => report::emit(out, "spectrum", spectrum(a)?),
        Verb::KsFit(a) => report::emit(out, "ks-fit", ks_fit(a)?),
        Verb::Kernel(a) => report::emit(out, "kernel", kernel(a)?),
        Verb::Classify2x2(a) => report::emit(out, "classify2x2", classify(a)?),
        Verb::Order(a) => report::emit(out, "order", order(a)?),
        Verb::Blambda(a) => report::emit(out, "blambda", blambda(a)?),
        Verb::Verify(a) => crate::verify::run(a, out),
    }
}

fn backend_name(exact: bool) -> &'static str {
    if exact {
        "exact"
    } else {
        "float"
    }
}

fn inner(a: &InnerArgs) -> CliResult<Value> {
    let polys = [input::load_poly(&a.p)?, input::load_poly(&a.q)?];
    fn payload<F: JsonScalar>(p: &Poly<F>, q: &Poly<F>) -> CliResult<Value> {
        Ok(json!({
            "backend": backend_name(F::EXACT),
            "inner": inner_product(p, q)?.scalar_json(),
            "norm_sq_p": F::real_json(&norm_sq(p)),
            "norm_sq_q": F::real_json(&norm_sq(q)),
            "norm_p": norm(p),
            "norm_q": norm(q),
            "ln_norm_p": ln_norm(p),
            "ln_norm_q": ln_norm(q),
        }))
    }
    match input::resolve(a.backend, &polys)? {
        Polys::Exact(v) => payload(&v[0], &v[1]),
        Polys::Float(v) => payload(&v[0], &v[1]),
    }
}

fn write_poly_file(dir: &Path, name: &str, poly: Value) -> CliResult<()> {
    let mut text = serde_json::to_string(&poly).expect("plain data");
    text.push('\n');
    report::write_atomic(&dir.join(name), &text)
}

/// Writes `q.json`, `r.json` and `diagnostics.json` when an output directory
/// is given, otherwise emits the whole payload as one report.
fn emit_decomposition(a: &DecomposeArgs, out: Option<&Path>, payload: Value) -> CliResult<()> {
    match &a.out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
            write_poly_file(dir, "q.json", payload["q"].clone())?;
            write_poly_file(dir, "r.json", payload["r"].clone())?;
            let mut diagnostics = payload;
            if let Some(map) = diagnostics.as_object_mut() {
                map.remove("q");
                map.remove("r");
            }
            report::write_atomic(&dir.join("diagnostics.json"), &report::envelope("decompose", diagnostics.clone()))?;
            match out {
                Some(path) => report::emit(Some(path), "decompose", diagnostics),
                None => Ok(()),
            }
        }
        None => report::emit(out, "decompose", payload),
    }
}

fn decompose(a: &DecomposeArgs, out: Option<&Path>) -> CliResult<()> {
    let p = input::load_poly(&a.p)?;
    let f_text = input::read(&a.f)?;
    if input::is_stream(&f_text) {
        let m_cap = a
            .m_cap
            .ok_or_else(|| CliError::Precondition("a Taylor stream input needs --m-cap".into()))?;
        let stream = input::load_stream(&a.f, m_cap)?;
        let payload = match (a.backend, &p, stream) {
            (Backend::Float, _, s) | (_, AnyPoly::Float(_), s) => entire_payload(&p.to_float(), &s.to_float(), a, m_cap)?,
            (_, AnyPoly::Exact(pe), AnyStream::Exact(s)) => entire_payload(pe, &s, a, m_cap)?,
            (Backend::Exact, _, AnyStream::Float(_)) => {
                return Err(CliError::Precondition("the stream has floating-point components; use --backend float".into()))
            }
            (_, _, AnyStream::Float(s)) => entire_payload(&p.to_float(), &s, a, m_cap)?,
        };
        return emit_decomposition(a, out, payload);
    }
    let f = input::load_poly(&a.f)?;
    let (payload, agrees) = match input::resolve(a.backend, &[p, f])? {
        Polys::Exact(v) => poly_payload(&v[0], &v[1], a)?,
        Polys::Float(v) => poly_payload(&v[0], &v[1], a)?,
    };
    emit_decomposition(a, out, payload)?;
    if agrees == Some(false) {
        return Err(CliError::Numerical("series and selected method disagree".into()));
    }
    Ok(())
}

fn select_method<F: JsonScalar>(p: &Poly<F>, requested: MethodArg) -> CliResult<MethodArg> {
    let k = p.degree().finite().ok_or_else(|| CliError::Precondition("P must be a nonzero polynomial".into()))?;
    Ok(match requested {
        MethodArg::Auto if p.dim() == 1 => MethodArg::Univariate,
        MethodArg::Auto if k == 1 => MethodArg::Linear,
        MethodArg::Auto if p.is_homogeneous() => MethodArg::Homogeneous,
        MethodArg::Auto => MethodArg::Direct,
        m => m,
    })
}

fn run_method<F: JsonScalar>(p: &Poly<F>, f: &Poly<F>, method: MethodArg, beta: Option<usize>) -> CliResult<DecompositionResult<F>> {
    Ok(match method {
        MethodArg::Univariate => decompose_univariate(p, f)?,
        MethodArg::Linear => {
            if p.degree().finite() != Some(1) {
                return Err(CliError::Precondition("the linear method needs deg P = 1".into()));
            }
            let p0 = -p.coeff(&MultiIndex::zero(p.dim()));
            decompose_linear(&p.homogeneous_component(1), &p0, f)?
        }
        MethodArg::Homogeneous => decompose_homogeneous(p, f)?,
        MethodArg::Series => decompose_series(p, f, beta)?,
        MethodArg::Direct | MethodArg::Auto => decompose_direct(p, f)?,
    })
}

fn poly_payload<F: JsonScalar>(p: &Poly<F>, f: &Poly<F>, a: &DecomposeArgs) -> CliResult<(Value, Option<bool>)> {
    let method = select_method(p, a.method)?;
    let res = run_method(p, f, method, a.beta)?;
    let mut payload = json!({
        "backend": backend_name(F::EXACT),
        "method": res.method,
        "q": F::poly_json(&res.q),
        "r": F::poly_json(&res.r),
        "annihilator_residual": res.annihilator_residual(),
        "reconstruction_residual": norm(&res.reconstruction_error(p, f)),
        "diagnostics": res.diagnostics,
    });
    let mut agrees = None;
    if a.series_check {
        let s = decompose_series(p, f, a.beta)?;
        let diff = (&s.q - &res.q).max_abs_coeff().max((&s.r - &res.r).max_abs_coeff());
        let ok = if F::EXACT { s.q == res.q && s.r == res.r } else { diff <= 1e-8 * f.max_abs_coeff().max(1.0) };
        payload["series_check"] = json!({"agrees": ok, "max_difference": diff, "iterations": s.diagnostics.iterations});
        agrees = Some(ok);
    }
    Ok((payload, agrees))
}

fn entire_payload<F: JsonScalar>(p: &Poly<F>, f: &TaylorStream<F>, a: &DecomposeArgs, m_cap: usize) -> CliResult<Value> {
    let dec = decompose_entire(p, f, m_cap, a.tol, a.beta)?;
    let pk = p.homogeneous_component(dec.k);
    let truncated: Vec<usize> = dec.r_truncated.iter().enumerate().filter(|(_, &t)| t).map(|(m, _)| m).collect();
    Ok(json!({
        "backend": backend_name(F::EXACT),
        "method": "entire_truncated",
        "m_cap": m_cap,
        "k": dec.k,
        "q": F::poly_json(&dec.q.truncated()),
        "r": F::poly_json(&dec.r.truncated()),
        "r_truncated_degrees": truncated,
        "reconstruction_errors": reconstruction_errors(p, f, &dec)?,
        "annihilator_residuals": dec.annihilator_residuals(&pk)?,
        "per_degree": dec.per_degree,
    }))
}

fn degree_range(m_min: usize, m_max: usize) -> CliResult<Vec<usize>> {
    if m_min > m_max {
        return Err(CliError::Precondition(format!("empty degree range {m_min}..={m_max}")));
    }
    Ok((m_min..=m_max).collect())
}

fn write_csv(path: Option<&Path>, csv: &str) -> CliResult<()> {
    path.map_or(Ok(()), |p| report::write_atomic(p, csv))
}

fn spectrum(a: &SpectrumArgs) -> CliResult<Value> {
    let degrees = degree_range(a.m_min, a.m_max)?;
    let p = input::load_poly(&a.p)?;
    let rows = match &p {
        AnyPoly::Exact(p) => sigma_sweep(p, &degrees)?,
        AnyPoly::Float(p) => sigma_sweep(p, &degrees)?,
    };
    write_csv(a.csv.as_deref(), &report::sweep_csv(&rows))?;
    Ok(json!({
        "degrees": degrees,
        "sigma_min": rows.iter().map(|r| r.1).collect::<Vec<_>>(),
        "sigma_max": rows.iter().map(|r| r.2).collect::<Vec<_>>(),
        "norm_p": norm(&p.to_float()),
    }))
}

fn ks_fit(a: &KsFitArgs) -> CliResult<Value> {
    let rep = match input::load_poly(&a.p)? {
        AnyPoly::Exact(p) => ks_exponent_fit(&p, (a.m_min, a.m_max))?,
        AnyPoly::Float(p) => ks_exponent_fit(&p, (a.m_min, a.m_max))?,
    };
    write_csv(a.csv.as_deref(), &rep.to_csv())?;
    Ok(serde_json::to_value(&rep).expect("plain data"))
}

fn kernel(a: &KernelArgs) -> CliResult<Value> {
    fn payload<F: JsonScalar>(p: &Poly<F>, m: usize) -> CliResult<Value> {
        let basis = kernel_basis(p, m)?;
        Ok(json!({
            "backend": backend_name(F::EXACT),
            "m": m,
            "dimension": basis.len(),
            "basis": basis.iter().map(F::poly_json).collect::<Vec<_>>(),
        }))
    }
    match input::resolve(a.backend, &[input::load_poly(&a.p)?])? {
        Polys::Exact(v) => payload(&v[0], a.m),
        Polys::Float(v) => payload(&v[0], a.m),
    }
}

fn classify(a: &ClassifyArgs) -> CliResult<Value> {
    let parsed = [input::parse_scalar(&a.a)?, input::parse_scalar(&a.b)?, input::parse_scalar(&a.c)?];
    let exact: Option<Vec<_>> = parsed
        .iter()
        .map(|s| match s {
            Scalar::Exact(x) => Some(x.clone()),
            Scalar::Float(_) => None,
        })
        .collect();
    let (class, is_exact) = match exact {
        Some(v) => (classify_quadratic_2d(&v[0], &v[1], &v[2])?, true),
        None => {
            let v: Vec<C64> = parsed
                .iter()
                .map(|s| match s {
                    Scalar::Exact(x) => fischer_core::Coeff::to_c64(x),
                    Scalar::Float(x) => *x,
                })
                .collect();
            (classify_quadratic_2d(&v[0], &v[1], &v[2])?, false)
        }
    };
    let mut payload = serde_json::to_value(&class).expect("plain data");
    payload["backend"] = json!(backend_name(is_exact));
    payload["coefficients"] = json!([a.a, a.b, a.c]);
    Ok(payload)
}

fn order(a: &OrderArgs) -> CliResult<Value> {
    if a.samples == 0 {
        return Err(CliError::Precondition("--samples must be positive".into()));
    }
    let sampler = SphereSampler::with_samples(a.samples);
    let est = match input::load_stream(&a.f, a.m_max)? {
        AnyStream::Exact(s) => order_estimate(&s, a.m_min..=a.m_max, &sampler)?,
        AnyStream::Float(s) => order_estimate(&s, a.m_min..=a.m_max, &sampler)?,
    };
    Ok(serde_json::to_value(&est).expect("plain data"))
}

fn parse_lambda(spec: &str) -> CliResult<LambdaSeq> {
    if spec == "inverse-log" {
        return Ok(LambdaSeq::inverse_log()?);
    }
    let p = spec
        .strip_prefix("power:")
        .and_then(|p| p.parse::<f64>().ok())
        .ok_or_else(|| CliError::Parse(format!("lambda must be `power:P` or `inverse-log`, got {spec:?}")))?;
    Ok(LambdaSeq::power(p)?)
}

fn blambda(a: &BlambdaArgs) -> CliResult<Value> {
    let lambda = parse_lambda(&a.lambda)?;
    let rep = match input::load_stream(&a.f, a.m_cap)? {
        AnyStream::Exact(s) => blambda_norm(&s, &lambda, a.m_cap)?,
        AnyStream::Float(s) => blambda_norm(&s, &lambda, a.m_cap)?,
    };
    let mut payload = json!({"lambda": lambda.label(), "m_cap": a.m_cap, "report": rep});
    match (a.k, a.tau, a.beta) {
        (Some(k), Some(tau), Some(beta)) => {
            let check = check_lambda_condition(&lambda, k, tau, beta, a.probe_min..=a.probe_max)?;
            payload["lambda_condition"] = serde_json::to_value(&check).expect("plain data");
            if let Some(rho) = a.rho {
                payload["main_condition"] = json!({"rho": rho, "holds": check_main_condition(k, tau, beta, rho)?});
            }
        }
        (None, None, None) if a.rho.is_none() => {}
        _ => return Err(CliError::Precondition("--k, --tau and --beta must be given together".into())),
    }
    Ok(payload)
}
