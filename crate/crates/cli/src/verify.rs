//! Identity and inequality suite. Exact identities are checked in rational
//! arithmetic; inequalities and the Monte Carlo estimate in floating point.

use std::path::Path;

use fischer_core::apolar::{
    adjoint_defect, bargmann_mc_estimate, beauzamy_bound, inner_product, norm, norm_sq, reznick_sides,
    shapiro_pointwise_bound_residual,
};
use fischer_core::fischer::project_homogeneous;
use fischer_core::random;
use fischer_core::{Coeff, GaussRat, Poly};
use num::Zero;
use rand::Rng;
use serde::Serialize;
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::input;
use crate::report;
use crate::VerifyArgs;

const MC_SAMPLES: usize = 20_000;
const MC_PAIRS: usize = 10;
const MC_STDERRS: f64 = 5.0;
const FLOAT_SLACK: f64 = 1e-9;

#[derive(Serialize)]
struct CheckRow {
    name: &'static str,
    cases: usize,
    violations: usize,
    /// Largest relative excess over the bound; 0 for exact identities that hold.
    worst: f64,
    passed: bool,
}

#[derive(Default)]
struct Tally {
    cases: usize,
    violations: usize,
    worst: f64,
}

impl Tally {
    fn exact(&mut self, holds: bool) {
        self.cases += 1;
        if !holds {
            self.violations += 1;
            self.worst = f64::INFINITY;
        }
    }

    /// `excess` is the relative amount by which a bound is exceeded.
    fn bound(&mut self, excess: f64) {
        self.cases += 1;
        self.worst = self.worst.max(excess);
        if excess.is_nan() || excess > FLOAT_SLACK {
            self.violations += 1;
        }
    }

    fn row(self, name: &'static str) -> CheckRow {
        CheckRow { name, cases: self.cases, violations: self.violations, worst: self.worst, passed: self.violations == 0 }
    }
}

#[derive(Default)]
struct Suite {
    adjoint: Tally,
    reznick: Tally,
    bombieri: Tally,
    pythagoras: Tally,
    beauzamy: Tally,
    shapiro: Tally,
}

impl Suite {
    /// Every check on one homogeneous pair `(P_k, f_m)`; `z` is a point for
    /// the pointwise bound.
    fn check(&mut self, pk: &Poly<GaussRat>, fm: &Poly<GaussRat>, z: &[fischer_core::C64]) -> CliResult<()> {
        let k = pk.homogeneous_degree()?;
        let product = pk * fm;

        self.adjoint.exact(adjoint_defect(pk, &product, fm)?.is_zero());
        let (lhs, rhs) = reznick_sides(pk, fm)?;
        self.reznick.exact(lhs == rhs);
        self.bombieri.exact(norm_sq(&product) >= norm_sq(pk) * norm_sq(fm));

        let split = project_homogeneous(pk, fm)?;
        let along = pk * &split.q;
        let orthogonal = inner_product(&along, &split.r)?.is_zero();
        self.pythagoras.exact(orthogonal && norm_sq(fm) == norm_sq(&along) + norm_sq(&split.r));

        let m = fm.degree().finite().unwrap_or(0);
        let ceiling = beauzamy_bound(pk, m)? * norm(fm);
        if ceiling > 0.0 {
            self.beauzamy.bound(norm(&product) / ceiling - 1.0);
        }

        let z_sq: f64 = z.iter().map(|c| c.norm_sqr()).sum();
        let k_factorial: f64 = (1..=k).map(|i| i as f64).product();
        let scale = z_sq.powi(k as i32) * GaussRat::real_to_f64(&norm_sq(pk)) / k_factorial;
        let excess = shapiro_pointwise_bound_residual(pk, z)?;
        self.shapiro.bound(if scale > 0.0 { excess / scale } else { excess });
        Ok(())
    }

    fn rows(self) -> Vec<CheckRow> {
        vec![
            self.adjoint.row("adjoint"),
            self.reznick.row("reznick"),
            self.bombieri.row("bombieri"),
            self.pythagoras.row("pythagoras"),
            self.beauzamy.row("beauzamy"),
            self.shapiro.row("shapiro_pointwise"),
        ]
    }
}

fn monte_carlo(pairs: &[(Poly<GaussRat>, Poly<GaussRat>)], seed: u64) -> CliResult<Tally> {
    let mut tally = Tally::default();
    for (i, (p, q)) in pairs.iter().enumerate() {
        let exact = inner_product(p, q)?.to_c64();
        let est = bargmann_mc_estimate(p, q, MC_SAMPLES, seed.wrapping_add(i as u64))?;
        let dev = (est.estimate - exact).norm();
        tally.cases += 1;
        let units = if est.stderr > 0.0 { dev / est.stderr } else if dev == 0.0 { 0.0 } else { f64::INFINITY };
        tally.worst = tally.worst.max(units);
        if units > MC_STDERRS {
            tally.violations += 1;
        }
    }
    Ok(tally)
}

pub fn run(a: &VerifyArgs, out: Option<&Path>) -> CliResult<()> {
    let mut rng = random::rng(a.seed);
    let mut suite = Suite::default();
    let mut mc_pairs = Vec::new();

    match (&a.p, &a.f) {
        (Some(p), Some(f)) => {
            let pk = input::load_poly(p)?.to_exact()?;
            let fm = input::load_poly(f)?.to_exact()?;
            if pk.is_zero() || !pk.is_homogeneous() || !fm.is_homogeneous() {
                return Err(CliError::Precondition("verify needs a nonzero homogeneous P and a homogeneous f".into()));
            }
            for _ in 0..a.cases.max(1) {
                let z = random::complex_vector(&mut rng, pk.dim(), 2.0);
                suite.check(&pk, &fm, &z)?;
            }
            mc_pairs.push((pk, fm));
        }
        _ => {
            for i in 0..a.cases {
                let d = rng.random_range(1..=3);
                let k = rng.random_range(1..=3);
                let m = rng.random_range(0..=4);
                let pk = random::homogeneous(&mut rng, d, k, 0.6, true);
                if pk.is_zero() {
                    continue;
                }
                let fm = random::homogeneous(&mut rng, d, m, 0.6, true);
                let z = random::complex_vector(&mut rng, d, 2.0);
                suite.check(&pk, &fm, &z)?;
                if i < MC_PAIRS {
                    let (dp, dq) = (rng.random_range(0..=3), rng.random_range(0..=3));
                    let p = random::polynomial(&mut rng, d.min(2), dp, 0.6, true);
                    let q = random::polynomial(&mut rng, d.min(2), dq, 0.6, true);
                    mc_pairs.push((p, q));
                }
            }
        }
    }

    let mut rows = suite.rows();
    rows.push(monte_carlo(&mc_pairs, a.seed)?.row("bargmann_monte_carlo"));
    let passed = rows.iter().all(|r| r.passed);
    let failed: Vec<&str> = rows.iter().filter(|r| !r.passed).map(|r| r.name).collect();
    let payload = json!({
        "seed": a.seed,
        "cases": a.cases,
        "monte_carlo": {"samples": MC_SAMPLES, "max_stderrs": MC_STDERRS},
        "passed": passed,
        "checks": rows,
    });
    report::emit(out, "verify", payload)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Violation(format!("identity violations in: {}", failed.join(", "))))
    }
}
