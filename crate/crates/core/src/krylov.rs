//! Preconditioned conjugate gradients with Lanczos-based condition-number
//! estimation.
//!
//! The stopping test uses the relative preconditioned residual
//! `sqrt(r^T z) / sqrt(r0^T z0) <= tolerance`, the natural norm for
//! operator preconditioning. The CG coefficient sequences are retained so
//! the tridiagonal Lanczos matrix can be rebuilt afterwards; its extreme
//! eigenvalues estimate the spectrum of the preconditioned operator from
//! the inside.

use crate::error::{Error, Result};
use crate::linalg::tridiag_eig_extremes;
use crate::precond::BlockDiagPrecond;
use crate::system::BlockOperator;

/// SplitMix64 pseudo-random generator.
///
/// Chosen over a library generator so that every implementation of this
/// tool produces bit-identical sequences: state advances by the constant
/// 0x9E3779B97F4A7C15 and the output is finalized with two xor-shift
/// multiplies (0xBF58476D1CE4E5B9, 0x94D049BB133111EB). `next_f64` maps the
/// top 53 bits onto [0,1).
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }
}

/// Deterministic pseudo-random vector with entries uniform in [0,1).
pub fn random_initial_guess(dim: usize, seed: u64) -> Vec<f64> {
    let mut rng = SplitMix64::new(seed);
    (0..dim).map(|_| rng.next_f64()).collect()
}

/// Outcome of one preconditioned CG run.
#[derive(Debug, Clone)]
pub struct CGReport {
    pub iterations: usize,
    pub converged: bool,
    /// True when `r^T z` lost positivity to round-off before convergence.
    pub breakdown: bool,
    pub final_rel_residual: f64,
    /// Step lengths, one per iteration.
    pub alphas: Vec<f64>,
    /// Direction updates; one fewer than `alphas`.
    pub betas: Vec<f64>,
    pub lambda_min_est: f64,
    pub lambda_max_est: f64,
    pub cond_est: f64,
    /// RNG seed of the initial guess; filled in by the harness, 0 when the
    /// caller supplied `x0` directly.
    pub seed: u64,
}

/// Estimate extreme eigenvalues of the preconditioned operator from CG
/// coefficients via the Lanczos tridiagonal matrix: diagonal
/// `1/alpha_k + beta_{k-1}/alpha_{k-1}` (with `beta_{-1} = 0`), off-diagonal
/// `sqrt(beta_k)/alpha_k`.
pub fn lanczos_estimate(alphas: &[f64], betas: &[f64]) -> Result<(f64, f64, f64)> {
    if alphas.is_empty() {
        return Err(Error::InvalidArgument(
            "lanczos_estimate: no CG iterations recorded".into(),
        ));
    }
    if betas.len() + 1 != alphas.len() {
        return Err(Error::DimensionMismatch(format!(
            "lanczos_estimate: {} alphas vs {} betas",
            alphas.len(),
            betas.len()
        )));
    }
    let m = alphas.len();
    let mut diag = Vec::with_capacity(m);
    let mut off = Vec::with_capacity(m.saturating_sub(1));
    for k in 0..m {
        let mut d = 1.0 / alphas[k];
        if k > 0 {
            d += betas[k - 1] / alphas[k - 1];
        }
        diag.push(d);
        if k + 1 < m {
            off.push(betas[k].max(0.0).sqrt() / alphas[k]);
        }
    }
    let (lo, hi) = tridiag_eig_extremes(&diag, &off)?;
    let cond = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    Ok((lo, hi, cond))
}

/// Preconditioned conjugate gradients for `op x = rhs` starting from `x0`.
///
/// Requires `op` SPD as applied and `pre` SPD. Returns the solution and a
/// report with the Lanczos spectrum estimates. Breakdown (round-off making
/// `r^T z` nonpositive before the tolerance is met) is reported, not an
/// error; non-finite data is an error.
pub fn pcg(
    op: &BlockOperator,
    pre: &BlockDiagPrecond,
    rhs: &[f64],
    x0: &[f64],
    tolerance: f64,
    max_iterations: usize,
) -> Result<(Vec<f64>, CGReport)> {
    let dim = op.dim();
    if rhs.len() != dim || x0.len() != dim {
        return Err(Error::DimensionMismatch(format!(
            "pcg: rhs {} / x0 {} vs operator dimension {}",
            rhs.len(),
            x0.len(),
            dim
        )));
    }
    if pre.dim() != dim {
        return Err(Error::DimensionMismatch(format!(
            "pcg: preconditioner dimension {} vs operator {}",
            pre.dim(),
            dim
        )));
    }
    if rhs.iter().chain(x0.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("pcg: rhs or x0".into()));
    }

    let mut x = x0.to_vec();
    let ax = op.apply(&x)?;
    let mut r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let mut z = pre.apply(&r)?;
    let mut rz = dot(&r, &z);
    let rz0 = rz;

    let mut report = CGReport {
        iterations: 0,
        converged: false,
        breakdown: false,
        final_rel_residual: 0.0,
        alphas: Vec::new(),
        betas: Vec::new(),
        lambda_min_est: 1.0,
        lambda_max_est: 1.0,
        cond_est: 1.0,
        seed: 0,
    };

    if !rz0.is_finite() {
        return Err(Error::NonFinite("pcg: initial preconditioned residual".into()));
    }
    if rz0 <= 0.0 {
        // x0 already solves the system (r = 0); nothing to iterate.
        report.converged = true;
        return Ok((x, report));
    }

    let mut p = z.clone();
    let mut rel = 1.0;
    while report.iterations < max_iterations {
        let ap = op.apply(&p)?;
        let pap = dot(&p, &ap);
        if !pap.is_finite() {
            return Err(Error::NonFinite("pcg: p^T A p".into()));
        }
        if pap <= 0.0 {
            report.breakdown = true;
            break;
        }
        let alpha = rz / pap;
        report.alphas.push(alpha);
        for i in 0..dim {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        z = pre.apply(&r)?;
        let rz_new = dot(&r, &z);
        report.iterations += 1;
        rel = (rz_new.max(0.0) / rz0).sqrt();
        if !rel.is_finite() {
            return Err(Error::NonFinite("pcg: residual norm".into()));
        }
        if rel <= tolerance {
            report.converged = true;
            break;
        }
        if rz_new <= 0.0 {
            report.breakdown = true;
            break;
        }
        let beta = rz_new / rz;
        report.betas.push(beta);
        rz = rz_new;
        for i in 0..dim {
            p[i] = z[i] + beta * p[i];
        }
    }
    report.final_rel_residual = rel;
    if !report.alphas.is_empty() {
        let (lo, hi, cond) = lanczos_estimate(&report.alphas, &report.betas)?;
        report.lambda_min_est = lo;
        report.lambda_max_est = hi;
        report.cond_est = cond;
    }
    Ok((x, report))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{assemble_mass, assemble_stiffness, DofMap};
    use crate::linalg::{dense_cholesky, forward_substitute, backward_substitute, generalized_sym_eig};
    use crate::mesh::build_unit_square_mesh;
    use crate::precond::{build_standard_precond, build_transformed_precond};
    use crate::system::{assemble_standard, NetworkParams};
    use crate::transform::{assemble_transformed, diagonalize_by_congruence};
    use std::sync::Arc;

    fn setup(n: usize) -> (Arc<crate::linalg::SparseMatrix>, Arc<crate::linalg::SparseMatrix>) {
        let mesh = build_unit_square_mesh(n).unwrap();
        let dofs = DofMap::interior(&mesh);
        (
            Arc::new(assemble_stiffness(&mesh, &dofs).unwrap()),
            Arc::new(assemble_mass(&mesh, &dofs).unwrap()),
        )
    }

    #[test]
    fn rng_is_reproducible_and_in_range() {
        let a = random_initial_guess(64, 9);
        let b = random_initial_guess(64, 9);
        let c = random_initial_guess(64, 10);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.iter().all(|&v| (0.0..1.0).contains(&v)));
    }

    #[test]
    fn lanczos_single_iteration() {
        let mu = 3.7;
        let (lo, hi, cond) = lanczos_estimate(&[1.0 / mu], &[]).unwrap();
        assert!((lo - mu).abs() < 1e-10 && (hi - mu).abs() < 1e-10);
        assert!((cond - 1.0).abs() < 1e-10);
        assert!(lanczos_estimate(&[], &[]).is_err());
    }

    #[test]
    fn preconditioner_equal_to_operator_converges_immediately() {
        // With no exchange the standard preconditioner equals the operator.
        let (s, m) = setup(8);
        let params = NetworkParams::uncoupled(vec![1.0]).unwrap();
        let op = assemble_standard(&params, &s, &m).unwrap();
        let pre = build_standard_precond(&params, &s, &m).unwrap();
        let x0 = random_initial_guess(op.dim(), 1);
        let rhs = vec![0.0; op.dim()];
        let (x, report) = pcg(&op, &pre, &rhs, &x0, 1e-9, 3000).unwrap();
        assert!(report.converged);
        assert!(report.iterations <= 2, "iterations {}", report.iterations);
        assert!(report.cond_est <= 1.0 + 1e-8);
        assert!(x.iter().all(|v| v.abs() < 1e-8));
    }

    #[test]
    fn transformed_formulation_is_parameter_robust() {
        let (s, m) = setup(8);
        for (k2, xi) in [(1e-6, 1e4), (1e2, 1e6), (1e6, 1e4)] {
            let params = NetworkParams::two_network(1.0, k2, xi).unwrap();
            let ct = diagonalize_by_congruence(&params).unwrap();
            let op = assemble_transformed(&ct, &s, &m).unwrap();
            let pre = build_transformed_precond(&ct, &s, &m).unwrap();
            let x0 = random_initial_guess(op.dim(), 2);
            let rhs = vec![0.0; op.dim()];
            let (_, report) = pcg(&op, &pre, &rhs, &x0, 1e-9, 3000).unwrap();
            assert!(report.converged);
            assert!(report.iterations <= 5, "K2={k2} xi={xi}: {}", report.iterations);
            assert!(report.cond_est <= 1.0 + 1e-6, "K2={k2} xi={xi}: {}", report.cond_est);
        }
    }

    #[test]
    fn standard_formulation_condition_estimate_tracks_oracle() {
        // K = [1,1], xi = 1e2 on n=32: closed-form condition number is
        // (lambda_min + 2 xi) / lambda_min with lambda_min the discrete
        // Poincare constant of the mesh.
        let (s, m) = setup(32);
        let lambda_min = crate::oracle::discrete_poincare_constant(&s, &m).unwrap();
        let params = NetworkParams::two_network(1.0, 1.0, 1e2).unwrap();
        let op = assemble_standard(&params, &s, &m).unwrap();
        let pre = build_standard_precond(&params, &s, &m).unwrap();
        let x0 = random_initial_guess(op.dim(), 3);
        let rhs = vec![0.0; op.dim()];
        let (_, report) = pcg(&op, &pre, &rhs, &x0, 1e-9, 3000).unwrap();
        assert!(report.converged);
        let oracle = (lambda_min + 2.0 * 1e2) / lambda_min;
        assert!(
            (report.cond_est - oracle).abs() <= 0.2 * oracle,
            "estimate {} vs oracle {}",
            report.cond_est,
            oracle
        );
    }

    #[test]
    fn lanczos_estimates_are_interior_and_accurate_on_small_mesh() {
        let (s, m) = setup(8);
        let params = NetworkParams::two_network(1.0, 1.0, 1e2).unwrap();
        let op = assemble_standard(&params, &s, &m).unwrap();
        let pre = build_standard_precond(&params, &s, &m).unwrap();
        let x0 = random_initial_guess(op.dim(), 4);
        let rhs = vec![0.0; op.dim()];
        let (_, report) = pcg(&op, &pre, &rhs, &x0, 1e-9, 3000).unwrap();
        assert!(report.converged);
        let a = op.materialize_dense().unwrap();
        let b = pre.materialize_dense().unwrap();
        let w = generalized_sym_eig(&a, &b).unwrap();
        let (lo, hi) = (w[0], w[w.len() - 1]);
        assert!((report.lambda_min_est - lo).abs() <= 0.05 * lo);
        assert!((report.lambda_max_est - hi).abs() <= 0.05 * hi);
        // Krylov estimates sit inside the true spectrum.
        assert!(report.lambda_min_est >= lo * (1.0 - 1e-8));
        assert!(report.lambda_max_est <= hi * (1.0 + 1e-8));
    }

    #[test]
    fn energy_norm_error_is_monotone() {
        let (s, m) = setup(4);
        let params = NetworkParams::two_network(1.0, 2.0, 10.0).unwrap();
        let op = assemble_standard(&params, &s, &m).unwrap();
        let pre = build_standard_precond(&params, &s, &m).unwrap();
        let rhs = random_initial_guess(op.dim(), 7);
        // Direct reference solution through the dense oracle path.
        let a = op.materialize_dense().unwrap();
        let l = dense_cholesky(&a).unwrap();
        let x_star = backward_substitute(&l, &forward_substitute(&l, &rhs));
        let x0 = random_initial_guess(op.dim(), 8);

        let mut previous = f64::INFINITY;
        for iters in 1..=12 {
            let (x, _) = pcg(&op, &pre, &rhs, &x0, 0.0, iters).unwrap();
            let e: Vec<f64> = x.iter().zip(&x_star).map(|(a, b)| a - b).collect();
            let ae = op.apply(&e).unwrap();
            let energy = dot(&e, &ae).max(0.0);
            assert!(
                energy <= previous * (1.0 + 1e-10),
                "iteration {iters}: {energy} > {previous}"
            );
            previous = energy;
        }
    }

    #[test]
    fn identical_inputs_give_identical_reports() {
        let (s, m) = setup(8);
        let params = NetworkParams::two_network(1.0, 0.5, 50.0).unwrap();
        let op = assemble_standard(&params, &s, &m).unwrap();
        let pre = build_standard_precond(&params, &s, &m).unwrap();
        let x0 = random_initial_guess(op.dim(), 11);
        let rhs = vec![0.0; op.dim()];
        let (xa, ra) = pcg(&op, &pre, &rhs, &x0, 1e-9, 3000).unwrap();
        let (xb, rb) = pcg(&op, &pre, &rhs, &x0, 1e-9, 3000).unwrap();
        assert_eq!(xa, xb);
        assert_eq!(ra.iterations, rb.iterations);
        assert_eq!(ra.alphas, rb.alphas);
        assert_eq!(ra.cond_est, rb.cond_est);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let (s, m) = setup(4);
        let params = NetworkParams::uncoupled(vec![1.0]).unwrap();
        let op = assemble_standard(&params, &s, &m).unwrap();
        let pre = build_standard_precond(&params, &s, &m).unwrap();
        let bad = vec![0.0; op.dim() + 1];
        assert!(pcg(&op, &pre, &bad, &bad, 1e-9, 10).is_err());
    }
}
