//! Measured operator properties: duality defects, kernel ranks, stability
//! ratios across mesh ladders, oracle agreement and projection orders.
//!
//! Each function returns measurements; the property suite and the
//! acceptance tests turn them into pass/fail lines against their pinned
//! tolerances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basis::QuadratureRule;
use crate::dynamics::EnergyDensity;
use crate::error::Result;
use crate::field::DgFunction;
use crate::mesh::{build_mesh, BoundaryMode, GhostParity, Mesh1D};
use crate::ops::assembly::{Discretization, PenaltyConfig};
use crate::ops::projections::{
    elliptic_projection, endpoint_projection, gradient_matching_projection, stress_projection,
    EndpointSide,
};
use crate::ops::rank::{constant_defect, kernel_info};
use crate::verify::eoc::eoc;
use crate::verify::oracle::{dense_oracle, OracleKind};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

fn random_field(mesh: &std::sync::Arc<Mesh1D>, q: usize, rng: &mut ChaCha8Rng) -> DgFunction {
    let mut f = DgFunction::zeros(mesh.clone(), q);
    for c in f.coeffs_mut() {
        *c = rng.random_range(-1.0..1.0);
    }
    f
}

fn mean_zero_field(mesh: &std::sync::Arc<Mesh1D>, q: usize, rng: &mut ChaCha8Rng) -> DgFunction {
    let mut f = random_field(mesh, q, rng);
    let shift = f.mean();
    for n in 0..mesh.n_cells() {
        let c = f.coeff(n, 0) - shift;
        f.set_coeff(n, 0, c);
    }
    f
}

/// Largest normalized duality defect over random pairs on uniform and
/// perturbed periodic meshes plus wall meshes with opposite parities.
pub fn max_duality_defect(qs: &[usize], n: usize, pairs: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for &q in qs {
        let meshes = [
            Mesh1D::uniform(0.0, 1.0, n, BoundaryMode::Periodic)?,
            build_mesh(0.0, 1.0, n, 0.25, seed ^ 0x9e37, BoundaryMode::Periodic)?,
            Mesh1D::uniform(-1.0, 1.0, n, BoundaryMode::Natural)?,
        ];
        for mesh in meshes {
            let disc = Discretization::new(mesh.clone(), q, PenaltyConfig::recommended(q));
            let natural = !mesh.is_periodic();
            for _ in 0..pairs {
                let mut phi = random_field(&mesh, q, &mut rng);
                let mut psi = random_field(&mesh, q, &mut rng);
                if natural {
                    phi = phi.with_parity(GhostParity::Even);
                    psi = psi.with_parity(GhostParity::Odd);
                }
                let defect = disc.duality_defect(&phi, &psi)?.abs();
                let scale = phi.l2_norm() * psi.l2_norm();
                worst = worst.max(defect / scale.max(1e-300));
            }
        }
    }
    Ok(worst)
}

/// Kernel data of the gradients and the penalty form on one mesh.
pub struct KernelMeasurement {
    pub gm_nullity: usize,
    pub gp_nullity: usize,
    pub ip_nullity: usize,
    /// Constant-direction defect of the gradient null vectors.
    pub max_constant_defect: f64,
    /// Largest |mean(G[phi])| / |phi| over random probes.
    pub max_range_mean: f64,
}

pub fn kernel_measurement(
    mesh: &std::sync::Arc<Mesh1D>,
    q: usize,
    probes: usize,
    seed: u64,
) -> Result<KernelMeasurement> {
    let disc = Discretization::new(mesh.clone(), q, PenaltyConfig::recommended(q));
    let (gm_nullity, gm_vec) = kernel_info(&disc.grad_minus_weak(GhostParity::Even).to_dense());
    let (gp_nullity, gp_vec) = kernel_info(&disc.grad_plus_weak(GhostParity::Even).to_dense());
    let (ip_nullity, _) = kernel_info(&disc.ip_weak_matrix().to_dense());
    let dm = constant_defect(&DgFunction::from_coeffs(mesh.clone(), q, gm_vec));
    let dp = constant_defect(&DgFunction::from_coeffs(mesh.clone(), q, gp_vec));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_range_mean = 0.0_f64;
    for _ in 0..probes {
        let phi = random_field(mesh, q, &mut rng);
        let scale = phi.l2_norm().max(1e-300);
        max_range_mean = max_range_mean
            .max(disc.grad_minus(&phi).integral().abs() / scale)
            .max(disc.grad_plus(&phi).integral().abs() / scale);
    }
    Ok(KernelMeasurement {
        gm_nullity,
        gp_nullity,
        ip_nullity,
        max_constant_defect: dm.max(dp),
        max_range_mean,
    })
}

/// Symmetry defect, smallest mean-zero eigenvalue and measured coercivity
/// ratio of the interior-penalty form.
pub struct IpSpdMeasurement {
    pub asymmetry: f64,
    pub min_mean_zero_eigenvalue: f64,
    pub min_coercivity_ratio: f64,
}

pub fn ip_spd_measurement(
    mesh: &std::sync::Arc<Mesh1D>,
    q: usize,
    sigma: f64,
    probes: usize,
    seed: u64,
) -> Result<IpSpdMeasurement> {
    let disc = Discretization::new(mesh.clone(), q, PenaltyConfig::new(sigma));
    let a = disc.ip_weak_matrix().to_dense();
    let asymmetry = (&a - a.transpose()).abs().max();
    // Eigenvalues of the symmetric form; one ~0 eigenvalue for constants,
    // the rest must be positive.
    let eig = nalgebra::SymmetricEigen::new(a.clone());
    let mut evals: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    evals.sort_by(|x, y| x.partial_cmp(y).unwrap());
    // Skip the kernel eigenvalue (closest to zero in magnitude).
    let kernel_idx = evals
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let min_rest = evals
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != kernel_idx)
        .map(|(_, &v)| v)
        .fold(f64::INFINITY, f64::min);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_ratio = f64::INFINITY;
    for _ in 0..probes {
        let w = mean_zero_field(mesh, q, &mut rng);
        let form = disc.ip_form(&w, &w)?;
        let semi = w.broken_h1_seminorm_sq() + w.jump_seminorm_sq();
        if semi > 0.0 {
            min_ratio = min_ratio.min(form / semi);
        }
    }
    Ok(IpSpdMeasurement {
        asymmetry,
        min_mean_zero_eigenvalue: min_rest,
        min_coercivity_ratio: min_ratio,
    })
}

/// Which stability ratio a mesh-ladder measurement tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioKind {
    /// |phi| / |G-[phi]| over mean-zero fields (discrete Poincare).
    Poincare,
    /// |w|_dG / |G-[w]| (coercivity of the one-sided gradient).
    GradCoercivity,
    /// |G+-[phi]| / |h^-1 phi| (inverse stability).
    InverseStability,
}

/// Maximum ratio over random probes, one entry per ladder level.
pub fn ladder_ratios(
    kind: RatioKind,
    q: usize,
    n_ladder: &[usize],
    probes: usize,
    perturbed: bool,
    seed: u64,
) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n_ladder.len());
    for &n in n_ladder {
        let mesh = if perturbed {
            build_mesh(0.0, 1.0, n, 0.2, seed ^ n as u64, BoundaryMode::Periodic)?
        } else {
            Mesh1D::uniform(0.0, 1.0, n, BoundaryMode::Periodic)?
        };
        let disc = Discretization::new(mesh.clone(), q, PenaltyConfig::recommended(q));
        let mut worst = 0.0_f64;
        for _ in 0..probes {
            let ratio = match kind {
                RatioKind::Poincare => {
                    let phi = mean_zero_field(&mesh, q, &mut rng);
                    phi.l2_norm() / disc.grad_minus(&phi).l2_norm().max(1e-300)
                }
                RatioKind::GradCoercivity => {
                    let w = random_field(&mesh, q, &mut rng);
                    w.dg_norms().seminorm / disc.grad_minus(&w).l2_norm().max(1e-300)
                }
                RatioKind::InverseStability => {
                    let phi = random_field(&mesh, q, &mut rng);
                    let mut scaled = phi.clone();
                    for cell in 0..mesh.n_cells() {
                        let inv_h = 1.0 / mesh.cell_size(cell);
                        for k in 0..=q {
                            let c = scaled.coeff(cell, k) * inv_h;
                            scaled.set_coeff(cell, k, c);
                        }
                    }
                    let denom = scaled.l2_norm().max(1e-300);
                    let gm = disc.grad_minus(&phi).l2_norm();
                    let gp = disc.grad_plus(&phi).l2_norm();
                    gm.max(gp) / denom
                }
            };
            worst = worst.max(ratio);
        }
        out.push(worst);
    }
    Ok(out)
}

/// Largest entrywise deviation between production assemblies and the dense
/// oracle over the given sizes and degrees (uniform and perturbed periodic
/// meshes plus wall meshes with both gradient parities).
pub fn max_oracle_deviation(ns: &[usize], qs: &[usize], seed: u64) -> Result<f64> {
    let mut worst = 0.0_f64;
    for &n in ns {
        for &q in qs {
            let sigma = PenaltyConfig::recommended(q).sigma;
            let meshes = [
                Mesh1D::uniform(0.0, 1.0, n, BoundaryMode::Periodic)?,
                build_mesh(
                    0.0,
                    1.0,
                    n,
                    0.2,
                    seed ^ (n * q) as u64,
                    BoundaryMode::Periodic,
                )?,
                Mesh1D::uniform(-1.0, 1.0, n, BoundaryMode::Natural)?,
            ];
            for mesh in meshes {
                let disc = Discretization::new(mesh.clone(), q, PenaltyConfig::new(sigma));
                let parities: &[GhostParity] = if mesh.is_periodic() {
                    &[GhostParity::Even]
                } else {
                    &[GhostParity::Even, GhostParity::Odd]
                };
                for &parity in parities {
                    let om = dense_oracle(&mesh, q, sigma, parity, OracleKind::GradMinus)?;
                    let dm = (om - disc.grad_minus_weak(parity).to_dense()).abs().max();
                    let op = dense_oracle(&mesh, q, sigma, parity, OracleKind::GradPlus)?;
                    let dp = (op - disc.grad_plus_weak(parity).to_dense()).abs().max();
                    worst = worst.max(dm).max(dp);
                }
                let oa = dense_oracle(&mesh, q, sigma, GhostParity::Even, OracleKind::IpForm)?;
                let da = (oa - disc.ip_weak_matrix().to_dense()).abs().max();
                worst = worst.max(da);
                // Discrete Laplacian: the oracle returns the weak matrix of
                // its defining identity; mass-weight the production action.
                let ol = dense_oracle(
                    &mesh,
                    q,
                    sigma,
                    GhostParity::Even,
                    OracleKind::DiscreteLaplacian,
                )?;
                let mut prod = disc.laplacian_action().clone();
                prod.scale_rows(disc.mass());
                let dl = (ol - prod.to_dense()).abs().max();
                worst = worst.max(dl);
            }
        }
    }
    Ok(worst)
}

/// Trailing-two-average orders of the elliptic, endpoint and
/// gradient-matching projections of sin(2 pi x) over a mesh ladder.
pub struct ProjectionOrders {
    pub riesz_l2: f64,
    pub riesz_dg: f64,
    pub s_plus: f64,
    pub s_minus: f64,
    pub q_vs_s: f64,
    /// Order of |G-[Q w - S+ w]|, the sharp q+1 companion quantity.
    pub grad_q_vs_s: f64,
}

fn l2_error_against(f: &DgFunction, g: impl Fn(f64) -> f64, rule: &QuadratureRule) -> f64 {
    let mesh = f.mesh();
    let mut e = 0.0;
    for n in 0..mesh.n_cells() {
        let (a, b) = mesh.cell_bounds(n);
        e += rule.integrate(a, b, |x| {
            let d = f.eval_on_cell(n, mesh.to_reference(n, x)) - g(x);
            d * d
        });
    }
    e.max(0.0).sqrt()
}

fn dg_semi_error_against(f: &DgFunction, gx: impl Fn(f64) -> f64, rule: &QuadratureRule) -> f64 {
    let mesh = f.mesh();
    let mut e = 0.0;
    for n in 0..mesh.n_cells() {
        let (a, b) = mesh.cell_bounds(n);
        e += rule.integrate(a, b, |x| {
            let d = f.eval_deriv_on_cell(n, mesh.to_reference(n, x)) - gx(x);
            d * d
        });
    }
    (e + f.jump_seminorm_sq()).max(0.0).sqrt()
}

fn trailing_two(errors: &[f64], h: &[f64]) -> f64 {
    let e = eoc(errors, h).expect("positive errors");
    0.5 * (e[e.len() - 1] + e[e.len() - 2])
}

pub fn projection_orders(q: usize, n_ladder: &[usize]) -> Result<ProjectionOrders> {
    let w = |x: f64| (TWO_PI * x).sin();
    let wx = |x: f64| TWO_PI * (TWO_PI * x).cos();
    let wxx = |x: f64| -TWO_PI * TWO_PI * (TWO_PI * x).sin();
    let wxxx = |x: f64| -TWO_PI.powi(3) * (TWO_PI * x).cos();
    let rule = QuadratureRule::gauss_legendre(12);
    let mut h = Vec::new();
    let mut riesz_l2 = Vec::new();
    let mut riesz_dg = Vec::new();
    let mut s_plus = Vec::new();
    let mut s_minus = Vec::new();
    let mut q_vs_s = Vec::new();
    let mut grad_q_vs_s = Vec::new();
    for &n in n_ladder {
        let mesh = Mesh1D::uniform(0.0, 1.0, n, BoundaryMode::Periodic)?;
        let disc = Discretization::new(mesh.clone(), q, PenaltyConfig::recommended(q));
        let p = elliptic_projection(&disc, w, wxx)?;
        riesz_l2.push(l2_error_against(&p, w, &rule));
        riesz_dg.push(dg_semi_error_against(&p, wx, &rule));
        let sp = endpoint_projection(&mesh, q, w, EndpointSide::Plus);
        let sm = endpoint_projection(&mesh, q, w, EndpointSide::Minus);
        s_plus.push(l2_error_against(&sp, w, &rule));
        s_minus.push(l2_error_against(&sm, w, &rule));
        let gm = gradient_matching_projection(&disc, w, wx, wxxx)?;
        let diff = &gm.field - &sp;
        q_vs_s.push(diff.l2_norm());
        grad_q_vs_s.push(disc.grad_minus(&diff).l2_norm());
        h.push(mesh.h_max());
    }
    Ok(ProjectionOrders {
        riesz_l2: trailing_two(&riesz_l2, &h),
        riesz_dg: trailing_two(&riesz_dg, &h),
        s_plus: trailing_two(&s_plus, &h),
        s_minus: trailing_two(&s_minus, &h),
        q_vs_s: trailing_two(&q_vs_s, &h),
        grad_q_vs_s: trailing_two(&grad_q_vs_s, &h),
    })
}

/// Trailing-two-average order of |R[tau] - tau| on the manufactured
/// periodic strain (the analytic stress is W'(u) - gamma u'').
pub fn stress_projection_order(q: usize, n_ladder: &[usize], gamma: f64) -> Result<f64> {
    let energy = EnergyDensity::DoubleWell;
    let u = |x: f64| 0.3 * (TWO_PI * x).sin();
    let uxx = |x: f64| -0.3 * TWO_PI * TWO_PI * (TWO_PI * x).sin();
    let tau = move |x: f64| energy.dw(u(x)) - gamma * uxx(x);
    let rule = QuadratureRule::gauss_legendre(12);
    let mut errs = Vec::new();
    let mut hs = Vec::new();
    for &n in n_ladder {
        let mesh = Mesh1D::uniform(0.0, 1.0, n, BoundaryMode::Periodic)?;
        let disc = Discretization::new(mesh.clone(), q, PenaltyConfig::recommended(q));
        let r = stress_projection(&disc, &energy, gamma, u, uxx)?;
        errs.push(l2_error_against(&r, tau, &rule));
        hs.push(mesh.h_max());
    }
    Ok(trailing_two(&errs, &hs))
}

/// Sup-norm stability of the elliptic projection on a sharp but resolved
/// profile: returns max |P w| / max |w| and the derivative counterpart per
/// ladder level.
pub fn riesz_sup_stability(q: usize, n_ladder: &[usize]) -> Result<Vec<(f64, f64)>> {
    // Periodicized pair of fronts; tails decay like exp(-2a) so the wrap is
    // smooth to near machine precision.
    let a = 8.0;
    let w = move |x: f64| (a * (x + 0.5)).tanh() - (a * (x - 0.5)).tanh() - 1.0;
    let kink = move |x: f64, s: f64| {
        let t = (a * (x - s)).tanh();
        -2.0 * a * a * t * (1.0 - t * t)
    };
    let wxx = move |x: f64| kink(x, -0.5) - kink(x, 0.5);
    let wx_max = a; // derivative bound of the profile
    let mut out = Vec::new();
    for &n in n_ladder {
        let mesh = Mesh1D::uniform(-1.0, 1.0, n, BoundaryMode::Periodic)?;
        let disc = Discretization::new(mesh.clone(), q, PenaltyConfig::recommended(q));
        let p = elliptic_projection(&disc, w, wxx)?;
        let mut vmax = 0.0_f64;
        let mut dmax = 0.0_f64;
        for cell in 0..mesh.n_cells() {
            for i in 0..=8 {
                let xi = -1.0 + 0.25 * i as f64;
                vmax = vmax.max(p.eval_on_cell(cell, xi).abs());
                dmax = dmax.max(p.eval_deriv_on_cell(cell, xi).abs());
            }
        }
        out.push((vmax / 1.0, dmax / wx_max));
    }
    Ok(out)
}
