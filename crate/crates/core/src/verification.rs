//! Residual report for a strength triple, plus the random samplers used by
//! the property tests and the command-line tool.

use num_complex::Complex;
use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::full::{canonical_bracket, Observable};
use crate::real::Real;
use crate::shape_algebra::{make_pauli, special_pauli_symbols, structure_constants, verify_pauli, PauliBasis};
use crate::vortex::{shape_map, VortexConfig, VortexStrengths};

/// Strengths drawn log-uniformly from `[lo, hi]`, positive.
pub fn random_strengths<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> VortexStrengths<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    let mut g = || rng.gen_range(a..=b).exp();
    VortexStrengths::new(g(), g(), g()).expect("positive finite strengths")
}

/// Positions uniform in `[-1, 1]^2`, redrawn until every squared separation
/// exceeds `min_sq`.
pub fn random_config<R: Rng>(rng: &mut R, min_sq: f64) -> VortexConfig<f64> {
    loop {
        let z = std::array::from_fn(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let cfg = VortexConfig { z };
        if cfg.min_side_sq() > min_sq {
            return cfg;
        }
    }
}

/// A random nonzero element of the plane `S_Gamma` with `x^T Q x > 0`.
pub fn random_family_parameter<R: Rng>(rng: &mut R, s: &VortexStrengths<f64>) -> Result<[f64; 3]> {
    let [e1, e2] = crate::shape_algebra::s_gamma_basis(s)?;
    let q = crate::shape_algebra::q_matrix(s);
    loop {
        let (c1, c2): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if c1.hypot(c2) < 0.1 {
            continue;
        }
        let x = std::array::from_fn(|i| c1 * e1[i] + c2 * e2[i]);
        if crate::linalg::dot(&x, &crate::linalg::mat_vec(&q, &x)) > 0.0 {
            return Ok(x);
        }
    }
}

/// Largest relative mismatch between the canonical bracket of the invariants
/// `(b1, b2, b3, Delta)` at `cfg` and the structure constants evaluated at
/// `shape_map(cfg)`.
pub fn poisson_map_residual<T: Real>(cfg: &VortexConfig<T>, s: &VortexStrengths<T>) -> T {
    let table = structure_constants(s);
    let p = shape_map(cfg);
    let obs = [
        Observable::SideSq(0),
        Observable::SideSq(1),
        Observable::SideSq(2),
        Observable::Area,
    ];
    let pv = p.to_array();
    let mut worst = T::zero();
    for i in 0..4 {
        for j in 0..4 {
            let direct = canonical_bracket(&obs[i], &obs[j], cfg, s);
            let c = table[i][j].to_array();
            let via = table[i][j].apply(&p);
            let mag: T = (0..4).map(|k| (c[k] * pv[k]).abs()).sum();
            let denom = mag.max(direct.abs()).max(crate::real::tiny());
            worst = worst.max((direct - via).abs() / denom);
        }
    }
    worst
}

/// Largest coefficient mismatch between `pb` and the closed-form symbols,
/// relative to the largest closed-form coefficient.
pub fn special_form_residual<T: Real>(pb: &PauliBasis<T>) -> Result<T> {
    let special = special_pauli_symbols(&pb.strengths)?;
    let mut worst = T::zero();
    for (a, b) in pb.sigma.iter().zip(special.iter()) {
        let scale = b.max_abs().max(crate::real::tiny());
        worst = worst.max((*a - *b).max_abs() / scale);
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerificationReport {
    pub pauli_residual: f64,
    pub jacobi_residual: f64,
    pub center_residual: f64,
    pub poisson_map_residual: f64,
    /// Only meaningful for the default family parameter; `None` otherwise.
    pub special_form_residual: Option<f64>,
}

/// Residuals for `make_pauli(s, x)` and the Poisson-map property at
/// `samples` random configurations drawn from a ChaCha stream seeded with `seed`.
pub fn verification_report(
    s: &VortexStrengths<f64>,
    x: Option<[f64; 3]>,
    samples: usize,
    seed: u64,
) -> Result<VerificationReport> {
    use rand::SeedableRng;
    let pb = make_pauli(s, x)?;
    let res = verify_pauli(&pb);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let poisson = (0..samples)
        .map(|_| poisson_map_residual(&random_config(&mut rng, 1e-2), s))
        .fold(0.0, f64::max);
    let default_x = crate::shape_algebra::default_family_parameter(s)?;
    let is_default = x.is_none() || pb.x_param == make_pauli(s, Some(default_x))?.x_param;
    Ok(VerificationReport {
        pauli_residual: res.pauli,
        jacobi_residual: res.jacobi,
        center_residual: res.center,
        poisson_map_residual: poisson,
        special_form_residual: if is_default {
            Some(special_form_residual(&pb)?)
        } else {
            None
        },
    })
}
