//! Vortex strengths, configurations, the invariants map and the classical
//! conserved quantities of the planar three-vortex problem.
//!
//! Index conventions follow the cyclic triple `(i, j, k)`: `b[i]` is the
//! squared length of the side opposite vortex `i`, i.e. `|z_j - z_k|^2`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

/// Cyclic successor pairs: for side `i` the two vortices `(j, k)` spanning it.
pub const CYCLIC: [(usize, usize, usize); 3] = [(0, 1, 2), (1, 2, 0), (2, 0, 1)];

/// The three circulations and the constants derived from them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VortexStrengths<T> {
    pub gamma: [T; 3],
    pub gamma_tot: T,
    /// `1/(G1 G2) + 1/(G2 G3) + 1/(G3 G1)`; the reduced leaves are spheres when positive.
    pub w0: T,
    pub compact: bool,
    /// `G1 G2 G3 / Gtot > 0` and `Gtot != G3`: the Pauli symbols are real.
    pub pauli_admissible: bool,
}

impl<T: Real> VortexStrengths<T> {
    /// Validates the three circulations and derives the constants.
    pub fn new(g1: T, g2: T, g3: T) -> Result<Self> {
        let gamma = [g1, g2, g3];
        if gamma.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite("vortex strength"));
        }
        if let Some(index) = gamma.iter().position(|g| g.is_zero()) {
            return Err(Error::ZeroStrength { index });
        }
        let gamma_tot = g1 + g2 + g3;
        let w0 = (g1 * g2).recip() + (g2 * g3).recip() + (g3 * g1).recip();
        let product = g1 * g2 * g3;
        let pauli_admissible =
            !gamma_tot.is_zero() && product / gamma_tot > T::zero() && gamma_tot != g3;
        Ok(Self {
            gamma,
            gamma_tot,
            w0,
            compact: w0 > T::zero(),
            pauli_admissible,
        })
    }

    pub fn from_array(g: [T; 3]) -> Result<Self> {
        Self::new(g[0], g[1], g[2])
    }

    /// `G1 G2 G3`.
    pub fn product(&self) -> T {
        self.gamma[0] * self.gamma[1] * self.gamma[2]
    }

    /// `G1 G2 G3 / Gtot`, the quantity under the square roots of the Pauli symbols.
    pub fn pauli_ratio(&self) -> T {
        self.product() / self.gamma_tot
    }

    /// `sum_{n<k} G_n G_k`.
    pub fn pair_sum(&self) -> T {
        let [g1, g2, g3] = self.gamma;
        g1 * g2 + g2 * g3 + g3 * g1
    }

    /// The weight `G_j G_k` attached to side `i`.
    pub fn side_weight(&self, i: usize) -> T {
        let (_, j, k) = CYCLIC[i];
        self.gamma[j] * self.gamma[k]
    }
}

/// Three vortex positions in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VortexConfig<T> {
    pub z: [Complex<T>; 3],
}

impl<T: Real> VortexConfig<T> {
    pub fn new(z: [Complex<T>; 3]) -> Result<Self> {
        if z.iter().any(|w| !w.re.is_finite() || !w.im.is_finite()) {
            return Err(Error::NonFinite("vortex position"));
        }
        Ok(Self { z })
    }

    /// Builds a configuration from `[x1, y1, x2, y2, x3, y3]`.
    pub fn from_xy(xy: [T; 6]) -> Result<Self> {
        Self::new([
            Complex::new(xy[0], xy[1]),
            Complex::new(xy[2], xy[3]),
            Complex::new(xy[4], xy[5]),
        ])
    }

    pub fn to_xy(&self) -> [T; 6] {
        let [a, b, c] = self.z;
        [a.re, a.im, b.re, b.im, c.re, c.im]
    }

    /// Squared side lengths `b_i = |z_j - z_k|^2`.
    pub fn side_sq(&self) -> [T; 3] {
        CYCLIC.map(|(_, j, k)| (self.z[j] - self.z[k]).norm_sqr())
    }

    pub fn min_side_sq(&self) -> T {
        let b = self.side_sq();
        b[0].min(b[1]).min(b[2])
    }

    /// Largest coordinate magnitude, at least one; used to scale finite-difference steps.
    pub fn scale(&self) -> T {
        self.z
            .iter()
            .fold(T::one(), |m, w| m.max(w.re.abs()).max(w.im.abs()))
    }

    /// Center of vorticity `Z0 = sum G_k z_k / Gtot`.
    pub fn center_of_vorticity(&self, s: &VortexStrengths<T>) -> Complex<T> {
        self.weighted_sum(s) / s.gamma_tot
    }

    fn weighted_sum(&self, s: &VortexStrengths<T>) -> Complex<T> {
        self.z
            .iter()
            .zip(s.gamma.iter())
            .fold(Complex::new(T::zero(), T::zero()), |acc, (&w, &g)| acc + w * g)
    }

    /// The same configuration translated so that its center of vorticity is the origin.
    pub fn recentered(&self, s: &VortexStrengths<T>) -> Self {
        let c = self.center_of_vorticity(s);
        Self {
            z: self.z.map(|w| w - c),
        }
    }

    /// Applies the rigid motion `z -> e^{i theta} z + shift`.
    pub fn moved(&self, theta: T, shift: Complex<T>) -> Self {
        let rot = Complex::from_polar(T::one(), theta);
        Self {
            z: self.z.map(|w| rot * w + shift),
        }
    }

    /// Mirror image `z -> conj(z)`; reverses orientation.
    pub fn conj(&self) -> Self {
        Self {
            z: self.z.map(|w| w.conj()),
        }
    }

    /// Largest coordinate difference between two configurations.
    pub fn distance_max(&self, other: &Self) -> T {
        self.z
            .iter()
            .zip(other.z.iter())
            .fold(T::zero(), |m, (a, b)| m.max((a.re - b.re).abs()).max((a.im - b.im).abs()))
    }
}

/// A point `(b1, b2, b3, Delta)` of the extended configuration space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtendedPoint<T> {
    pub b: [T; 3],
    pub delta: T,
}

impl<T: Real> ExtendedPoint<T> {
    pub fn new(b: [T; 3], delta: T) -> Self {
        Self { b, delta }
    }

    pub fn from_array(v: [T; 4]) -> Self {
        Self {
            b: [v[0], v[1], v[2]],
            delta: v[3],
        }
    }

    pub fn to_array(&self) -> [T; 4] {
        [self.b[0], self.b[1], self.b[2], self.delta]
    }

    /// Heron's function, which vanishes on images of actual triangles.
    pub fn heron_residual(&self) -> T {
        heron_residual(self)
    }
}

/// The invariants map `(z1, z2, z3) -> (b1, b2, b3, Delta)`.
///
/// `Delta = Im[conj(z3 - z1) (z1 - z2)] / 2` is the oriented area, positive for
/// counter-clockwise vertex order.
pub fn shape_map<T: Real>(cfg: &VortexConfig<T>) -> ExtendedPoint<T> {
    let [z1, z2, z3] = cfg.z;
    let delta = ((z3 - z1).conj() * (z1 - z2)).im * T::half();
    ExtendedPoint {
        b: cfg.side_sq(),
        delta,
    }
}

/// `(4 Delta)^2 + b1^2 + b2^2 + b3^2 - 2 (b1 b2 + b2 b3 + b3 b1)`.
pub fn heron_residual<T: Real>(p: &ExtendedPoint<T>) -> T {
    let [b1, b2, b3] = p.b;
    let four_delta = T::lit(4.0) * p.delta;
    four_delta * four_delta + b1 * b1 + b2 * b2 + b3 * b3
        - T::two() * (b1 * b2 + b2 * b3 + b3 * b1)
}

/// Classical first integrals of a configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservedSet<T> {
    /// Center of vorticity.
    pub z0: Complex<T>,
    /// `sum G_k |z_k|^2`.
    pub theta0: T,
    /// Hamiltonian `-(1/2pi) sum_{a<b} G_a G_b ln|z_a - z_b|`.
    pub h: T,
    /// `sum_{n<k} G_n G_k |z_n - z_k|^2`.
    pub m: T,
    /// Virial constant `sum_{n<k} G_n G_k`. Along the flow
    /// `Im sum G_k conj(z_k) dz_k/dt` equals `v0 / 2pi`.
    pub v0: T,
    /// `-sum_{n<k} G_n G_k ln|z_n - z_k|`, i.e. `2 pi h`.
    pub psi0: T,
}

/// Hamiltonian of the full system. Fails on collisions.
pub fn hamiltonian<T: Real>(cfg: &VortexConfig<T>, s: &VortexStrengths<T>) -> Result<T> {
    let b = cfg.side_sq();
    check_no_collision(&b, T::zero())?;
    let mut acc = T::zero();
    for (i, bi) in b.iter().enumerate() {
        acc = acc + s.side_weight(i) * bi.ln();
    }
    // ln|w| = ln(b)/2
    Ok(-acc / (T::lit(4.0) * T::PI()))
}

pub(crate) fn check_no_collision<T: Real>(b: &[T; 3], eps: T) -> Result<()> {
    let min = b[0].min(b[1]).min(b[2]);
    if min <= eps || !min.is_finite() {
        return Err(Error::CollisionConfiguration {
            min_sq_separation: min.as_f64(),
        });
    }
    Ok(())
}

pub fn conserved_quantities<T: Real>(
    cfg: &VortexConfig<T>,
    s: &VortexStrengths<T>,
) -> Result<ConservedSet<T>> {
    let h = hamiltonian(cfg, s)?;
    let z0 = cfg.center_of_vorticity(s);
    let theta0 = cfg
        .z
        .iter()
        .zip(s.gamma.iter())
        .map(|(w, &g)| g * w.norm_sqr())
        .sum();
    let b = cfg.side_sq();
    let m = (0..3).map(|i| s.side_weight(i) * b[i]).sum();
    Ok(ConservedSet {
        z0,
        theta0,
        h,
        m,
        v0: s.pair_sum(),
        psi0: T::TAU() * h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn equilateral() -> VortexConfig<f64> {
        VortexConfig::new([
            c(1.0, 0.0),
            Complex::from_polar(1.0, 2.0 * PI / 3.0),
            Complex::from_polar(1.0, 4.0 * PI / 3.0),
        ])
        .unwrap()
    }

    #[test]
    fn strengths_symmetric() {
        let s = VortexStrengths::<f64>::new(1.0, 1.0, 1.0).unwrap();
        assert_eq!(s.gamma_tot, 3.0);
        assert_eq!(s.w0, 3.0);
        assert!(s.compact && s.pauli_admissible);
    }

    #[test]
    fn strengths_reference_triple() {
        let s = VortexStrengths::<f64>::new(0.08904, 0.28196, 0.629).unwrap();
        assert!((s.gamma_tot - 1.0).abs() < 1e-15);
        let w0 = 1.0 / (0.08904 * 0.28196) + 1.0 / (0.28196 * 0.629) + 1.0 / (0.629 * 0.08904);
        assert!((s.w0 - w0).abs() < 1e-12);
        assert!((s.w0 - 63.3).abs() < 0.1, "{}", s.w0);
        assert!(s.compact && s.pauli_admissible);
    }

    #[test]
    fn strengths_mixed_signs() {
        let s = VortexStrengths::<f64>::new(1.0, -1.0, 1.0).unwrap();
        assert_eq!(s.w0, -1.0);
        assert!(!s.compact);
        assert_eq!(s.pauli_ratio(), -1.0);
        assert!(!s.pauli_admissible);
    }

    #[test]
    fn strengths_zero_total_flagged_not_rejected() {
        let s = VortexStrengths::<f64>::new(1.0, 1.0, -2.0).unwrap();
        assert_eq!(s.gamma_tot, 0.0);
        assert!(!s.pauli_admissible);
    }

    #[test]
    fn strengths_errors() {
        assert_eq!(
            VortexStrengths::<f64>::new(1.0, 0.0, 1.0).unwrap_err(),
            Error::ZeroStrength { index: 1 }
        );
        assert!(matches!(
            VortexStrengths::<f64>::new(f64::NAN, 1.0, 1.0),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn shape_map_examples() {
        let p = shape_map(&VortexConfig::new([c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]).unwrap());
        assert_eq!(p, ExtendedPoint::new([2.0, 1.0, 1.0], 0.5));

        let p = shape_map(&VortexConfig::new([c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]).unwrap());
        assert_eq!(p, ExtendedPoint::new([1.0, 4.0, 1.0], 0.0));

        let p = shape_map(&equilateral());
        for bi in p.b {
            assert!((bi - 3.0).abs() < 1e-14);
        }
        assert!((p.delta - 3.0 * 3f64.sqrt() / 4.0).abs() < 1e-14);
    }

    #[test]
    fn shape_map_conjugation_flips_area() {
        let cfg = VortexConfig::new([c(0.3, -1.2), c(1.7, 0.4), c(-0.5, 0.9)]).unwrap();
        let p = shape_map(&cfg);
        let q = shape_map(&cfg.conj());
        for i in 0..3 {
            assert!((p.b[i] - q.b[i]).abs() < 1e-14);
        }
        assert!((p.delta + q.delta).abs() < 1e-14);
    }

    #[test]
    fn heron_examples() {
        assert_eq!(heron_residual(&ExtendedPoint::new([2.0, 1.0, 1.0], 0.5)), 0.0);
        assert_eq!(heron_residual(&ExtendedPoint::new([1.0, 1.0, 1.0], 1.0)), 13.0);
        assert_eq!(heron_residual(&ExtendedPoint::new([1.0, 4.0, 1.0], 0.0)), 0.0);
    }

    #[test]
    fn conserved_equilateral() {
        let s = VortexStrengths::<f64>::new(1.0, 1.0, 1.0).unwrap();
        let q = conserved_quantities(&equilateral(), &s).unwrap();
        assert!(q.z0.norm() < 1e-15);
        assert!((q.theta0 - 3.0).abs() < 1e-14);
        assert!((q.m - 9.0).abs() < 1e-13);
        assert!((q.h + 3.0 / (4.0 * PI) * 3f64.ln()).abs() < 1e-14);
        assert_eq!(q.v0, 3.0);
        assert!((q.psi0 - 2.0 * PI * q.h).abs() < 1e-14);
    }

    #[test]
    fn conserved_right_triangle() {
        let s = VortexStrengths::<f64>::new(1.0, 1.0, 1.0).unwrap();
        let cfg = VortexConfig::new([c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let q = conserved_quantities(&cfg, &s).unwrap();
        assert!((q.z0 - c(1.0 / 3.0, 1.0 / 3.0)).norm() < 1e-15);
        assert_eq!(q.theta0, 2.0);
        assert_eq!(q.m, 4.0);
        let identity = s.gamma_tot * q.theta0 - s.gamma_tot * s.gamma_tot * q.z0.norm_sqr();
        assert!((identity - 4.0).abs() < 1e-14);
    }

    #[test]
    fn conserved_rejects_collision() {
        let s = VortexStrengths::<f64>::new(1.0, 1.0, 1.0).unwrap();
        let cfg = VortexConfig::new([c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert!(matches!(
            conserved_quantities(&cfg, &s),
            Err(Error::CollisionConfiguration { .. })
        ));
        // but the invariants map accepts it
        assert_eq!(shape_map(&cfg).b[2], 0.0);
    }

    #[test]
    fn single_precision_shape_map() {
        let cfg = VortexConfig::<f32>::new([
            Complex::new(0.0, 0.0),
            Complex::new(1.0, 0.0),
            Complex::new(0.0, 1.0),
        ])
        .unwrap();
        let p = shape_map(&cfg);
        assert_eq!(p.b, [2.0, 1.0, 1.0]);
        assert_eq!(heron_residual(&p), 0.0);
    }
}
