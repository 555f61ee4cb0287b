//! The chain of canonical transformations from the positions `(z1, z2, z3)`
//! to the mixed action-angle variables `(K, I1, I2, phi1, phi2)`:
//!
//! * `T1`: center of vorticity `Z0` and the Jacobi vectors `r`, `s`;
//! * `T2`: polar action-angle variables `(j, theta)` for `r` and `s`;
//! * `T3`: sum and difference of the actions and angles.
//!
//! [`mixed_to_pauli`] closes the square with the Pauli coordinates.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::real::{wrap_period, wrap_pi, Real};
use crate::shape_algebra::PauliCoords;
use crate::vortex::{VortexConfig, VortexStrengths};

/// Center of vorticity and Jacobi vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JBHState<T> {
    pub z0: Complex<T>,
    /// `z2 - z1`.
    pub r: Complex<T>,
    /// `z3` minus the center of vorticity of the pair `(1, 2)`.
    pub s: Complex<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ActionAngleState<T> {
    pub kx: T,
    pub ky: T,
    pub j1: T,
    pub j2: T,
    pub theta1: T,
    pub theta2: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixedState<T> {
    pub kx: T,
    pub ky: T,
    pub i1: T,
    pub i2: T,
    /// In `[0, pi)`.
    pub phi1: T,
    pub phi2: T,
}

/// The symplectic weights `A = G1 G2 / (G1 + G2)` and `B = (G1 + G2) G3 / Gtot`.
pub fn jacobi_weights<T: Real>(s: &VortexStrengths<T>) -> Result<(T, T)> {
    let [g1, g2, g3] = s.gamma;
    let m12 = g1 + g2;
    if m12.is_zero() {
        return Err(Error::DegenerateMass);
    }
    if s.gamma_tot.is_zero() {
        return Err(Error::DomainError("total circulation vanishes".into()));
    }
    Ok((g1 * g2 / m12, m12 * g3 / s.gamma_tot))
}

pub fn t1_forward<T: Real>(cfg: &VortexConfig<T>, s: &VortexStrengths<T>) -> Result<JBHState<T>> {
    jacobi_weights(s)?;
    let [g1, g2, _] = s.gamma;
    let [z1, z2, z3] = cfg.z;
    Ok(JBHState {
        z0: cfg.center_of_vorticity(s),
        r: z2 - z1,
        s: z3 - (z1 * g1 + z2 * g2) / (g1 + g2),
    })
}

pub fn t1_inverse<T: Real>(j: &JBHState<T>, s: &VortexStrengths<T>) -> Result<VortexConfig<T>> {
    jacobi_weights(s)?;
    let [g1, g2, g3] = s.gamma;
    let m12 = g1 + g2;
    // partial center of the pair (1, 2)
    let c = j.z0 - j.s * (g3 / s.gamma_tot);
    VortexConfig::new([c - j.r * (g2 / m12), c + j.r * (g1 / m12), c + j.s])
}

/// Matrix of `T1` as a complex-linear map `(z1, z2, z3) -> (Z0, r, s)`.
pub fn t1_matrix<T: Real>(s: &VortexStrengths<T>) -> Result<[[T; 3]; 3]> {
    jacobi_weights(s)?;
    let [g1, g2, g3] = s.gamma;
    let m12 = g1 + g2;
    let gt = s.gamma_tot;
    Ok([
        [g1 / gt, g2 / gt, g3 / gt],
        [-T::one(), T::one(), T::zero()],
        [-g1 / m12, -g2 / m12, T::one()],
    ])
}

fn positive_weights<T: Real>(s: &VortexStrengths<T>) -> Result<(T, T)> {
    let (a, b) = jacobi_weights(s)?;
    for (name, value) in [("A", a), ("B", b), ("Gtot", s.gamma_tot)] {
        if !(value > T::zero()) {
            return Err(Error::NegativeCoefficient {
                name,
                value: value.as_f64(),
            });
        }
    }
    Ok((a, b))
}

pub fn t2_forward<T: Real>(j: &JBHState<T>, s: &VortexStrengths<T>) -> Result<ActionAngleState<T>> {
    let (a, b) = positive_weights(s)?;
    if j.r.norm_sqr().is_zero() {
        return Err(Error::ZeroVector("r"));
    }
    if j.s.norm_sqr().is_zero() {
        return Err(Error::ZeroVector("s"));
    }
    let k = j.z0 * s.gamma_tot.sqrt();
    Ok(ActionAngleState {
        kx: k.re,
        ky: k.im,
        j1: a * j.r.norm_sqr() * T::half(),
        j2: b * j.s.norm_sqr() * T::half(),
        theta1: j.r.arg(),
        theta2: j.s.arg(),
    })
}

pub fn t2_inverse<T: Real>(aa: &ActionAngleState<T>, s: &VortexStrengths<T>) -> Result<JBHState<T>> {
    let (a, b) = positive_weights(s)?;
    if aa.j1 < T::zero() || aa.j2 < T::zero() {
        return Err(Error::DomainError("actions must be nonnegative".into()));
    }
    let polar = |j: T, w: T, th: T| Complex::from_polar((T::two() * j / w).sqrt(), th);
    Ok(JBHState {
        z0: Complex::new(aa.kx, aa.ky) / s.gamma_tot.sqrt(),
        r: polar(aa.j1, a, aa.theta1),
        s: polar(aa.j2, b, aa.theta2),
    })
}

/// `I1 = j2 - j1`, `I2 = j1 + j2`, `phi1 = (theta2 - theta1)/2`, `phi2 = (theta1 + theta2)/2`.
///
/// `phi1` is brought into `[0, pi)`; the same multiple of `pi` is removed from
/// `phi2` (then wrapped into `(-pi, pi]`) so that [`t3_inverse`] recovers the angles.
pub fn t3_forward<T: Real>(aa: &ActionAngleState<T>) -> MixedState<T> {
    let pi = T::PI();
    let phi1 = (aa.theta2 - aa.theta1) * T::half();
    let phi2 = (aa.theta1 + aa.theta2) * T::half();
    let reduced = wrap_period(phi1, pi);
    let shift = reduced - phi1;
    MixedState {
        kx: aa.kx,
        ky: aa.ky,
        i1: aa.j2 - aa.j1,
        i2: aa.j1 + aa.j2,
        phi1: reduced,
        phi2: wrap_pi(phi2 + shift),
    }
}

pub fn t3_inverse<T: Real>(m: &MixedState<T>) -> ActionAngleState<T> {
    ActionAngleState {
        kx: m.kx,
        ky: m.ky,
        j1: (m.i2 - m.i1) * T::half(),
        j2: (m.i2 + m.i1) * T::half(),
        theta1: wrap_pi(m.phi2 - m.phi1),
        theta2: wrap_pi(m.phi2 + m.phi1),
    }
}

/// `a = (I2, I1, rho cos 2 phi1, rho sin 2 phi1)` with `rho = sqrt(I2^2 - I1^2)`.
pub fn mixed_to_pauli<T: Real>(m: &MixedState<T>) -> Result<PauliCoords<T>> {
    let slack = T::lit(64.0) * T::epsilon() * m.i2.abs();
    if !(m.i1.abs() <= m.i2 + slack) {
        return Err(Error::DomainError(format!(
            "|I1| = {} exceeds I2 = {}",
            m.i1.abs(),
            m.i2
        )));
    }
    let rho = (m.i2 * m.i2 - m.i1 * m.i1).max(T::zero()).sqrt();
    let (sn, cs) = (T::two() * m.phi1).sin_cos();
    Ok(PauliCoords::new([m.i2, m.i1, rho * cs, rho * sn]))
}

/// Every stage of the chain for one configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Chain<T> {
    pub jbh: JBHState<T>,
    pub action_angle: ActionAngleState<T>,
    pub mixed: MixedState<T>,
    pub pauli: PauliCoords<T>,
}

pub fn full_chain<T: Real>(cfg: &VortexConfig<T>, s: &VortexStrengths<T>) -> Result<Chain<T>> {
    let jbh = t1_forward(cfg, s)?;
    let action_angle = t2_forward(&jbh, s)?;
    let mixed = t3_forward(&action_angle);
    let pauli = mixed_to_pauli(&mixed)?;
    Ok(Chain {
        jbh,
        action_angle,
        mixed,
        pauli,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MapId {
    T1,
    T2,
    T3,
    Composite,
}

/// Flat coordinate orderings used by [`check_symplectic`]:
/// positions `(x1, y1, x2, y2, x3, y3)`, Jacobi `(X0, Y0, rx, ry, sx, sy)`,
/// action-angle `(kx, ky, j1, j2, theta1, theta2)`, mixed `(kx, ky, I1, I2, phi1, phi2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Space {
    Positions,
    Jacobi,
    ActionAngle,
    Mixed,
}

impl Space {
    /// Indices holding angles.
    fn angle_slots(self) -> &'static [usize] {
        match self {
            Space::ActionAngle | Space::Mixed => &[4, 5],
            _ => &[],
        }
    }

    /// `omega[p][q]` is the coefficient of `dp ^ dq`.
    fn omega<T: Real>(self, s: &VortexStrengths<T>) -> Result<[[T; 6]; 6]> {
        let pairs: [(usize, usize, T); 3] = match self {
            Space::Positions => [(0, 1, s.gamma[0]), (2, 3, s.gamma[1]), (4, 5, s.gamma[2])],
            Space::Jacobi => {
                let (a, b) = jacobi_weights(s)?;
                [(0, 1, s.gamma_tot), (2, 3, a), (4, 5, b)]
            }
            Space::ActionAngle | Space::Mixed => [(0, 1, T::one()), (2, 4, T::one()), (3, 5, T::one())],
        };
        let mut w = [[T::zero(); 6]; 6];
        for (p, q, c) in pairs {
            w[p][q] = c;
            w[q][p] = -c;
        }
        Ok(w)
    }
}

fn jbh_to_flat<T: Real>(j: &JBHState<T>) -> [T; 6] {
    [j.z0.re, j.z0.im, j.r.re, j.r.im, j.s.re, j.s.im]
}

fn jbh_from_flat<T: Real>(v: &[T; 6]) -> JBHState<T> {
    JBHState {
        z0: Complex::new(v[0], v[1]),
        r: Complex::new(v[2], v[3]),
        s: Complex::new(v[4], v[5]),
    }
}

fn aa_to_flat<T: Real>(a: &ActionAngleState<T>) -> [T; 6] {
    [a.kx, a.ky, a.j1, a.j2, a.theta1, a.theta2]
}

fn aa_from_flat<T: Real>(v: &[T; 6]) -> ActionAngleState<T> {
    ActionAngleState {
        kx: v[0],
        ky: v[1],
        j1: v[2],
        j2: v[3],
        theta1: v[4],
        theta2: v[5],
    }
}

fn mixed_to_flat<T: Real>(m: &MixedState<T>) -> [T; 6] {
    [m.kx, m.ky, m.i1, m.i2, m.phi1, m.phi2]
}

/// Residual `max |J^T Omega_target J - Omega_source|` of a map in the chain at
/// the point `at`, given in the flat coordinates of the map's source (see
/// [`MapId`]; `T1` and `Composite` start from positions, `T2` from Jacobi
/// coordinates, `T3` from action-angle variables). `J` is a central-difference
/// Jacobian with step `1e-6` times the size of `at`.
pub fn check_symplectic<T: Real>(map_id: MapId, at: &[T; 6], s: &VortexStrengths<T>) -> Result<T> {
    if at.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("evaluation point"));
    }
    let scale = at.iter().fold(T::one(), |m, v| m.max(v.abs()));
    let step = T::lit(1e-6) * scale;

    let (source, target) = match map_id {
        MapId::T1 => (Space::Positions, Space::Jacobi),
        MapId::T2 => (Space::Jacobi, Space::ActionAngle),
        MapId::T3 => (Space::ActionAngle, Space::Mixed),
        MapId::Composite => (Space::Positions, Space::Mixed),
    };

    // distance of the Jacobi vectors from zero, for the maps that take angles
    let jacobi_at = match source {
        Space::Positions => Some(jbh_to_flat(&t1_forward(&VortexConfig::from_xy(*at)?, s)?)),
        Space::Jacobi => Some(*at),
        _ => None,
    };
    if target != Space::Jacobi {
        if let Some(v) = jacobi_at {
            let guard = T::lit(100.0) * step;
            if v[2].hypot(v[3]) < guard {
                return Err(Error::SingularPoint("r = 0"));
            }
            if v[4].hypot(v[5]) < guard {
                return Err(Error::SingularPoint("s = 0"));
            }
        }
    }
    if source == Space::ActionAngle && (at[2] < T::zero() || at[3] < T::zero()) {
        return Err(Error::DomainError("actions must be nonnegative".into()));
    }

    let apply = |x: &[T; 6]| -> Result<[T; 6]> {
        Ok(match map_id {
            MapId::T1 => jbh_to_flat(&t1_forward(&VortexConfig::from_xy(*x)?, s)?),
            MapId::T2 => aa_to_flat(&t2_forward(&jbh_from_flat(x), s)?),
            MapId::T3 => mixed_to_flat(&t3_forward(&aa_from_flat(x))),
            MapId::Composite => {
                let j = t1_forward(&VortexConfig::from_xy(*x)?, s)?;
                mixed_to_flat(&t3_forward(&t2_forward(&j, s)?))
            }
        })
    };

    let mut jac = [[T::zero(); 6]; 6];
    for col in 0..6 {
        let mut plus = *at;
        let mut minus = *at;
        plus[col] = plus[col] + step;
        minus[col] = minus[col] - step;
        let fp = apply(&plus)?;
        let fm = apply(&minus)?;
        for row in 0..6 {
            let mut d = fp[row] - fm[row];
            if target.angle_slots().contains(&row) {
                // angles are only defined modulo pi after the reductions
                d = d - T::PI() * (d / T::PI()).round();
            }
            jac[row][col] = d / (T::two() * step);
        }
    }

    let wt = target.omega(s)?;
    let ws = source.omega(s)?;
    let mut worst = T::zero();
    for p in 0..6 {
        for q in 0..6 {
            let mut acc = T::zero();
            for k in 0..6 {
                for l in 0..6 {
                    acc = acc + jac[k][p] * wt[k][l] * jac[l][q];
                }
            }
            worst = worst.max((acc - ws[p][q]).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use crate::shape_algebra::make_pauli;
    use crate::vortex::shape_map;
    use std::f64::consts::PI;

    fn unit() -> VortexStrengths<f64> {
        VortexStrengths::<f64>::new(1.0, 1.0, 1.0).unwrap()
    }

    fn equilateral() -> VortexConfig<f64> {
        let w = Complex::from_polar(1.0, 2.0 * PI / 3.0);
        VortexConfig::new([Complex::new(1.0, 0.0), w, w.conj()]).unwrap()
    }

    #[test]
    fn t1_example_and_inverse() {
        let cfg = VortexConfig::from_xy([0.0, 0.0, 1.0, 0.0, 0.0, 1.0]).unwrap();
        let j = t1_forward(&cfg, &unit()).unwrap();
        assert!((j.z0 - Complex::new(1.0 / 3.0, 1.0 / 3.0)).norm() < 1e-15);
        assert!((j.r - Complex::new(1.0, 0.0)).norm() < 1e-15);
        assert!((j.s - Complex::new(-0.5, 1.0)).norm() < 1e-15);

        let s = VortexStrengths::<f64>::new(0.7, -0.2, 1.9).unwrap();
        let cfg = VortexConfig::from_xy([0.3, -1.2, 2.0, 0.5, -0.7, 0.9]).unwrap();
        let back = t1_inverse(&t1_forward(&cfg, &s).unwrap(), &s).unwrap();
        assert!(back.distance_max(&cfg) < 1e-14);
    }

    #[test]
    fn t1_determinant_and_degenerate_mass() {
        for g in [[1.0f64, 1.0, 1.0], [0.3, 2.5, -0.4], [-1.0, 3.0, 0.2]] {
            let s = VortexStrengths::from_array(g).unwrap();
            let d = linalg::determinant(&t1_matrix(&s).unwrap());
            assert!((d - 1.0).abs() < 1e-14, "{d}");
        }
        let s = VortexStrengths::<f64>::new(1.0, -1.0, 2.0).unwrap();
        assert_eq!(t1_forward(&equilateral(), &s), Err(Error::DegenerateMass));
    }

    #[test]
    fn t2_equilateral_example() {
        let j = t1_forward(&equilateral(), &unit()).unwrap();
        let aa = t2_forward(&j, &unit()).unwrap();
        assert!((aa.j1 - 0.75).abs() < 1e-14);
        assert!((aa.j2 - 0.75).abs() < 1e-14);
        assert!((aa.theta1 - 5.0 * PI / 6.0).abs() < 1e-14);
        assert!((aa.theta2 + 2.0 * PI / 3.0).abs() < 1e-14);
        assert!(aa.kx.abs() < 1e-15 && aa.ky.abs() < 1e-15);
        let back = t2_inverse(&aa, &unit()).unwrap();
        assert!((back.r - j.r).norm() < 1e-14 && (back.s - j.s).norm() < 1e-14);
    }

    #[test]
    fn t2_unit_r_and_errors() {
        let j = JBHState {
            z0: Complex::new(0.0, 0.0),
            r: Complex::new(1.0, 0.0),
            s: Complex::new(0.0, 2.0),
        };
        let aa = t2_forward(&j, &unit()).unwrap();
        assert!((aa.j1 - 0.25).abs() < 1e-15 && aa.theta1 == 0.0);
        let zero_r = JBHState { r: Complex::new(0.0, 0.0), ..j };
        assert_eq!(t2_forward(&zero_r, &unit()), Err(Error::ZeroVector("r")));
        let bad = VortexStrengths::<f64>::new(1.0, 1.0, -0.5).unwrap();
        assert!(matches!(
            t2_forward(&j, &bad),
            Err(Error::NegativeCoefficient { name: "B", .. })
        ));
    }

    #[test]
    fn t3_example_and_round_trip() {
        let aa = ActionAngleState {
            kx: 0.0,
            ky: 0.0,
            j1: 0.75,
            j2: 0.75,
            theta1: 5.0 * PI / 6.0,
            theta2: -2.0 * PI / 3.0,
        };
        let m = t3_forward(&aa);
        assert!(m.i1.abs() < 1e-15 && (m.i2 - 1.5).abs() < 1e-15);
        assert!((m.phi1 - PI / 4.0).abs() < 1e-14);
        let back = t3_inverse(&m);
        assert!((back.theta1 - aa.theta1).abs() < 1e-14);
        assert!((back.theta2 - aa.theta2).abs() < 1e-14);

        let a = mixed_to_pauli(&m).unwrap();
        assert!(a.distance_max(&PauliCoords::new([1.5, 0.0, 0.0, 1.5])) < 1e-14);
    }

    #[test]
    fn collision_actions_give_axis_point() {
        let m = MixedState {
            kx: 0.0,
            ky: 0.0,
            i1: 2.0,
            i2: 2.0,
            phi1: 1.0,
            phi2: 0.0,
        };
        assert_eq!(t3_inverse(&m).j1, 0.0);
        assert_eq!(mixed_to_pauli(&m).unwrap().a, [2.0, 2.0, 0.0, 0.0]);
        let bad = MixedState { i1: 2.5, ..m };
        assert!(matches!(mixed_to_pauli(&bad), Err(Error::DomainError(_))));
    }

    #[test]
    fn commuting_square_on_a_sample() {
        let s = VortexStrengths::<f64>::new(0.08904, 0.28196, 0.629).unwrap();
        let pb = make_pauli(&s, None).unwrap();
        let cfg = VortexConfig::from_xy([0.4, -0.3, -1.1, 0.2, 0.6, 0.9])
            .unwrap()
            .recentered(&s);
        let via_chain = full_chain(&cfg, &s).unwrap().pauli;
        let direct = pb.to_pauli_coords(&shape_map(&cfg));
        assert!(via_chain.distance_max(&direct) < 1e-12);
    }

    #[test]
    fn symplectic_residuals() {
        let s = VortexStrengths::<f64>::new(0.5, 1.3, 0.9).unwrap();
        let at = [0.4, -0.3, -1.1, 0.2, 0.6, 0.9];
        assert!(check_symplectic(MapId::T1, &at, &s).unwrap() < 1e-7);
        assert!(check_symplectic(MapId::Composite, &at, &s).unwrap() < 1e-6);
        let j = jbh_to_flat(&t1_forward(&VortexConfig::from_xy(at).unwrap(), &s).unwrap());
        assert!(check_symplectic(MapId::T2, &j, &s).unwrap() < 1e-6);
        let aa = [0.1, 0.2, 0.7, 0.4, 3.1, -3.1];
        assert!(check_symplectic(MapId::T3, &aa, &s).unwrap() < 1e-9);
    }

    #[test]
    fn symplectic_check_refuses_collisions() {
        let s = VortexStrengths::<f64>::new(0.5, 1.3, 0.9).unwrap();
        let collide = [0.0, 0.0, 0.0, 0.0, 1.0, 1.0];
        assert_eq!(
            check_symplectic(MapId::Composite, &collide, &s),
            Err(Error::SingularPoint("r = 0"))
        );
        // T1 alone is linear and fine there
        assert!(check_symplectic(MapId::T1, &collide, &s).unwrap() < 1e-7);
    }
}
