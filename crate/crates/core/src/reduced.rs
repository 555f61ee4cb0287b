//! Lie-Poisson dynamics on the shape sphere `a0 = mu`, `|(a1, a2, a3)| = mu`.
//!
//! With `{a_i, a_j} = -2 eps_ijk a_k` the reduced equations read
//! `da0/dt = 0`, `d(a1, a2, a3)/dt = 2 a x grad h`.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::full::{vortex_rhs_with_threshold, IntegratorOptions, Termination, Trajectory};
use crate::linalg;
use crate::ode::{self, Observe};
use crate::real::Real;
use crate::shape_algebra::{PauliBasis, PauliCoords};
use crate::vortex::{shape_map, VortexConfig};

/// A point of the shape sphere with its leaf label `mu = a0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedState<T> {
    pub a: PauliCoords<T>,
    pub mu: T,
}

impl<T: Real> ReducedState<T> {
    /// Accepts `a` if `a0 > 0` and `|(a1, a2, a3)| = a0` to `1e-9` relative.
    pub fn new(a: PauliCoords<T>) -> Result<Self> {
        if a.a.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("Pauli coordinates"));
        }
        let mu = a.a[0];
        if mu.is_zero() {
            return Err(Error::TripleCollision);
        }
        if mu < T::zero() {
            return Err(Error::DomainError(format!("a0 = {mu} must be positive")));
        }
        let off = (a.radius() - mu).abs() / mu;
        if off > T::lit(1e-9) {
            return Err(Error::DomainError(format!(
                "point is off the sphere a0 = |a| (relative gap {:e})",
                off.as_f64()
            )));
        }
        Ok(Self { a, mu })
    }

    /// The point `mu * v / |v|`.
    pub fn on_sphere(mu: T, v: [T; 3]) -> Result<Self> {
        let n = linalg::norm(&v);
        if n.is_zero() {
            return Err(Error::ZeroVector("direction"));
        }
        Self::new(PauliCoords::from_parts(mu, v.map(|x| x * mu / n)))
    }
}

fn side_lengths<T: Real>(a: &PauliCoords<T>, pb: &PauliBasis<T>) -> Result<[T; 3]> {
    let b = pb.from_pauli_coords(a).b;
    for (index, v) in b.iter().enumerate() {
        if !(*v > T::zero()) {
            return Err(Error::CollisionPoint {
                index,
                value: v.as_f64(),
            });
        }
    }
    Ok(b)
}

/// `h = -(1/4pi) sum_i G_j G_k ln b_i` with `b` recovered from `a`.
pub fn reduced_hamiltonian<T: Real>(a: &PauliCoords<T>, pb: &PauliBasis<T>) -> Result<T> {
    let b = side_lengths(a, pb)?;
    let s = &pb.strengths;
    let sum: T = (0..3).map(|i| s.side_weight(i) * b[i].ln()).sum();
    Ok(-sum / (T::lit(4.0) * T::PI()))
}

/// Gradient of [`reduced_hamiltonian`] with respect to `(a0, a1, a2, a3)`.
pub fn reduced_gradient<T: Real>(a: &PauliCoords<T>, pb: &PauliBasis<T>) -> Result<[T; 4]> {
    let b = side_lengths(a, pb)?;
    let s = &pb.strengths;
    let c = -(T::lit(4.0) * T::PI()).recip();
    Ok(std::array::from_fn(|m| {
        c * (0..3)
            .map(|i| s.side_weight(i) / b[i] * pb.from_a[i][m])
            .sum::<T>()
    }))
}

/// `(0, 2 a x grad h)`.
pub fn reduced_rhs<T: Real>(st: &ReducedState<T>, pb: &PauliBasis<T>) -> Result<[T; 4]> {
    rhs(&st.a, pb, T::one())
}

fn rhs<T: Real>(a: &PauliCoords<T>, pb: &PauliBasis<T>, sign: T) -> Result<[T; 4]> {
    let g = reduced_gradient(a, pb)?;
    let w = linalg::cross(&a.vector(), &[g[1], g[2], g[3]]);
    let k = sign * T::two();
    Ok([T::zero(), k * w[0], k * w[1], k * w[2]])
}

#[derive(Debug, Clone, Copy)]
pub struct ReducedOptions<T> {
    pub integrator: IntegratorOptions<T>,
    /// Project back onto the sphere after every accepted step.
    pub renormalize: bool,
    /// Flip the sign of the vector field. Only useful as a negative control.
    pub reverse: bool,
}

impl<T: Real> Default for ReducedOptions<T> {
    fn default() -> Self {
        Self {
            integrator: IntegratorOptions::default(),
            renormalize: true,
            reverse: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReducedTrajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<ReducedState<T>>,
    pub h: Vec<T>,
    /// `| |a| - a0 | / a0` at each sample, after any renormalisation.
    pub casimir_drift: Vec<T>,
    /// Largest `| |a| - a0 | / a0` seen before renormalisation.
    pub max_raw_drift: T,
    /// Largest relative deviation of `h` from its initial value.
    pub energy_drift: T,
    pub termination: Termination,
}

impl<T: Real> ReducedTrajectory<T> {
    pub fn final_state(&self) -> &ReducedState<T> {
        self.states.last().expect("trajectory holds the initial state")
    }

    pub fn max_casimir_drift(&self) -> T {
        self.casimir_drift.iter().fold(T::zero(), |m, v| m.max(*v))
    }
}

/// [`integrate_reduced_with`] with default reduction options.
pub fn integrate_reduced<T: Real>(
    st0: &ReducedState<T>,
    pb: &PauliBasis<T>,
    t_end: T,
    opts: &IntegratorOptions<T>,
) -> Result<ReducedTrajectory<T>> {
    let ro = ReducedOptions {
        integrator: *opts,
        ..ReducedOptions::default()
    };
    integrate_reduced_with(st0, pb, t_end, &ro)
}

/// Integrates the reduced flow over `[0, t_end]`. Stops with
/// [`Termination::CollisionDetected`] once the smallest `b_i` falls below
/// the collision threshold.
pub fn integrate_reduced_with<T: Real>(
    st0: &ReducedState<T>,
    pb: &PauliBasis<T>,
    t_end: T,
    opts: &ReducedOptions<T>,
) -> Result<ReducedTrajectory<T>> {
    let io = &opts.integrator;
    let ctl = io.step_control()?;
    let eps = io.collision_epsilon;
    let mu = st0.mu;
    let sign = if opts.reverse { -T::one() } else { T::one() };
    let min_b = |a: &PauliCoords<T>| {
        let b = pb.from_pauli_coords(a).b;
        b[0].min(b[1]).min(b[2])
    };
    let gap = |a: &PauliCoords<T>| (a.radius() - a.a[0]).abs() / a.a[0];

    let mut traj = ReducedTrajectory {
        times: vec![T::zero()],
        states: vec![*st0],
        h: vec![],
        casimir_drift: vec![gap(&st0.a)],
        max_raw_drift: gap(&st0.a),
        energy_drift: T::zero(),
        termination: Termination::Completed,
    };
    if min_b(&st0.a) < eps {
        traj.h.push(T::infinity());
        traj.termination = Termination::CollisionDetected;
        return Ok(traj);
    }
    let h0 = reduced_hamiltonian(&st0.a, pb)?;
    traj.h.push(h0);
    let floor = crate::real::tiny::<T>();

    let mut collided = false;
    let result = ode::integrate(
        |_t, y: &[T; 4]| rhs(&PauliCoords::new(*y), pb, sign),
        T::zero(),
        st0.a.a,
        t_end,
        &ctl,
        io.sample_interval,
        |t, y, at_sample| {
            let mut a = PauliCoords::new(*y);
            traj.max_raw_drift = traj.max_raw_drift.max(gap(&a));
            let mut action = Observe::Continue;
            if opts.renormalize {
                let r = a.radius();
                if r > T::zero() {
                    let v = a.vector().map(|x| x * mu / r);
                    a = PauliCoords::from_parts(mu, v);
                    *y = a.a;
                    action = Observe::Modified;
                }
            }
            let hit = min_b(&a) < eps;
            if at_sample || hit {
                let h = reduced_hamiltonian(&a, pb).unwrap_or(T::infinity());
                traj.energy_drift = traj.energy_drift.max((h - h0).abs() / h0.abs().max(floor));
                traj.times.push(t);
                traj.states.push(ReducedState { a, mu });
                traj.h.push(h);
                traj.casimir_drift.push(gap(&a));
            }
            if hit {
                collided = true;
                Observe::Stop
            } else {
                action
            }
        },
    );
    match result {
        Ok(_) if collided => traj.termination = Termination::CollisionDetected,
        Ok(_) => {}
        Err(Error::StepFailure { .. }) => traj.termination = Termination::StepFailure,
        Err(e) => return Err(e),
    }
    Ok(traj)
}

/// Cubic Hermite interpolation of the full trajectory at time `t`, using the
/// vector field for the end-point slopes.
fn interpolate_full<T: Real>(full: &Trajectory<T>, t: T) -> Result<VortexConfig<T>> {
    let times = &full.times;
    let k = match times.iter().position(|&tk| tk >= t) {
        Some(0) => return Ok(full.states[0]),
        Some(k) => k,
        None => return Ok(*full.final_state()),
    };
    let (t0, t1) = (times[k - 1], times[k]);
    let h = t1 - t0;
    let u = (t - t0) / h;
    let (c0, c1) = (&full.states[k - 1], &full.states[k]);
    let d0 = vortex_rhs_with_threshold(c0, &full.strengths, T::zero())?;
    let d1 = vortex_rhs_with_threshold(c1, &full.strengths, T::zero())?;
    let u2 = u * u;
    let u3 = u2 * u;
    let two = T::two();
    let three = T::lit(3.0);
    let h00 = two * u3 - three * u2 + T::one();
    let h10 = u3 - two * u2 + u;
    let h01 = three * u2 - two * u3;
    let h11 = u3 - u2;
    let z: [Complex<T>; 3] = std::array::from_fn(|i| {
        c0.z[i] * h00 + d0[i] * (h10 * h) + c1.z[i] * h01 + d1[i] * (h11 * h)
    });
    Ok(VortexConfig { z })
}

/// Largest deviation `max_k |to_pauli(shape(z(t_k))) - a(t_k)|` over the
/// reduced sample times covered by both trajectories. The full trajectory is
/// interpolated where its samples do not coincide with the reduced ones.
pub fn compare_flows<T: Real>(
    full: &Trajectory<T>,
    pb: &PauliBasis<T>,
    reduced: &ReducedTrajectory<T>,
) -> Result<T> {
    if full.strengths.gamma != pb.strengths.gamma {
        return Err(Error::MismatchedSetup("strengths differ".into()));
    }
    let a_full0 = pb.to_pauli_coords(&shape_map(&full.states[0]));
    let st0 = &reduced.states[0];
    let gap0 = a_full0.distance_max(&st0.a);
    if gap0 > T::lit(1e-9) * st0.mu {
        return Err(Error::MismatchedSetup(format!(
            "initial points differ by {:e}",
            gap0.as_f64()
        )));
    }
    let t_last = *full.times.last().unwrap();
    let mut worst = T::zero();
    let mut j = 0;
    for (t, st) in reduced.times.iter().zip(&reduced.states) {
        if *t > t_last * (T::one() + T::lit(1e-12)) {
            break;
        }
        while j + 1 < full.times.len() && full.times[j] < *t {
            j += 1;
        }
        let same = (full.times[j] - *t).abs() <= T::lit(1e-12) * T::one().max(t.abs());
        let cfg = if same {
            full.states[j]
        } else {
            interpolate_full(full, *t)?
        };
        let a = pb.to_pauli_coords(&shape_map(&cfg));
        worst = worst.max(a.distance_max(&st.a));
    }
    Ok(worst)
}

/// Points of the sphere `a0 = mu` where `a x grad h = 0`.
///
/// Scans a `grid_n x grid_n` grid in `(a3, alpha)` (plus the two poles) for
/// local minima of `|a x grad h|`, polishes each with Newton's method in the
/// tangent plane and keeps those with residual below `1e-10` of the natural
/// scale `sum |G_j G_k| / 4pi`. Results are deduplicated at `1e-6 mu` and
/// sorted by decreasing `a3`, then increasing `alpha`.
pub fn find_relative_equilibria<T: Real>(
    mu: T,
    pb: &PauliBasis<T>,
    grid_n: usize,
) -> Result<Vec<ReducedState<T>>> {
    if mu.is_zero() {
        return Err(Error::TripleCollision);
    }
    if !(mu > T::zero()) || !mu.is_finite() {
        return Err(Error::DomainError(format!("mu = {mu} must be positive")));
    }
    let n = grid_n.max(4);
    let s = &pb.strengths;
    let scale: T = (0..3).map(|i| s.side_weight(i).abs()).sum::<T>() / (T::lit(4.0) * T::PI());

    let point = |a3: T, alpha: T| {
        let rho = (mu * mu - a3 * a3).max(T::zero()).sqrt();
        [rho * alpha.cos(), rho * alpha.sin(), a3]
    };
    let speed = |v: &[T; 3]| -> Option<T> {
        let a = PauliCoords::from_parts(mu, *v);
        let g = reduced_gradient(&a, pb).ok()?;
        Some(linalg::norm(&linalg::cross(v, &[g[1], g[2], g[3]])))
    };

    let nf = T::lit(n as f64);
    let mut values = vec![vec![None; n]; n];
    let mut points = vec![vec![[T::zero(); 3]; n]; n];
    for (i, row) in values.iter_mut().enumerate() {
        let a3 = mu * (-T::one() + T::two() * (T::lit(i as f64) + T::half()) / nf);
        for (k, cell) in row.iter_mut().enumerate() {
            let alpha = T::TAU() * T::lit(k as f64) / nf;
            let p = point(a3, alpha);
            points[i][k] = p;
            *cell = speed(&p);
        }
    }

    let mut candidates = vec![[T::zero(), T::zero(), mu], [T::zero(), T::zero(), -mu]];
    for i in 0..n {
        for k in 0..n {
            let Some(v) = values[i][k] else { continue };
            let mut is_min = true;
            for di in [-1i64, 0, 1] {
                for dk in [-1i64, 0, 1] {
                    if di == 0 && dk == 0 {
                        continue;
                    }
                    let ii = i as i64 + di;
                    if ii < 0 || ii >= n as i64 {
                        continue;
                    }
                    let kk = (k as i64 + dk).rem_euclid(n as i64) as usize;
                    if let Some(w) = values[ii as usize][kk] {
                        if w < v {
                            is_min = false;
                        }
                    }
                }
            }
            if is_min {
                candidates.push(points[i][k]);
            }
        }
    }

    let tol = T::lit(1e-10) * scale;
    let mut found: Vec<ReducedState<T>> = Vec::new();
    for c in candidates {
        let Some(p) = newton_on_sphere(c, mu, pb) else { continue };
        match speed(&p) {
            Some(r) if r <= tol => {}
            _ => continue,
        }
        let dup = found
            .iter()
            .any(|q| linalg::max_abs(&std::array::from_fn::<T, 3, _>(|m| q.a.a[m + 1] - p[m])) < T::lit(1e-6) * mu);
        if !dup {
            found.push(ReducedState::on_sphere(mu, p)?);
        }
    }
    let alpha = |st: &ReducedState<T>| crate::real::wrap_period(st.a.a[2].atan2(st.a.a[1]), T::TAU());
    let snap = T::lit(1e-9) * mu;
    found.sort_by(|x, y| {
        let (ax, ay) = (x.a.a[3], y.a.a[3]);
        if (ax - ay).abs() > snap {
            ay.partial_cmp(&ax).unwrap()
        } else {
            alpha(x).partial_cmp(&alpha(y)).unwrap()
        }
    });
    Ok(found)
}

/// Newton iteration for `a x grad h = 0` restricted to the sphere, in tangent
/// coordinates around the current iterate.
fn newton_on_sphere<T: Real>(start: [T; 3], mu: T, pb: &PauliBasis<T>) -> Option<[T; 3]> {
    let field = |v: &[T; 3]| -> Option<[T; 3]> {
        let a = PauliCoords::from_parts(mu, *v);
        let g = reduced_gradient(&a, pb).ok()?;
        Some(linalg::cross(v, &[g[1], g[2], g[3]]))
    };
    let project = |v: [T; 3]| {
        let n = linalg::norm(&v);
        v.map(|x| x * mu / n)
    };
    let mut p = project(start);
    let step = T::lit(1e-7) * mu;
    for _ in 0..60 {
        let (e1, e2) = tangent_frame(&p);
        let chart = |u: T, w: T| project(std::array::from_fn(|m| p[m] + u * e1[m] + w * e2[m]));
        let g = |u: T, w: T| -> Option<[T; 2]> {
            let f = field(&chart(u, w))?;
            Some([linalg::dot(&f, &e1), linalg::dot(&f, &e2)])
        };
        let g0 = g(T::zero(), T::zero())?;
        let gu_p = g(step, T::zero())?;
        let gu_m = g(-step, T::zero())?;
        let gw_p = g(T::zero(), step)?;
        let gw_m = g(T::zero(), -step)?;
        let two_h = T::two() * step;
        let j = [
            [(gu_p[0] - gu_m[0]) / two_h, (gw_p[0] - gw_m[0]) / two_h],
            [(gu_p[1] - gu_m[1]) / two_h, (gw_p[1] - gw_m[1]) / two_h],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.is_zero() || !det.is_finite() {
            return None;
        }
        let du = -(j[1][1] * g0[0] - j[0][1] * g0[1]) / det;
        let dw = -(-j[1][0] * g0[0] + j[0][0] * g0[1]) / det;
        // keep the update within a fraction of the sphere
        let len = du.hypot(dw);
        let cap = T::lit(0.25) * mu;
        let (du, dw) = if len > cap { (du * cap / len, dw * cap / len) } else { (du, dw) };
        p = chart(du, dw);
        if len < T::lit(1e-14) * mu {
            break;
        }
    }
    Some(p)
}

/// Orthonormal basis of the plane orthogonal to `p`.
fn tangent_frame<T: Real>(p: &[T; 3]) -> ([T; 3], [T; 3]) {
    let n = linalg::norm(p);
    let u = p.map(|x| x / n);
    let pick = if u[0].abs() < T::lit(0.6) {
        [T::one(), T::zero(), T::zero()]
    } else {
        [T::zero(), T::one(), T::zero()]
    };
    let e1 = linalg::cross(&u, &pick);
    let l = linalg::norm(&e1);
    let e1 = e1.map(|x| x / l);
    let e2 = linalg::cross(&u, &e1);
    (e1, e2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::full::{integrate_full, vortex_rhs};
    use crate::shape_algebra::make_pauli;
    use crate::vortex::{hamiltonian, VortexStrengths};
    use std::f64::consts::PI;

    fn unit_basis() -> PauliBasis<f64> {
        make_pauli(&VortexStrengths::<f64>::new(1.0, 1.0, 1.0).unwrap(), None).unwrap()
    }

    fn north() -> ReducedState<f64> {
        ReducedState::new(PauliCoords::new([1.5, 0.0, 0.0, 1.5])).unwrap()
    }

    #[test]
    fn state_validation() {
        assert_eq!(
            ReducedState::new(PauliCoords::new([0.0, 0.0, 0.0, 0.0])),
            Err(Error::TripleCollision)
        );
        assert!(ReducedState::new(PauliCoords::new([1.0, 0.5, 0.0, 0.0])).is_err());
        assert!(ReducedState::on_sphere(2.0, [1.0, 1.0, 1.0]).is_ok());
    }

    #[test]
    fn pole_energy_matches_full() {
        let pb = unit_basis();
        let h = reduced_hamiltonian(&north().a, &pb).unwrap();
        assert!((h + 3.0 * 3f64.ln() / (4.0 * PI)).abs() < 1e-14);
        let w = Complex::from_polar(1.0, 2.0 * PI / 3.0);
        let cfg = VortexConfig::new([Complex::new(1.0, 0.0), w, w.conj()]).unwrap();
        let hf = hamiltonian(&cfg, &pb.strengths).unwrap();
        assert!((h - hf).abs() < 1e-14);
    }

    #[test]
    fn collision_point_has_no_energy() {
        let pb = unit_basis();
        let b12 = PauliCoords::new([1.0, 1.0, 0.0, 0.0]);
        assert!(matches!(
            reduced_hamiltonian(&b12, &pb),
            Err(Error::CollisionPoint { index: 2, .. })
        ));
    }

    #[test]
    fn energy_ignores_a3() {
        let s = VortexStrengths::<f64>::new(0.3, 0.9, 1.4).unwrap();
        let pb = make_pauli(&s, None).unwrap();
        let a = PauliCoords::new([1.0, 0.2, -0.3, 0.5]);
        let g = reduced_gradient(&a, &pb).unwrap();
        assert_eq!(g[3], 0.0);
        let e = 1e-6;
        let up = reduced_hamiltonian(&PauliCoords::new([1.0, 0.2, -0.3, 0.5 + e]), &pb).unwrap();
        let dn = reduced_hamiltonian(&PauliCoords::new([1.0, 0.2, -0.3, 0.5 - e]), &pb).unwrap();
        assert!(((up - dn) / (2.0 * e)).abs() < 1e-9);
        for m in 0..3 {
            let mut p = a.a;
            let mut q = a.a;
            p[m] += e;
            q[m] -= e;
            let fd = (reduced_hamiltonian(&PauliCoords::new(p), &pb).unwrap()
                - reduced_hamiltonian(&PauliCoords::new(q), &pb).unwrap())
                / (2.0 * e);
            assert!((fd - g[m]).abs() < 1e-8, "{m}: {fd} vs {}", g[m]);
        }
    }

    #[test]
    fn pole_is_fixed_and_field_is_tangent() {
        let pb = unit_basis();
        let v = reduced_rhs(&north(), &pb).unwrap();
        assert!(linalg::max_abs(&v) < 1e-15);
        let s = VortexStrengths::<f64>::new(0.3, 0.9, 1.4).unwrap();
        let pb = make_pauli(&s, None).unwrap();
        let st = ReducedState::on_sphere(1.0, [0.3, -0.5, 0.4]).unwrap();
        let v = reduced_rhs(&st, &pb).unwrap();
        assert_eq!(v[0], 0.0);
        let dot = linalg::dot(&st.a.vector(), &[v[1], v[2], v[3]]);
        assert!(dot.abs() < 1e-15 * linalg::norm(&v).max(1.0));
    }

    #[test]
    fn field_matches_projected_full_flow() {
        let s = VortexStrengths::<f64>::new(0.08904, 0.28196, 0.629).unwrap();
        let pb = make_pauli(&s, None).unwrap();
        let cfg = VortexConfig::from_xy([0.4, -0.3, -1.1, 0.2, 0.6, 0.9]).unwrap();
        let v = vortex_rhs(&cfg, &s).unwrap();
        let e = 1e-6;
        let shift = |k: f64| {
            let z: [Complex<f64>; 3] = std::array::from_fn(|i| cfg.z[i] + v[i] * k);
            pb.to_pauli_coords(&shape_map(&VortexConfig { z }))
        };
        let (p, m) = (shift(e), shift(-e));
        let fd: [f64; 4] = std::array::from_fn(|i| (p.a[i] - m.a[i]) / (2.0 * e));
        let st = ReducedState::new(pb.to_pauli_coords(&shape_map(&cfg))).unwrap();
        let r = reduced_rhs(&st, &pb).unwrap();
        let scale = linalg::max_abs(&r);
        for i in 0..4 {
            assert!((fd[i] - r[i]).abs() < 1e-6 * scale.max(1.0), "{i}: {fd:?} {r:?}");
        }
    }

    #[test]
    fn pole_stays_put() {
        let pb = unit_basis();
        let tr = integrate_reduced(&north(), &pb, 100.0, &IntegratorOptions::default()).unwrap();
        assert_eq!(tr.termination, Termination::Completed);
        for st in &tr.states {
            assert!(st.a.distance_max(&north().a) < 1e-10);
        }
    }

    #[test]
    fn casimir_and_energy_drift() {
        let s = VortexStrengths::<f64>::new(0.5, 1.3, 0.9).unwrap();
        let pb = make_pauli(&s, None).unwrap();
        let st = ReducedState::on_sphere(1.0, [0.3, -0.5, 0.4]).unwrap();
        let opts = ReducedOptions {
            renormalize: false,
            ..ReducedOptions::default()
        };
        let tr = integrate_reduced_with(&st, &pb, 10.0, &opts).unwrap();
        assert!(tr.max_raw_drift < 1e-8, "{}", tr.max_raw_drift);
        let tr = integrate_reduced(&st, &pb, 10.0, &IntegratorOptions::default()).unwrap();
        assert!(tr.max_casimir_drift() < 1e-10);
        assert!(tr.energy_drift < 1e-9, "{}", tr.energy_drift);
        assert!(tr.states.iter().all(|x| x.a.a[0] == 1.0));
    }

    #[test]
    fn full_and_reduced_agree_and_wrong_sign_does_not() {
        let s = VortexStrengths::<f64>::new(0.08904, 0.28196, 0.629).unwrap();
        let pb = make_pauli(&s, None).unwrap();
        let cfg = VortexConfig::from_xy([0.4, -0.3, -1.1, 0.2, 0.6, 0.9])
            .unwrap()
            .recentered(&s);
        let mut opts = IntegratorOptions::default();
        opts.sample_interval = Some(0.5);
        let full = integrate_full(&cfg, &s, 10.0, &opts).unwrap();
        let st = ReducedState::new(pb.to_pauli_coords(&shape_map(&cfg))).unwrap();
        let red = integrate_reduced(&st, &pb, 10.0, &opts).unwrap();
        let dev = compare_flows(&full, &pb, &red).unwrap();
        assert!(dev < 1e-6, "{dev}");

        // different sample grids go through interpolation
        let fine = integrate_full(&cfg, &s, 10.0, &IntegratorOptions::default()).unwrap();
        assert!(compare_flows(&fine, &pb, &red).unwrap() < 1e-5);

        let bad = ReducedOptions {
            integrator: opts,
            reverse: true,
            ..ReducedOptions::default()
        };
        let red = integrate_reduced_with(&st, &pb, 10.0, &bad).unwrap();
        assert!(compare_flows(&full, &pb, &red).unwrap() > 1e-2);
    }

    #[test]
    fn mismatched_setups() {
        let s = VortexStrengths::<f64>::new(1.0, 1.0, 1.0).unwrap();
        let pb = unit_basis();
        let cfg = VortexConfig::from_xy([0.4, -0.3, -1.1, 0.2, 0.6, 0.9]).unwrap();
        let full = integrate_full(&cfg, &s, 1.0, &IntegratorOptions::default()).unwrap();
        let red = integrate_reduced(&north(), &pb, 1.0, &IntegratorOptions::default()).unwrap();
        assert!(matches!(
            compare_flows(&full, &pb, &red),
            Err(Error::MismatchedSetup(_))
        ));
        let other = make_pauli(&VortexStrengths::<f64>::new(1.0, 2.0, 1.0).unwrap(), None).unwrap();
        assert!(matches!(
            compare_flows(&full, &other, &red),
            Err(Error::MismatchedSetup(_))
        ));
    }

    #[test]
    fn near_collision_never_nan() {
        let pb = unit_basis();
        let st = ReducedState::on_sphere(1.0, [1.0, 1e-2, 1e-2]).unwrap();
        let tr = integrate_reduced(&st, &pb, 1.0, &IntegratorOptions::default()).unwrap();
        assert!(tr.final_state().a.a[1] > 0.99);
        assert!(tr
            .states
            .iter()
            .all(|x| x.a.a.iter().all(|v| v.is_finite())));
    }

    #[test]
    fn equal_strength_equilibria() {
        let pb = unit_basis();
        let eq = find_relative_equilibria(1.5, &pb, 48).unwrap();
        assert_eq!(eq.len(), 5, "{eq:?}");
        assert!(eq[0].a.distance_max(&PauliCoords::new([1.5, 0.0, 0.0, 1.5])) < 1e-9);
        assert!(eq[4].a.distance_max(&PauliCoords::new([1.5, 0.0, 0.0, -1.5])) < 1e-9);
        let mut alphas: Vec<f64> = eq[1..4]
            .iter()
            .map(|st| {
                assert!(st.a.a[3].abs() < 1e-9);
                st.a.a[2].atan2(st.a.a[1]).rem_euclid(2.0 * PI)
            })
            .collect();
        alphas.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for w in alphas.windows(2) {
            assert!((w[1] - w[0] - 2.0 * PI / 3.0).abs() < 1e-8, "{alphas:?}");
        }
        assert_eq!(find_relative_equilibria(0.0, &pb, 16), Err(Error::TripleCollision));
    }
}
