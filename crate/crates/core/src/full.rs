//! The Hamiltonian flow on the full phase space `C^3`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::ode::{self, Finish, Observe, StepControl};
use crate::real::Real;
use crate::vortex::{
    check_no_collision, conserved_quantities, hamiltonian, ConservedSet, VortexConfig,
    VortexStrengths, CYCLIC,
};

/// Squared-separation threshold below which a configuration counts as a collision.
pub const DEFAULT_COLLISION_EPSILON: f64 = 1e-10;

/// Velocities `dz_a/dt = (i/2pi) sum_{b != a} G_b (z_a - z_b) / |z_a - z_b|^2`.
///
/// Fails when some squared separation is below [`DEFAULT_COLLISION_EPSILON`].
pub fn vortex_rhs<T: Real>(cfg: &VortexConfig<T>, s: &VortexStrengths<T>) -> Result<[Complex<T>; 3]> {
    vortex_rhs_with_threshold(cfg, s, T::lit(DEFAULT_COLLISION_EPSILON))
}

pub fn vortex_rhs_with_threshold<T: Real>(
    cfg: &VortexConfig<T>,
    s: &VortexStrengths<T>,
    collision_epsilon: T,
) -> Result<[Complex<T>; 3]> {
    let b = cfg.side_sq();
    check_no_collision(&b, collision_epsilon)?;
    let mut v = [Complex::new(T::zero(), T::zero()); 3];
    // each side contributes to both of its endpoints
    for (i, &(_, j, k)) in CYCLIC.iter().enumerate() {
        let d = (cfg.z[j] - cfg.z[k]) / b[i];
        v[j] = v[j] + d * s.gamma[k];
        v[k] = v[k] - d * s.gamma[j];
    }
    let scale = Complex::new(T::zero(), (T::TAU()).recip());
    Ok(v.map(|w| w * scale))
}

/// `Im sum_a G_a conj(z_a) dz_a/dt`; identically `sum_{n<k} G_n G_k / 2pi`.
pub fn virial_rate<T: Real>(cfg: &VortexConfig<T>, s: &VortexStrengths<T>) -> Result<T> {
    let v = vortex_rhs(cfg, s)?;
    Ok((0..3).map(|a| s.gamma[a] * (cfg.z[a].conj() * v[a]).im).sum())
}

/// A scalar function on `C^3` together with its gradient.
///
/// The gradient is indexed `[vortex][0 = d/dx, 1 = d/dy]`.
pub trait PhaseFunction<T> {
    fn value(&self, cfg: &VortexConfig<T>) -> T;
    fn gradient(&self, cfg: &VortexConfig<T>) -> [[T; 2]; 3];
}

/// Coordinate functions and invariants with closed-form gradients.
#[derive(Debug, Clone, Copy)]
pub enum Observable<T> {
    X(usize),
    Y(usize),
    /// `b_i = |z_j - z_k|^2`.
    SideSq(usize),
    /// Oriented area `Delta`.
    Area,
    /// The Hamiltonian; gradient undefined at collisions (returns non-finite values).
    Energy(VortexStrengths<T>),
}

impl<T: Real> PhaseFunction<T> for Observable<T> {
    fn value(&self, cfg: &VortexConfig<T>) -> T {
        match *self {
            Observable::X(a) => cfg.z[a].re,
            Observable::Y(a) => cfg.z[a].im,
            Observable::SideSq(i) => cfg.side_sq()[i],
            Observable::Area => crate::vortex::shape_map(cfg).delta,
            Observable::Energy(s) => hamiltonian(cfg, &s).unwrap_or(T::infinity()),
        }
    }

    fn gradient(&self, cfg: &VortexConfig<T>) -> [[T; 2]; 3] {
        let zero = T::zero();
        let mut g = [[zero; 2]; 3];
        match *self {
            Observable::X(a) => g[a][0] = T::one(),
            Observable::Y(a) => g[a][1] = T::one(),
            Observable::SideSq(i) => {
                let (_, j, k) = CYCLIC[i];
                let d = cfg.z[j] - cfg.z[k];
                g[j] = [T::two() * d.re, T::two() * d.im];
                g[k] = [-T::two() * d.re, -T::two() * d.im];
            }
            Observable::Area => {
                // shoelace: Delta = 1/2 sum_i (x_i y_{i+1} - x_{i+1} y_i)
                for i in 0..3 {
                    let next = cfg.z[(i + 1) % 3];
                    let prev = cfg.z[(i + 2) % 3];
                    g[i] = [T::half() * (next.im - prev.im), T::half() * (prev.re - next.re)];
                }
            }
            Observable::Energy(s) => {
                let b = cfg.side_sq();
                let c = -(T::TAU()).recip();
                for (i, &(_, j, k)) in CYCLIC.iter().enumerate() {
                    let d = (cfg.z[j] - cfg.z[k]) * (c * s.side_weight(i) / b[i]);
                    g[j][0] = g[j][0] + d.re;
                    g[j][1] = g[j][1] + d.im;
                    g[k][0] = g[k][0] - d.re;
                    g[k][1] = g[k][1] - d.im;
                }
            }
        }
        g
    }
}

/// Wraps an arbitrary function, differentiating it by central differences with
/// step `1e-6 * scale` (scale = largest coordinate magnitude, at least one).
pub struct FiniteDifference<F>(pub F);

impl<T: Real, F: Fn(&VortexConfig<T>) -> T> PhaseFunction<T> for FiniteDifference<F> {
    fn value(&self, cfg: &VortexConfig<T>) -> T {
        (self.0)(cfg)
    }

    fn gradient(&self, cfg: &VortexConfig<T>) -> [[T; 2]; 3] {
        let h = T::lit(1e-6) * cfg.scale();
        let mut g = [[T::zero(); 2]; 3];
        for (a, ga) in g.iter_mut().enumerate() {
            for (c, dir) in [Complex::new(h, T::zero()), Complex::new(T::zero(), h)]
                .into_iter()
                .enumerate()
            {
                let mut plus = *cfg;
                plus.z[a] = plus.z[a] + dir;
                let mut minus = *cfg;
                minus.z[a] = minus.z[a] - dir;
                ga[c] = ((self.0)(&plus) - (self.0)(&minus)) / (T::two() * h);
            }
        }
        g
    }
}

/// Poisson bracket on `C^3` induced by `sum G_a dx_a ^ dy_a`:
/// `{f, g} = sum_a (1/G_a) (df/dx_a dg/dy_a - df/dy_a dg/dx_a)`.
///
/// With this sign `df/dt = {f, h}` along [`vortex_rhs`] and `{b_i, b_j} = -8 Delta / G_k`.
pub fn canonical_bracket<T: Real>(
    f: &impl PhaseFunction<T>,
    g: &impl PhaseFunction<T>,
    at: &VortexConfig<T>,
    s: &VortexStrengths<T>,
) -> T {
    let df = f.gradient(at);
    let dg = g.gradient(at);
    (0..3)
        .map(|a| (df[a][0] * dg[a][1] - df[a][1] * dg[a][0]) / s.gamma[a])
        .sum()
}

#[derive(Debug, Clone, Copy)]
pub struct IntegratorOptions<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_step: T,
    /// Threshold on the smallest squared separation.
    pub collision_epsilon: T,
    /// Record samples on a uniform grid instead of at every accepted step.
    pub sample_interval: Option<T>,
    pub max_steps: usize,
}

impl<T: Real> Default for IntegratorOptions<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::lit(1e-10),
            abs_tol: T::lit(1e-12),
            max_step: T::max_value(),
            collision_epsilon: T::lit(DEFAULT_COLLISION_EPSILON),
            sample_interval: None,
            max_steps: 5_000_000,
        }
    }
}

impl<T: Real> IntegratorOptions<T> {
    pub(crate) fn step_control(&self) -> Result<StepControl<T>> {
        if !(self.rel_tol > T::zero() && self.abs_tol > T::zero()) {
            return Err(Error::DomainError("tolerances must be positive".into()));
        }
        Ok(StepControl {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step,
            max_steps: self.max_steps,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Termination {
    Completed,
    CollisionDetected,
    StepFailure,
}

/// Largest relative deviations of the first integrals from their initial values.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Drift<T> {
    /// Relative to `|h(0)|`; ill-conditioned when `h(0)` is near zero.
    pub h: T,
    /// Relative to `max(|h(0)|, sum_{n<k} |G_n G_k| / 4pi)`.
    pub h_scaled: T,
    pub theta0: T,
    /// Deviation of the center of vorticity, relative to `max(|Z0|, size of the configuration)`.
    pub z0: T,
}

#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    pub strengths: VortexStrengths<T>,
    pub times: Vec<T>,
    pub states: Vec<VortexConfig<T>>,
    pub diagnostics: Vec<ConservedSet<T>>,
    pub termination: Termination,
    pub drift: Drift<T>,
}

impl<T: Real> Trajectory<T> {
    pub fn final_state(&self) -> &VortexConfig<T> {
        self.states.last().expect("trajectory holds the initial state")
    }
}

fn pack<T: Real>(cfg: &VortexConfig<T>) -> [T; 6] {
    cfg.to_xy()
}

fn unpack<T: Real>(y: &[T; 6]) -> VortexConfig<T> {
    VortexConfig {
        z: [
            Complex::new(y[0], y[1]),
            Complex::new(y[2], y[3]),
            Complex::new(y[4], y[5]),
        ],
    }
}

fn relative<T: Real>(now: T, reference: T, floor: T) -> T {
    (now - reference).abs() / reference.abs().max(floor)
}

/// Integrates the full system from `cfg0` over `[0, t_end]`.
///
/// Stops early with [`Termination::CollisionDetected`] once the smallest squared
/// separation drops below `opts.collision_epsilon`, and with
/// [`Termination::StepFailure`] if the step controller gives up; the samples
/// gathered so far are kept in both cases.
pub fn integrate_full<T: Real>(
    cfg0: &VortexConfig<T>,
    s: &VortexStrengths<T>,
    t_end: T,
    opts: &IntegratorOptions<T>,
) -> Result<Trajectory<T>> {
    let ctl = opts.step_control()?;
    let q0 = conserved_quantities(cfg0, s)?;
    let size = cfg0.z.iter().fold(T::zero(), |m, w| m.max(w.norm()));
    let floor = crate::real::tiny::<T>();
    let energy_scale = (0..3).map(|i| s.side_weight(i).abs()).sum::<T>() / (T::lit(4.0) * T::PI());
    let mut traj = Trajectory {
        strengths: *s,
        times: vec![T::zero()],
        states: vec![*cfg0],
        diagnostics: vec![q0],
        termination: Termination::Completed,
        drift: Drift::default(),
    };
    if cfg0.min_side_sq() < opts.collision_epsilon {
        traj.termination = Termination::CollisionDetected;
        return Ok(traj);
    }

    let eps = opts.collision_epsilon;
    let record = |traj: &mut Trajectory<T>, t: T, cfg: VortexConfig<T>| -> Result<()> {
        let q = conserved_quantities(&cfg, s)?;
        let d = &mut traj.drift;
        d.h = d.h.max(relative(q.h, q0.h, floor));
        d.h_scaled = d.h_scaled.max(relative(q.h, q0.h, energy_scale));
        d.theta0 = d.theta0.max(relative(q.theta0, q0.theta0, floor));
        d.z0 = d.z0.max((q.z0 - q0.z0).norm() / q0.z0.norm().max(size).max(floor));
        traj.times.push(t);
        traj.states.push(cfg);
        traj.diagnostics.push(q);
        Ok(())
    };

    let mut collided = false;
    let mut record_err = None;
    let result = ode::integrate(
        |_t, y: &[T; 6]| {
            let v = vortex_rhs_with_threshold(&unpack(y), s, T::zero())?;
            Ok([v[0].re, v[0].im, v[1].re, v[1].im, v[2].re, v[2].im])
        },
        T::zero(),
        pack(cfg0),
        t_end,
        &ctl,
        opts.sample_interval,
        |t, y, at_sample| {
            let cfg = unpack(y);
            let hit = cfg.min_side_sq() < eps;
            if at_sample || hit {
                if let Err(e) = record(&mut traj, t, cfg) {
                    record_err = Some(e);
                    return Observe::Stop;
                }
            }
            if hit {
                collided = true;
                Observe::Stop
            } else {
                Observe::Continue
            }
        },
    );
    match result {
        Ok(out) => {
            if collided || record_err.is_some() {
                traj.termination = Termination::CollisionDetected;
            } else {
                debug_assert_eq!(out.finish, Finish::Completed);
            }
        }
        Err(Error::StepFailure { .. }) | Err(Error::CollisionConfiguration { .. }) => {
            traj.termination = Termination::StepFailure;
        }
        Err(e) => return Err(e),
    }
    Ok(traj)
}
