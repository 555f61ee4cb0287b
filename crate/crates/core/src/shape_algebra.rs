//! The Poisson vector space of triangle invariants `(b1, b2, b3, Delta)`, its
//! linear bracket, and the family of Pauli symbols built on it.
//!
//! Linear functionals on the space are [`Covector`]s. The bracket of two
//! covectors is again a covector, so the dual space is a four-dimensional real
//! Lie algebra; [`make_pauli`] produces a basis `sigma_0, ..., sigma_3` of it with
//! `sigma_0` central and `{sigma_i, sigma_j} = -2 sigma_k` for cyclic `(i, j, k)`,
//! i.e. the commutation table of `i` times the identity and the Pauli matrices.
//!
//! Coordinates of a point with respect to the dual basis are [`PauliCoords`].
//! On images of actual triangles they satisfy `a1^2 + a2^2 + a3^2 = a0^2`, so
//! each level `a0 = mu > 0` is a sphere of radius `mu` (the shape sphere).

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat3, Mat4};
use crate::real::{tiny, Real};
use crate::vortex::{ExtendedPoint, VortexStrengths, CYCLIC};

/// A linear functional `cb . b + cd * Delta`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Covector<T> {
    pub cb: [T; 3],
    pub cd: T,
}

impl<T: Real> Covector<T> {
    pub fn new(cb: [T; 3], cd: T) -> Self {
        Self { cb, cd }
    }

    pub fn zero() -> Self {
        Self::new([T::zero(); 3], T::zero())
    }

    /// The coordinate functional `b_i`.
    pub fn side(i: usize) -> Self {
        let mut c = Self::zero();
        c.cb[i] = T::one();
        c
    }

    /// The coordinate functional `Delta`.
    pub fn area() -> Self {
        Self::new([T::zero(); 3], T::one())
    }

    /// The standard dual basis `(b1, b2, b3, Delta)`.
    pub fn standard_basis() -> [Self; 4] {
        [Self::side(0), Self::side(1), Self::side(2), Self::area()]
    }

    pub fn from_array(v: [T; 4]) -> Self {
        Self::new([v[0], v[1], v[2]], v[3])
    }

    pub fn to_array(&self) -> [T; 4] {
        [self.cb[0], self.cb[1], self.cb[2], self.cd]
    }

    /// Evaluates the functional at a point.
    pub fn apply(&self, p: &ExtendedPoint<T>) -> T {
        linalg::dot(&self.to_array(), &p.to_array())
    }

    pub fn max_abs(&self) -> T {
        linalg::max_abs(&self.to_array())
    }

    fn abs(&self) -> Self {
        Self::from_array(self.to_array().map(|x| x.abs()))
    }
}

impl<T: Real> Add for Covector<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (a, b) = (self.to_array(), o.to_array());
        Self::from_array(std::array::from_fn(|i| a[i] + b[i]))
    }
}

impl<T: Real> Sub for Covector<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<T: Real> Neg for Covector<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_array(self.to_array().map(|x| -x))
    }
}

impl<T: Real> Mul<T> for Covector<T> {
    type Output = Self;
    fn mul(self, k: T) -> Self {
        Self::from_array(self.to_array().map(|x| x * k))
    }
}

/// Brackets of the standard basis functionals, `table[p][q] = {e_p, e_q}`:
///
/// `{b_i, Delta} = 1/2 [(1/G_j - 1/G_k) b_i + (1/G_j + 1/G_k)(b_j - b_k)]`,
/// `{b_i, b_j} = -8 Delta / G_k`, for cyclic `(i, j, k)`.
pub fn structure_constants<T: Real>(s: &VortexStrengths<T>) -> [[Covector<T>; 4]; 4] {
    let mut table = [[Covector::zero(); 4]; 4];
    let inv = s.gamma.map(|g| g.recip());
    for &(i, j, k) in CYCLIC.iter() {
        let mut bd = Covector::zero();
        bd.cb[i] = T::half() * (inv[j] - inv[k]);
        let w = T::half() * (inv[j] + inv[k]);
        bd.cb[j] = bd.cb[j] + w;
        bd.cb[k] = bd.cb[k] - w;
        table[i][3] = bd;
        table[3][i] = -bd;

        let bb = Covector::area() * (T::lit(-8.0) * inv[k]);
        table[i][j] = bb;
        table[j][i] = -bb;
    }
    table
}

fn bracket_with<T: Real>(table: &[[Covector<T>; 4]; 4], xi: &Covector<T>, eta: &Covector<T>) -> Covector<T> {
    let (x, y) = (xi.to_array(), eta.to_array());
    let mut out = Covector::zero();
    for p in 0..4 {
        for q in 0..4 {
            let w = x[p] * y[q];
            if w != T::zero() {
                out = out + table[p][q] * w;
            }
        }
    }
    out
}

/// The bracket of two linear functionals, extended bilinearly from the
/// structure constants.
pub fn bracket_v<T: Real>(xi: &Covector<T>, eta: &Covector<T>, s: &VortexStrengths<T>) -> Covector<T> {
    bracket_with(&structure_constants(s), xi, eta)
}

/// Componentwise bound on the magnitude of the terms summed by [`bracket_v`];
/// the natural scale for judging cancellation in a bracket residual.
fn bracket_magnitude<T: Real>(table: &[[Covector<T>; 4]; 4], xi: &Covector<T>, eta: &Covector<T>) -> Covector<T> {
    let abs_table = table.map(|row| row.map(|c| c.abs()));
    bracket_with(&abs_table, &xi.abs(), &eta.abs())
}

/// Matrix of `x -> {x, Delta}` on `span(b1, b2, b3)` in the basis `b_i / G_i`.
pub fn build_a_matrix<T: Real>(s: &VortexStrengths<T>) -> Mat3<T> {
    let [g1, g2, g3] = s.gamma;
    let f = (T::two() * s.product()).recip();
    [
        [g1 * (g3 - g2), -g1 * (g1 + g3), g1 * (g1 + g2)],
        [g2 * (g2 + g3), g2 * (g1 - g3), -g2 * (g1 + g2)],
        [-g3 * (g2 + g3), g3 * (g1 + g3), g3 * (g2 - g1)],
    ]
    .map(|row| row.map(|x| x * f))
}

/// Normal `(G2 + G3, G3 + G1, G1 + G2)` of the plane `S_Gamma`.
pub fn s_gamma_normal<T: Real>(s: &VortexStrengths<T>) -> [T; 3] {
    let [g1, g2, g3] = s.gamma;
    [g2 + g3, g3 + g1, g1 + g2]
}

/// Basis `v1 = (-G3 - G1, G2 + G3, 0)`, `v2 = (-G1 - G2, 0, G2 + G3)` of `S_Gamma`.
///
/// When `G2 + G3 = 0` these are parallel; a basis built from cross products
/// with the normal is returned instead.
pub fn s_gamma_basis<T: Real>(s: &VortexStrengths<T>) -> Result<[[T; 3]; 2]> {
    let [g1, g2, g3] = s.gamma;
    let v1 = [-g3 - g1, g2 + g3, T::zero()];
    let v2 = [-g1 - g2, T::zero(), g2 + g3];
    let n = s_gamma_normal(s);
    let nn = linalg::norm(&n);
    if !(nn > T::zero()) {
        return Err(Error::DegenerateSubspace);
    }
    if linalg::norm(&linalg::cross(&v1, &v2)) > T::lit(64.0) * T::epsilon() * nn * nn {
        return Ok([v1, v2]);
    }
    // fallback: cross with the axis least aligned with the normal
    let m = (0..3)
        .min_by(|&i, &j| n[i].abs().partial_cmp(&n[j].abs()).unwrap())
        .unwrap();
    let mut e = [T::zero(); 3];
    e[m] = T::one();
    let u1 = linalg::cross(&n, &e);
    let u2 = linalg::cross(&n, &u1);
    if linalg::norm(&u1) > T::zero() && linalg::norm(&u2) > T::zero() {
        Ok([u1, u2])
    } else {
        Err(Error::DegenerateSubspace)
    }
}

/// The symmetric matrix `Q` whose quadratic form, up to the factor
/// `-8 / (G1 G2 G3)^2`, is `x -> {x, {x, Delta}}` restricted to `S_Gamma`.
pub fn q_matrix<T: Real>(s: &VortexStrengths<T>) -> Mat3<T> {
    let [g1, g2, g3] = s.gamma;
    let sq = |x: T| x * x;
    [
        [sq(g2 + g3), g1 * g2, g1 * g3],
        [g1 * g2, sq(g3 + g1), g2 * g3],
        [g1 * g3, g2 * g3, sq(g1 + g2)],
    ]
}

/// Hat map `x -> sum_i x_i b_i / G_i`.
pub fn hat<T: Real>(x: &[T; 3], s: &VortexStrengths<T>) -> Covector<T> {
    Covector::new(std::array::from_fn(|i| x[i] / s.gamma[i]), T::zero())
}

/// Family parameter placing the collision `z1 = z2` on the positive `a1` axis:
/// `x = (1, 1, -(Gtot + G3) / (Gtot - G3))`.
pub fn default_family_parameter<T: Real>(s: &VortexStrengths<T>) -> Result<[T; 3]> {
    let den = s.gamma_tot - s.gamma[2];
    if den == T::zero() {
        return Err(Error::BadParameter(
            "Gtot = G3: the default parameter is singular, supply x explicitly".into(),
        ));
    }
    Ok([T::one(), T::one(), -(s.gamma_tot + s.gamma[2]) / den])
}

/// `sigma_0 = (1 / 2 Gtot) sum_cyclic G_j G_k b_i`, the central element.
pub fn central_symbol<T: Real>(s: &VortexStrengths<T>) -> Covector<T> {
    let f = (T::two() * s.gamma_tot).recip();
    Covector::new(std::array::from_fn(|i| s.side_weight(i) * f), T::zero())
}

/// Closed-form Pauli symbols for the default family parameter, written out
/// coefficient by coefficient. Independent of [`make_pauli`]'s construction.
pub fn special_pauli_symbols<T: Real>(s: &VortexStrengths<T>) -> Result<[Covector<T>; 4]> {
    if !s.pauli_admissible {
        return Err(Error::NotAdmissible {
            ratio: s.pauli_ratio().as_f64(),
        });
    }
    let [g1, g2, g3] = s.gamma;
    let tot = s.gamma_tot;
    let f = (T::two() * tot).recip();
    let root = s.pauli_ratio().sqrt();
    let sigma1 = Covector::new(
        [
            f * g2 * g3,
            f * g3 * g1,
            -f * g1 * g2 * (tot + g3) / (tot - g3),
        ],
        T::zero(),
    );
    let sigma2 = Covector::new(
        [
            -T::half() * root,
            T::half() * root,
            T::half() * root * (g1 - g2) / (g1 + g2),
        ],
        T::zero(),
    );
    let sigma3 = Covector::area() * (T::two() * root);
    Ok([central_symbol(s), sigma1, sigma2, sigma3])
}

/// Coordinates `(a0, a1, a2, a3)` with respect to the dual of a Pauli basis.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PauliCoords<T> {
    pub a: [T; 4],
}

impl<T: Real> PauliCoords<T> {
    pub fn new(a: [T; 4]) -> Self {
        Self { a }
    }

    /// The spatial part `(a1, a2, a3)`.
    pub fn vector(&self) -> [T; 3] {
        [self.a[1], self.a[2], self.a[3]]
    }

    pub fn from_parts(a0: T, v: [T; 3]) -> Self {
        Self::new([a0, v[0], v[1], v[2]])
    }

    pub fn radius(&self) -> T {
        linalg::norm(&self.vector())
    }

    pub fn distance_max(&self, other: &Self) -> T {
        (0..4).fold(T::zero(), |m, i| m.max((self.a[i] - other.a[i]).abs()))
    }
}

/// A Pauli basis of the dual space for given strengths and family parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliBasis<T> {
    /// `sigma_0 .. sigma_3`.
    pub sigma: [Covector<T>; 4],
    pub strengths: VortexStrengths<T>,
    /// Representative of the family parameter, normalised so that its first
    /// nonzero entry is positive.
    pub x_param: [T; 3],
    /// Rows are the coefficients of the `sigma_i`; maps `(b, Delta)` to `a`.
    pub to_a: Mat4<T>,
    /// Inverse of `to_a`.
    pub from_a: Mat4<T>,
}

/// Builds the Pauli symbols for the ray `[x]` in `S_Gamma`:
///
/// `sigma_3 = 2 sqrt(G1 G2 G3 / Gtot) Delta`,
/// `sigma_1 = G1 G2 G3 / (sqrt 2 sqrt(x^T Q x)) * hat(x)`,
/// `sigma_2 = -1/2 {sigma_3, sigma_1}`, and `sigma_0` the central element.
///
/// Without `x` the parameter from [`default_family_parameter`] is used, which
/// reproduces [`special_pauli_symbols`].
pub fn make_pauli<T: Real>(s: &VortexStrengths<T>, x: Option<[T; 3]>) -> Result<PauliBasis<T>> {
    if !s.pauli_admissible {
        return Err(Error::NotAdmissible {
            ratio: s.pauli_ratio().as_f64(),
        });
    }
    let mut x = match x {
        Some(x) => x,
        None => default_family_parameter(s)?,
    };
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("family parameter"));
    }
    let xn = linalg::norm(&x);
    if xn == T::zero() {
        return Err(Error::BadParameter("x must be nonzero".into()));
    }
    let n = s_gamma_normal(s);
    let tol = T::lit(1e-10).max(T::lit(64.0) * T::epsilon());
    if linalg::dot(&n, &x).abs() > tol * linalg::norm(&n) * xn {
        return Err(Error::BadParameter("x does not lie in S_Gamma".into()));
    }
    if let Some(first) = x.iter().find(|v| **v != T::zero()) {
        if *first < T::zero() {
            x = x.map(|v| -v);
        }
    }
    let q = q_matrix(s);
    let xqx = linalg::dot(&x, &linalg::mat_vec(&q, &x));
    if !(xqx > T::zero()) {
        return Err(Error::BadParameter(
            "x^T Q x must be positive for real Pauli symbols".into(),
        ));
    }

    let table = structure_constants(s);
    let sigma3 = Covector::area() * (T::two() * s.pauli_ratio().sqrt());
    let sigma1 = hat(&x, s) * (s.product() / (T::SQRT_2() * xqx.sqrt()));
    let sigma2 = bracket_with(&table, &sigma3, &sigma1) * (-T::half());
    let sigma = [central_symbol(s), sigma1, sigma2, sigma3];
    let to_a: Mat4<T> = sigma.map(|c| c.to_array());
    let from_a = linalg::inverse(&to_a)?;
    Ok(PauliBasis {
        sigma,
        strengths: *s,
        x_param: x,
        to_a,
        from_a,
    })
}

impl<T: Real> PauliBasis<T> {
    /// `a_i = sigma_i(b, Delta)`.
    pub fn to_pauli_coords(&self, p: &ExtendedPoint<T>) -> PauliCoords<T> {
        PauliCoords::new(linalg::mat_vec(&self.to_a, &p.to_array()))
    }

    pub fn from_pauli_coords(&self, a: &PauliCoords<T>) -> ExtendedPoint<T> {
        ExtendedPoint::from_array(linalg::mat_vec(&self.from_a, &a.a))
    }

    /// Components `c` of a functional in the Pauli basis: `xi = sum_i c_i sigma_i`.
    pub fn covector_components(&self, xi: &Covector<T>) -> [T; 4] {
        linalg::mat_vec(&linalg::transpose(&self.from_a), &xi.to_array())
    }

    /// Point of the sphere `a0 = mu` representing the binary collision of the
    /// pair opposite side `i` (`b_i = 0`, the other two sides equal).
    /// `None` if that ray does not meet the level `a0 = mu`.
    pub fn collision_point(&self, i: usize, mu: T) -> Option<PauliCoords<T>> {
        let mut b = [T::one(); 3];
        b[i] = T::zero();
        let ray = ExtendedPoint::new(b, T::zero());
        let a0 = self.sigma[0].apply(&ray);
        if !(a0 > T::zero()) {
            return None;
        }
        let p = ExtendedPoint::new(b.map(|v| v * mu / a0), T::zero());
        Some(self.to_pauli_coords(&p))
    }
}

/// Structure constants of the Pauli basis itself: `{sigma_i, sigma_j} = -2 eps_ijk sigma_k`
/// for `i, j, k` in `1..=3`, with `sigma_0` central. Inputs and output are
/// component vectors in the Pauli basis.
pub fn pauli_lie_bracket<T: Real>(c: &[T; 4], d: &[T; 4]) -> [T; 4] {
    let u = [c[1], c[2], c[3]];
    let v = [d[1], d[2], d[3]];
    let w = linalg::cross(&u, &v);
    let m2 = T::lit(-2.0);
    [T::zero(), m2 * w[0], m2 * w[1], m2 * w[2]]
}

/// Residuals of the defining relations of a Pauli basis, each relative to the
/// magnitude of the terms that cancel in it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PauliResiduals<T> {
    /// Max over cyclic `(i, j, k)` of `{sigma_i, sigma_j} + 2 sigma_k`.
    pub pauli: T,
    /// Max over `i` of `{sigma_0, sigma_i}`.
    pub center: T,
    /// Jacobi identity over all triples of the basis.
    pub jacobi: T,
}

impl<T: Real> PauliResiduals<T> {
    pub fn max(&self) -> T {
        self.pauli.max(self.center).max(self.jacobi)
    }
}

fn relative_residual<T: Real>(res: &Covector<T>, magnitude: &Covector<T>) -> T {
    res.max_abs() / magnitude.max_abs().max(tiny())
}

/// Checks the Pauli commutation relations, centrality of `sigma_0`, and the
/// Jacobi identity for a basis.
pub fn verify_pauli<T: Real>(pb: &PauliBasis<T>) -> PauliResiduals<T> {
    let table = structure_constants(&pb.strengths);
    let sg = &pb.sigma;
    let mut pauli = T::zero();
    for &(i, j, k) in &[(1, 2, 3), (2, 3, 1), (3, 1, 2)] {
        let res = bracket_with(&table, &sg[i], &sg[j]) + sg[k] * T::two();
        let mag = bracket_magnitude(&table, &sg[i], &sg[j]) + sg[k].abs() * T::two();
        pauli = pauli.max(relative_residual(&res, &mag));
    }
    let mut center = T::zero();
    for xi in sg.iter().skip(1).chain(Covector::standard_basis().iter()) {
        let res = bracket_with(&table, &sg[0], xi);
        let mag = bracket_magnitude(&table, &sg[0], xi);
        center = center.max(relative_residual(&res, &mag));
    }
    PauliResiduals {
        pauli,
        center,
        jacobi: jacobi_residual(&table, sg),
    }
}

/// Relative Jacobi residual of the bracket over all triples drawn from `basis`.
pub fn jacobi_residual<T: Real>(table: &[[Covector<T>; 4]; 4], basis: &[Covector<T>; 4]) -> T {
    let mut worst = T::zero();
    for p in 0..4 {
        for q in 0..4 {
            for r in 0..4 {
                let (x, y, z) = (&basis[p], &basis[q], &basis[r]);
                let term = |a: &Covector<T>, b: &Covector<T>, c: &Covector<T>| {
                    bracket_with(table, a, &bracket_with(table, b, c))
                };
                let mag_term = |a: &Covector<T>, b: &Covector<T>, c: &Covector<T>| {
                    bracket_magnitude(table, a, &bracket_magnitude(table, b, c))
                };
                let res = term(x, y, z) + term(y, z, x) + term(z, x, y);
                let mag = mag_term(x, y, z) + mag_term(y, z, x) + mag_term(z, x, y);
                worst = worst.max(relative_residual(&res, &mag));
            }
        }
    }
    worst
}

/// Casimirs in Pauli coordinates: `I2 = a0` and Heron's function
/// `H = 4 Gtot / (G1 G2 G3) (a1^2 + a2^2 + a3^2 - a0^2)`.
pub fn casimirs<T: Real>(a: &PauliCoords<T>, s: &VortexStrengths<T>) -> (T, T) {
    let [a0, a1, a2, a3] = a.a;
    let h = T::lit(4.0) / s.pauli_ratio() * (a1 * a1 + a2 * a2 + a3 * a3 - a0 * a0);
    (a0, h)
}
