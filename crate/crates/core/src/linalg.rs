//! Fixed-size dense helpers. Everything here is tiny (at most 6x6).

use crate::error::{Error, Result};
use crate::real::Real;

pub type Mat3<T> = [[T; 3]; 3];
pub type Mat4<T> = [[T; 4]; 4];

pub fn mat_vec<T: Real, const R: usize, const C: usize>(m: &[[T; C]; R], v: &[T; C]) -> [T; R] {
    std::array::from_fn(|i| (0..C).map(|j| m[i][j] * v[j]).sum())
}

pub fn mat_mul<T: Real, const N: usize>(a: &[[T; N]; N], b: &[[T; N]; N]) -> [[T; N]; N] {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..N).map(|k| a[i][k] * b[k][j]).sum()))
}

pub fn transpose<T: Real, const N: usize>(a: &[[T; N]; N]) -> [[T; N]; N] {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i]))
}

pub fn identity<T: Real, const N: usize>() -> [[T; N]; N] {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { T::one() } else { T::zero() }))
}

pub fn dot<T: Real, const N: usize>(a: &[T; N], b: &[T; N]) -> T {
    a.iter().zip(b.iter()).map(|(&x, &y)| x * y).sum()
}

pub fn cross<T: Real>(a: &[T; 3], b: &[T; 3]) -> [T; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm<T: Real, const N: usize>(a: &[T; N]) -> T {
    dot(a, a).sqrt()
}

pub fn max_abs<T: Real, const N: usize>(a: &[T; N]) -> T {
    a.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff<T: Real, const R: usize, const C: usize>(a: &[[T; C]; R], b: &[[T; C]; R]) -> T {
    let mut m = T::zero();
    for i in 0..R {
        for j in 0..C {
            m = m.max((a[i][j] - b[i][j]).abs());
        }
    }
    m
}

/// Gauss–Jordan inverse with partial pivoting.
pub fn inverse<T: Real, const N: usize>(a: &[[T; N]; N]) -> Result<[[T; N]; N]> {
    let mut m = *a;
    let mut inv: [[T; N]; N] = identity();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(T::zero(), |s, x| s.max(x.abs()));
    if !(scale > T::zero()) || !scale.is_finite() {
        return Err(Error::SingularMatrix);
    }
    for col in 0..N {
        let pivot = (col..N)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        if m[pivot][col].abs() <= scale * T::epsilon() * T::lit(N as f64) {
            return Err(Error::SingularMatrix);
        }
        m.swap(col, pivot);
        inv.swap(col, pivot);
        let p = m[col][col];
        for j in 0..N {
            m[col][j] = m[col][j] / p;
            inv[col][j] = inv[col][j] / p;
        }
        for i in 0..N {
            if i != col {
                let f = m[i][col];
                if f != T::zero() {
                    for j in 0..N {
                        m[i][j] = m[i][j] - f * m[col][j];
                        inv[i][j] = inv[i][j] - f * inv[col][j];
                    }
                }
            }
        }
    }
    Ok(inv)
}

/// Determinant by Gaussian elimination.
pub fn determinant<T: Real, const N: usize>(a: &[[T; N]; N]) -> T {
    let mut m = *a;
    let mut det = T::one();
    for col in 0..N {
        let pivot = (col..N)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        if m[pivot][col] == T::zero() {
            return T::zero();
        }
        if pivot != col {
            m.swap(col, pivot);
            det = -det;
        }
        det = det * m[col][col];
        for i in col + 1..N {
            let f = m[i][col] / m[col][col];
            for j in col..N {
                m[i][j] = m[i][j] - f * m[col][j];
            }
        }
    }
    det
}

/// Cholesky factorisation; `None` unless the matrix is symmetric positive definite.
pub fn cholesky<T: Real, const N: usize>(a: &[[T; N]; N]) -> Option<[[T; N]; N]> {
    let mut l = [[T::zero(); N]; N];
    for i in 0..N {
        for j in 0..=i {
            let s: T = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = a[i][i] - s;
                if !(d > T::zero()) {
                    return None;
                }
                l[i][j] = d.sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    Some(l)
}
