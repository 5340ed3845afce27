//! Finite-difference kernels used as independent oracles.
//!
//! The step rule is `h = max(1e-6 |x|, 1e-8)` per coordinate for first
//! derivatives. Second derivatives use `h = max(1e-4 |x|, 1e-4)`, roughly
//! `eps^(1/4)`, which balances truncation against rounding for a 3-point stencil.
//! Every kernel takes a fallible closure; when a probe leaves the admissible
//! set the step is halved (up to [`MAX_SHRINK`] times) before giving up.

use nalgebra::{SMatrix, SVector};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Number of step halvings attempted before a probe is declared impossible.
pub const MAX_SHRINK: u32 = 30;

fn unit<T: Real, const N: usize>(j: usize, value: T) -> SVector<T, N> {
    let mut e = SVector::<T, N>::zeros();
    e[j] = value;
    e
}

/// Default first-derivative step for coordinate value `x`.
pub fn step_first<T: Real>(x: T) -> T {
    (lit::<T>(1e-6) * x.abs()).max(lit(1e-8))
}

/// Default second-derivative step for coordinate value `x`.
pub fn step_second<T: Real>(x: T) -> T {
    (lit::<T>(1e-4) * x.abs()).max(lit(1e-4))
}

/// Central difference of a scalar function along `dir`, scaled so that the
/// result approximates the directional derivative `∇f·dir`.
pub fn directional<T, F, const N: usize>(f: F, x: &SVector<T, N>, dir: &SVector<T, N>, h: T) -> Result<T>
where
    T: Real,
    F: Fn(&SVector<T, N>) -> Result<T>,
{
    let mut h = h;
    for _ in 0..MAX_SHRINK {
        let plus = f(&(x + dir * h));
        let minus = f(&(x - dir * h));
        if let (Ok(fp), Ok(fm)) = (plus, minus) {
            return Ok((fp - fm) / (h + h));
        }
        h *= lit(0.5);
    }
    Err(Error::FiniteDifference)
}

/// Central-difference gradient of a scalar function.
pub fn gradient<T, F, const N: usize>(f: F, x: &SVector<T, N>) -> Result<SVector<T, N>>
where
    T: Real,
    F: Fn(&SVector<T, N>) -> Result<T>,
{
    let mut g = SVector::<T, N>::zeros();
    for j in 0..N {
        let e = unit::<T, N>(j, T::one());
        g[j] = directional(&f, x, &e, step_first(x[j]))?;
    }
    Ok(g)
}

/// [`gradient`] with an explicit step per coordinate.
pub fn gradient_with_steps<T, F, const N: usize>(f: F, x: &SVector<T, N>, steps: &SVector<T, N>) -> Result<SVector<T, N>>
where
    T: Real,
    F: Fn(&SVector<T, N>) -> Result<T>,
{
    let mut g = SVector::<T, N>::zeros();
    for j in 0..N {
        let e = unit::<T, N>(j, T::one());
        g[j] = directional(&f, x, &e, steps[j])?;
    }
    Ok(g)
}

/// Fourth-order five-point gradient, `(-f(x+2h) + 8f(x+h) - 8f(x-h) + f(x-2h)) / 12h`.
///
/// Used where a relative agreement near `1e-10` is required; `h` is taken
/// as `1e-3` times the magnitude of the coordinate (floored at `floor`).
pub fn gradient5<T, F, const N: usize>(f: F, x: &SVector<T, N>, floor: T) -> Result<SVector<T, N>>
where
    T: Real,
    F: Fn(&SVector<T, N>) -> Result<T>,
{
    let steps = x.map(|xi| (lit::<T>(1e-3) * xi.abs()).max(floor));
    gradient5_with_steps(f, x, &steps)
}

/// [`gradient5`] with an explicit step per coordinate.
pub fn gradient5_with_steps<T, F, const N: usize>(f: F, x: &SVector<T, N>, steps: &SVector<T, N>) -> Result<SVector<T, N>>
where
    T: Real,
    F: Fn(&SVector<T, N>) -> Result<T>,
{
    let mut g = SVector::<T, N>::zeros();
    for j in 0..N {
        let e = unit::<T, N>(j, T::one());
        let mut h = steps[j];
        let mut done = false;
        for _ in 0..MAX_SHRINK {
            let two = h + h;
            let probes = (f(&(x + e * two)), f(&(x + e * h)), f(&(x - e * h)), f(&(x - e * two)));
            if let (Ok(p2), Ok(p1), Ok(m1), Ok(m2)) = probes {
                g[j] = (m2 - p2 + lit::<T>(8.0) * (p1 - m1)) / (lit::<T>(12.0) * h);
                done = true;
                break;
            }
            h *= lit(0.5);
        }
        if !done {
            return Err(Error::FiniteDifference);
        }
    }
    Ok(g)
}

/// Central-difference Jacobian of a vector map, one column per coordinate.
pub fn jacobian<T, F, const N: usize, const M: usize>(f: F, x: &SVector<T, N>) -> Result<SMatrix<T, M, N>>
where
    T: Real,
    F: Fn(&SVector<T, N>) -> Result<SVector<T, M>>,
{
    jacobian_with_steps(f, x, &x.map(step_first))
}

/// [`jacobian`] with an explicit step per coordinate.
pub fn jacobian_with_steps<T, F, const N: usize, const M: usize>(f: F, x: &SVector<T, N>, steps: &SVector<T, N>) -> Result<SMatrix<T, M, N>>
where
    T: Real,
    F: Fn(&SVector<T, N>) -> Result<SVector<T, M>>,
{
    let mut jac = SMatrix::<T, M, N>::zeros();
    for j in 0..N {
        let e = unit::<T, N>(j, T::one());
        let mut h = steps[j];
        let mut done = false;
        for _ in 0..MAX_SHRINK {
            if let (Ok(fp), Ok(fm)) = (f(&(x + e * h)), f(&(x - e * h))) {
                jac.set_column(j, &((fp - fm) / (h + h)));
                done = true;
                break;
            }
            h *= lit(0.5);
        }
        if !done {
            return Err(Error::FiniteDifference);
        }
    }
    Ok(jac)
}

/// Second-order finite-difference Hessian of a scalar function.
///
/// Diagonal entries use the three-point stencil, off-diagonal entries the
/// four-point cross stencil.
pub fn hessian<T, F, const N: usize>(f: F, x: &SVector<T, N>) -> Result<SMatrix<T, N, N>>
where
    T: Real,
    F: Fn(&SVector<T, N>) -> Result<T>,
{
    hessian_steps(f, x, &x.map(step_second))
}

/// [`hessian`] with an explicit initial step per coordinate.
pub fn hessian_steps<T, F, const N: usize>(f: F, x: &SVector<T, N>, steps: &SVector<T, N>) -> Result<SMatrix<T, N, N>>
where
    T: Real,
    F: Fn(&SVector<T, N>) -> Result<T>,
{
    let mut steps = *steps;
    for _ in 0..MAX_SHRINK {
        match hessian_with_steps(&f, x, &steps) {
            Ok(h) => return Ok(h),
            Err(_) => steps *= lit::<T>(0.5),
        }
    }
    Err(Error::FiniteDifference)
}

/// Richardson extrapolation `(4 H(h/2) - H(h)) / 3` of [`hessian_steps`],
/// fourth order in `h`. Permits steps large enough that rounding stays
/// negligible when some coordinates are small.
pub fn hessian_richardson<T, F, const N: usize>(f: F, x: &SVector<T, N>, steps: &SVector<T, N>) -> Result<SMatrix<T, N, N>>
where
    T: Real,
    F: Fn(&SVector<T, N>) -> Result<T>,
{
    let mut steps = *steps;
    for _ in 0..MAX_SHRINK {
        let coarse = hessian_with_steps(&f, x, &steps);
        let fine = hessian_with_steps(&f, x, &(steps * lit::<T>(0.5)));
        if let (Ok(c), Ok(h)) = (coarse, fine) {
            return Ok((h * lit::<T>(4.0) - c) / lit::<T>(3.0));
        }
        steps *= lit::<T>(0.5);
    }
    Err(Error::FiniteDifference)
}

fn hessian_with_steps<T, F, const N: usize>(f: &F, x: &SVector<T, N>, h: &SVector<T, N>) -> Result<SMatrix<T, N, N>>
where
    T: Real,
    F: Fn(&SVector<T, N>) -> Result<T>,
{
    let f0 = f(x)?;
    let mut hess = SMatrix::<T, N, N>::zeros();
    for i in 0..N {
        let ei = unit::<T, N>(i, h[i]);
        let fp = f(&(x + ei))?;
        let fm = f(&(x - ei))?;
        hess[(i, i)] = (fp - f0 - f0 + fm) / (h[i] * h[i]);
        for j in 0..i {
            let ej = unit::<T, N>(j, h[j]);
            let fpp = f(&(x + ei + ej))?;
            let fpm = f(&(x + ei - ej))?;
            let fmp = f(&(x - ei + ej))?;
            let fmm = f(&(x - ei - ej))?;
            let v = (fpp - fpm - fmp + fmm) / (lit::<T>(4.0) * h[i] * h[j]);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    Ok(hess)
}

/// Symmetric relative error `|a - b| / max(|a|, |b|, floor)`.
pub fn rel_err<T: Real>(a: T, b: T, floor: T) -> T {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Vector2, Vector3};

    #[test]
    fn gradient_of_quadratic() {
        let f = |v: &Vector2<f64>| Ok(v[0] * v[0] + 3.0 * v[0] * v[1]);
        let g = gradient(f, &Vector2::new(2.0, -1.0)).unwrap();
        assert!((g[0] - 1.0).abs() < 1e-8);
        assert!((g[1] - 6.0).abs() < 1e-8);
    }

    #[test]
    fn five_point_is_fourth_order() {
        let f = |v: &Vector2<f64>| Ok(v[0].exp() * v[1].sin());
        let x = Vector2::new(0.3, 1.1);
        let g = gradient5(f, &x, 1e-6).unwrap();
        assert!((g[0] - 0.3f64.exp() * 1.1f64.sin()).abs() < 1e-12);
        assert!((g[1] - 0.3f64.exp() * 1.1f64.cos()).abs() < 1e-12);
    }

    #[test]
    fn hessian_of_cubic() {
        let f = |v: &Vector3<f64>| Ok(v[0] * v[1] * v[2] + v[0].powi(3));
        let h = hessian(f, &Vector3::new(1.0, 2.0, 3.0)).unwrap();
        assert!((h[(0, 0)] - 6.0).abs() < 1e-6);
        assert!((h[(0, 1)] - 3.0).abs() < 1e-6);
        assert!((h[(1, 2)] - 1.0).abs() < 1e-6);
        assert!((h[(2, 2)]).abs() < 1e-6);
    }

    #[test]
    fn step_shrinks_at_domain_edge() {
        // ln is only defined for positive arguments; a huge initial step must shrink.
        let f = |v: &Vector2<f64>| if v[0] > 0.0 { Ok(v[0].ln()) } else { Err(Error::FiniteDifference) };
        let d = directional(f, &Vector2::new(1e-3, 0.0), &Vector2::new(1.0, 0.0), 1.0).unwrap();
        assert!(d.is_finite() && d > 1e3);
    }

    #[test]
    fn jacobian_of_linear_map() {
        let f = |v: &Vector2<f64>| Ok(Vector2::new(2.0 * v[0] - v[1], 5.0 * v[1]));
        let j: nalgebra::Matrix2<f64> = jacobian(f, &Vector2::new(0.4, 0.7)).unwrap();
        assert!((j[(0, 0)] - 2.0).abs() < 1e-8);
        assert!((j[(0, 1)] + 1.0).abs() < 1e-8);
        assert!((j[(1, 1)] - 5.0).abs() < 1e-8);
    }
}
