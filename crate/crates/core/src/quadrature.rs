//! Composite Simpson rule on an odd number of equally spaced nodes.

use crate::error::Error;

/// Integrates `f` over `[a, b]` with `nodes` equally spaced samples
/// (`nodes` odd, at least 3).
pub fn simpson<F, E>(mut f: F, a: f64, b: f64, nodes: usize) -> core::result::Result<f64, E>
where
    F: FnMut(f64) -> core::result::Result<f64, E>,
    E: From<Error>,
{
    if nodes < 3 || nodes.is_multiple_of(2) {
        return Err(Error::Config("Simpson rule needs an odd node count >= 3").into());
    }
    let intervals = nodes - 1;
    let h = (b - a) / intervals as f64;
    let mut acc = f(a)? + f(b)?;
    for i in 1..intervals {
        // Compute nodes from the index to avoid accumulated drift.
        let x = a + h * i as f64;
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(x)?;
    }
    Ok(acc * h / 3.0)
}

/// Mean of `f` over `[a, b]`.
pub fn simpson_mean<F, E>(f: F, a: f64, b: f64, nodes: usize) -> core::result::Result<f64, E>
where
    F: FnMut(f64) -> core::result::Result<f64, E>,
    E: From<Error>,
{
    Ok(simpson(f, a, b, nodes)? / (b - a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Result;
    use core::f64::consts::PI;

    fn ok(x: f64) -> Result<f64> {
        Ok(x)
    }

    #[test]
    fn exact_for_cubics() {
        let v = simpson(|x| ok(x * x * x - 2.0 * x + 1.0), -1.0, 2.0, 3).unwrap();
        // ∫ = [x⁴/4 − x² + x] from −1 to 2 = (4 − 4 + 2) − (1/4 − 1 − 1)
        assert!((v - 3.75).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_integrand_converges() {
        // ∫_0^π sin(40 x) dx = (1 − cos 40π)/40 = 0
        let v = simpson(|x| ok(libm::sin(40.0 * x)), 0.0, PI, 2001).unwrap();
        assert!(v.abs() < 1e-8);
        let m = simpson_mean(|x| ok(libm::cos(x)), 0.0, PI / 2.0, 101).unwrap();
        assert!((m - 2.0 / PI).abs() < 1e-9);
    }

    #[test]
    fn rejects_even_or_short_grids() {
        assert!(matches!(simpson(ok, 0.0, 1.0, 4), Err(Error::Config(_))));
        assert!(simpson(ok, 0.0, 1.0, 1).is_err());
    }
}
