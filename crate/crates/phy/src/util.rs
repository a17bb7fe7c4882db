//! Small numeric helpers shared by simulations and their oracles.

/// Complementary error function, Abramowitz & Stegun 7.1.26 rational
/// approximation (absolute error < 1.5e-7), mirrored for negative arguments.
pub fn erfc(x: f64) -> f64 {
    let ax = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * ax);
    let poly = t
        * (0.254829592
            + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    let e = poly * (-ax * ax).exp();
    if x >= 0.0 {
        e
    } else {
        2.0 - e
    }
}

/// Gaussian tail probability Q(x) = P(N(0,1) > x).
pub fn qfunc(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}
