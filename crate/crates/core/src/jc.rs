//! Resonant damped Jaynes-Cummings model with a Lorentzian reservoir.
//!
//! With `q = λ² − 2γ₀λ` (so `d = √q`), all quantities are written through the
//! entire functions
//!
//! ```text
//! C(t) = cosh(d t/2),      S(t) = sinh(d t/2) / d
//! ```
//!
//! which become `cos`/`sin` (with `|d|`) for `q < 0` and stay well defined at
//! the critical coupling `q = 0`, where a power series in `q t²/4` is used.
//! Then
//!
//! ```text
//! b(t)  = e^{−λt/2} (C + λ S)
//! ḃ(t)  = −γ₀ λ e^{−λt/2} S
//! γ(t)  = −2 ḃ / b = 2γ₀λ S / (C + λ S)
//! ```

use crate::error::{Error, Result};

/// Below this value of `|q| t² / 4` the series form of `C` and `S` is used.
const SERIES_THRESHOLD: f64 = 1e-2;

fn check(t: f64, gamma0: f64, lambda: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("time must be finite and non-negative, got {t}")));
    }
    if !(gamma0 > 0.0 && lambda > 0.0 && gamma0.is_finite() && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "Jaynes-Cummings needs gamma0 > 0 and lambda > 0, got {gamma0}, {lambda}"
        )));
    }
    Ok(())
}

/// `q = λ² − 2γ₀λ`; negative values mean oscillatory (non-Markovian) dynamics.
pub fn discriminant(gamma0: f64, lambda: f64) -> f64 {
    lambda * lambda - 2.0 * gamma0 * lambda
}

/// Critical coupling `γ₀ = λ/2` separating the hyperbolic and oscillatory branches.
pub fn critical_gamma0(lambda: f64) -> f64 {
    0.5 * lambda
}

/// `(C(t), S(t))`.
fn cs(t: f64, q: f64) -> (f64, f64) {
    let x = q * t * t / 4.0;
    if x.abs() < SERIES_THRESHOLD {
        // C = Σ x^k/(2k)!, S = t/2 Σ x^k/(2k+1)!
        let mut c = 0.0;
        let mut s = 0.0;
        let mut term_c = 1.0;
        let mut term_s = 1.0;
        for k in 0..12 {
            c += term_c;
            s += term_s;
            let k = k as f64;
            term_c *= x / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
            term_s *= x / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
        }
        (c, 0.5 * t * s)
    } else if q > 0.0 {
        let d = q.sqrt();
        ((0.5 * d * t).cosh(), (0.5 * d * t).sinh() / d)
    } else {
        let d = (-q).sqrt();
        ((0.5 * d * t).cos(), (0.5 * d * t).sin() / d)
    }
}

/// Coherence factor `b_t`.
pub fn jc_b(t: f64, gamma0: f64, lambda: f64) -> Result<f64> {
    check(t, gamma0, lambda)?;
    let (c, s) = cs(t, discriminant(gamma0, lambda));
    Ok((-0.5 * lambda * t).exp() * (c + lambda * s))
}

/// Time derivative `ḃ_t`.
pub fn jc_b_dot(t: f64, gamma0: f64, lambda: f64) -> Result<f64> {
    check(t, gamma0, lambda)?;
    let (_, s) = cs(t, discriminant(gamma0, lambda));
    Ok(-gamma0 * lambda * (-0.5 * lambda * t).exp() * s)
}

/// Decay rate `γ(t)`. At a zero of `b_t` the rate diverges and
/// [`Error::RatePole`] is returned with the sign approached from below.
pub fn jc_rate(t: f64, gamma0: f64, lambda: f64) -> Result<f64> {
    check(t, gamma0, lambda)?;
    let (c, s) = cs(t, discriminant(gamma0, lambda));
    let den = c + lambda * s;
    let num = 2.0 * gamma0 * lambda * s;
    let g = num / den;
    // b is entire, so a denominator lost in rounding marks a zero of b
    if den.abs() <= 1e-12 * (c.abs() + (lambda * s).abs()) || !g.is_finite() {
        // b crosses zero from above when approached from below; ḃ < 0 there so γ → +∞.
        return Err(Error::RatePole { t, sign: '+' });
    }
    Ok(g)
}

/// First positive zero of `b_t` (a pole of the rate), if the coupling is
/// above critical: the smallest `t` with `tan(|d| t/2) = −|d|/λ`.
pub fn first_zero(gamma0: f64, lambda: f64) -> Option<f64> {
    nth_zero(0, gamma0, lambda)
}

/// `k`-th positive zero of `b_t` (`k = 0, 1, …`).
pub fn nth_zero(k: usize, gamma0: f64, lambda: f64) -> Option<f64> {
    let q = discriminant(gamma0, lambda);
    if q >= 0.0 {
        return None;
    }
    let d = (-q).sqrt();
    let u = std::f64::consts::PI - (d / lambda).atan() + k as f64 * std::f64::consts::PI;
    Some(2.0 * u / d)
}

/// Times in `(0, tau)` where `|b_t|²` has an extremum: zeros of `b_t` and of `ḃ_t`.
pub fn extrema_of_b_squared(tau: f64, gamma0: f64, lambda: f64) -> Vec<f64> {
    let q = discriminant(gamma0, lambda);
    if q >= 0.0 {
        return vec![];
    }
    let d = (-q).sqrt();
    let mut out = Vec::new();
    // zeros of ḃ: sin(d t/2) = 0
    let mut k = 1;
    loop {
        let t = 2.0 * k as f64 * std::f64::consts::PI / d;
        if t >= tau {
            break;
        }
        out.push(t);
        k += 1;
    }
    let mut k = 0;
    while let Some(t) = nth_zero(k, gamma0, lambda) {
        if t >= tau {
            break;
        }
        out.push(t);
        k += 1;
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}
