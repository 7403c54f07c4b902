//! Oracles shared by the integration tests. Nothing here calls into the
//! library's numerical code.

#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

/// Double-exponential (exp-sinh) quadrature over `(0, inf)` of an integrand
/// supplied in log form as a function of `ln x`. Working in `ln x` keeps
/// integrable endpoint singularities such as `x^(a-1)` with small `a`
/// representable far below the smallest positive double.
pub fn integrate_half_line(log_f: impl Fn(f64) -> f64) -> f64 {
    let h = 1.0 / 128.0;
    let mut sum = 0.0;
    let mut k = (-8.0 / h) as i64;
    while (k as f64) * h <= 5.0 {
        let t = k as f64 * h;
        let ln_x = FRAC_PI_2 * t.sinh();
        let ln_jac = ln_x + (FRAC_PI_2 * t.cosh()).ln();
        let term = (log_f(ln_x) + ln_jac).exp();
        if term.is_finite() {
            sum += term;
        }
        k += 1;
    }
    sum * h
}

/// `ln Gamma(x)` for `x > 0` from the Stirling series after shifting the
/// argument above 20.
pub fn ln_gamma(mut x: f64) -> f64 {
    let mut shift = 0.0;
    while x < 20.0 {
        shift += x.ln();
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))));
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + series - shift
}

/// Inverse Gaussian density with unit mean and variance `eta`, in log form.
pub fn ig_ln_pdf(w: f64, eta: f64) -> f64 {
    -0.5 * (2.0 * PI * eta * w * w * w).ln() - (w - 1.0) * (w - 1.0) / (2.0 * eta * w)
}

/// Log of the unit-mean gamma density with variance `v` (shape `1/v`,
/// scale `v`), as a function of `ln w`.
pub fn unit_gamma_ln_pdf_log_arg(ln_w: f64, v: f64) -> f64 {
    let a = 1.0 / v;
    (a - 1.0) * ln_w - ln_w.exp() / v - ln_gamma(a) - a * v.ln()
}

/// Log density of the two-component unit-mean gamma mixture, as a function
/// of `ln w`.
pub fn gl_ln_pdf_log_arg(ln_w: f64, eta: f64, epsilon: f64) -> f64 {
    let p = eta / (eta + epsilon);
    let a = p.ln() + unit_gamma_ln_pdf_log_arg(ln_w, eta);
    let b = (1.0 - p).ln() + unit_gamma_ln_pdf_log_arg(ln_w, epsilon);
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Frailty law in plain closed form.
#[derive(Debug, Clone, Copy)]
pub enum Law {
    Ig { eta: f64 },
    Gl { eta: f64, epsilon: f64 },
}

impl Law {
    pub fn ln_pdf_log_arg(&self, ln_w: f64) -> f64 {
        match *self {
            Law::Ig { eta } => {
                let w = ln_w.exp();
                if w == 0.0 || !w.is_finite() {
                    return f64::NEG_INFINITY;
                }
                ig_ln_pdf(w, eta)
            }
            Law::Gl { eta, epsilon } => gl_ln_pdf_log_arg(ln_w, eta, epsilon),
        }
    }

    /// `E[W^k exp(-s W)]` by quadrature.
    pub fn moment_transform(&self, s: f64, k: i32) -> f64 {
        integrate_half_line(|ln_w| self.ln_pdf_log_arg(ln_w) - s * ln_w.exp() + k as f64 * ln_w)
    }

    /// Laplace transform from the textbook closed forms.
    pub fn laplace(&self, s: f64) -> f64 {
        match *self {
            Law::Ig { eta } => ((1.0 - (1.0 + 2.0 * eta * s).sqrt()) / eta).exp(),
            Law::Gl { eta, epsilon } => {
                (eta * (1.0 + s * eta).powf(-1.0 / eta) + epsilon * (1.0 + s * epsilon).powf(-1.0 / epsilon))
                    / (eta + epsilon)
            }
        }
    }

    /// `-L'(s)` from the textbook closed forms.
    pub fn neg_laplace_deriv(&self, s: f64) -> f64 {
        match *self {
            Law::Ig { eta } => self.laplace(s) / (1.0 + 2.0 * eta * s).sqrt(),
            Law::Gl { eta, epsilon } => {
                (eta * (1.0 + s * eta).powf(-1.0 / eta - 1.0)
                    + epsilon * (1.0 + s * epsilon).powf(-1.0 / epsilon - 1.0))
                    / (eta + epsilon)
            }
        }
    }
}

/// Generalized Weibull survival, computed naively.
pub fn gw_survival(z: f64, zeta: f64, delta: f64, xi: f64) -> f64 {
    1.0 - (1.0 - (-delta * z.powf(xi)).exp()).powf(zeta)
}

/// Generalized Weibull cumulative hazard, naive apart from `expm1`/`ln_1p`
/// to keep small values accurate.
pub fn gw_cum_hazard(z: f64, zeta: f64, delta: f64, xi: f64) -> f64 {
    -(-(-(-delta * z.powf(xi)).exp_m1()).powf(zeta)).ln_1p()
}

/// Generalized Weibull density, computed naively.
pub fn gw_density(z: f64, zeta: f64, delta: f64, xi: f64) -> f64 {
    let e = (-delta * z.powf(xi)).exp();
    zeta * delta * xi * z.powf(xi - 1.0) * e * (1.0 - e).powf(zeta - 1.0)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}
