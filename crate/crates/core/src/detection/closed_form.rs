//! Closed-form parity / Z expressions for MPS-family inputs, kept as an
//! independent check on the pair-sum engine.
//!
//! Two input classes are covered: a superposition `A|a> + B|ia> + C|-a> + D|-ia>`
//! (magnitudes `|A|..|D|`, relative phases fixed by `j`) against vacuum, and the
//! same against a coherent state. For the coherent class both `alpha` and `zeta`
//! are taken real and positive.
//!
//! [`Variant::Printed`] follows the published expressions symbol for symbol.
//! [`Variant::Corrected`] repairs the places where they disagree with the
//! engine and the Fock oracle.

use std::f64::consts::PI;

use crate::interferometer::MziConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Printed,
    Corrected,
}

/// Coefficient magnitudes `|A|, |B|, |C|, |D|` and the MPS index `j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub j: u8,
}

impl Coefficients {
    pub fn mps(j: u8) -> Self {
        Coefficients { a: 1.0, b: 1.0, c: 1.0, d: 1.0, j: j % 4 }
    }

    pub fn cs() -> Self {
        Coefficients { a: 1.0, b: 0.0, c: 0.0, d: 0.0, j: 0 }
    }

    /// `|i alpha> + |-i alpha>`.
    pub fn ecss() -> Self {
        Coefficients { a: 0.0, b: 1.0, c: 0.0, d: 1.0, j: 0 }
    }

    pub fn x(&self) -> f64 {
        self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
    }

    pub fn y(&self) -> f64 {
        self.a * self.c + self.b * self.d
    }

    pub fn v(&self) -> f64 {
        (self.a + self.c) * (self.b + self.d)
    }

    fn cos_j_pi(&self) -> f64 {
        if self.j % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    fn j_half_pi(&self) -> f64 {
        self.j as f64 * PI / 2.0
    }
}

/// `|N_j|^2` for the given coefficients.
pub fn norm_sq(coef: &Coefficients, alpha2: f64, variant: Variant) -> f64 {
    let y_decay = match variant {
        Variant::Printed => (-alpha2).exp(),
        Variant::Corrected => (-2.0 * alpha2).exp(),
    };
    let s = coef.x()
        + 2.0 * coef.y() * y_decay * coef.cos_j_pi()
        + 2.0 * coef.v() * (-alpha2).exp() * (alpha2 - coef.j_half_pi()).cos();
    1.0 / s
}

/// Scalar intermediates of the closed forms at one `(alpha, zeta, j, config)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormContext {
    pub variant: Variant,
    pub alpha2: f64,
    pub zeta2: f64,
    pub j: u8,
    pub t2: f64,
    pub r2: f64,
    pub p: f64,
    pub q: f64,
    /// Real part of `q'`; its imaginary part `j pi` enters as `cos(j pi)`.
    pub q_prime_re: f64,
    pub x: f64,
    pub dp: f64,
    pub dx: f64,
    pub g: f64,
    pub w: f64,
    pub u: f64,
    pub o: f64,
    pub s1: f64,
    pub s2: f64,
    pub t1: f64,
    pub t2_: f64,
    pub dg: f64,
    pub dw: f64,
    pub du: f64,
    pub d_o: f64,
    pub ds1: f64,
    pub ds2: f64,
    pub dt1: f64,
    pub dt2: f64,
}

impl ClosedFormContext {
    pub fn new(alpha2: f64, zeta2: f64, j: u8, cfg: &MziConfig, variant: Variant) -> Self {
        let (t2, r2, phi) = (cfg.loss_t * cfg.loss_t, cfg.loss_r * cfg.loss_r, cfg.phi);
        let (sh, ch) = ((phi / 2.0).sin(), (phi / 2.0).cos());
        let (s, c) = (phi.sin(), phi.cos());
        let j_half_pi = j as f64 * PI / 2.0;

        let x = t2 * ch * ch + r2;
        let p = alpha2 * t2 * sh * sh;
        let q = alpha2 * x - j_half_pi;
        let (dp, dx) = match variant {
            Variant::Printed => (0.5 * alpha2 * t2 * s * s, -0.5 * t2 * s * s),
            Variant::Corrected => (0.5 * alpha2 * t2 * s, -0.5 * t2 * s),
        };

        let (am, zm) = (alpha2.sqrt(), zeta2.sqrt());
        let g = alpha2 * t2 * sh * sh + zeta2 * t2 * ch * ch;
        let w = t2 * am * zm * s;
        let u = r2 - t2 * c;
        let o = r2 + t2 * c;
        let dg = 0.5 * (alpha2 - zeta2) * t2 * s;
        let dw = t2 * am * zm * c;
        let du = t2 * s;
        let d_o = match variant {
            Variant::Printed => -t2 * c,
            Variant::Corrected => -t2 * s,
        };

        ClosedFormContext {
            variant,
            alpha2,
            zeta2,
            j: j % 4,
            t2,
            r2,
            p,
            q,
            q_prime_re: -alpha2 * x,
            x,
            dp,
            dx,
            g,
            w,
            u,
            o,
            s1: u * zeta2 - w,
            s2: u * zeta2 + w,
            t1: o * alpha2 - w,
            t2_: o * alpha2 + w,
            dg,
            dw,
            du,
            d_o,
            ds1: du * zeta2 - dw,
            ds2: du * zeta2 + dw,
            dt1: d_o * alpha2 - dw,
            dt2: d_o * alpha2 + dw,
        }
    }

    fn y_factor(&self) -> f64 {
        match self.variant {
            Variant::Printed => 1.0,
            Variant::Corrected => 2.0,
        }
    }

    fn w_factor(&self) -> f64 {
        match self.variant {
            Variant::Printed => 1.0,
            Variant::Corrected => 2.0,
        }
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `P(n)` at port a, second input vacuum.
pub fn vacuum_probability(coef: &Coefficients, ctx: &ClosedFormContext, n: usize) -> f64 {
    let (a2, p, q) = (ctx.alpha2, ctx.p, ctx.q);
    let nf = factorial(n);
    let x_term = coef.x() * (-p + a2).exp() * p.powi(n as i32) / nf;
    // e^{-iq} (-ip)^n + c.c. = 2 p^n cos(q + n pi/2)
    let v_term = coef.v() * 2.0 * p.powi(n as i32) * (q + n as f64 * PI / 2.0).cos() / nf;
    let y_term = coef.y() * 2.0 * ctx.q_prime_re.exp() * coef.cos_j_pi() * (-p).powi(n as i32) / nf;
    norm_sq(coef, a2, ctx.variant) * (-a2).exp() * (x_term + v_term + y_term)
}

/// `(P(+), P(-))`, second input vacuum.
pub fn vacuum_binary(coef: &Coefficients, ctx: &ClosedFormContext) -> (f64, f64) {
    let (a2, p, q) = (ctx.alpha2, ctx.p, ctx.q);
    let n2 = norm_sq(coef, a2, ctx.variant);
    let side = |sign: f64| {
        n2 * (-a2).exp()
            * (0.5 * coef.x() * a2.exp() * (1.0 + sign * (-2.0 * p).exp())
                + coef.v() * ((q + p).cos() + sign * (q - p).cos())
                + coef.y() * (-a2).exp() * (1.0 + sign * (2.0 * p).exp()) * coef.cos_j_pi())
    };
    (side(1.0), side(-1.0))
}

pub fn vacuum_parity(coef: &Coefficients, ctx: &ClosedFormContext) -> f64 {
    let (a2, p, q) = (ctx.alpha2, ctx.p, ctx.q);
    norm_sq(coef, a2, ctx.variant)
        * (-a2).exp()
        * (coef.x() * (-(2.0 * p - a2)).exp()
            + 2.0 * coef.v() * (q - p).cos()
            + ctx.y_factor() * coef.y() * (2.0 * p - a2).exp() * coef.cos_j_pi())
}

pub fn vacuum_parity_derivative(coef: &Coefficients, ctx: &ClosedFormContext) -> f64 {
    let (a2, p, q, dp) = (ctx.alpha2, ctx.p, ctx.q, ctx.dp);
    norm_sq(coef, a2, ctx.variant)
        * (-a2).exp()
        * (-2.0 * dp * coef.x() * (-(2.0 * p - a2)).exp()
            + 4.0 * coef.v() * dp * (q - p).sin()
            + 2.0 * dp * ctx.y_factor() * coef.y() * (2.0 * p - a2).exp() * coef.cos_j_pi())
}

pub fn vacuum_z(coef: &Coefficients, ctx: &ClosedFormContext) -> f64 {
    let (a2, p, q, x) = (ctx.alpha2, ctx.p, ctx.q, ctx.x);
    norm_sq(coef, a2, ctx.variant)
        * (coef.x() * (-p).exp()
            + 2.0 * (-a2).exp() * coef.v() * q.cos()
            + ctx.y_factor() * coef.y() * (-a2 * (1.0 + x)).exp() * coef.cos_j_pi())
}

pub fn vacuum_z_derivative(coef: &Coefficients, ctx: &ClosedFormContext) -> f64 {
    let (a2, p, q, x, dp, dx) = (ctx.alpha2, ctx.p, ctx.q, ctx.x, ctx.dp, ctx.dx);
    norm_sq(coef, a2, ctx.variant)
        * (-dp * coef.x() * (-p).exp() + 2.0 * dp * (-a2).exp() * coef.v() * q.sin()
            - ctx.y_factor() * coef.y() * a2 * dx * (-a2 * (1.0 + x)).exp() * coef.cos_j_pi())
}

pub fn coherent_parity(coef: &Coefficients, ctx: &ClosedFormContext) -> f64 {
    let Coefficients { a, b, c, d, .. } = *coef;
    let (g, w, jh) = (ctx.g, ctx.w_factor() * ctx.w, coef.j_half_pi());
    let cj = coef.cos_j_pi();
    let diag = a * a * (-2.0 * g - w).exp() + (b * b + d * d) * (-2.0 * g).exp() + c * c * (-2.0 * g + w).exp();
    let cross = 2.0 * (a * b + a * d) * ctx.s1.exp() * (ctx.t1 - jh).cos()
        + 2.0 * (b * c + c * d) * ctx.s2.exp() * (ctx.t2_ - jh).cos()
        + 2.0 * b * d * (ctx.s1 - ctx.t1).exp() * (2.0 * ctx.w - 2.0 * jh).cos()
        + 2.0 * a * c * (ctx.s1 - ctx.t1).exp() * cj;
    norm_sq(coef, ctx.alpha2, ctx.variant) * (diag + (-(ctx.alpha2 + ctx.zeta2)).exp() * cross)
}

pub fn coherent_parity_derivative(coef: &Coefficients, ctx: &ClosedFormContext) -> f64 {
    let Coefficients { a, b, c, d, .. } = *coef;
    let k = ctx.w_factor();
    let (g, w, dg, dw, jh) = (ctx.g, k * ctx.w, ctx.dg, k * ctx.dw, coef.j_half_pi());
    let cj = coef.cos_j_pi();
    let diag = a * a * (-2.0 * g - w).exp() * (-2.0 * dg - dw)
        + (b * b + d * d) * (-2.0 * g).exp() * (-2.0 * dg)
        + c * c * (-2.0 * g + w).exp() * (-2.0 * dg + dw);
    let e1 = ctx.s1.exp();
    let e2 = ctx.s2.exp();
    let e3 = (ctx.s1 - ctx.t1).exp();
    let cross = 2.0 * (a * b + a * d) * (e1 * ctx.ds1 * (ctx.t1 - jh).cos() - e1 * ctx.dt1 * (ctx.t1 - jh).sin())
        + 2.0 * (b * c + c * d) * (e2 * ctx.ds2 * (ctx.t2_ - jh).cos() - e2 * ctx.dt2 * (ctx.t2_ - jh).sin())
        + 2.0
            * b
            * d
            * (e3 * (ctx.ds1 - ctx.dt1) * (2.0 * ctx.w - 2.0 * jh).cos()
                - 2.0 * ctx.dw * e3 * (2.0 * ctx.w - 2.0 * jh).sin())
        + 2.0 * a * c * e3 * (ctx.ds1 - ctx.dt1) * cj;
    norm_sq(coef, ctx.alpha2, ctx.variant) * (diag + (-(ctx.alpha2 + ctx.zeta2)).exp() * cross)
}

pub fn coherent_z(coef: &Coefficients, ctx: &ClosedFormContext) -> f64 {
    let Coefficients { a, b, c, d, .. } = *coef;
    let (a2, z2, g, w, jh) = (ctx.alpha2, ctx.zeta2, ctx.g, ctx.w, coef.j_half_pi());
    let cj = coef.cos_j_pi();
    let diag = a * a * (-g - w).exp() + (b * b + d * d) * (-g).exp() + c * c * (-g + w).exp();
    let e3 = (0.5 * (ctx.s1 - ctx.t1) + 0.5 * (z2 - a2)).exp();
    let cross = (a * b + a * d) * (0.5 * ctx.s1 + 0.5 * z2).exp() * (0.5 * (ctx.t1 + a2) - jh).cos()
        + (b * c + c * d) * (0.5 * ctx.s2 + 0.5 * z2).exp() * (0.5 * (ctx.t2_ + a2) - jh).cos()
        + b * d * e3 * (2.0 * jh - w).cos()
        + a * c * e3 * cj;
    norm_sq(coef, a2, ctx.variant) * (diag + 2.0 * (-(a2 + z2)).exp() * cross)
}

pub fn coherent_z_derivative(coef: &Coefficients, ctx: &ClosedFormContext) -> f64 {
    let Coefficients { a, b, c, d, .. } = *coef;
    let (a2, z2, g, w, dg, dw, jh) = (ctx.alpha2, ctx.zeta2, ctx.g, ctx.w, ctx.dg, ctx.dw, coef.j_half_pi());
    let cj = coef.cos_j_pi();
    let diag = a * a * (-g - w).exp() * (-dg - dw)
        + (b * b + d * d) * (-g).exp() * (-dg)
        + c * c * (-g + w).exp() * (-dg + dw);
    let e1 = (0.5 * ctx.s1 + 0.5 * z2).exp();
    let e2 = (0.5 * ctx.s2 + 0.5 * z2).exp();
    let e3 = (0.5 * (ctx.s1 - ctx.t1) + 0.5 * (z2 - a2)).exp();
    let (ph1, ph2) = (0.5 * (ctx.t1 + a2) - jh, 0.5 * (ctx.t2_ + a2) - jh);
    let cross = (a * b + a * d) * (0.5 * ctx.ds1 * e1 * ph1.cos() - 0.5 * ctx.dt1 * e1 * ph1.sin())
        + (b * c + c * d) * (0.5 * ctx.ds2 * e2 * ph2.cos() - 0.5 * ctx.dt2 * e2 * ph2.sin())
        + b * d * (0.5 * (ctx.ds1 - ctx.dt1) * e3 * (2.0 * jh - w).cos() + dw * e3 * (2.0 * jh - w).sin())
        + 0.5 * (ctx.ds1 - ctx.dt1) * a * c * e3 * cj;
    norm_sq(coef, a2, ctx.variant) * (diag + 2.0 * (-(a2 + z2)).exp() * cross)
}

/// `(P(+), P(-))` with a coherent second input.
pub fn coherent_binary(coef: &Coefficients, ctx: &ClosedFormContext) -> (f64, f64) {
    let Coefficients { a, b, c, d, .. } = *coef;
    let (a2, z2, g, jh) = (ctx.alpha2, ctx.zeta2, ctx.g, coef.j_half_pi());
    let w = ctx.w_factor() * ctx.w;
    let cj = coef.cos_j_pi();
    let (p, q) = (ctx.p, ctx.q);
    let bd_base = match ctx.variant {
        Variant::Printed => (a2 - z2).exp(),
        Variant::Corrected => (z2 - a2).exp(),
    };
    let side = |sign: f64| {
        let diag = a * a * (1.0 + sign * (-2.0 * g - w).exp()) / 2.0
            + (b * b + d * d) * (1.0 + sign * (-2.0 * g).exp()) / 2.0
            + c * c * (1.0 + sign * (-2.0 * g + w).exp()) / 2.0;
        let e3 = (ctx.s1 - ctx.t1).exp();
        let cross = (a * b + a * d) * (z2.exp() * (q + p).cos() + sign * ctx.s1.exp() * (q - p - ctx.w).cos())
            + (b * c + c * d) * (z2.exp() * (q + p).cos() + sign * ctx.s2.exp() * (q - p + ctx.w).cos())
            + b * d * (bd_base * cj + sign * e3 * (2.0 * jh - 2.0 * ctx.w).cos())
            + a * c * (bd_base + sign * e3) * cj;
        norm_sq(coef, a2, ctx.variant) * (diag + (-(a2 + z2)).exp() * cross)
    };
    (side(1.0), side(-1.0))
}
