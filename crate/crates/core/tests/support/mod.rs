//! Test-only numerical oracles. Nothing here calls into the library's
//! special functions or closed forms.

#![allow(dead_code)]

use twdf_core::{SystemConfig64, SystemParams64};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

fn adapt<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (val, err) = gk15(f, a, b);
    // the last clause stops refinement once the estimate is at roundoff
    if err <= tol || depth == 0 || (b - a).abs() < 1e-300 || err <= 1e-15 * val.abs() {
        return val;
    }
    let m = 0.5 * (a + b);
    adapt(f, a, m, tol * 0.5, depth - 1) + adapt(f, m, b, tol * 0.5, depth - 1)
}

/// Adaptive Gauss–Kronrod (7/15) integral of `f` over `[a, b]` to absolute
/// tolerance `tol`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    adapt(&mut f, a, b, tol, 50)
}

/// Integral over `[a, b]` split at the given interior points.
pub fn integrate_split<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, cuts: &[f64], tol: f64) -> f64 {
    let mut pts: Vec<f64> = cuts.iter().copied().filter(|&c| c > a && c < b).collect();
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut knots = vec![a];
    knots.extend(pts);
    knots.push(b);
    let share = tol / (knots.len() - 1) as f64;
    knots
        .windows(2)
        .map(|w| adapt(&mut f, w[0], w[1], share, 50))
        .sum()
}

fn ln_fact(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Gamma density written out directly.
pub fn pdf(v: f64, m: u32, theta: f64) -> f64 {
    if v <= 0.0 {
        return if m == 1 && v == 0.0 { 1.0 / theta } else { 0.0 };
    }
    ((m as f64 - 1.0) * v.ln() - v / theta - ln_fact(m - 1) - m as f64 * theta.ln()).exp()
}

/// Point beyond which a gamma(m, θ) tail is below ~1e-25.
pub fn tail_end(m: u32, theta: f64) -> f64 {
    theta * (70.0 + 12.0 * m as f64)
}

/// `Pr{V > lo}` by integrating the density.
pub fn survival(lo: f64, m: u32, theta: f64, tol: f64) -> f64 {
    let lo = lo.max(0.0);
    integrate(|v| pdf(v, m, theta), lo, lo + tail_end(m, theta), tol)
}

/// `∫_0^x t^{m-1} e^{-t} dt`
pub fn lower_gamma_quad(m: u32, x: f64) -> f64 {
    let f = |t: f64| if t == 0.0 { if m == 1 { 1.0 } else { 0.0 } } else { ((m as f64 - 1.0) * t.ln() - t).exp() };
    let mag = (x.powi(m as i32) / m as f64).min(ln_fact(m - 1).exp());
    integrate(f, 0.0, x, 1e-15 * mag)
}

/// `∫_x^∞ t^{m-1} e^{-t} dt`
pub fn upper_gamma_quad(m: u32, x: f64) -> f64 {
    let f = |t: f64| ((m as f64 - 1.0) * t.ln() - t).exp();
    let end = x + 200.0 + 20.0 * m as f64;
    let mag = ((m as f64 - 1.0) * x.max(1.0).ln() - x).exp();
    integrate(f, x, end, 1e-15 * mag.max(1e-300))
}

/// Closed-form-free evaluation of the joint relay success probability:
/// a 2-D integral of `f_X(x) f_Y(y)` over
/// `{x > Δ1, y > Δ1, x(x+y) > Δ2, y(x+y) > Δ2}`.
pub fn relay_success_2d(cfg: &SystemConfig64, tol: f64) -> f64 {
    let p = cfg.params();
    let kappa = p.hardware.k1().powi(2) + p.hardware.k2().powi(2);
    let gamma_th = 2f64.powf(3.0 * p.target_rate / p.block_time) - 1.0;
    let headroom = 1.0 - kappa * gamma_th;
    if headroom <= 0.0 {
        return 0.0;
    }
    let rho = p.tx_power / p.noise_power;
    let d1 = gamma_th / ((1.0 - p.beta) * headroom * rho);
    let d2 = gamma_th / (p.eta * p.beta * headroom * rho);
    let (ma, ta) = (p.channels.m_a(), p.channels.omega_a() / p.channels.m_a() as f64);
    let (mb, tb) = (p.channels.m_b(), p.channels.omega_b() / p.channels.m_b() as f64);

    // y must clear Δ1, the root of y(x+y) = Δ2, and Δ2/x - x
    let y_floor = |x: f64| {
        let root = (-x + (x * x + 4.0 * d2).sqrt()) / 2.0;
        d1.max(root).max(d2 / x - x)
    };
    let inner = |x: f64| {
        let lo = y_floor(x);
        let hi = lo + tail_end(mb, tb);
        let cuts = [tb * (mb as f64 - 1.0)];
        pdf(x, ma, ta) * integrate_split(|y| pdf(y, mb, tb), lo, hi, &cuts, tol * 1e-2)
    };
    let x_end = d1 + tail_end(ma, ta) + d2.sqrt();
    let cuts = [
        (d2 / 2.0).sqrt(),
        d2.sqrt(),
        d2 / d1 - d1,
        ta * (ma as f64 - 1.0),
        (-d1 + (d1 * d1 + 4.0 * d2).sqrt()) / 2.0,
    ];
    integrate_split(inner, d1, x_end, &cuts, tol)
}

/// Direct-link outage probability by integrating the density.
pub fn direct_outage_1d(cfg: &SystemConfig64, tol: f64) -> f64 {
    let p = cfg.params();
    let kappa = p.hardware.k1().powi(2) + p.hardware.k2().powi(2);
    let gamma_th = 2f64.powf(3.0 * p.target_rate / p.block_time) - 1.0;
    let headroom = 1.0 - kappa * gamma_th;
    if headroom <= 0.0 {
        return 1.0;
    }
    let rho = p.tx_power / p.noise_power;
    let limit = gamma_th / (rho * headroom);
    let (md, td) = (p.channels.m_d(), p.channels.omega_d() / p.channels.m_d() as f64);
    // beyond tail_end the density carries no measurable mass; clipping keeps
    // a narrow peak from hiding inside one wide panel
    let end = limit.min(tail_end(md, td));
    let cuts: Vec<f64> = (0..=8).map(|k| td * (md as f64 - 1.0 + 2.0 * k as f64)).collect();
    integrate_split(|z| pdf(z, md, td), 0.0, end, &cuts, tol)
}

pub fn reference() -> SystemConfig64 {
    SystemParams64::reference().validate().unwrap()
}

/// PS ratio that puts a config exactly on `Δ1 = √(Δ2/2)`:
/// `(1-β)² = 2ηβc` with `c = γ_th / ((1 - κγ_th) ρ)`.
pub fn boundary_beta(cfg: &SystemConfig64) -> f64 {
    let p = cfg.params();
    let kappa = p.hardware.k1().powi(2) + p.hardware.k2().powi(2);
    let gamma_th = 2f64.powf(3.0 * p.target_rate / p.block_time) - 1.0;
    let c = gamma_th / ((1.0 - kappa * gamma_th) * p.tx_power / p.noise_power);
    let s = 1.0 + p.eta * c;
    s - (s * s - 1.0).sqrt()
}
