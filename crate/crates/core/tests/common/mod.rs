//! Test-only numerical oracles, independent of the library's code paths.
#![allow(dead_code, clippy::excessive_precision)]

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
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

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, (k - g).abs() * h)
}

/// Global adaptive Gauss-Kronrod over a finite interval: repeatedly bisects
/// the sub-interval with the largest error estimate.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let (k, e) = gk15(&f, a, b);
    let mut parts = vec![(a, b, k, e)];
    for _ in 0..5000 {
        let total_err: f64 = parts.iter().map(|p| p.3).sum();
        if total_err <= tol {
            break;
        }
        let (idx, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .unwrap();
        let (lo, hi, _, _) = parts.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (k1, e1) = gk15(&f, lo, mid);
        let (k2, e2) = gk15(&f, mid, hi);
        parts.push((lo, mid, k1, e1));
        parts.push((mid, hi, k2, e2));
    }
    let mut vals: Vec<f64> = parts.iter().map(|p| p.2).collect();
    vals.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
    vals.iter().sum()
}

/// Integral over `[lo, hi]` where either end may be infinite. The bulk
/// around `center` is split at multiples of `scale`; unbounded tails beyond
/// the outermost split use a rational variable change.
pub fn integrate_over<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, center: f64, scale: f64, tol: f64) -> f64 {
    let guard = |v: f64| if v.is_finite() { v } else { 0.0 };
    let mut cuts: Vec<f64> = [
        -64.0, -16.0, -8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 64.0,
    ]
    .iter()
    .map(|k| center + k * scale)
    .filter(|&x| x > lo && x < hi)
    .collect();
    if lo.is_finite() {
        cuts.insert(0, lo);
    }
    if hi.is_finite() {
        cuts.push(hi);
    }
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += integrate(|x| guard(f(x)), w[0], w[1], tol);
    }
    let first = cuts[0];
    let last = *cuts.last().unwrap();
    if !lo.is_finite() {
        total += integrate(
            |u| {
                let x = first - scale * u / (1.0 - u);
                guard(f(x) * scale / ((1.0 - u) * (1.0 - u)))
            },
            0.0,
            1.0,
            tol,
        );
    }
    if !hi.is_finite() {
        total += integrate(
            |u| {
                let x = last + scale * u / (1.0 - u);
                guard(f(x) * scale / ((1.0 - u) * (1.0 - u)))
            },
            0.0,
            1.0,
            tol,
        );
    }
    total
}

/// Trapezoid-free rectangle rule: Σ ordinates · step.
pub fn rectangle_volume(ordinates: &[f64], step: f64) -> f64 {
    ordinates.iter().map(|q| q * step).sum()
}
