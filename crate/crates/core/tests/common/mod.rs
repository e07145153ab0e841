//! Independent oracles. None of these call the closed forms under test.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        let x = a + k as f64 * h;
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(x);
    }
    s * h / 3.0
}

/// `Λ(x) = −∫₀ˣ ln|2 sin u| du`, by quadrature with the logarithmic
/// singularity at 0 removed analytically, reduced by period `π` and oddness.
pub fn lobachevsky(x: f64) -> f64 {
    let mut y = x.rem_euclid(PI);
    let mut sign = 1.0;
    if y > PI / 2.0 {
        y = PI - y;
        sign = -1.0;
    }
    if y == 0.0 {
        return 0.0;
    }
    // ln(2 sin u) = ln 2 + ln u + ln(sin u / u), the last term smooth.
    let smooth = |u: f64| if u == 0.0 { 0.0 } else { (u.sin() / u).ln() };
    let integral = y * 2f64.ln() + (y * y.ln() - y) + simpson(smooth, 0.0, y, 4000);
    -sign * integral
}

/// Volume of the ideal tetrahedron with shape `z`, from the oracle `Λ`.
pub fn ideal_volume(z: Complex64) -> f64 {
    let one = Complex64::new(1.0, 0.0);
    lobachevsky(z.arg()) + lobachevsky((one / (one - z)).arg()) + lobachevsky((one - one / z).arg())
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// `∫∫ f` over the planar triangle `abc` by a Duffy-collapsed tensor
/// Gauss–Legendre rule of order `n`, on a `split × split` subdivision.
pub fn triangle_integral(f: impl Fn(Complex64) -> f64, a: Complex64, b: Complex64, c: Complex64, n: usize) -> f64 {
    let gl = gauss_legendre(n);
    let area2 = ((b - a).conj() * (c - a)).im;
    let mut s = 0.0;
    for &(u, wu) in &gl {
        let u = 0.5 * (u + 1.0);
        for &(v, wv) in &gl {
            let v = 0.5 * (v + 1.0);
            // (u, v) ∈ [0,1]² ↦ (u, (1 − u) v) on the unit simplex.
            let p = a + (b - a) * u + (c - a) * ((1.0 - u) * v);
            s += 0.25 * wu * wv * (1.0 - u) * f(p);
        }
    }
    s * area2.abs()
}

/// Volume above the hemisphere `|z − c| ≤ r` and over the planar triangle,
/// `∫ dA / (2(r² − |z − c|²))`.
pub fn cone_over_triangle(center: Complex64, radius: f64, tri: [Complex64; 3]) -> f64 {
    let f = |z: Complex64| 0.5 / (radius * radius - (z - center).norm_sqr());
    triangle_integral(f, tri[0], tri[1], tri[2], 60)
}

/// Whether some choice of signs for the lifts makes every word evaluate to
/// `+I`; `eval` returns the sign of a word under the given flips.
pub fn liftable_by_enumeration(generators: usize, eval: impl Fn(&[bool]) -> Vec<i8>) -> bool {
    (0..1u32 << generators).any(|mask| {
        let flips: Vec<bool> = (0..generators).map(|g| (mask >> g) & 1 == 1).collect();
        eval(&flips).iter().all(|&s| s == 1)
    })
}
