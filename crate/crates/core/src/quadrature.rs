//! Direct numerical integration of the volume form `dx dy dh / h³` over an
//! intersection of geodesic half-spaces. Slow, and independent of the closed
//! forms in [`crate::volume`]; used to cross-check them.

use crate::hypgeo::{HPoint, Plane, Side};

// Gauss–Kronrod 7/15 nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// One Gauss–Kronrod 7/15 panel: (Kronrod value, |Kronrod − Gauss|).
pub fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Globally adaptive Gauss–Kronrod: repeatedly bisects the panel with the
/// largest error estimate until the total estimate is below `tol` or the
/// panel budget is spent. Returns (value, estimated error).
pub fn integrate<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    const MAX_PANELS: usize = 2000;
    struct Panel {
        a: f64,
        b: f64,
        v: f64,
        e: f64,
    }
    impl PartialEq for Panel {
        fn eq(&self, o: &Self) -> bool {
            self.e == o.e
        }
    }
    impl Eq for Panel {}
    impl PartialOrd for Panel {
        fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(o))
        }
    }
    impl Ord for Panel {
        fn cmp(&self, o: &Self) -> std::cmp::Ordering {
            self.e.total_cmp(&o.e)
        }
    }
    let (v, e) = gk15(f, a, b);
    let mut heap = std::collections::BinaryHeap::from([Panel { a, b, v, e }]);
    let mut err = e;
    while err > tol && heap.len() < MAX_PANELS {
        let p = heap.pop().expect("non-empty");
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            heap.push(p);
            break;
        }
        let (lv, le) = gk15(f, p.a, m);
        let (rv, re) = gk15(f, m, p.b);
        err += le + re - p.e;
        heap.push(Panel { a: p.a, b: m, v: lv, e: le });
        heap.push(Panel { a: m, b: p.b, v: rv, e: re });
    }
    let value = heap.iter().map(|p| p.v).sum();
    let err = heap.iter().map(|p| p.e).sum();
    (value, err)
}

/// Intersection of geodesic half-spaces over a bounding rectangle.
#[derive(Debug, Clone)]
pub struct Region {
    pub halfspaces: Vec<(Plane, Side)>,
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl Region {
    /// `∫ dh/h³` over the vertical fiber above `(x, y)`; infinite when the
    /// fiber reaches the boundary plane.
    pub fn fiber(&self, x: f64, y: f64) -> f64 {
        let z = num_complex::Complex64::new(x, y);
        let mut lo = 0.0f64;
        let mut hi = f64::INFINITY;
        for (plane, side) in &self.halfspaces {
            match *plane {
                Plane::Vertical { .. } => {
                    let probe = HPoint { x, y, h: 1.0 };
                    if plane.side_value(&probe) * side.sign() < 0.0 {
                        return 0.0;
                    }
                }
                Plane::Hemisphere { center, radius } => {
                    let h2 = radius * radius - (z - center).norm_sqr();
                    match side {
                        Side::Positive if h2 > 0.0 => lo = lo.max(h2.sqrt()),
                        Side::Positive => {}
                        Side::Negative if h2 > 0.0 => hi = hi.min(h2.sqrt()),
                        Side::Negative => return 0.0,
                    }
                }
            }
        }
        if lo >= hi {
            return 0.0;
        }
        if lo == 0.0 {
            return f64::INFINITY;
        }
        0.5 * (1.0 / (lo * lo) - if hi.is_finite() { 1.0 / (hi * hi) } else { 0.0 })
    }

    /// Nested adaptive quadrature; returns (value, estimated error).
    pub fn volume(&self, tol: f64) -> (f64, f64) {
        let (x0, x1) = self.x;
        let (y0, y1) = self.y;
        let inner_tol = tol / (x1 - x0).abs().max(1e-300);
        let mut outer = |x: f64| {
            let mut g = |y: f64| self.fiber(x, y);
            integrate(&mut g, y0, y1, inner_tol).0
        };
        integrate(&mut outer, x0, x1, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn gauss_kronrod_polynomials_and_singularity() {
        let (v, _) = gk15(&mut |x: f64| x.powi(10), 0.0, 1.0);
        assert!((v - 1.0 / 11.0).abs() < 1e-15);
        let (v, _) = integrate(&mut |x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10);
        assert!((v - 2.0).abs() < 1e-8);
    }

    #[test]
    fn prism_over_square() {
        // h from 1 to ∞ over the unit square: ∫ dh/h³ = ½.
        let region = Region {
            halfspaces: vec![(Plane::hemisphere(Complex64::new(0.5, 0.5), 5.0).unwrap(), Side::Positive)],
            x: (0.0, 1.0),
            y: (0.0, 1.0),
        };
        let (v, _) = region.volume(1e-10);
        let exact: f64 = {
            let mut f = |x: f64| {
                let mut g = |y: f64| 0.5 / (25.0 - (x - 0.5).powi(2) - (y - 0.5).powi(2));
                integrate(&mut g, 0.0, 1.0, 1e-13).0
            };
            integrate(&mut f, 0.0, 1.0, 1e-13).0
        };
        assert!((v - exact).abs() < 1e-9);
    }
}
