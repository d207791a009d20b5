//! Globally adaptive Gauss–Kronrod (7/15) integration over a chain of
//! breakpoints. A trailing `+∞` breakpoint is handled by the map
//! `x = a + s·u/(1−u)`, `u ∈ [0, 1)`.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_47,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_SEGMENTS: usize = 4000;

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-13,
            rel: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for (j, (&x, &wk)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = h * x;
        let pair = f(c - dx) + f(c + dx);
        k += wk * pair;
        if j % 2 == 1 {
            g += WG[j / 2] * pair;
        }
    }
    Segment {
        a,
        b,
        value: k * h,
        err: ((k - g) * h).abs(),
    }
}

/// Integrate `f` over consecutive breakpoints `points[0] < points[1] < …`.
/// The last point may be `f64::INFINITY`; `tail_scale` sets the length scale
/// of the map used on that final piece.
pub fn integrate<F>(f: F, points: &[f64], tail_scale: f64, tol: Tolerance) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if points.len() < 2 {
        return Ok(0.0);
    }
    let mut segments: Vec<Segment> = Vec::new();
    let mut tail: Option<(f64, f64)> = None;
    for pair in points.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if b.is_infinite() {
            tail = Some((a, tail_scale));
            continue;
        }
        if b > a {
            segments.push(kronrod(&f, a, b));
        }
    }

    let mapped = |u: f64| -> f64 {
        let (a, s) = tail.expect("mapped only used with a tail");
        let one_minus = 1.0 - u;
        let x = a + s * u / one_minus;
        let v = f(x) * s / (one_minus * one_minus);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    // tail segments live in u-space
    let mut tail_segments: Vec<Segment> = Vec::new();
    if tail.is_some() {
        tail_segments.push(kronrod(&mapped, 0.0, 1.0));
    }

    for _ in 0..MAX_SEGMENTS {
        let total: f64 = segments.iter().chain(&tail_segments).map(|s| s.value).sum();
        let err: f64 = segments.iter().chain(&tail_segments).map(|s| s.err).sum();
        if err <= tol.abs.max(tol.rel * total.abs()) {
            return Ok(total);
        }
        let worst_fin = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err));
        let worst_tail = tail_segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err));
        let pick_tail = match (worst_fin, worst_tail) {
            (Some((_, s)), Some((_, t))) => t.err > s.err,
            (None, Some(_)) => true,
            _ => false,
        };
        if pick_tail {
            let (i, s) = worst_tail.map(|(i, s)| (i, *s)).unwrap();
            let m = 0.5 * (s.a + s.b);
            tail_segments[i] = kronrod(&mapped, s.a, m);
            tail_segments.push(kronrod(&mapped, m, s.b));
        } else {
            let (i, s) = match worst_fin {
                Some((i, s)) => (i, *s),
                None => break,
            };
            let m = 0.5 * (s.a + s.b);
            if m <= s.a || m >= s.b {
                break;
            }
            segments[i] = kronrod(&f, s.a, m);
            segments.push(kronrod(&f, m, s.b));
        }
    }
    let total: f64 = segments.iter().chain(&tail_segments).map(|s| s.value).sum();
    let err: f64 = segments.iter().chain(&tail_segments).map(|s| s.err).sum();
    if err <= 1e3 * tol.abs.max(tol.rel * total.abs()) {
        // close enough: subdivision budget exhausted near an integrable singularity
        Ok(total)
    } else {
        Err(Error::Quadrature(format!(
            "estimated error {err:e} after {MAX_SEGMENTS} subdivisions (value {total})"
        )))
    }
}
