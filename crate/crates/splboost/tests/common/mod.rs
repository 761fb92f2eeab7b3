#![allow(dead_code)]

use splboost_core::{Dataset, Label, RegularizerKind, SpRegularizer};

/// SplitMix64, used only to generate test fixtures.
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}

/// Random dataset whose labels depend noisily on a nonlinear score.
pub fn random_dataset(rng: &mut Rng, n: usize, d: usize, flip: f64) -> Dataset {
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let row: Vec<f64> = (0..d).map(|_| rng.range(-2.0, 2.0)).collect();
        let s: f64 = row.iter().enumerate().map(|(j, x)| x * (j as f64 + 1.0).sqrt()).sum();
        let mut y = if s + 0.3 * row[0] * row[0] > 0.2 {
            Label::Positive
        } else {
            Label::Negative
        };
        if rng.uniform() < flip {
            y = y.flipped();
        }
        rows.push(row);
        labels.push(y);
    }
    Dataset::from_rows(&rows, labels).unwrap()
}

pub fn random_regularizer(rng: &mut Rng) -> SpRegularizer {
    let lambda = rng.range(0.5, 10.0);
    match rng.below(4) {
        0 => SpRegularizer::hard(lambda),
        1 => SpRegularizer::linear_soft(lambda),
        2 => SpRegularizer::mixture(lambda, rng.range(0.5, lambda)),
        _ => SpRegularizer::polynomial_soft(lambda, 1.0 + rng.range(1e-3, 4.0)),
    }
    .unwrap()
}

/// Penalty written out independently of the library.
fn penalty(r: &SpRegularizer, v: f64) -> f64 {
    let lambda = r.lambda();
    match r.kind() {
        RegularizerKind::Hard => -lambda * v,
        RegularizerKind::LinearSoft => lambda * (0.5 * v * v - v),
        RegularizerKind::Mixture { gamma } => gamma * gamma / (v + gamma / lambda),
        RegularizerKind::PolynomialSoft { t } => lambda * (v.powf(t) / t - v),
    }
}

/// Brute-force minimizer of `v * loss + penalty(v)` over a grid on [0, 1].
pub fn grid_weight(r: &SpRegularizer, loss: f64, step: f64) -> f64 {
    let n = (1.0 / step).round() as usize;
    let mut best = (f64::INFINITY, 0.0);
    for k in 0..=n {
        let v = k as f64 / n as f64;
        let obj = v * loss + penalty(r, v);
        if obj < best.0 {
            best = (obj, v);
        }
    }
    best.1
}

/// Points where the latent weight is not smooth.
pub fn breakpoints(r: &SpRegularizer) -> Vec<f64> {
    match r.kind() {
        RegularizerKind::Mixture { gamma } => {
            let l = r.lambda();
            vec![(l * gamma / (l + gamma)).powi(2), l * l]
        }
        _ => vec![r.lambda()],
    }
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let flm = f(0.5 * (a + m));
    let frm = f(0.5 * (m + b));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + adaptive(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature of `f` on `[a, b]`, splitting at `breaks`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64]) -> f64 {
    let mut points = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(f64::total_cmp);
    points.extend(inner);
    points.push(b);
    points
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let (lo, hi) = (w[0], w[1]);
            let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            adaptive(f, lo, hi, fa, fm, fb, simpson(lo, hi, fa, fm, fb), 1e-12, 40)
        })
        .sum()
}

/// Golden-section minimizer of a unimodal function on `[lo, hi]`.
pub fn golden_min(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}
