use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Highest derivative order carried by the jets.
pub const MAX_ORDER: usize = 6;
const GRID: usize = 10_000;
const HEADROOM: f64 = 1.05;

/// Truncated Taylor expansion `Σ c_j h^j` at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet(pub [f64; MAX_ORDER + 1]);

impl Jet {
    pub fn constant(c: f64) -> Self {
        let mut a = [0.0; MAX_ORDER + 1];
        a[0] = c;
        Jet(a)
    }

    /// The identity function `t` expanded at `t0`.
    pub fn variable(t0: f64) -> Self {
        let mut a = [0.0; MAX_ORDER + 1];
        a[0] = t0;
        a[1] = 1.0;
        Jet(a)
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    /// The `h`-th derivative.
    pub fn derivative(&self, h: usize) -> f64 {
        let fact: f64 = (1..=h).map(|j| j as f64).product();
        self.0[h] * fact
    }

    pub fn scale(self, s: f64) -> Self {
        Jet(self.0.map(|c| c * s))
    }

    pub fn recip(self) -> Self {
        let f = self.0;
        let mut r = [0.0; MAX_ORDER + 1];
        r[0] = 1.0 / f[0];
        for n in 1..=MAX_ORDER {
            let s: f64 = (1..=n).map(|k| f[k] * r[n - k]).sum();
            r[n] = -s * r[0];
        }
        Jet(r)
    }

    pub fn exp(self) -> Self {
        let f = self.0;
        let mut h = [0.0; MAX_ORDER + 1];
        h[0] = f[0].exp();
        for n in 1..=MAX_ORDER {
            let s: f64 = (1..=n).map(|k| k as f64 * f[k] * h[n - k]).sum();
            h[n] = s / n as f64;
        }
        Jet(h)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut a = self.0;
        for (x, y) in a.iter_mut().zip(o.0) {
            *x += y;
        }
        Jet(a)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet(self.0.map(|c| -c))
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut a = [0.0; MAX_ORDER + 1];
        for i in 0..=MAX_ORDER {
            for j in 0..=MAX_ORDER - i {
                a[i + j] += self.0[i] * o.0[j];
            }
        }
        Jet(a)
    }
}

/// `exp(−1/u)` for `u > 0`, zero otherwise.
fn bump(u: Jet) -> Jet {
    if u.value() <= 0.0 {
        Jet::constant(0.0)
    } else {
        (-u.recip()).exp()
    }
}

/// The smooth step `ψ(u) = φ(u)/(φ(u) + φ(1 − u))`.
pub fn smooth_step(u: Jet) -> Jet {
    if u.value() <= 0.0 {
        return Jet::constant(0.0);
    }
    if u.value() >= 1.0 {
        return Jet::constant(1.0);
    }
    let a = bump(u);
    let b = bump(Jet::constant(1.0) - u);
    a * (a + b).recip()
}

fn smooth_step_value(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / u).exp();
        let b = (-1.0 / (1.0 - u)).exp();
        a / (a + b)
    }
}

/// A weight on `[M, 2M]` equal to 1 on `[aM, bM]` with `C^∞` ramps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothWeight {
    pub m: f64,
    pub plateau: (f64, f64),
    /// Bounds for `sup |b^{(h)}|·M^h`, `h = 0..=6`.
    pub derivative_constants: Vec<f64>,
}

impl SmoothWeight {
    pub fn new(m: f64, plateau_lo: f64, plateau_hi: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidArgument(format!("weight scale {m} must be positive")));
        }
        if !(1.0 < plateau_lo && plateau_lo < plateau_hi && plateau_hi < 2.0) {
            return Err(Error::InvalidArgument(format!(
                "plateau factors must satisfy 1 < {plateau_lo} < {plateau_hi} < 2"
            )));
        }
        let mut w = SmoothWeight { m, plateau: (plateau_lo, plateau_hi), derivative_constants: Vec::new() };
        w.derivative_constants = w.sample_derivative_maxima(GRID).into_iter().map(|c| c * HEADROOM).collect();
        Ok(w)
    }

    pub fn standard(m: f64) -> Result<Self> {
        Self::new(m, 1.1, 1.9)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.m, 2.0 * self.m)
    }

    pub fn breakpoints(&self) -> [f64; 4] {
        [self.m, self.plateau.0 * self.m, self.plateau.1 * self.m, 2.0 * self.m]
    }

    pub fn eval(&self, t: f64) -> f64 {
        let [a, b, c, d] = self.breakpoints();
        if t <= a || t >= d {
            0.0
        } else if t < b {
            smooth_step_value((t - a) / (b - a))
        } else if t <= c {
            1.0
        } else {
            smooth_step_value((d - t) / (d - c))
        }
    }

    /// Taylor jet of the weight at `t`.
    pub fn jet(&self, t: f64) -> Jet {
        let [a, b, c, d] = self.breakpoints();
        let x = Jet::variable(t);
        if t <= a || t >= d {
            Jet::constant(0.0)
        } else if t < b {
            smooth_step((x - Jet::constant(a)).scale(1.0 / (b - a)))
        } else if t <= c {
            Jet::constant(1.0)
        } else {
            smooth_step((Jet::constant(d) - x).scale(1.0 / (d - c)))
        }
    }

    /// `max_j |b^{(h)}(t_j)|·M^h` over `n + 1` equally spaced points of the support.
    pub fn sample_derivative_maxima(&self, n: usize) -> Vec<f64> {
        let (lo, hi) = self.support();
        let mut out = vec![0.0f64; MAX_ORDER + 1];
        for j in 0..=n {
            let t = lo + (hi - lo) * j as f64 / n as f64;
            let jet = self.jet(t);
            for (h, slot) in out.iter_mut().enumerate() {
                *slot = slot.max(jet.derivative(h).abs() * self.m.powi(h as i32));
            }
        }
        out
    }
}

/// The indicator of `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharpWeight {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Weight {
    Smooth(SmoothWeight),
    Sharp(SharpWeight),
}

impl Weight {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Weight::Smooth(w) => w.eval(t),
            Weight::Sharp(w) => {
                if w.lo <= t && t <= w.hi {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match self {
            Weight::Smooth(w) => w.support(),
            Weight::Sharp(w) => (w.lo, w.hi),
        }
    }

    /// Points where the weight may fail to be smooth or changes regime.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Weight::Smooth(w) => w.breakpoints().to_vec(),
            Weight::Sharp(w) => vec![w.lo, w.hi],
        }
    }

    /// The sharp indicator of this weight's plateau.
    pub fn plateau_indicator(&self) -> Weight {
        match self {
            Weight::Smooth(w) => Weight::Sharp(SharpWeight { lo: w.plateau.0 * w.m, hi: w.plateau.1 * w.m }),
            Weight::Sharp(w) => Weight::Sharp(w.clone()),
        }
    }

    /// Integers in the support.
    pub fn integer_range(&self) -> (i64, i64) {
        let (lo, hi) = self.support();
        (lo.ceil() as i64, hi.floor() as i64)
    }
}
