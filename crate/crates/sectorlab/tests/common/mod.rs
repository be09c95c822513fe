#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use sectorlab::divisor::DivisorInstance;
use sectorlab::numeric::ExactSum;
use sectorlab::GaussianInt;

pub fn trial_is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Plain Eratosthenes table.
pub fn prime_table(n: usize) -> Vec<bool> {
    let mut t = vec![true; n + 1];
    t[0] = false;
    if n >= 1 {
        t[1] = false;
    }
    let mut i = 2;
    while i * i <= n {
        if t[i] {
            let mut j = i * i;
            while j <= n {
                t[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    t
}

/// Every `a + bi` with `a > 0`, `b ≥ 0`, `a² + b² ≤ hi` that is a Gaussian prime,
/// decided from the primality of the norm alone.
pub fn brute_force_gaussian_primes(lo: u64, hi: u64) -> Vec<GaussianInt> {
    let table = prime_table(hi as usize);
    let mut out = Vec::new();
    let mut a = 1u64;
    while a * a <= hi {
        let mut b = 0u64;
        while a * a + b * b <= hi {
            let n = a * a + b * b;
            let prime = if b == 0 { table[a as usize] && a % 4 == 3 } else { table[n as usize] };
            if prime && n >= lo {
                out.push(GaussianInt::new(a as i64, b as i64));
            }
            b += 1;
        }
        a += 1;
    }
    out
}

/// `li(x) − li(2)` from the Ramanujan series for `li`.
pub fn offset_li(x: f64) -> f64 {
    fn li(x: f64) -> f64 {
        let l = x.ln();
        let mut term = 1.0;
        let mut sum = 0.0;
        for n in 1..400 {
            term *= l / n as f64;
            sum += term / n as f64;
            if term / (n as f64) < 1e-17 * sum {
                break;
            }
        }
        0.577_215_664_901_532_9 + l.ln() + sum
    }
    li(x) - li(2.0)
}

/// Circular distance of two angles on `[0, π/2)`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(FRAC_PI_2);
    d.min(FRAC_PI_2 - d)
}

fn arg_quarter(z: GaussianInt) -> f64 {
    (z.im as f64).atan2(z.re as f64).rem_euclid(FRAC_PI_2)
}

/// `T·Σ w_1w_2` over all ordered pairs within `1/T`, by a double loop in floating point.
pub fn brute_pair_sum(points: &[(GaussianInt, f64)], t: u64) -> f64 {
    let limit = 1.0 / t as f64;
    let args: Vec<f64> = points.iter().map(|p| arg_quarter(p.0)).collect();
    let total: ExactSum = (0..points.len())
        .into_par_iter()
        .map(|i| {
            let mut acc = ExactSum::new();
            for j in 0..points.len() {
                if circular_distance(args[i], args[j]) <= limit {
                    acc.add(points[i].1 * points[j].1);
                }
            }
            acc
        })
        .reduce(ExactSum::new, |mut a, b| {
            a.merge(&b);
            a
        });
    t as f64 * total.value()
}

/// All `t mod T` with `t² ≡ −1`, by trying every residue.
pub fn brute_roots(t: u64) -> Vec<u64> {
    (0..t).filter(|&r| (r * r + 1) % t == 0).collect()
}

fn weights_at(inst: &DivisorInstance, i: usize, m: i64) -> f64 {
    inst.weights[i].eval(m as f64)
}

/// The correlation sum by looping over `m1, m3, m4` and solving for `m2`.
pub fn naive_correlation(inst: &DivisorInstance) -> f64 {
    let r: Vec<(i64, i64)> = inst.weights.iter().map(|w| w.integer_range()).collect();
    let (t1, t2, k) = (inst.t1 as i64, inst.t2 as i64, inst.k);
    let total: ExactSum = (r[0].0..=r[0].1)
        .into_par_iter()
        .map(|m1| {
            let mut acc = ExactSum::new();
            for m3 in r[2].0..=r[2].1 {
                if (m1 * m1 + m3 * m3) % t1 != 0 {
                    continue;
                }
                for m4 in r[3].0..=r[3].1 {
                    let num = m3 * m4 + k;
                    if num <= 0 || num % m1 != 0 {
                        continue;
                    }
                    let m2 = num / m1;
                    if m2 < r[1].0 || m2 > r[1].1 || (m2 * m2 + m4 * m4) % t2 != 0 {
                        continue;
                    }
                    let v = ((weights_at(inst, 0, m1) * weights_at(inst, 1, m2)) * weights_at(inst, 2, m3))
                        * weights_at(inst, 3, m4);
                    acc.add(v);
                }
            }
            acc
        })
        .reduce(ExactSum::new, |mut a, b| {
            a.merge(&b);
            a
        });
    total.value()
}

/// The correlation sum by factoring `m3·m4 + k` and walking its divisors `m1`.
pub fn divisor_walk_correlation(inst: &DivisorInstance) -> f64 {
    let r: Vec<(i64, i64)> = inst.weights.iter().map(|w| w.integer_range()).collect();
    let k = inst.k;
    let top = (r[2].1 * r[3].1 + k.abs()) as usize;
    let mut spf = vec![0u32; top + 1];
    for i in 2..=top {
        if spf[i] == 0 {
            let mut j = i;
            while j <= top {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    let (t1, t2) = (inst.t1 as i64, inst.t2 as i64);
    let total: ExactSum = (r[2].0..=r[2].1)
        .into_par_iter()
        .map(|m3| {
            let mut acc = ExactSum::new();
            let mut divs = Vec::new();
            for m4 in r[3].0..=r[3].1 {
                let n = m3 * m4 + k;
                if n <= 0 {
                    continue;
                }
                divs.clear();
                divs.push(1i64);
                let mut rest = n as usize;
                while rest > 1 {
                    let p = spf[rest] as usize;
                    let mut e = 0;
                    while rest % p == 0 {
                        rest /= p;
                        e += 1;
                    }
                    let len = divs.len();
                    let mut pk = 1i64;
                    for _ in 0..e {
                        pk *= p as i64;
                        for i in 0..len {
                            divs.push(divs[i] * pk);
                        }
                    }
                }
                for &m1 in &divs {
                    let m2 = n / m1;
                    if m1 < r[0].0 || m1 > r[0].1 || m2 < r[1].0 || m2 > r[1].1 {
                        continue;
                    }
                    if (m1 * m1 + m3 * m3) % t1 != 0 || (m2 * m2 + m4 * m4) % t2 != 0 {
                        continue;
                    }
                    let v = ((weights_at(inst, 0, m1) * weights_at(inst, 1, m2)) * weights_at(inst, 2, m3))
                        * weights_at(inst, 3, m4);
                    acc.add(v);
                }
            }
            acc
        })
        .reduce(ExactSum::new, |mut a, b| {
            a.merge(&b);
            a
        });
    total.value()
}

/// Instances with `x ≤ 500` used for the elimination regression.
pub fn small_instances() -> Vec<DivisorInstance> {
    let mut out = Vec::new();
    for &x in &[60u64, 120, 250, 400, 500] {
        for &k in &[1i64, -1, 2, 3, -6] {
            for &(t1, t2) in &[(1u64, 1u64), (2, 1), (1, 5), (5, 1), (5, 13), (10, 13), (13, 2), (3, 1), (1, 7)] {
                let shapes: [[f64; 4]; 2] =
                    [[x as f64 / 2.0; 4], [x as f64 / 3.0, x as f64 / 2.0, x as f64 / 2.5, x as f64 / 2.0]];
                for scales in shapes {
                    if let Ok(inst) = DivisorInstance::smooth(x, k, t1, t2, scales, 0.6) {
                        out.push(inst.with_sharp_weights());
                        out.push(inst);
                    }
                }
            }
        }
    }
    out
}
