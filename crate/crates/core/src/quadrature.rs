//! Adaptive composite Simpson quadrature with forced subdivision nodes.
//!
//! Every interval between consecutive breakpoints is integrated
//! independently, so kinks and jumps of the integrand placed at breakpoints
//! never sit inside a Simpson panel. Panels are bisected until the
//! Richardson estimate `|S2 - S1| / 15` meets a share of the global
//! tolerance proportional to the panel length.

use crate::error::{Error, Result};

/// Tolerance settings for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    /// Relative tolerance, measured against `∫|f|` over the whole range.
    pub rel_tol: f64,
    /// Absolute floor, so identically small integrands terminate.
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            rel_tol: 1e-10,
            abs_tol: 1e-300,
            max_depth: 48,
        }
    }
}

impl Quadrature {
    /// Tighter setting used for potentials, whose second differences are
    /// divided by `h²`.
    pub fn fine() -> Self {
        Quadrature {
            rel_tol: 1e-14,
            abs_tol: 1e-300,
            max_depth: 48,
        }
    }

    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Quadrature {
            rel_tol,
            ..Quadrature::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
}

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Integrate `f` over `[a, b]`, splitting at every breakpoint strictly
/// inside the interval. `a > b` integrates with reversed sign.
pub fn integrate<F>(f: F, a: f64, b: f64, breakpoints: &[f64], cfg: &Quadrature) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error_estimate: 0.0,
        });
    }
    if a > b {
        let r = integrate(f, b, a, breakpoints, cfg)?;
        return Ok(Integral {
            value: -r.value,
            error_estimate: r.error_estimate,
        });
    }

    let mut nodes = Vec::with_capacity(breakpoints.len() + 2);
    nodes.push(a);
    nodes.extend(breakpoints.iter().copied().filter(|&p| p > a && p < b));
    nodes.push(b);
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();

    // Seed panels: each node interval cut into four, which also gives the
    // scale `∫|f|` the relative tolerance refers to.
    const SEED_CUTS: usize = 4;
    let mut seeds = Vec::with_capacity((nodes.len() - 1) * SEED_CUTS);
    let mut scale = 0.0;
    for w in nodes.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let step = (hi - lo) / SEED_CUTS as f64;
        for c in 0..SEED_CUTS {
            let pa = lo + c as f64 * step;
            let pb = if c + 1 == SEED_CUTS { hi } else { pa + step };
            let (fa, fm, fb) = (f(pa), f(0.5 * (pa + pb)), f(pb));
            scale += simpson(pa, pb, fa.abs(), fm.abs(), fb.abs());
            seeds.push((pa, pb, fa, fm, fb));
        }
    }

    let target = (cfg.rel_tol * scale).max(cfg.abs_tol);
    let width = b - a;
    let mut stack: Vec<Panel> = seeds
        .into_iter()
        .map(|(pa, pb, fa, fm, fb)| Panel {
            a: pa,
            b: pb,
            fa,
            fm,
            fb,
            whole: simpson(pa, pb, fa, fm, fb),
            tol: target * (pb - pa) / width,
            depth: 0,
        })
        .collect();

    let mut value = 0.0;
    let mut compensation = 0.0;
    let mut error = 0.0;
    let mut exhausted = false;
    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(p.a, m, p.fa, flm, p.fm);
        let right = simpson(m, p.b, p.fm, frm, p.fb);
        let diff = left + right - p.whole;
        let at_floor = m <= p.a || m >= p.b;
        if diff.abs() <= 15.0 * p.tol || p.depth >= cfg.max_depth || at_floor {
            if diff.abs() > 15.0 * p.tol {
                exhausted = true;
            }
            // Kahan summation keeps the accumulated rounding below the
            // tolerances used for potentials.
            let term = left + right + diff / 15.0;
            let y = term - compensation;
            let t = value + y;
            compensation = (t - value) - y;
            value = t;
            error += diff.abs() / 15.0;
        } else {
            let tol = 0.5 * p.tol;
            stack.push(Panel {
                a: m,
                b: p.b,
                fa: p.fm,
                fm: frm,
                fb: p.fb,
                whole: right,
                tol,
                depth: p.depth + 1,
            });
            stack.push(Panel {
                a: p.a,
                b: m,
                fa: p.fa,
                fm: flm,
                fb: p.fm,
                whole: left,
                tol,
                depth: p.depth + 1,
            });
        }
    }

    if !value.is_finite() || (exhausted && error > target) {
        return Err(Error::QuadratureNonConvergence {
            achieved: error,
            requested: target,
        });
    }
    Ok(Integral {
        value,
        error_estimate: error,
    })
}

/// Composite Simpson rule on uniformly spaced samples. An even number of
/// intervals uses the 1/3 rule throughout; an odd number closes with a 3/8
/// panel. Two samples fall back to the trapezoid rule.
pub fn simpson_samples(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (values[0] + values[1]),
        3 => h / 3.0 * (values[0] + 4.0 * values[1] + values[2]),
        _ => {
            let intervals = n - 1;
            let (simpson_end, tail) = if intervals.is_multiple_of(2) {
                (n - 1, 0.0)
            } else {
                let k = n - 4;
                (
                    k,
                    3.0 * h / 8.0
                        * (values[k] + 3.0 * values[k + 1] + 3.0 * values[k + 2] + values[k + 3]),
                )
            };
            let mut s = values[0] + values[simpson_end];
            for (i, v) in values.iter().enumerate().take(simpson_end).skip(1) {
                s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
            }
            h / 3.0 * s + tail
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomials_are_exact() {
        let cfg = Quadrature::default();
        let r = integrate(|x| x * x * x - 2.0 * x + 1.0, -1.0, 3.0, &[], &cfg).unwrap();
        // x^4/4 - x^2 + x on [-1, 3]
        assert_relative_eq!(
            r.value,
            (81.0 / 4.0 - 9.0 + 3.0) - (0.25 - 1.0 - 1.0),
            epsilon = 1e-13
        );
    }

    #[test]
    fn kink_at_breakpoint() {
        let cfg = Quadrature::default();
        let r = integrate(|x: f64| (x - 0.3).abs(), -1.0, 1.0, &[0.3], &cfg).unwrap();
        assert_relative_eq!(r.value, 0.5 * 1.3 * 1.3 + 0.5 * 0.7 * 0.7, epsilon = 1e-14);
    }

    #[test]
    fn smooth_transcendental() {
        let cfg = Quadrature::with_rel_tol(1e-12);
        let r = integrate(f64::exp, 0.0, 2.0, &[], &cfg).unwrap();
        assert_relative_eq!(r.value, 2f64.exp() - 1.0, max_relative = 1e-12);
        let r = integrate(f64::sin, 0.0, std::f64::consts::PI, &[], &cfg).unwrap();
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let cfg = Quadrature::default();
        let r = integrate(|x| x, 2.0, 0.0, &[], &cfg).unwrap();
        assert_relative_eq!(r.value, -2.0, epsilon = 1e-14);
    }

    #[test]
    fn non_convergence_is_reported() {
        let cfg = Quadrature {
            rel_tol: 1e-15,
            abs_tol: 0.0,
            max_depth: 3,
        };
        let err = integrate(|x: f64| x.sqrt(), 0.0, 1.0, &[], &cfg).unwrap_err();
        match err {
            Error::QuadratureNonConvergence {
                achieved,
                requested,
            } => assert!(achieved > requested),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sample_rule_odd_and_even() {
        let h = 0.1;
        let even: Vec<f64> = (0..11).map(|i| (i as f64 * h).powi(3)).collect();
        assert_relative_eq!(simpson_samples(&even, h), 0.25, epsilon = 1e-14);
        let odd: Vec<f64> = (0..12).map(|i| (i as f64 * h).powi(3)).collect();
        assert_relative_eq!(
            simpson_samples(&odd, h),
            1.1f64.powi(4) / 4.0,
            epsilon = 1e-13
        );
    }
}
