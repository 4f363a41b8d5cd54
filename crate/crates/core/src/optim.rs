//! Small derivative-free maximizers. The objectives here contain `min(.)`
//! kinks and clamps, so only function values are used.

/// Result of a maximization run.
#[derive(Debug, Clone, PartialEq)]
pub struct Maximum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    pub max_iters: usize,
    /// Initial edge length along each coordinate.
    pub step: f64,
    pub ftol: f64,
    pub xtol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            max_iters: 400,
            step: 0.1,
            ftol: 1e-14,
            xtol: 1e-10,
        }
    }
}

fn eval<F: FnMut(&[f64]) -> f64>(f: &mut F, x: &[f64], evals: &mut usize) -> f64 {
    *evals += 1;
    let v = f(x);
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Nelder-Mead maximization from `start`.
///
/// The returned value is never below `f(start)`.
pub fn nelder_mead<F>(mut f: F, start: &[f64], opts: SimplexOptions) -> Maximum
where
    F: FnMut(&[f64]) -> f64,
{
    let n = start.len();
    let mut evals = 0;
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = eval(&mut f, start, &mut evals);
    simplex.push((start.to_vec(), v0));
    for i in 0..n {
        let mut x = start.to_vec();
        x[i] += if x[i].abs() > 1.0 {
            opts.step * x[i].abs()
        } else {
            opts.step
        };
        let v = eval(&mut f, &x, &mut evals);
        simplex.push((x, v));
    }

    for _ in 0..opts.max_iters {
        // best first
        simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        let size = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if (best - worst).abs() <= opts.ftol * (1.0 + best.abs()) && size <= opts.xtol {
            break;
        }

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let towards = |coef: f64, from: &[f64]| -> Vec<f64> {
            centroid
                .iter()
                .zip(from)
                .map(|(c, w)| c + coef * (w - c))
                .collect()
        };

        let worst_x = simplex[n].0.clone();
        let xr = towards(-1.0, &worst_x);
        let vr = eval(&mut f, &xr, &mut evals);
        if vr > simplex[0].1 {
            let xe = towards(-2.0, &worst_x);
            let ve = eval(&mut f, &xe, &mut evals);
            simplex[n] = if ve > vr { (xe, ve) } else { (xr, vr) };
            continue;
        }
        if vr > simplex[n - 1].1 {
            simplex[n] = (xr, vr);
            continue;
        }
        let (xc, vc) = if vr > simplex[n].1 {
            let xc = towards(-0.5, &worst_x);
            let vc = eval(&mut f, &xc, &mut evals);
            (xc, vc)
        } else {
            let xc = towards(0.5, &worst_x);
            let vc = eval(&mut f, &xc, &mut evals);
            (xc, vc)
        };
        if vc > vr.max(simplex[n].1) {
            simplex[n] = (xc, vc);
            continue;
        }
        // shrink towards the best vertex
        let bx = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = bx
                .iter()
                .zip(&vertex.0)
                .map(|(b, v)| b + 0.5 * (v - b))
                .collect();
            let v = eval(&mut f, &x, &mut evals);
            *vertex = (x, v);
        }
    }
    simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
    let (x, value) = simplex.swap_remove(0);
    Maximum { x, value, evals }
}

/// Golden-section maximization on `[lo, hi]`, returning `(argmax, max)`.
///
/// Exact for unimodal functions; otherwise a local maximum among the probes.
/// The endpoints are always probed.
pub fn golden_max<F>(mut f: F, lo: f64, hi: f64, iters: usize) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
    for x in [lo, hi] {
        let v = f(x);
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}

/// Dense grid scan followed by golden refinement around the best grid cell.
pub fn scan_then_golden<F>(mut f: F, lo: f64, hi: f64, grid: usize, iters: usize) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let grid = grid.max(2);
    let h = (hi - lo) / (grid - 1) as f64;
    let mut best = (lo, f64::NEG_INFINITY);
    let mut best_i = 0;
    for i in 0..grid {
        let x = if i + 1 == grid { hi } else { lo + h * i as f64 };
        let v = f(x);
        if v > best.1 {
            best = (x, v);
            best_i = i;
        }
    }
    let a = (lo + h * best_i.saturating_sub(1) as f64).max(lo);
    let b = (lo + h * (best_i + 1) as f64).min(hi);
    let refined = golden_max(&mut f, a, b, iters);
    if refined.1 > best.1 {
        refined
    } else {
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_finds_quadratic_peak() {
        let f = |x: &[f64]| -(x[0] - 1.0).powi(2) - 3.0 * (x[1] + 2.0).powi(2);
        let m = nelder_mead(
            f,
            &[0.0, 0.0],
            SimplexOptions {
                max_iters: 2000,
                ..Default::default()
            },
        );
        assert!((m.x[0] - 1.0).abs() < 1e-5);
        assert!((m.x[1] + 2.0).abs() < 1e-5);
        assert!(m.value > -1e-9);
    }

    #[test]
    fn simplex_never_worse_than_start() {
        let f = |x: &[f64]| -(x[0].abs()) - (x[1] - 0.3).abs().min(0.2);
        let start = [0.0, 0.3];
        let m = nelder_mead(f, &start, SimplexOptions::default());
        assert!(m.value >= f(&start));
    }

    #[test]
    fn golden_on_concave() {
        let (x, v) = golden_max(|x| -(x - 0.37).powi(2), 0.0, 1.0, 80);
        assert!((x - 0.37).abs() < 1e-8);
        assert!(v > -1e-15);
        let (x, _) = golden_max(|x| x, 0.0, 1.0, 10);
        assert_eq!(x, 1.0);
    }

    #[test]
    fn scan_handles_multimodal() {
        let f = |x: f64| (-(x - 0.1).powi(2) * 400.0).exp() + 2.0 * (-(x - 0.8).powi(2) * 400.0).exp();
        let (x, _) = scan_then_golden(f, 0.0, 1.0, 41, 60);
        assert!((x - 0.8).abs() < 1e-6);
    }
}
