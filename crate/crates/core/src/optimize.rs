//! One-dimensional searches used by the saddle-point solver.
//!
//! All searches run in log space over a positive argument, so tolerances
//! are relative to the argument.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Result of a 1D search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchResult {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Golden-section minimization of `f` over `[lo, hi]` (both positive),
/// stopping once the bracket's log width is below `tol`.
pub fn golden_min_log<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> SearchResult {
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let mut evals = 0;
    let mut eval = |u: f64, evals: &mut usize| {
        *evals += 1;
        f(u.exp())
    };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c, &mut evals);
    let mut fd = eval(d, &mut evals);
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c, &mut evals);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d, &mut evals);
        }
    }
    let (x, value) = if fc <= fd { (c, fc) } else { (d, fd) };
    SearchResult {
        x: x.exp(),
        value,
        evaluations: evals,
    }
}

/// Minimizes `f` over `[lower, inf)` starting from `start`.
///
/// The bracket is grown geometrically (factor 2) in both directions until
/// the objective rises on each side or the lower bound is reached, then
/// refined by golden section. A minimum sitting on `lower` is returned as is.
pub fn minimize_from<F: FnMut(f64) -> f64>(
    mut f: F,
    lower: f64,
    start: f64,
    tol: f64,
) -> Result<SearchResult> {
    const MAX_STEPS: usize = 200;
    let start = start.max(lower);
    let mut evals = 0;
    let mut call = |x: f64, evals: &mut usize| {
        *evals += 1;
        f(x)
    };
    let mut trace = Vec::new();
    let fm = call(start, &mut evals);
    trace.push((start, fm));

    // Walk up.
    let (mut mid, mut f_mid) = (start, fm);
    let mut hi = start * 2.0;
    let mut f_hi = call(hi, &mut evals);
    trace.push((hi, f_hi));
    let mut steps = 0;
    while f_hi < f_mid {
        mid = hi;
        f_mid = f_hi;
        hi *= 2.0;
        f_hi = call(hi, &mut evals);
        trace.push((hi, f_hi));
        steps += 1;
        if steps > MAX_STEPS || !f_hi.is_finite() {
            return Err(Error::Bracket {
                message: "objective keeps decreasing as the argument grows".into(),
                trace,
            });
        }
    }
    // Walk down if we never moved up.
    let mut lo = mid / 2.0;
    if mid == start {
        lo = (start / 2.0).max(lower);
        let mut f_lo = call(lo, &mut evals);
        trace.push((lo, f_lo));
        while f_lo < f_mid && lo > lower {
            hi = mid;
            mid = lo;
            f_mid = f_lo;
            lo = (lo / 2.0).max(lower);
            f_lo = call(lo, &mut evals);
            trace.push((lo, f_lo));
        }
        if f_lo <= f_mid && lo <= lower {
            // Minimum on the boundary.
            let inner = golden_min_log(&mut f, lower, mid, tol);
            let best = if inner.value < f_lo {
                inner
            } else {
                SearchResult { x: lower, value: f_lo, evaluations: 0 }
            };
            return Ok(SearchResult {
                evaluations: evals + inner.evaluations,
                ..best
            });
        }
    }
    let lo = lo.max(lower);
    let r = golden_min_log(&mut f, lo, hi, tol);
    let best = if r.value <= f_mid {
        r
    } else {
        SearchResult { x: mid, value: f_mid, evaluations: 0 }
    };
    Ok(SearchResult {
        evaluations: evals + r.evaluations,
        ..best
    })
}

/// Maximization over `[lo, hi]` with a log-spaced initial scan of `scan`
/// points; the best scan point and its neighbours seed a golden-section
/// refinement. Returns the optimum and the scan trace.
pub fn maximize_scan<F, E>(
    mut f: F,
    lo: f64,
    hi: f64,
    scan: usize,
    tol: f64,
) -> std::result::Result<(SearchResult, Vec<(f64, f64)>), E>
where
    F: FnMut(f64) -> std::result::Result<f64, E>,
{
    let scan = scan.max(3);
    let (la, lb) = (lo.ln(), hi.ln());
    let xs: Vec<f64> = (0..scan)
        .map(|i| (la + (lb - la) * i as f64 / (scan - 1) as f64).exp())
        .collect();
    let mut trace = Vec::with_capacity(scan);
    for &x in &xs {
        trace.push((x, f(x)?));
    }
    let best = trace
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| a.1.total_cmp(&b.1).then(j.cmp(i)))
        .map(|(i, _)| i)
        .expect("scan is non-empty");
    let a = xs[best.saturating_sub(1)];
    let b = xs[(best + 1).min(scan - 1)];
    let mut failure = None;
    let refined = golden_min_log(
        |x| match f(x) {
            Ok(v) => -v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        },
        a,
        b,
        tol,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let (x, v) = if -refined.value >= trace[best].1 {
        (refined.x, -refined.value)
    } else {
        trace[best]
    };
    Ok((
        SearchResult {
            x,
            value: v,
            evaluations: scan + refined.evaluations,
        },
        trace,
    ))
}

/// Root of a nondecreasing function on `[lo, hi]` by the Illinois variant of
/// regula falsi. Requires `f(lo) < 0 < f(hi)`; stops when `|f| <= f_tol`
/// and the bracket is narrower than `x_tol` (relative), or the bracket
/// collapses.
pub fn find_root_increasing<F, E>(
    mut f: F,
    lo: f64,
    hi: f64,
    f_tol: f64,
    x_tol: f64,
) -> std::result::Result<std::result::Result<(f64, f64), Error>, E>
where
    F: FnMut(f64) -> std::result::Result<f64, E>,
{
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if !(fa <= 0.0 && fb >= 0.0) {
        return Ok(Err(Error::Bracket {
            message: format!("no sign change on [{lo}, {hi}]"),
            trace: vec![(a, fa), (b, fb)],
        }));
    }
    if fa == 0.0 {
        return Ok(Ok((a, fa)));
    }
    if fb == 0.0 {
        return Ok(Ok((b, fb)));
    }
    let mut side = 0i8;
    for _ in 0..200 {
        let c = if (b - a) > 0.25 * (hi - lo) && side == 0 {
            0.5 * (a + b)
        } else {
            (a * fb - b * fa) / (fb - fa)
        };
        let c = if c <= a || c >= b { 0.5 * (a + b) } else { c };
        let fc = f(c)?;
        if fc == 0.0 {
            return Ok(Ok((c, fc)));
        }
        if fc < 0.0 {
            a = c;
            fa = fc;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = c;
            fb = fc;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
        let narrow = (b - a) <= x_tol * b.abs().max(1.0);
        if (fc.abs() <= f_tol && narrow) || (b - a) <= 4.0 * f64::EPSILON * b.abs() {
            return Ok(Ok((c, fc)));
        }
        if narrow {
            // Bracket is tight; the Illinois scaling may have shrunk the
            // stored residuals, so re-evaluate both ends.
            let (ra, rb) = (f(a)?, f(b)?);
            return Ok(Ok(if ra.abs() <= rb.abs() { (a, ra) } else { (b, rb) }));
        }
    }
    let c = 0.5 * (a + b);
    Ok(Ok((c, f(c)?)))
}
