//! Adaptive Gauss–Kronrod quadrature (G7–K15) with forced initial
//! subdivision at caller-supplied split points.
//!
//! The energy-density profiles integrated here develop peaks whose width
//! shrinks like the inverse cumulative Döppler factor; seeding the interval
//! queue with the predicted peak positions keeps the adaptive refinement from
//! stepping over them.

use crate::error::{CavityError, Result};

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
    pub subdivisions: usize,
}

// K15 abscissae on [-1, 1] (QUADPACK dqk15).
const XGK: [f64; 15] = [
    -0.991455371120813,
    -0.949107912342759,
    -0.864864423359769,
    -0.741531185599394,
    -0.586087235467691,
    -0.405845151377397,
    -0.207784955007898,
    0.0,
    0.207784955007898,
    0.405845151377397,
    0.586087235467691,
    0.741531185599394,
    0.864864423359769,
    0.949107912342759,
    0.991455371120813,
];

const WGK: [f64; 15] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
    0.204432940075298,
    0.190350578064785,
    0.169004726639267,
    0.140653259715525,
    0.104790010322250,
    0.063092092629979,
    0.022935322010529,
];

const WG: [f64; 7] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
    0.381830050505119,
    0.279705391489277,
    0.129484966168870,
];

fn gk15(f: &mut impl FnMut(f64) -> Result<f64>, a: f64, b: f64) -> Result<(f64, f64)> {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut vals = [0.0; 15];
    for (i, &x) in XGK.iter().enumerate() {
        vals[i] = f(mid + half * x)?;
    }
    let mut kronrod = 0.0;
    for i in 0..15 {
        kronrod += WGK[i] * vals[i];
    }
    let mut gauss = 0.0;
    for (i, &w) in WG.iter().enumerate() {
        gauss += w * vals[2 * i + 1];
    }
    // resasc-scaled error estimate as in QUADPACK dqk15
    let mean = kronrod / 2.0;
    let mut resasc = 0.0;
    for i in 0..15 {
        resasc += WGK[i] * (vals[i] - mean).abs();
    }
    resasc *= half.abs();
    let raw = ((kronrod - gauss) * half).abs();
    let err = if resasc != 0.0 && raw != 0.0 {
        resasc * (200.0 * raw / resasc).powf(1.5).min(1.0)
    } else {
        raw
    };
    Ok((kronrod * half, err))
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// Integrate `f` over `[a, b]` to the requested relative/absolute tolerance.
///
/// `split_points` inside the interval seed the initial segmentation; the
/// worst segment is then bisected until the summed error estimate meets
/// `max(abs_tol, rel_tol * |integral|)` or `max_subdiv` splits are spent, in
/// which case the achieved estimate is reported in the error.
pub fn integrate(
    mut f: impl FnMut(f64) -> Result<f64>,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    split_points: &[f64],
    max_subdiv: usize,
) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
            subdivisions: 0,
        });
    }
    if a > b {
        return Err(CavityError::Precondition(format!(
            "integration interval reversed: [{a}, {b}]"
        )));
    }
    let mut cuts: Vec<f64> = split_points
        .iter()
        .copied()
        .filter(|&s| s > a && s < b)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(a);
    edges.extend(cuts);
    edges.push(b);

    let mut segs: Vec<Segment> = Vec::new();
    let mut evals = 0;
    for w in edges.windows(2) {
        let (v, e) = gk15(&mut f, w[0], w[1])?;
        evals += 15;
        segs.push(Segment {
            a: w[0],
            b: w[1],
            value: v,
            error: e,
        });
    }

    let mut subdivisions = 0;
    loop {
        let total: f64 = segs.iter().map(|s| s.value).sum();
        let err: f64 = segs.iter().map(|s| s.error).sum();
        let tol = abs_tol.max(rel_tol * total.abs());
        if err <= tol {
            return Ok(QuadResult {
                value: total,
                abs_error: err,
                evaluations: evals,
                subdivisions,
            });
        }
        if subdivisions >= max_subdiv {
            return Err(CavityError::QuadratureNoConverge {
                requested: tol,
                achieved: err,
            });
        }
        let worst = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap();
        let seg = segs.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // interval at machine resolution; keep its estimate and stop
            // refining it further
            segs.push(Segment {
                error: 0.0,
                ..seg
            });
            subdivisions += 1;
            continue;
        }
        let (v1, e1) = gk15(&mut f, seg.a, mid)?;
        let (v2, e2) = gk15(&mut f, mid, seg.b)?;
        evals += 30;
        segs.push(Segment {
            a: seg.a,
            b: mid,
            value: v1,
            error: e1,
        });
        segs.push(Segment {
            a: mid,
            b: seg.b,
            value: v2,
            error: e2,
        });
        subdivisions += 1;
    }
}
