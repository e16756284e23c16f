//! Comparison and export of scalar fields on phase-space grids.
//!
//! Fields are `nq × np` matrices indexed `[(iq, ip)]` with cell centers at
//! `((iq+½)/nq, (ip+½)/np)`.

use std::f64::consts::PI;
use std::fmt::Write;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::torus::grid_coord;
use crate::{Error, Result};

/// Quantile that defines the "top decile" support of a field.
pub const TOP_DECILE: f64 = 0.9;

fn same_shape(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::GridMismatch(
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols(),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub value: f64,
    /// Set when either field has zero variance; `value` is then 0.
    pub degenerate: bool,
}

pub fn pearson(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<Correlation> {
    same_shape(a, b)?;
    let len = a.len() as f64;
    let (ma, mb) = (a.sum() / len, b.sum() / len);
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    // variances at rounding level count as zero
    let floor = |m: &DMatrix<f64>| len * (1e-12 * m.amax()).powi(2);
    let scale = (saa * sbb).sqrt();
    if saa <= floor(a) || sbb <= floor(b) || !scale.is_finite() {
        return Ok(Correlation {
            value: 0.0,
            degenerate: true,
        });
    }
    Ok(Correlation {
        value: (sab / scale).clamp(-1.0, 1.0),
        degenerate: false,
    })
}

/// The `⌈len/10⌉` largest cells, ties at the threshold included. Cells equal to the
/// field minimum are never included, so a mostly empty histogram does not
/// count its empty cells as support.
pub fn top_decile_support(field: &DMatrix<f64>) -> Vec<bool> {
    if field.is_empty() {
        return Vec::new();
    }
    let mut sorted: Vec<f64> = field.iter().copied().collect();
    sorted.sort_by(f64::total_cmp);
    let len = sorted.len();
    let top = (((1.0 - TOP_DECILE) * len as f64 - 1e-9).ceil() as usize).clamp(1, len);
    let threshold = sorted[len - top];
    let min = sorted[0];
    field.iter().map(|&v| v >= threshold && v > min).collect()
}

/// Jaccard index `|A∩B| / |A∪B|` of two supports; 0 when both are empty.
pub fn jaccard(a: &[bool], b: &[bool]) -> f64 {
    let (mut inter, mut union) = (0usize, 0usize);
    for (&x, &y) in a.iter().zip(b) {
        inter += usize::from(x && y);
        union += usize::from(x || y);
    }
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

pub fn top_decile_overlap(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    same_shape(a, b)?;
    Ok(jaccard(&top_decile_support(a), &top_decile_support(b)))
}

fn circular_kernel(len: usize, n: usize) -> Vec<f64> {
    (0..len)
        .map(|d| {
            let x = d.min(len - d) as f64 / len as f64;
            (-PI * n as f64 * x * x).exp()
        })
        .collect()
}

/// Periodic convolution with `exp(−πN|Δz|²)`, the Husimi function of a
/// point-like state at dimension `n`. Puts a classical histogram on the same
/// footing as a quantum Husimi field.
pub fn coherent_smoothing(field: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    let (nq, np) = field.shape();
    if nq == 0 || np == 0 {
        return field.clone();
    }
    let kq = circular_kernel(nq, n);
    let kp = circular_kernel(np, n);
    let along_q = DMatrix::<f64>::from_fn(nq, np, |i, j| {
        (0..nq).map(|s| kq[(i + nq - s) % nq] * field[(s, j)]).sum()
    });
    DMatrix::from_fn(nq, np, |i, j| {
        (0..np)
            .map(|s| kp[(j + np - s) % np] * along_q[(i, s)])
            .sum()
    })
}

/// Grayscale pixels with black at the maximum: `round(255·(max−v)/(max−min))`.
/// A constant field maps to 128 everywhere and is reported as such.
pub fn gray_levels(field: &DMatrix<f64>) -> (DMatrix<u8>, bool) {
    let max = field.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = field.iter().copied().fold(f64::INFINITY, f64::min);
    let range = max - min;
    if !(range > 0.0) {
        return (
            DMatrix::from_element(field.nrows(), field.ncols(), 128),
            true,
        );
    }
    (
        field.map(|v| (255.0 * (max - v) / range).round() as u8),
        false,
    )
}

/// Plain PGM (P2). Columns run along `q`, rows along `p` with the largest
/// momentum at the top.
pub fn to_pgm(field: &DMatrix<f64>, comments: &[String]) -> (String, bool) {
    let (levels, constant) = gray_levels(field);
    (levels_to_pgm(&levels, comments), constant)
}

/// PGM text for precomputed gray levels, same orientation as [`to_pgm`].
pub fn levels_to_pgm(levels: &DMatrix<u8>, comments: &[String]) -> String {
    let (nq, np) = levels.shape();
    let mut out = String::from("P2\n");
    for c in comments {
        for line in c.lines() {
            let _ = writeln!(out, "# {line}");
        }
    }
    let _ = writeln!(out, "{nq} {np}\n255");
    for row in 0..np {
        let ip = np - 1 - row;
        let line: Vec<String> = (0..nq).map(|iq| levels[(iq, ip)].to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Header `q_index,p_index,q,p,value`, one row per cell, `q` outermost.
pub fn to_csv(field: &DMatrix<f64>) -> String {
    let (nq, np) = field.shape();
    let mut out = String::from("q_index,p_index,q,p,value\n");
    for iq in 0..nq {
        for ip in 0..np {
            let _ = writeln!(
                out,
                "{iq},{ip},{},{},{}",
                grid_coord(iq, nq),
                grid_coord(ip, np),
                field[(iq, ip)]
            );
        }
    }
    out
}
