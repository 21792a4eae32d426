//! Closed-form average fidelities: the Haar-average quadratic form, unitary
//! and subspace-restricted fidelities, Kraus-channel fidelities, worst-case
//! bounds from eigenphase geometry, and the composite-register scaling law.

use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::haar::McEstimate;
use crate::matrix::{Complex64, ComplexMatrix};

/// Which fidelity produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FidelityKind {
    Unitary,
    Subspace,
    Kraus,
    Composite,
}

/// Result bundle for the fidelity operations.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityReport {
    pub kind: FidelityKind,
    pub mean_fidelity: f64,
    pub worst_case: Option<f64>,
    pub acceptance_q: Option<f64>,
    pub conditional: Option<f64>,
    pub mc_crosscheck: Option<McEstimate>,
}

fn clamp_unit(f: f64) -> f64 {
    debug_assert!(
        (-1e-9..1.0 + 1e-9).contains(&f),
        "fidelity {f} is far outside [0, 1]"
    );
    f.clamp(0.0, 1.0)
}

/// Haar average of |<psi|M|psi>|^2 over pure states of the full register:
/// [Tr(M M†) + |Tr M|^2] / (n(n+1)).
pub fn avg_quadratic_form(m: &ComplexMatrix) -> Result<f64> {
    let product_trace = m.multiply(&m.adjoint())?.trace()?;
    assert!(
        product_trace.im.abs() <= 1e-12 * product_trace.re.abs().max(1.0),
        "imaginary part of Tr(M M†) must vanish, got {}",
        product_trace.im
    );
    let trace = m.trace()?;
    let n = m.rows() as f64;
    Ok((product_trace.re + trace.norm_sqr()) / (n * (n + 1.0)))
}

fn check_unitary_pair(target: &ComplexMatrix, actual: &ComplexMatrix) -> Result<()> {
    target.require_unitary(1e-9)?;
    actual.require_unitary(1e-9)?;
    if target.rows() != actual.rows() {
        return Err(Error::DimensionMismatch {
            left: target.rows(),
            right: actual.rows(),
        });
    }
    Ok(())
}

/// Average fidelity of a unitary `actual` against a unitary `target`:
/// [n + |Tr(U0† U)|^2] / (n(n+1)), with the worst case filled in.
pub fn avg_unitary(target: &ComplexMatrix, actual: &ComplexMatrix) -> Result<FidelityReport> {
    check_unitary_pair(target, actual)?;
    let m = target.adjoint().multiply(actual)?;
    let n = m.rows() as f64;
    let mean = clamp_unit((n + m.trace()?.norm_sqr()) / (n * (n + 1.0)));
    let worst = worst_case_unitary(target, actual)?;
    Ok(FidelityReport {
        kind: FidelityKind::Unitary,
        mean_fidelity: mean,
        worst_case: Some(worst),
        acceptance_q: None,
        conditional: None,
        mc_crosscheck: None,
    })
}

/// Minimum over input states of the state fidelity |<psi|U0† U|psi>|^2.
///
/// The numerical range of a unitary is the convex hull of its eigenvalues
/// on the unit circle, so the minimum is the squared distance from the
/// origin to that hull (zero when the origin lies inside).
pub fn worst_case_unitary(target: &ComplexMatrix, actual: &ComplexMatrix) -> Result<f64> {
    check_unitary_pair(target, actual)?;
    let m = target.adjoint().multiply(actual)?;
    let phases = m.unitary_eigenphases()?;
    let points: Vec<(f64, f64)> = phases.phases().iter().map(|&p| (p.cos(), p.sin())).collect();
    Ok(hull_distance_squared(&points))
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn convex_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(2 * pts.len());
    for &p in pts.iter() {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev() {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

fn segment_distance_squared(a: (f64, f64), b: (f64, f64)) -> f64 {
    let dx = b.0 - a.0;
    let dy = b.1 - a.1;
    let len_sq = dx * dx + dy * dy;
    if len_sq == 0.0 {
        return a.0 * a.0 + a.1 * a.1;
    }
    let t = (-(a.0 * dx + a.1 * dy) / len_sq).clamp(0.0, 1.0);
    let px = a.0 + t * dx;
    let py = a.1 + t * dy;
    px * px + py * py
}

fn hull_distance_squared(points: &[(f64, f64)]) -> f64 {
    let hull = convex_hull(points);
    match hull.len() {
        0 => unreachable!("hull of a non-empty point set is non-empty"),
        1 => hull[0].0 * hull[0].0 + hull[0].1 * hull[0].1,
        2 => segment_distance_squared(hull[0], hull[1]),
        len => {
            let origin_inside = (0..len).all(|i| {
                let a = hull[i];
                let b = hull[(i + 1) % len];
                cross(a, b, (0.0, 0.0)) > 1e-12
            });
            if origin_inside {
                return 0.0;
            }
            (0..len)
                .map(|i| segment_distance_squared(hull[i], hull[(i + 1) % len]))
                .fold(f64::INFINITY, f64::min)
        }
    }
}

/// Subset of computational-basis levels inside an ambient register.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspaceSelector {
    ambient_dim: usize,
    indices: Vec<usize>,
}

impl SubspaceSelector {
    /// Indices must be strictly increasing and lie inside the ambient register.
    pub fn new(ambient_dim: usize, indices: Vec<usize>) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if indices.is_empty() {
            return Err(Error::InvalidSelector {
                reason: "index list is empty".into(),
            });
        }
        if !indices.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidSelector {
                reason: "indices must be strictly increasing".into(),
            });
        }
        let last = *indices.last().expect("non-empty");
        if last >= ambient_dim {
            return Err(Error::InvalidSelector {
                reason: format!("index {last} is outside the ambient dimension {ambient_dim}"),
            });
        }
        Ok(Self { ambient_dim, indices })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn selected_dim(&self) -> usize {
        self.indices.len()
    }
}

fn check_selector(matrix: &ComplexMatrix, sel: &SubspaceSelector) -> Result<()> {
    if matrix.rows() != sel.ambient_dim() {
        return Err(Error::DimensionMismatch {
            left: matrix.rows(),
            right: sel.ambient_dim(),
        });
    }
    Ok(())
}

/// Average fidelity over states drawn from the selected subspace only:
/// the quadratic-form average of the restriction of U0† U.
pub fn avg_subspace(
    target: &ComplexMatrix,
    actual: &ComplexMatrix,
    sel: &SubspaceSelector,
) -> Result<FidelityReport> {
    check_unitary_pair(target, actual)?;
    check_selector(target, sel)?;
    let m_rel = target.adjoint().multiply(actual)?.submatrix(sel.indices());
    let mean = clamp_unit(avg_quadratic_form(&m_rel)?);
    Ok(FidelityReport {
        kind: FidelityKind::Subspace,
        mean_fidelity: mean,
        worst_case: None,
        acceptance_q: None,
        conditional: None,
        mc_crosscheck: None,
    })
}

/// Probability that `actual` keeps a subspace-drawn state inside the
/// subspace, averaged over that subspace: the quadratic-form average of
/// the restriction of U† P U.
pub fn acceptance_probability(actual: &ComplexMatrix, sel: &SubspaceSelector) -> Result<f64> {
    actual.require_unitary(1e-9)?;
    check_selector(actual, sel)?;
    let idx = sel.indices();
    let d = idx.len();
    let mut restricted = ComplexMatrix::zeros(d, d);
    for (a, &ia) in idx.iter().enumerate() {
        for (b, &ib) in idx.iter().enumerate() {
            let mut s = Complex64::new(0.0, 0.0);
            for &k in idx {
                s += actual.get(k, ia).conj() * actual.get(k, ib);
            }
            restricted.set(a, b, s);
        }
    }
    Ok(clamp_unit(avg_quadratic_form(&restricted)?))
}

/// Fidelity conditioned on the state staying inside the subspace: F / Q.
///
/// Degenerate acceptance (Q <= 1e-12) is an error, not a division.
pub fn conditional_fidelity(
    target: &ComplexMatrix,
    actual: &ComplexMatrix,
    sel: &SubspaceSelector,
) -> Result<FidelityReport> {
    let mut report = avg_subspace(target, actual, sel)?;
    let q = acceptance_probability(actual, sel)?;
    if q <= 1e-12 {
        return Err(Error::DegenerateAcceptance { q });
    }
    report.acceptance_q = Some(q);
    report.conditional = Some(clamp_unit(report.mean_fidelity / q));
    Ok(report)
}

/// Average fidelity of a Kraus channel against a unitary target:
/// [n + sum_k |Tr(U0† G_k)|^2] / (n(n+1)).
pub fn avg_kraus(target: &ComplexMatrix, channel: &KrausChannel) -> Result<FidelityReport> {
    target.require_unitary(1e-9)?;
    if target.rows() != channel.dim() {
        return Err(Error::DimensionMismatch {
            left: target.rows(),
            right: channel.dim(),
        });
    }
    let n = channel.dim() as f64;
    // Trace preservation pins the quadratic term at exactly n; check it
    // instead of recomputing it blindly.
    let preserved: f64 = channel
        .operators()
        .iter()
        .map(|g| {
            let f = g.frobenius_norm();
            f * f
        })
        .sum();
    assert!(
        (preserved - n).abs() <= 1e-9 * n,
        "trace preservation violated: sum Tr(G†G) = {preserved}, expected {n}"
    );
    let adjoint = target.adjoint();
    let mut trace_sum = 0.0;
    for g in channel.operators() {
        trace_sum += adjoint.multiply(g)?.trace()?.norm_sqr();
    }
    let mean = clamp_unit((n + trace_sum) / (n * (n + 1.0)));
    Ok(FidelityReport {
        kind: FidelityKind::Kraus,
        mean_fidelity: mean,
        worst_case: None,
        acceptance_q: None,
        conditional: None,
        mc_crosscheck: None,
    })
}

/// Scaling law for K independent copies of the same register and operation:
/// F_total = [1 + ((n+1) F_single - 1)^K] / (n^K + 1).
///
/// Inputs must satisfy F_single in [1/(n+1), 1]; values at most 1e-12 above
/// 1 are clamped down, anything below the lower bound is a hard error.
pub fn composite_fidelity(n: usize, k: u32, f_single: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    if k == 0 {
        return Err(Error::ZeroPower);
    }
    if !f_single.is_finite() {
        return Err(Error::NonFiniteParameter {
            name: "f_single",
            value: f_single,
        });
    }
    let nf = n as f64;
    let lower = 1.0 / (nf + 1.0);
    let f = if f_single > 1.0 {
        if f_single <= 1.0 + 1e-12 {
            1.0
        } else {
            return Err(Error::FidelityRange {
                value: f_single,
                lower,
            });
        }
    } else {
        f_single
    };
    if f < lower {
        return Err(Error::FidelityRange { value: f, lower });
    }
    let x = (nf + 1.0) * f - 1.0;
    let kf = k as f64;
    if kf * nf.ln() < 650.0 {
        // Everything stays finite; this branch is exact at the endpoints.
        let denom = nf.powi(k as i32) + 1.0;
        Ok((1.0 + x.powi(k as i32)) / denom)
    } else {
        // log-domain evaluation for astronomically large registers
        let log_denom = kf * nf.ln() + (-(kf * nf.ln())).exp().ln_1p();
        let tail = (-log_denom).exp();
        if x <= 0.0 {
            Ok(tail)
        } else {
            Ok((kf * x.ln() - log_denom).exp() + tail)
        }
    }
}

/// Evaluates the composite fidelity both ways for an identity target:
/// brute force on the K-fold tensor channel, and the scaling law applied
/// to the single-copy fidelity. Returns (brute_force, law).
pub fn composite_bruteforce_check(channel: &KrausChannel, k: u32) -> Result<(f64, f64)> {
    let n = channel.dim();
    let single = avg_kraus(&ComplexMatrix::identity(n), channel)?.mean_fidelity;
    let law = composite_fidelity(n, k, single)?;
    let big = channel.tensor_power(k)?;
    let brute = avg_kraus(&ComplexMatrix::identity(big.dim()), &big)?.mean_fidelity;
    Ok((brute, law))
}
