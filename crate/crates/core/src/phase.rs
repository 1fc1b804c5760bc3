//! Mean-field response functions and phase classification.
//!
//! `Ψ(p) = Σ_i 2 β_i |E_i| p^{|E_i|-1}` and `φ(p) = σ(Ψ(p))`. Fixed points of
//! `φ` are located by a dense grid scan followed by bisection; tangential
//! (double) roots are caught by a second pass over local minima of `|φ(p) - p|`.

use serde::{Deserialize, Serialize};

use crate::error::{ErgmError, Result};
use crate::model::{sigmoid, ModelSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Attracting,
    Repelling,
    Marginal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub p_star: f64,
    pub phi_derivative: f64,
    pub stability: Stability,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    HighTemperature,
    LowTemperature,
    Critical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseOptions {
    /// Root tolerance on `|φ(p*) - p*|`.
    pub tol: f64,
    /// Number of grid points in the sign-change scan.
    pub grid: usize,
    /// Roots with `|φ'(p*) - 1|` at most this are marginal.
    pub critical_margin: f64,
}

impl Default for PhaseOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            grid: 10_000,
            critical_margin: 1e-3,
        }
    }
}

impl PhaseOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointScan {
    /// Increasing in `p_star`.
    pub points: Vec<FixedPoint>,
    /// Two roots lie closer than `10 * tol`.
    pub resolution_warning: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseReport {
    pub fixed_points: Vec<FixedPoint>,
    pub classification: Phase,
    pub resolution_warning: bool,
    pub options: PhaseOptions,
}

impl PhaseReport {
    pub fn attracting(&self) -> impl Iterator<Item = &FixedPoint> {
        self.fixed_points
            .iter()
            .filter(|f| f.stability == Stability::Attracting)
    }

    /// The fixed point of a high-temperature model.
    pub fn unique_fixed_point(&self) -> Option<f64> {
        match self.classification {
            Phase::HighTemperature => Some(self.fixed_points[0].p_star),
            _ => None,
        }
    }

    /// Least attracting fixed point strictly above `p_star`, or 1.
    pub fn p_bar(&self, p_star: f64) -> f64 {
        self.attracting()
            .map(|f| f.p_star)
            .find(|&p| p > p_star)
            .unwrap_or(1.0)
    }

    /// For a low-temperature model with three simple roots: the lowest and
    /// highest attracting roots and the repelling root between them.
    pub fn bistable_roots(&self) -> Option<(f64, f64, f64)> {
        if self.classification != Phase::LowTemperature {
            return None;
        }
        let att: Vec<f64> = self.attracting().map(|f| f.p_star).collect();
        let (lo, hi) = (*att.first()?, *att.last()?);
        let mid = self
            .fixed_points
            .iter()
            .find(|f| f.stability == Stability::Repelling && f.p_star > lo && f.p_star < hi)?
            .p_star;
        Some((lo, mid, hi))
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(ErgmError::ProbabilityOutOfRange(p));
    }
    Ok(())
}

fn psi_raw(m: &ModelSpec, p: f64) -> f64 {
    m.patterns()
        .iter()
        .zip(m.betas())
        .map(|(g, &b)| {
            let e = g.edge_count() as i32;
            2.0 * b * e as f64 * p.powi(e - 1)
        })
        .sum()
}

fn psi_prime_raw(m: &ModelSpec, p: f64) -> f64 {
    m.patterns()
        .iter()
        .zip(m.betas())
        .filter(|(g, _)| g.edge_count() >= 2)
        .map(|(g, &b)| {
            let e = g.edge_count() as i32;
            2.0 * b * (e * (e - 1)) as f64 * p.powi(e - 2)
        })
        .sum()
}

fn phi_raw(m: &ModelSpec, p: f64) -> f64 {
    sigmoid(psi_raw(m, p))
}

fn phi_prime_raw(m: &ModelSpec, p: f64) -> f64 {
    let s = phi_raw(m, p);
    psi_prime_raw(m, p) * s * (1.0 - s)
}

/// `Ψ_β(p)`.
pub fn psi(m: &ModelSpec, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(psi_raw(m, p))
}

/// `Ψ'_β(p)`.
pub fn psi_prime(m: &ModelSpec, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(psi_prime_raw(m, p))
}

/// `φ_β(p) = σ(Ψ_β(p))`.
pub fn phi(m: &ModelSpec, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(phi_raw(m, p))
}

/// `φ'_β(p) = Ψ'(p) φ(p) (1 - φ(p))`.
pub fn phi_prime(m: &ModelSpec, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(phi_prime_raw(m, p))
}

/// Roots of `φ(p) - p` in `(0, 1)` with default grid and margin.
pub fn find_fixed_points(m: &ModelSpec, tol: f64) -> Result<FixedPointScan> {
    find_fixed_points_with(m, &PhaseOptions::with_tol(tol))
}

pub fn find_fixed_points_with(m: &ModelSpec, opts: &PhaseOptions) -> Result<FixedPointScan> {
    if !(opts.tol > 0.0) || opts.grid < 2 {
        return Err(ErgmError::InvalidArgument(format!(
            "need tol > 0 and grid >= 2, got tol = {}, grid = {}",
            opts.tol, opts.grid
        )));
    }
    let g = |p: f64| phi_raw(m, p) - p;
    let k = opts.grid;
    let ps: Vec<f64> = (0..=k).map(|i| i as f64 / k as f64).collect();
    let gs: Vec<f64> = ps.iter().map(|&p| g(p)).collect();

    let mut roots: Vec<(f64, bool)> = Vec::new(); // (p, tangential)
    for i in 0..k {
        let (a, b) = (gs[i], gs[i + 1]);
        if a == 0.0 {
            roots.push((ps[i], false));
        } else if a.signum() != b.signum() && b != 0.0 {
            roots.push((bisect(&g, ps[i], ps[i + 1], opts.tol), false));
        }
    }

    // Tangential roots and root pairs hidden inside one grid cell.
    let tangent_tol = opts.tol.sqrt();
    for i in 1..k {
        let (l, c, r) = (gs[i - 1], gs[i], gs[i + 1]);
        let same_sign = l.signum() == c.signum() && c.signum() == r.signum() && c != 0.0;
        if !same_sign || c.abs() > l.abs() || c.abs() > r.abs() {
            continue;
        }
        let dphi = |p: f64| phi_prime_raw(m, p) - 1.0;
        let (lo, hi) = (ps[i - 1], ps[i + 1]);
        let extremum = if dphi(lo).signum() != dphi(hi).signum() {
            bisect(&dphi, lo, hi, 1e-15)
        } else {
            golden_min(|p| g(p).abs(), lo, hi)
        };
        let ge = g(extremum);
        if ge == 0.0 || ge.signum() != c.signum() {
            if ge == 0.0 {
                roots.push((extremum, true));
            } else {
                roots.push((bisect(&g, lo, extremum, opts.tol), false));
                roots.push((bisect(&g, extremum, hi, opts.tol), false));
            }
        } else if ge.abs() <= tangent_tol {
            roots.push((extremum, true));
        }
    }

    roots.sort_by(|a, b| a.0.total_cmp(&b.0));
    roots.dedup_by(|b, a| (b.0 - a.0).abs() <= opts.tol);

    let points: Vec<FixedPoint> = roots
        .iter()
        .map(|&(p, tangential)| {
            let d = phi_prime_raw(m, p);
            let stability = if tangential || (d - 1.0).abs() <= opts.critical_margin {
                Stability::Marginal
            } else if d < 1.0 {
                Stability::Attracting
            } else {
                Stability::Repelling
            };
            FixedPoint {
                p_star: p,
                phi_derivative: d,
                stability,
            }
        })
        .collect();
    let resolution_warning = points
        .windows(2)
        .any(|w| w[1].p_star - w[0].p_star < 10.0 * opts.tol);
    Ok(FixedPointScan {
        points,
        resolution_warning,
    })
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= tol * 1e-3 || hi - lo <= f64::EPSILON * mid.abs().max(1e-300) {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    for _ in 0..120 {
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - r * (b - a);
        d = a + r * (b - a);
    }
    0.5 * (a + b)
}

/// Classifies `β` with default grid and margin.
pub fn classify(m: &ModelSpec, tol: f64) -> Result<PhaseReport> {
    classify_with(m, &PhaseOptions::with_tol(tol))
}

pub fn classify_with(m: &ModelSpec, opts: &PhaseOptions) -> Result<PhaseReport> {
    let scan = find_fixed_points_with(m, opts)?;
    let attracting = scan
        .points
        .iter()
        .filter(|f| f.stability == Stability::Attracting)
        .count();
    let any_marginal = scan.points.iter().any(|f| f.stability == Stability::Marginal);
    let classification = if any_marginal {
        Phase::Critical
    } else if scan.points.len() == 1 && attracting == 1 {
        Phase::HighTemperature
    } else if attracting >= 2 {
        Phase::LowTemperature
    } else {
        Phase::Critical
    };
    Ok(PhaseReport {
        fixed_points: scan.points,
        classification,
        resolution_warning: scan.resolution_warning,
        options: *opts,
    })
}

/// Evenly spaced parameter values for one sweep axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    /// 0-based parameter index (`0` is `β_1`).
    pub index: usize,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl SweepAxis {
    pub fn values(&self) -> Vec<f64> {
        match self.count {
            0 => vec![],
            1 => vec![self.min],
            c => (0..c)
                .map(|i| self.min + (self.max - self.min) * i as f64 / (c - 1) as f64)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub betas: Vec<f64>,
    pub classification: Phase,
    pub fixed_points: Vec<FixedPoint>,
}

/// Classifies every point of a one- or two-axis parameter grid. Rows are in
/// row-major order (`x` outer).
pub fn phase_sweep(
    base: &ModelSpec,
    x: &SweepAxis,
    y: Option<&SweepAxis>,
    opts: &PhaseOptions,
) -> Result<Vec<SweepRow>> {
    let ys = y.map(|a| a.values()).unwrap_or_else(|| vec![f64::NAN]);
    let mut rows = Vec::new();
    for xv in x.values() {
        for &yv in &ys {
            let mut m = base.with_beta(x.index, xv)?;
            if let Some(ax) = y {
                m = m.with_beta(ax.index, yv)?;
            }
            let r = classify_with(&m, opts)?;
            rows.push(SweepRow {
                betas: m.betas().to_vec(),
                classification: r.classification,
                fixed_points: r.fixed_points,
            });
        }
    }
    Ok(rows)
}

/// The low-temperature sweep row whose repelling root is farthest from both
/// attracting roots, i.e. the most robustly bistable point. Ties keep the
/// earliest row.
pub fn most_bistable(rows: &[SweepRow]) -> Option<&SweepRow> {
    let score = |r: &SweepRow| -> Option<f64> {
        if r.classification != Phase::LowTemperature || r.fixed_points.len() != 3 {
            return None;
        }
        let [a, b, c] = [r.fixed_points[0], r.fixed_points[1], r.fixed_points[2]];
        let pattern_ok = a.stability == Stability::Attracting
            && b.stability == Stability::Repelling
            && c.stability == Stability::Attracting;
        pattern_ok.then(|| (b.p_star - a.p_star).min(c.p_star - b.p_star))
    };
    let mut best: Option<(&SweepRow, f64)> = None;
    for r in rows {
        if let Some(s) = score(r) {
            if best.is_none_or(|(_, bs)| s > bs) {
                best = Some((r, s));
            }
        }
    }
    best.map(|(r, _)| r)
}

/// Bisects parameter `index` between a high- and a low-temperature value
/// until the classifier reports `Critical`.
pub fn critical_point_along(
    base: &ModelSpec,
    index: usize,
    mut lo: f64,
    mut hi: f64,
    opts: &PhaseOptions,
) -> Result<(f64, PhaseReport)> {
    let class_at = |v: f64| -> Result<PhaseReport> { classify_with(&base.with_beta(index, v)?, opts) };
    let c_lo = class_at(lo)?.classification;
    let c_hi = class_at(hi)?.classification;
    if c_lo == c_hi || c_lo == Phase::Critical || c_hi == Phase::Critical {
        return Err(ErgmError::InvalidArgument(format!(
            "endpoints must straddle a phase boundary (got {c_lo:?} and {c_hi:?})"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let r = class_at(mid)?;
        if r.classification == Phase::Critical {
            return Ok((mid, r));
        }
        if r.classification == c_lo {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo).abs() <= f64::EPSILON * mid.abs().max(1.0) {
            break;
        }
    }
    let mid = 0.5 * (lo + hi);
    Ok((mid, class_at(mid)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn et(b1: f64, b2: f64) -> ModelSpec {
        ModelSpec::edge_triangle(b1, b2).unwrap()
    }

    #[test]
    fn psi_examples() {
        let m = ModelSpec::edges_only(0.8).unwrap();
        for p in [0.0, 0.3, 1.0] {
            assert_eq!(psi(&m, p).unwrap(), 1.6);
        }
        let m = et(-0.35, 0.2);
        assert!((psi(&m, 0.5).unwrap() - (-0.7 + 6.0 * 0.2 * 0.25)).abs() < 1e-15);
        assert_eq!(psi(&m, 0.0).unwrap(), -0.7);
        assert!(psi(&m, 1.5).is_err());
        assert!(psi(&m, -0.1).is_err());
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(&ModelSpec::edges_only(0.0).unwrap(), 0.3).unwrap(), 0.5);
        assert!((phi(&ModelSpec::edges_only(0.5).unwrap(), 0.9).unwrap() - 0.7311).abs() < 1e-4);
        assert!((phi(&et(-0.35, 0.2), 0.0).unwrap() - 0.3318).abs() < 1e-4);
    }

    #[test]
    fn phi_prime_examples() {
        assert_eq!(phi_prime(&ModelSpec::edges_only(1.3).unwrap(), 0.4).unwrap(), 0.0);
        assert_eq!(phi_prime(&et(0.2, 0.0), 0.4).unwrap(), 0.0);
        let d = phi_prime(&et(-0.35, 0.2), 0.5).unwrap();
        let s = sigmoid(-0.4);
        assert!((d - 1.2 * s * (1.0 - s)).abs() < 1e-15);
        assert!((d - 0.2883).abs() < 1e-4);
        let h = 1e-6;
        let m = et(-0.35, 0.2);
        let fd = (phi(&m, 0.5 + h).unwrap() - phi(&m, 0.5 - h).unwrap()) / (2.0 * h);
        assert!(((fd - d) / d).abs() < 1e-6);
    }

    #[test]
    fn edges_only_fixed_point() {
        let scan = find_fixed_points(&ModelSpec::edges_only(0.5).unwrap(), 1e-12).unwrap();
        assert_eq!(scan.points.len(), 1);
        assert!((scan.points[0].p_star - sigmoid(1.0)).abs() < 1e-11);
        assert_eq!(scan.points[0].phi_derivative, 0.0);
        let half = find_fixed_points(&ModelSpec::edges_only(0.0).unwrap(), 1e-12).unwrap();
        assert!((half.points[0].p_star - 0.5).abs() < 1e-12);
        assert!(find_fixed_points(&ModelSpec::edges_only(0.0).unwrap(), 0.0).is_err());
    }

    #[test]
    fn bistable_triangle_model() {
        let r = classify(&et(-1.5, 1.5), 1e-12).unwrap();
        assert_eq!(r.classification, Phase::LowTemperature);
        let st: Vec<_> = r.fixed_points.iter().map(|f| f.stability).collect();
        assert_eq!(
            st,
            [Stability::Attracting, Stability::Repelling, Stability::Attracting]
        );
        let m = et(-1.5, 1.5);
        for f in &r.fixed_points {
            assert!((phi(&m, f.p_star).unwrap() - f.p_star).abs() <= 1e-12);
        }
        let (lo, mid, hi) = r.bistable_roots().unwrap();
        assert!(lo < mid && mid < hi);
        assert_eq!(r.p_bar(lo), hi);
        assert_eq!(r.p_bar(hi), 1.0);
    }

    #[test]
    fn tangency_is_critical() {
        let base = et(0.0, 1.5);
        let hi_class = classify(&base.with_beta(0, 0.0).unwrap(), 1e-12).unwrap();
        let lo_class = classify(&base.with_beta(0, -1.5).unwrap(), 1e-12).unwrap();
        assert_eq!(hi_class.classification, Phase::HighTemperature);
        assert_eq!(lo_class.classification, Phase::LowTemperature);
        let (b1, rep) = critical_point_along(&base, 0, 0.0, -1.5, &PhaseOptions::default()).unwrap();
        assert_eq!(rep.classification, Phase::Critical);
        assert!(b1 < 0.0 && b1 > -1.5);
        let marginal = rep
            .fixed_points
            .iter()
            .find(|f| f.stability == Stability::Marginal)
            .unwrap();
        assert!((marginal.phi_derivative - 1.0).abs() <= 1e-3);
    }

    #[test]
    fn exact_tangent_root_is_found() {
        // With only a triangle term, choose β_1 so that p = 1/2 is a double root:
        // φ(1/2) = 1/2 needs Ψ(1/2) = 0; φ'(1/2) = 1 needs Ψ'(1/2) = 4.
        // Ψ'(p) = 12 β_2 p gives β_2 = 2/3, and Ψ(1/2) = 2β_1 + 1 = 0 gives β_1 = -1/2.
        // The inflection of σ∘Ψ sits elsewhere, so this is a genuine tangency.
        let m = et(-0.5, 2.0 / 3.0);
        let r = classify(&m, 1e-12).unwrap();
        assert_eq!(r.classification, Phase::Critical);
        assert!(r
            .fixed_points
            .iter()
            .any(|f| f.stability == Stability::Marginal && (f.p_star - 0.5).abs() < 1e-3));
    }

    #[test]
    fn sweep_and_selection() {
        let base = et(0.0, 0.0);
        let x = SweepAxis { index: 0, min: -3.0, max: 0.0, count: 13 };
        let y = SweepAxis { index: 1, min: 0.0, max: 3.0, count: 13 };
        let rows = phase_sweep(&base, &x, Some(&y), &PhaseOptions::default()).unwrap();
        assert_eq!(rows.len(), 169);
        assert!(rows.iter().any(|r| r.classification == Phase::HighTemperature));
        let best = most_bistable(&rows).unwrap();
        assert_eq!(best.classification, Phase::LowTemperature);
        assert_eq!(best.fixed_points.len(), 3);
    }

    proptest! {
        #[test]
        fn psi_nondecreasing(b1 in -3.0f64..3.0, b2 in 0.0f64..3.0, b3 in 0.0f64..3.0) {
            let m = ModelSpec::new(
                vec![crate::SubgraphPattern::edge(), crate::SubgraphPattern::triangle(), crate::SubgraphPattern::two_star()],
                vec![b1, b2, b3],
            ).unwrap();
            let mut prev = psi(&m, 0.0).unwrap();
            for i in 1..=100 {
                let v = psi(&m, i as f64 / 100.0).unwrap();
                prop_assert!(v >= prev);
                prev = v;
            }
            prop_assert!(phi(&m, 0.0).unwrap() > 0.0);
            prop_assert!(phi(&m, 1.0).unwrap() < 1.0);
        }

        #[test]
        fn fixed_points_are_roots_and_alternate(b1 in -3.0f64..1.0, b2 in 0.0f64..3.0) {
            let m = et(b1, b2);
            let scan = find_fixed_points(&m, 1e-12).unwrap();
            prop_assert!(!scan.points.is_empty());
            for f in &scan.points {
                prop_assert!(f.p_star > 0.0 && f.p_star < 1.0);
                if f.stability != Stability::Marginal {
                    prop_assert!((phi(&m, f.p_star).unwrap() - f.p_star).abs() <= 1e-12);
                }
            }
            if scan.points.iter().all(|f| f.stability != Stability::Marginal) {
                for w in scan.points.windows(2) {
                    prop_assert_ne!(w[0].stability, w[1].stability);
                }
                prop_assert_eq!(scan.points.len() % 2, 1);
            }
        }
    }
}
