//! Closed-form exponent calculus: the `(p, r)` window for the weighted
//! functional `∫ u^p v^{−r}`, the integrability bootstrap map and the
//! parameter gates for global boundedness.

use serde::Serialize;

use crate::error::{Error, Result};

/// Distance from `n` at which the bootstrap switches to the exceptional rule.
pub const EXCEPTIONAL_TOL: f64 = 1e-12;
/// Hard cap on bootstrap iterations.
pub const MAX_BOOTSTRAP_STEPS: usize = 10_000;

/// Roots `r∓ = (p−1)/2 · (1 ∓ √(1−pχ²))` of `r² − (p−1) r + p(p−1)²χ²/4`.
pub fn r_bounds(p: f64, chi: f64) -> Result<(f64, f64)> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::Domain(format!("r bounds need p > 1, got {p}")));
    }
    if !(chi > 0.0) || !chi.is_finite() {
        return Err(Error::Domain(format!("r bounds need chi > 0, got {chi}")));
    }
    let pc2 = p * chi * chi;
    if pc2 > 1.0 {
        return Err(Error::Domain(format!("r bounds need p chi^2 <= 1, got {pc2}")));
    }
    let half = 0.5 * (p - 1.0);
    let root = (1.0 - pc2).sqrt();
    // the smaller root in cancellation-free form
    Ok((half * pc2 / (1.0 + root), half * (1.0 + root)))
}

/// The `r`-window at a fixed `p`: `r ∈ (r_minus, min(r_plus, r_cap))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentWindow {
    pub p_low: f64,
    pub p_high: f64,
    pub p: f64,
    pub r_minus: f64,
    pub r_plus: f64,
    /// `μ p`.
    pub r_cap: f64,
}

impl ExponentWindow {
    pub fn new(p: f64, chi: f64, mu: f64) -> Result<Self> {
        let (r_minus, r_plus) = r_bounds(p, chi)?;
        Ok(ExponentWindow { p_low: 1.0, p_high: 1.0 / (chi * chi), p, r_minus, r_plus, r_cap: mu * p })
    }

    pub fn r_high(&self) -> f64 {
        self.r_plus.min(self.r_cap)
    }

    pub fn is_empty(&self) -> bool {
        !(self.p * (1.0 / self.p_high) < 1.0 && self.r_minus < self.r_high())
    }

    pub fn contains(&self, r: f64) -> bool {
        !self.is_empty() && r > self.r_minus && r < self.r_high()
    }
}

/// Whether `(p, r)` lies strictly inside the window for `(χ, μ)`.
pub fn is_admissible(p: f64, r: f64, chi: f64, mu: f64) -> bool {
    ExponentWindow::new(p, chi, mu).map(|w| w.contains(r)).unwrap_or(false)
}

/// Feasible `p`-interval `(max(1, n/2), min(1/χ², 1/(1−2μ)))`; the second cap only when `μ < 1/2`.
pub fn p_interval(chi: f64, mu: f64, n: usize) -> (f64, f64) {
    let low = (n as f64 / 2.0).max(1.0);
    let cap = if mu < 0.5 { 1.0 / (1.0 - 2.0 * mu) } else { f64::INFINITY };
    (low, (1.0 / (chi * chi)).min(cap))
}

/// Midpoint `p` of the feasible interval and midpoint `r` of its window, or
/// `None` when the gates fail or either interval is empty.
pub fn admissible_pair(chi: f64, mu: f64, n: usize) -> Option<(f64, f64)> {
    if !(chi > 0.0 && mu > 0.0) || n == 0 {
        return None;
    }
    let gate = theorem_gate(chi, mu, n);
    if !(gate.chi_ok && gate.lemma58) {
        return None;
    }
    let (lo, hi) = p_interval(chi, mu, n);
    if !(lo < hi) {
        return None;
    }
    let p = 0.5 * (lo + hi);
    let w = ExponentWindow::new(p, chi, mu).ok()?;
    if w.is_empty() {
        return None;
    }
    Some((p, 0.5 * (w.r_minus + w.r_high())))
}

/// `φ(x) = x(3n − 2x) / (4(n − x))`.
pub fn phi(x: f64, n: usize) -> f64 {
    let n = n as f64;
    x * (3.0 * n - 2.0 * x) / (4.0 * (n - x))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    pub fn finite(self) -> Option<f64> {
        match self {
            Exponent::Finite(p) => Some(p),
            Exponent::Infinite => None,
        }
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p:.6}"),
            Exponent::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BootstrapRule {
    /// `p_{k+1} = φ(p_k)` for `p_k < n`.
    Standard,
    /// `p_k = n`: continue from `3n/4`.
    Exceptional,
    /// `p_k > n`: the next step reaches `L^∞`.
    Terminal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapTrace {
    pub n: usize,
    pub sequence: Vec<Exponent>,
    /// `rules[k]` produced `sequence[k + 1]`.
    pub rules: Vec<BootstrapRule>,
}

impl BootstrapTrace {
    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }
}

pub fn bootstrap_sequence(p0: f64, n: usize) -> Result<BootstrapTrace> {
    if n == 0 {
        return Err(Error::Domain("dimension must be at least 1".into()));
    }
    let nf = n as f64;
    if !(p0 > nf / 2.0) || !p0.is_finite() {
        return Err(Error::Domain(format!("bootstrap needs p0 > n/2 = {}, got {p0}", nf / 2.0)));
    }
    let mut sequence = vec![Exponent::Finite(p0)];
    let mut rules = Vec::new();
    let mut p = p0;
    for _ in 0..MAX_BOOTSTRAP_STEPS {
        let (next, rule) = if (p - nf).abs() <= EXCEPTIONAL_TOL {
            (Exponent::Finite(0.75 * nf), BootstrapRule::Exceptional)
        } else if p > nf {
            (Exponent::Infinite, BootstrapRule::Terminal)
        } else {
            (Exponent::Finite(phi(p, n)), BootstrapRule::Standard)
        };
        sequence.push(next);
        rules.push(rule);
        match next {
            Exponent::Infinite => return Ok(BootstrapTrace { n, sequence, rules }),
            Exponent::Finite(q) => p = q,
        }
    }
    Err(Error::Domain(format!("bootstrap from p0 = {p0} did not terminate in {MAX_BOOTSTRAP_STEPS} steps")))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateReport {
    pub n: usize,
    pub chi: f64,
    pub mu: f64,
    /// `χ < √(2/n)`.
    pub chi_ok: bool,
    /// `μ > (n−2)/(2n)`, the threshold the boundedness argument uses.
    pub lemma58: bool,
    /// `μ > (n−2)/n`, the threshold in the headline statement.
    pub thm1_strict: bool,
    pub note: Option<String>,
}

impl GateReport {
    /// Both conditions of the boundedness argument hold.
    pub fn bounded_by_argument(&self) -> bool {
        self.n == 1 || (self.chi_ok && self.lemma58)
    }
}

pub fn theorem_gate(chi: f64, mu: f64, n: usize) -> GateReport {
    let nf = n as f64;
    let note = (n == 1).then(|| {
        "n = 1: global boundedness holds for every chi > 0, mu > 0, kappa >= 0".to_string()
    });
    GateReport {
        n,
        chi,
        mu,
        chi_ok: chi > 0.0 && chi < (2.0 / nf).sqrt(),
        lemma58: mu > (nf - 2.0) / (2.0 * nf),
        thm1_strict: mu > (nf - 2.0) / nf,
        note,
    }
}
