//! Scalar fifth-order WENO kernels.
//!
//! Stencil conventions for the interface `i + 1/2`:
//! * plus sign: `[f(i-2), f(i-1), f(i), f(i+1), f(i+2)]`
//! * minus sign: `[f(i-1), f(i), f(i+1), f(i+2), f(i+3)]`
//!
//! The minus-sign kernels are the plus-sign kernels applied to the reversed
//! stencil, so mirror symmetry holds bit for bit.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Linear weights `d_m`.
pub const IDEAL_WEIGHTS: [f64; 3] = [0.1, 0.6, 0.3];
pub const DEFAULT_EPS: f64 = 1e-6;
/// Offset added to the CNN multipliers.
pub const DEFAULT_C: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SplitSign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "js")]
    Js,
    #[serde(rename = "z")]
    Z,
    #[serde(rename = "ds-js")]
    DsJs,
    #[serde(rename = "ds-z")]
    DsZ,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKind {
    Js,
    Z,
}

impl Scheme {
    pub fn is_ds(self) -> bool {
        matches!(self, Scheme::DsJs | Scheme::DsZ)
    }

    pub fn weight_kind(self) -> WeightKind {
        match self {
            Scheme::Js | Scheme::DsJs => WeightKind::Js,
            Scheme::Z | Scheme::DsZ => WeightKind::Z,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Js => "js",
            Scheme::Z => "z",
            Scheme::DsJs => "ds-js",
            Scheme::DsZ => "ds-z",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "js" | "weno-js" => Ok(Scheme::Js),
            "z" | "weno-z" => Ok(Scheme::Z),
            "ds-js" | "weno-ds-js" => Ok(Scheme::DsJs),
            "ds-z" | "ds" | "weno-ds" | "weno-ds-z" => Ok(Scheme::DsZ),
            other => Err(Error::Config(format!("unknown scheme `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitFluxPair {
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
}

/// Lax-Friedrichs splitting `f± = (f ± alpha * u) / 2`.
pub fn lax_friedrichs_split(f: &[f64], u: &[f64], alpha: f64) -> Result<SplitFluxPair> {
    if f.len() != u.len() {
        return Err(Error::ShapeMismatch(format!(
            "flux has {} values, state has {}",
            f.len(),
            u.len()
        )));
    }
    let (plus, minus) = f
        .iter()
        .zip(u)
        .map(|(&f, &u)| (0.5 * (f + alpha * u), 0.5 * (f - alpha * u)))
        .unzip();
    Ok(SplitFluxPair { plus, minus })
}

#[inline]
fn reversed(s: &[f64; 5]) -> [f64; 5] {
    [s[4], s[3], s[2], s[1], s[0]]
}

/// Third-order candidate fluxes at `i + 1/2` from the plus-sign stencil.
#[inline]
pub fn candidate_fluxes_plus(s: &[f64; 5]) -> [f64; 3] {
    [
        (2.0 * s[0] - 7.0 * s[1] + 11.0 * s[2]) / 6.0,
        (-s[1] + 5.0 * s[2] + 2.0 * s[3]) / 6.0,
        (2.0 * s[2] + 5.0 * s[3] - s[4]) / 6.0,
    ]
}

#[inline]
pub fn candidate_fluxes_minus(s: &[f64; 5]) -> [f64; 3] {
    candidate_fluxes_plus(&reversed(s))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothnessTriple {
    pub beta: [f64; 3],
    pub sign: SplitSign,
}

#[inline]
fn beta_values(s: &[f64; 5]) -> [f64; 3] {
    const C13: f64 = 13.0 / 12.0;
    let a0 = s[0] - 2.0 * s[1] + s[2];
    let b0 = s[0] - 4.0 * s[1] + 3.0 * s[2];
    let a1 = s[1] - 2.0 * s[2] + s[3];
    let b1 = s[3] - s[1];
    let a2 = s[2] - 2.0 * s[3] + s[4];
    let b2 = 3.0 * s[2] - 4.0 * s[3] + s[4];
    [
        C13 * a0 * a0 + 0.25 * b0 * b0,
        C13 * a1 * a1 + 0.25 * b1 * b1,
        C13 * a2 * a2 + 0.25 * b2 * b2,
    ]
}

pub fn beta_plus(s: &[f64; 5]) -> SmoothnessTriple {
    SmoothnessTriple {
        beta: beta_values(s),
        sign: SplitSign::Plus,
    }
}

pub fn beta_minus(s: &[f64; 5]) -> SmoothnessTriple {
    SmoothnessTriple {
        beta: beta_values(&reversed(s)),
        sign: SplitSign::Minus,
    }
}

/// Normalized nonlinear weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightTriple(pub [f64; 3]);

impl WeightTriple {
    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// Weights in the limit where some indicator dominates the rest infinitely:
/// the ideal weights restricted to the smallest indicators.
fn limit_weights(beta: &[f64; 3]) -> [f64; 3] {
    let min = beta[0].min(beta[1]).min(beta[2]);
    let mut w = [0.0; 3];
    for m in 0..3 {
        if beta[m] == min {
            w[m] = IDEAL_WEIGHTS[m];
        }
    }
    let s: f64 = w.iter().sum();
    w.map(|x| x / s)
}

#[inline]
fn normalize(alpha: [f64; 3], beta: &[f64; 3]) -> [f64; 3] {
    let s = alpha[0] + alpha[1] + alpha[2];
    if !s.is_finite() {
        return limit_weights(beta);
    }
    [alpha[0] / s, alpha[1] / s, alpha[2] / s]
}

#[inline]
fn js_weights(beta: &[f64; 3], eps: f64) -> [f64; 3] {
    let d0 = eps + beta[0];
    let d1 = eps + beta[1];
    let d2 = eps + beta[2];
    if d0 == 0.0 || d1 == 0.0 || d2 == 0.0 {
        return limit_weights(beta);
    }
    normalize(
        [
            IDEAL_WEIGHTS[0] / (d0 * d0),
            IDEAL_WEIGHTS[1] / (d1 * d1),
            IDEAL_WEIGHTS[2] / (d2 * d2),
        ],
        beta,
    )
}

#[inline]
fn z_weights(beta: &[f64; 3], eps: f64) -> [f64; 3] {
    let tau = (beta[0] - beta[2]).abs();
    if tau == 0.0 {
        return IDEAL_WEIGHTS;
    }
    let d0 = eps + beta[0];
    let d1 = eps + beta[1];
    let d2 = eps + beta[2];
    if d0 == 0.0 || d1 == 0.0 || d2 == 0.0 {
        return limit_weights(beta);
    }
    let r0 = tau / d0;
    let r1 = tau / d1;
    let r2 = tau / d2;
    normalize(
        [
            IDEAL_WEIGHTS[0] * (1.0 + r0 * r0),
            IDEAL_WEIGHTS[1] * (1.0 + r1 * r1),
            IDEAL_WEIGHTS[2] * (1.0 + r2 * r2),
        ],
        beta,
    )
}

/// Jiang-Shu weights `alpha_m = d_m / (eps + beta_m)^2`, normalized.
///
/// With `eps = 0` and vanishing indicators the limit of the formula is
/// returned instead of NaN.
pub fn weights_js(beta: &SmoothnessTriple, eps: f64) -> WeightTriple {
    WeightTriple(js_weights(&beta.beta, eps))
}

/// WENO-Z weights `alpha_m = d_m (1 + (tau5 / (beta_m + eps))^2)` with
/// `tau5 = |beta_0 - beta_2|`, normalized.
pub fn weights_z(beta: &SmoothnessTriple, eps: f64) -> WeightTriple {
    WeightTriple(z_weights(&beta.beta, eps))
}

pub fn weights(kind: WeightKind, beta: &SmoothnessTriple, eps: f64) -> WeightTriple {
    match kind {
        WeightKind::Js => weights_js(beta, eps),
        WeightKind::Z => weights_z(beta, eps),
    }
}

/// Per-location multipliers `delta` for one line, one characteristic field
/// and one split sign.
///
/// `values[p]` belongs to the substencil centered on line position `p`, so
/// that `delta_{0,i+3/2} = delta_{1,i+1/2} = delta_{2,i-1/2}` holds by
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierField {
    pub values: Vec<f64>,
}

impl MultiplierField {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Multipliers for the three substencils of interface `i + 1/2`, in
    /// substencil order `m = 0, 1, 2`.
    ///
    /// Plus sign reads `D[i+m-1]`, minus sign reads `D[i+2-m]`.
    pub fn window(&self, i: usize, sign: SplitSign) -> Result<[f64; 3]> {
        let (lo, hi) = match sign {
            SplitSign::Plus => (i.checked_sub(1), i + 1),
            SplitSign::Minus => (Some(i), i + 2),
        };
        let lo = lo.ok_or_else(|| {
            Error::ShapeMismatch(format!("interface {i} has no left multiplier"))
        })?;
        if hi >= self.values.len() {
            return Err(Error::ShapeMismatch(format!(
                "interface {i} needs multiplier {hi}, field has {}",
                self.values.len()
            )));
        }
        let d = &self.values;
        Ok(match sign {
            SplitSign::Plus => [d[lo], d[lo + 1], d[lo + 2]],
            SplitSign::Minus => [d[hi], d[hi - 1], d[hi - 2]],
        })
    }
}

/// `beta_m * (delta_m + c)` for a window already ordered by substencil.
pub fn scale_indicators(beta: &SmoothnessTriple, window: &[f64; 3], c: f64) -> Result<SmoothnessTriple> {
    for &d in window {
        if !(d > 0.0) {
            return Err(Error::NonPositiveMultiplier(d));
        }
    }
    Ok(scale_unchecked(beta, window, c))
}

#[inline]
fn scale_unchecked(beta: &SmoothnessTriple, window: &[f64; 3], c: f64) -> SmoothnessTriple {
    SmoothnessTriple {
        beta: [
            beta.beta[0] * (window[0] + c),
            beta.beta[1] * (window[1] + c),
            beta.beta[2] * (window[2] + c),
        ],
        sign: beta.sign,
    }
}

/// Deep-smoothness indicators for interface `i + 1/2`, reading the
/// multipliers attached to each substencil from `field`.
pub fn apply_ds_multipliers(
    beta: &SmoothnessTriple,
    field: &MultiplierField,
    c: f64,
    interface: usize,
) -> Result<SmoothnessTriple> {
    let window = field.window(interface, beta.sign)?;
    scale_indicators(beta, &window, c)
}

/// Multiplier windows for one interface, both split signs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DsWindows {
    pub plus: [f64; 3],
    pub minus: [f64; 3],
    pub c: f64,
}

/// One split half of the interface flux: weights times candidates.
#[inline]
pub fn reconstruct_half(
    stencil: &[f64; 5],
    sign: SplitSign,
    kind: WeightKind,
    eps: f64,
    multipliers: Option<(&[f64; 3], f64)>,
) -> f64 {
    let s = match sign {
        SplitSign::Plus => *stencil,
        SplitSign::Minus => reversed(stencil),
    };
    let cand = candidate_fluxes_plus(&s);
    let mut beta = beta_values(&s);
    let mut eps = eps;
    if let Some((d, c)) = multipliers {
        // Weights are invariant under a common rescaling of (beta, eps), so
        // the centre multiplier is divided out: uniform D then leaves beta
        // bit-identical.
        let centre = d[1] + c;
        beta = [beta[0] * ((d[0] + c) / centre), beta[1], beta[2] * ((d[2] + c) / centre)];
        eps /= centre;
    }
    let w = match kind {
        WeightKind::Js => js_weights(&beta, eps),
        WeightKind::Z => z_weights(&beta, eps),
    };
    w[0] * cand[0] + w[1] * cand[1] + w[2] * cand[2]
}

/// Numerical flux `f^+_{i+1/2} + f^-_{i+1/2}` at one interface.
pub fn reconstruct_interface(
    plus: &[f64; 5],
    minus: &[f64; 5],
    scheme: Scheme,
    eps: f64,
    ds: Option<&DsWindows>,
) -> Result<f64> {
    let kind = scheme.weight_kind();
    if !scheme.is_ds() {
        return Ok(reconstruct_half(plus, SplitSign::Plus, kind, eps, None)
            + reconstruct_half(minus, SplitSign::Minus, kind, eps, None));
    }
    let ds = ds.ok_or_else(|| Error::ModelMissing(scheme.to_string()))?;
    for &d in ds.plus.iter().chain(&ds.minus) {
        if !(d > 0.0) {
            return Err(Error::NonPositiveMultiplier(d));
        }
    }
    Ok(
        reconstruct_half(plus, SplitSign::Plus, kind, eps, Some((&ds.plus, ds.c)))
            + reconstruct_half(minus, SplitSign::Minus, kind, eps, Some((&ds.minus, ds.c))),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close3(a: [f64; 3], b: [f64; 3], tol: f64) {
        for k in 0..3 {
            assert!((a[k] - b[k]).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn split_examples() {
        let s = lax_friedrichs_split(&[0.0], &[0.0], 1.0).unwrap();
        assert_eq!((s.plus[0], s.minus[0]), (0.0, 0.0));
        let s = lax_friedrichs_split(&[2.0], &[1.0], 3.0).unwrap();
        assert_eq!((s.plus[0], s.minus[0]), (2.5, -0.5));
        assert!(lax_friedrichs_split(&[1.0, 2.0], &[1.0], 1.0).is_err());
    }

    #[test]
    fn candidate_examples() {
        close3(candidate_fluxes_plus(&[1.0, 2.0, 3.0, 4.0, 5.0]), [3.5; 3], 1e-15);
        // the minus stencil starts one cell later, so its interface value is 2.5
        close3(candidate_fluxes_minus(&[1.0, 2.0, 3.0, 4.0, 5.0]), [2.5; 3], 1e-15);
        close3(candidate_fluxes_plus(&[0.7; 5]), [0.7; 3], 1e-15);
        close3(candidate_fluxes_minus(&[0.7; 5]), [0.7; 3], 1e-15);
        close3(candidate_fluxes_plus(&[0.0, 0.0, 6.0, 0.0, 0.0]), [11.0, 5.0, 2.0], 1e-14);
    }

    #[test]
    fn minus_candidates_match_explicit_formulas() {
        // f(i-1) .. f(i+3)
        let s = [0.3, -1.2, 2.5, 0.8, 4.1];
        let explicit = [
            (11.0 * s[2] - 7.0 * s[3] + 2.0 * s[4]) / 6.0,
            (2.0 * s[1] + 5.0 * s[2] - s[3]) / 6.0,
            (-s[0] + 5.0 * s[1] + 2.0 * s[2]) / 6.0,
        ];
        close3(candidate_fluxes_minus(&s), explicit, 1e-14);
        let b = beta_minus(&s).beta;
        let c13 = 13.0 / 12.0;
        let explicit = [
            c13 * (s[2] - 2.0 * s[3] + s[4]).powi(2) + 0.25 * (3.0 * s[2] - 4.0 * s[3] + s[4]).powi(2),
            c13 * (s[1] - 2.0 * s[2] + s[3]).powi(2) + 0.25 * (s[1] - s[3]).powi(2),
            c13 * (s[0] - 2.0 * s[1] + s[2]).powi(2) + 0.25 * (s[0] - 4.0 * s[1] + 3.0 * s[2]).powi(2),
        ];
        close3(b, explicit, 1e-13);
    }

    #[test]
    fn beta_examples() {
        close3(beta_plus(&[1.0, 2.0, 3.0, 4.0, 5.0]).beta, [1.0; 3], 1e-14);
        close3(beta_minus(&[1.0, 2.0, 3.0, 4.0, 5.0]).beta, [1.0; 3], 1e-14);
        assert_eq!(beta_plus(&[3.0; 5]).beta, [0.0; 3]);
        let b = beta_plus(&[0.0, 0.0, 1.0, 0.0, 0.0]).beta;
        // The centre substencil sees a second difference of -2.
        close3(b, [13.0 / 12.0 + 2.25, 13.0 / 3.0, 13.0 / 12.0 + 2.25], 1e-14);
    }

    #[test]
    fn weight_examples() {
        let t = |b| SmoothnessTriple { beta: b, sign: SplitSign::Plus };
        close3(weights_js(&t([1.0; 3]), DEFAULT_EPS).0, IDEAL_WEIGHTS, 1e-15);
        close3(weights_js(&t([0.0; 3]), DEFAULT_EPS).0, IDEAL_WEIGHTS, 1e-15);
        let w = weights_js(&t([1e6, 1.0, 1.0]), 0.0).0;
        assert!(w[0] < 1e-12 * (w[1] + w[2]));
        close3(weights_z(&t([1.0; 3]), DEFAULT_EPS).0, IDEAL_WEIGHTS, 1e-15);
        close3(weights_z(&t([0.0; 3]), DEFAULT_EPS).0, IDEAL_WEIGHTS, 1e-15);
        let w = weights_z(&t([4.0, 1.0, 2.0]), 0.0).0;
        close3(w, [0.125 / 3.725, 3.0 / 3.725, 0.6 / 3.725], 1e-15);
    }

    #[test]
    fn zero_eps_limits_are_finite() {
        let t = |b| SmoothnessTriple { beta: b, sign: SplitSign::Plus };
        for b in [[0.0, 0.0, 0.0], [0.0, 1.0, 2.0], [3.0, 0.0, 0.0], [1e-300, 1.0, 1.0]] {
            for w in [weights_js(&t(b), 0.0), weights_z(&t(b), 0.0)] {
                assert!(w.0.iter().all(|x| x.is_finite() && *x >= 0.0), "{b:?} -> {w:?}");
                assert!((w.sum() - 1.0).abs() < 1e-14);
            }
        }
        close3(weights_js(&t([0.0, 1.0, 0.0]), 0.0).0, [0.25, 0.0, 0.75], 1e-15);
    }

    #[test]
    fn ds_multiplier_examples() {
        let beta = SmoothnessTriple { beta: [0.3, 1.7, 2.2], sign: SplitSign::Plus };
        let field = MultiplierField::new(vec![0.9; 8]);
        for sign in [SplitSign::Plus, SplitSign::Minus] {
            let b = SmoothnessTriple { sign, ..beta };
            assert_eq!(apply_ds_multipliers(&b, &field, 0.1, 3).unwrap().beta, b.beta);
        }

        let ones = SmoothnessTriple { beta: [1.0; 3], sign: SplitSign::Plus };
        let field = MultiplierField::new(vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        close3(apply_ds_multipliers(&ones, &field, 0.1, 2).unwrap().beta, [2.1, 3.1, 4.1], 1e-15);
        let minus = SmoothnessTriple { sign: SplitSign::Minus, ..ones };
        close3(apply_ds_multipliers(&minus, &field, 0.1, 2).unwrap().beta, [5.1, 4.1, 3.1], 1e-15);

        let bad = MultiplierField::new(vec![1.0, 0.0, 1.0]);
        assert!(matches!(
            apply_ds_multipliers(&ones, &bad, 0.1, 1),
            Err(Error::NonPositiveMultiplier(_))
        ));
        assert!(field.window(0, SplitSign::Plus).is_err());
        assert!(field.window(3, SplitSign::Minus).is_err());
    }

    #[test]
    fn shift_identity_of_multiplier_windows() {
        let field = MultiplierField::new((0..12).map(|k| 1.0 + (k as f64).sin().abs()).collect());
        for i in 2..9 {
            let here = field.window(i, SplitSign::Plus).unwrap();
            let right = field.window(i + 1, SplitSign::Plus).unwrap();
            let left = field.window(i - 1, SplitSign::Plus).unwrap();
            assert_eq!(here[1], right[0]);
            assert_eq!(here[1], left[2]);
            let here = field.window(i, SplitSign::Minus).unwrap();
            let right = field.window(i + 1, SplitSign::Minus).unwrap();
            let left = field.window(i - 1, SplitSign::Minus).unwrap();
            assert_eq!(here[1], left[0]);
            assert_eq!(here[1], right[2]);
        }
    }

    #[test]
    fn ds_requires_multipliers() {
        let s = [1.0; 5];
        assert!(matches!(
            reconstruct_interface(&s, &s, Scheme::DsZ, DEFAULT_EPS, None),
            Err(Error::ModelMissing(_))
        ));
    }

    #[test]
    fn scheme_parsing() {
        assert_eq!("ds-z".parse::<Scheme>().unwrap(), Scheme::DsZ);
        assert_eq!("JS".parse::<Scheme>().unwrap(), Scheme::Js);
        assert!("weno7".parse::<Scheme>().is_err());
        assert_eq!(Scheme::DsJs.to_string(), "ds-js");
    }

    fn stencil() -> impl Strategy<Value = [f64; 5]> {
        proptest::array::uniform5(-10.0f64..10.0)
    }

    proptest! {
        #[test]
        fn weights_are_convex(s in stencil(), eps in prop_oneof![Just(0.0), Just(DEFAULT_EPS)]) {
            for b in [beta_plus(&s), beta_minus(&s)] {
                for w in [weights_js(&b, eps), weights_z(&b, eps)] {
                    prop_assert!((w.sum() - 1.0).abs() <= 1e-14);
                    prop_assert!(w.0.iter().all(|x| (0.0..=1.0).contains(x)));
                }
            }
        }

        #[test]
        fn mirror_symmetry(s in stencil()) {
            let r = [s[4], s[3], s[2], s[1], s[0]];
            prop_assert_eq!(candidate_fluxes_minus(&s), candidate_fluxes_plus(&r));
            prop_assert_eq!(beta_minus(&s).beta, beta_plus(&r).beta);
            for kind in [WeightKind::Js, WeightKind::Z] {
                prop_assert_eq!(
                    reconstruct_half(&s, SplitSign::Minus, kind, DEFAULT_EPS, None),
                    reconstruct_half(&r, SplitSign::Plus, kind, DEFAULT_EPS, None)
                );
            }
        }

        #[test]
        fn split_sum_identity(
            f in proptest::collection::vec(-5.0f64..5.0, 16),
            u in proptest::collection::vec(-5.0f64..5.0, 16),
            alpha in 0.0f64..10.0,
        ) {
            let s = lax_friedrichs_split(&f, &u, alpha).unwrap();
            for k in 0..f.len() {
                prop_assert!((s.plus[k] + s.minus[k] - f[k]).abs() <= 1e-13);
            }
        }

        #[test]
        fn uniform_multipliers_are_neutral_without_eps(
            s in stencil(),
            d0 in 0.01f64..5.0,
        ) {
            for b in [beta_plus(&s), beta_minus(&s)] {
                prop_assume!(b.beta.iter().all(|x| *x > 1e-8));
                let scaled = scale_indicators(&b, &[d0; 3], DEFAULT_C).unwrap();
                let (w, wd) = (weights_js(&b, 0.0).0, weights_js(&scaled, 0.0).0);
                for m in 0..3 { prop_assert!((w[m] - wd[m]).abs() <= 1e-13); }
                let (w, wd) = (weights_z(&b, 0.0).0, weights_z(&scaled, 0.0).0);
                for m in 0..3 { prop_assert!((w[m] - wd[m]).abs() <= 1e-13); }
            }
        }

        #[test]
        fn affine_data_is_reconstructed_exactly(
            a in -3.0f64..3.0,
            b in -3.0f64..3.0,
            d in proptest::collection::vec(0.01f64..3.0, 6),
        ) {
            // f(x) = a + b x at nodes x = -2..3, interface at x = 1/2
            let line: Vec<f64> = (-2..=3).map(|x| a + b * x as f64).collect();
            let plus = [line[0], line[1], line[2], line[3], line[4]];
            let minus = [line[1], line[2], line[3], line[4], line[5]];
            let ds = DsWindows { plus: [d[0], d[1], d[2]], minus: [d[3], d[4], d[5]], c: DEFAULT_C };
            let exact = 2.0 * (a + 0.5 * b);
            for scheme in [Scheme::Js, Scheme::Z, Scheme::DsJs, Scheme::DsZ] {
                let f = reconstruct_interface(&plus, &minus, scheme, DEFAULT_EPS, Some(&ds)).unwrap();
                prop_assert!((f - exact).abs() <= 1e-13, "{scheme}: {f} vs {exact}");
            }
        }
    }
}
