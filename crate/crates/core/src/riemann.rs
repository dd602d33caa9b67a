//! Four-quadrant Riemann initial data, wave relations and samplers.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euler::PrimitiveState;

/// Quadrant states `w[0..4]` for quadrants 1..4: quadrant 1 is `x >= 0.5,
/// y >= 0.5`, numbered counterclockwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiemannSpec {
    pub states: [PrimitiveState; 4],
    pub gamma: f64,
    pub t_final: f64,
    pub config: u8,
}

impl RiemannSpec {
    pub fn new(states: [PrimitiveState; 4], gamma: f64, t_final: f64, config: u8) -> Result<Self> {
        for w in &states {
            w.check_physical()?;
        }
        if !(gamma > 1.0) || !(t_final >= 0.0) {
            return Err(Error::Config(format!("gamma = {gamma}, T = {t_final}")));
        }
        Ok(Self {
            states,
            gamma,
            t_final,
            config,
        })
    }

    /// Quadrant state `q` in 1..=4.
    pub fn w(&self, q: usize) -> &PrimitiveState {
        &self.states[q - 1]
    }

    pub fn quadrant_of(x: f64, y: f64) -> usize {
        match (x >= 0.5, y >= 0.5) {
            (true, true) => 1,
            (false, true) => 2,
            (false, false) => 3,
            (true, false) => 4,
        }
    }

    pub fn state_at(&self, x: f64, y: f64) -> PrimitiveState {
        *self.w(Self::quadrant_of(x, y))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec is serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        Self::new(spec.states, spec.gamma, spec.t_final, spec.config)
    }
}

pub fn mu(gamma: f64) -> f64 {
    (gamma - 1.0) / (gamma + 1.0)
}

/// Rarefaction relation `2 sqrt(gamma) / (gamma - 1) (sqrt(p_l/rho_l) - sqrt(p_r/rho_r))`.
pub fn phi(l: &PrimitiveState, r: &PrimitiveState, gamma: f64) -> f64 {
    2.0 * gamma.sqrt() / (gamma - 1.0) * ((l.p / l.rho).sqrt() - (r.p / r.rho).sqrt())
}

/// Shock relation, positive branch.
pub fn psi(l: &PrimitiveState, r: &PrimitiveState) -> Result<f64> {
    let radicand = (l.p - r.p) * (l.rho - r.rho) / (l.rho * r.rho);
    if !(radicand > 0.0) {
        return Err(Error::InvalidWaveData(format!(
            "shock relation needs (p_l - p_r)(rho_l - rho_r) > 0, got {radicand}"
        )));
    }
    Ok(radicand.sqrt())
}

/// Shock density ratio as a function of the pressure ratio `p_l / p_r`.
pub fn pi_ratio(pressure_ratio: f64, gamma: f64) -> f64 {
    let m = mu(gamma);
    (pressure_ratio + m) / (1.0 + m * pressure_ratio)
}

pub fn pi(l: &PrimitiveState, r: &PrimitiveState, gamma: f64) -> f64 {
    pi_ratio(l.p / r.p, gamma)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub config: u8,
    pub residuals: Vec<(String, f64)>,
}

impl RelationReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|(_, r)| r.abs()).fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.residuals.iter().all(|(_, r)| r.abs() <= tol)
    }
}

/// Residuals of every wave relation that defines configuration 2, 3 or 16.
pub fn verify_relations(spec: &RiemannSpec) -> Result<RelationReport> {
    let g = spec.gamma;
    let [w1, w2, w3, w4] = &spec.states;
    let mut out: Vec<(String, f64)> = Vec::new();
    let mut push = |name: &str, r: f64| out.push((name.to_string(), r));
    let polytropic = |l: &PrimitiveState, r: &PrimitiveState| l.rho / r.rho - (l.p / r.p).powf(1.0 / g);
    let shock = |l: &PrimitiveState, r: &PrimitiveState| psi(l, r).unwrap_or(f64::NAN);
    match spec.config {
        2 => {
            push("u2 - u1 - phi21", w2.u - w1.u - phi(w2, w1, g));
            push("v4 - v1 - phi41", w4.v - w1.v - phi(w4, w1, g));
            push("u3 - u4 - phi43", w3.u - w4.u - phi(w4, w3, g));
            push("v3 - v2 - phi23", w3.v - w2.v - phi(w2, w3, g));
            push("u3 - u2", w3.u - w2.u);
            push("u4 - u1", w4.u - w1.u);
            push("v2 - v1", w2.v - w1.v);
            push("v3 - v4", w3.v - w4.v);
            push("rho2/rho1 polytropic", polytropic(w2, w1));
            push("rho4/rho1 polytropic", polytropic(w4, w1));
            push("rho4/rho3 polytropic", polytropic(w4, w3));
            push("rho2/rho3 polytropic", polytropic(w2, w3));
        }
        3 => {
            push("u2 - u1 - psi21", w2.u - w1.u - shock(w2, w1));
            push("v4 - v1 - psi41", w4.v - w1.v - shock(w4, w1));
            push("u3 - u4 - psi34", w3.u - w4.u - shock(w3, w4));
            push("v3 - v2 - psi32", w3.v - w2.v - shock(w3, w2));
            push("u3 - u2", w3.u - w2.u);
            push("u4 - u1", w4.u - w1.u);
            push("v2 - v1", w2.v - w1.v);
            push("v3 - v4", w3.v - w4.v);
            push("rho2/rho1 - pi21", w2.rho / w1.rho - pi(w2, w1, g));
            push("rho4/rho1 - pi41", w4.rho / w1.rho - pi(w4, w1, g));
            push("rho3/rho4 - pi34", w3.rho / w4.rho - pi(w3, w4, g));
            push("rho3/rho2 - pi32", w3.rho / w2.rho - pi(w3, w2, g));
        }
        16 => {
            push("u1 - u2 - phi21", w1.u - w2.u - phi(w2, w1, g));
            push("rho2/rho1 polytropic", polytropic(w2, w1));
            push("v4 - v1 - psi41", w4.v - w1.v - shock(w4, w1));
            push("rho4/rho1 - pi41", w4.rho / w1.rho - pi(w4, w1, g));
            push("u3 - u1", w3.u - w1.u);
            push("u4 - u1", w4.u - w1.u);
            push("v2 - v1", w2.v - w1.v);
            push("v3 - v1", w3.v - w1.v);
            push("p3 - p2", w3.p - w2.p);
            push("p4 - p2", w4.p - w2.p);
        }
        other => return Err(Error::UnknownConfiguration(other)),
    }
    Ok(RelationReport {
        config: spec.config,
        residuals: out,
    })
}

pub const BUILTIN_NAMES: [&str; 5] = ["config2", "config3", "config16", "config11", "config19"];

pub fn builtin_ic(name: &str) -> Result<RiemannSpec> {
    let w = PrimitiveState::new;
    let (states, t_final, config) = match name {
        "config2" => (
            [
                w(1.0, 0.0, 0.0, 1.0),
                w(0.5197, -0.7259, 0.0, 0.4),
                w(1.0, -0.7259, -0.7259, 1.0),
                w(0.5197, 0.0, -0.7259, 0.4),
            ],
            0.2,
            2,
        ),
        "config3" => (
            [
                w(1.5, 0.0, 0.0, 1.5),
                w(0.5323, 1.206, 0.0, 0.3),
                w(0.138, 1.206, 1.206, 0.029),
                w(0.5323, 0.0, 1.206, 0.3),
            ],
            0.3,
            3,
        ),
        "config16" => (
            [
                w(0.5313, 0.1, 0.1, 0.4),
                w(1.0222, -0.6179, 0.1, 1.0),
                w(0.8, 0.1, 0.1, 1.0),
                w(1.0, 0.1, 0.8276, 1.0),
            ],
            0.2,
            16,
        ),
        "config11" => (
            [
                w(1.0, 0.1, 0.0, 1.0),
                w(0.5313, 0.8276, 0.0, 0.4),
                w(0.8, 0.1, 0.0, 0.4),
                w(0.5313, 0.1, 0.7276, 0.4),
            ],
            0.3,
            11,
        ),
        "config19" => (
            [
                w(1.0, 0.0, 0.3, 1.0),
                w(2.0, 0.0, -0.3, 1.0),
                w(1.0625, 0.0, 0.2145, 0.4),
                w(0.5197, 0.0, -0.4259, 0.4),
            ],
            0.3,
            19,
        ),
        other => return Err(Error::UnknownName(other.to_string())),
    };
    RiemannSpec::new(states, 1.4, t_final, config)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.hi > self.lo {
            rng.random_range(self.lo..=self.hi)
        } else {
            self.lo
        }
    }
}

const GAMMA_RANGE: Interval = Interval::new(1.1, 1.67);

/// Sampling ranges; `rho_b` has its upper end replaced by the drawn
/// `rho_a` when `rho_b_capped` is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleRanges {
    pub rho_a: Interval,
    pub rho_b: Interval,
    pub rho_b_capped: bool,
    pub p_a: Interval,
    pub p_b: Option<Interval>,
    pub velocity: Interval,
    pub gamma: Interval,
    pub t_final: Interval,
}

impl SampleRanges {
    pub fn standard(config: u8) -> Result<Self> {
        let r = match config {
            2 => Self {
                rho_a: Interval::new(0.7, 2.0),
                rho_b: Interval::new(0.5, 2.0),
                rho_b_capped: true,
                p_a: Interval::new(0.2, 1.5),
                p_b: None,
                velocity: Interval::new(-1.0, 1.0),
                gamma: GAMMA_RANGE,
                t_final: Interval::new(0.1, 0.2),
            },
            3 => Self {
                rho_a: Interval::new(1.0, 2.0),
                rho_b: Interval::new(0.5, 1.0),
                rho_b_capped: false,
                p_a: Interval::new(1.0, 2.0),
                p_b: None,
                velocity: Interval::new(-0.25, 0.25),
                gamma: GAMMA_RANGE,
                t_final: Interval::new(0.1, 0.3),
            },
            16 => Self {
                rho_a: Interval::new(1.0, 2.0),
                rho_b: Interval::new(0.5, 2.0),
                rho_b_capped: true,
                p_a: Interval::new(0.3, 1.0),
                p_b: Some(Interval::new(1.0, 1.5)),
                velocity: Interval::new(-0.25, 0.25),
                gamma: GAMMA_RANGE,
                t_final: Interval::new(0.1, 0.2),
            },
            other => return Err(Error::UnknownConfiguration(other)),
        };
        Ok(r)
    }
}

/// Independent draws from which a configuration is built.
///
/// Configuration 2 and 3 read `(rho1, rho2, p1)` from `(rho_a, rho_b, p_a)`;
/// configuration 16 reads `(rho4, rho3, p1, p2)` from
/// `(rho_a, rho_b, p_a, p_b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Draw {
    pub rho_a: f64,
    pub rho_b: f64,
    pub p_a: f64,
    pub p_b: f64,
    pub u1: f64,
    pub gamma: f64,
    pub t_final: f64,
}

impl Draw {
    pub fn sample<R: Rng + ?Sized>(ranges: &SampleRanges, rng: &mut R) -> Self {
        let rho_a = ranges.rho_a.draw(rng);
        let rho_b = if ranges.rho_b_capped {
            Interval::new(ranges.rho_b.lo, rho_a.min(ranges.rho_b.hi)).draw(rng)
        } else {
            ranges.rho_b.draw(rng)
        };
        let p_a = ranges.p_a.draw(rng);
        let p_b = ranges.p_b.map_or(0.0, |i| i.draw(rng));
        let u1 = ranges.velocity.draw(rng);
        let gamma = if ranges.gamma.hi > ranges.gamma.lo {
            rng.random_range(ranges.gamma.lo..ranges.gamma.hi)
        } else {
            ranges.gamma.lo
        };
        let t_final = ranges.t_final.draw(rng);
        Self {
            rho_a,
            rho_b,
            p_a,
            p_b,
            u1,
            gamma,
            t_final,
        }
    }
}

fn finish(states: [PrimitiveState; 4], d: &Draw, config: u8) -> Result<RiemannSpec> {
    if states.iter().any(|w| !w.is_physical()) {
        return Err(Error::RejectSample(format!("non-physical state in {states:?}")));
    }
    RiemannSpec::new(states, d.gamma, d.t_final, config)
}

/// Four rarefactions.
pub fn build_config2(d: &Draw) -> Result<RiemannSpec> {
    let g = d.gamma;
    let (rho1, rho2, p1) = (d.rho_a, d.rho_b, d.p_a);
    let (u1, v1) = (d.u1, d.u1);
    let p2 = p1 * (rho2 / rho1).powf(g);
    let w1 = PrimitiveState::new(rho1, u1, v1, p1);
    let mut w2 = PrimitiveState::new(rho2, 0.0, v1, p2);
    let mut w4 = PrimitiveState::new(rho2, u1, 0.0, p2);
    w2.u = u1 + phi(&w2, &w1, g);
    w4.v = v1 + phi(&w4, &w1, g);
    let w3 = PrimitiveState::new(rho1, w2.u, w4.v, p1);
    finish([w1, w2, w3, w4], d, 2)
}

/// Four shocks.
pub fn build_config3(d: &Draw) -> Result<RiemannSpec> {
    let g = d.gamma;
    let m = mu(g);
    let (rho1, rho2, p1) = (d.rho_a, d.rho_b, d.p_a);
    let (u1, v1) = (d.u1, d.u1);
    let r = rho2 / rho1;
    if r <= m || m * r >= 1.0 {
        return Err(Error::RejectSample(format!("density ratio {r} outside ({m}, 1/{m})")));
    }
    let p2 = p1 * (r - m) / (1.0 - m * r);
    let w1 = PrimitiveState::new(rho1, u1, v1, p1);
    let mut w2 = PrimitiveState::new(rho2, 0.0, v1, p2);
    let psi21 = psi(&w2, &w1).map_err(|e| Error::RejectSample(e.to_string()))?;
    w2.u = u1 + psi21;
    let mut w4 = PrimitiveState::new(rho2, u1, 0.0, p2);
    w4.v = v1 + psi(&w4, &w1).map_err(|e| Error::RejectSample(e.to_string()))?;
    let (rho3, p3) = solve_state3(&w2, psi21, g)?;
    let w3 = PrimitiveState::new(rho3, w2.u, w4.v, p3);
    finish([w1, w2, w3, w4], d, 3)
}

/// State 3 of the four-shock configuration from state 2 (= state 4 in
/// density and pressure) and the shock strength `psi21`.
///
/// Solves `psi(w3, w2) = psi21` with `rho3 = rho2 * pi(p3 / p2)` for the
/// compressive branch `p3 < p2` by bisection.
pub fn solve_state3(w2: &PrimitiveState, psi21: f64, gamma: f64) -> Result<(f64, f64)> {
    let state3 = |p3: f64| PrimitiveState::new(w2.rho * pi_ratio(p3 / w2.p, gamma), 0.0, 0.0, p3);
    let residual = |p3: f64| {
        let w3 = state3(p3);
        let s = (w3.p - w2.p) * (w3.rho - w2.rho) / (w3.rho * w2.rho);
        s.max(0.0).sqrt() - psi21
    };
    let (mut lo, mut hi) = (w2.p * 1e-12, w2.p * (1.0 - 1e-9));
    let (f_lo, f_hi) = (residual(lo), residual(hi));
    if !(f_lo > 0.0 && f_hi < 0.0) {
        return Err(Error::RejectSample(format!(
            "no compressive root for state 3 (g(lo) = {f_lo}, g(hi) = {f_hi})"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if residual(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    let p3 = 0.5 * (lo + hi);
    Ok((state3(p3).rho, p3))
}

/// Rarefaction, shock and two contacts.
pub fn build_config16(d: &Draw) -> Result<RiemannSpec> {
    let g = d.gamma;
    let (rho4, rho3, p1, p2) = (d.rho_a, d.rho_b, d.p_a, d.p_b);
    let (u1, v1) = (d.u1, d.u1);
    if !(p2 > p1) {
        return Err(Error::RejectSample(format!("need p1 < p2, got {p1} >= {p2}")));
    }
    let rho1 = rho4 / pi_ratio(p2 / p1, g);
    let rho2 = rho1 * (p2 / p1).powf(1.0 / g);
    let w1 = PrimitiveState::new(rho1, u1, v1, p1);
    let mut w2 = PrimitiveState::new(rho2, 0.0, v1, p2);
    w2.u = u1 - phi(&w2, &w1, g);
    let w3 = PrimitiveState::new(rho3, u1, v1, p2);
    let mut w4 = PrimitiveState::new(rho4, u1, 0.0, p2);
    w4.v = v1 + psi(&w4, &w1).map_err(|e| Error::RejectSample(e.to_string()))?;
    finish([w1, w2, w3, w4], d, 16)
}

pub fn build_config(config: u8, d: &Draw) -> Result<RiemannSpec> {
    match config {
        2 => build_config2(d),
        3 => build_config3(d),
        16 => build_config16(d),
        other => Err(Error::UnknownConfiguration(other)),
    }
}

/// Maximum draws per accepted sample.
pub const MAX_ATTEMPTS: usize = 10_000;

/// Rejection sampler; returns the spec and the number of rejected draws.
pub fn sample_config<R: Rng + ?Sized>(
    config: u8,
    ranges: &SampleRanges,
    rng: &mut R,
) -> Result<(RiemannSpec, usize)> {
    for rejected in 0..MAX_ATTEMPTS {
        let draw = Draw::sample(ranges, rng);
        match build_config(config, &draw) {
            Ok(spec) => return Ok((spec, rejected)),
            Err(Error::RejectSample(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::RejectSample(format!(
        "configuration {config}: {MAX_ATTEMPTS} consecutive draws rejected"
    )))
}

pub fn sample_config2<R: Rng + ?Sized>(rng: &mut R, ranges: &SampleRanges) -> Result<RiemannSpec> {
    sample_config(2, ranges, rng).map(|(s, _)| s)
}

pub fn sample_config3<R: Rng + ?Sized>(rng: &mut R, ranges: &SampleRanges) -> Result<RiemannSpec> {
    sample_config(3, ranges, rng).map(|(s, _)| s)
}

pub fn sample_config16<R: Rng + ?Sized>(rng: &mut R, ranges: &SampleRanges) -> Result<RiemannSpec> {
    sample_config(16, ranges, rng).map(|(s, _)| s)
}

/// Initial primitive state at a node.
pub fn initial_state(spec: &RiemannSpec, x: f64, y: f64) -> PrimitiveState {
    spec.state_at(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn trivial_relations() {
        let w = PrimitiveState::new(1.2, 0.0, 0.0, 0.7);
        assert_eq!(phi(&w, &w, 1.4), 0.0);
        assert_eq!(pi(&w, &PrimitiveState::new(0.3, 0.0, 0.0, 0.7), 1.4), 1.0);
        assert!(matches!(psi(&w, &w), Err(Error::InvalidWaveData(_))));
    }

    #[test]
    fn config3_reference_values() {
        let spec = builtin_ic("config3").unwrap();
        let (w1, w2) = (spec.w(1), spec.w(2));
        let hand = ((1.5f64 - 0.3) * (1.5 - 0.5323) / (1.5 * 0.5323)).sqrt();
        assert!(close(psi(w2, w1).unwrap(), hand, 1e-14));
        assert!(close(hand, 1.206, 1e-3));
        assert!(close(pi(w2, w1, 1.4), 0.5323 / 1.5, 1e-3));
    }

    #[test]
    fn config2_reference_values() {
        let spec = builtin_ic("config2").unwrap();
        assert!(close(spec.w(2).rho, 0.4f64.powf(1.0 / 1.4), 1e-3));
        assert!(close(phi(spec.w(2), spec.w(1), 1.4), -0.7259, 1e-3));
    }

    #[test]
    fn config16_reference_values() {
        let spec = builtin_ic("config16").unwrap();
        let [w1, w2, w3, w4] = spec.states;
        assert!(w1.p < w2.p && w2.p == w3.p && w3.p == w4.p);
        assert!(w3.u == w1.u && w4.u == w1.u && w2.v == w1.v && w3.v == w1.v);
        assert!(close(w1.u - w2.u, phi(&w2, &w1, 1.4), 1e-3));
    }

    #[test]
    fn builtin_specs() {
        let c3 = builtin_ic("config3").unwrap();
        assert_eq!(*c3.w(3), PrimitiveState::new(0.138, 1.206, 1.206, 0.029));
        assert_eq!(c3.t_final, 0.3);
        assert_eq!(*builtin_ic("config11").unwrap().w(2), PrimitiveState::new(0.5313, 0.8276, 0.0, 0.4));
        assert_eq!(*builtin_ic("config19").unwrap().w(4), PrimitiveState::new(0.5197, 0.0, -0.4259, 0.4));
        assert!(matches!(builtin_ic("config7"), Err(Error::UnknownName(_))));
        for name in ["config2", "config3", "config16"] {
            let report = verify_relations(&builtin_ic(name).unwrap()).unwrap();
            assert!(report.passes(1e-3), "{name}: {report:?}");
        }
        assert!(matches!(
            verify_relations(&builtin_ic("config11").unwrap()),
            Err(Error::UnknownConfiguration(11))
        ));
    }

    #[test]
    fn quadrants() {
        assert_eq!(RiemannSpec::quadrant_of(0.75, 0.75), 1);
        assert_eq!(RiemannSpec::quadrant_of(0.25, 0.75), 2);
        assert_eq!(RiemannSpec::quadrant_of(0.25, 0.25), 3);
        assert_eq!(RiemannSpec::quadrant_of(0.75, 0.25), 4);
        assert_eq!(RiemannSpec::quadrant_of(0.5, 0.5), 1);
    }

    #[test]
    fn state3_root_recovers_reference_constants() {
        let spec = builtin_ic("config3").unwrap();
        let psi21 = psi(spec.w(2), spec.w(1)).unwrap();
        let (rho3, p3) = solve_state3(spec.w(2), psi21, 1.4).unwrap();
        assert!(close(rho3, 0.138, 2e-3), "{rho3}");
        assert!(close(p3, 0.029, 2e-3), "{p3}");
    }

    #[test]
    fn degenerate_config2_draw() {
        let d = Draw {
            rho_a: 1.1,
            rho_b: 1.1,
            p_a: 0.9,
            p_b: 0.0,
            u1: 0.3,
            gamma: 1.4,
            t_final: 0.1,
        };
        let spec = build_config2(&d).unwrap();
        assert!(spec.states.iter().all(|w| *w == spec.states[0]));
    }

    #[test]
    fn perturbed_spec_fails() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut spec = sample_config3(&mut rng, &SampleRanges::standard(3).unwrap()).unwrap();
        assert!(verify_relations(&spec).unwrap().passes(1e-10));
        spec.states[1].p *= 1.1;
        assert!(verify_relations(&spec).unwrap().max_residual() > 1e-2);
    }

    #[test]
    fn symmetric_draws_give_symmetric_specs() {
        for config in [2u8, 3] {
            let d = Draw {
                rho_a: 1.5,
                rho_b: 0.8,
                p_a: 1.2,
                p_b: 0.0,
                u1: 0.0,
                gamma: 1.4,
                t_final: 0.1,
            };
            let spec = build_config(config, &d).unwrap();
            let swap = |w: &PrimitiveState| w.transposed();
            assert_eq!(swap(spec.w(1)), *spec.w(1));
            assert_eq!(swap(spec.w(3)), *spec.w(3));
            assert_eq!(swap(spec.w(2)), *spec.w(4));
        }
    }

    #[test]
    fn samples_respect_ranges() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for config in [2u8, 3, 16] {
            let ranges = SampleRanges::standard(config).unwrap();
            for _ in 0..200 {
                let (spec, _) = sample_config(config, &ranges, &mut rng).unwrap();
                assert!(spec.gamma > 1.1 && spec.gamma < 1.67);
                assert!(spec.t_final >= ranges.t_final.lo && spec.t_final <= ranges.t_final.hi);
                assert_eq!(spec.w(1).u, spec.w(1).v);
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let spec = builtin_ic("config16").unwrap();
        assert_eq!(RiemannSpec::from_json(&spec.to_json()).unwrap(), spec);
    }
}
