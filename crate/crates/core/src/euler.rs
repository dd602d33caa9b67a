//! State algebra for the 2D compressible Euler equations of a polytropic gas.
//!
//! Conserved variables are `(rho, rho*u, rho*v, E)` with
//! `p = (gamma - 1) * (E - rho * (u^2 + v^2) / 2)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Courant number used by the adaptive time step.
pub const CFL: f64 = 0.6;

/// Coordinate direction of a flux or a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasModel {
    pub gamma: f64,
}

impl GasModel {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(Error::Config(format!("gamma must exceed 1, got {gamma}")));
        }
        Ok(Self { gamma })
    }

    pub fn sound_speed(&self, rho: f64, p: f64) -> f64 {
        (self.gamma * p / rho).sqrt()
    }
}

impl Default for GasModel {
    fn default() -> Self {
        Self { gamma: 1.4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveState {
    pub rho: f64,
    pub u: f64,
    pub v: f64,
    pub p: f64,
}

impl PrimitiveState {
    pub const fn new(rho: f64, u: f64, v: f64, p: f64) -> Self {
        Self { rho, u, v, p }
    }

    pub fn is_physical(&self) -> bool {
        self.rho > 0.0 && self.p > 0.0 && self.u.is_finite() && self.v.is_finite()
    }

    pub fn check_physical(&self) -> Result<()> {
        if self.is_physical() {
            Ok(())
        } else {
            Err(Error::NonPhysicalState {
                rho: self.rho,
                p: self.p,
                cell: None,
                time: None,
            })
        }
    }

    pub fn to_conserved(&self, gas: &GasModel) -> ConservedState {
        primitive_to_conserved(self, gas)
    }

    /// Mirror across the diagonal: exchanges the velocity components.
    pub fn transposed(&self) -> Self {
        Self::new(self.rho, self.v, self.u, self.p)
    }
}

/// `(rho, rho*u, rho*v, E)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ConservedState(pub [f64; 4]);

impl ConservedState {
    pub const fn new(rho: f64, mx: f64, my: f64, energy: f64) -> Self {
        Self([rho, mx, my, energy])
    }

    #[inline]
    pub fn rho(&self) -> f64 {
        self.0[0]
    }

    #[inline]
    pub fn mx(&self) -> f64 {
        self.0[1]
    }

    #[inline]
    pub fn my(&self) -> f64 {
        self.0[2]
    }

    #[inline]
    pub fn energy(&self) -> f64 {
        self.0[3]
    }

    /// Pressure without positivity checks.
    #[inline]
    pub fn pressure_unchecked(&self, gamma: f64) -> f64 {
        let [rho, mx, my, e] = self.0;
        (gamma - 1.0) * (e - 0.5 * (mx * mx + my * my) / rho)
    }

    /// Exchange the two momentum components.
    #[inline]
    pub fn transposed(&self) -> Self {
        let [rho, mx, my, e] = self.0;
        Self([rho, my, mx, e])
    }

    pub fn to_primitive(&self, gas: &GasModel) -> Result<PrimitiveState> {
        conserved_to_primitive(self, gas)
    }
}

pub fn primitive_to_conserved(w: &PrimitiveState, gas: &GasModel) -> ConservedState {
    let kinetic = 0.5 * w.rho * (w.u * w.u + w.v * w.v);
    ConservedState([
        w.rho,
        w.rho * w.u,
        w.rho * w.v,
        w.p / (gas.gamma - 1.0) + kinetic,
    ])
}

pub fn conserved_to_primitive(q: &ConservedState, gas: &GasModel) -> Result<PrimitiveState> {
    let rho = q.rho();
    let p = q.pressure_unchecked(gas.gamma);
    // Negated comparisons so NaN is rejected too.
    if !(rho > 0.0) || !(p > 0.0) {
        return Err(Error::NonPhysicalState {
            rho,
            p,
            cell: None,
            time: None,
        });
    }
    Ok(PrimitiveState::new(rho, q.mx() / rho, q.my() / rho, p))
}

/// `F(U)` for `Axis::X`, `G(U)` for `Axis::Y`.
pub fn physical_flux(q: &ConservedState, gas: &GasModel, axis: Axis) -> Result<[f64; 4]> {
    let w = conserved_to_primitive(q, gas)?;
    Ok(flux_from_parts(q, &w, axis))
}

#[inline]
pub(crate) fn flux_from_parts(q: &ConservedState, w: &PrimitiveState, axis: Axis) -> [f64; 4] {
    let e = q.energy();
    match axis {
        Axis::X => [
            q.mx(),
            q.mx() * w.u + w.p,
            q.mx() * w.v,
            w.u * (e + w.p),
        ],
        Axis::Y => [
            q.my(),
            q.my() * w.u,
            q.my() * w.v + w.p,
            w.v * (e + w.p),
        ],
    }
}

pub type Mat4 = [[f64; 4]; 4];

/// Left and right eigenvectors of the flux Jacobian along one axis.
///
/// `left` holds eigenvectors as rows, `right` as columns, ordered by the
/// eigenvalues `V - c, V, V, V + c` where `V` is the velocity along the axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSystem {
    pub left: Mat4,
    pub right: Mat4,
    pub eigenvalues: [f64; 4],
    pub axis: Axis,
}

impl EigenSystem {
    /// Project a physical 4-vector onto the characteristic fields.
    #[inline]
    pub fn to_characteristic(&self, x: &[f64; 4]) -> [f64; 4] {
        mat_vec(&self.left, x)
    }

    #[inline]
    pub fn to_physical(&self, w: &[f64; 4]) -> [f64; 4] {
        mat_vec(&self.right, w)
    }
}

#[inline]
pub fn mat_vec(m: &Mat4, x: &[f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (o, row) in out.iter_mut().zip(m) {
        *o = row[0] * x[0] + row[1] * x[1] + row[2] * x[2] + row[3] * x[3];
    }
    out
}

pub fn mat_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// Eigen-structure at the arithmetic mean of the two conserved states.
pub fn eigen_system(
    left_state: &ConservedState,
    right_state: &ConservedState,
    gas: &GasModel,
    axis: Axis,
) -> Result<EigenSystem> {
    let mut avg = [0.0; 4];
    for (k, a) in avg.iter_mut().enumerate() {
        *a = 0.5 * (left_state.0[k] + right_state.0[k]);
    }
    let avg = ConservedState(avg);
    match axis {
        Axis::X => {
            let (left, right, eigenvalues) = x_eigen_at(&avg, gas.gamma)?;
            Ok(EigenSystem {
                left,
                right,
                eigenvalues,
                axis,
            })
        }
        Axis::Y => {
            // The y-system is the x-system of the transposed state with the
            // momentum components swapped back.
            let (lx, rx, eigenvalues) = x_eigen_at(&avg.transposed(), gas.gamma)?;
            let mut left = lx;
            let mut right = rx;
            for row in left.iter_mut() {
                row.swap(1, 2);
            }
            right.swap(1, 2);
            Ok(EigenSystem {
                left,
                right,
                eigenvalues,
                axis,
            })
        }
    }
}

/// Left/right eigenvectors and eigenvalues of `dF/dU` at `q`.
#[inline]
pub(crate) fn x_eigen_at(q: &ConservedState, gamma: f64) -> Result<(Mat4, Mat4, [f64; 4])> {
    let rho = q.rho();
    let p = q.pressure_unchecked(gamma);
    if !(rho > 0.0) || !(p > 0.0) {
        return Err(Error::NonPhysicalState {
            rho,
            p,
            cell: None,
            time: None,
        });
    }
    let u = q.mx() / rho;
    let v = q.my() / rho;
    let c2 = gamma * p / rho;
    let c = c2.sqrt();
    let q2 = u * u + v * v;
    let h = (q.energy() + p) / rho;
    let b1 = (gamma - 1.0) / c2;
    let b2 = 0.5 * b1 * q2;
    let inv_c = 1.0 / c;

    let right = [
        [1.0, 1.0, 0.0, 1.0],
        [u - c, u, 0.0, u + c],
        [v, v, 1.0, v],
        [h - u * c, 0.5 * q2, v, h + u * c],
    ];
    let left = [
        [
            0.5 * (b2 + u * inv_c),
            -0.5 * (b1 * u + inv_c),
            -0.5 * b1 * v,
            0.5 * b1,
        ],
        [1.0 - b2, b1 * u, b1 * v, -b1],
        [-v, 0.0, 1.0, 0.0],
        [
            0.5 * (b2 - u * inv_c),
            -0.5 * (b1 * u - inv_c),
            -0.5 * b1 * v,
            0.5 * b1,
        ],
    ];
    Ok((left, right, [u - c, u, u, u + c]))
}

/// `max |V +- c|` over all states, with `V = sqrt(u^2 + v^2)`.
pub fn max_wave_speed<'a, I>(states: I, gas: &GasModel) -> Result<f64>
where
    I: IntoIterator<Item = &'a ConservedState>,
{
    let mut a: f64 = 0.0;
    for q in states {
        let w = conserved_to_primitive(q, gas)?;
        let speed = (w.u * w.u + w.v * w.v).sqrt();
        let c = gas.sound_speed(w.rho, w.p);
        a = a.max((speed + c).abs()).max((speed - c).abs());
    }
    Ok(a)
}

/// `cfl * min(dx, dy) / a`.
pub fn adaptive_dt_with_cfl(a: f64, dx: f64, dy: f64, cfl: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::DegenerateSpeed);
    }
    Ok(cfl * (dx / a).min(dy / a))
}

pub fn adaptive_dt(a: f64, dx: f64, dy: f64) -> Result<f64> {
    adaptive_dt_with_cfl(a, dx, dy, CFL)
}

#[cfg(test)]
mod tests {
    use super::*;

    const GAS: GasModel = GasModel { gamma: 1.4 };

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn primitive_to_conserved_examples() {
        let q = primitive_to_conserved(&PrimitiveState::new(1.0, 0.0, 0.0, 1.0), &GAS);
        for (a, b) in q.0.iter().zip([1.0, 0.0, 0.0, 2.5]) {
            assert_close(*a, b, 1e-15);
        }
        let q = primitive_to_conserved(&PrimitiveState::new(1.5, 0.0, 0.0, 1.5), &GAS);
        for (a, b) in q.0.iter().zip([1.5, 0.0, 0.0, 3.75]) {
            assert_close(*a, b, 1e-15);
        }

        let w = PrimitiveState::new(0.138, 1.206, 1.206, 0.029);
        let q = primitive_to_conserved(&w, &GAS);
        // 0.029 / 0.4 + 0.5 * 0.138 * 2 * 1.206^2
        assert_close(q.energy(), 0.273212168, 1e-15);
        assert_close(q.energy(), 0.27321217, 1e-8);
        assert_close(q.mx(), 0.166428, 1e-15);
        let back = conserved_to_primitive(&q, &GAS).unwrap();
        assert_close(back.p, w.p, 1e-14);
        assert_close(back.u, w.u, 1e-14);
    }

    #[test]
    fn conserved_to_primitive_examples() {
        let w = conserved_to_primitive(&ConservedState::new(1.0, 0.0, 0.0, 2.5), &GAS).unwrap();
        assert_eq!((w.rho, w.u, w.v), (1.0, 0.0, 0.0));
        assert_close(w.p, 1.0, 1e-15);
        let w = conserved_to_primitive(&ConservedState::new(1.0, 1.0, 0.0, 3.0), &GAS).unwrap();
        assert_close(w.p, 1.0, 1e-15);
        let err = conserved_to_primitive(&ConservedState::new(1.0, 0.0, 0.0, -1.0), &GAS);
        assert!(matches!(err, Err(Error::NonPhysicalState { .. })));
        let err = conserved_to_primitive(&ConservedState::new(0.0, 0.0, 0.0, 1.0), &GAS);
        assert!(err.is_err());
    }

    #[test]
    fn flux_examples() {
        let f = physical_flux(&ConservedState::new(1.0, 0.0, 0.0, 2.5), &GAS, Axis::X).unwrap();
        for (a, b) in f.iter().zip([0.0, 1.0, 0.0, 0.0]) {
            assert_close(*a, b, 1e-15);
        }
        let f = physical_flux(&ConservedState::new(1.0, 1.0, 0.0, 3.0), &GAS, Axis::X).unwrap();
        for (a, b) in f.iter().zip([1.0, 2.0, 0.0, 4.0]) {
            assert_close(*a, b, 1e-15);
        }
        let q = ConservedState::new(1.3, 0.4, -0.7, 4.0);
        let g = physical_flux(&q, &GAS, Axis::Y).unwrap();
        let ft = physical_flux(&q.transposed(), &GAS, Axis::X).unwrap();
        assert_eq!(g, [ft[0], ft[2], ft[1], ft[3]]);
    }

    #[test]
    fn eigen_identity_and_round_trip() {
        let q = ConservedState::new(1.0, 0.0, 0.0, 2.5);
        for axis in [Axis::X, Axis::Y] {
            let es = eigen_system(&q, &q, &GAS, axis).unwrap();
            let prod = mat_mul(&es.left, &es.right);
            for i in 0..4 {
                for j in 0..4 {
                    assert_close(prod[i][j], if i == j { 1.0 } else { 0.0 }, 1e-12);
                }
            }
            let f = physical_flux(&q, &GAS, axis).unwrap();
            let back = es.to_physical(&es.to_characteristic(&f));
            for k in 0..4 {
                assert_close(back[k], f[k], 1e-13);
            }
        }
    }

    #[test]
    fn wave_speed_examples() {
        let a = max_wave_speed(&[ConservedState::new(1.0, 0.0, 0.0, 2.5)], &GAS).unwrap();
        assert_close(a, 1.4f64.sqrt(), 1e-15);
        assert_close(a, 1.18322, 1e-5);

        let moving = primitive_to_conserved(&PrimitiveState::new(1.0, 1.0, 0.0, 1.0), &GAS);
        let a = max_wave_speed(&[moving], &GAS).unwrap();
        assert_close(a, 1.0 + 1.4f64.sqrt(), 1e-14);

        let reversed = primitive_to_conserved(&PrimitiveState::new(1.0, -1.0, 0.0, 1.0), &GAS);
        assert_eq!(max_wave_speed(&[reversed], &GAS).unwrap(), a);
    }

    #[test]
    fn adaptive_dt_examples() {
        let dt = adaptive_dt(1.18322, 0.01, 0.01).unwrap();
        assert_close(dt, 0.0050710, 1e-7);
        let a = 2.7;
        assert_close(adaptive_dt(a, 0.02, 0.02).unwrap() * a / 0.02, 0.6, 1e-15);
        assert_eq!(adaptive_dt(2.0, 0.01, 0.02).unwrap(), 0.6 * 0.01 / 2.0);
        assert!(matches!(adaptive_dt(0.0, 0.01, 0.01), Err(Error::DegenerateSpeed)));
    }

    #[test]
    fn gamma_is_validated() {
        assert!(GasModel::new(1.0).is_err());
        assert!(GasModel::new(f64::NAN).is_err());
        assert!(GasModel::new(1.67).is_ok());
    }
}
