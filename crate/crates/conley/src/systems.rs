//! Evaluatable cocycles over the noise models: built-in systems in closed
//! form plus a fixed-step integrator fallback.

use crate::error::{ConleyError, Result};
use crate::geometry::PhaseSpace;
use crate::noise::{NoiseModel, NoisePath};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Closed-form evaluators for the built-in systems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formula {
    /// Gradient-like cubic flow on `[-1, 1]` with stable 0, unstable ±1.
    CubicInterval,
    /// Half-angle-squared circle flow with a single semi-stable equilibrium.
    Cos2Circle,
    /// Noise-driven cubic cocycle on `[-1, 1]` with stable ±1, unstable 0.
    CubicStochastic,
    /// Translation conjugate of the minus-cosine circle flow over a rotating base.
    RotationConjugate,
    /// Identity dynamics; a stub used to exercise graph plumbing.
    Identity,
}

/// 1-D vector fields available to the fixed-step integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VectorField {
    /// x³ − x
    Cubic,
    /// cos²(x/2)
    Cos2,
    /// 1 − cos(x − ω − τ): the rotation-conjugated minus-cosine field.
    RotationConjugate,
    /// 0
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Evaluator {
    ClosedForm { formula: Formula },
    Integrated { field: VectorField, step: f64 },
}

/// An evaluatable cocycle φ(t, ω, x) together with its phase space and noise
/// model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CocycleSystem {
    name: String,
    space: PhaseSpace,
    noise: NoiseModel,
    evaluator: Evaluator,
}

impl CocycleSystem {
    /// Deterministic cubic flow ẋ = x³ − x on [−1, 1].
    pub fn cubic_det() -> Self {
        CocycleSystem {
            name: "CUBIC_DET".into(),
            space: PhaseSpace::Interval { lo: -1.0, hi: 1.0 },
            noise: NoiseModel::Trivial,
            evaluator: Evaluator::ClosedForm {
                formula: Formula::CubicInterval,
            },
        }
    }

    /// Deterministic circle flow θ̇ = cos²(θ/2) on S¹ (circumference 2π).
    pub fn cos2_circle() -> Self {
        CocycleSystem {
            name: "COS2_CIRCLE".into(),
            space: PhaseSpace::Circle { circumference: TAU },
            noise: NoiseModel::Trivial,
            evaluator: Evaluator::ClosedForm {
                formula: Formula::Cos2Circle,
            },
        }
    }

    /// Stochastic cubic cocycle on [−1, 1] driven by a two-sided Wiener path.
    pub fn cubic_sde(dt: f64, horizon: f64) -> Self {
        CocycleSystem {
            name: "CUBIC_SDE".into(),
            space: PhaseSpace::Interval { lo: -1.0, hi: 1.0 },
            noise: NoiseModel::Wiener { dt, horizon },
            evaluator: Evaluator::ClosedForm {
                formula: Formula::CubicStochastic,
            },
        }
    }

    /// Rotation-conjugated minus-cosine flow on S¹ over a rotating base point.
    pub fn rot_conj() -> Self {
        CocycleSystem {
            name: "ROT_CONJ".into(),
            space: PhaseSpace::Circle { circumference: TAU },
            noise: NoiseModel::RotationCircle { circumference: TAU },
            evaluator: Evaluator::ClosedForm {
                formula: Formula::RotationConjugate,
            },
        }
    }

    /// Same system as [`CocycleSystem::rot_conj`] but evaluated by the
    /// fixed-step integrator on the conjugated vector field.
    pub fn rot_conj_integrated(step: f64) -> Self {
        CocycleSystem {
            name: "ROT_CONJ_INTEGRATED".into(),
            space: PhaseSpace::Circle { circumference: TAU },
            noise: NoiseModel::RotationCircle { circumference: TAU },
            evaluator: Evaluator::Integrated {
                field: VectorField::RotationConjugate,
                step,
            },
        }
    }

    /// Identity dynamics stub on an arbitrary space.
    pub fn identity(space: PhaseSpace) -> Self {
        CocycleSystem {
            name: "IDENTITY".into(),
            space,
            noise: NoiseModel::Trivial,
            evaluator: Evaluator::ClosedForm {
                formula: Formula::Identity,
            },
        }
    }

    /// Look up a built-in by its configuration name.
    pub fn from_name(name: &str, wiener_dt: f64, wiener_horizon: f64) -> Result<Self> {
        match name {
            "CUBIC_DET" => Ok(Self::cubic_det()),
            "COS2_CIRCLE" => Ok(Self::cos2_circle()),
            "CUBIC_SDE" => Ok(Self::cubic_sde(wiener_dt, wiener_horizon)),
            "ROT_CONJ" => Ok(Self::rot_conj()),
            "IDENTITY" => Ok(Self::identity(PhaseSpace::Interval { lo: -1.0, hi: 1.0 })),
            other => Err(ConleyError::Config(format!(
                "system: unknown name {other:?} (expected CUBIC_DET, COS2_CIRCLE, CUBIC_SDE or ROT_CONJ)"
            ))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn space(&self) -> &PhaseSpace {
        &self.space
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    /// Evaluate φ(t, ω, x).
    pub fn eval(&self, t: f64, omega: &NoisePath, x: f64) -> Result<f64> {
        if !self.space.contains(x) {
            return Err(ConleyError::Domain(format!(
                "point {x} outside phase space {:?}",
                self.space
            )));
        }
        let raw = match self.evaluator {
            Evaluator::ClosedForm { formula } => match formula {
                Formula::Identity => x,
                Formula::CubicInterval => cubic_formula(x, -t),
                Formula::CubicStochastic => cubic_formula(x, t + omega.value(t)?),
                Formula::Cos2Circle => cos2_flow(t, x),
                Formula::RotationConjugate => {
                    let w = omega.value(0.0)?;
                    let y = (x - w).rem_euclid(TAU);
                    let z = mcos_flow(t, y);
                    (z + w + t).rem_euclid(TAU)
                }
            },
            Evaluator::Integrated { field, step } => {
                let w = match field {
                    VectorField::RotationConjugate => omega.value(0.0)?,
                    _ => 0.0,
                };
                rk4_flow(field, w, t, x, step)
            }
        };
        self.into_space(raw)
    }

    /// Evaluate the inverse map φ(t, ω)⁻¹ = φ(−t, θ_t ω).
    pub fn inverse_eval(&self, t: f64, omega: &NoisePath, y: f64) -> Result<f64> {
        self.eval(-t, &omega.shift(t), y)
    }

    /// Maximum cocycle-law residual over the given points:
    /// `max_x d(φ(t+s, ω)x, φ(t, θ_s ω)(φ(s, ω)x))`.
    pub fn check_cocycle(&self, omega: &NoisePath, t: f64, s: f64, xs: &[f64]) -> Result<f64> {
        let shifted = omega.shift(s);
        let mut worst: f64 = 0.0;
        for &x in xs {
            let direct = self.eval(t + s, omega, x)?;
            let composed = self.eval(t, &shifted, self.eval(s, omega, x)?)?;
            worst = worst.max(self.space.distance(direct, composed));
        }
        Ok(worst)
    }

    fn into_space(&self, value: f64) -> Result<f64> {
        if !value.is_finite() {
            return Err(ConleyError::NumericOverflow(format!(
                "cocycle evaluation produced {value}"
            )));
        }
        match self.space {
            PhaseSpace::Circle { .. } => Ok(self.space.canonical(value)),
            PhaseSpace::Interval { lo, hi } => {
                // float noise at fixed endpoints is clamped; anything larger
                // indicates an out-of-domain input
                let slack = 1e-12 * (hi - lo).max(1.0);
                if value < lo - slack || value > hi + slack {
                    return Err(ConleyError::NumericOverflow(format!(
                        "cocycle evaluation left the phase space: {value}"
                    )));
                }
                Ok(value.clamp(lo, hi))
            }
        }
    }
}

/// The cubic-family closed form `x e^a / (1 - x² + x² e^{2a})^{1/2}`,
/// computed without overflow for any `a`.
fn cubic_formula(x: f64, a: f64) -> f64 {
    if x == 0.0 || x == 1.0 || x == -1.0 {
        return x;
    }
    if a >= 0.0 {
        // divide through by e^a so the exponential only ever decays
        x / (x * x + (1.0 - x * x) * (-2.0 * a).exp()).sqrt()
    } else {
        x * a.exp() / (1.0 - x * x + x * x * (2.0 * a).exp()).sqrt()
    }
}

/// Flow of θ̇ = cos²(θ/2) via the half-angle chart tan(θ/2) ↦ tan(θ/2) + t/2.
fn cos2_flow(t: f64, theta: f64) -> f64 {
    let th = theta.rem_euclid(TAU);
    if th == PI {
        return PI;
    }
    // chart coordinate in (−π, π), excluding the pole at π
    let psi = if th < PI { th } else { th - TAU };
    let u = (psi / 2.0).tan();
    let u1 = u + t / 2.0;
    (2.0 * u1.atan()).rem_euclid(TAU)
}

/// Flow of ẋ = −cos x via the inverse Gudermannian per branch. Trajectories
/// never cross the equilibria ±π/2, so each branch chart is global in time.
fn mcos_flow(t: f64, y: f64) -> f64 {
    let yc = y.rem_euclid(TAU);
    let half = PI / 2.0;
    if yc == half || yc == 3.0 * half {
        return yc;
    }
    if yc > half && yc < 3.0 * half {
        // branch through the stable equilibrium direction: u = y − π
        let u = yc - PI;
        let g = gd_inv(u) + t;
        (gd(g) + PI).rem_euclid(TAU)
    } else {
        let psi = if yc < half { yc } else { yc - TAU };
        let g = gd_inv(psi) - t;
        gd(g).rem_euclid(TAU)
    }
}

fn gd(v: f64) -> f64 {
    v.tanh().asin()
}

fn gd_inv(psi: f64) -> f64 {
    psi.sin().atanh()
}

/// Classical fixed-step 4th-order integration of one of the built-in vector
/// fields; `t` may be negative.
fn rk4_flow(field: VectorField, omega0: f64, t: f64, x0: f64, step: f64) -> f64 {
    let f = |tau: f64, x: f64| -> f64 {
        match field {
            VectorField::Cubic => x * x * x - x,
            VectorField::Cos2 => {
                let c = (x / 2.0).cos();
                c * c
            }
            VectorField::RotationConjugate => 1.0 - (x - omega0 - tau).cos(),
            VectorField::Zero => 0.0,
        }
    };
    if t == 0.0 {
        return x0;
    }
    let n = (t.abs() / step).ceil().max(1.0) as usize;
    let h = t / n as f64;
    let mut x = x0;
    let mut tau = 0.0;
    for _ in 0..n {
        let k1 = f(tau, x);
        let k2 = f(tau + h / 2.0, x + h / 2.0 * k1);
        let k3 = f(tau + h / 2.0, x + h / 2.0 * k2);
        let k4 = f(tau + h, x + h * k3);
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        tau += h;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn wiener_path(seed: u64) -> NoisePath {
        NoiseModel::Wiener {
            dt: 0.01,
            horizon: 50.0,
        }
        .sample_path(seed)
        .unwrap()
    }

    fn trivial() -> NoisePath {
        NoiseModel::Trivial.sample_path(0).unwrap()
    }

    /// Independent oracle: RK4 on ẋ = x³ − x at a much finer step than the
    /// tolerance asks for.
    fn cubic_rk4_oracle(t: f64, x0: f64) -> f64 {
        rk4_flow(VectorField::Cubic, 0.0, t, x0, 1e-4)
    }

    /// Independent oracle for the stochastic cubic cocycle: fixed-step
    /// pathwise integration of ẋ = (x − x³)(1 + Ẇ) along the polygonal
    /// noise path.
    fn cubic_sde_path_oracle(t: f64, omega: &NoisePath, x0: f64, h: f64) -> f64 {
        let n = (t.abs() / h).ceil() as usize;
        let hh = t / n as f64;
        let mut x = x0;
        let mut tau = 0.0;
        for _ in 0..n {
            let dw = omega.value(tau + hh).unwrap() - omega.value(tau).unwrap();
            let drive = hh + dw;
            // Heun predictor-corrector in the driving increment
            let f = |x: f64| x - x * x * x;
            let pred = x + f(x) * drive;
            x += 0.5 * (f(x) + f(pred)) * drive;
            tau += hh;
        }
        x
    }

    #[test]
    fn cubic_det_matches_rk4_oracle() {
        let sys = CocycleSystem::cubic_det();
        let om = trivial();
        // frozen value computed with the oracle: x0 = 0.5, t = 1
        let got = sys.eval(1.0, &om, 0.5).unwrap();
        assert!((got - 0.2077617590).abs() < 1e-9, "got {got}");
        for &(t, x0) in &[(1.0, 0.5), (2.0, -0.8), (0.7, 0.99), (3.0, -0.2)] {
            let oracle = cubic_rk4_oracle(t, x0);
            let formula = sys.eval(t, &om, x0).unwrap();
            assert!(
                (oracle - formula).abs() < 1e-8,
                "t={t} x0={x0}: oracle {oracle} vs formula {formula}"
            );
        }
    }

    #[test]
    fn cubic_fixed_points_are_exact() {
        let sys = CocycleSystem::cubic_det();
        let om = trivial();
        for &x in &[-1.0, 0.0, 1.0] {
            for &t in &[0.5, 1.0, 10.0, -3.0] {
                assert_eq!(sys.eval(t, &om, x).unwrap(), x);
            }
        }
        let sde = CocycleSystem::cubic_sde(0.01, 50.0);
        let om = wiener_path(3);
        for &x in &[-1.0, 0.0, 1.0] {
            for &t in &[0.5, 1.0, 10.0, -3.0] {
                assert_eq!(sde.eval(t, &om, x).unwrap(), x);
            }
        }
    }

    #[test]
    fn cubic_sde_zero_noise_value_matches_formula() {
        // a path with all increments zero has W_t = 0 for all t
        let om = NoisePath::wiener_from_increments(0.01, vec![0.0; 1000]).unwrap();
        let sys = CocycleSystem::cubic_sde(0.01, 5.0);
        let got = sys.eval(1.0, &om, 0.5).unwrap();
        // frozen: 0.5·e / (0.75 + 0.25·e²)^{1/2}
        assert!((got - 0.8433519994).abs() < 1e-9, "got {got}");
        // cross-check with the pathwise integration oracle
        let oracle = cubic_sde_path_oracle(1.0, &om, 0.5, 1e-5);
        assert!((got - oracle).abs() < 2e-3, "oracle {oracle} vs {got}");
    }

    #[test]
    fn cubic_sde_matches_pathwise_oracle_on_random_paths() {
        let sys = CocycleSystem::cubic_sde(0.01, 50.0);
        for seed in [1u64, 7, 23] {
            let om = wiener_path(seed);
            for &(t, x0) in &[(1.0, 0.5), (2.5, -0.7), (0.8, 0.1)] {
                let formula = sys.eval(t, &om, x0).unwrap();
                let oracle = cubic_sde_path_oracle(t, &om, x0, 1e-5);
                assert!(
                    (formula - oracle).abs() < 2e-3,
                    "seed {seed} t={t} x0={x0}: {formula} vs {oracle}"
                );
            }
        }
    }

    #[test]
    fn inverse_eval_round_trips() {
        let det = CocycleSystem::cubic_det();
        let om = trivial();
        let y = det.eval(2.0, &om, 0.3).unwrap();
        let back = det.inverse_eval(2.0, &om, y).unwrap();
        assert!((back - 0.3).abs() < 1e-9);

        let sde = CocycleSystem::cubic_sde(0.01, 50.0);
        for seed in [5u64, 11, 99] {
            let om = wiener_path(seed);
            let y = sde.eval(1.5, &om, -0.7).unwrap();
            let back = sde.inverse_eval(1.5, &om, y).unwrap();
            assert!((back + 0.7).abs() < 1e-9, "seed {seed}: {back}");
        }

        // identity at t = 0
        assert_eq!(det.inverse_eval(0.0, &om, 0.42).unwrap(), 0.42);
    }

    #[test]
    fn cos2_circle_pole_is_fixed_and_others_advance() {
        let sys = CocycleSystem::cos2_circle();
        let om = trivial();
        let at_pi = sys.eval(5.0, &om, PI).unwrap();
        assert!((at_pi - PI).abs() < 1e-12);
        // every other point advances strictly forward (mod 2π)
        for i in 1..40 {
            let th = i as f64 * TAU / 40.0;
            if (th - PI).abs() < 1e-9 {
                continue;
            }
            let img = sys.eval(0.5, &om, th).unwrap();
            let forward = (img - th).rem_euclid(TAU);
            assert!(
                forward > 0.0 && forward < PI,
                "theta {th} moved by {forward}"
            );
        }
    }

    #[test]
    fn cos2_closed_form_matches_rk4_oracle() {
        let sys = CocycleSystem::cos2_circle();
        let om = trivial();
        for &(t, th) in &[(1.0, 0.3), (2.0, 4.0), (0.5, 3.0), (4.0, 5.9)] {
            let formula = sys.eval(t, &om, th).unwrap();
            let oracle = rk4_flow(VectorField::Cos2, 0.0, t, th, 1e-4).rem_euclid(TAU);
            assert!(
                PhaseSpace::circle(TAU).unwrap().distance(formula, oracle) < 1e-8,
                "t={t} th={th}: {formula} vs {oracle}"
            );
        }
    }

    #[test]
    fn rot_conj_closed_form_matches_integrated() {
        let closed = CocycleSystem::rot_conj();
        let integrated = CocycleSystem::rot_conj_integrated(1e-3);
        let model = NoiseModel::RotationCircle { circumference: TAU };
        for seed in [1u64, 2, 3] {
            let om = model.sample_path(seed).unwrap();
            for &(t, x) in &[(1.0, 0.2), (3.0, 2.0), (2.0, 5.5), (-1.5, 1.0)] {
                let a = closed.eval(t, &om, x).unwrap();
                let b = integrated.eval(t, &om, x).unwrap();
                assert!(
                    PhaseSpace::circle(TAU).unwrap().distance(a, b) < 1e-4,
                    "seed {seed} t={t} x={x}: closed {a} vs integrated {b}"
                );
            }
        }
    }

    #[test]
    fn rot_conj_equilibria_track_the_base_point() {
        // ψ(ω)(±π/2) are random equilibria: φ(t, ω) maps them to ψ(θ_t ω)(±π/2)
        let sys = CocycleSystem::rot_conj();
        let om = NoiseModel::RotationCircle { circumference: TAU }
            .sample_path(17)
            .unwrap();
        let w = om.value(0.0).unwrap();
        for &e in &[PI / 2.0, 3.0 * PI / 2.0] {
            let x = (e + w).rem_euclid(TAU);
            let img = sys.eval(2.5, &om, x).unwrap();
            let expect = (e + w + 2.5).rem_euclid(TAU);
            assert!(
                PhaseSpace::circle(TAU).unwrap().distance(img, expect) < 1e-9,
                "equilibrium {e}: {img} vs {expect}"
            );
        }
    }

    #[test]
    fn cocycle_identity_at_zero_time() {
        let om = trivial();
        for sys in [CocycleSystem::cubic_det(), CocycleSystem::cos2_circle()] {
            for &x in &[-0.9, -0.3, 0.0, 0.44] {
                let xx = if sys.space().is_circle() { x.rem_euclid(TAU) } else { x };
                assert_eq!(sys.eval(0.0, &om, xx).unwrap(), xx);
            }
        }
    }

    #[test]
    fn check_cocycle_zero_time_residual_is_zero() {
        let sys = CocycleSystem::cubic_sde(0.01, 50.0);
        let om = wiener_path(1);
        let r = sys.check_cocycle(&om, 0.0, 0.0, &[0.1, -0.5, 0.9]).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn monotone_in_x_on_interval_systems() {
        let det = CocycleSystem::cubic_det();
        let sde = CocycleSystem::cubic_sde(0.01, 50.0);
        let om = wiener_path(9);
        let tr = trivial();
        let xs: Vec<f64> = (0..50).map(|i| -1.0 + i as f64 * (2.0 / 49.0)).collect();
        for w in xs.windows(2) {
            assert!(det.eval(1.7, &tr, w[0]).unwrap() < det.eval(1.7, &tr, w[1]).unwrap());
            assert!(sde.eval(2.3, &om, w[0]).unwrap() < sde.eval(2.3, &om, w[1]).unwrap());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn prop_closed_form_cocycle_law(
            seed in 0u64..50,
            t in -5.0f64..5.0,
            s in -5.0f64..5.0,
            x in -0.999f64..0.999,
        ) {
            let sys = CocycleSystem::cubic_sde(0.01, 50.0);
            let om = wiener_path(seed);
            let r = sys.check_cocycle(&om, t, s, &[x]).unwrap();
            prop_assert!(r <= 1e-9, "residual {r}");
        }

        #[test]
        fn prop_cos2_cocycle_law(t in -6.0f64..6.0, s in -6.0f64..6.0, x in 0.0f64..TAU) {
            let sys = CocycleSystem::cos2_circle();
            let om = trivial();
            let r = sys.check_cocycle(&om, t, s, &[x]).unwrap();
            prop_assert!(r <= 1e-9, "residual {r}");
        }

        #[test]
        fn prop_rot_conj_cocycle_law(seed in 0u64..50, t in -6.0f64..6.0, s in -6.0f64..6.0, x in 0.0f64..TAU) {
            let sys = CocycleSystem::rot_conj();
            let om = NoiseModel::RotationCircle { circumference: TAU }.sample_path(seed).unwrap();
            let r = sys.check_cocycle(&om, t, s, &[x]).unwrap();
            prop_assert!(r <= 1e-9, "residual {r}");
        }

        #[test]
        fn prop_inverse_round_trip_tolerance(seed in 0u64..50, t in 0.1f64..4.0, x in -0.99f64..0.99) {
            let sys = CocycleSystem::cubic_sde(0.01, 50.0);
            let om = wiener_path(seed);
            let y = sys.eval(t, &om, x).unwrap();
            let back = sys.inverse_eval(t, &om, y).unwrap();
            prop_assert!((back - x).abs() < 1e-9);
        }
    }

    #[test]
    fn rot_conj_integrated_cocycle_residual_within_integrator_bound() {
        let sys = CocycleSystem::rot_conj_integrated(1e-3);
        let model = NoiseModel::RotationCircle { circumference: TAU };
        let mut worst: f64 = 0.0;
        for seed in 0..20u64 {
            let om = model.sample_path(seed).unwrap();
            let t = 0.5 + (seed as f64) * 0.1;
            let s = 1.3 - (seed as f64) * 0.07;
            let xs = [0.1, 2.3, 4.4];
            worst = worst.max(sys.check_cocycle(&om, t, s, &xs).unwrap());
        }
        assert!(worst <= 1e-5, "integrated residual {worst}");
    }
}
