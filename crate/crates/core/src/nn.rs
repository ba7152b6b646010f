//! Three-layer sigmoid network that approximates the friction term at the
//! desired velocity, its weight update laws and the norm projection that keeps
//! the estimates inside their Frobenius balls.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::math::Vec3;

#[derive(Debug, Clone, PartialEq)]
pub struct NNConfig {
    pub n0: usize,
    pub n1: usize,
    pub n2: usize,
    /// Bound on ‖V̂₀‖_F².
    pub vbar0: f64,
    /// Bound on ‖V̂₁‖_F².
    pub vbar1: f64,
    /// Diagonal of Γ₀, length `n0 + 1`.
    pub gamma0: Vec<f64>,
    /// Diagonal of Γ₁, length `n1 + 1`.
    pub gamma1: Vec<f64>,
    /// Half-width of the uniform initialization interval.
    pub init_scale: f64,
}

impl Default for NNConfig {
    fn default() -> Self {
        Self {
            n0: 3,
            n1: 4,
            n2: 3,
            vbar0: 100.0,
            vbar1: 100.0,
            gamma0: vec![100.0; 4],
            gamma1: vec![100.0; 5],
            init_scale: 0.1,
        }
    }
}

impl NNConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.n0 != 3 || self.n2 != 3 {
            return Err(format!("input and output widths must be 3, got n0 = {}, n2 = {}", self.n0, self.n2));
        }
        if self.n1 == 0 {
            return Err("hidden width n1 must be at least 1".into());
        }
        if self.gamma0.len() != self.n0 + 1 {
            return Err(format!("gamma0 needs {} entries, got {}", self.n0 + 1, self.gamma0.len()));
        }
        if self.gamma1.len() != self.n1 + 1 {
            return Err(format!("gamma1 needs {} entries, got {}", self.n1 + 1, self.gamma1.len()));
        }
        if self.gamma0.iter().chain(&self.gamma1).any(|g| !(*g > 0.0 && g.is_finite())) {
            return Err("adaptation gains must be strictly positive".into());
        }
        if !(self.vbar0 > 0.0 && self.vbar1 > 0.0) {
            return Err("weight bounds vbar0, vbar1 must be strictly positive".into());
        }
        if !(self.init_scale >= 0.0 && self.init_scale.is_finite()) {
            return Err(format!("init_scale must be non-negative, got {}", self.init_scale));
        }
        let n_v0 = ((self.n0 + 1) * self.n1) as f64;
        let n_v1 = ((self.n1 + 1) * self.n2) as f64;
        let s2 = self.init_scale * self.init_scale;
        if s2 * n_v0 > self.vbar0 || s2 * n_v1 > self.vbar1 {
            return Err("init_scale too large for the weight bounds".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NNWeights {
    /// (n0+1) × n1
    pub v0_hat: DMatrix<f64>,
    /// (n1+1) × n2
    pub v1_hat: DMatrix<f64>,
}

impl NNWeights {
    pub fn zeros(cfg: &NNConfig) -> Self {
        Self { v0_hat: DMatrix::zeros(cfg.n0 + 1, cfg.n1), v1_hat: DMatrix::zeros(cfg.n1 + 1, cfg.n2) }
    }

    /// Uniform(−s, s) entries from a seeded ChaCha stream, V̂₀ first.
    pub fn random(cfg: &NNConfig, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = cfg.init_scale;
        let mut draw = |r, c| DMatrix::from_fn(r, c, |_, _| if s > 0.0 { rng.gen_range(-s..s) } else { 0.0 });
        let v0_hat = draw(cfg.n0 + 1, cfg.n1);
        let v1_hat = draw(cfg.n1 + 1, cfg.n2);
        Self { v0_hat, v1_hat }
    }

    pub fn len(&self) -> usize {
        self.v0_hat.len() + self.v1_hat.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Column-major V̂₀ followed by column-major V̂₁.
    pub fn write_flat(&self, out: &mut [f64]) {
        let n = self.v0_hat.len();
        out[..n].copy_from_slice(self.v0_hat.as_slice());
        out[n..n + self.v1_hat.len()].copy_from_slice(self.v1_hat.as_slice());
    }

    pub fn from_flat(cfg: &NNConfig, flat: &[f64]) -> Self {
        let n = (cfg.n0 + 1) * cfg.n1;
        let m = (cfg.n1 + 1) * cfg.n2;
        Self {
            v0_hat: DMatrix::from_column_slice(cfg.n0 + 1, cfg.n1, &flat[..n]),
            v1_hat: DMatrix::from_column_slice(cfg.n1 + 1, cfg.n2, &flat[n..n + m]),
        }
    }
}

/// Augmented network input `[ṗ_d; 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NNInput(DVector<f64>);

impl NNInput {
    pub fn from_velocity(pd_dot: &Vec3) -> Self {
        Self(DVector::from_vec(vec![pd_dot.x, pd_dot.y, pd_dot.z, 1.0]))
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }
}

fn sigmoid(a: f64) -> f64 {
    1.0 / (1.0 + (-a).exp())
}

/// Hidden activations `[σ(z₁), …, σ(z_n1), 1]`.
pub fn phi(z: &DVector<f64>) -> DVector<f64> {
    let n = z.len();
    DVector::from_fn(n + 1, |i, _| if i < n { sigmoid(z[i]) } else { 1.0 })
}

/// Jacobian of [`phi`]: `(n1+1) × n1`, diagonal `σ(1−σ)` on top, zero last row.
pub fn phi_prime(z: &DVector<f64>) -> DMatrix<f64> {
    let n = z.len();
    let mut j = DMatrix::zeros(n + 1, n);
    for i in 0..n {
        let s = sigmoid(z[i]);
        j[(i, i)] = s * (1.0 - s);
    }
    j
}

/// `f̂_d = V̂₁ᵀ φ(V̂₀ᵀ x_d)`.
pub fn forward(w: &NNWeights, x: &NNInput) -> Vec3 {
    let hidden = phi(&(w.v0_hat.tr_mul(&x.0)));
    let out = w.v1_hat.tr_mul(&hidden);
    Vec3::new(out[0], out[1], out[2])
}

/// Un-projected update directions `(V̂̇₀, V̂̇₁)`.
pub fn raw_updates(w: &NNWeights, x: &NNInput, y2: &Vec3, cfg: &NNConfig) -> (DMatrix<f64>, DMatrix<f64>) {
    let y2 = DVector::from_column_slice(y2.as_slice());
    let z = w.v0_hat.tr_mul(&x.0);
    let phi_hat = phi(&z);
    let back = phi_prime(&z).tr_mul(&(&w.v1_hat * &y2));

    let mut d1 = &phi_hat * y2.transpose();
    for (i, g) in cfg.gamma1.iter().enumerate() {
        d1.row_mut(i).scale_mut(*g);
    }
    let mut d0 = &x.0 * back.transpose();
    for (i, g) in cfg.gamma0.iter().enumerate() {
        d0.row_mut(i).scale_mut(*g);
    }
    (d0, d1)
}

/// Projected weight derivatives `(V̂̇₀, V̂̇₁)`.
pub fn update_deriv(w: &NNWeights, x: &NNInput, y2: &Vec3, cfg: &NNConfig) -> (DMatrix<f64>, DMatrix<f64>) {
    let (d0, d1) = raw_updates(w, x, y2, cfg);
    (proj(d0, &w.v0_hat, cfg.vbar0), proj(d1, &w.v1_hat, cfg.vbar1))
}

/// Removes the outward radial component of `raw` once `w` sits on (or
/// beyond) the Frobenius ball `‖w‖_F² = vbar`.
pub fn proj(raw: DMatrix<f64>, w: &DMatrix<f64>, vbar: f64) -> DMatrix<f64> {
    let sq = w.norm_squared();
    if sq < vbar {
        return raw;
    }
    let outward = w.dot(&raw);
    if outward <= 0.0 {
        return raw;
    }
    raw - w * (outward / sq)
}

/// Pulls `w` back onto the ball if a finite integration step left it outside.
pub fn retract(w: &mut DMatrix<f64>, vbar: f64) {
    let sq = w.norm_squared();
    if sq > vbar {
        w.scale_mut((vbar / sq).sqrt());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small_weights(seed: u64) -> NNWeights {
        let cfg = NNConfig { init_scale: 0.8, ..NNConfig::default() };
        NNWeights::random(&cfg, seed)
    }

    #[test]
    fn phi_examples() {
        let z = DVector::zeros(4);
        assert_eq!(phi(&z).as_slice(), &[0.5, 0.5, 0.5, 0.5, 1.0]);
        let big = DVector::from_element(3, 60.0);
        assert!(phi(&big).iter().all(|v| (v - 1.0).abs() < 1e-20));
        let one = phi(&DVector::from_element(1, 1.0));
        assert!((one[0] - 0.7310585786300049).abs() < 1e-15);
    }

    #[test]
    fn phi_prime_examples() {
        let j = phi_prime(&DVector::zeros(4));
        for i in 0..4 {
            assert_eq!(j[(i, i)], 0.25);
            assert_eq!(j[(4, i)], 0.0);
        }
        let z = DVector::from_vec(vec![-3.0, 0.2, 7.0]);
        let j = phi_prime(&z);
        assert!(j.iter().all(|v| (0.0..=0.25).contains(v)));
        assert!((0..3).all(|i| j[(i, i)] > 0.0));
    }

    #[test]
    fn phi_prime_matches_central_differences() {
        let z = DVector::from_vec(vec![-1.3, 0.0, 0.4, 2.2]);
        let j = phi_prime(&z);
        let h = 1e-5;
        for c in 0..4 {
            let mut zp = z.clone();
            let mut zm = z.clone();
            zp[c] += h;
            zm[c] -= h;
            let fd = (phi(&zp) - phi(&zm)) / (2.0 * h);
            for r in 0..5 {
                let exact = j[(r, c)];
                let err = (fd[r] - exact).abs();
                assert!(err <= 1e-6 * exact.abs().max(1e-12) || err < 1e-11, "({r},{c}) {err}");
            }
        }
    }

    #[test]
    fn forward_degenerate_weights() {
        let cfg = NNConfig::default();
        let mut w = small_weights(3);
        let x = NNInput::from_velocity(&Vec3::new(0.3, -0.2, 0.1));
        w.v1_hat.fill(0.0);
        assert_eq!(forward(&w, &x), Vec3::zeros());

        let mut w = small_weights(4);
        w.v0_hat.fill(0.0);
        let hidden = DVector::from_vec(vec![0.5, 0.5, 0.5, 0.5, 1.0]);
        let expect = w.v1_hat.transpose() * hidden;
        assert_eq!(forward(&w, &x).as_slice(), expect.as_slice());
        assert_eq!(NNWeights::zeros(&cfg).len(), 16 + 15);
    }

    /// Plain nested-loop forward pass; `v0[a][j]` is input `a` to hidden unit
    /// `j`, `v1[k][i]` is hidden unit `i` to output `k`.
    fn forward_oracle(v0: &[[f64; 4]; 4], v1: &[[f64; 5]; 3], x: &[f64; 4]) -> [f64; 3] {
        let mut hidden = [1.0; 5];
        for j in 0..4 {
            let mut z = 0.0;
            for a in 0..4 {
                z += v0[a][j] * x[a];
            }
            hidden[j] = 1.0 / (1.0 + (-z).exp());
        }
        let mut out = [0.0; 3];
        for (k, o) in out.iter_mut().enumerate() {
            for (i, h) in hidden.iter().enumerate() {
                *o += v1[k][i] * h;
            }
        }
        out
    }

    #[test]
    fn forward_matches_loop_oracle() {
        for seed in 0..20 {
            let w = small_weights(seed);
            let mut v0 = [[0.0; 4]; 4];
            for a in 0..4 {
                for j in 0..4 {
                    v0[a][j] = w.v0_hat[(a, j)];
                }
            }
            let mut v1 = [[0.0; 5]; 3];
            for k in 0..3 {
                for i in 0..5 {
                    v1[k][i] = w.v1_hat[(i, k)];
                }
            }
            let x = [0.1 * seed as f64, -0.4, 0.25, 1.0];
            let oracle = forward_oracle(&v0, &v1, &x);
            let got = forward(&w, &NNInput::from_velocity(&Vec3::new(x[0], x[1], x[2])));
            for k in 0..3 {
                assert!((got[k] - oracle[k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn update_zero_factors() {
        let cfg = NNConfig::default();
        let x = NNInput::from_velocity(&Vec3::new(0.5, 0.1, 0.0));
        let w = small_weights(7);
        let (d0, d1) = update_deriv(&w, &x, &Vec3::zeros(), &cfg);
        assert!(d0.iter().chain(d1.iter()).all(|v| *v == 0.0));

        let mut w = small_weights(8);
        w.v1_hat.fill(0.0);
        let (d0, d1) = update_deriv(&w, &x, &Vec3::new(0.3, -0.1, 0.2), &cfg);
        assert!(d0.iter().all(|v| *v == 0.0));
        assert!(d1.iter().any(|v| *v != 0.0));
    }

    #[test]
    fn projection_cases() {
        let w = DMatrix::from_element(2, 2, 1.0); // ‖w‖² = 4
        let raw = DMatrix::from_vec(2, 2, vec![1.0, -2.0, 0.5, 3.0]);
        assert_eq!(proj(raw.clone(), &w, 10.0), raw);

        let inward = -&w * 0.3 + DMatrix::from_vec(2, 2, vec![0.1, -0.1, 0.0, 0.0]);
        assert_eq!(proj(inward.clone(), &w, 4.0), inward);

        let out = proj(w.clone(), &w, 4.0);
        assert!(out.norm() < 1e-15);

        // outward raw on the boundary: tangent result
        let out = proj(raw.clone(), &w, 4.0);
        assert!(w.dot(&out).abs() < 1e-14);
    }

    #[test]
    fn retract_restores_bound() {
        let mut w = DMatrix::from_element(3, 2, 2.0);
        retract(&mut w, 6.0);
        assert!((w.norm_squared() - 6.0).abs() < 1e-12);
        let mut inside = DMatrix::from_element(3, 2, 0.1);
        let before = inside.clone();
        retract(&mut inside, 6.0);
        assert_eq!(inside, before);
    }

    #[test]
    fn config_validation() {
        NNConfig::default().validate().unwrap();
        assert!(NNConfig { n2: 2, ..NNConfig::default() }.validate().is_err());
        assert!(NNConfig { gamma1: vec![1.0; 4], ..NNConfig::default() }.validate().is_err());
        assert!(NNConfig { gamma0: vec![1.0, 1.0, 0.0, 1.0], ..NNConfig::default() }.validate().is_err());
    }

    #[test]
    fn flat_round_trip() {
        let cfg = NNConfig::default();
        let w = small_weights(11);
        let mut buf = vec![0.0; w.len()];
        w.write_flat(&mut buf);
        assert_eq!(NNWeights::from_flat(&cfg, &buf), w);
    }

    proptest! {
        #[test]
        fn forward_bounded_by_output_norm(seed in 0u64..1000, vx in -2.0..2.0f64, vy in -2.0..2.0f64) {
            let w = small_weights(seed);
            let x = NNInput::from_velocity(&Vec3::new(vx, vy, 0.0));
            let out = forward(&w, &x);
            prop_assert!(out.norm() <= w.v1_hat.norm() * 5f64.sqrt() + 1e-12);
        }
    }
}
