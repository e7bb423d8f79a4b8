//! The hedge (multiplicative weights) rule and its regret audit.

use crate::numeric::Vector;

/// One hedge round: discount each weight by `beta^loss`, floor at `s / K`
/// (K = number of experts), then renormalize to sum 1.
///
/// `alphas` must sum to 1 and `losses` must already be clipped to the
/// exponent range. `s = 0` gives the pure hedge rule with no exploration
/// floor.
pub fn hedge_update(alphas: &Vector, losses: &[f64], beta: f64, s: f64) -> Vector {
    let k = alphas.len();
    assert_eq!(losses.len(), k, "one loss per expert");
    debug_assert!((alphas.sum() - 1.0).abs() < 1e-6, "alphas must sum to 1");
    let floor = s / k as f64;
    let mut out: Vec<f64> =
        alphas.iter().zip(losses).map(|(&a, &l)| (a * beta.powf(l)).max(floor)).collect();
    let z: f64 = out.iter().sum();
    for a in &mut out {
        *a /= z;
    }
    Vector::from_vec(out)
}

/// Discount factor minimizing the worst-case hedge regret over a horizon of
/// `t` rounds with `n` experts: `1 / (1 + sqrt(2 ln n / t))`.
pub fn tuned_discount(t: usize, n: usize) -> f64 {
    assert!(t > 0 && n > 1);
    1.0 / (1.0 + (2.0 * (n as f64).ln() / t as f64).sqrt())
}

/// Outcome of running pure hedge over a full loss sequence.
#[derive(Clone, Copy, Debug)]
pub struct RegretAudit {
    /// Σ_t ⟨α_t, loss_t⟩ with the weights in force before each round's update.
    pub hedge_cumulative_loss: f64,
    /// min_i Σ_t loss_t[i], the best single expert in hindsight.
    pub best_expert_loss: f64,
    /// √(T ln N), the reference bound for a well-tuned discount.
    pub bound: f64,
}

impl RegretAudit {
    /// Realized regret: hedge loss minus the best expert's loss.
    pub fn regret(&self) -> f64 {
        self.hedge_cumulative_loss - self.best_expert_loss
    }
}

/// Runs pure hedge (no smoothing floor) over `loss_matrix` (T rounds × N
/// experts, losses in [0,1]) at discount `beta`, starting from uniform
/// weights.
pub fn hedge_regret_audit(loss_matrix: &[Vec<f64>], beta: f64) -> RegretAudit {
    assert!(!loss_matrix.is_empty(), "need at least one round");
    let n = loss_matrix[0].len();
    assert!(n >= 2, "need at least two experts");
    assert!(beta > 0.0 && beta < 1.0, "discount must be in (0,1)");
    let t = loss_matrix.len();

    let mut alphas = Vector::from_vec(vec![1.0 / n as f64; n]);
    let mut hedge_loss = 0.0;
    let mut expert_loss = vec![0.0; n];
    for (round, losses) in loss_matrix.iter().enumerate() {
        assert_eq!(losses.len(), n, "ragged loss matrix at round {}", round);
        assert!(
            losses.iter().all(|&l| (0.0..=1.0).contains(&l)),
            "losses must lie in [0,1] (round {})",
            round
        );
        for (i, &l) in losses.iter().enumerate() {
            hedge_loss += alphas[i] * l;
            expert_loss[i] += l;
        }
        alphas = hedge_update(&alphas, losses, beta, 0.0);
    }
    let best = expert_loss.iter().cloned().fold(f64::INFINITY, f64::min);
    RegretAudit {
        hedge_cumulative_loss: hedge_loss,
        best_expert_loss: best,
        bound: (t as f64 * (n as f64).ln()).sqrt(),
    }
}
