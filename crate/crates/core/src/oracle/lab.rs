//! Empirical check of the label-pattern concentration bound.
//!
//! Each vertex of the ordered set `[0, n)` gets a uniform label in `[q]`.
//! For a pattern `α ∈ [q]^ℓ`, `E_α` is the family of ℓ-sets whose labels,
//! read in increasing vertex order, spell `α`. The lab samples `ω(E_α)`,
//! compares its mean with `ω(V)/q^ℓ`, and compares tail frequencies with
//!
//! ```text
//! 2^ℓ · exp(−λ² / (12ℓ² M (λ + E ω(E_α)))) + exp(−g / (24ℓ²)),
//! M = q^{−ℓ} · max_k ‖ω‖_k q^k g^{k−1}.
//! ```
//!
//! Labels are 0-based in configs and reports.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::scalar::Weight;
use crate::weights::{TupleWeightFunction, WeightFile};

/// Largest labelling count the exhaustive oracle will visit.
pub const MAX_LABELINGS: u64 = 2_000_000;
/// Largest trials × support work the sampler accepts.
pub const MAX_LAB_WORK: u64 = 2_000_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabConfig {
    #[serde(default)]
    pub name: String,
    pub num_vertices: usize,
    pub q: usize,
    pub alpha: Vec<usize>,
    /// ω on ℓ-subsets of the vertex set.
    pub weights: WeightFile,
    pub g: f64,
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Deviations at which tails are measured; derived when empty.
    #[serde(default)]
    pub lambdas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailPoint {
    pub lambda: f64,
    /// Fraction of trials with |ω(E_α) − E ω(E_α)| ≥ λ.
    pub frequency: f64,
    pub bound: f64,
    /// Standard error of a frequency equal to the bound.
    pub sigma: f64,
    /// The bound is below 0.01 here, so it is asserted.
    pub asserted: bool,
    /// `frequency <= bound + 3 sigma` wherever asserted.
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabResult {
    pub name: String,
    pub trials: usize,
    pub analytic_mean: f64,
    pub empirical_mean: f64,
    pub empirical_std: f64,
    /// |empirical − analytic| in standard errors.
    pub mean_z: f64,
    pub m: f64,
    pub g: f64,
    /// g ≥ 24ℓ³(ℓ + 1 + ln n), the regime where the bound is proven.
    pub g_in_range: bool,
    /// exp(−g/24ℓ²); at 1 or more the bound says nothing.
    pub additive_term: f64,
    pub vacuous: bool,
    pub tails: Vec<TailPoint>,
    /// Expectation by visiting every labelling, when there are at most
    /// [`MAX_LABELINGS`].
    pub enumerated_mean: Option<f64>,
}

impl LabResult {
    pub fn mean_ok(&self) -> bool {
        self.mean_z <= 4.0
    }

    pub fn tails_ok(&self) -> bool {
        self.tails.iter().all(|t| t.ok)
    }
}

impl LabConfig {
    pub fn ell(&self) -> usize {
        self.alpha.len()
    }

    pub fn weight_function<W: Weight>(&self) -> Result<TupleWeightFunction<W>> {
        if self.weights.ell != self.alpha.len() {
            return Err(Error::BadParams(format!(
                "pattern has length {} but ω has arity {}",
                self.alpha.len(),
                self.weights.ell
            )));
        }
        TupleWeightFunction::from_file(&self.weights, self.num_vertices)
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0
            || self.q == 0
            || self.g.is_nan()
            || self.g <= 0.0
            || self.alpha.is_empty()
        {
            return Err(Error::BadParams(
                "need trials >= 1, q >= 1, g > 0 and a non-empty pattern".into(),
            ));
        }
        if let Some(&a) = self.alpha.iter().find(|&&a| a >= self.q) {
            return Err(Error::BadParams(format!(
                "pattern label {a} is outside [0, {})",
                self.q
            )));
        }
        Ok(())
    }

    /// M = q^{−ℓ} · max_k ‖ω‖_k q^k g^{k−1}.
    pub fn m_value(&self, omega: &TupleWeightFunction<f64>) -> Result<f64> {
        let ell = self.ell();
        let q = self.q as f64;
        let mut best = 0.0f64;
        for k in 1..=ell {
            best = best.max(omega.norm(k)? * q.powi(k as i32) * self.g.powi(k as i32 - 1));
        }
        Ok(best / q.powi(ell as i32))
    }

    pub fn bound(&self, lambda: f64, mean: f64, m: f64) -> f64 {
        let l = self.ell() as f64;
        let main = if m > 0.0 {
            (-lambda * lambda / (12.0 * l * l * m * (lambda + mean))).exp()
        } else {
            0.0
        };
        2f64.powi(self.ell() as i32) * main + (-self.g / (24.0 * l * l)).exp()
    }
}

/// ω(E_α) under the labelling `labels`.
fn pattern_weight(omega: &TupleWeightFunction<f64>, alpha: &[usize], labels: &[u8]) -> f64 {
    let parts = omega
        .entries()
        .filter(|(t, _)| {
            t.iter()
                .zip(alpha)
                .all(|(&v, &a)| labels[v as usize] as usize == a)
        })
        .map(|(_, &w)| w);
    f64::sum_all(parts)
}

/// Closed form ω(V) q^{−ℓ}.
pub fn exact_expectation<W: Weight>(omega: &TupleWeightFunction<W>, q: usize) -> W {
    let mut denom = W::one();
    for _ in 0..omega.ell() {
        denom = denom * W::from_usize(q).expect("q fits the scalar type");
    }
    omega.total_all() / denom
}

/// E ω(E_α) by visiting all q^n labellings: counts, per support tuple, the
/// labellings that realise α on it, then averages exactly.
pub fn expectation_by_enumeration<W: Weight>(
    omega: &TupleWeightFunction<W>,
    num_vertices: usize,
    q: usize,
    alpha: &[usize],
) -> Result<W> {
    let states = (q as u64)
        .checked_pow(num_vertices as u32)
        .filter(|&s| s <= MAX_LABELINGS);
    let Some(states) = states else {
        return Err(Error::TooLarge(format!(
            "{q}^{num_vertices} labellings exceed {MAX_LABELINGS}"
        )));
    };
    let support: Vec<(&[u32], &W)> = omega.entries().collect();
    let mut hits = vec![0u64; support.len()];
    let mut labels = vec![0usize; num_vertices];
    for _ in 0..states {
        for (h, (t, _)) in hits.iter_mut().zip(&support) {
            if t.iter().zip(alpha).all(|(&v, &a)| labels[v as usize] == a) {
                *h += 1;
            }
        }
        // mixed-radix increment
        for x in labels.iter_mut() {
            *x += 1;
            if *x < q {
                break;
            }
            *x = 0;
        }
    }
    let total = W::sum_all(
        support
            .iter()
            .zip(&hits)
            .map(|((_, w), &h)| (*w).clone() * W::from_u64(h).expect("count fits")),
    );
    Ok(total / W::from_u64(states).expect("count fits"))
}

/// λ grid: 16 evenly spaced points up to where the bound's main term
/// falls to 1e-4.
fn default_lambdas(config: &LabConfig, mean: f64, m: f64) -> Vec<f64> {
    let l = config.ell() as f64;
    let main = |lambda: f64| {
        2f64.powi(config.ell() as i32)
            * (-lambda * lambda / (12.0 * l * l * m * (lambda + mean))).exp()
    };
    let mut top = (m * (mean + 1.0)).sqrt().max(1e-9);
    for _ in 0..200 {
        if main(top) < 1e-4 {
            break;
        }
        top *= 1.5;
    }
    (1..=16).map(|i| top * i as f64 / 16.0).collect()
}

pub fn concentration_lab(config: &LabConfig) -> Result<LabResult> {
    config.validate()?;
    let omega: TupleWeightFunction<f64> = config.weight_function()?;
    let work =
        (config.trials as u64).saturating_mul((omega.support_len() + config.num_vertices) as u64);
    if work > MAX_LAB_WORK {
        return Err(Error::BudgetExceeded(format!(
            "{work} label checks exceed {MAX_LAB_WORK}"
        )));
    }
    let ell = config.ell();
    let analytic = exact_expectation(&omega, config.q);
    let m = config.m_value(&omega)?;

    let samples: Vec<f64> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = rng::stream(config.seed, "lab", &[trial as u64]);
            let labels: Vec<u8> = (0..config.num_vertices)
                .map(|_| rng.gen_range(0..config.q) as u8)
                .collect();
            pattern_weight(&omega, &config.alpha, &labels)
        })
        .collect();
    let n = samples.len() as f64;
    let mean = f64::sum_all(samples.iter().copied()) / n;
    let var = f64::sum_all(samples.iter().map(|x| (x - mean) * (x - mean))) / (n - 1.0).max(1.0);
    let std = var.sqrt();
    let se = std / n.sqrt();
    let mean_z = if se > 0.0 {
        (mean - analytic).abs() / se
    } else if mean == analytic {
        0.0
    } else {
        f64::INFINITY
    };

    let lambdas = if config.lambdas.is_empty() {
        default_lambdas(config, analytic, m)
    } else {
        config.lambdas.clone()
    };
    let tails = lambdas
        .iter()
        .map(|&lambda| {
            let count = samples
                .iter()
                .filter(|&&x| (x - analytic).abs() >= lambda)
                .count();
            let frequency = count as f64 / n;
            let bound = config.bound(lambda, analytic, m);
            let b = bound.min(1.0);
            let sigma = (b * (1.0 - b) / n).sqrt();
            let asserted = bound < 0.01;
            TailPoint {
                lambda,
                frequency,
                bound,
                sigma,
                asserted,
                ok: !asserted || frequency <= bound + 3.0 * sigma,
            }
        })
        .collect();

    let l = ell as f64;
    let additive = (-config.g / (24.0 * l * l)).exp();
    let enumerated_mean =
        expectation_by_enumeration(&omega, config.num_vertices, config.q, &config.alpha).ok();
    Ok(LabResult {
        name: config.name.clone(),
        trials: config.trials,
        analytic_mean: analytic,
        empirical_mean: mean,
        empirical_std: std,
        mean_z,
        m,
        g: config.g,
        g_in_range: config.g >= 24.0 * l.powi(3) * (l + 1.0 + (config.num_vertices as f64).ln()),
        additive_term: additive,
        vacuous: additive >= 1.0,
        tails,
        enumerated_mean,
    })
}

/// The configurations shipped with the library.
pub fn shipped_configs() -> Vec<LabConfig> {
    [
        include_str!("../../labs/singletons.json"),
        include_str!("../../labs/all-pairs.json"),
        include_str!("../../labs/sparse-pairs.json"),
        include_str!("../../labs/sparse-triples.json"),
        include_str!("../../labs/weighted-singletons.json"),
    ]
    .iter()
    .map(|text| serde_json::from_str(text).expect("shipped lab config parses"))
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use crate::weights::WeightEntry;
    use num_rational::BigRational;

    fn config(n: usize, q: usize, alpha: Vec<usize>, entries: Vec<(Vec<usize>, f64)>) -> LabConfig {
        LabConfig {
            name: "t".into(),
            num_vertices: n,
            q,
            weights: WeightFile {
                ell: alpha.len(),
                entries: entries
                    .into_iter()
                    .map(|(tuple, w)| WeightEntry { tuple, w })
                    .collect(),
            },
            alpha,
            g: 200.0,
            trials: 2000,
            seed: 5,
            lambdas: Vec::new(),
        }
    }

    #[test]
    fn single_pair_expectation() {
        let c = config(4, 2, vec![0, 1], vec![(vec![1, 3], 3.0)]);
        let omega: TupleWeightFunction<BigRational> = c.weight_function().unwrap();
        assert_eq!(exact_expectation(&omega, 2), rational(3, 4));
        assert_eq!(
            expectation_by_enumeration(&omega, 4, 2, &c.alpha).unwrap(),
            rational(3, 4)
        );
    }

    #[test]
    fn zero_weight_has_zero_mean() {
        let c = config(5, 3, vec![2], vec![]);
        let omega: TupleWeightFunction<BigRational> = c.weight_function().unwrap();
        assert_eq!(exact_expectation(&omega, 3), rational(0, 1));
        let r = concentration_lab(&c).unwrap();
        assert_eq!((r.empirical_mean, r.analytic_mean), (0.0, 0.0));
    }

    #[test]
    fn binomial_mean() {
        let mut c = config(100, 4, vec![1], (0..100).map(|v| (vec![v], 1.0)).collect());
        c.trials = 10_000;
        let r = concentration_lab(&c).unwrap();
        assert_eq!(r.analytic_mean, 25.0);
        assert!(r.mean_ok(), "{r:?}");
        assert!(r.tails_ok());
    }

    #[test]
    fn enumeration_limits() {
        let c = config(30, 2, vec![0], vec![(vec![0], 1.0)]);
        let omega: TupleWeightFunction<f64> = c.weight_function().unwrap();
        assert!(matches!(
            expectation_by_enumeration(&omega, 30, 2, &[0]),
            Err(Error::TooLarge(_))
        ));
        let mut bad = c.clone();
        bad.alpha = vec![2];
        assert!(concentration_lab(&bad).is_err());
    }

    #[test]
    fn shipped_configs_parse() {
        let configs = shipped_configs();
        assert_eq!(configs.len(), 5);
        for c in &configs {
            assert!(c.trials >= 10_000);
            c.weight_function::<f64>().unwrap();
        }
    }
}
