//! Kraus-level quantum instruments and the success-probability and
//! disturbance functionals.

use crate::qubit::{eigh, re, ComplexMatrix, PureState, StatePair};
use crate::{Error, Result};

/// Kraus operators of one outcome.
pub type KrausSet = Vec<ComplexMatrix>;

const COMPLETENESS_TOL: f64 = 1e-10;

/// Ordered collection of completely positive maps, one per outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Instrument {
    outcomes: Vec<KrausSet>,
}

fn kraus_effect(ks: &[ComplexMatrix]) -> ComplexMatrix {
    ks.iter()
        .fold(ComplexMatrix::zeros2(), |acc, e| &acc + &(&e.adjoint() * e))
}

impl Instrument {
    /// Validates shapes and completeness `Σ E†E = 𝟙`.
    pub fn new(outcomes: Vec<KrausSet>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::InvalidInstrument("no outcomes".into()));
        }
        for (i, ks) in outcomes.iter().enumerate() {
            if ks.is_empty() {
                return Err(Error::InvalidInstrument(format!(
                    "outcome {i} has no Kraus operators"
                )));
            }
            if let Some(bad) = ks.iter().find(|e| e.dim() != 2) {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    got: bad.dim(),
                });
            }
        }
        let inst = Self { outcomes };
        let total = inst
            .povm()
            .iter()
            .fold(ComplexMatrix::zeros2(), |acc, p| &acc + p);
        let dev = total.max_abs_diff(&ComplexMatrix::identity2());
        if dev > COMPLETENESS_TOL {
            return Err(Error::Incomplete(dev));
        }
        Ok(inst)
    }

    /// Pure two-outcome instrument `{E₁ρE₁†, E₂ρE₂†}`.
    pub fn pure(e1: ComplexMatrix, e2: ComplexMatrix) -> Result<Self> {
        Self::new(vec![vec![e1], vec![e2]])
    }

    /// Rescales an arbitrary family of Kraus operators `A` by `S^{-1/2}` on the
    /// right, `S = Σ A†A`, so that the result is complete. `S` must be invertible.
    pub fn completed(outcomes: Vec<KrausSet>) -> Result<Self> {
        let s = outcomes
            .iter()
            .fold(ComplexMatrix::zeros2(), |acc, ks| &acc + &kraus_effect(ks));
        let (vals, vecs) = eigh(&s)?;
        if vals[0] <= 1e-12 {
            return Err(Error::InvalidInstrument(
                "Kraus family has a singular total effect".into(),
            ));
        }
        let mut d = ComplexMatrix::zeros2();
        for (k, v) in vals.iter().enumerate() {
            d[(k, k)] = re(v.sqrt().recip());
        }
        let inv_sqrt = &(&vecs * &d) * &vecs.adjoint();
        let outcomes = outcomes
            .into_iter()
            .map(|ks| ks.iter().map(|a| a * &inv_sqrt).collect())
            .collect();
        Self::new(outcomes)
    }

    /// No measurement: both outcomes apply `𝟙/√2`.
    pub fn identity() -> Self {
        let e = ComplexMatrix::identity2().scale_real(std::f64::consts::FRAC_1_SQRT_2);
        Self {
            outcomes: vec![vec![e.clone()], vec![e]],
        }
    }

    /// Projective measurement on `{|1⟩, |2⟩}` leaving the basis state behind.
    pub fn von_neumann() -> Self {
        Self {
            outcomes: vec![
                vec![ComplexMatrix::unit2(0, 0)],
                vec![ComplexMatrix::unit2(1, 1)],
            ],
        }
    }

    /// Measures `{|1⟩, |2⟩}` and prepares `prepared[j]` on outcome `j`,
    /// i.e. `E_j = |ψ̃_j⟩⟨j|`.
    pub fn measure_and_prepare(prepared: [PureState; 2]) -> Self {
        let outcomes = prepared
            .iter()
            .enumerate()
            .map(|(j, s)| {
                let a = s.amplitudes();
                let mut e = ComplexMatrix::zeros2();
                e[(0, j)] = a[0];
                e[(1, j)] = a[1];
                vec![e]
            })
            .collect();
        Self { outcomes }
    }

    pub fn outcomes(&self) -> &[KrausSet] {
        &self.outcomes
    }

    pub fn outcome_count(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_pure(&self) -> bool {
        self.outcomes.iter().all(|ks| ks.len() == 1)
    }

    /// `Π_i = Σ_k E_k^(i)† E_k^(i)` for every outcome.
    pub fn povm(&self) -> Vec<ComplexMatrix> {
        self.outcomes.iter().map(|ks| kraus_effect(ks)).collect()
    }

    /// `ℰ_i(ρ)` and its trace.
    pub fn apply_outcome(&self, index: usize, rho: &ComplexMatrix) -> Result<OutcomeState> {
        let ks = self.outcomes.get(index).ok_or(Error::OutcomeOutOfRange {
            index,
            count: self.outcomes.len(),
        })?;
        if rho.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: rho.dim(),
            });
        }
        let image = ks
            .iter()
            .fold(ComplexMatrix::zeros2(), |acc, e| &acc + &e.sandwich(rho));
        let probability = image.trace().re;
        if probability <= 0.0 {
            return Ok(OutcomeState {
                unnormalized: ComplexMatrix::zeros2(),
                probability: 0.0,
            });
        }
        Ok(OutcomeState {
            unnormalized: image,
            probability,
        })
    }

    /// Outcome-averaged channel `ℰ(ρ) = Σ_i ℰ_i(ρ)`.
    pub fn channel(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        self.outcomes
            .iter()
            .flatten()
            .fold(ComplexMatrix::zeros2(), |acc, e| &acc + &e.sandwich(rho))
    }
}

/// Unnormalized post-measurement state of one outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeState {
    pub unnormalized: ComplexMatrix,
    pub probability: f64,
}

impl OutcomeState {
    /// `ℰ_i(ρ)/Tr[ℰ_i(ρ)]`, or `None` for a zero-probability outcome.
    pub fn posterior(&self) -> Option<ComplexMatrix> {
        (self.probability > 0.0).then(|| self.unnormalized.scale_real(self.probability.recip()))
    }
}

/// Prior-weighted list of pure states.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    priors: Vec<f64>,
    states: Vec<PureState>,
}

impl Ensemble {
    pub fn new(priors: Vec<f64>, states: Vec<PureState>) -> Result<Self> {
        if priors.len() != states.len() {
            return Err(Error::InvalidEnsemble(format!(
                "{} priors for {} states",
                priors.len(),
                states.len()
            )));
        }
        if priors.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidEnsemble(
                "negative or non-finite prior".into(),
            ));
        }
        let total: f64 = priors.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidEnsemble(format!("priors sum to {total}")));
        }
        Ok(Self { priors, states })
    }

    pub fn equiprobable(pair: &StatePair) -> Self {
        Self {
            priors: vec![0.5, 0.5],
            states: pair.states().to_vec(),
        }
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    fn check(&self, inst: &Instrument) -> Result<()> {
        if inst.outcome_count() != self.states.len() {
            return Err(Error::SizeMismatch {
                outcomes: inst.outcome_count(),
                states: self.states.len(),
            });
        }
        Ok(())
    }
}

/// `P = Σ_i p_i ⟨ψ_i|Π_i|ψ_i⟩`.
pub fn success_probability(inst: &Instrument, ens: &Ensemble) -> Result<f64> {
    ens.check(inst)?;
    let p = inst
        .povm()
        .iter()
        .zip(ens.priors.iter().zip(&ens.states))
        .map(|(pi, (prior, psi))| prior * pi.expectation(psi).re)
        .sum();
    Ok(p)
}

/// `D = 1 − Σ_i p_i ⟨ψ_i|ℰ(|ψ_i⟩⟨ψ_i|)|ψ_i⟩` with `ℰ` the outcome-averaged channel.
pub fn disturbance(inst: &Instrument, ens: &Ensemble) -> Result<f64> {
    ens.check(inst)?;
    let kept: f64 = ens
        .priors
        .iter()
        .zip(&ens.states)
        .map(|(prior, psi)| prior * inst.channel(&psi.projector()).expectation(psi).re)
        .sum();
    Ok(1.0 - kept)
}
