//! Choi–Jamiołkowski representation of completely positive qubit maps.
//!
//! A map `ℳ` is represented by `R = (ℳ ⊗ 𝟙)|Ω⟩⟨Ω|` with the unnormalized
//! `|Ω⟩ = |0⟩|0⟩ + |1⟩|1⟩`. The first tensor factor is the map output and the
//! second is the input, so trace preservation reads `Tr₁[R] = 𝟙` and the map
//! is recovered as `ℳ(ρ) = Tr₂[(𝟙 ⊗ ρᵀ) R]`.

use serde::Serialize;

use crate::instruments::{Instrument, KrausSet};
use crate::qubit::{
    eigh, min_eigenvalue_hermitian, re, tensor, Complex64, ComplexMatrix, StatePair,
};
use crate::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-10;
const TP_CONTRACT_TOL: f64 = 1e-8;

/// 4×4 positive semidefinite operator on output ⊗ input.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ChoiOperator {
    matrix: ComplexMatrix,
}

impl ChoiOperator {
    /// Validates dimension, Hermiticity and positivity.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                got: matrix.dim(),
            });
        }
        let defect = matrix.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let min = min_eigenvalue_hermitian(&matrix)?;
        if min < -PSD_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(Self { matrix })
    }

    /// `L L†`, positive by construction.
    pub fn from_factor(factor: &ComplexMatrix) -> Self {
        assert_eq!(factor.dim(), 4);
        Self {
            matrix: factor * &factor.adjoint(),
        }
    }

    pub fn zero() -> Self {
        Self {
            matrix: ComplexMatrix::zeros4(),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Conjugation by `σ_x ⊗ σ_x`, the label-exchange symmetry.
    pub fn exchanged(&self) -> Self {
        let mut out = ComplexMatrix::zeros4();
        for a in 0..4 {
            for b in 0..4 {
                out[(a, b)] = self.matrix[(3 - a, 3 - b)];
            }
        }
        Self { matrix: out }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            matrix: &self.matrix + &other.matrix,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            matrix: self.matrix.scale_real(s),
        }
    }

    /// Deviation of `Tr₁[R]` from the identity.
    pub fn trace_preservation_defect(&self) -> f64 {
        partial_trace_first(self).max_abs_diff(&ComplexMatrix::identity2())
    }
}

/// `|Ω⟩ = Σ_k |k⟩⊗|k⟩` as a 4-vector.
pub fn omega() -> [Complex64; 4] {
    [re(1.0), re(0.0), re(0.0), re(1.0)]
}

/// `|Ω⟩⟨Ω|`, the Choi operator of the identity map.
pub fn omega_projector() -> ChoiOperator {
    let w = omega();
    let mut m = ComplexMatrix::zeros4();
    for a in 0..4 {
        for b in 0..4 {
            m[(a, b)] = w[a] * w[b].conj();
        }
    }
    ChoiOperator { matrix: m }
}

/// `R = Σ_k (E_k ⊗ 𝟙)|Ω⟩⟨Ω|(E_k ⊗ 𝟙)†`.
pub fn kraus_to_choi(ks: &[ComplexMatrix]) -> Result<ChoiOperator> {
    if ks.is_empty() {
        return Err(Error::InvalidInstrument("empty Kraus set".into()));
    }
    let mut m = ComplexMatrix::zeros4();
    for e in ks {
        if e.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: e.dim(),
            });
        }
        // (E ⊗ 𝟙)|Ω⟩ has component E[i,k] at index 2i+k.
        let v: Vec<Complex64> = e.entries().to_vec();
        for a in 0..4 {
            for b in 0..4 {
                m[(a, b)] += v[a] * v[b].conj();
            }
        }
    }
    Ok(ChoiOperator { matrix: m })
}

/// Choi operators of every outcome of an instrument.
pub fn instrument_choi(inst: &Instrument) -> Vec<ChoiOperator> {
    inst.outcomes()
        .iter()
        .map(|ks| kraus_to_choi(ks).expect("instrument Kraus sets are nonempty 2x2"))
        .collect()
}

/// `ℳ(ρ) = Tr₂[(𝟙 ⊗ ρᵀ) R]`.
///
/// For Hermitian `ρ` the transpose equals the complex conjugate `ρ*`; the
/// transpose is the form that stays linear on non-Hermitian inputs such as
/// matrix units.
pub fn choi_apply(r: &ChoiOperator, rho: &ComplexMatrix) -> ComplexMatrix {
    assert_eq!(rho.dim(), 2);
    let m = &r.matrix;
    let mut out = ComplexMatrix::zeros2();
    for i in 0..2 {
        for l in 0..2 {
            let mut acc = Complex64::default();
            for n in 0..2 {
                for j in 0..2 {
                    acc += rho[(n, j)] * m[(2 * i + n, 2 * l + j)];
                }
            }
            out[(i, l)] = acc;
        }
    }
    out
}

/// Trace over the output factor, `(Tr₁R)[j,l] = Σ_i R[2i+j, 2i+l]`.
pub fn partial_trace_first(r: &ChoiOperator) -> ComplexMatrix {
    let m = &r.matrix;
    let mut out = ComplexMatrix::zeros2();
    for j in 0..2 {
        for l in 0..2 {
            out[(j, l)] = m[(j, l)] + m[(2 + j, 2 + l)];
        }
    }
    out
}

/// Trace over the input factor, `(Tr₂R)[i,k] = Σ_j R[2i+j, 2k+j]`.
pub fn partial_trace_second(r: &ChoiOperator) -> ComplexMatrix {
    let m = &r.matrix;
    let mut out = ComplexMatrix::zeros2();
    for i in 0..2 {
        for k in 0..2 {
            out[(i, k)] = m[(2 * i, 2 * k)] + m[(2 * i + 1, 2 * k + 1)];
        }
    }
    out
}

/// `R'_i = (R_i + X R_j X)/2` with `X = σ_x ⊗ σ_x`, `i ≠ j`.
pub fn symmetrize(r1: &ChoiOperator, r2: &ChoiOperator) -> (ChoiOperator, ChoiOperator) {
    let a = r1.add(&r2.exchanged()).scale(0.5);
    let b = r2.add(&r1.exchanged()).scale(0.5);
    (a, b)
}

/// `|ψ⟩⟨ψ|*`.
fn conj_projector(psi: &crate::qubit::PureState) -> ComplexMatrix {
    psi.projector().conj()
}

/// Success probability and disturbance of the two-outcome instrument `{R1, R2}`
/// against the equiprobable pair.
pub fn choi_functionals(
    r1: &ChoiOperator,
    r2: &ChoiOperator,
    pair: &StatePair,
) -> Result<(f64, f64)> {
    let total = r1.add(r2);
    let defect = total.trace_preservation_defect();
    if defect > TP_CONTRACT_TOL {
        return Err(Error::NotTracePreserving(defect));
    }
    let id = ComplexMatrix::identity2();
    let states = pair.states();
    let mut p = 0.0;
    let mut kept = 0.0;
    for (psi, ri) in states.iter().zip([r1, r2]) {
        let pc = conj_projector(psi);
        let detect = tensor(&id, &pc)?;
        p += 0.5 * detect.trace_product(&ri.matrix).re;
        let fid = tensor(&psi.projector(), &pc)?;
        kept += 0.5 * fid.trace_product(&total.matrix).re;
    }
    Ok((p, 1.0 - kept))
}

/// Kraus operators recovered from the spectral decomposition of `R`.
///
/// Eigenvalues in `[-1e-10, 0]` are treated as zero; anything more negative
/// is rejected.
pub fn choi_to_kraus(r: &ChoiOperator) -> Result<KrausSet> {
    let (vals, vecs) = eigh(&r.matrix)?;
    if vals[0] < -PSD_TOL {
        return Err(Error::NotPositive(vals[0]));
    }
    let mut ks = Vec::new();
    for (k, &lambda) in vals.iter().enumerate() {
        if lambda <= 0.0 {
            continue;
        }
        let s = lambda.sqrt();
        let mut e = ComplexMatrix::zeros2();
        for i in 0..2 {
            for j in 0..2 {
                e[(i, j)] = vecs[(2 * i + j, k)] * s;
            }
        }
        ks.push(e);
    }
    if ks.is_empty() {
        ks.push(ComplexMatrix::zeros2());
    }
    Ok(ks)
}
