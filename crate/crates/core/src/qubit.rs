//! Dense complex kernel for 2×2 and 4×4 matrices, pure qubit states and the
//! symmetric two-state geometry.

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
pub use num_complex::Complex64;
use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::{Error, Result, ALGEBRAIC_TOL};

/// Shorthand for a real-valued complex number.
#[inline]
pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Row-major dense complex matrix of dimension 2 or 4.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})[", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

fn check_dim(dim: usize) -> Result<()> {
    match dim {
        2 | 4 => Ok(()),
        d => Err(Error::UnsupportedDimension(d)),
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            entries: vec![Complex64::default(); dim * dim],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m[(i, i)] = re(1.0);
        }
        Ok(m)
    }

    /// Builds a matrix from row-major entries; `entries.len()` must be 4 or 16.
    pub fn from_row_major(entries: Vec<Complex64>) -> Result<Self> {
        let dim = match entries.len() {
            4 => 2,
            16 => 4,
            n => {
                return Err(Error::DimensionMismatch {
                    expected: 16,
                    got: n,
                })
            }
        };
        Ok(Self { dim, entries })
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::from_row_major(entries.iter().copied().map(re).collect())
    }

    pub(crate) fn zeros2() -> Self {
        Self {
            dim: 2,
            entries: vec![Complex64::default(); 4],
        }
    }

    pub(crate) fn zeros4() -> Self {
        Self {
            dim: 4,
            entries: vec![Complex64::default(); 16],
        }
    }

    pub fn identity2() -> Self {
        Self::from_real(&[1.0, 0.0, 0.0, 1.0]).unwrap()
    }

    pub fn identity4() -> Self {
        Self::identity(4).unwrap()
    }

    pub fn sigma_x() -> Self {
        Self::from_real(&[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    pub fn sigma_z() -> Self {
        Self::from_real(&[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    /// Matrix unit `|i⟩⟨j|` in dimension 2.
    pub fn unit2(i: usize, j: usize) -> Self {
        let mut m = Self::zeros2();
        m[(i, j)] = re(1.0);
        m
    }

    /// Real rotation `[[cos θ, −sin θ], [sin θ, cos θ]]`, taking `|1⟩` to `(cos θ, sin θ)`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::from_real(&[c, -s, s, c]).unwrap()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = self[(j, i)];
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(re(s))
    }

    /// `Tr[self · other]` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex64 {
        assert_eq!(self.dim, other.dim, "trace_product dimension mismatch");
        let n = self.dim;
        let mut acc = Complex64::default();
        for i in 0..n {
            for k in 0..n {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise deviation `|M − M†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// `⟨ψ|M|ψ⟩` for a 2×2 matrix.
    pub fn expectation(&self, psi: &PureState) -> Complex64 {
        assert_eq!(self.dim, 2);
        let v = self.apply(psi.amplitudes());
        psi.amp[0].conj() * v[0] + psi.amp[1].conj() * v[1]
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        assert_eq!(self.dim, 2);
        [
            self[(0, 0)] * v[0] + self[(0, 1)] * v[1],
            self[(1, 0)] * v[0] + self[(1, 1)] * v[1],
        ]
    }

    /// `M ρ M†`.
    pub fn sandwich(&self, rho: &Self) -> Self {
        &(self * rho) * &self.adjoint()
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.entries)
    }
}

/// Serialized as a list of rows, each entry a `[re, im]` pair.
impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut rows = serializer.serialize_seq(Some(self.dim))?;
        for row in self.entries.chunks(self.dim) {
            let pairs: Vec<[f64; 2]> = row.iter().map(|z| [z.re, z.im]).collect();
            rows.serialize_element(&pairs)?;
        }
        rows.end()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix product dimension mismatch");
        let n = self.dim;
        let mut out = ComplexMatrix {
            dim: n,
            entries: vec![Complex64::default(); n * n],
        };
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix sum dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix difference dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Kronecker product of two 2×2 matrices, `(a ⊗ b)[2i+k, 2j+l] = a[i,j]·b[k,l]`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    for m in [a, b] {
        if m.dim != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: m.dim,
            });
        }
    }
    let mut out = ComplexMatrix::zeros4();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[(2 * i + k, 2 * j + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Hermitian eigendecomposition. Eigenvalues ascending; column `k` of the
/// returned matrix is the eigenvector for eigenvalue `k`.
pub fn eigh(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let defect = m.hermiticity_defect();
    if defect > 1e-10 {
        return Err(Error::NotHermitian(defect));
    }
    // Symmetrize away round-off before handing off.
    let h = m.to_nalgebra();
    let h = (&h + h.adjoint()) * re(0.5);
    let eig = h.symmetric_eigen();
    let n = m.dim;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = ComplexMatrix {
        dim: n,
        entries: vec![Complex64::default(); n * n],
    };
    for (col, &k) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, col)] = eig.eigenvectors[(row, k)];
        }
    }
    Ok((values, vectors))
}

/// Smallest eigenvalue of a Hermitian matrix (closed form for 2×2).
pub fn min_eigenvalue_hermitian(m: &ComplexMatrix) -> Result<f64> {
    let defect = m.hermiticity_defect();
    if defect > 1e-10 {
        return Err(Error::NotHermitian(defect));
    }
    if m.dim == 2 {
        let a = m[(0, 0)].re;
        let d = m[(1, 1)].re;
        let b = m[(0, 1)];
        let half_gap = ((a - d) * 0.5).hypot(b.norm());
        return Ok((a + d) * 0.5 - half_gap);
    }
    Ok(eigh(m)?.0[0])
}

/// Normalized two-component state on the basis `{|1⟩, |2⟩}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState {
    amp: [Complex64; 2],
}

impl PureState {
    pub fn new(a0: Complex64, a1: Complex64) -> Result<Self> {
        let n2 = a0.norm_sqr() + a1.norm_sqr();
        if (n2 - 1.0).abs() > ALGEBRAIC_TOL {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self { amp: [a0, a1] })
    }

    pub fn real(a0: f64, a1: f64) -> Result<Self> {
        Self::new(re(a0), re(a1))
    }

    /// `|1⟩` for index 0, `|2⟩` for index 1.
    pub fn basis(index: usize) -> Self {
        let mut amp = [Complex64::default(); 2];
        amp[index] = re(1.0);
        Self { amp }
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(a0: Complex64, a1: Complex64) -> Result<Self> {
        let n = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized(n * n));
        }
        Ok(Self {
            amp: [a0 / n, a1 / n],
        })
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        self.amp
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amp[0].conj() * other.amp[0] + self.amp[1].conj() * other.amp[1]
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros2();
        for i in 0..2 {
            for j in 0..2 {
                m[(i, j)] = self.amp[i] * self.amp[j].conj();
            }
        }
        m
    }
}

/// `|⟨a|b⟩|`.
pub fn fidelity(a: &PureState, b: &PureState) -> f64 {
    a.inner(b).norm().min(1.0)
}

/// Two states placed symmetrically about the measurement basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatePair {
    pub alpha: f64,
    pub psi1: PureState,
    pub psi2: PureState,
}

/// Checks `α ∈ [0, π/4]`, snapping values within round-off of an endpoint.
pub(crate) fn check_alpha(alpha: f64) -> Result<f64> {
    const SLACK: f64 = 1e-14;
    if !alpha.is_finite() || !(-SLACK..=FRAC_PI_4 + SLACK).contains(&alpha) {
        return Err(Error::Domain {
            name: "alpha",
            value: alpha,
            domain: "[0, π/4]",
        });
    }
    Ok(alpha.clamp(0.0, FRAC_PI_4))
}

/// `ψ₁ = (cos α, sin α)`, `ψ₂ = (sin α, cos α)` for `α ∈ [0, π/4]`.
pub fn symmetric_pair(alpha: f64) -> Result<StatePair> {
    let alpha = check_alpha(alpha)?;
    let (s, c) = alpha.sin_cos();
    Ok(StatePair {
        alpha,
        psi1: PureState {
            amp: [re(c), re(s)],
        },
        psi2: PureState {
            amp: [re(s), re(c)],
        },
    })
}

impl StatePair {
    pub fn states(&self) -> [PureState; 2] {
        [self.psi1, self.psi2]
    }

    /// `f = |⟨ψ₁|ψ₂⟩| = sin 2α`.
    pub fn fidelity(&self) -> f64 {
        fidelity(&self.psi1, &self.psi2)
    }
}
