use nalgebra::{DMatrix, DVector};

use super::{caps, Amplitude, QuantumState, NORM_TOLERANCE};
use crate::{Error, Result};

/// Hermitian, PSD, unit-trace matrix over at most the density cap.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    width: usize,
    matrix: DMatrix<Amplitude>,
    /// Set when built from a single pure state.
    pure: Option<DVector<Amplitude>>,
}

fn check_width(width: usize) -> Result<()> {
    let cap = caps().density_qubits;
    if width > cap {
        return Err(Error::Resource {
            what: "density matrix qubits",
            required: width,
            available: cap,
        });
    }
    Ok(())
}

fn state_vector<S: QuantumState>(state: &S) -> Result<DVector<Amplitude>> {
    check_width(state.width())?;
    let mut v = DVector::zeros(1 << state.width());
    for (i, a) in state.entries() {
        v[i as usize] = a;
    }
    Ok(v)
}

fn hermitian_eigen(m: &DMatrix<Amplitude>) -> (DVector<f64>, DMatrix<Amplitude>) {
    let sym = (m + m.adjoint()) * Amplitude::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    (eig.eigenvalues, eig.eigenvectors)
}

impl DensityMatrix {
    pub fn from_pure<S: QuantumState>(state: &S) -> Result<Self> {
        let v = state_vector(state)?;
        Ok(Self {
            width: state.width(),
            matrix: &v * v.adjoint(),
            pure: Some(v),
        })
    }

    /// Validates Hermiticity, positivity and trace.
    pub fn from_matrix(matrix: DMatrix<Amplitude>) -> Result<Self> {
        let dim = matrix.nrows();
        if dim != matrix.ncols() || !dim.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "density matrix must be square with power-of-two size, got {}x{}",
                dim,
                matrix.ncols()
            )));
        }
        let width = dim.trailing_zeros() as usize;
        check_width(width)?;
        let herm = (&matrix - matrix.adjoint()).camax();
        if herm > NORM_TOLERANCE {
            return Err(Error::InvalidParameter(format!("matrix not Hermitian (deviation {herm})")));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > NORM_TOLERANCE || trace.im.abs() > NORM_TOLERANCE {
            return Err(Error::InvalidParameter(format!("trace is {trace}, expected 1")));
        }
        let (vals, _) = hermitian_eigen(&matrix);
        if let Some(v) = vals.iter().find(|&&v| v < -NORM_TOLERANCE) {
            return Err(Error::InvalidParameter(format!("negative eigenvalue {v}")));
        }
        Ok(Self {
            width,
            matrix,
            pure: None,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn matrix(&self) -> &DMatrix<Amplitude> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn rank(&self, tolerance: f64) -> usize {
        hermitian_eigen(&self.matrix).0.iter().filter(|&&v| v > tolerance).count()
    }

    fn sqrt(&self) -> DMatrix<Amplitude> {
        let (vals, vecs) = hermitian_eigen(&self.matrix);
        let roots = DMatrix::from_diagonal(
            &vals.map(|v| Amplitude::new(v.max(0.0).sqrt(), 0.0)),
        );
        &vecs * roots * vecs.adjoint()
    }
}

/// `tr √(√ρ σ √ρ)`, with `|⟨ψ|φ⟩|` and `√⟨ψ|σ|ψ⟩` shortcuts for pure inputs.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.width != sigma.width {
        return Err(Error::WidthMismatch {
            expected: rho.width,
            actual: sigma.width,
        });
    }
    let f = match (&rho.pure, &sigma.pure) {
        (Some(a), Some(b)) => a.dotc(b).norm(),
        (Some(p), None) | (None, Some(p)) => {
            let m = if rho.pure.is_some() { &sigma.matrix } else { &rho.matrix };
            p.dotc(&(m * p)).re.max(0.0).sqrt()
        }
        (None, None) => {
            let s = rho.sqrt();
            let inner = &s * &sigma.matrix * &s;
            let (vals, _) = hermitian_eigen(&inner);
            vals.iter().map(|v| v.max(0.0).sqrt()).sum()
        }
    };
    Ok(f.clamp(0.0, 1.0))
}

/// `√(2 − 2F)`.
pub fn bures(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok((2.0 - 2.0 * fidelity(rho, sigma)?).max(0.0).sqrt())
}

/// Convex mixture `Σ w_i |ψ_i⟩⟨ψ_i|`.
pub fn density_from_samples<S: QuantumState>(samples: &[(S, f64)]) -> Result<DensityMatrix> {
    let first = samples
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty sample list".into()))?;
    let width = first.0.width();
    check_width(width)?;
    let total: f64 = samples.iter().map(|(_, w)| w).sum();
    if (total - 1.0).abs() > NORM_TOLERANCE || samples.iter().any(|(_, w)| *w < 0.0) {
        return Err(Error::InvalidParameter(format!("weights sum to {total}, expected 1")));
    }
    if samples.len() == 1 {
        return DensityMatrix::from_pure(&first.0);
    }
    let dim = 1usize << width;
    let mut m = DMatrix::zeros(dim, dim);
    for (s, w) in samples {
        if s.width() != width {
            return Err(Error::WidthMismatch {
                expected: width,
                actual: s.width(),
            });
        }
        let v = state_vector(s)?;
        m += (&v * v.adjoint()) * Amplitude::new(*w, 0.0);
    }
    DensityMatrix::from_matrix(m)
}
