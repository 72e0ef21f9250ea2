//! Scalar, vector and symmetric-tensor fields on a [`Grid`].

use std::borrow::Cow;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;

#[derive(Debug, Clone)]
enum Repr {
    Real(Vec<f64>),
    Spectral(Vec<Complex64>),
}

/// A real scalar field held either as grid samples or as Fourier coefficients.
#[derive(Debug, Clone)]
pub struct ScalarField {
    grid: Arc<Grid>,
    repr: Repr,
}

impl ScalarField {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        ScalarField {
            grid: Arc::clone(grid),
            repr: Repr::Real(vec![0.0; grid.len()]),
        }
    }

    pub fn constant(grid: &Arc<Grid>, value: f64) -> Self {
        ScalarField {
            grid: Arc::clone(grid),
            repr: Repr::Real(vec![value; grid.len()]),
        }
    }

    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(f64, f64) -> f64) -> Self {
        ScalarField {
            grid: Arc::clone(grid),
            repr: Repr::Real(grid.sample(f)),
        }
    }

    pub fn from_values(grid: &Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        check_len(grid, values.len())?;
        Ok(ScalarField {
            grid: Arc::clone(grid),
            repr: Repr::Real(values),
        })
    }

    /// Wraps Fourier coefficients. The caller is responsible for Hermitian
    /// symmetry; only the real part survives [`ScalarField::to_real`].
    pub fn from_spectrum(grid: &Arc<Grid>, spectrum: Vec<Complex64>) -> Result<Self> {
        check_len(grid, spectrum.len())?;
        Ok(ScalarField {
            grid: Arc::clone(grid),
            repr: Repr::Spectral(spectrum),
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn is_spectral(&self) -> bool {
        matches!(self.repr, Repr::Spectral(_))
    }

    /// Switches to the spectral representation. Non-finite samples are rejected.
    pub fn to_spectral(&self) -> Result<ScalarField> {
        match &self.repr {
            Repr::Spectral(_) => Ok(self.clone()),
            Repr::Real(v) => {
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::NonFinite);
                }
                Ok(ScalarField {
                    grid: Arc::clone(&self.grid),
                    repr: Repr::Spectral(self.grid.forward(v)),
                })
            }
        }
    }

    pub fn to_real(&self) -> ScalarField {
        match &self.repr {
            Repr::Real(_) => self.clone(),
            Repr::Spectral(s) => ScalarField {
                grid: Arc::clone(&self.grid),
                repr: Repr::Real(self.grid.inverse(s)),
            },
        }
    }

    /// Grid samples, synthesized if the field is spectral.
    pub fn values(&self) -> Cow<'_, [f64]> {
        match &self.repr {
            Repr::Real(v) => Cow::Borrowed(v),
            Repr::Spectral(s) => Cow::Owned(self.grid.inverse(s)),
        }
    }

    /// Fourier coefficients, computed if the field is real.
    pub fn spectrum(&self) -> Cow<'_, [Complex64]> {
        match &self.repr {
            Repr::Real(v) => Cow::Owned(self.grid.forward(v)),
            Repr::Spectral(s) => Cow::Borrowed(s),
        }
    }

    pub fn into_values(self) -> Vec<f64> {
        match self.repr {
            Repr::Real(v) => v,
            Repr::Spectral(s) => self.grid.inverse(&s),
        }
    }

    pub fn into_spectrum(self) -> Vec<Complex64> {
        match self.repr {
            Repr::Real(v) => self.grid.forward(&v),
            Repr::Spectral(s) => s,
        }
    }

    pub fn is_finite(&self) -> bool {
        match &self.repr {
            Repr::Real(v) => v.iter().all(|x| x.is_finite()),
            Repr::Spectral(s) => s.iter().all(|c| c.re.is_finite() && c.im.is_finite()),
        }
    }

    pub fn scaled(&self, c: f64) -> ScalarField {
        let repr = match &self.repr {
            Repr::Real(v) => Repr::Real(v.iter().map(|x| x * c).collect()),
            Repr::Spectral(s) => Repr::Spectral(s.iter().map(|x| x * c).collect()),
        };
        ScalarField {
            grid: Arc::clone(&self.grid),
            repr,
        }
    }

    /// Pointwise sum in real space.
    pub fn add(&self, other: &ScalarField) -> Result<ScalarField> {
        same_grid(&self.grid, &other.grid)?;
        let a = self.values();
        let b = other.values();
        let v = a.iter().zip(b.iter()).map(|(x, y)| x + y).collect();
        ScalarField::from_values(&self.grid, v)
    }

    pub fn sub(&self, other: &ScalarField) -> Result<ScalarField> {
        self.add(&other.scaled(-1.0))
    }

    /// Maps each Fourier coefficient, given its flat index.
    pub fn map_spectrum(&self, f: impl Fn(usize, Complex64) -> Complex64) -> ScalarField {
        let s = self.spectrum();
        let out = s.iter().enumerate().map(|(i, &c)| f(i, c)).collect();
        ScalarField {
            grid: Arc::clone(&self.grid),
            repr: Repr::Spectral(out),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values().iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.spectrum()[0].re
    }
}

fn check_len(grid: &Grid, got: usize) -> Result<()> {
    if got != grid.len() {
        return Err(Error::Length {
            expected: grid.len(),
            got,
        });
    }
    Ok(())
}

pub(crate) fn same_grid(a: &Arc<Grid>, b: &Arc<Grid>) -> Result<()> {
    if Arc::ptr_eq(a, b) || **a == **b {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

#[derive(Debug, Clone)]
pub struct VectorField {
    pub x: ScalarField,
    pub y: ScalarField,
}

impl VectorField {
    pub fn new(x: ScalarField, y: ScalarField) -> Result<Self> {
        same_grid(x.grid(), y.grid())?;
        Ok(VectorField { x, y })
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        VectorField {
            x: ScalarField::zeros(grid),
            y: ScalarField::zeros(grid),
        }
    }

    pub fn from_fn(
        grid: &Arc<Grid>,
        fx: impl Fn(f64, f64) -> f64,
        fy: impl Fn(f64, f64) -> f64,
    ) -> Self {
        VectorField {
            x: ScalarField::from_fn(grid, fx),
            y: ScalarField::from_fn(grid, fy),
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.x.grid()
    }

    pub fn to_real(&self) -> VectorField {
        VectorField {
            x: self.x.to_real(),
            y: self.y.to_real(),
        }
    }

    pub fn to_spectral(&self) -> Result<VectorField> {
        Ok(VectorField {
            x: self.x.to_spectral()?,
            y: self.y.to_spectral()?,
        })
    }

    pub fn scaled(&self, c: f64) -> VectorField {
        VectorField {
            x: self.x.scaled(c),
            y: self.y.scaled(c),
        }
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField> {
        Ok(VectorField {
            x: self.x.add(&other.x)?,
            y: self.y.add(&other.y)?,
        })
    }

    pub fn sub(&self, other: &VectorField) -> Result<VectorField> {
        Ok(VectorField {
            x: self.x.sub(&other.x)?,
            y: self.y.sub(&other.y)?,
        })
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> Vec<f64> {
        let (x, y) = (self.x.values(), self.y.values());
        x.iter().zip(y.iter()).map(|(a, b)| a.hypot(*b)).collect()
    }

    /// `max |u|` over the grid.
    pub fn max_abs(&self) -> f64 {
        self.magnitude().into_iter().fold(0.0, f64::max)
    }

    /// Checks `‖div u‖∞ ≤ tol · ‖u‖∞`.
    pub fn is_divergence_free(&self, tol: f64) -> bool {
        let div = crate::spectral::divergence(self).max_abs();
        div <= tol * self.max_abs().max(f64::MIN_POSITIVE)
    }
}

/// Symmetric 2×2 tensor field stored as its three independent components.
#[derive(Debug, Clone)]
pub struct SymTensorField {
    pub xx: ScalarField,
    pub xy: ScalarField,
    pub yy: ScalarField,
}

impl SymTensorField {
    pub fn new(xx: ScalarField, xy: ScalarField, yy: ScalarField) -> Result<Self> {
        same_grid(xx.grid(), xy.grid())?;
        same_grid(xx.grid(), yy.grid())?;
        Ok(SymTensorField { xx, xy, yy })
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        SymTensorField {
            xx: ScalarField::zeros(grid),
            xy: ScalarField::zeros(grid),
            yy: ScalarField::zeros(grid),
        }
    }

    /// The constant tensor `[[a, b], [b, c]]`.
    pub fn constant(grid: &Arc<Grid>, a: f64, b: f64, c: f64) -> Self {
        SymTensorField {
            xx: ScalarField::constant(grid, a),
            xy: ScalarField::constant(grid, b),
            yy: ScalarField::constant(grid, c),
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.xx.grid()
    }

    pub fn components(&self) -> [&ScalarField; 3] {
        [&self.xx, &self.xy, &self.yy]
    }

    pub fn map(&self, f: impl Fn(&ScalarField) -> ScalarField) -> SymTensorField {
        SymTensorField {
            xx: f(&self.xx),
            xy: f(&self.xy),
            yy: f(&self.yy),
        }
    }

    pub fn to_real(&self) -> SymTensorField {
        self.map(ScalarField::to_real)
    }

    pub fn to_spectral(&self) -> Result<SymTensorField> {
        Ok(SymTensorField {
            xx: self.xx.to_spectral()?,
            xy: self.xy.to_spectral()?,
            yy: self.yy.to_spectral()?,
        })
    }

    pub fn scaled(&self, c: f64) -> SymTensorField {
        self.map(|f| f.scaled(c))
    }

    pub fn add(&self, other: &SymTensorField) -> Result<SymTensorField> {
        Ok(SymTensorField {
            xx: self.xx.add(&other.xx)?,
            xy: self.xy.add(&other.xy)?,
            yy: self.yy.add(&other.yy)?,
        })
    }

    pub fn sub(&self, other: &SymTensorField) -> Result<SymTensorField> {
        self.add(&other.scaled(-1.0))
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().all(|c| c.is_finite())
    }

    /// Pointwise largest singular value.
    pub fn operator_norm(&self) -> Vec<f64> {
        let (a, b, c) = (self.xx.values(), self.xy.values(), self.yy.values());
        (0..a.len())
            .map(|i| sym_operator_norm(a[i], b[i], c[i]))
            .collect()
    }

    /// Pointwise Frobenius norm `sqrt(tr(τ τᵀ))`.
    pub fn frobenius_norm(&self) -> Vec<f64> {
        let (a, b, c) = (self.xx.values(), self.xy.values(), self.yy.values());
        (0..a.len())
            .map(|i| (a[i] * a[i] + 2.0 * b[i] * b[i] + c[i] * c[i]).sqrt())
            .collect()
    }

    pub fn trace(&self) -> ScalarField {
        let (a, c) = (self.xx.values(), self.yy.values());
        let v = a.iter().zip(c.iter()).map(|(x, y)| x + y).collect();
        ScalarField {
            grid: Arc::clone(self.grid()),
            repr: Repr::Real(v),
        }
    }
}

/// Largest singular value of the symmetric matrix `[[a, b], [b, c]]`.
pub fn sym_operator_norm(a: f64, b: f64, c: f64) -> f64 {
    let half_trace = 0.5 * (a + c);
    let radius = (0.5 * (a - c)).hypot(b);
    half_trace.abs() + radius
}

/// Eigenvalues `(λ_min, λ_max)` of the symmetric matrix `[[a, b], [b, c]]`.
pub fn sym_eigenvalues(a: f64, b: f64, c: f64) -> (f64, f64) {
    let half_trace = 0.5 * (a + c);
    let radius = (0.5 * (a - c)).hypot(b);
    (half_trace - radius, half_trace + radius)
}
