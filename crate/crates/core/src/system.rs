use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::vector::CVector;

type EvalFn = dyn Fn(&[Complex64]) -> Result<Vec<Complex64>> + Send + Sync;

/// A square nonlinear system `f: Cⁿ → Cⁿ` whose zeros are sought.
///
/// The evaluation map must be deterministic and safe to call from several
/// threads at once; sweeps and batches evaluate it concurrently.
#[derive(Clone)]
pub struct NonlinearSystem {
    name: String,
    dimension: usize,
    eval: Arc<EvalFn>,
}

impl NonlinearSystem {
    pub fn new<F>(name: impl Into<String>, dimension: usize, eval: F) -> Self
    where
        F: Fn(&[Complex64]) -> Result<Vec<Complex64>> + Send + Sync + 'static,
    {
        assert!(dimension >= 1, "system dimension must be positive");
        NonlinearSystem {
            name: name.into(),
            dimension,
            eval: Arc::new(eval),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn check_dimension(&self, x: &[Complex64]) -> Result<()> {
        if x.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn eval(&self, x: &CVector) -> Result<CVector> {
        self.check_dimension(x)?;
        let out = (self.eval)(x)?;
        if out.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: out.len(),
            });
        }
        Ok(CVector::new(out))
    }

    /// `‖f(x)‖₂`.
    pub fn residual_norm(&self, x: &CVector) -> Result<f64> {
        Ok(self.eval(x)?.norm2())
    }

    /// The same system with every residual component negated. Zeros and
    /// residual norms are unchanged; only the orientation seen by the
    /// iteration differs.
    pub fn negated(&self) -> NonlinearSystem {
        let inner = Arc::clone(&self.eval);
        NonlinearSystem {
            name: self.name.clone(),
            dimension: self.dimension,
            eval: Arc::new(move |x| Ok(inner(x)?.into_iter().map(|v| -v).collect())),
        }
    }
}

impl fmt::Debug for NonlinearSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NonlinearSystem")
            .field("name", &self.name)
            .field("dimension", &self.dimension)
            .finish_non_exhaustive()
    }
}
