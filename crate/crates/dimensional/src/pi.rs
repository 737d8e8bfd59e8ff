//! Exact Buckingham Pi machinery.
//!
//! The dimension matrix A holds the exponents of L derived quantities over
//! N fundamentals. An integer basis of ker A yields the Pi-group of
//! dimensionless monomials; dilations of the fundamentals act on derived
//! magnitudes through A; and a dilationally invariant law over the derived
//! quantities reduces to a law over the Pi values alone.
//!
//! All kernel computations are exact: fraction-free Bareiss elimination
//! over big integers, rational back-substitution, LCM clearing and gcd
//! normalization per basis vector. Floating point appears only where
//! magnitudes do.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dimension::{Dimension, DimensionError, DimensionSystem, Rational};
use crate::quantity::{Quantity, QuantityError, UnitFrame};

#[derive(Debug, Error)]
pub enum PiError {
    #[error(transparent)]
    Dimension(#[from] DimensionError),
    #[error(transparent)]
    Quantity(#[from] QuantityError),
    #[error("theory needs at least one derived quantity")]
    NoDerived,
    #[error("derived quantity `{name}` has {got} exponents, expected {expected}")]
    ColumnLength {
        name: String,
        got: usize,
        expected: usize,
    },
    #[error("duplicate derived name `{0}`")]
    DuplicateDerived(String),
    #[error("tuple has {got} quantities, theory has {expected} derived quantities")]
    TupleLength { got: usize, expected: usize },
    #[error("quantity `{name}` must be positive, got {value}")]
    NonPositiveQuantity { name: String, value: f64 },
    #[error("quantity `{name}` has dimension {got}, column requires {expected}")]
    TupleDimension {
        name: String,
        got: String,
        expected: String,
    },
    #[error("dilation must have {expected} positive factors")]
    BadDilation { expected: usize },
    #[error("dilation factor must be positive, got {0}")]
    NonPositiveDilation(f64),
    #[error("pi monomial for basis vector {index} is not dimensionless: {dim}")]
    NotDimensionless { index: usize, dim: String },
    #[error("constraint row has {got} entries, expected {expected}")]
    ConstraintLength { got: usize, expected: usize },
    #[error("invalid theory spec: {0}")]
    Spec(String),
}

/// JSON schema of a theory-spec file.
#[derive(Debug, Serialize, Deserialize)]
pub struct TheorySpec {
    pub fundamentals: Vec<String>,
    pub derived: Vec<DerivedSpec>,
    /// Unit names for the fundamentals, in order, for expressions that
    /// attach unit monomials to literals. Defaults to the fundamental
    /// names themselves.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DerivedSpec {
    pub name: String,
    pub exp: Vec<i64>,
}

/// The N x L integer matrix A: column l gives the exponents of derived
/// quantity l over the fundamentals.
#[derive(Debug, Clone)]
pub struct DimMatrix {
    system: Arc<DimensionSystem>,
    derived_names: Vec<String>,
    // entries[i][l] = exponent of fundamental i in derived quantity l
    entries: Vec<Vec<BigInt>>,
}

impl DimMatrix {
    pub fn new(
        system: &Arc<DimensionSystem>,
        derived: Vec<(String, Vec<i64>)>,
    ) -> Result<Self, PiError> {
        if derived.is_empty() {
            return Err(PiError::NoDerived);
        }
        let n = system.count();
        let l = derived.len();
        let mut entries = vec![vec![BigInt::zero(); l]; n];
        let mut names = Vec::with_capacity(l);
        for (col, (name, exps)) in derived.into_iter().enumerate() {
            if exps.len() != n {
                return Err(PiError::ColumnLength {
                    name,
                    got: exps.len(),
                    expected: n,
                });
            }
            if names.contains(&name) {
                return Err(PiError::DuplicateDerived(name));
            }
            for (row, e) in exps.into_iter().enumerate() {
                entries[row][col] = BigInt::from(e);
            }
            names.push(name);
        }
        Ok(DimMatrix {
            system: Arc::clone(system),
            derived_names: names,
            entries,
        })
    }

    pub fn from_spec(spec: &TheorySpec) -> Result<Self, PiError> {
        let system = DimensionSystem::new(spec.fundamentals.clone())?;
        DimMatrix::new(
            &system,
            spec.derived
                .iter()
                .map(|d| (d.name.clone(), d.exp.clone()))
                .collect(),
        )
    }

    pub fn from_json(text: &str) -> Result<Self, PiError> {
        let spec: TheorySpec =
            serde_json::from_str(text).map_err(|e| PiError::Spec(e.to_string()))?;
        DimMatrix::from_spec(&spec)
    }

    pub fn system(&self) -> &Arc<DimensionSystem> {
        &self.system
    }

    pub fn fundamentals(&self) -> usize {
        self.system.count()
    }

    pub fn derived_count(&self) -> usize {
        self.derived_names.len()
    }

    pub fn derived_names(&self) -> &[String] {
        &self.derived_names
    }

    pub fn entry(&self, row: usize, col: usize) -> &BigInt {
        &self.entries[row][col]
    }

    /// Reconstruct the dimension of derived quantity `col`.
    pub fn column_dimension(&self, col: usize) -> Dimension {
        let exps: Vec<Rational> = self
            .entries
            .iter()
            .map(|row| BigRational::from(row[col].clone()))
            .collect();
        Dimension::from_exponents(&self.system, exps).expect("lengths match by construction")
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.entries
    }
}

/// Integer basis of ker A: the Pi-group exponent vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiBasis {
    vectors: Vec<Vec<BigInt>>,
    rank: usize,
    pivot_cols: Vec<usize>,
    free_cols: Vec<usize>,
}

impl PiBasis {
    pub fn vectors(&self) -> &[Vec<BigInt>] {
        &self.vectors
    }

    pub fn count(&self) -> usize {
        self.vectors.len()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn pivot_cols(&self) -> &[usize] {
        &self.pivot_cols
    }

    pub fn free_cols(&self) -> &[usize] {
        &self.free_cols
    }

    /// Render `Pi_k` as a monomial over the derived names, zero exponents
    /// omitted. Exponent 1 stays explicit so the kernel vector is readable.
    pub fn render_monomial(&self, k: usize, derived_names: &[String]) -> String {
        let parts: Vec<String> = derived_names
            .iter()
            .zip(&self.vectors[k])
            .filter(|(_, e)| !e.is_zero())
            .map(|(n, e)| format!("{n}^{e}"))
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join(" ")
        }
    }
}

/// Exact integer kernel of an integer matrix given as rows.
///
/// Fraction-free Bareiss elimination to echelon form, rational
/// back-substitution per free column, then LCM clearing and gcd division;
/// each vector's entry at its own free column ends up positive, which
/// fixes the sign. Column pivot order is fixed
/// left to right, so the output is deterministic.
pub fn integer_kernel(rows: &[Vec<BigInt>], ncols: usize) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let nrows = rows.len();
    let mut m: Vec<Vec<BigInt>> = rows.to_vec();
    let mut pivot_cols = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..ncols {
        let Some(pivot_row) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pivot_row);
        for i in r + 1..nrows {
            for j in c + 1..ncols {
                let num = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                m[i][j] = num / &prev; // exact by the Bareiss identity
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        pivot_cols.push(c);
        r += 1;
        if r == nrows {
            // remaining columns are all free
            break;
        }
    }
    let rank = pivot_cols.len();
    let free_cols: Vec<usize> = (0..ncols).filter(|c| !pivot_cols.contains(c)).collect();

    let mut basis = Vec::with_capacity(free_cols.len());
    for &f in &free_cols {
        let mut x = vec![BigRational::zero(); ncols];
        x[f] = BigRational::one();
        // Back-substitute pivot rows bottom-up.
        for pr in (0..rank).rev() {
            let pc = pivot_cols[pr];
            let mut acc = BigRational::zero();
            for j in pc + 1..ncols {
                if !m[pr][j].is_zero() && !x[j].is_zero() {
                    acc += BigRational::from(m[pr][j].clone()) * &x[j];
                }
            }
            x[pc] = -acc / BigRational::from(m[pr][pc].clone());
        }
        basis.push(clear_and_normalize(&x));
    }
    (basis, pivot_cols)
}

/// Clear rational denominators by their LCM and divide by the componentwise
/// gcd. The sign is canonical already: the entry at the vector's own free
/// column is the (positive) LCM, and both clearing steps preserve it.
fn clear_and_normalize(x: &[BigRational]) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for r in x {
        if !r.is_zero() {
            lcm = lcm.lcm(r.denom());
        }
    }
    let mut v: Vec<BigInt> = x
        .iter()
        .map(|r| (r * BigRational::from(lcm.clone())).to_integer())
        .collect();
    let mut g = BigInt::zero();
    for e in &v {
        g = g.gcd(e);
    }
    if !g.is_zero() && !g.is_one() {
        for e in &mut v {
            *e = &*e / &g;
        }
    }
    v
}

/// Integer basis of ker A, with exactness asserted.
pub fn kernel_basis(matrix: &DimMatrix) -> PiBasis {
    let ncols = matrix.derived_count();
    let (vectors, pivot_cols) = integer_kernel(matrix.rows(), ncols);
    for v in &vectors {
        for row in matrix.rows() {
            let dot: BigInt = row.iter().zip(v).map(|(a, b)| a * b).sum();
            assert!(dot.is_zero(), "kernel vector fails A*p = 0 exactly");
        }
    }
    let free_cols: Vec<usize> = (0..ncols).filter(|c| !pivot_cols.contains(c)).collect();
    PiBasis {
        vectors,
        rank: pivot_cols.len(),
        pivot_cols,
        free_cols,
    }
}

/// A positive dilation of the fundamentals, one factor per fundamental.
#[derive(Debug, Clone, PartialEq)]
pub struct Dilation {
    factors: Vec<f64>,
}

impl Dilation {
    pub fn new(factors: Vec<f64>) -> Result<Self, PiError> {
        for &f in &factors {
            if !(f > 0.0) || !f.is_finite() {
                return Err(PiError::NonPositiveDilation(f));
            }
        }
        Ok(Dilation { factors })
    }

    pub fn identity(n: usize) -> Self {
        Dilation {
            factors: vec![1.0; n],
        }
    }

    pub fn factors(&self) -> &[f64] {
        &self.factors
    }
}

/// A positive tuple of derived-quantity values matching the columns of a
/// dimension matrix.
#[derive(Debug, Clone)]
pub struct QTuple {
    quantities: Vec<Quantity>,
}

impl QTuple {
    /// Build from magnitudes; dimensions are taken from the matrix columns.
    pub fn from_magnitudes(
        matrix: &DimMatrix,
        frame: &UnitFrame,
        magnitudes: &[f64],
    ) -> Result<Self, PiError> {
        if magnitudes.len() != matrix.derived_count() {
            return Err(PiError::TupleLength {
                got: magnitudes.len(),
                expected: matrix.derived_count(),
            });
        }
        let mut quantities = Vec::with_capacity(magnitudes.len());
        for (l, &mag) in magnitudes.iter().enumerate() {
            if !(mag > 0.0) {
                return Err(PiError::NonPositiveQuantity {
                    name: matrix.derived_names()[l].clone(),
                    value: mag,
                });
            }
            quantities.push(Quantity::new(mag, matrix.column_dimension(l), frame)?);
        }
        Ok(QTuple { quantities })
    }

    /// Wrap existing quantities, checking positivity and column dimensions.
    pub fn new(matrix: &DimMatrix, quantities: Vec<Quantity>) -> Result<Self, PiError> {
        if quantities.len() != matrix.derived_count() {
            return Err(PiError::TupleLength {
                got: quantities.len(),
                expected: matrix.derived_count(),
            });
        }
        for (l, q) in quantities.iter().enumerate() {
            if !q.is_positive() {
                return Err(PiError::NonPositiveQuantity {
                    name: matrix.derived_names()[l].clone(),
                    value: q.magnitude(),
                });
            }
            let expected = matrix.column_dimension(l);
            if q.dim() != &expected {
                return Err(PiError::TupleDimension {
                    name: matrix.derived_names()[l].clone(),
                    got: q.dim().to_string(),
                    expected: expected.to_string(),
                });
            }
        }
        Ok(QTuple { quantities })
    }

    pub fn quantities(&self) -> &[Quantity] {
        &self.quantities
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.quantities.iter().map(|q| q.magnitude()).collect()
    }
}

fn bigint_pow(base: f64, exp: &BigInt) -> f64 {
    match exp.to_i32() {
        Some(e) => base.powi(e),
        None => base.powf(exp.to_f64().unwrap_or(f64::NAN)),
    }
}

/// Evaluate the Pi monomials of a tuple. The dimension of each monomial is
/// checked to be exactly dimensionless before the magnitude is stripped.
pub fn pi_values(matrix: &DimMatrix, basis: &PiBasis, tuple: &QTuple) -> Result<Vec<f64>, PiError> {
    if tuple.quantities.len() != matrix.derived_count() {
        return Err(PiError::TupleLength {
            got: tuple.quantities.len(),
            expected: matrix.derived_count(),
        });
    }
    let mut out = Vec::with_capacity(basis.count());
    for (k, p) in basis.vectors().iter().enumerate() {
        let mut dim = Dimension::dimensionless(matrix.system());
        let mut value = 1.0;
        for (l, exp) in p.iter().enumerate() {
            if exp.is_zero() {
                continue;
            }
            let q = &tuple.quantities[l];
            let e = Rational::from(exp.clone());
            dim = dim.mul(&q.dim().pow(&e))?;
            value *= bigint_pow(q.magnitude(), exp);
        }
        if !dim.is_dimensionless() {
            return Err(PiError::NotDimensionless {
                index: k,
                dim: dim.to_string(),
            });
        }
        out.push(value);
    }
    Ok(out)
}

/// The induced action of a dilation on derived magnitudes:
/// `Lambda_l = prod_i lambda_i^(A[i][l])`.
pub fn dilation_action(matrix: &DimMatrix, dilation: &Dilation) -> Result<Vec<f64>, PiError> {
    if dilation.factors().len() != matrix.fundamentals() {
        return Err(PiError::BadDilation {
            expected: matrix.fundamentals(),
        });
    }
    let mut out = vec![1.0; matrix.derived_count()];
    for (i, lambda) in dilation.factors().iter().enumerate() {
        for (l, value) in out.iter_mut().enumerate() {
            let a = matrix.entry(i, l);
            if !a.is_zero() {
                *value *= bigint_pow(*lambda, a);
            }
        }
    }
    Ok(out)
}

/// Apply a dilation to a tuple componentwise.
pub fn apply_dilation(
    matrix: &DimMatrix,
    tuple: &QTuple,
    dilation: &Dilation,
) -> Result<QTuple, PiError> {
    let lambdas = dilation_action(matrix, dilation)?;
    let mags: Vec<f64> = tuple
        .magnitudes()
        .iter()
        .zip(&lambdas)
        .map(|(m, l)| m * l)
        .collect();
    let frame = tuple.quantities[0].frame().clone();
    QTuple::from_magnitudes(matrix, &frame, &mags)
}

/// Test whether two positive tuples lie in the same dilation orbit: the
/// log-ratio vector must be orthogonal to every kernel basis vector
/// (equivalently, lie in im(A^T)).
pub fn are_dilation_equivalent(
    matrix: &DimMatrix,
    basis: &PiBasis,
    a: &QTuple,
    b: &QTuple,
    tol: f64,
) -> Result<bool, PiError> {
    if a.quantities.len() != matrix.derived_count() || b.quantities.len() != matrix.derived_count()
    {
        return Err(PiError::TupleLength {
            got: a.quantities.len().min(b.quantities.len()),
            expected: matrix.derived_count(),
        });
    }
    let y: Vec<f64> = a
        .magnitudes()
        .iter()
        .zip(b.magnitudes())
        .map(|(qa, qb)| (qb / qa).ln())
        .collect();
    for p in basis.vectors() {
        let mut dot = 0.0;
        let mut scale = 0.0;
        for (yl, pl) in y.iter().zip(p) {
            let pf = pl.to_f64().unwrap_or(f64::NAN);
            dot += yl * pf;
            scale += (yl * pf).abs();
        }
        if dot.abs() > tol * scale.max(1.0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Options for the sampled invariance verification in [`reduce_law`].
#[derive(Debug, Clone)]
pub struct ReduceOptions {
    pub samples: usize,
    pub seed: u64,
    /// Relative tolerance on residual agreement between a tuple and its
    /// dilated image.
    pub tol: f64,
    /// Log-uniform magnitude range for sampled tuples.
    pub magnitude_range: (f64, f64),
    /// Log-uniform range for sampled dilation factors.
    pub dilation_range: (f64, f64),
}

impl Default for ReduceOptions {
    fn default() -> Self {
        ReduceOptions {
            samples: 1000,
            seed: 0,
            tol: 1e-9,
            magnitude_range: (1e-3, 1e3),
            dilation_range: (1e-2, 1e2),
        }
    }
}

/// Outcome of the sampled dilation-invariance verification.
#[derive(Debug, Clone, Serialize)]
pub struct InvarianceReport {
    pub samples: usize,
    pub violations: usize,
    /// Sampling can falsify invariance but never certify it; this note is
    /// carried into every report.
    pub note: &'static str,
}

impl InvarianceReport {
    pub fn violation_fraction(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.violations as f64 / self.samples as f64
        }
    }
}

/// A law reduced to the Pi values: `eval` gives the residual of the
/// original law at a canonical representative tuple with the requested Pi
/// values.
pub struct ReducedLaw<'a> {
    matrix: &'a DimMatrix,
    basis: &'a PiBasis,
    law: Box<dyn Fn(&[f64]) -> f64 + 'a>,
    pub report: InvarianceReport,
}

impl<'a> ReducedLaw<'a> {
    /// Canonical representative tuple for given Pi values: pivot-column
    /// magnitudes are fixed to 1 and each free-column magnitude solves its
    /// own Pi monomial. Valid for any section by the reduction theorem;
    /// this one is deterministic.
    pub fn representative(&self, pi: &[f64]) -> Vec<f64> {
        assert_eq!(pi.len(), self.basis.count(), "one value per Pi monomial");
        let mut mags = vec![1.0; self.matrix.derived_count()];
        for (k, &f) in self.basis.free_cols().iter().enumerate() {
            let d = self.basis.vectors()[k][f]
                .to_f64()
                .expect("free-column entry fits in f64");
            mags[f] = pi[k].powf(1.0 / d);
        }
        mags
    }

    /// Residual of the reduced law F at the given Pi values.
    pub fn eval(&self, pi: &[f64]) -> f64 {
        (self.law)(&self.representative(pi))
    }
}

/// Reduce a law over derived magnitudes to a law over Pi values, verifying
/// dilational invariance by sampling.
///
/// `law` maps the L derived magnitudes to a residual; the law holds where
/// the residual vanishes. It must be a pure function: samples may be
/// evaluated in any order. A sample counts as a violation when the residual
/// changes under a random dilation beyond `opts.tol` relative.
pub fn reduce_law<'a, F>(
    matrix: &'a DimMatrix,
    basis: &'a PiBasis,
    law: F,
    opts: &ReduceOptions,
) -> Result<ReducedLaw<'a>, PiError>
where
    F: Fn(&[f64]) -> f64 + 'a,
{
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let l = matrix.derived_count();
    let n = matrix.fundamentals();
    let (mlo, mhi) = (opts.magnitude_range.0.ln(), opts.magnitude_range.1.ln());
    let (dlo, dhi) = (opts.dilation_range.0.ln(), opts.dilation_range.1.ln());
    let mut violations = 0;
    for _ in 0..opts.samples {
        let mags: Vec<f64> = (0..l).map(|_| rng.gen_range(mlo..mhi).exp()).collect();
        let factors: Vec<f64> = (0..n).map(|_| rng.gen_range(dlo..dhi).exp()).collect();
        let dilation = Dilation::new(factors)?;
        let lambdas = dilation_action(matrix, &dilation)?;
        let dilated: Vec<f64> = mags.iter().zip(&lambdas).map(|(m, lam)| m * lam).collect();
        let r0 = law(&mags);
        let r1 = law(&dilated);
        if (r0 - r1).abs() > opts.tol * r0.abs().max(1.0) {
            violations += 1;
        }
    }
    Ok(ReducedLaw {
        matrix,
        basis,
        law: Box::new(law),
        report: InvarianceReport {
            samples: opts.samples,
            violations,
            note: "sampled verification falsifies but cannot certify invariance",
        },
    })
}

/// Integer basis of the log-dilation lattice `{x : C x = 0}` for constraint
/// rows over the fundamentals. Exponentiating a basis vector componentwise
/// gives a one-parameter dilation subgroup leaving every constrained
/// combination invariant.
pub fn symmetry_subgroup(
    constraint_rows: &[Vec<BigInt>],
    n_fundamentals: usize,
) -> Result<Vec<Vec<BigInt>>, PiError> {
    for row in constraint_rows {
        if row.len() != n_fundamentals {
            return Err(PiError::ConstraintLength {
                got: row.len(),
                expected: n_fundamentals,
            });
        }
    }
    if constraint_rows.is_empty() {
        // full lattice: standard basis
        return Ok((0..n_fundamentals)
            .map(|i| {
                let mut v = vec![BigInt::zero(); n_fundamentals];
                v[i] = BigInt::one();
                v
            })
            .collect());
    }
    let (basis, _) = integer_kernel(constraint_rows, n_fundamentals);
    Ok(basis)
}
