//! Resultants of pairs of binary forms, both classically (Sylvester) and
//! through the level-2 complex of the degree-`d` rational normal curve.
//!
//! A binary form of degree `d` is stored as its coefficient vector
//! `c_0 ..= c_d` against the monomials `x^t y^(d-t)`. The variable `x[s,t]`
//! of the generic level-2 shape stands for `c_t` of the `s`-th form, so a
//! concrete pair `(f, g)` specializes a symbolic matrix through the point
//! vector of [`pair_point`].
//!
//! For the rational normal curve of degree `d` the level-2 complex has
//! exactly two nonzero terms of equal rank `2d - 1`, and its determinant is
//! a unit multiple of the Sylvester resultant. [`resultant_operator`] pins
//! the unit at the witness pair `(x^d, y^d)` and stores the normalized
//! determinant, which then vanishes exactly on pairs with a common root.

use rayon::prelude::*;

use crate::algebra::{SheafKind, SheafSpec};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::DenseMatrix;
use crate::poly::{Poly, PolyMatrix, VarShape};
use crate::weyman::{det_two_term, weyman_complex};

/// Sylvester matrix of two binary forms given by coefficient vectors, of
/// size `deg f + deg g`: first `deg g` rows are shifts of `f`, the rest
/// shifts of `g`, with `M[i][j] = c_(j-i)`.
pub fn sylvester_matrix<F: Field>(f: &[F], g: &[F]) -> DenseMatrix<F> {
    assert!(!f.is_empty() && !g.is_empty(), "forms need coefficients");
    let df = f.len() - 1;
    let dg = g.len() - 1;
    let size = df + dg;
    DenseMatrix::from_fn(size, size, |i, j| {
        let (form, shift) = if i < dg { (f, i) } else { (g, i - dg) };
        if j >= shift && j - shift < form.len() {
            form[j - shift].clone()
        } else {
            F::zero()
        }
    })
}

pub fn sylvester_resultant<F: Field>(f: &[F], g: &[F]) -> F {
    sylvester_matrix(f, g).det().expect("matrix is square")
}

/// Symbolic Sylvester matrix for a pair of degree-`d` forms over the
/// level-2 shape with `dim W = d + 1`, with entry `x[s, j-i]`.
pub fn sylvester_matrix_poly<F: Field>(d: usize) -> PolyMatrix<F> {
    let shape = VarShape::new(2, d + 1);
    PolyMatrix::from_fn(shape, 2 * d, 2 * d, |i, j| {
        let (s, shift) = if i < d { (0, i) } else { (1, i - d) };
        if j >= shift && j - shift <= d {
            Poly::var(shape, s, j - shift)
        } else {
            Poly::zero(shape)
        }
    })
}

/// Evaluation point sending `x[0,t]` to `c_t(f)` and `x[1,t]` to `c_t(g)`.
pub fn pair_point<F: Field>(f: &[F], g: &[F]) -> Vec<F> {
    assert_eq!(f.len(), g.len(), "forms must have equal degree");
    let shape = VarShape::new(2, f.len());
    let mut vals = vec![F::zero(); shape.nvars()];
    for (t, c) in f.iter().enumerate() {
        vals[shape.var_index(0, t)] = c.clone();
    }
    for (t, c) in g.iter().enumerate() {
        vals[shape.var_index(1, t)] = c.clone();
    }
    vals
}

/// The normalized determinant of the two-term level-2 complex of the
/// degree-`d` rational normal curve: a polynomial of degree `2d` in the
/// `2(d + 1)` generic coefficients equal to the Sylvester resultant.
#[derive(Clone, Debug)]
pub struct ResultantOperator<F: Field> {
    pub d: usize,
    pub size: usize,
    /// The square polynomial matrix whose determinant is taken.
    pub matrix: PolyMatrix<F>,
    /// Unit relating the raw determinant to the resultant.
    pub unit: F,
    /// `det(matrix) / unit`, equal to the Sylvester resultant.
    pub resultant: Poly<F>,
}

pub fn resultant_operator<F: Field>(d: usize) -> Result<ResultantOperator<F>> {
    let spec = SheafSpec::new(SheafKind::Veronese { d, twist: 0 }, d + 1);
    let complex = weyman_complex::<F>(&spec, 2)?;
    let two = det_two_term(&complex)?;
    if two.size != 2 * d - 1 || two.degree != 2 * d as u32 {
        return Err(Error::Invariant(format!(
            "curve complex has size {} and degree {}, expected {} and {}",
            two.size,
            two.degree,
            2 * d - 1,
            2 * d
        )));
    }
    let (wf, wg) = witness_pair::<F>(d);
    let det_w = two.det.evaluate(&pair_point(&wf, &wg));
    let det_s = sylvester_resultant(&wf, &wg);
    let unit = match det_s.inv().and_then(|i| {
        if det_w.is_zero() {
            None
        } else {
            Some(det_w.mul(&i))
        }
    }) {
        Some(u) => u,
        None => {
            return Err(Error::Invariant(
                "witness pair fails to pin the determinant unit".into(),
            ))
        }
    };
    let inv = unit.inv().expect("unit is invertible");
    let resultant = two.det.scale(&inv);
    Ok(ResultantOperator {
        d,
        size: two.size,
        matrix: complex.maps[&two.position].mat.clone(),
        unit,
        resultant,
    })
}

fn witness_pair<F: Field>(d: usize) -> (Vec<F>, Vec<F>) {
    let mut f = vec![F::zero(); d + 1];
    let mut g = vec![F::zero(); d + 1];
    f[d] = F::one();
    g[0] = F::one();
    (f, g)
}

impl<F: Field> ResultantOperator<F> {
    /// Resultant of a concrete pair of degree-`d` forms.
    pub fn eval(&self, f: &[F], g: &[F]) -> F {
        assert_eq!(f.len(), self.d + 1, "degree mismatch");
        self.resultant.evaluate(&pair_point(f, g))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProbeReport {
    pub trials: usize,
    pub planted: usize,
    pub disagreements: usize,
}

/// Compare the complex determinant with the Sylvester resultant on random
/// coefficient pairs; about half the trials plant a common linear factor.
/// Vanishing must agree exactly, so any disagreement is a defect.
pub fn resultant_vanishing_probe<F: Field + Send + Sync>(
    d: usize,
    trials: usize,
    seed: u64,
) -> Result<ProbeReport> {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    let op = resultant_operator::<F>(d)?;
    let (planted, disagreements) = (0..trials)
        .into_par_iter()
        .map(|idx| {
            let mut rng = ChaCha8Rng::seed_from_u64(
                seed.wrapping_add((idx as u64).wrapping_mul(0x9E3779B97F4A7C15)),
            );
            fn coeffs<F: Field>(rng: &mut ChaCha8Rng, len: usize) -> Vec<F> {
                (0..len).map(|_| F::from_i64(rng.gen_range(-9i64..=9))).collect()
            }
            let plant = rng.gen_bool(0.5);
            let (f, g) = if plant {
                let mut a = F::zero();
                let mut b = F::zero();
                while a.is_zero() && b.is_zero() {
                    a = F::from_i64(rng.gen_range(-9i64..=9));
                    b = F::from_i64(rng.gen_range(-9i64..=9));
                }
                let u: Vec<F> = coeffs(&mut rng, d);
                let v: Vec<F> = coeffs(&mut rng, d);
                (multiply_linear(&a, &b, &u), multiply_linear(&a, &b, &v))
            } else {
                (coeffs(&mut rng, d + 1), coeffs(&mut rng, d + 1))
            };
            let rw = op.eval(&f, &g);
            let rs = sylvester_resultant(&f, &g);
            let disagree = rw.is_zero() != rs.is_zero();
            (plant as usize, disagree as usize)
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
    Ok(ProbeReport {
        trials,
        planted,
        disagreements,
    })
}

/// Coefficients of `(a x + b y) * h` for `h` of one degree lower.
fn multiply_linear<F: Field>(a: &F, b: &F, h: &[F]) -> Vec<F> {
    let mut out = vec![F::zero(); h.len() + 1];
    for (t, u) in h.iter().enumerate() {
        out[t + 1] = out[t + 1].add(&a.mul(u));
        out[t] = out[t].add(&b.mul(u));
    }
    out
}
