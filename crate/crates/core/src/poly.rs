//! Polynomials in the `ell x dim W` matrix of variables `x[s,t]`.
//!
//! `A` denotes the polynomial ring generated by the entries of a generic
//! `ell x dim W` matrix, all of degree one; its graded pieces are spanned by
//! monomials ordered graded-lexicographically on the flattened variable index
//! `v = s * dim W + t`. The Cauchy embedding sends a pair of wedge basis
//! elements to the corresponding minor of the generic matrix; these minors
//! are the building blocks of every differential this engine emits.

use std::collections::BTreeMap;
use std::fmt;

use crate::field::Field;
use crate::matrix::DenseMatrix;
use crate::wedge::shuffle_sign;

/// Shape of the variable matrix: `ell` rows, `dim_w` columns.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct VarShape {
    pub ell: usize,
    pub dim_w: usize,
}

impl VarShape {
    pub fn new(ell: usize, dim_w: usize) -> Self {
        VarShape { ell, dim_w }
    }

    pub fn nvars(&self) -> usize {
        self.ell * self.dim_w
    }

    pub fn var_index(&self, s: usize, t: usize) -> usize {
        assert!(s < self.ell && t < self.dim_w, "variable out of shape");
        s * self.dim_w + t
    }
}

/// Exponent vector over the flattened variables; ordered by total degree,
/// ties broken lexicographically.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Monomial {
    exps: Vec<u32>,
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial {
            exps: vec![0; nvars],
        }
    }

    pub fn var(nvars: usize, v: usize) -> Self {
        let mut m = Self::one(nvars);
        m.exps[v] = 1;
        m
    }

    pub fn total_degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.exps.len(), other.exps.len());
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn from_exps(exps: Vec<u32>) -> Self {
        Monomial { exps }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct Poly<F: Field> {
    shape: VarShape,
    terms: BTreeMap<Monomial, F>,
}

impl<F: Field> Poly<F> {
    pub fn zero(shape: VarShape) -> Self {
        Poly {
            shape,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(shape: VarShape, c: F) -> Self {
        let mut p = Self::zero(shape);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(shape.nvars()), c);
        }
        p
    }

    pub fn one(shape: VarShape) -> Self {
        Self::constant(shape, F::one())
    }

    pub fn var(shape: VarShape, s: usize, t: usize) -> Self {
        let mut p = Self::zero(shape);
        p.terms
            .insert(Monomial::var(shape.nvars(), shape.var_index(s, t)), F::one());
        p
    }

    pub fn shape(&self) -> VarShape {
        self.shape
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &F)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, m: Monomial, c: F) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().add(&c);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.shape, other.shape, "variable shape mismatch");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &F) -> Self {
        if k.is_zero() {
            return Self::zero(self.shape);
        }
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.mul(k);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.shape, other.shape, "variable shape mismatch");
        let mut out = Self::zero(self.shape);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca.mul(cb));
            }
        }
        out
    }

    /// Total degree of the highest term, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::total_degree).max()
    }

    /// `Some(d)` when every term has total degree `d` (zero counts as
    /// homogeneous of any degree and returns `None`).
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degrees = self.terms.keys().map(Monomial::total_degree);
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    pub fn is_homogeneous_of(&self, d: u32) -> bool {
        self.terms.keys().all(|m| m.total_degree() == d)
    }

    pub fn evaluate(&self, point: &[F]) -> F {
        assert_eq!(point.len(), self.shape.nvars(), "point has wrong arity");
        let mut acc = F::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (v, &e) in m.exps().iter().enumerate() {
                for _ in 0..e {
                    term = term.mul(&point[v]);
                }
            }
            acc = acc.add(&term);
        }
        acc
    }
}

impl<F: Field> fmt::Display for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (v, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let (s, t) = (v / self.shape.dim_w, v % self.shape.dim_w);
                write!(f, "*x[{s},{t}]")?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

/// Minor of the generic variable matrix: determinant of the submatrix with
/// the given wedge rows (indices into `K^ell`) and columns (indices into
/// `W`). This is the image of a wedge basis pair under the Cauchy embedding
/// of the `k`-th exterior square into degree-`k` polynomials.
pub fn cauchy_embed<F: Field>(shape: VarShape, rows: &[usize], cols: &[usize]) -> Poly<F> {
    assert_eq!(rows.len(), cols.len(), "minor must be square");
    let k = rows.len();
    let mut out = Poly::zero(shape);
    let mut perm: Vec<usize> = (0..k).collect();
    loop {
        let sign = permutation_sign(&perm);
        let mut m = Monomial::one(shape.nvars());
        for (i, &p) in perm.iter().enumerate() {
            m = m.mul(&Monomial::var(
                shape.nvars(),
                shape.var_index(rows[i], cols[p]),
            ));
        }
        let c = if sign > 0 {
            F::one()
        } else {
            F::one().neg()
        };
        out.add_term(m, c);
        if !next_permutation(&mut perm) {
            break;
        }
    }
    out
}

fn permutation_sign(perm: &[usize]) -> i32 {
    let mut inv = 0;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| perm[i] < perm[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).unwrap();
    perm.swap(i, j);
    perm[i + 1..].reverse();
    true
}

/// Dense matrix of polynomials, row-major like [`DenseMatrix`].
#[derive(Clone, PartialEq, Debug)]
pub struct PolyMatrix<F: Field> {
    shape: VarShape,
    rows: usize,
    cols: usize,
    entries: Vec<Poly<F>>,
}

impl<F: Field> PolyMatrix<F> {
    pub fn zero(shape: VarShape, rows: usize, cols: usize) -> Self {
        PolyMatrix {
            shape,
            rows,
            cols,
            entries: vec![Poly::zero(shape); rows * cols],
        }
    }

    pub fn from_fn(
        shape: VarShape,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Poly<F>,
    ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let p = f(i, j);
                assert_eq!(p.shape(), shape, "variable shape mismatch");
                entries.push(p);
            }
        }
        PolyMatrix {
            shape,
            rows,
            cols,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> VarShape {
        self.shape
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly<F> {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Poly<F>) {
        assert_eq!(p.shape(), self.shape, "variable shape mismatch");
        self.entries[i * self.cols + j] = p;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly::is_zero)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in matrix product");
        assert_eq!(self.shape, other.shape, "variable shape mismatch");
        let mut out = Self::zero(self.shape, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let sum = out.get(i, j).add(&a.mul(b));
                    out.set(i, j, sum);
                }
            }
        }
        out
    }

    pub fn evaluate(&self, point: &[F]) -> DenseMatrix<F> {
        DenseMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).evaluate(point))
    }

    /// Symbolic determinant by cofactor expansion with zero pruning; meant
    /// for the small square matrices that two-term complexes produce.
    pub fn det(&self) -> Poly<F> {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let idx: Vec<usize> = (0..self.cols).collect();
        self.det_rec(0, &idx)
    }

    fn det_rec(&self, row: usize, cols: &[usize]) -> Poly<F> {
        if cols.is_empty() {
            return Poly::one(self.shape);
        }
        let mut acc = Poly::zero(self.shape);
        for (pos, &c) in cols.iter().enumerate() {
            let e = self.get(row, c);
            if e.is_zero() {
                continue;
            }
            let rest: Vec<usize> = cols
                .iter()
                .copied()
                .filter(|&x| x != c)
                .collect();
            let minor = self.det_rec(row + 1, &rest);
            let signed = if pos % 2 == 0 { minor } else { minor.neg() };
            acc = acc.add(&e.mul(&signed));
        }
        acc
    }
}

/// Convenience: the full `k x k` generic determinant as a polynomial, used
/// both in tests and to express exterior multiplication after the functor.
pub fn generic_minor_poly<F: Field>(shape: VarShape, rows: &[usize], cols: &[usize]) -> Poly<F> {
    cauchy_embed(shape, rows, cols)
}

/// Sign bookkeeping shared with the wedge module: minors multiply according
/// to the shuffle of their row sets. Exposed for the functoriality tests.
pub fn minor_product_sign(rows_a: &[usize], rows_b: &[usize]) -> Option<i32> {
    shuffle_sign(rows_a, rows_b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rat;

    fn shape22() -> VarShape {
        VarShape::new(2, 2)
    }

    fn x(s: usize, t: usize) -> Poly<Rat> {
        Poly::var(shape22(), s, t)
    }

    #[test]
    fn square_of_a_sum_expands() {
        // (x[0,0] + x[1,1])^2 = x[0,0]^2 + 2 x[0,0] x[1,1] + x[1,1]^2
        let p = x(0, 0).add(&x(1, 1));
        let sq = p.mul(&p);
        assert_eq!(sq.num_terms(), 3);
        let expected = x(0, 0)
            .mul(&x(0, 0))
            .add(&x(0, 0).mul(&x(1, 1)).scale(&Rat::from_int(2)))
            .add(&x(1, 1).mul(&x(1, 1)));
        assert_eq!(sq, expected);
        assert!(sq.is_homogeneous_of(2));
    }

    #[test]
    fn arithmetic_identities() {
        let p = x(0, 1).sub(&x(1, 0));
        assert!(p.sub(&p).is_zero());
        assert!(p.mul(&Poly::zero(shape22())).is_zero());
        assert_eq!(p.mul(&Poly::one(shape22())), p);
        assert_eq!(p.degree(), Some(1));
    }

    #[test]
    #[should_panic(expected = "variable shape mismatch")]
    fn mismatched_shapes_are_rejected() {
        let a = Poly::<Rat>::one(VarShape::new(2, 2));
        let b = Poly::<Rat>::one(VarShape::new(2, 3));
        let _ = a.add(&b);
    }

    #[test]
    fn cauchy_embed_degree_one_is_a_variable() {
        let p: Poly<Rat> = cauchy_embed(shape22(), &[1], &[0]);
        assert_eq!(p, x(1, 0));
    }

    #[test]
    fn cauchy_embed_degree_two_is_the_generic_determinant() {
        // e0 ∧ e1 ⊗ w0* ∧ w1* goes to x[0,0] x[1,1] - x[0,1] x[1,0].
        let p: Poly<Rat> = cauchy_embed(shape22(), &[0, 1], &[0, 1]);
        let expected = x(0, 0).mul(&x(1, 1)).sub(&x(0, 1).mul(&x(1, 0)));
        assert_eq!(p, expected);
    }

    #[test]
    fn symbolic_determinant_matches_cauchy_minor() {
        let m: PolyMatrix<Rat> = PolyMatrix::from_fn(shape22(), 2, 2, |i, j| Poly::var(shape22(), i, j));
        assert_eq!(m.det(), cauchy_embed(shape22(), &[0, 1], &[0, 1]));
    }

    #[test]
    fn evaluation_of_the_generic_determinant() {
        let det: Poly<Rat> = cauchy_embed(shape22(), &[0, 1], &[0, 1]);
        let id = [
            Rat::one(),
            Rat::zero(),
            Rat::zero(),
            Rat::one(),
        ];
        assert_eq!(det.evaluate(&id), Rat::one());
        let swap = [
            Rat::zero(),
            Rat::one(),
            Rat::one(),
            Rat::zero(),
        ];
        assert_eq!(det.evaluate(&swap), Rat::from_int(-1));
    }

    /// The minors of fixed size are linearly independent: the Cauchy
    /// embedding is injective. Checked exhaustively for small shapes.
    #[test]
    fn cauchy_minors_are_linearly_independent() {
        use crate::wedge::subsets;
        use std::collections::BTreeMap;
        for ell in 1..=4usize {
            for n in 1..=4usize {
                let shape = VarShape::new(ell, n);
                for k in 1..=3usize.min(ell).min(n) {
                    let mut monomial_ids: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
                    let mut columns: Vec<BTreeMap<usize, Rat>> = Vec::new();
                    for r in subsets(ell, k) {
                        for c in subsets(n, k) {
                            let p: Poly<Rat> = cauchy_embed(shape, &r, &c);
                            let mut col = BTreeMap::new();
                            for (m, coeff) in p.terms() {
                                let next = monomial_ids.len();
                                let id = *monomial_ids
                                    .entry(m.exps().to_vec())
                                    .or_insert(next);
                                col.insert(id, coeff.clone());
                            }
                            columns.push(col);
                        }
                    }
                    let mat = DenseMatrix::from_fn(
                        monomial_ids.len(),
                        columns.len(),
                        |i, j| columns[j].get(&i).cloned().unwrap_or_else(Rat::zero),
                    );
                    assert_eq!(
                        mat.rank(),
                        columns.len(),
                        "dependent minors at ell={ell} n={n} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn poly_matrix_product_prunes_zeros() {
        let shape = shape22();
        let a = PolyMatrix::from_fn(shape, 1, 2, |_, j| if j == 0 { x(0, 0) } else { Poly::zero(shape) });
        let b = PolyMatrix::from_fn(shape, 2, 1, |i, _| if i == 0 { x(1, 1) } else { x(1, 0) });
        let prod = a.mul(&b);
        assert_eq!(prod.get(0, 0), &x(0, 0).mul(&x(1, 1)));
    }
}
