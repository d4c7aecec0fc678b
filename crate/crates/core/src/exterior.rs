//! Degree-zero maps between finite sums of twisted duals of the exterior
//! algebra.
//!
//! Write `E` for the exterior algebra on the dual of `W` (generators in
//! degree `-1`) and `D = Hom(E, K)` for its dual, so `D(j)` is the rank-one
//! free module whose degree-`d` piece is the `(d+j)`-th wedge power of `W`.
//! A degree-zero map `D(a) -> D(b)` is uniquely a form of degree `a - b` in
//! the dual wedge algebra acting by contraction; a map between direct sums
//! with multiplicities is a block matrix of such forms. Composition wedges
//! symbols with the later map on the left, which is the convention under
//! which the minor-substitution functor below is strictly functorial.
//!
//! Contraction is normalized by `w_L* . w_I = sign(I \ L, L) w_{I \ L}` for
//! `L` contained in `I` (shuffle sign of the concatenated word), zero
//! otherwise.

use std::collections::BTreeMap;

use crate::field::Field;
use crate::matrix::DenseMatrix;
use crate::wedge::{binomial, complement, shuffle_sign, subset_rank, subsets};

/// Element of a wedge power of the dual space, stored densely over the
/// lexicographic subset basis.
#[derive(Clone, PartialEq, Debug)]
pub struct ExtForm<F: Field> {
    pub degree: usize,
    pub dim_w: usize,
    pub coeffs: Vec<F>,
}

impl<F: Field> ExtForm<F> {
    pub fn zero(dim_w: usize, degree: usize) -> Self {
        ExtForm {
            degree,
            dim_w,
            coeffs: vec![F::zero(); binomial(dim_w, degree) as usize],
        }
    }

    /// The basis form indexed by an increasing list of dual indices.
    pub fn basis(dim_w: usize, set: &[usize]) -> Self {
        let mut f = Self::zero(dim_w, set.len());
        if set.len() <= dim_w {
            f.coeffs[subset_rank(dim_w, set)] = F::one();
        }
        f
    }

    pub fn scalar(dim_w: usize, c: F) -> Self {
        let mut f = Self::zero(dim_w, 0);
        f.coeffs[0] = c;
        f
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(F::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.dim_w, self.degree), (other.dim_w, other.degree));
        ExtForm {
            degree: self.degree,
            dim_w: self.dim_w,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn scale(&self, k: &F) -> Self {
        ExtForm {
            degree: self.degree,
            dim_w: self.dim_w,
            coeffs: self.coeffs.iter().map(|c| c.mul(k)).collect(),
        }
    }

    pub fn coeff(&self, set: &[usize]) -> &F {
        &self.coeffs[subset_rank(self.dim_w, set)]
    }

    pub fn set_coeff(&mut self, set: &[usize], c: F) {
        self.coeffs[subset_rank(self.dim_w, set)] = c;
    }

    /// Wedge product; degrees add, and anything past the dimension of `W`
    /// collapses to the zero form.
    pub fn wedge(&self, other: &Self) -> Self {
        assert_eq!(self.dim_w, other.dim_w);
        let deg = self.degree + other.degree;
        let mut out = Self::zero(self.dim_w, deg);
        if deg > self.dim_w {
            return out;
        }
        let left = subsets(self.dim_w, self.degree);
        let right = subsets(self.dim_w, other.degree);
        for (i, a) in left.iter().enumerate() {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for (j, b) in right.iter().enumerate() {
                if other.coeffs[j].is_zero() {
                    continue;
                }
                let Some(sign) = shuffle_sign(a, b) else {
                    continue;
                };
                let mut merged: Vec<usize> = a.iter().chain(b).copied().collect();
                merged.sort_unstable();
                let rank = subset_rank(self.dim_w, &merged);
                let term = self.coeffs[i].mul(&other.coeffs[j]);
                let term = if sign > 0 { term } else { term.neg() };
                out.coeffs[rank] = out.coeffs[rank].add(&term);
            }
        }
        out
    }
}

/// The unique dual form whose contraction against the volume element of `W`
/// equals the given wedge vector (coefficients over the lexicographic basis
/// of the `m`-th wedge power).
pub fn volume_preimage<F: Field>(component: &[F], m: usize, dim_w: usize) -> ExtForm<F> {
    assert_eq!(component.len(), binomial(dim_w, m) as usize);
    let mut out = ExtForm::zero(dim_w, dim_w - m);
    for (r, set) in subsets(dim_w, m).iter().enumerate() {
        if component[r].is_zero() {
            continue;
        }
        let comp = complement(dim_w, set);
        let sign = shuffle_sign(set, &comp).expect("disjoint by construction");
        let c = if sign > 0 {
            component[r].clone()
        } else {
            component[r].neg()
        };
        out.set_coeff(&comp, c);
    }
    out
}

/// One twisted dual summand with multiplicity.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Summand {
    pub twist: i64,
    pub mult: usize,
}

/// A finite direct sum of twisted duals: twists strictly increasing,
/// multiplicities positive.
pub type Term = Vec<Summand>;

/// Merge duplicate twists, drop zero multiplicities, sort by twist.
pub fn normalize_term(summands: Vec<Summand>) -> Term {
    let mut by_twist: BTreeMap<i64, usize> = BTreeMap::new();
    for s in summands {
        if s.mult > 0 {
            *by_twist.entry(s.twist).or_insert(0) += s.mult;
        }
    }
    by_twist
        .into_iter()
        .map(|(twist, mult)| Summand { twist, mult })
        .collect()
}

pub fn term_total_mult(term: &Term) -> usize {
    term.iter().map(|s| s.mult).sum()
}

/// Dimension of the degree-`d` piece of a term.
pub fn term_dim_at(term: &Term, dim_w: usize, d: i64) -> usize {
    term.iter()
        .map(|s| {
            let w = d + s.twist;
            if (0..=dim_w as i64).contains(&w) {
                s.mult * binomial(dim_w, w as usize) as usize
            } else {
                0
            }
        })
        .sum()
}

/// Basis layout of a term piece: per summand, multiplicity-major, then the
/// lexicographic wedge basis.
pub struct TermLayout {
    pub dim_w: usize,
    pub degree: i64,
    /// Per summand: (wedge degree, basis subsets, column offset).
    pub parts: Vec<Option<(usize, Vec<Vec<usize>>, usize)>>,
    pub dim: usize,
}

impl TermLayout {
    pub fn new(term: &Term, dim_w: usize, degree: i64) -> Self {
        let mut parts = Vec::with_capacity(term.len());
        let mut offset = 0;
        for s in term {
            let w = degree + s.twist;
            if (0..=dim_w as i64).contains(&w) {
                let sets = subsets(dim_w, w as usize);
                let here = offset;
                offset += s.mult * sets.len();
                parts.push(Some((w as usize, sets, here)));
            } else {
                parts.push(None);
            }
        }
        TermLayout {
            dim_w,
            degree,
            parts,
            dim: offset,
        }
    }

    /// Flat index of `(summand, copy, wedge basis rank)`.
    pub fn index(&self, summand: usize, copy: usize, set_rank: usize) -> usize {
        let (_, sets, offset) = self.parts[summand]
            .as_ref()
            .expect("summand vanishes in this degree");
        offset + copy * sets.len() + set_rank
    }
}

/// Block matrix of dual wedge forms representing a degree-zero map between
/// two terms. Block `(ti, si)` has form degree
/// `source[si].twist - target[ti].twist`; blocks that would need negative
/// degree cannot be nonzero and are simply absent.
#[derive(Clone, PartialEq, Debug)]
pub struct ExteriorMap<F: Field> {
    pub dim_w: usize,
    pub source: Term,
    pub target: Term,
    blocks: BTreeMap<(usize, usize), ExtBlock<F>>,
}

/// Dense block: `rows` target copies by `cols` source copies of forms, all
/// of one degree.
#[derive(Clone, PartialEq, Debug)]
pub struct ExtBlock<F: Field> {
    pub rows: usize,
    pub cols: usize,
    pub degree: usize,
    pub entries: Vec<ExtForm<F>>,
}

impl<F: Field> ExtBlock<F> {
    pub fn zero(dim_w: usize, rows: usize, cols: usize, degree: usize) -> Self {
        ExtBlock {
            rows,
            cols,
            degree,
            entries: vec![ExtForm::zero(dim_w, degree); rows * cols],
        }
    }

    pub fn get(&self, r: usize, c: usize) -> &ExtForm<F> {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, f: ExtForm<F>) {
        assert_eq!(f.degree, self.degree, "block degree mismatch");
        self.entries[r * self.cols + c] = f;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(ExtForm::is_zero)
    }
}

impl<F: Field> ExteriorMap<F> {
    pub fn new(dim_w: usize, source: Term, target: Term) -> Self {
        ExteriorMap {
            dim_w,
            source,
            target,
            blocks: BTreeMap::new(),
        }
    }

    pub fn set_block(&mut self, ti: usize, si: usize, block: ExtBlock<F>) {
        let a = self.source[si].twist;
        let b = self.target[ti].twist;
        assert!(a >= b, "inadmissible block: source twist below target twist");
        assert_eq!(block.degree as i64, a - b, "block degree mismatch");
        assert_eq!(block.rows, self.target[ti].mult);
        assert_eq!(block.cols, self.source[si].mult);
        if block.is_zero() {
            self.blocks.remove(&(ti, si));
        } else {
            self.blocks.insert((ti, si), block);
        }
    }

    pub fn block(&self, ti: usize, si: usize) -> Option<&ExtBlock<F>> {
        self.blocks.get(&(ti, si))
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&(usize, usize), &ExtBlock<F>)> {
        self.blocks.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.values().all(ExtBlock::is_zero)
    }

    /// `self . first` (apply `first`, then `self`); symbols wedge with the
    /// later map on the left.
    pub fn compose(&self, first: &ExteriorMap<F>) -> ExteriorMap<F> {
        assert_eq!(self.source, first.target, "composition shape mismatch");
        let mut out = ExteriorMap::new(self.dim_w, first.source.clone(), self.target.clone());
        for (&(ti, mi), late) in &self.blocks {
            for (&(mj, si), early) in &first.blocks {
                if mi != mj {
                    continue;
                }
                let deg = late.degree + early.degree;
                let key = (ti, si);
                let mut acc = match out.blocks.remove(&key) {
                    Some(b) => b,
                    None => ExtBlock::zero(self.dim_w, late.rows, early.cols, deg),
                };
                for r in 0..late.rows {
                    for c in 0..early.cols {
                        let mut sum = acc.get(r, c).clone();
                        for k in 0..late.cols {
                            let l = late.get(r, k);
                            let e = early.get(k, c);
                            if l.is_zero() || e.is_zero() {
                                continue;
                            }
                            sum = sum.add(&l.wedge(e));
                        }
                        acc.set(r, c, sum);
                    }
                }
                if acc.is_zero() {
                    out.blocks.remove(&key);
                } else {
                    out.blocks.insert(key, acc);
                }
            }
        }
        out
    }

    /// The plain matrix of the map in one internal degree, with respect to
    /// the [`TermLayout`] bases of source and target.
    pub fn matrix_at_degree(&self, degree: i64) -> DenseMatrix<F> {
        let src = TermLayout::new(&self.source, self.dim_w, degree);
        let tgt = TermLayout::new(&self.target, self.dim_w, degree);
        let mut m: DenseMatrix<F> = DenseMatrix::zero(tgt.dim, src.dim);
        for (&(ti, si), block) in &self.blocks {
            let Some((src_w, src_sets, _)) = src.parts[si].as_ref() else {
                continue;
            };
            let Some((tgt_w, tgt_sets, _)) = tgt.parts[ti].as_ref() else {
                continue;
            };
            debug_assert_eq!(src_w - block.degree, *tgt_w);
            for (ir, iset) in src_sets.iter().enumerate() {
                for (jr, jset) in tgt_sets.iter().enumerate() {
                    if !jset.iter().all(|v| iset.contains(v)) {
                        continue;
                    }
                    let l: Vec<usize> = iset
                        .iter()
                        .copied()
                        .filter(|v| !jset.contains(v))
                        .collect();
                    let sign = shuffle_sign(jset, &l).expect("disjoint by construction");
                    for hc in 0..block.cols {
                        for hr in 0..block.rows {
                            let c = block.get(hr, hc).coeff(&l);
                            if c.is_zero() {
                                continue;
                            }
                            let v = if sign > 0 { c.clone() } else { c.neg() };
                            let row = tgt.index(ti, hr, jr);
                            let col = src.index(si, hc, ir);
                            let cur = m.get(row, col).add(&v);
                            m.set(row, col, cur);
                        }
                    }
                }
            }
        }
        m
    }

    /// Largest constant-block violation, if any: a nonzero block between
    /// equal twists means the map is not minimal.
    pub fn is_minimal(&self) -> bool {
        self.blocks
            .iter()
            .all(|(&(ti, si), b)| self.source[si].twist > self.target[ti].twist || b.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rat;

    fn form(dim_w: usize, terms: &[(&[usize], i64)]) -> ExtForm<Rat> {
        let deg = terms[0].0.len();
        let mut f = ExtForm::zero(dim_w, deg);
        for (set, c) in terms {
            f.set_coeff(set, Rat::from_int(*c));
        }
        f
    }

    #[test]
    fn wedge_is_anticommutative_and_square_zero() {
        let a = form(3, &[(&[0], 1)]);
        let b = form(3, &[(&[1], 1)]);
        let ab = a.wedge(&b);
        let ba = b.wedge(&a);
        assert_eq!(ab, form(3, &[(&[0, 1], 1)]));
        assert_eq!(ba, form(3, &[(&[0, 1], -1)]));
        assert!(a.wedge(&a).is_zero());
    }

    #[test]
    fn wedge_past_the_dimension_vanishes() {
        let a = form(2, &[(&[0, 1], 1)]);
        let b = form(2, &[(&[0], 1)]);
        assert!(a.wedge(&b).is_zero());
    }

    #[test]
    fn volume_preimage_reproduces_components() {
        // In dim 3: hitting w01 needs +w2*, w02 needs -w1*, w12 needs +w0*.
        let cases: Vec<(Vec<usize>, Vec<usize>, i64)> = vec![
            (vec![0, 1], vec![2], 1),
            (vec![0, 2], vec![1], -1),
            (vec![1, 2], vec![0], 1),
        ];
        for (target, dual, sign) in cases {
            let mut comp = vec![Rat::zero(); 3];
            comp[subset_rank(3, &target)] = Rat::one();
            let lam = volume_preimage(&comp, 2, 3);
            assert_eq!(lam, form(3, &[(&dual, sign)]));
        }
        // Hitting the scalar 1 in degree zero needs the full volume form.
        let lam = volume_preimage(&[Rat::one()], 0, 3);
        assert_eq!(lam, form(3, &[(&[0, 1, 2], 1)]));
    }

    #[test]
    fn contraction_action_signs() {
        // The 1x1 map D(3) -> D(0) with symbol w0*∧w1*∧w2* sends the volume
        // element (degree 0 of the source) to 1.
        let source = vec![Summand { twist: 3, mult: 1 }];
        let target = vec![Summand { twist: 0, mult: 1 }];
        let mut map = ExteriorMap::new(3, source, target);
        let mut block = ExtBlock::zero(3, 1, 1, 3);
        block.set(0, 0, form(3, &[(&[0, 1, 2], 1)]));
        map.set_block(0, 0, block);
        let m0 = map.matrix_at_degree(0);
        assert_eq!(m0.rows(), 1);
        assert_eq!(m0.cols(), 1);
        assert_eq!(m0.get(0, 0), &Rat::one());
        // In degree -1 the target vanishes and the matrix is 0 x 3.
        let m1 = map.matrix_at_degree(-1);
        assert_eq!((m1.rows(), m1.cols()), (0, 3));
    }

    #[test]
    fn contraction_matches_iterated_single_contractions() {
        // w0*∧w2* acting on w012 equals w0* . (w2* . w012) = -w1.
        let source = vec![Summand { twist: 0, mult: 1 }];
        let target = vec![Summand { twist: -2, mult: 1 }];
        let mut map = ExteriorMap::new(3, source.clone(), target);
        let mut block = ExtBlock::zero(3, 1, 1, 2);
        block.set(0, 0, form(3, &[(&[0, 2], 1)]));
        map.set_block(0, 0, block);
        let m = map.matrix_at_degree(3);
        // Source degree 3 is spanned by w012; target degree 3 is wedge power
        // 1, basis (w0, w1, w2).
        assert_eq!((m.rows(), m.cols()), (3, 1));
        assert_eq!(m.get(0, 0), &Rat::zero());
        assert_eq!(m.get(1, 0), &Rat::from_int(-1));
        assert_eq!(m.get(2, 0), &Rat::zero());
    }

    #[test]
    fn composition_wedges_later_symbol_on_the_left() {
        let d2 = vec![Summand { twist: 2, mult: 1 }];
        let d1 = vec![Summand { twist: 1, mult: 1 }];
        let d0 = vec![Summand { twist: 0, mult: 1 }];
        let mut first = ExteriorMap::new(3, d2.clone(), d1.clone());
        let mut b = ExtBlock::zero(3, 1, 1, 1);
        b.set(0, 0, form(3, &[(&[0], 1)]));
        first.set_block(0, 0, b);
        let mut later = ExteriorMap::new(3, d1, d0);
        let mut b = ExtBlock::zero(3, 1, 1, 1);
        b.set(0, 0, form(3, &[(&[1], 1)]));
        later.set_block(0, 0, b);
        let comp = later.compose(&first);
        // w1* ∧ w0* = -w0*∧w1*
        assert_eq!(
            comp.block(0, 0).unwrap().get(0, 0),
            &form(3, &[(&[0, 1], -1)])
        );
        // The composite acts accordingly: on degree -0? check one degree.
        let m = comp.matrix_at_degree(0);
        // Source degree 0 piece: wedge power 2 of dim 3 (w01, w02, w12);
        // target: scalars.
        assert_eq!((m.rows(), m.cols()), (1, 3));
        assert_eq!(m.get(0, 0), &Rat::from_int(-1));
    }

    #[test]
    fn composite_matrices_factor_through_degreewise_matrices() {
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let dim_w = 3;
        for _ in 0..10 {
            let t2 = vec![Summand { twist: 2, mult: 2 }];
            let t1 = vec![Summand { twist: 0, mult: 1 }, Summand { twist: 1, mult: 2 }];
            let t0 = vec![Summand { twist: 0, mult: 2 }];
            let mut rand_block = |rows: usize, cols: usize, deg: usize| {
                let mut b = ExtBlock::zero(dim_w, rows, cols, deg);
                for r in 0..rows {
                    for c in 0..cols {
                        let mut f = ExtForm::zero(dim_w, deg);
                        for coeff in f.coeffs.iter_mut() {
                            *coeff = Rat::from_int(rng.gen_range(-2..=2));
                        }
                        b.set(r, c, f);
                    }
                }
                b
            };
            let mut first = ExteriorMap::new(dim_w, t2.clone(), t1.clone());
            first.set_block(0, 0, rand_block(1, 2, 2));
            first.set_block(1, 0, rand_block(2, 2, 1));
            let mut later = ExteriorMap::new(dim_w, t1.clone(), t0.clone());
            later.set_block(0, 0, rand_block(2, 1, 0));
            later.set_block(0, 1, rand_block(2, 2, 1));
            let comp = later.compose(&first);
            for d in -2..=3 {
                let lhs = comp.matrix_at_degree(d);
                let rhs = later.matrix_at_degree(d).mul(&first.matrix_at_degree(d));
                assert_eq!(lhs, rhs, "degree {d}");
            }
        }
    }

    #[test]
    fn term_dims_count_wedge_bases() {
        let term = vec![Summand { twist: 0, mult: 1 }, Summand { twist: 1, mult: 2 }];
        // Degree 1: wedge 1 of dim 3 (3) + 2 copies of wedge 2 (3 each).
        assert_eq!(term_dim_at(&term, 3, 1), 3 + 6);
        assert_eq!(term_dim_at(&term, 3, 3), 1 + 0);
        assert_eq!(term_dim_at(&term, 3, -2), 0);
        assert_eq!(
            normalize_term(vec![
                Summand { twist: 1, mult: 1 },
                Summand { twist: 0, mult: 1 },
                Summand { twist: 1, mult: 1 },
                Summand { twist: 5, mult: 0 },
            ]),
            vec![Summand { twist: 0, mult: 1 }, Summand { twist: 1, mult: 2 }]
        );
    }
}
