//! The minor-substitution functor and the complexes it produces.
//!
//! Fix `ell` and the generic `ell x dim W` variable matrix. The functor
//! sends the twisted dual summand of twist `j` to the `j`-th wedge power of
//! the rank-`ell` free module tensor `A(-j)`, which is zero unless
//! `0 <= j <= ell`, and sends a dual form of degree `m` to the matrix whose
//! entries are signed `m x m` minors of the variable matrix: the wedge-row
//! pair `(I, J)` with `J` contained in `I` picks up the minor with rows
//! `I \ J` and columns given by the form's index set, weighted by the
//! shuffle sign of `(J, I \ J)`. Under the composition convention of the
//! exterior side this assignment is strictly functorial.
//!
//! Applying the functor to a window of a Tate-style complex yields a finite
//! complex of graded free `A`-modules whose terms vanish outside
//! `[-ell, dim of support]`; both boundary positions are checked to vanish
//! rather than assumed.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::SheafSpec;
use crate::error::{Error, Result};
use crate::exterior::{ExtForm, ExteriorMap, Term};
use crate::field::Field;
use crate::poly::{cauchy_embed, Monomial, Poly, PolyMatrix, VarShape};
use crate::tate::{tate_segment, TateSegment};
use crate::wedge::{binomial, shuffle_sign, subsets};

/// One wedge-power summand `wedge^j K^ell tensor A(-j)` with multiplicity.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ASummand {
    pub wedge: usize,
    pub mult: usize,
}

/// A finite direct sum of wedge-power summands, in ascending wedge order.
pub type AFree = Vec<ASummand>;

/// Image of a term under the functor: summands with twist outside
/// `[0, ell]` are dropped, the rest keep their multiplicities.
pub fn functor_on_term(term: &Term, ell: usize) -> AFree {
    term.iter()
        .filter(|s| (0..=ell as i64).contains(&s.twist))
        .map(|s| ASummand {
            wedge: s.twist as usize,
            mult: s.mult,
        })
        .collect()
}

pub fn afree_rank(af: &AFree, ell: usize) -> usize {
    af.iter()
        .map(|s| s.mult * binomial(ell, s.wedge) as usize)
        .sum()
}

/// Basis layout of a free module: per summand, multiplicity-major, then the
/// lexicographic wedge basis of `wedge^j K^ell`.
pub struct ALayout {
    pub parts: Vec<(Vec<Vec<usize>>, usize)>,
    pub rank: usize,
}

impl ALayout {
    pub fn new(af: &AFree, ell: usize) -> Self {
        let mut parts = Vec::with_capacity(af.len());
        let mut offset = 0;
        for s in af {
            let sets = subsets(ell, s.wedge);
            parts.push((sets.clone(), offset));
            offset += s.mult * sets.len();
        }
        ALayout {
            parts,
            rank: offset,
        }
    }

    pub fn index(&self, summand: usize, copy: usize, set_rank: usize) -> usize {
        let (sets, offset) = &self.parts[summand];
        offset + copy * sets.len() + set_rank
    }

    /// Wedge index of each flat basis vector, for degree bookkeeping.
    pub fn wedges(&self, af: &AFree) -> Vec<usize> {
        let mut out = vec![0; self.rank];
        for (si, s) in af.iter().enumerate() {
            let (sets, offset) = &self.parts[si];
            for k in 0..s.mult * sets.len() {
                out[offset + k] = s.wedge;
            }
        }
        out
    }
}

/// A map of free `A`-modules produced by the functor, stored as one dense
/// polynomial matrix over the layout bases.
#[derive(Clone, PartialEq, Debug)]
pub struct AMap<F: Field> {
    pub shape: VarShape,
    pub source: AFree,
    pub target: AFree,
    pub mat: PolyMatrix<F>,
}

/// Image of a degree-zero exterior map under the functor.
pub fn functor_on_map<F: Field>(emap: &ExteriorMap<F>, ell: usize) -> AMap<F> {
    let shape = VarShape::new(ell, emap.dim_w);
    let source = functor_on_term(&emap.source, ell);
    let target = functor_on_term(&emap.target, ell);
    // Positions of retained summands within the original terms.
    let src_pos = retained_positions(&emap.source, ell);
    let tgt_pos = retained_positions(&emap.target, ell);
    let src_layout = ALayout::new(&source, ell);
    let tgt_layout = ALayout::new(&target, ell);
    let mut mat = PolyMatrix::zero(shape, tgt_layout.rank, src_layout.rank);
    let mut minor_cache: BTreeMap<(Vec<usize>, Vec<usize>), Poly<F>> = BTreeMap::new();
    for (&(ti, si), block) in emap.blocks() {
        let (Some(tj), Some(sj)) = (tgt_pos[ti], src_pos[si]) else {
            continue;
        };
        let (src_sets, _) = &src_layout.parts[sj];
        let (tgt_sets, _) = &tgt_layout.parts[tj];
        let m = block.degree;
        let lsets = subsets(emap.dim_w, m);
        for (ir, iset) in src_sets.iter().enumerate() {
            for (jr, jset) in tgt_sets.iter().enumerate() {
                if !jset.iter().all(|v| iset.contains(v)) {
                    continue;
                }
                let diff: Vec<usize> = iset
                    .iter()
                    .copied()
                    .filter(|v| !jset.contains(v))
                    .collect();
                debug_assert_eq!(diff.len(), m);
                let sign = shuffle_sign(jset, &diff).expect("disjoint by construction");
                for hr in 0..block.rows {
                    for hc in 0..block.cols {
                        let form: &ExtForm<F> = block.get(hr, hc);
                        if form.is_zero() {
                            continue;
                        }
                        let mut entry = Poly::zero(shape);
                        for (lr, lset) in lsets.iter().enumerate() {
                            let c = &form.coeffs[lr];
                            if c.is_zero() {
                                continue;
                            }
                            let minor = minor_cache
                                .entry((diff.clone(), lset.clone()))
                                .or_insert_with(|| cauchy_embed(shape, &diff, lset));
                            entry = entry.add(&minor.scale(c));
                        }
                        if sign < 0 {
                            entry = entry.neg();
                        }
                        if !entry.is_zero() {
                            let row = tgt_layout.index(tj, hr, jr);
                            let col = src_layout.index(sj, hc, ir);
                            mat.set(row, col, entry);
                        }
                    }
                }
            }
        }
    }
    AMap {
        shape,
        source,
        target,
        mat,
    }
}

fn retained_positions(term: &Term, ell: usize) -> Vec<Option<usize>> {
    let mut out = Vec::with_capacity(term.len());
    let mut next = 0;
    for s in term {
        if (0..=ell as i64).contains(&s.twist) {
            out.push(Some(next));
            next += 1;
        } else {
            out.push(None);
        }
    }
    out
}

/// A finite complex of free `A`-modules: terms over `p_lo ..= p_hi` and the
/// differential leaving each position except the last.
#[derive(Clone, Debug)]
pub struct WeymanComplex<F: Field> {
    pub shape: VarShape,
    pub spec: SheafSpec,
    pub ell: usize,
    pub p_lo: i64,
    pub p_hi: i64,
    pub segment_hash: String,
    pub terms: BTreeMap<i64, AFree>,
    pub maps: BTreeMap<i64, AMap<F>>,
}

impl<F: Field> WeymanComplex<F> {
    pub fn term(&self, p: i64) -> &AFree {
        self.terms.get(&p).expect("position inside complex window")
    }

    pub fn rank_at(&self, p: i64) -> usize {
        afree_rank(self.term(p), self.ell)
    }

    /// Named structural checks; all must hold for a well-formed complex.
    pub fn verify(&self) -> Vec<(String, bool)> {
        let mut square = true;
        for p in self.p_lo..self.p_hi - 1 {
            let a = &self.maps[&p].mat;
            let b = &self.maps[&(p + 1)].mat;
            if !b.mul(a).is_zero() {
                square = false;
            }
        }
        let mut homogeneous = true;
        let mut minimal = true;
        let mut shapes = true;
        for (p, m) in &self.maps {
            let src_layout = ALayout::new(&m.source, self.ell);
            let tgt_layout = ALayout::new(&m.target, self.ell);
            if m.mat.rows() != tgt_layout.rank || m.mat.cols() != src_layout.rank {
                shapes = false;
                continue;
            }
            if m.source != *self.term(*p) || m.target != *self.term(p + 1) {
                shapes = false;
            }
            let col_wedge = src_layout.wedges(&m.source);
            let row_wedge = tgt_layout.wedges(&m.target);
            for i in 0..m.mat.rows() {
                for j in 0..m.mat.cols() {
                    let e = m.mat.get(i, j);
                    if e.is_zero() {
                        continue;
                    }
                    if col_wedge[j] <= row_wedge[i] {
                        minimal = false;
                    }
                    let d = col_wedge[j] as i64 - row_wedge[i] as i64;
                    if d < 0 || !e.is_homogeneous_of(d as u32) {
                        homogeneous = false;
                    }
                }
            }
        }
        let supported = self
            .terms
            .iter()
            .all(|(p, _)| (self.p_lo..=self.p_hi).contains(p));
        vec![
            ("differential_squares_to_zero".into(), square),
            ("entries_homogeneous".into(), homogeneous),
            ("differentials_minimal".into(), minimal),
            ("map_shapes_match_terms".into(), shapes),
            ("terms_within_support_window".into(), supported),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, ok) in self.verify() {
            if !ok {
                return Err(Error::Invariant(format!("complex check failed: {name}")));
            }
        }
        Ok(())
    }

    pub fn to_artifact(&self) -> ComplexArtifact {
        let terms = self
            .terms
            .iter()
            .map(|(p, af)| ATermArtifact {
                p: *p,
                summands: af.iter().map(|s| (s.wedge, s.mult)).collect(),
            })
            .collect();
        let maps = self
            .maps
            .iter()
            .map(|(p, m)| AMapArtifact {
                p: *p,
                rows: m.mat.rows(),
                cols: m.mat.cols(),
                entries: (0..m.mat.rows())
                    .flat_map(|i| {
                        (0..m.mat.cols()).map(move |j| {
                            let e = m.mat.get(i, j);
                            AEntryArtifact {
                                monomials: e
                                    .terms()
                                    .map(|(mono, c)| (c.encode(), mono.exps().to_vec()))
                                    .collect(),
                                text: e.to_string(),
                            }
                        })
                    })
                    .collect(),
            })
            .collect();
        ComplexArtifact {
            format: 1,
            field: F::tag(),
            spec: self.spec.clone(),
            dim_w: self.shape.dim_w,
            ell: self.ell,
            p_lo: self.p_lo,
            p_hi: self.p_hi,
            segment_hash: self.segment_hash.clone(),
            terms,
            maps,
        }
    }

    pub fn from_artifact(art: &ComplexArtifact) -> Result<Self> {
        if art.format != 1 {
            return Err(Error::CorruptedArtifact(format!(
                "unsupported complex format {}",
                art.format
            )));
        }
        if art.field != F::tag() {
            return Err(Error::CorruptedArtifact(format!(
                "complex field {} does not match requested field {}",
                art.field,
                F::tag()
            )));
        }
        let shape = VarShape::new(art.ell, art.dim_w);
        let mut terms: BTreeMap<i64, AFree> = BTreeMap::new();
        for t in &art.terms {
            let af: AFree = t
                .summands
                .iter()
                .map(|&(wedge, mult)| ASummand { wedge, mult })
                .collect();
            if af.iter().any(|s| s.wedge > art.ell || s.mult == 0) {
                return Err(Error::CorruptedArtifact("bad summand".into()));
            }
            terms.insert(t.p, af);
        }
        let mut maps = BTreeMap::new();
        for m in &art.maps {
            let source = terms
                .get(&m.p)
                .ok_or_else(|| Error::CorruptedArtifact("map without source term".into()))?
                .clone();
            let target = terms
                .get(&(m.p + 1))
                .ok_or_else(|| Error::CorruptedArtifact("map without target term".into()))?
                .clone();
            let src_rank = afree_rank(&source, art.ell);
            let tgt_rank = afree_rank(&target, art.ell);
            if m.rows != tgt_rank || m.cols != src_rank || m.entries.len() != m.rows * m.cols {
                return Err(Error::CorruptedArtifact("map shape mismatch".into()));
            }
            let mut mat = PolyMatrix::zero(shape, m.rows, m.cols);
            for (k, e) in m.entries.iter().enumerate() {
                let mut p = Poly::zero(shape);
                for (coeff, exps) in &e.monomials {
                    if exps.len() != shape.nvars() {
                        return Err(Error::CorruptedArtifact("bad monomial arity".into()));
                    }
                    let c = F::decode(coeff).map_err(Error::CorruptedArtifact)?;
                    p.add_term(Monomial::from_exps(exps.clone()), c);
                }
                mat.set(k / m.cols, k % m.cols, p);
            }
            maps.insert(
                m.p,
                AMap {
                    shape,
                    source,
                    target,
                    mat,
                },
            );
        }
        let complex = WeymanComplex {
            shape,
            spec: art.spec.clone(),
            ell: art.ell,
            p_lo: art.p_lo,
            p_hi: art.p_hi,
            segment_hash: art.segment_hash.clone(),
            terms,
            maps,
        };
        for p in complex.p_lo..=complex.p_hi {
            if !complex.terms.contains_key(&p) {
                return Err(Error::CorruptedArtifact(format!("missing term at {p}")));
            }
        }
        for p in complex.p_lo..complex.p_hi {
            if !complex.maps.contains_key(&p) {
                return Err(Error::CorruptedArtifact(format!("missing map at {p}")));
            }
        }
        complex
            .validate()
            .map_err(|e| Error::CorruptedArtifact(format!("complex fails verification: {e}")))?;
        Ok(complex)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_artifact()).expect("complex serializes")
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexArtifact {
    pub format: u32,
    pub field: String,
    pub spec: SheafSpec,
    pub dim_w: usize,
    pub ell: usize,
    pub p_lo: i64,
    pub p_hi: i64,
    pub segment_hash: String,
    pub terms: Vec<ATermArtifact>,
    pub maps: Vec<AMapArtifact>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ATermArtifact {
    pub p: i64,
    pub summands: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AMapArtifact {
    pub p: i64,
    pub rows: usize,
    pub cols: usize,
    /// Row-major entries as sparse monomial lists with a rendered form.
    pub entries: Vec<AEntryArtifact>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AEntryArtifact {
    pub monomials: Vec<(String, Vec<u32>)>,
    pub text: String,
}

/// Support window and segment window for a complex of the given level.
pub fn complex_windows(spec: &SheafSpec, ell: usize) -> Result<(i64, i64, i64, i64)> {
    let n = spec.n() as i64;
    let d_supp = match spec.default_dim_support() {
        Some(d) => {
            if !(0..=n).contains(&d) {
                return Err(Error::InvalidInput(format!(
                    "dim of support {d} outside [0, {n}]"
                )));
            }
            d
        }
        None => n,
    };
    let r = spec.regularity()?;
    let p_lo = -(ell as i64);
    let seg_lo = p_lo - 1;
    let seg_hi = (d_supp + 1).max(r + 1);
    Ok((p_lo, d_supp, seg_lo, seg_hi))
}

/// Build the complex for a sheaf at level `ell`, computing the segment it
/// needs.
pub fn weyman_complex<F: Field>(spec: &SheafSpec, ell: usize) -> Result<WeymanComplex<F>> {
    guard_level(ell, spec.dim_w)?;
    let (_, _, seg_lo, seg_hi) = complex_windows(spec, ell)?;
    let seg = tate_segment::<F>(spec, seg_lo, seg_hi)?;
    weyman_complex_from_segment(&seg, ell)
}

/// Build the complex at level `ell` from an already computed segment, which
/// must cover `[-ell - 1, dim of support + 1]`.
pub fn weyman_complex_from_segment<F: Field>(
    seg: &TateSegment<F>,
    ell: usize,
) -> Result<WeymanComplex<F>> {
    guard_level(ell, seg.dim_w)?;
    let (p_lo, d_supp, seg_lo, _) = complex_windows(&seg.spec, ell)?;
    if seg.p_lo > seg_lo || seg.p_hi < d_supp + 1 {
        return Err(Error::WindowTooNarrow {
            needed: if seg.p_lo > seg_lo { seg_lo } else { d_supp + 1 },
            lo: seg.p_lo,
            hi: seg.p_hi,
        });
    }
    // Both truncation boundaries must vanish under the functor.
    for (p, which) in [(seg_lo, "left"), (d_supp + 1, "right")] {
        let af = functor_on_term(seg.term(p), ell);
        if !af.is_empty() {
            return Err(Error::Invariant(format!(
                "{which} boundary term at position {p} does not vanish at level {ell}; \
                 the dim of support may be understated"
            )));
        }
    }
    let mut terms = BTreeMap::new();
    for p in p_lo..=d_supp {
        terms.insert(p, functor_on_term(seg.term(p), ell));
    }
    let mut maps = BTreeMap::new();
    for p in p_lo..d_supp {
        maps.insert(p, functor_on_map(seg.map(p), ell));
    }
    let complex = WeymanComplex {
        shape: VarShape::new(ell, seg.dim_w),
        spec: seg.spec.clone(),
        ell,
        p_lo,
        p_hi: d_supp,
        segment_hash: seg.content_hash(),
        terms,
        maps,
    };
    complex.validate()?;
    Ok(complex)
}

fn guard_level(ell: usize, dim_w: usize) -> Result<()> {
    if ell < 1 || ell > dim_w - 1 {
        return Err(Error::ExcludedCase { ell, dim_w });
    }
    Ok(())
}

/// The determinant of a complex supported in exactly two adjacent positions
/// with equal ranks.
#[derive(Clone, Debug)]
pub struct TwoTermDet<F: Field> {
    pub position: i64,
    pub size: usize,
    pub degree: u32,
    pub det: Poly<F>,
}

pub fn det_two_term<F: Field>(complex: &WeymanComplex<F>) -> Result<TwoTermDet<F>> {
    let nonzero: Vec<i64> = (complex.p_lo..=complex.p_hi)
        .filter(|&p| complex.rank_at(p) > 0)
        .collect();
    let [p, q] = nonzero.as_slice() else {
        return Err(Error::InvalidInput(format!(
            "determinant needs exactly two nonzero positions, found {}",
            nonzero.len()
        )));
    };
    if *q != p + 1 {
        return Err(Error::InvalidInput(
            "determinant needs the two nonzero positions to be adjacent".into(),
        ));
    }
    let m = &complex.maps[p];
    if m.mat.rows() != m.mat.cols() {
        return Err(Error::InvalidInput(format!(
            "two-term complex is {}x{}, not square",
            m.mat.rows(),
            m.mat.cols()
        )));
    }
    let src_layout = ALayout::new(&m.source, complex.ell);
    let tgt_layout = ALayout::new(&m.target, complex.ell);
    let cols_deg: i64 = src_layout
        .wedges(&m.source)
        .iter()
        .map(|&w| w as i64)
        .sum();
    let rows_deg: i64 = tgt_layout
        .wedges(&m.target)
        .iter()
        .map(|&w| w as i64)
        .sum();
    let predicted = cols_deg - rows_deg;
    if predicted < 0 {
        return Err(Error::Invariant(
            "two-term determinant would have negative degree".into(),
        ));
    }
    let det = m.mat.det();
    if !det.is_zero() && !det.is_homogeneous_of(predicted as u32) {
        return Err(Error::Invariant(format!(
            "determinant is not homogeneous of degree {predicted}"
        )));
    }
    Ok(TwoTermDet {
        position: *p,
        size: m.mat.rows(),
        degree: predicted as u32,
        det,
    })
}

/// Random check that the functor kills no nonzero map between single
/// summands of twists `a` and `b`: returns the number of failures over the
/// given trials.
pub fn functor_injectivity_probe<F: Field>(
    a: i64,
    b: i64,
    ell: usize,
    dim_w: usize,
    trials: usize,
    seed: u64,
) -> usize {
    use crate::exterior::{ExtBlock, Summand};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    assert!(b <= a && a - b <= dim_w as i64, "no forms of this degree");
    let m = (a - b) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for _ in 0..trials {
        let mut form = ExtForm::<F>::zero(dim_w, m);
        while form.is_zero() {
            for c in form.coeffs.iter_mut() {
                *c = F::from_i64(rng.gen_range(-3i64..=3));
            }
        }
        let source = vec![Summand { twist: a, mult: 1 }];
        let target = vec![Summand { twist: b, mult: 1 }];
        let mut emap = ExteriorMap::new(dim_w, source, target);
        let mut block = ExtBlock::zero(dim_w, 1, 1, m);
        block.set(0, 0, form);
        emap.set_block(0, 0, block);
        let amap = functor_on_map(&emap, ell);
        if amap.mat.is_zero() {
            failures += 1;
        }
    }
    failures
}
