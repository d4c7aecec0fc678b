//! Tate-style doubly infinite exact complexes over the exterior dual, built
//! degreewise from a module realization.
//!
//! Above the regularity bound the complex is the linear strand determined by
//! the module action: position `p` carries one twisted dual summand with
//! multiplicity `dim piece(p)` and the differential's symbols are the
//! degree-one forms assembled from the multiplication matrices. Below the
//! corner the complex is continued one position at a time: the term at
//! `p - 1` is the minimal cover of the degreewise kernel of the differential
//! leaving position `p`, and the new symbols are the unique dual forms
//! carrying each cover generator onto its kernel vector.
//!
//! The claimed regularity is not trusted: the linear strand is checked for
//! exactness at every position the window exposes, and each backward step
//! checks that the cover generators land in the admissible degree range and
//! that the extended complex still squares to zero.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::{e_minimal_generators, realize, verify_minimal_cover, EModule, SheafSpec};
use crate::error::{Error, Result};
use crate::exterior::{
    normalize_term, volume_preimage, ExtBlock, ExtForm, ExteriorMap, Summand, Term, TermLayout,
};
use crate::field::Field;
use crate::matrix::DenseMatrix;

#[derive(Clone, Debug)]
pub struct TateSegment<F: Field> {
    pub spec: SheafSpec,
    pub dim_w: usize,
    pub p_lo: i64,
    pub p_hi: i64,
    pub regularity: i64,
    terms: BTreeMap<i64, Term>,
    maps: BTreeMap<i64, ExteriorMap<F>>,
}

impl<F: Field> TateSegment<F> {
    /// The term at position `p`.
    pub fn term(&self, p: i64) -> &Term {
        self.terms.get(&p).expect("position inside segment window")
    }

    /// The differential leaving position `p` (defined for `p_lo <= p < p_hi`).
    pub fn map(&self, p: i64) -> &ExteriorMap<F> {
        self.maps.get(&p).expect("map inside segment window")
    }

    pub fn positions(&self) -> impl Iterator<Item = i64> + '_ {
        self.terms.keys().copied()
    }

    /// Named structural checks; all must hold for a well-formed segment.
    pub fn verify(&self) -> Vec<(String, bool)> {
        let n = self.dim_w as i64 - 1;
        let mut square = true;
        for p in self.p_lo..self.p_hi - 1 {
            if !self.map(p + 1).compose(self.map(p)).is_zero() {
                square = false;
            }
        }
        let minimal = self.maps.values().all(ExteriorMap::is_minimal);
        let admissible = self.terms.iter().all(|(p, term)| {
            term.iter().all(|s| {
                let i = s.twist + p;
                (0..=n).contains(&i)
            })
        });
        let shapes = self
            .maps
            .iter()
            .all(|(p, m)| m.source == *self.term(*p) && m.target == *self.term(p + 1));
        vec![
            ("differential_squares_to_zero".into(), square),
            ("differentials_minimal".into(), minimal),
            ("term_twists_admissible".into(), admissible),
            ("map_shapes_match_terms".into(), shapes),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, ok) in self.verify() {
            if !ok {
                return Err(Error::Invariant(format!("segment check failed: {name}")));
            }
        }
        Ok(())
    }

    /// `dim H^i` of the `k`-th twist, read off the term at position `k + i`.
    pub fn cohomology_dim(&self, i: usize, k: i64) -> Result<u64> {
        let n = self.dim_w - 1;
        if i > n {
            return Ok(0);
        }
        let p = k + i as i64;
        if !(self.p_lo..=self.p_hi).contains(&p) {
            return Err(Error::WindowTooNarrow {
                needed: p,
                lo: self.p_lo,
                hi: self.p_hi,
            });
        }
        let mult = self
            .term(p)
            .iter()
            .find(|s| s.twist == -k)
            .map_or(0, |s| s.mult);
        Ok(mult as u64)
    }

    /// The full rectangle of cohomology dimensions the window supports:
    /// rows `i = 0..=n`, columns `k` with every diagonal position inside the
    /// segment.
    pub fn cohomology_table(&self) -> Result<CohomologyTable> {
        let n = self.dim_w - 1;
        let k_lo = self.p_lo;
        let k_hi = self.p_hi - n as i64;
        if k_lo > k_hi {
            return Err(Error::WindowTooNarrow {
                needed: self.p_lo + n as i64,
                lo: self.p_lo,
                hi: self.p_hi,
            });
        }
        let mut rows = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let mut row = Vec::new();
            for k in k_lo..=k_hi {
                row.push(self.cohomology_dim(i, k)?);
            }
            rows.push(row);
        }
        Ok(CohomologyTable {
            dim_w: self.dim_w,
            k_lo,
            k_hi,
            rows,
        })
    }

    pub fn to_artifact(&self) -> SegmentArtifact {
        let terms = self
            .terms
            .iter()
            .map(|(p, term)| TermArtifact {
                p: *p,
                summands: term.iter().map(|s| (s.twist, s.mult)).collect(),
            })
            .collect();
        let maps = self
            .maps
            .iter()
            .map(|(p, m)| {
                let blocks = m
                    .blocks()
                    .map(|(&(ti, si), b)| BlockArtifact {
                        target: ti,
                        source: si,
                        degree: b.degree,
                        rows: b.rows,
                        cols: b.cols,
                        forms: b
                            .entries
                            .iter()
                            .map(|f| {
                                crate::wedge::subsets(self.dim_w, f.degree)
                                    .iter()
                                    .zip(&f.coeffs)
                                    .filter(|(_, c)| !c.is_zero())
                                    .map(|(set, c)| (set.clone(), c.encode()))
                                    .collect()
                            })
                            .collect(),
                    })
                    .collect();
                MapArtifact { p: *p, blocks }
            })
            .collect();
        SegmentArtifact {
            format: 1,
            field: F::tag(),
            spec: self.spec.clone(),
            dim_w: self.dim_w,
            p_lo: self.p_lo,
            p_hi: self.p_hi,
            regularity: self.regularity,
            terms,
            maps,
        }
    }

    pub fn from_artifact(art: &SegmentArtifact) -> Result<Self> {
        if art.format != 1 {
            return Err(Error::CorruptedArtifact(format!(
                "unsupported segment format {}",
                art.format
            )));
        }
        if art.field != F::tag() {
            return Err(Error::CorruptedArtifact(format!(
                "segment field {} does not match requested field {}",
                art.field,
                F::tag()
            )));
        }
        let mut terms = BTreeMap::new();
        for t in &art.terms {
            let term = normalize_term(
                t.summands
                    .iter()
                    .map(|&(twist, mult)| Summand { twist, mult })
                    .collect(),
            );
            if term.len() != t.summands.len() {
                return Err(Error::CorruptedArtifact(
                    "segment term is not normalized".into(),
                ));
            }
            terms.insert(t.p, term);
        }
        let mut maps = BTreeMap::new();
        for m in &art.maps {
            let source: &Term = terms
                .get(&m.p)
                .ok_or_else(|| Error::CorruptedArtifact("map without source term".into()))?;
            let target: &Term = terms
                .get(&(m.p + 1))
                .ok_or_else(|| Error::CorruptedArtifact("map without target term".into()))?;
            let mut emap = ExteriorMap::new(art.dim_w, source.clone(), target.clone());
            for b in &m.blocks {
                if b.target >= target.len() || b.source >= source.len() {
                    return Err(Error::CorruptedArtifact("block index out of range".into()));
                }
                let (s, t) = (&source[b.source], &target[b.target]);
                if s.twist - t.twist != b.degree as i64
                    || b.rows != t.mult
                    || b.cols != s.mult
                {
                    return Err(Error::CorruptedArtifact("block shape mismatch".into()));
                }
                let mut block = ExtBlock::zero(art.dim_w, b.rows, b.cols, b.degree);
                if b.forms.len() != b.rows * b.cols {
                    return Err(Error::CorruptedArtifact("block entry count mismatch".into()));
                }
                for (k, form) in b.forms.iter().enumerate() {
                    let mut f = ExtForm::zero(art.dim_w, b.degree);
                    for (set, coeff) in form {
                        if set.len() != b.degree || set.iter().any(|&v| v >= art.dim_w) {
                            return Err(Error::CorruptedArtifact("bad form index set".into()));
                        }
                        let c = F::decode(coeff).map_err(Error::CorruptedArtifact)?;
                        f.set_coeff(set, c);
                    }
                    block.entries[k] = f;
                }
                emap.set_block(b.target, b.source, block);
            }
            maps.insert(m.p, emap);
        }
        let seg = TateSegment {
            spec: art.spec.clone(),
            dim_w: art.dim_w,
            p_lo: art.p_lo,
            p_hi: art.p_hi,
            regularity: art.regularity,
            terms,
            maps,
        };
        for p in seg.p_lo..=seg.p_hi {
            if !seg.terms.contains_key(&p) {
                return Err(Error::CorruptedArtifact(format!("missing term at {p}")));
            }
        }
        for p in seg.p_lo..seg.p_hi {
            if !seg.maps.contains_key(&p) {
                return Err(Error::CorruptedArtifact(format!("missing map at {p}")));
            }
        }
        seg.validate()
            .map_err(|e| Error::CorruptedArtifact(format!("segment fails verification: {e}")))?;
        Ok(seg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_artifact()).expect("segment serializes")
    }

    /// Content hash binding downstream artifacts to this exact segment.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.to_json().as_bytes());
        hex(&h.finalize())
    }
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SegmentArtifact {
    pub format: u32,
    pub field: String,
    pub spec: SheafSpec,
    pub dim_w: usize,
    pub p_lo: i64,
    pub p_hi: i64,
    pub regularity: i64,
    pub terms: Vec<TermArtifact>,
    pub maps: Vec<MapArtifact>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermArtifact {
    pub p: i64,
    pub summands: Vec<(i64, usize)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapArtifact {
    pub p: i64,
    pub blocks: Vec<BlockArtifact>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockArtifact {
    pub target: usize,
    pub source: usize,
    pub degree: usize,
    pub rows: usize,
    pub cols: usize,
    /// Row-major entries; each form is a sparse list of (index set, coefficient).
    pub forms: Vec<Vec<(Vec<usize>, String)>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CohomologyTable {
    pub dim_w: usize,
    pub k_lo: i64,
    pub k_hi: i64,
    /// `rows[i][k - k_lo]` is `dim H^i` of the `k`-th twist.
    pub rows: Vec<Vec<u64>>,
}

/// Compute the segment of the Tate-style complex over positions
/// `p_lo ..= p_hi`, with differentials between retained terms.
pub fn tate_segment<F: Field>(spec: &SheafSpec, p_lo: i64, p_hi: i64) -> Result<TateSegment<F>> {
    spec.validate()?;
    if p_lo > p_hi {
        return Err(Error::InvalidInput(format!(
            "empty position window: {p_lo} > {p_hi}"
        )));
    }
    let r = spec.regularity()?;
    let n = spec.n() as i64;
    // Build the linear strand far enough to the right that the exactness
    // gate always has at least one position to check.
    let internal_hi = p_hi.max(r + 2);
    let module = realize::<F>(spec, r, internal_hi)?;

    let mut terms: BTreeMap<i64, Term> = BTreeMap::new();
    let mut maps: BTreeMap<i64, ExteriorMap<F>> = BTreeMap::new();

    for p in r..=internal_hi {
        let dim = module.piece_dim(p);
        let term = if dim > 0 {
            vec![Summand {
                twist: -p,
                mult: dim,
            }]
        } else {
            Vec::new()
        };
        terms.insert(p, term);
    }
    for p in r..internal_hi {
        let source = terms[&p].clone();
        let target = terms[&(p + 1)].clone();
        let mut emap = ExteriorMap::new(spec.dim_w, source.clone(), target.clone());
        if !source.is_empty() && !target.is_empty() {
            let acts = module.action(p);
            let rows = target[0].mult;
            let cols = source[0].mult;
            let mut block = ExtBlock::zero(spec.dim_w, rows, cols, 1);
            for hr in 0..rows {
                for hc in 0..cols {
                    let mut f = ExtForm::zero(spec.dim_w, 1);
                    for (t, act) in acts.iter().enumerate() {
                        let c = act.get(hr, hc);
                        if !c.is_zero() {
                            f.set_coeff(&[t], c.clone());
                        }
                    }
                    block.set(hr, hc, f);
                }
            }
            emap.set_block(0, 0, block);
        }
        maps.insert(p, emap);
    }

    // Regularity gate: the linear strand must be exact strictly to the right
    // of the claimed corner.
    for p in r + 1..internal_hi {
        let outgoing = &maps[&p];
        let incoming = &maps[&(p - 1)];
        for d in term_degree_range(&terms[&p], n) {
            let out_m = outgoing.matrix_at_degree(d);
            let kernel_dim = out_m.cols() - out_m.rank();
            let image_dim = incoming.matrix_at_degree(d).rank();
            if kernel_dim != image_dim {
                return Err(Error::RegularityCheck {
                    position: p,
                    degree: d,
                    claimed: r,
                });
            }
        }
    }

    // Backward continuation: each new term is the minimal cover of the
    // kernel of the differential leaving the current leftmost position.
    for cur in ((p_lo + 1)..=r).rev() {
        let (term, emap) = backward_step(&terms[&cur], &maps[&cur], spec.dim_w, cur, r)?;
        terms.insert(cur - 1, term);
        maps.insert(cur - 1, emap);
    }

    // Trim to the requested window.
    terms.retain(|p, _| (p_lo..=p_hi).contains(p));
    maps.retain(|p, _| (p_lo..p_hi).contains(p));

    let seg = TateSegment {
        spec: spec.clone(),
        dim_w: spec.dim_w,
        p_lo,
        p_hi,
        regularity: r,
        terms,
        maps,
    };
    seg.validate()?;
    Ok(seg)
}

fn term_degree_range(term: &Term, n: i64) -> std::ops::RangeInclusive<i64> {
    if term.is_empty() {
        return 1..=0;
    }
    let lo = term.iter().map(|s| -s.twist).min().unwrap();
    let hi = term.iter().map(|s| -s.twist).max().unwrap() + n + 1;
    lo..=hi
}

/// One backward step: the minimal cover of `ker(outgoing)` and the induced
/// differential onto the current term.
fn backward_step<F: Field>(
    term: &Term,
    outgoing: &ExteriorMap<F>,
    dim_w: usize,
    cur: i64,
    claimed: i64,
) -> Result<(Term, ExteriorMap<F>)> {
    let n = dim_w as i64 - 1;
    if term.is_empty() {
        let new_term: Term = Vec::new();
        let emap = ExteriorMap::new(dim_w, new_term.clone(), term.clone());
        return Ok((new_term, emap));
    }
    let range = term_degree_range(term, n);
    let (lo, hi) = (*range.start(), *range.end());

    // Degreewise kernel of the outgoing differential, as a module over the
    // exterior dual with the actions inherited from the ambient term.
    let ambient = crate::algebra::term_emodule::<F>(term, dim_w, lo, hi);
    let embeds: Vec<DenseMatrix<F>> = (lo..=hi)
        .map(|d| outgoing.matrix_at_degree(d).kernel_basis())
        .collect();
    let dims: Vec<usize> = embeds.iter().map(DenseMatrix::cols).collect();
    let mut actions = Vec::new();
    for d in lo + 1..=hi {
        let idx = (d - lo) as usize;
        let acts: Vec<DenseMatrix<F>> = (0..dim_w)
            .map(|t| {
                let image = ambient.action(d)[t].mul(&embeds[idx]);
                embeds[idx - 1]
                    .solve(&image)
                    .expect("kernel is closed under the dual action")
            })
            .collect();
        actions.push(acts);
    }
    let kernel = EModule::new(dim_w, lo, hi, dims, actions);
    let gens = e_minimal_generators(&kernel);
    if !verify_minimal_cover(&kernel, &gens) {
        return Err(Error::Invariant(format!(
            "cover of the kernel at position {cur} is not minimal"
        )));
    }

    // Admissible generator degrees for the cover of this kernel.
    let adm = cur..=cur + n;
    for (d, _) in &gens {
        if !adm.contains(d) {
            return Err(Error::RegularityCheck {
                position: cur,
                degree: *d,
                claimed,
            });
        }
    }

    let new_term: Term = normalize_term(
        gens.iter()
            .map(|(d, m)| Summand {
                twist: n + 1 - d,
                mult: m.cols(),
            })
            .collect(),
    );
    let mut emap = ExteriorMap::new(dim_w, new_term.clone(), term.clone());
    let mut blocks: BTreeMap<(usize, usize), ExtBlock<F>> = BTreeMap::new();
    for (d, gen_cols) in &gens {
        let twist = n + 1 - d;
        let si = new_term
            .iter()
            .position(|s| s.twist == twist)
            .expect("summand recorded");
        let layout = TermLayout::new(term, dim_w, *d);
        let idx = (d - lo) as usize;
        let ambient_gens = embeds[idx].mul(gen_cols);
        for col in 0..ambient_gens.cols() {
            for (ti, part) in layout.parts.iter().enumerate() {
                let Some((w, sets, _)) = part else { continue };
                for h in 0..term[ti].mult {
                    let comp: Vec<F> = (0..sets.len())
                        .map(|sr| ambient_gens.get(layout.index(ti, h, sr), col).clone())
                        .collect();
                    if comp.iter().all(F::is_zero) {
                        continue;
                    }
                    let lam = volume_preimage(&comp, *w, dim_w);
                    let block = blocks.entry((ti, si)).or_insert_with(|| {
                        ExtBlock::zero(
                            dim_w,
                            term[ti].mult,
                            new_term[si].mult,
                            lam.degree,
                        )
                    });
                    block.set(h, col, lam);
                }
            }
        }
    }
    for ((ti, si), block) in blocks {
        emap.set_block(ti, si, block);
    }
    if !outgoing.compose(&emap).is_zero() {
        return Err(Error::Invariant(format!(
            "backward step at position {cur} does not square to zero"
        )));
    }
    Ok((new_term, emap))
}
