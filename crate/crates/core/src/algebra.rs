//! Degreewise module realizations.
//!
//! Graded modules are represented window-by-window: a based vector space per
//! internal degree plus one matrix per algebra generator. On the symmetric
//! side the generators (a basis of `W`) raise degree by one and commute; on
//! the exterior side the dual generators lower degree by one, anticommute
//! and square to zero. No Groebner machinery: every construction reduces to
//! exact kernels, spans and complements of explicit matrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{Term, TermLayout};
use crate::field::Field;
use crate::matrix::DenseMatrix;
use crate::wedge::{binomial, shuffle_sign, subset_rank, subsets};

/// Description of the coherent sheaf whose Tate resolution is requested.
///
/// `twist(d)` is the line bundle `O(d)`. `omega(a)` is the `a`-th twisted
/// cotangent sheaf, i.e. the `a`-th exterior power of the cotangent bundle
/// twisted by `a`, realized as a Koszul kernel. `veronese(d, twist)` is the
/// pushforward of `O(twist)` from the projective line under the degree-`d`
/// embedding, so `dim W = d + 1`. Quotients and presentations realize
/// arbitrary finitely presented graded modules; for those, the regularity
/// bound must be supplied by the caller and is verified at runtime.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SheafKind {
    Twist { d: i64 },
    Omega { a: usize },
    Veronese { d: usize, twist: i64 },
    Quotient { gens: Vec<String> },
    Presentation {
        row_twists: Vec<i64>,
        col_twists: Vec<i64>,
        entries: Vec<Vec<String>>,
    },
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SheafSpec {
    pub kind: SheafKind,
    pub dim_w: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regularity: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim_support: Option<i64>,
}

impl SheafSpec {
    pub fn new(kind: SheafKind, dim_w: usize) -> Self {
        SheafSpec {
            kind,
            dim_w,
            regularity: None,
            dim_support: None,
        }
    }

    /// Projective dimension of the ambient space.
    pub fn n(&self) -> usize {
        self.dim_w - 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim_w < 2 {
            return Err(Error::InvalidInput(format!(
                "dim W = {} is too small; the ambient projective space needs dim W >= 2",
                self.dim_w
            )));
        }
        match &self.kind {
            SheafKind::Twist { .. } => Ok(()),
            SheafKind::Omega { a } => {
                if *a > self.n() {
                    Err(Error::InvalidInput(format!(
                        "omega({a}) is zero on projective {}-space",
                        self.n()
                    )))
                } else {
                    Ok(())
                }
            }
            SheafKind::Veronese { d, .. } => {
                if *d < 1 {
                    Err(Error::InvalidInput("veronese degree must be >= 1".into()))
                } else if self.dim_w != d + 1 {
                    Err(Error::InvalidInput(format!(
                        "veronese({d}, _) embeds into projective space with dim W = {}, got {}",
                        d + 1,
                        self.dim_w
                    )))
                } else {
                    Ok(())
                }
            }
            SheafKind::Quotient { gens } => {
                for g in gens {
                    let p = parse_s_poly(g, self.dim_w)?;
                    homogeneous_degree(&p).ok_or_else(|| {
                        Error::InvalidInput(format!("quotient generator {g:?} is not homogeneous"))
                    })?;
                }
                Ok(())
            }
            SheafKind::Presentation {
                row_twists,
                col_twists,
                entries,
            } => {
                if entries.len() != row_twists.len()
                    || entries.iter().any(|r| r.len() != col_twists.len())
                {
                    return Err(Error::InvalidInput(
                        "presentation matrix shape disagrees with twist lists".into(),
                    ));
                }
                if row_twists.is_empty() {
                    return Err(Error::InvalidInput(
                        "presentation needs at least one row".into(),
                    ));
                }
                for (i, row) in entries.iter().enumerate() {
                    for (j, e) in row.iter().enumerate() {
                        let p = parse_s_poly(e, self.dim_w)?;
                        if p.is_empty() {
                            continue;
                        }
                        let deg = homogeneous_degree(&p).ok_or_else(|| {
                            Error::InvalidInput(format!(
                                "presentation entry ({i},{j}) is not homogeneous"
                            ))
                        })?;
                        let expect = col_twists[j] - row_twists[i];
                        if deg as i64 != expect {
                            return Err(Error::InvalidInput(format!(
                                "presentation entry ({i},{j}) has degree {deg}, expected {expect}"
                            )));
                        }
                    }
                }
                Ok(())
            }
        }
    }

    /// Regularity bound: the supplied override, or the exact value for the
    /// built-in sheaves. The Tate construction re-verifies it at runtime.
    pub fn regularity(&self) -> Result<i64> {
        if let Some(r) = self.regularity {
            return Ok(r);
        }
        match &self.kind {
            SheafKind::Twist { d } => Ok(-d),
            SheafKind::Omega { a } => Ok(if *a == 0 { 0 } else { 1 }),
            SheafKind::Veronese { d, twist } => Ok(1 + ceil_div(-1 - twist, *d as i64)),
            _ => Err(Error::InvalidInput(
                "regularity must be supplied for quotient and presentation sheaves".into(),
            )),
        }
    }

    /// Dimension of the support when known a priori.
    pub fn default_dim_support(&self) -> Option<i64> {
        if let Some(d) = self.dim_support {
            return Some(d);
        }
        match &self.kind {
            SheafKind::Twist { .. } | SheafKind::Omega { .. } => Some(self.n() as i64),
            SheafKind::Veronese { .. } => Some(1),
            _ => None,
        }
    }

    /// Stable serialization used for cache keys and provenance hashes.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }
}

fn ceil_div(a: i64, b: i64) -> i64 {
    debug_assert!(b > 0);
    a.div_euclid(b) + if a.rem_euclid(b) != 0 { 1 } else { 0 }
}

/// Sparse integer polynomial in the symmetric algebra on `W`, as parsed from
/// strings like `3*w0^2*w1 - w2^3`.
pub type SPoly = Vec<(Vec<u32>, i64)>;

pub fn parse_s_poly(src: &str, dim_w: usize) -> Result<SPoly> {
    let err = |msg: String| Error::Parse(format!("{msg} in {src:?}"));
    let mut terms: Vec<(Vec<u32>, i64)> = Vec::new();
    let mut rest = src.trim();
    if rest.is_empty() {
        return Ok(Vec::new());
    }
    let mut sign = 1i64;
    if let Some(r) = rest.strip_prefix('-') {
        sign = -1;
        rest = r.trim_start();
    }
    loop {
        if rest.is_empty() {
            return Err(err("dangling operator".into()));
        }
        let end = rest.find(['+', '-']).unwrap_or(rest.len());
        let (term_src, tail) = rest.split_at(end);
        rest = tail;
        let mut coeff: i64 = 1;
        let mut exps = vec![0u32; dim_w];
        let mut saw_factor = false;
        for factor in term_src.split('*') {
            let f = factor.trim();
            if f.is_empty() {
                return Err(err("empty factor".into()));
            }
            saw_factor = true;
            if let Some(var) = f.strip_prefix('w') {
                let (idx_src, exp) = match var.split_once('^') {
                    Some((i, e)) => {
                        let e: u32 = e
                            .trim()
                            .parse()
                            .map_err(|_| err(format!("bad exponent in {f:?}")))?;
                        (i, e)
                    }
                    None => (var, 1),
                };
                let idx: usize = idx_src
                    .trim()
                    .parse()
                    .map_err(|_| err(format!("bad variable {f:?}")))?;
                if idx >= dim_w {
                    return Err(err(format!("variable w{idx} exceeds dim W = {dim_w}")));
                }
                exps[idx] += exp;
            } else {
                let c: i64 = f
                    .parse()
                    .map_err(|_| err(format!("bad factor {f:?}")))?;
                coeff = coeff
                    .checked_mul(c)
                    .ok_or_else(|| err("coefficient overflow".into()))?;
            }
        }
        if !saw_factor {
            return Err(err("empty term".into()));
        }
        let c = sign * coeff;
        if c != 0 {
            if let Some(t) = terms.iter_mut().find(|(e, _)| *e == exps) {
                t.1 += c;
            } else {
                terms.push((exps, c));
            }
        }
        if rest.is_empty() {
            break;
        }
        if let Some(r) = rest.strip_prefix('+') {
            sign = 1;
            rest = r.trim_start();
        } else if let Some(r) = rest.strip_prefix('-') {
            sign = -1;
            rest = r.trim_start();
        } else {
            return Err(err("expected '+' or '-' between terms".into()));
        }
    }
    terms.retain(|(_, c)| *c != 0);
    Ok(terms)
}

fn homogeneous_degree(p: &SPoly) -> Option<u32> {
    let mut degrees = p.iter().map(|(e, _)| e.iter().sum::<u32>());
    let first = degrees.next()?;
    degrees.all(|d| d == first).then_some(first)
}

/// Monomial exponent vectors of total degree `k` in `n` variables, in
/// ascending lexicographic order; empty for negative `k`.
pub fn monomials(n: usize, k: i64) -> Vec<Vec<u32>> {
    if k < 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fill_monomials(&mut out, &mut cur, 0, k as u32, n);
    out
}

fn fill_monomials(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, pos: usize, left: u32, n: usize) {
    if pos == n - 1 {
        cur[pos] = left;
        out.push(cur.clone());
        cur[pos] = 0;
        return;
    }
    for e in 0..=left {
        cur[pos] = e;
        fill_monomials(out, cur, pos + 1, left - e, n);
        cur[pos] = 0;
    }
}

pub fn sym_dim(n: usize, k: i64) -> usize {
    if k < 0 {
        0
    } else {
        binomial(k as usize + n - 1, n - 1) as usize
    }
}

/// Degreewise realization of a graded module over the symmetric algebra:
/// piece dimensions and one raising matrix per basis vector of `W`, for all
/// internal degrees in a finite window.
#[derive(Clone, Debug)]
pub struct SModule<F: Field> {
    dim_w: usize,
    lo: i64,
    hi: i64,
    dims: Vec<usize>,
    /// `actions[d - lo][t]`: multiplication by `w_t`, `piece(d) -> piece(d+1)`,
    /// for `d` in `lo..hi`.
    actions: Vec<Vec<DenseMatrix<F>>>,
}

impl<F: Field> SModule<F> {
    pub fn dim_w(&self) -> usize {
        self.dim_w
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn piece_dim(&self, d: i64) -> usize {
        assert!(
            (self.lo..=self.hi).contains(&d),
            "degree {d} outside realized window [{}, {}]",
            self.lo,
            self.hi
        );
        self.dims[(d - self.lo) as usize]
    }

    /// Multiplication matrices `piece(d) -> piece(d+1)`.
    pub fn action(&self, d: i64) -> &[DenseMatrix<F>] {
        assert!((self.lo..self.hi).contains(&d), "action degree {d} out of window");
        &self.actions[(d - self.lo) as usize]
    }

    /// Check that the raising operators pairwise commute.
    pub fn validate(&self) -> Result<()> {
        for d in self.lo..self.hi - 1 {
            let now = self.action(d);
            let next = self.action(d + 1);
            for t in 0..self.dim_w {
                for u in t + 1..self.dim_w {
                    let tu = next[u].mul(&now[t]);
                    let ut = next[t].mul(&now[u]);
                    if tu != ut {
                        return Err(Error::Invariant(format!(
                            "symmetric actions w{t}, w{u} fail to commute at degree {d}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Realize the module of twisted global sections of a sheaf over a degree
/// window.
pub fn realize<F: Field>(spec: &SheafSpec, lo: i64, hi: i64) -> Result<SModule<F>> {
    spec.validate()?;
    assert!(lo <= hi);
    let m = match &spec.kind {
        SheafKind::Twist { d } => realize_twist(spec.dim_w, *d, lo, hi),
        SheafKind::Omega { a } => koszul_kernel_module(spec.dim_w, *a, lo, hi),
        SheafKind::Veronese { d, twist } => realize_veronese(*d, *twist, lo, hi),
        SheafKind::Quotient { gens } => {
            let parsed: Vec<SPoly> = gens
                .iter()
                .map(|g| parse_s_poly(g, spec.dim_w))
                .collect::<Result<_>>()?;
            let degs: Vec<i64> = parsed
                .iter()
                .map(|p| homogeneous_degree(p).unwrap_or(0) as i64)
                .collect();
            realize_presentation(spec.dim_w, &[0], &degs, &[parsed], lo, hi)
        }
        SheafKind::Presentation {
            row_twists,
            col_twists,
            entries,
        } => {
            let parsed: Vec<Vec<SPoly>> = entries
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|e| parse_s_poly(e, spec.dim_w))
                        .collect::<Result<_>>()
                })
                .collect::<Result<_>>()?;
            realize_presentation(spec.dim_w, row_twists, col_twists, &parsed, lo, hi)
        }
    };
    m.validate()?;
    Ok(m)
}

fn realize_twist<F: Field>(dim_w: usize, d: i64, lo: i64, hi: i64) -> SModule<F> {
    let dims: Vec<usize> = (lo..=hi).map(|k| sym_dim(dim_w, k + d)).collect();
    let mut actions = Vec::new();
    for k in lo..hi {
        actions.push(sym_mult_matrices(dim_w, k + d));
    }
    SModule {
        dim_w,
        lo,
        hi,
        dims,
        actions,
    }
}

/// Multiplication by each variable, `Sym^k -> Sym^(k+1)`.
fn sym_mult_matrices<F: Field>(n: usize, k: i64) -> Vec<DenseMatrix<F>> {
    let src = monomials(n, k);
    let dst = monomials(n, k + 1);
    let index: std::collections::BTreeMap<&[u32], usize> = dst
        .iter()
        .enumerate()
        .map(|(i, m)| (m.as_slice(), i))
        .collect();
    (0..n)
        .map(|t| {
            let mut m = DenseMatrix::zero(dst.len(), src.len());
            for (j, e) in src.iter().enumerate() {
                let mut up = e.clone();
                up[t] += 1;
                m.set(index[up.as_slice()], j, F::one());
            }
            m
        })
        .collect()
}

/// The kernel of the Koszul contraction from the `a`-th wedge power tensor
/// the symmetric algebra to the `(a-1)`-st, degreewise. Its sheaf is the
/// `a`-th twisted cotangent sheaf; its pieces compute the global sections of
/// its positive twists.
pub fn koszul_kernel_module<F: Field>(dim_w: usize, a: usize, lo: i64, hi: i64) -> SModule<F> {
    if a == 0 {
        return realize_twist(dim_w, 0, lo, hi);
    }
    // Kernel embeddings per degree.
    let mut embeds: Vec<DenseMatrix<F>> = Vec::new();
    for k in lo..=hi {
        embeds.push(koszul_slice::<F>(dim_w, a, k).kernel_basis());
    }
    let dims: Vec<usize> = embeds.iter().map(DenseMatrix::cols).collect();
    let mut actions = Vec::new();
    for k in lo..hi {
        let idx = (k - lo) as usize;
        let amb = wedge_sym_mult::<F>(dim_w, a, k);
        let acts = (0..dim_w)
            .map(|t| {
                let image = amb[t].mul(&embeds[idx]);
                embeds[idx + 1]
                    .solve(&image)
                    .expect("multiplication preserves the Koszul kernel")
            })
            .collect();
        actions.push(acts);
    }
    SModule {
        dim_w,
        lo,
        hi,
        dims,
        actions,
    }
}

/// Matrix of the Koszul contraction in one degree. Basis of each side is
/// wedge-major: index = wedge rank * sym dim + monomial rank.
fn koszul_slice<F: Field>(n: usize, a: usize, k: i64) -> DenseMatrix<F> {
    let src_sets = subsets(n, a);
    let dst_sets = subsets(n, a - 1);
    let src_mono = monomials(n, k);
    let dst_mono = monomials(n, k + 1);
    let mono_index: std::collections::BTreeMap<&[u32], usize> = dst_mono
        .iter()
        .enumerate()
        .map(|(i, m)| (m.as_slice(), i))
        .collect();
    let mut m = DenseMatrix::zero(dst_sets.len() * dst_mono.len(), src_sets.len() * src_mono.len());
    for (si, set) in src_sets.iter().enumerate() {
        for (pos, &var) in set.iter().enumerate() {
            let reduced: Vec<usize> = set
                .iter()
                .copied()
                .filter(|&v| v != var)
                .collect();
            let ti = subset_rank(n, &reduced);
            let sign = pos % 2 == 0;
            for (mj, e) in src_mono.iter().enumerate() {
                let mut up = e.clone();
                up[var] += 1;
                let tj = mono_index[up.as_slice()];
                let v = if sign { F::one() } else { F::one().neg() };
                m.set(ti * dst_mono.len() + tj, si * src_mono.len() + mj, v);
            }
        }
    }
    m
}

/// Multiplication by each variable on the ambient `wedge^a W ⊗ Sym`.
fn wedge_sym_mult<F: Field>(n: usize, a: usize, k: i64) -> Vec<DenseMatrix<F>> {
    let sets = binomial(n, a) as usize;
    let sym = sym_mult_matrices::<F>(n, k);
    let src = sym_dim(n, k);
    let dst = sym_dim(n, k + 1);
    (0..n)
        .map(|t| {
            let mut m = DenseMatrix::zero(sets * dst, sets * src);
            for b in 0..sets {
                for j in 0..src {
                    for i in 0..dst {
                        let v = sym[t].get(i, j);
                        if !v.is_zero() {
                            m.set(b * dst + i, b * src + j, v.clone());
                        }
                    }
                }
            }
            m
        })
        .collect()
}

fn realize_veronese<F: Field>(d: usize, twist: i64, lo: i64, hi: i64) -> SModule<F> {
    let line_dim = |k: i64| -> usize {
        let m = twist + (d as i64) * k;
        if m >= 0 {
            (m + 1) as usize
        } else {
            0
        }
    };
    let dims: Vec<usize> = (lo..=hi).map(line_dim).collect();
    let mut actions = Vec::new();
    for k in lo..hi {
        let src = line_dim(k);
        let dst = line_dim(k + 1);
        let acts = (0..=d)
            .map(|t| {
                let mut m = DenseMatrix::zero(dst, src);
                for j in 0..src {
                    // Basis of binary forms ordered by the exponent of the
                    // first coordinate; multiplying by the degree-d monomial
                    // with first-coordinate exponent t shifts by t.
                    if j + t < dst {
                        m.set(j + t, j, F::one());
                    }
                }
                m
            })
            .collect();
        actions.push(acts);
    }
    SModule {
        dim_w: d + 1,
        lo,
        hi,
        dims,
        actions,
    }
}

fn realize_presentation<F: Field>(
    dim_w: usize,
    row_twists: &[i64],
    col_twists: &[i64],
    entries: &[Vec<SPoly>],
    lo: i64,
    hi: i64,
) -> SModule<F> {
    // Coordinates of the ambient free module at degree k: per row i, the
    // monomials of degree k - row_twists[i].
    let block_dims = |k: i64| -> Vec<usize> {
        row_twists.iter().map(|t| sym_dim(dim_w, k - t)).collect()
    };
    let span_at = |k: i64| -> DenseMatrix<F> {
        let blocks = block_dims(k);
        let total: usize = blocks.iter().sum();
        let mut cols: Vec<Vec<F>> = Vec::new();
        for (j, ct) in col_twists.iter().enumerate() {
            for mono in monomials(dim_w, k - ct) {
                let mut v = vec![F::zero(); total];
                let mut offset = 0;
                for (i, rt) in row_twists.iter().enumerate() {
                    let target = monomials(dim_w, k - rt);
                    let index: std::collections::BTreeMap<&[u32], usize> = target
                        .iter()
                        .enumerate()
                        .map(|(ix, m)| (m.as_slice(), ix))
                        .collect();
                    for (e, c) in &entries[i][j] {
                        let prod: Vec<u32> =
                            e.iter().zip(&mono).map(|(x, y)| x + y).collect();
                        if let Some(&ix) = index.get(prod.as_slice()) {
                            v[offset + ix] = v[offset + ix].add(&F::from_i64(*c));
                        }
                    }
                    offset += blocks[i];
                }
                cols.push(v);
            }
        }
        let total_cols = cols.len();
        DenseMatrix::from_fn(total, total_cols, |i, j| cols[j][i].clone())
    };
    let reducers: Vec<SpanComplement<F>> = (lo..=hi).map(|k| SpanComplement::new(&span_at(k))).collect();
    let dims: Vec<usize> = reducers.iter().map(|r| r.free.len()).collect();
    let mut actions = Vec::new();
    for k in lo..hi {
        let idx = (k - lo) as usize;
        let blocks = block_dims(k);
        let blocks_up = block_dims(k + 1);
        let acts: Vec<DenseMatrix<F>> = (0..dim_w)
            .map(|t| {
                let mut m = DenseMatrix::zero(dims[idx + 1], dims[idx]);
                for (col, &coord) in reducers[idx].free.iter().enumerate() {
                    // Identify the (row block, monomial) behind the ambient
                    // coordinate, multiply by w_t, reduce upstairs.
                    let (block, local) = split_coord(&blocks, coord);
                    let mono = &monomials(dim_w, k - row_twists[block])[local];
                    let mut up = mono.clone();
                    up[t] += 1;
                    let target = monomials(dim_w, k + 1 - row_twists[block]);
                    let pos = target
                        .iter()
                        .position(|m| m == &up)
                        .expect("shifted monomial exists");
                    let offset: usize = blocks_up[..block].iter().sum();
                    let total_up: usize = blocks_up.iter().sum();
                    let mut v = vec![F::zero(); total_up];
                    v[offset + pos] = F::one();
                    let reduced = reducers[idx + 1].reduce(&v);
                    for (row, val) in reduced.into_iter().enumerate() {
                        if !val.is_zero() {
                            m.set(row, col, val);
                        }
                    }
                }
                m
            })
            .collect();
        actions.push(acts);
    }
    SModule {
        dim_w,
        lo,
        hi,
        dims,
        actions,
    }
}

fn split_coord(blocks: &[usize], coord: usize) -> (usize, usize) {
    let mut rest = coord;
    for (b, &len) in blocks.iter().enumerate() {
        if rest < len {
            return (b, rest);
        }
        rest -= len;
    }
    panic!("coordinate out of range");
}

/// Greedy complement of a column span: the coordinates not hit by pivots of
/// the row-reduced span, together with the reduction map onto them.
pub struct SpanComplement<F: Field> {
    /// Coordinates whose classes form a basis of the quotient.
    pub free: Vec<usize>,
    rows: DenseMatrix<F>,
    pivots: Vec<usize>,
}

impl<F: Field> SpanComplement<F> {
    pub fn new(span_cols: &DenseMatrix<F>) -> Self {
        let (rows, pivots) = span_cols.transpose().rref();
        let free = (0..span_cols.rows())
            .filter(|c| !pivots.contains(c))
            .collect();
        SpanComplement { free, rows, pivots }
    }

    /// Express a vector modulo the span in the free-coordinate basis.
    pub fn reduce(&self, v: &[F]) -> Vec<F> {
        let mut u = v.to_vec();
        for (i, &p) in self.pivots.iter().enumerate() {
            if u[p].is_zero() {
                continue;
            }
            let c = u[p].clone();
            for j in 0..u.len() {
                let r = self.rows.get(i, j);
                if !r.is_zero() {
                    u[j] = u[j].sub(&c.mul(r));
                }
            }
        }
        self.free.iter().map(|&j| u[j].clone()).collect()
    }
}

/// Degreewise realization of a graded module over the exterior algebra on
/// the dual of `W`: generators lower degree by one.
#[derive(Clone, Debug)]
pub struct EModule<F: Field> {
    pub dim_w: usize,
    pub lo: i64,
    pub hi: i64,
    pub dims: Vec<usize>,
    /// `actions[d - lo - 1][t]`: contraction by `w_t*`, `piece(d) -> piece(d-1)`,
    /// for `d` in `lo+1..=hi`.
    actions: Vec<Vec<DenseMatrix<F>>>,
}

impl<F: Field> EModule<F> {
    pub fn new(
        dim_w: usize,
        lo: i64,
        hi: i64,
        dims: Vec<usize>,
        actions: Vec<Vec<DenseMatrix<F>>>,
    ) -> Self {
        assert_eq!(dims.len(), (hi - lo + 1) as usize);
        assert_eq!(actions.len(), (hi - lo) as usize);
        EModule {
            dim_w,
            lo,
            hi,
            dims,
            actions,
        }
    }

    pub fn piece_dim(&self, d: i64) -> usize {
        if (self.lo..=self.hi).contains(&d) {
            self.dims[(d - self.lo) as usize]
        } else {
            0
        }
    }

    /// Contraction matrices `piece(d) -> piece(d-1)`.
    pub fn action(&self, d: i64) -> &[DenseMatrix<F>] {
        assert!((self.lo + 1..=self.hi).contains(&d));
        &self.actions[(d - self.lo - 1) as usize]
    }

    /// Anticommutativity and square-zero of the contractions.
    pub fn validate(&self) -> Result<()> {
        for d in self.lo + 2..=self.hi {
            let now = self.action(d);
            let next = self.action(d - 1);
            for t in 0..self.dim_w {
                for u in t..self.dim_w {
                    let tu = next[u].mul(&now[t]);
                    let ut = next[t].mul(&now[u]);
                    let ok = if t == u {
                        tu.is_zero()
                    } else {
                        // w_u* then w_t* equals minus w_t* then w_u*.
                        let mut sum = tu.clone();
                        for i in 0..sum.rows() {
                            for j in 0..sum.cols() {
                                let v = tu.get(i, j).add(ut.get(i, j));
                                sum.set(i, j, v);
                            }
                        }
                        sum.is_zero()
                    };
                    if !ok {
                        return Err(Error::Invariant(format!(
                            "exterior actions w{t}*, w{u}* fail to anticommute at degree {d}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// The free exterior-side module on a term, realized over a window.
///
/// The action of `w_t` on the summand of twist `a` carries an extra global
/// sign `(-1)^a`. With that convention every degree-zero map between terms
/// commutes with the action on the nose, so kernels of differentials are
/// honest submodules even when the summand twists mix parities.
pub fn term_emodule<F: Field>(term: &Term, dim_w: usize, lo: i64, hi: i64) -> EModule<F> {
    let dims: Vec<usize> = (lo..=hi)
        .map(|d| TermLayout::new(term, dim_w, d).dim)
        .collect();
    let mut actions = Vec::new();
    for d in lo + 1..=hi {
        let src = TermLayout::new(term, dim_w, d);
        let tgt = TermLayout::new(term, dim_w, d - 1);
        let acts: Vec<DenseMatrix<F>> = (0..dim_w)
            .map(|t| {
                let mut m = DenseMatrix::zero(tgt.dim, src.dim);
                for (si, part) in src.parts.iter().enumerate() {
                    let Some((w, sets, _)) = part else { continue };
                    let Some((_, tsets, _)) = tgt.parts[si].as_ref() else {
                        continue;
                    };
                    let mult = term[si].mult;
                    let odd_twist = term[si].twist.rem_euclid(2) == 1;
                    for (ir, iset) in sets.iter().enumerate() {
                        if !iset.contains(&t) {
                            continue;
                        }
                        let reduced: Vec<usize> =
                            iset.iter().copied().filter(|&v| v != t).collect();
                        let sign = shuffle_sign(&reduced, &[t]).expect("disjoint");
                        let jr = tsets
                            .iter()
                            .position(|s| s == &reduced)
                            .expect("reduced subset exists");
                        debug_assert_eq!(reduced.len() + 1, *w);
                        for h in 0..mult {
                            let negative = (sign < 0) != odd_twist;
                            let v = if negative { F::one().neg() } else { F::one() };
                            m.set(tgt.index(si, h, jr), src.index(si, h, ir), v);
                        }
                    }
                }
                m
            })
            .collect();
        actions.push(acts);
    }
    EModule::new(dim_w, lo, hi, dims, actions)
}

/// Minimal generators of an exterior-side module, found from the top degree
/// down: in each degree, a greedy complement of the span of contractions
/// from one degree up. Returns `(degree, columns of generator vectors)`
/// pairs for degrees that contribute, in ascending degree order.
///
/// The window must cover the support of the module from above: pieces above
/// `hi` are taken to be zero.
pub fn e_minimal_generators<F: Field>(em: &EModule<F>) -> Vec<(i64, DenseMatrix<F>)> {
    let mut out = Vec::new();
    for d in (em.lo..=em.hi).rev() {
        let dim = em.piece_dim(d);
        if dim == 0 {
            continue;
        }
        let above = em.piece_dim(d + 1);
        let image = if above == 0 {
            DenseMatrix::zero(dim, 0)
        } else {
            let acts = em.action(d + 1);
            let mut stacked = acts[0].clone();
            for a in &acts[1..] {
                stacked = stacked.hstack(a);
            }
            stacked
        };
        let comp = SpanComplement::new(&image);
        if comp.free.is_empty() {
            continue;
        }
        let mut gens = DenseMatrix::zero(dim, comp.free.len());
        for (c, &coord) in comp.free.iter().enumerate() {
            gens.set(coord, c, F::one());
        }
        out.push((d, gens));
    }
    out.reverse();
    out
}

/// Check that the given generators cover the module degreewise and that no
/// generator is redundant. Used as a post-condition on resolution steps.
pub fn verify_minimal_cover<F: Field>(em: &EModule<F>, gens: &[(i64, DenseMatrix<F>)]) -> bool {
    let gen_at = |d: i64| gens.iter().find(|(gd, _)| *gd == d).map(|(_, m)| m);
    // Surjectivity: spans propagate downwards.
    let mut span_above: Option<DenseMatrix<F>> = None;
    for d in (em.lo..=em.hi).rev() {
        let dim = em.piece_dim(d);
        let mut cols: Option<DenseMatrix<F>> = gen_at(d).cloned();
        if let Some(prev) = &span_above {
            if prev.cols() > 0 && dim > 0 {
                for t in 0..em.dim_w {
                    let img = em.action(d + 1)[t].mul(prev);
                    cols = Some(match cols {
                        Some(c) => c.hstack(&img),
                        None => img,
                    });
                }
            }
        }
        let span = cols.unwrap_or_else(|| DenseMatrix::zero(dim, 0));
        if span.rank() < dim {
            return false;
        }
        // Minimality: generators are independent modulo the radical span.
        if let Some(g) = gen_at(d) {
            let radical: Option<DenseMatrix<F>> = span_above.as_ref().map(|prev| {
                let mut acc: Option<DenseMatrix<F>> = None;
                for t in 0..em.dim_w {
                    let img = em.action(d + 1)[t].mul(prev);
                    acc = Some(match acc {
                        Some(c) => c.hstack(&img),
                        None => img,
                    });
                }
                acc.unwrap()
            });
            let rad_rank = radical.as_ref().map_or(0, DenseMatrix::rank);
            let joint = match &radical {
                Some(r) => r.hstack(g),
                None => g.clone(),
            };
            if joint.rank() != rad_rank + g.cols() {
                return false;
            }
        }
        span_above = Some(span);
    }
    true
}

/// Closed-form sheaf cohomology dimensions used as oracles by the test
/// suites (never by the engine itself).
pub mod closed_forms {
    use crate::wedge::binomial;

    fn c(n: i64, k: i64) -> u64 {
        if n < 0 || k < 0 || k > n {
            0
        } else {
            binomial(n as usize, k as usize)
        }
    }

    /// `dim H^i` of the `k`-th twist of the `p`-th wedge of the cotangent
    /// bundle on projective `n`-space (Bott's formula).
    pub fn bott(n: usize, p: usize, k: i64, i: usize) -> u64 {
        assert!(p <= n && i <= n);
        let (n_i, p_i, i_i) = (n as i64, p as i64, i as i64);
        if i == 0 && k > p_i {
            return c(k + n_i - p_i, n_i - p_i) * c(k - 1, p_i);
        }
        if i_i == p_i && k == 0 {
            return 1;
        }
        if i == n && k < p_i - n_i {
            return c(p_i - k, -k) * c(-k - 1, n_i - p_i);
        }
        0
    }

    /// `dim H^i(O(d)(k))` on projective `n`-space.
    pub fn h_twist(n: usize, d: i64, k: i64, i: usize) -> u64 {
        bott(n, 0, d + k, i)
    }

    /// `dim H^i` of the `k`-th twist of `omega(a)` (the `a`-th wedge of the
    /// cotangent bundle twisted by `a`).
    pub fn h_omega(n: usize, a: usize, k: i64, i: usize) -> u64 {
        bott(n, a, a as i64 + k, i)
    }

    /// `dim H^i` of the `k`-th twist of the Veronese pushforward of
    /// `O(twist)` from the projective line.
    pub fn h_veronese(d: usize, twist: i64, k: i64, i: usize) -> u64 {
        let m = twist + (d as i64) * k;
        match i {
            0 if m >= 0 => (m + 1) as u64,
            1 if m <= -2 => (-m - 1) as u64,
            _ => 0,
        }
    }
}
