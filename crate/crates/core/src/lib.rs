//! Exact linear algebra for sheaf cohomology on projective space.
//!
//! Everything is computed over an exact field (arbitrary-precision
//! rationals, or a prime field for speed) with deterministic output: the
//! same input yields byte-identical artifacts.
//!
//! The pipeline has three stages.
//!
//! 1. **Realize** a sheaf as a finite window of its graded module of twisted
//!    global sections, with the multiplication maps by the coordinate
//!    variables ([`algebra`]). Built-in families: twists of the structure
//!    sheaf, twisted wedge powers of the cotangent bundle, pushforwards of
//!    line bundles along Veronese embeddings of the line, and arbitrary
//!    quotients or cokernel presentations.
//!
//! 2. **Splice** the window into a segment of the sheaf's doubly infinite
//!    exact complex of free modules over the exterior algebra ([`tate`]):
//!    forward positions come from the module pieces at and above the
//!    regularity, earlier positions from iterated minimal covers of kernels.
//!
//! 3. **Collapse** the segment with the level-`ell` minor-substitution
//!    functor ([`weyman`]) into a finite complex of free modules over a
//!    polynomial ring in `ell * dim W` generic variables, whose entries are
//!    signed minors of the generic matrix. For the rational normal curve at
//!    level 2 the complex is two-term and its determinant computes the
//!    resultant of a pair of binary forms ([`resultant`]).
//!
//! Cohomology tables fall out of stage 2: the dimension of the `i`-th
//! cohomology of the `k`-th twist is the multiplicity of the summand of
//! twist `-k` at position `k + i`.

pub mod algebra;
pub mod cache;
pub mod error;
pub mod exterior;
pub mod field;
pub mod matrix;
pub mod poly;
pub mod resultant;
pub mod tate;
pub mod wedge;
pub mod weyman;

pub use algebra::{SheafKind, SheafSpec};
pub use cache::{cache_key, CacheDir, GcReport};
pub use error::{Error, Result};
pub use field::{Field, Fp, FpDefault, Rat, DEFAULT_PRIME};
pub use matrix::DenseMatrix;
pub use poly::{Poly, PolyMatrix, VarShape};
pub use resultant::{
    resultant_operator, resultant_vanishing_probe, sylvester_matrix, sylvester_resultant,
    ProbeReport, ResultantOperator,
};
pub use tate::{tate_segment, SegmentArtifact, TateSegment};
pub use weyman::{
    det_two_term, functor_injectivity_probe, weyman_complex, weyman_complex_from_segment,
    ComplexArtifact, WeymanComplex,
};
