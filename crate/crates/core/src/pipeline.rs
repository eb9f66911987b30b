//! Factored descriptions, assembly by box tensor products, and the two
//! detectors with their verdict reports.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::arcdiagram::{ArcDiagram, ArcDiagramError, ArcDiagramFile};
use crate::bimodlib::{
    arcslide_da, arcslide_inverse_da, cup_cap_dd, dd_to_da, frac_bimodule, interior_handle_dd,
    pointless_cap_dd, r_minus_handle_dd, r_plus_handle_dd, twisting_bimodule, ArcslideDatum,
    BimodError, CupKind, CupSign, HandleKind, TwistFactorization,
};
use crate::coeff::{RankMode, F2};
use crate::heegaard::{HeegaardError, NiceDiagram};
use crate::strandalg::{hom_projection, AlgebraError, StrandAlgebra};
use crate::structures::{
    box_tensor, box_tensor_ad, mor_complex, reduce, AnyTypeD, StructureError, TypeA, TypeD, TypeDA,
    DEFAULT_ITERATION_CAP,
};

pub const SCHEMA_FACTORED: &str = "bsfloer.factored/1";
pub const SCHEMA_VERDICT: &str = "bsfloer.verdict/1";

/// Largest morphism complex on which both rank modes are run and compared.
pub const EXACT_FEASIBLE_DIM: usize = 200;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("schema: {0}")]
    Schema(String),
    #[error("interface mismatch at piece {index}: {detail}")]
    Interface { index: usize, detail: String },
    #[error("rank modes disagree: exact {exact}, probabilistic {probabilistic}")]
    ModeDisagreement { exact: usize, probabilistic: usize },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Bimod(#[from] BimodError),
    #[error(transparent)]
    Heegaard(#[from] HeegaardError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Diagram(#[from] ArcDiagramError),
}

impl PipelineError {
    /// Whether the error comes from the iteration cap of a box tensor product.
    pub fn is_cap(&self) -> bool {
        matches!(
            self,
            PipelineError::Structure(StructureError::IterationCap(_))
                | PipelineError::Bimod(BimodError::Structure(StructureError::IterationCap(_)))
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HandleIndex {
    One,
    Two,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CupSignFile {
    RPlus,
    RMinus,
}

/// One piece of a factored description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "kind",
    rename_all = "kebab-case",
    rename_all_fields = "camelCase"
)]
pub enum Piece {
    /// A nice Heegaard diagram: one bordered side gives a type D structure,
    /// two sides give a bimodule.
    NiceDiagram {
        path: String,
    },
    /// A serialized type D structure over A(𝒵) or DD bimodule over a tensor
    /// product of two strand algebras.
    Typed {
        path: String,
    },
    Arcslide {
        source: ArcDiagramFile,
        moving: u32,
        over: u32,
        #[serde(default)]
        inverse: bool,
    },
    InteriorHandle {
        handle: HandleIndex,
        right: ArcDiagramFile,
        #[serde(default)]
        torus_first: bool,
    },
    RMinusHandle {
        diagram: ArcDiagramFile,
        b: u32,
        c: u32,
    },
    RPlusHandle {
        diagram: ArcDiagramFile,
        b: u32,
        c: u32,
    },
    Cup {
        diagram: ArcDiagramFile,
        interval: usize,
        sign: CupSignFile,
        #[serde(default)]
        cap: bool,
    },
    PointlessCap {
        diagram: ArcDiagramFile,
    },
    Identity {
        diagram: ArcDiagramFile,
    },
    /// Restriction to a full subdiagram: type D over A(small), acted on by
    /// A(big), for the point map small → big.
    Projection {
        small: ArcDiagramFile,
        big: ArcDiagramFile,
        points: BTreeMap<u32, u32>,
    },
}

impl Piece {
    pub fn name(&self) -> String {
        match self {
            Piece::NiceDiagram { path } => format!("nice-diagram {path}"),
            Piece::Typed { path } => format!("typed {path}"),
            Piece::Arcslide {
                moving,
                over,
                inverse,
                ..
            } => format!(
                "arcslide {moving} over {over}{}",
                if *inverse { " inverse" } else { "" }
            ),
            Piece::InteriorHandle { handle, .. } => {
                format!("interior {handle:?}-handle").to_lowercase()
            }
            Piece::RMinusHandle { b, c, .. } => format!("R- handle {{{b},{c}}}"),
            Piece::RPlusHandle { b, c, .. } => format!("R+ handle {{{b},{c}}}"),
            Piece::Cup { interval, cap, .. } => format!(
                "{} at interval {interval}",
                if *cap { "cap" } else { "cup" }
            ),
            Piece::PointlessCap { .. } => "pointless cap".into(),
            Piece::Identity { .. } => "identity".into(),
            Piece::Projection { .. } => "projection".into(),
        }
    }
}

/// A bordered-sutured manifold as a list of pieces in formula order: the
/// last piece is a type D structure and every other piece a bimodule acting
/// on the product of the pieces after it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactoredDescription {
    pub schema: String,
    pub pieces: Vec<Piece>,
}

impl FactoredDescription {
    pub fn new(pieces: Vec<Piece>) -> Self {
        FactoredDescription {
            schema: SCHEMA_FACTORED.into(),
            pieces,
        }
    }

    pub fn from_json(s: &str) -> Result<Self, PipelineError> {
        let d: FactoredDescription =
            serde_json::from_str(s).map_err(|e| PipelineError::Schema(e.to_string()))?;
        if d.schema != SCHEMA_FACTORED {
            return Err(PipelineError::Schema(format!(
                "unknown schema {}",
                d.schema
            )));
        }
        if d.pieces.is_empty() {
            return Err(PipelineError::Schema(
                "a description needs at least one piece".into(),
            ));
        }
        Ok(d)
    }
}

/// A piece evaluated to its algebraic invariant.
pub enum Evaluated {
    Module(TypeD<F2>),
    Bimodule(TypeDA<F2>),
}

fn read(base: &Path, path: &str) -> Result<String, PipelineError> {
    let p: PathBuf = base.join(path);
    std::fs::read_to_string(&p).map_err(|source| PipelineError::Io {
        path: p.display().to_string(),
        source,
    })
}

fn diagram(f: &ArcDiagramFile) -> Result<ArcDiagram, PipelineError> {
    Ok(ArcDiagram::new(f.clone())?)
}

fn module_or_bimodule(m: TypeD<F2>) -> Result<Evaluated, PipelineError> {
    if m.alg.as_tensor().is_some() {
        Ok(Evaluated::Bimodule(dd_to_da(&m)?))
    } else {
        Ok(Evaluated::Module(m))
    }
}

/// Evaluate one piece; file paths are resolved against `base`.
pub fn evaluate(piece: &Piece, base: &Path) -> Result<Evaluated, PipelineError> {
    let dd = |m: Result<TypeD<F2>, BimodError>| -> Result<Evaluated, PipelineError> {
        Ok(Evaluated::Bimodule(dd_to_da(&m?)?))
    };
    match piece {
        Piece::NiceDiagram { path } => {
            module_or_bimodule(NiceDiagram::from_json(&read(base, path)?)?.bsd()?)
        }
        Piece::Typed { path } => match AnyTypeD::from_json(&read(base, path)?)? {
            AnyTypeD::F2(m) => {
                crate::structures::ensure_valid(&m)?;
                module_or_bimodule(m)
            }
            AnyTypeD::Frac(_) => Err(PipelineError::Schema(
                "factored descriptions take F2 structures".into(),
            )),
        },
        Piece::Arcslide {
            source,
            moving,
            over,
            inverse,
        } => {
            let s = ArcslideDatum {
                source: diagram(source)?,
                moving: *moving,
                over: *over,
            };
            Ok(Evaluated::Bimodule(if *inverse {
                arcslide_inverse_da(&s)?
            } else {
                arcslide_da(&s)?
            }))
        }
        Piece::InteriorHandle {
            handle,
            right,
            torus_first,
        } => {
            let kind = match handle {
                HandleIndex::One => HandleKind::OneHandle,
                HandleIndex::Two => HandleKind::TwoHandle,
            };
            dd(interior_handle_dd(kind, &diagram(right)?, *torus_first))
        }
        Piece::RMinusHandle { diagram: z, b, c } => dd(r_minus_handle_dd(&diagram(z)?, *b, *c)),
        Piece::RPlusHandle { diagram: z, b, c } => dd(r_plus_handle_dd(&diagram(z)?, *b, *c)),
        Piece::Cup {
            diagram: z,
            interval,
            sign,
            cap,
        } => {
            let sign = match sign {
                CupSignFile::RPlus => CupSign::RPlus,
                CupSignFile::RMinus => CupSign::RMinus,
            };
            let kind = if *cap { CupKind::Cap } else { CupKind::Cup };
            dd(cup_cap_dd(&diagram(z)?, *interval, sign, kind))
        }
        Piece::PointlessCap { diagram: z } => dd(pointless_cap_dd(&diagram(z)?)),
        Piece::Identity { diagram: z } => Ok(Evaluated::Bimodule(TypeDA::identity(
            StrandAlgebra::shared(&diagram(z)?),
        ))),
        Piece::Projection { small, big, points } => {
            let s = StrandAlgebra::shared(&diagram(small)?);
            let b = StrandAlgebra::shared(&diagram(big)?);
            Ok(Evaluated::Bimodule(TypeDA::from_algebra_map(
                &hom_projection(&s, &b, points)?,
            )?))
        }
    }
}

/// The assembled module with the names of the pieces used.
pub struct Assembled {
    pub module: TypeD<F2>,
    pub pieces: Vec<String>,
}

/// Fold the pieces right to left over the final type D structure, reducing
/// after every box tensor product.
pub fn assemble(d: &FactoredDescription, base: &Path) -> Result<Assembled, PipelineError> {
    let n = d.pieces.len();
    let Some(last) = d.pieces.last() else {
        return Err(PipelineError::Schema("empty description".into()));
    };
    let mut cur = match evaluate(last, base)? {
        Evaluated::Module(m) => m,
        Evaluated::Bimodule(_) => {
            return Err(PipelineError::Interface {
                index: n - 1,
                detail: "the last piece must be a type D structure".into(),
            })
        }
    };
    for (index, piece) in d.pieces.iter().enumerate().rev().skip(1) {
        let da = match evaluate(piece, base)? {
            Evaluated::Bimodule(b) => b,
            Evaluated::Module(_) => {
                return Err(PipelineError::Interface {
                    index,
                    detail: "only the last piece may be a type D structure".into(),
                })
            }
        };
        if da.right.key() != cur.alg.key() {
            return Err(PipelineError::Interface {
                index,
                detail: format!("acts on {} but receives {}", da.right.key(), cur.alg.key()),
            });
        }
        cur = reduce(&box_tensor(&da, &cur, DEFAULT_ITERATION_CAP)?);
    }
    crate::structures::ensure_valid(&cur)?;
    Ok(Assembled {
        module: cur,
        pieces: d.pieces.iter().map(Piece::name).collect(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Answer {
    Compressible,
    Incompressible,
    PartlyBoundaryParallel,
    NotBoundaryParallel,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputHash {
    pub name: String,
    pub sha256: String,
}

impl InputHash {
    pub fn of(name: impl Into<String>, bytes: &[u8]) -> Self {
        InputHash {
            name: name.into(),
            sha256: hex::encode(Sha256::digest(bytes)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    /// Generators of the module being tested.
    pub module_generators: usize,
    /// Generators of the twisted module after reduction.
    pub twisted_generators: usize,
    /// Dimension of the morphism complex.
    pub complex_dim: usize,
    /// Rank of its differential.
    pub rank_d: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub schema: String,
    pub answer: Answer,
    pub rank: usize,
    pub mode: String,
    pub seed: u64,
    /// Result of running the other rank mode too, when the complex is small
    /// enough for exact elimination.
    pub modes_agree: Option<bool>,
    pub certificate: Certificate,
    pub pieces: Vec<String>,
    pub inputs: Vec<InputHash>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

impl Verdict {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdicts serialize")
    }
}

fn other_mode(mode: RankMode) -> RankMode {
    match mode {
        RankMode::Exact => RankMode::DEFAULT_PROBABILISTIC,
        RankMode::Probabilistic { .. } => RankMode::Exact,
    }
}

/// Rank of H_*(Mor(P, Q)) with the cross-mode check; returns the
/// certificate data and the agreement flag.
fn checked_rank<K: crate::coeff::Scalar>(
    p: &TypeD<K>,
    q: &TypeD<K>,
    mode: RankMode,
    seed: u64,
) -> Result<(usize, Certificate, Option<bool>), PipelineError> {
    let (cx, _) = mor_complex(p, q)?;
    let rank_d = cx.rank_d(mode, seed);
    let mut agree = None;
    if cx.len() <= EXACT_FEASIBLE_DIM && !cx.is_constant() {
        let other = cx.rank_d(other_mode(mode), seed);
        if other != rank_d {
            let (exact, probabilistic) = if mode == RankMode::Exact {
                (rank_d, other)
            } else {
                (other, rank_d)
            };
            return Err(PipelineError::ModeDisagreement {
                exact,
                probabilistic,
            });
        }
        agree = Some(true);
    } else if cx.is_constant() {
        // over F₂ both modes reduce to the same elimination
        agree = Some(true);
    }
    let cert = Certificate {
        module_generators: p.len(),
        twisted_generators: q.len(),
        complex_dim: cx.len(),
        rank_d,
    };
    Ok((cx.len() - 2 * rank_d, cert, agree))
}

/// Rank of Mor(CFD, F̄rac(𝒵) ⊠ CFD); zero exactly when the boundary has a
/// homologically essential compressing disk.
pub fn detect_compressing_disk(
    cfd: &TypeD<F2>,
    mode: RankMode,
    seed: u64,
) -> Result<Verdict, PipelineError> {
    let z = crate::structures::strand_of(&cfd.alg)
        .ok_or(BimodError::NotCircle)?
        .diagram()
        .clone();
    crate::structures::ensure_valid(cfd)?;
    let frac = frac_bimodule(&z)?;
    let m = cfd.to_frac();
    let twisted = reduce(&box_tensor(&frac, &m, DEFAULT_ITERATION_CAP)?);
    let (rank, certificate, modes_agree) = checked_rank(&m, &twisted, mode, seed)?;
    Ok(Verdict {
        schema: SCHEMA_VERDICT.into(),
        answer: if rank == 0 {
            Answer::Compressible
        } else {
            Answer::Incompressible
        },
        rank,
        mode: mode.label().into(),
        seed,
        modes_agree,
        certificate,
        pieces: Vec::new(),
        inputs: Vec::new(),
        timing_ms: None,
    })
}

/// Rank of Mor(BSD, τ̄ ⊠ BSD) for the twist on the given boundary pairs;
/// zero exactly when the tangle is partly boundary parallel (or, with a
/// single pair, when that component is boundary parallel).
pub fn detect_boundary_parallel(
    bsd: &TypeD<F2>,
    pairing: &[(usize, usize)],
    twists: &[TwistFactorization],
    mode: RankMode,
    seed: u64,
) -> Result<Verdict, PipelineError> {
    let z = crate::structures::strand_of(&bsd.alg)
        .ok_or_else(|| {
            PipelineError::Schema("the tangle module must be over one strand algebra".into())
        })?
        .diagram()
        .clone();
    crate::structures::ensure_valid(bsd)?;
    let tau = twisting_bimodule(&z, pairing, twists)?;
    let twisted = tau.apply(bsd)?;
    let (rank, certificate, modes_agree) = checked_rank(bsd, &twisted, mode, seed)?;
    Ok(Verdict {
        schema: SCHEMA_VERDICT.into(),
        answer: if rank == 0 {
            Answer::PartlyBoundaryParallel
        } else {
            Answer::NotBoundaryParallel
        },
        rank,
        mode: mode.label().into(),
        seed,
        modes_agree,
        certificate,
        pieces: Vec::new(),
        inputs: Vec::new(),
        timing_ms: None,
    })
}

/// Rank of the homology of A ⊠ D, the sutured Floer homology of the glued
/// manifold.
pub fn sutured_pairing(a: &TypeA<F2>, d: &TypeD<F2>) -> Result<usize, PipelineError> {
    if a.gens.is_empty() || d.is_empty() {
        return Err(PipelineError::Interface {
            index: 0,
            detail: "empty gluing".into(),
        });
    }
    if a.alg.key() != d.alg.key() {
        return Err(PipelineError::Interface {
            index: 0,
            detail: format!("{} vs {}", a.alg.key(), d.alg.key()),
        });
    }
    let cx = box_tensor_ad(a, d, DEFAULT_ITERATION_CAP)?;
    Ok(cx.homology_rank(RankMode::Exact, 0))
}

/// Glue the orientation reverse of `y1` to `y2`: the type A side of `y1`
/// is taken dual to its type D structure.
pub fn sutured_pairing_dual(y1: &TypeD<F2>, y2: &TypeD<F2>) -> Result<usize, PipelineError> {
    sutured_pairing(&TypeA::from_dual(y1), y2)
}
