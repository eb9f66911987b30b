//! Versioned JSON forms of type D structures and DA bimodules.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{StructureError, TypeD, TypeDA};
use crate::arcdiagram::{ArcDiagram, ArcDiagramFile};
use crate::coeff::{FracScalar, Scalar, F2};
use crate::strandalg::{AlgRef, StrandAlgebra, TensorAlgebra};

pub const SCHEMA_TYPED: &str = "bsfloer.typed/1";
pub const SCHEMA_DA: &str = "bsfloer.da/1";

/// The algebra a structure is defined over.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum AlgebraSpec {
    Strand {
        diagram: ArcDiagramFile,
    },
    Tensor {
        left: ArcDiagramFile,
        right: ArcDiagramFile,
    },
}

impl AlgebraSpec {
    pub fn build(&self) -> Result<AlgRef, StructureError> {
        let mk = |f: &ArcDiagramFile| -> Result<Arc<StrandAlgebra>, StructureError> {
            let z =
                ArcDiagram::new(f.clone()).map_err(|e| StructureError::Schema(e.to_string()))?;
            Ok(StrandAlgebra::shared(&z))
        };
        Ok(match self {
            AlgebraSpec::Strand { diagram } => mk(diagram)?,
            AlgebraSpec::Tensor { left, right } => {
                Arc::new(TensorAlgebra::new(mk(left)?, mk(right)?))
            }
        })
    }

    pub fn of(alg: &AlgRef) -> Result<Self, StructureError> {
        let strand = |a: &AlgRef| {
            a.as_strand().map(|s| s.diagram().to_file()).ok_or_else(|| {
                StructureError::Schema("nested tensor algebras are not serializable".into())
            })
        };
        if let Some(s) = alg.as_strand() {
            return Ok(AlgebraSpec::Strand {
                diagram: s.diagram().to_file(),
            });
        }
        if let Some(t) = alg.as_tensor() {
            return Ok(AlgebraSpec::Tensor {
                left: strand(&t.left)?,
                right: strand(&t.right)?,
            });
        }
        Err(StructureError::Schema("algebra has no serial form".into()))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct GeneratorFile {
    pub name: String,
    pub idempotent: Value,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ArrowFile {
    pub from: String,
    pub to: String,
    pub algebra: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficient: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct TypeDFile {
    pub schema: String,
    pub coefficients: String,
    pub algebra: AlgebraSpec,
    pub generators: Vec<GeneratorFile>,
    pub arrows: Vec<ArrowFile>,
}

/// A type D structure with either coefficient field.
#[derive(Clone, Debug)]
pub enum AnyTypeD {
    F2(TypeD<F2>),
    Frac(TypeD<FracScalar>),
}

impl AnyTypeD {
    pub fn from_json(s: &str) -> Result<Self, StructureError> {
        let f: TypeDFile =
            serde_json::from_str(s).map_err(|e| StructureError::Schema(e.to_string()))?;
        if f.schema != SCHEMA_TYPED {
            return Err(StructureError::Schema(format!(
                "unknown schema {}",
                f.schema
            )));
        }
        match f.coefficients.as_str() {
            "F2" => Ok(AnyTypeD::F2(TypeD::from_file(&f)?)),
            "Frac" => Ok(AnyTypeD::Frac(TypeD::from_file(&f)?)),
            other => Err(StructureError::Schema(format!(
                "unknown coefficients {other}"
            ))),
        }
    }

    pub fn to_frac(&self) -> TypeD<FracScalar> {
        match self {
            AnyTypeD::F2(m) => m.to_frac(),
            AnyTypeD::Frac(m) => m.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String, StructureError> {
        match self {
            AnyTypeD::F2(m) => m.to_json(),
            AnyTypeD::Frac(m) => m.to_json(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            AnyTypeD::F2(m) => m.len(),
            AnyTypeD::Frac(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn alg(&self) -> &AlgRef {
        match self {
            AnyTypeD::F2(m) => &m.alg,
            AnyTypeD::Frac(m) => &m.alg,
        }
    }
}

fn schema_err(e: impl ToString) -> StructureError {
    StructureError::Schema(e.to_string())
}

fn gen_lookup(names: &BTreeMap<String, usize>, n: &str) -> Result<usize, StructureError> {
    names
        .get(n)
        .copied()
        .ok_or_else(|| StructureError::Schema(format!("unknown generator {n}")))
}

impl<K: Scalar> TypeD<K> {
    pub fn from_file(f: &TypeDFile) -> Result<Self, StructureError> {
        let alg = f.algebra.build()?;
        let mut m = TypeD::new(alg.clone());
        let mut names = BTreeMap::new();
        for g in &f.generators {
            let e = alg.from_json(&g.idempotent).map_err(schema_err)?;
            if !alg.is_idempotent(e) {
                return Err(StructureError::NotIdempotent(g.name.clone(), alg.label(e)));
            }
            if names.insert(g.name.clone(), m.len()).is_some() {
                return Err(StructureError::Schema(format!(
                    "duplicate generator {}",
                    g.name
                )));
            }
            m.add_generator(g.name.clone(), e);
        }
        for a in &f.arrows {
            let x = gen_lookup(&names, &a.from)?;
            let y = gen_lookup(&names, &a.to)?;
            let el = alg.from_json(&a.algebra).map_err(schema_err)?;
            let c = match &a.coefficient {
                Some(s) => K::parse(s).map_err(schema_err)?,
                None => K::one(),
            };
            m.add_arrow(x, el, y, c);
        }
        Ok(m)
    }

    pub fn to_file(&self) -> Result<TypeDFile, StructureError> {
        let alg = &self.alg;
        Ok(TypeDFile {
            schema: SCHEMA_TYPED.into(),
            coefficients: K::NAME.into(),
            algebra: AlgebraSpec::of(alg)?,
            generators: self
                .gens
                .iter()
                .map(|g| GeneratorFile {
                    name: g.name.clone(),
                    idempotent: alg.to_json(g.idem),
                })
                .collect(),
            arrows: self
                .delta
                .iter()
                .enumerate()
                .flat_map(|(x, arrows)| {
                    arrows.iter().map(move |(&(a, y), c)| ArrowFile {
                        from: self.gens[x].name.clone(),
                        to: self.gens[y].name.clone(),
                        algebra: alg.to_json(a),
                        coefficient: if c == &K::one() {
                            None
                        } else {
                            Some(c.to_text())
                        },
                    })
                })
                .collect(),
        })
    }

    pub fn to_json(&self) -> Result<String, StructureError> {
        serde_json::to_string_pretty(&self.to_file()?).map_err(schema_err)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DaGeneratorFile {
    pub name: String,
    pub left_idempotent: Value,
    pub right_idempotent: Value,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct OperationFile {
    pub from: String,
    pub inputs: Vec<Value>,
    pub output: Value,
    pub to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficient: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DaFile {
    pub schema: String,
    pub coefficients: String,
    pub left_algebra: ArcDiagramFile,
    pub right_algebra: ArcDiagramFile,
    pub generators: Vec<DaGeneratorFile>,
    pub operations: Vec<OperationFile>,
}

impl<K: Scalar> TypeDA<K> {
    pub fn from_file(f: &DaFile) -> Result<Self, StructureError> {
        if f.schema != SCHEMA_DA {
            return Err(StructureError::Schema(format!(
                "unknown schema {}",
                f.schema
            )));
        }
        if f.coefficients != K::NAME {
            return Err(StructureError::Schema(format!(
                "expected {} coefficients, found {}",
                K::NAME,
                f.coefficients
            )));
        }
        let build = |d: &ArcDiagramFile| -> Result<AlgRef, StructureError> {
            let z = ArcDiagram::new(d.clone()).map_err(schema_err)?;
            Ok(StrandAlgebra::shared(&z))
        };
        let (left, right) = (build(&f.left_algebra)?, build(&f.right_algebra)?);
        let mut m = TypeDA::new(left.clone(), right.clone());
        let mut names = BTreeMap::new();
        for g in &f.generators {
            let l = left.from_json(&g.left_idempotent).map_err(schema_err)?;
            let r = right.from_json(&g.right_idempotent).map_err(schema_err)?;
            if !left.is_idempotent(l) || !right.is_idempotent(r) {
                return Err(StructureError::NotIdempotent(
                    g.name.clone(),
                    "left/right".into(),
                ));
            }
            names.insert(g.name.clone(), m.len());
            m.add_generator(g.name.clone(), l, r);
        }
        for op in &f.operations {
            let x = gen_lookup(&names, &op.from)?;
            let y = gen_lookup(&names, &op.to)?;
            let inputs = op
                .inputs
                .iter()
                .map(|v| right.from_json(v).map_err(schema_err))
                .collect::<Result<Vec<_>, _>>()?;
            let out = left.from_json(&op.output).map_err(schema_err)?;
            let c = match &op.coefficient {
                Some(s) => K::parse(s).map_err(schema_err)?,
                None => K::one(),
            };
            m.add_op(x, inputs, out, y, c);
        }
        Ok(m)
    }

    pub fn to_file(&self) -> Result<DaFile, StructureError> {
        let diag = |a: &AlgRef| {
            a.as_strand()
                .map(|s| s.diagram().to_file())
                .ok_or_else(|| StructureError::Schema("DA algebras must be strand algebras".into()))
        };
        Ok(DaFile {
            schema: SCHEMA_DA.into(),
            coefficients: K::NAME.into(),
            left_algebra: diag(&self.left)?,
            right_algebra: diag(&self.right)?,
            generators: self
                .gens
                .iter()
                .map(|g| DaGeneratorFile {
                    name: g.name.clone(),
                    left_idempotent: self.left.to_json(g.left_idem),
                    right_idempotent: self.right.to_json(g.right_idem),
                })
                .collect(),
            operations: self
                .ops
                .iter()
                .flat_map(|((x, inputs), arrows)| {
                    arrows.iter().map(move |(&(b, y), c)| OperationFile {
                        from: self.gens[*x].name.clone(),
                        inputs: inputs.iter().map(|&a| self.right.to_json(a)).collect(),
                        output: self.left.to_json(b),
                        to: self.gens[y].name.clone(),
                        coefficient: if c == &K::one() {
                            None
                        } else {
                            Some(c.to_text())
                        },
                    })
                })
                .collect(),
        })
    }

    pub fn to_json(&self) -> Result<String, StructureError> {
        serde_json::to_string_pretty(&self.to_file()?).map_err(schema_err)
    }
}
