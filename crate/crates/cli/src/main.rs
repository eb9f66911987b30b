//! Command-line front end: parse inputs, dispatch to the library, emit
//! deterministic JSON reports.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use bsfloer::arcdiagram::{ArcDiagram, ArcDiagramError};
use bsfloer::bimodlib::{dd_to_da, BimodError, TwistFactorization};
use bsfloer::coeff::{RankMode, F2};
use bsfloer::heegaard::{HeegaardError, NiceDiagram, SCHEMA_HEEGAARD};
use bsfloer::pipeline::{
    assemble, detect_boundary_parallel, detect_compressing_disk, sutured_pairing_dual,
    FactoredDescription, InputHash, PipelineError, Verdict, SCHEMA_FACTORED,
};
use bsfloer::strandalg::{mul_sums, Algebra, StrandAlgebra};
use bsfloer::structures::{
    box_tensor, ensure_valid, mor_complex, reduce, AnyTypeD, DaFile, StructureError, TypeD, TypeDA,
    DEFAULT_ITERATION_CAP, SCHEMA_DA, SCHEMA_TYPED,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "bsfloer",
    version,
    about = "Bordered-sutured Floer invariants and detectors"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Probabilistic,
    Exact,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Args)]
struct Common {
    /// Rank computation over the fraction field.
    #[arg(long, value_enum, default_value = "probabilistic")]
    mode: Mode,
    /// Seed for probabilistic rank evaluation.
    #[arg(long, env = "BSFLOER_SEED", default_value_t = 0)]
    seed: u64,
    /// Homological reduction of modules before use.
    #[arg(long, value_enum, default_value = "on")]
    reduce: OnOff,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include wall-clock timing in verdicts (makes reports non-reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Subcommand)]
enum Verb {
    /// Dimension and chord relation table of A(𝒵).
    Algebra {
        #[arg(long)]
        arc_diagram: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Load a module (typed file, nice diagram or factored description) and print it.
    Module {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Box tensor product of a bimodule with a module.
    Tensor {
        #[arg(long)]
        bimodule: PathBuf,
        #[arg(long)]
        module: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Size and homology of the morphism complex Mor(left, right).
    Mor {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Homology rank of Mor(left, right).
    Homology {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Decide whether the boundary has a homologically essential compressing disk.
    DetectDisk {
        #[arg(long)]
        cfd: PathBuf,
        #[arg(long)]
        pmc: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Decide whether a tangle is partly boundary parallel.
    DetectTangle {
        #[arg(long)]
        bsd: PathBuf,
        /// Paired boundary components as `i:j`; repeatable.
        #[arg(long = "pairing", value_parser = parse_pair, default_value = "0:1")]
        pairing: Vec<(usize, usize)>,
        #[command(flatten)]
        common: Common,
    },
    /// Sutured Floer rank of the orientation reverse of `left` glued to `right`.
    Pair {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Validate an input file against its schema and report diagnostics.
    Validate {
        #[arg(long)]
        diagram: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(':').ok_or("expected i:j")?;
    Ok((
        a.trim().parse().map_err(|e| format!("{e}"))?,
        b.trim().parse().map_err(|e| format!("{e}"))?,
    ))
}

impl Common {
    fn rank_mode(&self) -> RankMode {
        match self.mode {
            Mode::Exact => RankMode::Exact,
            Mode::Probabilistic => RankMode::DEFAULT_PROBABILISTIC,
        }
    }

    fn reduced(&self, m: TypeD<F2>) -> TypeD<F2> {
        if self.reduce == OnOff::On {
            reduce(&m)
        } else {
            m
        }
    }

    fn emit(&self, report: &Value) -> Result<()> {
        let mut s = serde_json::to_string_pretty(report)?;
        s.push('\n');
        match &self.out {
            Some(p) => std::fs::write(p, s).with_context(|| format!("writing {}", p.display()))?,
            None => print!("{s}"),
        }
        Ok(())
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(p) = cause.downcast_ref::<PipelineError>() {
            if p.is_cap() {
                return 5;
            }
            match p {
                PipelineError::Schema(_)
                | PipelineError::Heegaard(_)
                | PipelineError::Diagram(_) => return 2,
                PipelineError::Interface { .. } => return 3,
                PipelineError::ModeDisagreement { .. } => return 4,
                _ => continue,
            }
        }
        if let Some(b) = cause.downcast_ref::<BimodError>() {
            match b {
                BimodError::BackendDisagreement(_) => return 4,
                BimodError::NotCircle | BimodError::Configuration(_) | BimodError::Unpaired(_) => {
                    return 3
                }
                BimodError::Heegaard(_) => return 2,
                _ => continue,
            }
        }
        if let Some(s) = cause.downcast_ref::<StructureError>() {
            return match s {
                StructureError::IterationCap(_) => 5,
                StructureError::AlgebraMismatch(..) => 3,
                StructureError::Schema(_) | StructureError::NotIdempotent(..) => 2,
                StructureError::BadInduction(_) | StructureError::Check(_) => 1,
            };
        }
        if cause.is::<HeegaardError>()
            || cause.is::<ArcDiagramError>()
            || cause.is::<serde_json::Error>()
            || cause.is::<SchemaFailure>()
        {
            return 2;
        }
        if cause.is::<InterfaceFailure>() {
            return 3;
        }
    }
    1
}

#[derive(Debug)]
struct SchemaFailure(String);

impl std::fmt::Display for SchemaFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "schema: {}", self.0)
    }
}

impl std::error::Error for SchemaFailure {}

#[derive(Debug)]
struct InterfaceFailure(String);

impl std::fmt::Display for InterfaceFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "interface mismatch: {}", self.0)
    }
}

impl std::error::Error for InterfaceFailure {}

/// A loaded input with the hashes of every file it was read from.
struct Loaded<T> {
    value: T,
    inputs: Vec<InputHash>,
    pieces: Vec<String>,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn schema_of(src: &str, path: &Path) -> Result<String> {
    let v: Value =
        serde_json::from_str(src).with_context(|| format!("parsing {}", path.display()))?;
    Ok(v.get("schema")
        .and_then(Value::as_str)
        .unwrap_or("")
        .to_string())
}

fn piece_files(d: &FactoredDescription, base: &Path) -> Result<Vec<InputHash>> {
    use bsfloer::pipeline::Piece;
    let mut out = Vec::new();
    for p in &d.pieces {
        if let Piece::NiceDiagram { path } | Piece::Typed { path } = p {
            let full = base.join(path);
            let bytes =
                std::fs::read(&full).with_context(|| format!("reading {}", full.display()))?;
            out.push(InputHash::of(path.clone(), &bytes));
        }
    }
    Ok(out)
}

/// A type D structure from a typed file, a nice diagram or a factored description.
fn load_module(path: &Path) -> Result<Loaded<TypeD<F2>>> {
    let src = read(path)?;
    let name = path.display().to_string();
    let mut inputs = vec![InputHash::of(name.clone(), src.as_bytes())];
    let schema = schema_of(&src, path)?;
    let (value, pieces) = if schema == SCHEMA_TYPED {
        match AnyTypeD::from_json(&src)? {
            AnyTypeD::F2(m) => {
                ensure_valid(&m)?;
                (m, vec![format!("typed {name}")])
            }
            AnyTypeD::Frac(_) => {
                return Err(SchemaFailure("expected F2 coefficients".into()).into())
            }
        }
    } else if schema == SCHEMA_HEEGAARD {
        (
            NiceDiagram::from_json(&src)?.bsd()?,
            vec![format!("nice-diagram {name}")],
        )
    } else if schema == SCHEMA_FACTORED {
        let d = FactoredDescription::from_json(&src)?;
        let base = path.parent().unwrap_or(Path::new("."));
        inputs.extend(piece_files(&d, base)?);
        let a = assemble(&d, base)?;
        (a.module, a.pieces)
    } else {
        return Err(SchemaFailure(format!("{name}: unsupported schema {schema:?}")).into());
    };
    if value.alg.as_tensor().is_some() {
        return Err(InterfaceFailure(format!("{name} is a bimodule, expected a module")).into());
    }
    Ok(Loaded {
        value,
        inputs,
        pieces,
    })
}

/// A type DA bimodule from a DA file, a DD typed file or a two-sided nice diagram.
fn load_bimodule(path: &Path) -> Result<Loaded<TypeDA<F2>>> {
    let src = read(path)?;
    let name = path.display().to_string();
    let schema = schema_of(&src, path)?;
    let dd = if schema == SCHEMA_DA {
        let f: DaFile = serde_json::from_str(&src).map_err(|e| SchemaFailure(e.to_string()))?;
        return Ok(Loaded {
            value: TypeDA::from_file(&f)?,
            inputs: vec![InputHash::of(name.clone(), src.as_bytes())],
            pieces: vec![name],
        });
    } else if schema == SCHEMA_TYPED {
        match AnyTypeD::from_json(&src)? {
            AnyTypeD::F2(m) => m,
            AnyTypeD::Frac(_) => {
                return Err(SchemaFailure("expected F2 coefficients".into()).into())
            }
        }
    } else if schema == SCHEMA_HEEGAARD {
        NiceDiagram::from_json(&src)?.bsd()?
    } else {
        return Err(SchemaFailure(format!("{name}: unsupported schema {schema:?}")).into());
    };
    if dd.alg.as_tensor().is_none() {
        return Err(InterfaceFailure(format!("{name} is a module, expected a bimodule")).into());
    }
    let value = dd_to_da(&dd)?;
    Ok(Loaded {
        value,
        inputs: vec![InputHash::of(name.clone(), src.as_bytes())],
        pieces: vec![name],
    })
}

fn chord_name(z: &ArcDiagram, c: &bsfloer::arcdiagram::Chord) -> String {
    format!("[{},{}]", z.point_id(c.start), z.point_id(c.end))
}

fn algebra_report(path: &Path) -> Result<Value> {
    let src = read(path)?;
    let z = ArcDiagram::from_json(&src)?;
    let alg = StrandAlgebra::new(&z);
    let chords: Vec<_> = z.chords();
    let summands: Vec<usize> = (0..=z.num_pairs()).map(|k| alg.summand(k).len()).collect();
    let dimension = z.genus().map_or(alg.basis().len(), |g| summands[g]);
    // the relation table is read in the summand whose dimension is reported
    let in_summand = |x: &usize| z.genus().is_none_or(|g| alg.strand_count(*x) == g);
    let elements: Vec<Vec<usize>> = chords
        .iter()
        .map(|c| {
            Ok(alg
                .chord_element(c)?
                .into_iter()
                .filter(in_summand)
                .collect())
        })
        .collect::<Result<_, bsfloer::strandalg::AlgebraError>>()?;
    let mut relations = Vec::new();
    for (i, a) in elements.iter().enumerate() {
        for (j, b) in elements.iter().enumerate() {
            let p: Vec<usize> = mul_sums(&alg, a, b)
                .into_iter()
                .filter(in_summand)
                .collect();
            let product = if p.is_empty() {
                "0".to_string()
            } else if let Some(k) = elements.iter().position(|e| *e == p) {
                chord_name(&z, &chords[k])
            } else {
                p.iter()
                    .map(|&x| alg.label(x))
                    .collect::<Vec<_>>()
                    .join(" + ")
            };
            relations.push(json!({
                "left": chord_name(&z, &chords[i]),
                "right": chord_name(&z, &chords[j]),
                "product": product,
            }));
        }
    }
    Ok(json!({
        "input": InputHash::of(path.display().to_string(), src.as_bytes()),
        "dimension": dimension,
        "summands": summands,
        "total_dimension": alg.basis().len(),
        "idempotents": alg.idempotents().len(),
        "chords": chords.iter().map(|c| chord_name(&z, c)).collect::<Vec<_>>(),
        "relations": relations,
    }))
}

fn typed_value(m: TypeD<F2>) -> Result<Value> {
    Ok(serde_json::from_str(&AnyTypeD::F2(m).to_json()?)?)
}

fn finish(
    mut v: Verdict,
    inputs: Vec<InputHash>,
    pieces: Vec<String>,
    start: Instant,
    timing: bool,
) -> Value {
    v.inputs = inputs;
    v.pieces = pieces;
    if timing {
        v.timing_ms = Some(start.elapsed().as_millis() as u64);
    }
    serde_json::to_value(&v).expect("verdicts serialize")
}

fn run(verb: Verb) -> Result<()> {
    let start = Instant::now();
    match verb {
        Verb::Algebra {
            arc_diagram,
            common,
        } => common.emit(&algebra_report(&arc_diagram)?),
        Verb::Module { input, common } => {
            let m = load_module(&input)?;
            let module = common.reduced(m.value);
            common.emit(&json!({
                "inputs": m.inputs,
                "pieces": m.pieces,
                "generators": module.len(),
                "arrows": module.arrow_count(),
                "module": typed_value(module)?,
            }))
        }
        Verb::Tensor {
            bimodule,
            module,
            common,
        } => {
            let b = load_bimodule(&bimodule)?;
            let m = load_module(&module)?;
            if b.value.right.key() != m.value.alg.key() {
                return Err(InterfaceFailure(format!(
                    "bimodule acts on {} but module is over {}",
                    b.value.right.key(),
                    m.value.alg.key()
                ))
                .into());
            }
            let out = common.reduced(box_tensor(&b.value, &m.value, DEFAULT_ITERATION_CAP)?);
            let mut inputs = b.inputs;
            inputs.extend(m.inputs);
            common.emit(&json!({
                "inputs": inputs,
                "generators": out.len(),
                "arrows": out.arrow_count(),
                "module": typed_value(out)?,
            }))
        }
        Verb::Mor {
            left,
            right,
            common,
        } => {
            let (p, q, inputs) = pair_inputs(&left, &right, &common)?;
            let (cx, _) = mor_complex(&p, &q)?;
            let mode = common.rank_mode();
            let rank_d = cx.rank_d(mode, common.seed);
            common.emit(&json!({
                "inputs": inputs,
                "mode": mode.label(),
                "seed": common.seed,
                "dimension": cx.len(),
                "rank_d": rank_d,
                "homology_rank": cx.len() - 2 * rank_d,
            }))
        }
        Verb::Homology {
            left,
            right,
            common,
        } => {
            let (p, q, inputs) = pair_inputs(&left, &right, &common)?;
            let (cx, _) = mor_complex(&p, &q)?;
            let mode = common.rank_mode();
            common.emit(&json!({
                "inputs": inputs,
                "mode": mode.label(),
                "seed": common.seed,
                "homology_rank": cx.homology_rank(mode, common.seed),
            }))
        }
        Verb::DetectDisk { cfd, pmc, common } => {
            let z_src = read(&pmc)?;
            let z = ArcDiagram::from_json(&z_src)?;
            if !z.is_pmc() {
                return Err(InterfaceFailure(format!(
                    "{} is not a pointed matched circle",
                    pmc.display()
                ))
                .into());
            }
            let m = load_module(&cfd)?;
            if m.value.alg.key() != StrandAlgebra::shared(&z).key() {
                return Err(InterfaceFailure(format!(
                    "{} is not over the algebra of {}",
                    cfd.display(),
                    pmc.display()
                ))
                .into());
            }
            let module = common.reduced(m.value);
            let v = detect_compressing_disk(&module, common.rank_mode(), common.seed)?;
            let mut inputs = m.inputs;
            inputs.push(InputHash::of(pmc.display().to_string(), z_src.as_bytes()));
            common.emit(&finish(v, inputs, m.pieces, start, common.timing))
        }
        Verb::DetectTangle {
            bsd,
            pairing,
            common,
        } => {
            let m = load_module(&bsd)?;
            let module = common.reduced(m.value);
            let twists = vec![TwistFactorization::cut1_core(); pairing.len()];
            let v = detect_boundary_parallel(
                &module,
                &pairing,
                &twists,
                common.rank_mode(),
                common.seed,
            )?;
            common.emit(&finish(v, m.inputs, m.pieces, start, common.timing))
        }
        Verb::Pair {
            left,
            right,
            common,
        } => {
            let (p, q, inputs) = pair_inputs(&left, &right, &common)?;
            common.emit(&json!({
                "inputs": inputs,
                "homology_rank": sutured_pairing_dual(&p, &q)?,
            }))
        }
        Verb::Validate { diagram, common } => {
            let src = read(&diagram)?;
            let schema = schema_of(&src, &diagram)?;
            let name = diagram.display().to_string();
            let mut report = json!({
                "input": InputHash::of(name.clone(), src.as_bytes()),
                "schema": schema,
            });
            if schema.is_empty() {
                let z = ArcDiagram::from_json(&src)?;
                report["kind"] = json!("arc-diagram");
                report["points"] = json!(z.num_points());
                report["pmc"] = json!(z.is_pmc());
            } else if schema == SCHEMA_HEEGAARD {
                let d = NiceDiagram::from_json(&src)?;
                let m = d.bsd()?;
                report["kind"] = json!("nice-diagram");
                report["regions"] = json!(d.num_regions());
                report["generators"] = json!(m.len());
            } else {
                let m = load_module(&diagram)?;
                report["kind"] = json!("module");
                report["generators"] = json!(m.value.len());
            }
            report["valid"] = json!(true);
            common.emit(&report)
        }
    }
}

fn pair_inputs(
    left: &Path,
    right: &Path,
    common: &Common,
) -> Result<(TypeD<F2>, TypeD<F2>, Vec<InputHash>)> {
    let p = load_module(left)?;
    let q = load_module(right)?;
    if p.value.alg.key() != q.value.alg.key() {
        bail!(InterfaceFailure(format!(
            "{} and {} are over different algebras",
            left.display(),
            right.display()
        )));
    }
    let mut inputs = p.inputs;
    inputs.extend(q.inputs);
    Ok((common.reduced(p.value), common.reduced(q.value), inputs))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.verb) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let cap = anyhow::Error::from(PipelineError::Structure(StructureError::IterationCap(64)));
        assert_eq!(exit_code(&cap), 5);
        let disagree = anyhow::Error::from(PipelineError::ModeDisagreement {
            exact: 1,
            probabilistic: 0,
        });
        assert_eq!(exit_code(&disagree), 4);
        let backend = anyhow::Error::from(BimodError::BackendDisagreement("x".into()));
        assert_eq!(exit_code(&backend), 4);
        let schema = anyhow::Error::from(StructureError::Schema("x".into())).context("loading");
        assert_eq!(exit_code(&schema), 2);
        assert_eq!(
            exit_code(&anyhow::Error::from(InterfaceFailure("x".into()))),
            3
        );
    }
}
