//! `cpoly`: validate, analyze, deform and compare circle polyhedra.
//!
//! Exit codes: 0 success or true, 1 property false, 2 invalid input,
//! 3 numerical failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cpoly_core::continuation::{
    congruent_via_deformation, deform, fit_congruence, ContinuationError, DeformDirection,
    PathSpec, ViaDeformationOptions,
};
use cpoly_core::format::{self, FormatError, LoadedPolyhedron};
use cpoly_core::generate::{self, GenerateError};
use cpoly_core::moebius::MoebiusError;
use cpoly_core::properness::is_proper;
use cpoly_core::render::{render, Layers, RenderSpec};
use cpoly_core::rigidity::{jacobian, measure, numerical_rank};
use cpoly_core::{analyze, tolerance, CPolyhedron, ConfigurationState};

#[derive(Parser)]
#[command(name = "cpoly", version, about = "Circle polyhedra on the sphere")]
struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a file parses and describes a valid polyhedron.
    Validate { file: PathBuf },
    /// Convexity, hyperbolicity, shallowness, properness, tangent edges.
    Analyze { file: PathBuf },
    /// The inversive measure vector: edges in order, then vertices.
    Measures { file: PathBuf },
    /// Numerical rank of the measure Jacobian.
    Rank { file: PathBuf },
    /// Decide Möbius congruence of two locally congruent polyhedra.
    Congruent(CongruentArgs),
    /// Pull tangent disks apart (or into overlap) while holding all other measures.
    Deform(DeformArgs),
    /// Write a canonical instance.
    Generate(GenerateArgs),
    /// Stereographic SVG picture.
    Render(RenderArgs),
}

#[derive(Args)]
struct CongruentArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long)]
    via_deformation: bool,
    #[arg(long, default_value_t = 0.1)]
    mu: f64,
    #[arg(long, default_value_t = 10)]
    steps: usize,
    #[arg(long, default_value_t = tolerance::CONGRUENCE)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    anchor_face: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    Disjoint,
    Overlap,
}

#[derive(Args)]
struct DeformArgs {
    file: PathBuf,
    #[arg(long)]
    mu: f64,
    #[arg(long)]
    steps: usize,
    #[arg(long, value_enum, default_value = "disjoint")]
    deform_direction: Direction,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Kind {
    TetraKoebe,
    OctaKoebe,
    TetraHyperideal,
    RandomShallow,
    Transported,
    DeepOverlapStar,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(value_enum)]
    kind: Kind,
    /// Cap offset for tetra-hyperideal.
    #[arg(long)]
    h: Option<f64>,
    /// Vertex count for random-shallow.
    #[arg(long)]
    n: Option<usize>,
    /// Defaults to CPOLY_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Base polyhedron for transported.
    #[arg(long)]
    base: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    file: PathBuf,
    /// Draw the link of this vertex.
    #[arg(long)]
    vertex: Option<usize>,
    /// Projection pole as x,y,z.
    #[arg(long, value_delimiter = ',', num_args = 3)]
    pole: Option<Vec<f64>>,
    /// Keep the pole even if a circle passes through it.
    #[arg(long)]
    no_nudge: bool,
    #[arg(long)]
    orthocircles: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Invalid(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Invalid(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<GenerateError> for Failure {
    fn from(e: GenerateError) -> Self {
        match e {
            GenerateError::ParamOutOfRange(_) => Failure::Invalid(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

/// What a command produced: exit code, text and JSON renderings.
struct Outcome {
    code: u8,
    text: String,
    json: Value,
}

fn load(path: &Path) -> Result<LoadedPolyhedron, Failure> {
    let loaded = format::load(path).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
    for w in &loaded.warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(loaded)
}

fn write_or_print(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Invalid(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn validate(file: &Path) -> Result<Outcome, Failure> {
    let l = load(file)?;
    let p = &l.polyhedron;
    let faces = p.triangulation().faces().len();
    Ok(Outcome {
        code: 0,
        text: format!("valid: {} vertices, {} edges, {faces} faces\n", p.n(), p.triangulation().edges().len()),
        json: json!({
            "valid": true,
            "vertices": p.n(),
            "edges": p.triangulation().edges().len(),
            "faces": faces,
            "warnings": l.warnings,
        }),
    })
}

fn analyze_cmd(file: &Path) -> Result<Outcome, Failure> {
    let l = load(file)?;
    let r = analyze(&l.polyhedron);
    let mut text = String::new();
    text += &format!("vertices: {}\n", r.n);
    text += &format!(
        "strictly convex: {} (convex: {}, sign {:+}, min |Psi| {:.6e})\n",
        r.strictly_convex, r.convex, r.edge_determinant_sign, r.min_abs_psi
    );
    text += &format!("hyperbolic: {}", r.hyperbolic);
    if !r.non_hyperbolic_faces.is_empty() {
        text += &format!(" (failing faces {:?})", r.non_hyperbolic_faces);
    }
    text.push('\n');
    let unitary: Vec<String> = r.unitary_edges.iter().map(|(i, j)| format!("({i},{j})")).collect();
    text += &format!("unitary edges: {}\n", if unitary.is_empty() { "none".into() } else { unitary.join(" ") });
    text += &format!("shallowness: {:?}\n", r.shallowness);
    match r.proper {
        Some(b) => text += &format!("proper: {b}\n"),
        None => text += "proper: undefined (not convex and hyperbolic)\n",
    }
    for w in &r.properness_witnesses {
        text += &format!(
            "  witness: vertex {}, point of neighbor {} outside half-plane of neighbor {}, margin {:.6e}\n",
            w.vertex, w.point_neighbor, w.disk_neighbor, w.margin
        );
    }
    Ok(Outcome { code: 0, text, json: serde_json::to_value(&r).expect("report serializes") })
}

fn measures_cmd(file: &Path) -> Result<Outcome, Failure> {
    let l = load(file)?;
    let p = &l.polyhedron;
    let f = measure(&ConfigurationState::from_polyhedron(p));
    let edges = p.triangulation().edges();
    let mut text = String::new();
    let mut rows = Vec::new();
    for (k, value) in f.iter().enumerate() {
        let label = if k < edges.len() {
            format!("edge ({},{})", edges[k].0, edges[k].1)
        } else {
            format!("vertex {}", k - edges.len())
        };
        text += &format!("{k:4}  {label:<14} {value:.17e}\n");
        rows.push(json!({"index": k, "label": label, "value": value}));
    }
    Ok(Outcome { code: 0, text, json: json!({"measures": rows}) })
}

fn rank_cmd(file: &Path) -> Result<Outcome, Failure> {
    let l = load(file)?;
    let state = ConfigurationState::from_polyhedron(&l.polyhedron);
    let r = numerical_rank(&jacobian(&state), tolerance::RANK);
    let code = if r.full() { 0 } else { 1 };
    Ok(Outcome {
        code,
        text: format!("rank {} / expected {}\nsingular value gap {:.3e}\n", r.rank, r.expected, r.gap),
        json: serde_json::to_value(&r).expect("report serializes"),
    })
}

fn continuation_failure(e: ContinuationError) -> Result<Outcome, Failure> {
    match e {
        ContinuationError::NotLocallyCongruent(dev) => Ok(Outcome {
            code: 1,
            text: format!("congruent: false (not locally congruent, measure deviation {dev:.3e})\n"),
            json: json!({"congruent": false, "reason": "not locally congruent", "measure_deviation": dev}),
        }),
        ContinuationError::Moebius(MoebiusError::NotRestricted) => Ok(Outcome {
            code: 1,
            text: "congruent: false (related only by an orientation-reversing map)\n".into(),
            json: json!({"congruent": false, "reason": "not restricted"}),
        }),
        ContinuationError::TriangulationMismatch | ContinuationError::NotUnitaryEdge(_) => {
            Err(Failure::Invalid(e.to_string()))
        }
        other => Err(Failure::Numerical(other.to_string())),
    }
}

fn matrix_text(rows: [[f64; 4]; 4]) -> String {
    rows.iter()
        .map(|r| format!("  [{:>22.15e} {:>22.15e} {:>22.15e} {:>22.15e}]\n", r[0], r[1], r[2], r[3]))
        .collect()
}

fn congruent_cmd(a: &CongruentArgs) -> Result<Outcome, Failure> {
    let p = load(&a.a)?.polyhedron;
    let q = load(&a.b)?.polyhedron;
    if !a.via_deformation {
        let (sp, sq) = (ConfigurationState::from_polyhedron(&p), ConfigurationState::from_polyhedron(&q));
        let r = match fit_congruence(&sp, &sq, a.anchor_face, a.tol) {
            Ok(r) => r,
            Err(e) => return continuation_failure(e),
        };
        let mut text = format!(
            "congruent: {}\nresidual: {:.3e}\npairing residual: {:.3e}\nanchor face: {}\n",
            r.congruent, r.residual, r.pairing_residual, r.anchor_face
        );
        if let Some(m) = &r.map {
            text += "map:\n";
            text += &matrix_text(m.rows());
        }
        return Ok(Outcome {
            code: if r.congruent { 0 } else { 1 },
            text,
            json: serde_json::to_value(&r).expect("result serializes"),
        });
    }
    let opts = ViaDeformationOptions { mu: a.mu, steps: a.steps, tol: a.tol, direction: DeformDirection::Disjoint };
    let r = match congruent_via_deformation(&p, &q, opts) {
        Ok(r) => r,
        Err(e) => return continuation_failure(e),
    };
    let mut text = format!(
        "congruent: {}\nresidual: {:.3e}\npairing residual: {:.3e}\n",
        r.result.congruent, r.result.residual, r.result.pairing_residual
    );
    if r.skipped {
        text += "no tangent edges: direct fit\n";
    } else {
        let u: Vec<String> = r.unitary_edges.iter().map(|(i, j)| format!("({i},{j})")).collect();
        text += &format!("deformed edges: {}\n", u.join(" "));
        text += "deformation trail:\n";
        for g in &r.grid {
            text += &format!("  t = {:.4}  congruent {}  residual {:.3e}\n", g.t, g.congruent, g.residual);
        }
        text += "cauchy trail:\n";
        for c in &r.cauchy {
            text += &format!("  t = {:.6e}  difference {:.3e}\n", c.t, c.difference);
        }
        text += &format!("final difference: {:.3e} (converged: {})\n", r.final_difference, r.cauchy_converged);
    }
    if let Some(m) = &r.result.map {
        text += "map:\n";
        text += &matrix_text(m.rows());
    }
    Ok(Outcome {
        code: if r.result.congruent { 0 } else { 1 },
        text,
        json: serde_json::to_value(&r).expect("result serializes"),
    })
}

fn deform_cmd(a: &DeformArgs) -> Result<Outcome, Failure> {
    let l = load(&a.file)?;
    let p = &l.polyhedron;
    let strictly_convex = p.is_strictly_convex(tolerance::STRICT_CONVEXITY);
    let hyperbolic = p.is_hyperbolic();
    let proper = hyperbolic && is_proper(p).map(|r| r.proper).unwrap_or(false);
    if !(strictly_convex && hyperbolic && proper) {
        return Ok(Outcome {
            code: 1,
            text: format!(
                "input not certified: strictly convex {strictly_convex}, hyperbolic {hyperbolic}, proper {proper}\n"
            ),
            json: json!({"certified": false, "strictly_convex": strictly_convex, "hyperbolic": hyperbolic, "proper": proper}),
        });
    }
    let direction = match a.deform_direction {
        Direction::Disjoint => DeformDirection::Disjoint,
        Direction::Overlap => DeformDirection::Overlap,
    };
    let spec = PathSpec { direction, ..PathSpec::away_from_unitary(p, a.mu, a.steps) };
    let d = deform(p, &spec).map_err(|e| Failure::Numerical(e.to_string()))?;
    let fin = d
        .final_state()
        .to_polyhedron()
        .map_err(|e| Failure::Numerical(e.to_string()))?;
    let metadata = json!({
        "deformed_from": a.file.display().to_string(),
        "mu": a.mu,
        "steps": a.steps,
        "direction": format!("{:?}", direction).to_lowercase(),
        "max_residual": d.max_residual,
    });
    let file_text = format::to_string(&fin, metadata);
    if let Some(out) = &a.output {
        write_or_print(Some(out), &file_text)?;
    }
    let mut text = format!(
        "deformed {} edges over {} steps (max residual {:.3e})\n",
        spec.unitary_edges.len(),
        a.steps,
        d.max_residual
    );
    for c in &d.certificates {
        text += &format!(
            "  t = {:.4}  strictly convex {}  hyperbolic {}  proper {}  residual {:.3e}  iterations {}\n",
            c.t, c.strictly_convex, c.hyperbolic, c.proper, c.residual, c.iterations
        );
    }
    if a.output.is_none() {
        text += &file_text;
    }
    Ok(Outcome {
        code: 0,
        text,
        json: json!({
            "certificates": d.certificates,
            "max_residual": d.max_residual,
            "deformed_edges": spec.unitary_edges.iter().map(|&e| p.triangulation().edges()[e]).collect::<Vec<_>>(),
            "final": serde_json::from_str::<Value>(&file_text).expect("own output parses"),
        }),
    })
}

fn default_seed() -> u64 {
    std::env::var("CPOLY_SEED").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(0)
}

fn certify_generated(p: &CPolyhedron, kind: Kind) -> Result<(), Failure> {
    let r = analyze(p);
    let ok = match kind {
        Kind::DeepOverlapStar => r.strictly_convex && r.hyperbolic && r.proper == Some(false),
        Kind::RandomShallow => {
            r.strictly_convex && r.hyperbolic && r.shallowness.globally_shallow() && r.proper == Some(true)
        }
        Kind::Transported => true,
        _ => r.strictly_convex && r.hyperbolic && r.proper == Some(true),
    };
    if ok {
        Ok(())
    } else {
        Err(Failure::Numerical("generated instance failed certification".into()))
    }
}

fn generate_cmd(a: &GenerateArgs) -> Result<Outcome, Failure> {
    let need = |what: &str| Failure::Invalid(format!("missing --{what}"));
    let seed = a.seed.unwrap_or_else(default_seed);
    let (p, meta) = match a.kind {
        Kind::TetraKoebe => (generate::tetra_koebe(), json!({"generator": "tetra-koebe"})),
        Kind::OctaKoebe => (generate::octa_koebe(), json!({"generator": "octa-koebe"})),
        Kind::TetraHyperideal => {
            let h = a.h.ok_or_else(|| need("h"))?;
            (generate::tetra_hyperideal(h)?, json!({"generator": "tetra-hyperideal", "h": h}))
        }
        Kind::RandomShallow => {
            let n = a.n.ok_or_else(|| need("n"))?;
            (generate::random_shallow(n, seed)?, json!({"generator": "random-shallow", "n": n, "seed": seed}))
        }
        Kind::Transported => {
            let base_path = a.base.as_ref().ok_or_else(|| need("base"))?;
            let base = load(base_path)?.polyhedron;
            (
                generate::transported(&base, seed, a.scale),
                json!({"generator": "transported", "base": base_path.display().to_string(), "seed": seed, "scale": a.scale}),
            )
        }
        Kind::DeepOverlapStar => (generate::deep_overlap_star(), json!({"generator": "deep-overlap-star"})),
    };
    certify_generated(&p, a.kind)?;
    let text = format::to_string(&p, meta.clone());
    format::from_str(&text).map_err(|e| Failure::Numerical(format!("output does not re-validate: {e}")))?;
    if let Some(out) = &a.output {
        write_or_print(Some(out), &text)?;
        Ok(Outcome {
            code: 0,
            text: format!("wrote {} ({} vertices)\n", out.display(), p.n()),
            json: json!({"written": out.display().to_string(), "vertices": p.n(), "metadata": meta}),
        })
    } else {
        Ok(Outcome { code: 0, json: serde_json::from_str(&text).expect("own output parses"), text })
    }
}

fn render_cmd(a: &RenderArgs) -> Result<Outcome, Failure> {
    let p = load(&a.file)?.polyhedron;
    let mut spec = RenderSpec {
        auto_nudge: !a.no_nudge,
        layers: Layers { orthocircles: a.orthocircles, link: a.vertex, ..Layers::default() },
        ..RenderSpec::default()
    };
    if let Some(pole) = &a.pole {
        spec.pole = [pole[0], pole[1], pole[2]];
    }
    let r = render(&p, &spec).map_err(|e| match e {
        cpoly_core::render::RenderError::InvalidPole | cpoly_core::render::RenderError::VertexOutOfRange(_) => {
            Failure::Invalid(e.to_string())
        }
        other => Failure::Numerical(other.to_string()),
    })?;
    match &a.output {
        Some(out) => {
            write_or_print(Some(out), &r.svg)?;
            Ok(Outcome {
                code: 0,
                text: format!("wrote {}{}\n", out.display(), if r.nudged { " (pole nudged)" } else { "" }),
                json: json!({"written": out.display().to_string(), "pole": r.pole, "nudged": r.nudged, "viewport": r.viewport}),
            })
        }
        None => Ok(Outcome {
            code: 0,
            json: json!({"svg": r.svg, "pole": r.pole, "nudged": r.nudged, "viewport": r.viewport}),
            text: r.svg,
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate { file } => validate(file),
        Command::Analyze { file } => analyze_cmd(file),
        Command::Measures { file } => measures_cmd(file),
        Command::Rank { file } => rank_cmd(file),
        Command::Congruent(a) => congruent_cmd(a),
        Command::Deform(a) => deform_cmd(a),
        Command::Generate(a) => generate_cmd(a),
        Command::Render(a) => render_cmd(a),
    };
    match result {
        Ok(o) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&o.json).expect("json value serializes"));
            } else {
                print!("{}", o.text);
            }
            ExitCode::from(o.code)
        }
        Err(f) => {
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({"error": f.message(), "exit_code": f.code()}))
                        .expect("json value serializes")
                );
            }
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
