//! Command-line workbench over coarsekit-core.
//!
//! Every command prints a single JSON report to stdout (or `--out FILE`).
//! Exit codes: 0 = a verdict was computed (including No/Undetermined),
//! 1 = input validation error, 2 = internal invariant violation.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use coarsekit_core::amen::{
    folner_search, paradox_certificate, FolnerOutcome, FolnerStrategy, ParadoxOutcome,
};
use coarsekit_core::ktheory::{
    class_equal, class_positive, coarse_class, compare_towers, K0Class, SupernaturalNumber,
    TowerSpec, TruncatedLimitOracle,
};
use coarsekit_core::norm::norm_bounds;
use coarsekit_core::operator::{rational_op_from_json, rational_op_to_json};
use coarsekit_core::roe::{
    block_decompose, cuntz_build, leavitt_verify, mv_split, qd_projection, standard_form_witness,
};
use coarsekit_core::space::{asdim_one_decomposition, make_window, Family, Space};
use coarsekit_core::{Error as CoreError, RationalOperator};

#[derive(Parser)]
#[command(name = "coarsekit", version, about = "workbench for finite windows of coarse spaces")]
struct Cli {
    /// Seed for randomized estimators (falls back to COARSEKIT_SEED).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Pretty-print the JSON report.
    #[arg(long, global = true)]
    pretty: bool,

    /// Write the report to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Re-verify certificates before reporting them.
    #[arg(long, global = true)]
    verify: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SpaceArgs {
    /// Family: z | zd | free | gap | tower.
    #[arg(long)]
    family: Option<String>,

    /// Window size: points for z, side for zd, ball radius for free,
    /// block count for gap, level for tower.
    #[arg(long, visible_alias = "radius")]
    size: Option<u64>,

    /// Dimension for the zd family.
    #[arg(long, default_value_t = 2)]
    d: u32,

    /// Generator count for the free family.
    #[arg(long, default_value_t = 2)]
    gens: u32,

    /// Block sizes for the gap family.
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<u64>,

    /// Gaps between consecutive blocks for the gap family.
    #[arg(long, value_delimiter = ',')]
    gaps: Vec<u64>,

    /// Tower prefix indices.
    #[arg(long, value_delimiter = ',')]
    prefix: Vec<u64>,

    /// Tower cycle indices.
    #[arg(long, value_delimiter = ',')]
    cycle: Vec<u64>,

    /// Load the space from a JSON file instead of building a family window.
    #[arg(long)]
    space: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct TowerArgs {
    #[arg(long, value_delimiter = ',')]
    prefix: Vec<u64>,
    #[arg(long, value_delimiter = ',')]
    cycle: Vec<u64>,
}

#[derive(Args, Clone)]
struct ClassArgs {
    /// Preperiod entries of the class.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pre: Vec<i64>,
    /// Period entries of the class (defaults to a zero tail).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    per: Vec<i64>,
}

#[derive(Subcommand)]
enum Command {
    /// Build or analyze a space window.
    Space {
        #[command(subcommand)]
        action: SpaceAction,
    },
    /// Search for an (R, eps)-Folner set in a family window.
    Folner {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, default_value_t = 1)]
        r: u64,
        /// Tolerance as NUM/DEN.
        #[arg(long, default_value = "1/2")]
        eps: String,
        #[arg(long, default_value_t = 10)]
        max_radius: u64,
        /// Use exhaustive search over connected subsets up to this size.
        #[arg(long)]
        exhaustive: Option<usize>,
    },
    /// Match two copies of the interior into the window, or refute it.
    Paradox {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, alias = "R", default_value_t = 1)]
        r: u64,
        #[arg(long, default_value_t = 1)]
        collar: u64,
    },
    /// Build Cuntz-type isometries from a paradox certificate and verify
    /// the Leavitt relations.
    Cuntz {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, alias = "R", default_value_t = 1)]
        r: u64,
        #[arg(long, default_value_t = 1)]
        collar: u64,
    },
    /// Witness that the corner over A lies in the ideal generated by B.
    Ideal {
        #[command(flatten)]
        space: SpaceArgs,
        /// Indices of A (comma-separated).
        #[arg(long, value_delimiter = ',')]
        a: Vec<usize>,
        /// Indices of B (comma-separated).
        #[arg(long, value_delimiter = ',')]
        b: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        r: u64,
    },
    /// Find the least block-count projection commuting with a full
    /// propagation-bounded operator on a gap union.
    Qd {
        #[command(flatten)]
        space: SpaceArgs,
        /// Propagation of the test operator.
        #[arg(long, default_value_t = 2)]
        prop: u64,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
    },
    /// Certified norm interval for an operator loaded from JSON.
    Norm {
        #[command(flatten)]
        space: SpaceArgs,
        /// Operator JSON file ({dim, triplets: [[row,col,num,den],...]}).
        #[arg(long)]
        op: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
    },
    /// Split an operator along a two-colour decomposition.
    Mv {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        op: PathBuf,
        #[arg(long, default_value_t = 1)]
        r: u64,
    },
    /// Cut an operator along r-component blocks.
    Blocks {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        op: PathBuf,
        #[arg(long, default_value_t = 1)]
        r: u64,
    },
    /// Ordered K0 calculus for towers.
    Ktheory {
        #[command(subcommand)]
        action: KtheoryAction,
    },
    /// Validate a report file against the output schema.
    Report {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum SpaceAction {
    /// Emit the space as JSON.
    Gen {
        #[command(flatten)]
        space: SpaceArgs,
    },
    /// Growth profile, diameter, components, interior.
    Analyze {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, default_value_t = 1)]
        r: u64,
        #[arg(long, default_value_t = 1)]
        collar: u64,
    },
}

#[derive(Subcommand)]
enum KtheoryAction {
    /// Supernatural number and coarse class of a tower.
    Sn {
        #[command(flatten)]
        tower: TowerArgs,
    },
    /// Rigidity dictionary for two towers.
    Compare {
        #[command(flatten)]
        left: TowerArgs,
        #[arg(long, value_delimiter = ',')]
        prefix2: Vec<u64>,
        #[arg(long, value_delimiter = ',')]
        cycle2: Vec<u64>,
        /// Left tower as inline JSON {"prefix":[...],"cycle":[...]}.
        #[arg(long)]
        t1: Option<String>,
        /// Right tower as inline JSON.
        #[arg(long)]
        t2: Option<String>,
    },
    /// Decide whether two classes are equal in K0.
    ClassEqual {
        #[command(flatten)]
        tower: TowerArgs,
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        pre2: Vec<i64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        per2: Vec<i64>,
        #[arg(long, default_value_t = 20)]
        budget: usize,
    },
    /// Decide whether a class is positive in K0.
    ClassPositive {
        #[command(flatten)]
        tower: TowerArgs,
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, default_value_t = 20)]
        budget: usize,
    },
    /// Independent truncated-limit check at a fixed level.
    Oracle {
        #[command(flatten)]
        tower: TowerArgs,
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, default_value_t = 10)]
        top_level: usize,
    },
}

#[derive(Serialize)]
struct Report {
    command: String,
    inputs: Value,
    verdicts: Value,
    certificates: Value,
    /// Omitted (null) so reports are byte-identical across runs.
    timings: Option<Value>,
}

enum CliError {
    /// Bad input (exit 1).
    Input(String),
    /// An exactly-verified identity failed: a bug trap (exit 2).
    Internal(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::IdentityFailed(_) | CoreError::BadCertificate(_) => {
                CliError::Internal(e.to_string())
            }
            other => CliError::Input(other.to_string()),
        }
    }
}

fn read_json(path: &PathBuf) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("malformed JSON in {}: {e}", path.display())))
}

impl SpaceArgs {
    fn build(&self) -> Result<(Space, Value), CliError> {
        if let Some(path) = &self.space {
            let v = read_json(path)?;
            let space: Space = serde_json::from_value(v.clone())
                .map_err(|e| CliError::Input(format!("invalid space JSON: {e}")))?;
            return Ok((space, json!({ "space_file": path.display().to_string() })));
        }
        let name = self
            .family
            .as_deref()
            .ok_or_else(|| CliError::Input("missing --family or --space".into()))?;
        let family = match name {
            "z" => Family::Z,
            "zd" => Family::Zd { d: self.d },
            "free" | "f2" => Family::FreeGroup { gens: self.gens },
            "gap" => Family::GapUnion {
                sizes: self.sizes.clone(),
                gaps: self.gaps.clone(),
            },
            "tower" => Family::TowerGroup {
                tower: TowerSpec::new(self.prefix.clone(), self.cycle.clone())
                    .map_err(CliError::from)?,
            },
            other => return Err(CliError::Input(format!("unknown family '{other}'"))),
        };
        let size = self.size.unwrap_or(match name {
            "free" | "f2" => 3,
            "tower" => 3,
            _ => 10,
        });
        let space = make_window(&family, size)?;
        let echo = json!({ "family": name, "size": size });
        Ok((space, echo))
    }
}

impl TowerArgs {
    fn build(&self) -> Result<TowerSpec, CliError> {
        TowerSpec::new(self.prefix.clone(), self.cycle.clone()).map_err(CliError::from)
    }
}

impl ClassArgs {
    fn build(&self) -> Result<K0Class, CliError> {
        let per = if self.per.is_empty() { vec![0] } else { self.per.clone() };
        K0Class::from_i64(&self.pre, &per).map_err(CliError::from)
    }
}

fn class_echo(pre: &[i64], per: &[i64]) -> Value {
    json!({ "preperiod": pre, "period": if per.is_empty() { vec![0] } else { per.to_vec() } })
}

fn parse_eps(s: &str) -> Result<coarsekit_core::Rational, CliError> {
    let parts: Vec<&str> = s.split('/').collect();
    let parse = |t: &str| {
        t.trim()
            .parse::<i64>()
            .map_err(|_| CliError::Input(format!("bad rational '{s}'")))
    };
    match parts.as_slice() {
        [n] => Ok(coarsekit_core::rat(parse(n)?)),
        [n, d] => {
            let d = parse(d)?;
            if d == 0 {
                return Err(CliError::Input("zero denominator".into()));
            }
            Ok(coarsekit_core::ratio(parse(n)?, d))
        }
        _ => Err(CliError::Input(format!("bad rational '{s}'"))),
    }
}

fn load_operator(space: &Space, path: &PathBuf) -> Result<RationalOperator, CliError> {
    let v = read_json(path)?;
    rational_op_from_json(&v, space).map_err(CliError::from)
}

fn propagation_operator(space: &Space, prop: u64) -> RationalOperator {
    let mut a = RationalOperator::zero(space.len());
    for x in 0..space.len() {
        for y in 0..space.len() {
            if space.dist(x, y) <= prop {
                a.set(x, y, coarsekit_core::rat(1));
            }
        }
    }
    a
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    let seed = cli
        .seed
        .or_else(|| std::env::var("COARSEKIT_SEED").ok().and_then(|s| s.parse().ok()))
        .unwrap_or(0);

    match &cli.command {
        Command::Space { action } => match action {
            SpaceAction::Gen { space } => {
                let (s, echo) = space.build()?;
                if cli.verify {
                    // round-trip through the validating deserializer
                    let v = serde_json::to_value(&s).expect("space serializes");
                    let _: Space = serde_json::from_value(v)
                        .map_err(|e| CliError::Internal(format!("self-validation failed: {e}")))?;
                }
                Ok(Report {
                    command: "space gen".into(),
                    inputs: json!({ "space": echo, "seed": seed }),
                    verdicts: json!({ "points": s.len() }),
                    certificates: json!({ "space": serde_json::to_value(&s).expect("serializes") }),
                    timings: None,
                })
            }
            SpaceAction::Analyze { space, r, collar } => {
                let (s, echo) = space.build()?;
                let components = s.r_components(*r);
                let interior = s.interior(*collar);
                let growth: Vec<usize> = (0..=*r).map(|rad| s.ball(0, rad).len()).collect();
                Ok(Report {
                    command: "space analyze".into(),
                    inputs: json!({ "space": echo, "r": r, "collar": collar, "seed": seed }),
                    verdicts: json!({
                        "points": s.len(),
                        "diameter": s.diameter_of(&(0..s.len()).collect::<Vec<_>>()),
                        "component_count": components.classes.len(),
                        "max_component_size": components.classes.iter().map(|c| c.len()).max(),
                        "growth_from_first_point": growth,
                        "interior_size": interior.len(),
                    }),
                    certificates: json!({ "components": components.to_json(&s) }),
                    timings: None,
                })
            }
        },
        Command::Folner {
            space,
            r,
            eps,
            max_radius,
            exhaustive,
        } => {
            let (_, echo) = space.build()?;
            let family = family_of(space)?;
            let eps_val = parse_eps(eps)?;
            let strategy = match exhaustive {
                Some(m) => FolnerStrategy::Exhaustive { max_size: *m },
                None => FolnerStrategy::Balls {
                    max_radius: *max_radius,
                },
            };
            let (window, outcome) = folner_search(&family, *r, &eps_val, &strategy)?;
            let (verdicts, certificates) = match outcome {
                FolnerOutcome::Witness(w) => (
                    json!({ "result": "yes", "ratio": w.ratio.to_string(), "set_size": w.set.len() }),
                    json!({ "set": w.set.iter().map(|&i| window.id(i)).collect::<Vec<_>>() }),
                ),
                FolnerOutcome::Exhausted {
                    min_ratio,
                    best_set,
                    candidates_checked,
                } => (
                    json!({
                        "result": "no",
                        "reason": "window-scale evidence only: no candidate met the tolerance",
                        "min_ratio": min_ratio.map(|m| m.to_string()),
                        "candidates_checked": candidates_checked,
                    }),
                    json!({ "best_set": best_set.iter().map(|&i| window.id(i)).collect::<Vec<_>>() }),
                ),
            };
            Ok(Report {
                command: "folner".into(),
                inputs: json!({ "space": echo, "r": r, "eps": eps, "strategy": strategy, "seed": seed }),
                verdicts,
                certificates,
                timings: None,
            })
        }
        Command::Paradox { space, r, collar } => {
            let (s, echo) = space.build()?;
            let outcome = paradox_certificate(&s, *r, *collar)?;
            let (verdicts, certificates) = paradox_json(&s, &outcome, cli.verify, *r)?;
            Ok(Report {
                command: "paradox".into(),
                inputs: json!({ "space": echo, "R": r, "collar": collar, "seed": seed }),
                verdicts,
                certificates,
                timings: None,
            })
        }
        Command::Cuntz { space, r, collar } => {
            let (s, echo) = space.build()?;
            let cert = match paradox_certificate(&s, *r, *collar)? {
                ParadoxOutcome::Certificate(c) => c,
                ParadoxOutcome::HallViolation(_) | ParadoxOutcome::EmptyInterior => {
                    return Ok(Report {
                        command: "cuntz".into(),
                        inputs: json!({ "space": echo, "R": r, "collar": collar, "seed": seed }),
                        verdicts: json!({ "result": "no", "reason": "no paradox certificate exists for this window" }),
                        certificates: json!(null),
                        timings: None,
                    })
                }
            };
            let quad = cuntz_build(&s, &cert)?;
            let rep = leavitt_verify(&quad);
            if !rep.all_hold() {
                return Err(CliError::Internal(
                    "Leavitt relations failed on a verified certificate".into(),
                ));
            }
            let (e, _, _) = standard_form_witness(&quad)?;
            Ok(Report {
                command: "cuntz".into(),
                inputs: json!({ "space": echo, "R": r, "collar": collar, "seed": seed }),
                verdicts: json!({
                    "result": "yes",
                    "leavitt_relations_exact": rep.all_hold(),
                    "idempotent_rank": e.trace().to_string(),
                    "interior_size": quad.interior.len(),
                    "range_size": quad.range.len(),
                }),
                certificates: json!({ "paradox": cert.to_json(&s) }),
                timings: None,
            })
        }
        Command::Ideal { space, a, b, r } => {
            let (s, echo) = space.build()?;
            for &x in a.iter().chain(b) {
                if x >= s.len() {
                    return Err(CliError::Input(format!("index {x} outside the space")));
                }
            }
            match coarsekit_core::roe::ideal_witness(&s, a, b, *r) {
                Ok(w) => Ok(Report {
                    command: "ideal".into(),
                    inputs: json!({ "space": echo, "A": a, "B": b, "R": r, "seed": seed }),
                    verdicts: json!({ "result": "yes", "translation_count": w.family.len() }),
                    certificates: json!({
                        "f": rational_op_to_json(&w.f, &s, None),
                        "counts": rational_op_to_json(&w.counts, &s, None),
                    }),
                    timings: None,
                }),
                Err(CoreError::Precondition(msg)) => Ok(Report {
                    command: "ideal".into(),
                    inputs: json!({ "space": echo, "A": a, "B": b, "R": r, "seed": seed }),
                    verdicts: json!({ "result": "no", "reason": msg }),
                    certificates: json!(null),
                    timings: None,
                }),
                Err(e) => Err(e.into()),
            }
        }
        Command::Qd {
            space,
            prop,
            eps,
            p,
        } => {
            let (s, echo) = space.build()?;
            let a = propagation_operator(&s, *prop);
            let (n, cert) = qd_projection(&s, &[a], &[], *eps, *p)?;
            Ok(Report {
                command: "qd".into(),
                inputs: json!({ "space": echo, "prop": prop, "eps": eps, "p": p, "seed": seed }),
                verdicts: json!({
                    "result": "yes",
                    "n": n,
                    "commutators_zero": cert.commutators_zero,
                    "norm_p1": cert.norm_p1.to_string(),
                    "norm_pinf": cert.norm_pinf.to_string(),
                }),
                certificates: json!({ "projection": rational_op_to_json(&cert.projection, &s, None) }),
                timings: None,
            })
        }
        Command::Norm { space, op, p } => {
            // without an explicit space, index the operator over a line window
            // of its own dimension (ids "0".."dim-1")
            let (s, echo) = if space.space.is_none() && space.family.is_none() {
                let v = read_json(op)?;
                let dim = v
                    .get("dim")
                    .and_then(|d| d.as_u64())
                    .ok_or_else(|| CliError::Input("operator JSON missing 'dim'".into()))?;
                (make_window(&Family::Z, dim)?, json!({ "implicit": "line", "dim": dim }))
            } else {
                space.build()?
            };
            let a = load_operator(&s, op)?;
            let est = norm_bounds(&a, *p)?;
            Ok(Report {
                command: "norm".into(),
                inputs: json!({ "space": echo, "op": op.display().to_string(), "p": p, "seed": seed }),
                verdicts: json!({
                    "lower": est.lower,
                    "upper": est.upper,
                    "methods": est.methods,
                }),
                certificates: json!(null),
                timings: None,
            })
        }
        Command::Mv { space, op, r } => {
            let (s, echo) = space.build()?;
            let a = load_operator(&s, op)?;
            let uv = asdim_one_decomposition(&s, *r)?;
            let (x1, x2) = mv_split(&a, &uv);
            if x1.add(&x2) != a {
                return Err(CliError::Internal("mv_split does not sum back".into()));
            }
            Ok(Report {
                command: "mv".into(),
                inputs: json!({ "space": echo, "op": op.display().to_string(), "r": r, "seed": seed }),
                verdicts: json!({
                    "result": "yes",
                    "norm_p1_a": a.norm_p1().to_string(),
                    "norm_p1_u_part": x1.norm_p1().to_string(),
                    "norm_p1_v_part": x2.norm_p1().to_string(),
                }),
                certificates: json!({
                    "u_part": rational_op_to_json(&x1, &s, None),
                    "v_part": rational_op_to_json(&x2, &s, None),
                }),
                timings: None,
            })
        }
        Command::Blocks { space, op, r } => {
            let (s, echo) = space.build()?;
            let a = load_operator(&s, op)?;
            let dec = block_decompose(&a, &s, *r);
            Ok(Report {
                command: "blocks".into(),
                inputs: json!({ "space": echo, "op": op.display().to_string(), "r": r, "seed": seed }),
                verdicts: json!({
                    "result": if dec.residue.is_zero() { "yes" } else { "no" },
                    "block_count": dec.blocks.len(),
                    "nonzero_blocks": dec.blocks.iter().filter(|b| !b.is_zero()).count(),
                    "residue_entries": dec.residue.nnz(),
                }),
                certificates: json!({ "residue": rational_op_to_json(&dec.residue, &s, None) }),
                timings: None,
            })
        }
        Command::Ktheory { action } => run_ktheory(action, seed),
        Command::Report { input } => {
            let v = read_json(input)?;
            for field in ["command", "inputs", "verdicts", "certificates", "timings"] {
                if v.get(field).is_none() {
                    return Err(CliError::Input(format!("report missing field '{field}'")));
                }
            }
            Ok(Report {
                command: "report".into(),
                inputs: json!({ "input": input.display().to_string() }),
                verdicts: json!({ "result": "yes", "schema": "ok" }),
                certificates: json!(null),
                timings: None,
            })
        }
    }
}

fn family_of(args: &SpaceArgs) -> Result<Family, CliError> {
    match args.family.as_deref() {
        Some("z") => Ok(Family::Z),
        Some("zd") => Ok(Family::Zd { d: args.d }),
        Some("free") | Some("f2") => Ok(Family::FreeGroup { gens: args.gens }),
        Some("gap") => Ok(Family::GapUnion {
            sizes: args.sizes.clone(),
            gaps: args.gaps.clone(),
        }),
        Some("tower") => Ok(Family::TowerGroup {
            tower: TowerSpec::new(args.prefix.clone(), args.cycle.clone())?,
        }),
        Some(other) => Err(CliError::Input(format!("unknown family '{other}'"))),
        None => Err(CliError::Input("folner needs --family".into())),
    }
}

fn paradox_json(
    s: &Space,
    outcome: &ParadoxOutcome,
    verify: bool,
    r: u64,
) -> Result<(Value, Value), CliError> {
    Ok(match outcome {
        ParadoxOutcome::Certificate(cert) => {
            if verify {
                cert.verify(s)?;
            }
            (
                json!({ "result": "yes", "interior_size": cert.interior.len() }),
                json!({ "paradox": cert.to_json(s) }),
            )
        }
        ParadoxOutcome::HallViolation(v) => {
            if verify {
                v.verify(s, r)?;
            }
            (
                json!({
                    "result": "no",
                    "reason": "Hall condition fails for the doubled interior",
                    "violator_size": v.left.len(),
                    "neighborhood_size": v.neighborhood.len(),
                }),
                json!({
                    "violator": v.left.iter()
                        .map(|&(x, minus)| json!([s.id(x), if minus { "-" } else { "+" }]))
                        .collect::<Vec<_>>(),
                    "neighborhood": v.neighborhood.iter().map(|&x| s.id(x)).collect::<Vec<_>>(),
                }),
            )
        }
        ParadoxOutcome::EmptyInterior => (
            json!({ "result": "no", "reason": "the window has empty interior at this collar" }),
            json!(null),
        ),
    })
}

fn run_ktheory(action: &KtheoryAction, seed: u64) -> Result<Report, CliError> {
    match action {
        KtheoryAction::Sn { tower } => {
            let t = tower.build()?;
            let sn = SupernaturalNumber::from_tower(&t)?;
            Ok(Report {
                command: "ktheory sn".into(),
                inputs: json!({ "tower": t, "seed": seed }),
                verdicts: json!({
                    "supernatural": sn.to_string(),
                    "coarse_class": coarse_class(&t)?,
                }),
                certificates: json!({ "factors": sn }),
                timings: None,
            })
        }
        KtheoryAction::Compare {
            left,
            prefix2,
            cycle2,
            t1,
            t2,
        } => {
            let inline = |s: &str| -> Result<TowerSpec, CliError> {
                let t: TowerSpec = serde_json::from_str(s)
                    .map_err(|e| CliError::Input(format!("bad tower JSON: {e}")))?;
                t.validate()?;
                Ok(t)
            };
            let a = match t1 {
                Some(s) => inline(s)?,
                None => left.build()?,
            };
            let b = match t2 {
                Some(s) => inline(s)?,
                None => TowerSpec::new(prefix2.clone(), cycle2.clone())?,
            };
            let cmp = compare_towers(&a, &b)?;
            Ok(Report {
                command: "ktheory compare".into(),
                inputs: json!({ "left": a, "right": b, "seed": seed }),
                verdicts: serde_json::to_value(&cmp).expect("comparison serializes"),
                certificates: json!(null),
                timings: None,
            })
        }
        KtheoryAction::ClassEqual {
            tower,
            class,
            pre2,
            per2,
            budget,
        } => {
            let t = tower.build()?;
            let x = class.build()?;
            let per2v = if per2.is_empty() { vec![0] } else { per2.clone() };
            let y = K0Class::from_i64(pre2, &per2v)?;
            let v = class_equal(&t, &x, &y, *budget)?;
            Ok(Report {
                command: "ktheory class-equal".into(),
                inputs: json!({
                    "tower": t,
                    "x": class_echo(&class.pre, &class.per),
                    "y": class_echo(pre2, per2),
                    "budget": budget,
                    "seed": seed,
                }),
                verdicts: serde_json::to_value(&v).expect("verdict serializes"),
                certificates: json!(null),
                timings: None,
            })
        }
        KtheoryAction::ClassPositive {
            tower,
            class,
            budget,
        } => {
            let t = tower.build()?;
            let x = class.build()?;
            let v = class_positive(&t, &x, *budget)?;
            Ok(Report {
                command: "ktheory class-positive".into(),
                inputs: json!({
                    "tower": t,
                    "x": class_echo(&class.pre, &class.per),
                    "budget": budget,
                    "seed": seed,
                }),
                verdicts: serde_json::to_value(&v).expect("verdict serializes"),
                certificates: json!(null),
                timings: None,
            })
        }
        KtheoryAction::Oracle {
            tower,
            class,
            top_level,
        } => {
            let t = tower.build()?;
            let x = class.build()?;
            let oracle = TruncatedLimitOracle {
                top_level: *top_level,
            };
            let zero = oracle.is_zero(&t, &x)?;
            let nonneg = oracle.is_nonneg(&t, &x)?;
            Ok(Report {
                command: "ktheory oracle".into(),
                inputs: json!({
                    "tower": t,
                    "x": class_echo(&class.pre, &class.per),
                    "top_level": top_level,
                    "seed": seed,
                }),
                verdicts: json!({
                    "zero_at_top_level": zero,
                    "nonneg_at_top_level": nonneg,
                    "scope": format!("decisions at levels <= {top_level}"),
                }),
                certificates: json!(null),
                timings: None,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            let text = if cli.pretty {
                serde_json::to_string_pretty(&report).expect("report serializes")
            } else {
                serde_json::to_string(&report).expect("report serializes")
            };
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text + "\n") {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(1);
                    }
                }
                None => println!("{text}"),
            }
            ExitCode::SUCCESS
        }
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("internal invariant violation: {msg}");
            ExitCode::from(2)
        }
    }
}
