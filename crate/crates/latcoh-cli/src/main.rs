//! Command-line front end: graph ingestion, invariant commands, JSON
//! emission and ASCII/SVG weight-table renderings.

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num::{BigInt, BigRational, Zero};

use latcoh::arith::rat;
use latcoh::homology;
use latcoh::laufer::{self, BadVertexSet};
use latcoh::plumbing::{parse_graph, DualCycle, Lattice};
use latcoh::reduction::{self, WeightRectangle};
use latcoh::series::{self, TwoNodeLift};
use latcoh::{ehrhart, Error};

#[derive(Parser)]
#[command(name = "latcoh", about = "Invariants of negative-definite plumbed 3-manifolds", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a graph; print basic lattice data
    Check(CommonArgs),
    /// Minimal positive anti-nef cycle
    Zmin(CommonArgs),
    /// Rationality test with witness
    Rational(CommonArgs),
    /// Weight rectangle, graded modules, Euler characteristics, sw
    Cohomology(CohomologyArgs),
    /// Periodic constant with witness (star-shaped and two-node graphs)
    Pc(PcArgs),
    /// Lattice-point count fit along a ray
    Ehrhart(EhrhartArgs),
    /// ASCII or SVG picture of the weight rectangle
    Render(CohomologyArgs),
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Graph file
    #[arg(long)]
    graph: String,
    /// Output format
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(clap::Args)]
struct CohomologyArgs {
    #[arg(long)]
    graph: String,
    /// Bad vertex ids, comma separated (defaults to the nodes)
    #[arg(long)]
    bad: Option<String>,
    /// Class lift: reduced-transform tuple `c0,...` or `raw:` rationals
    #[arg(long, allow_hyphen_values = true)]
    class: Option<String>,
    /// Rectangle override `I,J`
    #[arg(long)]
    rect: Option<String>,
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(clap::Args)]
struct PcArgs {
    #[arg(long)]
    graph: String,
    /// Class lift: reduced-transform tuple or `raw:` rationals
    #[arg(long, allow_hyphen_values = true)]
    class: Option<String>,
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(clap::Args)]
struct EhrhartArgs {
    #[arg(long)]
    graph: String,
    /// Ray: `Estar:<id>` or comma-separated rational coefficients
    #[arg(long, allow_hyphen_values = true)]
    ray: String,
    /// Polynomial degree of the fit
    #[arg(long)]
    degree: usize,
    /// Quasipolynomial period
    #[arg(long, default_value_t = 1)]
    period: i64,
    #[arg(long, default_value = "text")]
    format: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::StepCapExceeded(_) | Error::VSearchCapExceeded => 3u8,
                _ => 2u8,
            };
            ExitCode::from(code)
        }
    }
}

fn load(path: &str) -> Result<Lattice, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Unsupported(format!("cannot read {path}: {e}")))?;
    Lattice::new(parse_graph(&text)?)
}

fn parse_rationals(s: &str) -> Result<Vec<BigRational>, Error> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            if let Some((n, d)) = t.split_once('/') {
                let n: BigInt =
                    n.parse().map_err(|_| Error::Unsupported(format!("bad rational `{t}`")))?;
                let d: BigInt =
                    d.parse().map_err(|_| Error::Unsupported(format!("bad rational `{t}`")))?;
                Ok(BigRational::new(n, d))
            } else {
                let n: BigInt =
                    t.parse().map_err(|_| Error::Unsupported(format!("bad integer `{t}`")))?;
                Ok(BigRational::from_integer(n))
            }
        })
        .collect()
}

fn parse_ints(s: &str) -> Result<Vec<BigInt>, Error> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| Error::Unsupported(format!("bad integer `{t}`"))))
        .collect()
}

/// Class lift: a raw element of L', a reduced-transform tuple, or the
/// canonical zero class when omitted.
fn class_rep(lat: &Lattice, class: &Option<String>) -> Result<DualCycle, Error> {
    match class {
        None => Ok(DualCycle::zero(lat.size())),
        Some(s) => {
            if let Some(raw) = s.strip_prefix("raw:") {
                let coeffs = parse_rationals(raw)?;
                if coeffs.len() != lat.size() {
                    return Err(Error::Unsupported(format!(
                        "raw class needs {} coefficients",
                        lat.size()
                    )));
                }
                Ok(DualCycle { coeffs })
            } else {
                let c = parse_ints(s)?;
                tuple_to_rep(lat, &c)
            }
        }
    }
}

/// Reduced-transform coefficient tuple to a representative of the class:
/// one-node graphs read (c0, c_1..c_d), two-node graphs
/// (c0, c0t, cbar, c_i..., ct_j...).
fn tuple_to_rep(lat: &Lattice, c: &[BigInt]) -> Result<DualCycle, Error> {
    let nodes = lat.graph.nodes();
    match nodes.len() {
        0 | 1 => {
            let center = nodes.first().copied().unwrap_or(0);
            let d = reduction::seifert_data(lat, center)?;
            if c.len() != d.legs.len() + 1 {
                return Err(Error::Unsupported(format!(
                    "lift tuple needs {} entries",
                    d.legs.len() + 1
                )));
            }
            let mut rep = lat.dual(center).scale(&BigRational::from_integer(c[0].clone()));
            for (i, leg) in d.legs.iter().enumerate() {
                let end = *leg.vertices.last().unwrap();
                rep = rep.add(&lat.dual(end).scale(&BigRational::from_integer(c[i + 1].clone())));
            }
            Ok(rep)
        }
        2 => {
            let d = reduction::two_node_data(lat)?;
            let (nl, nr) = (d.left.legs.len(), d.right.legs.len());
            if c.len() != 3 + nl + nr {
                return Err(Error::Unsupported(format!(
                    "lift tuple needs {} entries",
                    3 + nl + nr
                )));
            }
            let mut rep = lat.dual(d.left.node).scale(&BigRational::from_integer(c[0].clone()));
            rep = rep.add(&lat.dual(d.right.node).scale(&BigRational::from_integer(c[1].clone())));
            rep = rep.add(&lat.dual(d.chain[0]).scale(&BigRational::from_integer(c[2].clone())));
            for (i, leg) in d.left.legs.iter().enumerate() {
                let end = *leg.vertices.last().unwrap();
                rep = rep.add(&lat.dual(end).scale(&BigRational::from_integer(c[3 + i].clone())));
            }
            for (j, leg) in d.right.legs.iter().enumerate() {
                let end = *leg.vertices.last().unwrap();
                rep = rep
                    .add(&lat.dual(end).scale(&BigRational::from_integer(c[3 + nl + j].clone())));
            }
            Ok(rep)
        }
        n => Err(Error::Unsupported(format!("lift tuples unsupported for {n} nodes; use raw:"))),
    }
}

fn bad_set(lat: &Lattice, bad: &Option<String>) -> Result<BadVertexSet, Error> {
    let vertices = match bad {
        None => lat.graph.nodes(),
        Some(s) => s
            .split(',')
            .map(|id| {
                lat.graph
                    .index_of(id.trim())
                    .ok_or_else(|| Error::InvalidBadSet(format!("unknown vertex `{id}`")))
            })
            .collect::<Result<Vec<_>, _>>()?,
    };
    let set = BadVertexSet::new(vertices);
    if !laufer::validate_bad_vertices(lat, &set)? {
        return Err(Error::InvalidBadSet(
            "candidate set fails the rationality test; pass --bad explicitly".into(),
        ));
    }
    Ok(set)
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Check(args) => cmd_check(&args),
        Command::Zmin(args) => cmd_zmin(&args),
        Command::Rational(args) => cmd_rational(&args),
        Command::Cohomology(args) => cmd_cohomology(&args),
        Command::Pc(args) => cmd_pc(&args),
        Command::Ehrhart(args) => cmd_ehrhart(&args),
        Command::Render(args) => cmd_render(&args),
    }
}

fn cmd_check(args: &CommonArgs) -> Result<(), Error> {
    let lat = load(&args.graph)?;
    let k2s = latcoh::plumbing::k_squared_plus_s(&lat);
    if args.format == "json" {
        let out = serde_json::json!({
            "vertices": lat.size(),
            "det": lat.det().to_string(),
            "invariant_factors":
                lat.disc.factors.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
            "k_can": lat.k_can.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "k2_plus_s": k2s.to_string(),
            "nodes":
                lat.graph.nodes().iter().map(|&v| lat.graph.ids[v].clone()).collect::<Vec<_>>(),
        });
        println!("{}", serde_json::to_string_pretty(&out).unwrap());
    } else {
        println!("vertices:   {}", lat.size());
        println!("det(G):     {}", lat.det());
        let factors: Vec<String> = lat.disc.factors.iter().map(|f| f.to_string()).collect();
        println!(
            "H = L'/L:   {}",
            if factors.is_empty() {
                "trivial".to_string()
            } else {
                format!("Z/{}", factors.join(" x Z/"))
            }
        );
        let kc: Vec<String> = lat.k_can.coeffs.iter().map(|c| c.to_string()).collect();
        println!("k_can:      ({})", kc.join(", "));
        println!("K^2 + |V|:  {k2s}");
    }
    Ok(())
}

fn cmd_zmin(args: &CommonArgs) -> Result<(), Error> {
    let lat = load(&args.graph)?;
    let z = laufer::artin_cycle(&lat)?;
    let chi = lat.chi_can(&z.to_dual());
    if args.format == "json" {
        let out = serde_json::json!({
            "z_min": z.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "chi": chi.to_string(),
        });
        println!("{}", serde_json::to_string_pretty(&out).unwrap());
    } else {
        let cs: Vec<String> = z.coeffs.iter().map(|c| c.to_string()).collect();
        println!("Z_min = ({})", cs.join(", "));
        println!("chi(Z_min) = {chi}");
    }
    Ok(())
}

fn cmd_rational(args: &CommonArgs) -> Result<(), Error> {
    let lat = load(&args.graph)?;
    let (rational, w) = laufer::is_rational(&lat)?;
    if args.format == "json" {
        let out = serde_json::json!({
            "rational": rational,
            "chi_z_min": w.chi_z_min.to_string(),
            "every_step_one": w.every_step_one,
        });
        println!("{}", serde_json::to_string_pretty(&out).unwrap());
    } else {
        println!("rational: {rational}");
        println!("chi(Z_min) = {}", w.chi_z_min);
    }
    Ok(())
}

struct CohomologyData {
    rect: WeightRectangle,
    h0: homology::GradedZuModule,
    h1: Option<homology::GradedZuModule>,
    eu_h0: i64,
    eu_star: i64,
    min_path: i64,
    sw: homology::SwReport,
}

fn cohomology_data(lat: &Lattice, args: &CohomologyArgs) -> Result<CohomologyData, Error> {
    let bad = bad_set(lat, &args.bad)?;
    if bad.nu() == 0 {
        return Err(Error::InvalidBadSet(
            "empty bad set (rational graph): the cohomology is the trivial tail".into(),
        ));
    }
    let rep = class_rep(lat, &args.class)?;
    let class = laufer::spinc_class(lat, &rep)?;
    let rect_override = match &args.rect {
        None => None,
        Some(s) => Some(
            s.split(',')
                .map(|t| {
                    t.trim().parse::<i64>().map_err(|_| Error::Unsupported("bad --rect".into()))
                })
                .collect::<Result<Vec<_>, _>>()?,
        ),
    };
    let rect = reduction::weight_rectangle(lat, &bad, &class, rect_override)?;
    let h0 = homology::h0_module(&rect);
    let h1 = if rect.nu == 2 { Some(homology::h1_module(&rect)?) } else { None };
    let eu_h0 = -rect.min_weight() + h0.reduced_rank();
    let eu_star = homology::euler_characteristic(&rect);
    let min_path = homology::min_path_eu(&rect);
    let sw = homology::sw_invariant(lat, &rep, Some(bad))?;
    Ok(CohomologyData { rect, h0, h1, eu_h0, eu_star, min_path, sw })
}

fn cmd_cohomology(args: &CohomologyArgs) -> Result<(), Error> {
    let lat = load(&args.graph)?;
    let data = cohomology_data(&lat, args)?;
    if args.format == "json" {
        let ranks = homology::ranks_only(&data.rect);
        let out = serde_json::json!({
            "bound": data.rect.bound,
            "rectangle": data.rect.to_json(),
            "modules": {
                "h0": data.h0.to_json(),
                "h1": data.h1.as_ref().map(|m| m.to_json()),
                "ranks": ranks.iter().map(|lr| serde_json::json!({
                    "level": lr.level, "ranks": lr.ranks, "torsion_free": lr.torsion_free,
                })).collect::<Vec<_>>(),
            },
            "eu_h0": data.eu_h0,
            "eu_star": data.eu_star,
            "min_path_eu": data.min_path,
            "sw": data.sw.sw.to_string(),
            "sw_normalization": data.sw.normalization.to_string(),
        });
        println!("{}", serde_json::to_string_pretty(&out).unwrap());
    } else {
        println!(
            "bound:      ({})",
            data.rect.bound.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(", ")
        );
        println!("H^0 = {}", data.h0.display());
        if let Some(h1) = &data.h1 {
            println!("H^1 = {}", h1.display());
        }
        println!("eu(H^0)     = {}", data.eu_h0);
        println!("eu(H^*)     = {}", data.eu_star);
        println!("min path eu = {}", data.min_path);
        println!("sw          = {}", data.sw.sw);
    }
    Ok(())
}

fn cmd_pc(args: &PcArgs) -> Result<(), Error> {
    let lat = load(&args.graph)?;
    let nodes = lat.graph.nodes();
    let rep = class_rep(&lat, &args.class)?;
    let r_h = lat.r_representative(&rep);
    let shifted = lat.k_can.add(&r_h.scale(&rat(2)));
    let normalization = (lat.pair(&shifted, &shifted) + rat(lat.size() as i64)) / rat(8);
    let (pc, witness_json, normalized): (BigInt, serde_json::Value, serde_json::Value) =
        match nodes.len() {
            0 | 1 => {
                let center = nodes.first().copied().unwrap_or(0);
                let d = reduction::seifert_data(&lat, center)?;
                let y = lat.dual_coords(&rep);
                let mut lift = vec![BigInt::zero(); d.legs.len() + 1];
                lift[0] = y[center].clone();
                for (i, leg) in d.legs.iter().enumerate() {
                    let ks: Vec<BigInt> =
                        leg.vertices.iter().map(|&v| -lat.graph.euler[v].clone()).collect();
                    let mut c = BigInt::zero();
                    for (pos, &v) in leg.vertices.iter().enumerate() {
                        c += &y[v] * latcoh::arith::chain_det(&ks[pos + 1..]);
                    }
                    lift[i + 1] = c;
                }
                let pc = series::seifert_pc(&d, &lift);
                let ct = series::seifert_ctilde(&d, &lift);
                (
                    pc,
                    serde_json::json!({
                        "lift": lift.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                    }),
                    serde_json::json!({ "ctilde": ct.to_string() }),
                )
            }
            2 => {
                let d = reduction::two_node_data(&lat)?;
                let lift = TwoNodeLift::from_raw(&lat, &d, &rep);
                let (pc, w) = series::two_node_pc(&d, &lift, None)?;
                let norm = serde_json::json!({ "c": w.c.to_string(), "ct": w.ct.to_string() });
                (pc, w.to_json(), norm)
            }
            n => {
                return Err(Error::Unsupported(format!(
                    "pc unsupported for {n} nodes; use cohomology eu"
                )))
            }
        };
    let sw = -BigRational::from_integer(pc.clone()) - normalization.clone();
    if args.format == "json" {
        let out = serde_json::json!({
            "pc": pc.to_string(),
            "witness": witness_json,
            "normalized_class": normalized,
            "sw_normalization": normalization.to_string(),
            "sw": sw.to_string(),
        });
        println!("{}", serde_json::to_string_pretty(&out).unwrap());
    } else {
        println!("pc = {pc}");
        if let Some(c) = normalized.get("c") {
            println!(
                "(c, ct) = ({}, {})",
                c.as_str().unwrap(),
                normalized["ct"].as_str().unwrap()
            );
        }
        println!("sw = {sw}");
    }
    Ok(())
}

fn cmd_ehrhart(args: &EhrhartArgs) -> Result<(), Error> {
    let lat = load(&args.graph)?;
    let direction = if let Some(id) = args.ray.strip_prefix("Estar:") {
        let v = lat
            .graph
            .index_of(id.trim())
            .ok_or_else(|| Error::Unsupported(format!("unknown vertex `{id}`")))?;
        lat.dual(v).clone()
    } else {
        let coeffs = parse_rationals(&args.ray)?;
        if coeffs.len() != lat.size() {
            return Err(Error::Unsupported(format!("ray needs {} coefficients", lat.size())));
        }
        DualCycle { coeffs }
    };
    let fit = ehrhart::fit_ray_quasipolynomial(
        &lat,
        &direction,
        args.degree,
        args.period,
        ehrhart::FacetConvention::TRemoved,
        None,
    )?;
    if args.format == "json" {
        println!("{}", serde_json::to_string_pretty(&fit.to_json()).unwrap());
    } else {
        for (r, cs) in fit.coeffs.iter().enumerate() {
            let mut terms: Vec<String> = Vec::new();
            for (k, c) in cs.iter().enumerate().rev() {
                if c.is_zero() {
                    continue;
                }
                let var = match k {
                    0 => String::new(),
                    1 => "L".to_string(),
                    _ => format!("L^{k}"),
                };
                let coeff = if c == &rat(1) && k > 0 {
                    String::new()
                } else if c == &rat(-1) && k > 0 {
                    "-".to_string()
                } else {
                    c.to_string()
                };
                terms.push(format!("{coeff}{var}"));
            }
            let poly = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
            if fit.period == 1 {
                println!("{poly}");
            } else {
                println!("residue {r}: {poly}");
            }
        }
    }
    Ok(())
}

fn cmd_render(args: &CohomologyArgs) -> Result<(), Error> {
    let lat = load(&args.graph)?;
    let data = cohomology_data(&lat, args)?;
    if data.rect.nu != 2 {
        return Err(Error::Unsupported("rendering needs a rank-2 rectangle".into()));
    }
    match args.format.as_str() {
        "svg" => println!("{}", render_svg(&data)?),
        _ => print!("{}", render_ascii(&data.rect)),
    }
    Ok(())
}

/// Fixed-width grid of signed integers; origin lower-left, i horizontal.
fn render_ascii(rect: &WeightRectangle) -> String {
    let (bi, bj) = (rect.bound[0], rect.bound[1]);
    let width = (0..=bi)
        .flat_map(|i| (0..=bj).map(move |j| (i, j)))
        .map(|(i, j)| rect.w0(&[i, j]).to_string().len())
        .max()
        .unwrap_or(1);
    let mut out = String::new();
    for j in (0..=bj).rev() {
        let row: Vec<String> = (0..=bi).map(|i| format!("{:>width$}", rect.w0(&[i, j]))).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Static SVG figure: the integer grid, solid frames on finite degree-0
/// generator anchors, dashed frames on fresh holes, one minimal monotone
/// path highlighted.
fn render_svg(data: &CohomologyData) -> Result<String, Error> {
    let rect = &data.rect;
    let (bi, bj) = (rect.bound[0], rect.bound[1]);
    let cell = 28i64;
    let pad = 20i64;
    let w = pad * 2 + (bi + 1) * cell;
    let h = pad * 2 + (bj + 1) * cell;
    let cx = |i: i64| pad + i * cell + cell / 2;
    let cy = |j: i64| h - (pad + j * cell + cell / 2);
    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    ));
    s.push_str(
        "<style>text{font-family:monospace;font-size:11px;text-anchor:middle;dominant-baseline:middle}</style>\n",
    );
    let path = homology::min_path(rect);
    let pts: Vec<String> =
        path.steps.iter().map(|p| format!("{},{}", cx(p[0]), cy(p[1]))).collect();
    s.push_str(&format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#4a7fd4\" stroke-width=\"10\" stroke-opacity=\"0.35\"/>\n",
        pts.join(" ")
    ));
    for i in 0..=bi {
        for j in 0..=bj {
            s.push_str(&format!(
                "<text x=\"{}\" y=\"{}\">{}</text>\n",
                cx(i),
                cy(j),
                rect.w0(&[i, j])
            ));
        }
    }
    for (_, _, anchor) in homology::h0_generators(rect) {
        s.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{cell}\" height=\"{cell}\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1.5\"/>\n",
            cx(anchor[0]) - cell / 2,
            cy(anchor[1]) - cell / 2,
        ));
    }
    for (_, (x0, y0, x1, y1)) in homology::h1_generators(rect)? {
        let rx = cx(x0) - cell / 2;
        let ry = cy(y1) - cell / 2;
        let rw = (x1 - x0 + 1) * cell;
        let rh = (y1 - y0 + 1) * cell;
        s.push_str(&format!(
            "<rect x=\"{rx}\" y=\"{ry}\" width=\"{rw}\" height=\"{rh}\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1.5\" stroke-dasharray=\"5,3\"/>\n"
        ));
    }
    s.push_str("</svg>\n");
    Ok(s)
}
