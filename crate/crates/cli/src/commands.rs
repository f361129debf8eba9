use std::fmt::Write;

use billiards::flow::{trace, Orbit, PhasePoint};
use billiards::periodic::{
    exceptional_set_report, lshape_orbit, lshape_table, perp_scan, right_square_overlap, word_search_with, FootKind,
    WordSearch,
};
use billiards::stats::{discrepancy, epsilon_dense, scan_a_set};
use billiards::unfolding::{enumerate_generalized_diagonals, unfold, Visit};
use billiards::{Direction, FlowError, Point, Polygon, Scalar};
use serde_json::{json, Value};

use crate::render::Svg;
use crate::report::{direction, direction_text, num, point, point_text, segment, surd_sum, word_text};
use crate::{Backend, Cli, CliError, Command, OrbitSpec, Output};

fn numeric(e: impl std::fmt::Display) -> CliError {
    CliError::Numeric(e.to_string())
}

fn parse_point<S: Scalar>(text: &str) -> Result<Point<S>, CliError> {
    let bad = || CliError::Usage(format!("malformed point `{text}`, expected `x,y`"));
    let (x, y) = text.split_once(',').ok_or_else(bad)?;
    Ok(Point::new(S::parse(x).map_err(|_| bad())?, S::parse(y).map_err(|_| bad())?))
}

fn parse_direction<S: Scalar>(text: &str) -> Result<Direction<S>, CliError> {
    Direction::parse(text).map_err(|e| CliError::Usage(e.to_string()))
}

fn phase_point<S: Scalar>(spec: &OrbitSpec) -> Result<PhasePoint<S>, CliError> {
    let q = parse_point(&spec.pos)?;
    let v = parse_direction(&spec.dir)?;
    Ok(PhasePoint::new(q, v))
}

fn check_eps(eps: f64) -> Result<(), CliError> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("eps must be positive, got {eps}")))
    }
}

fn orbit<S: Scalar>(p: &Polygon<S>, spec: &OrbitSpec) -> Result<Orbit<S>, CliError> {
    let s = phase_point(spec)?;
    if spec.links == 0 {
        return Err(CliError::Usage("--links must be at least 1".into()));
    }
    trace(p, &s, spec.links).map_err(|e| match e {
        FlowError::InvalidPhasePoint => CliError::Numeric(format!(
            "start {} with direction {} is outside the table or points out of it",
            point_text(&s.q),
            direction_text(&s.v)
        )),
        other => numeric(other),
    })
}

fn table_canvas<S: Scalar>(p: &Polygon<S>) -> Svg {
    let mut svg = Svg::fit(&p.vertices_f64());
    svg.polygon(&p.vertices_f64(), "table");
    svg
}

fn draw_orbit<S: Scalar>(svg: &mut Svg, o: &Orbit<S>) {
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for l in &o.links {
        let (a, b) = (l.a.to_f64(), l.b.to_f64());
        if pts.last() != Some(&a) {
            if pts.len() > 1 {
                svg.polyline(&pts, "orbit");
            }
            pts = vec![a];
        }
        pts.push(b);
    }
    if pts.len() > 1 {
        svg.polyline(&pts, "orbit");
    }
    for e in o.events.iter().filter(|e| e.singular) {
        svg.cross(e.hit.to_f64(), "singular");
    }
}

fn table_json<S: Scalar>(p: &Polygon<S>) -> Value {
    json!({
        "vertices": p.vertices().iter().map(point).collect::<Vec<_>>(),
        "area": num(p.area()),
        "angles_pi": p.angles().map(|a| a.iter().map(|(n, d)| format!("{n}/{d}")).collect::<Vec<_>>()),
    })
}

/// Exact closed form of an orbit's length, when the backend is exact.
fn exact_length<S: Scalar>(o: &Orbit<S>) -> Option<String> {
    if !S::EXACT {
        return None;
    }
    let squares: Vec<String> = o.links.iter().map(|l| l.vector().norm2().to_exact_string()).collect();
    surd_sum(&squares)
}

fn orbit_json<S: Scalar>(o: &Orbit<S>) -> Value {
    json!({
        "start": { "pos": point(&o.start.q), "dir": direction(&o.start.v) },
        "links": o.links.iter().map(segment).collect::<Vec<_>>(),
        "events": o.events.iter().map(|e| json!({
            "hit": point(&e.hit),
            "side": e.side_index,
            "singular": e.singular,
            "vertex": e.vertex_index,
            "outgoing": direction(&e.outgoing),
        })).collect::<Vec<_>>(),
        "periodic": o.periodic.is_some(),
        "period_links": o.periodic.map(|p| p.links),
        "length": o.geometric_length,
        "length_exact": exact_length(o),
    })
}

fn orbit_summary<S: Scalar>(o: &Orbit<S>) -> String {
    let len = match exact_length(o) {
        Some(x) if x.contains('√') => format!("{x} ≈ {:.10}", o.geometric_length),
        _ => format!("{:.10}", o.geometric_length),
    };
    match o.periodic {
        Some(per) => format!("periodic, {} links, length {len}", per.links),
        None => format!("not periodic within {} links, length {len}", o.links.len()),
    }
}

fn simulate<S: Scalar>(p: &Polygon<S>, spec: &OrbitSpec) -> Result<Output, CliError> {
    let o = orbit(p, spec)?;
    let mut text = String::new();
    let _ = writeln!(text, "start {} direction {}", point_text(&o.start.q), direction_text(&o.start.v));
    let _ = writeln!(text, "{}", orbit_summary(&o));
    for e in o.events.iter().filter(|e| e.singular) {
        let _ = writeln!(text, "singular event at vertex {} {}", e.vertex_index.unwrap_or(usize::MAX), point_text(&e.hit));
    }
    for (i, l) in o.links.iter().enumerate() {
        let side = o.events.get(i).map(|e| e.side_index.to_string()).unwrap_or_else(|| "-".into());
        let _ = writeln!(text, "link {i}: {} -> {} side {side}", point_text(&l.a), point_text(&l.b));
    }
    let mut svg = table_canvas(p);
    draw_orbit(&mut svg, &o);
    svg.dot(o.start.q.to_f64(), "dot");
    Ok(Output {
        text,
        json: json!({ "command": "simulate", "table": table_json(p), "orbit": orbit_json(&o) }),
        svg: svg.finish(),
    })
}

fn unfold_cmd<S: Scalar>(p: &Polygon<S>, spec: &OrbitSpec) -> Result<Output, CliError> {
    let s = phase_point(spec)?;
    if spec.links == 0 {
        return Err(CliError::Usage("--links must be at least 1".into()));
    }
    let u = unfold(p, &s, spec.links).map_err(|e| match e {
        FlowError::InvalidPhasePoint => CliError::Numeric("start is outside the table or points out of it".into()),
        other => numeric(other),
    })?;
    let copies: Vec<Vec<(f64, f64)>> = u
        .corridor
        .copies
        .iter()
        .map(|c| p.vertices().iter().map(|v| c.apply(v).to_f64()).collect())
        .collect();
    let residual = u.collinearity_residual();
    let exact = u.is_exactly_collinear();
    let mut text = String::new();
    let _ = writeln!(text, "{} copies, word {}", copies.len(), word_text(&u.corridor.word));
    let _ = writeln!(text, "segment {} -> {}", point_text(&u.segment.a), point_text(&u.segment.b));
    let _ = writeln!(text, "collinearity residual {residual}");
    if S::EXACT {
        let _ = writeln!(text, "exactly collinear: {exact}");
    }
    let all: Vec<(f64, f64)> = copies.iter().flatten().copied().collect();
    let mut svg = Svg::fit(&all);
    for (i, c) in copies.iter().enumerate() {
        svg.polygon(c, if i == 0 { "table" } else { "copy" });
        let n = c.len() as f64;
        let centre = c.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0 / n, a.1 + b.1 / n));
        svg.label(centre, &i.to_string());
    }
    svg.polyline(&[u.segment.a.to_f64(), u.segment.b.to_f64()], "segment");
    for h in u.unfolded_hits() {
        svg.dot(h.to_f64(), "dot");
    }
    Ok(Output {
        text,
        json: json!({
            "command": "unfold",
            "table": table_json(p),
            "copies": u.corridor.copies.iter().map(|c| p.vertices().iter().map(|v| point(&c.apply(v))).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "word": u.corridor.word,
            "segment": segment(&u.segment),
            "link_copy": u.link_copy,
            "collinearity_residual": residual,
            "exactly_collinear": S::EXACT.then_some(exact),
            "orbit": orbit_json(&u.orbit),
        }),
        svg: svg.finish(),
    })
}

fn diagonals<S: Scalar>(p: &Polygon<S>, max_links: usize) -> Result<Output, CliError> {
    let ds = enumerate_generalized_diagonals(p, max_links);
    let mut text = String::from("# links word direction start_vertex\n");
    let mut svg = table_canvas(p);
    let mut rows = Vec::new();
    for d in &ds {
        let _ = writeln!(text, "{}", d.to_record());
        let start = PhasePoint::new(p.vertex(d.start_vertex).clone(), d.direction.clone());
        if let Ok(o) = billiards::flow::run_links(p, &start, d.link_count) {
            for l in &o.links {
                svg.polyline(&[l.a.to_f64(), l.b.to_f64()], "diagonal");
            }
        }
        rows.push(json!({
            "links": d.link_count,
            "word": d.word,
            "direction": direction(&d.direction),
            "start_vertex": d.start_vertex,
            "end_vertex": d.end_vertex(),
            "unfolded_segment": segment(&d.unfolded_segment),
        }));
    }
    Ok(Output {
        text,
        json: json!({ "command": "diagonals", "table": table_json(p), "max_links": max_links, "count": ds.len(), "diagonals": rows }),
        svg: svg.finish(),
    })
}

fn parse_window(w: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Usage(format!("malformed window `{w}`, expected `theta,delta`"));
    let (a, b) = w.split_once(',').ok_or_else(bad)?;
    let (t, d): (f64, f64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if !(t.is_finite() && d > 0.0 && d.is_finite()) {
        return Err(bad());
    }
    Ok((t, d))
}

fn periodic<S: Scalar>(p: &Polygon<S>, max_word: usize, window: Option<&str>, budget: Option<usize>) -> Result<Output, CliError> {
    let window = window.map(parse_window).transpose()?;
    let mut found = Vec::new();
    let stats = word_search_with(p, WordSearch { max_word, window, budget }, |c| {
        found.push(c.clone());
        Visit::Continue
    });
    found.sort_by(|a, b| (a.period_links, &a.word).cmp(&(b.period_links, &b.word)));
    let mut text = String::from("# word direction translation width period_links period_length\n");
    let mut svg = table_canvas(p);
    let mut rows = Vec::new();
    for c in &found {
        let _ = writeln!(text, "{}", c.to_record());
        if let Ok(o) = trace(p, &c.representative, c.period_links + 1) {
            draw_orbit(&mut svg, &o);
        }
        rows.push(json!({
            "word": c.word,
            "direction": direction(&c.direction),
            "translation": point(&c.translation),
            "width": c.width,
            "period_links": c.period_links,
            "period_length": c.period_length,
            "representative": { "pos": point(&c.representative.q), "dir": direction(&c.representative.v) },
        }));
    }
    let _ = writeln!(text, "# {} cylinders, {} corridor nodes expanded", found.len(), stats.expanded);
    Ok(Output {
        text,
        json: json!({
            "command": "periodic",
            "table": table_json(p),
            "max_word": max_word,
            "window": window.map(|(t, d)| json!({ "theta": t, "delta": d })),
            "expanded": stats.expanded,
            "budget_exhausted": stats.budget_exhausted,
            "cylinders": rows,
        }),
        svg: svg.finish(),
    })
}

fn perp<S: Scalar>(p: &Polygon<S>, side: Option<usize>, samples: usize, max_links: usize, exceptional: bool, seed: u64) -> Result<Output, CliError> {
    let sides: Vec<usize> = match side {
        Some(s) if s >= p.len() => return Err(CliError::Usage(format!("side {s} out of range (table has {} sides)", p.len()))),
        Some(s) => vec![s],
        None => (0..p.len()).collect(),
    };
    let mut text = String::new();
    let mut svg = table_canvas(p);
    let mut rows = Vec::new();
    for s in sides {
        let r = perp_scan(p, s, max_links, samples).map_err(numeric)?;
        let periodic = r.count(|k| matches!(k, FootKind::Periodic { .. }));
        let singular = r.count(|k| *k == FootKind::Singular);
        let undecided = r.count(|k| *k == FootKind::Undecided);
        let _ = writeln!(
            text,
            "side {s}: {periodic} periodic, {singular} singular, {undecided} undecided of {} samples; {} singular feet",
            r.samples.len(),
            r.singular_feet.len()
        );
        for f in &r.singular_feet {
            svg.cross(f.to_f64(), "singular");
        }
        for (f, k) in &r.samples {
            svg.dot(f.to_f64(), if matches!(k, FootKind::Periodic { .. }) { "dot" } else { "miss" });
        }
        rows.push(json!({
            "side": s,
            "samples": r.samples.len(),
            "periodic": periodic,
            "singular": singular,
            "undecided": undecided,
            "singular_feet": r.singular_feet.iter().map(point).collect::<Vec<_>>(),
            "periodic_runs": r.periodic_feet.iter().map(|(a, b)| json!({ "first": point(a), "last": point(b) })).collect::<Vec<_>>(),
            "feet": r.samples.iter().map(|(f, k)| json!({
                "foot": point(f),
                "kind": match k { FootKind::Periodic { .. } => "periodic", FootKind::Singular => "singular", FootKind::Undecided => "undecided" },
                "period_links": match k { FootKind::Periodic { period_links } => Some(*period_links), _ => None },
            })).collect::<Vec<_>>(),
        }));
    }
    let mut report = json!({ "command": "perp", "table": table_json(p), "max_links": max_links, "sides": rows });
    if exceptional {
        let e = exceptional_set_report(p, max_links, samples, seed).map_err(numeric)?;
        let _ = writeln!(
            text,
            "exceptional set: {} diagonal links, {} crossing candidates, collinear overlap {}, all samples covered {}",
            e.segments.len(),
            e.candidates.as_ref().map(|c| c.len().to_string()).unwrap_or_else(|| "-".into()),
            e.collinear_overlap,
            e.all_covered()
        );
        for (_, s) in &e.segments {
            svg.polyline(&[s.a.to_f64(), s.b.to_f64()], "diagonal");
        }
        report["exceptional"] = json!({
            "segments": e.segments.iter().map(|(i, s)| json!({ "side": i, "segment": segment(s) })).collect::<Vec<_>>(),
            "candidates": e.candidates.as_ref().map(|c| c.iter().map(point).collect::<Vec<_>>()),
            "collinear_overlap": e.collinear_overlap,
            "all_covered": e.all_covered(),
            "samples": e.samples.iter().map(|(q, n)| json!({ "point": point(q), "sides": n })).collect::<Vec<_>>(),
        });
    }
    Ok(Output { text, json: report, svg: svg.finish() })
}

fn welldist<S: Scalar>(p: &Polygon<S>, spec: &OrbitSpec, eps: f64, basis: Option<f64>) -> Result<Output, CliError> {
    check_eps(eps)?;
    let basis = basis.unwrap_or(eps);
    check_eps(basis)?;
    let o = orbit(p, spec)?;
    let mut r = discrepancy(p, &o, basis).map_err(numeric)?;
    r.well_distributed = r.sup_discrepancy < eps;
    let mut text = String::new();
    let _ = writeln!(text, "{}", orbit_summary(&o));
    let _ = writeln!(
        text,
        "eps {eps} (basis {basis}): {} regions, sup discrepancy {:.10}, well distributed {}",
        r.per_region.len(),
        r.sup_discrepancy,
        r.well_distributed
    );
    let mut svg = table_canvas(p);
    draw_orbit(&mut svg, &o);
    for x in &r.per_region {
        svg.dot(x.region.center.to_f64(), if x.discrepancy < eps { "dot" } else { "miss" });
    }
    Ok(Output {
        text,
        json: json!({
            "command": "welldist",
            "table": table_json(p),
            "orbit": orbit_json(&o),
            "epsilon": eps,
            "basis_epsilon": basis,
            "sup_discrepancy": r.sup_discrepancy,
            "well_distributed": r.well_distributed,
            "regions": r.per_region.iter().map(|x| json!({
                "center": point(&x.region.center),
                "denominators": [x.region.denominators.0, x.region.denominators.1],
                "diameter": num(&x.region.diameter),
                "length_fraction": x.length_fraction,
                "area_fraction": x.area_fraction,
                "discrepancy": x.discrepancy,
            })).collect::<Vec<_>>(),
        }),
        svg: svg.finish(),
    })
}

fn density<S: Scalar>(p: &Polygon<S>, spec: &OrbitSpec, eps: f64, surface: bool) -> Result<Output, CliError> {
    check_eps(eps)?;
    let o = orbit(p, spec)?;
    let r = epsilon_dense(p, &o, eps, surface).map_err(numeric)?;
    let mut text = String::new();
    let _ = writeln!(text, "{}", orbit_summary(&o));
    match &r.uncovered_witness {
        Some(w) => {
            let floor = r.witness_floor.map(|f| format!(" on floor {f}")).unwrap_or_default();
            let _ = writeln!(text, "eps {eps}: not dense, {} is uncovered{floor}", point_text(w));
        }
        None => {
            let _ = writeln!(text, "eps {eps}: dense (grid spacing {})", r.grid_spacing);
        }
    }
    let mut svg = table_canvas(p);
    draw_orbit(&mut svg, &o);
    if let Some(w) = &r.uncovered_witness {
        svg.cross(w.to_f64(), "singular");
    }
    Ok(Output {
        text,
        json: json!({
            "command": "density",
            "table": table_json(p),
            "orbit": orbit_json(&o),
            "epsilon": eps,
            "surface": surface,
            "dense": r.dense,
            "grid_spacing": r.grid_spacing,
            "uncovered_witness": r.uncovered_witness.as_ref().map(point),
            "witness_floor": r.witness_floor,
        }),
        svg: svg.finish(),
    })
}

fn lshape<S: Scalar>(k: usize) -> Result<Output, CliError> {
    if k == 0 {
        return Err(CliError::Usage("--k must be at least 1".into()));
    }
    let (p, o) = lshape_orbit::<S>(k).map_err(numeric)?;
    let (_, (lo, hi)) = lshape_table::<S>();
    let overlap = right_square_overlap(&o);
    let links = o.periodic.map(|x| x.links);
    let mut text = String::new();
    let _ = writeln!(text, "k {k}: start {} direction {}", point_text(&o.start.q), direction_text(&o.start.v));
    let _ = writeln!(text, "{}", orbit_summary(&o));
    let _ = writeln!(text, "length inside the right square: {overlap}");
    let mut svg = table_canvas(&p);
    let (a, b) = (lo.to_f64(), hi.to_f64());
    svg.polygon(&[a, (b.0, a.1), b, (a.0, b.1)], "zone");
    draw_orbit(&mut svg, &o);
    Ok(Output {
        text,
        json: json!({
            "command": "lshape",
            "k": k,
            "table": table_json(&p),
            "right_square": { "lo": point(&lo), "hi": point(&hi) },
            "links": links,
            "avoids_right_square": overlap == 0.0,
            "right_square_length": overlap,
            "orbit": orbit_json(&o),
        }),
        svg: svg.finish(),
    })
}

#[allow(clippy::too_many_arguments)]
fn scan<S: Scalar>(p: &Polygon<S>, theta: &str, delta: f64, eps: f64, grid: usize, max_word: usize, budget: usize) -> Result<Output, CliError> {
    check_eps(eps)?;
    if !(delta > 0.0 && delta.is_finite()) || grid == 0 {
        return Err(CliError::Usage("--delta must be positive and --grid at least 1".into()));
    }
    if !p.is_rational() {
        return Err(CliError::Numeric("scan needs a rational table".into()));
    }
    let t = parse_direction::<S>(theta)?.angle();
    let r = scan_a_set(p, t, delta, eps, grid, max_word, budget);
    let covered = r.points.iter().filter(|x| x.cylinder.is_some()).count();
    let mut text = String::new();
    let _ = writeln!(
        text,
        "theta {t:.10} delta {delta} eps {eps}: {covered}/{} grid points on a well-distributed periodic orbit, {} cylinders, coverage {:.4}",
        r.points.len(),
        r.cylinders.len(),
        r.coverage
    );
    let mut svg = table_canvas(p);
    for x in &r.points {
        svg.dot(x.point.to_f64(), if x.cylinder.is_some() { "dot" } else { "miss" });
    }
    Ok(Output {
        text,
        json: json!({
            "command": "scan",
            "table": table_json(p),
            "theta": t,
            "delta": delta,
            "epsilon": eps,
            "coverage": r.coverage,
            "expanded": r.expanded,
            "cylinders": r.cylinders.iter().map(|c| json!({
                "word": c.word,
                "direction": direction(&c.direction),
                "width": c.width,
                "period_links": c.period_links,
            })).collect::<Vec<_>>(),
            "points": r.points.iter().map(|x| json!({
                "point": point(&x.point),
                "cylinder": x.cylinder,
                "sup_discrepancy": x.sup_discrepancy,
            })).collect::<Vec<_>>(),
        }),
        svg: svg.finish(),
    })
}

pub fn run<S: Scalar>(cli: &Cli, p: &Polygon<S>) -> Result<Output, CliError> {
    let mut out = match &cli.command {
        Command::Simulate(spec) => simulate(p, spec),
        Command::Unfold(spec) => unfold_cmd(p, spec),
        Command::Diagonals { max_links } => diagonals(p, *max_links),
        Command::Periodic { max_word, window, budget } => periodic(p, *max_word, window.as_deref(), *budget),
        Command::Perp { side, samples, max_links, exceptional } => perp(p, *side, *samples, *max_links, *exceptional, cli.seed),
        Command::Welldist { orbit, eps, basis } => welldist(p, orbit, *eps, *basis),
        Command::Density { orbit, eps, surface } => density(p, orbit, *eps, *surface),
        Command::Lshape { k } => lshape::<S>(*k),
        Command::Scan { theta, delta, eps, grid, max_word, budget } => scan(p, theta, *delta, *eps, *grid, *max_word, *budget),
    }?;
    out.json["backend"] = json!(match cli.backend {
        Backend::Exact => "exact",
        Backend::Float => "float",
    });
    if cli.backend == Backend::Float {
        out.json["tolerance"] = json!(cli.tol);
    }
    Ok(out)
}
