//! How evenly orbits spread over the table: a countable basis of small disks,
//! disk/polygon areas, time fractions, ε-density, and direction scans.

use std::f64::consts::PI;

use num_integer::Integer;

use crate::error::FlowError;
use crate::flow::{trace, Orbit, PhasePoint};
use crate::geom::{Direction, Point, Segment};
use crate::periodic::{floor_angles, word_search_with, Cylinder, WordSearch};
use crate::polygon::{direction_floors, Containment, Polygon};
use crate::scalar::{angle_distance, from_decimal, Scalar};
use crate::unfolding::{enumerate_generalized_diagonals, Visit};

/// Disk with center `(a/q, b/s)` in lowest terms and diameter `1/max(q, s)`,
/// intersected with the table.
#[derive(Debug, Clone)]
pub struct BasisRegion<S> {
    pub center: Point<S>,
    /// Denominators `(q, s)` of the center coordinates.
    pub denominators: (i64, i64),
    pub diameter: S,
    /// Area of the region divided by the table's area.
    pub area_fraction: f64,
}

impl<S: Scalar> BasisRegion<S> {
    pub fn radius(&self) -> S {
        self.diameter.clone() * S::half()
    }
}

/// Largest `m` with `1/m > eps`.
fn max_denominator(eps: f64) -> i64 {
    let mut m = (1.0 / eps).floor() as i64;
    while m >= 1 && (m as f64) * eps >= 1.0 {
        m -= 1;
    }
    m
}

/// Exact squared distance from `x` to the closed table.
fn table_dist2<S: Scalar>(p: &Polygon<S>, x: &Point<S>) -> S {
    if p.contains(x) != Containment::Outside {
        return S::zero();
    }
    p.sides()
        .iter()
        .map(|s| s.dist2_to(x))
        .reduce(|a, b| if b < a { b } else { a })
        .expect("polygon has sides")
}

/// All basis regions of diameter greater than `eps` whose open disk meets
/// the table.
pub fn enumerate_basis<S: Scalar>(p: &Polygon<S>, eps: f64) -> Vec<BasisRegion<S>> {
    let m_max = max_denominator(eps);
    let total_area = p.area().to_f64_lossy();
    let (lo, hi) = p.bbox();
    let (lo, hi) = (lo.to_f64(), hi.to_f64());
    let mut out = Vec::new();
    for q in 1..=m_max {
        for s in 1..=m_max {
            let m = q.max(s);
            let r = S::from_frac(1, 2 * m);
            let rf = 0.5 / m as f64;
            let xs = ((lo.0 - rf) * q as f64).floor() as i64..=((hi.0 + rf) * q as f64).ceil() as i64;
            for a in xs {
                if a.gcd(&q) != 1 {
                    continue;
                }
                let ys = ((lo.1 - rf) * s as f64).floor() as i64..=((hi.1 + rf) * s as f64).ceil() as i64;
                for b in ys {
                    if b.gcd(&s) != 1 {
                        continue;
                    }
                    let c = Point::new(S::from_frac(a, q), S::from_frac(b, s));
                    if !(r.clone() * r.clone() - table_dist2(p, &c)).is_pos() {
                        continue;
                    }
                    let area = disk_polygon_area(p, &c, &r);
                    out.push(BasisRegion {
                        center: c,
                        denominators: (q, s),
                        diameter: S::from_frac(1, m),
                        area_fraction: area / total_area,
                    });
                }
            }
        }
    }
    out
}

/// Signed area of the disk of radius `r` about the origin intersected with
/// the triangle `(0, a, b)`.
fn disk_triangle_area(a: (f64, f64), b: (f64, f64), r: f64) -> f64 {
    let d = (b.0 - a.0, b.1 - a.1);
    let qa = d.0 * d.0 + d.1 * d.1;
    if qa == 0.0 {
        return 0.0;
    }
    let qb = 2.0 * (a.0 * d.0 + a.1 * d.1);
    let qc = a.0 * a.0 + a.1 * a.1 - r * r;
    let disc = qb * qb - 4.0 * qa * qc;
    let mut ts = vec![0.0];
    if disc > 0.0 {
        let sq = disc.sqrt();
        for t in [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)] {
            if t > 0.0 && t < 1.0 {
                ts.push(t);
            }
        }
    }
    ts.push(1.0);
    let at = |t: f64| (a.0 + t * d.0, a.1 + t * d.1);
    let mut total = 0.0;
    for w in ts.windows(2) {
        let (u, v) = (at(w[0]), at(w[1]));
        let m = at((w[0] + w[1]) / 2.0);
        let cross = u.0 * v.1 - u.1 * v.0;
        if m.0 * m.0 + m.1 * m.1 <= r * r {
            total += cross / 2.0;
        } else {
            let dot = u.0 * v.0 + u.1 * v.1;
            total += r * r * cross.atan2(dot) / 2.0;
        }
    }
    total
}

/// Area of the disk of radius `r` about `c` intersected with the table,
/// summed edge by edge from exact circular-segment formulas.
pub fn disk_polygon_area<S: Scalar>(p: &Polygon<S>, c: &Point<S>, r: &S) -> f64 {
    let cf = c.to_f64();
    let rf = r.to_f64_lossy();
    p.sides()
        .iter()
        .map(|s| {
            let (a, b) = (s.a.to_f64(), s.b.to_f64());
            disk_triangle_area((a.0 - cf.0, a.1 - cf.1), (b.0 - cf.0, b.1 - cf.1), rf)
        })
        .sum::<f64>()
        .abs()
}

/// Length of `s` inside the open disk of radius `r` about `c`. Tangent and
/// missing segments give exactly zero.
pub fn segment_disk_length<S: Scalar>(s: &Segment<S>, c: &Point<S>, r: &S) -> f64 {
    let d = s.vector();
    let w = s.a.clone() - c.clone();
    let qa = d.norm2();
    let qb = w.dot(&d);
    let qc = w.norm2() - r.clone() * r.clone();
    // Roots of qa·t² + 2·qb·t + qc; the quarter discriminant decides exactly.
    let disc = qb.clone() * qb.clone() - qa.clone() * qc;
    if !disc.is_pos() {
        return 0.0;
    }
    let (qa, qb, disc) = (qa.to_f64_lossy(), qb.to_f64_lossy(), disc.to_f64_lossy());
    let sq = disc.sqrt();
    let t0 = ((-qb - sq) / qa).max(0.0);
    let t1 = ((-qb + sq) / qa).min(1.0);
    if t1 > t0 {
        (t1 - t0) * qa.sqrt()
    } else {
        0.0
    }
}

/// Length of the orbit's links inside the region's open disk.
pub fn orbit_region_length<S: Scalar>(o: &Orbit<S>, region: &BasisRegion<S>) -> f64 {
    links_region_length(&o.links, region)
}

pub fn links_region_length<S: Scalar>(links: &[Segment<S>], region: &BasisRegion<S>) -> f64 {
    let r = region.radius();
    links.iter().map(|l| segment_disk_length(l, &region.center, &r)).sum()
}

#[derive(Debug, Clone)]
pub struct RegionDiscrepancy<S> {
    pub region: BasisRegion<S>,
    pub length_fraction: f64,
    pub area_fraction: f64,
    pub discrepancy: f64,
}

#[derive(Debug, Clone)]
pub struct DiscrepancyReport<S> {
    pub epsilon: f64,
    pub per_region: Vec<RegionDiscrepancy<S>>,
    pub sup_discrepancy: f64,
    pub well_distributed: bool,
}

/// Time fractions of a polyline against area fractions over the basis.
pub fn links_discrepancy<S: Scalar>(p: &Polygon<S>, links: &[Segment<S>], eps: f64) -> Result<DiscrepancyReport<S>, FlowError> {
    let total: f64 = links.iter().map(|l| l.length()).sum();
    if total <= 0.0 {
        return Err(FlowError::ZeroLength);
    }
    let per_region: Vec<RegionDiscrepancy<S>> = enumerate_basis(p, eps)
        .into_iter()
        .map(|region| {
            let lf = links_region_length(links, &region) / total;
            let af = region.area_fraction;
            RegionDiscrepancy { length_fraction: lf, area_fraction: af, discrepancy: (lf - af).abs(), region }
        })
        .collect();
    let sup = per_region.iter().map(|r| r.discrepancy).fold(0.0, f64::max);
    Ok(DiscrepancyReport { epsilon: eps, per_region, sup_discrepancy: sup, well_distributed: sup < eps })
}

/// Discrepancy of one period of a periodic orbit, or of the recorded links
/// of any other orbit.
pub fn discrepancy<S: Scalar>(p: &Polygon<S>, o: &Orbit<S>, eps: f64) -> Result<DiscrepancyReport<S>, FlowError> {
    links_discrepancy(p, &o.links, eps)
}

#[derive(Debug, Clone)]
pub struct DensityReport<S> {
    pub epsilon: f64,
    /// A grid point farther than `epsilon` from the orbit (checked exactly).
    pub uncovered_witness: Option<Point<S>>,
    /// In surface mode, the floor on which the witness is uncovered.
    pub witness_floor: Option<usize>,
    pub dense: bool,
    pub grid_spacing: f64,
}

/// Grid points of spacing `h` over the bounding box that lie in the closed table.
fn table_grid<S: Scalar>(p: &Polygon<S>, h: &S) -> Vec<Point<S>> {
    let (lo, hi) = p.bbox();
    let hf = h.to_f64_lossy();
    let nx = ((hi.x.clone() - lo.x.clone()).to_f64_lossy() / hf).floor() as i64;
    let ny = ((hi.y.clone() - lo.y.clone()).to_f64_lossy() / hf).floor() as i64;
    let mut out = Vec::new();
    for j in 0..=ny {
        for i in 0..=nx {
            let x = Point::new(
                lo.x.clone() + h.clone() * S::from_int(i),
                lo.y.clone() + h.clone() * S::from_int(j),
            );
            if p.contains_closed(&x) {
                out.push(x);
            }
        }
    }
    out
}

/// The grid point farthest from `links`, if that distance exceeds `eps`
/// exactly. Ties go to the point nearest the middle of the bounding box.
fn farthest_uncovered<S: Scalar>(p: &Polygon<S>, grid: &[Point<S>], links: &[&Segment<S>], eps: &S) -> Option<Point<S>> {
    let (lo, hi) = p.bbox();
    let mid = lo.to_f64();
    let mid = ((mid.0 + hi.x.to_f64_lossy()) / 2.0, (mid.1 + hi.y.to_f64_lossy()) / 2.0);
    let mut best: Option<(f64, f64, &Point<S>)> = None;
    for x in grid {
        let d = links.iter().map(|l| l.dist2_to(x).to_f64_lossy()).fold(f64::INFINITY, f64::min);
        let (xf, yf) = x.to_f64();
        let c = (xf - mid.0).hypot(yf - mid.1);
        let better = match best {
            None => true,
            Some((bd, bc, _)) => d > bd + 1e-15 || ((d - bd).abs() <= 1e-15 && c < bc),
        };
        if better {
            best = Some((d, c, x));
        }
    }
    let (_, _, x) = best?;
    let eps2 = eps.clone() * eps.clone();
    links.iter().all(|l| l.dist2_to(x) > eps2).then(|| x.clone())
}

/// Direction of each link of `o`.
fn link_directions<S: Scalar>(o: &Orbit<S>) -> Vec<Direction<S>> {
    let mut dirs = vec![o.start.v.clone()];
    dirs.extend(o.events.iter().map(|e| e.outgoing.clone()));
    dirs.truncate(o.links.len());
    dirs
}

/// Grid test of ε-density. In table mode every grid point of spacing ε/4 in
/// the table must lie within ε of some link. In surface mode the same is
/// required separately on each floor, using only the links travelling in
/// that floor's direction.
pub fn epsilon_dense<S: Scalar>(p: &Polygon<S>, o: &Orbit<S>, eps: f64, surface: bool) -> Result<DensityReport<S>, FlowError> {
    let e: S = from_decimal(eps).ok_or(FlowError::ZeroLength)?;
    let h = e.clone() * S::from_frac(1, 4);
    let grid = table_grid(p, &h);
    let mut report = DensityReport {
        epsilon: eps,
        uncovered_witness: None,
        witness_floor: None,
        dense: true,
        grid_spacing: h.to_f64_lossy(),
    };
    if !surface {
        let links: Vec<&Segment<S>> = o.links.iter().collect();
        report.uncovered_witness = farthest_uncovered(p, &grid, &links, &e);
    } else {
        let floors = direction_floors(p, &o.start.v)?;
        let dirs = link_directions(o);
        for (fi, fd) in floors.directions.iter().enumerate() {
            let links: Vec<&Segment<S>> =
                o.links.iter().zip(&dirs).filter(|(_, d)| d.same_ray(fd)).map(|(l, _)| l).collect();
            let w = if links.is_empty() {
                grid.first().cloned()
            } else {
                farthest_uncovered(p, &grid, &links, &e)
            };
            if let Some(w) = w {
                report.uncovered_witness = Some(w);
                report.witness_floor = Some(fi);
                break;
            }
        }
    }
    report.dense = report.uncovered_witness.is_none();
    Ok(report)
}

/// A scanned point and, when covered, the index of the covering cylinder.
#[derive(Debug, Clone)]
pub struct ScanPoint<S> {
    pub point: Point<S>,
    pub cylinder: Option<usize>,
    pub sup_discrepancy: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ScanReport<S> {
    pub points: Vec<ScanPoint<S>>,
    pub cylinders: Vec<Cylinder<S>>,
    pub coverage: f64,
    pub expanded: usize,
}

/// Orbit from table point `q` along the cylinder's folded band, in either
/// orientation and within `window` when given, if `q` lies strictly inside a
/// piece and the orbit closes with the cylinder's period.
pub fn cylinder_orbit_through<S: Scalar>(
    p: &Polygon<S>,
    c: &Cylinder<S>,
    q: &Point<S>,
    window: Option<(f64, f64)>,
) -> Option<Orbit<S>> {
    let copies = crate::unfolding::copies_for_word(p, &c.word);
    for (k, quad) in c.folded_pieces(p).iter().enumerate() {
        let edges: Vec<usize> = (0..4).filter(|&i| quad[(i + 1) % 4] != quad[i]).collect();
        let side = |i: &usize| (quad[(i + 1) % 4].clone() - quad[*i].clone()).cross(&(q.clone() - quad[*i].clone()));
        let inside = edges.iter().all(|i| side(i).is_pos()) || edges.iter().all(|i| side(i).is_neg());
        if !inside {
            continue;
        }
        let dir = copies[k].inverse().apply_dir(&c.direction);
        for dir in [dir.clone(), dir.reversed()] {
            if window.is_some_and(|(theta, delta)| angle_distance(dir.angle(), theta) >= delta) {
                continue;
            }
            let o = trace(p, &PhasePoint::new(q.clone(), dir), c.period_links + 1).ok()?;
            if o.periodic.is_some_and(|per| per.links == c.period_links) && !o.has_singular_event() {
                return Some(o);
            }
        }
    }
    None
}

/// For `grid × grid` cell centers of the table, looks for an
/// ε-well-distributed periodic orbit through the point with direction
/// within `delta` of `theta`, among the cylinders found by a windowed word
/// search capped at `budget` corridor nodes.
pub fn scan_a_set<S: Scalar>(
    p: &Polygon<S>,
    theta: f64,
    delta: f64,
    eps: f64,
    grid: usize,
    max_word: usize,
    budget: usize,
) -> ScanReport<S> {
    let mut cylinders = Vec::new();
    let mut expanded = 0;
    for target in floor_angles(p, theta) {
        let left = budget.saturating_sub(expanded);
        if left == 0 {
            break;
        }
        let stats = word_search_with(p, WordSearch { max_word, window: Some((target, delta)), budget: Some(left) }, |c| {
            if !cylinders.iter().any(|x: &Cylinder<S>| x.word == c.word && x.strip == c.strip) {
                cylinders.push(c.clone());
            }
            Visit::Continue
        });
        expanded += stats.expanded;
    }
    let (lo, hi) = p.bbox();
    let g = grid.max(1) as i64;
    let mut points = Vec::new();
    for j in 0..g {
        for i in 0..g {
            let fx = S::from_frac(2 * i + 1, 2 * g);
            let fy = S::from_frac(2 * j + 1, 2 * g);
            let q = Point::new(
                lo.x.clone() + (hi.x.clone() - lo.x.clone()) * fx,
                lo.y.clone() + (hi.y.clone() - lo.y.clone()) * fy,
            );
            if p.contains(&q) != Containment::Inside {
                continue;
            }
            let mut hit = ScanPoint { point: q.clone(), cylinder: None, sup_discrepancy: None };
            for (ci, c) in cylinders.iter().enumerate() {
                let Some(o) = cylinder_orbit_through(p, c, &q, Some((theta, delta))) else { continue };
                let Ok(rep) = discrepancy(p, &o, eps) else { continue };
                if rep.well_distributed {
                    hit.cylinder = Some(ci);
                    hit.sup_discrepancy = Some(rep.sup_discrepancy);
                    break;
                }
            }
            points.push(hit);
        }
    }
    let covered = points.iter().filter(|x| x.cylinder.is_some()).count();
    let coverage = if points.is_empty() { 0.0 } else { covered as f64 / points.len() as f64 };
    ScanReport { points, cylinders, coverage, expanded }
}

/// A direction with a generalized diagonal together with a periodic orbit
/// in that direction that is not ε-dense, and the uncovered point.
#[derive(Debug, Clone)]
pub struct CEpsilonWitness<S> {
    pub direction: Direction<S>,
    pub orbit: Orbit<S>,
    pub witness: Point<S>,
}

/// Directions carrying a generalized diagonal of at most `max_links` links
/// for which some cylinder orbit misses an ε-ball. Only certified witnesses
/// are returned.
pub fn c_epsilon_candidates<S: Scalar>(p: &Polygon<S>, eps: f64, max_links: usize) -> Vec<CEpsilonWitness<S>> {
    let mut dirs: Vec<Direction<S>> = Vec::new();
    for d in enumerate_generalized_diagonals(p, max_links) {
        for x in [d.direction.clone(), d.direction.reversed()] {
            if !dirs.iter().any(|y| y.same_ray(&x)) {
                dirs.push(x);
            }
        }
    }
    let max_word = 2 * max_links + 2;
    let mut out = Vec::new();
    for d in dirs {
        let mut found: Option<CEpsilonWitness<S>> = None;
        let window = Some((d.angle(), 1e-9));
        word_search_with(p, WordSearch { max_word, window, budget: None }, |c| {
            if !c.direction.same_ray(&d) {
                return Visit::Continue;
            }
            let Ok(o) = trace(p, &c.representative, c.period_links + 1) else { return Visit::Continue };
            let Ok(rep) = epsilon_dense(p, &o, eps, false) else { return Visit::Continue };
            match rep.uncovered_witness {
                Some(w) => {
                    found = Some(CEpsilonWitness { direction: d.clone(), orbit: o, witness: w });
                    Visit::Stop
                }
                None => Visit::Continue,
            }
        });
        out.extend(found);
    }
    out
}

/// Area of a disk fully inside the table, as a fraction of the table.
pub fn interior_disk_fraction<S: Scalar>(p: &Polygon<S>, r: f64) -> f64 {
    PI * r * r / p.area().to_f64_lossy()
}
