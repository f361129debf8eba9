//! The billiard table: construction and validation, rational angle data, and
//! the finite set of directions ("floors") a rational table confines a
//! direction to.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt::Write as _;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::Zero;

use crate::error::{ParseError, PolygonError};
use crate::geom::{reflect_across_line, Direction, Isometry, Point, Segment};
use crate::scalar::{simplest_rational_in, Scalar};

/// Acceptance tolerance for float angle certification, in radians.
pub const ANGLE_TOLERANCE: f64 = 1e-9;

/// Denominator cap used when `build_polygon` certifies angles.
pub const DEFAULT_MAX_DENOMINATOR: i64 = 360;

/// Interior angle `p/q · π` in lowest terms.
pub type AngleFraction = (i64, i64);

#[derive(Debug, Clone)]
pub struct Polygon<S> {
    vertices: Vec<Point<S>>,
    sides: Vec<Segment<S>>,
    reflections: Vec<Isometry<S>>,
    convex_at: Vec<bool>,
    area: S,
    angles: Option<Vec<AngleFraction>>,
}

impl<S: Scalar> PartialEq for Polygon<S> {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
    }
}

/// Where a point sits relative to the closed table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Containment {
    Inside,
    /// On the boundary; the payload is one side containing the point.
    Boundary(usize),
    Outside,
}

fn orient<S: Scalar>(a: &Point<S>, b: &Point<S>, c: &Point<S>) -> Ordering {
    (b.clone() - a.clone()).cross(&(c.clone() - a.clone())).sign_cmp()
}

fn segments_intersect<S: Scalar>(s: &Segment<S>, t: &Segment<S>) -> bool {
    let o1 = orient(&s.a, &s.b, &t.a);
    let o2 = orient(&s.a, &s.b, &t.b);
    let o3 = orient(&t.a, &t.b, &s.a);
    let o4 = orient(&t.a, &t.b, &s.b);
    if o1 != o2 && o3 != o4 && o1 != Ordering::Equal && o2 != Ordering::Equal
        && o3 != Ordering::Equal && o4 != Ordering::Equal
    {
        return true;
    }
    s.contains(&t.a) || s.contains(&t.b) || t.contains(&s.a) || t.contains(&s.b)
}

/// Builds a validated polygon, normalizing the orientation to
/// counterclockwise and attempting rational certification.
pub fn build_polygon<S: Scalar>(vertices: Vec<Point<S>>) -> Result<Polygon<S>, PolygonError> {
    let n = vertices.len();
    if n < 3 {
        return Err(PolygonError::TooFewVertices(n));
    }
    for j in 0..n {
        for i in 0..j {
            if vertices[i].approx_eq(&vertices[j]) {
                return Err(PolygonError::RepeatedVertex(j));
            }
        }
    }
    let mut twice_area = S::zero();
    for i in 0..n {
        twice_area = twice_area + vertices[i].cross(&vertices[(i + 1) % n]);
    }
    let sides: Vec<Segment<S>> = (0..n)
        .map(|i| Segment::new(vertices[i].clone(), vertices[(i + 1) % n].clone()).expect("distinct vertices"))
        .collect();
    for i in 0..n {
        for j in (i + 1)..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // Adjacent sides may only share their common endpoint.
                let (s, t) = if j == i + 1 { (&sides[i], &sides[j]) } else { (&sides[j], &sides[i]) };
                if s.contains(&t.b) || t.contains(&s.a) {
                    return Err(PolygonError::SelfIntersection(i, j));
                }
            } else if segments_intersect(&sides[i], &sides[j]) {
                return Err(PolygonError::SelfIntersection(i, j));
            }
        }
    }
    if twice_area.is_zero_tol() {
        return Err(PolygonError::ZeroArea);
    }
    let mut vertices = vertices;
    let mut sides = sides;
    if twice_area.is_neg() {
        vertices.reverse();
        sides = (0..n)
            .map(|i| Segment::new(vertices[i].clone(), vertices[(i + 1) % n].clone()).expect("distinct"))
            .collect();
        twice_area = -twice_area;
    }
    let reflections = sides
        .iter()
        .map(|s| reflect_across_line(s).expect("nondegenerate side"))
        .collect();
    let convex_at = (0..n)
        .map(|i| {
            let e_in = sides[(i + n - 1) % n].vector();
            let e_out = sides[i].vector();
            !e_in.cross(&e_out).is_neg()
        })
        .collect();
    let mut poly = Polygon {
        vertices,
        sides,
        reflections,
        convex_at,
        area: twice_area * S::half(),
        angles: None,
    };
    poly.angles = certify_rational(&poly, DEFAULT_MAX_DENOMINATOR);
    Ok(poly)
}

/// Interior angle of `p` at vertex `i`, in `(0, 2π)`.
pub fn interior_angle<S: Scalar>(p: &Polygon<S>, i: usize) -> f64 {
    let (u, w) = p.angle_vectors(i);
    let (ux, uy) = u.to_f64();
    let (wx, wy) = w.to_f64();
    let cross = ux * wy - uy * wx;
    let dot = ux * wx + uy * wy;
    cross.atan2(dot).rem_euclid(std::f64::consts::TAU)
}

/// Certifies every interior angle as `(p_i/q_i)·π` with `q_i ≤ max_denominator`.
///
/// Exact backend: the angle α between rational edge vectors satisfies
/// `α ∈ (π/q)ℤ` iff `(e^{2iα})^q = 1`, and `e^{2iα}` is a rational complex
/// number, so the test is decided exactly. Float backend: each angle must lie
/// within [`ANGLE_TOLERANCE`] of the simplest fraction near `α/π`.
pub fn certify_rational<S: Scalar>(p: &Polygon<S>, max_denominator: i64) -> Option<Vec<AngleFraction>> {
    if max_denominator < 1 {
        return None;
    }
    let n = p.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let alpha = interior_angle(p, i);
        let frac = if S::EXACT {
            certify_exact_angle(p, i, alpha, max_denominator)?
        } else {
            let x = alpha / PI;
            let tol = ANGLE_TOLERANCE / PI;
            let (num, den) = simplest_rational_in(x - tol, x + tol)?;
            if den > max_denominator || num <= 0 {
                return None;
            }
            (num, den)
        };
        out.push(frac);
    }
    let sum = out
        .iter()
        .fold(Ratio::<i64>::zero(), |acc, &(a, b)| acc + Ratio::new(a, b));
    (sum == Ratio::from_integer(n as i64 - 2)).then_some(out)
}

fn certify_exact_angle<S: Scalar>(p: &Polygon<S>, i: usize, alpha: f64, max_den: i64) -> Option<AngleFraction> {
    let (u, w) = p.angle_vectors(i);
    let re = u.dot(&w);
    let im = u.cross(&w);
    let nn = u.norm2() * w.norm2();
    // z = (re + i·im)^2 / (|u|²|w|²) = e^{2iα}
    let zr = (re.clone() * re.clone() - im.clone() * im.clone()) / nn.clone();
    let zi = (S::two() * re * im) / nn;
    for q in 1..=max_den {
        let pf = (alpha * q as f64 / PI).round();
        if pf < 1.0 || (alpha - pf * PI / q as f64).abs() > 1e-6 {
            continue;
        }
        let pn = pf as i64;
        if pn.gcd(&q) != 1 {
            continue;
        }
        let (r, s) = complex_pow(&zr, &zi, q as u64);
        if r.is_one() && s.is_zero() {
            return Some((pn, q));
        }
    }
    None
}

fn complex_pow<S: Scalar>(re: &S, im: &S, mut e: u64) -> (S, S) {
    let mul = |a: &(S, S), b: &(S, S)| {
        (
            a.0.clone() * b.0.clone() - a.1.clone() * b.1.clone(),
            a.0.clone() * b.1.clone() + a.1.clone() * b.0.clone(),
        )
    };
    let mut acc = (S::one(), S::zero());
    let mut base = (re.clone(), im.clone());
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(&acc, &base);
        }
        base = mul(&base, &base);
        e >>= 1;
    }
    acc
}

impl<S: Scalar> Polygon<S> {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Point<S>] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &Point<S> {
        &self.vertices[i % self.len()]
    }

    pub fn sides(&self) -> &[Segment<S>] {
        &self.sides
    }

    pub fn side(&self, i: usize) -> &Segment<S> {
        &self.sides[i]
    }

    /// Reflection across the line of side `i`.
    pub fn reflection(&self, i: usize) -> &Isometry<S> {
        &self.reflections[i]
    }

    pub fn area(&self) -> &S {
        &self.area
    }

    pub fn angles(&self) -> Option<&[AngleFraction]> {
        self.angles.as_deref()
    }

    pub fn is_rational(&self) -> bool {
        self.angles.is_some()
    }

    /// Re-runs certification with a different denominator cap.
    pub fn recertify(&mut self, max_denominator: i64) -> bool {
        self.angles = certify_rational(self, max_denominator);
        self.angles.is_some()
    }

    /// lcm of the certified angle denominators.
    pub fn angle_lcm(&self) -> Option<i64> {
        self.angles
            .as_ref()
            .map(|a| a.iter().fold(1i64, |acc, &(_, q)| acc.lcm(&q)))
    }

    /// Side ending at vertex `i` (counterclockwise order).
    pub fn side_into(&self, i: usize) -> usize {
        (i + self.len() - 1) % self.len()
    }

    /// Side starting at vertex `i`.
    pub fn side_out_of(&self, i: usize) -> usize {
        i % self.len()
    }

    /// Interior lies to the left of every side.
    pub fn inward_normal(&self, side: usize) -> Point<S> {
        self.sides[side].vector().perp()
    }

    pub fn is_convex_at(&self, i: usize) -> bool {
        self.convex_at[i]
    }

    pub fn is_convex(&self) -> bool {
        self.convex_at.iter().all(|&c| c)
    }

    /// Edge vectors from vertex `i` to its successor and its predecessor;
    /// the interior angle runs counterclockwise from the first to the second.
    fn angle_vectors(&self, i: usize) -> (Point<S>, Point<S>) {
        let n = self.len();
        let v = &self.vertices[i];
        (
            self.vertices[(i + 1) % n].clone() - v.clone(),
            self.vertices[(i + n - 1) % n].clone() - v.clone(),
        )
    }

    /// Direction strictly inside the interior cone at vertex `i`.
    pub fn points_inward_at_vertex(&self, i: usize, d: &Point<S>) -> bool {
        let na = self.inward_normal(self.side_into(i));
        let nb = self.inward_normal(self.side_out_of(i));
        let (da, db) = (d.dot(&na), d.dot(&nb));
        if self.convex_at[i] {
            da.is_pos() && db.is_pos()
        } else {
            da.is_pos() || db.is_pos()
        }
    }

    pub fn contains(&self, p: &Point<S>) -> Containment {
        for (i, s) in self.sides.iter().enumerate() {
            if s.contains(p) {
                return Containment::Boundary(i);
            }
        }
        // Crossing number with half-open edge rule.
        let mut inside = false;
        for s in &self.sides {
            let (a, b) = (&s.a, &s.b);
            if (a.y > p.y) != (b.y > p.y) {
                let o = orient(a, b, p);
                let upward = b.y > a.y;
                if (upward && o == Ordering::Greater) || (!upward && o == Ordering::Less) {
                    inside = !inside;
                }
            }
        }
        if inside {
            Containment::Inside
        } else {
            Containment::Outside
        }
    }

    pub fn contains_closed(&self, p: &Point<S>) -> bool {
        self.contains(p) != Containment::Outside
    }

    pub fn bbox(&self) -> (Point<S>, Point<S>) {
        let mut lo = self.vertices[0].clone();
        let mut hi = self.vertices[0].clone();
        for v in &self.vertices[1..] {
            if v.x < lo.x {
                lo.x = v.x.clone();
            }
            if v.y < lo.y {
                lo.y = v.y.clone();
            }
            if v.x > hi.x {
                hi.x = v.x.clone();
            }
            if v.y > hi.y {
                hi.y = v.y.clone();
            }
        }
        (lo, hi)
    }

    /// Diameter (largest vertex-to-vertex distance).
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for a in &self.vertices {
            for b in &self.vertices {
                d = d.max(a.dist(b));
            }
        }
        d
    }

    pub fn vertices_f64(&self) -> Vec<(f64, f64)> {
        self.vertices.iter().map(|v| v.to_f64()).collect()
    }

    /// Index of the vertex equal to `p`, if any.
    pub fn vertex_index(&self, p: &Point<S>) -> Option<usize> {
        self.vertices.iter().position(|v| v.approx_eq(p))
    }
}

pub fn area<S: Scalar>(p: &Polygon<S>) -> S {
    p.area.clone()
}

/// The directions reachable from a base direction under the linear parts of
/// the side reflections.
#[derive(Debug, Clone)]
pub struct FloorSet<S> {
    pub base: Direction<S>,
    pub directions: Vec<Direction<S>>,
}

impl<S: Scalar> FloorSet<S> {
    pub fn floor_count(&self) -> usize {
        self.directions.len()
    }

    pub fn index_of(&self, d: &Direction<S>) -> Option<usize> {
        self.directions.iter().position(|x| x.same_ray(d))
    }

    pub fn contains(&self, d: &Direction<S>) -> bool {
        self.index_of(d).is_some()
    }
}

/// Closure of `theta` under the linear parts of all side reflections.
pub fn direction_floors<S: Scalar>(p: &Polygon<S>, theta: &Direction<S>) -> Result<FloorSet<S>, PolygonError> {
    let lcm = p.angle_lcm().ok_or(PolygonError::NotRational)?;
    let cap = 2 * lcm as usize;
    let mut dirs = vec![theta.clone()];
    let mut frontier = 0;
    while frontier < dirs.len() {
        let d = dirs[frontier].clone();
        frontier += 1;
        for r in &p.reflections {
            let e = r.apply_dir(&d);
            if !dirs.iter().any(|x| x.same_ray(&e)) {
                dirs.push(e);
                if dirs.len() > cap {
                    return Err(PolygonError::NotRational);
                }
            }
        }
    }
    Ok(FloorSet {
        base: theta.clone(),
        directions: dirs,
    })
}

/// Linear parts of the group generated by the side reflections.
pub fn floor_group<S: Scalar>(p: &Polygon<S>) -> Result<Vec<Isometry<S>>, PolygonError> {
    let lcm = p.angle_lcm().ok_or(PolygonError::NotRational)?;
    let cap = 2 * lcm as usize;
    let gens: Vec<Isometry<S>> = p.reflections.iter().map(|r| r.linear()).collect();
    let mut elems = vec![Isometry::identity()];
    let mut frontier = 0;
    while frontier < elems.len() {
        let g = elems[frontier].clone();
        frontier += 1;
        for r in &gens {
            let h = r.compose(&g);
            if !elems.iter().any(|e| e.linear_approx_eq(&h)) {
                elems.push(h);
                if elems.len() > cap {
                    return Err(PolygonError::NotRational);
                }
            }
        }
    }
    Ok(elems)
}

/// Parses the polygon text format: one `x y` vertex per line, integers or
/// fractions `p/q`; `#` starts a comment; blank lines are ignored.
pub fn parse_polygon_text<S: Scalar>(text: &str) -> Result<Vec<Point<S>>, ParseError> {
    let mut pts = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(ParseError::Line {
                line: ln + 1,
                msg: format!("expected `x y`, got `{line}`"),
            });
        }
        let parse = |f: &str| {
            if S::EXACT || !f.contains(['.', 'e', 'E']) {
                S::parse(f)
            } else {
                Err(ParseError::Number(f.to_string()))
            }
        };
        let x = parse(fields[0]).map_err(|e| ParseError::Line { line: ln + 1, msg: e.to_string() })?;
        let y = parse(fields[1]).map_err(|e| ParseError::Line { line: ln + 1, msg: e.to_string() })?;
        pts.push(Point::new(x, y));
    }
    Ok(pts)
}

pub fn read_polygon<S: Scalar>(text: &str) -> Result<Polygon<S>, PolygonError> {
    build_polygon(parse_polygon_text(text)?)
}

/// Writes the polygon text format; re-parses to an equal polygon.
pub fn write_polygon_text<S: Scalar>(p: &Polygon<S>) -> String {
    let mut out = String::from("# billiard table, counterclockwise\n");
    for v in &p.vertices {
        let _ = writeln!(out, "{} {}", v.x.to_exact_string(), v.y.to_exact_string());
    }
    out
}

/// Standard tables used by tests, examples and the CLI.
pub mod shapes {
    use super::*;

    fn from_ints<S: Scalar>(pts: &[(i64, i64)]) -> Polygon<S> {
        build_polygon(pts.iter().map(|&(x, y)| Point::from_ints(x, y)).collect()).expect("valid fixture")
    }

    pub fn unit_square<S: Scalar>() -> Polygon<S> {
        from_ints(&[(0, 0), (1, 0), (1, 1), (0, 1)])
    }

    /// Legs of length 1 along the axes; angles 90-45-45.
    pub fn right_isosceles<S: Scalar>() -> Polygon<S> {
        from_ints(&[(0, 0), (1, 0), (0, 1)])
    }

    /// Three unit squares; the right-hand square is `[1,2]×[0,1]`.
    pub fn l_shape<S: Scalar>() -> Polygon<S> {
        from_ints(&[(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)])
    }

    /// Float backend only (irrational coordinates).
    pub fn equilateral() -> Polygon<f64> {
        build_polygon(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.5, 3f64.sqrt() / 2.0),
        ])
        .expect("valid")
    }

    /// Float backend only.
    pub fn regular_hexagon() -> Polygon<f64> {
        build_polygon(
            (0..6)
                .map(|k| {
                    let a = k as f64 * PI / 3.0;
                    Point::new(a.cos(), a.sin())
                })
                .collect(),
        )
        .expect("valid")
    }
}

impl<S: Scalar> std::fmt::Display for Polygon<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let pts: Vec<String> = self
            .vertices
            .iter()
            .map(|v| format!("({}, {})", v.x.to_exact_string(), v.y.to_exact_string()))
            .collect();
        write!(f, "[{}]", pts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::shapes::*;
    use super::*;
    use crate::scalar::Rational;

    fn pts(v: &[(i64, i64)]) -> Vec<Point<Rational>> {
        v.iter().map(|&(x, y)| Point::from_ints(x, y)).collect()
    }

    #[test]
    fn unit_square_basics() {
        let sq: Polygon<Rational> = unit_square();
        assert_eq!(sq.len(), 4);
        assert_eq!(sq.sides().len(), 4);
        assert_eq!(*sq.area(), Rational::from_int(1));
        assert_eq!(sq.angles().unwrap(), &[(1, 2); 4]);
    }

    #[test]
    fn clockwise_input_is_normalized() {
        let ccw = build_polygon(pts(&[(0, 0), (1, 0), (1, 1), (0, 1)])).unwrap();
        let mut rev = pts(&[(0, 0), (1, 0), (1, 1), (0, 1)]);
        rev.reverse();
        let cw = build_polygon(rev).unwrap();
        assert_eq!(ccw, cw);
        assert_eq!(*cw.area(), Rational::from_int(1));
    }

    #[test]
    fn bowtie_rejected() {
        let err = build_polygon(pts(&[(0, 0), (1, 1), (1, 0), (0, 1)])).unwrap_err();
        assert!(matches!(err, PolygonError::SelfIntersection(_, _)));
    }

    #[test]
    fn repeated_and_degenerate_rejected() {
        assert_eq!(
            build_polygon(pts(&[(0, 0), (1, 0), (0, 0), (0, 1)])).unwrap_err(),
            PolygonError::RepeatedVertex(2)
        );
        assert!(build_polygon(pts(&[(0, 0), (1, 0), (2, 0)])).is_err());
        assert_eq!(build_polygon(pts(&[(0, 0), (1, 0)])).unwrap_err(), PolygonError::TooFewVertices(2));
    }

    #[test]
    fn right_isosceles_angles() {
        let t: Polygon<Rational> = right_isosceles();
        assert_eq!(t.angles().unwrap(), &[(1, 2), (1, 4), (1, 4)]);
        assert_eq!(*t.area(), Rational::from_frac(1, 2));
    }

    #[test]
    fn l_shape_angles_and_area() {
        let l: Polygon<Rational> = l_shape();
        assert_eq!(*l.area(), Rational::from_int(3));
        let a = l.angles().unwrap();
        assert_eq!(a[3], (3, 2));
        assert!(!l.is_convex());
        assert_eq!(l.angle_lcm(), Some(2));
    }

    #[test]
    fn irrational_triangle_not_certified() {
        // Apex angle π·√2/2 at the origin.
        let a = std::f64::consts::PI * std::f64::consts::SQRT_2 / 2.0;
        let tri = build_polygon(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(a.cos() * 0.5, a.sin() * 0.5),
        ])
        .unwrap();
        for cap in [1, 10, 1000, 100_000] {
            assert!(certify_rational(&tri, cap).is_none(), "cap {cap}");
        }
    }

    #[test]
    fn equilateral_certified_in_float() {
        let e = equilateral();
        assert_eq!(e.angles().unwrap(), &[(1, 3); 3]);
    }

    #[test]
    fn square_floors() {
        let sq: Polygon<f64> = unit_square();
        for (theta, expect) in [
            (PI / 6.0, vec![PI / 6.0, 5.0 * PI / 6.0, 7.0 * PI / 6.0, 11.0 * PI / 6.0]),
            (PI / 4.0, vec![PI / 4.0, 3.0 * PI / 4.0, 5.0 * PI / 4.0, 7.0 * PI / 4.0]),
        ] {
            let fs = direction_floors(&sq, &Direction::from_angle(theta)).unwrap();
            assert_eq!(fs.floor_count(), 4);
            for e in expect {
                assert!(fs.contains(&Direction::from_angle(e)));
            }
        }
    }

    #[test]
    fn equilateral_generic_direction_has_six_floors() {
        let e = equilateral();
        let fs = direction_floors(&e, &Direction::from_angle(0.3)).unwrap();
        assert_eq!(fs.floor_count(), 6);
        assert!(fs.floor_count() <= 2 * e.angle_lcm().unwrap() as usize);
    }

    #[test]
    fn floors_need_rational_polygon() {
        let a = 1.0f64;
        let tri = build_polygon(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(a.cos(), a.sin())]).unwrap();
        assert!(!tri.is_rational());
        assert_eq!(
            direction_floors(&tri, &Direction::from_angle(0.1)).unwrap_err(),
            PolygonError::NotRational
        );
    }

    #[test]
    fn containment() {
        let l: Polygon<Rational> = l_shape();
        let q = |x, y| Point::new(Rational::from_frac(x, 2), Rational::from_frac(y, 2));
        assert_eq!(l.contains(&q(1, 1)), Containment::Inside);
        assert_eq!(l.contains(&q(3, 3)), Containment::Outside);
        assert!(matches!(l.contains(&q(2, 3)), Containment::Boundary(_)));
        assert_eq!(l.contains(&q(3, 1)), Containment::Inside);
    }

    #[test]
    fn text_round_trip() {
        let text = "# tri\n0 0\n\n1/2 0   # comment\n0 3/4\n";
        let p: Polygon<Rational> = read_polygon(text).unwrap();
        let again: Polygon<Rational> = read_polygon(&write_polygon_text(&p)).unwrap();
        assert_eq!(p, again);
        assert!(read_polygon::<Rational>("0 0\n1\n0 1\n").is_err());
        assert!(read_polygon::<Rational>("0 0\n1.5 0\n0 1\n").is_err());
    }

    #[test]
    fn floor_group_of_square_has_order_four() {
        let sq: Polygon<Rational> = unit_square();
        assert_eq!(floor_group(&sq).unwrap().len(), 4);
        let t: Polygon<Rational> = right_isosceles();
        assert_eq!(floor_group(&t).unwrap().len(), 8);
    }
}
