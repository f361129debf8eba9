//! Planar primitives: points, ray directions, segments and isometries.

use std::ops::{Add, Neg, Sub};

use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::error::{GeomError, ParseError};
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct Point<S> {
    pub x: S,
    pub y: S,
}

impl<S: Scalar> Point<S> {
    pub fn new(x: S, y: S) -> Self {
        Point { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point::new(S::from_int(x), S::from_int(y))
    }

    pub fn zero() -> Self {
        Point::new(S::zero(), S::zero())
    }

    pub fn dot(&self, o: &Self) -> S {
        self.x.clone() * o.x.clone() + self.y.clone() * o.y.clone()
    }

    pub fn cross(&self, o: &Self) -> S {
        self.x.clone() * o.y.clone() - self.y.clone() * o.x.clone()
    }

    pub fn norm2(&self) -> S {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm2().to_f64_lossy().sqrt()
    }

    pub fn scale(&self, k: &S) -> Self {
        Point::new(self.x.clone() * k.clone(), self.y.clone() * k.clone())
    }

    /// Counterclockwise quarter turn.
    pub fn perp(&self) -> Self {
        Point::new(-self.y.clone(), self.x.clone())
    }

    pub fn approx_eq(&self, o: &Self) -> bool {
        self.x.approx_eq(&o.x) && self.y.approx_eq(&o.y)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64_lossy(), self.y.to_f64_lossy())
    }

    pub fn midpoint(&self, o: &Self) -> Self {
        (self.clone() + o.clone()).scale(&S::half())
    }

    pub fn dist(&self, o: &Self) -> f64 {
        (o.clone() - self.clone()).norm()
    }
}

impl<S: Scalar> Add for Point<S> {
    type Output = Point<S>;
    fn add(self, o: Self) -> Self {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl<S: Scalar> Sub for Point<S> {
    type Output = Point<S>;
    fn sub(self, o: Self) -> Self {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl<S: Scalar> Neg for Point<S> {
    type Output = Point<S>;
    fn neg(self) -> Self {
        Point::new(-self.x, -self.y)
    }
}

/// A ray direction, stored as a nonzero vector taken up to positive scaling.
///
/// Float directions are normalized to unit length on construction so that
/// ray parameters are distances; exact directions keep their rational pair.
#[derive(Debug, Clone)]
pub struct Direction<S> {
    v: Point<S>,
}

impl<S: Scalar> Direction<S> {
    pub fn new(dx: S, dy: S) -> Result<Self, GeomError> {
        let v = Point::new(dx, dy);
        if v.x.is_zero_tol() && v.y.is_zero_tol() {
            return Err(GeomError::ZeroDirection);
        }
        Ok(Self::normalized(v))
    }

    pub fn from_vec(v: Point<S>) -> Result<Self, GeomError> {
        Self::new(v.x, v.y)
    }

    pub fn from_ints(dx: i64, dy: i64) -> Result<Self, GeomError> {
        Self::new(S::from_int(dx), S::from_int(dy))
    }

    /// Float backend only: the unit direction at angle `phi`. The exact
    /// backend converts the float pair exactly, which is rarely useful.
    pub fn from_angle(phi: f64) -> Self {
        let v = Point::new(
            S::from_f64(phi.cos(), true).expect("finite"),
            S::from_f64(phi.sin(), true).expect("finite"),
        );
        Self::normalized(v)
    }

    fn normalized(v: Point<S>) -> Self {
        if S::EXACT {
            // Canonical representative: largest coordinate magnitude is 1.
            let m = if v.x.abs() >= v.y.abs() { v.x.abs() } else { v.y.abs() };
            if m.is_one() {
                Direction { v }
            } else {
                Direction {
                    v: Point::new(v.x / m.clone(), v.y / m),
                }
            }
        } else {
            let n = v.norm();
            let k = S::from_f64(1.0 / n, true).expect("finite norm");
            Direction { v: v.scale(&k) }
        }
    }

    pub fn vec(&self) -> &Point<S> {
        &self.v
    }

    pub fn dx(&self) -> &S {
        &self.v.x
    }

    pub fn dy(&self) -> &S {
        &self.v.y
    }

    /// Angle in `[0, 2π)`.
    pub fn angle(&self) -> f64 {
        let (x, y) = self.v.to_f64();
        y.atan2(x).rem_euclid(std::f64::consts::TAU)
    }

    pub fn reversed(&self) -> Self {
        Direction { v: -self.v.clone() }
    }

    /// Same ray: cross product zero and dot product positive.
    pub fn same_ray(&self, o: &Self) -> bool {
        self.v.cross(&o.v).is_zero_tol() && self.v.dot(&o.v).is_pos()
    }

    pub fn parallel(&self, o: &Self) -> bool {
        self.v.cross(&o.v).is_zero_tol()
    }

    pub fn to_f64(&self) -> (f64, f64) {
        self.v.to_f64()
    }

    /// Parses `dx:dy`, a rational multiple of π written `p/q pi`, or (float
    /// backend only) a bare angle in radians. The exact backend accepts
    /// multiples of π only when they are multiples of π/4.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let t = text.trim();
        let bad = || ParseError::Direction(t.to_string());
        if let Some((a, b)) = t.split_once(':') {
            let (dx, dy) = (S::parse(a).map_err(|_| bad())?, S::parse(b).map_err(|_| bad())?);
            return Self::new(dx, dy).map_err(|_| bad());
        }
        let coef = t.strip_suffix("pi").or_else(|| t.strip_suffix('π')).map(str::trim);
        let Some(coef) = coef else {
            if S::EXACT {
                return Err(bad());
            }
            let phi = f64::parse(t).map_err(|_| bad())?;
            return Ok(Self::from_angle(phi));
        };
        let coef = if coef.is_empty() { "1" } else { coef };
        if S::EXACT {
            let r = Rational::parse(coef).map_err(|_| bad())?;
            let eighths = r * Rational::from_int(4);
            if !eighths.is_integer() {
                return Err(bad());
            }
            let k = eighths.to_integer().mod_floor(&8.into());
            const STEPS: [(i64, i64); 8] = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)];
            let (dx, dy) = STEPS[k.to_usize().expect("in 0..8")];
            return Self::from_ints(dx, dy).map_err(|_| bad());
        }
        let r = f64::parse(coef).map_err(|_| bad())?;
        Ok(Self::from_angle(r * std::f64::consts::PI))
    }

    /// Unit vector in float, for distance computations.
    pub fn unit_f64(&self) -> (f64, f64) {
        let (x, y) = self.v.to_f64();
        let n = x.hypot(y);
        (x / n, y / n)
    }
}

impl<S: Scalar> PartialEq for Direction<S> {
    fn eq(&self, o: &Self) -> bool {
        self.same_ray(o)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment<S> {
    pub a: Point<S>,
    pub b: Point<S>,
}

impl<S: Scalar> Segment<S> {
    pub fn new(a: Point<S>, b: Point<S>) -> Result<Self, GeomError> {
        if a.approx_eq(&b) {
            return Err(GeomError::DegenerateSegment);
        }
        Ok(Segment { a, b })
    }

    pub fn vector(&self) -> Point<S> {
        self.b.clone() - self.a.clone()
    }

    pub fn length(&self) -> f64 {
        self.vector().norm()
    }

    pub fn midpoint(&self) -> Point<S> {
        self.a.midpoint(&self.b)
    }

    pub fn reversed(&self) -> Self {
        Segment {
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }

    /// Squared distance from `p` to the closed segment, exact in the
    /// rational backend.
    pub fn dist2_to(&self, p: &Point<S>) -> S {
        let d = self.vector();
        let w = p.clone() - self.a.clone();
        let len2 = d.norm2();
        let t = w.dot(&d);
        if !t.is_pos() {
            return w.norm2();
        }
        if t >= len2 {
            return (p.clone() - self.b.clone()).norm2();
        }
        let c = d.cross(&w);
        c.clone() * c / len2
    }

    /// Whether `p` lies on the closed segment (backend equality).
    pub fn contains(&self, p: &Point<S>) -> bool {
        let d = self.vector();
        let w = p.clone() - self.a.clone();
        if S::EXACT {
            if !d.cross(&w).is_zero() {
                return false;
            }
        } else if self.dist2_to(p) > S::tolerance() * S::tolerance() {
            return false;
        }
        let t = w.dot(&d);
        !t.is_neg() && !(t - d.norm2()).is_pos()
    }

    pub fn map(&self, iso: &Isometry<S>) -> Self {
        Segment {
            a: iso.apply(&self.a),
            b: iso.apply(&self.b),
        }
    }
}

/// `x ↦ linear·x + translation` with an orthogonal linear part.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry<S> {
    /// Row-major 2×2 matrix.
    pub m: [[S; 2]; 2],
    pub t: Point<S>,
}

impl<S: Scalar> Isometry<S> {
    pub fn identity() -> Self {
        Isometry {
            m: [[S::one(), S::zero()], [S::zero(), S::one()]],
            t: Point::zero(),
        }
    }

    pub fn translation(t: Point<S>) -> Self {
        Isometry {
            t,
            ..Self::identity()
        }
    }

    pub fn apply_linear(&self, v: &Point<S>) -> Point<S> {
        Point::new(
            self.m[0][0].clone() * v.x.clone() + self.m[0][1].clone() * v.y.clone(),
            self.m[1][0].clone() * v.x.clone() + self.m[1][1].clone() * v.y.clone(),
        )
    }

    pub fn apply(&self, p: &Point<S>) -> Point<S> {
        self.apply_linear(p) + self.t.clone()
    }

    pub fn apply_dir(&self, d: &Direction<S>) -> Direction<S> {
        Direction::from_vec(self.apply_linear(d.vec())).expect("isometries preserve nonzero vectors")
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        let a = &self.m;
        let b = &other.m;
        let mul = |i: usize, j: usize| a[i][0].clone() * b[0][j].clone() + a[i][1].clone() * b[1][j].clone();
        Isometry {
            m: [[mul(0, 0), mul(0, 1)], [mul(1, 0), mul(1, 1)]],
            t: self.apply(&other.t),
        }
    }

    /// Inverse, using orthogonality of the linear part (inverse = transpose).
    pub fn inverse(&self) -> Self {
        let m = [
            [self.m[0][0].clone(), self.m[1][0].clone()],
            [self.m[0][1].clone(), self.m[1][1].clone()],
        ];
        let inv = Isometry {
            m,
            t: Point::zero(),
        };
        let t = -inv.apply_linear(&self.t);
        Isometry { t, ..inv }
    }

    pub fn det(&self) -> S {
        self.m[0][0].clone() * self.m[1][1].clone() - self.m[0][1].clone() * self.m[1][0].clone()
    }

    pub fn linear_is_identity(&self) -> bool {
        self.m[0][0].approx_eq(&S::one())
            && self.m[1][1].approx_eq(&S::one())
            && self.m[0][1].is_zero_tol()
            && self.m[1][0].is_zero_tol()
    }

    pub fn linear_approx_eq(&self, o: &Self) -> bool {
        (0..2).all(|i| (0..2).all(|j| self.m[i][j].approx_eq(&o.m[i][j])))
    }

    pub fn approx_eq(&self, o: &Self) -> bool {
        self.linear_approx_eq(o) && self.t.approx_eq(&o.t)
    }

    /// Linear part only (translation dropped).
    pub fn linear(&self) -> Self {
        Isometry {
            m: self.m.clone(),
            t: Point::zero(),
        }
    }
}

/// Orientation-reversing isometry fixing the line through `s`.
pub fn reflect_across_line<S: Scalar>(s: &Segment<S>) -> Result<Isometry<S>, GeomError> {
    let u = s.vector();
    let n2 = u.norm2();
    if n2.is_zero_tol() {
        return Err(GeomError::DegenerateSegment);
    }
    let (ux, uy) = (u.x.clone(), u.y.clone());
    let a = (ux.clone() * ux.clone() - uy.clone() * uy.clone()) / n2.clone();
    let b = (S::two() * ux * uy) / n2;
    let m = [[a.clone(), b.clone()], [b, -a]];
    let lin = Isometry {
        m,
        t: Point::zero(),
    };
    // Fix s.a: t = a - L a.
    let t = s.a.clone() - lin.apply_linear(&s.a);
    Ok(Isometry { t, ..lin })
}

/// Mirror law: tangential component kept, normal component negated.
pub fn reflect_direction<S: Scalar>(d: &Direction<S>, s: &Segment<S>) -> Result<Direction<S>, GeomError> {
    let r = reflect_across_line(s)?;
    Ok(r.apply_dir(d))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RayHit<S> {
    pub t: S,
    pub hit: Point<S>,
    pub at_endpoint: bool,
}

/// Smallest positive ray parameter at which the open ray meets `s`.
///
/// Parallel (including collinear) configurations report no hit.
pub fn ray_segment_intersection<S: Scalar>(
    origin: &Point<S>,
    d: &Direction<S>,
    s: &Segment<S>,
) -> Option<RayHit<S>> {
    let dv = d.vec();
    let e = s.vector();
    let denom = dv.cross(&e);
    if S::EXACT {
        if denom.is_zero() {
            return None;
        }
    } else {
        // Scale-aware parallel test: |sin| below τ.
        let el = e.norm();
        if denom.to_f64_lossy().abs() <= S::tolerance().to_f64_lossy() * el * 1e-3 {
            return None;
        }
    }
    let w = s.a.clone() - origin.clone();
    let t = w.cross(&e) / denom.clone();
    let u = w.cross(dv) / denom;
    if !t.is_pos() {
        return None;
    }
    if S::EXACT {
        if u.is_negative() || u > S::one() {
            return None;
        }
        if u.is_zero() {
            return Some(RayHit { t, hit: s.a.clone(), at_endpoint: true });
        }
        if u.is_one() {
            return Some(RayHit { t, hit: s.b.clone(), at_endpoint: true });
        }
        let hit = s.a.clone() + e.scale(&u);
        Some(RayHit { t, hit, at_endpoint: false })
    } else {
        let el = e.norm();
        let tol = S::tolerance().to_f64_lossy();
        let uf = u.to_f64_lossy();
        if uf * el < -tol || (uf - 1.0) * el > tol {
            return None;
        }
        if uf * el <= tol {
            return Some(RayHit { t, hit: s.a.clone(), at_endpoint: true });
        }
        if (1.0 - uf) * el <= tol {
            return Some(RayHit { t, hit: s.b.clone(), at_endpoint: true });
        }
        let hit = s.a.clone() + e.scale(&u);
        Some(RayHit { t, hit, at_endpoint: false })
    }
}
