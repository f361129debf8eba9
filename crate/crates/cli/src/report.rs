//! JSON building blocks. Exact scalars become strings with a float twin.

use billiards::{Direction, Point, Scalar, Segment};
use serde_json::{json, Value};

pub fn num<S: Scalar>(x: &S) -> Value {
    json!({ "exact": x.to_exact_string(), "float": x.to_f64_lossy() })
}

pub fn point<S: Scalar>(p: &Point<S>) -> Value {
    let (x, y) = p.to_f64();
    json!({
        "x": p.x.to_exact_string(),
        "y": p.y.to_exact_string(),
        "x_f64": x,
        "y_f64": y,
    })
}

pub fn direction<S: Scalar>(d: &Direction<S>) -> Value {
    json!({
        "dx": d.dx().to_exact_string(),
        "dy": d.dy().to_exact_string(),
        "angle": d.angle(),
    })
}

pub fn segment<S: Scalar>(s: &Segment<S>) -> Value {
    json!({ "a": point(&s.a), "b": point(&s.b), "length": s.length() })
}

pub fn point_text<S: Scalar>(p: &Point<S>) -> String {
    format!("({}, {})", p.x.to_exact_string(), p.y.to_exact_string())
}

pub fn direction_text<S: Scalar>(d: &Direction<S>) -> String {
    format!("{}:{}", d.dx().to_exact_string(), d.dy().to_exact_string())
}

pub fn word_text(w: &[usize]) -> String {
    if w.is_empty() {
        return "-".into();
    }
    w.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn parse_fraction(s: &str) -> Option<(i128, i128)> {
    match s.split_once('/') {
        Some((n, d)) => Some((n.parse().ok()?, d.parse().ok()?)),
        None => Some((s.parse().ok()?, 1)),
    }
}

/// `√(n/d) = (a/d)·√c` with `c` squarefree, for `n·d` small enough to factor.
fn simplify_root(n: i128, d: i128) -> Option<(i128, i128, i128)> {
    let mut m = n.checked_mul(d)?;
    if m <= 0 || m > 1_000_000_000_000 {
        return None;
    }
    let (mut a, mut c) = (1i128, 1i128);
    let mut f = 2i128;
    while f * f <= m {
        while m % (f * f) == 0 {
            m /= f * f;
            a *= f;
        }
        if m % f == 0 {
            m /= f;
            c *= f;
        }
        f += 1;
    }
    c *= m;
    let g = gcd(a, d);
    Some((a / g, d / g, c))
}

/// Closed form of a sum of link lengths whose squares are exact fractions,
/// such as `2√2` or `1 + √5/2`. `None` when a square is not rational or too
/// large to factor.
pub fn surd_sum(squares: &[String]) -> Option<String> {
    let mut terms: Vec<(i128, i128, i128)> = Vec::new();
    for s in squares {
        let (n, d) = parse_fraction(s)?;
        let (p, q, c) = simplify_root(n, d)?;
        match terms.iter_mut().find(|t| t.2 == c) {
            Some(t) => {
                let num = t.0.checked_mul(q)?.checked_add(p.checked_mul(t.1)?)?;
                let den = t.1.checked_mul(q)?;
                let g = gcd(num, den);
                *t = (num / g, den / g, c);
            }
            None => terms.push((p, q, c)),
        }
    }
    if terms.is_empty() {
        return Some("0".into());
    }
    terms.sort_by_key(|t| t.2);
    let text: Vec<String> = terms
        .iter()
        .map(|&(p, q, c)| {
            let mut t = match (p, c) {
                (_, 1) => p.to_string(),
                (1, _) => format!("√{c}"),
                _ => format!("{p}√{c}"),
            };
            if q != 1 {
                t = format!("{t}/{q}");
            }
            t
        })
        .collect();
    Some(text.join(" + "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn surds() {
        let two = vec!["1/2".to_string(); 4];
        assert_eq!(surd_sum(&two).as_deref(), Some("2√2"));
        assert_eq!(surd_sum(&["1".into(), "5/4".into()]).as_deref(), Some("1 + √5/2"));
        assert_eq!(surd_sum(&["9".into(), "16".into()]).as_deref(), Some("7"));
        assert_eq!(surd_sum(&["0.5".into()]), None);
    }
}
