//! Exact piecewise-linear paths in the rational line: Moore composition,
//! normalization to `[0,1]`, and the group of increasing piecewise-linear
//! homeomorphisms of `[0,1]` acting by precomposition.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// A path `[0, ℓ] -> Q` given by breakpoints; interior collinear points are
/// always removed, so equal paths have equal breakpoint lists.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PLPath {
    points: Vec<(Rational, Rational)>,
}

/// A strictly increasing piecewise-linear bijection of `[0,1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PLReparam {
    points: Vec<(Rational, Rational)>,
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn half() -> Rational {
    rat(1, 2)
}

fn collinear(a: &(Rational, Rational), b: &(Rational, Rational), c: &(Rational, Rational)) -> bool {
    (&b.1 - &a.1) * (&c.0 - &b.0) == (&c.1 - &b.1) * (&b.0 - &a.0)
}

fn simplify(points: Vec<(Rational, Rational)>) -> Vec<(Rational, Rational)> {
    let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(points.len());
    for p in points {
        while out.len() >= 2 && collinear(&out[out.len() - 2], &out[out.len() - 1], &p) {
            out.pop();
        }
        out.push(p);
    }
    out
}

/// Linear interpolation on a breakpoint list; `t` must lie in its domain.
fn interpolate(points: &[(Rational, Rational)], t: &Rational) -> Option<Rational> {
    let first = &points.first()?.0;
    let last = &points.last()?.0;
    if t < first || t > last {
        return None;
    }
    let k = points.partition_point(|(s, _)| s < t);
    if k < points.len() && &points[k].0 == t {
        return Some(points[k].1.clone());
    }
    let (t0, y0) = &points[k - 1];
    let (t1, y1) = &points[k];
    Some(y0 + (y1 - y0) * (t - t0) / (t1 - t0))
}

fn merged_times(mut times: Vec<Rational>) -> Vec<Rational> {
    times.sort();
    times.dedup();
    times
}

impl PLPath {
    pub fn new(points: Vec<(Rational, Rational)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidPiecewiseLinear("a path needs at least two breakpoints".into()));
        }
        if !points[0].0.is_zero() {
            return Err(Error::InvalidPiecewiseLinear("the first time must be 0".into()));
        }
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidPiecewiseLinear("times must increase strictly".into()));
        }
        Ok(PLPath { points: simplify(points) })
    }

    /// The path `t -> from + (to - from) t / duration`.
    pub fn ramp(duration: Rational, from: Rational, to: Rational) -> Result<Self> {
        PLPath::new(vec![(Rational::zero(), from), (duration, to)])
    }

    pub fn constant(duration: Rational, value: Rational) -> Result<Self> {
        PLPath::ramp(duration, value.clone(), value)
    }

    pub fn points(&self) -> &[(Rational, Rational)] {
        &self.points
    }

    pub fn duration(&self) -> &Rational {
        &self.points.last().expect("nonempty").0
    }

    pub fn start(&self) -> &Rational {
        &self.points[0].1
    }

    pub fn end(&self) -> &Rational {
        &self.points.last().expect("nonempty").1
    }

    pub fn value_at(&self, t: &Rational) -> Option<Rational> {
        interpolate(&self.points, t)
    }

    fn require_unit(&self) -> Result<()> {
        if self.duration().is_one() {
            Ok(())
        } else {
            Err(Error::NotUnitDuration(self.to_string()))
        }
    }
}

fn require_composable(a: &PLPath, b: &PLPath) -> Result<()> {
    if a.end() == b.start() {
        Ok(())
    } else {
        Err(Error::EndpointsMismatch(format!("{} ends at {}, {} starts at {}", a, a.end(), b, b.start())))
    }
}

/// `a` on `[0, ℓa]` followed by `b` shifted to `[ℓa, ℓa + ℓb]`.
pub fn moore_compose(a: &PLPath, b: &PLPath) -> Result<PLPath> {
    require_composable(a, b)?;
    let shift = a.duration().clone();
    let mut points = a.points.clone();
    points.extend(b.points.iter().skip(1).map(|(t, y)| (t + &shift, y.clone())));
    PLPath::new(points)
}

/// Reparametrizes by `t -> ℓ t` onto `[0,1]`.
pub fn rescale(g: &PLPath) -> PLPath {
    let l = g.duration().clone();
    PLPath::new(g.points.iter().map(|(t, y)| (t / &l, y.clone())).collect()).expect("scaling keeps order")
}

/// `a` on `[0, 1/2]`, `b` on `[1/2, 1]`; both must be parametrized by `[0,1]`.
pub fn normalized_compose(a: &PLPath, b: &PLPath) -> Result<PLPath> {
    a.require_unit()?;
    b.require_unit()?;
    Ok(rescale(&moore_compose(a, b)?))
}

impl PLReparam {
    pub fn new(points: Vec<(Rational, Rational)>) -> Result<Self> {
        let ok_ends = points.len() >= 2
            && points[0] == (Rational::zero(), Rational::zero())
            && *points.last().expect("nonempty") == (Rational::one(), Rational::one());
        if !ok_ends {
            return Err(Error::InvalidPiecewiseLinear("a reparametrization must fix 0 and 1".into()));
        }
        if points.windows(2).any(|w| w[0].0 >= w[1].0 || w[0].1 >= w[1].1) {
            return Err(Error::InvalidPiecewiseLinear("a reparametrization must increase strictly".into()));
        }
        Ok(PLReparam { points: simplify(points) })
    }

    pub fn identity() -> Self {
        PLReparam { points: vec![(Rational::zero(), Rational::zero()), (Rational::one(), Rational::one())] }
    }

    pub fn points(&self) -> &[(Rational, Rational)] {
        &self.points
    }

    pub fn eval(&self, t: &Rational) -> Option<Rational> {
        interpolate(&self.points, t)
    }

    fn eval_inverse(&self, y: &Rational) -> Rational {
        let swapped: Vec<_> = self.points.iter().map(|(t, y)| (y.clone(), t.clone())).collect();
        interpolate(&swapped, y).expect("inside [0,1]")
    }

    /// The fixed reparametrization with `(a *_N b) *_N c = (a *_N (b *_N c)) ∘ φ`.
    pub fn associator() -> Self {
        PLReparam::new(vec![
            (rat(0, 1), rat(0, 1)),
            (rat(1, 4), rat(1, 2)),
            (rat(1, 2), rat(3, 4)),
            (rat(1, 1), rat(1, 1)),
        ])
        .expect("increasing")
    }
}

/// `φ ∘ ψ`, so that `act(act(g, φ), ψ) = act(g, compose_reparam(φ, ψ))`.
pub fn compose_reparam(phi: &PLReparam, psi: &PLReparam) -> PLReparam {
    let mut times: Vec<Rational> = psi.points.iter().map(|(t, _)| t.clone()).collect();
    times.extend(phi.points.iter().map(|(s, _)| psi.eval_inverse(s)));
    let points = merged_times(times)
        .into_iter()
        .map(|t| {
            let y = phi.eval(&psi.eval(&t).expect("in [0,1]")).expect("in [0,1]");
            (t, y)
        })
        .collect();
    PLReparam::new(points).expect("composites of increasing maps increase")
}

/// Reflection of the graph across the diagonal.
pub fn invert_reparam(phi: &PLReparam) -> PLReparam {
    PLReparam::new(phi.points.iter().map(|(t, y)| (y.clone(), t.clone())).collect()).expect("increasing")
}

/// The pointwise barycenter `(1 - s) φ + s ψ` for `s` in `[0,1]`.
pub fn blend(phi: &PLReparam, psi: &PLReparam, s: &Rational) -> Result<PLReparam> {
    if s.is_negative() || *s > Rational::one() {
        return Err(Error::InvalidPiecewiseLinear(format!("blend weight {s} is outside [0,1]")));
    }
    let times = merged_times(phi.points.iter().chain(&psi.points).map(|(t, _)| t.clone()).collect());
    let r = Rational::one() - s;
    let points = times
        .into_iter()
        .map(|t| {
            let y = &r * phi.eval(&t).expect("in [0,1]") + s * psi.eval(&t).expect("in [0,1]");
            (t, y)
        })
        .collect();
    PLReparam::new(points)
}

/// `g ∘ φ` for a path parametrized by `[0,1]`.
pub fn act(g: &PLPath, phi: &PLReparam) -> Result<PLPath> {
    g.require_unit()?;
    let mut times: Vec<Rational> = phi.points.iter().map(|(t, _)| t.clone()).collect();
    times.extend(g.points.iter().map(|(s, _)| phi.eval_inverse(s)));
    let points = merged_times(times)
        .into_iter()
        .map(|t| {
            let y = g.value_at(&phi.eval(&t).expect("in [0,1]")).expect("in [0,1]");
            (t, y)
        })
        .collect();
    PLPath::new(points)
}

/// The fixed associator after checking that it repairs the triple exactly.
pub fn associator(a: &PLPath, b: &PLPath, c: &PLPath) -> Result<PLReparam> {
    let left = normalized_compose(&normalized_compose(a, b)?, c)?;
    let right = normalized_compose(a, &normalized_compose(b, c)?)?;
    let phi = PLReparam::associator();
    if act(&right, &phi)? != left {
        return Err(Error::InvalidPiecewiseLinear("the associator does not repair this triple".into()));
    }
    Ok(phi)
}

/// Whether `(a *_N b) *_N c` and `a *_N (b *_N c)` differ as paths.
pub fn normalized_associativity_fails(a: &PLPath, b: &PLPath, c: &PLPath) -> Result<bool> {
    let left = normalized_compose(&normalized_compose(a, b)?, c)?;
    let right = normalized_compose(a, &normalized_compose(b, c)?)?;
    Ok(left != right)
}

fn write_points(f: &mut fmt::Formatter<'_>, points: &[(Rational, Rational)]) -> fmt::Result {
    let shown: Vec<String> = points.iter().map(|(t, y)| format!("({t},{y})")).collect();
    write!(f, "{}", shown.join(","))
}

impl fmt::Display for PLPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dur={}; pts=", self.duration())?;
        write_points(f, &self.points)
    }
}

impl fmt::Display for PLReparam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pts=")?;
        write_points(f, &self.points)
    }
}

fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::Parse(format!("{text:?} is not a rational"));
    match text.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(BigInt::from_str(text).map_err(|_| bad())?)),
    }
}

fn parse_points(text: &str) -> Result<Vec<(Rational, Rational)>> {
    let text = text.trim();
    let inner = text
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| Error::Parse(format!("expected (t,y) pairs, got {text:?}")))?;
    inner
        .split("),")
        .map(|pair| {
            let pair = pair.trim().trim_start_matches('(');
            let (t, y) = pair
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("expected t,y in {pair:?}")))?;
            Ok((parse_rational(t)?, parse_rational(y)?))
        })
        .collect()
}

impl FromStr for PLPath {
    type Err = Error;

    /// Parses `dur=<rat>; pts=(t0,y0),(t1,y1),...`.
    fn from_str(text: &str) -> Result<Self> {
        let (dur, pts) = text
            .split_once(';')
            .ok_or_else(|| Error::Parse("expected `dur=...; pts=...`".into()))?;
        let dur = dur
            .trim()
            .strip_prefix("dur=")
            .ok_or_else(|| Error::Parse("missing dur=".into()))?;
        let pts = pts
            .trim()
            .strip_prefix("pts=")
            .ok_or_else(|| Error::Parse("missing pts=".into()))?;
        let duration = parse_rational(dur)?;
        let path = PLPath::new(parse_points(pts)?)?;
        if *path.duration() != duration {
            return Err(Error::Parse(format!("dur={duration} but the last time is {}", path.duration())));
        }
        Ok(path)
    }
}

impl FromStr for PLReparam {
    type Err = Error;

    /// Parses `pts=(0,0),...,(1,1)`.
    fn from_str(text: &str) -> Result<Self> {
        let pts = text
            .trim()
            .strip_prefix("pts=")
            .ok_or_else(|| Error::Parse("missing pts=".into()))?;
        PLReparam::new(parse_points(pts)?)
    }
}

/// The midpoint of a unit-duration path, for demos.
pub fn midpoint_value(g: &PLPath) -> Option<Rational> {
    g.value_at(&(g.duration() * half()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text: &str) -> PLPath {
        text.parse().unwrap()
    }

    fn r(text: &str) -> PLReparam {
        text.parse().unwrap()
    }

    #[test]
    fn moore_composite_value() {
        let f = p("dur=1; pts=(0,0),(1,1)");
        let g = p("dur=1; pts=(0,1),(1,3)");
        let fg = moore_compose(&f, &g).unwrap();
        assert_eq!(fg.duration(), &rat(2, 1));
        assert_eq!(fg.value_at(&rat(3, 2)).unwrap(), rat(2, 1));
    }

    #[test]
    fn composing_with_constant_concatenates() {
        let f = p("dur=2; pts=(0,0),(1,3),(2,1)");
        let c = PLPath::constant(rat(5, 2), rat(1, 1)).unwrap();
        let fc = moore_compose(&f, &c).unwrap();
        assert_eq!(fc.duration(), &rat(9, 2));
        assert_eq!(fc.points().len(), 4);
    }

    #[test]
    fn mismatched_endpoints() {
        let f = p("dur=1; pts=(0,0),(1,1)");
        assert!(matches!(moore_compose(&f, &f), Err(Error::EndpointsMismatch(_))));
    }

    #[test]
    fn moore_composition_is_associative() {
        let a = p("dur=1/3; pts=(0,0),(1/3,2)");
        let b = p("dur=2; pts=(0,2),(1,-1),(2,5)");
        let c = p("dur=3/2; pts=(0,5),(3/2,0)");
        let left = moore_compose(&moore_compose(&a, &b).unwrap(), &c).unwrap();
        let right = moore_compose(&a, &moore_compose(&b, &c).unwrap()).unwrap();
        assert_eq!(left, right);
    }

    #[test]
    fn rescale_examples() {
        let unit = p("dur=1; pts=(0,0),(1/2,3),(1,1)");
        assert_eq!(rescale(&unit), unit);
        let ramp = p("dur=2; pts=(0,0),(2,2)");
        assert_eq!(rescale(&ramp), p("dur=1; pts=(0,0),(1,2)"));
    }

    #[test]
    fn normalized_composition_shapes() {
        let a = p("dur=1; pts=(0,0),(1,1)");
        let b = p("dur=1; pts=(0,1),(1,0)");
        let c = p("dur=1; pts=(0,0),(1,4)");
        let ab = normalized_compose(&a, &b).unwrap();
        assert_eq!(ab.value_at(&half()).unwrap(), rat(1, 1));
        let left = normalized_compose(&ab, &c).unwrap();
        // a occupies [0, 1/4]
        assert_eq!(left.value_at(&rat(1, 4)).unwrap(), rat(1, 1));
        assert_eq!(left.value_at(&rat(1, 8)).unwrap(), rat(1, 2));
        assert!(normalized_associativity_fails(&a, &b, &c).unwrap());
        let long = p("dur=2; pts=(0,1),(2,1)");
        assert!(matches!(normalized_compose(&a, &long), Err(Error::NotUnitDuration(_))));
    }

    #[test]
    fn associator_repairs_triples() {
        let a = p("dur=1; pts=(0,0),(1,1)");
        let b = p("dur=1; pts=(0,1),(1/3,7),(1,0)");
        let c = p("dur=1; pts=(0,0),(1,4)");
        let phi = associator(&a, &b, &c).unwrap();
        assert_eq!(phi.eval(&rat(1, 4)).unwrap(), rat(1, 2));
        assert_eq!(phi.eval(&rat(1, 2)).unwrap(), rat(3, 4));
        let k = PLPath::constant(rat(1, 1), rat(3, 1)).unwrap();
        assert!(!normalized_associativity_fails(&k, &k, &k).unwrap());
        assert!(associator(&k, &k, &k).is_ok());
    }

    #[test]
    fn blend_examples() {
        let phi = r("pts=(0,0),(1/2,1/4),(1,1)");
        let id = PLReparam::identity();
        assert_eq!(blend(&phi, &id, &rat(0, 1)).unwrap(), phi);
        assert_eq!(blend(&phi, &id, &rat(1, 1)).unwrap(), id);
        assert_eq!(blend(&phi, &id, &half()).unwrap(), r("pts=(0,0),(1/2,3/8),(1,1)"));
        assert!(blend(&phi, &id, &rat(3, 2)).is_err());
    }

    #[test]
    fn group_laws() {
        let id = PLReparam::identity();
        assert_eq!(invert_reparam(&id), id);
        let phi = r("pts=(0,0),(1/3,1/2),(1,1)");
        assert_eq!(compose_reparam(&phi, &invert_reparam(&phi)), id);
        assert_eq!(invert_reparam(&phi), r("pts=(0,0),(1/2,1/3),(1,1)"));
    }

    #[test]
    fn action_laws() {
        let g = p("dur=1; pts=(0,2),(1/5,-1),(1,3)");
        assert_eq!(act(&g, &PLReparam::identity()).unwrap(), g);
        let phi = r("pts=(0,0),(1/3,1/2),(1,1)");
        let psi = r("pts=(0,0),(3/4,1/4),(1,1)");
        let twice = act(&act(&g, &phi).unwrap(), &psi).unwrap();
        assert_eq!(twice, act(&g, &compose_reparam(&phi, &psi)).unwrap());
        assert_eq!(twice.start(), g.start());
        assert_eq!(twice.end(), g.end());
    }

    #[test]
    fn literal_round_trip_and_errors() {
        let g = p("dur=3/2; pts=(0,1/2),(1,-3),(3/2,0)");
        assert_eq!(g.to_string(), "dur=3/2; pts=(0,1/2),(1,-3),(3/2,0)");
        assert_eq!(p(&g.to_string()), g);
        assert!("dur=2; pts=(0,0),(1,1)".parse::<PLPath>().is_err());
        assert!("pts=(0,0)".parse::<PLPath>().is_err());
        assert!("dur=1; pts=(0,0),(1,1/0)".parse::<PLPath>().is_err());
        assert!("dur=1; pts=(1/2,0),(1,1)".parse::<PLPath>().is_err());
        assert!("pts=(0,0),(1/2,1/2),(1/3,3/4),(1,1)".parse::<PLReparam>().is_err());
    }
}
