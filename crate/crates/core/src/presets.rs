//! Built-in example domains and their known exact solutions.

use std::fmt;
use std::str::FromStr;

use crate::domain::json::DomainDoc;
use crate::domain::{Analytic, FracturedDomain};
use crate::{vec2, Error, Result, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// Vertical crack with flow into it from both sides.
    Example1,
    /// Vertical crack with flow out of it into both sides.
    Example2,
    /// Diagonal flow across a crack with zero tangential speed.
    Example3,
    /// As [`Preset::Example3`] with crack speed 0.1.
    Example3Speed01,
    /// As [`Preset::Example3`] with crack speed 0.2.
    Example3Speed02,
    /// The crossing flow without any crack.
    Example3NoCrack,
    /// One crack splitting into two at a bifurcation point, equal speeds.
    Example4,
    /// The bifurcation with outgoing speeds 0.25 and 1.75.
    Example4Diff,
    /// Network of eight cracks and three bifurcation points.
    Example5,
}

impl Preset {
    pub fn all() -> [Preset; 9] {
        [
            Preset::Example1,
            Preset::Example2,
            Preset::Example3,
            Preset::Example3Speed01,
            Preset::Example3Speed02,
            Preset::Example3NoCrack,
            Preset::Example4,
            Preset::Example4Diff,
            Preset::Example5,
        ]
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Example1 => "example1",
            Preset::Example2 => "example2",
            Preset::Example3 => "example3",
            Preset::Example3Speed01 => "example3-0.1",
            Preset::Example3Speed02 => "example3-0.2",
            Preset::Example3NoCrack => "example3-nocrack",
            Preset::Example4 => "example4",
            Preset::Example4Diff => "example4-diff",
            Preset::Example5 => "example5",
        }
    }

    /// The embedded JSON document.
    pub fn json(self) -> &'static str {
        match self {
            Preset::Example1 => include_str!("../presets/example1.json"),
            Preset::Example2 => include_str!("../presets/example2.json"),
            Preset::Example3 => include_str!("../presets/example3.json"),
            Preset::Example3Speed01 => include_str!("../presets/example3-0.1.json"),
            Preset::Example3Speed02 => include_str!("../presets/example3-0.2.json"),
            Preset::Example3NoCrack => include_str!("../presets/example3-nocrack.json"),
            Preset::Example4 => include_str!("../presets/example4.json"),
            Preset::Example4Diff => include_str!("../presets/example4-diff.json"),
            Preset::Example5 => include_str!("../presets/example5.json"),
        }
    }

    /// Parse and validate the preset domain. The embedded files are checked
    /// by the test suite, so failure here is a build defect.
    pub fn domain(self) -> FracturedDomain {
        DomainDoc::parse(self.json())
            .and_then(DomainDoc::into_domain)
            .unwrap_or_else(|e| panic!("preset {} is invalid: {e}", self.name()))
    }

    /// Closed-form solution where one is known.
    pub fn exact(self) -> Option<Analytic> {
        match self {
            Preset::Example1 => Some(Analytic::new(
                |c, x| if c.dim == 1 { 2.0 * x.y } else { 1.0 },
                |c, _| if c.dim == 1 { vec2(0.0, 2.0) } else { Vec2::zeros() },
            )),
            Preset::Example2 => Some(Analytic::uniform(
                |x| (-2.0 * x.y).exp(),
                |x| vec2(0.0, -2.0 * (-2.0 * x.y).exp()),
            )),
            // unit inflow data is transported unchanged: the constant solves
            // every component equation and every coupling condition
            Preset::Example3 | Preset::Example3Speed01 | Preset::Example3Speed02 | Preset::Example3NoCrack => {
                Some(Analytic::uniform(|_| 1.0, |_| Vec2::zeros()))
            }
            _ => None,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::all()
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Preset::all().iter().map(|p| p.name()).collect();
                Error::Config(format!("unknown preset '{s}' (expected one of: {})", names.join(", ")))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{d_beta_analytic, gamma, ComponentFunction, ComponentId};

    #[test]
    fn all_presets_load() {
        for p in Preset::all() {
            let d = p.domain();
            assert!(!d.bulks.is_empty());
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("example9".parse::<Preset>().is_err());
    }

    #[test]
    fn component_counts() {
        let count = |p: Preset| {
            let d = p.domain();
            (d.bulks.len(), d.cracks.len(), d.points.len())
        };
        assert_eq!(count(Preset::Example1), (2, 1, 0));
        assert_eq!(count(Preset::Example3NoCrack), (1, 0, 0));
        assert_eq!(count(Preset::Example4), (3, 3, 1));
        assert_eq!(count(Preset::Example5), (6, 8, 3));
    }

    #[test]
    fn bulks_tile_the_square() {
        for p in Preset::all() {
            let total: f64 = p.domain().bulks.iter().map(|b| b.area()).sum();
            assert!((total - 1.0).abs() < 1e-14, "{p:?}");
        }
    }

    #[test]
    fn exact_solutions_satisfy_strong_equations() {
        // L u = D_β u + γ u = f = 0 at sample points of every component
        for p in Preset::all() {
            let Some(u) = p.exact() else { continue };
            let d = p.domain();
            for (ci, c) in d.cracks.iter().enumerate() {
                let id = ComponentId::crack(ci);
                for s in [0.1, 0.5, 0.9] {
                    let (a, b) = c.segment(0);
                    let x = a + (b - a) * s;
                    let r = d_beta_analytic(&d, &u, id, x).unwrap() + gamma(&d, id, x).unwrap() * u.value(id, x);
                    assert!(r.abs() < 1e-13, "{p:?} crack {ci}: {r}");
                }
            }
            for (bi, b) in d.bulks.iter().enumerate() {
                let id = ComponentId::bulk(bi);
                let x = crate::mesh::geom::centroid(&b.pieces[0]);
                let r = d_beta_analytic(&d, &u, id, x).unwrap() + gamma(&d, id, x).unwrap() * u.value(id, x);
                assert!(r.abs() < 1e-13, "{p:?} bulk {bi}: {r}");
            }
        }
    }
}
