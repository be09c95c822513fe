//! Parameter tables for every subcommand. The clap parser, config validation
//! and the usage schema are all generated from these.

use std::fmt::{self, Write as _};

use sectorlab::exppair::ProcessWord;
use sectorlab::rational::parse_rational;
use sectorlab::GaussianInt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Int,
    Uint,
    Real,
    /// Exact rational, written `p/q`, as an integer or as a finite decimal.
    Rational,
    Gaussian,
    /// A word over `{A, B}`.
    Word,
    Text,
    Path,
    Flag,
}

impl Kind {
    pub fn label(self) -> &'static str {
        match self {
            Kind::Int => "integer",
            Kind::Uint => "non-negative integer",
            Kind::Real => "real",
            Kind::Rational => "rational \"p/q\"",
            Kind::Gaussian => "Gaussian integer like 3+4i",
            Kind::Word => "word over A,B",
            Kind::Text => "text",
            Kind::Path => "path",
            Kind::Flag => "flag",
        }
    }

    /// Validates one raw value.
    pub fn check(self, raw: &str) -> Result<(), String> {
        let ok = match self {
            Kind::Int => raw.parse::<i64>().map(drop).map_err(|e| e.to_string()),
            Kind::Uint => raw.parse::<u64>().map(drop).map_err(|e| e.to_string()),
            Kind::Real => match raw.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(()),
                Ok(_) => Err("value must be finite".into()),
                Err(e) => Err(e.to_string()),
            },
            Kind::Rational => parse_rational(raw).map(drop).map_err(|e| e.to_string()),
            Kind::Gaussian => raw.parse::<GaussianInt>().map(drop).map_err(|e| e.to_string()),
            Kind::Word => raw.parse::<ProcessWord>().map(drop).map_err(|e| e.to_string()),
            Kind::Text | Kind::Path => Ok(()),
            Kind::Flag => raw.parse::<bool>().map(drop).map_err(|e| e.to_string()),
        };
        ok.map_err(|e| format!("expected {}: {e}", self.label()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Presence {
    Required,
    Optional,
    Default(&'static str),
}

#[derive(Clone, Debug)]
pub struct Param {
    pub name: &'static str,
    pub kind: Kind,
    pub list: bool,
    pub presence: Presence,
    pub choices: &'static [&'static str],
    pub help: &'static str,
}

impl Param {
    const fn new(name: &'static str, kind: Kind, help: &'static str) -> Self {
        Param { name, kind, list: false, presence: Presence::Optional, choices: &[], help }
    }

    const fn list(mut self) -> Self {
        self.list = true;
        self
    }

    const fn required(mut self) -> Self {
        self.presence = Presence::Required;
        self
    }

    const fn default(mut self, v: &'static str) -> Self {
        self.presence = Presence::Default(v);
        self
    }

    const fn choices(mut self, c: &'static [&'static str]) -> Self {
        self.choices = c;
        self
    }

    pub fn check(&self, raw: &str) -> Result<(), String> {
        if !self.choices.is_empty() && !self.choices.contains(&raw) {
            return Err(format!("{raw:?} is not one of {}", self.choices.join(", ")));
        }
        self.kind.check(raw)
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut ty = self.kind.label().to_string();
        if !self.choices.is_empty() {
            ty = self.choices.join("|");
        }
        if self.list {
            ty = format!("list of {ty}, comma separated");
        }
        let presence = match self.presence {
            Presence::Required => " [required]".to_string(),
            Presence::Optional => String::new(),
            Presence::Default(d) => format!(" [default {d}]"),
        };
        write!(f, "--{:<14} {ty}{presence}\n{:18}{}", self.name, "", self.help)
    }
}

pub struct CommandSchema {
    /// Space separated path, such as `density verify`.
    pub path: &'static str,
    pub about: &'static str,
    pub params: Vec<Param>,
}

impl CommandSchema {
    pub fn param(&self, name: &str) -> Option<&Param> {
        self.params.iter().find(|p| p.name == name)
    }

    pub fn render(&self) -> String {
        let mut out = format!("sectorlab {}: {}\n", self.path, self.about);
        for p in &self.params {
            let _ = writeln!(out, "  {p}");
        }
        out
    }
}

pub const GLOBAL_HELP: &str = "global options: --config FILE, --threads N (fallback SECTORLAB_THREADS), \
--seed N, --output FILE (JSON report), --csv FILE, --json";

const SETS: &[&str] = &["primes", "rough", "almost"];

fn point_set_params() -> Vec<Param> {
    vec![
        Param::new("set", Kind::Text, "point set: primes or rough on [X, (1+eta)X], almost primes on (X, 2X]")
            .choices(SETS)
            .default("primes"),
        Param::new("eta", Kind::Real, "relative width of the norm range").default("0.2"),
        Param::new("exempt", Kind::Real, "rough set: starts z of exempt intervals [z, z^2]").list(),
        Param::new("k", Kind::Uint, "almost primes: number of prime factors (2 or 3)").default("2"),
        Param::new("scales", Kind::Real, "almost primes: scales P_j of the first k-1 factors").list(),
        Param::new("epsilon", Kind::Real, "almost primes: factor windows [P^(1-epsilon), P]").default("0.5"),
    ]
}

fn with_set(mut head: Vec<Param>, tail: Vec<Param>) -> Vec<Param> {
    head.extend(point_set_params());
    head.extend(tail);
    head
}

pub fn commands() -> Vec<CommandSchema> {
    use Kind::*;
    vec![
        CommandSchema {
            path: "sieve",
            about: "canonical Gaussian primes with norm in [lo, hi]",
            params: vec![
                Param::new("lo", Uint, "smallest norm").default("2"),
                Param::new("hi", Uint, "largest norm").required(),
                Param::new("list-limit", Uint, "list the primes when there are at most this many").default("1000"),
                Param::new("cache", Path, "also write a binary prime cache here"),
            ],
        },
        CommandSchema {
            path: "sectors",
            about: "window sums, pair-proximity sum and the sector count check",
            params: with_set(
                vec![Param::new("x", Uint, "scale X").required()],
                vec![
                    Param::new("theta", Real, "window starts for window sums").list(),
                    Param::new("width", Real, "window width for window sums").default("0.01"),
                    Param::new("pair-t", Uint, "T for the pair-proximity sum [default floor(X/(20 log X))]"),
                    Param::new("pair-envelope", Real, "check the pair sum is at most this times eta^2/(log X)^2")
                        .default("8"),
                    Param::new("n", Gaussian, "centre of the sector count check"),
                    Param::new("norm-bound", Uint, "N for the sector count check").default("10000"),
                    Param::new("v", Real, "v values for the sector count check").list().default("1,2,5,10,20,50"),
                    Param::new("ratio-limit", Real, "check count/v stays at most this").default("20"),
                ],
            ),
        },
        CommandSchema {
            path: "variance",
            about: "exact window variance and covered measure over an (X, h) grid",
            params: with_set(
                vec![
                    Param::new("x", Uint, "scales X").list().required(),
                    Param::new("h", Real, "window widths are h/X").list().required(),
                ],
                vec![Param::new("mc-samples", Uint, "Monte-Carlo cross-check with this many samples per cell")
                    .default("0")],
            ),
        },
        CommandSchema {
            path: "hecke-sum",
            about: "F(m) = sum of a_n lambda^m(n) with a_n = 1/N(n) on a point set",
            params: with_set(
                vec![
                    Param::new("x", Uint, "scale X").required(),
                    Param::new("m", Int, "frequencies").list().required(),
                ],
                vec![Param::new("reduce", Flag, "collapse each ray onto its primitive element first")],
            ),
        },
        CommandSchema {
            path: "spectrum",
            about: "F(m) for every m in [m-lo, m-hi]",
            params: with_set(
                vec![
                    Param::new("x", Uint, "scale X").required(),
                    Param::new("m-lo", Int, "lowest frequency").required(),
                    Param::new("m-hi", Int, "highest frequency").required(),
                ],
                vec![
                    Param::new("method", Text, "evaluation method").choices(&["direct", "binned"]).default("binned"),
                    Param::new("bits", Uint, "binned: angular resolution in bits").default("22"),
                    Param::new("target-error", Real, "binned: refuse if the certificate exceeds this"),
                    Param::new("verify", Flag, "also run the direct method and check the certificate"),
                    Param::new("dump", Path, "write the spectrum dump here"),
                ],
            ),
        },
        CommandSchema {
            path: "mvt-check",
            about: "mean-value report card and large-value count",
            params: with_set(
                vec![Param::new("x", Uint, "scale X").required(), Param::new("t", Uint, "T values").list().required()],
                vec![Param::new("large-value", Real, "also count |m| <= T with |F(m)| >= V")],
            ),
        },
        CommandSchema {
            path: "exppair",
            about: "apply a process word to an exponent pair, or search for the best word",
            params: vec![
                Param::new("word", Word, "process word, applied right to left"),
                Param::new("kappa", Rational, "seed kappa").default("0"),
                Param::new("lambda", Rational, "seed lambda").default("1"),
                Param::new("search", Flag, "search all words up to the given depth"),
                Param::new("objective", Text, "search objective")
                    .choices(&["kappa", "kappa-plus-lambda", "sigma-lower"])
                    .default("kappa"),
                Param::new("depth", Uint, "maximal word length for the search").default("12"),
            ],
        },
        CommandSchema {
            path: "density verify",
            about: "check whether the constant C closes the density chain",
            params: vec![
                Param::new("C", Rational, "candidate constant").required(),
                Param::new("mode", Text, "exceptional-set exponent").choices(&["e2", "e3"]).default("e2"),
                Param::new("pairs", Text, "exponent pairs used").choices(&["rounded", "exact"]).default("rounded"),
            ],
        },
        CommandSchema {
            path: "density minimal",
            about: "smallest feasible C by exact bisection",
            params: vec![
                Param::new("mode", Text, "exceptional-set exponent").choices(&["e2", "e3"]).default("e2"),
                Param::new("tol", Rational, "bisection tolerance").default("1/1000000"),
                Param::new("pairs", Text, "exponent pairs used").choices(&["rounded", "exact"]).default("rounded"),
            ],
        },
        CommandSchema {
            path: "density interval",
            about: "admissible sigma interval for a density estimate",
            params: vec![
                Param::new("beta", Rational, "beta").required(),
                Param::new("kappa", Rational, "pair variant: kappa"),
                Param::new("lambda", Rational, "pair variant: lambda"),
                Param::new("smooth", Flag, "smooth variant"),
                Param::new("delta", Rational, "second estimate: delta"),
                Param::new("amp", Rational, "second estimate: amplifier exponent"),
            ],
        },
        CommandSchema {
            path: "divisor-check",
            about: "shifted divisor correlation against its main term",
            params: vec![
                Param::new("instance", Path, "key = value instance file; replaces the inline parameters"),
                Param::new("x", Uint, "x"),
                Param::new("k", Int, "shift k"),
                Param::new("T1", Uint, "modulus T1").default("1"),
                Param::new("T2", Uint, "modulus T2").default("1"),
                Param::new("M1", Real, "scale M1"),
                Param::new("M2", Real, "scale M2"),
                Param::new("M3", Real, "scale M3"),
                Param::new("M4", Real, "scale M4"),
                Param::new("delta", Real, "support parameter delta"),
                Param::new("weight", Text, "weight shape").choices(&["smooth", "sharp"]).default("smooth"),
                Param::new("plateau-lo", Real, "plateau start in units of M").default("1.1"),
                Param::new("plateau-hi", Real, "plateau end in units of M").default("1.9"),
                Param::new("work-limit", Uint, "refuse instances above this estimated work").default("200000000000"),
                Param::new("tolerance", Real, "check the relative gap is at most this"),
            ],
        },
        CommandSchema {
            path: "kloosterman",
            about: "Kloosterman sums S(a, b; c) with the Weil bound",
            params: vec![
                Param::new("a", Int, "a").required(),
                Param::new("b", Int, "b").required(),
                Param::new("c", Uint, "moduli").list(),
                Param::new("c-max", Uint, "all moduli 1..=c-max"),
            ],
        },
        CommandSchema {
            path: "decay",
            about: "prime sums of lambda^m, or smooth sums against the exponent-pair bound",
            params: vec![
                Param::new("kind", Text, "experiment").choices(&["prime", "smooth"]).default("prime"),
                Param::new("n", Uint, "norm scales N (smooth uses the first)").list().required(),
                Param::new("m", Int, "frequencies").list().required(),
                Param::new("n-prime", Uint, "smooth: upper norm N' [default 2N]"),
                Param::new("kappa", Rational, "smooth: pair kappa").default("1/42"),
                Param::new("lambda", Rational, "smooth: pair lambda").default("25/28"),
                Param::new("exclude-k", Uint, "smooth: exclude rough sectors up to this k"),
                Param::new("exclude-width", Real, "smooth: half width of excluded sectors").default("0.01"),
            ],
        },
    ]
}

pub fn find(path: &str) -> Option<CommandSchema> {
    commands().into_iter().find(|c| c.path == path)
}

/// Usage text for one command, or for all of them.
pub fn render(path: Option<&str>) -> String {
    let mut out = String::new();
    match path.and_then(find) {
        Some(c) => out.push_str(&c.render()),
        None => {
            out.push_str("sectorlab <command> [options]\ncommands:\n");
            for c in commands() {
                let _ = writeln!(out, "  {:<18} {}", c.path, c.about);
            }
        }
    }
    out.push_str(GLOBAL_HELP);
    out.push('\n');
    out
}
