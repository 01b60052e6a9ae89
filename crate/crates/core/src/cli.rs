//! Command-line front end. Every command prints JSON lines to stdout or to
//! the `--out` file; errors go to stderr with exit code 2 (usage or input),
//! 3 (enumeration cap exceeded) or 4 (inconsistent mathematics).

use crate::counting::{self, FamilySpec};
use crate::error::{Error, Result};
use crate::ffield::FieldDesc;
use crate::intpoly::{bigint_json, IntPolynomial};
use crate::lattice::{self, convex_hull, LatticePolytope};
use crate::laurent::{parse_laurent, parse_laurent_with_parameter, LaurentPoly};
use crate::newtonpolygon::{self, lies_above, newton_polygon_of, overlay_svg, slope_multiset, GnpConfig};
use crate::rational::fmt_q;
use crate::regularity::{cy_singular_parameters, is_delta_regular};
use crate::zetareconstruct::{self as zr, EulerRecipe, ZetaFactorization};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde::Deserialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Parser, Debug)]
#[command(name = "zetamill", version, about = "Zeta functions of toric hypersurfaces over finite fields")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Write JSON lines here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Enumeration cap: work estimates above it are refused.
    #[arg(long, global = true, default_value_t = counting::DEFAULT_CAP)]
    pub cap: u128,
    /// Run even when the work estimate exceeds the cap.
    #[arg(long, global = true)]
    pub force: bool,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Add wall-clock timings to the output (breaks byte-identity).
    #[arg(long, global = true)]
    pub timing: bool,
}

impl Global {
    fn cap(&self) -> u128 {
        if self.force {
            u128::MAX
        } else {
            self.cap
        }
    }
}

/// A polynomial from a problem file or the built-in Calabi-Yau family.
#[derive(Args, Debug, Clone)]
pub struct Source {
    /// Problem file: {"field": {"p", "k"}, "nvars", "poly", "family": {"parameter"}}.
    #[arg(long)]
    pub problem: Option<PathBuf>,
    /// Use the family x1 + ... + xN + 1/(x1...xN) - y instead of a file.
    #[arg(long, value_name = "N")]
    pub cy: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Count points: torus points of f, or x-torus/y-affine points of a family.
    Count {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        k: usize,
        /// Count only the fibre over this parameter (element index in F_q).
        #[arg(long)]
        y: Option<u64>,
    },
    /// Zeta function of the torus hypersurface from counts over F_{q^k}, k ≤ kmax.
    Zeta {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        kmax: usize,
        /// Largest total degree searched (at most kmax / 2 is determined).
        #[arg(long)]
        max_order: usize,
    },
    /// Moments M_d(f ⊗ F_{q^k}) of a family, optionally its moment zeta function.
    Moment {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        kmax: usize,
        /// Reconstruct Z_d with total degree at most this.
        #[arg(long)]
        max_order: Option<usize>,
        /// Extract the factor R_d (two-variable Calabi-Yau family only).
        #[arg(long)]
        extract_r: bool,
    },
    /// Partial moment M_{d_1,...,d_m} with projection or custom coordinate maps.
    Partial {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        q: u64,
        /// Comma-separated extension degrees, one per coordinate map.
        #[arg(long, value_delimiter = ',')]
        degrees: Vec<usize>,
        #[arg(long)]
        k: usize,
    },
    /// W(k), Hodge numbers, d and the Hodge polygon of a polytope.
    Hodge {
        #[arg(long)]
        polytope: PathBuf,
    },
    /// Normalized volume n! Vol.
    Volume {
        #[arg(long)]
        polytope: PathBuf,
    },
    /// Polar dual and reflexivity.
    Dual {
        #[arg(long)]
        polytope: PathBuf,
    },
    /// q-adic Newton polygon of an integer polynomial.
    Np {
        /// Comma-separated coefficients, constant term first.
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
        #[arg(long)]
        q: u64,
        /// Compare against the Hodge polygon of this polytope.
        #[arg(long)]
        hodge_polytope: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Ordinarity of a Δ-regular polynomial.
    Ordinary {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        q: u64,
        /// Fibre parameter for family sources (element index in F_q).
        #[arg(long)]
        y: Option<u64>,
        #[arg(long)]
        regularity_bound: usize,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Sampled generic Newton polygon of a polytope.
    Gnp {
        #[arg(long)]
        polytope: PathBuf,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        trials: usize,
        /// Coefficients are sampled from F_{p^extension}.
        #[arg(long)]
        extension: usize,
        #[arg(long)]
        regularity_bound: usize,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Bounded Δ-regularity search.
    Regular {
        #[command(flatten)]
        source: Source,
        /// Field size for family sources.
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        y: Option<u64>,
        #[arg(long)]
        bound: usize,
    },
    /// Verify a convex triangulation given by a lifting.
    TriangulateVerify {
        /// {"points": [[..]], "cells": [[i..]], "heights": ["a/b", ..]}.
        #[arg(long)]
        triangulation: PathBuf,
        /// Also report the ordinarity prediction at this prime.
        #[arg(long)]
        p: Option<u64>,
    },
    /// Per-prime factors of the moment zeta function of the Calabi-Yau family.
    EulerTable {
        #[arg(long)]
        cy: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, value_delimiter = ',')]
        primes: Vec<u64>,
        #[arg(long)]
        kmax: usize,
        #[arg(long)]
        max_order: usize,
    },
    /// Scan moduli D for M_{d1} ≡ M_{d2} mod l^k whenever d1 ≡ d2 mod D l^(k-1).
    Congruence {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        l: u64,
        #[arg(long)]
        dmax: usize,
        /// Largest exponent k of l.
        #[arg(long)]
        lk: u32,
        #[arg(long, value_delimiter = ',')]
        candidates: Vec<usize>,
    },
    /// Slope zeta function of numerator / denominator, or of a problem's zeta function.
    Slope {
        #[arg(long, allow_hyphen_values = true)]
        numerator: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        denominator: Option<String>,
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        kmax: Option<usize>,
        #[arg(long)]
        max_order: Option<usize>,
    },
}

#[derive(Deserialize)]
struct FieldSpec {
    p: u64,
    k: usize,
}

#[derive(Deserialize)]
struct FamilyFile {
    parameter: String,
}

#[derive(Deserialize)]
struct ProblemFile {
    field: FieldSpec,
    nvars: usize,
    poly: String,
    family: Option<FamilyFile>,
}

/// A parsed problem: a polynomial, and whether its last variable is the
/// family parameter.
#[derive(Clone, Debug)]
pub struct Problem {
    pub poly: LaurentPoly,
    pub is_family: bool,
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

/// Parses a problem file.
pub fn parse_problem(v: &Value) -> Result<Problem> {
    let pf: ProblemFile =
        serde_json::from_value(v.clone()).map_err(|e| Error::InvalidInput(format!("problem file: {e}")))?;
    let field = FieldDesc::new(pf.field.p, pf.field.k)?;
    match pf.family {
        Some(fam) => Ok(Problem {
            poly: parse_laurent_with_parameter(&pf.poly, pf.nvars + 1, &field, &fam.parameter)?,
            is_family: true,
        }),
        None => Ok(Problem { poly: parse_laurent(&pf.poly, pf.nvars, &field)?, is_family: false }),
    }
}

fn load_source(src: &Source, q: u64) -> Result<Problem> {
    match (&src.problem, src.cy) {
        (Some(path), None) => parse_problem(&read_json(path)?),
        (None, Some(n)) => Ok(Problem { poly: FamilySpec::calabi_yau(n, q)?.f, is_family: true }),
        _ => Err(Error::InvalidInput("give exactly one of --problem and --cy".into())),
    }
}

fn load_family(src: &Source, q: u64) -> Result<FamilySpec> {
    let pr = load_source(src, q)?;
    if !pr.is_family {
        return Err(Error::InvalidInput("this command needs a family (a problem with a parameter)".into()));
    }
    FamilySpec::new(pr.poly, q)
}

fn load_polytope(path: &Path) -> Result<LatticePolytope> {
    LatticePolytope::from_json(&read_json(path)?)
}

/// Parses comma-separated integers into a polynomial.
pub fn parse_int_poly(text: &str) -> Result<IntPolynomial> {
    let coeffs = text
        .split(',')
        .map(|s| s.trim().parse::<BigInt>().map_err(|e| Error::InvalidInput(format!("coefficient {s:?}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(IntPolynomial::new(coeffs))
}

fn fibre_at(family: &FamilySpec, y: u64) -> Result<LaurentPoly> {
    let field = family.base_field()?;
    let size = field.size().unwrap_or(u128::MAX);
    if y as u128 >= size {
        return Err(Error::InvalidInput(format!("parameter index {y} outside F_{}", family.q)));
    }
    family.fibre(&field.element_at(y as u128), &field)
}

fn write_svg(path: &Path, svg: &str) -> Result<()> {
    std::fs::write(path, svg).map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))
}

fn factorization_json(z: &ZetaFactorization, q: u64) -> Value {
    let mut v = z.to_json();
    if let Ok(s) = zr::slope_zeta(z, q) {
        v["slope_zeta"] = s.to_json();
    }
    v
}

/// Runs one parsed command and returns its JSON lines.
pub fn execute(cli: &Cli) -> Result<Vec<Value>> {
    let g = &cli.global;
    let cap = g.cap();
    let started = Instant::now();
    let mut out = match &cli.command {
        Command::Count { source, q, k, y } => {
            let pr = load_source(source, *q)?;
            let value = if pr.is_family {
                let family = FamilySpec::new(pr.poly, *q)?;
                match y {
                    Some(y) => {
                        let fibre = fibre_at(&family, *y)?;
                        BigInt::from(counting::count_points_capped(&fibre, *q, *k, cap)?.count)
                    }
                    None => counting::moment(&family, 1, *k, cap)?,
                }
            } else {
                if y.is_some() {
                    return Err(Error::InvalidInput("--y needs a family".into()));
                }
                BigInt::from(counting::count_points_capped(&pr.poly, *q, *k, cap)?.count)
            };
            vec![json!({"op": "count", "q": q, "k": k, "y": y, "value": bigint_json(&value)})]
        }
        Command::Zeta { source, q, kmax, max_order } => {
            let pr = load_source(source, *q)?;
            if pr.is_family {
                return Err(Error::InvalidInput("zeta expects a single polynomial; use moment for families".into()));
            }
            let counts = newtonpolygon::torus_counts(&pr.poly, *q, *kmax, cap)?;
            let z = zr::recurrence_reconstruct(&counts, *max_order)?;
            let mut line = json!({
                "op": "zeta",
                "q": q,
                "counts": zr::counts_json(&counts),
                "zeta": factorization_json(&z, *q),
            });
            if let Ok(delta) = pr.poly.newton_polytope() {
                if delta.dim == delta.n {
                    if let Ok(pf) = zr::nontrivial_factor(&delta, &counts, *q) {
                        line["nontrivial_factor"] = pf.to_json();
                        if let Ok(w) = zr::weil_weights(&pf, *q) {
                            line["weights"] = w.to_json();
                        }
                    }
                }
            }
            vec![line]
        }
        Command::Moment { source, q, d, kmax, max_order, extract_r } => {
            let family = load_family(source, *q)?;
            let counts = counting::moment_sequence(&family, *d, *kmax, cap)?;
            let mut line = json!({"op": "moment", "q": q, "d": d, "moments": zr::counts_json(&counts)});
            if let Some(m) = max_order {
                line["moment_zeta"] = factorization_json(&zr::moment_zeta(&counts, *m)?, *q);
            }
            if *extract_r {
                if source.cy != Some(2) {
                    return Err(Error::InvalidInput("--extract-r needs --cy 2".into()));
                }
                let prev = if *d >= 2 { zr::cy2_r_d(*q, d - 2, *kmax, cap)?.r_d } else { IntPolynomial::one() };
                line["R_d"] = zr::extract_r_d(*d, *q, &counts, &prev)?.to_json();
                line["trivial_factors"] = zr::cy_trivial_factors(2, *d, *q)?.to_json();
            }
            vec![line]
        }
        Command::Partial { source, q, degrees, k } => {
            let family = load_family(source, *q)?;
            let value = counting::partial_moment(&family, degrees, *k, cap)?;
            vec![json!({"op": "partial", "q": q, "k": k, "degrees": degrees, "value": bigint_json(&value)})]
        }
        Command::Hodge { polytope } => {
            let delta = load_polytope(polytope)?;
            vec![json!({"op": "hodge", "hodge": delta.hodge_numbers()?.to_json()})]
        }
        Command::Volume { polytope } => {
            let delta = load_polytope(polytope)?;
            vec![json!({"op": "volume", "normalized_volume": delta.normalized_volume()?})]
        }
        Command::Dual { polytope } => {
            let delta = load_polytope(polytope)?;
            vec![json!({"op": "dual", "dual": delta.polar_dual()?.to_json()})]
        }
        Command::Np { coeffs, q, hodge_polytope, svg } => {
            let poly = parse_int_poly(coeffs)?;
            let np = newton_polygon_of(&poly, *q)?;
            let slopes: Vec<Value> =
                slope_multiset(&np).iter().map(|(s, l)| json!({"slope": fmt_q(s), "length": fmt_q(l)})).collect();
            let mut line = json!({"op": "np", "q": q, "NP": np.to_json(), "slopes": slopes});
            if let Some(path) = hodge_polytope {
                let hp = load_polytope(path)?.hodge_numbers()?.hp;
                line["HP"] = hp.to_json();
                line["comparison"] = lies_above(&np, &hp).to_json();
                if let Some(svg) = svg {
                    write_svg(svg, &overlay_svg(&np, &hp))?;
                }
            } else if let Some(svg) = svg {
                write_svg(svg, &overlay_svg(&np, &np))?;
            }
            vec![line]
        }
        Command::Ordinary { source, q, y, regularity_bound, svg } => {
            let pr = load_source(source, *q)?;
            let f = match (pr.is_family, y) {
                (true, Some(y)) => fibre_at(&FamilySpec::new(pr.poly, *q)?, *y)?,
                (false, None) => pr.poly,
                _ => return Err(Error::InvalidInput("--y is required exactly for family sources".into())),
            };
            let delta = f.newton_polytope()?;
            let len = delta.normalized_volume()? as usize - 1;
            let counts = newtonpolygon::torus_counts(&f, *q, len.max(1), cap)?;
            let v = newtonpolygon::is_ordinary(&f, *q, &counts, *regularity_bound, cap)?;
            if let Some(svg) = svg {
                write_svg(svg, &overlay_svg(&v.np, &v.hp))?;
            }
            vec![json!({"op": "ordinary", "q": q, "counts": zr::counts_json(&counts), "result": v.to_json()})]
        }
        Command::Gnp { polytope, p, trials, extension, regularity_bound, svg } => {
            let delta = load_polytope(polytope)?;
            let config = GnpConfig::new(*extension, *regularity_bound, cap);
            let s = newtonpolygon::gnp_sample(&delta, *p, *trials, g.seed, &config)?;
            if let Some(svg) = svg {
                write_svg(svg, &overlay_svg(&s.gnp, &s.hp))?;
            }
            vec![json!({"op": "gnp", "p": p, "seed": g.seed, "result": s.to_json()})]
        }
        Command::Regular { source, q, y, bound } => {
            let pr = load_source(source, q.unwrap_or(2))?;
            let (f, family) = if pr.is_family {
                let q = q.ok_or_else(|| Error::InvalidInput("--q is required for families".into()))?;
                let y = y.ok_or_else(|| Error::InvalidInput("--y is required for families".into()))?;
                let family = FamilySpec::new(pr.poly, q)?;
                (fibre_at(&family, y)?, Some((family, y)))
            } else {
                (pr.poly, None)
            };
            let verdict = is_delta_regular(&f, *bound, cap)?;
            let mut line = json!({"op": "regular", "result": verdict.to_json()});
            if let (Some(n), Some((family, y))) = (source.cy, family) {
                let field = family.base_field()?;
                let singular = cy_singular_parameters(n, family.q)?;
                let predicted = singular.contains(&field.element_at(y as u128));
                line["symbolic_singular"] = json!(predicted);
                line["agrees"] = json!(predicted != verdict.is_regular());
            }
            vec![line]
        }
        Command::TriangulateVerify { triangulation, p } => {
            let (points, cells, heights) = lattice::triangulation_from_json(&read_json(triangulation)?)?;
            let delta = convex_hull(&points)?;
            let verdict = lattice::verify_convex_triangulation(&delta, &points, &cells, &heights)?;
            let mut line = json!({"op": "triangulate-verify", "result": verdict.to_json()});
            if let Some(p) = p {
                let simplices = cells
                    .iter()
                    .map(|c| convex_hull(&c.iter().map(|&i| points[i].clone()).collect::<Vec<_>>()))
                    .collect::<Result<Vec<_>>>()?;
                let (l, predicted) = lattice::ordinarity_prediction(&simplices, *p)?;
                line["ordinarity_prediction"] = json!({"p": p, "lcm_volumes": l, "predicted_ordinary": predicted});
            }
            vec![line]
        }
        Command::EulerTable { cy, d, primes, kmax, max_order } => {
            zr::euler_factor_table(EulerRecipe::CalabiYau { n: *cy }, *d, primes, *kmax, *max_order, cap)
                .iter()
                .map(|r| r.to_json())
                .collect()
        }
        Command::Congruence { source, q, l, dmax, lk, candidates } => {
            let family = load_family(source, *q)?;
            let mut moments = BTreeMap::new();
            for d in 1..=*dmax {
                moments.insert(d, counting::moment(&family, d, 1, cap)?);
            }
            let report = zr::congruence_scan(&moments, *l, *lk, candidates);
            let m: BTreeMap<String, Value> = moments.iter().map(|(d, v)| (d.to_string(), bigint_json(v))).collect();
            vec![json!({"op": "congruence", "q": q, "moments": m, "report": report.to_json()})]
        }
        Command::Slope { numerator, denominator, source, q, kmax, max_order } => {
            let z = if numerator.is_some() || denominator.is_some() {
                let num = numerator.as_deref().map(parse_int_poly).transpose()?.unwrap_or_else(IntPolynomial::one);
                let den = denominator.as_deref().map(parse_int_poly).transpose()?.unwrap_or_else(IntPolynomial::one);
                ZetaFactorization::from_parts(num, den)
            } else {
                let pr = load_source(source, *q)?;
                let (Some(kmax), Some(m)) = (kmax, max_order) else {
                    return Err(Error::InvalidInput("--kmax and --max-order are required with a problem".into()));
                };
                let counts = newtonpolygon::torus_counts(&pr.poly, *q, *kmax, cap)?;
                zr::recurrence_reconstruct(&counts, *m)?
            };
            vec![json!({"op": "slope", "q": q, "slope_zeta": zr::slope_zeta(&z, *q)?.to_json()})]
        }
    };
    if g.timing {
        if let Some(first) = out.first_mut() {
            first["elapsed_ms"] = json!(started.elapsed().as_millis() as u64);
        }
    }
    Ok(out)
}

fn emit(lines: &[Value], out: Option<&Path>) -> std::io::Result<()> {
    let mut text = String::new();
    for l in lines {
        text.push_str(&l.to_string());
        text.push('\n');
    }
    match out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

/// Entry point: parses `args` and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = cli.global.threads {
        if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("{}", json!({"warning": "thread pool already initialised"}));
        }
    }
    match execute(&cli) {
        Ok(lines) => match emit(&lines, cli.global.out.as_deref()) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("{}", json!({"error": e.to_string(), "exit_code": 2}));
                2
            }
        },
        Err(e) => {
            let code = e.exit_code();
            eprintln!("{}", json!({"error": e.to_string(), "exit_code": code}));
            code
        }
    }
}
