//! Timing of table-driven identity detection against gcd-based degeneracy
//! detection on random instantiations of class representatives.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::apoly::{APoly, Side, VertexRef};
use crate::arith::Interval;
use crate::geom::Vec3;
use crate::identity::{
    factor_apolys, gcd_degeneracy_test, roots_equal, AlgebraicNumber, ConcreteFactor,
    IdentityError, Precision, RootRegistry,
};
use crate::table::FactorTable;
use crate::univariate::{univariate_from_apoly, VertexAssignment};
use crate::upoly::{isolate_real_roots, square_free_part, RootInterval, UPoly};

/// Vertices per side in the instantiation pool.
pub const POOL: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Factor,
    Gcd,
    Both,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchConfig {
    /// Number of representatives sampled.
    pub reps: usize,
    pub seed: u64,
    pub method: Method,
    /// Also run the gcd test on every identity test of the factor method
    /// and count disagreements.
    pub cross_check: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            reps: 2000,
            seed: 1,
            method: Method::Both,
            cross_check: true,
        }
    }
}

/// Uniform dyadic coordinates `k/2^53`, `|k| < 2^53`, for `o0..o11` and
/// `r0..r11`.
pub fn sample_coordinates(seed: u64) -> VertexAssignment {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let den: BigInt = BigInt::one() << 53;
    let bound = (1i64 << 53) - 1;
    let mut va = VertexAssignment::new();
    for side in [Side::O, Side::R] {
        for index in 0..POOL {
            let c = [0; 3].map(|_| {
                BigRational::new(BigInt::from(rng.gen_range(-bound..=bound)), den.clone())
            });
            va.insert(VertexRef { side, index }, Vec3(c));
        }
    }
    va
}

/// `reps` distinct representatives, each renamed onto random distinct pool
/// vertices.
pub fn sample_instances(table: &FactorTable, reps: usize, seed: u64) -> Vec<APoly> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let all: Vec<&APoly> = table.entries().map(|e| &e.rep).collect();
    let picked: Vec<&APoly> = all
        .choose_multiple(&mut rng, reps.min(all.len()))
        .copied()
        .collect();
    picked
        .into_iter()
        .map(|a| {
            let mut o: Vec<u32> = (0..POOL).collect();
            let mut r: Vec<u32> = (0..POOL).collect();
            o.shuffle(&mut rng);
            r.shuffle(&mut rng);
            a.map_vertices(|v| match v.side {
                Side::O => VertexRef::o(o[v.index as usize]),
                Side::R => VertexRef::r(r[v.index as usize]),
            })
        })
        .collect()
}

/// Counts and timings of one run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchReport {
    pub reps: usize,
    pub factor_roots: usize,
    pub factor_registry: usize,
    pub factor_seconds: f64,
    pub identity_tests: u64,
    pub identity_positive: u64,
    pub identity_seconds: f64,
    pub cross_checks: u64,
    pub cross_check_seconds: f64,
    pub mismatches: u64,
    pub gcd_roots: usize,
    pub gcd_registry: usize,
    pub gcd_seconds: f64,
    pub degeneracy_tests: u64,
    pub degeneracy_positive: u64,
    pub degeneracy_seconds: f64,
    pub precision: BTreeMap<String, u64>,
    /// `None` unless both methods ran.
    pub registries_agree: Option<bool>,
}

impl BenchReport {
    pub fn avg_identity_us(&self) -> f64 {
        per_test_us(self.identity_seconds, self.identity_tests)
    }

    /// Average over the cross-check tests, or over the gcd method's own
    /// tests when no cross-check ran.
    pub fn avg_gcd_us(&self) -> f64 {
        if self.cross_checks > 0 {
            per_test_us(self.cross_check_seconds, self.cross_checks)
        } else {
            per_test_us(self.degeneracy_seconds, self.degeneracy_tests)
        }
    }

    pub fn speedup(&self) -> f64 {
        self.avg_gcd_us() / self.avg_identity_us()
    }

    /// Flat JSON object.
    pub fn to_json(&self) -> String {
        let mut kv: Vec<(String, String)> = vec![
            ("reps".into(), self.reps.to_string()),
            ("factor_roots".into(), self.factor_roots.to_string()),
            ("factor_registry".into(), self.factor_registry.to_string()),
            (
                "factor_seconds".into(),
                format!("{:.6}", self.factor_seconds),
            ),
            ("identity_tests".into(), self.identity_tests.to_string()),
            (
                "identity_positive".into(),
                self.identity_positive.to_string(),
            ),
            (
                "identity_seconds".into(),
                format!("{:.6}", self.identity_seconds),
            ),
            (
                "avg_identity_us".into(),
                format!("{:.4}", self.avg_identity_us()),
            ),
            ("cross_checks".into(), self.cross_checks.to_string()),
            (
                "cross_check_seconds".into(),
                format!("{:.6}", self.cross_check_seconds),
            ),
            ("mismatches".into(), self.mismatches.to_string()),
            ("gcd_roots".into(), self.gcd_roots.to_string()),
            ("gcd_registry".into(), self.gcd_registry.to_string()),
            ("gcd_seconds".into(), format!("{:.6}", self.gcd_seconds)),
            ("degeneracy_tests".into(), self.degeneracy_tests.to_string()),
            (
                "degeneracy_positive".into(),
                self.degeneracy_positive.to_string(),
            ),
            (
                "degeneracy_seconds".into(),
                format!("{:.6}", self.degeneracy_seconds),
            ),
            ("avg_gcd_us".into(), format!("{:.4}", self.avg_gcd_us())),
            ("speedup".into(), format!("{:.2}", self.speedup())),
        ];
        for (k, v) in &self.precision {
            kv.push((format!("precision_{k}"), v.to_string()));
        }
        if let Some(a) = self.registries_agree {
            kv.push(("registries_agree".into(), a.to_string()));
        }
        let mut s = String::from("{\n");
        for (i, (k, v)) in kv.iter().enumerate() {
            let comma = if i + 1 < kv.len() { "," } else { "" };
            let _ = writeln!(s, "  \"{k}\": {v}{comma}");
        }
        s.push_str("}\n");
        s
    }
}

fn per_test_us(seconds: f64, n: u64) -> f64 {
    if n == 0 {
        0.0
    } else {
        seconds * 1e6 / n as f64
    }
}

fn precision_name(p: Precision) -> &'static str {
    match p {
        Precision::Trivial => "trivial",
        Precision::Float => "float",
        Precision::Refined => "refined",
        Precision::Exact => "exact",
    }
}

struct Pending {
    poly: UPoly,
    interval: RootInterval,
    identity: bool,
}

/// Factor method: table lookup, root isolation, registry insertion, with an
/// identity test of the inserted a-poly at every root it is compared with.
fn run_factor(
    instances: &[APoly],
    va: &VertexAssignment,
    table: &FactorTable,
    cross_check: bool,
    rep: &mut BenchReport,
) -> Result<RootRegistry, IdentityError> {
    let mut reg = RootRegistry::new();
    let mut identity = Duration::ZERO;
    let mut checks = Duration::ZERO;
    let start = Instant::now();
    for g in instances {
        let symbolic = factor_apolys(g, table)?;
        let factors = symbolic
            .iter()
            .map(|(a, m)| {
                Ok(ConcreteFactor {
                    apoly: a.clone(),
                    multiplicity: *m,
                    poly: univariate_from_apoly(a, va)?,
                })
            })
            .collect::<Result<Vec<_>, IdentityError>>()?;
        let mut pending: Vec<Pending> = Vec::new();
        for f in &factors {
            for tau in AlgebraicNumber::all_roots(f) {
                rep.factor_roots += 1;
                reg.insert_with(tau, |te| {
                    let t0 = Instant::now();
                    let hit = symbolic.iter().any(|(a, _)| *a == te.factor.apoly);
                    identity += t0.elapsed();
                    rep.identity_tests += 1;
                    rep.identity_positive += hit as u64;
                    if cross_check {
                        pending.push(Pending {
                            poly: te.factor.poly.clone(),
                            interval: te.interval.clone(),
                            identity: hit,
                        });
                    }
                });
            }
        }
        if !pending.is_empty() {
            let gu = univariate_from_apoly(g, va)?;
            for p in pending {
                let t0 = Instant::now();
                let d = gcd_degeneracy_test(&p.poly, &gu, &p.interval);
                checks += t0.elapsed();
                rep.cross_checks += 1;
                rep.mismatches += (d.zero != p.identity) as u64;
                *rep.precision
                    .entry(precision_name(d.precision).into())
                    .or_default() += 1;
            }
        }
    }
    let total = start.elapsed();
    rep.factor_seconds = (total - checks).as_secs_f64();
    rep.identity_seconds = identity.as_secs_f64();
    rep.cross_check_seconds = checks.as_secs_f64();
    rep.factor_registry = reg.len();
    Ok(reg)
}

fn hull(iv: &RootInterval) -> Interval {
    Interval::new(
        Interval::from_rational(&iv.lo).lo,
        Interval::from_rational(&iv.hi).hi,
    )
}

fn separated(a: &RootInterval, b: &RootInterval) -> Option<Ordering> {
    let (x, y) = (hull(a), hull(b));
    if x.hi < y.lo {
        Some(Ordering::Less)
    } else if y.hi < x.lo {
        Some(Ordering::Greater)
    } else {
        None
    }
}

fn refine_apart(a: &mut RootInterval, b: &mut RootInterval) -> Ordering {
    loop {
        if a.hi <= b.lo {
            return Ordering::Less;
        }
        if b.hi <= a.lo {
            return Ordering::Greater;
        }
        if a.width() >= b.width() {
            a.refine();
        } else {
            b.refine();
        }
    }
}

/// Gcd method: square-free univariates, root isolation, registry insertion
/// with a degeneracy test whenever double precision cannot order two roots.
fn run_gcd(
    instances: &[APoly],
    va: &VertexAssignment,
    rep: &mut BenchReport,
) -> Result<Vec<RootInterval>, IdentityError> {
    let mut reg: Vec<RootInterval> = Vec::new();
    let mut degeneracy = Duration::ZERO;
    let eps = BigRational::new(BigInt::one(), BigInt::one() << 52);
    let start = Instant::now();
    for g in instances {
        let sf = square_free_part(&univariate_from_apoly(g, va)?);
        for mut tau in isolate_real_roots(&sf) {
            rep.gcd_roots += 1;
            let (mut lo, mut hi) = (0, reg.len());
            let mut merged = false;
            while lo < hi {
                let mid = (lo + hi) / 2;
                let other = &mut reg[mid];
                let ord = match separated(&tau, other) {
                    Some(o) => o,
                    None => {
                        tau.refine_to(&eps);
                        other.refine_to(&eps);
                        match separated(&tau, other) {
                            Some(o) => o,
                            None => {
                                let t0 = Instant::now();
                                let d = gcd_degeneracy_test(&other.poly, &sf, other);
                                degeneracy += t0.elapsed();
                                rep.degeneracy_tests += 1;
                                rep.degeneracy_positive += d.zero as u64;
                                if d.zero && roots_equal(&tau, other) {
                                    Ordering::Equal
                                } else {
                                    refine_apart(&mut tau, other)
                                }
                            }
                        }
                    }
                };
                match ord {
                    Ordering::Equal => {
                        merged = true;
                        break;
                    }
                    Ordering::Less => hi = mid,
                    Ordering::Greater => lo = mid + 1,
                }
            }
            if !merged {
                reg.insert(lo, tau);
            }
        }
    }
    rep.gcd_seconds = start.elapsed().as_secs_f64();
    rep.degeneracy_seconds = degeneracy.as_secs_f64();
    rep.gcd_registry = reg.len();
    Ok(reg)
}

/// Runs the configured methods on one random sample.
pub fn run_bench(cfg: &BenchConfig, table: &FactorTable) -> Result<BenchReport, IdentityError> {
    let va = sample_coordinates(cfg.seed);
    let instances = sample_instances(table, cfg.reps, cfg.seed);
    let mut rep = BenchReport {
        reps: instances.len(),
        ..Default::default()
    };
    let factor = match cfg.method {
        Method::Factor | Method::Both => Some(run_factor(
            &instances,
            &va,
            table,
            cfg.cross_check,
            &mut rep,
        )?),
        Method::Gcd => None,
    };
    let gcd = match cfg.method {
        Method::Gcd | Method::Both => Some(run_gcd(&instances, &va, &mut rep)?),
        Method::Factor => None,
    };
    if let (Some(f), Some(g)) = (&factor, &gcd) {
        rep.registries_agree =
            Some(f.len() == g.len() && f.iter().zip(g).all(|(x, y)| roots_equal(&x.interval, y)));
    }
    Ok(rep)
}
