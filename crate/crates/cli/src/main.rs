use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use apoly::bench::{run_bench, BenchConfig, Method};
use apoly::enumerate::enumerate_classes;
use apoly::identity::{
    factor_apoly, factor_apolys, predicate_sign, signed_univariate, AlgebraicNumber, ZeroClass,
};
use apoly::sweep::{
    facet_interval_apolys, mesh_assignment, pair_from_meshes, parse_features,
    structure_change_apoly, EventType, IntervalCondition, Mesh, Required,
};
use apoly::table::{build, check_records, verify_table, FactorTable, TableConfig};
use apoly::upoly::{isolate_real_roots, normalize, square_free_part, UPoly};
use apoly::{APoly, RatPoly, RootRegistry, VertexAssignment};
use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

const TABLE_ENV: &str = "APOLY_TABLE";

/// Angle-polynomial enumeration, factor table and identity detection.
#[derive(Parser, Debug)]
#[command(name = "apoly", version)]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Write the sorted class representatives, one per line.
    Enumerate {
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Factor every representative and write the factor table.
    BuildTable {
        /// Independent factorizations that must agree.
        #[arg(long, default_value_t = 2)]
        trials: usize,
        /// Sample permutations for degree-6 basis candidates.
        #[arg(long)]
        birthday: bool,
        #[arg(short, long, env = TABLE_ENV, default_value = "factor-table.txt")]
        output: PathBuf,
    },
    /// Check every factorization of a table modulo a prime.
    VerifyTable {
        #[arg(long, default_value_t = 2)]
        rounds: usize,
        #[arg(long, env = TABLE_ENV, default_value = "factor-table.txt")]
        table: PathBuf,
    },
    /// Print the factors of an a-poly.
    Factor {
        #[arg(long, env = TABLE_ENV, default_value = "factor-table.txt")]
        table: PathBuf,
        #[arg(long)]
        apoly: String,
        /// Coordinates file; adds each factor's univariate.
        #[arg(long)]
        assignment: Option<PathBuf>,
    },
    /// Sign of an a-poly at a root, with identity classification.
    Detect {
        #[arg(long, env = TABLE_ENV, default_value = "factor-table.txt")]
        table: PathBuf,
        #[arg(long)]
        apoly: String,
        #[arg(long)]
        assignment: PathBuf,
        /// `<apoly>@<i>`: the i-th largest real root of that a-poly.
        #[arg(long)]
        at: String,
    },
    /// List the event a-polys of a contact pair and their real roots.
    Events {
        /// Contact features in oriented order, e.g. `o0o1o2-r3`.
        #[arg(long, required_unless_present = "event")]
        pair: Option<String>,
        /// Structure-change type instead of a pair: IIa, IIb, III or IV.
        #[arg(long, requires = "features", conflicts_with = "pair")]
        event: Option<String>,
        /// Comma-separated contact elements for `--event`.
        #[arg(long)]
        features: Option<String>,
        /// OFF mesh of O; a second `--mesh` gives R (default: same as O).
        #[arg(long, required = true, num_args = 1)]
        mesh: Vec<PathBuf>,
    },
    /// Time factor-table identity tests against the gcd baseline.
    Bench {
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
        #[arg(long, default_value_t = 2000)]
        reps: usize,
        #[arg(long, env = TABLE_ENV, default_value = "factor-table.txt")]
        table: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Skip the per-test gcd cross-check.
        #[arg(long)]
        no_cross_check: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Factor,
    Gcd,
    Both,
}

enum Failure {
    Usage(String),
    Domain(String),
}

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn domain(e: impl ToString) -> Failure {
    Failure::Domain(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| domain(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| domain(format!("{}: {e}", path.display())))
}

fn load_table(path: &Path) -> Result<FactorTable, Failure> {
    FactorTable::from_text(&read(path)?).map_err(domain)
}

fn parse_apoly(s: &str) -> Result<APoly, Failure> {
    s.parse().map_err(|e| usage(format!("a-poly `{s}`: {e}")))
}

fn roots_of(p: &UPoly) -> Vec<f64> {
    if p.degree().is_none_or(|d| d == 0) {
        return Vec::new();
    }
    let width = BigRational::new(BigInt::one(), BigInt::one() << 60);
    isolate_real_roots(&square_free_part(p))
        .into_iter()
        .map(|mut r| {
            r.refine_to(&width);
            let m = (&r.lo + &r.hi) / BigRational::from_integer(2.into());
            m.to_f64().unwrap_or(f64::NAN)
        })
        .collect()
}

fn format_roots(r: &[f64]) -> String {
    let v: Vec<String> = r.iter().map(|x| format!("{x:.12}")).collect();
    format!("[{}]", v.join(", "))
}

fn run(cli: Cli) -> Result<(), Failure> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(domain)?;
    }
    match cli.cmd {
        Cmd::Enumerate { output } => {
            let e = enumerate_classes();
            let mut text = String::new();
            for a in &e.representatives {
                text.push_str(&a.to_string());
                text.push('\n');
            }
            match output {
                Some(p) => {
                    write(&p, &text)?;
                    eprintln!(
                        "{} representatives from {} raw a-polys",
                        e.representatives.len(),
                        e.raw_count
                    );
                }
                None => print!("{text}"),
            }
        }
        Cmd::BuildTable {
            trials,
            birthday,
            output,
        } => {
            if trials < 2 {
                return Err(usage("--trials must be at least 2"));
            }
            let start = Instant::now();
            let reps = enumerate_classes().representatives;
            let cfg = TableConfig {
                seed: cli.seed,
                trials,
                birthday,
            };
            let built = build(&reps, &cfg).map_err(domain)?;
            write(&output, &built.table.to_text())?;
            let p = built.table.count_profile();
            eprintln!(
                "{} entries, {} basis; constant {} irreducible {} two-factor {} three-factor {}; {:.1} s",
                p.total,
                p.basis,
                p.constant,
                p.irreducible,
                p.two_factor,
                p.three_factor,
                start.elapsed().as_secs_f64()
            );
        }
        Cmd::VerifyTable { rounds, table } => {
            if rounds == 0 {
                return Err(usage("--rounds must be positive"));
            }
            let t = load_table(&table)?;
            let start = Instant::now();
            let records = verify_table(&t, rounds, cli.seed);
            let failed = records.iter().filter(|r| !r.passed).count();
            println!(
                "verified {} factorizations, {} failed, {:.2} s",
                records.len(),
                failed,
                start.elapsed().as_secs_f64()
            );
            check_records(&records).map_err(domain)?;
        }
        Cmd::Factor {
            table,
            apoly,
            assignment,
        } => {
            let a = parse_apoly(&apoly)?;
            let t = load_table(&table)?;
            match assignment {
                None => {
                    for (f, m) in factor_apolys(&a, &t).map_err(domain)? {
                        println!("{f}^{m}");
                    }
                }
                Some(p) => {
                    let va = VertexAssignment::parse(&read(&p)?).map_err(usage)?;
                    for f in factor_apoly(&a, &va, &t).map_err(domain)? {
                        println!("{}^{}  {}", f.apoly, f.multiplicity, f.poly);
                    }
                }
            }
        }
        Cmd::Detect {
            table,
            apoly,
            assignment,
            at,
        } => {
            let a = parse_apoly(&apoly)?;
            let (root_apoly, index) = at
                .rsplit_once('@')
                .ok_or_else(|| usage(format!("root `{at}` is not <apoly>@<i>")))?;
            let root_apoly = parse_apoly(root_apoly)?;
            let index: usize = index
                .trim()
                .parse()
                .map_err(|_| usage(format!("bad root index in `{at}`")))?;
            let va = VertexAssignment::parse(&read(&assignment)?).map_err(usage)?;
            let t = load_table(&table)?;
            let mut reg = RootRegistry::new();
            for f in factor_apoly(&root_apoly, &va, &t).map_err(domain)? {
                for tau in AlgebraicNumber::all_roots(&f) {
                    reg.insert(tau);
                }
            }
            if index == 0 || index > reg.len() {
                return Err(domain(format!(
                    "{root_apoly} has {} distinct real roots, asked for root {index}",
                    reg.len()
                )));
            }
            let tau = reg.get(reg.len() - index).expect("index checked").clone();
            let (sign, class) = predicate_sign(&a, &va, &tau, &t).map_err(domain)?;
            let class = match class {
                ZeroClass::Identity(k) => format!("identity k={k}"),
                ZeroClass::Evaluated => "evaluated".into(),
            };
            println!(
                "root {} ≈ {:.12} of factor {}\nsign {:?} ({class})",
                index,
                tau.approx(),
                tau.factor.apoly,
                sign
            );
        }
        Cmd::Events {
            pair,
            event,
            features,
            mesh,
        } => {
            if mesh.len() > 2 {
                return Err(usage("at most two --mesh files"));
            }
            let o_mesh = Mesh::parse_off(&read(&mesh[0])?).map_err(domain)?;
            let r_mesh = match mesh.get(1) {
                Some(p) => Mesh::parse_off(&read(p)?).map_err(domain)?,
                None => o_mesh.clone(),
            };
            if let Some(pair) = pair {
                let (o, r) = parse_features(&pair).map_err(usage)?;
                let (pair, incident) =
                    pair_from_meshes(&o_mesh, &r_mesh, &o, &r).map_err(domain)?;
                let conds = facet_interval_apolys(&pair, &incident).map_err(domain)?;
                println!("contact {pair}");
                for (i, c) in conds.iter().enumerate() {
                    print_condition(i, c);
                }
            } else {
                let ty: EventType = event
                    .as_deref()
                    .unwrap_or_default()
                    .parse()
                    .map_err(usage)?;
                let els = features
                    .as_deref()
                    .unwrap_or_default()
                    .split(',')
                    .map(|s| s.trim().parse())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(usage)?;
                let a = structure_change_apoly(ty, &els).map_err(usage)?;
                let pair_va = mesh_assignment(&o_mesh, &r_mesh);
                let u = signed_univariate(&a, &pair_va).map_err(domain)?;
                println!(
                    "{ty} {a}\n  univariate {}\n  roots {}",
                    normalize(&u),
                    format_roots(&roots_of(&u))
                );
            }
        }
        Cmd::Bench {
            method,
            reps,
            table,
            report,
            no_cross_check,
        } => {
            let t = load_table(&table)?;
            let cfg = BenchConfig {
                reps,
                seed: cli.seed,
                method: match method {
                    MethodArg::Factor => Method::Factor,
                    MethodArg::Gcd => Method::Gcd,
                    MethodArg::Both => Method::Both,
                },
                cross_check: !no_cross_check,
            };
            let r = run_bench(&cfg, &t).map_err(domain)?;
            let json = r.to_json();
            match report {
                Some(p) => write(&p, &json)?,
                None => println!("{json}"),
            }
            if r.mismatches > 0 {
                return Err(domain(format!("{} identity/gcd mismatches", r.mismatches)));
            }
        }
    }
    Ok(())
}

fn print_condition(i: usize, c: &IntervalCondition) {
    let req = match c.required {
        Required::Positive => "positive".to_string(),
        Required::Nonzero => "nonzero".to_string(),
        Required::SameAs(j) => format!("same sign as #{j}"),
        Required::OppositeOf(j) => format!("opposite sign to #{j}"),
    };
    let u = c.condition.oriented.strip_one_plus_t2().0;
    let ints = rational_to_int(&u);
    println!(
        "#{i} {}  required {req}\n  oriented {}\n  roots {}",
        c.condition.apoly,
        u,
        format_roots(&roots_of(&ints))
    );
}

fn rational_to_int(p: &RatPoly) -> UPoly {
    let den = p
        .coeffs()
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    UPoly::new(
        p.coeffs()
            .iter()
            .map(|c| (c * BigRational::from_integer(den.clone())).to_integer())
            .collect(),
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("usage error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
