use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_traits::One;

use idemring::arith::{pow_mod, FactoredModulus};
use idemring::error::Error;
use idemring::identity::{verify_identity, IdentityId, IdentityParams};
use idemring::idempotent::enumerate_idempotents;
use idemring::index_set::IndexSet;
use idemring::lattice::{
    consistent_lattice, consistent_lattice_dot, consistent_lattice_json, idempotent_lattice_dot,
    lattice_elements, verify_general_identity, GenIdentityId, LabelStyle,
};
use idemring::modexp::{bench_compare, BenchVariant, ExpContext, Strategy, TotientKind};
use idemring::powergraph::{
    component_of, export_power_graph, orbit, DEFAULT_ENUMERATION_CAP, DEFAULT_GRAPH_CAP,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Auto,
    Unit,
    Cycle,
    General,
    Baseline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    #[value(name = "sum-mod-m")]
    SumModM,
    #[value(name = "reduce-then-crt")]
    ReduceThenCrt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LabelArg {
    G,
    D,
}

/// Idempotents of Z/mZ: enumeration, additive identities, lattices,
/// power-graph structure, and idempotent-CRT modular exponentiation.
///
/// The modulus argument accepts a decimal integer (factored by trial
/// division) or a pre-factored form like `2^3*3*5`.
#[derive(Parser)]
#[command(name = "idemring", version, max_term_width = 100)]
struct Cli {
    /// Output format (dot applies to lattice/graph commands)
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate all 2^r idempotents of Z/mZ
    Idempotents { m: String },
    /// Verify one additive identity from the catalog
    Identity {
        m: String,
        /// Identity name, e.g. TOP_LEVEL_SUM or LEVEL_SUM
        id: String,
        /// Index set I as comma-separated 1-based indices, e.g. 1,2
        #[arg(long, value_name = "SET")]
        i: Option<String>,
        /// Index set J
        #[arg(long, value_name = "SET")]
        j: Option<String>,
        /// Disjoint index sets, semicolon-separated: 1,2;3
        #[arg(long, value_name = "SETS")]
        parts: Option<String>,
        /// Level k
        #[arg(long)]
        k: Option<usize>,
        /// Depth n
        #[arg(long)]
        n: Option<usize>,
    },
    /// Print the idempotent lattice (text, json, or DOT Hasse diagram)
    Lattice {
        m: String,
        /// Node labels: g (divisor) or d (idempotent value)
        #[arg(long, value_enum, default_value = "g")]
        labels: LabelArg,
    },
    /// A consistent sublattice L_{m,S,T}; optionally verify a GEN_* identity
    Sublattice {
        m: String,
        /// Index set S (comma-separated 1-based indices)
        #[arg(long, value_name = "SET")]
        s: String,
        /// Index set T, a subset of S (empty if omitted)
        #[arg(long, value_name = "SET")]
        t: Option<String>,
        /// Generalized identity name, e.g. GEN_LEVEL_SUM
        #[arg(long, value_name = "ID")]
        identity: Option<String>,
        #[arg(long, value_name = "SET")]
        i: Option<String>,
        #[arg(long, value_name = "SET")]
        j: Option<String>,
        #[arg(long, value_name = "SETS")]
        parts: Option<String>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        /// Node labels for --format dot
        #[arg(long, value_enum, default_value = "g")]
        labels: LabelArg,
    },
    /// Describe the power-graph component containing b
    Component { m: String, b: String },
    /// Tail and cycle of the sequence a, a^2, a^3, ...
    Orbit { m: String, a: String },
    /// Export the whole sequential power graph
    Graph { m: String },
    /// Compute b^e mod m via the idempotent-CRT decomposition
    Modexp {
        m: String,
        b: String,
        e: String,
        #[arg(long, value_enum, default_value = "auto")]
        strategy: StrategyArg,
        /// Reduce exponents by the Carmichael totient instead of Euler's
        #[arg(long)]
        carmichael: bool,
    },
    /// Time the dispatcher against plain square-and-multiply
    Bench {
        m: String,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Bit length of the random exponents
        #[arg(long, default_value_t = 128)]
        bits: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        carmichael: bool,
        #[arg(long, value_enum, default_value = "sum-mod-m")]
        variant: VariantArg,
    },
    /// Run the invariant suite over a modulus range, e.g. 2..500
    Selftest { range: String },
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {}", e);
            std::process::exit(2);
        }
    }
}

fn parse_set(text: &str) -> Result<IndexSet, Error> {
    let trimmed = text.trim();
    if trimmed.is_empty() || trimmed == "-" {
        return Ok(IndexSet::EMPTY);
    }
    let indices: Result<Vec<usize>, _> = trimmed
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad index `{}`", part)))
        })
        .collect();
    IndexSet::from_indices(indices?)
}

fn parse_big(text: &str) -> Result<BigUint, Error> {
    text.trim()
        .parse::<BigUint>()
        .map_err(|_| Error::Parse(format!("bad integer `{}`", text)))
}

fn parse_params(
    i: Option<&str>,
    j: Option<&str>,
    parts: Option<&str>,
    k: Option<usize>,
    n: Option<usize>,
) -> Result<IdentityParams, Error> {
    let mut params = IdentityParams::default();
    if let Some(text) = i {
        params.set_i = Some(parse_set(text)?);
    }
    if let Some(text) = j {
        params.set_j = Some(parse_set(text)?);
    }
    if let Some(text) = parts {
        let sets: Result<Vec<IndexSet>, _> = text.split(';').map(parse_set).collect();
        params.parts = Some(sets?);
    }
    params.k = k;
    params.n = n;
    Ok(params)
}

fn env_cap(name: &str, default: u64) -> u64 {
    std::env::var(name)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(default)
}

fn print_report(report: &idemring::identity::IdentityReport, format: Format) -> i32 {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(report).unwrap()),
        _ => {
            println!(
                "{} (mod {}): lhs = {}, rhs = {}, holds = {}",
                report.identity_id,
                report.modulus.m(),
                report.lhs,
                report.rhs,
                report.holds
            );
        }
    }
    if report.holds {
        0
    } else {
        1
    }
}

fn run(cli: Cli) -> Result<i32, Error> {
    let format = cli.format;
    match cli.command {
        Command::Idempotents { m } => {
            let modulus = FactoredModulus::parse(&m)?;
            let idems = enumerate_idempotents(&modulus)?;
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&idems).unwrap()),
                _ => {
                    println!("m = {} = {}", modulus.m(), modulus.to_factored_string());
                    for d in &idems {
                        println!(
                            "I = {:10}  d = {:>8}  g = {:>8}  a = {}",
                            d.set().to_string(),
                            d.value().to_string(),
                            d.g().to_string(),
                            d.cofactor()
                        );
                    }
                }
            }
            Ok(0)
        }
        Command::Identity { m, id, i, j, parts, k, n } => {
            let modulus = FactoredModulus::parse(&m)?;
            let id: IdentityId = id.parse()?;
            let params = parse_params(i.as_deref(), j.as_deref(), parts.as_deref(), k, n)?;
            let report = verify_identity(&modulus, id, &params)?;
            Ok(print_report(&report, format))
        }
        Command::Lattice { m, labels } => {
            let modulus = FactoredModulus::parse(&m)?;
            let style = match labels {
                LabelArg::G => LabelStyle::G,
                LabelArg::D => LabelStyle::D,
            };
            match format {
                Format::Dot => print!("{}", idempotent_lattice_dot(&modulus, style)?),
                Format::Json => {
                    let idems = enumerate_idempotents(&modulus)?;
                    println!("{}", serde_json::to_string_pretty(&idems).unwrap());
                }
                Format::Text => {
                    let idems = enumerate_idempotents(&modulus)?;
                    for level in 0..=modulus.r() {
                        let row: Vec<String> = idems
                            .iter()
                            .filter(|d| d.set().len() == level)
                            .map(|d| format!("{} (g={})", d.value(), d.g()))
                            .collect();
                        println!("level {}: {}", level, row.join(", "));
                    }
                }
            }
            Ok(0)
        }
        Command::Sublattice { m, s, t, identity, i, j, parts, k, n, labels } => {
            let modulus = FactoredModulus::parse(&m)?;
            let set_s = parse_set(&s)?;
            let set_t = t.as_deref().map(parse_set).transpose()?.unwrap_or(IndexSet::EMPTY);
            let lattice = consistent_lattice(&modulus, set_s, set_t)?;
            if let Some(id) = identity {
                let id: GenIdentityId = id.parse()?;
                let params = parse_params(i.as_deref(), j.as_deref(), parts.as_deref(), k, n)?;
                let report = verify_general_identity(&lattice, id, &params)?;
                return Ok(print_report(&report, format));
            }
            match format {
                Format::Dot => {
                    let style = match labels {
                        LabelArg::G => LabelStyle::G,
                        LabelArg::D => LabelStyle::D,
                    };
                    print!("{}", consistent_lattice_dot(&lattice, style)?);
                }
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&consistent_lattice_json(&lattice)?).unwrap()
                ),
                Format::Text => {
                    println!(
                        "L(m={}, S={}, T={}): g_S = {}, g_T = {}",
                        modulus.m(),
                        lattice.set_s(),
                        lattice.set_t(),
                        lattice.g_s(),
                        lattice.g_t()
                    );
                    for (set, value) in lattice_elements(&lattice)? {
                        println!("I = {:10}  g = {}", set.to_string(), value);
                    }
                }
            }
            Ok(0)
        }
        Command::Component { m, b } => {
            let modulus = FactoredModulus::parse(&m)?;
            let b = parse_big(&b)? % modulus.m();
            let cap = env_cap("IDEMRING_ENUM_CAP", DEFAULT_ENUMERATION_CAP);
            let mut descriptor = component_of(&modulus, &b)?;
            if modulus.m().bits() <= 63 {
                if let Ok(with_size) = descriptor.clone().with_size(&modulus, cap) {
                    descriptor = with_size;
                }
            }
            match format {
                Format::Json => {
                    println!("{}", serde_json::to_string_pretty(&descriptor).unwrap())
                }
                _ => {
                    println!(
                        "b = {} lies in C_I with I = {}, multiplier = {}, g = {}, idempotent = {}{}",
                        b,
                        descriptor.set,
                        descriptor.multiplier,
                        descriptor.g,
                        descriptor.idempotent.value(),
                        match descriptor.size {
                            Some(size) => format!(", size = {}", size),
                            None => String::new(),
                        }
                    );
                }
            }
            Ok(0)
        }
        Command::Orbit { m, a } => {
            let modulus = FactoredModulus::parse(&m)?;
            let a = parse_big(&a)? % modulus.m();
            let orbit = orbit(&modulus, &a);
            match format {
                Format::Json => {
                    let tail: Vec<String> = orbit.tail.iter().map(|x| x.to_string()).collect();
                    let cycle: Vec<String> = orbit.cycle.iter().map(|x| x.to_string()).collect();
                    let value = serde_json::json!({
                        "base": orbit.base.to_string(),
                        "tail": tail,
                        "cycle": cycle,
                        "idempotent": orbit.idempotent_value(modulus.m()).to_string(),
                    });
                    println!("{}", serde_json::to_string_pretty(&value).unwrap());
                }
                _ => {
                    let fmt = |xs: &[BigUint]| {
                        xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
                    };
                    println!("a = {} (mod {})", orbit.base, modulus.m());
                    println!("tail  ({}): [{}]", orbit.tail_length(), fmt(&orbit.tail));
                    println!("cycle ({}): [{}]", orbit.cycle_length(), fmt(&orbit.cycle));
                    println!("idempotent: {}", orbit.idempotent_value(modulus.m()));
                }
            }
            Ok(0)
        }
        Command::Graph { m } => {
            let modulus = FactoredModulus::parse(&m)?;
            let cap = env_cap("IDEMRING_GRAPH_CAP", DEFAULT_GRAPH_CAP);
            let graph = export_power_graph(&modulus, cap)?;
            match format {
                Format::Dot => print!("{}", graph.to_dot()),
                Format::Json => {
                    println!("{}", serde_json::to_string_pretty(&graph.to_json()).unwrap())
                }
                Format::Text => {
                    println!(
                        "m = {}: {} nodes, {} edges, {} components",
                        graph.m(),
                        graph.m(),
                        graph.edges().len(),
                        graph.component_count()
                    );
                    for (set, nodes) in graph.components() {
                        println!("C_{} ({} nodes)", set, nodes.len());
                    }
                }
            }
            Ok(0)
        }
        Command::Modexp { m, b, e, strategy, carmichael } => {
            let modulus = FactoredModulus::parse(&m)?;
            let b = parse_big(&b)?;
            let e = parse_big(&e)?;
            let kind = if carmichael {
                TotientKind::Carmichael
            } else {
                TotientKind::Euler
            };
            let ctx = ExpContext::new(&modulus)?;
            let (value, plan) = match strategy {
                StrategyArg::Auto => {
                    let (value, plan) = ctx.auto(&b, &e, kind);
                    (value, Some(plan))
                }
                StrategyArg::Unit => (ctx.unit(&b, &e, kind)?, None),
                StrategyArg::Cycle => (ctx.cycle(&b, &e, kind)?, None),
                StrategyArg::General => (ctx.general(&b, &e, kind)?, None),
                StrategyArg::Baseline => (pow_mod(&b, &e, modulus.m())?, None),
            };
            let strategy_name = match (&plan, strategy) {
                (Some(p), _) => p.strategy.as_str(),
                (None, StrategyArg::Unit) => Strategy::Unit.as_str(),
                (None, StrategyArg::Cycle) => Strategy::Cycle.as_str(),
                (None, StrategyArg::General) => Strategy::General.as_str(),
                _ => "BASELINE",
            };
            match format {
                Format::Json => {
                    let mut value = serde_json::json!({
                        "m": modulus.m().to_string(),
                        "b": (&b % modulus.m()).to_string(),
                        "e": e.to_string(),
                        "value": value.to_string(),
                        "strategy": strategy_name,
                        "totient_kind": kind.as_str(),
                    });
                    if let Some(plan) = &plan {
                        value["plan"] = serde_json::to_value(plan).unwrap();
                    }
                    println!("{}", serde_json::to_string_pretty(&value).unwrap());
                }
                _ => println!(
                    "{}^{} = {} (mod {})  [{}]",
                    &b % modulus.m(),
                    e,
                    value,
                    modulus.m(),
                    strategy_name
                ),
            }
            Ok(0)
        }
        Command::Bench { m, samples, bits, seed, carmichael, variant } => {
            let modulus = FactoredModulus::parse(&m)?;
            let kind = if carmichael {
                TotientKind::Carmichael
            } else {
                TotientKind::Euler
            };
            let variant = match variant {
                VariantArg::SumModM => BenchVariant::SumModM,
                VariantArg::ReduceThenCrt => BenchVariant::ReduceThenCrt,
            };
            let report = bench_compare(&modulus, samples, bits, seed, kind, variant)?;
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
                _ => {
                    println!(
                        "m = {}, samples = {}, exponent bits = {}, seed = {}, {} / {}",
                        report.modulus,
                        report.sample_count,
                        report.exponent_bits,
                        report.seed,
                        kind.as_str(),
                        variant.as_str()
                    );
                    for (name, count) in &report.strategy_histogram {
                        let q = &report.idempotent_crt_ns[name];
                        println!(
                            "{:>9}: {:>6} samples, median {} ns, p95 {} ns",
                            name, count, q.median_ns, q.p95_ns
                        );
                    }
                    println!(
                        " baseline: median {} ns, p95 {} ns",
                        report.baseline_ns.median_ns, report.baseline_ns.p95_ns
                    );
                    println!("mismatches: {}", report.mismatches);
                }
            }
            Ok(if report.mismatches == 0 { 0 } else { 1 })
        }
        Command::Selftest { range } => {
            let (lo, hi) = parse_range(&range)?;
            let mut checked = 0u64;
            for m in lo..=hi {
                if let Err(e) = selftest_one(m) {
                    eprintln!("selftest failed at m = {}: {}", m, e);
                    return Ok(1);
                }
                checked += 1;
            }
            println!("selftest passed for {} moduli in [{}, {}]", checked, lo, hi);
            Ok(0)
        }
    }
}

fn parse_range(text: &str) -> Result<(u64, u64), Error> {
    let text = text.trim();
    let parts: Vec<&str> = if text.contains("..") {
        text.splitn(2, "..").collect()
    } else if text.contains('-') {
        text.splitn(2, '-').collect()
    } else {
        vec![text, text]
    };
    let lo: u64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad range `{}`", text)))?;
    let hi: u64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad range `{}`", text)))?;
    if lo < 2 || hi < lo {
        return Err(Error::Parse(format!("bad range `{}`", text)));
    }
    Ok((lo, hi))
}

/// The invariant suite for one modulus: idempotent enumeration against the
/// x^2 = x scan, the identity catalog, lattice closure, orbit shape, and
/// dispatcher agreement with square-and-multiply.
fn selftest_one(m: u64) -> Result<(), String> {
    let big = BigUint::from(m);
    let modulus = FactoredModulus::parse(&m.to_string()).map_err(|e| e.to_string())?;
    let r = modulus.r();

    // enumeration matches the definition
    let idems = enumerate_idempotents(&modulus).map_err(|e| e.to_string())?;
    if idems.len() != 1 << r {
        return Err(format!("expected {} idempotents, got {}", 1 << r, idems.len()));
    }
    let mut values: Vec<u64> = Vec::new();
    for d in &idems {
        let v = d.value();
        if (v * v) % &big != *v {
            return Err(format!("{} is not idempotent", v));
        }
        values.push(v.try_into().unwrap());
    }
    values.sort_unstable();
    let scan: Vec<u64> = (0..m).filter(|x| x * x % m == *x).collect();
    if values != scan {
        return Err("enumeration disagrees with the x^2 = x scan".into());
    }

    // catalog identities with exhaustive small parameters
    for i_bits in 0..(1u64 << r) {
        let i = IndexSet::from_bits(i_bits);
        for (id, params) in [
            (IdentityId::ComplementSum, IdentityParams::with_i(i)),
            (IdentityId::PrimitiveSum, IdentityParams::with_j(i)),
        ] {
            let report = verify_identity(&modulus, id, &params).map_err(|e| e.to_string())?;
            if !report.holds {
                return Err(format!("{} failed for I = {}", report.identity_id, i));
            }
        }
    }
    for k in 0..r {
        let report = verify_identity(&modulus, IdentityId::LevelSum, &IdentityParams::with_k(k))
            .map_err(|e| e.to_string())?;
        if !report.holds {
            return Err(format!("LEVEL_SUM failed for k = {}", k));
        }
    }
    for (id, params) in [
        (IdentityId::TopLevelSum, IdentityParams::default()),
        (IdentityId::AllIdempotentSum, IdentityParams::default()),
        (IdentityId::SublatticeSum, IdentityParams::with_i(IndexSet::full(r))),
    ] {
        let report = verify_identity(&modulus, id, &params).map_err(|e| e.to_string())?;
        if !report.holds {
            return Err(format!("{} failed", report.identity_id));
        }
    }

    // orbits: exactly one idempotent, sitting in the cycle
    let ctx = ExpContext::new(&modulus).map_err(|e| e.to_string())?;
    for a in 0..m.min(64) {
        let a = BigUint::from(a);
        let orb = orbit(&modulus, &a);
        let idem = orb.idempotent_value(&big);
        if (&idem * &idem) % &big != idem || !orb.cycle.contains(&idem) {
            return Err(format!("orbit of {} has a malformed cycle", a));
        }
        // dispatcher agrees with iterated multiplication along the orbit
        let mut cur = BigUint::one() % &big;
        for e in 0..12u32 {
            if e > 0 {
                cur = cur * &a % &big;
            }
            for kind in [TotientKind::Euler, TotientKind::Carmichael] {
                let (value, _) = ctx.auto(&a, &BigUint::from(e), kind);
                if value != cur {
                    return Err(format!("modexp mismatch at a = {}, e = {}", a, e));
                }
            }
        }
    }
    Ok(())
}
