use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Context;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::json;
use sldgm::decoder::bound_as_u128;
use sldgm::gf2::{check_nested, NestingCheck};
use sldgm::oracle::lattice_min_dist_sq;
use sldgm::peg::{girth, systematic_ldgm_from_graph};
use sldgm::sim::{format_table, records_to_csv, run_campaign, SimConfig};
use sldgm::{
    construction_d, peg_construct, BinaryCode, ConstructionDLattice, DecoderConfig, Error, LatticeFile,
    MultistageDecoder, NestedCodeFamily,
};

use crate::input::{parse_snr_list, read_generator, read_graph, read_text, read_vector};
use crate::manifest::{FileDigest, RunManifest};
use crate::{
    usage, BuildArgs, CmdResult, DecodeArgs, Failure, LatticeArgs, PegArgs, RerunArgs, SimulateArgs,
};

/// Largest dimension for which dense rational inverses are printed or checked.
const DENSE_INVERSE_LIMIT: usize = 64;

fn clock_seed() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0)
}

fn write_file(path: &Path, contents: &str) -> CmdResult {
    fs::write(path, contents)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(Failure::Runtime)
}

fn to_value<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("configs serialize")
}

pub fn load_lattice(path: &Path) -> CmdResult<ConstructionDLattice> {
    let text = read_text(path)?;
    let file = LatticeFile::from_json(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    file.to_lattice()
        .map_err(|e| usage(format!("{}: {e}", path.display())))
}

pub fn peg(args: &PegArgs) -> CmdResult {
    let mut args = args.clone();
    args.seed.get_or_insert_with(clock_seed);
    run_peg(&args)
}

fn run_peg(args: &PegArgs) -> CmdResult {
    let seed = args.seed.expect("seed resolved");
    let degrees = vec![args.degree; args.symbols];
    let graph = peg_construct(args.symbols, args.checks, &degrees, seed)?;
    write_file(&args.out, &graph.to_matrix().to_alist())?;

    let mut config = args.clone();
    config.out = PathBuf::new();
    let mut manifest = RunManifest::new("peg", to_value(&config), vec![seed], vec![]);
    manifest.add_output(&args.out)?;
    manifest.write_next_to(&args.out)?;

    println!("symbols: {}  checks: {}  edges: {}", graph.symbol_count(), graph.check_count(), graph.edge_count());
    println!("max check degree: {}", graph.max_check_degree());
    println!("seed: {seed}");
    match girth(&graph) {
        Some(g) => println!("girth: {g}"),
        None => println!("girth: infinite"),
    }
    println!("wrote {}", args.out.display());
    Ok(())
}

fn with_known_distance(code: BinaryCode) -> BinaryCode {
    match code.min_distance() {
        Ok(d) => code.with_min_distance(d),
        Err(_) => code,
    }
}

pub fn build(args: &BuildArgs) -> CmdResult {
    let mut inputs = Vec::new();
    let base = match &args.ldgm {
        Some(path) => {
            inputs.push(FileDigest::of(path).map_err(Failure::Usage)?);
            systematic_ldgm_from_graph(&read_graph(path)?)
        }
        None => {
            inputs.push(FileDigest::of(&args.codes[0]).map_err(Failure::Usage)?);
            read_generator(&args.codes[0])?
        }
    };
    let mut codes = vec![base.clone()];
    if let Some(path) = args.codes.get(1) {
        inputs.push(FileDigest::of(path).map_err(Failure::Usage)?);
        codes.push(read_generator(path)?);
    }
    for &k in &args.prefix {
        codes.push(base.prefix(k)?);
    }
    let family = NestedCodeFamily::new(args.alpha, codes)?;
    if let NestingCheck::Violated { level, reason } = check_nested(&family) {
        return Err(usage(format!("codes are not nested at level {level}: {reason}")));
    }
    let family = NestedCodeFamily::new(
        args.alpha,
        family.codes().iter().cloned().map(with_known_distance).collect(),
    )?;
    let lat = construction_d(&family)?;
    let det = lat.determinant()?;

    let mut config = args.clone();
    config.out = PathBuf::new();
    let mut manifest = RunManifest::new("build", to_value(&config), vec![], inputs.clone());
    let mut sources: Vec<String> = inputs.iter().map(|i| i.path.display().to_string()).collect();
    sources.push(format!("run {}", manifest.digest));
    let file = LatticeFile::from_lattice(&lat, sources);
    write_file(&args.out, &(file.to_json()? + "\n"))?;
    manifest.add_output(&args.out)?;
    manifest.write_next_to(&args.out)?;

    println!("n: {}", lat.dimension());
    println!("levels: {}  k: {:?}  alpha: {}", lat.levels(), lat.code_dimensions(), lat.alpha());
    println!("det: {}", format_det(&det));
    println!("det^(2/n): {}", lat.normalized_volume());
    print_bounds(&lat);
    println!("wrote {}", args.out.display());
    Ok(())
}

fn format_det(det: &BigRational) -> String {
    let bits = det.numer().bits() + det.denom().bits();
    if bits > 64 {
        let e = det.numer().bits() as i64 - det.denom().bits() as i64;
        format!("2^{e}")
    } else {
        det.to_string()
    }
}

fn print_bounds(lat: &ConstructionDLattice) {
    let n = lat.dimension() as f64;
    let nominal = 4f64.powf(lat.total_code_dimension() as f64 / n) / lat.alpha() as f64;
    println!("nominal coding gain alpha^-1 * 4^(sum k / n): {nominal}");
    match lat.coding_gain_bounds() {
        Ok(b) => {
            let d: Vec<String> = lat
                .family()
                .codes()
                .iter()
                .map(|c| match c.cached_min_distance() {
                    Some(usize::MAX) => "inf".into(),
                    Some(d) => d.to_string(),
                    None => "?".into(),
                })
                .collect();
            println!("code minimum distances: [{}]", d.join(", "));
            println!("d2_min lower bound: {}", b.min_dist_sq_bound);
            println!("coding gain lower bound: {}", b.coding_gain_bound);
            println!("distance conditions d_l >= 4^l/alpha: {}", b.distance_conditions_hold);
            println!("equality conditions d_l >= 4^l: {}", b.equality_conditions_hold);
        }
        Err(e) => println!("distance bounds unavailable: {e}"),
    }
}

pub fn info(args: &LatticeArgs) -> CmdResult {
    let lat = load_lattice(&args.lattice)?;
    let n = lat.dimension();
    println!("n: {n}  levels: {}  k: {:?}  alpha: {}", lat.levels(), lat.code_dimensions(), lat.alpha());
    println!("det: {}", format_det(&lat.determinant()?));
    println!();
    println!("{:>5} {:>5} {:>6} {:>8} {:>10} {:>5}  labels", "j", "s_j", "level", "cross", "projection", "g_j");
    for j in 0..n {
        let c = lat.cross_section(j)?;
        let labels: Vec<String> = lat
            .label_group_elements(j)?
            .iter()
            .map(|e| e.representative.to_string())
            .collect();
        println!(
            "{:>5} {:>5} {:>6} {:>8} {:>10} {:>5}  {{{}}}",
            j + 1,
            c.first_row + 1,
            c.level.map_or("-".into(), |l| l.to_string()),
            c.cross_section.to_string(),
            c.projection.to_string(),
            c.label_group_order,
            labels.join(", ")
        );
    }
    println!();
    if n <= DENSE_INVERSE_LIMIT {
        println!("dual basis (B^-T):");
        for row in lat.dual_generator()? {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            println!("  {}", cells.join(" "));
        }
    } else {
        println!("dual basis not printed for n > {DENSE_INVERSE_LIMIT}");
    }
    Ok(())
}

pub fn verify(args: &LatticeArgs) -> CmdResult {
    let lat = load_lattice(&args.lattice)?;
    let n = lat.dimension();
    let mut failures = Vec::new();
    let mut check = |name: &str, ok: bool, detail: String| {
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failures.push(name.to_string());
        }
    };

    let formula = lat.determinant_formula();
    let direct = lat.determinant_from_basis();
    check(
        "determinant",
        formula == direct,
        format!("2^(n - sum k) = {}, |det B| = {}", format_det(&formula), format_det(&direct)),
    );

    if n <= DENSE_INVERSE_LIMIT {
        let ok = lat.inverse_basis().is_ok();
        check("inverse", ok, "B * B^-1 = I".into());
    } else {
        println!("SKIP inverse: n = {n} exceeds {DENSE_INVERSE_LIMIT}");
    }

    match lattice_min_dist_sq(&lat) {
        Ok(d2) => {
            let bounds = lat.coding_gain_bounds()?;
            check(
                "distance bound",
                d2 >= bounds.min_dist_sq_bound,
                format!("d2_min = {d2} >= {}", bounds.min_dist_sq_bound),
            );
            if bounds.distance_conditions_hold {
                let floor = BigRational::new(4.into(), lat.alpha().into());
                check("construction distance", d2 >= floor, format!("d2_min = {d2} >= {floor}"));
            }
            let gain = lat.coding_gain_exact(&d2)?;
            check(
                "coding gain bound",
                d2 >= bounds.min_dist_sq_bound,
                format!("gain = {gain} >= {}", bounds.coding_gain_bound),
            );
            if bounds.equality_conditions_hold && lat.alpha() == 1 {
                let four = BigRational::from_integer(4.into());
                check(
                    "coding gain equality",
                    d2 == four,
                    format!("gain = {gain}, 4^(sum k / n) = {}", bounds.nominal_gain),
                );
            }
        }
        Err(Error::BudgetExceeded { bits, limit, .. }) => {
            println!("SKIP oracle checks: sum k = {bits} exceeds the enumeration limit {limit}");
        }
        Err(e) => return Err(e.into()),
    }

    if failures.is_empty() {
        println!("all checks passed");
        Ok(())
    } else {
        Err(Failure::Verification(failures.join(", ")))
    }
}

pub fn decode(args: &DecodeArgs) -> CmdResult {
    let lat = load_lattice(&args.lattice)?;
    let y = read_vector(&args.input)?;
    if y.len() != lat.dimension() {
        return Err(usage(format!(
            "received vector has {} entries, lattice dimension is {}",
            y.len(),
            lat.dimension()
        )));
    }
    let config = DecoderConfig {
        max_iterations: args.decoder.max_iter,
        early_stop: !args.decoder.no_early_stop,
        clip: args.decoder.clip,
        scaling: args.decoder.scale,
    };
    let decoder = MultistageDecoder::new(&lat, config)?;
    let out = decoder.decode(&y);
    let point: Vec<String> = out.point.to_rational().iter().map(|x| x.to_string()).collect();
    let dist: f64 = out
        .point
        .to_f64()
        .iter()
        .zip(&y)
        .map(|(p, v)| (p - v) * (p - v))
        .sum();
    println!("point: {}", point.join(" "));
    println!("squared distance: {dist}");
    println!("iterations per level: {:?}", out.iterations);
    println!("converged per level: {:?}", out.converged);
    let bound = decoder.per_iteration_bound();
    println!(
        "operations: {} (max per iteration {}, bound {})",
        out.operations,
        out.max_operations_per_iteration,
        bound_as_u128(&bound).map_or(bound.to_string(), |b| b.to_string())
    );
    Ok(())
}

pub fn simulate(args: &SimulateArgs) -> CmdResult {
    let mut cfg = match &args.config {
        Some(path) => serde_json::from_str::<SimConfig>(&read_text(path)?)
            .map_err(|e| usage(format!("{}: {e}", path.display())))?,
        None => SimConfig {
            lattice: None,
            snr_db: Vec::new(),
            trials: 0,
            target_errors: None,
            seed: 0,
            decoder: DecoderConfig::default(),
            workers: 0,
        },
    };
    if let Some(l) = &args.lattice {
        cfg.lattice = Some(l.clone());
    }
    if let Some(s) = &args.snr {
        cfg.snr_db = parse_snr_list(s).map_err(usage)?;
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if args.target_errors.is_some() {
        cfg.target_errors = args.target_errors;
    }
    match args.seed {
        Some(s) => cfg.seed = s,
        None if args.config.is_none() => cfg.seed = clock_seed(),
        None => {}
    }
    if let Some(m) = args.max_iter {
        cfg.decoder.max_iterations = m;
    }
    if let Some(s) = args.scale {
        cfg.decoder.scaling = s;
    }
    if let Some(c) = args.clip {
        cfg.decoder.clip = c;
    }
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    run_simulation(cfg, &args.out, args.table.as_deref())
}

fn run_simulation(cfg: SimConfig, out: &Path, table: Option<&Path>) -> CmdResult {
    let lattice_path = cfg.lattice.clone().ok_or_else(|| usage("no lattice file given (--lattice)"))?;
    cfg.validate()?;
    let lat = load_lattice(&lattice_path)?;
    let input = FileDigest::of(&lattice_path).map_err(Failure::Usage)?;

    let workers = cfg.workers;
    let digested = SimConfig { workers: 0, ..cfg.clone() };
    let mut manifest = RunManifest::new("simulate", to_value(&digested), vec![cfg.seed], vec![input]);

    let records = run_campaign(&lat, &cfg)?;
    write_file(out, &records_to_csv(&records, &manifest.digest))?;
    let title = format!(
        "n = {}, levels = {}, k = {:?}, seed = {}, trials <= {}",
        lat.dimension(),
        lat.levels(),
        lat.code_dimensions(),
        cfg.seed,
        cfg.trials
    );
    let text = format_table(&records, &title);
    print!("{text}");
    manifest.add_output(out)?;
    if let Some(path) = table {
        write_file(path, &text)?;
        manifest.add_output(path)?;
    }
    manifest.notes = json!({
        "workers": workers,
        "wall_clock_secs": records.iter().map(|r| r.wall_clock_secs).collect::<Vec<_>>(),
    });
    manifest.write_next_to(out)?;
    let total: f64 = records.iter().map(|r| r.wall_clock_secs).sum();
    if !total.is_zero() {
        println!("wall clock: {total:.2} s");
    }
    if let Some(worst) = records.iter().map(|r| r.max_ops_per_iteration).max() {
        println!(
            "max operations per iteration: {worst} (bound {})",
            records[0].ops_bound.to_u128().map_or("inf".to_string(), |b| b.to_string())
        );
    }
    println!("wrote {}", out.display());
    Ok(())
}

pub fn rerun(args: &RerunArgs) -> CmdResult {
    let manifest = RunManifest::load(&args.manifest).map_err(Failure::Usage)?;
    manifest.check_inputs().map_err(Failure::Usage)?;
    let bad = |e: serde_json::Error| usage(format!("{}: {e}", args.manifest.display()));
    match manifest.command.as_str() {
        "peg" => {
            let mut cfg: PegArgs = serde_json::from_value(manifest.config).map_err(bad)?;
            cfg.out = args.out.clone();
            run_peg(&cfg)
        }
        "build" => {
            let mut cfg: BuildArgs = serde_json::from_value(manifest.config).map_err(bad)?;
            cfg.out = args.out.clone();
            build(&cfg)
        }
        "simulate" => {
            let mut cfg: SimConfig = serde_json::from_value(manifest.config).map_err(bad)?;
            cfg.workers = args
                .workers
                .or_else(|| manifest.notes.get("workers").and_then(|w| w.as_u64()).map(|w| w as usize))
                .unwrap_or(0);
            run_simulation(cfg, &args.out, None)
        }
        other => Err(usage(format!("manifest records unknown command {other:?}"))),
    }
}
