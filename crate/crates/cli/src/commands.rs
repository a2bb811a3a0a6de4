use std::error::Error as StdError;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use additive_designs::design::{
    check_simple, check_t_design, check_zero_sum, full_two_parallel_union_design,
    intersection_profile, pair_coverage, replication_counts, structure_failures, CoverageReport,
    Design, SimplicityReport,
};
use additive_designs::io::{read_design, write_design, write_family};
use additive_designs::orbit::{develop, enumerate_candidate_orbits};
use additive_designs::search::{search as run_search, verify_family, SearchConfig, Termination};
use additive_designs::{embedded, Geometry, Point};
use serde_json::{json, Value};

use crate::manifest::{display, out_path, RunManifest};
use crate::{Format, Outcome};

pub type CmdResult = Result<Outcome, Box<dyn StdError>>;

/// Shown in reports; the rest are counted only.
const SHOWN_OFFENDERS: usize = 10;

pub struct SearchArgs {
    pub family_size: usize,
    pub target: u32,
    pub limit: String,
    pub budget: Option<f64>,
    pub workers: usize,
    pub n: u32,
}

fn read_text(path: &Path) -> Result<String, Box<dyn StdError>> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", display(path)).into())
}

fn load_design(path: &Path) -> Result<Design, Box<dyn StdError>> {
    let text = read_text(path)?;
    read_design(&text).map_err(|e| format!("{}: {e}", display(path)).into())
}

fn write_file(path: &Path, text: &str) -> Result<(), Box<dyn StdError>> {
    fs::write(path, text).map_err(|e| format!("{}: {e}", display(path)).into())
}

fn create_dir(dir: &Path) -> Result<(), Box<dyn StdError>> {
    fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", display(dir)).into())
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn point_str(g: Option<&Geometry>, a: Point) -> String {
    match g {
        Some(g) => g.format_point(a),
        None => a.0.to_string(),
    }
}

fn histogram_str(r: &CoverageReport) -> String {
    let parts: Vec<String> = r
        .histogram
        .iter()
        .map(|(c, n)| format!("{c}: {n}"))
        .collect();
    format!("{{{}}}", parts.join(", "))
}

fn coverage_json(r: &CoverageReport, g: Option<&Geometry>) -> Value {
    let offending: Vec<Value> = r
        .offending
        .iter()
        .map(|(s, c)| {
            json!({
                "subset": s.iter().map(|&a| point_str(g, a)).collect::<Vec<_>>(),
                "count": c,
            })
        })
        .collect();
    json!({
        "t": r.t,
        "lambda": r.lambda,
        "histogram": r.histogram,
        "balanced": r.is_balanced(),
        "offending": offending,
    })
}

fn simplicity_json(s: &SimplicityReport, g: Option<&Geometry>) -> Value {
    let repeated: Vec<Value> = s
        .repeated
        .iter()
        .map(|(b, m)| {
            json!({
                "block": b.points().iter().map(|&a| point_str(g, a)).collect::<Vec<_>>(),
                "multiplicity": m,
            })
        })
        .collect();
    json!({ "simple": s.is_simple(), "repeated": repeated })
}

fn print_coverage(r: &CoverageReport, g: Option<&Geometry>) {
    println!(
        "coverage     t={} lambda={}: histogram {}  {}",
        r.t,
        r.lambda,
        histogram_str(r),
        verdict(r.is_balanced())
    );
    let wrong: u64 = r
        .histogram
        .iter()
        .filter(|(&c, _)| c != r.lambda)
        .map(|(_, n)| n)
        .sum();
    if wrong > 0 {
        println!(
            "  {wrong} subsets off target, first {}:",
            r.offending.len().min(SHOWN_OFFENDERS)
        );
        for (s, c) in r.offending.iter().take(SHOWN_OFFENDERS) {
            let pts: Vec<String> = s.iter().map(|&a| point_str(g, a)).collect();
            println!("    {{{}}} covered {c} times", pts.join(", "));
        }
    }
}

fn print_simplicity(s: &SimplicityReport, g: Option<&Geometry>) {
    println!("simple       {}", verdict(s.is_simple()));
    for (b, m) in s.repeated.iter().take(SHOWN_OFFENDERS) {
        let pts: Vec<String> = b.points().iter().map(|&a| point_str(g, a)).collect();
        println!("  {{{}}} occurs {m} times", pts.join(", "));
    }
}

fn finish(
    mut manifest: RunManifest,
    started: Instant,
    path: &Path,
    format: Format,
) -> Result<(), Box<dyn StdError>> {
    manifest.outputs.push(display(path));
    manifest.finish(started);
    write_file(path, &manifest.to_json())?;
    match format {
        Format::Structured => print!("{}", manifest.to_json()),
        Format::Text => println!("manifest     {}", display(path)),
    }
    Ok(())
}

fn sibling_manifest(input: &Path, command: &str) -> PathBuf {
    let mut name = input.file_name().unwrap_or_default().to_os_string();
    name.push(format!(".{command}.manifest.json"));
    input.with_file_name(name)
}

pub fn generate(out_dir: &Path, manifest_path: Option<PathBuf>, format: Format) -> CmdResult {
    let started = Instant::now();
    let mut manifest = RunManifest::new("generate", json!({ "out_dir": display(out_dir) }));
    embedded::verify_table()?;
    let family = embedded::family()?;
    let design = develop(&family);
    create_dir(out_dir)?;
    let design_path = out_path(out_dir, "design.json");
    let family_path = out_path(out_dir, "family.json");
    write_file(&design_path, &write_design(&design)?)?;
    write_file(&family_path, &write_family(&family))?;

    let g = design.geometry().copied();
    let coverage = check_t_design(&design, 2, 2)?;
    let simplicity = check_simple(&design);
    let zero_sum = check_zero_sum(&design)?;
    let structure = structure_failures(&design)?;
    let passed = design.len() == 432
        && coverage.is_balanced()
        && simplicity.is_simple()
        && zero_sum.all_zero()
        && structure.is_empty();

    if format == Format::Text {
        println!("table        sha256 {}", embedded::TABLE_SHA256);
        println!(
            "design       2-(81,6,2), {} blocks from {} base blocks",
            design.len(),
            family.len()
        );
        print_coverage(&coverage, g.as_ref());
        print_simplicity(&simplicity, g.as_ref());
        println!("zero-sum     {}", verdict(zero_sum.all_zero()));
        println!("two lines    {}", verdict(structure.is_empty()));
        println!("wrote        {}", display(&design_path));
        println!("wrote        {}", display(&family_path));
    }
    manifest.verdicts = json!({
        "blocks": design.len(),
        "coverage": coverage_json(&coverage, g.as_ref()),
        "simple": simplicity.is_simple(),
        "additive": zero_sum.all_zero(),
        "two_parallel_lines": structure.is_empty(),
    });
    manifest.passed = passed;
    manifest.outputs = vec![display(&design_path), display(&family_path)];
    let mpath = manifest_path.unwrap_or_else(|| out_path(out_dir, "manifest.json"));
    finish(manifest, started, &mpath, format)?;
    Ok(if passed {
        Outcome::Pass
    } else {
        Outcome::CheckFailed
    })
}

pub fn verify(
    path: &Path,
    t: u32,
    lambda: Option<u32>,
    manifest_path: Option<PathBuf>,
    format: Format,
) -> CmdResult {
    let started = Instant::now();
    let mut manifest = RunManifest::new(
        "verify",
        json!({ "path": display(path), "t": t, "lambda": lambda }),
    );
    let design = load_design(path)?;
    let header = design.params();
    let lambda = match lambda {
        Some(l) => l,
        None if t == header.t => header.lambda,
        None => {
            return Err(format!(
                "--lambda is required for t = {t}; the file header gives λ for t = {}",
                header.t
            )
            .into())
        }
    };
    let g = design.geometry().copied();
    let coverage = check_t_design(&design, t, lambda)?;
    let simplicity = check_simple(&design);
    let zero_sum = match &g {
        Some(_) => Some(check_zero_sum(&design)?),
        None => None,
    };
    let structure = match &g {
        Some(g) if design.k() == 2 * g.p() => Some(structure_failures(&design)?),
        _ => None,
    };
    let passed = coverage.is_balanced()
        && simplicity.is_simple()
        && zero_sum.as_ref().is_none_or(|z| z.all_zero())
        && structure.as_ref().is_none_or(|s| s.is_empty());

    if format == Format::Text {
        println!(
            "design       v={} k={} b={} ({})",
            design.v(),
            design.k(),
            design.len(),
            display(path)
        );
        print_coverage(&coverage, g.as_ref());
        print_simplicity(&simplicity, g.as_ref());
        if let Some(z) = &zero_sum {
            println!("zero-sum     {}", verdict(z.all_zero()));
            if !z.all_zero() {
                println!("  {} blocks with nonzero sum", z.offending.len());
            }
        }
        if let Some(s) = &structure {
            println!("two lines    {}", verdict(s.is_empty()));
            if !s.is_empty() {
                println!("  {} blocks are not two parallel lines", s.len());
            }
        }
        println!("verdict      {}", verdict(passed));
    }
    manifest.verdicts = json!({
        "v": design.v(),
        "k": design.k(),
        "blocks": design.len(),
        "coverage": coverage_json(&coverage, g.as_ref()),
        "simplicity": simplicity_json(&simplicity, g.as_ref()),
        "zero_sum": zero_sum.map(|z| json!({ "all_zero": z.all_zero(), "offending_blocks": z.offending })),
        "two_parallel_lines": structure.map(|s| json!({ "passed": s.is_empty(), "failing_blocks": s })),
    });
    manifest.passed = passed;
    let mpath = manifest_path.unwrap_or_else(|| sibling_manifest(path, "verify"));
    finish(manifest, started, &mpath, format)?;
    Ok(if passed {
        Outcome::Pass
    } else {
        Outcome::CheckFailed
    })
}

fn parse_limit(s: &str) -> Result<Option<usize>, Box<dyn StdError>> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(None);
    }
    s.parse::<usize>()
        .map(Some)
        .map_err(|_| format!("invalid --limit {s:?}: expected a count or `all`").into())
}

pub fn search(
    args: SearchArgs,
    out_dir: &Path,
    manifest_path: Option<PathBuf>,
    format: Format,
) -> CmdResult {
    let started = Instant::now();
    let limit = parse_limit(&args.limit)?;
    let budget = args
        .budget
        .map(Duration::try_from_secs_f64)
        .transpose()
        .map_err(|e| format!("invalid --budget: {e}"))?;
    let config = SearchConfig {
        family_size: args.family_size,
        target: args.target,
        limit,
        budget,
        workers: args.workers,
    };
    let g = Geometry::new(3, args.n)?;
    config.validate(&g, 2 * g.p())?;
    let mut manifest = RunManifest::new(
        "search",
        json!({
            "p": g.p(),
            "n": g.n(),
            "family_size": config.family_size,
            "target": config.target,
            "limit": config.limit,
            "budget_secs": args.budget,
            "workers": config.workers,
            "out_dir": display(out_dir),
        }),
    );
    let candidates = enumerate_candidate_orbits(&g)?;
    let outcome = run_search(&g, &candidates, &config)?;
    create_dir(out_dir)?;

    let lambda = config.target / g.p();
    let mut families = Vec::new();
    let mut all_pass = true;
    for (i, (family, sol)) in outcome.families.iter().zip(&outcome.solutions).enumerate() {
        let design = develop(family);
        let family_path = out_path(out_dir, &format!("family-{:04}.json", i + 1));
        let design_path = out_path(out_dir, &format!("design-{:04}.json", i + 1));
        write_file(&family_path, &write_family(family))?;
        write_file(&design_path, &write_design(&design)?)?;
        let v = verify_family(family, lambda)?;
        all_pass &= v.passed();
        if format == Format::Text {
            println!(
                "family {:>4}  candidates {:?}  {} blocks  {}",
                i + 1,
                sol,
                v.blocks,
                verdict(v.passed())
            );
        }
        families.push(json!({
            "candidates": sol,
            "family": display(&family_path),
            "design": display(&design_path),
            "blocks": v.blocks,
            "balanced": v.coverage.is_balanced(),
            "simple": v.simplicity.is_simple(),
            "zero_sum": v.zero_sum.all_zero(),
            "two_parallel_lines": v.structure_failures.is_empty(),
            "passed": v.passed(),
        }));
        manifest.outputs.push(display(&family_path));
        manifest.outputs.push(display(&design_path));
    }
    let termination = match outcome.termination {
        Termination::Exhausted => "exhausted",
        Termination::LimitReached => "limit_reached",
        Termination::BudgetExhausted => "budget_exhausted",
    };
    let found = !outcome.families.is_empty();
    if format == Format::Text {
        println!(
            "search       {} candidates, {} families, {} nodes, {termination}, {:.2}s",
            candidates.len(),
            outcome.families.len(),
            outcome.nodes,
            outcome.elapsed.as_secs_f64()
        );
        if !outcome.is_complete() {
            println!("incomplete   budget ran out before the search finished");
        } else if !found {
            println!("no family satisfies the configuration");
        }
    }
    manifest.verdicts = json!({
        "candidates": candidates.len(),
        "families": families,
        "nodes": outcome.nodes,
        "termination": termination,
        "complete": outcome.is_complete(),
    });
    manifest.timings.search_ms = Some(outcome.elapsed.as_millis());
    manifest.passed = found && all_pass && outcome.is_complete();
    let mpath = manifest_path.unwrap_or_else(|| out_path(out_dir, "manifest.json"));
    finish(manifest, started, &mpath, format)?;
    Ok(if !all_pass || (outcome.is_complete() && !found) {
        Outcome::CheckFailed
    } else if !outcome.is_complete() {
        Outcome::Incomplete
    } else {
        Outcome::Pass
    })
}

pub fn ag2(q: u32, out_dir: &Path, manifest_path: Option<PathBuf>, format: Format) -> CmdResult {
    let started = Instant::now();
    let mut manifest = RunManifest::new("ag2", json!({ "q": q, "out_dir": display(out_dir) }));
    let design = full_two_parallel_union_design(q)?;
    create_dir(out_dir)?;
    let design_path = out_path(out_dir, &format!("ag2-q{q}.json"));
    write_file(&design_path, &write_design(&design)?)?;

    let g = design.geometry().copied();
    let lambda = 2 * q - 1;
    let expected_blocks = (q as usize + 1) * (q as usize * (q as usize - 1) / 2);
    let coverage = check_t_design(&design, 2, lambda)?;
    let simplicity = check_simple(&design);
    let zero_sum = check_zero_sum(&design)?;
    let profile = intersection_profile(&design);
    let allowed = [0, 4, q as usize];
    let profile_ok = profile.iter().all(|s| allowed.contains(s));
    let passed = design.len() == expected_blocks
        && coverage.is_balanced()
        && zero_sum.all_zero()
        && profile_ok;

    if format == Format::Text {
        println!(
            "design       2-({},{},{}), {} blocks (expected {expected_blocks})",
            q * q,
            2 * q,
            lambda,
            design.len()
        );
        print_coverage(&coverage, g.as_ref());
        print_simplicity(&simplicity, g.as_ref());
        println!("zero-sum     {}", verdict(zero_sum.all_zero()));
        println!(
            "profile      {:?} within {{0, 4, {q}}}  {}",
            profile,
            verdict(profile_ok)
        );
        println!("wrote        {}", display(&design_path));
    }
    manifest.verdicts = json!({
        "v": design.v(),
        "k": design.k(),
        "lambda": lambda,
        "blocks": design.len(),
        "expected_blocks": expected_blocks,
        "coverage": coverage_json(&coverage, g.as_ref()),
        "simplicity": simplicity_json(&simplicity, g.as_ref()),
        "zero_sum": zero_sum.all_zero(),
        "intersection_profile": profile,
        "profile_within_0_4_q": profile_ok,
    });
    manifest.passed = passed;
    manifest.outputs = vec![display(&design_path)];
    let mpath = manifest_path.unwrap_or_else(|| out_path(out_dir, "manifest.json"));
    finish(manifest, started, &mpath, format)?;
    Ok(if passed {
        Outcome::Pass
    } else {
        Outcome::CheckFailed
    })
}

pub fn stats(path: &Path, manifest_path: Option<PathBuf>, format: Format) -> CmdResult {
    let started = Instant::now();
    let mut manifest = RunManifest::new("stats", json!({ "path": display(path) }));
    let design = load_design(path)?;
    let reps = replication_counts(&design);
    let (rmin, rmax) = (
        reps.iter().copied().min().unwrap_or(0),
        reps.iter().copied().max().unwrap_or(0),
    );
    let coverage = pair_coverage(&design);
    let simple = check_simple(&design).is_simple();
    let zero_sum = match design.geometry() {
        Some(_) => Some(check_zero_sum(&design)?.all_zero()),
        None => None,
    };
    if format == Format::Text {
        println!("v            {}", design.v());
        println!("k            {}", design.k());
        println!("b            {}", design.len());
        println!("replication  min {rmin} max {rmax}");
        println!("pairs        histogram {}", histogram_str(&coverage));
        println!("simple       {simple}");
        if let Some(z) = zero_sum {
            println!("zero-sum     {z}");
        }
    }
    manifest.verdicts = json!({
        "v": design.v(),
        "k": design.k(),
        "b": design.len(),
        "replication": { "min": rmin, "max": rmax },
        "pair_histogram": coverage.histogram,
        "simple": simple,
        "zero_sum": zero_sum,
    });
    // a report, not a check
    manifest.passed = true;
    let mpath = manifest_path.unwrap_or_else(|| sibling_manifest(path, "stats"));
    finish(manifest, started, &mpath, format)?;
    Ok(Outcome::Pass)
}
