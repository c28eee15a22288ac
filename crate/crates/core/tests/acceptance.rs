//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use schauder::compactness::{analyze_set, CompactnessWitness};
use schauder::convergence::{analyze, CoordinateStatus};
use schauder::{
    check_precompact, decide_c, decide_c0, decide_convergence, decide_hilbert, decide_lp, direct_norm_check,
    estimate_operator_norm, BasisDescriptor, CheckConfig, CompactnessVerdict, Decider, Envelope, EnvelopeTerm,
    Family, Generator, Operator, SeqElement, SetDescriptor, Slack, SpaceKind, TailModel, Verdict, Witness,
};

const DELTA: f64 = 9.313225746154785e-10;
const L1: SpaceKind = SpaceKind::Lp { p: 1.0 };
const L2: SpaceKind = SpaceKind::Lp { p: 2.0 };

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn slack() -> Slack {
    Slack::DEFAULT
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_space(rng: &mut ChaCha8Rng) -> SpaceKind {
    match rng.random_range(0..6) {
        0 => L1,
        1 => L2,
        2 => SpaceKind::Lp { p: 3.0 },
        3 => SpaceKind::C0,
        4 => SpaceKind::C,
        _ => SpaceKind::Hilbert,
    }
}

fn random_model(space: SpaceKind, rng: &mut ChaCha8Rng) -> TailModel {
    let c = rng.random_range(0.0..2.0);
    if rng.random_bool(0.5) {
        TailModel::Geometric {
            c,
            r: rng.random_range(0.0..0.95),
        }
    } else {
        let floor = match space {
            SpaceKind::Lp { p } => 1.0 / p,
            SpaceKind::Hilbert => 0.5,
            _ => 0.0,
        };
        TailModel::Power {
            c,
            s: floor + rng.random_range(0.1..2.0),
        }
    }
}

fn random_envelope(space: SpaceKind, rng: &mut ChaCha8Rng) -> Envelope {
    let n = rng.random_range(0..3);
    Envelope::from_terms((0..n).map(|_| EnvelopeTerm {
        model: random_model(space, rng),
        cutoff: rng.random_bool(0.3).then(|| rng.random_range(0..80)),
    }))
}

fn random_element(rng: &mut ChaCha8Rng) -> SeqElement {
    let space = random_space(rng);
    let len = rng.random_range(0..=40);
    let prefix = (0..len).map(|_| rng.random_range(-2.0..2.0)).collect();
    let limit = space.has_limit().then(|| rng.random_range(-2.0..2.0));
    SeqElement::new(space, prefix, limit, random_envelope(space, rng)).expect("valid fixture")
}

fn zero_candidate(space: SpaceKind) -> SeqElement {
    SeqElement::zero(space)
}

// 1: seeded geometric ramps converge, and the certificate holds up directly
fn ramps_converge() -> Outcome {
    let config = CheckConfig::default();
    let mut r = rng(1);
    let spaces = [L1, L2, SpaceKind::C0, SpaceKind::C];
    let mut checked = 0usize;
    for i in 0..200 {
        let space = spaces[i % spaces.len()];
        let a = r.random_range(0.1..0.9);
        let scale = r.random_range(0.25..4.0);
        let limit = if space.has_limit() { r.random_range(-2.0..2.0) } else { 0.0 };
        let family = Family::parametric(space, Generator::GeometricRamp { a, scale, limit }).map_err(|e| e.to_string())?;
        let candidate = if space.has_limit() {
            SeqElement::constant(limit)
        } else {
            zero_candidate(space)
        };
        let verdict = decide_convergence(&family, &candidate, &config).map_err(|e| e.to_string())?;
        let Verdict::Converges(cert) = verdict else {
            return Err(format!("ramp {i} in {space} (a={a}, scale={scale}): {}", verdict.tag()));
        };
        let ok = cert.verify(&family, &candidate, 64, config.slack).map_err(|e| e.to_string())?;
        ensure(ok, || format!("ramp {i} in {space}: certificate violated"))?;
        // every n past the smallest threshold, up to a modest horizon
        let n0 = cert.rows[0].threshold_n as usize;
        let dists = direct_norm_check(&family, &candidate, n0 + 200, config.slack).map_err(|e| e.to_string())?;
        for row in &cert.rows {
            for (j, d) in dists.iter().enumerate() {
                if j + 1 >= row.threshold_n as usize && d.hi >= row.epsilon {
                    return Err(format!("ramp {i}: ||x_{} - x|| hi {} >= {}", j + 1, d.hi, row.epsilon));
                }
            }
        }
        checked += cert.rows.len();
    }
    Ok(format!("200 families converge, {checked} certificate rows verified"))
}

// 2: basis shift has certified coordinates yet a tail of exactly one
fn basis_shift_diverges() -> Outcome {
    let config = CheckConfig::default();
    let family = Family::parametric(L2, Generator::BasisShift { scale: 1.0 }).map_err(|e| e.to_string())?;
    let report = analyze(Decider::General, &family, &zero_candidate(L2), &config).map_err(|e| e.to_string())?;
    ensure(report.condition1.all_certified(), || "condition (1) not certified".into())?;
    ensure(report.condition1.results.len() == 64, || {
        format!("{} coordinates examined", report.condition1.results.len())
    })?;
    let Verdict::Diverges(Witness::TailLowerBound { pairs, .. }) = &report.verdict else {
        return Err(format!("verdict {}", report.verdict.tag()));
    };
    ensure((0..=64).all(|k| pairs.iter().any(|p| p.k == k)), || "missing K".into())?;
    let worst = pairs.iter().map(|p| (p.lower_bound - 1.0).abs()).fold(0.0, f64::max);
    ensure(worst <= DELTA, || format!("witness off by {worst}"))?;
    let recheck = Witness::TailLowerBound {
        epsilon: 0.1,
        pairs: pairs.clone(),
    }
    .recheck(Decider::General, &family, &zero_candidate(L2), config.slack)
    .map_err(|e| e.to_string())?;
    ensure(recheck, || "witness does not recheck".into())?;
    Ok(format!("{} tail pairs, max |lb - 1| = {worst:e}", pairs.len()))
}

// 3: plateau shift in c has termwise limit zero but a limit gap of one
fn plateau_shift_diverges() -> Outcome {
    let config = CheckConfig::default();
    let family = Family::parametric(SpaceKind::C, Generator::PlateauShift).map_err(|e| e.to_string())?;
    let candidate = zero_candidate(SpaceKind::C);
    let report = analyze(Decider::C, &family, &candidate, &config).map_err(|e| e.to_string())?;
    let Verdict::Diverges(Witness::LimitGap { gap }) = report.verdict else {
        return Err(format!("verdict {}", report.verdict.tag()));
    };
    ensure((gap - 1.0).abs() <= DELTA, || format!("gap {gap}"))?;
    let termwise = report.condition1.results.iter().filter(|r| r.k >= 1);
    let mut count = 0;
    for r in termwise {
        count += 1;
        ensure(
            matches!(r.status, CoordinateStatus::CertifiedPass { offset, .. } if offset == 0.0),
            || format!("coordinate {} is {:?}", r.k, r.status),
        )?;
    }
    ensure(count == 64, || format!("{count} termwise coordinates"))?;
    let dists = direct_norm_check(&family, &candidate, 1000, config.slack).map_err(|e| e.to_string())?;
    ensure(dists.len() == 1000, || "short distance list".into())?;
    for (n, d) in dists.iter().enumerate() {
        ensure(d.lo <= 1.0 && 1.0 <= d.hi && d.lo >= 1.0 - DELTA && d.hi <= 1.0 + DELTA, || {
            format!("n = {}: [{}, {}]", n + 1, d.lo, d.hi)
        })?;
    }
    Ok("limit gap 1, 64 termwise passes, 1000 distances enclose 1".into())
}

// 4: S_K x + R_K x = x
fn partial_sum_identity() -> Outcome {
    let mut r = rng(4);
    let mut checks = 0usize;
    for i in 0..500 {
        let x = random_element(&mut r);
        let basis = BasisDescriptor::standard(x.space());
        for k in 0..=32 {
            let s = basis.apply_s(&x, k).map_err(|e| e.to_string())?;
            let rem = basis.apply_r(&x, k).map_err(|e| e.to_string())?;
            ensure((s.limit() + rem.limit() - x.limit()).abs() <= DELTA, || format!("fixture {i} K={k}: limit"))?;
            for j in 1..=x.prefix_len() {
                let sum = s.term(j).mid() + rem.term(j).mid();
                let want = x.term(j).mid();
                ensure((sum - want).abs() <= DELTA, || format!("fixture {i} K={k} j={j}: {sum} vs {want}"))?;
                checks += 1;
            }
        }
    }
    Ok(format!("500 fixtures x K in 0..=32, {checks} coordinates matched"))
}

// 5: sampled operator norms respect the basis-constant bounds
fn operator_norm_bounds() -> Outcome {
    let s = slack();
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for space in [L1, L2, SpaceKind::C0, SpaceKind::C] {
        let basis = BasisDescriptor::standard(space);
        for k in 1..=16 {
            let est = |op| estimate_operator_norm(op, &basis, 1000, 5, s).map_err(|e| e.to_string());
            let ps = est(Operator::PartialSum(k))?;
            let rem = est(Operator::Remainder(k))?;
            let coord = est(Operator::Coordinate(k))? * SeqElement::unit(space, k).norm_bounds(s).hi;
            ensure(ps <= 1.0 + DELTA, || format!("{space}: ||S_{k}|| ~ {ps}"))?;
            ensure(rem <= 2.0 + DELTA, || format!("{space}: ||R_{k}|| ~ {rem}"))?;
            ensure(coord <= 2.0 + DELTA, || format!("{space}: ||c_{k}|| ||e_{k}|| ~ {coord}"))?;
            worst = (worst.0.max(ps), worst.1.max(rem), worst.2.max(coord));
        }
    }
    let basis = BasisDescriptor::standard(SpaceKind::C);
    let r3 = estimate_operator_norm(Operator::Remainder(3), &basis, 1000, 5, s).map_err(|e| e.to_string())?;
    ensure(r3 >= 1.0, || format!("||R_3|| ~ {r3} in c"))?;
    let e4 = SeqElement::unit(SpaceKind::C, 4);
    let direct = Operator::Remainder(3).apply_lo(&basis, &e4, s).map_err(|e| e.to_string())?;
    ensure(direct >= 1.0, || format!("||R_3 e_4|| = {direct}"))?;
    Ok(format!(
        "max ||S|| {:.6}, ||R|| {:.6}, ||c_k|| ||e_k|| {:.6}; ||R_3|| in c ~ {r3:.6}",
        worst.0, worst.1, worst.2
    ))
}

// tail-sum oracle for the cube with envelope 2^-k in l2
fn cube_k0_oracle(eps: f64) -> usize {
    (0..)
        .find(|&k: &usize| {
            let sum: f64 = (k + 1..=k + 10_000).map(|j| 0.25f64.powi(j as i32)).sum();
            sum.sqrt() < eps
        })
        .unwrap()
}

// 6: precompactness verdicts
fn compactness_verdicts() -> Outcome {
    let config = CheckConfig::default();
    let mut r = rng(6);
    for i in 0..20 {
        let space = [L1, L2, SpaceKind::C0, SpaceKind::C][i % 4];
        let members = (0..r.random_range(1..6))
            .map(|_| {
                let prefix = (0..r.random_range(0..10)).map(|_| r.random_range(-3.0..3.0)).collect();
                let limit = space.has_limit().then(|| r.random_range(-1.0..1.0));
                SeqElement::new(space, prefix, limit, Envelope::zero()).expect("valid member")
            })
            .collect();
        let set = SetDescriptor::finite(space, members).map_err(|e| e.to_string())?;
        let v = check_precompact(&set, &config).map_err(|e| e.to_string())?;
        ensure(v.tag() == "precompact", || format!("finite set {i} in {space}: {}", v.tag()))?;
    }
    let non = [
        SetDescriptor::basis_vectors(L2, 1.0).map_err(|e| e.to_string())?,
        SetDescriptor::ball(L2, 1.0).map_err(|e| e.to_string())?,
    ];
    for set in &non {
        let v = check_precompact(set, &config).map_err(|e| e.to_string())?;
        let CompactnessVerdict::NotPrecompact(w) = &v else {
            return Err(format!("{set:?}: {}", v.tag()));
        };
        ensure(w.recheck(set, config.slack), || format!("{set:?}: witness does not recheck"))?;
        let CompactnessWitness::TailFailure { witnesses, .. } = w;
        for t in witnesses {
            ensure(t.member == SeqElement::unit(L2, t.k + 1), || format!("K={} member is not e_(K+1)", t.k))?;
        }
    }
    let cube = SetDescriptor::hilbert_cube(L2, TailModel::Geometric { c: 1.0, r: 0.5 }).map_err(|e| e.to_string())?;
    let report = analyze_set(&cube, &config).map_err(|e| e.to_string())?;
    let CompactnessVerdict::Precompact(cert) = &report.verdict else {
        return Err(format!("cube: {}", report.verdict.tag()));
    };
    for row in &cert.rows {
        let oracle = cube_k0_oracle(row.epsilon);
        ensure(row.k0.abs_diff(oracle) <= 1, || {
            format!("cube eps {}: K0 {} vs oracle {oracle}", row.epsilon, row.k0)
        })?;
    }
    let k0 = cert.rows.iter().find(|r| r.epsilon == 1e-2).map(|r| r.k0);
    Ok(format!(
        "20 finite sets precompact, e_(K+1) witnesses recheck, cube K0(1e-2) = {k0:?} vs oracle {}",
        cube_k0_oracle(1e-2)
    ))
}

fn random_family(space: SpaceKind, r: &mut ChaCha8Rng) -> (Family, SeqElement) {
    let element = |r: &mut ChaCha8Rng| {
        let prefix: Vec<f64> = (0..r.random_range(1..8)).map(|_| r.random_range(-2.0..2.0)).collect();
        SeqElement::finite(space, prefix).expect("valid element")
    };
    let zero = zero_candidate(space);
    let (generator, candidate) = match r.random_range(0..5) {
        0 => (
            Generator::GeometricRamp {
                a: r.random_range(0.1..0.9),
                scale: r.random_range(0.2..3.0),
                limit: 0.0,
            },
            zero,
        ),
        1 => (Generator::BasisShift { scale: r.random_range(0.2..3.0) }, zero),
        2 => {
            let v = element(r);
            (Generator::Constant(v.clone()), v)
        }
        3 => (Generator::Constant(element(r)), element(r)),
        _ => (Generator::Alternating(element(r)), zero),
    };
    (Family::parametric(space, generator).expect("valid family"), candidate)
}

// 7: specialised deciders agree with the general one
fn deciders_agree() -> Outcome {
    let config = CheckConfig::default();
    let mut r = rng(7);
    let mut tally = std::collections::BTreeMap::new();
    for i in 0..100 {
        let (family, candidate) = random_family(L2, &mut r);
        let general = decide_convergence(&family, &candidate, &config).map_err(|e| e.to_string())?;
        let lp = decide_lp(&family, &candidate, &config).map_err(|e| e.to_string())?;
        let hf = family.with_space(SpaceKind::Hilbert).map_err(|e| e.to_string())?;
        let hc = candidate.with_space(SpaceKind::Hilbert).map_err(|e| e.to_string())?;
        let hilbert = decide_hilbert(&hf, &hc, &config).map_err(|e| e.to_string())?;
        ensure(general.tag() == lp.tag() && lp.tag() == hilbert.tag(), || {
            format!("l2 family {i}: {} / {} / {}", general.tag(), lp.tag(), hilbert.tag())
        })?;
        *tally.entry(general.tag()).or_insert(0) += 1;
    }
    for i in 0..100 {
        let (family, candidate) = random_family(SpaceKind::C0, &mut r);
        let c0 = decide_c0(&family, &candidate, &config).map_err(|e| e.to_string())?;
        let cf = family.with_space(SpaceKind::C).map_err(|e| e.to_string())?;
        let cc = candidate.with_space(SpaceKind::C).map_err(|e| e.to_string())?;
        let c = decide_c(&cf, &cc, &config).map_err(|e| e.to_string())?;
        ensure(c0.tag() == c.tag(), || format!("c family {i}: c0 {} / c {}", c0.tag(), c.tag()))?;
        *tally.entry(c.tag()).or_insert(0) += 1;
    }
    Ok(format!("200 families agree, verdicts {tally:?}"))
}

// 8: tail norms shrink with K
fn monotone_tails() -> Outcome {
    let mut r = rng(8);
    for i in 0..500 {
        let x = random_element(&mut r);
        let his: Vec<f64> = (0..=64).map(|k| x.tail_norm_bounds(k, slack()).hi).collect();
        if let Some(k) = (1..his.len()).find(|&k| his[k] > his[k - 1]) {
            return Err(format!("fixture {i} in {}: hi rises at K={k}", x.space()));
        }
    }
    Ok("500 fixtures nonincreasing over K in 0..=64".into())
}

fn brute_norm(space: SpaceKind, terms: &[f64]) -> f64 {
    match space.norm() {
        schauder::Norm::Sup => terms.iter().fold(0.0, |a: f64, v| a.max(v.abs())),
        schauder::Norm::P(p) => terms.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p),
    }
}

// 9: brute-force norms of concrete sequences land inside the enclosures
fn enclosures_sound() -> Outcome {
    let mut r = rng(9);
    const TERMS: usize = 10_000;
    let mut checks = 0usize;
    for i in 0..100 {
        let space = random_space(&mut r);
        let model = match i % 3 {
            0 => TailModel::Geometric {
                c: r.random_range(0.1..2.0),
                r: r.random_range(0.1..0.9),
            },
            1 => random_model(space, &mut r),
            _ => TailModel::Zero,
        };
        let model = match model {
            TailModel::Power { c, s } if i % 3 == 1 => TailModel::Power { c, s },
            TailModel::Power { c, .. } => TailModel::Geometric { c, r: 0.5 },
            m => m,
        };
        let limit = if space.has_limit() { r.random_range(-1.0..1.0) } else { 0.0 };
        // the concrete sequence: explicit head, then exactly the envelope
        let m = r.random_range(0..20);
        let head: Vec<f64> = (1..=m).map(|k| limit + model.value(k) * if k % 2 == 0 { -1.0 } else { 1.0 }).collect();
        let head = if matches!(model, TailModel::Zero) {
            (0..m).map(|_| r.random_range(-2.0..2.0)).collect()
        } else {
            head
        };
        let x = SeqElement::new(space, head.clone(), space.has_limit().then_some(limit), model)
            .map_err(|e| e.to_string())?;
        let mut terms: Vec<f64> = head.iter().map(|v| v - limit).collect();
        terms.extend((m + 1..=TERMS).map(|k| model.value(k)));
        let check = |k: usize, interval: schauder::NormInterval, what: &str| {
            let mut full = terms[k.min(terms.len())..].to_vec();
            if what == "norm" && space.has_limit() {
                // the norm in c sees raw terms and the limit, tails see x_k - L
                full = full.iter().map(|v| v + limit).chain([limit]).collect();
            }
            let brute = brute_norm(space, &full);
            ensure(interval.lo <= brute && brute <= interval.hi, || {
                format!("fixture {i} in {space} {what} K={k}: {brute} not in [{}, {}]", interval.lo, interval.hi)
            })
        };
        check(0, x.norm_bounds(slack()), "norm")?;
        for k in [0, 1, 3, m, m + 1, 50, 500] {
            check(k, x.tail_norm_bounds(k, slack()), "tail")?;
            checks += 1;
        }
        checks += 1;
    }
    Ok(format!("100 fixtures, {checks} enclosures contain their 10^4-term norms"))
}

fn run_cli(bin: &str, args: &[&str]) -> Result<(i32, Value), String> {
    let out = Command::new(bin).args(args).output().map_err(|e| e.to_string())?;
    let code = out.status.code().unwrap_or(-1);
    let value = serde_json::from_slice(&out.stdout).map_err(|e| format!("{args:?}: {e}"))?;
    Ok((code, value))
}

fn cli_pass(bin: &str, dir: &Path) -> Result<Vec<(String, String, String)>, String> {
    let out = dir.to_str().unwrap();
    let (code, listing) = run_cli(bin, &["--seed", "11", "fixtures", "--out", out])?;
    ensure(code == 0, || format!("fixtures exited {code}"))?;
    let mut rows = Vec::new();
    for entry in listing["written"].as_array().ok_or("no fixture list")? {
        let file = entry["file"].as_str().unwrap();
        let checker = entry["checker"].as_str().unwrap();
        let expected = entry["expected"].as_str().unwrap();
        let (code, report) = run_cli(bin, &["--seed", "11", checker, file])?;
        let verdict = report["verdict"].as_str().unwrap_or("?").to_string();
        ensure(verdict == expected && report["matches_expected"] == true, || {
            format!("{file}: {verdict}, expected {expected}")
        })?;
        let want = if expected == "converges" || expected == "precompact" { 0 } else { 1 };
        ensure(code == want, || format!("{file}: exit {code}"))?;
        let name = Path::new(file).file_name().unwrap().to_string_lossy().into_owned();
        let bytes = std::fs::read_to_string(file).map_err(|e| e.to_string())?;
        rows.push((name, bytes, report["certificate"].to_string()));
    }
    Ok(rows)
}

// 10: fixtures round-trip through the CLI, identically twice
fn cli_round_trip() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_schauder");
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    let first = cli_pass(bin, a.path())?;
    let second = cli_pass(bin, b.path())?;
    ensure(!first.is_empty(), || "no fixtures".into())?;
    ensure(first == second, || "runs differ".into())?;
    Ok(format!("{} fixtures reproduce their verdicts, byte-identical certificates across 2 runs", first.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("ramp families converge with verified certificates", ramps_converge),
        ("basis shift diverges with unit tail witness", basis_shift_diverges),
        ("plateau shift diverges through the limit functional", plateau_shift_diverges),
        ("partial sum plus remainder is the identity", partial_sum_identity),
        ("operator norm estimates within basis constant bounds", operator_norm_bounds),
        ("precompactness verdicts and cube K0 oracle", compactness_verdicts),
        ("specialised deciders agree", deciders_agree),
        ("tail norms are monotone", monotone_tails),
        ("norm enclosures are sound", enclosures_sound),
        ("cli round trip is reproducible", cli_round_trip),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
