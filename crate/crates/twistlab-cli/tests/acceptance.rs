//! Acceptance run: one line per criterion, exit status nonzero if any fails.
//! Tolerances and time budgets are pinned here, not read from config.

use std::process::Command;
use std::time::{Duration, Instant};

use twistlab::fixtures::{self, standard_cases};
use twistlab::fock::{p_recursive, FockSpace, FockVector};
use twistlab::npoint::{self, enumerate_diagrams, evaluate_diagram, evaluate_diagram_sweep};
use twistlab::perm_expansion::{p_sum, WordOrder};
use twistlab::tensor_core::{c, dim_pow, ComplexMatrix};
use twistlab::twist::{self, classify, gallery, GalleryParams, Verdict};
use twistlab::{modular_verify as mv, nuclearity, sample, Twist};

const EXACT: f64 = 1e-10;
const ANALYTIC: f64 = 1e-8;
const YBE_ZERO: f64 = 1e-12;
const WITNESS_FLOOR: f64 = 1e-3;
const VACUUM_TOL: f64 = 1e-12;
const FACTORIAL_TOL: f64 = 1e-14;
const DUALITY_TOL: f64 = 1e-9;
const NUCLEARITY_TOL: f64 = 1e-9;

type Outcome = Result<String, String>;
/// Name, check, time budget in seconds.
type Criterion = (&'static str, fn() -> Outcome, u64);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T>(r: twistlab::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn g(name: &str) -> Twist {
    gallery(name, &GalleryParams::d(2)).unwrap()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn c1_classification() -> Outcome {
    let zero = lib(classify(&g("zero"), 5))?;
    ensure(zero.report.verdict == Verdict::Strict, || {
        "T = 0 not strict".into()
    })?;
    for l in &zero.report.levels {
        ensure((l.min_eigenvalue - 1.0).abs() <= EXACT, || {
            format!("T = 0 level {} min eig {}", l.n, l.min_eigenvalue)
        })?;
    }
    let ps = p_recursive(g("identity").matrix(), 2, 5);
    for (n, p) in ps.iter().enumerate().skip(1) {
        let expect = ComplexMatrix::identity(dim_pow(2, n)).scale_real(factorial(n));
        ensure((p - &expect).max_abs() <= EXACT, || {
            format!("identity: P_{n} != n!")
        })?;
    }
    let ps = p_recursive(g("neg_identity").matrix(), 2, 5);
    for (n, p) in ps.iter().enumerate().skip(2) {
        ensure(p.max_abs() <= EXACT, || format!("-identity: P_{n} != 0"))?;
    }
    for q in [0.5, -0.5] {
        let cl = lib(classify(&fixtures::q_flip(q), 5))?;
        ensure(cl.report.verdict == Verdict::Strict, || {
            format!("qF q={q} not strict")
        })?;
        let m = cl.report.levels[1].min_eigenvalue;
        ensure((m - 0.5).abs() <= EXACT, || {
            format!("qF q={q}: min eig P_2 = {m}")
        })?;
    }
    Ok("T=0, ±identity, qF(±0.5) at n_max = 5".into())
}

fn c2_yang_baxter() -> Outcome {
    let good = [
        ("flip", g("flip")),
        ("qF", fixtures::q_flip(0.5)),
        ("F(A⊗A)", fixtures::flip_sandwich_twist()),
    ];
    let mut worst: f64 = 0.0;
    for (name, t) in &good {
        let r = t.ybe_residual();
        ensure(r <= YBE_ZERO, || format!("{name}: ybe residual {r:e}"))?;
        worst = worst.max(r);
    }
    let bad = fixtures::non_braided_twist().ybe_residual();
    ensure(bad >= WITNESS_FLOOR, || {
        format!("A⊗B ybe residual {bad:e} below floor")
    })?;
    Ok(format!("braided max {worst:.1e}, A⊗B {bad:.3e}"))
}

fn c3_perm_sum() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for case in standard_cases() {
        let t = &case.twist;
        if !t.is_braided() || t.d() != 2 {
            continue;
        }
        let ps = p_recursive(t.matrix(), 2, 5);
        for (n, p) in ps.iter().enumerate().skip(1) {
            let s = lib(p_sum(t, n, WordOrder::Canonical))?;
            let r = (&s - p).max_abs();
            ensure(r <= EXACT, || {
                format!("{}: n={n} residual {r:e}", case.name)
            })?;
            worst = worst.max(r);
        }
        count += 1;
    }
    let t1 = lib(gallery("q_flip", &GalleryParams::d(1).with_q(0.5)))?;
    let qf3 = lib(p_sum(&t1, 3, WordOrder::Canonical))?.data()[0];
    ensure((qf3 - c(2.625, 0.0)).norm() <= FACTORIAL_TOL, || {
        format!("[3]_0.5! = {qf3}")
    })?;
    Ok(format!(
        "{count} braided members, max {worst:.1e}; [3]_0.5! = {}",
        qf3.re
    ))
}

fn c4_tilde_factorization() -> Outcome {
    let mut worst: f64 = 0.0;
    for case in standard_cases() {
        if !case.twist.is_braided() {
            continue;
        }
        let fs = lib(FockSpace::build(&case.twist, 5))?;
        for n in 1..=4 {
            let r = lib(fs.factorization_residual(n))?;
            ensure(r <= EXACT, || {
                format!("{}: n={n} residual {r:e}", case.name)
            })?;
            worst = worst.max(r);
        }
    }
    let fs = lib(FockSpace::build(&fixtures::non_braided_twist(), 3))?;
    let nb = lib(fs.factorization_residual(2))?;
    ensure(nb >= WITNESS_FLOOR, || {
        format!("non-braided residual {nb:e}")
    })?;
    Ok(format!("braided max {worst:.1e}, non-braided {nb:.3e}"))
}

fn c5_creation_contracts() -> Outcome {
    let mut rng = sample::rng(5);
    let (mut adj, mut bound): (f64, f64) = (0.0, 0.0);
    for case in standard_cases() {
        let t = &case.twist;
        let d = t.d();
        let fs = lib(FockSpace::build(t, 4))?;
        for _ in 0..3 {
            let xi = sample::vector(&mut rng, d);
            let (cr, an) = (lib(fs.create_left(&xi))?, lib(fs.annihilate_left(&xi))?);
            for n in 0..fs.n_max() {
                let psi = FockVector::single(n, sample::vector(&mut rng, dim_pow(d, n)));
                let phi = FockVector::single(n + 1, sample::vector(&mut rng, dim_pow(d, n + 1)));
                let r = (fs.twisted_inner(&cr.apply(&psi), &phi)
                    - fs.twisted_inner(&psi, &an.apply(&phi)))
                .norm();
                adj = adj.max(r);
            }
        }
        for _ in 0..100 {
            let xi = sample::vector(&mut rng, d);
            for (n, v) in lib(fs.creation_level_norms(&xi))?.into_iter().enumerate() {
                let b = fs.creation_bound_constant(n).sqrt() * xi.norm();
                bound = bound.max((v - b) / b);
                if t.norm() < 1.0 {
                    let alt = xi.norm() / (1.0 - t.norm()).sqrt();
                    bound = bound.max((v - alt) / alt);
                }
            }
        }
    }
    ensure(adj <= EXACT, || format!("adjoint residual {adj:e}"))?;
    ensure(bound <= EXACT, || {
        format!("norm bound exceeded by {bound:e}")
    })?;
    Ok(format!(
        "adjoint {adj:.1e}, worst relative bound excess {bound:.1e}"
    ))
}

fn c6_mixed_commutators() -> Outcome {
    let mut rng = sample::rng(6);
    let mut worst: f64 = 0.0;
    let mut vac: f64 = 0.0;
    for t in [fixtures::q_flip(0.5), g("zero")] {
        let fs = lib(FockSpace::build(&t, 5))?;
        for _ in 0..5 {
            let (xi, eta) = (sample::vector(&mut rng, 2), sample::vector(&mut rng, 2));
            let r = lib(fs.mixed_commutators(&xi, &eta))?;
            worst = worst
                .max(r.creation)
                .max(r.annihilation)
                .max(r.left_right)
                .max(r.right_left);
            vac = vac.max(r.vacuum);
        }
    }
    ensure(worst <= EXACT, || format!("commutator residual {worst:e}"))?;
    ensure(vac <= VACUUM_TOL, || format!("vacuum residual {vac:e}"))?;
    Ok(format!("four identities {worst:.1e}, vacuum {vac:.1e}"))
}

fn c7_diagrams() -> Outcome {
    let counts: Vec<usize> = (1..=3)
        .map(|n| enumerate_diagrams(n).map(|v| v.len()))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    ensure(counts == [1, 3, 15], || format!("counts {counts:?}"))?;
    let mut hist = [0usize; 4];
    for dg in lib(enumerate_diagrams(3))? {
        hist[dg.crossing_count()] += 1;
    }
    ensure(hist == [5, 6, 3, 1], || {
        format!("crossing multiset {hist:?}")
    })?;

    let t = fixtures::q_flip(0.5);
    let h = fixtures::two_level_h();
    let fs = lib(FockSpace::build(&t, 3))?;
    let mut rng = sample::rng(7);
    let (mut sum_res, mut term_res): (f64, f64) = (0.0, 0.0);
    for n in 1..=3 {
        for _ in 0..20 {
            let vs: Vec<_> = (0..2 * n).map(|_| sample::vector(&mut rng, 2)).collect();
            let z = c(0.3, -0.4);
            sum_res = sum_res.max(lib(npoint::diagram_sum_check(&fs, &h, &vs, z))?);
            let mut closed = [c(0.0, 0.0); 4];
            let mut sweep = [c(0.0, 0.0); 4];
            for dg in lib(enumerate_diagrams(n))? {
                closed[dg.crossing_count()] += lib(evaluate_diagram(&dg, &t, &h, &vs, z))?;
                sweep[dg.crossing_count()] += lib(evaluate_diagram_sweep(&dg, &t, &h, &vs, z))?;
            }
            for k in 0..4 {
                term_res = term_res.max((closed[k] - sweep[k]).norm());
            }
        }
    }
    ensure(sum_res <= ANALYTIC, || {
        format!("diagram sum residual {sum_res:e}")
    })?;
    ensure(term_res <= EXACT, || {
        format!("partial sums residual {term_res:e}")
    })?;
    Ok(format!(
        "counts 1/3/15, sum {sum_res:.1e}, w0..w3 {term_res:.1e}"
    ))
}

fn c8_kms() -> Outcome {
    let t = fixtures::q_flip(0.5);
    let grid = npoint::t_grid(8);
    let fs = lib(FockSpace::build(&t, 3))?;
    let mut rng = sample::rng(8);
    let (mut w, mut per): (f64, f64) = (0.0, 0.0);
    // rotated_k has Δ off the standard basis; qF is compatible with any Δ.
    for h in [fixtures::two_level_h(), fixtures::rotated_k()] {
        for n in 1..=3 {
            let vs: Vec<_> = (0..2 * n).map(|_| sample::vector(&mut rng, 2)).collect();
            let r = lib(npoint::kms_shift_check(&fs, &h, &vs, &grid))?;
            w = w.max(r.wightman);
            per = per.max(r.per_diagram);
        }
    }
    ensure(w <= ANALYTIC, || format!("kms residual {w:e}"))?;
    ensure(per <= ANALYTIC, || format!("rotation residual {per:e}"))?;
    let fs = lib(FockSpace::build(&fixtures::proj_pair_twist(), 2))?;
    let wit = lib(npoint::kms_shift_check(
        &fs,
        &fixtures::two_level_h(),
        &fixtures::kms_witness_vectors(),
        &[0.0],
    ))?;
    ensure(wit.wightman >= WITNESS_FLOOR, || {
        format!("witness {:e}", wit.wightman)
    })?;
    Ok(format!(
        "qF kms {w:.1e}, rotation {per:.1e}, qE⊗E witness {:.3}",
        wit.wightman
    ))
}

fn c9_equivalence() -> Outcome {
    let mut lines = Vec::new();
    for case in standard_cases() {
        let row = lib(mv::equivalence_row(
            case.name,
            &case.twist,
            &case.subspace,
            3,
            fixtures::LOCALITY_WITNESS_SEED,
        ))?;
        ensure(row.compatibility <= EXACT, || {
            format!("{} not compatible", case.name)
        })?;
        ensure(row.agree(), || {
            format!("{}: verdicts disagree {:?}", case.name, row.verdicts())
        })?;
        let all_pass = row.verdicts() == [true; 3];
        ensure(all_pass == case.standard, || {
            format!("{}: expected standard = {}", case.name, case.standard)
        })?;
        if case.standard {
            let worst = row.tomita_kms.max(row.algebraic).max(row.locality);
            ensure(worst <= ANALYTIC, || {
                format!("{}: residual {worst:e}", case.name)
            })?;
        }
        lines.push(case.name);
    }
    let t = fixtures::proj_pair_twist();
    let h = fixtures::two_level_h();
    let fs = lib(FockSpace::build(&t, 4))?;
    let kms = lib(npoint::kms_shift_check(
        &fs,
        &h,
        &fixtures::kms_witness_vectors(),
        &[0.0],
    ))?
    .wightman;
    let tom = lib(mv::tomita_consistency(
        &fs,
        &h,
        fixtures::TOMITA_WITNESS_DEGREE,
    ))?
    .per_degree[fixtures::TOMITA_WITNESS_DEGREE];
    let alg = lib(twist::crossing_residual(&t, &h, &twist::default_t_grid()))?;
    let loc = lib(mv::locality_residual(
        &fs,
        &h,
        1,
        1,
        fixtures::LOCALITY_WITNESS_SEED,
    ))?
    .n_crossing;
    for (what, r) in [
        ("kms", kms),
        ("tomita", tom),
        ("crossing", alg),
        ("n-crossing", loc),
    ] {
        ensure(r >= WITNESS_FLOOR, || format!("qE⊗E {what} witness {r:e}"))?;
    }
    Ok(format!(
        "{} members agree; qE⊗E witnesses kms {kms:.2}, tomita {tom:.2}, crossing {alg:.2}, n-crossing {loc:.2}",
        lines.len()
    ))
}

fn c10_modular() -> Outcome {
    let h = fixtures::two_level_h();
    let fs = lib(FockSpace::build(&fixtures::q_flip(0.5), 4))?;
    let tom = lib(mv::tomita_consistency(&fs, &h, 3))?.match_residual;
    ensure(tom <= ANALYTIC, || format!("tomita {tom:e}"))?;
    let flow = lib(mv::modular_flow_covariance(&fs, &h, &[0.3, -1.1, 2.0]))?;
    let j = flow.j_exchange.ok_or("J-exchange unavailable for qF")?;
    let cov = flow.covariance.max(flow.vacuum);
    ensure(cov <= EXACT && j <= EXACT, || {
        format!("covariance {cov:e}, J-exchange {j:e}")
    })?;
    let dual = lib(mv::duality_proxy(&fs, &h, 2))?.commutation;
    ensure(dual <= DUALITY_TOL, || format!("duality {dual:e}"))?;
    let fsf = lib(FockSpace::build(&g("flip"), 4))?;
    let lr = lib(mv::left_right_coincidence(&fsf, &h))?;
    ensure(lr <= EXACT, || format!("left/right {lr:e}"))?;
    Ok(format!(
        "tomita {tom:.1e}, flow {cov:.1e}, J {j:.1e}, duality {dual:.1e}, F left=right {lr:.1e}"
    ))
}

fn c11_nuclearity() -> Outcome {
    let (h, k) = (fixtures::two_level_h(), fixtures::two_level_k());
    let idx = lib(nuclearity::l2_index(&h, &k))?;
    let expect = 2f64.powf(-0.5) + 2f64.sqrt();
    ensure((idx - expect).abs() <= YBE_ZERO, || {
        format!("l2 index {idx}")
    })?;
    let r = lib(nuclearity::fock_l2_check(&fixtures::q_flip(0.5), &h, &k, 4))?;
    ensure(r.deviation <= NUCLEARITY_TOL, || {
        format!("deviation {:e}", r.deviation)
    })?;
    let gate =
        nuclearity::fock_l2_check(&fixtures::proj_pair_twist(), &h, &fixtures::rotated_k(), 3);
    ensure(
        matches!(gate, Err(twistlab::Error::Precondition { .. })),
        || "gate did not fire".into(),
    )?;
    Ok(format!(
        "index {idx:.12}, deviation {:.1e}, gate fires",
        r.deviation
    ))
}

fn payload(path: &std::path::Path) -> Result<String, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    Ok(serde_json::to_string(&v["payload"]).unwrap())
}

fn c12_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let bin = env!("CARGO_BIN_EXE_twistlab");
    let st = Command::new(bin)
        .args(["demo", "--out"])
        .arg(dir.path())
        .output()
        .map_err(|e| e.to_string())?;
    ensure(st.status.success(), || "demo failed".into())?;
    let cfg = dir.path().join("gallery_all.toml");
    let mut payloads = Vec::new();
    for run in ["a.json", "b.json"] {
        let out = dir.path().join(run);
        let st = Command::new(bin)
            .args(["run", "--quiet", "--seed", "7", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .status()
            .map_err(|e| e.to_string())?;
        ensure(st.code() == Some(0), || format!("run exited with {st}"))?;
        payloads.push(payload(&out)?);
    }
    ensure(payloads[0] == payloads[1], || "payloads differ".into())?;
    Ok(format!("payload {} bytes, identical", payloads[0].len()))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("twist classification table", c1_classification, 5),
        ("Yang-Baxter residuals", c2_yang_baxter, 1),
        ("permutation-sum oracle", c3_perm_sum, 10),
        ("tilde-R factorization", c4_tilde_factorization, 5),
        ("creation/annihilation contracts", c5_creation_contracts, 10),
        ("mixed commutator identities", c6_mixed_commutators, 5),
        ("diagram calculus", c7_diagrams, 60),
        ("KMS shift and rotation rule", c8_kms, 60),
        ("standardness equivalence", c9_equivalence, 120),
        ("modular data", c10_modular, 120),
        ("nuclearity arithmetic", c11_nuclearity, 10),
        ("determinism", c12_determinism, 600),
    ];
    let mut failed = 0;
    for (i, (name, f, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = f();
        let elapsed = start.elapsed();
        let out = match out {
            Ok(msg) if elapsed > Duration::from_secs(*budget) => {
                Err(format!("{msg}; over the {budget} s budget"))
            }
            other => other,
        };
        match out {
            Ok(msg) => println!(
                "PASS {:>2} {name}: {msg} [{:.2} s]",
                i + 1,
                elapsed.as_secs_f64()
            ),
            Err(msg) => {
                failed += 1;
                println!(
                    "FAIL {:>2} {name}: {msg} [{:.2} s]",
                    i + 1,
                    elapsed.as_secs_f64()
                );
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
