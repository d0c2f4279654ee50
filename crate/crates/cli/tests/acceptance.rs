//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spinorbit::cascade::{amplitude_check, final_survivor, run_cascade, stage_counts};
use spinorbit::conformance::{bs_table, pbs_table};
use spinorbit::measurement::{hbsm_table, hbsm_uniform_efficiency, hyper_bell_decompose, qnd_teleport, IDENTIFIED};
use spinorbit::optical::{extract_qubit_pair_density, PauliOp, PureState, QubitPairState};
use spinorbit::protocol::{
    feed_forward_plan, hom_visibility, overlap_for_visibility, plan_transforms, run_teleportation, swap_gate,
    Interferometer, NoiseParams, CLASSICAL_LIMIT, MEASURED_VISIBILITIES,
};
use spinorbit::sources::{hyper_bell_state, hyper_entangled_pair, InputStateId};
use spinorbit::Exec;

const STRUCT_TOL: f64 = 1e-9;
const ZERO_TOL: f64 = 1e-12;
const INVERSION_TOL: f64 = 1e-6;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("runtime {t:.2?} exceeds {limit:?}"))
}

fn sim<T>(r: spinorbit::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn c1_pbs_conformance() -> Check {
    let t = Instant::now();
    let rows = pbs_table();
    ensure(rows.len() == 16, || format!("{} rows", rows.len()))?;
    let worst = rows.iter().map(|r| r.overlap).fold(f64::INFINITY, f64::min);
    for r in &rows {
        ensure(r.overlap >= 1.0 - STRUCT_TOL, || format!("{}: overlap {}", r.input, r.overlap))?;
    }
    within(Duration::from_secs(1), t)?;
    Ok(format!("16 rows, min overlap {worst:.12}"))
}

fn c2_bs_conformance() -> Check {
    let t = Instant::now();
    let rows = bs_table();
    ensure(rows.len() == 4, || format!("{} rows", rows.len()))?;
    for r in &rows {
        ensure(r.overlap >= 1.0 - STRUCT_TOL, || format!("{}: overlap {}", r.input, r.overlap))?;
        let fires = r.coincidence > ZERO_TOL;
        ensure(fires == (r.input == "ω-"), || format!("{}: coincidence {}", r.input, r.coincidence))?;
    }
    within(Duration::from_secs(1), t)?;
    Ok("4 rows, coincidence only for ω-".into())
}

fn c3_decomposition() -> Check {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut dp, mut df) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let q = QubitPairState::random(&mut rng);
        let entries = hyper_bell_decompose(&q);
        ensure(entries.len() == 16, || format!("{} outcomes", entries.len()))?;
        for e in entries {
            dp = dp.max((e.probability - 1.0 / 16.0).abs());
            df = df.max((e.corrected_fidelity - 1.0).abs());
        }
    }
    ensure(dp <= STRUCT_TOL, || format!("probability deviation {dp:e}"))?;
    ensure(df <= STRUCT_TOL, || format!("fidelity deviation {df:e}"))?;
    within(Duration::from_secs(10), t)?;
    Ok(format!("100 inputs, max |p-1/16| {dp:.1e}, max |F-1| {df:.1e}"))
}

fn c4_hbsm_efficiency() -> Check {
    let t = Instant::now();
    let table = sim(hbsm_table(Exec::Parallel))?;
    ensure(table.len() == 16, || format!("{} labels", table.len()))?;
    let mut per_label = Vec::new();
    for (label, r) in &table {
        if IDENTIFIED.contains(label) {
            ensure(r.identified == Some(*label), || format!("{label}: identified {:?}", r.identified))?;
            per_label.push(r.success_probability);
        } else {
            ensure(r.success_probability < ZERO_TOL, || format!("{label}: false positive {}", r.success_probability))?;
        }
    }
    let eff = hbsm_uniform_efficiency(&table);
    ensure((eff - 1.0 / 32.0).abs() <= STRUCT_TOL, || format!("uniform efficiency {eff}"))?;
    let teleport = sim(run_teleportation(InputStateId::A, &NoiseParams::ideal()))?;
    ensure((teleport.success_probability - 1.0 / 32.0).abs() <= STRUCT_TOL, || {
        format!("teleportation success {}", teleport.success_probability)
    })?;
    within(Duration::from_secs(30), t)?;
    Ok(format!(
        "efficiency over 16 equiprobable inputs {eff:.12}, 14 others < 1e-12, per identified label {:.6}/{:.6}",
        per_label[0], per_label[1]
    ))
}

fn c5_ideal_teleportation() -> Check {
    let mut fids = Vec::new();
    for id in InputStateId::ALL {
        let r = sim(run_teleportation(id, &NoiseParams::ideal()))?;
        ensure((r.fidelity - 1.0).abs() <= STRUCT_TOL, || format!("{}: F {}", id.name(), r.fidelity))?;
        fids.push(r.fidelity);
        if id == InputStateId::E {
            let (xx, yy, zz) = r.pauli_expectations.ok_or("no correlations for E")?;
            for (got, want) in [(xx, 1.0), (yy, -1.0), (zz, 1.0)] {
                ensure((got - want).abs() <= STRUCT_TOL, || format!("E correlations {:?}", (xx, yy, zz)))?;
            }
            let from_corr = r.density.fidelity_e_from_correlations();
            let direct = r.density.fidelity(&id.qubits());
            ensure((from_corr - direct).abs() <= STRUCT_TOL, || format!("{from_corr} vs {direct}"))?;
        }
    }
    Ok("F = 1 for A-E, E correlations (1, -1, 1)".into())
}

fn c6_qnd() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..10 {
        let r = QubitPairState::random(&mut rng);
        let q = QubitPairState::new(r.amplitudes()[0], r.amplitudes()[1], 0.0.into(), 0.0.into())
            .normalized()
            .map_err(|e| e.to_string())?;
        let res = sim(qnd_teleport(&q.to_pure(1), 1, (4, 5)))?;
        ensure((res.herald_probability - 0.5).abs() <= STRUCT_TOL, || format!("herald {}", res.herald_probability))?;
        for (o, p, fix, cond) in &res.outcomes {
            if *p < ZERO_TOL {
                continue;
            }
            let cond = cond.as_ref().ok_or("missing conditional state")?;
            let rho = sim(extract_qubit_pair_density(cond, 5))?.conjugated(&PauliOp::oam(*fix).embedded());
            let f = rho.fidelity(&q);
            ensure((f - 1.0).abs() <= STRUCT_TOL, || format!("{o:?}: F {f}"))?;
        }
    }
    let vac = sim(qnd_teleport(&PureState::vacuum(), 1, (4, 5)))?;
    ensure(vac.herald_probability == 0.0, || format!("vacuum herald {}", vac.herald_probability))?;
    Ok("herald 1/2, vacuum 0, heralded F = 1".into())
}

fn c7_noise() -> Check {
    let base = NoiseParams {
        overlap_bs1: 0.8,
        ..NoiseParams::ideal()
    };
    let with_bg = NoiseParams {
        background: 0.15,
        ..base
    };
    for id in InputStateId::ALL {
        let f0 = sim(run_teleportation(id, &base))?.fidelity;
        let f = sim(run_teleportation(id, &with_bg))?.fidelity;
        let want = 0.85 * f0 + 0.0375;
        ensure((f - want).abs() <= STRUCT_TOL, || format!("{}: {f} vs 0.85*{f0}+0.0375", id.name()))?;
    }

    let pbs = NoiseParams {
        overlap_pbs: 0.8,
        ..NoiseParams::ideal()
    };
    for id in InputStateId::ALL {
        let f0 = sim(run_teleportation(id, &NoiseParams::ideal()))?.fidelity;
        let f = sim(run_teleportation(id, &pbs))?.fidelity;
        match id {
            InputStateId::A | InputStateId::B => {
                ensure((f - f0).abs() <= STRUCT_TOL, || format!("{} not immune: {f}", id.name()))?
            }
            _ => ensure(f < f0 - STRUCT_TOL, || format!("{} did not decrease: {f}", id.name()))?,
        }
    }

    let mut cal = Vec::new();
    for id in InputStateId::ALL {
        let f = sim(run_teleportation(id, &NoiseParams::calibrated()))?.fidelity;
        ensure((0.5..=0.8).contains(&f), || format!("calibrated {}: {f}", id.name()))?;
        ensure(f > CLASSICAL_LIMIT, || format!("{} below classical limit", id.name()))?;
        cal.push(format!("{}={f:.4}", id.name()));
    }
    Ok(format!(
        "mixing law exact, A/B immune to PBS overlap, calibrated {} (E above 0.5)",
        cal.join(" ")
    ))
}

fn c8_hom() -> Check {
    let kinds = [Interferometer::Pbs, Interferometer::Bs1, Interferometer::Bs2];
    for k in kinds {
        let v = sim(hom_visibility(k, 1.0))?;
        ensure((v - 1.0).abs() <= STRUCT_TOL, || format!("{k:?}: V(1) = {v}"))?;
        let grid: Vec<f64> = (0..=100).map(|i| sim(hom_visibility(k, i as f64 / 100.0))).collect::<Result<_, _>>()?;
        ensure(grid.windows(2).all(|w| w[1] >= w[0] - ZERO_TOL), || format!("{k:?}: not monotone"))?;
    }
    let mut shown = Vec::new();
    for (k, target) in kinds.into_iter().zip(MEASURED_VISIBILITIES) {
        let x = sim(overlap_for_visibility(k, target))?;
        let v = sim(hom_visibility(k, x))?;
        ensure((v - target).abs() <= INVERSION_TOL, || format!("{k:?}: {v} vs {target}"))?;
        shown.push(format!("{target}->{x:.6}"));
    }
    Ok(format!("V(1) = 1, monotone, inversions {}", shown.join(" ")))
}

fn c9_cascade() -> Check {
    let t = Instant::now();
    let cases: [(usize, &[usize], &str); 3] = [
        (3, &[64, 28, 16, 6, 4, 1], "(ψ+,ψ+,ψ-)"),
        (2, &[16, 6, 4, 1], "(ψ+,ψ-)"),
        (1, &[4, 1], "(ψ-)"),
    ];
    for (n, counts, last) in cases {
        let stages = sim(run_cascade(n))?;
        let got = stage_counts(&stages);
        ensure(got == counts, || format!("N={n}: {got:?}"))?;
        let fin = final_survivor(&stages).map(|v| v.to_string()).unwrap_or_default();
        ensure(fin == last, || format!("N={n}: final {fin}"))?;
    }
    for n in [1, 2] {
        sim(amplitude_check(n))?;
    }
    within(Duration::from_secs(5), t)?;
    Ok("64 → 28 → 16 → 6 → 4 → 1, 16 → 6 → 4 → 1, 4 → 1, amplitude agreement N ≤ 2".into())
}

fn c10_feed_forward() -> Check {
    let swap = swap_gate(1);
    let run = |q: &QubitPairState| -> Result<QubitPairState, String> {
        let out = q.to_pure(1).apply(&swap).map_err(|e| e.to_string())?;
        QubitPairState::from_pure(&out, 1).map_err(|e| e.to_string())
    };
    for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        let out = run(&QubitPairState::basis(i))?;
        let m = out.overlap_modulus(&QubitPairState::basis(j));
        ensure(m >= 1.0 - STRUCT_TOL, || format!("|{i}> -> |{j}>: {m}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..100 {
        let q = QubitPairState::random(&mut rng);
        let m = run(&run(&q)?)?.overlap_modulus(&q);
        ensure(m >= 1.0 - STRUCT_TOL, || format!("swap∘swap overlap {m}"))?;
    }
    let paths: BTreeSet<u16> = [1, 2].into();
    for _ in 0..3 {
        let q = QubitPairState::random(&mut rng);
        let full = q.to_pure(1).tensor(&hyper_entangled_pair(2, 3));
        for label in spinorbit::sources::HyperBellLabel::all() {
            let residual = full
                .partial_overlap(&hyper_bell_state(label, 1, 2), &paths)
                .normalize()
                .map_err(|e| e.to_string())?;
            let fixed = residual
                .apply_all(&plan_transforms(&feed_forward_plan(label), 3))
                .map_err(|e| e.to_string())?;
            let f = QubitPairState::from_pure(&fixed, 3).map_err(|e| e.to_string())?.overlap_modulus(&q);
            ensure(f >= 1.0 - STRUCT_TOL, || format!("{label}: {f}"))?;
        }
    }
    Ok("SWAP truth table, swap∘swap = I on 100 states, 16 plans restore F = 1".into())
}

fn c11_determinism() -> Check {
    let bin = env!("CARGO_BIN_EXE_spinorbit");
    let runs: [&[&str]; 4] = [
        &["teleport", "--all", "--preset", "calibrated", "--shots", "5000", "--seed", "11", "--format", "json"],
        &["budget", "--format", "csv"],
        &["hom", "--interferometer", "pbs", "--visibility", "0.75", "--format", "json"],
        &["cascade", "--n", "4", "--format", "json"],
    ];
    for args in runs {
        let once = Command::new(bin).args(args).output().map_err(|e| e.to_string())?;
        let twice = Command::new(bin).args(args).output().map_err(|e| e.to_string())?;
        ensure(once.status.success(), || format!("{args:?} failed"))?;
        ensure(once.stdout == twice.stdout, || format!("{args:?} differs between runs"))?;
    }
    Ok("4 commands byte-identical across runs".into())
}

fn main() {
    let criteria: [(&str, fn() -> Check); 11] = [
        ("PBS conformance", c1_pbs_conformance),
        ("BS conformance", c2_bs_conformance),
        ("decomposition flatness", c3_decomposition),
        ("h-BSM efficiency", c4_hbsm_efficiency),
        ("ideal teleportation", c5_ideal_teleportation),
        ("QND contract", c6_qnd),
        ("noise brackets", c7_noise),
        ("HOM scans", c8_hom),
        ("cascade counts", c9_cascade),
        ("feed-forward", c10_feed_forward),
        ("determinism", c11_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        match check() {
            Ok(detail) => println!("PASS {:>2} {name} ({:.2?}): {detail}", i + 1, t.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({:.2?}): {why}", i + 1, t.elapsed());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
