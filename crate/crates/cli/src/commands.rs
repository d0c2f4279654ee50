//! Subcommand implementations.

use std::io::Write;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use spinorbit::cascade::{final_survivor, run_cascade, stage_counts};
use spinorbit::conformance::{bs_table, pbs_table, ConformanceRow};
use spinorbit::protocol::{
    hom_scan, overlap_for_visibility, run_scenario, Interferometer, NoiseParams, Scenario, TeleportReport,
    WavepacketModel, MEASURED_FIDELITIES,
};
use spinorbit::sources::InputStateId;
use spinorbit::Exec;

use crate::config::{FileConfig, Preset};
use crate::error::CliError;
use crate::report::{Cell, Report};
use crate::{Cli, Command, InterferometerArg, NoiseFlags};

/// Survivor lists longer than this are omitted from reports.
const MAX_LISTED: usize = 64;

struct Ctx {
    file: FileConfig,
    config_path: String,
    seed: u64,
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let (file, config_path) = match &cli.config {
        Some(p) => (FileConfig::load(p)?, p.display().to_string()),
        None => (FileConfig::default(), String::new()),
    };
    let seed = cli.seed.or(file.output.seed).unwrap_or(0);
    let format = cli.format.or(file.output.format).unwrap_or_default();
    let ctx = Ctx {
        file,
        config_path,
        seed,
    };
    let report = match &cli.command {
        Command::Teleport(a) => teleport(&ctx, a)?,
        Command::BsmTable => bsm_table(&ctx),
        Command::Hom(a) => hom(&ctx, a)?,
        Command::Cascade(a) => cascade(&ctx, a)?,
        Command::Budget(a) => budget(&ctx, &a.noise)?,
    };
    let text = report.render(format)?;
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

impl Ctx {
    fn config_error(&self, message: String) -> CliError {
        CliError::Config {
            path: self.config_path.clone(),
            message,
        }
    }

    /// Preset, then the file's `[noise]` table, then flags.
    fn noise(&self, flags: &NoiseFlags, default: Preset) -> Result<(Preset, NoiseParams), CliError> {
        let preset = if flags.ideal {
            Preset::Ideal
        } else {
            flags.preset.or(self.file.scenario.preset).unwrap_or(default)
        };
        let mut n = preset.params();
        if !flags.ideal {
            n = self.file.overlay_noise(n).map_err(|m| self.config_error(m))?;
        }
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut n.background, flags.background);
        set(&mut n.overlap_pbs, flags.overlap_pbs);
        set(&mut n.overlap_bs1, flags.overlap_bs1);
        set(&mut n.overlap_bs2, flags.overlap_bs2);
        set(&mut n.pair23_fidelity, flags.pair23_fidelity);
        set(&mut n.pair45_fidelity, flags.pair45_fidelity);
        set(&mut n.input_state_fidelity, flags.input_fidelity);
        set(&mut n.oam_leakage, flags.oam_leakage);
        n.lossy_elements |= flags.lossy;
        n.validate()?;
        Ok((preset, n))
    }
}

fn preset_name(p: Preset) -> &'static str {
    match p {
        Preset::Ideal => "ideal",
        Preset::Calibrated => "calibrated",
    }
}

fn teleport(ctx: &Ctx, a: &crate::TeleportArgs) -> Result<Report, CliError> {
    let sc = &ctx.file.scenario;
    let states: Vec<InputStateId> = if a.all || (a.state.is_none() && sc.all.unwrap_or(false)) {
        InputStateId::ALL.to_vec()
    } else {
        let s = a
            .state
            .as_ref()
            .or(sc.state.as_ref())
            .ok_or_else(|| CliError::Usage("specify --state <A-E> or --all".into()))?;
        vec![s.parse().map_err(CliError::Usage)?]
    };
    let (preset, noise) = ctx.noise(&a.noise, Preset::Ideal)?;
    let ancilla = !a.no_ancilla && sc.ancilla.unwrap_or(true);
    let shots = a.shots.or(sc.shots);

    let mut columns = vec!["state", "success_probability", "fidelity", "xx", "yy", "zz"];
    if shots.is_some() {
        columns.extend(["shots", "accepted"]);
    }
    let mut report = Report::new("teleport", ctx.seed, columns);
    report.summary("preset", json!(preset_name(preset)));
    report.summary("ancilla", json!(ancilla));
    report.summary("noise", serde_json::to_value(noise)?);

    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    for id in states {
        let r = run_scenario(
            &Scenario {
                input: id,
                noise,
                ancilla,
            },
            Exec::Parallel,
        )?;
        let (mut row, mut record) = teleport_row(&r);
        if let Some(n) = shots {
            let counts = sample_counts(&r, n, &mut rng);
            let accepted: u64 = counts.iter().sum();
            row.extend([Cell::from(n), Cell::from(accepted)]);
            record["shots"] = json!(n);
            record["counts"] = json!(r
                .outcomes
                .iter()
                .zip(&counts)
                .map(|(o, c)| json!({"outcome": o.outcome.ascii(), "count": c}))
                .collect::<Vec<_>>());
        }
        report.push(row, record);
    }
    Ok(report)
}

fn teleport_row(r: &TeleportReport) -> (Vec<Cell>, Value) {
    let name = r.input_id.map_or("custom", InputStateId::name);
    let (xx, yy, zz) = r.pauli_expectations.unwrap_or((f64::NAN, f64::NAN, f64::NAN));
    let row = vec![
        name.into(),
        r.success_probability.into(),
        r.fidelity.into(),
        xx.into(),
        yy.into(),
        zz.into(),
    ];
    let record = json!({
        "state": name,
        "success_probability": r.success_probability,
        "fidelity": r.fidelity,
        "pauli_expectations": {"xx": xx, "yy": yy, "zz": zz},
        "outcomes": r.outcomes.iter().map(|o| json!({
            "outcome": o.outcome.ascii(),
            "probability": o.probability,
            "fidelity": o.fidelity,
        })).collect::<Vec<_>>(),
    });
    (row, record)
}

/// Accepted events per identified outcome among `shots` trials.
fn sample_counts(r: &TeleportReport, shots: u64, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let mut weights: Vec<f64> = r.outcomes.iter().map(|o| o.probability).collect();
    weights.push((1.0 - weights.iter().sum::<f64>()).max(0.0));
    let dist = WeightedIndex::new(&weights).expect("probabilities are finite and not all zero");
    let mut counts = vec![0u64; weights.len()];
    for _ in 0..shots {
        counts[dist.sample(rng)] += 1;
    }
    counts.pop();
    counts
}

fn bsm_table(ctx: &Ctx) -> Report {
    let mut report = Report::new(
        "bsm-table",
        ctx.seed,
        vec!["table", "input", "overlap", "global_phase", "coincidence", "status"],
    );
    let mut add = |table: &'static str, rows: Vec<ConformanceRow>| {
        for r in rows {
            let status = if r.matches { "MATCH" } else { "MISMATCH" };
            report.push(
                vec![
                    table.into(),
                    r.input.clone().into(),
                    r.overlap.into(),
                    r.global_phase.into(),
                    r.coincidence.into(),
                    status.into(),
                ],
                json!({
                    "table": table,
                    "input": r.input,
                    "overlap": r.overlap,
                    "global_phase": r.global_phase,
                    "coincidence": r.coincidence,
                    "status": status,
                }),
            );
        }
    };
    add("pbs", pbs_table());
    add("bs", bs_table());
    report
}

fn hom(ctx: &Ctx, a: &crate::HomArgs) -> Result<Report, CliError> {
    let h = &ctx.file.hom;
    let kind = match a.interferometer {
        Some(InterferometerArg::Pbs) => Interferometer::Pbs,
        Some(InterferometerArg::Bs1) => Interferometer::Bs1,
        Some(InterferometerArg::Bs2) => Interferometer::Bs2,
        None => h.interferometer.unwrap_or(Interferometer::Bs1),
    };
    let tau_fs = a.tau.or(h.tau_fs).unwrap_or(448.0);
    let peak_overlap = match (a.overlap, a.visibility.or(if a.overlap.is_some() { None } else { h.visibility })) {
        (Some(x), _) => x,
        (None, Some(v)) => overlap_for_visibility(kind, v)?,
        (None, None) => h.peak_overlap.unwrap_or(1.0),
    };
    let max = a.delay_max.or(h.delay_max_fs).unwrap_or(1500.0);
    let step = a.delay_step.or(h.delay_step_fs).unwrap_or(100.0);
    if !(step > 0.0) || !(max >= 0.0) {
        return Err(CliError::Usage("delay step must be positive and delay max non-negative".into()));
    }
    let k = (max / step).floor() as i64;
    let delays: Vec<f64> = (-k..=k).map(|i| i as f64 * step).collect();
    let model = WavepacketModel { tau_fs, peak_overlap };
    let scan = hom_scan(kind, &delays, &model)?;

    let mut columns = vec!["delay_fs", "overlap", "coincidence"];
    if scan.coincidences_orthogonal.is_some() {
        columns.push("coincidence_orthogonal");
    }
    let mut report = Report::new("hom", ctx.seed, columns);
    report.summary("interferometer", serde_json::to_value(kind)?);
    report.summary("tau_fs", json!(tau_fs));
    report.summary("peak_overlap", json!(peak_overlap));
    report.summary("visibility", json!(scan.visibility));
    report.summary("formula", serde_json::to_value(scan.formula)?);
    for (i, &d) in scan.delays.iter().enumerate() {
        let x = model.overlap(d);
        let mut row = vec![d.into(), x.into(), scan.coincidences[i].into()];
        let mut record = json!({"delay_fs": d, "overlap": x, "coincidence": scan.coincidences[i]});
        if let Some(o) = &scan.coincidences_orthogonal {
            row.push(o[i].into());
            record["coincidence_orthogonal"] = json!(o[i]);
        }
        report.push(row, record);
    }
    Ok(report)
}

fn cascade(ctx: &Ctx, a: &crate::CascadeArgs) -> Result<Report, CliError> {
    let n = a.n.or(ctx.file.cascade.n).unwrap_or(3);
    let stages = run_cascade(n)?;
    let counts = stage_counts(&stages);
    let sequence = counts.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" → ");
    let last = final_survivor(&stages).map(|v| v.to_string()).unwrap_or_default();

    let mut report = Report::new(
        "cascade",
        ctx.seed,
        vec!["stage", "kind", "survivors_in", "survivors_out", "survivors"],
    );
    report.summary("n", json!(n));
    report.summary("counts", json!(sequence));
    report.summary("final", json!(last));
    for (i, s) in stages.iter().enumerate() {
        let listed = (s.survivors_out.len() <= MAX_LISTED)
            .then(|| s.survivors_out.iter().map(|v| v.to_string()).collect::<Vec<_>>());
        let text = listed.as_ref().map_or_else(|| "...".to_string(), |l| l.join(" "));
        report.push(
            vec![
                (i + 1).into(),
                s.kind.to_string().into(),
                s.survivors_in.len().into(),
                s.survivors_out.len().into(),
                text.into(),
            ],
            json!({
                "stage": i + 1,
                "kind": s.kind,
                "survivors_in": s.survivors_in.len(),
                "survivors_out": s.survivors_out.len(),
                "survivors": listed,
            }),
        );
    }
    Ok(report)
}

fn budget(ctx: &Ctx, flags: &NoiseFlags) -> Result<Report, CliError> {
    let (preset, noise) = ctx.noise(flags, Preset::Calibrated)?;
    let mut report = Report::new(
        "budget",
        ctx.seed,
        vec!["state", "fidelity", "measured", "success_probability", "xx", "yy", "zz"],
    );
    report.summary("preset", json!(preset_name(preset)));
    report.summary("noise", serde_json::to_value(noise)?);
    for (id, measured) in InputStateId::ALL.into_iter().zip(MEASURED_FIDELITIES) {
        let r = run_scenario(
            &Scenario {
                input: id,
                noise,
                ancilla: true,
            },
            Exec::Parallel,
        )?;
        let (xx, yy, zz) = r.pauli_expectations.unwrap_or((f64::NAN, f64::NAN, f64::NAN));
        report.push(
            vec![
                id.name().into(),
                r.fidelity.into(),
                measured.into(),
                r.success_probability.into(),
                xx.into(),
                yy.into(),
                zz.into(),
            ],
            json!({
                "state": id.name(),
                "fidelity": r.fidelity,
                "measured": measured,
                "success_probability": r.success_probability,
                "pauli_expectations": {"xx": xx, "yy": yy, "zz": zz},
            }),
        );
    }
    Ok(report)
}
