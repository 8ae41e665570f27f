use std::path::Path;

use tailsim_core::gait::simulate;
use tailsim_core::units::{CM, CM2, CM_PER_S};
use tailsim_core::TailMode;

use crate::error::{CliError, CliResult};
use crate::output::{fmt_f64, fmt_opt, metadata_line, write_file, CsvTable};
use crate::schema::RunConfig;
use crate::svg::{LineChart, Series, PALETTE};
use crate::{ModeSelect, Report};

pub fn run(config: &Path, steps: usize, select: ModeSelect) -> CliResult<Report> {
    if steps == 0 {
        return Err(CliError::input("--steps must be >= 1"));
    }
    let cfg = RunConfig::load(config)?;
    let modes: Vec<TailMode> = match select {
        ModeSelect::Idle => vec![TailMode::Idle],
        ModeSelect::Oscillate => vec![TailMode::Oscillate(cfg.oscillation)],
        ModeSelect::Both => vec![TailMode::Idle, TailMode::Oscillate(cfg.oscillation)],
    };

    let mut table = CsvTable::new(vec![
        "label",
        "area_cm2",
        "mode",
        "step",
        "d_rear_cm",
        "d_front_cm",
        "pitch_deg",
        "drag_n",
        "speed_cm_s",
        "x_cm",
        "stuck",
    ]);
    let mut series = Vec::new();
    let mut stdout = String::new();
    for tail in &cfg.tails {
        for &mode in &modes {
            let records = simulate(&cfg.robot, &cfg.substrate, tail, mode, steps, &cfg.gait)?;
            for r in &records {
                table.push(vec![
                    tail.label().to_string(),
                    fmt_f64(tail.area() / CM2),
                    mode.name().to_string(),
                    r.step.to_string(),
                    fmt_opt(r.d_rear.map(|d| d / CM)),
                    fmt_f64(r.d_front / CM),
                    fmt_opt(r.pitch),
                    fmt_opt(r.drag),
                    fmt_f64(r.speed / CM_PER_S),
                    fmt_f64(r.x / CM),
                    r.stuck.clone().unwrap_or_default(),
                ]);
            }
            let last = records.last().expect("at least one step");
            stdout.push_str(&format!(
                "{} {}: x = {} cm after {steps} steps{}\n",
                tail.label(),
                mode.name(),
                last.x / CM,
                if last.is_stuck() { " (stuck)" } else { "" }
            ));
            series.push(Series {
                name: format!("{} {}", tail.label(), mode.name()),
                color: PALETTE[series.len() % PALETTE.len()],
                points: std::iter::once((0.0, 0.0))
                    .chain(records.iter().map(|r| ((r.step + 1) as f64, r.x / CM)))
                    .collect(),
            });
        }
    }

    let meta = metadata_line(
        &cfg.inputs,
        &[("cmd", "simulate".to_string()), ("steps", steps.to_string())],
    );
    let mut files = vec![write_file(&cfg.output_dir, "trajectory.csv", &table.render(&meta)?)?];
    let svg = LineChart {
        title: "Forward progress".into(),
        x_label: "flipper cycle".into(),
        y_label: "x (cm)".into(),
        series,
        ..Default::default()
    }
    .render();
    files.push(write_file(&cfg.output_dir, "traj.svg", &svg)?);
    for f in &files {
        stdout.push_str(&format!("wrote {}\n", f.display()));
    }
    Ok(Report { stdout, files })
}
