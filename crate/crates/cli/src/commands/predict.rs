use std::path::Path;

use tailsim_core::codesign::recommend;
use tailsim_core::penetration::{penetration_stiffness, sinkage_for};
use tailsim_core::shear::{compare_modes, drag_force};
use tailsim_core::units::{CM, CM2, N_PER_CM};
use tailsim_core::{ModelError, TailGeometry, TailMode};

use crate::error::CliResult;
use crate::output::{fmt_f64, fmt_opt, metadata_line, write_file, CsvTable};
use crate::schema::RunConfig;
use crate::svg::{BarChart, BarGroup, LineChart, Series, GREEN, ORANGE, PALETTE};
use crate::{PredictKind, Report};

fn error_cell(e: &ModelError) -> String {
    format!("{}: {e}", e.kind())
}

fn modes(cfg: &RunConfig) -> [TailMode; 2] {
    [TailMode::Idle, TailMode::Oscillate(cfg.oscillation)]
}

struct ModeResult {
    k_z: Option<f64>,
    sinkage: Option<f64>,
    drag: Option<f64>,
    error: Option<String>,
}

fn evaluate(cfg: &RunConfig, tail: &TailGeometry, mode: TailMode) -> ModeResult {
    let k_z = penetration_stiffness(&cfg.substrate, tail.area(), mode).ok();
    match sinkage_for(&cfg.substrate, tail, mode, &cfg.robot) {
        Ok(d) => match drag_force(&cfg.substrate, mode, &cfg.body, d) {
            Ok(f) => ModeResult {
                k_z,
                sinkage: Some(d),
                drag: Some(f),
                error: None,
            },
            Err(e) => ModeResult {
                k_z,
                sinkage: Some(d),
                drag: None,
                error: Some(error_cell(&e)),
            },
        },
        Err(e) => ModeResult {
            k_z,
            sinkage: None,
            drag: None,
            error: Some(error_cell(&e)),
        },
    }
}

fn sinkage_and_drag(cfg: &RunConfig, with_drag: bool) -> (CsvTable, Vec<[ModeResult; 2]>) {
    let mut header = vec!["label", "area_cm2", "mode", "k_z_n_per_cm", "sinkage_cm"];
    if with_drag {
        header.push("drag_n");
    }
    header.push("error");
    let mut table = CsvTable::new(header);
    let mut results = Vec::new();
    for tail in &cfg.tails {
        let pair = modes(cfg).map(|m| evaluate(cfg, tail, m));
        for (mode, r) in modes(cfg).iter().zip(&pair) {
            let mut row = vec![
                tail.label().to_string(),
                fmt_f64(tail.area() / CM2),
                mode.name().to_string(),
                fmt_opt(r.k_z.map(|k| k / N_PER_CM)),
                fmt_opt(r.sinkage.map(|d| d / CM)),
            ];
            if with_drag {
                row.push(fmt_opt(r.drag));
            }
            row.push(r.error.clone().unwrap_or_default());
            table.push(row);
        }
        results.push(pair);
    }
    (table, results)
}

fn ratio_table(cfg: &RunConfig) -> (CsvTable, Vec<Option<f64>>) {
    let mut table = CsvTable::new(vec![
        "label",
        "area_cm2",
        "sinkage_idle_cm",
        "sinkage_osc_cm",
        "drag_idle_n",
        "drag_osc_n",
        "ratio",
        "recommendation",
        "error",
    ]);
    let mut ratios = Vec::new();
    for tail in &cfg.tails {
        let mut row = vec![tail.label().to_string(), fmt_f64(tail.area() / CM2)];
        match compare_modes(&cfg.substrate, tail, &cfg.body, &cfg.robot) {
            Ok(c) => {
                let ratio = c.ratio();
                row.extend([
                    fmt_f64(c.sink_idle / CM),
                    fmt_f64(c.sink_osc / CM),
                    fmt_f64(c.drag_idle),
                    fmt_f64(c.drag_osc),
                ]);
                match ratio {
                    Ok(r) => {
                        row.extend([
                            fmt_f64(r),
                            recommend(r, cfg.epsilon).as_str().to_string(),
                            String::new(),
                        ]);
                        ratios.push(Some(r));
                    }
                    Err(e) => {
                        row.extend([String::new(), String::new(), error_cell(&e)]);
                        ratios.push(None);
                    }
                }
            }
            Err(e) => {
                // Still report the idle side when only oscillation fails.
                let idle = evaluate(cfg, tail, TailMode::Idle);
                let rec = if idle.drag.is_some() { "idle" } else { "" };
                row.extend([
                    fmt_opt(idle.sinkage.map(|d| d / CM)),
                    String::new(),
                    fmt_opt(idle.drag),
                    String::new(),
                    String::new(),
                    rec.to_string(),
                    error_cell(&e),
                ]);
                ratios.push(None);
            }
        }
        table.push(row);
    }
    (table, ratios)
}

pub fn run(kind: PredictKind, config: &Path, svg: bool) -> CliResult<Report> {
    let cfg = RunConfig::load(config)?;
    let name = match kind {
        PredictKind::Sinkage => "sinkage",
        PredictKind::Drag => "drag",
        PredictKind::Ratio => "ratio",
    };
    let meta = metadata_line(&cfg.inputs, &[("cmd", format!("predict-{name}"))]);
    let labels: Vec<String> = cfg.tails.iter().map(|t| t.label().to_string()).collect();
    let areas: Vec<f64> = cfg.tails.iter().map(|t| t.area() / CM2).collect();

    let (table, chart) = match kind {
        PredictKind::Sinkage | PredictKind::Drag => {
            let with_drag = kind == PredictKind::Drag;
            let (table, results) = sinkage_and_drag(&cfg, with_drag);
            let pick = |r: &ModeResult| if with_drag { r.drag } else { r.sinkage.map(|d| d / CM) };
            let chart = if with_drag {
                LineChart {
                    title: "Drag vs tail area".into(),
                    x_label: "tail area (cm²)".into(),
                    y_label: "drag (N)".into(),
                    series: ["idle", "oscillate"]
                        .iter()
                        .enumerate()
                        .map(|(i, m)| Series {
                            name: (*m).into(),
                            color: [GREEN, ORANGE][i],
                            points: areas
                                .iter()
                                .zip(&results)
                                .map(|(&a, r)| (a, pick(&r[i]).unwrap_or(f64::NAN)))
                                .collect(),
                        })
                        .collect(),
                    ..Default::default()
                }
                .render()
            } else {
                BarChart {
                    title: "Rear sinkage by tail".into(),
                    x_label: "tail".into(),
                    y_label: "sinkage (cm)".into(),
                    categories: labels,
                    groups: vec![
                        BarGroup {
                            name: "idle".into(),
                            color: GREEN,
                            values: results.iter().map(|r| pick(&r[0])).collect(),
                        },
                        BarGroup {
                            name: "oscillate".into(),
                            color: ORANGE,
                            values: results.iter().map(|r| pick(&r[1])).collect(),
                        },
                    ],
                }
                .render()
            };
            (table, chart)
        }
        PredictKind::Ratio => {
            let (table, ratios) = ratio_table(&cfg);
            let chart = LineChart {
                title: "Drag ratio R = oscillate / idle".into(),
                x_label: "tail area (cm²)".into(),
                y_label: "R".into(),
                series: vec![Series {
                    name: "R".into(),
                    color: PALETTE[0],
                    points: areas
                        .iter()
                        .zip(&ratios)
                        .map(|(&a, r)| (a, r.unwrap_or(f64::NAN)))
                        .collect(),
                }],
                hlines: vec![(1.0, "R = 1".into())],
                ..Default::default()
            }
            .render();
            (table, chart)
        }
    };

    let mut files = vec![write_file(
        &cfg.output_dir,
        &format!("{name}.csv"),
        &table.render(&meta)?,
    )?];
    if svg {
        files.push(write_file(&cfg.output_dir, &format!("{name}.svg"), &chart)?);
    }
    let stdout = files.iter().map(|f| format!("wrote {}\n", f.display())).collect();
    Ok(Report { stdout, files })
}
