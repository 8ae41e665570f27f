use tailsim_core::codesign::{CodesignProblem, Crossover};
use tailsim_core::units::{CM, CM2};
use tailsim_core::{CodesignRow, ModelError};

use super::parse_range;
use crate::error::{CliError, CliResult};
use crate::output::{fmt_f64, fmt_opt, metadata_line, write_file, CsvTable};
use crate::schema::RunConfig;
use crate::svg::{Band, LineChart, Series, GREEN, ORANGE, PALETTE};
use crate::{CodesignArgs, Report};

pub const CSV_HEADER: [&str; 8] = [
    "area_cm2",
    "sinkage_idle_cm",
    "sinkage_osc_cm",
    "drag_idle_n",
    "drag_osc_n",
    "ratio",
    "recommendation",
    "flag",
];

fn table(rows: &[CodesignRow]) -> CsvTable {
    let mut t = CsvTable::new(CSV_HEADER.to_vec());
    for r in rows {
        t.push(vec![
            fmt_f64(r.area / CM2),
            fmt_opt(r.sink_idle.map(|d| d / CM)),
            fmt_opt(r.sink_osc.map(|d| d / CM)),
            fmt_opt(r.drag_idle),
            fmt_opt(r.drag_osc),
            fmt_opt(r.ratio),
            r.recommendation.as_str().to_string(),
            r.flag.clone().unwrap_or_default(),
        ]);
    }
    t
}

fn chart(rows: &[CodesignRow], crossover: Option<&Crossover>, epsilon: f64) -> String {
    LineChart {
        title: "Co-design map: R(A) = oscillate / idle drag".into(),
        x_label: "tail area (cm²)".into(),
        y_label: "R".into(),
        series: vec![Series {
            name: "R".into(),
            color: PALETTE[0],
            points: rows
                .iter()
                .map(|r| (r.area / CM2, r.ratio.unwrap_or(f64::NAN)))
                .collect(),
        }],
        hlines: vec![(1.0, "R = 1".into())],
        vlines: crossover
            .map(|c| vec![(c.area / CM2, format!("A* = {:.3} cm²", c.area / CM2))])
            .unwrap_or_default(),
        bands: vec![
            Band {
                y0: 1.0 + epsilon,
                y1: f64::INFINITY,
                color: GREEN,
                label: "idle".into(),
            },
            Band {
                y0: f64::NEG_INFINITY,
                y1: 1.0 - epsilon,
                color: ORANGE,
                label: "oscillate".into(),
            },
        ],
    }
    .render()
}

pub fn run(args: &CodesignArgs) -> CliResult<Report> {
    let cfg = RunConfig::load(&args.config)?;
    let epsilon = match args.epsilon {
        Some(e) if !(e.is_finite() && e >= 0.0) => {
            return Err(CliError::input(format!("--epsilon must be >= 0, got {e}")));
        }
        Some(e) => e,
        None => cfg.epsilon,
    };
    let range = args.areas_cm2.as_ref().or(cfg.area_range_cm2.as_ref());
    let areas: Vec<f64> = match range {
        Some(text) => parse_range(text)?.into_iter().map(|a| a * CM2).collect(),
        None => cfg.tails.iter().map(|t| t.area()).collect(),
    };
    let tail_height = cfg.tails[0].height();
    let problem = CodesignProblem::new(cfg.substrate, cfg.body.clone(), cfg.robot).with_tail_height(tail_height);

    let rows = if args.serial {
        problem.sweep(&areas, epsilon)?
    } else {
        problem.sweep_parallel(&areas, epsilon)?
    };

    let lo = areas.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = areas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut stdout = String::new();
    let crossover = if hi > lo {
        match problem.crossover_area((lo, hi), cfg.crossover_tol) {
            Ok(c) => {
                stdout.push_str(&format!("crossover_area_cm2={}\n", c.area / CM2));
                if let Some(w) = &c.non_monotone {
                    stdout.push_str(&format!(
                        "warning: R(A) is not monotone near {} cm2 ({} -> {}); crossover may not be unique\n",
                        w.area / CM2,
                        w.previous_ratio,
                        w.ratio
                    ));
                }
                Some(c)
            }
            Err(e @ ModelError::Invalid(_)) => return Err(e.into()),
            Err(e) => {
                stdout.push_str(&format!("crossover_area_cm2=none ({}: {e})\n", e.kind()));
                None
            }
        }
    } else {
        None
    };

    let mut extra = vec![("cmd", "codesign".to_string()), ("epsilon", fmt_f64(epsilon))];
    if let Some(text) = range {
        extra.push(("areas_cm2", text.clone()));
    }
    if let Some(c) = &crossover {
        extra.push(("crossover_area_cm2", fmt_f64(c.area / CM2)));
    }
    let meta = metadata_line(&cfg.inputs, &extra);
    let mut files = vec![write_file(&cfg.output_dir, "map.csv", &table(&rows).render(&meta)?)?];
    if !args.no_svg {
        files.push(write_file(
            &cfg.output_dir,
            "map.svg",
            &chart(&rows, crossover.as_ref(), epsilon),
        )?);
    }
    let flagged = rows.iter().filter(|r| r.flag.is_some()).count();
    if flagged > 0 {
        stdout.push_str(&format!(
            "{flagged} of {} areas flagged (see `flag` column)\n",
            rows.len()
        ));
    }
    for f in &files {
        stdout.push_str(&format!("wrote {}\n", f.display()));
    }
    Ok(Report { stdout, files })
}
