//! CSV output: one file per (agent, seed) plus a summary.

use std::path::{Path, PathBuf};

use crate::experiment::MetricsSeries;
use crate::{io_err, LabError};

pub const CSV_HEADER: [&str; 12] = [
    "episode",
    "agent",
    "seed",
    "true_reward_value",
    "true_cost_value",
    "regret_cum",
    "violation_regret",
    "violated",
    "lambda",
    "epsilon_k",
    "branch",
    "lp_status",
];

pub const SUMMARY_HEADER: [&str; 12] = [
    "agent",
    "seed",
    "episodes",
    "violation_count",
    "regret_half",
    "regret_final",
    "violation_regret_half",
    "violation_regret_final",
    "violation_regret_max",
    "c0_used",
    "c0_estimation_episodes",
    "burn_in",
];

/// Twelve significant digits, then the shortest text that parses back to
/// the rounded value.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    rounded.to_string()
}

fn opt_number(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

pub fn series_path(dir: &Path, series: &MetricsSeries) -> PathBuf {
    dir.join(format!("{}_seed{}.csv", series.agent.file_stem(), series.seed))
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>, LabError> {
    let file = std::fs::File::create(path).map_err(io_err(path))?;
    Ok(csv::Writer::from_writer(file))
}

pub fn write_series(dir: &Path, series: &MetricsSeries) -> Result<PathBuf, LabError> {
    let path = series_path(dir, series);
    let mut w = writer(&path)?;
    w.write_record(CSV_HEADER)?;
    let agent = series.agent.label();
    let seed = series.seed.to_string();
    for row in &series.rows {
        w.write_record([
            row.episode.to_string().as_str(),
            agent,
            &seed,
            &format_number(row.true_reward_value),
            &format_number(row.true_cost_value),
            &format_number(row.regret_cum),
            &format_number(row.violation_regret),
            if row.violated { "1" } else { "0" },
            &opt_number(row.lambda),
            &opt_number(row.epsilon),
            row.branch.map(|b| b.as_str()).unwrap_or(""),
            row.lp_status.map(|s| s.as_str()).unwrap_or(""),
        ])?;
    }
    w.flush().map_err(io_err(&path))?;
    Ok(path)
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Row values `[violation_count, regret_half, regret_final,
/// violation_regret_half, violation_regret_final, violation_regret_max]`.
fn headline(series: &MetricsSeries) -> [f64; 6] {
    let k = series.rows.len();
    let half = series.at(k / 2).or(series.rows.first());
    let last = series.last();
    let pick = |r: Option<&crate::experiment::MetricsRow>, f: fn(&crate::experiment::MetricsRow) -> f64| {
        r.map(f).unwrap_or(0.0)
    };
    [
        series.violation_count() as f64,
        pick(half, |r| r.regret_cum),
        pick(last, |r| r.regret_cum),
        pick(half, |r| r.violation_regret),
        pick(last, |r| r.violation_regret),
        pick(last, |r| r.violation_regret_max),
    ]
}

/// One row per run, then a `median` row per agent in first-seen order.
pub fn write_summary(dir: &Path, runs: &[MetricsSeries]) -> Result<PathBuf, LabError> {
    let path = dir.join("summary.csv");
    let mut w = writer(&path)?;
    w.write_record(SUMMARY_HEADER)?;
    for run in runs {
        let h = headline(run);
        let notes = run.annotations;
        w.write_record([
            run.agent.label().to_string(),
            run.seed.to_string(),
            run.rows.len().to_string(),
            run.violation_count().to_string(),
            format_number(h[1]),
            format_number(h[2]),
            format_number(h[3]),
            format_number(h[4]),
            format_number(h[5]),
            opt_number(notes.c0_used),
            notes
                .c0_estimate
                .map(|e| e.episodes_used.to_string())
                .unwrap_or_default(),
            notes.burn_in.map(|b| b.to_string()).unwrap_or_default(),
        ])?;
    }
    let mut agents = Vec::new();
    for run in runs {
        if !agents.contains(&run.agent) {
            agents.push(run.agent);
        }
    }
    for agent in agents {
        let mine: Vec<[f64; 6]> = runs.iter().filter(|r| r.agent == agent).map(headline).collect();
        let col = |i: usize| median(mine.iter().map(|h| h[i]).collect());
        let episodes = runs
            .iter()
            .find(|r| r.agent == agent)
            .map(|r| r.rows.len())
            .unwrap_or(0);
        w.write_record([
            agent.label().to_string(),
            "median".to_string(),
            episodes.to_string(),
            format_number(col(0)),
            format_number(col(1)),
            format_number(col(2)),
            format_number(col(3)),
            format_number(col(4)),
            format_number(col(5)),
            String::new(),
            String::new(),
            String::new(),
        ])?;
    }
    w.flush().map_err(io_err(&path))?;
    Ok(path)
}
