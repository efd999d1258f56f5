//! CSV renderings of a simulation log.

use cumulative_cbf::sim::SimLog;
use cumulative_cbf::{Config, NoiseMode};

fn num(v: f64) -> String {
    v.to_string()
}

fn finish(w: csv::Writer<Vec<u8>>) -> Vec<u8> {
    w.into_inner().expect("in-memory writer")
}

/// Accumulator columns for the chosen noise mode.
pub fn accumulator_columns(cfg: &Config) -> Vec<String> {
    match cfg.noise_mode {
        NoiseMode::Off => Vec::new(),
        NoiseMode::Discretized { k } => (0..k).map(|i| format!("J_pt_{i}")).collect(),
        NoiseMode::Bound => (0..cfg.obstacle.edges().len())
            .map(|i| format!("J_bar_edge_{i}"))
            .collect(),
    }
}

pub fn trajectory_header(cfg: &Config) -> Vec<String> {
    let mut cols: Vec<String> = [
        "t",
        "x1",
        "x2",
        "u1",
        "u2",
        "uref1",
        "uref2",
        "h_obs",
        "qp_status",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    cols.extend(accumulator_columns(cfg));
    cols.push("J_monitor_max".into());
    cols
}

/// One row per step, then a `terminal` row with the final state.
pub fn trajectory_csv(cfg: &Config, log: &SimLog<f64>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(trajectory_header(cfg))
        .expect("in-memory write");
    for r in &log.records {
        let mut row = vec![
            num(r.t),
            num(r.x.x1),
            num(r.x.x2),
            num(r.u.x1),
            num(r.u.x2),
            num(r.u_ref.x1),
            num(r.u_ref.x2),
            num(r.h_obs),
            r.qp_status.as_str().to_string(),
        ];
        row.extend(r.point_j.iter().chain(&r.edge_j_bar).map(|&v| num(v)));
        row.push(num(r.monitor_j_max));
        w.write_record(&row).expect("in-memory write");
    }
    let fin = &log.final_accumulators;
    let x = log.final_state.x;
    let mut row = vec![
        num(log.final_state.t),
        num(x.x1),
        num(x.x2),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        log.final_h_obs.map(num).unwrap_or_default(),
        "terminal".to_string(),
    ];
    row.extend(fin.points.iter().map(|a| num(a.j)));
    row.extend(fin.edges.iter().map(|a| num(a.j_bar)));
    row.push(num(fin.monitor_max()));
    w.write_record(&row).expect("in-memory write");
    finish(w)
}

/// Final value of every accumulator with its location. Points have equal
/// start and end coordinates.
pub fn accumulators_csv(log: &SimLog<f64>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "kind", "index", "q1_start", "q2_start", "q1_end", "q2_end", "J_final",
    ])
    .expect("in-memory write");
    let fin = &log.final_accumulators;
    let points = fin
        .points
        .iter()
        .map(|a| ("point", a.q, a.q, a.j))
        .enumerate();
    let edges = fin
        .edges
        .iter()
        .map(|a| ("edge", a.seg.start(), a.seg.end(), a.j_bar))
        .enumerate();
    let monitors = fin
        .monitors
        .iter()
        .map(|a| ("monitor", a.q, a.q, a.j))
        .enumerate();
    for (i, (kind, a, b, j)) in points.chain(edges).chain(monitors) {
        w.write_record([
            kind.to_string(),
            i.to_string(),
            num(a.x1),
            num(a.x2),
            num(b.x1),
            num(b.x2),
            num(j),
        ])
        .expect("in-memory write");
    }
    finish(w)
}

/// Long format: one row per constraint per step.
pub fn constraints_csv(log: &SimLog<f64>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["step", "t", "label", "a1", "a2", "b", "slack", "active"])
        .expect("in-memory write");
    for (step, r) in log.records.iter().enumerate() {
        for c in &r.constraints {
            let active = r.active.contains(&c.label);
            w.write_record([
                step.to_string(),
                num(r.t),
                c.label.to_string(),
                num(c.a.x1),
                num(c.a.x2),
                num(c.b),
                num(c.slack),
                (active as u8).to_string(),
            ])
            .expect("in-memory write");
        }
    }
    finish(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use cumulative_cbf::{run, scenarios};

    #[test]
    fn header_depends_only_on_mode() {
        let h = trajectory_header(&scenarios::obstacle_only());
        assert_eq!(
            h.join(","),
            "t,x1,x2,u1,u2,uref1,uref2,h_obs,qp_status,J_monitor_max"
        );
        let h = trajectory_header(&scenarios::discretized());
        assert_eq!(h.len(), 10 + 8);
        assert_eq!(h[9], "J_pt_0");
        assert_eq!(h[16], "J_pt_7");
        let h = trajectory_header(&scenarios::bound());
        assert_eq!(
            &h[9..13],
            [
                "J_bar_edge_0",
                "J_bar_edge_1",
                "J_bar_edge_2",
                "J_bar_edge_3"
            ]
        );
    }

    #[test]
    fn one_row_per_step_plus_terminal() {
        let cfg = scenarios::bound();
        let log = run(cfg.clone()).unwrap();
        let text = String::from_utf8(trajectory_csv(&cfg, &log)).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), log.records.len() + 2);
        assert!(lines[1].starts_with("0,3,3,"));
        assert!(lines.last().unwrap().contains(",terminal,"));
        let width = trajectory_header(&cfg).len();
        assert!(lines.iter().all(|l| l.split(',').count() == width));
    }

    #[test]
    fn accumulator_table_lists_everything() {
        let log = run(scenarios::discretized()).unwrap();
        let text = String::from_utf8(accumulators_csv(&log)).unwrap();
        assert_eq!(text.lines().count(), 1 + 8 + 100);
        assert_eq!(text.lines().filter(|l| l.starts_with("point,")).count(), 8);
    }
}
