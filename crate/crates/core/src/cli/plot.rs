use std::fmt::Write;

use crate::copytask::{ActivityRecording, ActivityStep};
use crate::engine::GenerationStats;

/// Panels of a recording plot, top to bottom.
pub const RECORDING_PANELS: [&str; 11] = [
    "output",
    "input",
    "difference",
    "fitness",
    "write",
    "interpolation",
    "written",
    "jump",
    "shift",
    "read",
    "head",
];

/// Vector panels show at most this many bit rows.
const MAX_ROWS: usize = 64;
const LEFT: f64 = 110.0;
const PANEL_GAP: f64 = 10.0;

fn header(w: f64, h: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" \
         viewBox=\"0 0 {w:.0} {h:.0}\" font-family=\"sans-serif\" font-size=\"11\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

fn gray(v: f64) -> String {
    let c = (255.0 * (1.0 - v.clamp(0.0, 1.0))).round() as u8;
    format!("#{c:02x}{c:02x}{c:02x}")
}

/// Blue (0) to red (1).
fn heat(v: f64) -> String {
    let v = v.clamp(0.0, 1.0);
    let r = (255.0 * v).round() as u8;
    let b = (255.0 * (1.0 - v)).round() as u8;
    format!("#{r:02x}40{b:02x}")
}

/// Line plots of champion, best-ever and mean fitness, and mean complexity.
pub fn stats_svg(rows: &[GenerationStats]) -> String {
    let (w, ph) = (820.0, 220.0);
    let plot_w = w - LEFT - 30.0;
    let h = 2.0 * ph + 3.0 * 30.0;
    let g0 = rows.first().map_or(0, |r| r.generation) as f64;
    let g1 = rows.last().map_or(0, |r| r.generation) as f64;
    let span = (g1 - g0).max(1.0);
    let x = |g: usize| LEFT + (g as f64 - g0) / span * plot_w;
    let max_c = rows.iter().map(|r| r.mean_complexity).fold(1.0, f64::max);

    let mut s = header(w, h);
    let panels: [(&str, f64, f64, Vec<(&str, &str, Box<dyn Fn(&GenerationStats) -> f64>)>); 2] = [
        (
            "fitness",
            30.0,
            1.0,
            vec![
                ("champion", "#d62728", Box::new(|r| r.champion_fitness)),
                ("best ever", "#1f77b4", Box::new(|r| r.best_ever)),
                ("mean", "#7f7f7f", Box::new(|r| r.mean_fitness)),
            ],
        ),
        (
            "complexity",
            60.0 + ph,
            max_c,
            vec![("mean complexity", "#2ca02c", Box::new(|r| r.mean_complexity))],
        ),
    ];
    for (name, top, ymax, series) in &panels {
        let y = |v: f64| top + ph - v / ymax * ph;
        let _ = writeln!(
            s,
            "<g class=\"panel\" id=\"{name}\"><rect x=\"{LEFT}\" y=\"{top}\" width=\"{plot_w}\" \
             height=\"{ph}\" fill=\"none\" stroke=\"#999\"/>"
        );
        let _ = writeln!(s, "<text x=\"8\" y=\"{:.1}\">{name}</text>", top + ph / 2.0);
        let _ = writeln!(s, "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{ymax:.3}</text>", LEFT - 4.0, top + 10.0);
        let _ = writeln!(s, "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">0</text>", LEFT - 4.0, top + ph);
        for (k, (label, color, f)) in series.iter().enumerate() {
            let pts: Vec<String> = rows
                .iter()
                .map(|r| format!("{:.2},{:.2}", x(r.generation), y(f(r))))
                .collect();
            if rows.len() == 1 {
                let r = &rows[0];
                let _ = writeln!(
                    s,
                    "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>",
                    x(r.generation),
                    y(f(r))
                );
            } else {
                let _ = writeln!(
                    s,
                    "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
                    pts.join(" ")
                );
            }
            let _ = writeln!(
                s,
                "<text x=\"{:.1}\" y=\"{:.1}\" fill=\"{color}\">{label}</text>",
                LEFT + 8.0 + 110.0 * k as f64,
                top + 14.0
            );
        }
        s.push_str("</g>\n");
    }
    let _ = writeln!(
        s,
        "<text x=\"{LEFT}\" y=\"{:.1}\">generation {g0:.0}</text><text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{g1:.0}</text>",
        h - 8.0,
        LEFT + plot_w,
        h - 8.0
    );
    s.push_str("</svg>\n");
    s
}

type RowFn = Box<dyn Fn(&ActivityStep, usize) -> Option<f64>>;

fn bit_rows(bits: usize) -> Vec<usize> {
    if bits <= MAX_ROWS {
        (0..bits).collect()
    } else {
        (0..MAX_ROWS).map(|r| r * bits / MAX_ROWS).collect()
    }
}

/// Stacked per-timestep panels of one recorded episode.
pub fn recording_svg(rec: &ActivityRecording) -> String {
    let steps = &rec.steps;
    let t = steps.len().max(1);
    let cw = (900.0 / t as f64).clamp(2.0, 24.0);
    let rh = 10.0;
    let w = LEFT + cw * t as f64 + 20.0;
    let rows = bit_rows(rec.bits);
    let vec_panel = |f: fn(&ActivityStep) -> Option<&[f64]>| -> Vec<RowFn> {
        rows.iter()
            .map(|&k| -> RowFn { Box::new(move |s, _| f(s).map(|v| v[k])) })
            .collect()
    };
    let scalar = |f: fn(&ActivityStep) -> f64| -> Vec<RowFn> { vec![Box::new(move |s, _| Some(f(s)))] };

    let panels: Vec<(&str, Vec<RowFn>, bool)> = vec![
        ("output", vec_panel(|s| Some(&s.bit_out)), false),
        ("input", vec_panel(|s| Some(&s.bit_in)), false),
        (
            "difference",
            rows.iter()
                .map(|&k| -> RowFn {
                    Box::new(move |s, _| s.target.as_ref().map(|t| (s.bit_out[k] - t[k]).abs()))
                })
                .collect(),
            false,
        ),
        ("fitness", vec![Box::new(|s, _| s.vector_fitness)], true),
        ("write", vec_panel(|s| Some(&s.write)), false),
        ("interpolation", scalar(|s| s.interp), false),
        ("written", vec_panel(|s| Some(&s.written)), false),
        ("jump", scalar(|s| s.jump), false),
        (
            "shift",
            vec![
                Box::new(|s, _| Some(s.shift_left)),
                Box::new(|s, _| Some(s.shift_stay)),
                Box::new(|s, _| Some(s.shift_right)),
            ],
            false,
        ),
        ("read", vec_panel(|s| Some(&s.read)), false),
    ];
    let head_h = 60.0;
    let body: f64 = panels.iter().map(|(_, r, _)| r.len() as f64 * rh + PANEL_GAP).sum();
    let h = 20.0 + body + head_h + PANEL_GAP + 30.0;

    let mut s = header(w, h);
    let mut top = 20.0;
    for (name, row_fns, is_heat) in &panels {
        let _ = writeln!(s, "<g class=\"panel\" id=\"{name}\">");
        let ph = row_fns.len() as f64 * rh;
        let _ = writeln!(s, "<text x=\"8\" y=\"{:.1}\">{name}</text>", top + ph / 2.0 + 4.0);
        for (r, f) in row_fns.iter().enumerate() {
            for (i, step) in steps.iter().enumerate() {
                if let Some(v) = f(step, i) {
                    let fill = if *is_heat { heat(v) } else { gray(v) };
                    let _ = writeln!(
                        s,
                        "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{cw:.2}\" height=\"{rh}\" fill=\"{fill}\"/>",
                        LEFT + cw * i as f64,
                        top + rh * r as f64
                    );
                }
            }
        }
        let _ = writeln!(
            s,
            "<rect x=\"{LEFT}\" y=\"{top:.2}\" width=\"{:.2}\" height=\"{ph}\" fill=\"none\" stroke=\"#999\"/></g>",
            cw * t as f64
        );
        top += ph + PANEL_GAP;
    }

    let max_head = steps.iter().map(|s| s.tape_len.max(1) - 1).max().unwrap_or(0).max(1) as f64;
    let _ = writeln!(s, "<g class=\"panel\" id=\"head\">");
    let _ = writeln!(s, "<text x=\"8\" y=\"{:.1}\">head</text>", top + head_h / 2.0);
    for (i, step) in steps.iter().enumerate() {
        let _ = writeln!(
            s,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2\" fill=\"#d62728\"/>",
            LEFT + cw * (i as f64 + 0.5),
            top + head_h - step.head as f64 / max_head * head_h
        );
    }
    let _ = writeln!(
        s,
        "<rect x=\"{LEFT}\" y=\"{top:.2}\" width=\"{:.2}\" height=\"{head_h}\" fill=\"none\" stroke=\"#999\"/></g>",
        cw * t as f64
    );
    if rows.len() < rec.bits {
        let _ = writeln!(
            s,
            "<text x=\"{LEFT}\" y=\"{:.1}\">showing {} of {} bits</text>",
            h - 10.0,
            rows.len(),
            rec.bits
        );
    }
    s.push_str("</svg>\n");
    s
}
