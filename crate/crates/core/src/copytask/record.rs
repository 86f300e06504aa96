use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::entm::Shift;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Start,
    Input,
    Switch,
    Output,
}

impl Phase {
    pub fn at(t: usize, len: usize) -> Phase {
        match t {
            0 => Phase::Start,
            t if t <= len => Phase::Input,
            t if t == len + 1 => Phase::Switch,
            _ => Phase::Output,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Phase::Start => "start",
            Phase::Input => "input",
            Phase::Switch => "switch",
            Phase::Output => "output",
        }
    }

    fn parse(s: &str) -> Result<Phase> {
        [Phase::Start, Phase::Input, Phase::Switch, Phase::Output]
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown phase `{s}`")))
    }
}

/// Everything observed at one controller timestep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActivityStep {
    pub t: usize,
    pub phase: Phase,
    pub start: f64,
    pub switch: f64,
    pub bit_in: Vec<f64>,
    pub bit_out: Vec<f64>,
    pub target: Option<Vec<f64>>,
    pub write: Vec<f64>,
    pub interp: f64,
    pub jump: f64,
    pub shift_left: f64,
    pub shift_stay: f64,
    pub shift_right: f64,
    pub jumped: bool,
    pub shift: Shift,
    /// Cell content right after the interpolated write.
    pub written: Vec<f64>,
    pub read: Vec<f64>,
    pub head: usize,
    pub tape_len: usize,
    pub vector_fitness: Option<f64>,
}

/// One episode's per-timestep trace (`2L + 2` steps).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActivityRecording {
    pub bits: usize,
    pub length: usize,
    pub steps: Vec<ActivityStep>,
}

fn vector_columns(prefix: &str, bits: usize) -> impl Iterator<Item = String> + '_ {
    (0..bits).map(move |k| format!("{prefix}_{k}"))
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn shift_name(s: Shift) -> &'static str {
    match s {
        Shift::Left => "left",
        Shift::Stay => "stay",
        Shift::Right => "right",
    }
}

fn bad(m: String) -> Error {
    Error::Config(format!("recording CSV: {m}"))
}

struct Cursor<'a> {
    fields: Vec<&'a str>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn next(&mut self) -> Result<&'a str> {
        let f = self.fields.get(self.pos).ok_or_else(|| bad("short row".into()))?;
        self.pos += 1;
        Ok(f)
    }

    fn f64(&mut self) -> Result<f64> {
        let s = self.next()?;
        s.parse().map_err(|e| bad(format!("{s}: {e}")))
    }

    fn usize(&mut self) -> Result<usize> {
        let s = self.next()?;
        s.parse().map_err(|e| bad(format!("{s}: {e}")))
    }

    fn vec(&mut self, n: usize) -> Result<Vec<f64>> {
        (0..n).map(|_| self.f64()).collect()
    }

    /// `n` empty fields mean `None`.
    fn opt_vec(&mut self, n: usize) -> Result<Option<Vec<f64>>> {
        if self.fields.get(self.pos..).unwrap_or(&[]).iter().take(n).all(|s| s.is_empty()) {
            self.pos += n;
            return Ok(None);
        }
        self.vec(n).map(Some)
    }
}

impl ActivityRecording {
    /// Column order: `t, phase, start, switch, in_*, out_*, target_*,
    /// write_*, interp, jump, shift_left, shift_stay, shift_right, jumped,
    /// shift, written_*, read_*, head, tape_len, vector_fitness`.
    pub fn csv_header(bits: usize) -> Vec<String> {
        let mut h: Vec<String> = ["t", "phase", "start", "switch"].map(String::from).to_vec();
        for p in ["in", "out", "target", "write"] {
            h.extend(vector_columns(p, bits));
        }
        h.extend(
            ["interp", "jump", "shift_left", "shift_stay", "shift_right", "jumped", "shift"]
                .map(String::from),
        );
        for p in ["written", "read"] {
            h.extend(vector_columns(p, bits));
        }
        h.extend(["head", "tape_len", "vector_fitness"].map(String::from));
        h
    }

    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(Self::csv_header(self.bits))?;
        for s in &self.steps {
            let mut row = vec![
                s.t.to_string(),
                s.phase.name().to_string(),
                num(s.start),
                num(s.switch),
            ];
            row.extend(s.bit_in.iter().copied().map(num));
            row.extend(s.bit_out.iter().copied().map(num));
            match &s.target {
                Some(t) => row.extend(t.iter().copied().map(num)),
                None => row.extend(std::iter::repeat_n(String::new(), self.bits)),
            }
            row.extend(s.write.iter().copied().map(num));
            row.extend([s.interp, s.jump, s.shift_left, s.shift_stay, s.shift_right].map(num));
            row.push(u8::from(s.jumped).to_string());
            row.push(shift_name(s.shift).to_string());
            row.extend(s.written.iter().copied().map(num));
            row.extend(s.read.iter().copied().map(num));
            row.push(s.head.to_string());
            row.push(s.tape_len.to_string());
            row.push(s.vector_fitness.map(num).unwrap_or_default());
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    pub fn read_csv(input: impl Read) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let header = r.headers()?.clone();
        let bits = header.iter().filter(|h| h.starts_with("in_")).count();
        if bits == 0 || header.len() != Self::csv_header(bits).len() {
            return Err(Error::Config("not an activity recording CSV".into()));
        }
        let mut steps = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let mut c = Cursor { fields: rec.iter().collect(), pos: 0 };
            let t = c.usize()?;
            let phase = Phase::parse(c.next()?)?;
            let start = c.f64()?;
            let switch = c.f64()?;
            let bit_in = c.vec(bits)?;
            let bit_out = c.vec(bits)?;
            let target = c.opt_vec(bits)?;
            let write = c.vec(bits)?;
            let interp = c.f64()?;
            let jump = c.f64()?;
            let shift_left = c.f64()?;
            let shift_stay = c.f64()?;
            let shift_right = c.f64()?;
            let jumped = c.next()? == "1";
            let shift = match c.next()? {
                "left" => Shift::Left,
                "stay" => Shift::Stay,
                "right" => Shift::Right,
                s => return Err(bad(format!("unknown shift {s}"))),
            };
            let written = c.vec(bits)?;
            let read = c.vec(bits)?;
            let head = c.usize()?;
            let tape_len = c.usize()?;
            let vector_fitness = c.opt_vec(1)?.map(|v| v[0]);
            steps.push(ActivityStep {
                t,
                phase,
                start,
                switch,
                bit_in,
                bit_out,
                target,
                write,
                interp,
                jump,
                shift_left,
                shift_stay,
                shift_right,
                jumped,
                shift,
                written,
                read,
                head,
                tape_len,
                vector_fitness,
            });
        }
        if steps.len() < 4 || steps.len() % 2 != 0 {
            return Err(bad(format!("{} rows is not a 2L + 2 timeline", steps.len())));
        }
        let length = (steps.len() - 2) / 2;
        Ok(ActivityRecording {
            bits,
            length,
            steps,
        })
    }

    /// Writes `<stem>.csv` and `<stem>.json`.
    pub fn save(&self, stem: &Path) -> Result<()> {
        let csv_path = stem.with_extension("csv");
        let file = std::fs::File::create(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
        self.write_csv(std::io::BufWriter::new(file))?;
        let json_path = stem.with_extension("json");
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(&json_path, json).map_err(|e| Error::io(&json_path, e))
    }

    /// Reads a recording from `.json` or `.csv`.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => Self::read_csv(text.as_bytes()),
            _ => Ok(serde_json::from_str(&text)?),
        }
    }
}
