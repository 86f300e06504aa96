//! Growable memory tape with a single combined read/write head.
//!
//! Each timestep runs, in order: interpolated write at the head, optional
//! content jump, shift, read. The content jump moves to the allocated cell
//! that minimises the mean absolute difference to the write vector (the
//! quantity is a distance even though it is usually called similarity).

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Borrowed controller outputs for one timestep.
#[derive(Debug, Clone, Copy)]
pub struct TmControls<'a> {
    pub write: &'a [f64],
    pub interp: f64,
    pub jump: f64,
    pub shift_left: f64,
    pub shift_stay: f64,
    pub shift_right: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shift {
    Left,
    Stay,
    Right,
}

impl Shift {
    /// Argmax with ties resolved stay > left > right.
    pub fn select(left: f64, stay: f64, right: f64) -> Shift {
        if stay >= left && stay >= right {
            Shift::Stay
        } else if left >= right {
            Shift::Left
        } else {
            Shift::Right
        }
    }
}

/// What one step did, for activity recordings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepTrace {
    pub written: Vec<f64>,
    pub jumped: bool,
    pub shift: Shift,
    pub head: usize,
    pub tape_len: usize,
    pub read: Vec<f64>,
}

/// Cells of width `M`, values in `[0, 1]`, head always on an allocated cell.
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryTape {
    width: usize,
    cells: Vec<f64>,
    head: usize,
}

fn check_width(what: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::Contract(format!(
            "{what} has width {got}, tape width is {want}"
        )));
    }
    Ok(())
}

/// Mean absolute difference; `0` means identical.
pub fn similarity(w: &[f64], m: &[f64]) -> Result<f64> {
    check_width("write vector", w.len(), m.len())?;
    if w.is_empty() {
        return Err(Error::Contract("vectors must be non-empty".into()));
    }
    Ok(distance(w, m))
}

#[inline]
fn distance(w: &[f64], m: &[f64]) -> f64 {
    w.iter().zip(m).map(|(a, b)| (a - b).abs()).sum::<f64>() / w.len() as f64
}

impl MemoryTape {
    /// One zero cell, head at 0.
    pub fn new(width: usize) -> Self {
        assert!(width >= 1, "tape width must be positive");
        MemoryTape {
            width,
            cells: vec![0.0; width],
            head: 0,
        }
    }

    pub fn from_cells(cells: &[Vec<f64>], head: usize) -> Result<Self> {
        let width = cells.first().map_or(0, Vec::len);
        if width == 0 || head >= cells.len() {
            return Err(Error::Contract("tape needs a non-empty cell under the head".into()));
        }
        let mut flat = Vec::with_capacity(width * cells.len());
        for c in cells {
            check_width("cell", c.len(), width)?;
            flat.extend(c.iter().map(|v| v.clamp(0.0, 1.0)));
        }
        Ok(MemoryTape {
            width,
            cells: flat,
            head,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.cells.len() / self.width
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn head(&self) -> usize {
        self.head
    }

    pub fn cell(&self, index: usize) -> &[f64] {
        &self.cells[index * self.width..(index + 1) * self.width]
    }

    pub fn cells(&self) -> impl Iterator<Item = &[f64]> {
        self.cells.chunks_exact(self.width)
    }

    pub fn read(&self) -> &[f64] {
        self.cell(self.head)
    }

    /// `M_h <- M_h * (1 - i) + w * i`, with `i` and `w` clamped to `[0, 1]`.
    pub fn write(&mut self, w: &[f64], interp: f64) -> Result<()> {
        check_width("write vector", w.len(), self.width)?;
        let i = interp.clamp(0.0, 1.0);
        let start = self.head * self.width;
        for (m, &v) in self.cells[start..start + self.width].iter_mut().zip(w) {
            *m = *m * (1.0 - i) + v.clamp(0.0, 1.0) * i;
        }
        Ok(())
    }

    /// Index of the allocated cell closest to `w` (clamped to `[0, 1]`);
    /// ties go to the lowest index.
    pub fn content_jump(&self, w: &[f64]) -> Result<usize> {
        check_width("write vector", w.len(), self.width)?;
        let w: Vec<f64> = w.iter().map(|v| v.clamp(0.0, 1.0)).collect();
        let mut best = (0, f64::INFINITY);
        for (k, cell) in self.cells().enumerate() {
            let d = distance(&w, cell);
            if d < best.1 {
                best = (k, d);
            }
        }
        Ok(best.0)
    }

    /// Moves the head one cell, growing the tape with a zero cell when it
    /// walks off either end.
    pub fn shift(&mut self, left: f64, stay: f64, right: f64) -> Shift {
        let dir = Shift::select(left, stay, right);
        match dir {
            Shift::Stay => {}
            Shift::Left if self.head == 0 => {
                self.cells.splice(0..0, std::iter::repeat_n(0.0, self.width));
            }
            Shift::Left => self.head -= 1,
            Shift::Right => {
                self.head += 1;
                if self.head == self.len() {
                    self.cells.extend(std::iter::repeat_n(0.0, self.width));
                }
            }
        }
        dir
    }

    fn jump_and_shift(&mut self, c: &TmControls<'_>) -> Result<(bool, Shift)> {
        let jumped = c.jump.clamp(0.0, 1.0) > 0.5;
        if jumped {
            self.head = self.content_jump(c.write)?;
        }
        let shift = self.shift(
            c.shift_left.clamp(0.0, 1.0),
            c.shift_stay.clamp(0.0, 1.0),
            c.shift_right.clamp(0.0, 1.0),
        );
        Ok((jumped, shift))
    }

    /// Write, jump if `jump > 0.5`, shift, and return the cell under the new head.
    pub fn step(&mut self, controls: &TmControls<'_>) -> Result<&[f64]> {
        self.write(controls.write, controls.interp)?;
        self.jump_and_shift(controls)?;
        Ok(self.read())
    }

    pub fn step_traced(&mut self, controls: &TmControls<'_>) -> Result<StepTrace> {
        self.write(controls.write, controls.interp)?;
        let written = self.read().to_vec();
        let (jumped, shift) = self.jump_and_shift(controls)?;
        Ok(StepTrace {
            written,
            jumped,
            shift,
            head: self.head,
            tape_len: self.len(),
            read: self.read().to_vec(),
        })
    }
}
