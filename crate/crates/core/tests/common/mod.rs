#![allow(dead_code)]

use rand::Rng;

/// Straightforward tape: a list of cells, a head, and the four-step update
/// written out literally.
#[derive(Debug, Clone, PartialEq)]
pub struct NaiveTape {
    pub cells: Vec<Vec<f64>>,
    pub head: usize,
}

pub struct NaiveControls {
    pub write: Vec<f64>,
    pub interp: f64,
    pub jump: f64,
    pub shifts: [f64; 3],
}

fn clamp01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

impl NaiveTape {
    pub fn new(width: usize) -> Self {
        NaiveTape {
            cells: vec![vec![0.0; width]],
            head: 0,
        }
    }

    pub fn step(&mut self, c: &NaiveControls) -> Vec<f64> {
        let i = clamp01(c.interp);
        let w: Vec<f64> = c.write.iter().map(|&v| clamp01(v)).collect();
        let h = self.head;
        for k in 0..w.len() {
            self.cells[h][k] = self.cells[h][k] * (1.0 - i) + w[k] * i;
        }
        if clamp01(c.jump) > 0.5 {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (idx, cell) in self.cells.iter().enumerate() {
                let mut sum = 0.0;
                for k in 0..cell.len() {
                    sum += (w[k] - cell[k]).abs();
                }
                let d = sum / cell.len() as f64;
                if d < best_d {
                    best_d = d;
                    best = idx;
                }
            }
            self.head = best;
        }
        let [l, s, r] = c.shifts.map(clamp01);
        let width = self.cells[0].len();
        if s >= l && s >= r {
            // stay
        } else if l >= r {
            if self.head == 0 {
                self.cells.insert(0, vec![0.0; width]);
            } else {
                self.head -= 1;
            }
        } else {
            self.head += 1;
            if self.head == self.cells.len() {
                self.cells.push(vec![0.0; width]);
            }
        }
        self.cells[self.head].clone()
    }
}

/// Control values in `[-0.2, 1.2]`, with a bias towards exact ties.
pub fn random_control(rng: &mut impl Rng) -> f64 {
    match rng.random_range(0..6) {
        0 => 0.0,
        1 => 0.5,
        2 => 1.0,
        _ => rng.random_range(-0.2..1.2),
    }
}

pub fn random_controls(width: usize, rng: &mut impl Rng) -> NaiveControls {
    NaiveControls {
        write: (0..width).map(|_| random_control(rng)).collect(),
        interp: random_control(rng),
        jump: random_control(rng),
        shifts: [random_control(rng), random_control(rng), random_control(rng)],
    }
}
