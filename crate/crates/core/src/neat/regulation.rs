use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegulationMode {
    Complexifying,
    Simplifying,
}

/// Two-state hysteresis on mean population complexity. Switches to
/// simplifying once the mean exceeds `floor + threshold`, and back once the
/// mean has fallen to the floor; the floor is reset to the mean at that
/// moment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityRegulation {
    threshold: Option<f64>,
    floor: f64,
    mode: RegulationMode,
}

impl ComplexityRegulation {
    pub fn new(threshold: Option<usize>, floor: f64) -> Self {
        ComplexityRegulation {
            threshold: threshold.map(|t| t as f64),
            floor,
            mode: RegulationMode::Complexifying,
        }
    }

    pub fn mode(&self) -> RegulationMode {
        self.mode
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn update(&mut self, mean_complexity: f64) -> RegulationMode {
        let Some(threshold) = self.threshold else {
            return self.mode;
        };
        match self.mode {
            RegulationMode::Complexifying if mean_complexity > self.floor + threshold => {
                self.mode = RegulationMode::Simplifying;
            }
            RegulationMode::Simplifying if mean_complexity <= self.floor => {
                self.mode = RegulationMode::Complexifying;
                self.floor = mean_complexity;
            }
            _ => {}
        }
        self.mode
    }
}
