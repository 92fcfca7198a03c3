//! Sensor identities and the scalar velocity measurement shared by the
//! filter, the consensus pre-processing and the simulator.

use std::fmt;

/// The velocity sensors of the modelled vehicle.
///
/// GPS is normally used as an evaluation reference only; it can optionally be
/// fused as a third direct velocity sensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SensorKind {
    Radar1,
    Radar2,
    Encoder1,
    Encoder2,
    Gps,
}

impl SensorKind {
    /// Canonical ordering, also the tie-break order for simultaneous samples.
    pub const ALL: [SensorKind; 5] = [
        SensorKind::Radar1,
        SensorKind::Radar2,
        SensorKind::Encoder1,
        SensorKind::Encoder2,
        SensorKind::Gps,
    ];

    /// Name used in CSV files and configuration keys.
    pub fn name(self) -> &'static str {
        match self {
            SensorKind::Radar1 => "radar1",
            SensorKind::Radar2 => "radar2",
            SensorKind::Encoder1 => "encoder1",
            SensorKind::Encoder2 => "encoder2",
            SensorKind::Gps => "gps",
        }
    }

    pub fn from_name(name: &str) -> Option<SensorKind> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    pub fn is_encoder(self) -> bool {
        matches!(self, SensorKind::Encoder1 | SensorKind::Encoder2)
    }

    pub fn is_radar(self) -> bool {
        matches!(self, SensorKind::Radar1 | SensorKind::Radar2)
    }

    /// Index of this sensor's calibration factor in the state vector,
    /// if it has one.
    pub fn calibration_index(self) -> Option<usize> {
        match self {
            SensorKind::Encoder1 => Some(crate::filter::IDX_CAL1),
            SensorKind::Encoder2 => Some(crate::filter::IDX_CAL2),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|k| *k == self).unwrap()
    }
}

impl fmt::Display for SensorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One scalar velocity reading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub sensor: SensorKind,
    /// Reported velocity (m/s).
    pub mean: f64,
    /// Reported variance ((m/s)^2); must be > 0.
    pub variance: f64,
    /// Seconds since run start.
    pub timestamp: f64,
}

impl Measurement {
    pub fn new(sensor: SensorKind, mean: f64, variance: f64, timestamp: f64) -> Self {
        Self {
            sensor,
            mean,
            variance,
            timestamp,
        }
    }

    /// A copy with the variance multiplied by `scale`.
    pub fn with_scaled_variance(&self, scale: f64) -> Self {
        Self {
            variance: self.variance * scale,
            ..*self
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sensor_names_round_trip() {
        for kind in SensorKind::ALL {
            assert_eq!(SensorKind::from_name(kind.name()), Some(kind));
        }
        assert_eq!(SensorKind::from_name("lidar"), None);
        assert_eq!(SensorKind::from_name("Radar1"), None);
    }

    #[test]
    fn calibration_indices() {
        assert_eq!(SensorKind::Encoder1.calibration_index(), Some(3));
        assert_eq!(SensorKind::Encoder2.calibration_index(), Some(4));
        assert_eq!(SensorKind::Radar1.calibration_index(), None);
        assert_eq!(SensorKind::Gps.calibration_index(), None);
    }
}
