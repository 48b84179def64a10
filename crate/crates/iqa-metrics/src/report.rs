use serde::{Deserialize, Serialize};

/// The six similarity scores for one (reference, candidate) pair.
///
/// `psnr` and `sre` are in decibels and may be positive infinity (identical
/// images); infinite values serialize as the literal token `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub rmse: f64,
    #[serde(with = "db_value")]
    pub psnr: f64,
    pub fsim: f64,
    pub ssim: f64,
    pub uiq: f64,
    #[serde(with = "db_value")]
    pub sre: f64,
}

impl MetricReport {
    /// Checks the report invariants: ranges of every score and the
    /// `rmse == 0 ⇔ psnr == +inf` coupling.
    pub fn validate(&self) -> Result<(), String> {
        if !(self.rmse >= 0.0) {
            return Err(format!("rmse {} must be >= 0", self.rmse));
        }
        if !(0.0..=1.0).contains(&self.fsim) {
            return Err(format!("fsim {} outside [0, 1]", self.fsim));
        }
        if !(-1.0..=1.0).contains(&self.ssim) {
            return Err(format!("ssim {} outside [-1, 1]", self.ssim));
        }
        if !(-1.0..=1.0).contains(&self.uiq) {
            return Err(format!("uiq {} outside [-1, 1]", self.uiq));
        }
        if (self.rmse == 0.0) != (self.psnr == f64::INFINITY) {
            return Err(format!(
                "rmse {} and psnr {} violate the zero-error coupling",
                self.rmse, self.psnr
            ));
        }
        Ok(())
    }
}

/// Serializes a decibel value as a plain number, or as the tokens
/// `"inf"` / `"-inf"` when infinite.
mod db_value {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &f64, ser: S) -> Result<S::Ok, S::Error> {
        if value.is_finite() {
            ser.serialize_f64(*value)
        } else if *value > 0.0 {
            ser.serialize_str("inf")
        } else {
            ser.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(de)? {
            Raw::Num(v) => Ok(v),
            Raw::Text(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(de::Error::custom(format!("invalid dB token {other:?}"))),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinite_db_round_trips_as_token() {
        let report = MetricReport {
            rmse: 0.0,
            psnr: f64::INFINITY,
            fsim: 1.0,
            ssim: 1.0,
            uiq: 1.0,
            sre: f64::INFINITY,
        };
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"inf\""));
        let back: MetricReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn paper_with_prompts_row_is_well_formed() {
        let report = MetricReport {
            rmse: 0.01008,
            psnr: 39.8750,
            fsim: 0.36375,
            ssim: 0.92199,
            uiq: 0.07616,
            sre: 51.6555,
        };
        assert!(report.validate().is_ok());
    }

    #[test]
    fn coupling_violation_is_rejected() {
        let report = MetricReport {
            rmse: 0.0,
            psnr: 30.0,
            fsim: 1.0,
            ssim: 1.0,
            uiq: 1.0,
            sre: 30.0,
        };
        assert!(report.validate().is_err());
    }
}
