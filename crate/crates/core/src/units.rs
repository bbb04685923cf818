//! dB and dBm conversions.

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_points() {
        assert!((dbm_to_watts(30.0) - 1.0).abs() < 1e-15);
        assert!((dbm_to_watts(0.0) - 1e-3).abs() < 1e-18);
        assert!((db_to_linear(10.0) - 10.0).abs() < 1e-12);
        assert!((watts_to_dbm(dbm_to_watts(-114.0)) + 114.0).abs() < 1e-9);
        assert!((linear_to_db(db_to_linear(5.0)) - 5.0).abs() < 1e-12);
    }
}
