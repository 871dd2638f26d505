//! Datasets shipped with the crate.

use super::{load_csv_reader, synthetic, Dataset};
use crate::error::{Error, Result};

const SONAR: &str = include_str!("../../data/sonar.csv");
const PIMA: &str = include_str!("../../data/pima.csv");
const BREAST_CANCER: &str = include_str!("../../data/breast_cancer.csv");

pub fn bundled_names() -> &'static [&'static str] {
    &["sonar", "pima", "breast-cancer", "synthetic-linear"]
}

fn canonical(name: &str) -> Option<&'static str> {
    match name.to_ascii_lowercase().replace('_', "-").as_str() {
        "sonar" => Some("sonar"),
        "pima" => Some("pima"),
        "breast-cancer" | "breastcancer" => Some("breast-cancer"),
        "synthetic-linear" | "synthetic" => Some("synthetic-linear"),
        _ => None,
    }
}

/// Response column of a bundled dataset.
pub fn default_target(name: &str) -> Option<&'static str> {
    match canonical(name)? {
        "sonar" => Some("Class"),
        "pima" => Some("diabetes"),
        "breast-cancer" => Some("Class"),
        "synthetic-linear" => Some("y"),
        _ => None,
    }
}

/// Loads a bundled dataset by name.
///
/// `synthetic-linear` is 300 rows of `y = 3 x1 - 2 x2 + N(0, 1)` with three
/// further pure-noise features, generated with seed 0.
pub fn bundled(name: &str) -> Result<Dataset> {
    let Some(canon) = canonical(name) else {
        return Err(Error::UnknownDataset(name.to_string()));
    };
    let target = default_target(canon).unwrap_or("y");
    match canon {
        "sonar" => load_csv_reader(SONAR.as_bytes(), target),
        "pima" => load_csv_reader(PIMA.as_bytes(), target),
        "breast-cancer" => load_csv_reader(BREAST_CANCER.as_bytes(), target),
        _ => synthetic::linear_regression(300, 5, 1.0, 0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::ResponseKind;

    #[test]
    fn bundled_shapes() {
        let s = bundled("sonar").unwrap();
        assert_eq!((s.n(), s.p(), s.kind()), (208, 60, ResponseKind::Binary));
        let p = bundled("pima").unwrap();
        assert_eq!((p.n(), p.p(), p.kind()), (768, 8, ResponseKind::Binary));
        assert_eq!(p.y().iter().sum::<f64>(), 268.0);
        let b = bundled("BreastCancer").unwrap();
        assert_eq!((b.n(), b.p()), (683, 9));
        assert_eq!(b.class_labels().unwrap()[1], "malignant");
        assert!(matches!(bundled("mullein"), Err(Error::UnknownDataset(_))));
    }
}
