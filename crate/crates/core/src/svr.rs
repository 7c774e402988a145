//! RBF support-vector regression in the libsvm model format, plus the
//! svm-scale feature-range sidecar.
//!
//! Model grammar (one `key value` pair per header line, then the vectors):
//!
//! ```text
//! svm_type epsilon_svr          # or nu_svr
//! kernel_type rbf
//! gamma 0.05
//! total_sv 774
//! rho -153.591
//! SV
//! <coef> <index>:<value> <index>:<value> ...
//! ```
//!
//! Indices are 1-based on the wire and 0-based in memory; absent indices are
//! zero. Unknown header keys (`nr_class`, `probA`, ...) are ignored.
//!
//! Range grammar:
//!
//! ```text
//! x
//! <lower> <upper>
//! <index> <min> <max>
//! ...
//! ```
//!
//! An optional leading `y` block (target scaling) is skipped.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Number of BRISQUE features the models are trained on.
pub const FEATURE_DIM: usize = 36;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SvrType {
    EpsilonSvr,
    NuSvr,
}

impl SvrType {
    fn name(self) -> &'static str {
        match self {
            SvrType::EpsilonSvr => "epsilon_svr",
            SvrType::NuSvr => "nu_svr",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupportVector {
    pub coef: f64,
    /// Dense, `FEATURE_DIM` long.
    pub features: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvrModel {
    pub svm_type: SvrType,
    pub gamma: f64,
    pub rho: f64,
    pub support_vectors: Vec<SupportVector>,
}

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::ModelParse {
        line,
        message: message.into(),
    }
}

fn num(line: usize, text: &str, what: &str) -> Result<f64> {
    text.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| perr(line, format!("bad {what} `{text}`")))
}

pub fn parse_svr_model(text: &str) -> Result<SvrModel> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let mut svm_type = None;
    let mut kernel = None;
    let mut gamma = None;
    let mut total_sv = None;
    let mut rho = None;
    let mut saw_sv = false;

    for (ln, line) in lines.by_ref() {
        if line.is_empty() {
            continue;
        }
        if line == "SV" {
            saw_sv = true;
            break;
        }
        let mut parts = line.split_whitespace();
        let key = parts.next().unwrap_or_default();
        let rest: Vec<&str> = parts.collect();
        let single = || -> Result<&str> {
            match rest.as_slice() {
                [v] => Ok(*v),
                _ => Err(perr(ln, format!("`{key}` takes exactly one value"))),
            }
        };
        match key {
            "svm_type" => {
                svm_type = Some(match single()? {
                    "epsilon_svr" => SvrType::EpsilonSvr,
                    "nu_svr" => SvrType::NuSvr,
                    other => {
                        return Err(Error::UnsupportedModel(format!(
                            "svm_type `{other}` is not a regression model"
                        )))
                    }
                })
            }
            "kernel_type" => {
                let k = single()?;
                if k != "rbf" {
                    return Err(Error::UnsupportedModel(format!(
                        "kernel_type `{k}`, only rbf is supported"
                    )));
                }
                kernel = Some(());
            }
            "gamma" => gamma = Some(num(ln, single()?, "gamma")?),
            "rho" => rho = Some(num(ln, single()?, "rho")?),
            "total_sv" => {
                let v = single()?;
                total_sv = Some(
                    v.parse::<usize>()
                        .map_err(|_| perr(ln, format!("bad total_sv `{v}`")))?,
                );
            }
            _ => {}
        }
    }

    let svm_type = svm_type.ok_or_else(|| Error::UnsupportedModel("missing svm_type".into()))?;
    kernel.ok_or_else(|| Error::UnsupportedModel("missing kernel_type".into()))?;
    let gamma = gamma.ok_or_else(|| perr(0, "missing gamma"))?;
    if gamma <= 0.0 {
        return Err(perr(0, format!("gamma must be positive, got {gamma}")));
    }
    let rho = rho.ok_or_else(|| perr(0, "missing rho"))?;
    let total_sv = total_sv.ok_or_else(|| perr(0, "missing total_sv"))?;
    if !saw_sv {
        return Err(perr(0, "missing SV section"));
    }

    let mut support_vectors = Vec::with_capacity(total_sv);
    let mut last_line = 0;
    for (ln, line) in lines {
        last_line = ln;
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let coef = num(ln, parts.next().unwrap_or_default(), "coefficient")?;
        let mut features = vec![0.0; FEATURE_DIM];
        for pair in parts {
            let (idx, val) = pair
                .split_once(':')
                .ok_or_else(|| perr(ln, format!("expected index:value, got `{pair}`")))?;
            let idx: usize = idx.parse().map_err(|_| perr(ln, format!("bad index `{idx}`")))?;
            if !(1..=FEATURE_DIM).contains(&idx) {
                return Err(perr(ln, format!("feature index {idx} outside 1..={FEATURE_DIM}")));
            }
            features[idx - 1] = num(ln, val, "feature value")?;
        }
        support_vectors.push(SupportVector { coef, features });
    }
    if support_vectors.len() != total_sv {
        return Err(perr(
            last_line,
            format!("total_sv is {total_sv} but {} vectors follow", support_vectors.len()),
        ));
    }
    if support_vectors.is_empty() {
        return Err(perr(last_line, "model has no support vectors"));
    }
    Ok(SvrModel {
        svm_type,
        gamma,
        rho,
        support_vectors,
    })
}

impl SvrModel {
    /// Serializes back to the libsvm text format. Values are written in
    /// shortest round-trip form and zero features are omitted.
    pub fn to_libsvm_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "svm_type {}", self.svm_type.name());
        let _ = writeln!(s, "kernel_type rbf");
        let _ = writeln!(s, "gamma {}", self.gamma);
        let _ = writeln!(s, "nr_class 2");
        let _ = writeln!(s, "total_sv {}", self.support_vectors.len());
        let _ = writeln!(s, "rho {}", self.rho);
        s.push_str("SV\n");
        for sv in &self.support_vectors {
            let _ = write!(s, "{}", sv.coef);
            for (i, v) in sv.features.iter().enumerate().filter(|(_, v)| **v != 0.0) {
                let _ = write!(s, " {}:{}", i + 1, v);
            }
            s.push('\n');
        }
        s
    }
}

/// `sum_i coef_i * exp(-gamma * |sv_i - x|^2) - rho`, summed in file order.
pub fn svr_predict(x: &[f64], model: &SvrModel) -> Result<f64> {
    if x.len() != FEATURE_DIM {
        return Err(Error::Model(format!(
            "expected {FEATURE_DIM} features, got {}",
            x.len()
        )));
    }
    let mut acc = 0.0;
    for sv in &model.support_vectors {
        let d2: f64 = sv.features.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
        acc += sv.coef * (-model.gamma * d2).exp();
    }
    Ok(acc - model.rho)
}

/// Per-feature linear scaling bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRange {
    pub lower: f64,
    pub upper: f64,
    /// `(min, max)` per feature, 0-based.
    pub bounds: Vec<(f64, f64)>,
}

pub fn parse_range_file(text: &str) -> Result<FeatureRange> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .peekable();

    if matches!(lines.peek(), Some((_, "y"))) {
        // target scaling: "y", "lower upper", "min max"
        for _ in 0..3 {
            lines.next();
        }
    }
    match lines.next() {
        Some((_, "x")) => {}
        Some((ln, other)) => return Err(perr(ln, format!("expected `x`, got `{other}`"))),
        None => return Err(perr(0, "empty range file")),
    }
    let (ln, bounds_line) = lines.next().ok_or_else(|| perr(0, "missing target bounds"))?;
    let tb: Vec<&str> = bounds_line.split_whitespace().collect();
    let [lo, hi] = tb.as_slice() else {
        return Err(perr(ln, "target bounds line needs two values"));
    };
    let lower = num(ln, lo, "lower bound")?;
    let upper = num(ln, hi, "upper bound")?;

    let mut bounds: Vec<Option<(f64, f64)>> = vec![None; FEATURE_DIM];
    for (ln, line) in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let [idx, min, max] = parts.as_slice() else {
            return Err(perr(ln, "expected `index min max`"));
        };
        let idx: usize = idx.parse().map_err(|_| perr(ln, format!("bad index `{idx}`")))?;
        if !(1..=FEATURE_DIM).contains(&idx) {
            return Err(perr(ln, format!("feature index {idx} outside 1..={FEATURE_DIM}")));
        }
        let (min, max) = (num(ln, min, "min")?, num(ln, max, "max")?);
        if min > max {
            return Err(perr(ln, format!("min {min} exceeds max {max}")));
        }
        if bounds[idx - 1].replace((min, max)).is_some() {
            return Err(perr(ln, format!("duplicate index {idx}")));
        }
    }
    let missing: Vec<usize> = bounds
        .iter()
        .enumerate()
        .filter(|(_, b)| b.is_none())
        .map(|(i, _)| i + 1)
        .collect();
    if !missing.is_empty() {
        return Err(Error::IncompleteRange(missing));
    }
    Ok(FeatureRange {
        lower,
        upper,
        bounds: bounds.into_iter().map(Option::unwrap).collect(),
    })
}

impl FeatureRange {
    pub fn to_text(&self) -> String {
        let mut s = format!("x\n{} {}\n", self.lower, self.upper);
        for (i, (lo, hi)) in self.bounds.iter().enumerate() {
            let _ = writeln!(s, "{} {} {}", i + 1, lo, hi);
        }
        s
    }
}

/// Maps each feature linearly from `[min, max]` to `[lower, upper]`.
/// Values outside the source range extrapolate; a degenerate range maps to 0.
pub fn scale_features(features: &[f64], range: &FeatureRange) -> Result<Vec<f64>> {
    if features.len() != range.bounds.len() {
        return Err(Error::Model(format!(
            "{} features but the range file has {} entries",
            features.len(),
            range.bounds.len()
        )));
    }
    Ok(features
        .iter()
        .zip(&range.bounds)
        .map(|(&x, &(min, max))| {
            if max == min {
                0.0
            } else {
                range.lower + (range.upper - range.lower) * (x - min) / (max - min)
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const ONE_SV: &str = "svm_type epsilon_svr\nkernel_type rbf\ngamma 0.05\nnr_class 2\ntotal_sv 1\nrho 0\nSV\n1 \n";

    fn unit_range() -> String {
        let mut s = String::from("x\n-1 1\n");
        for i in 1..=36 {
            s.push_str(&format!("{i} 0 1\n"));
        }
        s
    }

    #[test]
    fn parses_minimal_model() {
        let m = parse_svr_model(ONE_SV).unwrap();
        assert_eq!(m.support_vectors.len(), 1);
        assert_eq!(m.gamma, 0.05);
        assert!(m.support_vectors[0].features.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rejects_classifier_and_other_kernels() {
        let c = ONE_SV.replace("epsilon_svr", "c_svc");
        assert!(matches!(parse_svr_model(&c), Err(Error::UnsupportedModel(_))));
        let k = ONE_SV.replace("rbf", "linear");
        assert!(matches!(parse_svr_model(&k), Err(Error::UnsupportedModel(_))));
    }

    #[test]
    fn malformed_lines_report_line_numbers() {
        let bad = ONE_SV.replace("1 \n", "1 3:x\n");
        assert!(matches!(parse_svr_model(&bad), Err(Error::ModelParse { line: 8, .. })));
        let bad = ONE_SV.replace("1 \n", "1 37:0.5\n");
        assert!(matches!(parse_svr_model(&bad), Err(Error::ModelParse { line: 8, .. })));
        let bad = ONE_SV.replace("total_sv 1", "total_sv 2");
        assert!(matches!(parse_svr_model(&bad), Err(Error::ModelParse { .. })));
        let bad = ONE_SV.replace("gamma 0.05", "gamma -1");
        assert!(parse_svr_model(&bad).is_err());
    }

    #[test]
    fn predict_examples() {
        let mut m = parse_svr_model(ONE_SV).unwrap();
        let x = vec![0.0; 36];
        assert_eq!(svr_predict(&x, &m).unwrap(), 1.0);

        m.gamma = 0.5;
        let mut x = vec![0.0; 36];
        x[0] = 1.0;
        x[1] = 1.0;
        assert!((svr_predict(&x, &m).unwrap() - (-1.0f64).exp()).abs() < 1e-15);

        m.rho = 5.0;
        m.support_vectors[0].coef = 0.0;
        assert_eq!(svr_predict(&x, &m).unwrap(), -5.0);

        assert!(matches!(svr_predict(&[0.0; 35], &m), Err(Error::Model(_))));
    }

    #[test]
    fn range_fixture_and_incomplete() {
        let r = parse_range_file(&unit_range()).unwrap();
        assert_eq!(r.bounds.len(), 36);
        assert!(r.bounds.iter().all(|&b| b == (0.0, 1.0)));
        assert_eq!((r.lower, r.upper), (-1.0, 1.0));

        let short: String = unit_range().lines().take(2 + 35).map(|l| format!("{l}\n")).collect();
        match parse_range_file(&short) {
            Err(Error::IncompleteRange(missing)) => assert_eq!(missing, vec![36]),
            other => panic!("{other:?}"),
        }
        let with_y = format!("y\n0 100\n0 100\n{}", unit_range());
        assert_eq!(parse_range_file(&with_y).unwrap(), r);
    }

    #[test]
    fn scaling_anchors() {
        let mut r = parse_range_file(&unit_range()).unwrap();
        r.bounds[0] = (2.0, 6.0);
        r.bounds[1] = (3.0, 3.0);
        let mut f = vec![0.5; 36];
        f[0] = 2.0;
        let s = scale_features(&f, &r).unwrap();
        assert_eq!(s[0], -1.0);
        assert_eq!(s[1], 0.0);
        assert_eq!(s[2], 0.0);
        f[0] = 6.0;
        assert_eq!(scale_features(&f, &r).unwrap()[0], 1.0);
        f[0] = 10.0;
        assert_eq!(scale_features(&f, &r).unwrap()[0], 3.0);
        assert!(scale_features(&f[..35], &r).is_err());
    }

    fn model_strategy() -> impl Strategy<Value = SvrModel> {
        let sv = (
            -1e3f64..1e3,
            prop::collection::vec(prop_oneof![Just(0.0), -1.0f64..1.0], FEATURE_DIM),
        )
            .prop_map(|(coef, features)| SupportVector { coef, features });
        (1e-3f64..1.0, -200.0f64..200.0, prop::collection::vec(sv, 1..6)).prop_map(|(gamma, rho, support_vectors)| {
            SvrModel {
                svm_type: SvrType::EpsilonSvr,
                gamma,
                rho,
                support_vectors,
            }
        })
    }

    proptest! {
        #[test]
        fn model_text_round_trip(m in model_strategy()) {
            prop_assert_eq!(parse_svr_model(&m.to_libsvm_text()).unwrap(), m);
        }

        #[test]
        fn prediction_is_order_stable(m in model_strategy(), x in prop::collection::vec(-1.0f64..1.0, FEATURE_DIM)) {
            let mut rev = m.clone();
            rev.support_vectors.reverse();
            let a = svr_predict(&x, &m).unwrap();
            let b = svr_predict(&x, &rev).unwrap();
            let scale: f64 = m.support_vectors.iter().map(|sv| sv.coef.abs()).sum::<f64>() + m.rho.abs();
            prop_assert!((a - b).abs() <= 1e-12 * scale.max(1.0));
        }
    }
}
