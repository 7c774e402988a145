//! Condition names and the 69-entry corruption registry.
//!
//! Grammar:
//!
//! ```text
//! name  := "clean" | token token?
//! token := "SP" num | "GA" num | "RR" num | "RL" num | "RO0"
//! num   := digit+ ("." digit+)?
//! ```
//!
//! `RR` is a clockwise rotation, `RL` counterclockwise and `RO0` the explicit
//! zero rotation. Numbers must be written in canonical shortest form
//! (`0.1`, not `0.10`), so every accepted name formats back to itself.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PerturbationStep {
    /// Salt & pepper, fraction of elements replaced.
    SaltPepper(f64),
    /// Gaussian noise index on the [0, 1] pixel scale.
    Gaussian(f64),
    /// Rotation in degrees, positive = clockwise.
    Rotate(f64),
}

impl PerturbationStep {
    /// True when the step cannot change any pixel.
    pub fn is_identity(&self) -> bool {
        match *self {
            PerturbationStep::SaltPepper(v) | PerturbationStep::Gaussian(v) => v == 0.0,
            PerturbationStep::Rotate(a) => a % 360.0 == 0.0,
        }
    }
}

impl fmt::Display for PerturbationStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PerturbationStep::SaltPepper(v) => write!(f, "SP{v}"),
            PerturbationStep::Gaussian(v) => write!(f, "GA{v}"),
            PerturbationStep::Rotate(0.0) => f.write_str("RO0"),
            PerturbationStep::Rotate(a) if a > 0.0 => write!(f, "RR{a}"),
            PerturbationStep::Rotate(a) => write!(f, "RL{}", -a),
        }
    }
}

/// A named, ordered perturbation recipe.
#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    name: String,
    steps: Vec<PerturbationStep>,
}

impl Condition {
    pub fn clean() -> Self {
        Condition {
            name: "clean".to_owned(),
            steps: Vec::new(),
        }
    }

    /// Builds a condition from steps; the name is derived.
    pub fn from_steps(steps: Vec<PerturbationStep>) -> Result<Self> {
        if steps.len() > 2 {
            return Err(Error::Argument(format!(
                "at most two steps allowed, got {}",
                steps.len()
            )));
        }
        if steps.is_empty() {
            return Ok(Self::clean());
        }
        let name: String = steps.iter().map(|s| s.to_string()).collect();
        // Validates ranges and canonical numbers.
        parse_condition(&name)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn steps(&self) -> &[PerturbationStep] {
        &self.steps
    }

    pub fn is_clean(&self) -> bool {
        self.steps.is_empty()
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_condition(s)
    }
}

fn parse_err(position: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        position,
        message: message.into(),
    }
}

pub fn parse_condition(name: &str) -> Result<Condition> {
    if name == "clean" {
        return Ok(Condition::clean());
    }
    if name.is_empty() {
        return Err(parse_err(0, "empty condition name"));
    }
    let bytes = name.as_bytes();
    let mut pos = 0;
    let mut steps = Vec::new();
    while pos < bytes.len() {
        if steps.len() == 2 {
            return Err(parse_err(pos, "at most two perturbation tokens are allowed"));
        }
        let start = pos;
        let prefix = name
            .get(pos..pos + 2)
            .ok_or_else(|| parse_err(pos, "truncated token"))?;
        pos += 2;
        let num_start = pos;
        while pos < bytes.len() && (bytes[pos].is_ascii_digit() || bytes[pos] == b'.') {
            pos += 1;
        }
        let text = &name[num_start..pos];
        if text.is_empty() {
            return Err(parse_err(num_start, format!("expected a number after `{prefix}`")));
        }
        let well_formed = {
            let mut parts = text.split('.');
            let int = parts.next().unwrap_or("");
            let frac = parts.next();
            !int.is_empty() && parts.next().is_none() && frac.is_none_or(|f| !f.is_empty())
        };
        let value: f64 = match text.parse() {
            Ok(v) if well_formed => v,
            _ => return Err(parse_err(num_start, format!("malformed number `{text}`"))),
        };
        if format!("{value}") != text {
            return Err(parse_err(
                num_start,
                format!("non-canonical number `{text}`, write `{value}`"),
            ));
        }
        let step = match prefix {
            "SP" if value <= 1.0 => PerturbationStep::SaltPepper(value),
            "SP" => return Err(parse_err(num_start, format!("salt & pepper amount {value} exceeds 1"))),
            "GA" => PerturbationStep::Gaussian(value),
            "RR" | "RL" if value == 0.0 => {
                return Err(parse_err(start, "zero rotation is written `RO0`"));
            }
            "RR" => PerturbationStep::Rotate(value),
            "RL" => PerturbationStep::Rotate(-value),
            "RO" if value == 0.0 => PerturbationStep::Rotate(0.0),
            "RO" => return Err(parse_err(num_start, "`RO` only takes 0; use RR or RL")),
            other => return Err(parse_err(start, format!("unknown token `{other}`"))),
        };
        steps.push(step);
    }
    Ok(Condition {
        name: name.to_owned(),
        steps,
    })
}

/// Condition names C1..C69 in table order.
pub const REGISTRY_NAMES: [&str; 69] = [
    "clean",
    "SP0GA0.1",
    "SP0GA0.15",
    "SP0GA0.2",
    "SP0.1GA0",
    "SP0.1GA0.1",
    "SP0.1GA0.15",
    "SP0.1GA0.2",
    "SP0.15GA0",
    "SP0.15GA0.1",
    "SP0.15GA0.15",
    "SP0.15GA0.2",
    "SP0.2GA0",
    "SP0.2GA0.1",
    "SP0.2GA0.15",
    "SP0.2GA0.2",
    "GA0SP0.1",
    "GA0SP0.15",
    "GA0SP0.2",
    "GA0.15SP0",
    "GA0.15SP0.1",
    "GA0.15SP0.15",
    "GA0.15SP0.2",
    "GA0.1SP0",
    "GA0.1SP0.1",
    "GA0.1SP0.15",
    "GA0.1SP0.2",
    "GA0.2SP0",
    "GA0.2SP0.1",
    "GA0.2SP0.15",
    "GA0.2SP0.2",
    "SP0RR30",
    "SP0RR60",
    "SP0.1RR30",
    "SP0.1RR60",
    "SP0.15RR30",
    "SP0.15RR60",
    "SP0.2RR30",
    "SP0.2RR60",
    "SP0RL30",
    "SP0RL60",
    "SP0.1RO0",
    "SP0.1RL30",
    "SP0.1RL60",
    "SP0.15RO0",
    "SP0.15RL30",
    "SP0.15RL60",
    "SP0.2RO0",
    "SP0.2RL30",
    "SP0.2RL60",
    "RR30SP0.1",
    "RR30SP0.15",
    "RR30SP0.2",
    "RR30SP0",
    "RR60SP0.1",
    "RR60SP0.15",
    "RR60SP0.2",
    "RR60SP0",
    "RO0SP0.1",
    "RO0SP0.15",
    "RO0SP0.2",
    "RL30SP0",
    "RL30SP0.1",
    "RL30SP0.15",
    "RL30SP0.2",
    "RL60SP0",
    "RL60SP0.1",
    "RL60SP0.15",
    "RL60SP0.2",
];

/// The full corruption registry, C1 ("clean") first.
pub fn build_registry() -> Vec<Condition> {
    REGISTRY_NAMES
        .iter()
        .map(|n| parse_condition(n).expect("registry names are valid"))
        .collect()
}

pub fn is_registered(name: &str) -> bool {
    REGISTRY_NAMES.contains(&name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use PerturbationStep::*;

    #[test]
    fn parses_table_examples() {
        assert_eq!(
            parse_condition("SP0.15GA0.2").unwrap().steps(),
            &[SaltPepper(0.15), Gaussian(0.2)]
        );
        assert_eq!(
            parse_condition("RL60SP0.1").unwrap().steps(),
            &[Rotate(-60.0), SaltPepper(0.1)]
        );
        assert!(parse_condition("clean").unwrap().steps().is_empty());
        assert_eq!(
            parse_condition("SP0.1RO0").unwrap().steps(),
            &[SaltPepper(0.1), Rotate(0.0)]
        );
        assert_eq!(parse_condition("GA0").unwrap().steps(), &[Gaussian(0.0)]);
    }

    #[test]
    fn rejects_malformed_names_with_position() {
        let cases = [
            ("XX0.1", 0),
            ("SP", 2),
            ("SP0.1QQ3", 5),
            ("SP0.1GA0.1RR30", 10),
            ("SP1.", 2),
            ("SP.5", 2),
            ("SP0.10", 2),
            ("SP1.5", 2),
            ("RO30", 2),
            ("RR0", 0),
            ("SP0.1.2", 2),
            ("", 0),
        ];
        for (name, at) in cases {
            match parse_condition(name) {
                Err(Error::Parse { position, .. }) => assert_eq!(position, at, "{name}"),
                other => panic!("{name}: expected parse error, got {other:?}"),
            }
        }
    }

    #[test]
    fn registry_shape() {
        let reg = build_registry();
        assert_eq!(reg.len(), 69);
        assert!(reg[0].is_clean());
        assert_eq!(reg[4].name(), "SP0.1GA0");
        let mut names: Vec<&str> = reg.iter().map(|c| c.name()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), 69);
        for c in &reg {
            let formatted: String = if c.is_clean() {
                "clean".into()
            } else {
                c.steps().iter().map(|s| s.to_string()).collect()
            };
            assert_eq!(formatted, c.name());
        }
    }

    #[test]
    fn from_steps_derives_name() {
        let c = Condition::from_steps(vec![Rotate(-30.0), SaltPepper(0.2)]).unwrap();
        assert_eq!(c.name(), "RL30SP0.2");
        assert!(Condition::from_steps(vec![SaltPepper(2.0)]).is_err());
    }

    fn value() -> impl Strategy<Value = f64> {
        prop_oneof![Just(0.0), Just(0.1), Just(0.15), Just(0.2), Just(0.05), Just(1.0)]
    }

    fn step() -> impl Strategy<Value = PerturbationStep> {
        prop_oneof![
            value().prop_map(SaltPepper),
            value().prop_map(Gaussian),
            prop_oneof![Just(0.0), Just(30.0), Just(-30.0), Just(60.0), Just(-60.0), Just(12.5)].prop_map(Rotate),
        ]
    }

    proptest! {
        #[test]
        fn format_parse_round_trip(steps in prop::collection::vec(step(), 1..=2)) {
            let c = Condition::from_steps(steps.clone()).unwrap();
            prop_assert_eq!(c.steps(), &steps[..]);
            prop_assert_eq!(parse_condition(c.name()).unwrap(), c);
        }
    }
}
