use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hidden-layer activation family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Linear,
    #[serde(rename = "quad")]
    Quadratic,
    Relu,
}

impl Activation {
    pub const ALL: [Activation; 3] = [Activation::Linear, Activation::Quadratic, Activation::Relu];

    pub fn name(self) -> &'static str {
        match self {
            Activation::Linear => "linear",
            Activation::Quadratic => "quad",
            Activation::Relu => "relu",
        }
    }

    /// Checks that `d` is an admissible hidden-layer width for this activation.
    ///
    /// Quadratic and ReLU networks split the output weights into `d/2` entries
    /// of -1 and `d/2` entries of +1, so `d` must be even. Linear networks
    /// accept any `d >= 1` because the bound does not depend on the output
    /// weights.
    pub fn validate_width(self, d: usize) -> Result<()> {
        match self {
            Activation::Linear if d >= 1 => Ok(()),
            Activation::Linear => Err(Error::Domain("hidden width d must be >= 1".into())),
            Activation::Quadratic | Activation::Relu => {
                if d >= 2 && d % 2 == 0 {
                    Ok(())
                } else {
                    Err(Error::Domain(format!(
                        "{} activation requires d to be an even positive integer \
                         (output weights are d/2 entries of -1 and d/2 of +1); got d={d}",
                        self.name()
                    )))
                }
            }
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" | "lin" => Ok(Activation::Linear),
            "quad" | "quadratic" => Ok(Activation::Quadratic),
            "relu" => Ok(Activation::Relu),
            other => Err(Error::Domain(format!("unknown activation '{other}'"))),
        }
    }
}

/// Bounding method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Plain random duality.
    Rdt,
    /// Partially lifted random duality.
    Plrdt,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Rdt => "rdt",
            Method::Plrdt => "plrdt",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rdt" => Ok(Method::Rdt),
            "plrdt" | "pl-rdt" => Ok(Method::Plrdt),
            other => Err(Error::Domain(format!("unknown method '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn width_rules() {
        assert!(Activation::Linear.validate_width(1).is_ok());
        assert!(Activation::Linear.validate_width(0).is_err());
        assert!(Activation::Quadratic.validate_width(3).is_err());
        assert!(Activation::Relu.validate_width(1).is_err());
        assert!(Activation::Relu.validate_width(4).is_ok());
    }

    #[test]
    fn parse_round_trip() {
        for a in Activation::ALL {
            assert_eq!(a.name().parse::<Activation>().unwrap(), a);
        }
        assert_eq!("plrdt".parse::<Method>().unwrap(), Method::Plrdt);
        assert!("sigmoid".parse::<Activation>().is_err());
    }
}
