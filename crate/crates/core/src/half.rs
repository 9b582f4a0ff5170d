use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Integer or half-integer quantum number, stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Half(pub i32);

impl Half {
    pub const ZERO: Half = Half(0);
    pub const HALF: Half = Half(1);
    pub const NEG_HALF: Half = Half(-1);

    pub fn from_twice(twice: i32) -> Self {
        Half(twice)
    }

    pub fn from_int(n: i32) -> Self {
        Half(2 * n)
    }

    /// Accepts only exact multiples of one half.
    pub fn from_f64(x: f64) -> Option<Self> {
        let twice = 2.0 * x;
        if twice.is_finite() && (twice - twice.round()).abs() < 1e-9 {
            Some(Half(twice.round() as i32))
        } else {
            None
        }
    }

    pub fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// Sublevels -j, -j+1, ..., j.
    pub fn projections(self) -> impl Iterator<Item = Half> {
        let j2 = self.0;
        (-j2..=j2).step_by(2).map(Half)
    }
}

impl std::ops::Add for Half {
    type Output = Half;
    fn add(self, rhs: Half) -> Half {
        Half(self.0 + rhs.0)
    }
}

impl std::ops::Sub for Half {
    type Output = Half;
    fn sub(self, rhs: Half) -> Half {
        Half(self.0 - rhs.0)
    }
}

impl std::ops::Neg for Half {
    type Output = Half;
    fn neg(self) -> Half {
        Half(-self.0)
    }
}

impl fmt::Display for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl Serialize for Half {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.value())
    }
}

impl<'de> Deserialize<'de> for Half {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let x = f64::deserialize(d)?;
        Half::from_f64(x)
            .ok_or_else(|| serde::de::Error::custom(format!("{x} is not a multiple of 1/2")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_halves() {
        assert_eq!(Half::from_f64(-1.5), Some(Half(-3)));
        assert_eq!(Half::from_f64(0.3), None);
        assert_eq!(Half(3).to_string(), "3/2");
        assert_eq!(Half(-4).to_string(), "-2");
    }

    #[test]
    fn projections_span_the_multiplet() {
        let ms: Vec<_> = Half(3).projections().collect();
        assert_eq!(ms, vec![Half(-3), Half(-1), Half(1), Half(3)]);
    }
}
