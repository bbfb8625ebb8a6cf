//! Dimensional config values. Each is written as "<number> <unit>" and a bare
//! number is rejected.

use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

fn split(text: &str) -> Option<(f64, &str)> {
    let text = text.trim();
    let cut = text.find(|c: char| c.is_alphabetic() || c == 'µ' || c == '°')?;
    let value = text[..cut].trim().parse::<f64>().ok()?;
    value.is_finite().then_some((value, text[cut..].trim()))
}

macro_rules! quantity {
    ($name:ident, $what:literal, $canonical:literal, [$($unit:literal => $scale:expr),+ $(,)?]) => {
        #[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
        pub struct $name(pub f64);

        impl $name {
            pub fn parse(text: &str) -> Result<Self, String> {
                let (value, unit) = split(text).ok_or_else(|| format!("'{text}' is not a {} with a unit", $what))?;
                let scale: f64 = match unit {
                    $($unit => $scale,)+
                    other => return Err(format!("unknown {} unit '{other}' in '{text}'", $what)),
                };
                Ok(Self(value * scale))
            }

            pub fn value(self) -> f64 {
                self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{} {}", self.0, $canonical)
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                struct V;
                impl<'de> Visitor<'de> for V {
                    type Value = $name;

                    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                        write!(f, "a {} string such as \"1.5 {}\"", $what, $canonical)
                    }

                    fn visit_str<E: de::Error>(self, v: &str) -> Result<$name, E> {
                        $name::parse(v).map_err(E::custom)
                    }

                    fn visit_f64<E: de::Error>(self, v: f64) -> Result<$name, E> {
                        Err(E::custom(format!("unit-less {} {v}; write it as \"{v} {}\"", $what, $canonical)))
                    }

                    fn visit_i64<E: de::Error>(self, v: i64) -> Result<$name, E> {
                        self.visit_f64(v as f64)
                    }

                    fn visit_u64<E: de::Error>(self, v: u64) -> Result<$name, E> {
                        self.visit_f64(v as f64)
                    }
                }
                d.deserialize_any(V)
            }
        }
    };
}

quantity!(Frequency, "frequency", "MHz", ["Hz" => 1e-6, "kHz" => 1e-3, "MHz" => 1.0, "GHz" => 1e3]);
quantity!(Duration, "duration", "us", ["s" => 1e6, "ms" => 1e3, "us" => 1.0, "µs" => 1.0, "ns" => 1e-3]);
quantity!(Angle, "angle", "rad", ["rad" => 1.0, "deg" => std::f64::consts::PI / 180.0, "°" => std::f64::consts::PI / 180.0]);

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug, Deserialize)]
    struct Probe {
        f: Frequency,
    }

    #[test]
    fn units_convert_to_mhz_and_us() {
        assert_eq!(Frequency::parse("4.9 MHz").unwrap().0, 4.9);
        assert_eq!(Frequency::parse("180 kHz").unwrap().0, 0.18);
        assert_eq!(Frequency::parse("-0.02GHz").unwrap().0, -20.0);
        assert_eq!(Duration::parse("500 ns").unwrap().0, 0.5);
        assert_eq!(Duration::parse("0.5 µs").unwrap().0, 0.5);
        assert!((Angle::parse("180 deg").unwrap().0 - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn bare_numbers_and_unknown_units_are_rejected() {
        assert!(toml::from_str::<Probe>("f = 4.9").unwrap_err().to_string().contains("unit-less"));
        assert!(toml::from_str::<Probe>("f = \"4.9\"").is_err());
        assert!(toml::from_str::<Probe>("f = \"4.9 us\"").is_err());
        assert_eq!(toml::from_str::<Probe>("f = \"2.4 MHz\"").unwrap().f.0, 2.4);
    }

    #[test]
    fn display_round_trips() {
        let f = Frequency(-123.456);
        assert_eq!(Frequency::parse(&f.to_string()).unwrap(), f);
    }
}
