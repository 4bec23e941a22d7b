use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::GraphError;

struct ElementInfo {
    symbol: &'static str,
    /// Standard atomic weight.
    mass: f64,
    /// Every valence a model element may be declared with; the first is the default.
    valences: &'static [u8],
    /// Valences tried, smallest first, when a molfile leaves the valence implicit.
    ingest: &'static [u8],
    /// Whether ion-valence equals the formal charge (true) or its negation.
    charge_adds_bonds: bool,
}

const TABLE: &[ElementInfo] = &[
    ElementInfo { symbol: "H", mass: 1.008, valences: &[1], ingest: &[1], charge_adds_bonds: false },
    ElementInfo { symbol: "B", mass: 10.81, valences: &[3], ingest: &[3], charge_adds_bonds: false },
    ElementInfo { symbol: "C", mass: 12.011, valences: &[4, 2, 3, 5], ingest: &[4], charge_adds_bonds: false },
    ElementInfo { symbol: "N", mass: 14.007, valences: &[3, 1, 2, 5], ingest: &[3], charge_adds_bonds: true },
    ElementInfo { symbol: "O", mass: 15.999, valences: &[2], ingest: &[2], charge_adds_bonds: true },
    ElementInfo { symbol: "F", mass: 18.998, valences: &[1], ingest: &[1], charge_adds_bonds: true },
    ElementInfo { symbol: "Na", mass: 22.990, valences: &[1], ingest: &[1], charge_adds_bonds: false },
    ElementInfo { symbol: "Si", mass: 28.085, valences: &[4], ingest: &[4], charge_adds_bonds: false },
    ElementInfo { symbol: "P", mass: 30.974, valences: &[3, 5], ingest: &[3, 5], charge_adds_bonds: true },
    ElementInfo { symbol: "S", mass: 32.06, valences: &[2, 4, 6], ingest: &[2, 4, 6], charge_adds_bonds: true },
    ElementInfo { symbol: "Cl", mass: 35.45, valences: &[1], ingest: &[1], charge_adds_bonds: true },
    ElementInfo { symbol: "K", mass: 39.098, valences: &[1], ingest: &[1], charge_adds_bonds: false },
    ElementInfo { symbol: "Br", mass: 79.904, valences: &[1], ingest: &[1], charge_adds_bonds: true },
    ElementInfo { symbol: "I", mass: 126.904, valences: &[1], ingest: &[1], charge_adds_bonds: true },
];

fn info(symbol: &str) -> Option<&'static ElementInfo> {
    TABLE.iter().find(|e| e.symbol == symbol)
}

/// A chemical element together with the valence it is modelled with.
///
/// `S_2`, `S_4` and `S_6` are three different elements of the model. The textual
/// form is the symbol alone when the valence is the element's default, and
/// `symbol_valence` otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementSpec {
    symbol: String,
    valence: u8,
    mass_star: i64,
}

impl ElementSpec {
    /// Element with its default valence.
    pub fn new(symbol: &str) -> Result<Self, GraphError> {
        let info = info(symbol).ok_or_else(|| GraphError::UnknownElement(symbol.to_string()))?;
        Self::with_valence(symbol, info.valences[0])
    }

    pub fn with_valence(symbol: &str, valence: u8) -> Result<Self, GraphError> {
        let info = info(symbol).ok_or_else(|| GraphError::UnknownElement(symbol.to_string()))?;
        if !info.valences.contains(&valence) {
            return Err(GraphError::UnknownElement(format!("{symbol} with valence {valence}")));
        }
        Ok(ElementSpec {
            symbol: info.symbol.to_string(),
            valence,
            mass_star: (10.0 * info.mass).floor() as i64,
        })
    }

    pub fn hydrogen() -> Self {
        Self::new("H").expect("hydrogen is in the element table")
    }

    pub fn symbol(&self) -> &str {
        &self.symbol
    }

    pub fn valence(&self) -> u8 {
        self.valence
    }

    /// floor(10 * atomic mass), in deci-daltons.
    pub fn mass_star(&self) -> i64 {
        self.mass_star
    }

    pub fn is_hydrogen(&self) -> bool {
        self.symbol == "H"
    }

    pub fn is_default_valence(&self) -> bool {
        info(&self.symbol).map(|i| i.valences[0] == self.valence).unwrap_or(true)
    }

    /// Valences to try, in order, when reading a molfile atom of this symbol.
    pub(crate) fn ingest_valences(symbol: &str) -> Option<&'static [u8]> {
        info(symbol).map(|i| i.ingest)
    }

    /// Ion-valence for a formal charge read from a molfile.
    ///
    /// Group 15-17 elements gain a bond per positive charge (ammonium, oxonium);
    /// the others lose one (carbocations, borates count the other way round).
    pub(crate) fn ion_valence_for_charge(symbol: &str, charge: i8) -> i8 {
        match info(symbol) {
            Some(i) if !i.charge_adds_bonds => -charge,
            _ => charge,
        }
    }

    /// Inverse of [`ElementSpec::ion_valence_for_charge`].
    pub(crate) fn charge_for_ion_valence(&self, ion_valence: i8) -> i8 {
        Self::ion_valence_for_charge(&self.symbol, ion_valence)
    }
}

impl fmt::Display for ElementSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_default_valence() {
            f.write_str(&self.symbol)
        } else {
            write!(f, "{}_{}", self.symbol, self.valence)
        }
    }
}

impl FromStr for ElementSpec {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once('_') {
            Some((sym, val)) => {
                let valence = val
                    .parse::<u8>()
                    .map_err(|_| GraphError::UnknownElement(s.to_string()))?;
                ElementSpec::with_valence(sym, valence)
            }
            None => ElementSpec::new(s),
        }
    }
}

impl Serialize for ElementSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ElementSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
