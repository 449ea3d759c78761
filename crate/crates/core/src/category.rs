use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The thirteen annotated object classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Car,
    Van,
    Bus,
    Truck,
    Cyclist,
    Motorcyclist,
    Tricyclist,
    Barrow,
    Pedestrian,
    TrafficCone,
    TrianglePlate,
    UnknownMovable,
    UnknownUnmovable,
}

/// Coarse grouping used for default IoU thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CategoryGroup {
    MotorVehicle,
    NonMotorVehicle,
    Pedestrian,
    Other,
}

impl Category {
    pub const ALL: [Category; 13] = [
        Category::Car,
        Category::Van,
        Category::Bus,
        Category::Truck,
        Category::Cyclist,
        Category::Motorcyclist,
        Category::Tricyclist,
        Category::Barrow,
        Category::Pedestrian,
        Category::TrafficCone,
        Category::TrianglePlate,
        Category::UnknownMovable,
        Category::UnknownUnmovable,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Category::Car => "car",
            Category::Van => "van",
            Category::Bus => "bus",
            Category::Truck => "truck",
            Category::Cyclist => "cyclist",
            Category::Motorcyclist => "motorcyclist",
            Category::Tricyclist => "tricyclist",
            Category::Barrow => "barrow",
            Category::Pedestrian => "pedestrian",
            Category::TrafficCone => "traffic_cone",
            Category::TrianglePlate => "triangle_plate",
            Category::UnknownMovable => "unknown_movable",
            Category::UnknownUnmovable => "unknown_unmovable",
        }
    }

    pub fn group(self) -> CategoryGroup {
        match self {
            Category::Car | Category::Van | Category::Bus | Category::Truck => CategoryGroup::MotorVehicle,
            Category::Cyclist | Category::Motorcyclist | Category::Tricyclist | Category::Barrow => {
                CategoryGroup::NonMotorVehicle
            }
            Category::Pedestrian => CategoryGroup::Pedestrian,
            _ => CategoryGroup::Other,
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownCategory(pub String);

impl FromStr for Category {
    type Err = UnknownCategory;

    /// Case-insensitive; `-` and `_` are interchangeable.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.to_ascii_lowercase().replace('-', "_");
        Category::ALL
            .iter()
            .copied()
            .find(|c| c.token() == norm)
            .ok_or_else(|| UnknownCategory(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_round_trip() {
        for c in Category::ALL {
            assert_eq!(c.token().parse::<Category>().unwrap(), c);
        }
        assert_eq!("Traffic-Cone".parse::<Category>().unwrap(), Category::TrafficCone);
        assert!("tank".parse::<Category>().is_err());
    }
}
