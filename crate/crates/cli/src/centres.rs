//! Urban-centre lists: one `name,lat,lon` per line, `#` comments.

use std::collections::BTreeSet;
use std::path::Path;

use moodcycle_core::geo::{LatLon, UrbanCentre};

use crate::error::{data, AppError, AppResult};

pub fn parse_centres(text: &str) -> Result<Vec<UrbanCentre>, String> {
    let mut centres = Vec::new();
    let mut names = BTreeSet::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let n = idx + 1;
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let [name, lat, lon] = fields[..] else {
            return Err(format!("line {n}: expected name,lat,lon"));
        };
        if name.is_empty() {
            return Err(format!("line {n}: empty name"));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| format!("line {n}: {s:?} is not a number"));
        let location =
            LatLon::new(num(lat)?, num(lon)?).map_err(|e| format!("line {n}: {e}"))?;
        if !names.insert(name.to_string()) {
            return Err(format!("line {n}: duplicate centre {name:?}"));
        }
        centres.push(UrbanCentre {
            name: name.to_string(),
            location,
        });
    }
    if centres.is_empty() {
        return Err("no centres listed".into());
    }
    Ok(centres)
}

pub fn load_centres(path: &Path) -> AppResult<Vec<UrbanCentre>> {
    let text = std::fs::read_to_string(path).map_err(AppError::io(path))?;
    parse_centres(&text).map_err(|e| data(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_names_and_coordinates() {
        let c = parse_centres("# big ones\nLondon,51.5074,-0.1278\n\nBristol, 51.4545, -2.5879 # west\n").unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[1].name, "Bristol");
        assert_eq!(c[1].location.lon(), -2.5879);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(parse_centres("London,51.5\n").is_err());
        assert!(parse_centres("London,91,0\n").is_err());
        assert!(parse_centres("A,1,1\nA,2,2\n").is_err());
        assert!(parse_centres("# nothing\n").is_err());
    }

    #[test]
    fn shipped_list_has_54_centres() {
        let text = include_str!("../data/uk_centres.txt");
        assert_eq!(parse_centres(text).unwrap().len(), 54);
    }
}
