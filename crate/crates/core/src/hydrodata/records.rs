use super::{DataError, HistoricalFlood, PaleoBound};
use serde::Deserialize;

/// Historical floods and paleo bounds read from one event CSV.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EventRecords {
    pub historical: Vec<HistoricalFlood>,
    pub paleo: Vec<PaleoBound>,
}

#[derive(Debug, Deserialize)]
struct Row {
    kind: String,
    year_or_age_lower: f64,
    age_upper: Option<f64>,
    discharge_or_lower: f64,
    discharge_upper: Option<f64>,
}

/// Reads rows of `kind, year_or_age_lower, age_upper, discharge_or_lower,
/// discharge_upper`. `historical` rows use the first and third value
/// columns; `paleo` rows use all four. Discharges are in m³/s.
pub fn parse_event_csv(text: &str) -> Result<EventRecords, DataError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut out = EventRecords::default();
    for (i, row) in reader.deserialize::<Row>().enumerate() {
        let line = i + 2;
        let err = |message: String| DataError::EventCsv { line, message };
        let row = row.map_err(|e| err(e.to_string()))?;
        match row.kind.to_ascii_lowercase().as_str() {
            "historical" => {
                if row.year_or_age_lower.fract() != 0.0 {
                    return Err(err(format!("year `{}` is not an integer", row.year_or_age_lower)));
                }
                out.historical.push(HistoricalFlood::new(
                    row.year_or_age_lower as i32,
                    row.discharge_or_lower,
                ));
            }
            "paleo" => {
                let (Some(age_upper), Some(discharge_upper)) = (row.age_upper, row.discharge_upper) else {
                    return Err(err("paleo rows need age_upper and discharge_upper".into()));
                };
                let bound = PaleoBound::new(
                    row.discharge_or_lower,
                    discharge_upper,
                    row.year_or_age_lower,
                    age_upper,
                );
                bound.validate().map_err(|e| err(e.to_string()))?;
                out.paleo.push(bound);
            }
            other => return Err(err(format!("unknown record kind `{other}`"))),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_both_kinds() {
        let text = "kind,year_or_age_lower,age_upper,discharge_or_lower,discharge_upper\n\
historical,1864,,1100,\n\
paleo,700,870,3500,5500\n";
        let r = parse_event_csv(text).unwrap();
        assert_eq!(r.historical, vec![HistoricalFlood::new(1864, 1100.0)]);
        assert_eq!(r.paleo, vec![PaleoBound::new(3500.0, 5500.0, 700.0, 870.0)]);
    }

    #[test]
    fn reports_line_numbers() {
        let text = "kind,year_or_age_lower,age_upper,discharge_or_lower,discharge_upper\n\
historical,1864,,1100,\n\
paleo,700,,3500,5500\n";
        assert!(matches!(
            parse_event_csv(text),
            Err(DataError::EventCsv { line: 3, .. })
        ));
        let text = "kind,year_or_age_lower,age_upper,discharge_or_lower,discharge_upper\nflood,1,,2,\n";
        assert!(matches!(
            parse_event_csv(text),
            Err(DataError::EventCsv { line: 2, .. })
        ));
    }
}
