use super::{AnnualPeak, DataError};
use serde::{Deserialize, Serialize};

/// Cubic feet per second to cubic metres per second.
pub const CFS_TO_CMS: f64 = 0.028_316_846_592;

/// Unit of `peak_va` in an RDB file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DischargeUnit {
    /// Values already in m³/s.
    #[default]
    Cms,
    /// Cubic feet per second, as exported by NWIS.
    Cfs,
}

impl DischargeUnit {
    pub fn to_cms(self, value: f64) -> f64 {
        match self {
            DischargeUnit::Cms => value,
            DischargeUnit::Cfs => value * CFS_TO_CMS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RdbParse {
    pub site_no: Option<String>,
    pub peaks: Vec<AnnualPeak>,
    /// Data rows dropped for a missing, non-numeric or non-positive `peak_va`.
    pub skipped: usize,
}

/// Parses a tab-delimited USGS peak-flow RDB export.
///
/// `#` lines are comments. The first non-comment line is the header, the
/// second the column-format line (`5s 15s 10d ...`). The year of each peak
/// is read from the first four characters of `peak_dt`.
pub fn parse_usgs_rdb(text: &str, unit: DischargeUnit) -> Result<RdbParse, DataError> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| DataError::Rdb("no header line".into()))?;
    let columns: Vec<&str> = header.split('\t').map(str::trim).collect();
    let find = |name: &'static str| {
        columns
            .iter()
            .position(|c| *c == name)
            .ok_or(DataError::MissingColumn(name))
    };
    let (site_col, date_col, value_col) = (find("site_no")?, find("peak_dt")?, find("peak_va")?);
    match lines.next() {
        Some((_, fmt)) if fmt.split('\t').all(is_format_token) => {}
        Some((i, _)) => return Err(DataError::Rdb(format!("line {}: expected column-format line", i + 1))),
        None => return Err(DataError::Rdb("missing column-format line".into())),
    }

    let mut site_no = None;
    let mut peaks = Vec::new();
    let mut skipped = 0;
    for (i, line) in lines {
        let fields: Vec<&str> = line.split('\t').collect();
        let field = |c: usize| fields.get(c).map(|s| s.trim()).unwrap_or("");
        let date = field(date_col);
        let year: i32 = date
            .get(0..4)
            .and_then(|y| y.parse().ok())
            .ok_or_else(|| DataError::Rdb(format!("line {}: unreadable peak_dt `{date}`", i + 1)))?;
        if site_no.is_none() && !field(site_col).is_empty() {
            site_no = Some(field(site_col).to_string());
        }
        match field(value_col).parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => peaks.push(AnnualPeak::new(year, unit.to_cms(v))),
            _ => skipped += 1,
        }
    }
    Ok(RdbParse {
        site_no,
        peaks,
        skipped,
    })
}

fn is_format_token(tok: &str) -> bool {
    let tok = tok.trim();
    let digits = tok.trim_end_matches(|c: char| c.is_ascii_alphabetic());
    !tok.is_empty() && digits.len() < tok.len() && digits.chars().all(|c| c.is_ascii_digit())
}

/// Writes peaks in the RDB layout read by [`parse_usgs_rdb`], values in m³/s.
pub fn write_usgs_rdb(site_no: &str, peaks: &[AnnualPeak]) -> String {
    let mut out =
        String::from("# annual peak discharges, m3/s\nagency_cd\tsite_no\tpeak_dt\tpeak_va\n5s\t15s\t10d\t8s\n");
    for p in peaks {
        out.push_str(&format!(
            "USGS\t{site_no}\t{:04}-00-00\t{:?}\n",
            p.water_year, p.discharge
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXTURE: &str = "# synthetic\n#\nagency_cd\tsite_no\tpeak_dt\tpeak_tm\tpeak_va\tpeak_cd\n\
5s\t15s\t10d\t6s\t8s\t33s\n\
USGS\t07099500\t1921-06-04\t\t283\t\n\
USGS\t07099500\t1922-07-01\t\t\t6\n\
USGS\t07099500\t1923-05-20\t\tabc\t\n\
USGS\t07099500\t1924-05-20\t\t0\t\n\
USGS\t07099500\t1925-00-00\t\t45.5\t\n";

    #[test]
    fn parses_fixture() {
        let r = parse_usgs_rdb(FIXTURE, DischargeUnit::Cms).unwrap();
        assert_eq!(r.site_no.as_deref(), Some("07099500"));
        assert_eq!(r.peaks, vec![AnnualPeak::new(1921, 283.0), AnnualPeak::new(1925, 45.5)]);
        assert_eq!(r.skipped, 3);
    }

    #[test]
    fn converts_cfs() {
        let r = parse_usgs_rdb(FIXTURE, DischargeUnit::Cfs).unwrap();
        assert!((r.peaks[0].discharge - 283.0 * 0.028316846592).abs() < 1e-12);
    }

    #[test]
    fn rejects_missing_column() {
        let text = "agency_cd\tsite_no\tpeak_dt\n5s\t15s\t10d\n";
        assert_eq!(
            parse_usgs_rdb(text, DischargeUnit::Cms),
            Err(DataError::MissingColumn("peak_va"))
        );
    }

    #[test]
    fn rejects_missing_format_line() {
        let text = "site_no\tpeak_dt\tpeak_va\n07099500\t1921-06-04\t283\n";
        assert!(matches!(
            parse_usgs_rdb(text, DischargeUnit::Cms),
            Err(DataError::Rdb(_))
        ));
    }
}
