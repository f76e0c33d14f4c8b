//! CSV and JSON serialization. CSV carries 6 significant digits with a dot
//! decimal separator and `-` for eigenvalues that do not exist in the row's
//! regime; JSON carries full precision.

use sturmspec_core::heleshaw::ScanRow;
use sturmspec_core::spectrum::{AuxSpectrum, EigenvalueRecord};

/// Formats to `digits` significant figures, trimming trailing zeros.
pub fn format_sig(v: f64, digits: usize) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let mag = v.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - mag).clamp(0, 17) as usize;
    let s = format!("{v:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

const TABLE_HEADER: &str = "k,alpha1,beta1,lambda_-1,lambda_-0,lambda_0,lambda_1,lambda_2";

/// Scan rows in the fixed wave-number table layout.
pub fn scan_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from(TABLE_HEADER);
    out.push('\n');
    for row in rows {
        let cell = |idx: &str| -> String {
            row.entries
                .iter()
                .find(|e| e.index == idx)
                .map(|e| format_sig(e.lambda, 6))
                .unwrap_or_else(|| "-".into())
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            format_sig(row.k, 6),
            format_sig(row.alpha1, 6),
            format_sig(row.beta1, 6),
            cell("-1"),
            cell("-0"),
            cell("0"),
            cell("1"),
            cell("2"),
        ));
    }
    out
}

/// Eigenvalue records as CSV.
pub fn spectrum_csv(records: &[EigenvalueRecord]) -> String {
    let mut out = String::from("index,lambda,zero_count,char_residual\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.index,
            format_sig(r.lambda, 6),
            r.zero_count,
            format_sig(r.char_residual, 3),
        ));
    }
    out
}

/// Auxiliary spectrum as CSV.
pub fn aux_csv(aux: &AuxSpectrum) -> String {
    let mut out = String::from("index,eta\n");
    if let Some(e) = aux.eta_neg0 {
        out.push_str(&format!("-0,{}\n", format_sig(e, 6)));
    }
    for (n, eta) in aux.etas.iter().enumerate() {
        out.push_str(&format!("{n},{}\n", format_sig(*eta, 6)));
    }
    out
}

/// Eigenfunction samples as CSV.
pub fn samples_csv(samples: &[(f64, f64, f64)]) -> String {
    let mut out = String::from("x,f,pf_prime\n");
    for (x, f, u) in samples {
        out.push_str(&format!(
            "{},{},{}\n",
            format_sig(*x, 9),
            format_sig(*f, 9),
            format_sig(*u, 9)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_sig(0.9, 6), "0.9");
        assert_eq!(format_sig(15.6, 6), "15.6");
        assert_eq!(format_sig(158.90592, 6), "158.906");
        assert_eq!(format_sig(-0.0052976, 6), "-0.0052976");
        assert_eq!(format_sig(-6552.9, 6), "-6552.9");
        assert_eq!(format_sig(14.496787, 6), "14.4968");
        assert_eq!(format_sig(0.0, 6), "0");
        assert_eq!(format_sig(2.0233001, 6), "2.0233");
    }

    #[test]
    fn csv_is_locale_independent() {
        let s = format_sig(1234.5678, 6);
        assert!(s.contains('.') && !s.contains(','));
    }
}
