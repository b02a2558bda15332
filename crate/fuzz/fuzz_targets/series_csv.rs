//! The series importer must reject arbitrary input with a line-numbered
//! error, never a panic, and anything it accepts must round-trip through
//! the exporter.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(values) = lancor::dgp::import_series_csv(text) {
        let back = lancor::dgp::import_series_csv(&lancor::dgp::export_series_csv(&values))
            .expect("exporter output must reimport");
        assert_eq!(back, values);
    }
});
