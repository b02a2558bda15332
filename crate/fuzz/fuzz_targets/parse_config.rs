//! The config grammar must reject arbitrary input with an error, never a
//! panic, whether parsed alone or with overrides layered on top.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let _ = lancor_cli::config::parse_config(text);
    if let Some((head, tail)) = text.split_once('\n') {
        let overrides = [head.to_string()];
        let _ = lancor_cli::config::parse_config_with(tail, &overrides, Some(7));
    }
});
