#![no_main]
use libfuzzer_sys::fuzz_target;
use tfloc_cli::RunConfig;

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    let _ = RunConfig::from_json(&text);
});
