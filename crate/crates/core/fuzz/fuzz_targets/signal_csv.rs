#![no_main]
use libfuzzer_sys::fuzz_target;
use tfloc::io::{signal_from_csv, signal_to_csv};

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    if let Ok(f) = signal_from_csv(&text) {
        let again = signal_from_csv(&signal_to_csv(&f)).expect("written CSV parses");
        assert_eq!(again, f);
    }
});
