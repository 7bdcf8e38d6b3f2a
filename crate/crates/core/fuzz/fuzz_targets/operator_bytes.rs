#![no_main]
use libfuzzer_sys::fuzz_target;
use tfloc::io::{operator_from_bytes, operator_to_bytes};

fuzz_target!(|data: &[u8]| {
    if let Ok(m) = operator_from_bytes(data) {
        assert_eq!(operator_to_bytes(&m), data);
    }
});
