#![no_main]
use libfuzzer_sys::fuzz_target;
use tfloc::covers::{cover_from_json, cover_to_json, validate_cover};

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    // keep the grid small so validation stays cheap
    if let Ok(cover) = cover_from_json(&text) {
        if cover.len() <= 64 {
            let _ = validate_cover(&cover, cover.len() / 2, Some(1), 1);
        }
        let again = cover_from_json(&cover_to_json(&cover)).expect("written cover parses");
        assert_eq!(again.regions(), cover.regions());
    }
});
