#![no_main]
use libfuzzer_sys::fuzz_target;
use tfloc::covers::cover_from_json_on_lattice;
use tfloc::Lattice;

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    let lattice = Lattice::new(16, 2, 2).unwrap();
    if let Ok(cover) = cover_from_json_on_lattice(&text, &lattice) {
        assert!(cover.regions().iter().all(|s| s.support().all(|p| lattice.contains(p))));
    }
});
