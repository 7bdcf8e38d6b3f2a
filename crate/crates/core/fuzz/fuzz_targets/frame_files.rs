#![no_main]
use libfuzzer_sys::fuzz_target;
use tfloc::io::frame_from_files;

fuzz_target!(|data: &[u8]| {
    // first two bytes pick where the manifest ends and the atom file starts
    if data.len() < 2 {
        return;
    }
    let split = (u16::from_le_bytes([data[0], data[1]]) as usize).min(data.len() - 2);
    let (manifest, atoms) = data[2..].split_at(split);
    let _ = frame_from_files(&String::from_utf8_lossy(manifest), atoms);
});
