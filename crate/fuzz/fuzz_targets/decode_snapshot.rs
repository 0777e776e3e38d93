#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(state) = kinkspec::io::decode_snapshot(text) {
        assert_eq!(state.amps.len(), state.basis.states.len());
    }
});
