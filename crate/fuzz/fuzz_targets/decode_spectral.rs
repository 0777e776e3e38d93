#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(rows) = kinkspec::io::decode_spectral(data) {
        assert_eq!(kinkspec::io::encode_spectral(&rows).len(), data.len());
    }
});
