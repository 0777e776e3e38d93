#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(m) = kinkspec::io::decode_matrix(data) {
        assert_eq!(kinkspec::io::encode_matrix(&m).len(), data.len());
    }
});
