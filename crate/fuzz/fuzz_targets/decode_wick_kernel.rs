#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(k) = kinkspec::io::decode_wick_kernel(data) {
        assert_eq!(kinkspec::io::encode_wick_kernel(&k).len(), data.len());
    }
});
