#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok((ks, us)) = kinkspec::io::read_coefficients(data) {
        assert_eq!(ks.len(), us.len());
        assert!(ks.windows(2).all(|w| w[0] < w[1]));
    }
});
