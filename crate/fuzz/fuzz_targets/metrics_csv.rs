#![no_main]

use isac_clutter::harness::{parse_metrics_csv, write_metrics_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(rows) = parse_metrics_csv(data) {
        let mut buf = Vec::new();
        write_metrics_csv(&mut buf, &rows).expect("write accepted rows");
        let again = parse_metrics_csv(&buf[..]).expect("reparse written rows");
        assert_eq!(again, rows);
    }
});
