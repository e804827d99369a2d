#![no_main]

use fourier_inpaint::harness::records::{read_records, RecordWriter};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(records) = read_records(data) {
        // Whatever parses must survive a write/read round trip.
        let mut w = RecordWriter::new(Vec::new()).unwrap();
        for r in &records {
            w.write(r).unwrap();
        }
        let bytes = w.into_inner().unwrap();
        let again = read_records(bytes.as_slice()).unwrap();
        assert_eq!(again.len(), records.len());
    }
});
