//! Regenerate the bundled sample framework files in samples/.

use equigs::io::{to_json_string, write_atomic, FrameworkFile};
use equigs::samples::all_samples;

fn main() {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../samples");
    for sample in all_samples() {
        let file = FrameworkFile::from(&sample);
        let path = root.join(format!("{}.json", sample.name));
        write_atomic(&path, &to_json_string(&file)).expect("sample file written");
        println!("wrote {}", path.display());
    }
}
