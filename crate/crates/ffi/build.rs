use std::path::Path;

fn main() {
    let dir = std::env::var("CARGO_MANIFEST_DIR").unwrap();
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
    let config = cbindgen::Config::from_file(Path::new(&dir).join("cbindgen.toml")).expect("cbindgen.toml");
    let bindings = cbindgen::Builder::new()
        .with_crate(&dir)
        .with_config(config)
        .generate()
        .expect("header generation failed");
    let out = Path::new(&dir).join("include/cubetopo.h");
    // Rewrite only on change so the header keeps its timestamp.
    let mut text = Vec::new();
    bindings.write(&mut text);
    if std::fs::read(&out).ok().as_deref() != Some(text.as_slice()) {
        std::fs::write(&out, text).expect("write include/cubetopo.h");
    }
}
