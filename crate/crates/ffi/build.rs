use std::env;
use std::fs;
use std::path::PathBuf;

fn main() {
    let dir = PathBuf::from(env::var("CARGO_MANIFEST_DIR").unwrap());
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
    let config = cbindgen::Config::from_file(dir.join("cbindgen.toml")).expect("cbindgen.toml");
    let bindings = cbindgen::Builder::new()
        .with_crate(&dir)
        .with_config(config)
        .generate()
        .expect("header generation");
    let mut out = Vec::new();
    bindings.write(&mut out);
    let header = dir.join("include").join("hfts.h");
    // Only touch the file when it changes, so downstream builds are not invalidated.
    if fs::read(&header).ok().as_deref() != Some(&out[..]) {
        fs::create_dir_all(header.parent().unwrap()).unwrap();
        fs::write(&header, out).unwrap();
    }
}
