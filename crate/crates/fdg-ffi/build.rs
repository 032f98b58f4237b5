fn main() {
    let crate_dir = std::env::var("CARGO_MANIFEST_DIR").unwrap();

    cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(cbindgen::Config {
            language: cbindgen::Language::C,
            cpp_compat: true,
            include_guard: Some("FDG_H".into()),
            documentation: true,
            documentation_style: cbindgen::DocumentationStyle::C,
            ..Default::default()
        })
        .generate()
        .expect("unable to generate C bindings")
        .write_to_file(std::path::Path::new(&crate_dir).join("include/fdg.h"));

    println!("cargo:rerun-if-changed=src/lib.rs");
}
