fn main() {
    // Singular value decompositions go through the system LAPACKE library.
    println!("cargo:rustc-link-lib=dylib=lapacke");
}
