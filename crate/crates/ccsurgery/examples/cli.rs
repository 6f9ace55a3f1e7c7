fn main() {
    let code = ccsurgery::cli::run(["ccsurgery", "params", "24_8_3", "--json"]);
    println!("exit code {code}");
}
