fn main() {
    std::process::exit(fullerlab::main_entry());
}
