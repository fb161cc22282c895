fn main() {
    println!("ptower");
}
