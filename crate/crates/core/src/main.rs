fn main() { println!("morphic"); }
