//! Renders the reference result bundle into text tables and CSV, writing
//! them to the directory given as the first argument if any.

use kgbench::fixtures::reference_results;
use kgbench::report::render;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rendered = render(&reference_results())?;
    for art in &rendered.artifacts {
        println!("== {}", art.name);
        print!("{}", art.content);
    }
    if let Some(dir) = std::env::args().nth(1) {
        rendered.write_to(dir.as_ref())?;
        println!("written to {dir}");
    }
    Ok(())
}
