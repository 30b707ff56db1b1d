//! Shipped catalog data.

pub const ALGEBRAS: &str = include_str!("../data/algebras.txt");
pub const BIALGEBRAS: &str = include_str!("../data/bialgebras.txt");
pub const CHARTS: &str = include_str!("../data/charts.txt");
pub const GOLDEN: &str = include_str!("../data/golden.txt");
pub const EXAMPLE_SYSTEM: &str = include_str!("../data/systems/v_example.txt");
