//! Instance input/output, random generators and the enumeration oracle.

mod brute;
mod format;
mod generate;

pub use brute::{brute_force_optimum, EnumerationLimit};
pub use format::{parse_wcsp, write_wcsp, ParseError};
pub use generate::{
    barabasi_albert, gen_scale_free, gen_uniform, GenerateError, GeneratorParams, WEIGHT_UNIVERSE_FACTOR,
};
