pub mod certify;
pub mod instance;
pub mod ratio;
pub mod stream;

use crate::error::CliError;
use serde::Serialize;

pub fn print_json<T: Serialize>(v: &T) -> Result<(), CliError> {
    println!("{}", serde_json::to_string(v)?);
    Ok(())
}
