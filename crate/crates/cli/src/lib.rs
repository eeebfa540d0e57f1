//! Command-line interface over the tablecount library. The entire CLI is a
//! library function so tests can drive it in-process and compare against
//! the installed binary byte for byte.

/// Runs the CLI on the given arguments, returning captured stdout and the
/// process exit code.
pub fn execute<I, S>(args: I) -> (String, i32)
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let _ = args.into_iter().map(Into::into).collect::<Vec<String>>();
    (String::new(), 0)
}
