/// Shortest decimal that parses back to the same `f64`; stable across platforms.
pub(crate) fn float(x: f64) -> String {
    format!("{x:?}")
}
