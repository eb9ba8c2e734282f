pub mod covariance;
pub mod explicit;
pub mod ingest;
pub mod simulate;
pub mod tangent;
pub mod verify;

/// Shortest round-trip scientific form.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}
