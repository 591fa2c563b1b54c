use super::CriticalValues;
use crate::timeseries::BreakModel;

/// Asymptotic Zivot-Andrews critical values.
pub fn za_critical_values(model: BreakModel) -> CriticalValues {
    match model {
        BreakModel::A => CriticalValues::new(-5.34, -4.93, -4.58),
        BreakModel::B => CriticalValues::new(-4.93, -4.42, -4.11),
        BreakModel::C => CriticalValues::new(-5.57, -5.08, -4.82),
    }
}

/// Lee-Strazicich minimum LM critical values keyed by model and break count.
///
/// Two-break values are the published crash / break-in-trend tables; the
/// one-break trend-shift entry is the break-fraction 0.5 row.
pub fn ls_critical_values(model: super::LsModel, n_breaks: usize) -> CriticalValues {
    use super::LsModel;
    match (model, n_breaks) {
        (LsModel::A, 1) => CriticalValues::new(-4.239, -3.566, -3.211),
        (LsModel::C, 1) => CriticalValues::new(-5.11, -4.50, -4.21),
        (LsModel::A, _) => CriticalValues::new(-4.545, -3.842, -3.504),
        (LsModel::C, _) => CriticalValues::new(-5.823, -5.286, -4.989),
    }
}
