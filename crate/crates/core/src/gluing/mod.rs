//! Cut-offs, the cut-off balanced metric and the preglued metric.

pub mod cutoff;
pub mod cutoff_metric;
pub mod params;
pub mod preglue;
pub mod singular;


use std::fmt::Write as _;

pub use cutoff::{chi, scalar_profiles, CutoffKind, CutoffProfile, ScalarProfiles};
pub use cutoff_metric::{cutoff_squared, omega_r, tail_one_one, CutoffMetric, TailSource};
pub use params::{DerivedParams, GluingParams};
pub use preglue::{PregluedField, Region};
pub use singular::{singular_reference_metric, singular_side_metric, SingularSideField};

use crate::conifold::{radius, ChartPoint};
use crate::error::Result;
use crate::field::MetricField;

/// CSV rows `label,r,re_00,im_00,…,re_22,im_22` for the metric at each point.
pub fn export_csv(field: &dyn MetricField, points: &[ChartPoint], region: &dyn Fn(&ChartPoint) -> String) -> Result<String> {
    let mut s = String::from("region,r");
    for j in 0..3 {
        for k in 0..3 {
            let _ = write!(s, ",re_{j}{k},im_{j}{k}");
        }
    }
    s.push('\n');
    for pt in points {
        let h = field.metric(pt)?;
        let _ = write!(s, "{},{:.17e}", region(pt), radius(pt)?);
        for j in 0..3 {
            for k in 0..3 {
                let c = h.m[(j, k)];
                let _ = write!(s, ",{:.17e},{:.17e}", c.re, c.im);
            }
        }
        s.push('\n');
    }
    Ok(s)
}
