//! Full analysis of `F(X) = O` and comparison of solution sets.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Result;
use crate::orbits::{decompose, OrbitDescriptor};
use crate::rpoly::{find_root_profile, split_real_complex, RealPoly, RootProfile};
use crate::tol::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize), serde(tag = "class", content = "count", rename_all = "lowercase"))]
pub enum Cardinality {
    Empty,
    Finite(usize),
    Continuum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub f: RealPoly,
    pub profile: RootProfile,
    pub orbits: Vec<OrbitDescriptor>,
    /// Factor carrying the real roots.
    pub g_factor: Option<RealPoly>,
    /// Factor without real roots.
    pub h_factor: Option<RealPoly>,
    pub cardinality: Cardinality,
    /// 2 if some orbit is a surface, 0 if all are points, -1 if there are none.
    pub dimension_claim: i32,
    pub notes: Vec<String>,
}

pub fn analyze(f: &RealPoly, tol: &Tolerances) -> Result<AnalysisReport> {
    let profile = find_root_profile(f, tol)?;
    let (g_factor, h_factor) = split_real_complex(f, &profile, tol)?;
    let orbits = decompose(&profile);
    let (cardinality, dimension_claim) = if orbits.is_empty() {
        (Cardinality::Empty, -1)
    } else if orbits.iter().all(|d| d.is_scalar()) {
        (Cardinality::Finite(orbits.len()), 0)
    } else {
        (Cardinality::Continuum, 2)
    };
    let mut notes = Vec::new();
    if dimension_claim == 2 {
        notes.push(String::from(
            "every non-scalar orbit is a closed 2-dimensional surface in R^4; the solution set is sigma-compact",
        ));
    }
    if g_factor.is_some() && h_factor.is_some() {
        notes.push(String::from(
            "solutions split disjointly between the real-root factor and the factor without real roots",
        ));
    }
    Ok(AnalysisReport { f: f.clone(), profile, orbits, g_factor, h_factor, cardinality, dimension_claim, notes })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ComparisonReport {
    pub only_in_first: Vec<OrbitDescriptor>,
    pub only_in_second: Vec<OrbitDescriptor>,
    pub common: Vec<OrbitDescriptor>,
    pub equal: bool,
}

/// Set comparison of descriptor lists, matching parameters within the
/// cluster radius. `common` lists descriptors from `first`.
pub fn compare_orbit_sets(first: &[OrbitDescriptor], second: &[OrbitDescriptor], tol: &Tolerances) -> ComparisonReport {
    let in_list = |d: &OrbitDescriptor, list: &[OrbitDescriptor]| list.iter().any(|e| e.approx_eq(d, tol));
    let only_in_first: Vec<_> = first.iter().filter(|d| !in_list(d, second)).copied().collect();
    let only_in_second: Vec<_> = second.iter().filter(|d| !in_list(d, first)).copied().collect();
    let common = first.iter().filter(|d| in_list(d, second)).copied().collect();
    let equal = only_in_first.is_empty() && only_in_second.is_empty();
    ComparisonReport { only_in_first, only_in_second, common, equal }
}

pub fn compare_solution_sets(f1: &RealPoly, f2: &RealPoly, tol: &Tolerances) -> Result<ComparisonReport> {
    let a = decompose(&find_root_profile(f1, tol)?);
    let b = decompose(&find_root_profile(f2, tol)?);
    Ok(compare_orbit_sets(&a, &b, tol))
}
