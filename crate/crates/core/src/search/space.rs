use serde::{Deserialize, Serialize};

use crate::cluster::{expand_with, Clustering};
use crate::model::Instance;
use crate::num::{self, Rational};
use crate::periodic::{combine_bounds, DemandProfile, DeviationVector, PeriodicDemand};

/// How alpha is parameterized during a search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode", content = "clustering")]
pub enum SpaceMode {
    /// One alpha for every commodity.
    Scalar,
    /// One alpha per cluster.
    Clustered(Clustering),
    /// One alpha per non-frozen commodity.
    Full,
}

impl SpaceMode {
    pub fn name(&self) -> &'static str {
        match self {
            SpaceMode::Scalar => "scalar",
            SpaceMode::Clustered(_) => "clustered",
            SpaceMode::Full => "full",
        }
    }
}

/// A box-bounded space of alpha points and its map to per-commodity alphas.
#[derive(Debug, Clone)]
pub struct SearchSpace {
    mode: SpaceMode,
    /// Clusters the point's coordinates are broadcast to.
    clustering: Clustering,
    bounds: Vec<(Rational, Rational)>,
    profile: DemandProfile,
}

impl SearchSpace {
    pub fn new(inst: &Instance, mode: SpaceMode) -> Self {
        let profile = DemandProfile::new(inst);
        let clustering = match &mode {
            SpaceMode::Scalar => Clustering::global(inst),
            SpaceMode::Clustered(c) => c.clone(),
            SpaceMode::Full => Clustering::singleton(inst),
        };
        let bounds = match &mode {
            SpaceMode::Scalar => vec![combine_bounds(&profile.bounds, 0..inst.num_commodities())],
            _ => clustering
                .clusters
                .iter()
                .map(|members| combine_bounds(&profile.bounds, members.iter().copied()))
                .collect(),
        };
        Self {
            mode,
            clustering,
            bounds,
            profile,
        }
    }

    pub fn scalar(inst: &Instance) -> Self {
        Self::new(inst, SpaceMode::Scalar)
    }

    pub fn full(inst: &Instance) -> Self {
        Self::new(inst, SpaceMode::Full)
    }

    pub fn clustered(inst: &Instance, clustering: Clustering) -> Self {
        Self::new(inst, SpaceMode::Clustered(clustering))
    }

    pub fn mode(&self) -> &SpaceMode {
        &self.mode
    }

    pub fn dimension(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(Rational, Rational)] {
        &self.bounds
    }

    /// Commodities driven by coordinate `dim`.
    pub fn members(&self, dim: usize) -> &[usize] {
        self.clustering.clusters.get(dim).map_or(&[], Vec::as_slice)
    }

    pub fn profile(&self) -> &DemandProfile {
        &self.profile
    }

    /// The all-ones point, which lies inside every space.
    pub fn ones(&self) -> Vec<Rational> {
        self.clamp(vec![num::one(); self.dimension()])
    }

    pub fn clamp(&self, point: Vec<Rational>) -> Vec<Rational> {
        point
            .into_iter()
            .zip(&self.bounds)
            .map(|(v, (lo, hi))| num::clamp(v, lo, hi))
            .collect()
    }

    pub fn contains(&self, point: &[Rational]) -> bool {
        point.len() == self.dimension()
            && point
                .iter()
                .zip(&self.bounds)
                .all(|(v, (lo, hi))| lo <= v && v <= hi)
    }

    pub fn to_deviation(&self, point: &[Rational]) -> DeviationVector {
        let values: Vec<Rational> = match self.mode {
            SpaceMode::Scalar => vec![point[0]; self.clustering.len()],
            _ => point.to_vec(),
        };
        expand_with(&self.clustering, &values, &self.profile)
    }

    pub fn to_demand(&self, point: &[Rational]) -> PeriodicDemand {
        self.profile.to_demand(&self.to_deviation(point).alpha)
    }
}
