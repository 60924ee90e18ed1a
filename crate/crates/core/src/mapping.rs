use crate::error::{Error, Result};
use crate::grid::{BeamTrace, VoxelStats, VoxelStatsGrid};

/// Which forward model a voxel value belongs to: reflection probability
/// mu in [0,1] or decay rate lambda >= 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapModel {
    Reflection,
    Decay,
}

impl MapModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            MapModel::Reflection => "reflection",
            MapModel::Decay => "decay",
        }
    }
}

/// Prior hyperparameters: Beta(alpha, beta) for reflection, Gamma(alpha, beta)
/// (shape/rate) for decay.  Gamma(1, 0) is the uninformative decay prior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorParams {
    pub model: MapModel,
    pub alpha: f64,
    pub beta: f64,
}

impl PriorParams {
    pub fn new(model: MapModel, alpha: f64, beta: f64) -> Result<Self> {
        let ok = match model {
            MapModel::Reflection => alpha > 0.0 && beta > 0.0,
            MapModel::Decay => alpha > 0.0 && beta >= 0.0,
        };
        if !ok || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidPrior {
                model: model.as_str(),
                alpha,
                beta,
            });
        }
        Ok(Self { model, alpha, beta })
    }

    /// Beta(1, 1): the uniform prior over reflection probabilities.
    pub fn uniform_reflection() -> Self {
        Self {
            model: MapModel::Reflection,
            alpha: 1.0,
            beta: 1.0,
        }
    }

    /// Gamma(1, 0): the improper uninformative prior over decay rates.
    pub fn uninformative_decay() -> Self {
        Self {
            model: MapModel::Decay,
            alpha: 1.0,
            beta: 0.0,
        }
    }
}

/// Posterior parameters: Beta(a, b) over mu or Gamma(a, b) (shape/rate) over
/// lambda.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosteriorParams {
    pub model: MapModel,
    pub a: f64,
    pub b: f64,
}

impl PosteriorParams {
    pub fn mean(&self) -> Option<f64> {
        match self.model {
            MapModel::Reflection => Some(self.a / (self.a + self.b)),
            MapModel::Decay => (self.b > 0.0).then(|| self.a / self.b),
        }
    }

    /// Distribution mode; `None` where undefined (interior mode requires
    /// a > 1 or, for Beta, both parameters > 1... reduced here to the cases
    /// the map estimators use: a >= 1 with positive denominator).
    pub fn mode(&self) -> Option<f64> {
        match self.model {
            MapModel::Reflection => {
                let d = self.a + self.b - 2.0;
                (self.a >= 1.0 && self.b >= 1.0 && d > 0.0).then(|| (self.a - 1.0) / d)
            }
            MapModel::Decay => (self.a >= 1.0 && self.b > 0.0).then(|| (self.a - 1.0) / self.b),
        }
    }
}

/// Fold one traced beam into the grid's sufficient statistics: every traversed
/// voxel gains its segment length on R; the terminal voxel of a hit trace
/// gains a hit, all others a miss.  The grid is untouched on error.
pub fn update_stats(grid: &mut VoxelStatsGrid, trace: &BeamTrace) -> Result<()> {
    let len = grid.geometry.len();
    for &(index, _) in &trace.segments {
        if index >= len {
            return Err(Error::IndexOutOfBounds { index, len });
        }
    }
    let last = trace.segments.len().wrapping_sub(1);
    for (k, &(index, r)) in trace.segments.iter().enumerate() {
        let s = grid.get_mut(index)?;
        s.distance += r;
        if trace.terminal_hit && k == last {
            s.hits += 1;
        } else {
            s.misses += 1;
        }
    }
    Ok(())
}

/// Conjugate posterior from sufficient statistics: Beta(H+alpha, M+beta) or
/// Gamma(H+alpha, R+beta).
pub fn posterior(stats: &VoxelStats, prior: &PriorParams) -> PosteriorParams {
    match prior.model {
        MapModel::Reflection => PosteriorParams {
            model: MapModel::Reflection,
            a: stats.hits as f64 + prior.alpha,
            b: stats.misses as f64 + prior.beta,
        },
        MapModel::Decay => PosteriorParams {
            model: MapModel::Decay,
            a: stats.hits as f64 + prior.alpha,
            b: stats.distance + prior.beta,
        },
    }
}

/// Maximum-likelihood voxel value: mu* = H/(H+M), lambda* = H/R; `default`
/// stands in for unvisited voxels.
pub fn ml_value(stats: &VoxelStats, model: MapModel, default: f64) -> f64 {
    debug_assert!(default >= 0.0);
    match model {
        MapModel::Reflection => {
            debug_assert!(default <= 1.0);
            let n = stats.hits + stats.misses;
            if n > 0 {
                stats.hits as f64 / n as f64
            } else {
                default
            }
        }
        MapModel::Decay => {
            if stats.distance > 0.0 {
                stats.hits as f64 / stats.distance
            } else {
                default
            }
        }
    }
}

/// Lower clamp on fitted prior components; keeps the Beta prior proper when
/// the fitted values concentrate on {0, 1}.
pub const PRIOR_CLAMP: f64 = 1e-3;

/// Moment-matched prior from empirical map values: choose (alpha, beta) so the
/// Beta/Gamma mean and variance equal the empirical mean E and (population)
/// variance V.
pub fn moment_match_prior(values: &[f64], model: MapModel) -> Result<PriorParams> {
    if values.len() < 2 {
        return Err(Error::DegenerateMoments);
    }
    if model == MapModel::Reflection {
        if let Some(&v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::ValueOutOfRange(v));
        }
    }
    let n = values.len() as f64;
    let e = values.iter().sum::<f64>() / n;
    let v = values.iter().map(|x| (x - e) * (x - e)).sum::<f64>() / n;
    if !(v > 0.0) {
        return Err(Error::DegenerateMoments);
    }
    let (alpha, beta) = match model {
        MapModel::Reflection => (
            -e * (e * e - e + v) / v,
            (e - v + e * v - 2.0 * e * e + e * e * e) / v,
        ),
        MapModel::Decay => (e * e / v, e / v),
    };
    PriorParams::new(model, alpha.max(PRIOR_CLAMP), beta.max(PRIOR_CLAMP))
}

/// Moment-matched prior over a mapped grid: ML values of every visited voxel
/// (H+M > 0 for reflection, R > 0 for decay) fed to [`moment_match_prior`].
pub fn fit_prior(grid: &VoxelStatsGrid, model: MapModel) -> Result<PriorParams> {
    let values: Vec<f64> = grid
        .iter_sorted()
        .into_iter()
        .filter(|(_, s)| match model {
            MapModel::Reflection => s.hits + s.misses > 0,
            MapModel::Decay => s.distance > 0.0,
        })
        .map(|(_, s)| ml_value(&s, model, 0.0))
        .collect();
    moment_match_prior(&values, model)
}
