//! Averaged inequalities for maps out of cycle products, and the coarse and
//! uniform obstructions derived from them.

mod levels;
mod maps;
mod reports;

pub use levels::{
    chain_classes, level_average, sample_pair, verify_theorem1_chain, verify_theorem1_step,
    AverageKind, ChainReport, LevelAverage, LevelMode, StepCheck, StepReport, SAMPLE_COORD_LIMIT,
};
pub use maps::{CircleMap, ConstantMap, EmbeddingMap, Identity, SnowflakeMap};
pub use reports::{
    coarse_obstruction_report, euler_factor, uniform_obstruction_report, CoarseReport, CoarseRow,
    CoarseWitness, Parity, UniformReport, UniformRow, UniformSampling, SAMPLE_WORK_LIMIT,
};
