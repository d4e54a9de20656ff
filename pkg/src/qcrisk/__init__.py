"""qcrisk: a numpy laboratory for small variational quantum classifiers.

Simulates statevector training end to end and measures what the training
does: feature-geometry collapse metrics, measurement-frame diagnostics,
Haar-concentration checks, a robustness generalization bound, and risk
curves over the trainable-parameter count.
"""

from qcrisk.classifier import (
    EpochMetrics,
    LossConfig,
    TrainConfig,
    TrainRecord,
    accuracy,
    adagrad_step,
    collapse_constant,
    collapsed_optimum,
    collapsed_optimum_fixed_ops,
    empirical_risk,
    gradient,
    loss,
    one_hot,
    predict,
    predict_features,
    record_lines,
    summary_row,
    target_matrix,
    train_qc,
)
from qcrisk.concentration import (
    ConcentrationTrial,
    ansatz_output_bound,
    encoder_overlap_bound,
    moment1_oracle,
    moment2_oracle,
    trials_to_csv,
    verify_ansatz_concentration,
    verify_encoder_concentration,
)
from qcrisk.core import (
    AnsatzSpec,
    EncoderSpec,
    FeatureState,
    StateVector,
    apply_ansatz,
    apply_cnot,
    apply_rotation,
    encode,
    expectation,
    feature_state,
    haar_unitary,
)
from qcrisk.data import (
    Dataset,
    dataset_to_csv,
    gen_parity,
    load_idx,
    preprocess_images,
    split,
    subsample_balanced,
    write_idx,
)
from qcrisk.genbound import (
    BoundInputs,
    PartitionEstimate,
    bounds_to_csv,
    covering_number_log,
    estimate_T_D,
    lemma3_bound,
    lemma3_terms,
    lipschitz_and_xi,
)
from qcrisk.geometry import (
    GeometryReport,
    alignment_matrix,
    as_matrices,
    bloch_vector,
    bloch_vectors,
    class_means,
    discrimination_lower_bound,
    geometry_report,
    mean_overlap_matrix,
    mean_subtracted_gram,
    report_to_dict,
    within_class_spread,
)
from qcrisk.measurements import (
    MeasurementSet,
    basis_measurements,
    pauli_measurements,
    qubit_sic_povm,
    simplex_etf_operators,
    simplex_frame,
    validate_set,
)
from qcrisk.mlp import (
    MlpSpec,
    MlpTrainConfig,
    hidden_for_n_params,
    train_mlp,
)
from qcrisk.riskcurve import (
    BasinResult,
    RiskCurveFit,
    SweepPlan,
    aggregate_points,
    choose_fit,
    evaluate_fit,
    find_basin,
    fit_to_dict,
    polyfit,
    run_sweep,
    with_basin,
    write_fit_csv,
)

__all__ = [
    "AnsatzSpec",
    "BasinResult",
    "BoundInputs",
    "ConcentrationTrial",
    "Dataset",
    "EncoderSpec",
    "EpochMetrics",
    "FeatureState",
    "GeometryReport",
    "LossConfig",
    "MeasurementSet",
    "MlpSpec",
    "MlpTrainConfig",
    "PartitionEstimate",
    "RiskCurveFit",
    "StateVector",
    "SweepPlan",
    "TrainConfig",
    "TrainRecord",
    "accuracy",
    "adagrad_step",
    "aggregate_points",
    "alignment_matrix",
    "ansatz_output_bound",
    "apply_ansatz",
    "apply_cnot",
    "apply_rotation",
    "as_matrices",
    "basis_measurements",
    "bloch_vector",
    "bloch_vectors",
    "bounds_to_csv",
    "choose_fit",
    "class_means",
    "collapse_constant",
    "collapsed_optimum",
    "collapsed_optimum_fixed_ops",
    "covering_number_log",
    "dataset_to_csv",
    "discrimination_lower_bound",
    "empirical_risk",
    "encode",
    "encoder_overlap_bound",
    "estimate_T_D",
    "evaluate_fit",
    "expectation",
    "feature_state",
    "find_basin",
    "fit_to_dict",
    "gen_parity",
    "geometry_report",
    "gradient",
    "haar_unitary",
    "hidden_for_n_params",
    "lemma3_bound",
    "lemma3_terms",
    "lipschitz_and_xi",
    "load_idx",
    "loss",
    "mean_overlap_matrix",
    "mean_subtracted_gram",
    "moment1_oracle",
    "moment2_oracle",
    "one_hot",
    "pauli_measurements",
    "polyfit",
    "predict",
    "predict_features",
    "preprocess_images",
    "qubit_sic_povm",
    "record_lines",
    "report_to_dict",
    "run_sweep",
    "simplex_etf_operators",
    "simplex_frame",
    "split",
    "subsample_balanced",
    "summary_row",
    "target_matrix",
    "train_mlp",
    "train_qc",
    "trials_to_csv",
    "validate_set",
    "verify_ansatz_concentration",
    "verify_encoder_concentration",
    "with_basin",
    "within_class_spread",
    "write_fit_csv",
    "write_idx",
]

__version__ = "0.1.0"
