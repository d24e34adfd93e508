"""Lineshape interferometry toolkit.

Models asymmetric resonance spectra produced by two interfering channels
at arbitrary first-order coherence, quantifies why fringe visibility stops
measuring coherence for such lineshapes, and recovers the coherence instead
from the antisymmetry of the measured spectrum: the peak height of
A(eps) = |I(eps) - I(-eps)| / (I(eps) + I(-eps)) is a certified lower
bound, and together with the peak position it determines the coherence
exactly through a cubic equation. A noisy-data pipeline (synthesis,
bootstrap uncertainties, least-squares fitting with identifiability
diagnostics, multi-spectrum pooling), file formats, figure products, and a
CLI round out the package.
"""
from .model import (
    ChannelAmplitudes,
    ChannelIntensities,
    FanoParams,
    StationaryPoint,
    StationarySet,
    channel_amplitudes,
    channel_intensities,
    detuning_from_energy,
    fano_intensity,
    fano_intensity_ideal,
    fano_stationary_points,
    mzi_intensity,
    relative_phase,
)
from .visibility import (
    DEFAULT_WINDOW,
    UndefinedVisibilityError,
    VisibilityResult,
    balance_factor,
    fano_visibility,
    mzi_visibility,
    visibility,
    visibility_vs_coherence_curve,
)
from .asymmetry import (
    AsymmetryPeak,
    CoherenceEstimate,
    DegenerateMimicryError,
    InconsistentPeakError,
    MimicryMap,
    asymmetry_closed_form,
    asymmetry_of_function,
    asymmetry_peak,
    coherence_closed_form,
    coherence_exact,
    coherence_lower_bound,
    inversion_cubic,
    invert_peak,
    mimicry_map,
)
from .estimation import (
    AsymmetryCurve,
    CoherenceReport,
    FitResult,
    InsufficientCoverageError,
    NoiseModel,
    PooledEstimate,
    QEstimate,
    RefinedPeak,
    Spectrum,
    combine_multi_q,
    empirical_asymmetry,
    estimate_coherence,
    find_asymmetry_peak,
    fit_spectrum,
    symmetric_grid,
    synth_spectrum,
)
from .spectrum_io import (
    read_columns_csv,
    read_spectrum_csv,
    to_jsonable,
    write_columns_csv,
    write_json,
    write_spectrum_csv,
)
from .figures import FIGURE_KEYS, FigureOptions, figure_data, render_figure, write_figure

__version__ = "0.1.0"

__all__ = [
    "ChannelAmplitudes",
    "ChannelIntensities",
    "FanoParams",
    "StationaryPoint",
    "StationarySet",
    "channel_amplitudes",
    "channel_intensities",
    "detuning_from_energy",
    "fano_intensity",
    "fano_intensity_ideal",
    "fano_stationary_points",
    "mzi_intensity",
    "relative_phase",
    "DEFAULT_WINDOW",
    "UndefinedVisibilityError",
    "VisibilityResult",
    "balance_factor",
    "fano_visibility",
    "mzi_visibility",
    "visibility",
    "visibility_vs_coherence_curve",
    "AsymmetryPeak",
    "CoherenceEstimate",
    "DegenerateMimicryError",
    "InconsistentPeakError",
    "MimicryMap",
    "asymmetry_closed_form",
    "asymmetry_of_function",
    "asymmetry_peak",
    "coherence_closed_form",
    "coherence_exact",
    "coherence_lower_bound",
    "inversion_cubic",
    "invert_peak",
    "mimicry_map",
    "AsymmetryCurve",
    "CoherenceReport",
    "FitResult",
    "InsufficientCoverageError",
    "NoiseModel",
    "PooledEstimate",
    "QEstimate",
    "RefinedPeak",
    "Spectrum",
    "combine_multi_q",
    "empirical_asymmetry",
    "estimate_coherence",
    "find_asymmetry_peak",
    "fit_spectrum",
    "symmetric_grid",
    "synth_spectrum",
    "read_columns_csv",
    "read_spectrum_csv",
    "to_jsonable",
    "write_columns_csv",
    "write_json",
    "write_spectrum_csv",
    "FIGURE_KEYS",
    "FigureOptions",
    "figure_data",
    "render_figure",
    "write_figure",
    "__version__",
]
