"""Joint measurements of non-commuting polarizations on entangled photon pairs."""

__version__ = "0.1.0"

from .analysis import analyze, classify, correlations, propagate_errors, visibilities
from .design import paper_design, solve_waveplate_angles, theoretical_visibilities
from .simulator import AcquisitionConfig, CountTable, joint_probabilities, sample_counts
from .states import InputCorrelations, NoiseModel, fit_noise, noisy_singlet, singlet, witness

__all__ = [
    "AcquisitionConfig", "CountTable", "InputCorrelations", "NoiseModel",
    "analyze", "classify", "correlations", "fit_noise", "joint_probabilities",
    "noisy_singlet", "paper_design", "propagate_errors", "sample_counts", "singlet",
    "solve_waveplate_angles", "theoretical_visibilities", "visibilities", "witness",
]
