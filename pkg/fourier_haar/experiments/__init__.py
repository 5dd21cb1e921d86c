from fourier_haar.experiments.config import ExperimentConfig
from fourier_haar.experiments.orchestrator import ExperimentOrchestrator

__all__ = ["ExperimentConfig", "ExperimentOrchestrator"]
