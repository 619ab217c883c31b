"""PCA/T2 process monitoring for the Tennessee Eastman benchmark with
LLM-generated fault explanations."""

from ._kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]
