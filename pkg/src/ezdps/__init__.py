"""ezdps: a constraint-system compiler for a DWT -> PCA -> SVM inference
pipeline, with fixed-point witness generation and a commit-prove-verify
protocol against a pluggable proof backend."""

from ezdps.field import FieldElement, RISTRETTO_ORDER
from ezdps.fixedpoint import FixedPoint, ExponentFixed

__all__ = ["FieldElement", "RISTRETTO_ORDER", "FixedPoint", "ExponentFixed"]
__version__ = "0.1.0"
