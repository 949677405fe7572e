from .grid import GridSpec
from .field import TorusField
from .state import StateVector
from .norm_kind import NormKind, PRODUCT_H1_L2, PRODUCT_L2_HM1

# Export all domain types for easy imports
__all__ = [
    "GridSpec",
    "TorusField",
    "StateVector",
    "NormKind",
    "PRODUCT_H1_L2",
    "PRODUCT_L2_HM1"
]
