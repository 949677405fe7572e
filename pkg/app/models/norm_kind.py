import math
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, model_validator

NormTag = Literal["sobolev", "lebesgue", "product_h1_l2", "product_l2_hm1"]


class NormKind(BaseModel):
    """Which norm to measure: H^s or L^q of a field, or a product norm of a state"""

    model_config = ConfigDict(frozen=True)

    tag: NormTag
    s: Optional[float] = None
    q: Optional[float] = None

    @model_validator(mode="after")
    def validate_parameters(self):
        """Sobolev norms need s, Lebesgue norms need q in [1, inf]"""
        if self.tag == "sobolev" and self.s is None:
            raise ValueError("Sobolev norm requires an order s")
        if self.tag == "lebesgue":
            if self.q is None:
                raise ValueError("Lebesgue norm requires an exponent q")
            if not (1.0 <= self.q <= math.inf):
                raise ValueError(f"Lebesgue exponent must lie in [1, inf], got {self.q}")
        return self

    @classmethod
    def sobolev(cls, s: float) -> "NormKind":
        return cls(tag="sobolev", s=s)

    @classmethod
    def lebesgue(cls, q: float) -> "NormKind":
        return cls(tag="lebesgue", q=q)

    @property
    def is_product(self) -> bool:
        return self.tag in ("product_h1_l2", "product_l2_hm1")

    @property
    def product_order(self) -> int:
        """Order a of H^a x H^(a-1)"""
        if self.tag == "product_h1_l2":
            return 1
        if self.tag == "product_l2_hm1":
            return 0
        raise ValueError(f"{self.tag} is not a product norm")

    @property
    def label(self) -> str:
        if self.tag == "sobolev":
            return f"H^{self.s:g}"
        if self.tag == "lebesgue":
            return f"L^{self.q:g}"
        return "H1xL2" if self.tag == "product_h1_l2" else "L2xH-1"


PRODUCT_H1_L2 = NormKind(tag="product_h1_l2")
PRODUCT_L2_HM1 = NormKind(tag="product_l2_hm1")
