"""Certificate schema and rational encoding"""
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Mapping, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from liecert.models.models import Outcome


def encode_rational(x) -> str:
    """Fractions travel as "num/den" strings"""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def decode_rational(text: str) -> Fraction:
    num, sep, den = text.partition("/")
    if not sep:
        raise ValueError(f"Rational {text!r} is not of the form num/den")
    return Fraction(int(num), int(den))


def encode_vector(v: Mapping[int, Any]) -> List[List[Any]]:
    """Sparse vector as [[index, "num/den"], ...] sorted by index"""
    return [[int(i), encode_rational(x)] for i, x in sorted(v.items()) if x]


def decode_vector(items: Iterable[List[Any]]) -> Dict[int, Fraction]:
    return {int(i): decode_rational(x) for i, x in items}


class AlgebraInfo(BaseModel):
    type: str
    rank: int
    dim: Optional[int] = None


class Anchor(BaseModel):
    label: str
    statement: str


class Certificate(BaseModel):
    """Machine-readable record of one verified claim"""
    model_config = ConfigDict(use_enum_values=False)

    check_name: str
    algebra: AlgebraInfo
    claim: Dict[str, Any]
    outcome: Outcome
    witnesses: Dict[str, Any] = Field(default_factory=dict)
    anchor: Anchor
    engine_version: str
    created_at: Optional[str] = None

    @field_validator("outcome", mode="before")
    @classmethod
    def _outcome_from_text(cls, value):
        if isinstance(value, str):
            return Outcome(value)
        return value

    @property
    def type_name(self) -> str:
        return f"{self.algebra.type}{self.algebra.rank}"

    def to_json_dict(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")
