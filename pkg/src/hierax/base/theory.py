from __future__ import annotations

import enum

from ..core import HieraxError


class UnsupportedPredicate(HieraxError):
    """A predicate or symbol that the base theory does not interpret."""


class MissingQE(HieraxError):
    """Neither the theory nor a registered model completion has QE."""


class BaseTheory(enum.Enum):
    DLO = "DLO"
    TORD = "TOrd"
    LRA = "LRA"
    EQ = "EQ"
    INFSET = "InfiniteSet"

    @classmethod
    def parse(cls, name: str) -> "BaseTheory":
        for t in cls:
            if t.value.lower() == name.lower():
                return t
        raise ValueError(f"unknown base theory {name!r}")

    @property
    def model_completion(self) -> "BaseTheory":
        return _COMPLETION[self]

    @property
    def has_qe(self) -> bool:
        return self in (BaseTheory.DLO, BaseTheory.LRA, BaseTheory.INFSET)

    @property
    def qe_theory(self) -> "BaseTheory":
        """The theory in which quantifier elimination actually runs."""
        if self.has_qe:
            return self
        mc = self.model_completion
        if not mc.has_qe:
            raise MissingQE(f"{self.value} has no QE and no registered model completion")
        return mc

    @property
    def predicates(self) -> tuple:
        if self in (BaseTheory.EQ, BaseTheory.INFSET):
            return ("=",)
        return ("=", "<=", "<")

    @property
    def arithmetic(self) -> bool:
        return self is BaseTheory.LRA

    @property
    def family(self) -> str:
        """Engine family: "order", "linear" or "equality"."""
        if self in (BaseTheory.DLO, BaseTheory.TORD):
            return "order"
        if self is BaseTheory.LRA:
            return "linear"
        return "equality"


_COMPLETION = {
    BaseTheory.DLO: BaseTheory.DLO,
    BaseTheory.TORD: BaseTheory.DLO,
    BaseTheory.LRA: BaseTheory.LRA,
    BaseTheory.EQ: BaseTheory.INFSET,
    BaseTheory.INFSET: BaseTheory.INFSET,
}
