"""Relation reports shared by the verifiers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class RelationCheck:
    """One checked identity.

    ``tolerance == 0`` means the check is exact: it passes only when every
    residual entry is literally zero.  ``asserted=False`` marks a value that is
    reported but does not count toward the report's pass flag.
    """

    name: str
    residual: float
    tolerance: float
    exact_zero: bool | None = None
    scope: str = "full"
    boundary_residual: float | None = None
    asserted: bool = True

    @property
    def passed(self) -> bool:
        if self.tolerance == 0:
            return bool(self.exact_zero)
        return self.residual <= self.tolerance

    def to_dict(self) -> dict[str, Any]:
        out = {
            "name": self.name,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "exact_zero": self.exact_zero,
            "scope": self.scope,
            "asserted": self.asserted,
            "passed": self.passed,
        }
        if self.boundary_residual is not None:
            out["boundary_residual"] = self.boundary_residual
        return out


@dataclass
class RelationReport:
    title: str
    checks: list[RelationCheck] = field(default_factory=list)
    meta: dict[str, Any] = field(default_factory=dict)

    def add(self, check: RelationCheck) -> RelationCheck:
        self.checks.append(check)
        return check

    def __getitem__(self, name: str) -> RelationCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def __iter__(self):
        return iter(self.checks)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.asserted)

    def failures(self) -> list[RelationCheck]:
        return [c for c in self.checks if c.asserted and not c.passed]

    def to_dict(self) -> dict[str, Any]:
        return {
            "title": self.title,
            "meta": self.meta,
            "relations": [c.to_dict() for c in self.checks],
            "passed": self.passed,
        }
