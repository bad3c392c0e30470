"""Parameter records shared by every module."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import ParameterOutOfRangeError, ValidationError


def _check_int(name: str, value, lo: int, hi: Optional[int] = None) -> None:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParameterOutOfRangeError(f"{name} must be an integer, got {value!r}")
    if value < lo or (hi is not None and value > hi):
        bound = f"[{lo}, {hi}]" if hi is not None else f">= {lo}"
        raise ParameterOutOfRangeError(f"{name}={value} outside {bound}")


@dataclass(frozen=True)
class EnsembleParams:
    """Geometry of the meta-experiment: N studies each ranking T genes."""

    num_studies: int
    genes_per_study: int

    def __post_init__(self):
        _check_int("num_studies", self.num_studies, 2)
        _check_int("genes_per_study", self.genes_per_study, 1)

    def to_dict(self) -> dict:
        return {"num_studies": self.num_studies, "genes_per_study": self.genes_per_study}


@dataclass(frozen=True)
class TestParams:
    """Rank threshold r, recapture rate n and optional candidate-list size m."""

    rank_threshold: int
    recapture_rate: int
    candidate_list_size: Optional[int] = None

    __test__ = False  # keep pytest from collecting this class

    def __post_init__(self):
        _check_int("rank_threshold", self.rank_threshold, 1)
        _check_int("recapture_rate", self.recapture_rate, 1)
        if self.candidate_list_size is not None:
            _check_int("candidate_list_size", self.candidate_list_size, 1)

    def validate_against(self, ensemble: EnsembleParams) -> None:
        T, N = ensemble.genes_per_study, ensemble.num_studies
        _check_int("rank_threshold", self.rank_threshold, 1, T)
        _check_int("recapture_rate", self.recapture_rate, 1, N)
        if self.candidate_list_size is not None:
            _check_int("candidate_list_size", self.candidate_list_size, 1, T)

    def to_dict(self) -> dict:
        return {
            "rank_threshold": self.rank_threshold,
            "recapture_rate": self.recapture_rate,
            "candidate_list_size": self.candidate_list_size,
        }


@dataclass(frozen=True)
class AlternativeSpec:
    """Postulated truth: one effect size (in null-SD units) per true-positive gene."""

    true_positive_effects: tuple[float, ...] = ()
    label: str = ""

    def __post_init__(self):
        effects = tuple(float(x) for x in self.true_positive_effects)
        if not all(math.isfinite(x) for x in effects):
            raise ValidationError("effect sizes must be finite")
        object.__setattr__(self, "true_positive_effects", effects)

    @classmethod
    def homogeneous(cls, tp: int, effect: float, label: str = "") -> "AlternativeSpec":
        if tp < 0:
            raise ParameterOutOfRangeError(f"tp={tp} must be >= 0")
        return cls((float(effect),) * tp, label or f"tp={tp},mu={effect:g}")

    @property
    def tp(self) -> int:
        return len(self.true_positive_effects)

    def validate_against(self, ensemble: EnsembleParams) -> None:
        if self.tp >= ensemble.genes_per_study:
            raise ParameterOutOfRangeError(
                f"tp={self.tp} must be smaller than T={ensemble.genes_per_study}"
            )

    def effect_groups(self) -> tuple[list[float], list[int]]:
        """Distinct effect sizes and their multiplicities, in first-seen order."""
        counts: dict[float, int] = {}
        for mu in self.true_positive_effects:
            counts[mu] = counts.get(mu, 0) + 1
        return list(counts), list(counts.values())

    def to_dict(self) -> dict:
        mus, counts = self.effect_groups()
        if len(mus) == 1:
            return {"label": self.label, "tp": self.tp, "effect": mus[0]}
        return {"label": self.label, "effects": list(self.true_positive_effects)}

    @classmethod
    def from_dict(cls, d: dict) -> "AlternativeSpec":
        if "effects" in d:
            return cls(tuple(d["effects"]), d.get("label", ""))
        return cls.homogeneous(int(d["tp"]), float(d["effect"]), d.get("label", ""))

    @classmethod
    def parse(cls, text: str) -> "AlternativeSpec":
        """Parse ``tp=25,mu=3[,label=I]`` or ``effects=3;3;4[,label=x]``."""
        fields: dict[str, str] = {}
        for part in text.split(","):
            if not part.strip():
                continue
            if "=" not in part:
                raise ValidationError(f"bad alternative token {part!r} in {text!r}")
            key, value = part.split("=", 1)
            fields[key.strip()] = value.strip()
        unknown = set(fields) - {"tp", "mu", "effects", "label"}
        if unknown:
            raise ValidationError(f"unknown alternative keys {sorted(unknown)}")
        label = fields.get("label", "")
        try:
            if "effects" in fields:
                effects = tuple(float(x) for x in fields["effects"].split(";") if x)
                return cls(effects, label)
            return cls.homogeneous(int(fields["tp"]), float(fields["mu"]), label)
        except KeyError as exc:
            raise ValidationError(f"alternative {text!r} needs tp and mu, or effects") from exc
        except ValueError as exc:
            raise ValidationError(f"cannot parse alternative {text!r}: {exc}") from exc


@dataclass(frozen=True)
class ModuleModel:
    """Genes partitioned into modules of ``module_size`` with within-module correlation rho."""

    module_size: int = 1
    within_module_rho: float = 1.0

    def __post_init__(self):
        _check_int("module_size", self.module_size, 1)
        rho = float(self.within_module_rho)
        if not 0.0 <= rho <= 1.0:
            raise ValidationError(f"within_module_rho={rho} outside [0, 1]")
        object.__setattr__(self, "within_module_rho", rho)

    def to_dict(self) -> dict:
        return {"module_size": self.module_size, "within_module_rho": self.within_module_rho}


# Published alternatives used throughout the design examples.
ALT_I = AlternativeSpec.homogeneous(25, 3.0, "I")
ALT_II = AlternativeSpec.homogeneous(2, 4.0, "II")
