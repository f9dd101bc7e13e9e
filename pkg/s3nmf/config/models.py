"""Pydantic models for configuration validation."""

from enum import Enum
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class Kernel(Enum):
    SELF_TUNING = "selftuning"
    BINARY = "binary"


class Symmetrization(Enum):
    UNION = "union"
    AVERAGE = "average"


class Mode(Enum):
    HARD = "hard"
    SOFT = "soft"
    UNWEIGHTED = "unweighted"


LabelColumn = Literal["none", "last"] | int


class AffinityConfig(BaseModel):
    """kNN graph construction settings (k = 0 picks floor(log2 n) + 1)."""

    model_config = ConfigDict(extra="forbid")

    k: int = Field(default=0, ge=0)
    kernel: Kernel = Kernel.SELF_TUNING
    symmetrize: Symmetrization = Symmetrization.UNION


class SolverConfig(BaseModel):
    """Inner solver settings."""

    model_config = ConfigDict(extra="forbid")

    tau: float = Field(default=2.0, gt=1.0)
    max_inner_iters: int = Field(default=500, ge=1)
    tol: float = Field(default=1e-3, gt=0.0)
    epsilon_floor: float = Field(default=1e-12, gt=0.0)
    certify: bool = False


class PipelineConfig(BaseModel):
    """
    Outer self-supervision loop settings.

    ``tau`` is authoritative: the nested solver settings always carry the same value.
    """

    model_config = ConfigDict(extra="forbid")

    b: int = Field(default=20, ge=2)
    c: int | None = Field(default=None, ge=2)
    tau: float = Field(default=2.0, gt=1.0)
    max_outer_iters: int = Field(default=10, ge=1)
    early_stop: bool = True
    mode: Mode = Mode.HARD
    seed: int = Field(default=0, ge=0)
    solver: SolverConfig = Field(default_factory=SolverConfig)

    @model_validator(mode="after")
    def sync_solver_tau(self) -> "PipelineConfig":
        """Propagate tau into the solver settings."""
        if self.solver.tau != self.tau:
            self.solver = self.solver.model_copy(update={"tau": self.tau})
        return self


class RunSettings(BaseModel):
    """Execution settings shared by the CLI subcommands."""

    model_config = ConfigDict(extra="forbid")

    threads: int = -1
    label_column: LabelColumn = "none"
    delimiter: str | None = None

    @field_validator("threads")
    @classmethod
    def validate_threads(cls, v: int) -> int:
        """0 is not a valid worker count; negative values count back from all cores."""
        if v == 0:
            raise ValueError("threads must be non-zero (-1 uses all cores)")
        return v

    @field_validator("label_column")
    @classmethod
    def validate_label_column(cls, v: str | int) -> str | int:
        if isinstance(v, int) and v < 0:
            raise ValueError("label_column index must be non-negative")
        return v


SECTION_MODELS: dict[str, type[BaseModel]] = {
    "affinity": AffinityConfig,
    "solver": SolverConfig,
    "pipeline": PipelineConfig,
    "run": RunSettings,
}


class ConfigFile(BaseModel):
    """Top-level configuration file structure; every section may be partial."""

    model_config = ConfigDict(extra="forbid")

    affinity: dict[str, Any] = Field(default_factory=dict)
    solver: dict[str, Any] = Field(default_factory=dict)
    pipeline: dict[str, Any] = Field(default_factory=dict)
    run: dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def validate_section_keys(self) -> "ConfigFile":
        """Reject keys that no section model knows about."""
        for section, model in SECTION_MODELS.items():
            known = set(model.model_fields)
            if section == "pipeline":
                known.discard("solver")
            if section == "solver":
                # tau is set once, in the pipeline section
                known.discard("tau")
            unknown = sorted(set(getattr(self, section)) - known)
            if unknown:
                raise ValueError(f"Unknown {section} setting(s): {', '.join(unknown)}")
        return self


class Settings(BaseModel):
    """Fully merged and validated settings."""

    affinity: AffinityConfig = Field(default_factory=AffinityConfig)
    pipeline: PipelineConfig = Field(default_factory=PipelineConfig)
    run: RunSettings = Field(default_factory=RunSettings)

    @classmethod
    def from_sections(cls, sections: dict[str, dict[str, Any]]) -> "Settings":
        """Validate merged section mappings; solver settings nest under the pipeline."""
        pipeline = dict(sections.get("pipeline", {}))
        pipeline["solver"] = dict(sections.get("solver", {}))
        return cls.model_validate(
            {
                "affinity": sections.get("affinity", {}),
                "pipeline": pipeline,
                "run": sections.get("run", {}),
            }
        )

    def to_sections(self) -> dict[str, dict[str, Any]]:
        """Inverse of :meth:`from_sections`, in JSON-compatible form."""
        pipeline = self.pipeline.model_dump(mode="json")
        solver = pipeline.pop("solver")
        return {
            "affinity": self.affinity.model_dump(mode="json"),
            "solver": solver,
            "pipeline": pipeline,
            "run": self.run.model_dump(mode="json"),
        }

    def with_overrides(self, overrides: dict[str, dict[str, Any]]) -> "Settings":
        """
        Apply per-section overrides, typically from CLI flags.

        Args:
            overrides: Mapping of section name to field values; ``None`` values are ignored

        Returns:
            New validated settings
        """
        sections = self.to_sections()
        for section, values in overrides.items():
            sections.setdefault(section, {})
            sections[section].update({k: v for k, v in values.items() if v is not None})
        return Settings.from_sections(sections)
