from typing import Literal

from pydantic import BaseModel, Field

TermStatus = Literal["passed", "failed", "skipped"]


class GradcheckEntry(BaseModel):
    term: str
    status: TermStatus
    relative_error: float | None = None
    checked_parameters: int = 0
    frozen_gradient_max: float | None = Field(
        default=None,
        description="Largest |grad| over encoder and normalization-affine parameters (zero reconstruction only)",
    )


class GradcheckReport(BaseModel):
    seed: int
    tolerance: float
    step: float
    parameter_count: int
    entries: list[GradcheckEntry]

    @property
    def passed(self) -> bool:
        return all(entry.status != "failed" for entry in self.entries)
