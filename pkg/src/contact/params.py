"""
Soft-contact parameters, loadable from the ``contact`` section of a problem file
"""
import json
from pathlib import Path
from typing import Union

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat
from pydantic import ValidationError as PydanticValidationError

from src.utils.errors import ValidationError
from src.utils.validators import FileValidator


class ContactModelParams(BaseModel):
    """Spring-damper ground model; defaults are tuning for the quad18 fixture"""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    k: PositiveFloat = Field(5000.0, description="Spring constant (N)")
    d: PositiveFloat = Field(1000.0, description="Damper constant (N·s/m)")
    alpha_k: PositiveFloat = Field(50.0, alias="alphaK", description="Spring sharpness (1/m)")
    alpha_d: PositiveFloat = Field(50.0, alias="alphaD", description="Damper sharpness (1/m)")
    surface_height: float = Field(0.0, alias="surfaceHeight", description="Ground height (m)")


def load_contact_params(path: Union[str, Path]) -> ContactModelParams:
    """Read params from a JSON file, either bare or under a ``contact`` key"""
    path = FileValidator.validate_problem_file(path)
    data = json.loads(path.read_text())
    try:
        return ContactModelParams.model_validate(data.get("contact", data))
    except PydanticValidationError as exc:
        raise ValidationError(f"Invalid contact parameters in {path.name}: {exc}") from exc


__all__ = ["ContactModelParams", "load_contact_params"]
