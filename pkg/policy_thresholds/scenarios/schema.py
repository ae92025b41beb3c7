"""
Validation of scenario and suite files against the bundled JSON schema
"""

import json
from functools import lru_cache
from typing import Any, Dict

from jsonschema import validate
from jsonschema.exceptions import ValidationError

from ..constants import SCENARIO_SCHEMA_PATH
from ..util import ErrorCode, PolicyThresholdsException


@lru_cache
def _load_definitions() -> Dict[str, Any]:
    with open(SCENARIO_SCHEMA_PATH, encoding="utf-8") as schema_file:
        return json.load(schema_file)["definitions"]


@lru_cache
def _schema_for(name: str) -> Dict[str, Any]:
    """
    The named definition placed at the top level, with all definitions
    alongside so that every `#/definitions/...` reference resolves.
    """
    definitions = _load_definitions()
    return {**definitions[name], "definitions": definitions}


class ScenarioValidationErrorWrapper(PolicyThresholdsException):
    """
    Wrapper for ValidationError raised during scenario validation
    """

    def __init__(self, err: ValidationError, source: str):
        location = "/".join(str(part) for part in err.absolute_path) or "<root>"
        super().__init__(
            code=ErrorCode.INVALID_SCENARIO,
            message=f"Invalid scenario file {source} at {location}: {err.message}",
        )
        self.validation_error = err


def validate_scenario(data: Dict[str, Any], source: str = "<scenario>"):
    """Raise ScenarioValidationErrorWrapper unless data is a valid scenario"""
    try:
        validate(data, schema=_schema_for("scenario"))
    except ValidationError as err:
        raise ScenarioValidationErrorWrapper(err, source) from err


def validate_suite(data: Dict[str, Any], source: str = "<suite>"):
    """Raise ScenarioValidationErrorWrapper unless data is a valid suite manifest"""
    try:
        validate(data, schema=_schema_for("suite"))
    except ValidationError as err:
        raise ScenarioValidationErrorWrapper(err, source) from err
