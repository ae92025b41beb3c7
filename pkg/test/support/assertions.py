"""Validation of the CLI's JSON output against the schemas in `schemas/`"""

import json
from functools import lru_cache
from os.path import dirname, join

from jsonschema import RefResolver, validate

SCHEMA_DIR = join(dirname(__file__), "schemas")


def assert_valid_schema(data, schema_file):
    """Checks whether the given data matches the schema"""

    schema = _load_json_schema(schema_file)
    resolver = RefResolver(base_uri="file://" + SCHEMA_DIR + "/", referrer=schema)
    return validate(data, schema, resolver=resolver)


def assert_valid_json_output(stdout: str, schema_file):
    """Parses the printed JSON and validates it; returns the parsed value"""
    data = json.loads(stdout)
    assert_valid_schema(data, schema_file)
    return data


@lru_cache
def _load_json_schema(filename):
    """Loads the given schema file"""

    with open(join(SCHEMA_DIR, filename), encoding="utf-8") as schema_file:
        return json.loads(schema_file.read())
