"""Constants used across the project."""

import os

FIXTURES_DIR = os.path.join(os.path.dirname(__file__), "fixtures")
SCENARIOS_DIR = os.path.join(FIXTURES_DIR, "scenarios")
LABOR_MONTHLY_PATH = os.path.join(FIXTURES_DIR, "labor_monthly.csv")
INFLATION_QUARTERLY_PATH = os.path.join(FIXTURES_DIR, "inflation_quarterly.csv")
VAR_EXPECTATIONS_PATH = os.path.join(FIXTURES_DIR, "var_expectations.json")
SCENARIO_SCHEMA_PATH = os.path.join(FIXTURES_DIR, "scenario_schema.json")
SUITE_MANIFEST_PATH = os.path.join(SCENARIOS_DIR, "suite.toml")

DEFAULT_DATE_COLUMN = "date"
CSV_FLOAT_FORMAT = "%.12g"

# Evans-rule thresholds and the calibrated alternatives
DEFAULT_UNRATE_THRESH = 6.5
DEFAULT_PCE_THRESH = 2.5
DEFAULT_ECI_THRESH = 3.5
DEFAULT_EPOP_THRESH = 78.55

MIN_CALIBRATION_OBS = 30
ADF_MIN_OBS = 20
JOHANSEN_OBS_PER_COLUMN = 10
DEFAULT_JOHANSEN_LAG_ORDER = 2
SIGNIFICANCE_LEVEL = 0.05

# reduced-form model, rates in percent
DEFAULT_SIGMA = 1.0
DEFAULT_RHO_X = 0.85
DEFAULT_KAPPA = 0.1
DEFAULT_LAMBDA = 0.7
DEFAULT_MU = 0.8
DEFAULT_PHI = 0.3
DEFAULT_OKUN = 0.5
DEFAULT_NAIRU = 4.5
DEFAULT_R_STAR = 1.0
DEFAULT_PI_STAR = 2.0
DEFAULT_PROD_GROWTH = 1.2
DEFAULT_OIL_PASSTHROUGH = 0.02
DEFAULT_TERM_PREMIUM = 1.0
DEFAULT_LFPR_TREND = 83.0
DEFAULT_LFPR_UNRATE_PASS = 0.5
DEFAULT_POTENTIAL_GROWTH = 2.0
DEFAULT_FISCAL_DRAG = 0.05

LONG_YIELD_QUARTERS = 40
AD_SHOCK_PATH = (-1.5, -2.0, -1.5, -1.0, -0.5, -0.25)

# policy rules
DEFAULT_A_PI = 0.5
DEFAULT_A_Y = 0.5
DEFAULT_INERTIA = 0.85
DEFAULT_U_GAP_COEFF = 1.1
DEFAULT_U_PI_COEFF = 0.375
DEFAULT_U_PI_STAR_COEFF = 0.5
MODIFIED_COEFF = 2.0
DEFAULT_ELB = 0.125
LIFTOFF_EPSILON = 1e-9

# optimal control
DEFAULT_DISCOUNT = 0.99
OC_ITERATION_CAP = 10_000
OC_TOLERANCE = 1e-8
OC_PENALTY_SWEEPS = 25
OC_PENALTY_WEIGHT = 1e4
OC_PERTURBATION = 0.5
OC_HYPERCUBE_MAX_HORIZON = 8
BRUTE_FORCE_MAX_PATHS = 10**7
BRUTE_FORCE_CHUNK = 50_000

# scenario runner
MIN_SCENARIO_HORIZON = 4
REPORTED_VARIABLES = (
    "ffr",
    "rgdpch",
    "unrate",
    "pce_rate",
    "epop",
    "eciwg_rate",
    "rg10",
    "corepce_rate",
)
VARIABLE_TITLES = {
    "ffr": "Federal funds rate",
    "rgdpch": "Real GDP growth (y/y)",
    "unrate": "Unemployment rate",
    "pce_rate": "PCE inflation",
    "epop": "Employment-to-population ratio",
    "eciwg_rate": "ECI wage growth",
    "rg10": "10-year Treasury yield",
    "corepce_rate": "Core PCE inflation",
}
BASELINE_VARIANT = "baseline"
DEFAULT_OUTPUT_DIR = "sim_output"
DEFAULT_THREADS_CAP = 4
