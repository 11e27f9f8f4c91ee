"""
Special Circles Constants
Global configuration constants for the construction, verification and figures
"""

# Numeric tolerances (double backend only; the exact backend compares with ==)
RELATIVE_TOLERANCE = 1e-9

# Random scene policy defaults
DEFAULT_MAX_NUMERATOR = 64
DEFAULT_MAX_DENOMINATOR = 64
DEFAULT_MIN_PARAM_SEPARATION = "1/64"
DEFAULT_MAX_REJECTIONS = 1000

# Arbitrary-frame scene defaults
FRAME_COORDINATE_BOUND = 10.0
FRAME_MAX_P_RATIO = 0.9
FRAME_MIN_D_RATIO = 0.05
FRAME_MAX_D_RATIO = 1.5

# Per-trial seed splitting: trial_seed = seed + index * SEED_STRIDE
SEED_STRIDE = 2**32
SEED_RULE = "trial_seed = seed + index * 2**32"

# Report schema
REPORT_SCHEMA_VERSION = 1
STATUS_PASS = "PASS"
STATUS_FAIL = "FAIL"

# Figure defaults
DEFAULT_CANVAS_WIDTH = 800
DEFAULT_CANVAS_HEIGHT = 800
FIGURE_MARGIN_RATIO = 0.06
SVG_SIGNIFICANT_DIGITS = 12

DEFAULT_STROKES = {
    "circumcircle": {"stroke": "#000000", "width": 1.5, "dash": None},
    "triangle": {"stroke": "#000000", "width": 1.5, "dash": None},
    "chord": {"stroke": "#1f77b4", "width": 1.0, "dash": None},
    "parallelogram": {"stroke": "#7f7f7f", "width": 0.75, "dash": None},
    "diagonal": {"stroke": "#7f7f7f", "width": 0.75, "dash": "4 3"},
    "axis": {"stroke": "#2ca02c", "width": 1.0, "dash": "6 3"},
    "special_circle": {"stroke": "#d62728", "width": 1.5, "dash": None},
    "midpoint_circle": {"stroke": "#ff7f0e", "width": 1.25, "dash": None},
    "hagge": {"stroke": "#9467bd", "width": 1.0, "dash": "2 2"},
}

POINT_RADIUS_PX = 3.0
LABEL_FONT_SIZE_PX = 14
LABEL_OFFSET_PX = 6.0

# Environment variable names
ENV_PREFIX = "SPECIAL_CIRCLES"
ENV_LOG_LEVEL = f"{ENV_PREFIX}_LOG_LEVEL"
ENV_JSON_OUTPUT = f"{ENV_PREFIX}_JSON_OUTPUT"
ENV_UPDATE_GOLDEN = f"{ENV_PREFIX}_UPDATE_GOLDEN"
