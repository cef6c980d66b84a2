"""
ERM Configuration
Environment reconstruction toolkit - constants and defaults
"""

import math

# Physics
SPEED_OF_LIGHT = 299_792_458.0       # m/s
ROUNDED_SPEED_OF_LIGHT = 3e8         # rounded constant, selectable with --c

# Solver
ELLIPSE_EPS_M = 1e-9                 # path must exceed the BS-UE baseline by this much
SOLVER = {
    "tol": 1e-12,
    "max_iter": 100,
    "seed_rel_width": 1e-6,          # root-finder seed tolerance, relative to L
    "min_damping": 1.0 / 1024,
}

# Sounder resolution (1.2 GHz bandwidth)
DELAY_QUANTUM_S = 1.0 / 1.2e9
ANGLE_QUANTUM_DEG = 1.0

# Clustering gates (single linkage)
CLUSTERING = {
    "delay_gap_s": 5e-9,
    "angle_gap_deg": 10.0,           # RX rotation step [0: 10: 360)
    "power_floor_db": -math.inf,
}

# Simulator defaults
SIMULATION = {
    "max_order": 1,
    "delay_quantum_s": DELAY_QUANTUM_S,
    "angle_quantum_deg": 0.0,        # 0 disables
    "include_los": True,
}

# Point-cloud merge
MERGE_DEDUPE_EPS_M = 0.1

# Antenna gains are removed from raw powers at load
GAIN_COMPENSATION = True

# Logging: ERM_LOG=off|info|debug
LOG_ENV_VAR = "ERM_LOG"
LOG_LEVELS = {
    "off": None,
    "info": "INFO",
    "debug": "DEBUG",
}
LOG_DEFAULT_LEVEL = "WARNING"
LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"

# Palette for figures (RGB)
COLORS = {
    "black": (0, 0, 0),
    "white": (255, 255, 255),
    "red": (255, 0, 0),
    "yellow": (255, 255, 0),
    "orange": (255, 128, 0),
    "blue": (0, 0, 255),
    "green": (0, 255, 0),
    "grey": (128, 128, 128),
}

# Figure theme
THEME = {
    "background": "white",
    "wall": "black",
    "bs": "red",                     # transmitter star
    "ue": "grey",                    # receiver hexagons
    "rp": "orange",                  # sensed reflection points
    "duplicate": "blue",
    "primary": "orange",             # frame, rings
    "secondary": "grey",             # labels
}

# Cluster colours cycle through these in the DAPS figure
GROUP_COLORS = ["red", "orange", "yellow", "green", "blue"]

# Figure sizes
FIGURE = {
    "scene_inches": (8.0, 4.5),
    "daps_size": (600, 600),
    "svg_hashsalt": "erm",           # fixed element ids -> byte-identical SVG
}

# DAPS grid defaults
DAPS = {
    "delay_bins": 64,
    "angle_bins": 36,
}
