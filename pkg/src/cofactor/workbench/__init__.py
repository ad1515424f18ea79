"""File I/O, bundled alloy data, composition screening and the command line."""
from .io import CrystalSpec, bundled_crystal, bundled_names, load_crystal, parse_crystal
from .screening import CompositionModel, ScreenResult, bisect, load_model, screen
from .table2 import table2_report

__all__ = [
    "CrystalSpec", "bundled_crystal", "bundled_names", "load_crystal", "parse_crystal",
    "CompositionModel", "ScreenResult", "bisect", "load_model", "screen", "table2_report",
]
