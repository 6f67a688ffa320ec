"""Three-tank mixing module simulator producing sensor logs and engineering tables."""

from .config import (ConfigError, EndCondition, FullSwitch, Phase, PlantConfig, Pump, Tank, Valve,
                     config_from_dict, load_config)
from .plant import (ENGINEERING_FILES, LOG_HEADER, Clog, EngineeringDoc, PhaseRun, SensorLogRecord,
                    SimResult, StuckValve, emit_engineering, emit_log, engineering_doc,
                    parse_anomaly, read_log, simulate)

__all__ = ["ConfigError", "EndCondition", "FullSwitch", "Phase", "PlantConfig", "Pump", "Tank",
           "Valve", "config_from_dict", "load_config", "ENGINEERING_FILES", "LOG_HEADER", "Clog",
           "EngineeringDoc", "PhaseRun", "SensorLogRecord", "SimResult", "StuckValve",
           "emit_engineering", "emit_log", "engineering_doc", "parse_anomaly", "read_log",
           "simulate"]
