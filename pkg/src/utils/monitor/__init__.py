from .types import MonitorConfig, MonitorReport, PredictionReport, RegionMode
from .monitors import (
    pixel_monitor,
    pixel_alarms,
    restrict_to_region,
    region_monitor_simple,
    region_monitor_peaks,
    region_score,
    fp_formula,
    fp_monitor,
    global_consistency,
    corner_case_score,
    rank_corner_cases,
)
from .ground_truth import fn_ground_truth, region_ground_truth, fp_ground_truth, ground_truth_logic
from .report import build_monitor_report, evaluate_monitors, channel_mask
