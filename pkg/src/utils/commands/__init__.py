from .base import Command
from .registry import load_command
from .pool import discover_scenes, map_scenes
from .jobs import RuleJob, apply_head_scene, evaluate_scene, monitor_scene, rule_score
