from ..config import Config
from ..exceptions import InvalidInputError
from .base import Command


def load_command(name: str, config: Config, silent: bool = False) -> Command:
    """Instantiate the command registered under name; imports stay lazy."""
    match name:
        case "eval":
            from .evaluate import EvalCommand

            return EvalCommand(config, silent)
        case "monitor":
            from .monitor import MonitorCommand

            return MonitorCommand(config, silent)
        case "sweep":
            from .sweep import SweepCommand

            return SweepCommand(config, silent)
        case "rank":
            from .rank import RankCommand

            return RankCommand(config, silent)
        case "compare":
            from .compare import CompareCommand

            return CompareCommand(config, silent)
        case "train-head":
            from .heads import TrainHeadCommand

            return TrainHeadCommand(config, silent)
        case "calibrate":
            from .heads import CalibrateCommand

            return CalibrateCommand(config, silent)
        case "calib-report":
            from .heads import CalibReportCommand

            return CalibReportCommand(config, silent)
        case "apply-head":
            from .heads import ApplyHeadCommand

            return ApplyHeadCommand(config, silent)
        case "gen":
            from .gen import GenCommand

            return GenCommand(config, silent)
        case _:
            raise InvalidInputError("command", "unknown command", name)
