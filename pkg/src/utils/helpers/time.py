import datetime
import time

from dateutil import tz


def get_current_time(include_ms: bool = True, as_str: bool = True):
    now = datetime.datetime.now()

    if not include_ms:
        now = now.replace(microsecond=0)
    now = now.astimezone(tz.tzlocal())
    if as_str:
        now = now.isoformat()

    return now


def log_file_name(day: datetime.datetime = None) -> str:
    """Daily log file name, <YYYY-MM-DD>.log in local time."""
    day = day or get_current_time(include_ms=False, as_str=False)
    return "{}.log".format(day.strftime("%Y-%m-%d"))


def elapsed_ms(start: float) -> float:
    """Milliseconds since a time.perf_counter() reading."""
    return (time.perf_counter() - start) * 1000
