from .singleton import Singleton
from .time import get_current_time, log_file_name, elapsed_ms
