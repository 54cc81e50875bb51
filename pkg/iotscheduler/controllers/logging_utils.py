"""
logging_utils.py

Logging for optimizer runs and experiment scripts:
- run_with_progress: tqdm bar over seeds/runs, labelled with the values each run returns
- telemetry_line: the one-line form of an optimizer telemetry record
- TqdmHandler: log lines go above any active bar
- RotatingTxtHandler / FolderWarnHandler: optional .txt log files under IOTSCHED_LOG_DIR
- get_logger: one logger per component name
"""

import logging
import os
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Any, Dict

from tqdm.auto import tqdm

LOG_DIR_ENV = "IOTSCHED_LOG_DIR"
LOG_FORMAT = "[%(asctime)s] [%(name)s] %(levelname)s: %(message)s"


def _fmt_metric(value) -> str:
    if isinstance(value, (bool, int)):
        return str(int(value))
    try:
        return f"{float(value):.4f}"
    except (TypeError, ValueError):
        return str(value)


def run_with_progress(iterable, step_fn, desc="Runs", metrics=("HV", "Front"),
                      ascii=True, dynamic_ncols=True, mininterval=0.1,
                      disable_tqdm=False, **fn_kwargs):
    """
    Call step_fn(item, **fn_kwargs) for every item and collect the results.

    When step_fn returns a tuple, its values are shown on the bar under the
    names in `metrics`, e.g. metrics=("HV", "Front") for (hypervolume, front
    size) per seed.
    """
    results = []
    with tqdm(iterable, desc=desc, ascii=ascii, dynamic_ncols=dynamic_ncols,
              mininterval=mininterval, disable=disable_tqdm) as bar:
        for item in bar:
            out = step_fn(item, **fn_kwargs)
            results.append(out)
            if isinstance(out, tuple):
                bar.set_postfix({name: _fmt_metric(v) for name, v in zip(metrics, out)})
    return results


def telemetry_line(algorithm: str, record: Dict[str, Any]) -> str:
    line = (f"[{algorithm}] it={record['iteration']} evals={record['evals']} "
            f"min_viol={record['min_violations']} mean_viol={record['mean_violations']:.3f} "
            f"front={record['front_size']} hv={record['hv']:.4f}")
    if "best_fitness" in record:
        line += f" best={record['best_fitness']:.4f}"
    return line


class TqdmHandler(logging.Handler):
    """Writes through tqdm so progress bars are not torn."""

    def __init__(self, fmt=LOG_FORMAT):
        super().__init__()
        self.setFormatter(logging.Formatter(fmt))

    def emit(self, record):
        try:
            tqdm.write(self.format(record))
        except Exception:
            self.handleError(record)


class RotatingTxtHandler(RotatingFileHandler):
    """Size-rotated .txt log; rolled-over files are kept."""

    def __init__(self, path, max_bytes, encoding="utf-8", delay=True):
        super().__init__(path, "a", max_bytes, backupCount=0, encoding=encoding, delay=delay)

    def getFilesToDelete(self):
        return []


class FolderWarnHandler(logging.Handler):
    """Warns once when the .txt logs in a folder pass `threshold` bytes."""

    def __init__(self, folder, threshold):
        super().__init__()
        self.folder = Path(folder)
        self.threshold = threshold
        self.warned = False

    def emit(self, record):
        if self.warned or record.levelno > logging.INFO:
            return
        size = sum(f.stat().st_size for f in self.folder.glob("*.txt") if f.is_file())
        if size >= self.threshold:
            self.warned = True
            logging.getLogger(record.name).warning(
                f"Log folder {self.folder} holds {size / 1024**2:.1f}MB of logs "
                f"(threshold {self.threshold / 1024**2:.1f}MB)"
            )


def get_logger(name, debug=False, suppress_all_logs=False, fmt=LOG_FORMAT,
               log_folder=None, max_bytes=10 * 1024 * 1024,
               folder_threshold=100 * 1024 * 1024):
    """
    Logger for one component (`NSGA3Optimizer`, `PassIngest`, ...).

    Handlers are attached on the first call for a name; a log folder (argument
    or IOTSCHED_LOG_DIR) adds `<folder>/<name>.txt`. Later calls only change
    the level.
    """
    logger = logging.getLogger(name)
    logger.propagate = False

    if not logger.handlers:
        logger.addHandler(TqdmHandler(fmt))
        folder = log_folder or os.environ.get(LOG_DIR_ENV)
        if folder:
            Path(folder).mkdir(parents=True, exist_ok=True)
            fh = RotatingTxtHandler(Path(folder) / f"{name}.txt", max_bytes)
            fh.setFormatter(logging.Formatter(fmt))
            logger.addHandler(fh)
            logger.addHandler(FolderWarnHandler(folder, folder_threshold))
    logger.setLevel(logging.DEBUG if debug else logging.INFO)

    if suppress_all_logs is True:
        logging.disable(logging.CRITICAL)

    return logger
