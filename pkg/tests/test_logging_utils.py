import logging

from iotscheduler.controllers.logging_utils import (
    LOG_DIR_ENV,
    TqdmHandler,
    get_logger,
    run_with_progress,
    telemetry_line,
)

RECORD = {"iteration": 3, "evals": 80, "min_violations": 0, "mean_violations": 1.25,
          "front_size": 4, "hv": 0.123456}


def test_telemetry_line():
    line = telemetry_line("nsga3", RECORD)
    assert line == "[nsga3] it=3 evals=80 min_viol=0 mean_viol=1.250 front=4 hv=0.1235"
    assert telemetry_line("aco", dict(RECORD, best_fitness=0.5)).endswith("best=0.5000")


def test_run_with_progress_collects_results():
    seen = []

    def step(seed, scale):
        seen.append(seed)
        return seed * scale, seed

    out = run_with_progress(range(3), step, desc="test", disable_tqdm=True, scale=0.5)
    assert out == [(0.0, 0), (0.5, 1), (1.0, 2)]
    assert seen == [0, 1, 2]


def test_logger_is_created_once(tmp_path, monkeypatch):
    monkeypatch.delenv(LOG_DIR_ENV, raising=False)
    log = get_logger("test_logger_is_created_once")
    assert not log.propagate
    assert [type(h) for h in log.handlers] == [TqdmHandler]
    again = get_logger("test_logger_is_created_once", debug=True)
    assert again is log and len(again.handlers) == 1
    assert again.level == logging.DEBUG


def test_log_folder_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(LOG_DIR_ENV, str(tmp_path / "logs"))
    log = get_logger("test_log_folder_from_environment")
    log.info("hello from the scheduler")
    for h in log.handlers:
        h.flush()
    text = (tmp_path / "logs" / "test_log_folder_from_environment.txt").read_text()
    assert "hello from the scheduler" in text
