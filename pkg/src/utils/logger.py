"""
Logging utility module for the mixed NCW combat toolkit
"""

import logging

from utils.config import load_logging_settings, resolve_directory

LOGGER_NAME = "lanchester_ncw"


def setup_logger(name: str = LOGGER_NAME, log_level: str = None) -> logging.Logger:
    """
    Setup and configure logger for the application

    Args:
        name (str): Logger name
        log_level (str): Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL);
            taken from config.ini / LOG_LEVEL when omitted

    Returns:
        logging.Logger: Configured logger instance
    """
    settings = load_logging_settings()
    level = getattr(logging, (log_level or settings["log_level"]).upper(), logging.INFO)

    logger = logging.getLogger(name)
    logger.setLevel(level)

    # Avoid adding multiple handlers if logger already exists
    if logger.handlers:
        return logger

    logs_dir = resolve_directory(settings["logs_directory"])
    logs_dir.mkdir(parents=True, exist_ok=True)

    file_handler = logging.FileHandler(logs_dir / "app.log", encoding="utf-8")
    file_handler.setLevel(level)

    # Console stays at WARNING so command output on stdout is not interleaved
    console_handler = logging.StreamHandler()
    console_handler.setLevel(max(level, logging.WARNING))

    formatter = logging.Formatter(settings["log_format"])
    file_handler.setFormatter(formatter)
    console_handler.setFormatter(formatter)

    logger.addHandler(file_handler)
    logger.addHandler(console_handler)
    logger.propagate = False

    return logger


def log_operation(operation: str, status: str, details: str = "") -> None:
    """
    Log a specific operation with status and details

    Args:
        operation (str): Name of the operation
        status (str): Status of the operation (SUCCESS, FAILED, PENDING)
        details (str): Additional details about the operation
    """
    logger = logging.getLogger(LOGGER_NAME)
    message = f"Operation: {operation} | Status: {status}"
    if details:
        message += f" | Details: {details}"

    if status == "FAILED":
        logger.error(message)
    elif status in ("SUCCESS", "PENDING"):
        logger.info(message)
    else:
        logger.warning(message)


def log_stage_event(stage_index: int, time: float, eliminated: str, next_allocation: str = "") -> None:
    """
    Log a stage boundary

    Args:
        stage_index (int): Index of the stage that just ended
        time (float): Event time
        eliminated (str): Entities eliminated at the event
        next_allocation (str): Allocation of the following stage, if any
    """
    logger = logging.getLogger(LOGGER_NAME)
    message = f"STAGE END | Stage: {stage_index} | Time: {time:.6g} | Eliminated: {eliminated}"
    if next_allocation:
        message += f" | Next allocation: {next_allocation}"
    logger.info(message)


def log_oracle_violation(check: str, detail: str) -> None:
    """
    Log an oracle check that failed

    Args:
        check (str): Name of the oracle check
        detail (str): Offending allocation and margin
    """
    logger = logging.getLogger(LOGGER_NAME)
    logger.warning(f"ORACLE VIOLATION | Check: {check} | Detail: {detail}")
