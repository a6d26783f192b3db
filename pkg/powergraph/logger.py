import importlib
import logging
import pkgutil
from pathlib import Path

from rich.console import Console
from rich.logging import RichHandler
from rich.progress import (
    BarColumn,
    MofNCompleteColumn,
    Progress,
    SpinnerColumn,
    TextColumn,
    TimeElapsedColumn,
    TimeRemainingColumn,
)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# stdout carries command output, diagnostics go to stderr
console = Console(stderr=True)


def discover_package_modules() -> list[str]:
    """Names of the package and all of its submodules."""
    package_name = Path(__file__).parent.name
    package = importlib.import_module(package_name)
    package_path = Path(package.__file__).parent
    modules = [package_name]
    for _, module_name, _ in pkgutil.walk_packages(
        [str(package_path)], prefix=f"{package_name}."
    ):
        modules.append(module_name)
    return modules


def verbosity_level(verbosity: int) -> int:
    if verbosity >= 2:
        return logging.DEBUG
    if verbosity == 1:
        return logging.INFO
    return logging.WARNING


def configure_logging(
    verbosity: int, log_to_file: bool = False, log_file="powergraph.log"
):
    """Route log records through rich, raising only powergraph's loggers to
    the requested verbosity."""
    level = verbosity_level(verbosity)
    handlers: list[logging.Handler] = [
        RichHandler(console=console, show_path=verbosity >= 2)
    ]

    if log_to_file:
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(level)
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handlers.append(file_handler)

    # third-party libraries stay at WARNING
    logging.basicConfig(
        level=logging.WARNING,
        format="%(message)s",
        datefmt="[%X]",
        handlers=handlers,
        force=True,
    )
    for module in discover_package_modules():
        logging.getLogger(module).setLevel(level)


def get_logger(name: str) -> logging.Logger:
    return logging.getLogger(name)


def get_progress(disable: bool = False) -> Progress:
    return Progress(
        SpinnerColumn(),
        TextColumn("{task.description:<30}"),
        BarColumn(),
        TextColumn(" | Completed: "),
        MofNCompleteColumn(),
        TextColumn(" | Time Elapsed: "),
        TimeElapsedColumn(),
        TextColumn(" | ETA: "),
        TimeRemainingColumn(),
        console=console,
        disable=disable,
        expand=True,
    )
