"""
Command handlers for experiment runs.

BaseCommand is a template method: handle() logs, runs the subclass's
_execute(), writes the CSV with its reproducibility header and maps the
outcome to an exit status. Commands are looked up by name in COMMANDS.
"""

import logging
import os
from abc import ABC, abstractmethod
from pathlib import Path
from typing import List, NamedTuple, Optional, Sequence

from common.csv_export import write_csv
from common.exceptions import CapabilityError, ConfigurationError, IsoperimetryException, PreconditionError
from common.streams import default_workers
from domains import as_start
from iterated import (
    IteratedQuery,
    draw_outer_times,
    iterated_survival_curve,
    moment_from_outer,
    representation_crosscheck,
)
from verify import (
    check_brownian_isoperimetric,
    check_dominance,
    check_interval_monotonicity,
    check_isoperimetric,
    check_moments,
    sign_scan,
)
from verify.report import CSV_COLUMNS
from verify.sign_scan import SIGN_COLUMNS
from cli import VERSION
from cli.config import CheckKind, Command, ExperimentConfig

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INVALID_CONFIG = 2
EXIT_CONFIRMED_FLAG = 3

ESTIMATE_COLUMNS = ["domain", "process", "z", "t", "p", "value", "std_error", "n", "method", "seed"]


class CommandOutput(NamedTuple):
    columns: List[str]
    rows: List[list]
    summary: str = ""
    confirmed_flag: bool = False


class BaseCommand(ABC):
    """
    Abstract base class for experiment commands.

    Subclasses implement _execute() and return the rows to export.
    """

    def __init__(self, workers: Optional[int] = None):
        self.logger = logging.getLogger(self.__class__.__name__)
        self.logger.setLevel(os.getenv("LOG_LEVEL", "INFO"))
        self.workers = workers or default_workers()

    def handle(self, config: ExperimentConfig, out_path: Path) -> int:
        """
        Run the command and write its CSV (Template Method).

        Returns:
            Exit status: 0 ok, 2 invalid configuration, 3 confirmed
            inequality flag, 1 any other failure
        """
        try:
            self.logger.info(f"Running {config.command.value} (config {config.config_hash()[:12]})")
            output = self._execute(self._with_workers(config))
            write_csv(out_path, output.columns, output.rows, self.header_lines(config))
            if output.summary:
                print(output.summary)
            self.logger.info("Command completed successfully")
            return EXIT_CONFIRMED_FLAG if output.confirmed_flag else EXIT_OK
        except (ConfigurationError, CapabilityError, PreconditionError) as e:
            # the configuration asks for something the domain or method cannot do
            self.logger.error(f"Invalid configuration: {e}")
            return EXIT_INVALID_CONFIG
        except IsoperimetryException as e:
            self.logger.error(f"Command error: {e} {e.details}", exc_info=True)
            return EXIT_FAILURE
        except Exception as e:
            self.logger.error(f"Command error: {e}", exc_info=True)
            return EXIT_FAILURE

    @abstractmethod
    def _execute(self, config: ExperimentConfig) -> CommandOutput:
        """
        Subclasses implement their specific computation here.

        Args:
            config: Validated configuration with the worker count applied

        Returns:
            Columns and rows for the CSV, plus a summary block
        """
        pass

    def _with_workers(self, config: ExperimentConfig) -> ExperimentConfig:
        settings = config.estimator.model_copy(update={"workers": self.workers})
        return config.model_copy(update={"estimator": settings})

    @staticmethod
    def header_lines(config: ExperimentConfig) -> List[str]:
        return [
            f"config_sha256={config.config_hash()}",
            f"seed={config.master_seed}",
            f"version={VERSION}",
            f"command={config.command.value}",
        ]

    @staticmethod
    def estimate_row(config: ExperimentConfig, z: Sequence[float], estimate, t=None, p=None) -> list:
        return [
            config.domain.shape, config.process, list(z), t, p,
            estimate.value, estimate.std_error, estimate.n_samples, estimate.method, config.master_seed,
        ]


class SurvivalCommand(BaseCommand):
    """Survival curve of the iterated exit time at every start point."""

    def _execute(self, config: ExperimentConfig) -> CommandOutput:
        rows = []
        for i, z in enumerate(config.z_grid):
            start = as_start(z)
            curve = iterated_survival_curve(
                config.domain, start, config.process, config.t_grid,
                config.estimator, config.stream(i), config.series,
            )
            rows.extend(self.estimate_row(config, start.z, e, t=t) for t, e in zip(config.t_grid, curve))
        return CommandOutput(ESTIMATE_COLUMNS, rows)


class MomentsCommand(BaseCommand):
    """Moments of the iterated exit time; all orders share the outer draws."""

    def _execute(self, config: ExperimentConfig) -> CommandOutput:
        rows = []
        for i, z in enumerate(config.z_grid):
            query = IteratedQuery(
                domain=config.domain, start=as_start(z), process=config.process, p=config.p_grid[0]
            )
            outer = draw_outer_times(
                query.domain, query.start, query.process, config.estimator, config.stream(i), config.series
            )
            for p in config.p_grid:
                estimate = moment_from_outer(outer, p, config.series)
                rows.append(self.estimate_row(config, query.start.z, estimate, p=p))
        return CommandOutput(ESTIMATE_COLUMNS, rows)


class VerifyCommand(BaseCommand):
    """Runs one inequality check; a confirmed flag sets a distinct exit status."""

    def _execute(self, config: ExperimentConfig) -> CommandOutput:
        report = self._route_check(config)
        return CommandOutput(CSV_COLUMNS, report.csv_rows(), report.summary_text(), report.has_confirmed_flag)

    def _route_check(self, config: ExperimentConfig):
        check = config.check
        stream = config.stream()

        if check == CheckKind.ISOPERIMETRIC:
            return check_isoperimetric(
                config.domain, config.process, config.comparison, config.z_grid, config.t_grid,
                config.estimator, stream, config.k, config.series, config.confirm,
            )
        elif check == CheckKind.MOMENTS:
            return check_moments(
                config.domain, config.process, config.comparison, config.p_grid, stream,
                config.z_grid, config.estimator, config.k, config.series, config.confirm, config.phi,
            )
        elif check == CheckKind.BROWNIAN:
            return check_brownian_isoperimetric(
                config.domain, config.comparison, config.z_grid, config.t_grid,
                config.estimator.count, config.estimator.dt, stream, config.k, config.series, config.confirm,
            )
        elif check == CheckKind.DOMINANCE:
            return check_dominance(
                config.dominance, config.estimator.count, stream, config.k, config.series,
                config.confirm, self.workers,
            )
        elif check == CheckKind.MONOTONICITY:
            return check_interval_monotonicity(config.u_grid, config.t_grid, config.series, config.k)
        else:
            raise ConfigurationError(f"Unsupported check: {check}", location="check")


class SignScanCommand(BaseCommand):
    """Exploratory sign map of the mixed partial; never a gate."""

    def _execute(self, config: ExperimentConfig) -> CommandOutput:
        result = sign_scan(config.u_grid, config.v_grid, config.t_grid, config.series)
        return CommandOutput(SIGN_COLUMNS, result.rows(), result.summary_text())


class CrosscheckCommand(BaseCommand):
    """The four integral forms of the IBM survival probability on an interval."""

    COLUMNS = ["z", "t", "density_form", "v_partial_form", "u_partial_form", "mixed_form", "max_discrepancy"]

    def _execute(self, config: ExperimentConfig) -> CommandOutput:
        rows = []
        worst = 0.0
        for z in config.z_grid:
            start = as_start(z)
            for t in config.t_grid:
                check = representation_crosscheck(config.domain, start, t, config.series)
                worst = max(worst, check.max_discrepancy)
                rows.append([start.z, t, *check.values, check.max_discrepancy])
        return CommandOutput(self.COLUMNS, rows, f"crosscheck: largest discrepancy {worst:.3g}")


COMMANDS = {
    Command.SURVIVAL: SurvivalCommand,
    Command.MOMENTS: MomentsCommand,
    Command.VERIFY: VerifyCommand,
    Command.SIGN_SCAN: SignScanCommand,
    Command.CROSSCHECK: CrosscheckCommand,
}


def command_for(config: ExperimentConfig, workers: Optional[int] = None) -> BaseCommand:
    """
    Route a configuration to its handler.

    Raises:
        ConfigurationError: If no handler is registered for the command
    """
    handler = COMMANDS.get(config.command)
    if handler is None:
        raise ConfigurationError(f"Unsupported command: {config.command}", location="command")
    return handler(workers)
