"""Subcommands of the ``nlrm`` command line.

Each subcommand is a pydantic model whose fields are its flags; ``cli_cmd`` resolves ``--config``
values under the explicit flags and runs it.
"""

from pydantic import Field
from pydantic_settings import (
    BaseSettings,
    CliApp,
    CliImplicitFlag,
    CliSubCommand,
    SettingsConfigDict,
)

from app import __version__
from app.commands.base import emit
from app.commands.baseline import CalibrateCommand, LinearizeCommand
from app.commands.data import GenDatasetCommand
from app.commands.experiments import BScanCommand, DispersionCommand, MirrorStudyCommand
from app.commands.network import BenchCommand, EvalCommand, InferCommand, TrainCommand
from app.commands.plot import PlotCommand
from app.commands.signals import DemoCommand, SimulateCommand, StackCommand
from app.models.dataset import DATASET_MAGIC, DATASET_VERSION
from app.models.network import NETWORK_MAGIC, NETWORK_VERSION


def version_text() -> str:
    return (
        f"nlrm {__version__}\n"
        f"{DATASET_MAGIC.decode('ascii')} {DATASET_VERSION}\n"
        f"{NETWORK_MAGIC.decode('ascii')} {NETWORK_VERSION}"
    )


class NlrmCLI(BaseSettings):
    """Order-selective nonlinearity removal: synthesis, stacks, networks and baselines."""

    model_config = SettingsConfigDict(
        cli_prog_name="nlrm",
        cli_kebab_case=True,
        cli_implicit_flags=True,
        cli_exit_on_error=False,
        env_prefix="NLRM_CLI_",
    )

    version: CliImplicitFlag[bool] = Field(default=False, description="Print format versions")

    simulate: CliSubCommand[SimulateCommand]
    stack: CliSubCommand[StackCommand]
    demo: CliSubCommand[DemoCommand]
    gen_dataset: CliSubCommand[GenDatasetCommand] = Field(alias="gen-dataset")
    train: CliSubCommand[TrainCommand]
    infer: CliSubCommand[InferCommand]
    eval: CliSubCommand[EvalCommand]
    calibrate: CliSubCommand[CalibrateCommand]
    linearize: CliSubCommand[LinearizeCommand]
    mirror_study: CliSubCommand[MirrorStudyCommand] = Field(alias="mirror-study")
    dispersion: CliSubCommand[DispersionCommand]
    bscan: CliSubCommand[BScanCommand]
    bench: CliSubCommand[BenchCommand]
    plot: CliSubCommand[PlotCommand]

    def cli_cmd(self) -> None:
        """Print versions or run the selected subcommand."""
        if self.version:
            emit(version_text())
            return
        CliApp.run_subcommand(self)


COMMANDS = (
    "simulate",
    "stack",
    "demo",
    "gen-dataset",
    "train",
    "infer",
    "eval",
    "calibrate",
    "linearize",
    "mirror-study",
    "dispersion",
    "bscan",
    "bench",
    "plot",
)
