"""plot."""

from pathlib import Path
from typing import ClassVar

from pydantic import Field

from app.commands.base import Command, emit
from app.utils.plotting import PlotKind, emit_plot


class PlotCommand(Command):
    """Render a CSV output as a line plot or heatmap SVG."""

    command_name: ClassVar[str] = "plot"

    csv: Path | None = Field(default=None, description="CSV written by another command")
    kind: PlotKind = "line"
    out: Path | None = Field(default=None, description="SVG file to write")
    title: str | None = None

    def run(self) -> None:
        out: Path = self.required("out")
        emit_plot(self.required("csv"), self.kind, out, self.title)
        self.write_snapshot(out)
        emit(f"plot: {out}")
