# Libs
from rich import box
from rich.table import Table
from rich.text import Text

# Apps
from apps.diagnostics.entities import CorrelationMatrix


def _cell(value: float) -> Text:
    level = round(255 * (1 - abs(value)))
    ink = "black" if level > 127 else "white"
    return Text(f"{value:.2f}", style=f"{ink} on rgb({level},{level},{level})")


def render_heatmap(matrix: CorrelationMatrix, title: str | None = None) -> Table:
    """Return a table shaded from white (|ρ| = 0) to black (|ρ| = 1)."""
    table = Table(title=title, box=box.SIMPLE, show_lines=False, pad_edge=False)
    table.add_column("")
    for label in matrix.labels:
        table.add_column(label, justify="center")
    for label, row in zip(matrix.labels, matrix.values):
        table.add_row(label, *(_cell(value) for value in row))
    return table
