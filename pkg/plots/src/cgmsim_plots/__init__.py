"""Figure rendering for the simulator's CSV outputs."""

from .figures import (
    FIGURE_KINDS,
    EmptySelectionError,
    FigureSpec,
    SchemaError,
    plot_activity,
    plot_effectiveness,
    plot_pi_sweep,
    plot_strategy_scatter,
    render,
)

__version__ = "0.1.0"
