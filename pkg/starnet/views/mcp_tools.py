"""
MCP Tools View Layer.

This module contains the MCP tools that serve as the view layer,
presenting star-network results to MCP clients.
"""

import logging
from typing import Optional, TYPE_CHECKING
from fastmcp import FastMCP

from ..models.reports import ActivationResult, EvaluationReport, SosReport, SweepResult

if TYPE_CHECKING:
    from ..controllers.starnet_controller import StarnetController

logger = logging.getLogger(__name__)


def format_evaluation(report: EvaluationReport) -> str:
    result = f"Quantum value for n={report.n}, m={report.m}, copies={report.copies}:\n"
    for i, value in enumerate(report.per_i_values, start=1):
        result += f"- |J_{i}| = {value:.9g}\n"
    result += f"delta = {report.delta:.9g}, alpha = {report.classical_bound:.9g}, ratio = {report.ratio:.9g}\n"
    result += f"violated: {'yes' if report.violated else 'no'}\n"
    return result


def format_certificate(report: SosReport) -> str:
    result = f"Certificate for n={report.n}, m={report.m}:\n"
    result += f"- gamma = {report.gamma:.3e}\n"
    result += f"- delta = {report.delta_q:.9g}\n"
    result += f"- slack ok: {report.slack_ok}, tight: {report.tight}\n"
    if report.extended_regime:
        result += "- mixed link states: bound derived in the extended regime\n"
    return result


def format_sweep(result: SweepResult) -> str:
    text = f"Visibility sweep n={result.n}, m={result.m}, copies={result.copies} (alpha = {result.alpha:.9g}):\n"
    for point in result.grid:
        text += f"- v={point.v:.4f}: delta={point.delta:.9g}{' (violated)' if point.violated else ''}\n"
    if result.critical_v is None:
        text += "No violation threshold inside the grid\n"
    else:
        text += f"Critical visibility: {result.critical_v:.7f}\n"
    return text


def format_activation(result: ActivationResult) -> str:
    return (
        f"Activation m={result.m}, v={result.v}:\n"
        f"- single copy: delta={result.delta_single:.9g} (violated: {result.violated_single})\n"
        f"- multi copy: delta={result.delta_multi:.9g} (violated: {result.violated_multi})\n"
        f"- activated: {result.activated}\n"
    )


class MCPToolsView:
    """View layer for MCP tools that presents star-network results."""

    def __init__(self, controller: 'StarnetController'):
        """
        Initialize the MCP tools view.

        Args:
            controller: Star-network controller instance
        """
        self.controller = controller

    def register_tools(self, app: FastMCP):
        """Register all MCP tools with the FastMCP application."""

        @app.tool(
            name="bounds",
            description="Classical bound alpha_m, quantum optimum 2^(m-1)*sqrt(m) and their ratio for m in a range (2..50)."
        )
        async def bounds(m_min: int = 2, m_max: int = 10) -> str:
            """Bounds table"""
            try:
                rows = self.controller.get_bounds(m_min, m_max)
                result = "m, alpha_m, quantum optimum, ratio:\n"
                for m, alpha, qopt, ratio in rows:
                    result += f"- {m}: {alpha}, {qopt:.9g}, {ratio:.6f}\n"
                return result
            except Exception as e:
                logger.error(f"Error computing bounds: {e}")
                return f"Error computing bounds: {e}"

        @app.tool(
            name="quantum_value",
            description="Evaluate the optimal quantum strategy for n edge parties and m settings."
        )
        async def quantum_value(n: int, m: int) -> str:
            """Optimal quantum value"""
            try:
                return format_evaluation(self.controller.get_quantum(n, m))
            except Exception as e:
                logger.error(f"Error evaluating quantum strategy: {e}")
                return f"Error evaluating quantum strategy: {e}"

        @app.tool(
            name="verify",
            description="Run every check (optimal value, violation, certificate, classical bound agreement) for one scenario."
        )
        async def verify(n: int, m: int) -> str:
            """Verification bundle"""
            try:
                report = self.controller.verify(n, m)
                result = f"Verification n={n}, m={m}: {'passed' if report.passed else 'FAILED'}\n"
                for name, ok in report.checks.items():
                    result += f"- {name}: {'pass' if ok else 'FAIL'}\n"
                for name in report.skipped:
                    result += f"- {name}: skipped\n"
                return result
            except Exception as e:
                logger.error(f"Error verifying scenario: {e}")
                return f"Error verifying scenario: {e}"

        @app.tool(
            name="sos_certificate",
            description="Sum-of-squares certificate for the optimal strategy, or for observables given as JSON."
        )
        async def sos_certificate(n: int, m: int, observables_json: Optional[str] = None) -> str:
            """Certificate check"""
            try:
                return format_certificate(self.controller.get_certificate(n, m, observables_json))
            except Exception as e:
                logger.error(f"Error checking certificate: {e}")
                return f"Error checking certificate: {e}"

        @app.tool(
            name="visibility_sweep",
            description="Sweep Werner visibility on every link and report delta with the critical visibility."
        )
        async def visibility_sweep(n: int, m: int, copies: Optional[int] = None, steps: int = 21) -> str:
            """Visibility sweep"""
            try:
                return format_sweep(self.controller.get_sweep(n, m, copies, steps=steps))
            except Exception as e:
                logger.error(f"Error running sweep: {e}")
                return f"Error running sweep: {e}"

        @app.tool(
            name="seesaw",
            description="Seesaw maximization of delta with a fixed number of Bell pairs per link; the result is a lower bound."
        )
        async def seesaw(n: int, m: int, copies: int, seeds: int = 5, visibility: float = 1.0) -> str:
            """Seesaw run"""
            try:
                state = self.controller.get_seesaw(n, m, copies, seeds=seeds, visibility=visibility)
                return (
                    f"Seesaw n={state.n}, m={state.m}, copies={state.copies}, v={state.visibility}:\n"
                    f"- best delta: {state.delta:.9g} (seed {state.seed})\n"
                    f"- iterations: {state.iterations}, converged: {state.converged}\n"
                )
            except Exception as e:
                logger.error(f"Error running seesaw: {e}")
                return f"Error running seesaw: {e}"

        @app.tool(
            name="activation",
            description="Compare the seesaw single-copy maximum with the two-copy value at a given visibility (m >= 4)."
        )
        async def activation(m: int, v: float, seeds: int = 5) -> str:
            """Activation experiment"""
            try:
                return format_activation(self.controller.get_activation(m, v, seeds=seeds))
            except Exception as e:
                logger.error(f"Error running activation experiment: {e}")
                return f"Error running activation experiment: {e}"
