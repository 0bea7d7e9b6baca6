"""
Server Factory.

This module creates and configures the MCP server that exposes the
star-network computations as tools.
"""

import logging
from fastmcp import FastMCP
from starlette.requests import Request
from starlette.responses import JSONResponse

from . import __version__
from .config.config_manager import ConfigManager
from .controllers.starnet_controller import StarnetController
from .models.scenario import RunSettings
from .views.mcp_tools import MCPToolsView

logger = logging.getLogger(__name__)

SERVICE_NAME = "starnet"


def create_mcp_server() -> FastMCP:
    """
    Create and configure the MCP server from environment settings.

    Returns:
        Configured FastMCP server instance
    """
    try:
        settings = ConfigManager().get_run_settings()
        logger.info(f"Settings loaded: threads={settings.threads}, max_states={settings.max_states}")
        return create_mcp_server_with_settings(settings)
    except Exception as e:
        logger.error(f"Failed to create MCP server: {e}")
        raise


def create_mcp_server_with_settings(settings: RunSettings) -> FastMCP:
    """
    Create MCP server with specific run settings.

    Args:
        settings: RunSettings instance

    Returns:
        Configured FastMCP server instance
    """
    try:
        controller = StarnetController(settings)
        logger.info("Star-network controller initialized")

        view = MCPToolsView(controller)
        app = FastMCP(SERVICE_NAME)

        @app.custom_route("/health", methods=["GET"])
        async def health_check(request: Request) -> JSONResponse:
            """Health check endpoint."""
            return JSONResponse({
                "status": "healthy",
                "service": SERVICE_NAME,
                "version": __version__
            })

        view.register_tools(app)
        logger.info("MCP tools and health check endpoint registered")

        return app

    except Exception as e:
        logger.error(f"Failed to create MCP server: {e}")
        raise
