"""
Tests for the FastMCP HTTP transport, health check and entry point.
"""

import os
import pytest
from unittest.mock import patch
from starlette.testclient import TestClient

from starnet import __version__
from starnet.__main__ import main
from starnet.models.scenario import RunSettings
from starnet.server_factory import create_mcp_server_with_settings


class TestHealthCheckEndpoint:
    """Test the health check endpoint via FastMCP custom route."""

    def test_health_check_endpoint_creation(self):
        """Test that the server is created with custom routes."""
        app = create_mcp_server_with_settings(RunSettings())

        assert app is not None
        assert hasattr(app, 'custom_route')

    def test_health_check_response_format(self):
        """Test the health check response body."""
        app = create_mcp_server_with_settings(RunSettings())
        client = TestClient(app.http_app())

        response = client.get("/health")

        assert response.status_code == 200
        assert response.json() == {
            "status": "healthy",
            "service": "starnet",
            "version": __version__
        }


class TestMainFunction:
    """Test the main entry point."""

    @patch('starnet.views.cli.create_mcp_server_with_settings')
    def test_main_function_starts_with_http_transport(self, mock_create_server):
        """Test that serve starts the MCP server with HTTP transport."""
        mock_app = mock_create_server.return_value
        mock_app.run_http_async.side_effect = KeyboardInterrupt()

        with patch.dict('os.environ', {}, clear=True):
            with pytest.raises(SystemExit) as exc_info:
                main(["serve"])

        assert exc_info.value.code == 0
        mock_app.run_http_async.assert_called_once_with(
            transport="http",
            host="0.0.0.0",
            port=8080
        )

    @patch('starnet.views.cli.create_mcp_server_with_settings')
    def test_main_function_environment_variables(self, mock_create_server):
        """Test that serve uses HOST and PORT."""
        mock_app = mock_create_server.return_value
        mock_app.run_http_async.side_effect = KeyboardInterrupt()

        with patch.dict(os.environ, {'PORT': '9090', 'HOST': '127.0.0.1'}):
            with pytest.raises(SystemExit):
                main(["serve"])

        mock_app.run_http_async.assert_called_with(
            transport="http",
            host="127.0.0.1",
            port=9090
        )

    def test_main_function_passes_exit_code(self):
        """Test that the command's status becomes the process exit code."""
        with pytest.raises(SystemExit) as exc_info:
            main(["bounds", "--m-max", "99"])

        assert exc_info.value.code == 4

    @patch('starnet.__main__.cli_main')
    def test_main_function_error_handling(self, mock_cli_main):
        """Test that unexpected errors exit with 1."""
        mock_cli_main.side_effect = Exception("Test error")

        with pytest.raises(SystemExit) as exc_info:
            main([])

        assert exc_info.value.code == 1

    @patch('starnet.__main__.cli_main')
    def test_main_function_interrupt(self, mock_cli_main):
        """Test that Ctrl-C exits cleanly."""
        mock_cli_main.side_effect = KeyboardInterrupt()

        with pytest.raises(SystemExit) as exc_info:
            main([])

        assert exc_info.value.code == 0
