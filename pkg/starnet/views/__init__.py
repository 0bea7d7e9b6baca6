# Views package: CLI, exports and MCP tools
