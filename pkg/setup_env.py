#!/usr/bin/env python3
"""
Environment Setup Script

This script helps you create a .env file for the star-network toolkit.
It will copy the template and prompt you for the run settings.
"""

import os
import shutil

TEMPLATE = 'config.env.example'
ENV_FILE = '.env'
LOG_LEVELS = ['DEBUG', 'INFO', 'WARNING', 'ERROR']


def setup_environment():
    """Set up the environment configuration file."""

    # Check if .env already exists
    if os.path.exists(ENV_FILE):
        print("⚠️  .env file already exists!")
        response = input("Do you want to overwrite it? (y/N): ").lower().strip()
        if response != 'y':
            print("Setup cancelled.")
            return

    # Check if template exists
    if not os.path.exists(TEMPLATE):
        print(f"❌ {TEMPLATE} template not found!")
        print("Please ensure the template file exists.")
        return

    print("🚀 Setting up star-network toolkit environment...")
    print()

    shutil.copy(TEMPLATE, ENV_FILE)
    print("✅ Created .env file from template")
    print()

    threads = input("Worker threads (default: 1): ").strip()
    if threads.isdigit() and int(threads) > 0:
        update_env_value('STARNET_THREADS', threads)

    max_states = input("Exhaustive search limit on 2^(n*m) (default: 16777216): ").strip()
    if max_states.isdigit():
        update_env_value('STARNET_MAX_STATES', max_states)

    seeds = input("Seesaw restarts (default: 20): ").strip()
    if seeds.isdigit() and int(seeds) > 0:
        update_env_value('STARNET_SEEDS', seeds)

    log_level = input("Log level (DEBUG/INFO/WARNING/ERROR, default: INFO): ").strip().upper()
    if log_level in LOG_LEVELS:
        update_env_value('STARNET_LOG_LEVEL', log_level)

    out_dir = input("Output directory (default: .): ").strip()
    if out_dir:
        update_env_value('STARNET_OUT_DIR', out_dir)

    print()
    print("✅ Environment setup complete!")
    print()
    print("Next steps:")
    print("1. Verify your .env file contains the correct values")
    print("2. Check an inequality: python -m starnet verify --n 2 --m 3")
    print("3. Run the MCP server: python -m starnet serve")


def update_env_value(key, value):
    """Update a specific value in the .env file."""
    if not os.path.exists(ENV_FILE):
        return False

    with open(ENV_FILE, 'r') as f:
        lines = f.readlines()

    updated = False
    for i, line in enumerate(lines):
        if line.startswith(f'{key}='):
            lines[i] = f'{key}={value}\n'
            updated = True
            break

    with open(ENV_FILE, 'w') as f:
        f.writelines(lines)

    if updated:
        print(f"✅ Updated {key}")
    else:
        print(f"⚠️  Could not find {key} in .env file")
    return updated


def show_current_config():
    """Show the current configuration values."""
    if not os.path.exists(ENV_FILE):
        print("❌ .env file not found!")
        print("Run this script to create one.")
        return

    print("📋 Current configuration:")
    print()

    with open(ENV_FILE, 'r') as f:
        for line in f:
            line = line.strip()
            if line and not line.startswith('#'):
                print(line)


if __name__ == "__main__":
    import sys

    if len(sys.argv) > 1 and sys.argv[1] == 'show':
        show_current_config()
    else:
        setup_environment()
