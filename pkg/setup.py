#!/usr/bin/env python3
"""
Setup script for Special Circles
Uses pyproject.toml for configuration
"""

from setuptools import setup

if __name__ == "__main__":
    setup()
