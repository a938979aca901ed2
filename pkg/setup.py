#!/usr/bin/env python3
# This is a minimal setup.py file that delegates to pyproject.toml

from setuptools import setup

if __name__ == "__main__":
    setup() 