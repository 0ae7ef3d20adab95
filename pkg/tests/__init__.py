import unittest  # noqa: D104

import pytest

__all__ = [
    "pytest",
    "unittest",
]
