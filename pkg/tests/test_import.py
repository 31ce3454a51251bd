"""Test importing the module."""

import gentlenet as gn


def test_import_package():
    assert gn
    assert gn.lamp.ORIGIN.position == 0
