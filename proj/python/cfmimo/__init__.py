# Copyright 2026 The cfmimo Authors
# SPDX-License-Identifier: Apache-2.0
"""Uplink cell-free MIMO spectral efficiency and precoder optimization."""

try:
    from ._cfmimo import *  # noqa: F401,F403
    from ._cfmimo import __version__  # noqa: F401
except ImportError:  # in-tree build: extension sits next to the package
    from _cfmimo import *  # noqa: F401,F403
    from _cfmimo import __version__  # noqa: F401
