"""Train neural networks on disjoint datasets and aggregate them.

Three aggregation strategies are exposed alongside a data-sharing baseline:
element-wise weight averaging (optionally size- or balance-weighted), series
composition with frozen expert networks, and sequential transfer training.
"""

from nnagg._core import *  # noqa: F401,F403
from nnagg._core import __doc__ as _core_doc  # noqa: F401

__version__ = "0.1.0"
