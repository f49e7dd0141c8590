"""Private information of a lossy bosonic channel with a correlated (memory) environment."""

__version__ = "0.1.0"

from bpriv.channel import ChannelParams, GaussianState, InputPolicy  # noqa: E402
from bpriv.privacy import PrivacyReport, maximize_over_r, private_information  # noqa: E402

__all__ = [
    "ChannelParams",
    "GaussianState",
    "InputPolicy",
    "PrivacyReport",
    "maximize_over_r",
    "private_information",
]
