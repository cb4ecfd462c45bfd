"""Link-level simulator for sparse-pattern unsourced random access over the
real Gaussian multiple access channel.

Pipeline: message bits pick a chunk, a sparse position pattern, and a coded
payload (``encoder``); all users superpose on the channel (``gmac_channel``);
the receiver screens patterns, iterates a Gaussian-approximation multi-user
detector against a belief-propagation channel decoder (``ga_mud``,
``channel_code``), and cancels recovered users (``sic_receiver``).  An
analytical planner (``power_division``) shapes per-group transmit powers,
and ``harness`` estimates per-user error rates over seeded Monte Carlo
trials.
"""

from .config import SystemConfig, profile, profile_names

__all__ = ["SystemConfig", "profile", "profile_names"]
__version__ = "0.1.0"
