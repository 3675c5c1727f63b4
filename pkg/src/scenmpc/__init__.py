"""scenmpc: exact NMPC for input-affine systems with diagonal state-dependent
input gains, via enumeration of convex constraint scenarios."""

__version__ = "0.1.0"
