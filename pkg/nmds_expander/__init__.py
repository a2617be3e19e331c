"""
Mixed-alphabet nearly-MDS expander codes

Build a subfield tower, a regular bipartite graph and a good edge assignment,
assemble the expander code on top of them, then measure its rate, distance
and decoder behaviour against the closed-form bounds. `nmds --help` lists the
command-line entry points.
"""

__version__ = "1.0.0"
