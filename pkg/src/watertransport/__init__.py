"""Water transport on graphs: averaging dynamics, peak-level solvers,
distribution reproduction and the satisfiability reduction."""

__version__ = "0.1.0"
