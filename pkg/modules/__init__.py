"""Domain packages: SBL solvers, signal generation and the benchmark harness."""
