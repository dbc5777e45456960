"""
Benchmark entry point.

    python bench.py run --quick --out runtime/results/quick.csv
    python bench.py demo --class homogeneous --snr 20
"""

from modules.bench.cli import cli

if __name__ == "__main__":
    cli()
