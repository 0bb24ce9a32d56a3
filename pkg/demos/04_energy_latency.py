#!/usr/bin/env python3
"""Energy and latency accounting of the analog filter array.

Reproduces the headline figures for the default configuration (3.3 V supply,
100 nA per node, 9 nodes, 0.5 us settling, 28x28 frame): 2.97 uW, 392 us and
1.16 nJ per convolution, comfortably inside the 42 ms real-time budget.
"""

from flexdog import PerfSpec, energy, power, realtime_check, runtime

spec = PerfSpec()
for m, n in [(28, 28), (64, 64), (256, 256), (1000, 1000)]:
    t = runtime(m, n, spec)
    e = energy(m, n, spec)
    print(f"{m:5d}x{n:<5d} power {power(spec) * 1e6:6.3f} uW | "
          f"runtime {t * 1e3:10.4f} ms | energy {e * 1e9:10.3f} nJ | "
          f"realtime {realtime_check(t)}")

# A fully parallel array finishes any frame in one settling period.
parallel = PerfSpec(parallelism=28 * 28)
print(f"\nfully parallel 28x28: {runtime(28, 28, parallel) * 1e6:.2f} us "
      "(power accounting still bills a single filter block by default)")

# Larger kernels scale power with the node count (2P+1)^2.
for p in (1, 2, 3):
    spec_p = PerfSpec(node_count=(2 * p + 1) ** 2)
    print(f"P={p}: {power(spec_p) * 1e6:.2f} uW")
