#!/usr/bin/env python3
"""Walkthrough of the digital Difference-of-Gaussian reference path.

Builds the two Gaussian kernels of the default scale pair, filters a binary
step edge, and shows why the analog accelerator is worth building: the
multiply/add budget of the naive digital convolution.
"""

import numpy as np

from flexdog import IntensityImage, convolve_valid, dog, make_gaussian_kernel, op_count

# The 3x3 kernel pair: sigma1 = 0.85 captures >90% of the Gaussian mass in a
# 3x3 window; sigma2 = sqrt(2) * sigma1 is the standard scale-space step.
sigma1 = 0.85
k1 = make_gaussian_kernel(sigma1, half_width=1, normalize=True)
k2 = make_gaussian_kernel(sigma1 * np.sqrt(2), half_width=1, normalize=True)

print("narrow kernel (sigma=%.3f):" % k1.sigma)
print(np.array2string(k1.weights, precision=4))
print("wide kernel (sigma=%.3f):" % k2.sigma)
print(np.array2string(k2.weights, precision=4))

# A binary vertical step edge, the cleanest test pattern for a band-pass filter.
pixels = np.zeros((12, 12))
pixels[:, 6:] = 1.0
image = IntensityImage(pixels)

blurred = convolve_valid(image, k1)
print("\nblurred step edge, middle row:")
print(np.array2string(blurred.values[5], precision=4))

d = dog(image, k1, k2)
print("\nDoG response, middle row (sign change marks the edge):")
print(np.array2string(d.values[5], precision=4))

# Cost of doing the same thing digitally, per the op-count model.
for m, p in [(28, 1), (128, 1), (512, 2)]:
    oc = op_count(m, m, p)
    print(f"\n{m}x{m} image, P={p}: {oc.multiplications:,} multiplies, "
          f"{oc.additions:,} additions per convolution")
