"""From a raw in-window count to a defensible untagged-bit fraction.

The two-threshold analyzer reports only how many of M pulses fell inside
[m1, m2].  Turning that count into a security statement takes two steps:
an exact Clopper-Pearson lower bound on the window-hit probability, and a
noise correction that accounts for dark counts (Poissonian) or electronic
noise (Gaussian) pushing out-of-window pulses into the window.
"""

from passiveqkd import (
    ThresholdWindow,
    clopper_pearson,
    gaussian_b123,
    poisson_b,
    poisson_bbar,
    untagged_lower_bound_gaussian,
    untagged_lower_bound_poisson,
)

M = 10**8
k_prime = 99_992_000
alpha = 1e-6

cp = clopper_pearson(k_prime, M, alpha)
print(f"observed: {k_prime} of {M} pulses in window, confidence level {cp.level}")
print(f"window-hit probability >= {cp.lower:.8f}\n")

w = ThresholdWindow(9_900_000.0, 10_100_000.0)

sigma2 = 1e8
b1, b2, b3 = gaussian_b123(w, sigma2)
res_g = untagged_lower_bound_gaussian(cp.lower, w, sigma2)
print(f"Gaussian noise, sigma^2 = {sigma2:g}:")
print(f"  b1 = {b1:.6f}, b2 = {b2:.6f}, b3 = {b3:.6f}")
print(f"  untagged fraction >= {res_g.value:.8f}  (degenerate: {res_g.degenerate})\n")

# The Poissonian correction only carries information while the window is
# narrow compared with the dark-count spread: otherwise a below-threshold
# pulse plus noise fills the window just as reliably as an in-window one.
gamma = 1e4
for m1, m2 in [(9_999_950.0, 10_000_050.0), (9_900_000.0, 10_100_000.0)]:
    wp = ThresholdWindow(m1, m2)
    bbar = poisson_bbar(wp, gamma)
    b = poisson_b(int(m2), gamma)
    res_p = untagged_lower_bound_poisson(cp.lower, wp, gamma)
    print(f"Poissonian noise, gamma = {gamma:g}, window width {wp.width:g}:")
    print(f"  leakage bound bbar = {bbar:.6f}, in-window cap b = {b:.6f}")
    print(f"  untagged fraction >= {res_p.value:.8f}  (degenerate: {res_p.degenerate})\n")
