import warnings

import zins.api as zins
from zins.errors import TruncationWarning

# the library holds a ready-made specification of the two-regime example
spec = zins.model.library.sigmoid_two_regime

# before simulating anything, check the standing assumptions. this never
# raises, but gives us one line per check
report = zins.validate_assumptions(spec)
print(report)

# the truncation policy needs a function mu dominating drift and diffusion,
# and psi(delta) = delta^-q. with q = 2/3 the growth condition
# delta^(1/4)·psi(delta) <= 1 is violated, and we will be warned about it
policy = zins.make_policy(spec, psi_exponent=2 / 3, mu="quadratic")
print(f"largest admissible step size {policy.delta_star:.5f}")
print("band at Δ = 0.001:", policy.band(1e-3, warn=False))

# each path owns its random streams, keyed by the master seed and the index
# of the path. simulating path 7 of seed 1 always gives the same trajectory,
# regardless of what else was simulated before
with warnings.catch_warnings():
    warnings.simplefilter("ignore", TruncationWarning)
    state = zins.simulate_tem_path(spec, policy, 1e-3, 2.0, zins.PathStream(1, 7))
print(f"x(T) = {state.terminal[0]:.6f} after {state.grid.K} steps")
# the step process can be evaluated at any time in [-τ, T]
print("x at t = 0.5, 1.0, 1.5:", state.step_value([0.5, 1.0, 1.5])[0])

# the regime chain is part of the model, with its own stream
print("time spent in regime 2:", (state.regimes[0] == 2).mean())

# Monte Carlo estimators draw many paths in batches on a thread pool. the
# result only depends on the seed, not on the number of threads
clock = zins.Clock()
bond = zins.bond_price(spec, policy, 1e-3, 1.0, num_paths=500, seed=1)
low, high = bond.confidence_95
print(f"bond price {bond.estimate:.5f} in [{low:.5f}, {high:.5f}], took {clock.tick():.1f}s")

barrier = zins.barrier_option_price(
    spec, policy, 1e-3, 1.0, strike=0.03, barrier=1.0, num_paths=500, seed=1
)
print(f"barrier option {barrier.estimate:.5f} ± {barrier.std_error:.5f}")

# the strong convergence study compares coarse paths against a fine
# reference driven by the same noise. without the inverse drift, the
# fitted order should come out close to one half
plain = zins.model.library.sigmoid_two_regime_no_inverse
plain_policy = zins.make_policy(plain, psi_exponent=0.25, mu="auto")
report = zins.strong_error(
    plain,
    plain_policy,
    deltas=[2.0 ** -k for k in range(7, 11)],
    reference_delta=2.0 ** -13,
    horizon=1.0,
    num_paths=200,
    seed=1,
)
for delta, error, std_error in report.rows():
    print(f"Δ = {delta:.6f}: {error:.5f} ± {std_error:.5f}")
print(f"fitted order {report.fitted_order:.3f}, took {clock.tick():.1f}s")
