"""Compare the compiled and numpy moment kernels.

Run with ``python3 benchmarks/bench_kernels.py``.  Each case is timed with
``timeit`` (best of five repeats) on both backends, and the results are
checked to agree before timing.
"""

import argparse
import timeit
from contextlib import contextmanager

import numpy as np

from phasesens import kernels
from phasesens.detection import DetectionScheme, observable
from phasesens.interferometer import input_state
from phasesens.sensitivity import SqueezeRegime, config_for, optimize_displacement, table1


@contextmanager
def backend(name):
    impl = kernels.load_backend(name)
    saved = kernels.quadratic_moments, kernels.phase_curve
    kernels.quadratic_moments, kernels.phase_curve = impl.quadratic_moments, impl.phase_curve
    try:
        yield impl
    finally:
        kernels.quadratic_moments, kernels.phase_curve = saved


def _case_args(two_arm):
    regime = SqueezeRegime.TWO_ARM_R0 if two_arm else SqueezeRegime.SINGLE_ARM
    cfg = config_for(10, regime, 4.0)
    st = input_state(cfg)
    obs = observable(cfg, DetectionScheme.THRESHOLD)
    return st, obs, two_arm


def cases():
    for two_arm in (False, True):
        st, obs, flag = _case_args(two_arm)
        tag = "two-arm" if two_arm else "single-arm"
        yield f"moments, one call ({tag})", lambda k, st=st, obs=obs: k.quadratic_moments(
            st.mean, st.cov, obs.c0, obs.c, obs.M
        )
        for n in (1, 101, 10001):
            phis = np.linspace(-0.7, 0.7, n)
            yield f"curve, {n} points ({tag})", lambda k, st=st, obs=obs, phis=phis, flag=flag: k.phase_curve(
                st.mean, st.cov, obs.c0, obs.c, obs.M, phis, flag
            )


def time_call(fn, repeat=5):
    timer = timeit.Timer(fn)
    number, _ = timer.autorange()
    return min(timer.repeat(repeat, number)) / number


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--skip-pipeline", action="store_true", help="only time the kernels")
    args = parser.parse_args(argv)

    names = kernels.available_backends()
    if "cython" not in names:
        print("compiled backend not built; only the numpy kernels are available")
    impls = {n: kernels.load_backend(n) for n in names}

    print(f"{'case':40s}" + "".join(f"{n:>14s}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, fn in cases():
        results = [fn(impls[n]) for n in names]
        for other in results[1:]:
            for a, b in zip(results[0], other):
                np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)
        times = [time_call(lambda: fn(impls[n])) for n in names]
        line = f"{label:40s}" + "".join(f"{t * 1e6:12.2f}us" for t in times)
        if len(times) > 1:
            line += f"{times[1] / times[0]:11.1f}x"
        print(line)

    if args.skip_pipeline:
        return
    print()
    for label, fn in (
        ("optimize alpha^2 (two-arm R=0, N=50)",
         lambda: optimize_displacement(50, SqueezeRegime.TWO_ARM_R0, DetectionScheme.THRESHOLD)),
        ("full table at N=10", lambda: table1(10)),
    ):
        times = []
        for n in names:
            with backend(n):
                times.append(min(timeit.repeat(fn, number=1, repeat=3)))
        line = f"{label:40s}" + "".join(f"{t * 1e3:12.2f}ms" for t in times)
        if len(times) > 1:
            line += f"{times[1] / times[0]:11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
