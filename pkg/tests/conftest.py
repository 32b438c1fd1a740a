import pytest

from mellinsurv.risk import oracle_comparison, run_experiment


class ExperimentCache:
    """Runs each Monte Carlo configuration at most once per test session."""

    def __init__(self):
        self._runs = {}

    def mise(self, spec):
        key = ("mise", spec)
        if key not in self._runs:
            self._runs[key] = run_experiment(spec, threads=1)
        return self._runs[key]

    def oracle(self, spec):
        key = ("oracle", spec)
        if key not in self._runs:
            self._runs[key] = oracle_comparison(spec, threads=1)
        return self._runs[key]


@pytest.fixture(scope="session")
def experiments():
    return ExperimentCache()
