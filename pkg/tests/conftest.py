import pytest

from circleverify.sieve import build_prime_table


@pytest.fixture(scope="session")
def table():
    """Primes to 10**6: covers every window and series cutoff used in the tests."""
    return build_prime_table(10 ** 6)


@pytest.fixture(scope="session")
def small_table():
    return build_prime_table(10 ** 4)


_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def acceptance(request):
    """Record ``(criterion, ok, detail)`` for the summary printed after the run."""
    store = request.config.stash.setdefault(_ACCEPTANCE, {})

    def record(k, ok, detail):
        store[k] = (bool(ok), detail)
        print(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")

    return record


def pytest_terminal_summary(terminalreporter, config):
    store = config.stash.get(_ACCEPTANCE, {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(store):
        ok, detail = store[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
