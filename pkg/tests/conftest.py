import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qfleet.worker import WorkerDaemon  # noqa: E402


@pytest.fixture
def daemon_factory():
    """Spin up in-process worker daemons; stop them all at teardown."""
    daemons = []

    def make(**kwargs) -> WorkerDaemon:
        daemon = WorkerDaemon(**kwargs)
        daemon.start()
        daemons.append(daemon)
        return daemon

    yield make
    for daemon in daemons:
        daemon.stop()


@pytest.fixture
def daemon(daemon_factory):
    return daemon_factory()
