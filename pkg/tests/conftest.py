import dataclasses

import pytest

from uowc_sc.channel import TURBULENCE_PRESETS, make_channel
from uowc_sc.diversity import ApertureArray
from uowc_sc.metrics import MODULATION_PRESETS

PAPER_PRESETS = ("weak", "moderate-a", "moderate-b", "strong")


@pytest.fixture
def bpsk():
    return MODULATION_PRESETS["bpsk"]


@pytest.fixture
def dpsk():
    return MODULATION_PRESETS["dpsk"]


def iid(preset="strong", n=1, snr_db=30.0, **kw):
    return ApertureArray.identical(make_channel(preset, snr_db, **kw), n)


def omega0(preset="strong"):
    return dataclasses.replace(TURBULENCE_PRESETS[preset], omega=0.0)


# lines printed by the acceptance criteria, repeated after the test run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
