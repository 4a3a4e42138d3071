import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from quadkit.gateway import Gateway, ScriptedProvider

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def fixture_text(name: str) -> str:
    with open(os.path.join(FIXTURES, name)) as fh:
        return fh.read()


def make_gateway(entries, log_path=None) -> Gateway:
    """Gateway over an in-memory scripted transcript.

    ``entries`` is a list of (template_id, response) pairs in consumption order.
    """
    records = [{"template_id": t, "response": r} for t, r in entries]
    return Gateway(ScriptedProvider(records), log_path=log_path)


@pytest.fixture
def scripted():
    return make_gateway
