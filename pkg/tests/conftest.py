import pytest

from sirsfold.acceptance import shipped_params


@pytest.fixture(params=["fold", "cond1", "cond2", "endemic"])
def shipped(request):
    return shipped_params(request.param)
