import pytest
from hypothesis import settings

from qinstanton.scalar import PMode

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(params=list(PMode), ids=lambda m: m.value)
def mode(request):
    return request.param
