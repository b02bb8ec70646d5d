import pytest
from fastapi.testclient import TestClient

from embedsvc.app import create_app
from embedsvc.models import HashedModel


@pytest.fixture
def app():
    return create_app([HashedModel(dimension=32)], batch_cap=8)


@pytest.fixture
def client(app):
    with TestClient(app) as c:
        yield c
