"""Wire protocol behavior through the ASGI test client."""

import numpy as np
import pytest
from fastapi.testclient import TestClient

from patenteb_provider.app import MAX_BATCH, create_app
from patenteb_provider.encoder import TransformerEncoder


@pytest.fixture(scope="module")
def client():
    encoder = TransformerEncoder(n_layers=3, dim=32, n_heads=4, seed=5)
    return TestClient(create_app(encoder=encoder))


class TestInfo:
    def test_capability_document(self, client):
        info = client.get("/info").json()
        assert info["dim"] == 32
        assert info["max_layers"] == 3
        assert info["max_tokens"] >= 512
        assert info["name"]


class TestEmbed:
    def test_order_and_shape(self, client):
        payload = {"texts": ["alpha", "beta", "gamma"], "layer_cap": None}
        body = client.post("/embed", json=payload).json()
        assert body["dim"] == 32
        assert body["normalized"] is True
        assert len(body["vectors"]) == 3
        single = client.post("/embed", json={"texts": ["beta"]}).json()
        assert body["vectors"][1] == single["vectors"][0]

    def test_unit_norm_within_tolerance(self, client):
        body = client.post("/embed", json={"texts": ["x y z", ""]}).json()
        for row in body["vectors"]:
            assert abs(np.linalg.norm(row) - 1.0) <= 1e-3

    def test_identical_requests_identical_vectors(self, client):
        payload = {"texts": ["splined shaft coupling"]}
        a = client.post("/embed", json=payload).json()
        b = client.post("/embed", json=payload).json()
        assert a == b

    def test_layer_cap_max_equals_uncapped(self, client):
        texts = {"texts": ["impeller housing"]}
        uncapped = client.post("/embed", json=texts).json()
        capped = client.post("/embed", json={**texts, "layer_cap": 3}).json()
        assert uncapped["vectors"] == capped["vectors"]

    def test_bad_layer_cap_is_400(self, client):
        assert client.post("/embed", json={"texts": ["x"], "layer_cap": 0}).status_code == 400
        assert client.post("/embed", json={"texts": ["x"], "layer_cap": 9}).status_code == 400

    def test_empty_texts_is_400(self, client):
        assert client.post("/embed", json={"texts": []}).status_code == 400

    def test_oversize_batch_is_413(self, client):
        payload = {"texts": ["t"] * (MAX_BATCH + 1)}
        assert client.post("/embed", json=payload).status_code == 413

    def test_prompt_sensitivity(self, client):
        probe = "heat exchanger manifold"
        prompts = (
            "encode query for same document retrieval:",
            "encode document for same retrieval:",
        )
        rows = client.post(
            "/embed", json={"texts": [f"{p} {probe}" for p in prompts]}
        ).json()["vectors"]
        cosine = float(np.dot(rows[0], rows[1]))
        assert cosine < 1.0 - 1e-6  # prompts reach the encoder
