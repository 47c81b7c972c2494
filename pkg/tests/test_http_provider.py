"""HTTP face-service client tests against a local stub server."""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from namegraft.errors import ProviderError
from namegraft.providers import fetch_faces_http

GOOD_BODY = {"faces": [{"name": "Obama", "box": [50, 30, 80, 100], "confidence": 0.97}]}


class StubHandler(BaseHTTPRequestHandler):
    """Behavior keyed by the requested image_id; counts every request."""

    server_version = "FaceStub/1.0"

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        payload = json.loads(self.rfile.read(length) or b"{}")
        image_id = payload.get("image_id", "")
        self.server.requests.append((self.path, image_id))

        if self.path != "/identify":
            self._reply(404, {"error": "not found"})
        elif image_id == "ok":
            self._reply(200, GOOD_BODY)
        elif image_id == "always-500":
            self._reply(500, {"error": "boom"})
        elif image_id == "flaky":
            # fail twice, then succeed
            n = sum(1 for _, i in self.server.requests if i == "flaky")
            if n <= 2:
                self._reply(500, {"error": "try again"})
            else:
                self._reply(200, GOOD_BODY)
        elif image_id == "not-json":
            self._reply_raw(200, b"this is not json")
        elif image_id == "missing-faces":
            self._reply(200, {"results": []})
        elif image_id == "bad-face":
            self._reply(200, {"faces": [{"name": "X", "box": [0, 0, 5], "confidence": 0.5}]})
        elif image_id == "out-of-bounds":
            self._reply(200, {"faces": [
                {"name": "X", "box": [200, 0, 100, 50], "confidence": 0.5}]})
        else:
            self._reply(200, {"faces": []})

    def _reply(self, status, obj):
        self._reply_raw(status, json.dumps(obj).encode("utf-8"))

    def _reply_raw(self, status, body):
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


@pytest.fixture()
def stub_server():
    server = ThreadingHTTPServer(("127.0.0.1", 0), StubHandler)
    server.requests = []
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield server, f"http://127.0.0.1:{server.server_address[1]}"
    finally:
        server.shutdown()
        thread.join(timeout=5)


FAST = dict(timeout=5.0, backoff=0.01)


class TestFetchFacesHttp:
    def test_happy_path(self, stub_server):
        server, endpoint = stub_server
        faces = fetch_faces_http(endpoint, "ok", image_width=224, image_height=224, **FAST)
        assert len(faces) == 1
        assert faces[0].name == "Obama"
        assert (faces[0].box.x, faces[0].box.y) == (50, 30)
        assert server.requests == [("/identify", "ok")]

    def test_retry_then_fail_after_three_attempts(self, stub_server):
        server, endpoint = stub_server
        with pytest.raises(ProviderError) as err:
            fetch_faces_http(endpoint, "always-500", **FAST)
        assert len(server.requests) == 3
        assert "HTTP 500" in str(err.value)
        assert err.value.image_id == "always-500"
        assert err.value.endpoint == endpoint

    def test_retry_then_succeed(self, stub_server):
        server, endpoint = stub_server
        faces = fetch_faces_http(endpoint, "flaky", **FAST)
        assert len(faces) == 1
        assert len(server.requests) == 3

    def test_invalid_body_fails_immediately(self, stub_server):
        server, endpoint = stub_server
        with pytest.raises(ProviderError, match="invalid body"):
            fetch_faces_http(endpoint, "not-json", **FAST)
        assert len(server.requests) == 1

    def test_missing_faces_key(self, stub_server):
        _, endpoint = stub_server
        with pytest.raises(ProviderError, match="missing 'faces'"):
            fetch_faces_http(endpoint, "missing-faces", **FAST)

    def test_malformed_face_entry(self, stub_server):
        _, endpoint = stub_server
        with pytest.raises(ProviderError, match="invalid body"):
            fetch_faces_http(endpoint, "bad-face", **FAST)

    def test_box_bounds_checked_when_dims_given(self, stub_server):
        _, endpoint = stub_server
        with pytest.raises(ProviderError, match="exceeds image bounds"):
            fetch_faces_http(endpoint, "out-of-bounds",
                             image_width=224, image_height=224, **FAST)

    def test_box_bounds_ignored_without_dims(self, stub_server):
        _, endpoint = stub_server
        faces = fetch_faces_http(endpoint, "out-of-bounds", **FAST)
        assert len(faces) == 1

    def test_unreachable_endpoint(self):
        with pytest.raises(ProviderError, match="request failed"):
            fetch_faces_http("http://127.0.0.1:1", "ok", timeout=0.2, backoff=0.01)
