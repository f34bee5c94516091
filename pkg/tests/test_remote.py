"""Remote solver client against a local reference implementation of the
wire protocol."""

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np
import pytest

from hiqlip import SolverConfig, SolverError, cut_norm_inf1, solve
from oracles import random_coupling_problem


class _ReferenceSolverHandler(BaseHTTPRequestHandler):
    """Exhaustive reference solver speaking the /v1/solve protocol."""

    corrupt_energy = False

    def do_POST(self):
        if self.path != "/v1/solve":
            self.send_response(404)
            self.end_headers()
            return
        length = int(self.headers["Content-Length"])
        req = json.loads(self.rfile.read(length))
        n = req["num_vars"]
        h = np.zeros(n)
        for i, v in req.get("linear", []):
            h[i] = v
        J = np.zeros((n, n))
        for i, j, v in req.get("quadratic", []):
            J[i, j] = v
            J[j, i] = v
        best_e, best_s = np.inf, None
        for code in range(1 << n):
            s = np.array([1.0 if (code >> t) & 1 else -1.0 for t in range(n)])
            e = float(-0.5 * s @ (J @ s) - h @ s)
            if e < best_e:
                best_e, best_s = e, s
        if self.corrupt_energy:
            best_e += 1.0
        body = json.dumps({
            "assignments": [[int(v) for v in best_s]],
            "energies": [best_e],
        }).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):  # keep pytest output clean
        pass


@pytest.fixture
def reference_server():
    _ReferenceSolverHandler.corrupt_energy = False
    server = ThreadingHTTPServer(("127.0.0.1", 0), _ReferenceSolverHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}"
    server.shutdown()
    thread.join(timeout=5)


def remote_cfg(endpoint, **kw):
    return SolverConfig(backend="remote", remote_endpoint=endpoint, **kw)


class TestRemoteBackend:
    def test_matches_exhaustive(self, reference_server):
        rng = np.random.default_rng(0)
        for k in range(5):
            prob = random_coupling_problem(rng, 8, with_fields=(k % 2 == 0))
            e_local = solve(prob, SolverConfig(backend="exhaustive", seed=0)).energy
            e_remote = solve(prob, remote_cfg(reference_server)).energy
            assert e_remote == pytest.approx(e_local, rel=1e-9)

    def test_pinned_folded_before_dispatch(self, reference_server):
        prob_kwargs = dict(n_vars=3, couplings={(0, 1): 1.0, (1, 2): -2.0}, pinned={0: -1})
        from hiqlip import CouplingProblem

        prob = CouplingProblem(**prob_kwargs)
        asn = solve(prob, remote_cfg(reference_server))
        assert asn.spins[0] == -1
        e_local = solve(prob, SolverConfig(backend="exhaustive", seed=0)).energy
        assert asn.energy == pytest.approx(e_local, rel=1e-9)

    def test_cut_norm_via_remote(self, reference_server):
        A = np.array([[1.0, -2.0], [0.5, 1.5]])
        v_remote = cut_norm_inf1(A, remote_cfg(reference_server)).value
        v_local = cut_norm_inf1(A, SolverConfig(backend="exhaustive", seed=0)).value
        assert v_remote == pytest.approx(v_local, rel=1e-9)

    def test_energy_mismatch_rejected(self, reference_server):
        _ReferenceSolverHandler.corrupt_energy = True
        rng = np.random.default_rng(1)
        prob = random_coupling_problem(rng, 6)
        with pytest.raises(SolverError, match="mismatch"):
            solve(prob, remote_cfg(reference_server))

    def test_unreachable_endpoint(self):
        rng = np.random.default_rng(2)
        prob = random_coupling_problem(rng, 4)
        with pytest.raises(SolverError, match="unreachable"):
            solve(prob, remote_cfg("http://127.0.0.1:9", timeout_ms=1000))

    def test_missing_endpoint(self):
        rng = np.random.default_rng(3)
        prob = random_coupling_problem(rng, 4)
        with pytest.raises(SolverError, match="endpoint"):
            solve(prob, SolverConfig(backend="remote"))
