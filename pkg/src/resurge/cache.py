"""Content-addressed disk cache for kernel tables.

Entries are pickles named by a hash of everything that determines the
table.  Deleting the directory is always safe.
"""

import hashlib
import json
import os
import pickle
from pathlib import Path

ENV_VAR = "RESURGE_CACHE_DIR"


def cache_dir(default=None):
    """Directory from RESURGE_CACHE_DIR, else ``default`` (None disables caching)."""
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path(default) if default is not None else None


class KernelCache:
    def __init__(self, root):
        self.root = Path(root)
        self.hits = 0
        self.misses = 0

    @staticmethod
    def key(germ_digest, alpha, D, prec, M_xi, M_t, tol):
        payload = json.dumps({"germ": germ_digest, "alpha": alpha, "D": D, "prec": prec,
                              "M_xi": repr(M_xi), "M_t": repr(M_t), "tol": repr(tol)}, sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:32]

    def _file(self, key):
        return self.root / "kernels" / f"{key}.pkl"

    def get(self, key):
        p = self._file(key)
        if not p.exists():
            self.misses += 1
            return None
        try:
            with open(p, "rb") as fh:
                state = pickle.load(fh)
        except (OSError, pickle.UnpicklingError, EOFError):
            self.misses += 1
            return None
        self.hits += 1
        return state

    def put(self, key, state):
        p = self._file(key)
        p.parent.mkdir(parents=True, exist_ok=True)
        tmp = p.with_suffix(".tmp")
        with open(tmp, "wb") as fh:
            pickle.dump(state, fh, protocol=pickle.HIGHEST_PROTOCOL)
        os.replace(tmp, p)
