"""Regenerate the demo witness instance shipped in demos/.

The instance bundles a 3-output trace-linear map, a diagonal tuple, a short
random pinching chain and a Haar unitary, so that

    lrange witness --in demos/witness_demo.json

succeeds at the default tolerance.  Everything is seeded, so rerunning this
script reproduces the file byte for byte.
"""

import argparse
import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from lrange import (
    chain_witness,
    haar_unitary,
    random_chain,
    random_diagonal_tuple,
    random_hermitian_tuple,
)
from lrange.core import LinearMapSpec
from lrange.jsonio import (
    canonical_json,
    encode_diagonal_tuple,
    encode_linear_map,
    encode_matrix,
    encode_pinch_chain,
)

N, M, L = 4, 2, 3


def build_payload(seed: int) -> dict:
    rows = [random_hermitian_tuple(N, M, seed + 101 * k) for k in range(L)]
    spec = LinearMapSpec(
        tuple(tuple(row.items[i] for i in range(M)) for row in rows)
    )
    d = random_diagonal_tuple(N, M, seed + 7)
    chain = random_chain(N, 2, seed + 13)
    u = haar_unitary(N, seed + 29)

    # Fail loudly if the bundled instance were ever unwitnessable.
    w = chain_witness(d, spec, chain, u, tol=1e-6)
    print(f"chain of {len(chain)} pinchings, residual {w.residual:.3e}")

    return {
        "l": encode_linear_map(spec),
        "d": encode_diagonal_tuple(d),
        "chain": encode_pinch_chain(chain),
        "u": encode_matrix(u.mat),
    }


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=2024)
    parser.add_argument(
        "--out",
        default=str(
            pathlib.Path(__file__).resolve().parents[1]
            / "demos"
            / "witness_demo.json"
        ),
    )
    args = parser.parse_args()

    payload = build_payload(args.seed)
    out = pathlib.Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(canonical_json(payload), encoding="utf-8")
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
