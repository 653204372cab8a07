"""Run the provider: ``patenteb-provider`` or ``python -m patenteb_provider``.

PROVIDER_PORT and PROVIDER_MODEL configure the listener and the encoder spec.
"""

from __future__ import annotations

import argparse
import os

import uvicorn

from .app import create_app


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="patenteb-provider")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=int(os.environ.get("PROVIDER_PORT", "8765")))
    parser.add_argument("--model", default=os.environ.get("PROVIDER_MODEL"))
    args = parser.parse_args(argv)
    uvicorn.run(create_app(model_spec=args.model), host=args.host, port=args.port, log_level="warning")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
