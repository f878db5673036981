"""Throwaway backend instance for the frontend end-to-end tests.

Runs the real service against the bundled pet clinic pricing with an
in-memory store, demo mode on so the tests can fetch the verification
key. Port comes from argv, secrets from the environment.
"""

import os
import sys

import uvicorn

from pricegate import MemoryStore
from pricegate.fixtures import petclinic
from pricegate.service import create_app


def main() -> None:
    port = int(sys.argv[1])
    app = create_app(
        petclinic(),
        store=MemoryStore(),
        token_key=os.environ["E2E_TOKEN_KEY"].encode("utf-8"),
        admin_token=os.environ["E2E_ADMIN_TOKEN"],
        token_ttl_seconds=300,
        demo_mode=True,
    )
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")


if __name__ == "__main__":
    main()
