"""HTTP service wrapping the simulator (sessions, episodes, maps, bench)."""

from .app import app, create_app

__all__ = ["app", "create_app"]


def main() -> None:  # pragma: no cover - thin uvicorn launcher
    import argparse

    import uvicorn

    parser = argparse.ArgumentParser(description="Run the swarmpath service")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8717)
    args = parser.parse_args()
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")


if __name__ == "__main__":  # pragma: no cover
    main()
