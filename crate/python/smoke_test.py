"""Smoke test for the Python bindings.

Uses an installed `crashgather_py` module if there is one, otherwise loads the
library built by `cargo build -p crashgather-py --release --features extension-module`.
"""

import importlib.machinery
import importlib.util
import json
import pathlib
import sys


def load():
    try:
        import crashgather_py

        return crashgather_py
    except ImportError:
        pass
    root = pathlib.Path(__file__).resolve().parent.parent
    for profile in ("release", "debug"):
        lib = root / "target" / profile / "libcrashgather_py.so"
        if lib.exists():
            loader = importlib.machinery.ExtensionFileLoader("crashgather_py", str(lib))
            spec = importlib.util.spec_from_file_location("crashgather_py", lib, loader=loader)
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            return module
    sys.exit("crashgather_py not found; build it first")


def main():
    cg = load()
    names = cg.bundled_names()
    assert "ssync_n3_f2" in names, names

    for name in names:
        cg.validate(cg.bundled_scenario(name))

    result = json.loads(cg.run_scenario(cg.bundled_scenario("ssync_n3_f2")))
    assert result["outcome"]["status"] == "gathered", result["outcome"]
    assert result["expectation_met"]
    assert all(c["pass"] for c in result["checks"]["checks"] if c["applicable"])

    again = json.loads(cg.run_scenario(cg.bundled_scenario("ssync_n3_f2")))
    assert again == result

    events = result["trace"]["events"]
    jsonl = "\n".join(json.dumps(e) for e in events)
    frames = cg.render(jsonl, 3)
    assert len(frames) == -(-len(events) // 3)
    assert frames[0].startswith("<svg")
    assert cg.render("", 1) == []

    try:
        cg.validate("{ not json")
    except ValueError:
        pass
    else:
        raise AssertionError("malformed scenario accepted")

    print(f"ok: {len(names)} bundled scenarios, {len(events)} events, {len(frames)} frames")


if __name__ == "__main__":
    main()
