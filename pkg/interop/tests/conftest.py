import re
import shutil
import subprocess
import time

import pytest

DYNABUF = shutil.which("dynabuf")
INTEROP = shutil.which("dynabuf-interop")


def require_clis():
    if not DYNABUF or not INTEROP:
        pytest.skip("dynabuf and dynabuf-interop must be installed")


@pytest.fixture(scope="session")
def service_url():
    """A dynabuf service subprocess on an ephemeral port."""
    require_clis()
    proc = subprocess.Popen([DYNABUF, "serve", "--port", "0"],
                            stdout=subprocess.PIPE, stderr=subprocess.STDOUT,
                            text=True)
    try:
        line = proc.stdout.readline()
        match = re.search(r"http://([\d.]+):(\d+)", line)
        assert match, f"could not read bound address from: {line!r}"
        url = f"http://{match.group(1)}:{match.group(2)}"
        deadline = time.time() + 10
        while time.time() < deadline:
            probe = subprocess.run(
                [INTEROP, "fetch", "--base-url", url, "animals"],
                capture_output=True)
            if probe.returncode == 0:
                break
            time.sleep(0.2)
        yield url
    finally:
        proc.terminate()
        proc.wait(timeout=10)


def run_cli(*argv, check=True):
    result = subprocess.run(list(argv), capture_output=True, text=True)
    if check and result.returncode != 0:
        raise AssertionError(
            f"{argv} exited {result.returncode}\n"
            f"stdout:\n{result.stdout}\nstderr:\n{result.stderr}")
    return result
