"""Builds the C++ extension through CMake and drops it into the package.

Kept as a thin shim: metadata lives in pyproject.toml, the real build logic
in CMakeLists.txt.
"""

import shutil
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        source = Path(__file__).resolve().parent
        build = Path(self.build_temp).resolve() / "cmake"
        build.mkdir(parents=True, exist_ok=True)

        configure = [
            "cmake",
            "-S", str(source),
            "-B", str(build),
            "-DCMAKE_BUILD_TYPE=Release",
            "-DVRPSC_BUILD_PYTHON=ON",
            f"-DPython3_EXECUTABLE={sys.executable}",
        ]
        try:  # prefer the pip-installed pybind11 over any system copy
            cmakedir = subprocess.check_output(
                [sys.executable, "-m", "pybind11", "--cmakedir"], text=True
            ).strip()
            configure.append(f"-Dpybind11_DIR={cmakedir}")
        except (subprocess.CalledProcessError, FileNotFoundError):
            pass
        subprocess.run(configure, check=True)
        subprocess.run(
            ["cmake", "--build", str(build), "--target", "_vrpsc"], check=True
        )

        artifacts = sorted(build.glob("_vrpsc*.so")) or sorted(
            build.glob("**/_vrpsc*.so")
        )
        if not artifacts:
            raise RuntimeError("cmake produced no _vrpsc extension module")
        destination = Path(self.get_ext_fullpath(ext.name)).resolve()
        destination.parent.mkdir(parents=True, exist_ok=True)
        shutil.copy2(artifacts[0], destination)


setup(
    ext_modules=[CMakeExtension("vrpsc._vrpsc")],
    cmdclass={"build_ext": CMakeBuild},
)
