"""Build script: compiles the optional accelerator extension when Cython and a
C toolchain are available, and silently falls back to the pure-NumPy backend
otherwise. The package is fully functional without the extension."""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Never fail the install because the extension would not compile."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            f"warning: building the compiled core failed ({exc}); "
            "installing with the pure-Python backend only",
            file=sys.stderr,
        )


extensions = []
try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "hyperwave._core._compiled",
                ["src/hyperwave/_core/_compiled.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    print("warning: Cython not found, skipping the compiled core", file=sys.stderr)

setup(ext_modules=extensions, cmdclass={"build_ext": optional_build_ext})
