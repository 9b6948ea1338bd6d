"""Build script for the optional compiled kernel extension.

The package works without the extension (a numpy fallback is selected at
import time), so a failed compile degrades gracefully instead of aborting
the install.  Set CUBEREC_SKIP_NATIVE=1 to skip the extension on purpose.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """build_ext that downgrades compiler failures to a warning."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # toolchain missing entirely
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(f"WARNING: building the native kernels failed ({exc}); "
              "cuberec will use the pure-python kernels")


ext_modules = []
cmdclass = {}
if os.environ.get("CUBEREC_SKIP_NATIVE") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("cuberec._kernels._native",
                       ["src/cuberec/_kernels/_native.pyx"])],
            compiler_directives={
                "language_level": 3,
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "initializedcheck": False,
            },
        )
        cmdclass["build_ext"] = optional_build_ext
    except ImportError:
        print("WARNING: Cython not available; skipping the native kernels")

setup(ext_modules=ext_modules, cmdclass=cmdclass)
