"""Build script: compiles the optional fast-kernel extension.

The package works without the extension (a numpy fallback is selected at
import time), so compilation failures are downgraded to warnings. Set
INCOMEATLAS_SKIP_EXT=1 to skip the extension entirely.
"""

import os
import warnings

from setuptools import setup
from setuptools.command.build_ext import build_ext
from setuptools.extension import Extension


class optional_build_ext(build_ext):
    """Build the extension if possible; fall back to pure Python if not."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            warnings.warn(f"fast kernels not built ({exc}); using numpy fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"fast kernels not built ({exc}); using numpy fallback")


ext_modules = []
if not os.environ.get("INCOMEATLAS_SKIP_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "incomeatlas._kernels._ckernels",
                    ["src/incomeatlas/_kernels/_ckernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        warnings.warn("Cython not available; using numpy fallback kernels")

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
