"""Build script: compiles the optional Cython kernel.

The compiled extension is a pure accelerator. If Cython or a C compiler
is unavailable the install still succeeds and the package transparently
uses the pure-Python kernel (see fairdisc._kernel).
Set FAIRDISC_NO_EXT=1 to skip the extension on purpose.
"""

import os
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:
            _warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            _warn(exc)


def _warn(exc):
    sys.stderr.write(
        "warning: compiled kernel build failed (%s); "
        "falling back to the pure-Python kernel\n" % (exc,)
    )


def extensions():
    if os.environ.get("FAIRDISC_NO_EXT"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        _warn("Cython not installed")
        return []
    ext = Extension(
        "fairdisc._kernel._cykernel",
        ["src/fairdisc/_kernel/_cykernel.pyx"],
    )
    return cythonize(ext, language_level=3)


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
