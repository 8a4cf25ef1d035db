"""Build script: compiles the edit-distance extension when a toolchain is available.

The package works without the extension (a pure-Python kernel is selected at
import time), so any build failure here downgrades to a source-only install
instead of aborting.
"""

from setuptools import Extension, setup


def _extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension("insva._editdist", ["src/insva/_editdist.pyx"])
    return cythonize(
        [ext],
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "language_level": 3,
        },
    )


try:
    setup(ext_modules=_extensions())
except Exception:
    setup(ext_modules=[])
